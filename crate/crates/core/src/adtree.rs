//! Alternating decision tree: a boosted structure of decision (splitter)
//! and prediction nodes. Scoring follows every path whose decision nodes
//! hold and sums the prediction values it traverses; the sign of the sum is
//! the class.
//!
//! Training adds one splitter per boosting round by minimizing
//! `Z(p, c) = 2 (sqrt(W+(p&c) W-(p&c)) + sqrt(W+(p&!c) W-(p&!c))) + W(!p)`
//! over every (existing prediction-node position `p`, nominal equality
//! condition `c`) pair, with +1-smoothed prediction values and exponential
//! reweighting.

use serde::{Deserialize, Serialize};

use crate::dataset::{Attribute, Cell, Dataset, Instance};
use crate::error::{Error, Result};

/// One conjunct of a splitter's precondition: follow splitter `id`'s
/// true or false branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathTerm {
    /// 1-based id of an earlier splitter.
    pub splitter: usize,
    pub branch: bool,
}

/// A decision node with its two prediction values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitterNode {
    /// 1-based boosting-iteration index.
    pub id: usize,
    /// Conjunction of earlier splitter branches; empty means "under the root".
    pub precondition: Vec<PathTerm>,
    /// The condition tests `attribute == value`.
    pub attribute: usize,
    pub value: usize,
    pub true_value: f64,
    pub false_value: f64,
}

/// How scoring treats a missing cell at a needed condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MissingPolicy {
    /// Raise an error (default).
    Strict,
    /// The instance follows neither branch of that splitter (contributes 0,
    /// and descendants of either branch are skipped).
    SkipSplitter,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdtModel {
    pub root_value: f64,
    pub splitters: Vec<SplitterNode>,
    /// Class value index mapped to the +1 boosting label.
    pub plus_class: usize,
    /// Class value index mapped to the -1 label.
    pub minus_class: usize,
}

/// Per-round training diagnostics.
#[derive(Clone, Debug)]
pub struct TrainTrace {
    /// Total instance weight before any round, after the root prediction,
    /// and after each boosting round.
    pub weight_totals: Vec<f64>,
    /// The totals the chosen rules predict analytically; index i matches
    /// `weight_totals[i + 1]`.
    pub expected_totals: Vec<f64>,
}

/// Trains an alternating decision tree with `iterations` splitter nodes.
/// The class attribute must be binary; the second declared class value is
/// the +1 class. All predictors must be nominal with no missing cells.
pub fn train(d: &Dataset, iterations: usize) -> Result<AdtModel> {
    Ok(train_traced(d, iterations)?.0)
}

pub fn train_traced(d: &Dataset, iterations: usize) -> Result<(AdtModel, TrainTrace)> {
    if d.instances.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if d.num_classes() != 2 {
        return Err(Error::NonBinaryClass {
            found: d.num_classes(),
        });
    }
    for (i, a) in d.attributes.iter().enumerate() {
        if i != d.class_index && !a.is_nominal() {
            return Err(Error::NumericNotSupported {
                algorithm: "the alternating decision tree",
                attribute: a.name.clone(),
            });
        }
    }
    for (row, inst) in d.instances.iter().enumerate() {
        for (col, cell) in inst.cells.iter().enumerate() {
            if cell.is_missing() {
                return Err(Error::MissingNotSupported {
                    algorithm: "the alternating decision tree",
                    instance: row,
                    attribute: d.attributes[col].name.clone(),
                });
            }
        }
    }

    let minus_class = 0;
    let plus_class = 1;
    let labels: Vec<f64> = (0..d.num_instances())
        .map(|row| {
            if d.class_of(row) == Some(plus_class) {
                1.0
            } else {
                -1.0
            }
        })
        .collect();
    let mut weights = vec![1.0f64; d.num_instances()];
    let mut trace = TrainTrace {
        weight_totals: vec![weights.iter().sum()],
        expected_totals: Vec::new(),
    };

    // root prediction over the initial weights, then the usual reweighting
    let (w_plus, w_minus) = signed_weight(&weights, &labels, 0..d.num_instances());
    let root_value = half_log_ratio(w_plus, w_minus);
    trace
        .expected_totals
        .push(w_plus * (-root_value).exp() + w_minus * root_value.exp());
    for (w, y) in weights.iter_mut().zip(&labels) {
        *w *= (-root_value * y).exp();
    }
    trace.weight_totals.push(weights.iter().sum());

    // candidate precondition positions; position 0 is the root
    struct Position {
        path: Vec<PathTerm>,
        members: Vec<usize>,
    }
    let mut positions = vec![Position {
        path: Vec::new(),
        members: (0..d.num_instances()).collect(),
    }];

    let mut splitters: Vec<SplitterNode> = Vec::new();
    for round in 1..=iterations {
        let total_weight: f64 = weights.iter().sum();

        // iterate attribute -> value -> position so equal-Z ties resolve to
        // the lowest (attribute, value, precondition id)
        struct Best {
            z: f64,
            attribute: usize,
            value: usize,
            position: usize,
            w: [f64; 4], // [+ true, - true, + false, - false]
            position_weight: f64,
        }
        let mut best: Option<Best> = None;
        for attr in 0..d.num_attributes() {
            if attr == d.class_index {
                continue;
            }
            let arity = d.attributes[attr].values().expect("nominal").len();
            // per position: weight of each (value, sign) bucket
            let mut buckets: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::with_capacity(positions.len());
            for pos in &positions {
                let mut plus = vec![0.0; arity];
                let mut minus = vec![0.0; arity];
                let mut pos_weight = 0.0;
                for &row in &pos.members {
                    let v = match d.instances[row].cells[attr] {
                        Cell::Nominal(v) => v,
                        _ => unreachable!("missing cells were rejected up front"),
                    };
                    pos_weight += weights[row];
                    if labels[row] > 0.0 {
                        plus[v] += weights[row];
                    } else {
                        minus[v] += weights[row];
                    }
                }
                buckets.push((plus, minus, pos_weight));
            }
            for value in 0..arity {
                for (pos_idx, (plus, minus, pos_weight)) in buckets.iter().enumerate() {
                    let wp_true = plus[value];
                    let wm_true = minus[value];
                    let wp_false: f64 = plus.iter().sum::<f64>() - wp_true;
                    let wm_false: f64 = minus.iter().sum::<f64>() - wm_true;
                    let z = 2.0 * ((wp_true * wm_true).sqrt() + (wp_false * wm_false).sqrt())
                        + (total_weight - pos_weight);
                    if best.as_ref().map_or(true, |b| z < b.z - crate::stats::TIE_EPS) {
                        best = Some(Best {
                            z,
                            attribute: attr,
                            value,
                            position: pos_idx,
                            w: [wp_true, wm_true, wp_false, wm_false],
                            position_weight: *pos_weight,
                        });
                    }
                }
            }
        }
        let best = best.expect("at least one candidate condition exists");

        let true_value = half_log_ratio(best.w[0], best.w[1]);
        let false_value = half_log_ratio(best.w[2], best.w[3]);
        trace.expected_totals.push(
            best.w[0] * (-true_value).exp()
                + best.w[1] * true_value.exp()
                + best.w[2] * (-false_value).exp()
                + best.w[3] * false_value.exp()
                + (total_weight - best.position_weight),
        );

        let parent_path = positions[best.position].path.clone();
        let mut precondition = parent_path.clone();
        let splitter = SplitterNode {
            id: round,
            precondition: parent_path,
            attribute: best.attribute,
            value: best.value,
            true_value,
            false_value,
        };

        // reweight members and spawn the two new prediction-node positions
        let mut true_members = Vec::new();
        let mut false_members = Vec::new();
        for &row in &positions[best.position].members {
            let matches = d.instances[row].cells[best.attribute] == Cell::Nominal(best.value);
            let r = if matches { true_value } else { false_value };
            weights[row] *= (-r * labels[row]).exp();
            if matches {
                true_members.push(row);
            } else {
                false_members.push(row);
            }
        }
        precondition.push(PathTerm {
            splitter: round,
            branch: true,
        });
        positions.push(Position {
            path: precondition.clone(),
            members: true_members,
        });
        let last = precondition.last_mut().expect("just pushed");
        last.branch = false;
        positions.push(Position {
            path: precondition,
            members: false_members,
        });

        splitters.push(splitter);
        trace.weight_totals.push(weights.iter().sum());
    }

    Ok((
        AdtModel {
            root_value,
            splitters,
            plus_class,
            minus_class,
        },
        trace,
    ))
}

/// `0.5 * ln((w_plus + 1) / (w_minus + 1))` — the smoothed prediction value.
fn half_log_ratio(w_plus: f64, w_minus: f64) -> f64 {
    0.5 * ((w_plus + 1.0) / (w_minus + 1.0)).ln()
}

fn signed_weight(
    weights: &[f64],
    labels: &[f64],
    rows: impl Iterator<Item = usize>,
) -> (f64, f64) {
    let mut plus = 0.0;
    let mut minus = 0.0;
    for row in rows {
        if labels[row] > 0.0 {
            plus += weights[row];
        } else {
            minus += weights[row];
        }
    }
    (plus, minus)
}

/// Root value plus every prediction value on a satisfied path. Missing
/// cells raise an error.
pub fn score(m: &AdtModel, x: &Instance) -> Result<f64> {
    score_with_policy(m, x, MissingPolicy::Strict)
}

pub fn score_with_policy(m: &AdtModel, x: &Instance, policy: MissingPolicy) -> Result<f64> {
    // satisfied[id - 1] = (true-branch reached, false-branch reached)
    let mut satisfied = vec![(false, false); m.splitters.len()];
    let mut total = m.root_value;
    for s in &m.splitters {
        let active = s.precondition.iter().all(|term| {
            let (t, f) = satisfied[term.splitter - 1];
            if term.branch {
                t
            } else {
                f
            }
        });
        if !active {
            continue;
        }
        match x.cells.get(s.attribute) {
            Some(Cell::Nominal(v)) => {
                if *v == s.value {
                    total += s.true_value;
                    satisfied[s.id - 1].0 = true;
                } else {
                    total += s.false_value;
                    satisfied[s.id - 1].1 = true;
                }
            }
            Some(Cell::Missing) => match policy {
                MissingPolicy::Strict => {
                    return Err(Error::MissingAtCondition {
                        attribute: format!("#{}", s.attribute),
                    })
                }
                MissingPolicy::SkipSplitter => {}
            },
            _ => {
                return Err(Error::SchemaMismatch(format!(
                    "expected a nominal cell at attribute {}",
                    s.attribute
                )))
            }
        }
    }
    Ok(total)
}

/// Sign rule: a positive (or zero) score predicts the +1 class.
pub fn classify(m: &AdtModel, x: &Instance) -> Result<usize> {
    classify_with_policy(m, x, MissingPolicy::Strict)
}

pub fn classify_with_policy(m: &AdtModel, x: &Instance, policy: MissingPolicy) -> Result<usize> {
    let s = score_with_policy(m, x, policy)?;
    Ok(if s >= 0.0 { m.plus_class } else { m.minus_class })
}

/// Renders the model in the numbered splitter format: the root line
/// `: <value>`, then per splitter `| (<id>)<attr> = <val>: <value>` and
/// `| (<id>)<attr> != <val>: <value>`, nested one `| ` deeper per
/// precondition term.
pub fn render(m: &AdtModel, attributes: &[Attribute]) -> String {
    let mut out = format!(": {}\n", format_value(m.root_value));
    render_children(m, attributes, &[], 0, &mut out);
    out
}

fn render_children(
    m: &AdtModel,
    attributes: &[Attribute],
    path: &[PathTerm],
    depth: usize,
    out: &mut String,
) {
    for s in &m.splitters {
        if s.precondition != path {
            continue;
        }
        let indent = "| ".repeat(depth + 1);
        let name = &attributes[s.attribute].name;
        let value = &attributes[s.attribute].values().expect("nominal")[s.value];
        let mut child_path = path.to_vec();

        out.push_str(&format!(
            "{indent}({}){name} = {value}: {}\n",
            s.id,
            format_value(s.true_value)
        ));
        child_path.push(PathTerm {
            splitter: s.id,
            branch: true,
        });
        render_children(m, attributes, &child_path, depth + 1, out);

        out.push_str(&format!(
            "{indent}({}){name} != {value}: {}\n",
            s.id,
            format_value(s.false_value)
        ));
        child_path.last_mut().expect("just pushed").branch = false;
        render_children(m, attributes, &child_path, depth + 1, out);
    }
}

/// Three decimals with trailing zeros trimmed, matching the figure style.
fn format_value(v: f64) -> String {
    let mut s = format!("{v:.3}");
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.pop();
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}
