//! C4.5 induction: gain-ratio split selection with an above-average-gain
//! pre-filter, binary threshold splits on numeric attributes, fractional
//! instance weights for missing values, and pessimistic (confidence-bound)
//! pruning by subtree replacement.

use crate::dataset::{Cell, Dataset, Instance};
use crate::error::{Error, Result};
use crate::stats::{self, ClassCounts};
use crate::tree::{Node, TreeModel};

/// Training parameters.
#[derive(Clone, Copy, Debug)]
pub struct C45Params {
    /// Confidence factor for the pessimistic error bound, in (0, 0.5].
    /// Smaller values prune harder; 0.5 effectively disables pruning.
    pub confidence_factor: f64,
    /// Minimum total instance weight a split must place in at least two
    /// branches.
    pub min_leaf_weight: f64,
    /// Restrict the gain-ratio argmax to attributes whose gain is at least
    /// the average gain over all candidate splits; guards against
    /// division-by-small-split-info pathologies.
    pub gain_average_filter: bool,
}

impl Default for C45Params {
    fn default() -> C45Params {
        C45Params {
            confidence_factor: 0.25,
            min_leaf_weight: 2.0,
            gain_average_filter: true,
        }
    }
}

const GAIN_EPS: f64 = 1e-12;

/// Grows and then prunes; the standard entry point.
pub fn train(d: &Dataset, params: &C45Params) -> Result<TreeModel> {
    let grown = grow(d, params)?;
    Ok(prune(&grown, params))
}

/// Grow phase only (no pruning). Instances whose class cell is missing are
/// ignored; missing predictor cells descend into every branch with weight
/// scaled by the branch's share of known instances.
pub fn grow(d: &Dataset, params: &C45Params) -> Result<TreeModel> {
    if d.instances.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let view: Vec<(usize, f64)> = (0..d.num_instances())
        .filter(|&row| d.class_of(row).is_some())
        .map(|row| (row, 1.0))
        .collect();
    if view.is_empty() {
        return Err(Error::AllClassesMissing);
    }
    let mut used = vec![false; d.num_attributes()];
    used[d.class_index] = true;
    Ok(TreeModel {
        root: grow_node(d, &view, &mut used, params),
    })
}

/// A split candidate with its quality statistics.
struct Candidate {
    attribute: usize,
    threshold: Option<f64>,
    gain: f64,
    ratio: f64,
}

fn grow_node(
    d: &Dataset,
    view: &[(usize, f64)],
    used: &mut Vec<bool>,
    params: &C45Params,
) -> Node {
    let counts = stats::class_counts(d, view);
    let label = counts.majority();
    let total = counts.total();
    if counts.is_pure() || total < 2.0 * params.min_leaf_weight {
        return Node::Leaf { label, counts };
    }

    let mut candidates: Vec<Candidate> = Vec::new();
    for attr in 0..d.num_attributes() {
        if attr == d.class_index {
            continue;
        }
        let candidate = if d.attributes[attr].is_nominal() {
            if used[attr] {
                continue;
            }
            evaluate_nominal(d, view, attr, total, params)
        } else {
            evaluate_numeric(d, view, attr, total, params)
        };
        if let Some(c) = candidate {
            candidates.push(c);
        }
    }
    if candidates.is_empty() {
        return Node::Leaf { label, counts };
    }

    let avg_gain = candidates.iter().map(|c| c.gain).sum::<f64>() / candidates.len() as f64;
    let mut best: Option<&Candidate> = None;
    for c in &candidates {
        if params.gain_average_filter && c.gain < avg_gain - stats::TIE_EPS {
            continue;
        }
        if best.map_or(true, |b| c.ratio > b.ratio + stats::TIE_EPS) {
            best = Some(c);
        }
    }
    let best = best.expect("the max-gain candidate always passes the filter");
    if best.gain <= GAIN_EPS {
        return Node::Leaf { label, counts };
    }
    let (attribute, threshold) = (best.attribute, best.threshold);

    // Partition: known values to their branch, missing across all branches
    // in proportion to the branches' known weight.
    let branches: Vec<Vec<(usize, f64)>> = match threshold {
        None => {
            let arity = d.attributes[attribute].values().expect("nominal").len();
            let mut known_weight = vec![0.0; arity];
            let mut known_total = 0.0;
            for &(row, w) in view {
                if let Cell::Nominal(v) = d.instances[row].cells[attribute] {
                    known_weight[v] += w;
                    known_total += w;
                }
            }
            let mut parts: Vec<Vec<(usize, f64)>> = vec![Vec::new(); arity];
            for &(row, w) in view {
                match d.instances[row].cells[attribute] {
                    Cell::Nominal(v) => parts[v].push((row, w)),
                    _ => {
                        for (v, part) in parts.iter_mut().enumerate() {
                            let f = known_weight[v] / known_total;
                            if f > 0.0 {
                                part.push((row, w * f));
                            }
                        }
                    }
                }
            }
            parts
        }
        Some(t) => {
            let mut below_weight = 0.0;
            let mut above_weight = 0.0;
            for &(row, w) in view {
                if let Cell::Number(x) = d.instances[row].cells[attribute] {
                    if x <= t {
                        below_weight += w;
                    } else {
                        above_weight += w;
                    }
                }
            }
            let known_total = below_weight + above_weight;
            let mut below = Vec::new();
            let mut above = Vec::new();
            for &(row, w) in view {
                match d.instances[row].cells[attribute] {
                    Cell::Number(x) => {
                        if x <= t {
                            below.push((row, w));
                        } else {
                            above.push((row, w));
                        }
                    }
                    _ => {
                        let fb = below_weight / known_total;
                        let fa = above_weight / known_total;
                        if fb > 0.0 {
                            below.push((row, w * fb));
                        }
                        if fa > 0.0 {
                            above.push((row, w * fa));
                        }
                    }
                }
            }
            vec![below, above]
        }
    };

    let is_nominal = threshold.is_none();
    if is_nominal {
        used[attribute] = true;
    }
    let children: Vec<Node> = branches
        .iter()
        .map(|part| {
            if part.is_empty() {
                Node::Leaf {
                    label,
                    counts: ClassCounts::new(d.num_classes()),
                }
            } else {
                grow_node(d, part, used, params)
            }
        })
        .collect();
    if is_nominal {
        used[attribute] = false;
    }

    match threshold {
        None => Node::NominalSplit {
            attribute,
            counts,
            children,
        },
        Some(t) => {
            let mut iter = children.into_iter();
            let below = iter.next().expect("two children");
            let above = iter.next().expect("two children");
            Node::NumericSplit {
                attribute,
                threshold: t,
                counts,
                below: Box::new(below),
                above: Box::new(above),
            }
        }
    }
}

fn evaluate_nominal(
    d: &Dataset,
    view: &[(usize, f64)],
    attr: usize,
    view_total: f64,
    params: &C45Params,
) -> Option<Candidate> {
    let arity = d.attributes[attr].values().expect("nominal").len();
    let mut children = vec![ClassCounts::new(d.num_classes()); arity];
    let mut parent = ClassCounts::new(d.num_classes());
    let mut missing = 0.0;
    for &(row, w) in view {
        match d.instances[row].cells[attr] {
            Cell::Nominal(v) => {
                let c = d.class_of(row).expect("view holds known classes");
                children[v].add(c, w);
                parent.add(c, w);
            }
            _ => missing += w,
        }
    }
    let known_total = parent.total();
    if known_total <= 0.0 {
        return None;
    }
    let big_enough = children
        .iter()
        .filter(|c| c.total() >= params.min_leaf_weight)
        .count();
    if big_enough < 2 {
        return None;
    }
    let gain = known_total / view_total * stats::gain_from_partition(&parent, &children);
    let sizes = children
        .iter()
        .map(|c| c.total())
        .chain(std::iter::once(missing));
    let si = stats::split_info_from_sizes(view_total, sizes);
    let ratio = if si > 0.0 { gain / si } else { 0.0 };
    Some(Candidate {
        attribute: attr,
        threshold: None,
        gain,
        ratio,
    })
}

fn evaluate_numeric(
    d: &Dataset,
    view: &[(usize, f64)],
    attr: usize,
    view_total: f64,
    params: &C45Params,
) -> Option<Candidate> {
    let mut known: Vec<(f64, usize, f64)> = Vec::new(); // (value, class, weight)
    let mut parent = ClassCounts::new(d.num_classes());
    let mut missing = 0.0;
    for &(row, w) in view {
        match d.instances[row].cells[attr] {
            Cell::Number(x) => {
                let c = d.class_of(row).expect("view holds known classes");
                known.push((x, c, w));
                parent.add(c, w);
            }
            _ => missing += w,
        }
    }
    let known_total = parent.total();
    if known_total <= 0.0 {
        return None;
    }
    known.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite values"));

    // candidate thresholds: midpoints between consecutive distinct values
    let mut best: Option<(f64, f64, ClassCounts, ClassCounts)> = None; // (gain, threshold, below, above)
    let mut below = ClassCounts::new(d.num_classes());
    let mut i = 0;
    while i < known.len() {
        // absorb all instances sharing this value
        let value = known[i].0;
        while i < known.len() && known[i].0 == value {
            below.add(known[i].1, known[i].2);
            i += 1;
        }
        if i == known.len() {
            break;
        }
        let threshold = (value + known[i].0) / 2.0;
        let below_total = below.total();
        let above_total = known_total - below_total;
        if below_total < params.min_leaf_weight || above_total < params.min_leaf_weight {
            continue;
        }
        let mut above = parent.clone();
        for class in 0..d.num_classes() {
            above.add(class, -below.count(class));
        }
        let gain = stats::gain_from_partition(&parent, &[below.clone(), above.clone()]);
        // improvement must clear the tie tolerance, keeping the smallest
        // threshold on ties
        if best.as_ref().map_or(true, |(g, _, _, _)| gain > *g + stats::TIE_EPS) {
            best = Some((gain, threshold, below.clone(), above));
        }
    }
    let (gain_known, threshold, below, above) = best?;
    let gain = known_total / view_total * gain_known;
    let sizes = [below.total(), above.total(), missing];
    let si = stats::split_info_from_sizes(view_total, sizes);
    let ratio = if si > 0.0 { gain / si } else { 0.0 };
    Some(Candidate {
        attribute: attr,
        threshold: Some(threshold),
        gain,
        ratio,
    })
}

/// Upper confidence bound on the true error rate of a leaf observing
/// `errors` wrong out of `n`, at confidence factor `cf`: the error
/// probability `p` for which the binomial CDF `P[X <= errors]` equals `cf`.
/// Fractional counts generalize through the regularized incomplete beta
/// function.
pub fn upper_error_bound(errors: f64, n: f64, cf: f64) -> f64 {
    assert!(n > 0.0, "bound needs a positive sample weight");
    let e = errors.clamp(0.0, n);
    if n - e < 1e-12 {
        return 1.0;
    }
    // P[X <= e] for X ~ Binomial(n, p) is I_{1-p}(n - e, e + 1)
    let cdf = |p: f64| statrs::function::beta::beta_reg(n - e, e + 1.0, 1.0 - p);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) > cf {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `N * U_cf(E, N)`: the pessimistic error count of a leaf.
fn pessimistic_errors(counts: &ClassCounts, cf: f64) -> f64 {
    let n = counts.total();
    if n <= 0.0 {
        return 0.0;
    }
    n * upper_error_bound(counts.errors(), n, cf)
}

fn subtree_pessimistic_errors(node: &Node, cf: f64) -> f64 {
    match node {
        Node::Leaf { counts, .. } => pessimistic_errors(counts, cf),
        Node::NominalSplit { children, .. } => children
            .iter()
            .map(|c| subtree_pessimistic_errors(c, cf))
            .sum(),
        Node::NumericSplit { below, above, .. } => {
            subtree_pessimistic_errors(below, cf) + subtree_pessimistic_errors(above, cf)
        }
    }
}

/// Bottom-up subtree replacement: a split collapses to a leaf when the
/// leaf's pessimistic error estimate is no worse than the sum over the
/// (already pruned) subtree's leaves. Never increases the node count and is
/// idempotent.
pub fn prune(t: &TreeModel, params: &C45Params) -> TreeModel {
    TreeModel {
        root: prune_node(&t.root, params.confidence_factor),
    }
}

fn prune_node(node: &Node, cf: f64) -> Node {
    match node {
        Node::Leaf { .. } => node.clone(),
        Node::NominalSplit {
            attribute,
            counts,
            children,
        } => {
            let pruned: Vec<Node> = children.iter().map(|c| prune_node(c, cf)).collect();
            let as_split = Node::NominalSplit {
                attribute: *attribute,
                counts: counts.clone(),
                children: pruned,
            };
            collapse_if_no_worse(as_split, cf)
        }
        Node::NumericSplit {
            attribute,
            threshold,
            counts,
            below,
            above,
        } => {
            let as_split = Node::NumericSplit {
                attribute: *attribute,
                threshold: *threshold,
                counts: counts.clone(),
                below: Box::new(prune_node(below, cf)),
                above: Box::new(prune_node(above, cf)),
            };
            collapse_if_no_worse(as_split, cf)
        }
    }
}

fn collapse_if_no_worse(split: Node, cf: f64) -> Node {
    let counts = split.counts().clone();
    let leaf_errors = pessimistic_errors(&counts, cf);
    let subtree_errors = subtree_pessimistic_errors(&split, cf);
    if leaf_errors <= subtree_errors {
        Node::Leaf {
            label: counts.majority(),
            counts,
        }
    } else {
        split
    }
}

/// Predicts a class label and distribution. Missing cells at a split send
/// the instance down every branch with weight proportional to the branch's
/// training size; the result is the fraction-weighted sum of the reached
/// leaves' distributions. Never returns "unclassified".
pub fn predict(t: &TreeModel, x: &Instance) -> Result<(usize, Vec<f64>)> {
    let num_classes = t.root.counts().num_classes();
    let mut dist = vec![0.0; num_classes];
    descend(&t.root, x, 1.0, &mut dist)?;
    let mut label = 0;
    for i in 1..dist.len() {
        if dist[i] > dist[label] {
            label = i;
        }
    }
    Ok((label, dist))
}

fn descend(node: &Node, x: &Instance, fraction: f64, dist: &mut [f64]) -> Result<()> {
    match node {
        Node::Leaf { label, counts } => {
            let total = counts.total();
            if total > 0.0 {
                for class in 0..counts.num_classes() {
                    dist[class] += fraction * counts.count(class) / total;
                }
            } else {
                dist[*label] += fraction;
            }
            Ok(())
        }
        Node::NominalSplit {
            attribute,
            children,
            ..
        } => match x.cells.get(*attribute) {
            Some(Cell::Nominal(v)) => {
                let child = children.get(*v).ok_or_else(|| {
                    Error::SchemaMismatch(format!(
                        "value index {v} out of range at attribute {attribute}"
                    ))
                })?;
                descend(child, x, fraction, dist)
            }
            Some(Cell::Missing) => {
                let total: f64 = children.iter().map(|c| c.counts().total()).sum();
                for child in children {
                    let share = child.counts().total() / total;
                    if share > 0.0 {
                        descend(child, x, fraction * share, dist)?;
                    }
                }
                Ok(())
            }
            _ => Err(Error::SchemaMismatch(format!(
                "expected a nominal cell at attribute {attribute}"
            ))),
        },
        Node::NumericSplit {
            attribute,
            threshold,
            below,
            above,
            ..
        } => match x.cells.get(*attribute) {
            Some(Cell::Number(value)) => {
                let child = if *value <= *threshold { below } else { above };
                descend(child, x, fraction, dist)
            }
            Some(Cell::Missing) => {
                let total = below.counts().total() + above.counts().total();
                for child in [below, above] {
                    let share = child.counts().total() / total;
                    if share > 0.0 {
                        descend(child, x, fraction * share, dist)?;
                    }
                }
                Ok(())
            }
            _ => Err(Error::SchemaMismatch(format!(
                "expected a numeric cell at attribute {attribute}"
            ))),
        },
    }
}
