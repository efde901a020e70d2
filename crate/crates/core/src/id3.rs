//! ID3 induction: multiway nominal splits chosen by maximum information
//! gain, no pruning. Training rejects numeric attributes and missing
//! values; prediction is a strict single-path traversal that reports
//! `Unclassified` when a missing cell blocks the route.

use crate::dataset::{Cell, Dataset, Instance};
use crate::error::{Error, Result};
use crate::stats::{self, ClassCounts};
use crate::tree::{Node, Prediction, TreeModel};

/// Grows an unpruned ID3 tree.
///
/// Recursion stops with a leaf when all instances share a class, when no
/// attributes remain on the path, or when a branch receives no instances
/// (such leaves inherit the parent partition's majority class).
pub fn train(d: &Dataset) -> Result<TreeModel> {
    if d.instances.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    for (i, a) in d.attributes.iter().enumerate() {
        if i != d.class_index && !a.is_nominal() {
            return Err(Error::NumericNotSupported {
                algorithm: "ID3",
                attribute: a.name.clone(),
            });
        }
    }
    for (row, inst) in d.instances.iter().enumerate() {
        for (col, cell) in inst.cells.iter().enumerate() {
            if cell.is_missing() {
                return Err(Error::MissingNotSupported {
                    algorithm: "ID3",
                    instance: row,
                    attribute: d.attributes[col].name.clone(),
                });
            }
        }
    }

    let view = stats::full_view(d);
    let mut used = vec![false; d.num_attributes()];
    used[d.class_index] = true;
    let root = grow(d, &view, &mut used)?;
    Ok(TreeModel { root })
}

fn grow(d: &Dataset, view: &[(usize, f64)], used: &mut Vec<bool>) -> Result<Node> {
    let counts = stats::class_counts(d, view);
    let label = counts.majority();
    let attributes_left = used.iter().any(|&u| !u);
    if counts.is_pure() || !attributes_left {
        return Ok(Node::Leaf { label, counts });
    }

    // highest information gain; ties (within tolerance) go to the lowest
    // attribute index
    let mut best: Option<(usize, f64)> = None;
    for attr in 0..d.num_attributes() {
        if used[attr] {
            continue;
        }
        let gain = stats::info_gain(d, view, attr)?;
        if best.map_or(true, |(_, g)| gain > g + stats::TIE_EPS) {
            best = Some((attr, gain));
        }
    }
    let (attr, _) = best.expect("at least one attribute remains");

    let arity = d.attributes[attr].values().expect("nominal").len();
    let mut partitions: Vec<Vec<(usize, f64)>> = vec![Vec::new(); arity];
    for &(row, w) in view {
        match d.instances[row].cells[attr] {
            Cell::Nominal(v) => partitions[v].push((row, w)),
            _ => unreachable!("missing cells were rejected up front"),
        }
    }

    used[attr] = true;
    let mut children = Vec::with_capacity(arity);
    for part in &partitions {
        if part.is_empty() {
            // unobserved declared value: predict the parent's majority
            children.push(Node::Leaf {
                label,
                counts: ClassCounts::new(d.num_classes()),
            });
        } else {
            children.push(grow(d, part, used)?);
        }
    }
    used[attr] = false;

    Ok(Node::NominalSplit {
        attribute: attr,
        counts,
        children,
    })
}

/// Strict traversal: follows the single branch matching each split value.
/// A missing cell at a split yields [`Prediction::Unclassified`].
pub fn predict(t: &TreeModel, x: &Instance) -> Result<Prediction> {
    let mut node = &t.root;
    loop {
        match node {
            Node::Leaf { label, .. } => return Ok(Prediction::Class(*label)),
            Node::NominalSplit {
                attribute,
                children,
                ..
            } => {
                if *attribute >= x.cells.len() {
                    return Err(Error::SchemaMismatch(format!(
                        "instance has {} cells but the tree tests attribute {}",
                        x.cells.len(),
                        attribute
                    )));
                }
                match x.cells[*attribute] {
                    Cell::Nominal(v) => {
                        node = children.get(v).ok_or_else(|| {
                            Error::SchemaMismatch(format!(
                                "value index {v} out of range at attribute {attribute}"
                            ))
                        })?;
                    }
                    Cell::Missing => return Ok(Prediction::Unclassified),
                    Cell::Number(_) => {
                        return Err(Error::SchemaMismatch(format!(
                            "numeric cell under nominal split attribute {attribute}"
                        )))
                    }
                }
            }
            Node::NumericSplit {
                attribute,
                threshold,
                below,
                above,
                ..
            } => match x.cells.get(*attribute) {
                Some(Cell::Number(value)) => {
                    node = if *value <= *threshold { below } else { above };
                }
                Some(Cell::Missing) => return Ok(Prediction::Unclassified),
                _ => {
                    return Err(Error::SchemaMismatch(format!(
                        "expected a numeric cell at attribute {attribute}"
                    )))
                }
            },
        }
    }
}
