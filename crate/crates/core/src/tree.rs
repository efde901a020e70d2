//! Recursive split/leaf tree shared by ID3 and C4.5. Every node carries the
//! class distribution of the training instances that reached it.

use serde::{Deserialize, Serialize};

use crate::dataset::Attribute;
use crate::stats::ClassCounts;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        /// Majority class of `counts` (ties resolved to the class declared
        /// first); empty-branch leaves carry the parent's majority with
        /// zero counts.
        label: usize,
        counts: ClassCounts,
    },
    /// Multiway split with one child per declared nominal value.
    NominalSplit {
        attribute: usize,
        counts: ClassCounts,
        children: Vec<Node>,
    },
    /// Binary split: `below` takes values <= threshold, `above` the rest.
    NumericSplit {
        attribute: usize,
        threshold: f64,
        counts: ClassCounts,
        below: Box<Node>,
        above: Box<Node>,
    },
}

impl Node {
    pub fn counts(&self) -> &ClassCounts {
        match self {
            Node::Leaf { counts, .. }
            | Node::NominalSplit { counts, .. }
            | Node::NumericSplit { counts, .. } => counts,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Node::Leaf { .. })
    }

    fn count_nodes(&self) -> usize {
        match self {
            Node::Leaf { .. } => 1,
            Node::NominalSplit { children, .. } => {
                1 + children.iter().map(Node::count_nodes).sum::<usize>()
            }
            Node::NumericSplit { below, above, .. } => {
                1 + below.count_nodes() + above.count_nodes()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub root: Node,
}

/// Outcome of a strict (ID3-style) traversal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prediction {
    Class(usize),
    /// The instance could not be routed to a leaf (missing value at a split).
    Unclassified,
}

impl TreeModel {
    /// Total number of nodes, splits and leaves included.
    pub fn node_count(&self) -> usize {
        self.root.count_nodes()
    }

    pub fn num_leaves(&self) -> usize {
        fn leaves(n: &Node) -> usize {
            match n {
                Node::Leaf { .. } => 1,
                Node::NominalSplit { children, .. } => children.iter().map(leaves).sum(),
                Node::NumericSplit { below, above, .. } => leaves(below) + leaves(above),
            }
        }
        leaves(&self.root)
    }

    /// One node per line; children indented by `|  `. Leaves render as
    /// `<attr> = <value>: <class> (n)`; numeric splits as
    /// `<attr> <= <threshold>` / `<attr> > <threshold>`. A tree that is a
    /// single leaf renders as `: <class> (n)`.
    pub fn render(&self, attributes: &[Attribute], class_index: usize) -> String {
        let class_values = attributes[class_index]
            .values()
            .expect("class attribute is nominal");
        let mut out = String::new();
        match &self.root {
            Node::Leaf { label, counts } => {
                out.push_str(&format!(
                    ": {} ({})\n",
                    class_values[*label],
                    format_weight(counts.total())
                ));
            }
            split => render_split(split, attributes, class_values, 0, &mut out),
        }
        out
    }
}

fn render_split(
    node: &Node,
    attributes: &[Attribute],
    class_values: &[String],
    depth: usize,
    out: &mut String,
) {
    let indent = "|  ".repeat(depth);
    match node {
        Node::Leaf { .. } => unreachable!("render_split is only called on splits"),
        Node::NominalSplit {
            attribute,
            children,
            ..
        } => {
            let name = &attributes[*attribute].name;
            let values = attributes[*attribute].values().expect("nominal split");
            for (value, child) in values.iter().zip(children) {
                render_branch(
                    &format!("{indent}{name} = {value}"),
                    child,
                    attributes,
                    class_values,
                    depth,
                    out,
                );
            }
        }
        Node::NumericSplit {
            attribute,
            threshold,
            below,
            above,
            ..
        } => {
            let name = &attributes[*attribute].name;
            render_branch(
                &format!("{indent}{name} <= {threshold}"),
                below,
                attributes,
                class_values,
                depth,
                out,
            );
            render_branch(
                &format!("{indent}{name} > {threshold}"),
                above,
                attributes,
                class_values,
                depth,
                out,
            );
        }
    }
}

fn render_branch(
    head: &str,
    child: &Node,
    attributes: &[Attribute],
    class_values: &[String],
    depth: usize,
    out: &mut String,
) {
    match child {
        Node::Leaf { label, counts } => {
            out.push_str(&format!(
                "{head}: {} ({})\n",
                class_values[*label],
                format_weight(counts.total())
            ));
        }
        split => {
            out.push_str(head);
            out.push('\n');
            render_split(split, attributes, class_values, depth + 1, out);
        }
    }
}

/// Integral weights print without decimals; fractional ones with two.
pub(crate) fn format_weight(w: f64) -> String {
    if (w - w.round()).abs() < 1e-9 {
        format!("{}", w.round() as i64)
    } else {
        format!("{w:.2}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Attribute;

    fn counts(values: &[f64]) -> ClassCounts {
        let mut c = ClassCounts::new(values.len());
        for (i, &v) in values.iter().enumerate() {
            c.add(i, v);
        }
        c
    }

    fn attrs() -> Vec<Attribute> {
        vec![
            Attribute::nominal("color", ["red", "blue"]),
            Attribute::numeric("size"),
            Attribute::nominal("class", ["yes", "no"]),
        ]
    }

    #[test]
    fn single_leaf_renders_bare() {
        let t = TreeModel {
            root: Node::Leaf {
                label: 1,
                counts: counts(&[1.0, 3.0]),
            },
        };
        assert_eq!(t.render(&attrs(), 2), ": no (4)\n");
        assert_eq!(t.node_count(), 1);
    }

    #[test]
    fn nested_tree_renders_weka_like() {
        let t = TreeModel {
            root: Node::NominalSplit {
                attribute: 0,
                counts: counts(&[3.0, 2.0]),
                children: vec![
                    Node::Leaf {
                        label: 0,
                        counts: counts(&[3.0, 0.0]),
                    },
                    Node::NumericSplit {
                        attribute: 1,
                        threshold: 5.0,
                        counts: counts(&[0.0, 2.0]),
                        below: Box::new(Node::Leaf {
                            label: 1,
                            counts: counts(&[0.0, 1.5]),
                        }),
                        above: Box::new(Node::Leaf {
                            label: 1,
                            counts: counts(&[0.0, 0.5]),
                        }),
                    },
                ],
            },
        };
        let expected = "\
color = red: yes (3)
color = blue
|  size <= 5: no (1.50)
|  size > 5: no (0.50)
";
        assert_eq!(t.render(&attrs(), 2), expected);
        assert_eq!(t.node_count(), 5);
        assert_eq!(t.num_leaves(), 3);
    }
}
