//! Impurity statistics shared by the tree growers: entropy, information
//! gain, split information and gain ratio, all in bits (base-2 logs).
//!
//! Counts are real-valued so C4.5's fractional-weight missing handling can
//! reuse the same code. Instances whose relevant cell (attribute under test
//! or class) is missing are skipped; the owning algorithm decides what to
//! do with them.

use serde::{Deserialize, Serialize};

use crate::dataset::{Cell, Dataset};
use crate::error::{Error, Result};

/// Tolerance for comparing competing split scores: differences within this
/// are ties (broken by the lowest index), so selection is stable against
/// floating-point summation order.
pub const TIE_EPS: f64 = 1e-9;

/// Per-class nonnegative weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassCounts {
    counts: Vec<f64>,
}

impl ClassCounts {
    pub fn new(num_classes: usize) -> ClassCounts {
        ClassCounts {
            counts: vec![0.0; num_classes],
        }
    }

    pub fn add(&mut self, class: usize, weight: f64) {
        self.counts[class] += weight;
    }

    pub fn count(&self, class: usize) -> f64 {
        self.counts[class]
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn num_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    /// Class with the largest weight; ties go to the class declared first.
    pub fn majority(&self) -> usize {
        let mut best = 0;
        for (i, &c) in self.counts.iter().enumerate().skip(1) {
            if c > self.counts[best] {
                best = i;
            }
        }
        best
    }

    /// Weight not belonging to the majority class.
    pub fn errors(&self) -> f64 {
        self.total() - self.counts[self.majority()]
    }

    pub fn is_pure(&self) -> bool {
        self.errors() < 1e-9
    }

    pub fn entropy(&self) -> f64 {
        entropy(self)
    }
}

/// Shannon entropy in bits; an empty distribution has entropy 0.
pub fn entropy(counts: &ClassCounts) -> f64 {
    let total = counts.total();
    if total <= 0.0 {
        return 0.0;
    }
    let mut h = 0.0;
    for &c in counts.counts() {
        if c > 0.0 {
            let p = c / total;
            h -= p * p.log2();
        }
    }
    h
}

/// A weighted slice of a dataset: `(instance index, weight)` pairs.
pub type WeightedView = [(usize, f64)];

/// Every instance with weight 1.
pub fn full_view(d: &Dataset) -> Vec<(usize, f64)> {
    (0..d.num_instances()).map(|i| (i, 1.0)).collect()
}

/// Class weights over a view; instances with a missing class cell are skipped.
pub fn class_counts(d: &Dataset, view: &WeightedView) -> ClassCounts {
    let mut counts = ClassCounts::new(d.num_classes());
    for &(row, w) in view {
        if let Some(c) = d.class_of(row) {
            counts.add(c, w);
        }
    }
    counts
}

/// Gain of a partition given the parent distribution and the child
/// distributions: `H(parent) - sum(|child|/|parent| * H(child))`.
pub fn gain_from_partition(parent: &ClassCounts, children: &[ClassCounts]) -> f64 {
    let total = parent.total();
    if total <= 0.0 {
        return 0.0;
    }
    let mut weighted = 0.0;
    for child in children {
        let t = child.total();
        if t > 0.0 {
            weighted += t / total * entropy(child);
        }
    }
    entropy(parent) - weighted
}

fn nominal_partition(
    d: &Dataset,
    view: &WeightedView,
    attribute: usize,
) -> Result<(ClassCounts, Vec<ClassCounts>)> {
    if view.is_empty() {
        return Err(Error::InvalidDataset("empty dataset view".into()));
    }
    if attribute == d.class_index {
        return Err(Error::InvalidDataset(
            "cannot split on the class attribute".into(),
        ));
    }
    let arity = match d.attributes[attribute].values() {
        Some(values) => values.len(),
        None => {
            return Err(Error::InvalidDataset(format!(
                "attribute '{}' is numeric; impurity statistics need a nominal attribute",
                d.attributes[attribute].name
            )))
        }
    };
    let mut parent = ClassCounts::new(d.num_classes());
    let mut children = vec![ClassCounts::new(d.num_classes()); arity];
    for &(row, w) in view {
        let value = match d.instances[row].cells[attribute] {
            Cell::Nominal(v) => v,
            _ => continue, // missing at the attribute: skipped here
        };
        if let Some(c) = d.class_of(row) {
            parent.add(c, w);
            children[value].add(c, w);
        }
    }
    Ok((parent, children))
}

/// Information gain of partitioning `view` by the nominal attribute.
pub fn info_gain(d: &Dataset, view: &WeightedView, attribute: usize) -> Result<f64> {
    let (parent, children) = nominal_partition(d, view, attribute)?;
    Ok(gain_from_partition(&parent, &children))
}

/// Entropy of the partition sizes themselves.
pub fn split_info(d: &Dataset, view: &WeightedView, attribute: usize) -> Result<f64> {
    let (parent, children) = nominal_partition(d, view, attribute)?;
    Ok(split_info_from_sizes(
        parent.total(),
        children.iter().map(|c| c.total()),
    ))
}

/// `-sum(f_i * log2(f_i))` over branch weight fractions `f_i`.
pub fn split_info_from_sizes(total: f64, sizes: impl IntoIterator<Item = f64>) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    let mut si = 0.0;
    for size in sizes {
        if size > 0.0 {
            let f = size / total;
            si -= f * f.log2();
        }
    }
    si
}

/// Gain divided by split information; 0 (ineligible) when the split
/// information vanishes.
pub fn gain_ratio(d: &Dataset, view: &WeightedView, attribute: usize) -> Result<f64> {
    let (parent, children) = nominal_partition(d, view, attribute)?;
    let gain = gain_from_partition(&parent, &children);
    let si = split_info_from_sizes(parent.total(), children.iter().map(|c| c.total()));
    if si <= 0.0 {
        return Ok(0.0);
    }
    Ok(gain / si)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Attribute, Instance};
    use proptest::prelude::*;

    fn counts(values: &[f64]) -> ClassCounts {
        let mut c = ClassCounts::new(values.len());
        for (i, &v) in values.iter().enumerate() {
            c.add(i, v);
        }
        c
    }

    /// Independent entropy route: `log2(n) - sum(c*log2(c))/n`.
    fn entropy_oracle(values: &[f64]) -> f64 {
        let n: f64 = values.iter().sum();
        if n <= 0.0 {
            return 0.0;
        }
        n.log2() - values.iter().filter(|&&c| c > 0.0).map(|&c| c * c.log2()).sum::<f64>() / n
    }

    #[test]
    fn entropy_uniform_binary_is_one_bit() {
        assert_eq!(entropy(&counts(&[2.0, 2.0])), 1.0);
    }

    #[test]
    fn entropy_pure_node_is_zero() {
        assert_eq!(entropy(&counts(&[4.0, 0.0])), 0.0);
    }

    #[test]
    fn entropy_of_the_retention_counts() {
        // 398 continuing vs 34 dropouts.
        let h = entropy(&counts(&[398.0, 34.0]));
        assert!((h - 0.397595058693830).abs() < 1e-12, "h = {h}");
        assert!((h - 0.3976).abs() < 1e-3);
    }

    #[test]
    fn entropy_empty_is_zero_by_convention() {
        assert_eq!(entropy(&counts(&[0.0, 0.0])), 0.0);
    }

    /// Two nominal predictors + class; rows as (a, b, class) value indices.
    fn toy(rows: &[(usize, usize, usize)], a_vals: usize, b_vals: usize) -> Dataset {
        let mk = |n: usize, prefix: &str| -> Vec<String> {
            (0..n).map(|i| format!("{prefix}{i}")).collect()
        };
        let attrs = vec![
            Attribute::nominal("a", mk(a_vals, "a")),
            Attribute::nominal("b", mk(b_vals, "b")),
            Attribute::nominal("class", ["x", "y"]),
        ];
        let instances = rows
            .iter()
            .map(|&(a, b, c)| {
                Instance::new(vec![Cell::Nominal(a), Cell::Nominal(b), Cell::Nominal(c)])
            })
            .collect();
        Dataset::new("toy", attrs, instances).unwrap()
    }

    #[test]
    fn gain_of_constant_attribute_is_zero() {
        let d = toy(&[(0, 0, 0), (0, 1, 1), (0, 0, 1), (0, 1, 0)], 2, 2);
        let view = full_view(&d);
        assert_eq!(info_gain(&d, &view, 0).unwrap(), 0.0);
    }

    #[test]
    fn gain_of_perfect_separator_equals_parent_entropy() {
        let d = toy(&[(0, 0, 0), (0, 1, 0), (1, 0, 1), (1, 1, 1)], 2, 2);
        let view = full_view(&d);
        let parent = class_counts(&d, &view);
        let g = info_gain(&d, &view, 0).unwrap();
        assert!((g - entropy(&parent)).abs() < 1e-15);
        assert_eq!(g, 1.0);
    }

    #[test]
    fn six_instance_gain_matches_brute_force_recount() {
        // classes: x x x y y y; a spreads 0..5 (id-like), b = 0 0 0 0 1 1
        let rows = [
            (0, 0, 0),
            (1, 0, 0),
            (2, 0, 0),
            (3, 0, 1),
            (4, 1, 1),
            (5, 1, 1),
        ];
        let d = toy(&rows, 6, 2);
        let view = full_view(&d);

        // brute force: recount every partition from the raw rows
        let brute = |attr: usize, arity: usize| -> f64 {
            let mut parent = vec![0.0; 2];
            let mut children = vec![vec![0.0; 2]; arity];
            for &(a, b, c) in &rows {
                let v = if attr == 0 { a } else { b };
                parent[c] += 1.0;
                children[v][c] += 1.0;
            }
            let n: f64 = parent.iter().sum();
            entropy_oracle(&parent)
                - children
                    .iter()
                    .map(|ch| {
                        let t: f64 = ch.iter().sum();
                        if t > 0.0 {
                            t / n * entropy_oracle(ch)
                        } else {
                            0.0
                        }
                    })
                    .sum::<f64>()
        };

        let ga = info_gain(&d, &view, 0).unwrap();
        let gb = info_gain(&d, &view, 1).unwrap();
        assert!((ga - brute(0, 6)).abs() < 1e-12);
        assert!((gb - brute(1, 2)).abs() < 1e-12);
        // frozen oracle values
        assert!((ga - 1.0).abs() < 1e-12);
        assert!((gb - 0.459147917027245).abs() < 1e-12);
    }

    #[test]
    fn split_info_even_binary_is_one() {
        let d = toy(&[(0, 0, 0), (0, 0, 1), (1, 0, 0), (1, 0, 1)], 2, 1);
        let view = full_view(&d);
        assert_eq!(split_info(&d, &view, 0).unwrap(), 1.0);
    }

    #[test]
    fn split_info_single_observed_value_is_zero() {
        let d = toy(&[(0, 0, 0), (0, 0, 1)], 2, 1);
        let view = full_view(&d);
        assert_eq!(split_info(&d, &view, 0).unwrap(), 0.0);
    }

    #[test]
    fn split_info_uniform_k_way_is_log2_k() {
        for k in 2..7usize {
            let rows: Vec<(usize, usize, usize)> = (0..k).map(|i| (i, 0, i % 2)).collect();
            let d = toy(&rows, k, 1);
            let view = full_view(&d);
            let si = split_info(&d, &view, 0).unwrap();
            assert!((si - (k as f64).log2()).abs() < 1e-12);
        }
    }

    #[test]
    fn gain_ratio_equals_gain_on_even_binary_split() {
        let d = toy(&[(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)], 2, 2);
        let view = full_view(&d);
        let g = info_gain(&d, &view, 0).unwrap();
        let r = gain_ratio(&d, &view, 0).unwrap();
        assert_eq!(g, r);
    }

    #[test]
    fn gain_ratio_of_constant_attribute_is_zero() {
        let d = toy(&[(0, 0, 0), (0, 1, 1)], 2, 2);
        let view = full_view(&d);
        assert_eq!(gain_ratio(&d, &view, 0).unwrap(), 0.0);
    }

    #[test]
    fn gain_ratio_prefers_low_arity_attribute_over_id_like() {
        // a: 6 distinct values (highest gain); b: binary (highest gain ratio)
        let rows = [
            (0, 0, 0),
            (1, 0, 0),
            (2, 0, 0),
            (3, 0, 1),
            (4, 1, 1),
            (5, 1, 1),
        ];
        let d = toy(&rows, 6, 2);
        let view = full_view(&d);
        let (ga, gb) = (
            info_gain(&d, &view, 0).unwrap(),
            info_gain(&d, &view, 1).unwrap(),
        );
        let (ra, rb) = (
            gain_ratio(&d, &view, 0).unwrap(),
            gain_ratio(&d, &view, 1).unwrap(),
        );
        assert!(ga > gb, "gain should favor the id-like attribute");
        assert!(rb > ra, "gain ratio should favor the binary attribute");
        assert!((rb - 0.5).abs() < 1e-12);
        assert!((ra - 0.386852807234542).abs() < 1e-12);
    }

    #[test]
    fn majority_tie_goes_to_first_declared_class() {
        assert_eq!(counts(&[2.0, 2.0]).majority(), 0);
        assert_eq!(counts(&[1.0, 3.0]).majority(), 1);
    }

    #[test]
    fn empty_view_is_rejected() {
        let d = toy(&[(0, 0, 0)], 2, 2);
        assert!(info_gain(&d, &[], 0).is_err());
        assert!(split_info(&d, &[], 0).is_err());
    }

    proptest! {
        #[test]
        fn entropy_is_bounded(weights in proptest::collection::vec(0.0f64..100.0, 1..6)) {
            let c = counts(&weights);
            let h = entropy(&c);
            prop_assert!(h >= 0.0);
            prop_assert!(h <= (c.num_classes() as f64).log2() + 1e-12);
        }

        #[test]
        fn gain_is_nonnegative_and_ratio_below_gain_when_si_large(
            rows in proptest::collection::vec((0usize..3, 0usize..2, 0usize..2), 1..12)
        ) {
            let d = toy(&rows, 3, 2);
            let view = full_view(&d);
            for attr in 0..2 {
                let g = info_gain(&d, &view, attr).unwrap();
                prop_assert!(g >= -1e-12);
                let si = split_info(&d, &view, attr).unwrap();
                let r = gain_ratio(&d, &view, attr).unwrap();
                if si >= 1.0 {
                    prop_assert!(r <= g + 1e-12);
                }
            }
        }

        #[test]
        fn entropy_matches_alternate_route(weights in proptest::collection::vec(0.0f64..50.0, 1..5)) {
            let h = entropy(&counts(&weights));
            prop_assert!((h - entropy_oracle(&weights)).abs() < 1e-12);
        }
    }
}
