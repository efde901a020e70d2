//! Stratified k-fold cross-validation, pooled confusion-matrix metrics and
//! the per-algorithm evaluation report.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adtree;
use crate::c45::{self, C45Params};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::id3;
use crate::tree::Prediction;

/// Which classifier to run, with its parameters.
#[derive(Clone, Copy, Debug)]
pub enum AlgoSpec {
    Id3,
    C45(C45Params),
    Adt { iterations: usize },
}

impl AlgoSpec {
    pub fn name(&self) -> &'static str {
        match self {
            AlgoSpec::Id3 => "ID3",
            AlgoSpec::C45(_) => "C4.5",
            AlgoSpec::Adt { .. } => "ADT",
        }
    }
}

/// Counts per (true class, predicted class or unclassified). The last
/// column collects instances a strict traversal could not route.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<usize>>,
    num_classes: usize,
}

impl ConfusionMatrix {
    pub fn new(num_classes: usize) -> ConfusionMatrix {
        ConfusionMatrix {
            counts: vec![vec![0; num_classes + 1]; num_classes],
            num_classes,
        }
    }

    pub fn record(&mut self, actual: usize, predicted: Prediction) {
        match predicted {
            Prediction::Class(p) => self.counts[actual][p] += 1,
            Prediction::Unclassified => self.counts[actual][self.num_classes] += 1,
        }
    }

    pub fn get(&self, actual: usize, predicted: usize) -> usize {
        self.counts[actual][predicted]
    }

    pub fn unclassified_of(&self, actual: usize) -> usize {
        self.counts[actual][self.num_classes]
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        (0..self.num_classes).map(|c| self.counts[c][c]).sum()
    }

    pub fn unclassified(&self) -> usize {
        (0..self.num_classes)
            .map(|c| self.counts[c][self.num_classes])
            .sum()
    }

    pub fn incorrect(&self) -> usize {
        self.total() - self.correct() - self.unclassified()
    }
}

/// Pooled cross-validation metrics for one algorithm.
///
/// `accuracy_pct + incorrect_pct + unclassified_pct` accounts for every
/// tested instance; precision and recall are for `positive_class`, with
/// unclassified positives counting as misses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub algorithm: String,
    pub accuracy_pct: f64,
    pub incorrect_pct: f64,
    pub unclassified_pct: f64,
    pub precision: f64,
    pub recall: f64,
    pub build_time_s: f64,
    pub k: usize,
    pub seed: u64,
}

/// Splits instance indices into `k` folds preserving class proportions:
/// per-class counts across folds differ by at most one, and the shuffle is
/// a pure function of `seed`.
pub fn stratified_folds(d: &Dataset, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let n = d.num_instances();
    if k < 2 || k > n {
        return Err(Error::BadFoldCount { k, n });
    }
    let mut per_class: Vec<Vec<usize>> = vec![Vec::new(); d.num_classes() + 1];
    for row in 0..n {
        match d.class_of(row) {
            Some(c) => per_class[c].push(row),
            None => per_class[d.num_classes()].push(row), // missing class: still dealt out
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    // one rotating pointer across classes keeps total fold sizes within one
    let mut next_fold = 0usize;
    for group in &mut per_class {
        group.shuffle(&mut rng);
        for &row in group.iter() {
            folds[next_fold].push(row);
            next_fold = (next_fold + 1) % k;
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(folds)
}

/// Precision and recall of `positive` from a pooled matrix. Unclassified
/// predictions are never counted as positive calls, but actual positives
/// among them still lower recall. A zero denominator yields 0.
pub fn metrics(cm: &ConfusionMatrix, positive: usize) -> Result<(f64, f64)> {
    if positive >= cm.num_classes() {
        return Err(Error::UnknownClassLabel(format!("class #{positive}")));
    }
    let tp = cm.get(positive, positive);
    let fp: usize = (0..cm.num_classes())
        .filter(|&c| c != positive)
        .map(|c| cm.get(c, positive))
        .sum();
    let actual_pos: usize = (0..cm.num_classes())
        .map(|p| cm.get(positive, p))
        .sum::<usize>()
        + cm.unclassified_of(positive);
    let precision = if tp + fp == 0 {
        0.0
    } else {
        tp as f64 / (tp + fp) as f64
    };
    let recall = if actual_pos == 0 {
        0.0
    } else {
        tp as f64 / actual_pos as f64
    };
    Ok((precision, recall))
}

/// Runs stratified k-fold cross-validation and pools one confusion matrix
/// over all held-out folds. `build_time_s` is the mean wall-clock training
/// time; everything else is a pure function of the inputs.
pub fn cross_validate(
    d: &Dataset,
    algo: &AlgoSpec,
    k: usize,
    seed: u64,
    positive: usize,
) -> Result<EvalReport> {
    let (report, _) = cross_validate_detailed(d, algo, k, seed, positive)?;
    Ok(report)
}

pub fn cross_validate_detailed(
    d: &Dataset,
    algo: &AlgoSpec,
    k: usize,
    seed: u64,
    positive: usize,
) -> Result<(EvalReport, ConfusionMatrix)> {
    if positive >= d.num_classes() {
        return Err(Error::UnknownClassLabel(format!("class #{positive}")));
    }
    let folds = stratified_folds(d, k, seed)?;
    let mut matrix = ConfusionMatrix::new(d.num_classes());
    let mut train_seconds = 0.0;

    for (fold_idx, test_fold) in folds.iter().enumerate() {
        let mut in_test = vec![false; d.num_instances()];
        for &row in test_fold {
            in_test[row] = true;
        }
        let train_rows: Vec<usize> = (0..d.num_instances()).filter(|&r| !in_test[r]).collect();
        let train_set = Dataset {
            relation: d.relation.clone(),
            attributes: d.attributes.clone(),
            class_index: d.class_index,
            instances: train_rows
                .iter()
                .map(|&r| d.instances[r].clone())
                .collect(),
        };

        let wrap = |e: Error| Error::Fold {
            fold: fold_idx,
            source: Box::new(e),
        };
        let started = Instant::now();
        let model = match algo {
            AlgoSpec::Id3 => FoldModel::Tree(id3::train(&train_set).map_err(wrap)?),
            AlgoSpec::C45(params) => {
                FoldModel::Tree(c45::train(&train_set, params).map_err(wrap)?)
            }
            AlgoSpec::Adt { iterations } => {
                FoldModel::Adt(adtree::train(&train_set, *iterations).map_err(wrap)?)
            }
        };
        train_seconds += started.elapsed().as_secs_f64();

        for &row in test_fold {
            let actual = match d.class_of(row) {
                Some(c) => c,
                None => continue, // unlabeled instances cannot be scored
            };
            let predicted = match (&model, algo) {
                (FoldModel::Tree(t), AlgoSpec::Id3) => id3::predict(t, &d.instances[row])
                    .map_err(|e| Error::Fold {
                        fold: fold_idx,
                        source: Box::new(e),
                    })?,
                (FoldModel::Tree(t), _) => {
                    let (label, _) = c45::predict(t, &d.instances[row]).map_err(|e| Error::Fold {
                        fold: fold_idx,
                        source: Box::new(e),
                    })?;
                    Prediction::Class(label)
                }
                (FoldModel::Adt(m), _) => {
                    let label = adtree::classify(m, &d.instances[row]).map_err(|e| Error::Fold {
                        fold: fold_idx,
                        source: Box::new(e),
                    })?;
                    Prediction::Class(label)
                }
            };
            matrix.record(actual, predicted);
        }
    }

    let total = matrix.total() as f64;
    let report = EvalReport {
        algorithm: algo.name().to_string(),
        accuracy_pct: matrix.correct() as f64 * 100.0 / total,
        incorrect_pct: matrix.incorrect() as f64 * 100.0 / total,
        unclassified_pct: matrix.unclassified() as f64 * 100.0 / total,
        precision: metrics(&matrix, positive)?.0,
        recall: metrics(&matrix, positive)?.1,
        build_time_s: train_seconds / k as f64,
        k,
        seed,
    };
    Ok((report, matrix))
}

enum FoldModel {
    Tree(crate::tree::TreeModel),
    Adt(adtree::AdtModel),
}

/// Aligned plain-text table with the accuracy, precision/recall and build
/// time columns.
pub fn render_report_table(reports: &[EvalReport]) -> String {
    let mut out = String::new();
    if let Some(first) = reports.first() {
        out.push_str(&format!(
            "{}-fold cross-validation (seed {})\n",
            first.k, first.seed
        ));
    }
    out.push_str(&format!(
        "{:<10} {:>10} {:>12} {:>14} {:>10} {:>8} {:>16}\n",
        "Algorithm",
        "Correct %",
        "Incorrect %",
        "Unclassified %",
        "Precision",
        "Recall",
        "Build Time (s)"
    ));
    for r in reports {
        out.push_str(&format!(
            "{:<10} {:>10.3} {:>12.3} {:>14.3} {:>10.3} {:>8.3} {:>16.2}\n",
            r.algorithm,
            r.accuracy_pct,
            r.incorrect_pct,
            r.unclassified_pct,
            r.precision,
            r.recall,
            r.build_time_s
        ));
    }
    out
}
