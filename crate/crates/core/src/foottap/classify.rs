use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::grid::Cell;
use super::svm::{KernelClassifier, SvmParams};
use super::TapSample;
use crate::error::{invalid_arg, Error, Result};

pub type TapClassifier = KernelClassifier<Cell>;

fn labeled(samples: &[TapSample]) -> Result<(Vec<[f64; 2]>, Vec<Cell>)> {
    samples
        .iter()
        .map(|s| {
            let cell = s
                .label
                .ok_or_else(|| Error::TrainingFailure("unlabeled training sample".into()))?;
            if !(s.point.x.is_finite() && s.point.y.is_finite()) {
                return Err(Error::TrainingFailure("non-finite tap".into()));
            }
            Ok(([s.point.x, s.point.y], cell))
        })
        .collect::<Result<Vec<_>>>()
        .map(|v| v.into_iter().unzip())
}

/// Trains a one-vs-rest radial-kernel classifier. The seed fixes the order in
/// which samples enter the solver, so equal inputs give equal models.
pub fn train_classifier(
    samples: &[TapSample],
    params: &SvmParams,
    seed: u64,
) -> Result<TapClassifier> {
    let (points, labels) = labeled(samples)?;
    let mut counts: BTreeMap<Cell, usize> = BTreeMap::new();
    for l in &labels {
        *counts.entry(*l).or_default() += 1;
    }
    if counts.len() < 2 || counts.values().any(|&c| c < 2) {
        return Err(Error::TrainingFailure(
            "need at least two classes with two samples each".into(),
        ));
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let points: Vec<[f64; 2]> = order.iter().map(|&i| points[i]).collect();
    let labels: Vec<Cell> = order.iter().map(|&i| labels[i]).collect();
    KernelClassifier::fit(&points, &labels, params)
}

/// Fraction of labeled samples the classifier predicts correctly.
pub fn accuracy(classifier: &TapClassifier, samples: &[TapSample]) -> f64 {
    let scored: Vec<bool> = samples
        .iter()
        .filter_map(|s| s.label.map(|l| classifier.predict([s.point.x, s.point.y]) == l))
        .collect();
    if scored.is_empty() {
        return 0.0;
    }
    scored.iter().filter(|&&ok| ok).count() as f64 / scored.len() as f64
}

/// Mean held-out accuracy of `repetitions` rounds of stratified `folds`-fold
/// cross-validation. Folds are trained in parallel; the result does not
/// depend on scheduling.
pub fn evaluate_cv(
    samples: &[TapSample],
    folds: usize,
    repetitions: usize,
    params: &SvmParams,
    seed: u64,
) -> Result<f64> {
    if folds < 2 || repetitions == 0 {
        return Err(invalid_arg("need at least 2 folds and 1 repetition"));
    }
    let mut by_class: BTreeMap<Cell, Vec<usize>> = BTreeMap::new();
    for (i, s) in samples.iter().enumerate() {
        let cell = s
            .label
            .ok_or_else(|| invalid_arg("cross-validation needs labeled samples"))?;
        by_class.entry(cell).or_default().push(i);
    }
    if by_class.values().any(|v| v.len() < folds) {
        return Err(invalid_arg(format!("every class needs at least {folds} samples")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jobs = Vec::with_capacity(folds * repetitions);
    for rep in 0..repetitions {
        // stratified assignment: deal each shuffled class round-robin,
        // continuing the dealer position across classes
        let mut fold_of = vec![0usize; samples.len()];
        let mut next = 0;
        for members in by_class.values() {
            let mut members = members.clone();
            members.shuffle(&mut rng);
            for i in members {
                fold_of[i] = next % folds;
                next += 1;
            }
        }
        for fold in 0..folds {
            jobs.push((rep, fold, fold_of.clone()));
        }
    }

    let accs: Vec<f64> = jobs
        .par_iter()
        .map(|(rep, fold, fold_of)| {
            let (train, test): (Vec<TapSample>, Vec<TapSample>) = samples
                .iter()
                .zip(fold_of)
                .fold((Vec::new(), Vec::new()), |(mut tr, mut te), (s, f)| {
                    if f == fold {
                        te.push(*s);
                    } else {
                        tr.push(*s);
                    }
                    (tr, te)
                });
            let fold_seed = seed ^ ((*rep as u64) << 32 | *fold as u64);
            train_classifier(&train, params, fold_seed).map(|clf| accuracy(&clf, &test))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(accs.iter().sum::<f64>() / accs.len() as f64)
}
