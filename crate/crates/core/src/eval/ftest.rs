use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cv::evaluate_split;
use super::metrics::Metric;
use super::stats::f_sf;
use crate::corpus::stratified_kfold;
use crate::corpus::PairDataset;
use crate::error::{Error, Result};
use crate::pipeline::{derive_seed, Pipeline};

pub const REPLICATIONS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FTestResult {
    pub metric: Metric,
    pub f_statistic: f64,
    pub dof: (u32, u32),
    pub p_value: f64,
    /// `differences[i][j]`: metric of A minus metric of B on replication `i`, fold `j`.
    pub differences: Vec<[f64; 2]>,
}

/// Combined 5x2cv F statistic and its F(10, 5) p-value.
pub fn combined_5x2cv_f(differences: &[[f64; 2]]) -> Result<(f64, f64)> {
    if differences.len() != REPLICATIONS {
        return Err(Error::InvalidArgument(format!(
            "expected {REPLICATIONS} replications, got {}",
            differences.len()
        )));
    }
    let mut num = 0.0;
    let mut var = 0.0;
    for &[a, b] in differences {
        let mean = (a + b) / 2.0;
        num += a * a + b * b;
        var += (a - mean).powi(2) + (b - mean).powi(2);
    }
    if var == 0.0 {
        return Err(Error::DegenerateVariance);
    }
    let f = num / (2.0 * var);
    Ok((f, f_sf(f, 10.0, 5.0)))
}

/// Compares two pipelines with five replications of stratified 2-fold CV.
/// Replication `i` splits with seed `seed + i`; both pipelines see the same
/// splits and the same training seeds.
pub fn ftest_5x2cv(
    dataset: &PairDataset,
    a: &Pipeline,
    b: &Pipeline,
    metric: Metric,
    seed: u64,
) -> Result<FTestResult> {
    let differences = (0..REPLICATIONS as u64)
        .into_par_iter()
        .map(|i| {
            let rep_seed = seed.wrapping_add(i);
            let plan = stratified_kfold(dataset, 2, rep_seed)?;
            let mut d = [0.0; 2];
            for (fold, slot) in d.iter_mut().enumerate() {
                let (train, test) = plan.split(dataset, fold);
                let fit_seed = derive_seed(rep_seed, "fold", fold as u64);
                let ea = evaluate_split(a, dataset, &train, &test, fit_seed)?;
                let eb = evaluate_split(b, dataset, &train, &test, fit_seed)?;
                *slot = metric.of(&ea.metrics) - metric.of(&eb.metrics);
            }
            Ok(d)
        })
        .collect::<Result<Vec<_>>>()?;
    let (f_statistic, p_value) = combined_5x2cv_f(&differences)?;
    Ok(FTestResult {
        metric,
        f_statistic,
        dof: (10, 5),
        p_value,
        differences,
    })
}
