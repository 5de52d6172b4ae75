//! Population-Modulated scores and rankings.
//!
//! The P-M score of a researcher is the weighted sum of their six manifest
//! values, with weight lambda_j / SE_j per indicator, divided by 100. A
//! plain loading-weighted component score (sum of lambda_j * x_j) is also
//! exposed for comparison; the two are not the same measure, and only the
//! lambda/SE-weighted form reproduces the published rankings.

use serde::{Deserialize, Serialize};

use crate::cfa::{CfaFit, ManifestVector, Vector6, N_MANIFEST};
use crate::error::{Error, Result};

/// P-M weights in canonical manifest order: w_j = lambda_j / SE_j.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmWeights {
    pub weights: Vector6,
}

/// Derive P-M weights from a converged fit.
pub fn pm_weights(fit: &CfaFit) -> Result<PmWeights> {
    pm_weights_from_parts(&fit.params.loadings, &fit.standard_errors)
}

/// Derive P-M weights from externally supplied loadings and standard
/// errors (the path used to reproduce published tables).
pub fn pm_weights_from_parts(loadings: &Vector6, standard_errors: &Vector6) -> Result<PmWeights> {
    let mut weights = Vector6::zeros();
    for j in 0..N_MANIFEST {
        let se = standard_errors[j];
        if se == 0.0 || !se.is_finite() {
            return Err(Error::ZeroStandardError(j));
        }
        weights[j] = loadings[j] / se;
    }
    Ok(PmWeights { weights })
}

/// P-M score: (sum_j w_j v_j) / 100.
pub fn pm_score(v: &ManifestVector, w: &PmWeights) -> f64 {
    w.weights.dot(&v.to_vector()) / 100.0
}

/// Bartholomew component score, sum_j lambda_j x_j, without the SE
/// weighting or the /100 presentation scaling.
pub fn component_score(v: &ManifestVector, loadings: &Vector6) -> f64 {
    loadings.dot(&v.to_vector())
}

/// One ranked researcher.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub author_id: String,
    pub pm_score: f64,
    pub rank: usize,
}

/// Researchers sorted by P-M score descending; ties share the minimal rank
/// and the next rank skips accordingly. Equal scores are ordered by
/// author_id so output is byte-stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmRanking {
    pub entries: Vec<RankedEntry>,
}

pub fn rank_population(scores: &[(String, f64)]) -> PmRanking {
    let mut sorted: Vec<(String, f64)> = scores.to_vec();
    sorted.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.0.cmp(&b.0))
    });
    let mut entries: Vec<RankedEntry> = Vec::with_capacity(sorted.len());
    for (i, (author_id, score)) in sorted.into_iter().enumerate() {
        let rank = match entries.last() {
            Some(prev) if prev.pm_score == score => prev.rank,
            _ => i + 1,
        };
        entries.push(RankedEntry { author_id, pm_score: score, rank });
    }
    PmRanking { entries }
}

/// Min-rank positions of a value within a slice (1-based): 1 plus the
/// number of strictly greater values.
fn min_ranks(values: &[f64]) -> Vec<usize> {
    values
        .iter()
        .map(|&v| 1 + values.iter().filter(|&&u| u > v).count())
        .collect()
}

/// Rank each of the six manifest variables independently with the same
/// min-rank tie convention. Output rows align with the input order.
pub fn per_index_ranks(rows: &[(String, ManifestVector)]) -> Vec<[usize; 6]> {
    let mut out = vec![[0usize; 6]; rows.len()];
    for j in 0..N_MANIFEST {
        let column: Vec<f64> = rows.iter().map(|(_, v)| v.as_array()[j]).collect();
        for (i, r) in min_ranks(&column).into_iter().enumerate() {
            out[i][j] = r;
        }
    }
    out
}
