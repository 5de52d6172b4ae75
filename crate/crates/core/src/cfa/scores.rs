//! Anderson-Rubin factor scores: linear scores with sample mean zero and
//! sample variance equal to the factor variance, provided for diagnostics
//! (the P-M ranking uses component scores instead).

use super::{CfaFit, ManifestVector, Vector6, N_MANIFEST};
use crate::error::{Error, Result};

/// One score per researcher, centered to mean 0 and rescaled so the sample
/// variance (divisor n - 1) equals sigma^2 exactly.
pub fn anderson_rubin_scores(fit: &CfaFit, vectors: &[ManifestVector]) -> Result<Vec<f64>> {
    let n = vectors.len();
    if n < 2 {
        return Err(Error::InsufficientSample { needed: 2, got: n });
    }
    for j in 0..N_MANIFEST {
        if fit.params.error_variances[j] <= 0.0 || !fit.params.error_variances[j].is_finite() {
            return Err(Error::SingularErrorVariance(j));
        }
    }

    // weights Theta^-1 Lambda; any positive rescaling is absorbed below
    let mut weights = Vector6::zeros();
    for j in 0..N_MANIFEST {
        weights[j] = fit.params.loadings[j] / fit.params.error_variances[j];
    }

    let raw: Vec<f64> = vectors.iter().map(|v| weights.dot(&v.to_vector())).collect();
    let mean = raw.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = raw.iter().map(|x| x - mean).collect();
    let var = centered.iter().map(|x| x * x).sum::<f64>() / (n - 1) as f64;
    if var <= 0.0 {
        return Err(Error::SingularCovariance(
            "factor-score variance is zero; all manifest vectors identical".into(),
        ));
    }
    let scale = (fit.params.factor_variance / var).sqrt();
    Ok(centered.into_iter().map(|x| x * scale).collect())
}
