//! Implied covariance, ML discrepancy, log-likelihood, and the analytic
//! gradient used by the optimizer and its finite-difference checks.

use nalgebra::Cholesky;

use super::{CfaParams, Matrix6, SampleCovariance, Vector12, N_MANIFEST};
use crate::error::{Error, Result};

/// Sigma = sigma^2 * Lambda Lambda' + Theta. Symmetric by construction and
/// positive definite whenever every theta_j > 0.
pub fn implied_covariance(params: &CfaParams) -> Matrix6 {
    let lambda = params.loadings;
    let mut sigma = lambda * lambda.transpose() * params.factor_variance;
    for j in 0..N_MANIFEST {
        sigma[(j, j)] += params.error_variances[j];
    }
    sigma
}

/// Log-determinant and inverse via Cholesky; `None` if not positive definite.
pub(crate) fn chol_logdet_inv(m: &Matrix6) -> Option<(f64, Matrix6)> {
    let chol = Cholesky::new(*m)?;
    let logdet = chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>() * 2.0;
    Some((logdet, chol.inverse()))
}

/// ML discrepancy F = log|Sigma| + tr(S Sigma^-1) - log|S| - 6.
/// Zero exactly when Sigma equals S.
pub fn discrepancy_f(params: &CfaParams, s: &SampleCovariance) -> Result<f64> {
    let sigma = implied_covariance(params);
    let (logdet_sigma, sigma_inv) = chol_logdet_inv(&sigma)
        .ok_or_else(|| Error::SingularCovariance("implied covariance".into()))?;
    let (logdet_s, _) = chol_logdet_inv(&s.matrix)
        .ok_or_else(|| Error::SingularCovariance("sample covariance".into()))?;
    // tr(S Sigma^-1) as an elementwise product; both matrices are symmetric
    let trace = s.matrix.component_mul(&sigma_inv).sum();
    Ok(logdet_sigma + trace - logdet_s - N_MANIFEST as f64)
}

/// log L = -(n/2) [log|Sigma| + tr(S Sigma^-1)]; differs from -n/2 * F by a
/// constant in the parameters, so maximizing it minimizes F.
pub fn log_likelihood(params: &CfaParams, s: &SampleCovariance, n: usize) -> Result<f64> {
    let sigma = implied_covariance(params);
    let (logdet_sigma, sigma_inv) = chol_logdet_inv(&sigma)
        .ok_or_else(|| Error::SingularCovariance("implied covariance".into()))?;
    let trace = s.matrix.component_mul(&sigma_inv).sum();
    Ok(-0.5 * n as f64 * (logdet_sigma + trace))
}

/// Analytic gradient of F with respect to (lambda_1..6, theta_1..6), with
/// sigma^2 held fixed. Uses dF = tr[(Sigma^-1 - Sigma^-1 S Sigma^-1) dSigma]:
/// dF/dlambda_j = 2 sigma^2 (A Lambda)_j and dF/dtheta_j = A_jj,
/// where A = Sigma^-1 - Sigma^-1 S Sigma^-1.
pub fn gradient_f(params: &CfaParams, s: &SampleCovariance) -> Result<Vector12> {
    let sigma = implied_covariance(params);
    let (_, sigma_inv) = chol_logdet_inv(&sigma)
        .ok_or_else(|| Error::SingularCovariance("implied covariance".into()))?;
    let a = sigma_inv - sigma_inv * s.matrix * sigma_inv;
    let a_lambda = a * params.loadings;
    let mut grad = Vector12::zeros();
    for j in 0..N_MANIFEST {
        grad[j] = 2.0 * params.factor_variance * a_lambda[j];
        grad[N_MANIFEST + j] = a[(j, j)];
    }
    Ok(grad)
}
