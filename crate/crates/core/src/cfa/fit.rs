//! Maximum-likelihood fitting of the one-factor model by BFGS with
//! backtracking line search, plus asymptotic standard errors and the
//! goodness-of-fit indices.
//!
//! Error variances are optimized through a log reparameterization so they
//! stay positive; convergence is judged on the gradient max-norm in the
//! original (lambda, theta) space.

use nalgebra::{Cholesky, SMatrix};

use super::model::{chol_logdet_inv, discrepancy_f, gradient_f, implied_covariance};
use super::{
    CfaConfig, CfaFit, CfaParams, Matrix6, SampleCovariance, Vector12, Vector6, BASELINE_DF,
    MODEL_DF, N_MANIFEST,
};
use crate::error::{Error, Result};

type Matrix12 = SMatrix<f64, 12, 12>;

const INIT_EPS: f64 = 1e-6;
const ARMIJO_C1: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;
/// Gradient max-norm below which the solver hands over from BFGS to the
/// damped-Newton endgame.
const POLISH_THRESHOLD: f64 = 1e-3;

fn params_from_z(z: &Vector12, factor_variance: f64) -> CfaParams {
    let mut loadings = Vector6::zeros();
    let mut error_variances = Vector6::zeros();
    for j in 0..N_MANIFEST {
        loadings[j] = z[j];
        error_variances[j] = z[N_MANIFEST + j].exp();
    }
    CfaParams { loadings, error_variances, factor_variance }
}

fn objective(z: &Vector12, s: &SampleCovariance, factor_variance: f64) -> Option<f64> {
    let params = params_from_z(z, factor_variance);
    if !params.error_variances.iter().all(|t| t.is_finite() && *t > 0.0) {
        return None;
    }
    discrepancy_f(&params, s).ok().filter(|f| f.is_finite())
}

/// Gradient in z-space (chain rule through theta = exp(u)) together with
/// the original-space gradient used for the convergence test.
fn gradients(z: &Vector12, s: &SampleCovariance, factor_variance: f64) -> Result<(Vector12, Vector12)> {
    let params = params_from_z(z, factor_variance);
    let g = gradient_f(&params, s)?;
    let mut gz = g;
    for j in 0..N_MANIFEST {
        gz[N_MANIFEST + j] = g[N_MANIFEST + j] * params.error_variances[j];
    }
    Ok((gz, g))
}

/// Minimize F over (lambda, theta) with sigma^2 fixed, starting from
/// lambda_j = sqrt(max(s_jj/2, eps)), theta_j = s_jj/2. Reports a
/// non-converged fit (not an error) when the iteration cap is hit.
pub fn fit(s: &SampleCovariance, config: &CfaConfig) -> Result<CfaFit> {
    Cholesky::new(s.matrix).ok_or_else(|| {
        Error::NotPositiveDefinite(
            "sample covariance; consider a larger sample or removing constant columns".into(),
        )
    })?;

    let factor_variance = 1.0;
    let mut z = Vector12::zeros();
    for j in 0..N_MANIFEST {
        let half = (s.matrix[(j, j)] / 2.0).max(INIT_EPS);
        z[j] = half.sqrt();
        z[N_MANIFEST + j] = half.ln();
    }

    let mut f = objective(&z, s, factor_variance)
        .ok_or_else(|| Error::SingularCovariance("implied covariance at initialization".into()))?;
    let (mut gz, mut g_orig) = gradients(&z, s, factor_variance)?;
    let mut h_inv = Matrix12::identity();
    let mut converged = g_orig.amax() < config.tolerance;
    let mut iterations = 0;

    while !converged && iterations < config.max_iterations && g_orig.amax() >= POLISH_THRESHOLD {
        iterations += 1;
        let mut direction = -(h_inv * gz);
        if direction.dot(&gz) >= 0.0 {
            // stale curvature estimate; fall back to steepest descent
            h_inv = Matrix12::identity();
            direction = -gz;
        }

        let slope = direction.dot(&gz);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let candidate = z + direction * step;
            if let Some(f_new) = objective(&candidate, s, factor_variance) {
                if f_new <= f + ARMIJO_C1 * step * slope {
                    accepted = Some((candidate, f_new));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((z_new, f_new)) = accepted else {
            break; // no acceptable step in this direction
        };

        let (gz_new, g_orig_new) = gradients(&z_new, s, factor_variance)?;
        let step_vec = z_new - z;
        let y = gz_new - gz;
        let sy = step_vec.dot(&y);
        if sy > 1e-12 {
            if iterations == 1 {
                // scale the initial inverse Hessian to the observed curvature
                h_inv = Matrix12::identity() * (sy / y.dot(&y));
            }
            let rho = 1.0 / sy;
            let id = Matrix12::identity();
            let left = id - step_vec * y.transpose() * rho;
            h_inv = left * h_inv * left.transpose() + step_vec * step_vec.transpose() * rho;
        }
        z = z_new;
        f = f_new;
        gz = gz_new;
        g_orig = g_orig_new;
        converged = g_orig.amax() < config.tolerance;
    }

    let mut params = params_from_z(&z, factor_variance);

    // Newton polish: near the minimum the decrease in F drops below
    // floating-point resolution and the line search stalls, so drive the
    // gradient norm directly with damped Newton steps.
    if !converged {
        let mut g = g_orig;
        while !converged && iterations < config.max_iterations {
            let Ok(hessian) = fd_hessian(&params, s) else { break };
            let Some(chol) = Cholesky::new(hessian) else { break };
            let delta = chol.solve(&(-g));
            let mut accepted = false;
            let mut t = 1.0;
            for _ in 0..30 {
                let mut cand = params.clone();
                for j in 0..N_MANIFEST {
                    cand.loadings[j] += t * delta[j];
                    cand.error_variances[j] += t * delta[N_MANIFEST + j];
                }
                if cand.error_variances.iter().all(|v| *v > 0.0) {
                    if let Ok(g_new) = gradient_f(&cand, s) {
                        if g_new.amax() < g.amax() {
                            params = cand;
                            g = g_new;
                            accepted = true;
                            break;
                        }
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
            iterations += 1;
            converged = g.amax() < config.tolerance;
        }
        f = discrepancy_f(&params, s)?;
    }

    // sign convention: flip so the loadings sum is positive
    if params.loadings.sum() < 0.0 {
        params.loadings = -params.loadings;
    }

    let standard_errors = if converged {
        standard_errors(&params, s, config).unwrap_or_else(|_| Vector6::repeat(f64::NAN))
    } else {
        Vector6::repeat(f64::NAN)
    };

    let sigma = implied_covariance(&params);
    let mut standardized = Vector6::zeros();
    let mut r_squared = Vector6::zeros();
    for j in 0..N_MANIFEST {
        let std_loading =
            params.loadings[j] * factor_variance.sqrt() / sigma[(j, j)].sqrt();
        standardized[j] = std_loading;
        r_squared[j] = std_loading * std_loading;
    }

    let stats = fit_statistics(f, s.n, s, &sigma, config)?;

    Ok(CfaFit {
        params,
        standard_errors,
        standardized_loadings: standardized,
        r_squared,
        f_min: f,
        chi_square: stats.chi_square,
        df: MODEL_DF,
        gfi: stats.gfi,
        nfi: stats.nfi,
        nnfi: stats.nnfi,
        cfi: stats.cfi,
        baseline_degenerate: stats.baseline_degenerate,
        converged,
        iterations,
        n: s.n,
    })
}

/// Asymptotic ML standard errors of the loadings: square roots of the
/// loading-block diagonal of (2 / divisor) * H^-1, where H is the Hessian
/// of F at the minimum (the standard SEM convention).
pub fn standard_errors(
    params: &CfaParams,
    s: &SampleCovariance,
    config: &CfaConfig,
) -> Result<Vector6> {
    let hessian = fd_hessian(params, s)?;
    let chol = Cholesky::new(hessian).ok_or(Error::NotAtMinimum)?;
    let cov = chol.inverse() * (2.0 / config.se_divisor.value(s.n));
    let mut se = Vector6::zeros();
    for j in 0..N_MANIFEST {
        se[j] = cov[(j, j)].sqrt();
    }
    Ok(se)
}

/// Hessian of F at `params` by central finite differences of the analytic
/// gradient, symmetrized.
fn fd_hessian(params: &CfaParams, s: &SampleCovariance) -> Result<Matrix12> {
    let mut h = Matrix12::zeros();
    for k in 0..12 {
        let base = if k < 6 {
            params.loadings[k]
        } else {
            params.error_variances[k - 6]
        };
        let mut step = 1e-5 * base.abs().max(1.0);
        if k >= 6 {
            // keep theta positive on the backward shift
            step = step.min(params.error_variances[k - 6] / 2.0);
        }
        let shifted = |delta: f64| -> Result<Vector12> {
            let mut p = params.clone();
            if k < 6 {
                p.loadings[k] += delta;
            } else {
                p.error_variances[k - 6] += delta;
            }
            gradient_f(&p, s)
        };
        let col = (shifted(step)? - shifted(-step)?) / (2.0 * step);
        h.set_column(k, &col);
    }
    Ok((h + h.transpose()) * 0.5)
}

/// Chi-square and the four fit indices, with the diagonal independence
/// model as baseline (its ML solution is theta_j = s_jj exactly).
#[derive(Debug, Clone, Copy)]
pub struct FitStats {
    pub chi_square: f64,
    pub gfi: f64,
    pub nfi: f64,
    pub nnfi: f64,
    pub cfi: f64,
    pub baseline_degenerate: bool,
}

pub fn fit_statistics(
    f_min: f64,
    n: usize,
    s: &SampleCovariance,
    sigma: &Matrix6,
    config: &CfaConfig,
) -> Result<FitStats> {
    let (logdet_s, _) = chol_logdet_inv(&s.matrix)
        .ok_or_else(|| Error::SingularCovariance("sample covariance".into()))?;
    let (_, sigma_inv) = chol_logdet_inv(sigma)
        .ok_or_else(|| Error::SingularCovariance("fitted covariance".into()))?;

    let mult = config.chi_square_multiplier.value(n);
    let chi_m = mult * f_min;

    // baseline discrepancy: F_b = sum_j log s_jj - log|S|
    let f_baseline: f64 =
        (0..N_MANIFEST).map(|j| s.matrix[(j, j)].ln()).sum::<f64>() - logdet_s;
    let chi_b = mult * f_baseline;

    // GFI = 1 - tr[(Sigma^-1 S - I)^2] / tr[(Sigma^-1 S)^2]
    let w = sigma_inv * s.matrix;
    let resid = w - Matrix6::identity();
    let gfi = 1.0 - (resid * resid).trace() / (w * w).trace();

    let df_m = MODEL_DF as f64;
    let df_b = BASELINE_DF as f64;
    let mut degenerate = false;

    let nfi = if chi_b > 1e-12 {
        (chi_b - chi_m) / chi_b
    } else {
        degenerate = true;
        1.0
    };

    let nnfi_denom = chi_b / df_b - 1.0;
    let nnfi = if chi_b > 1e-12 && nnfi_denom.abs() > 1e-12 {
        (chi_b / df_b - chi_m / df_m) / nnfi_denom
    } else {
        degenerate = true;
        1.0
    };

    let cfi_denom = (chi_b - df_b).max(chi_m - df_m).max(0.0);
    let cfi = if cfi_denom > 0.0 {
        1.0 - (chi_m - df_m).max(0.0) / cfi_denom
    } else {
        1.0
    };

    Ok(FitStats {
        chi_square: chi_m,
        gfi,
        nfi,
        nnfi,
        cfi,
        baseline_degenerate: degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfa::{sample_covariance, ManifestVector, Multiplier};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn exact_cov(loadings: [f64; 6], thetas: [f64; 6], n: usize) -> SampleCovariance {
        let p = CfaParams::new(loadings, thetas, 1.0);
        SampleCovariance { matrix: implied_covariance(&p), n }
    }

    #[test]
    fn recovers_exact_model() {
        let loadings = [8.0, 17.0, 3.5, 7.0, 4.0, 18.0];
        let s = exact_cov(loadings, [10.0; 6], 238);
        let fit = fit(&s, &CfaConfig::default()).unwrap();
        assert!(fit.converged, "did not converge in {} iterations", fit.iterations);
        assert!(fit.f_min < 1e-10, "f_min = {}", fit.f_min);
        for j in 0..6 {
            assert!(
                (fit.params.loadings[j] - loadings[j]).abs() < 1e-4,
                "loading {j}: {} vs {}",
                fit.params.loadings[j],
                loadings[j]
            );
            assert!((fit.params.error_variances[j] - 10.0).abs() < 1e-3);
        }
        assert_eq!(fit.df, 9);
        assert!((fit.chi_square - 237.0 * fit.f_min).abs() < 1e-12);
        assert!(fit.gfi > 1.0 - 1e-8 && fit.nfi > 1.0 - 1e-8 && fit.cfi > 1.0 - 1e-8);
    }

    #[test]
    fn identity_covariance_gives_null_loadings() {
        let s = SampleCovariance { matrix: Matrix6::identity(), n: 100 };
        let fit = fit(&s, &CfaConfig::default()).unwrap();
        for j in 0..6 {
            // F is quartically flat in lambda around 0, so the gradient
            // criterion only pins |lambda| down to ~(tol)^(1/3)
            assert!(fit.params.loadings[j].abs() < 5e-3, "lambda_{j} = {}", fit.params.loadings[j]);
            assert!((fit.params.error_variances[j] - 1.0).abs() < 1e-3);
        }
        assert!(fit.f_min < 1e-8);
    }

    fn sample_from_model(
        loadings: [f64; 6],
        thetas: [f64; 6],
        n: usize,
        rng: &mut impl Rng,
    ) -> Vec<ManifestVector> {
        let normal = Normal::new(0.0, 1.0).unwrap();
        (0..n)
            .map(|_| {
                let xi: f64 = normal.sample(rng);
                ManifestVector::from_array(std::array::from_fn(|j| {
                    loadings[j] * xi + thetas[j].sqrt() * normal.sample(rng)
                }))
            })
            .collect()
    }

    #[test]
    fn monte_carlo_recovery_within_standard_errors() {
        let loadings = [8.15, 16.89, 3.47, 6.85, 4.07, 18.43];
        let thetas: [f64; 6] = [17.7, 2.9, 6.5, 10.3, 10.6, 3.4];
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let data = sample_from_model(loadings, thetas, 500, &mut rng);
        let s = sample_covariance(&data).unwrap();
        let fit = fit(&s, &CfaConfig::default()).unwrap();
        assert!(fit.converged);
        for j in 0..6 {
            let dev = (fit.params.loadings[j] - loadings[j]).abs();
            assert!(
                dev < 3.0 * fit.standard_errors[j],
                "loading {j} off by {dev} vs 3*SE {}",
                3.0 * fit.standard_errors[j]
            );
        }
    }

    #[test]
    fn r_squared_is_squared_standardized_loading() {
        let s = exact_cov([8.0, 17.0, 3.5, 7.0, 4.0, 18.0], [10.0; 6], 238);
        let fit = fit(&s, &CfaConfig::default()).unwrap();
        for j in 0..6 {
            assert_eq!(fit.r_squared[j], fit.standardized_loadings[j].powi(2));
            assert!(fit.standardized_loadings[j].abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn fit_rejects_non_positive_definite_sample() {
        let s = SampleCovariance { matrix: Matrix6::zeros(), n: 10 };
        assert!(matches!(
            fit(&s, &CfaConfig::default()),
            Err(Error::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn standard_errors_scale_with_sample_size() {
        let loadings = [8.15, 16.89, 3.47, 6.85, 4.07, 18.43];
        let thetas: [f64; 6] = [17.7, 2.9, 6.5, 10.3, 10.6, 3.4];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let data = sample_from_model(loadings, thetas, 2000, &mut rng);
        let s1 = sample_covariance(&data).unwrap();
        let s2 = SampleCovariance { matrix: s1.matrix, n: 2 * s1.n };
        let cfg = CfaConfig::default();
        let f1 = fit(&s1, &cfg).unwrap();
        let f2 = fit(&s2, &cfg).unwrap();
        for j in 0..6 {
            let ratio = f2.standard_errors[j] / f1.standard_errors[j];
            assert!(
                (ratio - 0.5f64.sqrt()).abs() < 0.02 * 0.5f64.sqrt(),
                "SE ratio {ratio} for loading {j}"
            );
        }
        assert!(f1.standard_errors.iter().all(|se| *se > 0.0));
    }

    #[test]
    fn monte_carlo_se_calibration() {
        // empirical spread of recovered lambda_1 across replications should
        // match the reported asymptotic SE within 15%
        let loadings = [8.15, 16.89, 3.47, 6.85, 4.07, 18.43];
        let thetas: [f64; 6] = [17.7, 2.9, 6.5, 10.3, 10.6, 3.4];
        let cfg = CfaConfig::default();
        let mut estimates = Vec::new();
        let mut reported_se = 0.0;
        for rep in 0..200u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + rep);
            let data = sample_from_model(loadings, thetas, 400, &mut rng);
            let s = sample_covariance(&data).unwrap();
            let f = fit(&s, &cfg).unwrap();
            assert!(f.converged);
            estimates.push(f.params.loadings[0]);
            reported_se += f.standard_errors[0];
        }
        reported_se /= estimates.len() as f64;
        let mean = estimates.iter().sum::<f64>() / estimates.len() as f64;
        let var = estimates.iter().map(|x| (x - mean).powi(2)).sum::<f64>()
            / (estimates.len() - 1) as f64;
        let empirical = var.sqrt();
        assert!(
            (empirical - reported_se).abs() / reported_se < 0.15,
            "empirical sd {empirical} vs reported SE {reported_se}"
        );
    }

    #[test]
    fn chi_square_multiplier_is_configurable() {
        let s = exact_cov([8.0, 17.0, 3.5, 7.0, 4.0, 18.0], [10.0; 6], 100);
        let sigma = s.matrix;
        let cfg_n = CfaConfig { chi_square_multiplier: Multiplier::N, ..CfaConfig::default() };
        let cfg_n1 = CfaConfig::default();
        let a = fit_statistics(0.5, 100, &s, &sigma, &cfg_n).unwrap();
        let b = fit_statistics(0.5, 100, &s, &sigma, &cfg_n1).unwrap();
        assert!((a.chi_square - 50.0).abs() < 1e-12);
        assert!((b.chi_square - 49.5).abs() < 1e-12);
    }

    #[test]
    fn perfect_fit_statistics() {
        let s = exact_cov([8.0, 17.0, 3.5, 7.0, 4.0, 18.0], [10.0; 6], 238);
        let stats = fit_statistics(0.0, 238, &s, &s.matrix.clone(), &CfaConfig::default()).unwrap();
        assert_eq!(stats.chi_square, 0.0);
        assert!((stats.gfi - 1.0).abs() < 1e-12);
        assert!((stats.nfi - 1.0).abs() < 1e-12);
        assert!((stats.cfi - 1.0).abs() < 1e-12);
        assert!(!stats.baseline_degenerate);
    }

    #[test]
    fn degenerate_baseline_flags_and_pins_indices() {
        // diagonal S: the independence baseline already fits perfectly
        let s = SampleCovariance { matrix: Matrix6::identity() * 2.0, n: 50 };
        let stats = fit_statistics(0.1, 50, &s, &s.matrix.clone(), &CfaConfig::default()).unwrap();
        assert!(stats.baseline_degenerate);
        assert_eq!(stats.nfi, 1.0);
        assert_eq!(stats.nnfi, 1.0);
    }

    #[test]
    fn fit_invariant_to_input_order() {
        let loadings = [8.15, 16.89, 3.47, 6.85, 4.07, 18.43];
        let thetas: [f64; 6] = [17.7, 2.9, 6.5, 10.3, 10.6, 3.4];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut data = sample_from_model(loadings, thetas, 120, &mut rng);
        let s1 = sample_covariance(&data).unwrap();
        data.reverse();
        let s2 = sample_covariance(&data).unwrap();
        let cfg = CfaConfig::default();
        let f1 = fit(&s1, &cfg).unwrap();
        let f2 = fit(&s2, &cfg).unwrap();
        for j in 0..6 {
            assert!((f1.params.loadings[j] - f2.params.loadings[j]).abs() < 1e-6);
        }
    }

    #[test]
    fn column_rescaling_scales_unstandardized_loading_only() {
        let loadings = [8.15, 16.89, 3.47, 6.85, 4.07, 18.43];
        let thetas: [f64; 6] = [17.7, 2.9, 6.5, 10.3, 10.6, 3.4];
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let data = sample_from_model(loadings, thetas, 500, &mut rng);
        let scaled: Vec<ManifestVector> = data
            .iter()
            .map(|v| {
                let mut a = v.as_array();
                a[2] *= 3.0;
                ManifestVector::from_array(a)
            })
            .collect();
        let cfg = CfaConfig::default();
        let f1 = fit(&sample_covariance(&data).unwrap(), &cfg).unwrap();
        let f2 = fit(&sample_covariance(&scaled).unwrap(), &cfg).unwrap();
        assert!(
            (f2.params.loadings[2] - 3.0 * f1.params.loadings[2]).abs()
                < 1e-6 * f1.params.loadings[2].abs().max(1.0)
        );
        assert!((f2.standardized_loadings[2] - f1.standardized_loadings[2]).abs() < 1e-6);
    }
}

