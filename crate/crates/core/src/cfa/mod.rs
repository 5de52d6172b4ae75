//! One-factor confirmatory factor analysis on the six transformed
//! bibliometric indicators.
//!
//! The model is x_j = lambda_j * xi + delta_j with a single latent factor
//! of fixed variance (sigma^2 = 1 under the default identification), so the
//! implied covariance is Sigma = sigma^2 * Lambda Lambda' + Theta with
//! diagonal Theta. Fitting minimizes the ML discrepancy
//! F = log|Sigma| + tr(S Sigma^-1) - log|S| - 6.

mod fit;
mod model;
mod scores;

pub use fit::{fit, fit_statistics, standard_errors, FitStats};
pub use model::{discrepancy_f, gradient_f, implied_covariance, log_likelihood};
pub use scores::anderson_rubin_scores;

use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indices::IndexBundle;

/// Number of manifest variables; fixed by the indicator set.
pub const N_MANIFEST: usize = 6;

/// Model degrees of freedom: 21 covariance moments minus 12 free parameters.
pub const MODEL_DF: usize = 9;

/// Degrees of freedom of the diagonal independence baseline (21 - 6).
pub const BASELINE_DF: usize = 15;

pub type Vector6 = SVector<f64, 6>;
pub type Matrix6 = SMatrix<f64, 6, 6>;
pub(crate) type Vector12 = SVector<f64, 12>;

/// The six transformed indicator values of one researcher, in the
/// canonical order used everywhere downstream (j = 1..6).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ManifestVector {
    pub h: f64,
    pub two_g_over_3: f64,
    pub h_i: f64,
    pub sqrt_ar: f64,
    pub sqrt_articles: f64,
    pub sqrt_cit_over_2: f64,
}

impl ManifestVector {
    pub fn from_array(a: [f64; 6]) -> Self {
        ManifestVector {
            h: a[0],
            two_g_over_3: a[1],
            h_i: a[2],
            sqrt_ar: a[3],
            sqrt_articles: a[4],
            sqrt_cit_over_2: a[5],
        }
    }

    pub fn as_array(&self) -> [f64; 6] {
        [
            self.h,
            self.two_g_over_3,
            self.h_i,
            self.sqrt_ar,
            self.sqrt_articles,
            self.sqrt_cit_over_2,
        ]
    }

    pub fn to_vector(&self) -> Vector6 {
        Vector6::from_column_slice(&self.as_array())
    }
}

/// Column labels in canonical order, shared by report tables.
pub const MANIFEST_LABELS: [&str; 6] =
    ["h", "2g/3", "h_i", "sqrt(AR)", "sqrt(papers)", "sqrt(citations/2)"];

/// Apply the variable transforms to an index bundle:
/// [h, (2/3) g, h_i, sqrt(AR), sqrt(papers), sqrt(citations/2)].
pub fn manifest_vector(bundle: &IndexBundle) -> ManifestVector {
    ManifestVector {
        h: bundle.h as f64,
        two_g_over_3: 2.0 * bundle.g as f64 / 3.0,
        h_i: bundle.h_i,
        sqrt_ar: bundle.ar_sum.sqrt(),
        sqrt_articles: (bundle.n_papers as f64).sqrt(),
        sqrt_cit_over_2: (bundle.n_citations as f64 / 2.0).sqrt(),
    }
}

/// Unbiased sample covariance (divisor n - 1) of a population's manifest
/// vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleCovariance {
    pub matrix: Matrix6,
    pub n: usize,
}

pub fn sample_covariance(vectors: &[ManifestVector]) -> Result<SampleCovariance> {
    let n = vectors.len();
    if n < 2 {
        return Err(Error::InsufficientSample { needed: 2, got: n });
    }
    let mean: Vector6 = vectors.iter().map(|v| v.to_vector()).sum::<Vector6>() / n as f64;
    let mut m = Matrix6::zeros();
    for v in vectors {
        let d = v.to_vector() - mean;
        m += d * d.transpose();
    }
    m /= (n - 1) as f64;
    // enforce exact symmetry against accumulation order effects
    let m = (m + m.transpose()) * 0.5;
    Ok(SampleCovariance { matrix: m, n })
}

/// Free parameters of the one-factor model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfaParams {
    /// Unstandardized loadings lambda_1..lambda_6.
    pub loadings: Vector6,
    /// Diagonal of Theta; strictly positive.
    pub error_variances: Vector6,
    /// Fixed factor variance sigma^2 (identification constant, default 1).
    pub factor_variance: f64,
}

impl CfaParams {
    pub fn new(loadings: [f64; 6], error_variances: [f64; 6], factor_variance: f64) -> Self {
        CfaParams {
            loadings: Vector6::from_column_slice(&loadings),
            error_variances: Vector6::from_column_slice(&error_variances),
            factor_variance,
        }
    }
}

/// Which constant multiplies f_min into the chi-square (and scales SEs).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Multiplier {
    N,
    #[default]
    NMinusOne,
}

impl Multiplier {
    pub fn value(&self, n: usize) -> f64 {
        match self {
            Multiplier::N => n as f64,
            Multiplier::NMinusOne => (n - 1) as f64,
        }
    }
}

/// Optimizer and convention settings for [`fit`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CfaConfig {
    /// Gradient max-norm threshold, in the original (lambda, theta) space.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub chi_square_multiplier: Multiplier,
    pub se_divisor: Multiplier,
}

impl Default for CfaConfig {
    fn default() -> Self {
        CfaConfig {
            tolerance: 1e-8,
            max_iterations: 500,
            chi_square_multiplier: Multiplier::NMinusOne,
            se_divisor: Multiplier::NMinusOne,
        }
    }
}

/// serde adapter: JSON has no NaN, so non-finite entries (the standard
/// error fallback of a non-converged fit) round-trip as null.
mod vector6_nullable {
    use super::Vector6;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Vector6, s: S) -> Result<S::Ok, S::Error> {
        let opts: [Option<f64>; 6] =
            std::array::from_fn(|j| if v[j].is_finite() { Some(v[j]) } else { None });
        opts.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vector6, D::Error> {
        let opts = <[Option<f64>; 6]>::deserialize(d)?;
        Ok(Vector6::from_iterator(opts.into_iter().map(|o| o.unwrap_or(f64::NAN))))
    }
}

/// Full result of a maximum-likelihood fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfaFit {
    pub params: CfaParams,
    #[serde(with = "vector6_nullable")]
    pub standard_errors: Vector6,
    pub standardized_loadings: Vector6,
    pub r_squared: Vector6,
    pub f_min: f64,
    pub chi_square: f64,
    pub df: usize,
    pub gfi: f64,
    pub nfi: f64,
    pub nnfi: f64,
    pub cfi: f64,
    /// Set when the independence baseline has chi-square 0 and the
    /// incremental indices were pinned to 1.
    pub baseline_degenerate: bool,
    pub converged: bool,
    pub iterations: usize,
    pub n: usize,
}
