//! Seeded synthetic populations for recovery testing.
//!
//! Manifest vectors are drawn from x = mu + Lambda xi + delta and then
//! back-mapped to publication lists whose recomputed indices approximately
//! reproduce the drawn values: the paper count, total citations, and h are
//! matched exactly; g, sqrt(AR), and h_I to within small rounding error.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::cfa::ManifestVector;
use crate::dataset::PopulationDataset;
use crate::error::{Error, Result};
use crate::indices::{AuthorProfile, Publication, Status};

const MAX_AGE: u64 = 40;
const MAX_AUTHORS_PER_PAPER: u64 = 50;

/// Generating one-factor model, including indicator means (the covariance
/// structure does not depend on them, the back-mapping does).
#[derive(Debug, Clone, PartialEq)]
pub struct FactorModel {
    pub loadings: [f64; 6],
    pub error_variances: [f64; 6],
    pub means: [f64; 6],
    pub factor_variance: f64,
}

impl FactorModel {
    /// Loadings from the published one-factor fit, error variances implied
    /// by its R-squared column, means set to the population averages.
    pub fn paper_like() -> Self {
        let loadings = [8.15, 16.89, 3.47, 6.85, 4.07, 18.43];
        let r_squared = [0.79, 0.99, 0.65, 0.82, 0.61, 0.99];
        let error_variances =
            std::array::from_fn(|j| loadings[j] * loadings[j] * (1.0 / r_squared[j] - 1.0));
        FactorModel {
            loadings,
            error_variances,
            means: [12.79, 18.4, 5.66, 9.03, 9.89, 21.84],
            factor_variance: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.factor_variance > 0.0) {
            return Err(Error::Infeasible("factor variance must be positive".into()));
        }
        for (j, t) in self.error_variances.iter().enumerate() {
            if !(*t > 0.0) {
                return Err(Error::Infeasible(format!("error variance {j} must be positive")));
            }
        }
        Ok(())
    }
}

/// Parameters of [`generate_synthetic`].
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n: usize,
    pub model: FactorModel,
    pub reference_year: i32,
    pub seed: u64,
}

/// Raw draws from the factor model, unclamped. This is the sampler the
/// model-level recovery tests use; [`generate_synthetic`] clamps at zero
/// before back-mapping.
pub fn sample_manifest_vectors(
    model: &FactorModel,
    n: usize,
    rng: &mut impl Rng,
) -> Vec<ManifestVector> {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let factor_sd = model.factor_variance.sqrt();
    (0..n)
        .map(|_| {
            let xi: f64 = normal.sample(rng) * factor_sd;
            ManifestVector::from_array(std::array::from_fn(|j| {
                model.means[j]
                    + model.loadings[j] * xi
                    + model.error_variances[j].sqrt() * normal.sample(rng)
            }))
        })
        .collect()
}

/// Split `sum` into `count` integers differing by at most one, larger
/// values first.
fn distribute(sum: u64, count: usize) -> Vec<u64> {
    if count == 0 {
        return Vec::new();
    }
    let base = sum / count as u64;
    let extra = (sum % count as u64) as usize;
    (0..count).map(|i| base + u64::from(i < extra)).collect()
}

/// Build a publication list whose indices approximately realize one drawn
/// manifest vector.
fn publications_from_manifest(v: &ManifestVector, reference_year: i32) -> Vec<Publication> {
    let sp = v.sqrt_articles.max(0.0);
    let n = (sp * sp).round() as usize;
    if n == 0 {
        return Vec::new();
    }
    let sc = v.sqrt_cit_over_2.max(0.0);
    let mut c_total = (2.0 * sc * sc).round() as u64;
    let mut h = (v.h.round().max(0.0) as usize).min(n);
    if c_total == 0 {
        h = 0;
    } else if h == 0 {
        h = 1;
    }
    if h == 0 {
        return vec![Publication { citations: 0, pub_year: reference_year - 1, n_authors: 1 }; n];
    }
    c_total = c_total.max((h * h) as u64);

    // citation profile: h core papers each >= h, the rest capped at h, with
    // the cumulative total crossing g^2 near the targeted g
    let mut g_t = ((1.5 * v.two_g_over_3).round() as usize).clamp(h, n);
    // independent draws can be jointly infeasible: any arrangement has
    // g <= sqrt(C), and with non-core papers capped at h the tail holds at
    // most (n - g) h citations, which bounds g from below
    let g_max = ((c_total as f64).sqrt().floor() as usize).max(h);
    g_t = g_t.min(g_max);
    if c_total > (n as u64) * (h as u64) {
        let disc = (h as f64).powi(2) + 4.0 * (c_total as f64 - (n as f64) * (h as f64));
        let g_min = (((h as f64) + disc.sqrt()) / 2.0).ceil() as usize;
        g_t = g_t.max(g_min).min(n);
    }
    let gsq = (g_t * g_t) as u64;
    let far_capacity = ((n - g_t) as u64) * (h as u64);
    let far_sum = c_total.saturating_sub(gsq).min(far_capacity);
    let rem = c_total - far_sum;
    let mid_capacity = ((g_t - h) as u64) * (h as u64);
    let core_sum = rem.saturating_sub(mid_capacity).max((h * h) as u64);
    let mid_sum = rem - core_sum;

    let mut citations = distribute(core_sum, h);
    citations.extend(distribute(mid_sum, g_t - h));
    citations.extend(distribute(far_sum, n - g_t));
    citations.sort_unstable_by(|a, b| b.cmp(a));

    // ages: pick each paper's age from {a0, a0+1} greedily so the running
    // age-weighted sum tracks the sqrt(AR) target
    let ar_target = {
        let t = (v.sqrt_ar.max(0.0)).powi(2);
        t.clamp(c_total as f64 / MAX_AGE as f64, c_total as f64).max(1e-9)
    };
    let a0 = ((c_total as f64 / ar_target).floor() as u64).clamp(1, MAX_AGE);
    let a1 = (a0 + 1).min(MAX_AGE);
    let mut achieved = 0.0;
    let mut cum_c = 0u64;
    let ages: Vec<u64> = citations
        .iter()
        .map(|&c| {
            cum_c += c;
            let ideal = ar_target * cum_c as f64 / c_total.max(1) as f64;
            let with_a0 = achieved + c as f64 / a0 as f64;
            let with_a1 = achieved + c as f64 / a1 as f64;
            if (with_a0 - ideal).abs() <= (with_a1 - ideal).abs() {
                achieved = with_a0;
                a0
            } else {
                achieved = with_a1;
                a1
            }
        })
        .collect();

    // author counts: total over the h core papers realizes h_I = h^2 / N_T
    let hi = v.h_i.max(0.0);
    let n_t = if hi > 1e-9 {
        ((h * h) as f64 / hi).round() as u64
    } else {
        (h as u64) * MAX_AUTHORS_PER_PAPER
    }
    .clamp(h as u64, (h as u64) * MAX_AUTHORS_PER_PAPER);
    let core_authors = distribute(n_t - h as u64, h); // on top of 1 each

    citations
        .into_iter()
        .zip(ages)
        .enumerate()
        .map(|(i, (c, age))| Publication {
            citations: c,
            pub_year: reference_year - age as i32,
            n_authors: if i < h { (1 + core_authors[i]) as u32 } else { 1 },
        })
        .collect()
}

const DEPARTMENTS: [&str; 3] = ["Dept-A", "Dept-B", "Dept-C"];

/// Deterministic synthetic population: identical config (seed included)
/// yields a byte-identical dataset. n = 0 is an empty dataset, not an
/// error.
pub fn generate_synthetic(config: &SynthConfig) -> Result<PopulationDataset> {
    config.model.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let vectors = sample_manifest_vectors(&config.model, config.n, &mut rng);

    // HCR flag: total citations beyond twice the mean-implied level
    let mean_sc = config.model.means[5].max(0.0);
    let hcr_cutoff = 4.0 * mean_sc * mean_sc;

    let authors = vectors
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let publications = publications_from_manifest(v, config.reference_year);
            let total: u64 = publications.iter().map(|p| p.citations).sum();
            AuthorProfile {
                author_id: format!("synth-{i:05}"),
                display_name: format!("Synthetic Researcher {i}"),
                department: DEPARTMENTS[i % DEPARTMENTS.len()].to_string(),
                status: Status::Faculty,
                hcr: total as f64 > hcr_cutoff,
                publications,
            }
        })
        .collect();

    Ok(PopulationDataset {
        authors,
        reference_year: config.reference_year,
        source: format!("synthetic(seed={})", config.seed),
    })
}
