//! Acceptance gate: one test per criterion, each printing a single
//! PASS line on success (the harness reports FAIL on panic).

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bibfactor::analytics::power_law_fit;
use bibfactor::cfa::{
    anderson_rubin_scores, discrepancy_f, fit, gradient_f, implied_covariance, log_likelihood,
    manifest_vector, sample_covariance, CfaConfig, CfaParams, ManifestVector, SampleCovariance,
    Vector6,
};
use bibfactor::indices::{
    ar_sum, g_index, h_index, hi_index, index_bundle, r_index, ArVariant, AuthorProfile,
    GVariant, IndexConfig, Publication, Status,
};
use bibfactor::scoring::{pm_score, pm_weights_from_parts, rank_population, PmWeights};
use bibfactor::synth::{generate_synthetic, sample_manifest_vectors, FactorModel, SynthConfig};

fn pass(id: u32, what: &str) {
    println!("acceptance {id:02}: PASS — {what}");
}

/// Published loadings and standard errors, canonical manifest order
/// [h, 2g/3, h_i, sqrt(AR), sqrt(papers), sqrt(citations/2)].
const LOADINGS: [f64; 6] = [8.15, 16.89, 3.47, 6.85, 4.07, 18.43];
const SES: [f64; 6] = [0.46, 0.79, 0.23, 0.38, 0.28, 0.84];

fn published_weights() -> PmWeights {
    pm_weights_from_parts(
        &Vector6::from_column_slice(&LOADINGS),
        &Vector6::from_column_slice(&SES),
    )
    .unwrap()
}

/// The 50 published rows: department, author, and the printed columns in
/// table order (h, 2g/3, sqrt(AR), h_1, sqrt(papers), sqrt(citations/2)),
/// then the printed composite score.
#[rustfmt::skip]
const TABLE5: [(&str, &str, [f64; 6], f64); 50] = [
    ("Stanford", "Donoho, D.L.", [52.0, 86.0, 41.64, 25.75, 24.1, 92.77], 62.85),
    ("Harvard", "Rubin, D.B.", [29.0, 103.33, 39.79, 12.94, 14.53, 109.84], 62.57),
    ("Berkeley", "Jordan, M.I.", [60.0, 82.67, 41.85, 21.05, 23.52, 90.87], 62.38),
    ("Stanford", "Tibshirani, R.", [40.0, 75.33, 37.83, 15.53, 17.29, 80.61], 52.56),
    ("Harvard", "Dempster, A.P.", [21.0, 88.0, 23.21, 10.02, 12.57, 93.61], 50.6),
    ("Stanford", "Stork, D.G.", [20.0, 66.67, 32.51, 7.27, 15.97, 71.3], 42.72),
    ("Stanford", "Friedman, J.H.", [31.0, 61.33, 22.92, 11.31, 19.1, 67.11], 41.94),
    ("Stanford", "Diaconis, P.", [39.0, 51.33, 20.78, 19.5, 20.32, 58.41], 40.34),
    ("Washington", "Raftery, A.E.", [32.0, 52.67, 24.93, 12.19, 14.97, 57.09], 37.96),
    ("Minnesota", "Cook, R.D.", [29.0, 47.33, 34.45, 15.29, 16.91, 52.55], 37.76),
    ("Stanford", "Wong, W-H.", [30.0, 50.0, 26.16, 9.09, 22.11, 56.22], 37.64),
    ("Stanford", "Hastie, T.J.", [25.0, 48.0, 36.47, 8.45, 17.41, 52.35], 36.56),
    ("Chicago", "Billingsley, P.", [15.0, 61.33, 14.37, 14.06, 10.95, 65.44], 36.43),
    ("Stanford", "Efron, B.", [28.0, 50.0, 19.77, 15.68, 16.25, 54.5], 35.9),
    ("Harvard", "Liu, J.S.", [29.0, 48.0, 23.77, 10.13, 19.44, 53.4], 35.76),
    ("Berkeley", "Aldous, D.J.", [34.0, 41.33, 16.9, 24.6, 19.31, 47.96], 34.95),
    ("Carnegie Mellon", "Lehoczy, J.P.", [28.0, 50.67, 18.08, 10.05, 14.66, 54.58], 34.67),
    ("Duke", "West, M.", [27.0, 42.0, 20.72, 9.23, 27.22, 49.93], 33.8),
    ("Oxford", "Cox, D.R.", [32.0, 40.0, 19.29, 13.84, 17.32, 51.02], 33.5),
    ("Duke", "Gelfand, A.E.", [24.0, 48.0, 19.59, 9.0, 14.18, 51.94], 32.86),
    ("Washington", "Stuetzle, W.", [20.0, 51.33, 19.95, 4.6, 13.49, 54.92], 32.82),
    ("Washington", "Bookstein, F.L.", [22.0, 47.33, 17.54, 10.08, 13.93, 51.01], 31.92),
    ("Carnegie Mellon", "Fienberg, S.", [23.0, 46.0, 17.14, 9.12, 15.65, 50.48], 31.73),
    ("Oxford", "Lauritzen, S.", [21.0, 48.0, 17.09, 9.0, 12.57, 51.85], 31.62),
    ("Stanford", "Chui, C.K.", [29.0, 38.67, 16.81, 14.75, 15.87, 44.32], 30.69),
    ("Stanford", "Lavori, P.", [33.0, 40.67, 19.1, 7.07, 11.92, 44.49], 30.54),
    ("Chicago", "Goodman, L.A.", [25.0, 38.67, 12.32, 13.89, 25.44, 44.68], 30.51),
    ("Stanford", "Anderson, T.W.", [25.0, 41.33, 10.24, 17.86, 14.7, 45.52], 29.93),
    ("Stanford", "Johnstone, I.M.", [22.0, 38.0, 29.63, 8.2, 14.53, 41.75], 29.87),
    ("Stanford", "Dembo, A.", [25.0, 39.33, 18.05, 10.96, 15.56, 43.88], 29.63),
    ("Berkeley", "Pitman, J.W.", [30.0, 32.0, 17.67, 15.0, 19.92, 41.51], 29.61),
    ("Stanford", "Cover, T.M.", [28.0, 38.67, 12.98, 12.85, 15.03, 42.7], 29.06),
    ("Berkeley", "Speed, T.P.", [21.0, 40.0, 22.14, 7.11, 14.0, 43.49], 28.91),
    ("Chicago", "Niyogi, P.", [24.0, 37.33, 22.43, 8.73, 13.34, 40.72], 28.47),
    ("Stanford", "Olkin, I.", [23.0, 39.33, 11.12, 10.37, 15.26, 43.36], 27.79),
    ("Berkeley", "Peres, Y.", [28.0, 28.0, 17.19, 10.59, 19.16, 37.16], 26.58),
    ("Berkeley", "Bartlett, P.L.", [25.0, 31.33, 18.47, 8.45, 18.08, 36.64], 26.4),
    ("Chicago", "Stephens, M.", [14.0, 38.0, 13.49, 6.76, 18.38, 41.8], 25.9),
    ("Berkeley", "Stone, C.J.", [24.0, 35.33, 11.92, 8.23, 12.69, 38.9], 25.58),
    ("Berkeley", "Rice, J.", [18.0, 32.0, 14.62, 5.79, 23.15, 38.84], 25.43),
    ("Oxford", "Silverman, B.", [25.0, 31.33, 13.56, 10.59, 16.64, 35.6], 25.4),
    ("Duke", "Sacks, J.", [21.0, 35.33, 12.77, 7.23, 13.6, 38.9], 25.18),
    ("Harvard", "Chernoff, H.", [18.0, 37.33, 8.34, 12.0, 11.62, 40.28], 25.01),
    ("Stanford", "Lai, T-L.", [25.0, 26.0, 12.27, 13.59, 17.75, 34.73], 24.45),
    ("Oxford", "Snijders, T.", [14.0, 35.33, 18.2, 6.13, 9.33, 37.83], 23.9),
    ("Minnesota", "Geyer, C.", [17.0, 30.67, 13.91, 10.32, 13.11, 34.07], 23.02),
    ("Berkeley", "Dudoit, S.", [18.0, 30.0, 18.72, 6.23, 11.27, 33.11], 22.82),
    ("Washington", "Richardson, T.", [19.0, 28.0, 14.15, 6.33, 18.36, 33.08], 22.78),
    ("Duke", "Clark, J.S.", [16.0, 28.67, 13.63, 11.13, 16.09, 33.04], 22.69),
    ("Minnesota", "Hawkins, D.M.", [24.0, 26.67, 11.88, 12.26, 12.41, 30.87], 22.52),
];

/// Printed table order -> canonical manifest order.
fn row_to_manifest(row: &[f64; 6]) -> ManifestVector {
    ManifestVector::from_array([row[0], row[1], row[3], row[2], row[4], row[5]])
}

#[test]
fn criterion_01_table5_reproduction() {
    let start = Instant::now();
    let w = published_weights();
    for (dept, author, row, printed) in &TABLE5 {
        let score = pm_score(&row_to_manifest(row), &w);
        assert!(
            (score - printed).abs() <= 0.06,
            "{dept}/{author}: computed {score:.4} vs printed {printed}"
        );
    }
    let anchors = [(0, 62.85), (1, 62.57), (2, 62.38), (49, 22.52)];
    for (i, expected) in anchors {
        assert_eq!(TABLE5[i].3, expected);
    }
    assert!(start.elapsed().as_secs_f64() < 1.0, "took {:?}", start.elapsed());
    pass(1, "all 50 published composite scores reproduced within ±0.06");
}

/// Department rows of the published output tables: (faculty, total,
/// non-HCR count, non-HCR total, HCR count, HCR total), plus the printed
/// totals row. One instance for articles, one for citations.
#[rustfmt::skip]
const ARTICLES_TABLE: ([(u64, u64, u64, u64, u64, u64); 9], (u64, u64, u64, u64, u64, u64)) = ([
    (30, 6243, 21, 3003, 9, 3240),
    (41, 6591, 36, 5509, 5, 1082),
    (20, 2191, 16, 1047, 4, 1144),
    (21, 1729, 20, 1443, 1, 286),
    (30, 2840, 28, 2382, 2, 458),
    (26, 2377, 24, 2064, 2, 313),
    (25, 2538, 24, 2448, 1, 90),
    (20, 2367, 18, 1997, 2, 370),
    (25, 2827, 24, 2673, 1, 154),
], (238, 29703, 211, 22566, 27, 7137));

#[rustfmt::skip]
const CITATIONS_TABLE: ([(u64, u64, u64, u64, u64, u64); 9], (u64, u64, u64, u64, u64, u64)) = ([
    (30, 114671, 21, 44988, 9, 69683),
    (41, 62734, 36, 52020, 5, 10714),
    (20, 58992, 16, 25963, 4, 33029),
    (21, 14848, 20, 9326, 1, 5522),
    (30, 27846, 28, 17263, 2, 10583),
    (26, 32003, 24, 22857, 2, 9146),
    (25, 24420, 24, 22409, 1, 2011),
    (20, 21654, 18, 14827, 2, 6827),
    (25, 29730, 24, 28976, 1, 754),
], (238, 386898, 211, 238629, 27, 148269));

fn check_totals(rows: &[(u64, u64, u64, u64, u64, u64); 9], total: &(u64, u64, u64, u64, u64, u64)) {
    let sum = rows.iter().fold((0, 0, 0, 0, 0, 0), |acc, r| {
        (acc.0 + r.0, acc.1 + r.1, acc.2 + r.2, acc.3 + r.3, acc.4 + r.4, acc.5 + r.5)
    });
    assert_eq!(&sum, total);
    for r in rows {
        assert_eq!(r.0, r.2 + r.4); // faculty = non-HCR + HCR
        assert_eq!(r.1, r.3 + r.5); // output splits exactly
    }
}

#[test]
fn criterion_02_table_internal_consistency() {
    // published median AR of the top department and its square root
    assert!((121.75f64.sqrt() - 11.03).abs() <= 0.01);
    // HCR shares of the top department
    let cit = 100.0_f64 * 69683.0 / 114671.0;
    assert!((cit - 60.77).abs() <= 0.01, "citation share {cit}");
    let art = 100.0_f64 * 3240.0 / 6243.0;
    assert!((art - 51.9).abs() <= 0.1, "article share {art}");
    check_totals(&ARTICLES_TABLE.0, &ARTICLES_TABLE.1);
    check_totals(&CITATIONS_TABLE.0, &CITATIONS_TABLE.1);
    pass(2, "published shares and totals rows internally consistent");
}

// ---- independent brute-force index oracles ----

fn h_bf(c: &[u64]) -> usize {
    (0..=c.len())
        .filter(|&k| c.iter().filter(|&&x| x >= k as u64).count() >= k)
        .max()
        .unwrap()
}

fn sorted_desc(c: &[u64]) -> Vec<u64> {
    let mut v = c.to_vec();
    v.sort_by(|a, b| b.cmp(a));
    v
}

fn g_bf(c: &[u64], capped: bool) -> usize {
    let sorted = sorted_desc(c);
    let total: u64 = sorted.iter().sum();
    let max_k = if capped {
        sorted.len()
    } else {
        (total as f64).sqrt() as usize + 2
    };
    (0..=max_k)
        .filter(|&k| sorted.iter().take(k).sum::<u64>() >= (k * k) as u64)
        .max()
        .unwrap()
}

/// Stable h-core by citations descending (ties keep input order), shared
/// convention for the R, AR (h-core), and h_I oracles.
fn core_bf(c: &[u64]) -> Vec<usize> {
    let h = h_bf(c);
    let mut idx: Vec<usize> = (0..c.len()).collect();
    idx.sort_by(|&a, &b| c[b].cmp(&c[a]));
    idx.truncate(h);
    idx
}

fn r_bf(c: &[u64]) -> f64 {
    (core_bf(c).iter().map(|&i| c[i]).sum::<u64>() as f64).sqrt()
}

fn ar_bf(pubs: &[Publication], year: i32, all_papers: bool) -> f64 {
    let age = |p: &Publication| (year - p.pub_year).max(1) as f64;
    if all_papers {
        pubs.iter().map(|p| p.citations as f64 / age(p)).sum()
    } else {
        let c: Vec<u64> = pubs.iter().map(|p| p.citations).collect();
        core_bf(&c).iter().map(|&i| pubs[i].citations as f64 / age(&pubs[i])).sum()
    }
}

fn hi_bf(pubs: &[Publication]) -> f64 {
    let c: Vec<u64> = pubs.iter().map(|p| p.citations).collect();
    let core = core_bf(&c);
    if core.is_empty() {
        return 0.0;
    }
    let nt: u64 = core.iter().map(|&i| pubs[i].n_authors as u64).sum();
    (core.len() * core.len()) as f64 / nt as f64
}

fn random_profile(rng: &mut impl Rng) -> Vec<Publication> {
    let n = rng.gen_range(0..=200);
    (0..n)
        .map(|_| Publication {
            citations: rng.gen_range(0..=10_000),
            pub_year: rng.gen_range(1970..=2008),
            n_authors: rng.gen_range(1..=50),
        })
        .collect()
}

#[test]
fn criterion_03_index_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let rel = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0);
    for _ in 0..10_000 {
        let pubs = random_profile(&mut rng);
        let c: Vec<u64> = pubs.iter().map(|p| p.citations).collect();
        assert_eq!(h_index(&c), h_bf(&c));
        assert_eq!(g_index(&c, GVariant::Capped), g_bf(&c, true));
        assert_eq!(g_index(&c, GVariant::Uncapped), g_bf(&c, false));
        assert!(rel(r_index(&c), r_bf(&c)));
        assert!(rel(
            ar_sum(&pubs, 2008, ArVariant::PopAllPapers),
            ar_bf(&pubs, 2008, true)
        ));
        assert!(rel(
            ar_sum(&pubs, 2008, ArVariant::JinHCore),
            ar_bf(&pubs, 2008, false)
        ));
        assert!(rel(hi_index(&pubs), hi_bf(&pubs)));
    }
    assert!(start.elapsed().as_secs_f64() < 30.0, "took {:?}", start.elapsed());
    pass(3, "all indices match brute-force oracles on 10,000 random profiles");
}

fn random_params(rng: &mut impl Rng) -> CfaParams {
    CfaParams::new(
        std::array::from_fn(|_| rng.gen_range(0.5..20.0)),
        std::array::from_fn(|_| rng.gen_range(0.5..20.0)),
        1.0,
    )
}

#[test]
fn criterion_04_cfa_exactness() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for _ in 0..100 {
        let p = random_params(&mut rng);
        let s = SampleCovariance { matrix: implied_covariance(&p), n: 238 };
        let f = discrepancy_f(&p, &s).unwrap();
        assert!(f.abs() < 1e-12, "F at truth = {f:e}");
    }
    let truth = CfaParams::new(LOADINGS, [17.7, 2.9, 6.5, 10.3, 10.6, 3.4], 1.0);
    let s = SampleCovariance { matrix: implied_covariance(&truth), n: 238 };
    let fitted = fit(&s, &CfaConfig::default()).unwrap();
    assert!(fitted.converged);
    assert!(fitted.f_min < 1e-10, "f_min = {:e}", fitted.f_min);
    for j in 0..6 {
        assert!(
            (fitted.params.loadings[j] - LOADINGS[j]).abs() < 1e-4,
            "loading {j}: {} vs {}",
            fitted.params.loadings[j],
            LOADINGS[j]
        );
    }
    assert!(start.elapsed().as_secs_f64() < 5.0, "took {:?}", start.elapsed());
    pass(4, "F vanishes at truth and exact covariances recover the loadings");
}

#[test]
fn criterion_05_gradient_correctness() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for _ in 0..50 {
        let p = random_params(&mut rng);
        let s = SampleCovariance {
            matrix: implied_covariance(&random_params(&mut rng)),
            n: 100,
        };
        let g = gradient_f(&p, &s).unwrap();
        // central finite differences, the independent oracle
        let h = 1e-5;
        let mut max_err: f64 = 0.0;
        for k in 0..12 {
            let eval = |delta: f64| {
                let mut q = p.clone();
                if k < 6 {
                    q.loadings[k] += delta;
                } else {
                    q.error_variances[k - 6] += delta;
                }
                discrepancy_f(&q, &s).unwrap()
            };
            let fd = (eval(h) - eval(-h)) / (2.0 * h);
            max_err = max_err.max((g[k] - fd).abs());
        }
        let rel = max_err / g.amax().max(1.0);
        assert!(rel < 1e-6, "relative gradient error {rel:e}");
    }
    pass(5, "analytic gradient matches central finite differences at 50 points");
}

#[test]
fn criterion_06_joreskog_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let n = 238;
    let s = SampleCovariance {
        matrix: implied_covariance(&random_params(&mut rng)),
        n,
    };
    for _ in 0..100 {
        let p1 = random_params(&mut rng);
        let p2 = random_params(&mut rng);
        let df = discrepancy_f(&p1, &s).unwrap() - discrepancy_f(&p2, &s).unwrap();
        let dl = log_likelihood(&p1, &s, n).unwrap() - log_likelihood(&p2, &s, n).unwrap();
        assert!(
            (df + 2.0 / n as f64 * dl).abs() < 1e-10,
            "F diff {df} vs -2/n logL diff {}",
            -2.0 / n as f64 * dl
        );
    }
    pass(6, "discrepancy differences equal -(2/n) log-likelihood differences");
}

/// Paper-like loadings with indicator means far from zero, so the
/// generator's clamp at zero citations stays inert.
fn recovery_model() -> FactorModel {
    let mut model = FactorModel::paper_like();
    for j in 0..6 {
        let sd =
            (model.loadings[j].powi(2) * model.factor_variance + model.error_variances[j]).sqrt();
        model.means[j] = 3.5 * sd;
    }
    model
}

#[test]
fn criterion_07_monte_carlo_recovery() {
    let model = recovery_model();
    let cfg = CfaConfig::default();
    let index_cfg = IndexConfig {
        reference_year: 2008,
        g_variant: GVariant::default(),
        ar_variant: ArVariant::default(),
    };
    let mut covered = [0usize; 6];
    let reps = 100;
    for rep in 0..reps as u64 {
        let ds = generate_synthetic(&SynthConfig {
            n: 500,
            model: model.clone(),
            reference_year: 2008,
            seed: 7000 + rep,
        })
        .unwrap();
        let vectors: Vec<ManifestVector> = ds
            .authors
            .iter()
            .map(|a| manifest_vector(&index_bundle(a, &index_cfg)))
            .collect();
        let s = sample_covariance(&vectors).unwrap();
        let f = fit(&s, &cfg).unwrap();
        assert!(f.converged, "replication {rep} did not converge");
        assert!(f.cfi > 0.95, "replication {rep}: CFI = {}", f.cfi);
        assert_eq!(f.chi_square, 499.0 * f.f_min);
        for j in 0..6 {
            if (f.params.loadings[j] - model.loadings[j]).abs() <= 3.0 * f.standard_errors[j] {
                covered[j] += 1;
            }
        }
    }
    for (j, c) in covered.iter().enumerate() {
        assert!(
            *c * 100 >= 95 * reps,
            "loading {j}: covered in only {c}/{reps} replications"
        );
    }
    pass(7, "fitted loadings within 3 SE of truth in >= 95% of 100 replications");
}

#[test]
fn criterion_08_anderson_rubin_property() {
    let model = recovery_model();
    let cfg = CfaConfig::default();
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(800 + seed);
        let vectors = sample_manifest_vectors(&model, 300, &mut rng);
        let s = sample_covariance(&vectors).unwrap();
        let f = fit(&s, &cfg).unwrap();
        assert!(f.converged);
        let scores = anderson_rubin_scores(&f, &vectors).unwrap();
        let n = scores.len() as f64;
        let mean = scores.iter().sum::<f64>() / n;
        let var = scores.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 1e-6, "seed {seed}: mean {mean:e}");
        assert!((var - 1.0).abs() < 1e-6, "seed {seed}: variance {var}");
    }
    pass(8, "factor scores have mean 0 and variance 1 on every converged fit");
}

#[test]
fn criterion_09_ranking_invariance() {
    let w = published_weights();
    let base: Vec<(String, f64)> = TABLE5
        .iter()
        .map(|(_, author, row, _)| (author.to_string(), pm_score(&row_to_manifest(row), &w)))
        .collect();
    let reference = rank_population(&base);
    for c in [0.5, 3.7, 1000.0] {
        let scaled_weights = PmWeights { weights: w.weights * c };
        let scaled: Vec<(String, f64)> = TABLE5
            .iter()
            .map(|(_, author, row, _)| {
                (author.to_string(), pm_score(&row_to_manifest(row), &scaled_weights))
            })
            .collect();
        let ranking = rank_population(&scaled);
        for (a, b) in reference.entries.iter().zip(&ranking.entries) {
            assert_eq!((&a.author_id, a.rank), (&b.author_id, b.rank), "c = {c}");
        }
    }
    let ties = vec![("a".to_string(), 5.0), ("b".to_string(), 5.0), ("c".to_string(), 3.0)];
    let r = rank_population(&ties);
    assert_eq!(r.entries.iter().map(|e| e.rank).collect::<Vec<_>>(), vec![1, 1, 3]);
    pass(9, "rankings invariant under positive weight scaling; ties share minimal rank");
}

#[test]
fn criterion_10_regression_coefficient() {
    // exact 0.4 sqrt(C) points
    let points: Vec<(u64, usize)> = [25u64, 100, 400, 2500, 10000]
        .iter()
        .map(|&c| (c, (0.4 * (c as f64).sqrt()).round() as usize))
        .collect();
    let f = power_law_fit(&points).unwrap();
    assert!((f.constrained_sqrt_a - 0.4).abs() < 1e-10, "a = {}", f.constrained_sqrt_a);
    pass(10, "noiseless 0.4 sqrt(C) data recovers the constrained coefficient exactly");
}

#[test]
fn criterion_11_excluded_paper_fit_values() {
    // The published model-level fit values (GFI 0.69, NNFI 0.71, NFI 0.83,
    // CFI 0.83) and the loadings in the published table depend on the raw
    // 238 x 6 data matrix, which was never published; they cannot be
    // recomputed here. The estimation machinery that produced them is
    // exercised end-to-end by criteria 4-7 instead. A converged pipeline on
    // a paper-sized synthetic population demonstrates the same outputs are
    // produced.
    let ds = generate_synthetic(&SynthConfig {
        n: 238,
        model: recovery_model(),
        reference_year: 2008,
        seed: 11,
    })
    .unwrap();
    let report = bibfactor::report::run_pipeline(
        &ds,
        &bibfactor::dataset::RunConfig::default(),
        None,
    )
    .unwrap();
    let cfa = report.cfa.unwrap();
    assert!(cfa.converged);
    assert!(cfa.gfi.is_finite() && cfa.nfi.is_finite() && cfa.nnfi.is_finite());
    assert_eq!(cfa.n, 238);
    pass(11, "published fit values excluded (raw data unpublished); machinery covered by 4-7");
}

// ---- shared fixtures sanity ----

#[test]
fn fixture_profile_roundtrip_sanity() {
    // the oracle helpers and the library agree on a hand-checked profile
    let pubs = vec![
        Publication { citations: 10, pub_year: 2004, n_authors: 2 },
        Publication { citations: 8, pub_year: 2006, n_authors: 1 },
        Publication { citations: 5, pub_year: 2000, n_authors: 3 },
        Publication { citations: 4, pub_year: 2007, n_authors: 1 },
        Publication { citations: 3, pub_year: 2005, n_authors: 2 },
    ];
    let profile = AuthorProfile {
        author_id: "x".into(),
        display_name: "X".into(),
        department: "D".into(),
        status: Status::Faculty,
        hcr: false,
        publications: pubs,
    };
    let cfg = IndexConfig {
        reference_year: 2008,
        g_variant: GVariant::default(),
        ar_variant: ArVariant::default(),
    };
    let b = index_bundle(&profile, &cfg);
    assert_eq!(b.h, 4);
    assert_eq!(b.n_papers, 5);
    assert_eq!(b.n_citations, 30);
}
