//! Pipeline orchestration and report emission.
//!
//! A `Report` is the interchange value the CLI stages pass around as JSON:
//! `indices` fills the per-author section, `fit` the CFA section, `score`
//! the weights and rankings, and `report` the group analytics before
//! rendering. `run_pipeline` runs all stages in one call.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analytics::{self, GroupBy, GroupSummary, HcrSplit, PowerLawFit};
use crate::cfa::{
    anderson_rubin_scores, fit, manifest_vector, sample_covariance, CfaFit, ManifestVector,
    Vector6,
};
use crate::dataset::{PopulationDataset, RunConfig};
use crate::error::{Error, Result};
use crate::indices::{index_bundle, IndexBundle, Status};
use crate::scoring::{self, pm_score, PmRanking, PmWeights};

/// Externally supplied loadings and standard errors, used to score a
/// population without fitting (e.g. reproducing published tables).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectedWeights {
    pub loadings: [f64; 6],
    pub standard_errors: [f64; 6],
}

impl InjectedWeights {
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(serde_json::from_reader(BufReader::new(file))?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightSource {
    Fitted,
    Injected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightInfo {
    pub loadings: Vector6,
    pub standard_errors: Vector6,
    pub weights: PmWeights,
    pub source: WeightSource,
}

/// Per-author computed values; authors are kept sorted by `author_id` so
/// reports are byte-stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthorReport {
    pub author_id: String,
    pub display_name: String,
    pub department: String,
    pub status: Status,
    pub hcr: bool,
    pub bundle: IndexBundle,
    pub manifest: ManifestVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummaries {
    pub metric: String,
    pub groups: Vec<GroupSummary>,
}

/// The full pipeline output. Optional sections are absent until the
/// corresponding stage has run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: RunConfig,
    pub n_authors: usize,
    pub authors: Vec<AuthorReport>,
    pub cfa: Option<CfaFit>,
    /// Anderson-Rubin factor scores aligned with `authors`.
    pub factor_scores: Option<Vec<f64>>,
    pub weights: Option<WeightInfo>,
    pub ranking: Option<PmRanking>,
    /// Min-rank position of each author on each of the six manifest
    /// variables, aligned with `authors`, canonical column order.
    pub per_index_ranks: Option<Vec<[usize; 6]>>,
    pub descriptives: Vec<MetricSummaries>,
    pub hcr_splits: Vec<HcrSplit>,
    pub power_law: Option<PowerLawFit>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn load(path: &Path) -> Result<Report> {
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(serde_json::from_reader(BufReader::new(file))?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut w = BufWriter::new(file);
        serde_json::to_writer_pretty(&mut w, self)?;
        w.flush().map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Stage 1: per-author index bundles and manifest vectors.
pub fn stage_indices(dataset: &PopulationDataset, config: &RunConfig) -> Report {
    let index_cfg = config.index_config();
    let mut authors: Vec<AuthorReport> = dataset
        .authors
        .iter()
        .map(|a| {
            let bundle = index_bundle(a, &index_cfg);
            AuthorReport {
                author_id: a.author_id.clone(),
                display_name: a.display_name.clone(),
                department: a.department.clone(),
                status: a.status,
                hcr: a.hcr,
                bundle,
                manifest: manifest_vector(&bundle),
            }
        })
        .collect();
    authors.sort_by(|a, b| a.author_id.cmp(&b.author_id));
    Report {
        config: config.clone(),
        n_authors: authors.len(),
        authors,
        cfa: None,
        factor_scores: None,
        weights: None,
        ranking: None,
        per_index_ranks: None,
        descriptives: Vec::new(),
        hcr_splits: Vec::new(),
        power_law: None,
        warnings: Vec::new(),
    }
}

/// Stage 2: fit the one-factor model to the population's manifest vectors
/// and attach Anderson-Rubin factor scores.
pub fn stage_fit(report: &mut Report) -> Result<()> {
    if report.n_authors < 7 {
        return Err(Error::InsufficientSample { needed: 7, got: report.n_authors });
    }
    let vectors: Vec<ManifestVector> = report.authors.iter().map(|a| a.manifest).collect();
    let s = sample_covariance(&vectors)?;
    let cfa_fit = fit(&s, &report.config.cfa_config())?;
    if cfa_fit.converged {
        report.factor_scores = Some(anderson_rubin_scores(&cfa_fit, &vectors)?);
    } else {
        report.warnings.push(format!(
            "CFA did not converge within {} iterations",
            cfa_fit.iterations
        ));
    }
    report.cfa = Some(cfa_fit);
    Ok(())
}

/// Stage 3: P-M weights (fitted or injected), scores, population ranking,
/// and per-index ranks.
pub fn stage_score(report: &mut Report, injected: Option<&InjectedWeights>) -> Result<()> {
    let info = match injected {
        Some(w) => {
            let loadings = Vector6::from_column_slice(&w.loadings);
            let standard_errors = Vector6::from_column_slice(&w.standard_errors);
            WeightInfo {
                weights: scoring::pm_weights_from_parts(&loadings, &standard_errors)?,
                loadings,
                standard_errors,
                source: WeightSource::Injected,
            }
        }
        None => {
            let cfa_fit = report.cfa.as_ref().ok_or_else(|| {
                Error::Config("score stage needs a fitted model or a weights file".into())
            })?;
            if !cfa_fit.converged {
                return Err(Error::Config(
                    "cannot score from a non-converged fit; supply a weights file".into(),
                ));
            }
            WeightInfo {
                weights: scoring::pm_weights(cfa_fit)?,
                loadings: cfa_fit.params.loadings,
                standard_errors: cfa_fit.standard_errors,
                source: WeightSource::Fitted,
            }
        }
    };
    let scores: Vec<(String, f64)> = report
        .authors
        .iter()
        .map(|a| (a.author_id.clone(), pm_score(&a.manifest, &info.weights)))
        .collect();
    report.ranking = Some(scoring::rank_population(&scores));
    let rows: Vec<(String, ManifestVector)> = report
        .authors
        .iter()
        .map(|a| (a.author_id.clone(), a.manifest))
        .collect();
    report.per_index_ranks = Some(scoring::per_index_ranks(&rows));
    report.weights = Some(info);
    Ok(())
}

/// Stage 4: group descriptives, HCR splits, and the h-vs-citations
/// regression.
pub fn stage_analytics(report: &mut Report) {
    let group_by = report.config.group_by;
    let group_of = |a: &AuthorReport| match group_by {
        GroupBy::Department => a.department.clone(),
        GroupBy::Population => "population".to_string(),
    };

    let pm_by_author: BTreeMap<&str, f64> = report
        .ranking
        .as_ref()
        .map(|r| {
            r.entries
                .iter()
                .map(|e| (e.author_id.as_str(), e.pm_score))
                .collect()
        })
        .unwrap_or_default();

    let metrics: Vec<(&str, Box<dyn Fn(&AuthorReport) -> Option<f64>>)> = vec![
        ("h", Box::new(|a: &AuthorReport| Some(a.bundle.h as f64))),
        ("g", Box::new(|a: &AuthorReport| Some(a.bundle.g as f64))),
        ("h_i", Box::new(|a: &AuthorReport| Some(a.bundle.h_i))),
        ("ar", Box::new(|a: &AuthorReport| Some(a.bundle.ar_sum))),
        ("sqrt_ar", Box::new(|a: &AuthorReport| Some(a.bundle.sqrt_ar))),
        ("papers", Box::new(|a: &AuthorReport| Some(a.bundle.n_papers as f64))),
        ("citations", Box::new(|a: &AuthorReport| Some(a.bundle.n_citations as f64))),
    ];

    let mut descriptives = Vec::new();
    for (name, metric) in &metrics {
        descriptives.push(MetricSummaries {
            metric: name.to_string(),
            groups: summaries_for(report, group_by, &group_of, metric),
        });
    }
    if !pm_by_author.is_empty() {
        let metric: Box<dyn Fn(&AuthorReport) -> Option<f64>> =
            Box::new(move |a: &AuthorReport| pm_by_author.get(a.author_id.as_str()).copied());
        descriptives.push(MetricSummaries {
            metric: "pm".to_string(),
            groups: summaries_for(report, group_by, &group_of, &metric),
        });
    }
    report.descriptives = descriptives;

    // HCR splits from the per-author totals
    let mut groups: BTreeMap<String, Vec<(bool, u64, u64)>> = BTreeMap::new();
    for a in &report.authors {
        groups.entry(group_of(a)).or_default().push((
            a.hcr,
            a.bundle.n_papers as u64,
            a.bundle.n_citations,
        ));
    }
    let mut splits: Vec<HcrSplit> = groups
        .iter()
        .map(|(label, rows)| analytics::hcr_split_from_counts(label, rows))
        .collect();
    if group_by == GroupBy::Department && !report.authors.is_empty() {
        let all: Vec<(bool, u64, u64)> = report
            .authors
            .iter()
            .map(|a| (a.hcr, a.bundle.n_papers as u64, a.bundle.n_citations))
            .collect();
        splits.push(analytics::hcr_split_from_counts("Total", &all));
    }
    report.hcr_splits = splits;

    let points: Vec<(u64, usize)> = report
        .authors
        .iter()
        .map(|a| (a.bundle.n_citations, a.bundle.h))
        .collect();
    match analytics::power_law_fit(&points) {
        Ok(fit) => report.power_law = Some(fit),
        Err(e) => report.warnings.push(format!("power-law fit skipped: {e}")),
    }
}

fn summaries_for(
    report: &Report,
    group_by: GroupBy,
    group_of: &impl Fn(&AuthorReport) -> String,
    metric: &dyn Fn(&AuthorReport) -> Option<f64>,
) -> Vec<GroupSummary> {
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut all = Vec::new();
    for a in &report.authors {
        if let Some(v) = metric(a) {
            groups.entry(group_of(a)).or_default().push(v);
            all.push(v);
        }
    }
    let mut out: Vec<GroupSummary> = groups
        .iter()
        .filter_map(|(label, values)| analytics::summarize(label, values))
        .collect();
    if group_by == GroupBy::Department {
        if let Some(total) = analytics::summarize("Total", &all) {
            out.push(total);
        }
    }
    out
}

/// All stages in order. Requires at least 7 researchers unless weights are
/// injected (in which case the CFA fit is skipped entirely, mirroring the
/// published-tables reproduction path).
pub fn run_pipeline(
    dataset: &PopulationDataset,
    config: &RunConfig,
    injected: Option<&InjectedWeights>,
) -> Result<Report> {
    config.validate()?;
    let mut report = stage_indices(dataset, config);
    if injected.is_none() {
        stage_fit(&mut report)?;
    }
    stage_score(&mut report, injected)?;
    stage_analytics(&mut report);
    Ok(report)
}

/// Output rendering for [`emit_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    Json,
    CsvTables,
    Markdown,
}

/// Write the report. `Json` and `Markdown` write a single file at `out`;
/// `CsvTables` treats `out` as a directory and writes one CSV per table.
/// Table output uses fixed 2-decimal formatting; JSON keeps full precision.
pub fn emit_report(report: &Report, format: ReportFormat, out: &Path) -> Result<()> {
    match format {
        ReportFormat::Json => report.save(out),
        ReportFormat::Markdown => {
            let mut buf = String::new();
            render_markdown(report, &mut buf);
            write_text(out, &buf)
        }
        ReportFormat::CsvTables => emit_csv_tables(report, out),
    }
}

fn write_text(path: &Path, content: &str) -> Result<()> {
    let mut file = File::create(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    file.write_all(content.as_bytes()).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn f2(x: f64) -> String {
    format!("{x:.2}")
}

/// Rows of the ranking table in published column order:
/// h, 2g/3, sqrt(AR), h_i, sqrt(papers), sqrt(citations/2), P-M,
/// each value with its parenthesized rank.
struct RankedRow<'a> {
    author: &'a AuthorReport,
    values: [f64; 6],
    ranks: [usize; 6],
    pm: f64,
    pm_rank: usize,
}

/// Canonical manifest order -> Table layout order.
const TABLE_ORDER: [usize; 6] = [0, 1, 3, 2, 4, 5];
const TABLE_HEADERS: [&str; 6] =
    ["h-index", "2g/3-index", "sqrt(AR)-index", "h_i-index", "sqrt(papers)", "sqrt(citations/2)"];

fn ranked_rows(report: &Report) -> Vec<RankedRow<'_>> {
    let (Some(ranking), Some(per_index)) = (&report.ranking, &report.per_index_ranks) else {
        return Vec::new();
    };
    let author_pos: BTreeMap<&str, usize> = report
        .authors
        .iter()
        .enumerate()
        .map(|(i, a)| (a.author_id.as_str(), i))
        .collect();
    ranking
        .entries
        .iter()
        .filter_map(|e| {
            let &i = author_pos.get(e.author_id.as_str())?;
            let a = &report.authors[i];
            let v = a.manifest.as_array();
            let r = per_index[i];
            Some(RankedRow {
                author: a,
                values: TABLE_ORDER.map(|j| v[j]),
                ranks: TABLE_ORDER.map(|j| r[j]),
                pm: e.pm_score,
                pm_rank: e.rank,
            })
        })
        .collect()
}

fn render_markdown(report: &Report, out: &mut String) {
    use std::fmt::Write as _;
    let _ = writeln!(out, "# Population report\n");
    let _ = writeln!(out, "Researchers: {}\n", report.n_authors);

    let _ = writeln!(out, "## Ranking (P-M measure)\n");
    let _ = write!(out, "| University | Author |");
    for h in TABLE_HEADERS {
        let _ = write!(out, " {h} |");
    }
    let _ = writeln!(out, " P-M measure |");
    let _ = writeln!(out, "|{}", "---|".repeat(9));
    for row in ranked_rows(report) {
        let _ = write!(out, "| {} | {} |", row.author.department, row.author.display_name);
        for j in 0..6 {
            let _ = write!(out, " {} ({}) |", f2(row.values[j]), row.ranks[j]);
        }
        let _ = writeln!(out, " {} ({}) |", f2(row.pm), row.pm_rank);
    }

    if let Some(cfa) = &report.cfa {
        let _ = writeln!(out, "\n## CFA fit\n");
        let _ = writeln!(out, "| Manifest variable | Loading | SE | Std. loading | R^2 |");
        let _ = writeln!(out, "|{}", "---|".repeat(5));
        for j in 0..6 {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} |",
                crate::cfa::MANIFEST_LABELS[j],
                f2(cfa.params.loadings[j]),
                f2(cfa.standard_errors[j]),
                f2(cfa.standardized_loadings[j]),
                f2(cfa.r_squared[j]),
            );
        }
        let _ = writeln!(
            out,
            "\nchi-square {} (df {}), GFI {}, NFI {}, NNFI {}, CFI {}, converged: {}\n",
            f2(cfa.chi_square),
            cfa.df,
            f2(cfa.gfi),
            f2(cfa.nfi),
            f2(cfa.nnfi),
            f2(cfa.cfi),
            cfa.converged,
        );
    }

    for section in &report.descriptives {
        let _ = writeln!(out, "\n## Descriptives: {}\n", section.metric);
        let _ = writeln!(out, "| Group | N | Mean | Median | Std | Min | Max |");
        let _ = writeln!(out, "|{}", "---|".repeat(7));
        for g in &section.groups {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} | {} |",
                g.group,
                g.n,
                f2(g.mean),
                f2(g.median),
                f2(g.std),
                f2(g.min),
                f2(g.max)
            );
        }
    }

    if !report.hcr_splits.is_empty() {
        let _ = writeln!(out, "\n## HCR splits\n");
        let _ = writeln!(
            out,
            "| Group | N | HCRs | Papers (HCR) | Papers % (HCR) | Citations (HCR) | Citations % (HCR) |"
        );
        let _ = writeln!(out, "|{}", "---|".repeat(7));
        for s in &report.hcr_splits {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} | {} |",
                s.group,
                s.n_total,
                s.n_hcr,
                s.papers_hcr,
                f2(s.pct_papers_hcr),
                s.citations_hcr,
                f2(s.pct_citations_hcr)
            );
        }
    }

    if let Some(p) = &report.power_law {
        let _ = writeln!(out, "\n## h vs citations\n");
        let _ = writeln!(
            out,
            "h = {} * C^{} (R^2 {}), constrained h = {} * sqrt(C), {} points used, {} excluded\n",
            f2(p.a),
            f2(p.b),
            f2(p.r2),
            f2(p.constrained_sqrt_a),
            p.n_used,
            p.n_excluded
        );
    }

    for w in &report.warnings {
        let _ = writeln!(out, "\n> warning: {w}");
    }
}

fn emit_csv_tables(report: &Report, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;

    let mut w = csv::Writer::from_path(dir.join("ranking.csv"))?;
    let mut header = vec!["university".to_string(), "author".to_string()];
    for h in TABLE_HEADERS {
        header.push(h.to_string());
        header.push(format!("{h} rank"));
    }
    header.push("pm".to_string());
    header.push("pm rank".to_string());
    w.write_record(&header)?;
    for row in ranked_rows(report) {
        let mut rec = vec![row.author.department.clone(), row.author.display_name.clone()];
        for j in 0..6 {
            rec.push(f2(row.values[j]));
            rec.push(row.ranks[j].to_string());
        }
        rec.push(f2(row.pm));
        rec.push(row.pm_rank.to_string());
        w.write_record(&rec)?;
    }
    w.flush().map_err(csv::Error::from)?;

    let mut w = csv::Writer::from_path(dir.join("descriptives.csv"))?;
    w.write_record(["metric", "group", "n", "mean", "median", "std", "min", "max"])?;
    for section in &report.descriptives {
        for g in &section.groups {
            w.write_record([
                section.metric.as_str(),
                g.group.as_str(),
                &g.n.to_string(),
                &f2(g.mean),
                &f2(g.median),
                &f2(g.std),
                &f2(g.min),
                &f2(g.max),
            ])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;

    let mut w = csv::Writer::from_path(dir.join("hcr_splits.csv"))?;
    w.write_record([
        "group",
        "n_total",
        "n_hcr",
        "n_nonhcr",
        "papers_total",
        "papers_hcr",
        "papers_nonhcr",
        "pct_papers_hcr",
        "pct_papers_nonhcr",
        "citations_total",
        "citations_hcr",
        "citations_nonhcr",
        "pct_citations_hcr",
        "pct_citations_nonhcr",
    ])?;
    for s in &report.hcr_splits {
        w.write_record([
            s.group.as_str(),
            &s.n_total.to_string(),
            &s.n_hcr.to_string(),
            &s.n_nonhcr.to_string(),
            &s.papers_total.to_string(),
            &s.papers_hcr.to_string(),
            &s.papers_nonhcr.to_string(),
            &f2(s.pct_papers_hcr),
            &f2(s.pct_papers_nonhcr),
            &s.citations_total.to_string(),
            &s.citations_hcr.to_string(),
            &s.citations_nonhcr.to_string(),
            &f2(s.pct_citations_hcr),
            &f2(s.pct_citations_nonhcr),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;

    let mut w = csv::Writer::from_path(dir.join("cfa.csv"))?;
    w.write_record(["variable", "loading", "se", "std_loading", "r_squared"])?;
    if let Some(cfa) = &report.cfa {
        for j in 0..6 {
            w.write_record([
                crate::cfa::MANIFEST_LABELS[j],
                &f2(cfa.params.loadings[j]),
                &f2(cfa.standard_errors[j]),
                &f2(cfa.standardized_loadings[j]),
                &f2(cfa.r_squared[j]),
            ])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;

    Ok(())
}
