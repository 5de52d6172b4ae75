//! Population descriptives, HCR/non-HCR splits, and the h-versus-citations
//! power-law regression.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indices::AuthorProfile;

/// How to partition a population for group reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupBy {
    #[default]
    Department,
    Population,
}

fn group_label(profile: &AuthorProfile, group_by: GroupBy) -> String {
    match group_by {
        GroupBy::Department => profile.department.clone(),
        GroupBy::Population => "population".to_string(),
    }
}

/// Five-number descriptive summary of one metric within one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub group: String,
    pub n: usize,
    pub mean: f64,
    /// Median of an even-sized sample is the mean of the two middle order
    /// statistics.
    pub median: f64,
    /// Sample standard deviation (divisor n - 1); 0 for singleton groups.
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

/// Summarize one group's values; `None` for an empty group (callers skip
/// those with a warning).
pub fn summarize(group: &str, values: &[f64]) -> Option<GroupSummary> {
    if values.is_empty() {
        return None;
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    let std = if n > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    Some(GroupSummary {
        group: group.to_string(),
        n,
        mean,
        median,
        std,
        min: sorted[0],
        max: sorted[n - 1],
    })
}

/// Descriptives of one metric per group, groups sorted by label.
pub fn group_descriptives(
    profiles: &[AuthorProfile],
    group_by: GroupBy,
    metric: impl Fn(&AuthorProfile) -> f64,
) -> Vec<GroupSummary> {
    let mut groups: std::collections::BTreeMap<String, Vec<f64>> = Default::default();
    for p in profiles {
        groups.entry(group_label(p, group_by)).or_default().push(metric(p));
    }
    groups
        .iter()
        .filter_map(|(label, values)| summarize(label, values))
        .collect()
}

/// HCR / non-HCR breakdown of publication and citation output per group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HcrSplit {
    pub group: String,
    pub n_total: usize,
    pub n_hcr: usize,
    pub n_nonhcr: usize,
    pub papers_total: u64,
    pub papers_hcr: u64,
    pub papers_nonhcr: u64,
    pub citations_total: u64,
    pub citations_hcr: u64,
    pub citations_nonhcr: u64,
    pub avg_papers_hcr: f64,
    pub avg_papers_nonhcr: f64,
    pub avg_citations_hcr: f64,
    pub avg_citations_nonhcr: f64,
    pub pct_papers_hcr: f64,
    pub pct_papers_nonhcr: f64,
    pub pct_citations_hcr: f64,
    pub pct_citations_nonhcr: f64,
}

fn share(part: u64, total: u64) -> (f64, f64) {
    if total == 0 {
        (0.0, 100.0)
    } else {
        let pct = 100.0 * part as f64 / total as f64;
        (pct, 100.0 - pct)
    }
}

fn split_one(group: &str, profiles: &[&AuthorProfile]) -> HcrSplit {
    let rows: Vec<(bool, u64, u64)> = profiles
        .iter()
        .map(|p| {
            (
                p.hcr,
                p.publications.len() as u64,
                p.publications.iter().map(|q| q.citations).sum(),
            )
        })
        .collect();
    hcr_split_from_counts(group, &rows)
}

/// Same split computed from per-author `(hcr, papers, citations)` totals,
/// for callers that no longer hold the raw publication lists.
pub fn hcr_split_from_counts(group: &str, rows: &[(bool, u64, u64)]) -> HcrSplit {
    let mut s = HcrSplit {
        group: group.to_string(),
        n_total: rows.len(),
        n_hcr: 0,
        n_nonhcr: 0,
        papers_total: 0,
        papers_hcr: 0,
        papers_nonhcr: 0,
        citations_total: 0,
        citations_hcr: 0,
        citations_nonhcr: 0,
        avg_papers_hcr: 0.0,
        avg_papers_nonhcr: 0.0,
        avg_citations_hcr: 0.0,
        avg_citations_nonhcr: 0.0,
        pct_papers_hcr: 0.0,
        pct_papers_nonhcr: 0.0,
        pct_citations_hcr: 0.0,
        pct_citations_nonhcr: 0.0,
    };
    for &(hcr, papers, citations) in rows {
        s.papers_total += papers;
        s.citations_total += citations;
        if hcr {
            s.n_hcr += 1;
            s.papers_hcr += papers;
            s.citations_hcr += citations;
        } else {
            s.n_nonhcr += 1;
            s.papers_nonhcr += papers;
            s.citations_nonhcr += citations;
        }
    }
    if s.n_hcr > 0 {
        s.avg_papers_hcr = s.papers_hcr as f64 / s.n_hcr as f64;
        s.avg_citations_hcr = s.citations_hcr as f64 / s.n_hcr as f64;
    }
    if s.n_nonhcr > 0 {
        s.avg_papers_nonhcr = s.papers_nonhcr as f64 / s.n_nonhcr as f64;
        s.avg_citations_nonhcr = s.citations_nonhcr as f64 / s.n_nonhcr as f64;
    }
    (s.pct_papers_hcr, s.pct_papers_nonhcr) = share(s.papers_hcr, s.papers_total);
    (s.pct_citations_hcr, s.pct_citations_nonhcr) = share(s.citations_hcr, s.citations_total);
    s
}

/// HCR splits per group plus a `Total` row over the whole population.
pub fn hcr_split(profiles: &[AuthorProfile], group_by: GroupBy) -> Vec<HcrSplit> {
    let mut groups: std::collections::BTreeMap<String, Vec<&AuthorProfile>> = Default::default();
    for p in profiles {
        groups.entry(group_label(p, group_by)).or_default().push(p);
    }
    let mut out: Vec<HcrSplit> = groups
        .iter()
        .map(|(label, members)| split_one(label, members))
        .collect();
    if group_by == GroupBy::Department {
        let all: Vec<&AuthorProfile> = profiles.iter().collect();
        out.push(split_one("Total", &all));
    }
    out
}

/// Fit of h against citation counts: unconstrained h = a * C^b on the
/// log-log scale, plus the constrained h = a * sqrt(C) through the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub a: f64,
    pub b: f64,
    pub r2: f64,
    pub constrained_sqrt_a: f64,
    pub n_used: usize,
    /// Researchers with zero citations or zero h, excluded from the fit.
    pub n_excluded: usize,
}

pub fn power_law_fit(points: &[(u64, usize)]) -> Result<PowerLawFit> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(c, h)| *c > 0 && *h > 0)
        .map(|(c, h)| (*c as f64, *h as f64))
        .collect();
    let n_excluded = points.len() - usable.len();
    if usable.len() < 3 {
        return Err(Error::InsufficientPoints { needed: 3, got: usable.len() });
    }
    let n = usable.len() as f64;

    // log-log least squares
    let xs: Vec<f64> = usable.iter().map(|(c, _)| c.ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|(_, h)| h.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = (my - b * mx).exp();
    let r2 = if sxx > 0.0 && syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };

    // least squares of h on sqrt(C) through the origin
    let num: f64 = usable.iter().map(|(c, h)| c.sqrt() * h).sum();
    let den: f64 = usable.iter().map(|(c, _)| c).sum();
    let constrained_sqrt_a = num / den;

    Ok(PowerLawFit { a, b, r2, constrained_sqrt_a, n_used: usable.len(), n_excluded })
}
