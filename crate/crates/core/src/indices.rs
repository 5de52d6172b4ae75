//! Single-number bibliometric indices computed from a researcher's
//! publication list: h, g (capped and uncapped), R, AR (all-papers and
//! h-core variants), and the co-authorship-corrected h_I.
//!
//! All functions are pure; the h-core is always the top-h papers after a
//! stable sort by citations descending, so ties keep their input order.

use serde::{Deserialize, Serialize};

/// One paper: citation count, publication year, and number of authors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Publication {
    pub citations: u64,
    pub pub_year: i32,
    pub n_authors: u32,
}

/// Faculty status labels used by the department breakdowns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Faculty,
    Joint,
    Courtesy,
    Adjunct,
    Emeritus,
    Consulting,
    Retired,
}

impl std::str::FromStr for Status {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "faculty" => Ok(Status::Faculty),
            "joint" => Ok(Status::Joint),
            "courtesy" => Ok(Status::Courtesy),
            "adjunct" => Ok(Status::Adjunct),
            "emeritus" => Ok(Status::Emeritus),
            "consulting" => Ok(Status::Consulting),
            "retired" => Ok(Status::Retired),
            other => Err(format!("unknown status '{other}'")),
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Status::Faculty => "faculty",
            Status::Joint => "joint",
            Status::Courtesy => "courtesy",
            Status::Adjunct => "adjunct",
            Status::Emeritus => "emeritus",
            Status::Consulting => "consulting",
            Status::Retired => "retired",
        };
        f.write_str(s)
    }
}

/// A researcher with identity/group metadata and their publication list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthorProfile {
    pub author_id: String,
    pub display_name: String,
    pub department: String,
    pub status: Status,
    pub hcr: bool,
    pub publications: Vec<Publication>,
}

/// g-index convention: `Capped` requires g <= N; `Uncapped` pads with
/// fictitious zero-citation papers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GVariant {
    #[default]
    Capped,
    Uncapped,
}

/// AR-index convention: `PopAllPapers` sums C_j / age_j over every paper
/// (the PoP tool's variant), `JinHCore` over the h-core only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArVariant {
    #[default]
    PopAllPapers,
    JinHCore,
}

/// Options for [`index_bundle`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IndexConfig {
    pub reference_year: i32,
    #[serde(default)]
    pub g_variant: GVariant,
    #[serde(default)]
    pub ar_variant: ArVariant,
}

/// All indices of one researcher, computed consistently from one list.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IndexBundle {
    pub h: usize,
    pub g: usize,
    pub r: f64,
    /// Pre-square-root AR quantity (the value tabulated as "AR-index").
    pub ar_sum: f64,
    pub sqrt_ar: f64,
    pub h_i: f64,
    pub n_papers: usize,
    pub n_citations: u64,
}

fn sorted_desc(citations: &[u64]) -> Vec<u64> {
    let mut v = citations.to_vec();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

/// Largest k such that the k-th largest citation count is at least k.
pub fn h_index(citations: &[u64]) -> usize {
    let sorted = sorted_desc(citations);
    sorted
        .iter()
        .enumerate()
        .take_while(|(i, &c)| c >= (i + 1) as u64)
        .count()
}

/// Largest g such that the top g papers jointly received g^2 or more
/// citations. The capped variant bounds g by the number of papers; the
/// uncapped variant lets the cumulative total carry past N.
pub fn g_index(citations: &[u64], variant: GVariant) -> usize {
    let sorted = sorted_desc(citations);
    let n = sorted.len();
    let mut cum = 0u64;
    let mut g = 0usize;
    let mut k = 0usize;
    loop {
        k += 1;
        if k <= n {
            cum += sorted[k - 1];
        } else if variant == GVariant::Capped {
            break;
        }
        // beyond N the cumulative total is fixed, so g is bounded by sqrt(cum)
        if cum >= (k as u64) * (k as u64) {
            g = k;
        } else if k > n {
            break;
        }
    }
    g
}

/// Indices of the h-core papers: the top h by citations descending,
/// ties broken by lower input position (stable sort).
pub fn h_core_indices(citations: &[u64]) -> Vec<usize> {
    let h = h_index(citations);
    let mut order: Vec<usize> = (0..citations.len()).collect();
    order.sort_by(|&a, &b| citations[b].cmp(&citations[a]));
    order.truncate(h);
    order
}

/// R-index: square root of the total citations of the h-core.
pub fn r_index(citations: &[u64]) -> f64 {
    let core = h_core_indices(citations);
    let sum: u64 = core.iter().map(|&i| citations[i]).sum();
    (sum as f64).sqrt()
}

fn age_of(p: &Publication, reference_year: i32) -> f64 {
    (reference_year - p.pub_year).max(1) as f64
}

/// Age-weighted citation sum (the pre-square-root AR quantity).
pub fn ar_sum(pubs: &[Publication], reference_year: i32, variant: ArVariant) -> f64 {
    match variant {
        ArVariant::PopAllPapers => pubs
            .iter()
            .map(|p| p.citations as f64 / age_of(p, reference_year))
            .sum(),
        ArVariant::JinHCore => {
            let citations: Vec<u64> = pubs.iter().map(|p| p.citations).collect();
            h_core_indices(&citations)
                .into_iter()
                .map(|i| pubs[i].citations as f64 / age_of(&pubs[i], reference_year))
                .sum()
        }
    }
}

/// Square root of [`ar_sum`], the manifest form used downstream.
pub fn sqrt_ar(pubs: &[Publication], reference_year: i32, variant: ArVariant) -> f64 {
    ar_sum(pubs, reference_year, variant).sqrt()
}

/// h_I: h divided by the mean author count of the h-core papers,
/// i.e. h^2 / N_T where N_T counts authors with multiplicity. 0 when h = 0.
pub fn hi_index(pubs: &[Publication]) -> f64 {
    let citations: Vec<u64> = pubs.iter().map(|p| p.citations).collect();
    let core = h_core_indices(&citations);
    let h = core.len();
    if h == 0 {
        return 0.0;
    }
    let n_total: u64 = core.iter().map(|&i| pubs[i].n_authors as u64).sum();
    (h * h) as f64 / n_total as f64
}

/// Compute every index for one researcher under the given conventions.
pub fn index_bundle(profile: &AuthorProfile, config: &IndexConfig) -> IndexBundle {
    let citations: Vec<u64> = profile.publications.iter().map(|p| p.citations).collect();
    let ar = ar_sum(&profile.publications, config.reference_year, config.ar_variant);
    IndexBundle {
        h: h_index(&citations),
        g: g_index(&citations, config.g_variant),
        r: r_index(&citations),
        ar_sum: ar,
        sqrt_ar: ar.sqrt(),
        h_i: hi_index(&profile.publications),
        n_papers: profile.publications.len(),
        n_citations: citations.iter().sum(),
    }
}
