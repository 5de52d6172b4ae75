//! Dataset ingestion and run configuration.
//!
//! Input schema (CSV pair, UTF-8, header row, RFC-4180 quoting):
//!   authors.csv       author_id,name,department,status,hcr
//!   publications.csv  author_id,pub_id,citations,pub_year,n_authors
//! or a single JSON file with the same content. Every malformed input row
//! is reported with its file and row number.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analytics::GroupBy;
use crate::cfa::{CfaConfig, Multiplier};
use crate::error::{Error, Result};
use crate::indices::{ArVariant, AuthorProfile, GVariant, IndexConfig, Publication, Status};

/// A validated population: unique author ids, every publication attached
/// to a known author.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationDataset {
    pub authors: Vec<AuthorProfile>,
    pub reference_year: i32,
    #[serde(default)]
    pub source: String,
}

/// On-disk dataset layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetFormat {
    /// Directory containing `authors.csv` and `publications.csv`.
    CsvPair,
    Json,
}

/// All knobs of a pipeline run. Field defaults match the conventions the
/// published tables were computed under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub reference_year: i32,
    pub g_variant: GVariant,
    pub ar_variant: ArVariant,
    pub chi_square_multiplier: Multiplier,
    pub se_divisor: Multiplier,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
    pub group_by: GroupBy,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            reference_year: 2008,
            g_variant: GVariant::default(),
            ar_variant: ArVariant::default(),
            chi_square_multiplier: Multiplier::default(),
            se_divisor: Multiplier::default(),
            tolerance: 1e-8,
            max_iterations: 500,
            seed: 0,
            group_by: GroupBy::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        Ok(())
    }

    pub fn index_config(&self) -> IndexConfig {
        IndexConfig {
            reference_year: self.reference_year,
            g_variant: self.g_variant,
            ar_variant: self.ar_variant,
        }
    }

    pub fn cfa_config(&self) -> CfaConfig {
        CfaConfig {
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
            chi_square_multiplier: self.chi_square_multiplier,
            se_divisor: self.se_divisor,
        }
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let config: RunConfig = serde_json::from_reader(BufReader::new(file))?;
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Deserialize)]
struct AuthorRow {
    author_id: String,
    name: String,
    department: String,
    status: String,
    hcr: String,
}

#[derive(Debug, Deserialize)]
struct PublicationRow {
    author_id: String,
    #[allow(dead_code)]
    pub_id: String,
    citations: i64,
    pub_year: i32,
    n_authors: i64,
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_hcr(raw: &str, file: &str, row: usize) -> Result<bool> {
    match raw.trim() {
        "0" | "false" => Ok(false),
        "1" | "true" => Ok(true),
        other => Err(Error::MalformedRow {
            file: file.to_string(),
            row,
            message: format!("hcr must be 0/1 or true/false, got '{other}'"),
        }),
    }
}

fn load_csv_pair(dir: &Path, reference_year: i32) -> Result<PopulationDataset> {
    let authors_path = dir.join("authors.csv");
    let pubs_path = dir.join("publications.csv");
    let authors_file = "authors.csv";
    let pubs_file = "publications.csv";

    let mut order: Vec<String> = Vec::new();
    let mut by_id: BTreeMap<String, AuthorProfile> = BTreeMap::new();
    let mut reader = csv::Reader::from_reader(open(&authors_path)?);
    for (i, record) in reader.deserialize::<AuthorRow>().enumerate() {
        let row = i + 2; // header is line 1
        let rec = record.map_err(|e| Error::MalformedRow {
            file: authors_file.to_string(),
            row,
            message: e.to_string(),
        })?;
        if by_id.contains_key(&rec.author_id) {
            return Err(Error::DuplicateAuthor {
                file: authors_file.to_string(),
                row,
                author_id: rec.author_id,
            });
        }
        let status: Status = rec.status.parse().map_err(|message| Error::MalformedRow {
            file: authors_file.to_string(),
            row,
            message,
        })?;
        let hcr = parse_hcr(&rec.hcr, authors_file, row)?;
        order.push(rec.author_id.clone());
        by_id.insert(
            rec.author_id.clone(),
            AuthorProfile {
                author_id: rec.author_id,
                display_name: rec.name,
                department: rec.department,
                status,
                hcr,
                publications: Vec::new(),
            },
        );
    }

    let mut reader = csv::Reader::from_reader(open(&pubs_path)?);
    for (i, record) in reader.deserialize::<PublicationRow>().enumerate() {
        let row = i + 2;
        let rec = record.map_err(|e| Error::MalformedRow {
            file: pubs_file.to_string(),
            row,
            message: e.to_string(),
        })?;
        if rec.citations < 0 {
            return Err(Error::NegativeCitations { file: pubs_file.to_string(), row });
        }
        if rec.n_authors < 1 {
            return Err(Error::InvalidAuthorCount { file: pubs_file.to_string(), row });
        }
        let profile = by_id.get_mut(&rec.author_id).ok_or_else(|| Error::UnknownAuthor {
            file: pubs_file.to_string(),
            row,
            author_id: rec.author_id.clone(),
        })?;
        profile.publications.push(Publication {
            citations: rec.citations as u64,
            pub_year: rec.pub_year,
            n_authors: rec.n_authors as u32,
        });
    }

    let authors = order.into_iter().map(|id| by_id.remove(&id).unwrap()).collect();
    Ok(PopulationDataset {
        authors,
        reference_year,
        source: dir.display().to_string(),
    })
}

/// Structural validation applied to every loaded dataset regardless of
/// format.
pub fn validate_dataset(dataset: &PopulationDataset) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for (i, author) in dataset.authors.iter().enumerate() {
        if !seen.insert(&author.author_id) {
            return Err(Error::DuplicateAuthor {
                file: "dataset".to_string(),
                row: i + 1,
                author_id: author.author_id.clone(),
            });
        }
        for (j, p) in author.publications.iter().enumerate() {
            if p.n_authors < 1 {
                return Err(Error::InvalidAuthorCount {
                    file: format!("dataset author '{}'", author.author_id),
                    row: j + 1,
                });
            }
        }
    }
    Ok(())
}

/// Load and validate a population from disk. `reference_year` applies to
/// the CSV pair only; the JSON form carries its own.
pub fn load_population(
    path: &Path,
    format: DatasetFormat,
    reference_year: i32,
) -> Result<PopulationDataset> {
    let dataset = match format {
        DatasetFormat::CsvPair => load_csv_pair(path, reference_year)?,
        DatasetFormat::Json => {
            let file = open(path)?;
            serde_json::from_reader(BufReader::new(file))?
        }
    };
    validate_dataset(&dataset)?;
    Ok(dataset)
}

/// Write the dataset as JSON (the lossless interchange form).
pub fn save_population_json(dataset: &PopulationDataset, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::to_writer_pretty(BufWriter::new(file), dataset)?;
    Ok(())
}
