//! Text formats: state files, expectation-data files and harness configs.
//!
//! All three are TOML. Complex entries are `[re, im]` pairs written with 17
//! significant digits so a write/read round trip is exact.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Deserialize;

use crate::channels::{Ensemble, SplitRule};
use crate::coherence::{ExpectationData, Norm};
use crate::error::Error;
use crate::matcore::{c, CMatrix, DensityMatrix};
use crate::opbasis::ObservableBasis;

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    /// Malformed text or a field that does not fit the schema.
    #[error("{0}")]
    Parse(String),
    /// Well-formed input describing an invalid object.
    #[error(transparent)]
    Domain(#[from] Error),
}

fn parse_err(e: impl std::fmt::Display) -> FileError {
    FileError::Parse(e.to_string())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFileRaw {
    dim: usize,
    split: Option<[usize; 2]>,
    entries: Vec<[f64; 2]>,
}

/// Parses a state file:
///
/// ```toml
/// dim = 2
/// split = [1, 2]            # optional
/// entries = [[0.5, 0.0], [0.5, 0.0], [0.5, 0.0], [0.5, 0.0]]
/// ```
pub fn parse_state(text: &str) -> Result<DensityMatrix, FileError> {
    let raw: StateFileRaw = toml::from_str(text).map_err(parse_err)?;
    if raw.dim == 0 {
        return Err(FileError::Parse("field `dim`: must be positive".into()));
    }
    if raw.entries.len() != raw.dim * raw.dim {
        return Err(FileError::Parse(format!(
            "field `entries`: expected {} [re, im] pairs for dim = {}, found {}",
            raw.dim * raw.dim,
            raw.dim,
            raw.entries.len()
        )));
    }
    let m = CMatrix::from_fn(raw.dim, raw.dim, |i, j| {
        let [re, im] = raw.entries[i * raw.dim + j];
        c(re, im)
    });
    let rho = DensityMatrix::new(m)?;
    Ok(match raw.split {
        Some([a, b]) => rho.with_split(a, b)?,
        None => rho,
    })
}

pub fn write_state(rho: &DensityMatrix) -> String {
    let d = rho.dim();
    let mut out = format!("dim = {d}\n");
    if let Some((a, b)) = rho.split() {
        let _ = writeln!(out, "split = [{a}, {b}]");
    }
    out.push_str("entries = [\n");
    for i in 0..d {
        for j in 0..d {
            let z = rho.matrix()[(i, j)];
            let _ = writeln!(out, "  [{:.16e}, {:.16e}],", z.re, z.im);
        }
    }
    out.push_str("]\n");
    out
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpectationFileRaw {
    basis: String,
    #[serde(default)]
    diagonal_projectors: bool,
    values: BTreeMap<String, f64>,
    decohered: Option<BTreeMap<String, f64>>,
}

/// Parsed expectation-data file.
#[derive(Debug)]
pub struct ExpectationFile {
    pub basis: ObservableBasis,
    pub data: ExpectationData,
}

fn ordered_values(basis: &ObservableBasis, table: &BTreeMap<String, f64>, section: &str, extra: &[String]) -> Result<Vec<f64>, FileError> {
    for key in table.keys() {
        if basis.index_of(key).is_none() && !extra.contains(key) {
            return Err(FileError::Parse(format!(
                "[{section}]: label `{key}` is not an operator of basis {}",
                basis.tag()
            )));
        }
    }
    basis
        .labels()
        .iter()
        .map(|l| {
            table
                .get(l)
                .copied()
                .ok_or_else(|| FileError::Parse(format!("[{section}]: missing value for operator `{l}`")))
        })
        .collect()
}

/// Parses an expectation-data file:
///
/// ```toml
/// basis = "pauli"
/// diagonal_projectors = true
/// [values]
/// I = 0.7071067811865476
/// X = 0.7071067811865476
/// Y = 0.0
/// Z = 0.0
/// P0 = 0.5
/// P1 = 0.5
/// ```
///
/// Instead of `diagonal_projectors`, a `[decohered]` table with the same
/// labels may give the expectations of the decohered state directly.
pub fn parse_expectations(text: &str) -> Result<ExpectationFile, FileError> {
    let raw: ExpectationFileRaw = toml::from_str(text).map_err(parse_err)?;
    let basis = ObservableBasis::from_tag(&raw.basis).map_err(parse_err)?;
    let projector_labels: Vec<String> = (0..basis.dim()).map(|k| format!("P{k}")).collect();
    let data = match (raw.diagonal_projectors, &raw.decohered) {
        (true, Some(_)) => {
            return Err(FileError::Parse(
                "give either `diagonal_projectors = true` or a [decohered] table, not both".into(),
            ))
        }
        (false, None) => {
            return Err(FileError::Parse(
                "decohered expectations missing: add `diagonal_projectors = true` with P0.. values, or a [decohered] table"
                    .into(),
            ))
        }
        (true, None) => {
            let values = ordered_values(&basis, &raw.values, "values", &projector_labels)?;
            let pops = projector_labels
                .iter()
                .map(|l| {
                    raw.values
                        .get(l)
                        .copied()
                        .ok_or_else(|| FileError::Parse(format!("[values]: missing diagonal projector `{l}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            ExpectationData::from_populations(&basis, values, &pops)?
        }
        (false, Some(dec)) => ExpectationData {
            values: ordered_values(&basis, &raw.values, "values", &[])?,
            decohered: ordered_values(&basis, dec, "decohered", &[])?,
        },
    };
    Ok(ExpectationFile { basis, data })
}

/// Renders expectation data for a state, with diagonal projectors.
pub fn write_expectations(basis: &ObservableBasis, rho: &DensityMatrix) -> Result<String, FileError> {
    let values = basis.expectations(rho.matrix())?;
    let mut out = format!("basis = \"{}\"\ndiagonal_projectors = true\n\n[values]\n", basis.tag());
    for (label, v) in basis.labels().iter().zip(values) {
        let _ = writeln!(out, "\"{label}\" = {v:.16e}");
    }
    for k in 0..rho.dim() {
        let _ = writeln!(out, "P{k} = {:.16e}", rho.matrix()[(k, k)].re);
    }
    Ok(out)
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct C2bJob {
    pub dim: usize,
    pub n_kraus: usize,
    pub trials: usize,
    #[serde(default = "default_c2b_ensemble")]
    pub ensemble: Ensemble,
}

fn default_c2b_ensemble() -> Ensemble {
    Ensemble::GinibreMixedRank
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScanJob {
    pub dim: usize,
    pub trials: usize,
    #[serde(default)]
    pub split_rule: SplitRule,
    #[serde(default)]
    pub ensemble: Ensemble,
    #[serde(default = "default_scan_norm")]
    pub norm: Norm,
}

fn default_scan_norm() -> Norm {
    Norm::Schatten1
}

/// Harness configuration:
///
/// ```toml
/// seed = 7
/// [[c2b]]
/// dim = 2
/// n_kraus = 2
/// trials = 10000
/// [[scan]]
/// dim = 3
/// trials = 100000
/// split_rule = "random-basis"
/// ```
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct HarnessConfig {
    pub seed: Option<u64>,
    #[serde(default)]
    pub c2b: Vec<C2bJob>,
    #[serde(default)]
    pub scan: Vec<ScanJob>,
}

pub fn parse_harness(text: &str) -> Result<HarnessConfig, FileError> {
    let cfg: HarnessConfig = toml::from_str(text).map_err(parse_err)?;
    if cfg.c2b.is_empty() && cfg.scan.is_empty() {
        return Err(FileError::Parse("config has no [[c2b]] or [[scan]] jobs".into()));
    }
    for job in &cfg.c2b {
        if job.dim < 2 || job.n_kraus == 0 {
            return Err(FileError::Parse(format!("[[c2b]] dim = {}, n_kraus = {}: need dim >= 2 and n_kraus >= 1", job.dim, job.n_kraus)));
        }
    }
    for job in &cfg.scan {
        if job.dim < 2 {
            return Err(FileError::Parse(format!("[[scan]] dim = {}: need dim >= 2", job.dim)));
        }
    }
    Ok(cfg)
}
