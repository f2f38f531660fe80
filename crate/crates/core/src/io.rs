//! File formats: observation CSVs, prediction CSVs with a JSON sidecar, and
//! a JSON model archive.
//!
//! Observation files have a header of covariate columns followed by `t`,
//! `delta`, `L`, `R` and optionally `y_true`; absent bounds are empty cells.
//! Numbers are written in shortest round-trip form.

use std::fmt::Display;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::baselines::LinearExpectileModel;
use crate::censor::{CensorType, CensoredObservation};
use crate::daernn::{AugmentStats, LevelMapping};
use crate::error::{Error, Result};
use crate::expectile::ExpectileLevel;
use crate::harness::{FittedModels, HyperParams, Method};
use crate::nn::{Activation, MlpParams, MlpSpec};

/// Shortest decimal string that parses back to the same value.
pub fn fmt_num<T: Display>(v: T) -> String {
    v.to_string()
}

const RESERVED: [&str; 5] = ["t", "delta", "L", "R", "y_true"];

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub covariates: Vec<String>,
    pub observations: Vec<CensoredObservation>,
}

impl Dataset {
    pub fn covariate_matrix(&self) -> Vec<Vec<f64>> {
        self.observations.iter().map(|o| o.x.clone()).collect()
    }

    pub fn has_y_true(&self) -> bool {
        self.observations.iter().all(|o| o.y_true.is_some())
    }
}

struct Table {
    headers: Vec<String>,
    rows: Vec<csv::StringRecord>,
}

impl Table {
    fn read<R: Read>(r: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let headers = reader.headers()?.iter().map(str::to_owned).collect();
        let rows = reader.records().collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Self { headers, rows })
    }

    fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    fn require(&self, name: &str) -> Result<usize> {
        self.column(name).ok_or_else(|| Error::Schema(format!("missing column `{name}`")))
    }
}

fn parse_cell(cell: &str, column: &str, row: usize) -> Result<f64> {
    cell.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Schema(format!("row {row}, column `{column}`: `{cell}` is not a finite number")))
}

fn parse_optional(cell: &str, column: &str, row: usize) -> Result<Option<f64>> {
    if cell.is_empty() {
        Ok(None)
    } else {
        parse_cell(cell, column, row).map(Some)
    }
}

pub fn read_observations<R: Read>(r: R) -> Result<Dataset> {
    let table = Table::read(r)?;
    let (t, delta, lo, hi) = (table.require("t")?, table.require("delta")?, table.require("L")?, table.require("R")?);
    let y_true = table.column("y_true");
    let cov: Vec<usize> = (0..table.headers.len()).filter(|&i| !RESERVED.contains(&table.headers[i].as_str())).collect();
    if cov.is_empty() {
        return Err(Error::Schema("no covariate columns".into()));
    }
    let mut observations = Vec::with_capacity(table.rows.len());
    for (i, rec) in table.rows.iter().enumerate() {
        let row = i + 1;
        let x = cov.iter().map(|&c| parse_cell(&rec[c], &table.headers[c], row)).collect::<Result<Vec<_>>>()?;
        let code = rec[delta]
            .parse::<u8>()
            .map_err(|_| Error::Schema(format!("row {row}, column `delta`: `{}` is not a code 0-3", &rec[delta])))?;
        let obs = CensoredObservation::new(
            x,
            parse_cell(&rec[t], "t", row)?,
            CensorType::from_code(code).map_err(|e| Error::Schema(format!("row {row}: {e}")))?,
            parse_optional(&rec[lo], "L", row)?,
            parse_optional(&rec[hi], "R", row)?,
            y_true.map(|c| parse_optional(&rec[c], "y_true", row)).transpose()?.flatten(),
        )
        .map_err(|e| Error::Schema(format!("row {row}: {e}")))?;
        observations.push(obs);
    }
    Ok(Dataset { covariates: cov.iter().map(|&c| table.headers[c].clone()).collect(), observations })
}

pub fn write_observations<W: Write>(data: &Dataset, w: W) -> Result<()> {
    let with_truth = data.observations.iter().any(|o| o.y_true.is_some());
    let mut csv = csv::Writer::from_writer(w);
    let mut header = data.covariates.clone();
    header.extend(["t", "delta", "L", "R"].map(String::from));
    if with_truth {
        header.push("y_true".into());
    }
    csv.write_record(&header)?;
    let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
    for o in &data.observations {
        let mut rec: Vec<String> = o.x.iter().map(|&v| fmt_num(v)).collect();
        rec.extend([fmt_num(o.t), o.delta.code().to_string(), opt(o.lower), opt(o.upper)]);
        if with_truth {
            rec.push(opt(o.y_true));
        }
        csv.write_record(&rec)?;
    }
    csv.flush()?;
    Ok(())
}

/// Covariate names and `(x, y)` rows.
pub type ResponseTable = (Vec<String>, Vec<(Vec<f64>, f64)>);

/// Reads a plain table with a response column; every other column is a
/// covariate.
pub fn read_response_table<R: Read>(r: R, response: &str) -> Result<ResponseTable> {
    let table = Table::read(r)?;
    let y = table.require(response)?;
    let cov: Vec<usize> = (0..table.headers.len()).filter(|&i| i != y).collect();
    let rows = table
        .rows
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            let x = cov.iter().map(|&c| parse_cell(&rec[c], &table.headers[c], i + 1)).collect::<Result<Vec<_>>>()?;
            Ok((x, parse_cell(&rec[y], response, i + 1)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((cov.iter().map(|&c| table.headers[c].clone()).collect(), rows))
}

/// Reads the named covariate columns, in that order, ignoring any others.
pub fn read_covariates<R: Read>(r: R, names: &[String]) -> Result<Vec<Vec<f64>>> {
    let table = Table::read(r)?;
    let cols = names.iter().map(|n| table.require(n)).collect::<Result<Vec<_>>>()?;
    table
        .rows
        .iter()
        .enumerate()
        .map(|(i, rec)| cols.iter().zip(names).map(|(&c, n)| parse_cell(&rec[c], n, i + 1)).collect())
        .collect()
}

fn level_column(tau: f64) -> String {
    format!("tau_{}", fmt_num(tau))
}

/// One row per test point, one column per requested level.
pub fn write_predictions<W: Write>(mapping: &[LevelMapping], predictions: &[Vec<f64>], w: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(mapping.iter().map(|m| level_column(m.requested)))?;
    let n = predictions.first().map_or(0, Vec::len);
    for i in 0..n {
        csv.write_record(predictions.iter().map(|p| fmt_num(p[i])))?;
    }
    csv.flush()?;
    Ok(())
}

/// Columns `iteration`, `index`, then one per requested level.
pub fn write_iteration_detail<W: Write>(
    mapping: &[LevelMapping],
    per_iteration: &[Vec<Vec<f64>>],
    w: W,
) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["iteration".to_string(), "index".to_string()].into_iter().chain(mapping.iter().map(|m| level_column(m.requested))))?;
    for (h, it) in per_iteration.iter().enumerate() {
        let n = it.first().map_or(0, Vec::len);
        for i in 0..n {
            csv.write_record(
                [(h + 1).to_string(), i.to_string()].into_iter().chain(it.iter().map(|p| fmt_num(p[i]))),
            )?;
        }
    }
    csv.flush()?;
    Ok(())
}

/// Parsed prediction file: levels and `rows[i][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionTable {
    pub levels: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
}

pub fn read_predictions<R: Read>(r: R) -> Result<PredictionTable> {
    let table = Table::read(r)?;
    let levels = table
        .headers
        .iter()
        .map(|h| {
            h.strip_prefix("tau_")
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| Error::Schema(format!("unexpected prediction column `{h}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = table
        .rows
        .iter()
        .enumerate()
        .map(|(i, rec)| rec.iter().zip(&table.headers).map(|(c, h)| parse_cell(c, h, i + 1)).collect())
        .collect::<Result<Vec<_>>>()?;
    Ok(PredictionTable { levels, rows })
}

/// Sidecar describing how a prediction file was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionMeta {
    pub method: Method,
    pub grid_size: usize,
    pub iterations: usize,
    pub hyper: HyperParams,
    pub activation: Activation,
    pub seed: u64,
    pub seed_schedule: crate::daernn::SeedSchedule,
    pub warm_start: bool,
    pub mapping: Vec<LevelMapping>,
    pub covariates: Vec<String>,
    pub n_train: usize,
    pub n_test: usize,
    pub augmentation: Vec<AugmentStats>,
}

pub fn write_json<W: Write, S: Serialize>(value: &S, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

pub fn read_json<R: Read, S: serde::de::DeserializeOwned>(r: R) -> Result<S> {
    Ok(serde_json::from_reader(r)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ArchivedModels {
    /// `banks[h][j]` are flat parameter vectors in snapshot order.
    Neural { spec: MlpSpec, banks: Vec<Vec<Vec<f64>>> },
    /// `banks[h][j]` are coefficient vectors, intercept first.
    Linear { banks: Vec<Vec<Vec<f64>>> },
}

/// Everything `predict` needs to reproduce a fit's predictions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArchive {
    pub method: Method,
    pub covariates: Vec<String>,
    pub mapping: Vec<LevelMapping>,
    pub models: ArchivedModels,
}

impl ModelArchive {
    pub fn new(method: Method, covariates: Vec<String>, mapping: Vec<LevelMapping>, fitted: &FittedModels) -> Self {
        let models = match fitted {
            FittedModels::Neural(banks) => ArchivedModels::Neural {
                spec: banks[0][0].spec().clone(),
                banks: banks.iter().map(|b| b.iter().map(MlpParams::to_flat).collect()).collect(),
            },
            FittedModels::Linear(banks) => ArchivedModels::Linear {
                banks: banks.iter().map(|b| b.iter().map(|m| m.beta.clone()).collect()).collect(),
            },
        };
        Self { method, covariates, mapping, models }
    }

    pub fn fitted(&self) -> Result<FittedModels> {
        match &self.models {
            ArchivedModels::Neural { spec, banks } => Ok(FittedModels::Neural(
                banks
                    .iter()
                    .map(|b| b.iter().map(|flat| MlpParams::from_flat(spec, flat)).collect())
                    .collect::<Result<_>>()?,
            )),
            ArchivedModels::Linear { banks } => Ok(FittedModels::Linear(
                banks
                    .iter()
                    .map(|b| {
                        b.iter()
                            .zip(&self.mapping)
                            .map(|(beta, m)| {
                                if beta.len() != self.covariates.len() + 1 {
                                    return Err(Error::Schema("linear model dimension mismatch".into()));
                                }
                                Ok(LinearExpectileModel { beta: beta.clone(), tau: ExpectileLevel::new(m.grid_level)? })
                            })
                            .collect()
                    })
                    .collect::<Result<_>>()?,
            )),
        }
    }
}
