//! CSV and JSON writers.

use std::io::Write;
use std::path::{Path, PathBuf};

use lambshift_core::dephasing::DecoherenceParams;
use lambshift_core::model::{DeviceSpec, HamiltonianVariant};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::columns::{sweep_columns, Column, Group, ETA_COLUMNS, SCHEMA_VERSION};
use crate::config::{Format, Plan};
use crate::run::{SweepResult, VERSION};
use crate::CliError;

#[derive(Serialize)]
struct Generator {
    name: &'static str,
    version: &'static str,
}

#[derive(Serialize)]
struct Units {
    frequency: &'static str,
    rate: &'static str,
}

#[derive(Serialize)]
struct SolverMeta {
    tol: f64,
    overlap_threshold: f64,
    min_step_ghz: f64,
    tie_margin: f64,
    steps: Option<usize>,
    k_max: usize,
    samples: usize,
    max_samples: usize,
    fourier_steps: usize,
    normalization_tol: f64,
}

#[derive(Serialize)]
struct EtaMeta {
    max_shift_ghz: f64,
    points: usize,
    residual_tol: f64,
}

#[derive(Serialize)]
struct ConfigMeta<'a> {
    name: &'a str,
    device: &'a DeviceSpec,
    frequencies_ghz: &'a [f64],
    amplitudes_ghz: &'a [f64],
    variants: &'a [HamiltonianVariant],
    observables: &'a [Group],
    solver: SolverMeta,
    eta: Option<EtaMeta>,
    decoherence_mhz: &'a DecoherenceParams,
}

impl<'a> ConfigMeta<'a> {
    fn of(plan: &'a Plan) -> Self {
        let (t, f) = (&plan.sweep.track, &plan.sweep.fourier);
        ConfigMeta {
            name: &plan.name,
            device: &plan.spec,
            frequencies_ghz: &plan.frequencies,
            amplitudes_ghz: &plan.amplitudes,
            variants: &plan.variants,
            observables: &plan.groups,
            solver: SolverMeta {
                tol: t.tol,
                overlap_threshold: t.overlap_threshold,
                min_step_ghz: t.min_step,
                tie_margin: t.tie_margin,
                steps: t.steps,
                k_max: f.k_max,
                samples: f.samples,
                max_samples: f.max_samples,
                fourier_steps: f.steps,
                normalization_tol: f.normalization_tol,
            },
            eta: plan.eta.map(|e| EtaMeta {
                max_shift_ghz: e.max_shift,
                points: e.points,
                residual_tol: e.residual_tol,
            }),
            decoherence_mhz: &plan.decoherence,
        }
    }
}

/// A table row serialized as an object in column order.
struct Record<'a, F: Fn(&str) -> crate::columns::Value> {
    columns: &'a [&'static Column],
    value: F,
}

impl<F: Fn(&str) -> crate::columns::Value> Serialize for Record<'_, F> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.columns.len()))?;
        for c in self.columns {
            map.serialize_entry(c.name, &(self.value)(c.name))?;
        }
        map.end()
    }
}

fn header_comment(plan: &Plan) -> String {
    format!(
        "# schema={SCHEMA_VERSION} generator=lambshift-{VERSION} config={}\n",
        plan.name
    )
}

fn table_csv<T>(
    plan: &Plan,
    columns: &[&'static Column],
    rows: &[T],
    value: impl Fn(&T, &str) -> crate::columns::Value,
) -> Result<Vec<u8>, CliError> {
    let mut buf = header_comment(plan).into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(columns.iter().map(|c| c.name))
            .map_err(CliError::csv)?;
        for r in rows {
            w.write_record(columns.iter().map(|c| value(r, c.name).csv()))
                .map_err(CliError::csv)?;
        }
        w.flush().map_err(|e| CliError::Io {
            path: PathBuf::new(),
            source: e,
        })?;
    }
    Ok(buf)
}

/// Sweep table as CSV bytes.
pub fn sweep_csv(plan: &Plan, result: &SweepResult) -> Result<Vec<u8>, CliError> {
    table_csv(plan, &sweep_columns(&plan.groups), &result.rows, |r, c| {
        r.value(c)
    })
}

/// Stark-ratio table as CSV bytes.
pub fn eta_csv(plan: &Plan, result: &SweepResult) -> Result<Vec<u8>, CliError> {
    let cols: Vec<&'static Column> = ETA_COLUMNS.iter().collect();
    table_csv(plan, &cols, &result.eta, |r, c| r.value(c))
}

/// Both tables and the run metadata as pretty-printed JSON.
pub fn json(plan: &Plan, result: &SweepResult) -> Result<Vec<u8>, CliError> {
    let sweep_cols = sweep_columns(&plan.groups);
    let eta_cols: Vec<&'static Column> = ETA_COLUMNS.iter().collect();
    let rows: Vec<_> = result
        .rows
        .iter()
        .map(|r| Record {
            columns: &sweep_cols,
            value: |c: &str| r.value(c),
        })
        .collect();
    let eta: Vec<_> = result
        .eta
        .iter()
        .map(|r| Record {
            columns: &eta_cols,
            value: |c: &str| r.value(c),
        })
        .collect();

    #[derive(Serialize)]
    struct Doc<'a, R: Serialize, E: Serialize> {
        schema_version: &'static str,
        generator: Generator,
        units: Units,
        config: ConfigMeta<'a>,
        columns: Vec<&'static Column>,
        eta_columns: Vec<&'static Column>,
        rows: R,
        eta: E,
    }
    let doc = Doc {
        schema_version: SCHEMA_VERSION,
        generator: Generator {
            name: "lambshift",
            version: VERSION,
        },
        units: Units {
            frequency: "GHz",
            rate: "MHz",
        },
        config: ConfigMeta::of(plan),
        columns: sweep_cols.clone(),
        eta_columns: eta_cols.clone(),
        rows,
        eta,
    };
    let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Output(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

/// Write every requested format into `dir` and return the paths.
pub fn write_all(plan: &Plan, result: &SweepResult, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();
    let mut put = |name: String, bytes: Vec<u8>| -> Result<(), CliError> {
        let path = dir.join(name);
        std::fs::File::create(&path)
            .and_then(|mut f| f.write_all(&bytes))
            .map_err(|e| CliError::io(&path, e))?;
        written.push(path);
        Ok(())
    };
    let stem = &plan.output.stem;
    for format in &plan.output.formats {
        match format {
            Format::Csv => {
                put(format!("{stem}.csv"), sweep_csv(plan, result)?)?;
                if plan.eta.is_some() {
                    put(format!("{stem}_eta.csv"), eta_csv(plan, result)?)?;
                }
            }
            Format::Json => put(format!("{stem}.json"), json(plan, result)?)?,
        }
    }
    Ok(written)
}
