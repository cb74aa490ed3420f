//! Sweep orchestration.
//!
//! Work is split into one job per (f_d, variant) amplitude sweep and one
//! per (f_d, variant) Stark fit. Amplitudes within a sweep are tracked in
//! order, so a sweep is the smallest independent unit.

use lambshift_core::dephasing::{did_rate, linewidth, DidRate};
use lambshift_core::floquet::BranchStatus;
use lambshift_core::model::{DriveSpec, HamiltonianVariant};
use lambshift_core::renorm::{
    amplitude_sweep, stark_ratios, AmplitudeSweep, CouplingSummary, ObservableSet, StarkRatios,
};
use rayon::prelude::*;

use crate::columns::Value;
use crate::config::Plan;
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Broken,
    Failed,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Broken => "broken",
            Status::Failed => "failed",
        }
    }
}

/// Solver settings repeated on every row.
#[derive(Clone, Copy, Debug)]
pub struct Provenance {
    pub tol: f64,
    pub n_q: usize,
    pub n_r: usize,
    pub k_max: usize,
}

impl Provenance {
    fn of(plan: &Plan) -> Self {
        Provenance {
            tol: plan.sweep.track.tol,
            n_q: plan.spec.n_q,
            n_r: plan.spec.n_r,
            k_max: plan.sweep.fourier.k_max,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Row {
    pub omega_d: f64,
    pub amplitude: f64,
    pub variant: HamiltonianVariant,
    pub status: Status,
    pub observables: ObservableSet,
    pub coupling: Option<CouplingSummary>,
    pub did: Option<DidRate>,
    pub linewidth: Option<f64>,
    pub dispersive: bool,
    pub broken: Vec<String>,
    pub min_overlap: Option<f64>,
    pub ties: usize,
    pub ambiguous_start: bool,
    pub steps: usize,
    pub refinements: usize,
    pub provenance: Provenance,
    pub note: Option<String>,
}

#[derive(Clone, Debug)]
pub struct EtaRow {
    pub omega_d: f64,
    pub variant: HamiltonianVariant,
    pub ratios: Option<StarkRatios>,
    pub provenance: Provenance,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default)]
pub struct SweepResult {
    pub rows: Vec<Row>,
    pub eta: Vec<EtaRow>,
}

impl SweepResult {
    pub fn failures(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.status == Status::Failed)
            .count()
            + self.eta.iter().filter(|e| e.ratios.is_none()).count()
    }
}

fn complete(variant: HamiltonianVariant, obs: &ObservableSet) -> bool {
    match variant {
        HamiltonianVariant::NoResonator => {
            obs.omega_ge.is_some() && obs.omega_tilde.iter().all(Option::is_some)
        }
        _ => obs.is_complete(),
    }
}

fn rows_of(plan: &Plan, sweep: &AmplitudeSweep) -> Vec<Row> {
    let provenance = Provenance::of(plan);
    let min_overlap = sweep
        .health
        .iter()
        .map(|h| h.min_overlap)
        .fold(f64::INFINITY, f64::min);
    sweep
        .points
        .iter()
        .map(|p| {
            let a = p.observables.amplitude;
            let drive = DriveSpec {
                omega_d: sweep.omega_d,
                amplitude: a,
            };
            let broken = sweep
                .health
                .iter()
                .filter(|h| matches!(h.status, BranchStatus::Broken { last_good } if last_good < a))
                .map(|h| h.label.clone())
                .collect();
            let mut notes: Vec<String> = p.error.iter().cloned().collect();
            let (did, width) = if sweep.variant.needs_resonator() && p.observables.is_complete() {
                match did_rate(&p.observables, &drive, &plan.decoherence) {
                    Ok(d) => (Some(d), linewidth(&plan.decoherence, d.rate).ok()),
                    Err(e) => {
                        notes.push(format!("dephasing: {e}"));
                        (None, None)
                    }
                }
            } else {
                (None, None)
            };
            let status = if p.error.is_some() {
                Status::Failed
            } else if complete(sweep.variant, &p.observables) {
                Status::Ok
            } else {
                Status::Broken
            };
            Row {
                omega_d: sweep.omega_d,
                amplitude: a,
                variant: sweep.variant,
                status,
                observables: p.observables.clone(),
                coupling: p.coupling.clone(),
                did,
                linewidth: width,
                dispersive: drive.is_dispersive(&plan.spec),
                broken,
                min_overlap: min_overlap.is_finite().then_some(min_overlap),
                ties: sweep.ties,
                ambiguous_start: sweep.ambiguous_start,
                steps: sweep.steps,
                refinements: sweep.refinements,
                provenance,
                note: (!notes.is_empty()).then(|| notes.join("; ")),
            }
        })
        .collect()
}

fn failed_rows(plan: &Plan, omega_d: f64, variant: HamiltonianVariant, err: String) -> Vec<Row> {
    plan.amplitudes
        .iter()
        .map(|&a| Row {
            omega_d,
            amplitude: a,
            variant,
            status: Status::Failed,
            observables: ObservableSet {
                amplitude: a,
                ..ObservableSet::default()
            },
            coupling: None,
            did: None,
            linewidth: None,
            dispersive: DriveSpec {
                omega_d,
                amplitude: a,
            }
            .is_dispersive(&plan.spec),
            broken: Vec::new(),
            min_overlap: None,
            ties: 0,
            ambiguous_start: false,
            steps: 0,
            refinements: 0,
            provenance: Provenance::of(plan),
            note: Some(err.clone()),
        })
        .collect()
}

#[derive(Clone, Copy, Debug)]
enum Job {
    Sweep(f64, HamiltonianVariant),
    Eta(f64, HamiltonianVariant),
}

enum Outcome {
    Rows(Vec<Row>),
    Eta(EtaRow),
}

fn execute(plan: &Plan, job: Job) -> Outcome {
    match job {
        Job::Sweep(f, v) => Outcome::Rows(
            match amplitude_sweep(&plan.spec, f, &plan.amplitudes, v, &plan.sweep) {
                Ok(s) => rows_of(plan, &s),
                Err(e) => failed_rows(plan, f, v, e.to_string()),
            },
        ),
        Job::Eta(f, v) => {
            let opts = plan.eta.unwrap_or_default();
            let res = stark_ratios(&plan.spec, f, v, None, &opts, &plan.sweep);
            let (ratios, note) = match res {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            Outcome::Eta(EtaRow {
                omega_d: f,
                variant: v,
                ratios,
                provenance: Provenance::of(plan),
                note,
            })
        }
    }
}

/// Run every job of `plan`. `workers = Some(1)` runs on the calling
/// thread; otherwise a pool of that many threads (all cores if `None`).
pub fn run(plan: &Plan, workers: Option<usize>) -> Result<SweepResult, CliError> {
    let mut jobs = Vec::new();
    for &f in &plan.frequencies {
        for &v in &plan.variants {
            jobs.push(Job::Sweep(f, v));
            if plan.eta.is_some() {
                jobs.push(Job::Eta(f, v));
            }
        }
    }
    let outcomes: Vec<Outcome> = match workers {
        Some(1) => jobs.iter().map(|&j| execute(plan, j)).collect(),
        n => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.unwrap_or(0))
                .build()
                .map_err(|e| CliError::config(format!("worker pool: {e}")))?;
            pool.install(|| jobs.par_iter().map(|&j| execute(plan, j)).collect())
        }
    };
    let mut result = SweepResult::default();
    for o in outcomes {
        match o {
            Outcome::Rows(r) => result.rows.extend(r),
            Outcome::Eta(e) => result.eta.push(e),
        }
    }
    result.rows.sort_by(|a, b| {
        a.omega_d
            .total_cmp(&b.omega_d)
            .then(a.amplitude.total_cmp(&b.amplitude))
            .then(a.variant.cmp(&b.variant))
    });
    result.eta.sort_by(|a, b| {
        a.omega_d
            .total_cmp(&b.omega_d)
            .then(a.variant.cmp(&b.variant))
    });
    Ok(result)
}

impl Row {
    pub fn value(&self, column: &str) -> Value {
        let o = &self.observables;
        let level = |v: &[Option<f64>], n: usize| Value::num(v.get(n).copied().flatten());
        let c = self.coupling.as_ref();
        match column {
            "omega_d_ghz" => Value::Num(self.omega_d),
            "amplitude_ghz" => Value::Num(self.amplitude),
            "variant" => Value::text(self.variant.name()),
            "status" => Value::text(self.status.name()),
            "level_g_ghz" => level(&o.omega_tilde, 0),
            "level_e_ghz" => level(&o.omega_tilde, 1),
            "level_f_ghz" => level(&o.omega_tilde, 2),
            "level_d_ghz" => level(&o.omega_tilde, 3),
            "level0_g_ghz" => level(&o.omega_tilde0, 0),
            "level0_e_ghz" => level(&o.omega_tilde0, 1),
            "level0_f_ghz" => level(&o.omega_tilde0, 2),
            "level0_d_ghz" => level(&o.omega_tilde0, 3),
            "omega_ge_ghz" => Value::num(o.omega_ge),
            "omega0_ge_ghz" => Value::num(o.omega_ge0),
            "lamb_ge_ghz" => Value::num(o.lamb.ge),
            "lamb_gf_ghz" => Value::num(o.lamb.gf),
            "lamb_gd_ghz" => Value::num(o.lamb.gd),
            "lamb_ef_ghz" => Value::num(o.lamb.ef),
            "resonator_g_ghz" => Value::num(o.resonator_g),
            "pull_ghz" => Value::num(o.pull),
            "chi_ghz" => Value::num(o.chi),
            "anharm_ghz" => Value::num(o.anharm),
            "zeta" => Value::num(o.zeta),
            "zeta_ratio" => Value::num(o.zeta_ratio),
            "chi_scaled_ghz" => Value::num(o.chi_scaled),
            "g_gg_ghz" => Value::num(c.map(|c| c.g_gg)),
            "g_ee_ghz" => Value::num(c.map(|c| c.g_ee)),
            "g_ge_ghz" => Value::num(c.map(|c| c.g_ge)),
            "coupling_residual_ghz" => Value::num(c.map(|c| c.residual)),
            "did_rate_mhz" => Value::num(self.did.map(|d| d.rate)),
            "linewidth_mhz" => Value::num(self.linewidth),
            "resonator_warning" => self
                .did
                .map_or(Value::Missing, |d| Value::Bool(d.resonator_warning)),
            "dispersive" => Value::Bool(self.dispersive),
            "broken_branches" => Value::text(self.broken.join(";")),
            "min_overlap" => Value::num(self.min_overlap),
            "ties" => Value::Int(self.ties as u64),
            "ambiguous_start" => Value::Bool(self.ambiguous_start),
            "steps" => Value::Int(self.steps as u64),
            "refinements" => Value::Int(self.refinements as u64),
            "note" => self.note.clone().map_or(Value::Missing, Value::Text),
            other => self.provenance.value(other),
        }
    }
}

impl EtaRow {
    pub fn value(&self, column: &str) -> Value {
        let r = self.ratios.as_ref();
        match column {
            "omega_d_ghz" => Value::Num(self.omega_d),
            "variant" => Value::text(self.variant.name()),
            "status" => Value::text(if r.is_some() { "ok" } else { "failed" }),
            "eta_ef" => Value::num(r.map(|r| r.eta_ef)),
            "eta_ed" => Value::num(r.and_then(|r| r.eta_ed)),
            "quadratic_residual" => Value::num(r.map(|r| r.quadratic_residual)),
            "points" => r.map_or(Value::Missing, |r| Value::Int(r.amplitudes.len() as u64)),
            "max_amplitude_ghz" => Value::num(r.and_then(|r| r.amplitudes.last().copied())),
            "max_shift_ge_ghz" => {
                Value::num(r.map(|r| r.shift_ge.iter().fold(0.0_f64, |m, s| m.max(s.abs()))))
            }
            "note" => self.note.clone().map_or(Value::Missing, Value::Text),
            other => self.provenance.value(other),
        }
    }
}

impl Provenance {
    fn value(&self, column: &str) -> Value {
        match column {
            "tol" => Value::Num(self.tol),
            "n_q" => Value::Int(self.n_q as u64),
            "n_r" => Value::Int(self.n_r as u64),
            "k_max" => Value::Int(self.k_max as u64),
            "version" => Value::text(VERSION),
            other => unreachable!("no column {other}"),
        }
    }
}
