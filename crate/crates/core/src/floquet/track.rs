//! Adiabatic continuation of Floquet branches along a drive-amplitude grid.
//!
//! A branch starts from an undriven eigenstate. At every accepted step its
//! mode is matched to the new Floquet mode with the largest overlap, and
//! its quasi-energy is unfolded to the representative nearest the
//! extrapolated previous value. When a branch's best overlap drops below
//! the threshold the step is bisected; below the minimum step the branch
//! is marked broken and is not continued.

use std::fmt;

use serde::Serialize;

use super::{
    best_overlaps, monodromy, solve_with_steps, unfold_near, zone_distance, FloquetSolution,
};
use crate::linalg::{eigh, CMatrix, CVector};
use crate::model::TimePeriodicHamiltonian;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct StateLabel {
    pub transmon: usize,
    pub photons: Option<usize>,
}

impl StateLabel {
    pub fn transmon(n: usize) -> Self {
        StateLabel {
            transmon: n,
            photons: None,
        }
    }

    pub fn joint(n: usize, m: usize) -> Self {
        StateLabel {
            transmon: n,
            photons: Some(m),
        }
    }

    /// Index of the bare basis state this label refers to.
    pub fn basis_index(&self, n_r: usize) -> usize {
        match self.photons {
            Some(m) => self.transmon * n_r + m,
            None => self.transmon,
        }
    }
}

pub(crate) fn level_name(n: usize) -> String {
    match n {
        0 => "g".into(),
        1 => "e".into(),
        2 => "f".into(),
        3 => "d".into(),
        n => format!("l{n}"),
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.photons {
            Some(m) => write!(f, "({},{})", level_name(self.transmon), m),
            None => f.write_str(&level_name(self.transmon)),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TrackOptions {
    /// Propagator tolerance used to calibrate the step count.
    pub tol: f64,
    pub overlap_threshold: f64,
    /// Smallest amplitude step the bisection may take (GHz).
    pub min_step: f64,
    /// Candidates whose overlaps differ by less than this are a tie.
    pub tie_margin: f64,
    /// Fixed Magnus step count; calibrated at the largest amplitude when
    /// absent.
    pub steps: Option<usize>,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions {
            tol: 1e-9,
            overlap_threshold: 0.9,
            min_step: 1e-4,
            tie_margin: 0.02,
            steps: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BranchStatus {
    Intact,
    Broken { last_good: f64 },
}

#[derive(Clone, Debug)]
pub struct FloquetBranch {
    pub label: StateLabel,
    /// Requested grid.
    pub amplitudes: Vec<f64>,
    /// Unfolded quasi-energies for the valid prefix of the grid.
    pub energies: Vec<f64>,
    /// Brillouin winding `α` with `energy = folded + α f_d`.
    pub windings: Vec<i64>,
    /// Mode at `t = 0` for the valid prefix of the grid.
    pub modes: Vec<CVector>,
    pub status: BranchStatus,
    /// Smallest overlap accepted between successive steps.
    pub min_overlap: f64,
}

impl FloquetBranch {
    pub fn energy_at(&self, i: usize) -> Option<f64> {
        self.energies.get(i).copied()
    }

    pub fn mode_at(&self, i: usize) -> Option<&CVector> {
        self.modes.get(i)
    }

    pub fn is_broken(&self) -> bool {
        matches!(self.status, BranchStatus::Broken { .. })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TieRecord {
    pub label: StateLabel,
    pub amplitude: f64,
    pub overlap_gap: f64,
}

#[derive(Clone, Debug)]
pub struct TrackResult {
    pub branches: Vec<FloquetBranch>,
    pub steps: usize,
    pub refinements: usize,
    pub ties: Vec<TieRecord>,
    /// A start state could not be assigned unambiguously to its label.
    pub ambiguous_start: bool,
}

impl TrackResult {
    pub fn branch(&self, label: StateLabel) -> Option<&FloquetBranch> {
        self.branches.iter().find(|b| b.label == label)
    }
}

#[derive(Clone, Debug)]
pub struct BranchStart {
    pub label: StateLabel,
    pub energy: f64,
    pub mode: CVector,
}

/// Undriven eigenpairs assigned to labels by maximal bare-state weight.
/// Returns the starts and whether any assignment was ambiguous.
pub fn undriven_starts(
    static_part: &CMatrix,
    labels: &[StateLabel],
    n_r: usize,
) -> Result<(Vec<BranchStart>, bool)> {
    let (values, vectors) = eigh(static_part);
    let n = values.len();
    let mut used = vec![false; n];
    let mut ambiguous = false;
    let mut starts = Vec::with_capacity(labels.len());
    for &label in labels {
        let b = label.basis_index(n_r);
        if b >= n {
            return Err(Error::MissingBranch(format!(
                "{label} outside the truncated space"
            )));
        }
        let mut weights: Vec<(usize, f64)> =
            (0..n).map(|j| (j, vectors[(b, j)].norm_sqr())).collect();
        weights.sort_by(|x, y| y.1.total_cmp(&x.1));
        let (j, w) = weights
            .iter()
            .copied()
            .find(|&(j, _)| !used[j])
            .expect("more labels than states");
        if j != weights[0].0 || w < 0.5 {
            ambiguous = true;
        }
        used[j] = true;
        let mut mode = vectors.column(j).into_owned();
        crate::linalg::fix_phase(&mut mode);
        starts.push(BranchStart {
            label,
            energy: values[j],
            mode,
        });
    }
    Ok((starts, ambiguous))
}

/// Track branches from the undriven eigenstates. `grid[0]` must be 0.
pub fn track<F>(
    family: F,
    grid: &[f64],
    labels: &[StateLabel],
    n_r: usize,
    opts: &TrackOptions,
) -> Result<TrackResult>
where
    F: Fn(f64) -> Result<TimePeriodicHamiltonian>,
{
    if grid.first() != Some(&0.0) {
        return Err(Error::config("amplitude grid must start at 0"));
    }
    let h0 = family(0.0)?;
    let (starts, ambiguous) = undriven_starts(h0.static_part(), labels, n_r)?;
    let mut result = track_from(family, grid, starts, opts)?;
    result.ambiguous_start |= ambiguous;
    Ok(result)
}

struct Live {
    label: StateLabel,
    mode: CVector,
    energy: f64,
    prev: Option<(f64, f64)>,
    amplitude: f64,
    alive: bool,
    min_overlap: f64,
}

impl Live {
    fn predict(&self, amplitude: f64) -> f64 {
        match self.prev {
            Some((a, e)) if self.amplitude > a => {
                self.energy
                    + (self.energy - e) / (self.amplitude - a) * (amplitude - self.amplitude)
            }
            _ => self.energy,
        }
    }
}

/// Track branches from explicit start states valid at `grid[0]`.
pub fn track_from<F>(
    family: F,
    grid: &[f64],
    starts: Vec<BranchStart>,
    opts: &TrackOptions,
) -> Result<TrackResult>
where
    F: Fn(f64) -> Result<TimePeriodicHamiltonian>,
{
    if grid.is_empty() {
        return Err(Error::config("amplitude grid is empty"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) || grid.iter().any(|a| !a.is_finite() || *a < 0.0) {
        return Err(Error::config(
            "amplitude grid must be non-negative and strictly increasing",
        ));
    }
    if !(opts.overlap_threshold > 0.0 && opts.overlap_threshold <= 1.0) {
        return Err(Error::config("overlap threshold must lie in (0, 1]"));
    }
    if opts.min_step.is_nan() || opts.min_step <= 0.0 {
        return Err(Error::config("minimum step must be positive"));
    }

    let steps = match opts.steps {
        Some(s) => s,
        None if grid.len() > 1 => monodromy(&family(*grid.last().unwrap())?, opts.tol)?.steps,
        None => 1,
    };

    let mut branches: Vec<FloquetBranch> = starts
        .iter()
        .map(|s| FloquetBranch {
            label: s.label,
            amplitudes: grid.to_vec(),
            energies: vec![s.energy],
            windings: vec![0],
            modes: vec![s.mode.clone()],
            status: BranchStatus::Intact,
            min_overlap: 1.0,
        })
        .collect();
    let mut live: Vec<Live> = starts
        .into_iter()
        .map(|s| Live {
            label: s.label,
            mode: s.mode,
            energy: s.energy,
            prev: None,
            amplitude: grid[0],
            alive: true,
            min_overlap: 1.0,
        })
        .collect();
    let omega_d = family(grid[0])?.omega_d();
    for (b, l) in branches.iter_mut().zip(&live) {
        b.windings[0] = ((l.energy - super::fold(l.energy, omega_d)) / omega_d).round() as i64;
    }

    let mut ties = Vec::new();
    let mut refinements = 0;
    let mut current = grid[0];
    for &target in &grid[1..] {
        let spacing = target - current;
        let mut step = spacing;
        while current < target {
            let next = if current + step >= target - 1e-12 * spacing {
                target
            } else {
                current + step
            };
            let h = family(next)?;
            let sol = solve_with_steps(&h, steps)?;
            let outcome = match_branches(&live, &sol, next, opts);
            if !outcome.failed.is_empty() && (next - current) / 2.0 >= opts.min_step {
                step = (next - current) / 2.0;
                refinements += 1;
                continue;
            }
            for &i in &outcome.failed {
                live[i].alive = false;
                branches[i].status = BranchStatus::Broken {
                    last_good: live[i].amplitude,
                };
            }
            for (i, choice) in outcome.choices.iter().enumerate() {
                let Some((j, overlap)) = *choice else {
                    continue;
                };
                if !live[i].alive {
                    continue;
                }
                let predicted = live[i].predict(next);
                let energy = unfold_near(sol.quasi_energies[j], predicted, sol.omega_d);
                let l = &mut live[i];
                l.prev = Some((l.amplitude, l.energy));
                l.amplitude = next;
                l.energy = energy;
                l.mode = sol.mode(j);
                l.min_overlap = l.min_overlap.min(overlap);
            }
            ties.extend(outcome.ties);
            current = next;
            step = (2.0 * step).min(spacing);
        }
        for (b, l) in branches.iter_mut().zip(&live) {
            if l.alive {
                let folded = super::fold(l.energy, omega_d);
                b.energies.push(l.energy);
                b.windings
                    .push(((l.energy - folded) / omega_d).round() as i64);
                b.modes.push(l.mode.clone());
                b.min_overlap = l.min_overlap;
            }
        }
    }
    Ok(TrackResult {
        branches,
        steps,
        refinements,
        ties,
        ambiguous_start: false,
    })
}

struct MatchOutcome {
    choices: Vec<Option<(usize, f64)>>,
    failed: Vec<usize>,
    ties: Vec<TieRecord>,
}

fn match_branches(
    live: &[Live],
    sol: &FloquetSolution,
    amplitude: f64,
    opts: &TrackOptions,
) -> MatchOutcome {
    let mut choices = vec![None; live.len()];
    let mut failed = Vec::new();
    let mut ties = Vec::new();
    for (i, l) in live.iter().enumerate() {
        if !l.alive {
            continue;
        }
        let overlaps = best_overlaps(&l.mode, &sol.modes_t0);
        let best = overlaps.iter().copied().fold(0.0, f64::max);
        if best < opts.overlap_threshold {
            failed.push(i);
            continue;
        }
        let candidates: Vec<usize> = (0..overlaps.len())
            .filter(|&j| overlaps[j] >= best - opts.tie_margin)
            .collect();
        let j = if candidates.len() > 1 {
            let predicted = l.predict(amplitude);
            let mut sorted: Vec<f64> = candidates.iter().map(|&j| overlaps[j]).collect();
            sorted.sort_by(|a, b| b.total_cmp(a));
            ties.push(TieRecord {
                label: l.label,
                amplitude,
                overlap_gap: sorted[0] - sorted[1],
            });
            *candidates
                .iter()
                .min_by(|&&a, &&b| {
                    zone_distance(sol.quasi_energies[a], predicted, sol.omega_d)
                        .total_cmp(&zone_distance(
                            sol.quasi_energies[b],
                            predicted,
                            sol.omega_d,
                        ))
                        .then(a.cmp(&b))
                })
                .unwrap()
        } else {
            candidates[0]
        };
        choices[i] = Some((j, overlaps[j]));
    }
    // two branches claiming the same mode: the weaker claim fails
    for i in 0..live.len() {
        for k in (i + 1)..live.len() {
            if let (Some((ji, oi)), Some((jk, ok))) = (choices[i], choices[k]) {
                if ji == jk {
                    let loser = if oi >= ok { k } else { i };
                    choices[loser] = None;
                    failed.push(loser);
                }
            }
        }
    }
    failed.sort_unstable();
    failed.dedup();
    MatchOutcome {
        choices,
        failed,
        ties,
    }
}
