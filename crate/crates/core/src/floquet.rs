//! Floquet analysis of synthesized drives.
//!
//! Stroboscopically (`t = nT`) a periodic drive acts as its one-period
//! propagator `F = exp(-i H_eff T)`. This module extracts `H_eff` and the
//! quasienergies from `F`, evolves states stroboscopically, lifts
//! single-excitation drives to many-excitation hardcore sectors, and runs
//! adiabatic sweeps in which the drive is re-synthesized every period.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{Sector, Statistics};
use crate::error::{Error, Result};
use crate::grape::{self, ChainDrive, ControlProblem, ControlSequence, Objective, OptimizeOptions};
use crate::numerics::{self, c, CMatrix, CVector, UnitaryOperator};
use crate::operators::{HermitianOperator, Space};
use crate::targets::sat;

/// Tolerance on `‖ψ‖ - 1` for stroboscopic inputs.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct FloquetResult {
    pub floquet_op: UnitaryOperator,
    /// Principal-branch effective Hamiltonian.
    pub effective: HermitianOperator,
    /// Ascending, in `(-π/T, π/T]`.
    pub quasienergies: Vec<f64>,
    /// Floquet states as columns, ordered like `quasienergies`.
    pub states: CMatrix,
    pub period: f64,
    /// `|tr(A† F)| / D` against the supplied target.
    pub fidelity_to_target: Option<f64>,
    /// `Re tr(A† F) / D` against the supplied target.
    pub phase_fidelity_to_target: Option<f64>,
    pub near_branch_cut: bool,
}

impl FloquetResult {
    /// Analyse a one-period propagator acting on `space`.
    pub fn from_operator(
        floquet_op: UnitaryOperator,
        space: Space,
        period: f64,
        target: Option<&UnitaryOperator>,
    ) -> Result<Self> {
        if let Some(t) = target {
            if t.dim() != floquet_op.dim() {
                return Err(Error::DimensionMismatch {
                    expected: floquet_op.dim(),
                    found: t.dim(),
                    context: "target unitary",
                });
            }
        }
        let log = numerics::logm_unitary(&floquet_op, period)?;
        let effective = HermitianOperator::new(space, log.hamiltonian)?;
        Ok(Self {
            fidelity_to_target: target.map(|t| numerics::fidelity_abs(t, &floquet_op)),
            phase_fidelity_to_target: target.map(|t| numerics::fidelity_real(t, &floquet_op)),
            floquet_op,
            effective,
            quasienergies: log.quasienergies,
            states: log.states,
            period,
            near_branch_cut: log.near_branch_cut,
        })
    }

    pub fn dim(&self) -> usize {
        self.floquet_op.dim()
    }

    /// Floquet state with the lowest quasienergy.
    pub fn ground_state(&self) -> CVector {
        self.states.column(0).into_owned()
    }

    /// `max |exp(-i H_eff T) - F|`.
    pub fn round_trip_error(&self) -> Result<f64> {
        let back = numerics::expm_i(self.effective.matrix(), self.period)?;
        Ok(numerics::max_abs(&(back.matrix() - self.floquet_op.matrix())))
    }
}

/// Propagate the sequence and analyse the resulting Floquet operator.
pub fn floquet_from_controls(
    problem: &ControlProblem,
    seq: &ControlSequence,
    target: Option<&UnitaryOperator>,
) -> Result<FloquetResult> {
    let f = grape::propagate(problem, seq)?;
    FloquetResult::from_operator(f, *problem.drift().space(), problem.period(), target)
}

/// Effective Hamiltonian with each quasienergy moved to the Brillouin zone
/// copy closest to a reference.
///
/// The principal logarithm folds every quasienergy into `(-π/T, π/T]`, so a
/// reference whose spectrum is wider than `2π/T` can never be matched by it
/// even when `F` equals `exp(-i H_ref T)` exactly. Here each Floquet state
/// `|Φ⟩` keeps its quasienergy modulo `2π/T`, shifted by the multiple of
/// `2π/T` that brings it nearest to `⟨Φ|H_ref|Φ⟩`.
pub fn aligned_effective_hamiltonian(
    result: &FloquetResult,
    reference: &HermitianOperator,
) -> Result<HermitianOperator> {
    let d = result.dim();
    if reference.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: reference.dim(),
            context: "reference Hamiltonian",
        });
    }
    let zone = 2.0 * std::f64::consts::PI / result.period;
    let mut h = CMatrix::zeros(d, d);
    for (k, &e) in result.quasienergies.iter().enumerate() {
        let phi = result.states.column(k).into_owned();
        let r = reference.expectation(&phi);
        let aligned = e + zone * ((r - e) / zone).round();
        h += (&phi * phi.adjoint()) * c(aligned);
    }
    Ok(HermitianOperator::from_parts(*result.effective.space(), h))
}

fn check_normalized(psi: &CVector) -> Result<()> {
    let deviation = (psi.norm() - 1.0).abs();
    if deviation > NORM_TOLERANCE {
        return Err(Error::InvalidParameter(format!(
            "state is not normalized (|‖ψ‖ - 1| = {deviation:e})"
        )));
    }
    Ok(())
}

/// `[ψ, Fψ, F²ψ, …, Fⁿψ]`.
pub fn stroboscopic_evolve(f: &UnitaryOperator, psi0: &CVector, periods: usize) -> Result<Vec<CVector>> {
    if psi0.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: psi0.len(),
            context: "initial state",
        });
    }
    check_normalized(psi0)?;
    let mut out = Vec::with_capacity(periods + 1);
    out.push(psi0.clone());
    for n in 0..periods {
        let next = f.apply(&out[n]);
        out.push(next);
    }
    Ok(out)
}

/// A single-excitation drive replayed in a many-excitation hardcore sector.
#[derive(Debug, Clone)]
pub struct LiftResult {
    /// Floquet analysis in the target sector, with fidelities against the
    /// compound matrix of the single-excitation target.
    pub floquet: FloquetResult,
    /// `max |F_M - C_M(F_1)|`: sector evolution against the exterior power
    /// of the single-excitation propagator.
    pub oracle_deviation: f64,
}

/// Replay the controls of a single-excitation drive in `sector`.
///
/// For hardcore bosons with nearest-neighbour driving the `M`-excitation
/// propagator is the `M`-th compound matrix of the one-excitation propagator,
/// so a drive synthesized at `M = 1` realizes the compound of its target.
pub fn lift_single_particle(
    drive: &ChainDrive,
    seq: &ControlSequence,
    period: f64,
    single_target: &UnitaryOperator,
    sector: &Sector,
) -> Result<LiftResult> {
    if sector.statistics() != Statistics::Hardcore {
        return Err(Error::Unsupported(
            "the single-excitation lift relies on free-fermion structure and needs hardcore statistics".into(),
        ));
    }
    let single_sector = sector.with_excitations(1)?;
    let single = drive.problem(&single_sector, seq.steps, period)?;
    let many = drive.problem(sector, seq.steps, period)?;
    let f1 = grape::propagate(&single, seq)?;
    let fm = grape::propagate(&many, seq)?;
    let oracle = numerics::compound_matrix(f1.matrix(), sector.excitations())?;
    let oracle_deviation = numerics::max_abs(&(fm.matrix() - &oracle));
    let target = UnitaryOperator::new(numerics::compound_matrix(
        single_target.matrix(),
        sector.excitations(),
    )?)?;
    let floquet = FloquetResult::from_operator(fm, Space::Sector(*sector), period, Some(&target))?;
    Ok(LiftResult {
        floquet,
        oracle_deviation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    #[default]
    Linear,
    /// `3x² - 2x³`: vanishing ramp rate at both ends.
    Smoothstep,
}

impl Schedule {
    pub fn lambda(self, cycle: usize, cycles: usize) -> f64 {
        let x = cycle as f64 / cycles as f64;
        match self {
            Schedule::Linear => x,
            Schedule::Smoothstep => x * x * (3.0 - 2.0 * x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticConfig {
    pub cycles: usize,
    pub period: f64,
    pub steps: usize,
    pub sector: Sector,
    pub drive: ChainDrive,
    #[serde(default)]
    pub schedule: Schedule,
    /// Abort when a cycle's synthesized fidelity falls below this.
    pub fidelity_floor: f64,
    /// Options of the cold-started first cycle; later cycles reuse them with
    /// the previous controls as warm start and `warm_restarts` restarts
    /// (restart 0 continues from the warm start, the rest are random). A warm
    /// cycle that misses the floor is retried with the full `grape.restarts`.
    pub grape: OptimizeOptions,
    pub warm_restarts: usize,
    /// Keep every cycle's control sequence in the trajectory.
    #[serde(default)]
    pub archive_controls: bool,
    /// Decode 3-variable assignments from the evolving state.
    #[serde(default)]
    pub decode_assignment: bool,
}

impl AdiabaticConfig {
    pub fn new(sector: Sector, drive: ChainDrive, cycles: usize, period: f64, steps: usize) -> Self {
        Self {
            cycles,
            period,
            steps,
            sector,
            drive,
            schedule: Schedule::Linear,
            fidelity_floor: 0.999,
            grape: OptimizeOptions {
                objective: Objective::RealTrace,
                ..OptimizeOptions::default()
            },
            warm_restarts: 1,
            archive_controls: false,
            decode_assignment: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub cycle: usize,
    pub lambda: f64,
    /// Fidelity of the synthesized period propagator to `exp(-i H(λ) T)`.
    pub synthesis_fidelity: f64,
    /// `|⟨Φ₀|ψ⟩|²` against the lowest-quasienergy Floquet state.
    pub ground_fidelity: f64,
    pub cost_expectation: f64,
    pub quasienergies: Vec<f64>,
    pub decoded: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub controls: Option<ControlSequence>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticTrajectory {
    pub records: Vec<CycleRecord>,
    /// Final state as `(re, im)` pairs.
    pub final_state: Vec<(f64, f64)>,
}

impl AdiabaticTrajectory {
    pub fn last(&self) -> Option<&CycleRecord> {
        self.records.last()
    }

    pub fn min_ground_fidelity(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.ground_fidelity)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn final_state(&self) -> CVector {
        CVector::from_iterator(
            self.final_state.len(),
            self.final_state.iter().map(|&(re, im)| Complex64::new(re, im)),
        )
    }
}

/// Deform `H(λ) = (1-λ) H_diag + λ H_final` over `cycles` periods.
///
/// Every cycle synthesizes a drive for `exp(-i H(λ_n) T)` (warm-started from
/// the previous cycle), applies its achieved Floquet operator once to the
/// state, and records the overlap with the lowest-quasienergy Floquet state.
/// The state starts in that ground state of cycle 0. `cost` defaults to
/// `H_final`.
pub fn adiabatic_sweep(
    h_diag: &HermitianOperator,
    h_final: &HermitianOperator,
    cost: Option<&HermitianOperator>,
    config: &AdiabaticConfig,
) -> Result<AdiabaticTrajectory> {
    if config.cycles == 0 {
        return Err(Error::InvalidParameter("an adiabatic sweep needs at least one cycle".into()));
    }
    let d = config.sector.dim();
    for (op, context) in [(h_diag, "initial Hamiltonian"), (h_final, "final Hamiltonian")] {
        if op.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: op.dim(),
                context,
            });
        }
    }
    let cost = cost.unwrap_or(h_final);
    let problem = config.drive.problem(&config.sector, config.steps, config.period)?;

    let mut records: Vec<CycleRecord> = Vec::with_capacity(config.cycles + 1);
    let mut psi: Option<CVector> = None;
    let mut previous: Option<ControlSequence> = None;
    for n in 0..=config.cycles {
        let lambda = config.schedule.lambda(n, config.cycles);
        let h = h_diag.combine(1.0 - lambda, h_final, lambda)?;
        let target = h.propagator(config.period)?;
        let mut options = config.grape.clone();
        options.seed = grape::restart_seed(config.grape.seed, n);
        let warm = previous.is_some();
        if let Some(prev) = previous.take() {
            options.warm_start = Some(prev);
            options.restarts = config.warm_restarts.max(1);
        }
        let (mut seq, mut report) = grape::optimize(&problem, &target, &options)?;
        if warm && report.best_fidelity < config.fidelity_floor && options.restarts < config.grape.restarts {
            options.restarts = config.grape.restarts;
            (seq, report) = grape::optimize(&problem, &target, &options)?;
        }
        let floquet = floquet_from_controls(&problem, &seq, Some(&target))?;

        let state = match psi.take() {
            None => floquet.ground_state(),
            Some(prev) => floquet.floquet_op.apply(&prev),
        };
        let ground = floquet.ground_state();
        let decoded = if config.decode_assignment {
            sat::readout_assignment(&state).ok()
        } else {
            None
        };
        records.push(CycleRecord {
            cycle: n,
            lambda,
            synthesis_fidelity: report.best_fidelity,
            ground_fidelity: ground.dotc(&state).norm_sqr(),
            cost_expectation: cost.expectation(&state),
            quasienergies: floquet.quasienergies.clone(),
            decoded,
            controls: config.archive_controls.then(|| seq.clone()),
        });
        let finish = |records: Vec<CycleRecord>, state: &CVector| AdiabaticTrajectory {
            records,
            final_state: state.iter().map(|z| (z.re, z.im)).collect(),
        };
        if report.best_fidelity < config.fidelity_floor {
            return Err(Error::BelowFidelityFloor {
                cycle: n,
                fidelity: report.best_fidelity,
                floor: config.fidelity_floor,
                partial: Box::new(finish(records, &state)),
            });
        }
        if n == config.cycles {
            return Ok(finish(records, &state));
        }
        psi = Some(state);
        previous = Some(seq);
    }
    unreachable!("the loop returns at the last cycle")
}
