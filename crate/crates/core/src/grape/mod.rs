//! Piecewise-constant optimal control of the one-period propagator.
//!
//! A [`ControlProblem`] holds a drift `H_d`, control generators `V_k` with box
//! bounds, and a grid of `N` equal steps over the period `T`. During step `j`
//! the system evolves under `H_d + Σ_k u_kj V_k` for `τ = T/N`; the period
//! propagator is `F = U_N ⋯ U_1`.
//!
//! Gradients are exact. With `H = V diag(λ) V†`, the derivative of
//! `U = exp(-iHτ)` along a generator `G` is `V (G' ∘ D) V†`, where
//! `G' = V† G V` and `D_ab = (e^{-iλ_a τ} - e^{-iλ_b τ}) / (λ_a - λ_b)`,
//! with the limit `-iτ e^{-iλ_a τ}` on (near-)degenerate pairs.

mod drive;
pub mod lbfgsb;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use drive::{ChainDrive, DriveKind};
pub use lbfgsb::Termination;

use crate::error::{Error, Result};
use crate::numerics::{c, CMatrix, UnitaryOperator};
use crate::operators::HermitianOperator;
use lbfgsb::{BoxBounds, LbfgsSettings};

/// Relative eigenvalue gap below which the divided difference uses its limit.
pub const DEGENERACY_TOLERANCE: f64 = 1e-10;

/// Stride between the seeds of consecutive restarts.
const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter(format!("invalid control bounds [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn symmetric(max: f64) -> Result<Self> {
        Self::new(-max, max)
    }

    pub fn contains(&self, u: f64) -> bool {
        self.lo <= u && u <= self.hi
    }
}

/// A control generator kept as its nonzero entries; chain controls are
/// diagonal or two-banded, so the gradient contraction is linear in `dim`.
#[derive(Debug, Clone)]
pub struct Control {
    name: String,
    operator: HermitianOperator,
    entries: Vec<(usize, usize, Complex64)>,
    bounds: Bounds,
}

impl Control {
    pub fn new(name: impl Into<String>, operator: HermitianOperator, bounds: Bounds) -> Self {
        let m = operator.matrix();
        let entries = (0..m.ncols())
            .flat_map(|col| (0..m.nrows()).map(move |row| (row, col)))
            .filter_map(|(row, col)| {
                let z = m[(row, col)];
                (z != c(0.0)).then_some((row, col, z))
            })
            .collect();
        Self {
            name: name.into(),
            operator,
            entries,
            bounds,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.operator
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }
}

#[derive(Debug, Clone)]
pub struct ControlProblem {
    drift: HermitianOperator,
    controls: Vec<Control>,
    steps: usize,
    period: f64,
}

impl ControlProblem {
    pub fn new(
        drift: HermitianOperator,
        controls: Vec<Control>,
        steps: usize,
        period: f64,
    ) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidParameter("at least one time step is required".into()));
        }
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::InvalidParameter(format!("period must be positive, got {period}")));
        }
        for ctl in &controls {
            if ctl.operator.dim() != drift.dim() {
                return Err(Error::DimensionMismatch {
                    expected: drift.dim(),
                    found: ctl.operator.dim(),
                    context: "control generator",
                });
            }
        }
        Ok(Self {
            drift,
            controls,
            steps,
            period,
        })
    }

    pub fn drift(&self) -> &HermitianOperator {
        &self.drift
    }

    pub fn controls(&self) -> &[Control] {
        &self.controls
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn tau(&self) -> f64 {
        self.period / self.steps as f64
    }

    pub fn dim(&self) -> usize {
        self.drift.dim()
    }

    pub fn parameter_count(&self) -> usize {
        self.controls.len() * self.steps
    }

    pub fn control_names(&self) -> Vec<String> {
        self.controls.iter().map(|c| c.name.clone()).collect()
    }

    /// Same generators on a different time grid.
    pub fn with_grid(&self, steps: usize, period: f64) -> Result<Self> {
        Self::new(self.drift.clone(), self.controls.clone(), steps, period)
    }

    fn box_bounds(&self) -> BoxBounds {
        let per = |f: fn(&Bounds) -> f64| {
            self.controls
                .iter()
                .flat_map(|ctl| std::iter::repeat_n(f(&ctl.bounds), self.steps))
                .collect()
        };
        BoxBounds {
            lower: per(|b| b.lo),
            upper: per(|b| b.hi),
        }
    }

    /// `H_d + Σ_k u_kj V_k`.
    pub fn step_hamiltonian(&self, seq: &ControlSequence, step: usize) -> CMatrix {
        let mut h = self.drift.matrix().clone();
        for (k, ctl) in self.controls.iter().enumerate() {
            let u = seq.value(k, step);
            if u != 0.0 {
                for &(r, col, z) in &ctl.entries {
                    h[(r, col)] += z * u;
                }
            }
        }
        h
    }

    fn check(&self, seq: &ControlSequence) -> Result<()> {
        if seq.controls != self.controls.len() || seq.steps != self.steps {
            return Err(Error::DimensionMismatch {
                expected: self.parameter_count(),
                found: seq.values.len(),
                context: "control sequence shape (controls × steps)",
            });
        }
        Ok(())
    }

    /// Uniform random sequence inside the bounds.
    pub fn random_sequence<R: Rng + ?Sized>(&self, rng: &mut R) -> ControlSequence {
        let mut values = Vec::with_capacity(self.parameter_count());
        for ctl in &self.controls {
            for _ in 0..self.steps {
                let Bounds { lo, hi } = ctl.bounds;
                values.push(if lo < hi { rng.random_range(lo..=hi) } else { lo });
            }
        }
        ControlSequence {
            names: self.control_names(),
            controls: self.controls.len(),
            steps: self.steps,
            values,
        }
    }

    pub fn zero_sequence(&self) -> ControlSequence {
        ControlSequence::zeros(self.control_names(), self.steps)
    }
}

/// Control amplitudes `u_k(t_j)`, stored control-major: index `k·N + j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlSequence {
    pub names: Vec<String>,
    pub controls: usize,
    pub steps: usize,
    pub values: Vec<f64>,
}

impl ControlSequence {
    pub fn zeros(names: Vec<String>, steps: usize) -> Self {
        let controls = names.len();
        Self {
            names,
            controls,
            steps,
            values: vec![0.0; controls * steps],
        }
    }

    pub fn from_values(names: Vec<String>, steps: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != names.len() * steps {
            return Err(Error::DimensionMismatch {
                expected: names.len() * steps,
                found: values.len(),
                context: "control values",
            });
        }
        Ok(Self {
            controls: names.len(),
            names,
            steps,
            values,
        })
    }

    pub fn value(&self, control: usize, step: usize) -> f64 {
        self.values[control * self.steps + step]
    }

    pub fn set(&mut self, control: usize, step: usize, value: f64) {
        self.values[control * self.steps + step] = value;
    }

    /// Amplitudes of one control over all steps.
    pub fn control(&self, control: usize) -> &[f64] {
        &self.values[control * self.steps..(control + 1) * self.steps]
    }

    pub fn respects(&self, problem: &ControlProblem) -> bool {
        problem.check(self).is_ok()
            && problem
                .controls
                .iter()
                .enumerate()
                .all(|(k, ctl)| self.control(k).iter().all(|&u| ctl.bounds.contains(u)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// `|tr(A† F)| / D`, blind to the global phase.
    #[default]
    AbsTrace,
    /// `Re tr(A† F) / D`, pins the global phase and hence the effective Hamiltonian.
    RealTrace,
}

impl Objective {
    pub fn evaluate(self, target: &UnitaryOperator, trial: &UnitaryOperator) -> f64 {
        match self {
            Objective::AbsTrace => crate::numerics::fidelity_abs(target, trial),
            Objective::RealTrace => crate::numerics::fidelity_real(target, trial),
        }
    }
}

/// `U_N ⋯ U_1` for the sequence.
pub fn propagate(problem: &ControlProblem, seq: &ControlSequence) -> Result<UnitaryOperator> {
    problem.check(seq)?;
    let tau = problem.tau();
    let d = problem.dim();
    let mut f = CMatrix::identity(d, d);
    for j in 0..seq.steps {
        let u = crate::numerics::expm_i(&problem.step_hamiltonian(seq, j), tau)?;
        f = u.matrix() * f;
    }
    Ok(UnitaryOperator::new_unchecked(f))
}

#[derive(Debug, Clone)]
pub struct GradientEvaluation {
    pub fidelity: f64,
    /// `∂F/∂u_kj` in the layout of [`ControlSequence::values`].
    pub gradient: Vec<f64>,
    pub warning: Option<String>,
}

struct Step {
    values: Vec<f64>,
    vectors: CMatrix,
    unitary: CMatrix,
}

/// Fidelity and its exact gradient with respect to every `u_kj`.
pub fn fidelity_and_gradient(
    problem: &ControlProblem,
    seq: &ControlSequence,
    target: &UnitaryOperator,
    objective: Objective,
) -> Result<GradientEvaluation> {
    problem.check(seq)?;
    let d = problem.dim();
    if target.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: target.dim(),
            context: "target unitary",
        });
    }
    let tau = problem.tau();
    let n = problem.steps;

    let steps = (0..n)
        .map(|j| {
            let eig = crate::numerics::eigh(&problem.step_hamiltonian(seq, j))?;
            let unitary = eig.apply(|l| Complex64::from_polar(1.0, -l * tau));
            Ok(Step {
                values: eig.values,
                vectors: eig.vectors,
                unitary,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    // forward[j] = U_j ⋯ U_1 (forward[0] = I); backward[j] = U_N ⋯ U_{j+1}
    let mut forward = Vec::with_capacity(n + 1);
    forward.push(CMatrix::identity(d, d));
    for s in &steps {
        let next = &s.unitary * forward.last().unwrap();
        forward.push(next);
    }
    let mut backward = vec![CMatrix::identity(d, d); n + 1];
    for j in (0..n).rev() {
        backward[j] = &backward[j + 1] * &steps[j].unitary;
    }

    let a_dag = target.matrix().adjoint();
    let z = crate::numerics::overlap_trace(target.matrix(), &forward[n]);
    let dim = d as f64;

    let (fidelity, weight, warning) = match objective {
        Objective::RealTrace => (z.re / dim, c(1.0 / dim), None),
        Objective::AbsTrace => {
            let modulus = z.norm();
            if modulus == 0.0 {
                let warning = "overlap trace vanishes; abs-trace gradient undefined, returned zero";
                return Ok(GradientEvaluation {
                    fidelity: 0.0,
                    gradient: vec![0.0; problem.parameter_count()],
                    warning: Some(warning.into()),
                });
            }
            (modulus / dim, z.conj() / (modulus * dim), None)
        }
    };

    let mut gradient = vec![0.0; problem.parameter_count()];
    let mut divided = CMatrix::zeros(d, d);
    for (j, step) in steps.iter().enumerate() {
        // ∂z/∂u = tr(X ∂U_j) with X = F_{j-1} A† B_j
        let x = &forward[j] * &a_dag * &backward[j + 1];
        let v = &step.vectors;
        let y = v.adjoint() * x * v;
        let scale = step.values.iter().fold(1.0f64, |m, l| m.max(l.abs()));
        let phases: Vec<Complex64> = step
            .values
            .iter()
            .map(|l| Complex64::from_polar(1.0, -l * tau))
            .collect();
        for a in 0..d {
            for b in 0..d {
                let gap = step.values[a] - step.values[b];
                let dd = if gap.abs() < DEGENERACY_TOLERANCE * scale {
                    Complex64::new(0.0, -tau) * phases[a]
                } else {
                    (phases[a] - phases[b]) / gap
                };
                divided[(a, b)] = y[(b, a)] * dd;
            }
        }
        let p = v.conjugate() * &divided * v.transpose();
        for (k, ctl) in problem.controls.iter().enumerate() {
            let dz: Complex64 = ctl.entries.iter().map(|&(r, col, g)| g * p[(r, col)]).sum();
            gradient[k * n + j] = (weight * dz).re;
        }
    }

    Ok(GradientEvaluation {
        fidelity,
        gradient,
        warning,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOptions {
    pub max_iter: usize,
    pub restarts: usize,
    pub seed: u64,
    pub objective: Objective,
    /// Stop when successive fidelities differ by less than this.
    pub f_tol: f64,
    /// Stop when the projected-gradient ∞-norm falls below this.
    pub g_tol: f64,
    /// Starting point of restart 0; the other restarts stay random.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warm_start: Option<ControlSequence>,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            restarts: 10,
            seed: 0,
            objective: Objective::default(),
            f_tol: 1e-10,
            g_tol: 1e-8,
            warm_start: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub index: usize,
    pub seed: u64,
    pub initial_fidelity: f64,
    pub final_fidelity: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub termination: Termination,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationReport {
    pub best_fidelity: f64,
    pub best_restart: usize,
    /// Quasi-Newton iterations of the winning restart.
    pub iterations: usize,
    pub restarts_used: usize,
    /// Fidelity after each accepted iterate of the winning restart.
    pub fidelity_history: Vec<f64>,
    pub restarts: Vec<RestartSummary>,
    pub seed: u64,
    pub objective: Objective,
    pub warnings: Vec<String>,
}

/// Seed of restart `index` derived from the base seed.
pub fn restart_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(SEED_STRIDE))
}

struct RestartOutcome {
    summary: RestartSummary,
    x: Vec<f64>,
    history: Vec<f64>,
    warning: Option<String>,
    error: Option<Error>,
}

fn run_restart(
    problem: &ControlProblem,
    target: &UnitaryOperator,
    options: &OptimizeOptions,
    index: usize,
) -> RestartOutcome {
    let seed = restart_seed(options.seed, index);
    let start = match (&options.warm_start, index) {
        (Some(warm), 0) => {
            let mut s = warm.clone();
            problem.box_bounds().project(&mut s.values);
            s
        }
        _ => problem.random_sequence(&mut ChaCha8Rng::seed_from_u64(seed)),
    };
    let names = start.names.clone();
    let steps = problem.steps;
    let mut error = None;
    let mut warning = None;
    let objective = |x: &[f64]| -> (f64, Vec<f64>) {
        let seq = ControlSequence {
            names: names.clone(),
            controls: problem.controls.len(),
            steps,
            values: x.to_vec(),
        };
        match fidelity_and_gradient(problem, &seq, target, options.objective) {
            Ok(eval) => {
                if eval.warning.is_some() {
                    warning = eval.warning;
                }
                (-eval.fidelity, eval.gradient.iter().map(|g| -g).collect())
            }
            Err(e) => {
                error.get_or_insert(e);
                (f64::NAN, vec![0.0; x.len()])
            }
        }
    };
    let settings = LbfgsSettings {
        max_iter: options.max_iter,
        f_tol: options.f_tol,
        g_tol: options.g_tol,
        ..Default::default()
    };
    let min = lbfgsb::minimize(objective, &start.values, &problem.box_bounds(), &settings);
    let history: Vec<f64> = min.history.iter().map(|v| -v).collect();
    RestartOutcome {
        summary: RestartSummary {
            index,
            seed,
            initial_fidelity: history[0],
            final_fidelity: -min.value,
            iterations: min.iterations,
            evaluations: min.evaluations,
            termination: min.termination,
        },
        x: min.x,
        history,
        warning,
        error,
    }
}

/// Multi-restart bounded quasi-Newton ascent of the fidelity.
///
/// Restarts run in parallel, each from its own derived seed; the best final
/// fidelity wins, ties going to the lowest restart index, so the result does
/// not depend on scheduling.
pub fn optimize(
    problem: &ControlProblem,
    target: &UnitaryOperator,
    options: &OptimizeOptions,
) -> Result<(ControlSequence, OptimizationReport)> {
    if options.restarts == 0 {
        return Err(Error::InvalidParameter("at least one restart is required".into()));
    }
    if target.dim() != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.dim(),
            found: target.dim(),
            context: "target unitary",
        });
    }
    if let Some(warm) = &options.warm_start {
        problem.check(warm)?;
    }
    let outcomes: Vec<RestartOutcome> = (0..options.restarts)
        .into_par_iter()
        .map(|i| run_restart(problem, target, options, i))
        .collect();

    let mut warnings = Vec::new();
    let mut best: Option<&RestartOutcome> = None;
    for out in &outcomes {
        if let Some(e) = &out.error {
            if out.summary.final_fidelity.is_nan() {
                return Err(Error::InvalidParameter(format!(
                    "restart {} failed: {e}",
                    out.summary.index
                )));
            }
        }
        if let Some(w) = &out.warning {
            warnings.push(format!("restart {}: {w}", out.summary.index));
        }
        if best.is_none_or(|b| out.summary.final_fidelity > b.summary.final_fidelity) {
            best = Some(out);
        }
    }
    let best = best.expect("at least one restart");
    let best_initial = outcomes
        .iter()
        .map(|o| o.summary.initial_fidelity)
        .fold(f64::NEG_INFINITY, f64::max);
    if best.summary.final_fidelity <= best_initial {
        warnings.push("no restart improved on its initial fidelity".into());
    }

    let seq = ControlSequence {
        names: problem.control_names(),
        controls: problem.controls.len(),
        steps: problem.steps,
        values: best.x.clone(),
    };
    let report = OptimizationReport {
        best_fidelity: best.summary.final_fidelity,
        best_restart: best.summary.index,
        iterations: best.summary.iterations,
        restarts_used: outcomes.len(),
        fidelity_history: best.history.clone(),
        restarts: outcomes.iter().map(|o| o.summary.clone()).collect(),
        seed: options.seed,
        objective: options.objective,
        warnings,
    };
    Ok((seq, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{expm_i, random_hermitian, random_unitary, unitary_deviation};
    use crate::operators::Space;

    fn dense(m: CMatrix) -> HermitianOperator {
        let d = m.nrows();
        HermitianOperator::new(Space::Dense { dim: d }, m).unwrap()
    }

    fn pauli_x_half() -> HermitianOperator {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = c(0.5);
        m[(1, 0)] = c(0.5);
        dense(m)
    }

    fn random_problem(dim: usize, controls: usize, steps: usize, rng: &mut ChaCha8Rng) -> ControlProblem {
        let drift = dense(random_hermitian(dim, rng));
        let ctl = (0..controls)
            .map(|k| {
                Control::new(
                    format!("c{k}"),
                    dense(random_hermitian(dim, rng)),
                    Bounds::symmetric(2.0).unwrap(),
                )
            })
            .collect();
        ControlProblem::new(drift, ctl, steps, 1.7).unwrap()
    }

    #[test]
    fn zero_everything_is_identity() {
        let p = ControlProblem::new(
            HermitianOperator::zeros(Space::Dense { dim: 3 }),
            vec![Control::new("x", dense(random_hermitian(3, &mut ChaCha8Rng::seed_from_u64(1))), Bounds::symmetric(1.0).unwrap())],
            4,
            2.0,
        )
        .unwrap();
        let f = propagate(&p, &p.zero_sequence()).unwrap();
        assert!(unitary_deviation(f.matrix()) < 1e-14);
        assert!((f.matrix() - CMatrix::identity(3, 3)).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn single_step_matches_direct_exponential() {
        let p = ControlProblem::new(
            HermitianOperator::zeros(Space::Dense { dim: 2 }),
            vec![Control::new("x", pauli_x_half(), Bounds::symmetric(5.0).unwrap())],
            1,
            1.3,
        )
        .unwrap();
        let seq = ControlSequence::from_values(p.control_names(), 1, vec![0.8]).unwrap();
        let f = propagate(&p, &seq).unwrap();
        let direct = expm_i(&(pauli_x_half().matrix() * c(0.8)), 1.3).unwrap();
        assert!((f.matrix() - direct.matrix()).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn two_steps_compose_right_to_left() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = random_problem(4, 2, 2, &mut rng);
        let seq = p.random_sequence(&mut rng);
        let u1 = expm_i(&p.step_hamiltonian(&seq, 0), p.tau()).unwrap();
        let u2 = expm_i(&p.step_hamiltonian(&seq, 1), p.tau()).unwrap();
        let f = propagate(&p, &seq).unwrap();
        let manual = u2.matrix() * u1.matrix();
        assert!((f.matrix() - manual).iter().all(|z| z.norm() < 1e-13));
    }

    fn finite_difference(
        p: &ControlProblem,
        seq: &ControlSequence,
        target: &UnitaryOperator,
        objective: Objective,
    ) -> Vec<f64> {
        let h = 1e-6;
        (0..seq.values.len())
            .map(|i| {
                let mut plus = seq.clone();
                plus.values[i] += h;
                let mut minus = seq.clone();
                minus.values[i] -= h;
                let fp = objective.evaluate(target, &propagate(p, &plus).unwrap());
                let fm = objective.evaluate(target, &propagate(p, &minus).unwrap());
                (fp - fm) / (2.0 * h)
            })
            .collect()
    }

    fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
        let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let norm: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
        diff / norm
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for (dim, controls, steps) in [(2, 1, 3), (5, 2, 4), (9, 3, 3)] {
            for objective in [Objective::AbsTrace, Objective::RealTrace] {
                let p = random_problem(dim, controls, steps, &mut rng);
                let seq = p.random_sequence(&mut rng);
                let target = UnitaryOperator::new(random_unitary(dim, &mut rng)).unwrap();
                let eval = fidelity_and_gradient(&p, &seq, &target, objective).unwrap();
                let fd = finite_difference(&p, &seq, &target, objective);
                let err = relative_l2(&eval.gradient, &fd);
                assert!(err < 1e-6, "dim {dim} {objective:?}: {err}");
                let f = objective.evaluate(&target, &propagate(&p, &seq).unwrap());
                assert!((f - eval.fidelity).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gradient_through_degenerate_spectrum() {
        // zero drift and zero controls: every step Hamiltonian is fully degenerate
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let ctl = (0..2)
            .map(|k| Control::new(format!("c{k}"), dense(random_hermitian(3, &mut rng)), Bounds::symmetric(1.0).unwrap()))
            .collect();
        let p = ControlProblem::new(HermitianOperator::zeros(Space::Dense { dim: 3 }), ctl, 3, 1.0).unwrap();
        let target = UnitaryOperator::new(random_unitary(3, &mut rng)).unwrap();
        let seq = p.zero_sequence();
        for objective in [Objective::AbsTrace, Objective::RealTrace] {
            let eval = fidelity_and_gradient(&p, &seq, &target, objective).unwrap();
            let fd = finite_difference(&p, &seq, &target, objective);
            assert!(relative_l2(&eval.gradient, &fd) < 1e-6);
        }
    }

    #[test]
    fn stationary_at_reached_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let p = random_problem(4, 2, 3, &mut rng);
        let seq = p.random_sequence(&mut rng);
        let target = propagate(&p, &seq).unwrap();
        let eval = fidelity_and_gradient(&p, &seq, &target, Objective::RealTrace).unwrap();
        assert!((eval.fidelity - 1.0).abs() < 1e-12);
        let norm: f64 = eval.gradient.iter().map(|g| g * g).sum::<f64>().sqrt();
        assert!(norm < 1e-8, "{norm}");
    }

    #[test]
    fn vanishing_overlap_warns() {
        // target X against identity propagator: tr(X) = 0
        let p = ControlProblem::new(
            HermitianOperator::zeros(Space::Dense { dim: 2 }),
            vec![Control::new("z", dense(CMatrix::from_diagonal_element(2, 2, c(1.0))), Bounds::symmetric(1.0).unwrap())],
            1,
            1.0,
        )
        .unwrap();
        let mut x = CMatrix::zeros(2, 2);
        x[(0, 1)] = c(1.0);
        x[(1, 0)] = c(1.0);
        let target = UnitaryOperator::new(x).unwrap();
        let eval = fidelity_and_gradient(&p, &p.zero_sequence(), &target, Objective::AbsTrace).unwrap();
        assert!(eval.warning.is_some());
        assert!(eval.gradient.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn reachable_single_qubit_target() {
        let p = ControlProblem::new(
            HermitianOperator::zeros(Space::Dense { dim: 2 }),
            vec![Control::new("x", pauli_x_half(), Bounds::symmetric(5.0).unwrap())],
            1,
            1.0,
        )
        .unwrap();
        let target = expm_i(&(pauli_x_half().matrix() * c(1.9)), 1.0).unwrap();
        let options = OptimizeOptions {
            restarts: 3,
            seed: 4,
            ..Default::default()
        };
        let (seq, report) = optimize(&p, &target, &options).unwrap();
        assert!(report.best_fidelity >= 1.0 - 1e-8, "{report:?}");
        assert!(seq.respects(&p));
        assert_eq!(report.restarts_used, 3);
    }

    #[test]
    fn optimization_is_deterministic_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let p = random_problem(3, 2, 4, &mut rng);
        let target = UnitaryOperator::new(random_unitary(3, &mut rng)).unwrap();
        let options = OptimizeOptions {
            restarts: 4,
            seed: 123,
            max_iter: 60,
            ..Default::default()
        };
        let (a, ra) = optimize(&p, &target, &options).unwrap();
        let (b, rb) = optimize(&p, &target, &options).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra, rb);
        assert!(a.respects(&p));
        assert!(ra.fidelity_history.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(
            serde_json::to_string(&ra).unwrap(),
            serde_json::to_string(&rb).unwrap()
        );
    }

    #[test]
    fn shape_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_problem(2, 1, 3, &mut rng);
        let bad = ControlSequence::zeros(vec!["a".into()], 2);
        assert!(matches!(propagate(&p, &bad), Err(Error::DimensionMismatch { .. })));
        assert!(ControlProblem::new(p.drift().clone(), vec![], 0, 1.0).is_err());
        assert!(Bounds::new(1.0, -1.0).is_err());
    }
}
