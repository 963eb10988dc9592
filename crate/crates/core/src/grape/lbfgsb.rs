//! Limited-memory quasi-Newton minimization on a box.
//!
//! Each iteration fixes the variables pinned at a bound with the gradient
//! pushing outward, builds a two-loop L-BFGS direction on the remaining free
//! variables, and line-searches along the projected path
//! `x(α) = P(x + α d)` for the strong Wolfe conditions. Curvature pairs with
//! `sᵀy ≤ ε yᵀy` are skipped so the inverse-Hessian model stays positive.

use std::collections::VecDeque;

/// Box constraint `lo ≤ x ≤ hi`, per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxBounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxBounds {
    pub fn project(&self, x: &mut [f64]) {
        for ((xi, lo), hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *xi = xi.clamp(*lo, *hi);
        }
    }

    /// `P(x - g) - x`; zero exactly at box-constrained stationary points.
    pub fn projected_gradient_norm(&self, x: &[f64], g: &[f64]) -> f64 {
        x.iter()
            .zip(g)
            .zip(self.lower.iter().zip(&self.upper))
            .map(|((xi, gi), (lo, hi))| ((xi - gi).clamp(*lo, *hi) - xi).abs())
            .fold(0.0, f64::max)
    }

    fn pinned(&self, i: usize, x: f64, g: f64) -> bool {
        (x <= self.lower[i] && g > 0.0) || (x >= self.upper[i] && g < 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LbfgsSettings {
    pub memory: usize,
    pub max_iter: usize,
    /// Stop when successive objective values differ by less than this.
    pub f_tol: f64,
    /// Stop when the projected-gradient ∞-norm falls below this.
    pub g_tol: f64,
    pub c1: f64,
    pub c2: f64,
    pub max_line_search: usize,
}

impl Default for LbfgsSettings {
    fn default() -> Self {
        Self {
            memory: 10,
            max_iter: 1000,
            f_tol: 1e-10,
            g_tol: 1e-8,
            c1: 1e-4,
            c2: 0.9,
            max_line_search: 25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    ObjectiveStalled,
    GradientSmall,
    MaxIterations,
    LineSearchFailed,
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// Objective after every accepted iterate, starting with `x0`.
    pub history: Vec<f64>,
    pub termination: Termination,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Memory {
    pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)>,
    capacity: usize,
}

impl Memory {
    fn push(&mut self, s: Vec<f64>, y: Vec<f64>) -> bool {
        let sy = dot(&s, &y);
        let yy = dot(&y, &y);
        if !(sy > f64::EPSILON * yy) || yy == 0.0 {
            return false;
        }
        if self.pairs.len() == self.capacity {
            self.pairs.pop_front();
        }
        self.pairs.push_back((s, y, 1.0 / sy));
        true
    }

    /// `-H g` restricted to `free` coordinates.
    fn direction(&self, g: &[f64], free: &[bool]) -> Vec<f64> {
        let mask = |v: &[f64]| -> Vec<f64> {
            v.iter()
                .zip(free)
                .map(|(x, &f)| if f { *x } else { 0.0 })
                .collect()
        };
        let mut q = mask(g);
        let mut alpha = vec![0.0; self.pairs.len()];
        for (i, (s, y, rho)) in self.pairs.iter().enumerate().rev() {
            let s = mask(s);
            alpha[i] = rho * dot(&s, &q);
            for (qj, yj) in q.iter_mut().zip(mask(y)) {
                *qj -= alpha[i] * yj;
            }
        }
        if let Some((s, y, _)) = self.pairs.back() {
            let y = mask(y);
            let yy = dot(&y, &y);
            if yy > 0.0 {
                let gamma = dot(&mask(s), &y) / yy;
                if gamma > 0.0 {
                    q.iter_mut().for_each(|v| *v *= gamma);
                }
            }
        }
        for (i, (s, y, rho)) in self.pairs.iter().enumerate() {
            let y = mask(y);
            let beta = rho * dot(&y, &q);
            for (qj, sj) in q.iter_mut().zip(mask(s)) {
                *qj += (alpha[i] - beta) * sj;
            }
        }
        q.iter().map(|v| -v).collect()
    }
}

struct Trial {
    alpha: f64,
    x: Vec<f64>,
    value: f64,
    grad: Vec<f64>,
    slope: f64,
}

/// Objective along the projected search path.
struct PathSearch<'a, F> {
    f: &'a mut F,
    bounds: &'a BoxBounds,
    x0: &'a [f64],
    d: &'a [f64],
    evaluations: usize,
}

impl<F: FnMut(&[f64]) -> (f64, Vec<f64>)> PathSearch<'_, F> {
    fn eval(&mut self, alpha: f64) -> Trial {
        let mut x: Vec<f64> = self
            .x0
            .iter()
            .zip(self.d)
            .map(|(xi, di)| xi + alpha * di)
            .collect();
        self.bounds.project(&mut x);
        let (value, grad) = (self.f)(&x);
        self.evaluations += 1;
        // path derivative: coordinates still moving contribute g_i d_i
        let slope = (0..x.len())
            .filter(|&i| {
                let raw = self.x0[i] + alpha * self.d[i];
                raw > self.bounds.lower[i] && raw < self.bounds.upper[i]
            })
            .map(|i| grad[i] * self.d[i])
            .sum();
        Trial {
            alpha,
            x,
            value,
            grad,
            slope,
        }
    }
}

/// Strong-Wolfe bracketing and zoom; returns the accepted trial, or the best
/// sufficient-decrease point seen when the curvature condition is never met.
fn line_search<F: FnMut(&[f64]) -> (f64, Vec<f64>)>(
    search: &mut PathSearch<'_, F>,
    f0: f64,
    slope0: f64,
    alpha_init: f64,
    settings: &LbfgsSettings,
) -> Option<Trial> {
    let armijo = |t: &Trial| t.value <= f0 + settings.c1 * t.alpha * slope0;
    let curvature = |t: &Trial| t.slope.abs() <= -settings.c2 * slope0;
    let mut fallback: Option<Trial> = None;
    let keep = |t: &Trial, fallback: &mut Option<Trial>| {
        if armijo(t) && fallback.as_ref().is_none_or(|b| t.value < b.value) {
            *fallback = Some(Trial {
                alpha: t.alpha,
                x: t.x.clone(),
                value: t.value,
                grad: t.grad.clone(),
                slope: t.slope,
            });
        }
    };

    let mut prev_alpha = 0.0;
    let mut prev_value = f0;
    let mut prev_slope = slope0;
    let mut alpha = alpha_init;
    let mut budget = settings.max_line_search;
    let (mut lo, mut hi);
    loop {
        let t = search.eval(alpha);
        budget -= 1;
        if !t.value.is_finite() {
            return fallback;
        }
        keep(&t, &mut fallback);
        if !armijo(&t) || (prev_alpha > 0.0 && t.value >= prev_value) {
            lo = (prev_alpha, prev_value, prev_slope);
            hi = (t.alpha, t.value, t.slope);
            break;
        }
        if curvature(&t) {
            return Some(t);
        }
        if t.slope >= 0.0 {
            lo = (t.alpha, t.value, t.slope);
            hi = (prev_alpha, prev_value, prev_slope);
            break;
        }
        if budget == 0 {
            return fallback;
        }
        prev_alpha = t.alpha;
        prev_value = t.value;
        prev_slope = t.slope;
        alpha *= 2.0;
    }

    while budget > 0 {
        budget -= 1;
        let (a_lo, f_lo, d_lo) = lo;
        let (a_hi, f_hi, _) = hi;
        // quadratic interpolation from (lo value, lo slope, hi value), safeguarded
        let width = a_hi - a_lo;
        let denom = 2.0 * (f_hi - f_lo - d_lo * width);
        let mut a = if denom.abs() > 0.0 {
            a_lo - d_lo * width * width / denom
        } else {
            a_lo + 0.5 * width
        };
        let (left, right) = (a_lo.min(a_hi), a_lo.max(a_hi));
        let margin = 0.1 * (right - left);
        if !a.is_finite() || a < left + margin || a > right - margin {
            a = 0.5 * (a_lo + a_hi);
        }
        if (right - left) < 1e-16 * right.max(1.0) {
            break;
        }
        let t = search.eval(a);
        if !t.value.is_finite() {
            hi = (a, f64::INFINITY, 0.0);
            continue;
        }
        keep(&t, &mut fallback);
        if !armijo(&t) || t.value >= f_lo {
            hi = (t.alpha, t.value, t.slope);
        } else {
            if curvature(&t) {
                return Some(t);
            }
            if t.slope * (a_hi - a_lo) >= 0.0 {
                hi = lo;
            }
            lo = (t.alpha, t.value, t.slope);
        }
    }
    fallback
}

/// Minimize `f` (returning value and gradient) over `bounds` from `x0`.
pub fn minimize<F>(mut f: F, x0: &[f64], bounds: &BoxBounds, settings: &LbfgsSettings) -> Minimum
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let n = x0.len();
    let mut x = x0.to_vec();
    bounds.project(&mut x);
    let (mut value, mut grad) = f(&x);
    let mut evaluations = 1;
    let mut history = vec![value];
    let mut memory = Memory {
        pairs: VecDeque::with_capacity(settings.memory),
        capacity: settings.memory.max(1),
    };

    let mut iterations = 0;
    let termination = loop {
        if bounds.projected_gradient_norm(&x, &grad) < settings.g_tol {
            break Termination::GradientSmall;
        }
        if iterations >= settings.max_iter {
            break Termination::MaxIterations;
        }
        let free: Vec<bool> = (0..n).map(|i| !bounds.pinned(i, x[i], grad[i])).collect();

        let mut accepted = None;
        for attempt in 0..2 {
            let steepest = attempt == 1 || memory.pairs.is_empty();
            let mut d = if steepest {
                grad.iter()
                    .zip(&free)
                    .map(|(g, &fr)| if fr { -g } else { 0.0 })
                    .collect()
            } else {
                memory.direction(&grad, &free)
            };
            let mut slope0 = dot(&grad, &d);
            if !(slope0 < 0.0) {
                if steepest {
                    break;
                }
                memory.pairs.clear();
                continue;
            }
            // the first steepest step is scaled to unit length
            let alpha_init = if steepest {
                let norm = dot(&d, &d).sqrt();
                d.iter_mut().for_each(|v| *v /= norm);
                slope0 /= norm;
                if iterations == 0 { 1.0 } else { (1.0f64).min(norm) }
            } else {
                1.0
            };
            let mut search = PathSearch {
                f: &mut f,
                bounds,
                x0: &x,
                d: &d,
                evaluations: 0,
            };
            let trial = line_search(&mut search, value, slope0, alpha_init, settings);
            evaluations += search.evaluations;
            match trial {
                Some(t) => {
                    accepted = Some(t);
                    break;
                }
                None => memory.pairs.clear(),
            }
        }

        let Some(t) = accepted else {
            break Termination::LineSearchFailed;
        };
        iterations += 1;
        let s: Vec<f64> = t.x.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = t.grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
        memory.push(s, y);
        let delta = (value - t.value).abs();
        x = t.x;
        value = t.value;
        grad = t.grad;
        history.push(value);
        if delta < settings.f_tol {
            break Termination::ObjectiveStalled;
        }
    };

    Minimum {
        x,
        value,
        iterations,
        evaluations,
        history,
        termination,
    }
}
