//! Derivative-free local minimizers used by the curvature search and the
//! constant estimator: a box-projected Nelder-Mead simplex and a compass
//! (coordinate) search used to polish its result.
//!
//! Objectives may return `+∞` to mark infeasible points; both methods treat
//! such points as worse than any finite value.

#[derive(Debug, Clone, Copy)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    pub const UNBOUNDED: Bounds = Bounds { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    #[inline]
    fn project(&self, x: &mut [f64]) {
        for xi in x {
            *xi = xi.clamp(self.lo, self.hi);
        }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    pub initial_step: f64,
    pub max_evals: usize,
    /// Stop when the spread of simplex values falls below
    /// `f_tol * (|f_best| + 1e-300)` and the simplex diameter below `x_tol`.
    pub f_tol: f64,
    pub x_tol: f64,
    /// Restart from the best vertex this many times after convergence.
    pub restarts: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions { initial_step: 0.5, max_evals: 4000, f_tol: 1e-12, x_tol: 1e-9, restarts: 2 }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

pub fn nelder_mead<F>(objective: F, start: &[f64], bounds: Bounds, opts: &NelderMeadOptions) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let mut best = Minimum { x: start.to_vec(), value: f64::INFINITY, evals: 0 };
    bounds.project(&mut best.x);
    best.value = objective(&best.x);
    best.evals = 1;
    let mut step = opts.initial_step;
    for _ in 0..=opts.restarts {
        if best.evals >= opts.max_evals {
            break;
        }
        let run = simplex_run(&objective, &best.x, step, bounds, opts, opts.max_evals - best.evals);
        best.evals += run.evals;
        let improved = run.value < best.value;
        if improved {
            best.x = run.x;
            best.value = run.value;
        }
        step = (step * 0.5).max(10.0 * opts.x_tol);
    }
    best
}

fn simplex_run<F>(objective: &F, start: &[f64], step: f64, bounds: Bounds, opts: &NelderMeadOptions, budget: usize) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;

    let n = start.len();
    let evals = std::cell::Cell::new(0usize);
    let eval = |x: &mut Vec<f64>| {
        bounds.project(x);
        evals.set(evals.get() + 1);
        let v = objective(x);
        if v.is_nan() { f64::INFINITY } else { v }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let mut x0 = start.to_vec();
    let f0 = eval(&mut x0);
    simplex.push((x0.clone(), f0));
    for i in 0..n {
        let mut xi = x0.clone();
        // step inward when the start sits on the upper bound
        xi[i] += if xi[i] + step > bounds.hi { -step } else { step };
        let fi = eval(&mut xi);
        simplex.push((xi, fi));
    }

    let mut centroid = vec![0.0; n];
    while evals.get() < budget {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (f_best, f_worst) = (simplex[0].1, simplex[n].1);
        let spread = f_worst - f_best;
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if f_best.is_finite() && spread <= opts.f_tol * (f_best.abs() + 1e-300) && diameter <= opts.x_tol {
            break;
        }
        if diameter == 0.0 {
            break;
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[n].0).map(|(c, w)| c + t * (c - w)).collect()
        };

        let mut reflected = along(REFLECT);
        let f_reflected = eval(&mut reflected);
        if f_reflected < simplex[0].1 {
            let mut expanded = along(EXPAND);
            let f_expanded = eval(&mut expanded);
            simplex[n] = if f_expanded < f_reflected { (expanded, f_expanded) } else { (reflected, f_reflected) };
        } else if f_reflected < simplex[n - 1].1 {
            simplex[n] = (reflected, f_reflected);
        } else {
            let outside = f_reflected < simplex[n].1;
            let mut contracted = along(if outside { CONTRACT } else { -CONTRACT });
            let f_contracted = eval(&mut contracted);
            if f_contracted < simplex[n].1.min(f_reflected) {
                simplex[n] = (contracted, f_contracted);
            } else {
                let anchor = simplex[0].0.clone();
                for (x, fx) in simplex[1..].iter_mut() {
                    for (xi, ai) in x.iter_mut().zip(&anchor) {
                        *xi = ai + SHRINK * (*xi - ai);
                    }
                    *fx = eval(x);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Minimum { x, value, evals: evals.get() }
}

/// Compass search: try `±step` along each coordinate, keep improvements, halve
/// the step when a full sweep fails, stop below `min_step`.
pub fn coordinate_polish<F>(objective: F, start: Minimum, bounds: Bounds, step: f64, min_step: f64, max_evals: usize) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let Minimum { mut x, mut value, mut evals } = start;
    let mut step = step;
    let mut trial = x.clone();
    let budget = evals + max_evals;
    while step >= min_step && evals < budget {
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                trial.copy_from_slice(&x);
                trial[i] = (x[i] + dir * step).clamp(bounds.lo, bounds.hi);
                if trial[i] == x[i] {
                    continue;
                }
                let v = objective(&trial);
                evals += 1;
                if v < value {
                    value = v;
                    x.copy_from_slice(&trial);
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Minimum { x, value, evals }
}
