//! Downhill simplex (Nelder–Mead) minimization.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimplexConfig {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    pub max_iterations: usize,
    /// Converged once `max f − min f` over the vertices drops below this.
    pub tolerance: f64,
    /// Offset of each initial vertex from the start point along its axis.
    pub initial_step: f64,
}

impl Default for SimplexConfig {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            max_iterations: 2000,
            tolerance: 1e-8,
            initial_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub cost: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Best vertex cost after each iteration; `history[0]` is the initial
    /// simplex.
    pub history: Vec<f64>,
}

/// Minimize `f` starting from `x0`. NaN costs are treated as `+∞`.
pub fn minimize<F>(mut f: F, x0: &[f64], cfg: &SimplexConfig) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += cfg.initial_step;
        let fx = eval(&x);
        simplex.push((x, fx));
    }
    let order = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    order(&mut simplex);

    let mut history = vec![simplex[0].1];
    let mut iterations = 0;
    let mut converged = simplex[n].1 - simplex[0].1 < cfg.tolerance;

    // Point `c + t (p − c)`.
    let along = |c: &[f64], p: &[f64], t: f64| -> Vec<f64> {
        c.iter().zip(p).map(|(ci, pi)| ci + t * (pi - ci)).collect()
    };

    while !converged && iterations < cfg.max_iterations {
        iterations += 1;
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= n as f64);

        let (f_best, f_second_worst, f_worst) = (simplex[0].1, simplex[n - 1].1, simplex[n].1);
        let xr = along(&centroid, &simplex[n].0, -cfg.reflection);
        let fr = eval(&xr);

        let mut replacement = None;
        if fr < f_best {
            let xe = along(&centroid, &xr, cfg.expansion);
            let fe = eval(&xe);
            replacement = Some(if fe < fr { (xe, fe) } else { (xr, fr) });
        } else if fr < f_second_worst {
            replacement = Some((xr, fr));
        } else if fr < f_worst {
            let xc = along(&centroid, &xr, cfg.contraction);
            let fc = eval(&xc);
            if fc <= fr {
                replacement = Some((xc, fc));
            }
        } else {
            let xcc = along(&centroid, &simplex[n].0, cfg.contraction);
            let fcc = eval(&xcc);
            if fcc < f_worst {
                replacement = Some((xcc, fcc));
            }
        }

        match replacement {
            Some(v) => simplex[n] = v,
            None => {
                let best = simplex[0].0.clone();
                for (x, fx) in simplex.iter_mut().skip(1) {
                    *x = along(&best, x, cfg.shrink);
                    *fx = eval(x);
                }
            }
        }
        order(&mut simplex);
        history.push(simplex[0].1);
        converged = simplex[n].1 - simplex[0].1 < cfg.tolerance;
    }

    let (x, cost) = simplex.swap_remove(0);
    SimplexResult {
        x,
        cost,
        iterations,
        evaluations,
        converged,
        history,
    }
}
