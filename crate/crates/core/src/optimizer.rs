//! Nelder-Mead simplex search.
//!
//! Deterministic throughout: vertices are ordered with a stable sort on the
//! objective value, so ties keep their previous order.

use std::cell::Cell;

use crate::error::{Error, Result};
use crate::objective::{penalized_objective, ObjectiveSpec};
use crate::profiles::{CoefficientVector, Family};

/// Search coefficients and stopping rule.
///
/// A run converges once every vertex value is within `tol_f (1 + |f_best|)`
/// of the best and every vertex coordinate is within `tol_x` of the best
/// vertex. The coordinate test is absolute: coefficients in the hundreds
/// would otherwise stop the search while the small ones are still moving.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexConfig {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    pub max_evals: usize,
    pub tol_x: f64,
    pub tol_f: f64,
}

impl Default for SimplexConfig {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            max_evals: 2000,
            tol_x: 1e-4,
            tol_f: 1e-4,
        }
    }
}

impl SimplexConfig {
    pub fn validate(&self, dim: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.reflection.is_nan() || self.reflection <= 0.0 {
            return bad(format!("reflection coefficient must be positive, got {}", self.reflection));
        }
        if !(self.expansion > 1.0 && self.expansion > self.reflection) {
            return bad(format!("expansion coefficient must exceed max(1, reflection), got {}", self.expansion));
        }
        if !(self.contraction > 0.0 && self.contraction < 1.0) {
            return bad(format!("contraction coefficient must lie in (0, 1), got {}", self.contraction));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad(format!("shrink coefficient must lie in (0, 1), got {}", self.shrink));
        }
        if self.max_evals < dim + 1 {
            return bad(format!("max_evals must be at least {} for dimension {dim}", dim + 1));
        }
        if !(self.tol_x >= 0.0 && self.tol_f >= 0.0) {
            return bad("tolerances must be non-negative".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    Converged,
    MaxEvals,
}

impl Termination {
    pub fn tag(self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxEvals => "max_evals",
        }
    }
}

/// Outcome of [`nelder_mead`] on a plain vector objective.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evals: usize,
    pub termination: Termination,
    /// Best simplex value after the initial evaluation and after every iteration.
    pub best_history: Vec<f64>,
}

/// Vertex 0 is `x0`; vertex `k` bumps coordinate `k−1` by 5%, or by 0.00025
/// when that coordinate is zero.
pub fn initial_simplex(x0: &[f64]) -> Vec<Vec<f64>> {
    let mut simplex = vec![x0.to_vec()];
    for k in 0..x0.len() {
        let mut v = x0.to_vec();
        v[k] = if v[k] == 0.0 { 0.00025 } else { v[k] * 1.05 };
        simplex.push(v);
    }
    simplex
}

struct Vertex {
    x: Vec<f64>,
    f: f64,
}

fn affine(base: &[f64], toward: &[f64], t: f64) -> Vec<f64> {
    // base + t (toward − base)
    base.iter().zip(toward).map(|(b, w)| b + t * (w - b)).collect()
}

/// Pulls every vertex except the first halfway (by `factor`) toward it.
fn shrink_toward_best(simplex: &mut [Vertex], factor: f64) {
    let (best, rest) = simplex.split_first_mut().expect("simplex is never empty");
    for v in rest {
        v.x = affine(&best.x, &v.x, factor);
    }
}

fn converged(simplex: &[Vertex], config: &SimplexConfig) -> bool {
    let best = &simplex[0];
    let f_spread = simplex.iter().map(|v| (v.f - best.f).abs()).fold(0.0, f64::max);
    let x_spread = simplex
        .iter()
        .flat_map(|v| v.x.iter().zip(&best.x).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    f_spread < config.tol_f * (1.0 + best.f.abs()) && x_spread < config.tol_x
}

pub fn nelder_mead<F>(mut f: F, x0: &[f64], config: &SimplexConfig) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    if n == 0 {
        return Err(Error::InvalidConfig("cannot minimize over a zero-dimensional space".into()));
    }
    config.validate(n)?;

    let evals = Cell::new(0usize);
    let mut eval = |x: &[f64]| {
        evals.set(evals.get() + 1);
        f(x)
    };

    let mut simplex: Vec<Vertex> = initial_simplex(x0)
        .into_iter()
        .map(|x| {
            let fx = eval(&x);
            Vertex { x, f: fx }
        })
        .collect();
    simplex.sort_by(|a, b| a.f.total_cmp(&b.f));
    let mut best_history = vec![simplex[0].f];
    let mut iterations = 0;

    let termination = loop {
        if converged(&simplex, config) {
            break Termination::Converged;
        }
        if evals.get() >= config.max_evals {
            break Termination::MaxEvals;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(&v.x) {
                *c += x / n as f64;
            }
        }
        let f_best = simplex[0].f;
        let f_second_worst = simplex[n - 1].f;
        let f_worst = simplex[n].f;

        let xr = affine(&centroid, &simplex[n].x, -config.reflection);
        let fr = eval(&xr);

        let mut shrink = false;
        if fr < f_best {
            let xe = affine(&centroid, &xr, config.expansion / config.reflection);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { Vertex { x: xe, f: fe } } else { Vertex { x: xr, f: fr } };
        } else if fr < f_second_worst {
            simplex[n] = Vertex { x: xr, f: fr };
        } else if fr < f_worst {
            let xc = affine(&centroid, &xr, config.contraction);
            let fc = eval(&xc);
            if fc <= fr {
                simplex[n] = Vertex { x: xc, f: fc };
            } else {
                shrink = true;
            }
        } else {
            let xc = affine(&centroid, &simplex[n].x, config.contraction);
            let fc = eval(&xc);
            if fc < f_worst {
                simplex[n] = Vertex { x: xc, f: fc };
            } else {
                shrink = true;
            }
        }

        if shrink {
            shrink_toward_best(&mut simplex, config.shrink);
            for v in &mut simplex[1..] {
                v.f = eval(&v.x);
            }
        }
        simplex.sort_by(|a, b| a.f.total_cmp(&b.f));
        best_history.push(simplex[0].f);
    };

    let best = simplex.swap_remove(0);
    Ok(Minimum {
        point: best.x,
        value: best.f,
        iterations,
        evals: evals.get(),
        termination,
        best_history,
    })
}

/// Starting point `(0, …, 0, 50)` in the family's coefficient space.
pub fn default_start(family: Family, p: u32) -> Vec<f64> {
    let mut x0 = vec![0.0; family.dimension(p)];
    if let Some(last) = x0.last_mut() {
        *last = 50.0;
    }
    x0
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    /// Coefficients with absolute values applied.
    pub best_point: CoefficientVector,
    pub best_value: f64,
    pub iterations: usize,
    pub evals: usize,
    pub termination: Termination,
}

/// Minimizes the average reflectivity over one profile family at order `p`.
pub fn optimize_profile(
    family: Family,
    p: u32,
    x0: &[f64],
    spec: &ObjectiveSpec,
    config: &SimplexConfig,
) -> Result<OptResult> {
    if p < 2 {
        return Err(Error::InvalidConfig(format!("profile order p must be at least 2, got {p}")));
    }
    if x0.len() != family.dimension(p) {
        return Err(Error::LengthMismatch {
            expected: family.dimension(p),
            got: x0.len(),
        });
    }
    let min = nelder_mead(penalized_objective(family, p, spec), x0, config)?;
    Ok(OptResult {
        best_point: CoefficientVector::new(family, p, min.point)?.abs(),
        best_value: min.value,
        iterations: min.iterations,
        evals: min.evals,
        termination: min.termination,
    })
}
