//! Small dense complex solves and Gauss-Legendre rules.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Pivots below this fraction of the largest initial entry are treated as zero.
const PIVOT_RELATIVE_TOLERANCE: f64 = 1e-14;

/// A square complex system `A x = b`, matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseComplexSystem {
    n: usize,
    matrix: Vec<Complex64>,
    rhs: Vec<Complex64>,
}

impl DenseComplexSystem {
    pub fn new(n: usize, matrix: Vec<Complex64>, rhs: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("system dimension must be at least 1".into()));
        }
        if matrix.len() != n * n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                got: matrix.len(),
            });
        }
        if rhs.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: rhs.len(),
            });
        }
        if !matrix.iter().chain(&rhs).all(|z| z.is_finite()) {
            return Err(Error::NonFinite("linear system"));
        }
        Ok(Self { n, matrix, rhs })
    }

    /// An all-zero system to be filled with [`add`](Self::add).
    pub(crate) fn zeros(n: usize) -> Self {
        Self {
            n,
            matrix: vec![Complex64::new(0.0, 0.0); n * n],
            rhs: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub(crate) fn add(&mut self, row: usize, col: usize, value: Complex64) {
        self.matrix[row * self.n + col] += value;
    }

    pub(crate) fn add_rhs(&mut self, row: usize, value: Complex64) {
        self.rhs[row] += value;
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row * self.n + col]
    }

    pub fn rhs(&self) -> &[Complex64] {
        &self.rhs
    }

    /// `‖A x − b‖∞`.
    pub fn residual_norm(&self, x: &[Complex64]) -> f64 {
        (0..self.n)
            .map(|i| {
                let row = &self.matrix[i * self.n..(i + 1) * self.n];
                let ax: Complex64 = row.iter().zip(x).map(|(a, xi)| a * xi).sum();
                (ax - self.rhs[i]).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn solve(&self) -> Result<Vec<Complex64>> {
        solve_dense(self)
    }
}

/// Gaussian elimination with partial pivoting. The input is left untouched.
pub fn solve_dense(system: &DenseComplexSystem) -> Result<Vec<Complex64>> {
    let n = system.n;
    let mut a = system.matrix.clone();
    let mut b = system.rhs.clone();

    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let threshold = PIVOT_RELATIVE_TOLERANCE * scale;

    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, a[r * n + col].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot <= threshold || pivot == 0.0 {
            return Err(Error::SingularMatrix {
                column: col,
                pivot,
                threshold,
            });
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            b.swap(col, pivot_row);
        }
        let inv = a[col * n + col].inv();
        for r in col + 1..n {
            let factor = a[r * n + col] * inv;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            a[r * n + col] = Complex64::new(0.0, 0.0);
            for k in col + 1..n {
                let upper = a[col * n + k];
                a[r * n + k] -= factor * upper;
            }
            let upper_b = b[col];
            b[r] -= factor * upper_b;
        }
    }

    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let tail: Complex64 = (row + 1..n).map(|k| a[row * n + k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row * n + row];
    }
    Ok(x)
}

/// Nodes and weights of an interpolatory quadrature on `(a, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub a: f64,
    pub b: f64,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Sums `w_k f(x_k)` in node order.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// `n`-point Gauss-Legendre rule on `(a, b)`.
///
/// Roots of `P_n` are found by Newton iteration from the Tricomi initial
/// guesses; nodes are returned in ascending order.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::InvalidConfig("quadrature needs at least one node".into()));
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::NonFinite("quadrature interval"));
    }
    if a >= b {
        return Err(Error::InvalidInterval { a, b });
    }

    let mut ref_nodes = vec![0.0; n];
    let mut ref_weights = vec![0.0; n];
    let nf = n as f64;
    // Roots come in ± pairs; solve for the non-negative half.
    for i in 0..n.div_ceil(2) {
        let k = (i + 1) as f64;
        let mut x = (std::f64::consts::PI * (k - 0.25) / (nf + 0.5)).cos()
            * (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() <= 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        ref_nodes[i] = -x;
        ref_nodes[n - 1 - i] = x;
        ref_weights[i] = w;
        ref_weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        ref_nodes[n / 2] = 0.0;
    }

    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    Ok(QuadratureRule {
        nodes: ref_nodes.iter().map(|&t| mid + half * t).collect(),
        weights: ref_weights.iter().map(|&w| half * w).collect(),
        a,
        b,
    })
}

/// Composite Gauss-Legendre rule: `n` nodes spread as evenly as possible over
/// the panels between consecutive `breakpoints`, earlier panels taking the
/// remainder. Nodes come out in ascending order.
pub fn composite_gauss_legendre(n: usize, breakpoints: &[f64]) -> Result<QuadratureRule> {
    let panels = breakpoints.len().saturating_sub(1);
    if panels == 0 {
        return Err(Error::InvalidConfig("composite rule needs at least two breakpoints".into()));
    }
    if n < panels {
        return Err(Error::InvalidConfig(format!(
            "composite rule over {panels} panels needs at least {panels} nodes, got {n}"
        )));
    }
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for (k, w) in breakpoints.windows(2).enumerate() {
        let count = n / panels + usize::from(k < n % panels);
        let panel = gauss_legendre(count, w[0], w[1])?;
        nodes.extend(panel.nodes);
        weights.extend(panel.weights);
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        a: breakpoints[0],
        b: breakpoints[panels],
    })
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = next;
    }
    let d = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, d)
}
