//! Angle-averaged reflectivity and the datasets behind the reflectivity plots.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{composite_gauss_legendre, QuadratureRule};
use crate::profiles::{CoefficientVector, Family, Profile};
use crate::reflectivity::{GridSpec, LayerStencil};

pub const DEFAULT_QUAD_NODES: usize = 100;

/// Panel edges of the angular rule, in radians. Optimized layers put several
/// near-zeros of |R| below 0.3 rad and a steep rise toward grazing, so the
/// panels shrink geometrically (ratio 4) toward θ = 0.
pub const ANGLE_BREAKPOINTS: [f64; 6] = [0.0, 0.01, 0.04, 0.16, 0.64, FRAC_PI_2];

/// Objective value substituted when a profile cannot be evaluated.
pub const PENALTY: f64 = 1e6;

/// Grid plus the angular quadrature on `(0, π/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveSpec {
    pub grid: GridSpec,
    pub quad: QuadratureRule,
}

impl ObjectiveSpec {
    /// Composite Gauss-Legendre over [`ANGLE_BREAKPOINTS`] with `quad_nodes`
    /// nodes in total.
    pub fn new(grid: GridSpec, quad_nodes: usize) -> Result<Self> {
        Self::with_rule(grid, composite_gauss_legendre(quad_nodes, &ANGLE_BREAKPOINTS)?)
    }

    pub fn with_rule(grid: GridSpec, quad: QuadratureRule) -> Result<Self> {
        grid.validate()?;
        if quad.is_empty() || !quad.nodes.iter().all(|&t| t > 0.0 && t < FRAC_PI_2) {
            return Err(Error::InvalidConfig("angular nodes must lie strictly inside (0, pi/2)".into()));
        }
        Ok(Self { grid, quad })
    }
}

impl Default for ObjectiveSpec {
    fn default() -> Self {
        Self::new(GridSpec::default(), DEFAULT_QUAD_NODES).expect("default objective is valid")
    }
}

/// `|R(θ_k)|` at every quadrature node, in node order.
pub fn reflectivity_at_nodes(profile: &Profile, spec: &ObjectiveSpec) -> Result<Vec<f64>> {
    let stencil = LayerStencil::new(profile, &spec.grid)?;
    spec.quad
        .nodes
        .iter()
        .map(|&theta| stencil.reflection(theta).map(|r| r.abs_r))
        .collect()
}

/// `(2/π) ∫_0^{π/2} |R(θ)| dθ`.
pub fn average_reflectivity(profile: &Profile, spec: &ObjectiveSpec) -> Result<f64> {
    let samples = reflectivity_at_nodes(profile, spec)?;
    let integral: f64 = samples.iter().zip(&spec.quad.weights).map(|(r, w)| w * r).sum();
    Ok(integral / FRAC_PI_2)
}

/// Objective over raw coefficient vectors of one family. Evaluation failures
/// map to [`PENALTY`].
pub fn penalized_objective(family: Family, p: u32, spec: &ObjectiveSpec) -> impl Fn(&[f64]) -> f64 + '_ {
    move |x: &[f64]| {
        CoefficientVector::new(family, p, x.to_vec())
            .and_then(|v| Profile::from_vector(&v))
            .and_then(|profile| average_reflectivity(&profile, spec))
            .unwrap_or(PENALTY)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    /// θ / (π/2)
    pub theta_frac: f64,
    pub abs_r: f64,
}

/// Evenly spaced fractions from `lo` to `hi` inclusive.
pub fn sweep_fractions(n_points: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
    if n_points < 2 {
        return Err(Error::InvalidConfig("a sweep needs at least two points".into()));
    }
    if !(lo > 0.0 && lo < hi && hi <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "sweep range must satisfy 0 < min < max <= 1, got ({lo}, {hi})"
        )));
    }
    let step = (hi - lo) / (n_points - 1) as f64;
    Ok((0..n_points)
        .map(|i| if i == n_points - 1 { hi } else { lo + step * i as f64 })
        .collect())
}

pub fn theta_sweep(
    profile: &Profile,
    grid: &GridSpec,
    n_points: usize,
    theta_min_frac: f64,
    theta_max_frac: f64,
) -> Result<Vec<SweepRow>> {
    let stencil = LayerStencil::new(profile, grid)?;
    sweep_fractions(n_points, theta_min_frac, theta_max_frac)?
        .into_iter()
        .map(|theta_frac| {
            let r = stencil.reflection(theta_frac * FRAC_PI_2)?;
            Ok(SweepRow {
                theta_frac,
                abs_r: r.abs_r,
            })
        })
        .collect()
}

/// Inclusive, evenly spaced coefficient axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanAxis {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl ScanAxis {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(Error::InvalidConfig("scan axes need at least two steps".into()));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidInterval { a: lo, b: hi });
        }
        Ok(Self { lo, hi, steps })
    }

    /// Axis values, with `extra` merged in when it lies inside the range.
    pub fn points(&self, extra: Option<f64>) -> Vec<f64> {
        let step = (self.hi - self.lo) / (self.steps - 1) as f64;
        let mut pts: Vec<f64> = (0..self.steps)
            .map(|i| if i == self.steps - 1 { self.hi } else { self.lo + step * i as f64 })
            .collect();
        if let Some(x) = extra {
            if (self.lo..=self.hi).contains(&x) && !pts.contains(&x) {
                let at = pts.partition_point(|&v| v < x);
                pts.insert(at, x);
            }
        }
        pts
    }
}

/// Average reflectivity over a rectangle of `(a_2, a_p)` values. `values` is
/// row-major with `a2` as the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanGrid {
    pub p: u32,
    pub a2: Vec<f64>,
    pub ap: Vec<f64>,
    pub values: Vec<f64>,
}

impl ScanGrid {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ap.len() + j]
    }

    /// `(a2, ap, value)` of the smallest cell.
    pub fn minimum(&self) -> (f64, f64, f64) {
        let (idx, &v) = self
            .values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("scan grid is never empty");
        (self.a2[idx / self.ap.len()], self.ap[idx % self.ap.len()], v)
    }

    pub fn find(&self, a2: f64, ap: f64) -> Option<f64> {
        let i = self.a2.iter().position(|&v| v == a2)?;
        let j = self.ap.iter().position(|&v| v == ap)?;
        Some(self.at(i, j))
    }

    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(idx, &v)| (self.a2[idx / self.ap.len()], self.ap[idx % self.ap.len()], v))
    }
}

/// Scans the two-term `(|a_2| τ² + |a_p| τ^p)/(1 − τ)` family. `include`
/// forces a specific point onto both axes when it lies in range.
pub fn scan2d(
    p: u32,
    a2_axis: &ScanAxis,
    ap_axis: &ScanAxis,
    include: Option<(f64, f64)>,
    spec: &ObjectiveSpec,
) -> Result<ScanGrid> {
    if p < 3 {
        return Err(Error::InvalidConfig("scan2d needs the two-coefficient family (p >= 3)".into()));
    }
    let a2 = a2_axis.points(include.map(|(x, _)| x));
    let ap = ap_axis.points(include.map(|(_, y)| y));
    let cols = ap.len();
    let values = (0..a2.len() * cols)
        .into_par_iter()
        .map(|idx| {
            let profile = Profile::rational_minus(p, a2[idx / cols], ap[idx % cols])?;
            average_reflectivity(&profile, spec)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ScanGrid { p, a2, ap, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn within(value: f64, target: f64, rel: f64) -> bool {
        ((value - target) / target).abs() <= rel
    }

    #[test]
    fn rule_spans_quarter_period() {
        let spec = ObjectiveSpec::default();
        assert_eq!(spec.quad.len(), DEFAULT_QUAD_NODES);
        let total: f64 = spec.quad.weights.iter().sum();
        assert!((total - FRAC_PI_2).abs() < 1e-13);
        assert!(ObjectiveSpec::new(GridSpec::default(), 3).is_err());
        let plain = crate::numerics::gauss_legendre(100, 0.0, FRAC_PI_2).unwrap();
        assert!(ObjectiveSpec::with_rule(GridSpec::default(), plain).is_ok());
        let bad = crate::numerics::gauss_legendre(4, 0.0, 2.0).unwrap();
        assert!(ObjectiveSpec::with_rule(GridSpec::default(), bad).is_err());
    }

    #[test]
    fn lossless_average_is_one() {
        let v = average_reflectivity(&Profile::zero(), &ObjectiveSpec::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn baseline_power_profile() {
        let v = average_reflectivity(&Profile::power(3, 100.4).unwrap(), &ObjectiveSpec::default()).unwrap();
        assert!(within(v, 0.013, 0.15), "{v}");
    }

    #[test]
    fn two_term_profile_p5() {
        let v = average_reflectivity(
            &Profile::rational_minus(5, 23.6, 35.9).unwrap(),
            &ObjectiveSpec::default(),
        )
        .unwrap();
        assert!(within(v, 0.0047, 0.15), "{v}");
    }

    #[test]
    fn average_bounded_by_node_extremes() {
        let spec = ObjectiveSpec::default();
        for profile in [
            Profile::power(3, 100.4).unwrap(),
            Profile::rational_minus(8, 23.3, 121.3).unwrap(),
            Profile::legacy(80.0).unwrap(),
        ] {
            let samples = reflectivity_at_nodes(&profile, &spec).unwrap();
            let v = average_reflectivity(&profile, &spec).unwrap();
            let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = samples.iter().cloned().fold(0.0, f64::max);
            assert!(lo <= v && v <= hi);
        }
    }

    #[test]
    fn evaluation_is_bit_stable() {
        let spec = ObjectiveSpec::default();
        let profile = Profile::rational_plus(4, vec![57.1, 0.0, 222.9]).unwrap();
        let a = average_reflectivity(&profile, &spec).unwrap();
        let b = average_reflectivity(&profile, &spec).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn penalty_on_bad_vector_length() {
        let spec = ObjectiveSpec::default();
        let f = penalized_objective(Family::RationalPlus, 4, &spec);
        assert_eq!(f(&[1.0, 2.0]), PENALTY);
        assert!(f(&[57.1, 0.0, 222.9]) < 0.02);
    }

    #[test]
    fn lossless_sweep_is_flat() {
        let rows = theta_sweep(&Profile::zero(), &GridSpec::default(), 25, 0.01, 1.0).unwrap();
        assert_eq!(rows.len(), 25);
        assert_eq!(rows[0].theta_frac, 0.01);
        assert_eq!(rows[24].theta_frac, 1.0);
        assert!(rows.windows(2).all(|w| w[0].theta_frac < w[1].theta_frac));
        assert!(rows.iter().all(|r| (r.abs_r - 1.0).abs() < 1e-10));
    }

    #[test]
    fn sweep_rejects_bad_ranges() {
        let g = GridSpec::default();
        let z = Profile::zero();
        assert!(theta_sweep(&z, &g, 1, 0.1, 1.0).is_err());
        assert!(theta_sweep(&z, &g, 10, 0.0, 1.0).is_err());
        assert!(theta_sweep(&z, &g, 10, 0.5, 0.4).is_err());
        assert!(theta_sweep(&z, &g, 10, 0.5, 1.1).is_err());
    }

    #[test]
    fn axis_includes_requested_point() {
        let axis = ScanAxis::new(0.0, 50.0, 11).unwrap();
        let pts = axis.points(Some(23.3));
        assert_eq!(pts.len(), 12);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        assert!(pts.contains(&23.3));
        assert_eq!(axis.points(Some(20.0)).len(), 11);
        assert_eq!(axis.points(Some(60.0)).len(), 11);
    }

    #[test]
    fn scan_corner_and_symmetry() {
        let spec = ObjectiveSpec::new(GridSpec::default(), 40).unwrap();
        let pos = scan2d(
            8,
            &ScanAxis::new(0.0, 30.0, 3).unwrap(),
            &ScanAxis::new(0.0, 150.0, 3).unwrap(),
            None,
            &spec,
        )
        .unwrap();
        assert!((pos.at(0, 0) - 1.0).abs() < 1e-9);
        let neg = scan2d(
            8,
            &ScanAxis::new(-30.0, 0.0, 3).unwrap(),
            &ScanAxis::new(-150.0, 0.0, 3).unwrap(),
            None,
            &spec,
        )
        .unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(pos.at(i, j), neg.at(2 - i, 2 - j));
            }
        }
    }

    #[test]
    fn scan_rejects_single_coefficient_family() {
        let axis = ScanAxis::new(0.0, 1.0, 2).unwrap();
        assert!(scan2d(2, &axis, &axis, None, &ObjectiveSpec::default()).is_err());
    }
}
