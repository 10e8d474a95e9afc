//! Exact discrete reflection coefficient of a finite PML.
//!
//! The layer occupies `m` cells of width `h` between the Dirichlet wall
//! (node 0) and the interface (node `m`). On the uniform side the field is
//! `e^{-i α̂ (x−H)} + R e^{+i α̂ (x−H)}`, with α̂ the wavenumber that solves the
//! uniform three-point stencil exactly. `R` is therefore free of grid
//! dispersion and measures only what the discretized layer reflects.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::DenseComplexSystem;
use crate::profiles::Profile;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// How the stretching factor between two nodes is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Sampling {
    /// σ at the cell midpoint.
    #[default]
    MidpointValue,
    /// Mean of σ at the two Gauss points of the cell.
    CellAverage2pt,
}

impl Sampling {
    pub fn tag(self) -> &'static str {
        match self {
            Sampling::MidpointValue => "midpoint-value",
            Sampling::CellAverage2pt => "cell-average-2pt",
        }
    }
}

impl fmt::Display for Sampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Sampling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "midpoint-value" => Ok(Sampling::MidpointValue),
            "cell-average-2pt" => Ok(Sampling::CellAverage2pt),
            _ => Err(Error::InvalidConfig(format!(
                "unknown sampling {s:?} (expected midpoint-value or cell-average-2pt)"
            ))),
        }
    }
}

/// Discretization parameters. Lengths in micrometres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lambda0: f64,
    pub n0: f64,
    pub h: f64,
    pub m: usize,
    pub sampling: Sampling,
}

impl Default for GridSpec {
    /// λ₀ = 1 µm, n₀ = 1, h = λ₀/20, five-cell layer.
    fn default() -> Self {
        Self {
            lambda0: 1.0,
            n0: 1.0,
            h: 0.05,
            m: 5,
            sampling: Sampling::MidpointValue,
        }
    }
}

impl GridSpec {
    pub fn new(lambda0: f64, n0: f64, h: f64, m: usize, sampling: Sampling) -> Result<Self> {
        let grid = Self {
            lambda0,
            n0,
            h,
            m,
            sampling,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("lambda0", self.lambda0), ("n0", self.n0), ("h", self.h)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.m == 0 {
            return Err(Error::InvalidConfig("m must be at least 1".into()));
        }
        Ok(())
    }

    pub fn k0(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.lambda0
    }

    /// Layer thickness `H − D = m h`.
    pub fn thickness(&self) -> f64 {
        self.m as f64 * self.h
    }
}

/// One propagating plane wave hitting the layer.
///
/// `theta` is measured from the interface plane, so θ → 0 is grazing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Incidence {
    pub theta: f64,
    /// Transverse (normal to the layer) wavenumber `k₀ n₀ sin θ`.
    pub alpha: f64,
    /// Longitudinal wavenumber `k₀ n₀ cos θ`.
    pub beta: f64,
    pub alpha_hat: f64,
}

impl Incidence {
    pub fn new(theta: f64, grid: &GridSpec) -> Result<Self> {
        if !(theta > 0.0 && theta <= FRAC_PI_2) {
            return Err(Error::Domain {
                what: "theta",
                value: theta,
                domain: "(0, pi/2]",
            });
        }
        let k = grid.k0() * grid.n0;
        let alpha = k * theta.sin();
        Ok(Self {
            theta,
            alpha,
            beta: k * theta.cos(),
            alpha_hat: discrete_wavenumber(alpha, grid.h)?,
        })
    }
}

/// Wavenumber `α̂` with `(2 − 2cos(α̂h))/h² = α²`.
pub fn discrete_wavenumber(alpha: f64, h: f64) -> Result<f64> {
    let arg = alpha * h / 2.0;
    if arg.is_nan() || arg.abs() > 1.0 {
        return Err(Error::UnresolvableWave(arg));
    }
    Ok(2.0 / h * arg.asin())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionResult {
    pub r: Complex64,
    pub abs_r: f64,
    pub theta: f64,
}

impl ReflectionResult {
    fn new(r: Complex64, theta: f64) -> Self {
        Self {
            r,
            abs_r: r.norm(),
            theta,
        }
    }
}

/// Stretching factors of one profile on one grid. They do not depend on the
/// angle, so a sweep builds this once.
#[derive(Debug, Clone)]
pub struct LayerStencil {
    grid: GridSpec,
    /// `ŝ_j` for nodes `j = 0..=m`.
    nodal: Vec<Complex64>,
    /// `ŝ_{j+1/2}` for cells `j = 0..m`.
    half: Vec<Complex64>,
}

impl LayerStencil {
    pub fn new(profile: &Profile, grid: &GridSpec) -> Result<Self> {
        grid.validate()?;
        let m = grid.m;
        let mf = m as f64;
        let stretch = |tau: f64| -> Result<Complex64> { Ok(Complex64::new(1.0, profile.sigma(tau)?)) };

        // Node 0 is the wall and never carries an equation.
        let mut nodal = vec![ONE; m + 1];
        for (j, s) in nodal.iter_mut().enumerate().skip(1) {
            *s = stretch((m - j) as f64 / mf)?;
        }

        let gauss = 0.5 / 3f64.sqrt();
        let mut half = Vec::with_capacity(m);
        for j in 0..m {
            let tau_mid = (mf - j as f64 - 0.5) / mf;
            let s = match grid.sampling {
                Sampling::MidpointValue => stretch(tau_mid)?,
                Sampling::CellAverage2pt => {
                    let lo = profile.sigma(tau_mid - gauss / mf)?;
                    let hi = profile.sigma(tau_mid + gauss / mf)?;
                    Complex64::new(1.0, 0.5 * (lo + hi))
                }
            };
            half.push(s);
        }
        Ok(Self { grid: *grid, nodal, half })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn half_at(&self, j: usize) -> Complex64 {
        self.half.get(j).copied().unwrap_or(ONE)
    }

    /// Off-diagonal couplings of row `j` scaled by `h²`: `(to j−1, to j+1)`.
    fn couplings(&self, j: usize) -> (Complex64, Complex64) {
        let sj = self.nodal[j];
        ((sj * self.half_at(j - 1)).inv(), (sj * self.half_at(j)).inv())
    }

    /// Bordered system in `(u_1, …, u_m, R)` with the ansatz phase referenced
    /// `shift_cells` cells outward from the interface.
    pub fn assemble_with_reference(&self, inc: &Incidence, shift_cells: f64) -> Result<DenseComplexSystem> {
        let m = self.grid.m;
        let h = self.grid.h;
        let n = m + 1;
        let r_col = m;
        let ah2 = inc.alpha * inc.alpha * h * h;
        let plane = |offset_cells: f64| {
            let phase = inc.alpha_hat * (offset_cells - shift_cells) * h;
            (Complex64::new(0.0, -phase).exp(), Complex64::new(0.0, phase).exp())
        };

        let mut sys = DenseComplexSystem::zeros(n);
        for j in 1..=m {
            let row = j - 1;
            let (cm, cp) = self.couplings(j);
            sys.add(row, row, ah2 - cm - cp);
            if j > 1 {
                sys.add(row, row - 1, cm);
            }
            if j < m {
                sys.add(row, row + 1, cp);
            } else {
                // u_{m+1} from the ansatz one cell past the interface.
                let (incident, reflected) = plane(1.0);
                sys.add(row, r_col, cp * reflected);
                sys.add_rhs(row, -cp * incident);
            }
        }
        let (incident, reflected) = plane(0.0);
        sys.add(m, m - 1, ONE);
        sys.add(m, r_col, -reflected);
        sys.add_rhs(m, incident);
        Ok(sys)
    }

    pub fn assemble(&self, inc: &Incidence) -> Result<DenseComplexSystem> {
        self.assemble_with_reference(inc, 0.0)
    }

    pub fn reflection(&self, theta: f64) -> Result<ReflectionResult> {
        self.reflection_with_reference(theta, 0.0)
    }

    pub fn reflection_with_reference(&self, theta: f64, shift_cells: f64) -> Result<ReflectionResult> {
        let inc = Incidence::new(theta, &self.grid)?;
        let x = self.assemble_with_reference(&inc, shift_cells)?.solve()?;
        Ok(ReflectionResult::new(x[self.grid.m], theta))
    }

    /// Shooting from the wall: `u_0 = 0`, `u_1 = 1`, march the row recurrence
    /// to `u_{m+1}`, then split `(u_m, u_{m+1})` into incident and reflected
    /// plane waves.
    pub fn reflection_by_shooting(&self, theta: f64) -> Result<ReflectionResult> {
        let inc = Incidence::new(theta, &self.grid)?;
        let m = self.grid.m;
        let h = self.grid.h;
        let ah2 = inc.alpha * inc.alpha * h * h;

        let mut prev = Complex64::new(0.0, 0.0);
        let mut cur = ONE;
        for j in 1..=m {
            // (u_{j+1} − u_j)/ŝ_{j+1/2} = (u_j − u_{j−1})/ŝ_{j−1/2} − h² α² ŝ_j u_j
            let flux = (cur - prev) / self.half_at(j - 1) - ah2 * self.nodal[j] * cur;
            let next = cur + self.half_at(j) * flux;
            prev = cur;
            cur = next;
        }
        let (u_m, u_next) = (prev, cur);

        let phi = inc.alpha_hat * h;
        let det = 2.0 * phi.sin();
        if det.abs() < 1e-12 {
            return Err(Error::DegenerateBasis(phi));
        }
        // A + B = u_m, A e^{-iφ} + B e^{iφ} = u_{m+1}
        let e_minus = Complex64::new(0.0, -phi).exp();
        let reflected = (u_next - u_m * e_minus) / Complex64::new(0.0, det);
        let incident = u_m - reflected;
        Ok(ReflectionResult::new(reflected / incident, theta))
    }
}

pub fn assemble_system(profile: &Profile, grid: &GridSpec, inc: &Incidence) -> Result<DenseComplexSystem> {
    LayerStencil::new(profile, grid)?.assemble(inc)
}

/// `R(θ)` from the bordered linear system.
pub fn reflection(profile: &Profile, grid: &GridSpec, theta: f64) -> Result<ReflectionResult> {
    LayerStencil::new(profile, grid)?.reflection(theta)
}

/// `R(θ)` by transfer recurrence; independent of the linear solver.
pub fn reflection_oracle(profile: &Profile, grid: &GridSpec, theta: f64) -> Result<ReflectionResult> {
    LayerStencil::new(profile, grid)?.reflection_by_shooting(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn grid() -> GridSpec {
        GridSpec::default()
    }

    #[test]
    fn zero_alpha_has_zero_discrete_wavenumber() {
        assert_eq!(discrete_wavenumber(0.0, 0.05).unwrap(), 0.0);
    }

    #[test]
    fn discrete_wavenumber_series() {
        // asin(z) = z + z³/6 + …  ⇒  α̂ = α (1 + (αh)²/24 + O(h⁴))
        let alpha: f64 = 2.0;
        for &h in &[1e-2, 1e-3] {
            let series = alpha * (1.0 + (alpha * h).powi(2) / 24.0);
            let got = discrete_wavenumber(alpha, h).unwrap();
            assert!(((got - series) / alpha).abs() < (alpha * h).powi(4));
        }
    }

    #[test]
    fn discrete_wavenumber_for_default_grid() {
        let h = 0.05;
        let alpha = 2.0 * PI;
        let ah = discrete_wavenumber(alpha, h).unwrap();
        assert!((ah - 40.0 * (0.05 * PI).asin()).abs() < 1e-14);
        assert!((ah - 6.309_315_050_178_252).abs() < 1e-12);
        let residual = (2.0 - 2.0 * (ah * h).cos()) / (h * h);
        assert!(((residual - alpha * alpha) / (alpha * alpha)).abs() < 1e-12);
    }

    #[test]
    fn unresolvable_wave() {
        assert!(matches!(discrete_wavenumber(50.0, 0.05), Err(Error::UnresolvableWave(_))));
    }

    #[test]
    fn incidence_wavenumbers() {
        let g = grid();
        let inc = Incidence::new(0.7, &g).unwrap();
        let k2 = (g.k0() * g.n0).powi(2);
        assert!(((inc.alpha.powi(2) + inc.beta.powi(2) - k2) / k2).abs() < 1e-12);
        assert!(Incidence::new(0.0, &g).is_err());
        assert!(Incidence::new(FRAC_PI_2 + 1e-9, &g).is_err());
        assert!(Incidence::new(FRAC_PI_2, &g).is_ok());
    }

    #[test]
    fn lossless_layer_reflects_totally() {
        let g = grid();
        let zero = Profile::zero();
        for k in 1..=50 {
            let theta = FRAC_PI_2 * k as f64 / 50.0;
            let r = reflection(&zero, &g, theta).unwrap();
            assert!((r.abs_r - 1.0).abs() < 1e-10, "theta={theta} |R|={}", r.abs_r);
        }
    }

    #[test]
    fn single_cell_layer_matches_hand_elimination() {
        // m = 1: unknowns u_1 = 1 + R. With φ = α̂h and c = 1 + 1/ŝ_{1/2} − α²h²,
        // the interior row gives R (e^{iφ} − c) = c − e^{−iφ}.
        for sampling in [Sampling::MidpointValue, Sampling::CellAverage2pt] {
            let g = GridSpec::new(1.0, 1.0, 0.05, 1, sampling).unwrap();
            let profile = Profile::power(2, 40.0).unwrap();
            let theta: f64 = 0.9;
            let sigma_half = match sampling {
                Sampling::MidpointValue => 40.0 * 0.25,
                Sampling::CellAverage2pt => {
                    let d = 0.5 / 3f64.sqrt();
                    0.5 * 40.0 * ((0.5 - d).powi(2) + (0.5 + d).powi(2))
                }
            };
            let alpha = 2.0 * PI * theta.sin();
            let phi = 2.0 * (alpha * 0.05 / 2.0).asin();
            let c = ONE + Complex64::new(1.0, sigma_half).inv() - alpha * alpha * 0.0025;
            let e = Complex64::new(0.0, phi).exp();
            let expected = (c - e.inv()) / (e - c);

            let solved = reflection(&profile, &g, theta).unwrap().r;
            let shot = reflection_oracle(&profile, &g, theta).unwrap().r;
            assert!((solved - expected).norm() < 1e-12, "{sampling}");
            assert!((shot - expected).norm() < 1e-12, "{sampling}");
        }
    }

    #[test]
    fn table_one_p2_system_is_well_posed() {
        let profile = Profile::rational_plus(2, vec![74.2]).unwrap();
        let g = grid();
        let inc = Incidence::new(FRAC_PI_4, &g).unwrap();
        let sys = assemble_system(&profile, &g, &inc).unwrap();
        assert_eq!(sys.dimension(), 6);
        let x = sys.solve().unwrap();
        assert!(sys.residual_norm(&x) < 1e-12);
        // No row is empty and the diagonal carries weight.
        for i in 0..6 {
            let row_max = (0..6).map(|k| sys.entry(i, k).norm()).fold(0.0, f64::max);
            assert!(row_max > 1e-8);
        }
    }

    #[test]
    fn interface_row_is_plane_wave_matching() {
        let g = grid();
        let inc = Incidence::new(1.0, &g).unwrap();
        let sys = assemble_system(&Profile::power(3, 10.0).unwrap(), &g, &inc).unwrap();
        assert_eq!(sys.entry(5, 4), ONE);
        assert_eq!(sys.entry(5, 5), -ONE);
        assert_eq!(sys.rhs()[5], ONE);
    }

    #[test]
    fn oracle_agrees_on_table_two_profile() {
        let profile = Profile::rational_minus(5, 23.6, 35.9).unwrap();
        let g = grid();
        for k in 1..=50 {
            let theta = FRAC_PI_2 * k as f64 / 50.0;
            let a = reflection(&profile, &g, theta).unwrap().r;
            let b = reflection_oracle(&profile, &g, theta).unwrap().r;
            assert!((a - b).norm() <= 1e-10 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn reference_shift_changes_phase_only() {
        let profile = Profile::rational_minus(8, 23.3, 121.3).unwrap();
        let stencil = LayerStencil::new(&profile, &grid()).unwrap();
        for &theta in &[0.05, 0.4, 1.2, FRAC_PI_2] {
            let base = stencil.reflection(theta).unwrap();
            let shifted = stencil.reflection_with_reference(theta, 1.0).unwrap();
            assert!((base.abs_r - shifted.abs_r).abs() < 1e-12);
        }
        let base = stencil.reflection(0.8).unwrap();
        let shifted = stencil.reflection_with_reference(0.8, 1.0).unwrap();
        assert!((base.r.arg() - shifted.r.arg()).abs() > 1e-3);
    }

    #[test]
    fn absorbing_layer_reflects_less_than_wall() {
        let r = reflection(&Profile::power(3, 100.4).unwrap(), &grid(), FRAC_PI_2).unwrap();
        assert!(r.abs_r < 0.05);
    }

    #[test]
    fn sampling_modes_differ_on_nonlinear_profile() {
        let profile = Profile::power(3, 100.4).unwrap();
        let mid = reflection(&profile, &grid(), 1.0).unwrap();
        let avg_grid = GridSpec {
            sampling: Sampling::CellAverage2pt,
            ..grid()
        };
        let avg = reflection(&profile, &avg_grid, 1.0).unwrap();
        assert!((mid.r - avg.r).norm() > 1e-6);
    }

    #[test]
    fn sampling_round_trips_through_text() {
        for s in [Sampling::MidpointValue, Sampling::CellAverage2pt] {
            assert_eq!(s.to_string().parse::<Sampling>().unwrap(), s);
        }
        assert!("midpoint".parse::<Sampling>().is_err());
    }

    #[test]
    fn invalid_grids_rejected() {
        assert!(GridSpec::new(1.0, 1.0, 0.0, 5, Sampling::MidpointValue).is_err());
        assert!(GridSpec::new(1.0, 1.0, 0.05, 0, Sampling::MidpointValue).is_err());
        assert!(GridSpec::new(-1.0, 1.0, 0.05, 5, Sampling::MidpointValue).is_err());
    }
}
