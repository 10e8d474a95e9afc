//! Published optima for the rational profile families, used as comparison
//! targets when regenerating the tables.

use crate::profiles::Profile;

/// Optimal power profile `S τ³` on the default grid and its average reflectivity.
pub const BASELINE_POWER_P: u32 = 3;
pub const BASELINE_POWER_S: f64 = 100.4;
pub const BASELINE_AVG_R: f64 = 0.013;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalPlusRow {
    pub p: u32,
    /// `a_2 … a_p`
    pub coeffs: &'static [f64],
    pub iterations: u32,
    /// The run stopped at the evaluation cap.
    pub capped: bool,
    pub avg_r: f64,
}

impl RationalPlusRow {
    pub fn profile(&self) -> Profile {
        Profile::rational_plus(self.p, self.coeffs.to_vec()).expect("published row is well formed")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalMinusRow {
    pub p: u32,
    pub a2: f64,
    /// Absent for `p = 2`.
    pub ap: Option<f64>,
    pub iterations: u32,
    pub avg_r: f64,
}

impl RationalMinusRow {
    pub fn profile(&self) -> Profile {
        Profile::rational_minus(self.p, self.a2, self.ap.unwrap_or(0.0)).expect("published row is well formed")
    }
}

const fn rp(p: u32, coeffs: &'static [f64], iterations: u32, capped: bool, avg_r: f64) -> RationalPlusRow {
    RationalPlusRow {
        p,
        coeffs,
        iterations,
        capped,
        avg_r,
    }
}

const fn rm(p: u32, a2: f64, ap: Option<f64>, iterations: u32, avg_r: f64) -> RationalMinusRow {
    RationalMinusRow {
        p,
        a2,
        ap,
        iterations,
        avg_r,
    }
}

/// `(Σ |a_k| τ^k)/(1 + τ)`, p = 2..12.
pub const RATIONAL_PLUS: [RationalPlusRow; 11] = [
    rp(2, &[74.2], 21, false, 0.019),
    rp(3, &[38.2, 108.7], 103, false, 0.0131),
    rp(4, &[57.1, 0.0, 222.9], 419, false, 0.009),
    rp(5, &[61.8, 0.0, 2.4, 509.7], 637, false, 0.0058),
    rp(6, &[59.3, 0.0, 29.0, 48.8, 947.8], 1209, true, 0.0044),
    rp(7, &[49.9, 16.2, 51.0, 24.2, 11.1, 1358.0], 741, false, 0.0039),
    rp(8, &[39.8, 35.7, 36.3, 9.8, 12.4, 46.2, 1615.4], 959, false, 0.0035),
    rp(9, &[39.2, 33.0, 40.1, 62.7, 64.1, 13.1, 14.9, 2326.0], 1246, true, 0.0034),
    rp(10, &[40.9, 21.5, 35.6, 16.4, 18.9, 23.6, 1.1, 17.5, 2685.3], 1279, false, 0.0031),
    rp(11, &[44.0, 17.5, 38.3, 22.7, 20.4, 28.7, 1.1, 32.3, 44.8, 3487.2], 715, false, 0.0031),
    rp(12, &[45.5, 5.1, 61.2, 26.9, 2.6, 47.2, 52.5, 81.0, 75.6, 84.2, 2519.2], 1370, true, 0.0031),
];

/// `(|a_2| τ² + |a_p| τ^p)/(1 − τ)`, p = 2..12.
pub const RATIONAL_MINUS: [RationalMinusRow; 11] = [
    rm(2, 24.9, None, 21, 0.0057),
    rm(3, 0.0019, Some(28.4), 44, 0.0084),
    rm(4, 22.5, Some(14.5), 109, 0.0053),
    rm(5, 23.6, Some(35.9), 91, 0.0047),
    rm(6, 24.4, Some(76.2), 136, 0.0042),
    rm(7, 24.3, Some(113.0), 157, 0.0038),
    rm(8, 23.3, Some(121.3), 150, 0.0037),
    rm(9, 23.5, Some(195.0), 116, 0.0037),
    rm(10, 23.2, Some(180.1), 101, 0.0038),
    rm(11, 23.5, Some(221.6), 124, 0.0039),
    rm(12, 23.5, Some(223.4), 133, 0.0041),
];

pub fn rational_plus_row(p: u32) -> Option<&'static RationalPlusRow> {
    RATIONAL_PLUS.iter().find(|r| r.p == p)
}

pub fn rational_minus_row(p: u32) -> Option<&'static RationalMinusRow> {
    RATIONAL_MINUS.iter().find(|r| r.p == p)
}

pub fn baseline_profile() -> Profile {
    Profile::power(BASELINE_POWER_P, BASELINE_POWER_S).expect("baseline is well formed")
}

/// The four profiles compared in the angular reflectivity plots: the optimal
/// power law, the rational-plus and two-term optima at p = 5, and the two-term
/// optimum at p = 8.
pub fn comparison_profiles() -> Vec<Profile> {
    vec![
        baseline_profile(),
        rational_plus_row(5).unwrap().profile(),
        rational_minus_row(5).unwrap().profile(),
        rational_minus_row(8).unwrap().profile(),
    ]
}
