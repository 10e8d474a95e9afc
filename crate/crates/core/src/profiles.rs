//! Parametric absorption profiles σ(τ) over normalized depth τ ∈ [0, 1].
//!
//! τ = 0 at the interface with the physical domain and τ = 1 at the
//! terminating wall. Every coefficient enters through its absolute value, so
//! any real coefficient vector describes a valid non-negative profile and the
//! optimizer can search an unconstrained space.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `S τ^p`
    Power,
    /// `(Σ_{k=2..p} |a_k| τ^k) / (1 + τ)`
    RationalPlus,
    /// `(|a_2| τ² + |a_p| τ^p) / (1 − τ)`
    RationalMinus,
    /// `S τ³ / (1 + τ²)`
    Legacy,
}

impl Family {
    /// Short name used by the profile grammar and the CLI.
    pub fn tag(self) -> &'static str {
        match self {
            Family::Power => "power",
            Family::RationalPlus => "rplus",
            Family::RationalMinus => "rminus",
            Family::Legacy => "legacy",
        }
    }

    /// Number of free coefficients for this family at order `p`.
    pub fn dimension(self, p: u32) -> usize {
        match self {
            Family::Power | Family::Legacy => 1,
            Family::RationalPlus => p.saturating_sub(1) as usize,
            Family::RationalMinus if p == 2 => 1,
            Family::RationalMinus => 2,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(Family::Power),
            "rplus" => Ok(Family::RationalPlus),
            "rminus" => Ok(Family::RationalMinus),
            "legacy" => Ok(Family::Legacy),
            _ => Err(Error::Parse {
                input: s.to_string(),
                token: s.to_string(),
                reason: "unknown profile family (expected power, rplus, rminus or legacy)".into(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Power { s: f64, p: u32 },
    /// Coefficients `a_2, …, a_p`; the order is `coeffs.len() + 1`.
    RationalPlus { coeffs: Vec<f64> },
    /// For `p == 2` the two terms coincide and `ap` is ignored.
    RationalMinus { a2: f64, ap: f64, p: u32 },
    Legacy { s: f64 },
}

fn check_order(p: u32) -> Result<()> {
    if p < 2 {
        return Err(Error::InvalidConfig(format!("profile order p must be at least 2, got {p}")));
    }
    Ok(())
}

fn check_finite(values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("profile coefficients"))
    }
}

impl Profile {
    pub fn power(p: u32, s: f64) -> Result<Self> {
        check_order(p)?;
        check_finite(&[s])?;
        Ok(Profile::Power { s, p })
    }

    pub fn rational_plus(p: u32, coeffs: Vec<f64>) -> Result<Self> {
        check_order(p)?;
        if coeffs.len() != p as usize - 1 {
            return Err(Error::LengthMismatch {
                expected: p as usize - 1,
                got: coeffs.len(),
            });
        }
        check_finite(&coeffs)?;
        Ok(Profile::RationalPlus { coeffs })
    }

    pub fn rational_minus(p: u32, a2: f64, ap: f64) -> Result<Self> {
        check_order(p)?;
        check_finite(&[a2, ap])?;
        if p == 2 && ap != 0.0 {
            return Err(Error::InvalidConfig(
                "rminus with p=2 has the single coefficient a2; ap must be omitted".into(),
            ));
        }
        Ok(Profile::RationalMinus { a2, ap, p })
    }

    pub fn legacy(s: f64) -> Result<Self> {
        check_finite(&[s])?;
        Ok(Profile::Legacy { s })
    }

    /// The lossless profile σ ≡ 0.
    pub fn zero() -> Self {
        Profile::Power { s: 0.0, p: 2 }
    }

    pub fn family(&self) -> Family {
        match self {
            Profile::Power { .. } => Family::Power,
            Profile::RationalPlus { .. } => Family::RationalPlus,
            Profile::RationalMinus { .. } => Family::RationalMinus,
            Profile::Legacy { .. } => Family::Legacy,
        }
    }

    /// Polynomial order `p`; the legacy profile reports its cubic numerator.
    pub fn order(&self) -> u32 {
        match self {
            Profile::Power { p, .. } | Profile::RationalMinus { p, .. } => *p,
            Profile::RationalPlus { coeffs } => coeffs.len() as u32 + 1,
            Profile::Legacy { .. } => 3,
        }
    }

    /// Whether τ = 1 is a pole of σ.
    pub fn singular_at_wall(&self) -> bool {
        matches!(self, Profile::RationalMinus { .. })
    }

    pub fn sigma(&self, tau: f64) -> Result<f64> {
        let in_range = if self.singular_at_wall() {
            (0.0..1.0).contains(&tau)
        } else {
            (0.0..=1.0).contains(&tau)
        };
        if !in_range {
            return Err(Error::Domain {
                what: "tau",
                value: tau,
                domain: if self.singular_at_wall() { "[0, 1)" } else { "[0, 1]" },
            });
        }
        Ok(self.sigma_unchecked(tau))
    }

    fn sigma_unchecked(&self, tau: f64) -> f64 {
        match self {
            Profile::Power { s, p } => s.abs() * tau.powi(*p as i32),
            Profile::RationalPlus { coeffs } => {
                // Horner on a_2 + a_3 τ + … + a_p τ^{p−2}, then times τ².
                let poly = coeffs.iter().rev().fold(0.0, |acc, a| acc * tau + a.abs());
                poly * tau * tau / (1.0 + tau)
            }
            Profile::RationalMinus { a2, ap, p } => {
                let mut num = a2.abs() * tau * tau;
                if *p > 2 {
                    num += ap.abs() * tau.powi(*p as i32);
                }
                num / (1.0 - tau)
            }
            Profile::Legacy { s } => s.abs() * tau.powi(3) / (1.0 + tau * tau),
        }
    }

    pub fn to_vector(&self) -> CoefficientVector {
        let values = match self {
            Profile::Power { s, .. } | Profile::Legacy { s } => vec![*s],
            Profile::RationalPlus { coeffs } => coeffs.clone(),
            Profile::RationalMinus { a2, p: 2, .. } => vec![*a2],
            Profile::RationalMinus { a2, ap, .. } => vec![*a2, *ap],
        };
        CoefficientVector {
            family: self.family(),
            p: self.order(),
            values,
        }
    }

    pub fn from_vector(v: &CoefficientVector) -> Result<Self> {
        let expected = v.family.dimension(v.p);
        if v.values.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: v.values.len(),
            });
        }
        match v.family {
            Family::Power => Profile::power(v.p, v.values[0]),
            Family::Legacy => Profile::legacy(v.values[0]),
            Family::RationalPlus => Profile::rational_plus(v.p, v.values.clone()),
            Family::RationalMinus if v.p == 2 => Profile::rational_minus(2, v.values[0], 0.0),
            Family::RationalMinus => Profile::rational_minus(v.p, v.values[0], v.values[1]),
        }
    }

    /// Same profile with every coefficient replaced by its absolute value.
    pub fn canonical(&self) -> Self {
        match self {
            Profile::Power { s, p } => Profile::Power { s: s.abs(), p: *p },
            Profile::RationalPlus { coeffs } => Profile::RationalPlus {
                coeffs: coeffs.iter().map(|a| a.abs()).collect(),
            },
            Profile::RationalMinus { a2, ap, p } => Profile::RationalMinus {
                a2: a2.abs(),
                ap: ap.abs(),
                p: *p,
            },
            Profile::Legacy { s } => Profile::Legacy { s: s.abs() },
        }
    }
}

/// Flat coefficient vector tagged with the family and order it parameterizes.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    pub family: Family,
    pub p: u32,
    pub values: Vec<f64>,
}

impl CoefficientVector {
    pub fn new(family: Family, p: u32, values: Vec<f64>) -> Result<Self> {
        let expected = family.dimension(p);
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: values.len(),
            });
        }
        Ok(Self { family, p, values })
    }

    pub fn abs(&self) -> Self {
        Self {
            family: self.family,
            p: self.p,
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }
}

/// Normalized depth of a point `offset` from the interface (negative into the
/// layer) in a layer of the given thickness.
pub fn tau_of(offset: f64, thickness: f64) -> Result<f64> {
    if !(thickness > 0.0 && thickness.is_finite()) {
        return Err(Error::Domain {
            what: "layer thickness",
            value: thickness,
            domain: "(0, inf)",
        });
    }
    if !(-thickness..=0.0).contains(&offset) {
        return Err(Error::Domain {
            what: "offset from interface",
            value: offset,
            domain: "[-thickness, 0]",
        });
    }
    Ok(-offset / thickness)
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Power { s, p } => write!(f, "power:p={p},S={s}"),
            Profile::RationalPlus { coeffs } => {
                write!(f, "rplus:p={},a=[", coeffs.len() + 1)?;
                for (i, a) in coeffs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str("]")
            }
            Profile::RationalMinus { a2, p: 2, .. } => write!(f, "rminus:p=2,a2={a2}"),
            Profile::RationalMinus { a2, ap, p } => write!(f, "rminus:p={p},a2={a2},ap={ap}"),
            Profile::Legacy { s } => write!(f, "legacy:S={s}"),
        }
    }
}

struct SpecParser<'a> {
    input: &'a str,
}

impl<'a> SpecParser<'a> {
    fn fail(&self, token: &str, reason: impl Into<String>) -> Error {
        Error::Parse {
            input: self.input.to_string(),
            token: token.to_string(),
            reason: reason.into(),
        }
    }

    /// Splits on commas that are not inside `[...]`.
    fn fields(&self, body: &'a str) -> Result<Vec<&'a str>> {
        let mut out = Vec::new();
        let mut depth = 0i32;
        let mut start = 0;
        for (i, ch) in body.char_indices() {
            match ch {
                '[' => depth += 1,
                ']' => {
                    depth -= 1;
                    if depth < 0 {
                        return Err(self.fail(&body[start..=i], "unbalanced ']'"));
                    }
                }
                ',' if depth == 0 => {
                    out.push(&body[start..i]);
                    start = i + 1;
                }
                _ => {}
            }
        }
        if depth != 0 {
            return Err(self.fail(&body[start..], "unterminated '['"));
        }
        out.push(&body[start..]);
        Ok(out)
    }

    fn value<'f>(&self, field: &'f str, key: &str) -> Result<&'f str> {
        match field.split_once('=') {
            Some((k, v)) if k == key => Ok(v),
            _ => Err(self.fail(field, format!("expected `{key}=<value>`"))),
        }
    }

    fn int(&self, field: &str, key: &str) -> Result<u32> {
        let v = self.value(field, key)?;
        v.parse::<u32>()
            .map_err(|_| self.fail(v, format!("`{key}` must be a non-negative integer")))
    }

    fn float(&self, token: &str, key: &str) -> Result<f64> {
        let v: f64 = token
            .parse()
            .map_err(|_| self.fail(token, format!("`{key}` must be a number")))?;
        if !v.is_finite() {
            return Err(self.fail(token, format!("`{key}` must be finite")));
        }
        Ok(v)
    }

    fn float_field(&self, field: &str, key: &str) -> Result<f64> {
        let v = self.value(field, key)?;
        self.float(v, key)
    }

    fn list(&self, field: &str, key: &str) -> Result<Vec<f64>> {
        let v = self.value(field, key)?;
        let inner = v
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| self.fail(v, format!("`{key}` must be a bracketed list")))?;
        if inner.is_empty() {
            return Ok(Vec::new());
        }
        inner.split(',').map(|t| self.float(t, key)).collect()
    }

    fn arity(&self, fields: &[&str], allowed: &[usize]) -> Result<()> {
        if allowed.contains(&fields.len()) {
            return Ok(());
        }
        let token = fields.get(*allowed.iter().max().unwrap()).copied().unwrap_or(self.input);
        Err(self.fail(token, "wrong number of parameters"))
    }

    fn with_context(&self, token: &str, result: Result<Profile>) -> Result<Profile> {
        result.map_err(|e| match e {
            e @ Error::Parse { .. } => e,
            other => self.fail(token, other.to_string()),
        })
    }

    fn parse(&self) -> Result<Profile> {
        let (tag, body) = self
            .input
            .split_once(':')
            .ok_or_else(|| self.fail(self.input, "expected `<family>:<parameters>`"))?;
        let family: Family = tag
            .parse()
            .map_err(|_| self.fail(tag, "unknown profile family (expected power, rplus, rminus or legacy)"))?;
        let fields = self.fields(body)?;
        match family {
            Family::Power => {
                self.arity(&fields, &[2])?;
                let p = self.int(fields[0], "p")?;
                let s = self.float_field(fields[1], "S")?;
                self.with_context(fields[0], Profile::power(p, s))
            }
            Family::RationalPlus => {
                self.arity(&fields, &[2])?;
                let p = self.int(fields[0], "p")?;
                let a = self.list(fields[1], "a")?;
                self.with_context(fields[1], Profile::rational_plus(p, a))
            }
            Family::RationalMinus => {
                self.arity(&fields, &[2, 3])?;
                let p = self.int(fields[0], "p")?;
                let a2 = self.float_field(fields[1], "a2")?;
                let ap = match fields.get(2) {
                    Some(f) => self.float_field(f, "ap")?,
                    None if p == 2 => 0.0,
                    None => return Err(self.fail(self.input, "missing `ap=<value>`")),
                };
                let token = fields.get(2).copied().unwrap_or(fields[0]);
                self.with_context(token, Profile::rational_minus(p, a2, ap))
            }
            Family::Legacy => {
                self.arity(&fields, &[1])?;
                let s = self.float_field(fields[0], "S")?;
                Profile::legacy(s)
            }
        }
    }
}

impl FromStr for Profile {
    type Err = Error;

    /// Parses `power:p=<int>,S=<float>`, `rplus:p=<int>,a=[<float>,...]`,
    /// `rminus:p=<int>,a2=<float>,ap=<float>` (`ap` omitted when `p=2`) or
    /// `legacy:S=<float>`.
    fn from_str(s: &str) -> Result<Self> {
        SpecParser { input: s }.parse()
    }
}
