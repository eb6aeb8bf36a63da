//! The free abelian group of units: normal forms, group operations and
//! rendering back to annotation syntax.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::ast::UnitExpr;
use crate::rational::Rational;

/// One generator of the unit group. Unit variables order before base units,
/// which is also the rendering order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dim {
    /// A unit variable such as `'a`, stored without the quote.
    Var(String),
    Base(String),
}

impl Dim {
    pub fn is_var(&self) -> bool {
        matches!(self, Dim::Var(_))
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dim::Var(name) => write!(f, "'{name}"),
            Dim::Base(name) => f.write_str(name),
        }
    }
}

/// Normal form of a unit: generator to non-zero exponent. The empty map is
/// the dimensionless unit `1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct UnitNorm {
    factors: BTreeMap<Dim, Rational>,
}

impl UnitNorm {
    pub fn one() -> Self {
        UnitNorm::default()
    }

    pub fn base(name: impl Into<String>) -> Self {
        UnitNorm::single(Dim::Base(name.into()), Rational::one())
    }

    pub fn var(name: impl Into<String>) -> Self {
        UnitNorm::single(Dim::Var(name.into()), Rational::one())
    }

    pub fn single(dim: Dim, exponent: Rational) -> Self {
        let mut u = UnitNorm::one();
        u.add_factor(dim, exponent);
        u
    }

    pub fn from_factors(factors: impl IntoIterator<Item = (Dim, Rational)>) -> Self {
        let mut u = UnitNorm::one();
        for (dim, e) in factors {
            u.add_factor(dim, e);
        }
        u
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn exponent(&self, dim: &Dim) -> Rational {
        self.factors.get(dim).cloned().unwrap_or_default()
    }

    pub fn factors(&self) -> impl Iterator<Item = (&Dim, &Rational)> {
        self.factors.iter()
    }

    pub fn dims(&self) -> impl Iterator<Item = &Dim> {
        self.factors.keys()
    }

    /// Exponents of the base units only.
    pub fn base_factors(&self) -> impl Iterator<Item = (&str, &Rational)> {
        self.factors.iter().filter_map(|(d, e)| match d {
            Dim::Base(name) => Some((name.as_str(), e)),
            Dim::Var(_) => None,
        })
    }

    /// Exponents of the unit variables only.
    pub fn var_factors(&self) -> impl Iterator<Item = (&str, &Rational)> {
        self.factors.iter().filter_map(|(d, e)| match d {
            Dim::Var(name) => Some((name.as_str(), e)),
            Dim::Base(_) => None,
        })
    }

    pub fn is_ground(&self) -> bool {
        self.factors.keys().all(|d| !d.is_var())
    }

    /// Multiply in `dim ** exponent`.
    pub fn add_factor(&mut self, dim: Dim, exponent: Rational) {
        if exponent.is_zero() {
            return;
        }
        let slot = self.factors.entry(dim).or_default();
        *slot = &*slot + &exponent;
        if slot.is_zero() {
            self.factors.retain(|_, e| !e.is_zero());
        }
    }

    pub fn mul(&self, other: &UnitNorm) -> UnitNorm {
        let mut out = self.clone();
        for (d, e) in &other.factors {
            out.add_factor(d.clone(), e.clone());
        }
        out
    }

    pub fn pow(&self, k: &Rational) -> UnitNorm {
        if k.is_zero() {
            return UnitNorm::one();
        }
        UnitNorm {
            factors: self
                .factors
                .iter()
                .map(|(d, e)| (d.clone(), e * k))
                .collect(),
        }
    }

    pub fn inv(&self) -> UnitNorm {
        self.pow(&Rational::integer(-1))
    }

    pub fn div(&self, other: &UnitNorm) -> UnitNorm {
        self.mul(&other.inv())
    }

    /// Replace unit variables using `subst`; unmapped variables stay as they are.
    pub fn substitute_vars(&self, subst: &BTreeMap<String, UnitNorm>) -> UnitNorm {
        let mut out = UnitNorm::one();
        for (d, e) in &self.factors {
            match d {
                Dim::Var(name) if subst.contains_key(name) => {
                    out = out.mul(&subst[name].pow(e));
                }
                _ => out.add_factor(d.clone(), e.clone()),
            }
        }
        out
    }
}

/// Fold a surface unit expression into its normal form.
pub fn unit_normalize(expr: &UnitExpr) -> UnitNorm {
    match expr {
        UnitExpr::One => UnitNorm::one(),
        UnitExpr::Base(name) => UnitNorm::base(name.clone()),
        UnitExpr::Var(name) => UnitNorm::var(name.clone()),
        UnitExpr::Mul(a, b) => unit_normalize(a).mul(&unit_normalize(b)),
        UnitExpr::Div(a, b) => unit_normalize(a).div(&unit_normalize(b)),
        UnitExpr::Pow(a, k) => unit_normalize(a).pow(k),
    }
}

pub fn unit_mul(a: &UnitNorm, b: &UnitNorm) -> UnitNorm {
    a.mul(b)
}

pub fn unit_pow(u: &UnitNorm, k: &Rational) -> UnitNorm {
    u.pow(k)
}

/// Render in annotation syntax: positive factors joined by `*`, then
/// ` / ` and the negative factors with their exponents made positive.
pub fn unit_render(u: &UnitNorm) -> String {
    let (num, den): (Vec<_>, Vec<_>) = u.factors().partition(|(_, e)| !e.is_negative());
    let render_group = |group: &[(&Dim, &Rational)]| -> Vec<String> {
        group
            .iter()
            .map(|(d, e)| render_factor(d, &e.abs()))
            .collect()
    };
    let num = render_group(&num);
    let den = render_group(&den);

    let mut out = if num.is_empty() {
        String::from("1")
    } else {
        num.join("*")
    };
    match den.len() {
        0 => {}
        1 => {
            out.push_str(" / ");
            out.push_str(&den[0]);
        }
        _ => {
            out.push_str(" / (");
            out.push_str(&den.join("*"));
            out.push(')');
        }
    }
    out
}

fn render_factor(dim: &Dim, exponent: &Rational) -> String {
    if exponent.is_one() {
        return format!("{dim}");
    }
    let base = match dim {
        Dim::Var(_) => format!("({dim})"),
        Dim::Base(_) => format!("{dim}"),
    };
    if exponent.is_integer() {
        format!("{base}**{exponent}")
    } else {
        format!("{base}**({exponent})")
    }
}

impl fmt::Display for UnitNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&unit_render(self))
    }
}
