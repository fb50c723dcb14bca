//! Vector algebra of su(1,1) Hamiltonian coefficients.
//!
//! A Hamiltonian `H = r1 Kx + r2 Ky + r3 Kz` is carried as the coefficient
//! vector `r`. Commutators of such operators close on the same space through
//! the signature-(+,+,-) products [`boxdot`] and [`boxtimes`]:
//!
//! ```text
//! [a·K, b·K] = i (a ⊠ b)·K
//! a ⊠ (b ⊠ c) = -(a ⊡ c) b + (a ⊡ b) c
//! ```

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients `(r1, r2, r3)` of an operator `r1 Kx + r2 Ky + r3 Kz`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AlgebraVector {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

impl AlgebraVector {
    pub const ZERO: AlgebraVector = AlgebraVector { r1: 0.0, r2: 0.0, r3: 0.0 };

    pub const fn new(r1: f64, r2: f64, r3: f64) -> Self {
        Self { r1, r2, r3 }
    }

    /// Like [`AlgebraVector::new`] but rejects NaN and infinite components.
    pub fn try_new(r1: f64, r2: f64, r3: f64) -> Result<Self> {
        let v = Self::new(r1, r2, r3);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::invalid(format!("non-finite algebra vector {v}")))
        }
    }

    pub fn is_finite(&self) -> bool {
        self.r1.is_finite() && self.r2.is_finite() && self.r3.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.r1, self.r2, self.r3]
    }

    /// Euclidean squared norm; used only as a magnitude scale, never as the
    /// algebra's own bilinear form.
    pub fn euclidean_norm_sq(&self) -> f64 {
        self.r1 * self.r1 + self.r2 * self.r2 + self.r3 * self.r3
    }

    pub fn max_abs(&self) -> f64 {
        self.r1.abs().max(self.r2.abs()).max(self.r3.abs())
    }

    pub fn is_zero(&self) -> bool {
        self.r1 == 0.0 && self.r2 == 0.0 && self.r3 == 0.0
    }

    pub fn boxdot(&self, other: &AlgebraVector) -> f64 {
        boxdot(self, other)
    }

    pub fn boxtimes(&self, other: &AlgebraVector) -> AlgebraVector {
        boxtimes(self, other)
    }
}

impl From<[f64; 3]> for AlgebraVector {
    fn from(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl fmt::Display for AlgebraVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.r1, self.r2, self.r3)
    }
}

impl Add for AlgebraVector {
    type Output = AlgebraVector;
    fn add(self, o: AlgebraVector) -> AlgebraVector {
        AlgebraVector::new(self.r1 + o.r1, self.r2 + o.r2, self.r3 + o.r3)
    }
}

impl Sub for AlgebraVector {
    type Output = AlgebraVector;
    fn sub(self, o: AlgebraVector) -> AlgebraVector {
        AlgebraVector::new(self.r1 - o.r1, self.r2 - o.r2, self.r3 - o.r3)
    }
}

impl Neg for AlgebraVector {
    type Output = AlgebraVector;
    fn neg(self) -> AlgebraVector {
        AlgebraVector::new(-self.r1, -self.r2, -self.r3)
    }
}

impl Mul<AlgebraVector> for f64 {
    type Output = AlgebraVector;
    fn mul(self, v: AlgebraVector) -> AlgebraVector {
        AlgebraVector::new(self * v.r1, self * v.r2, self * v.r3)
    }
}

impl Mul<f64> for AlgebraVector {
    type Output = AlgebraVector;
    fn mul(self, c: f64) -> AlgebraVector {
        c * self
    }
}

/// `a ⊡ b = a1 b1 + a2 b2 - a3 b3`.
pub fn boxdot(a: &AlgebraVector, b: &AlgebraVector) -> f64 {
    a.r1 * b.r1 + a.r2 * b.r2 - a.r3 * b.r3
}

/// `a ⊠ b = (a2 b3 - a3 b2, a3 b1 - a1 b3, a2 b1 - a1 b2)`.
///
/// The third component has the opposite sign of the Euclidean cross product.
pub fn boxtimes(a: &AlgebraVector, b: &AlgebraVector) -> AlgebraVector {
    AlgebraVector::new(
        a.r2 * b.r3 - a.r3 * b.r2,
        a.r3 * b.r1 - a.r1 * b.r3,
        a.r2 * b.r1 - a.r1 * b.r2,
    )
}

/// The radicand `s = r ⊡ r`. Its sign selects the dynamical regime; the
/// scalar `sqrt(s)` is never formed.
pub fn casimir_radicand(r: &AlgebraVector) -> f64 {
    boxdot(r, r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `s > 0`: sinh/cosh profiles.
    Hyperbolic,
    /// `s < 0`: sin/cos profiles tracing a cycloid.
    Trigonometric,
    /// `s ≈ 0`.
    Critical,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Hyperbolic => "hyperbolic",
            Regime::Trigonometric => "trigonometric",
            Regime::Critical => "critical",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeInfo {
    pub radicand: f64,
    pub regime: Regime,
    /// `sqrt(|s|)`.
    pub modulus: f64,
    /// `2π / modulus`, present only in the trigonometric regime.
    pub period: Option<f64>,
}

/// Default relative tolerance for calling a radicand critical.
pub const CRITICAL_EPS: f64 = 1e-12;

/// Classifies a radicand; `|s| <= eps * scale` counts as critical.
pub fn classify_regime(s: f64, scale: f64, eps: f64) -> RegimeInfo {
    debug_assert!(scale > 0.0 && eps > 0.0);
    let modulus = s.abs().sqrt();
    let regime = if s.abs() <= eps * scale {
        Regime::Critical
    } else if s > 0.0 {
        Regime::Hyperbolic
    } else {
        Regime::Trigonometric
    };
    let period = match regime {
        Regime::Trigonometric => Some(2.0 * std::f64::consts::PI / modulus),
        _ => None,
    };
    RegimeInfo { radicand: s, regime, modulus, period }
}

/// Classifies `r` with the default tolerance, relative to `max(1, |r|²)`.
pub fn regime_of(r: &AlgebraVector) -> RegimeInfo {
    let scale = r.euclidean_norm_sq().max(1.0);
    classify_regime(casimir_radicand(r), scale, CRITICAL_EPS)
}
