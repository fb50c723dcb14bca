//! Closed-form QFI `F = 4 Var[𝓗]` with `𝓗 = f_x h_x + f_y h_y + f_z h_z`.
//!
//! The six pair contributions are stored in the order
//! `zz, yz, xz, yy, xy, xx`:
//!
//! ```text
//! zz = f_z² Var h_z        yz = 2 f_y f_z Cov(h_y, h_z)   xz = 2 f_x f_z Cov(h_x, h_z)
//! yy = f_y² Var h_y        xy = 2 f_x f_y Cov(h_x, h_y)   xx = f_x² Var h_x
//! ```
//!
//! and `total = 4 (zz + yz + xz + yy + xy + xx)`. For `s < 0` these are the
//! usual `F₁ … F₆` of the trigonometric regime term by term.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{moments, FockRepresentation, StateVector};
use crate::generator::{h_vectors, scalar_profiles};
use crate::models::ModelSpec;
use crate::su11::{regime_of, AlgebraVector, Regime, RegimeInfo};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QfiParts {
    pub zz: f64,
    pub yz: f64,
    pub xz: f64,
    pub yy: f64,
    pub xy: f64,
    pub xx: f64,
}

impl QfiParts {
    pub const LABELS: [&'static str; 6] = ["zz", "yz", "xz", "yy", "xy", "xx"];

    pub fn to_array(&self) -> [f64; 6] {
        [self.zz, self.yz, self.xz, self.yy, self.xy, self.xx]
    }

    pub fn sum(&self) -> f64 {
        self.to_array().iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QfiReport {
    pub total: f64,
    pub parts: QfiParts,
    /// Single-shot Cramér-Rao bound `1/√F`; absent when `F = 0`.
    pub crb: Option<f64>,
    pub regime: RegimeInfo,
    pub time: f64,
    /// `h_x` was dropped at the critical point.
    pub compat_mode: bool,
}

impl QfiReport {
    pub fn crb_with(&self, nu: u32) -> Option<f64> {
        crb(self.total, nu).ok()
    }
}

/// Second moments of `h_x, h_y, h_z` in a probe state.
#[derive(Debug, Clone, Copy, PartialEq)]
struct GeneratorMoments {
    var_x: f64,
    var_y: f64,
    var_z: f64,
    cov_xy: f64,
    cov_xz: f64,
    cov_yz: f64,
}

fn generator_moments(
    b_x: &AlgebraVector,
    b_y: &AlgebraVector,
    b_z: &AlgebraVector,
    psi: &StateVector,
    rep: &FockRepresentation,
) -> Result<GeneratorMoments> {
    if psi.dimension() != rep.dimension() {
        return Err(Error::DimensionMismatch { expected: rep.dimension(), got: psi.dimension() });
    }
    let (hx, hy, hz) = (rep.operator(b_x), rep.operator(b_y), rep.operator(b_z));
    let xy = moments(&hx, &hy, psi)?;
    let xz = moments(&hx, &hz, psi)?;
    let yz = moments(&hy, &hz, psi)?;
    Ok(GeneratorMoments {
        var_x: xy.var_a,
        var_y: xy.var_b,
        var_z: xz.var_b,
        cov_xy: xy.cov,
        cov_xz: xz.cov,
        cov_yz: yz.cov,
    })
}

/// QFI of `exp(-i t r·K)` about the direction `ṙ`.
pub fn qfi_from_vectors(
    r: &AlgebraVector,
    rdot: &AlgebraVector,
    t: f64,
    psi: &StateVector,
    rep: &FockRepresentation,
    compat: bool,
) -> Result<QfiReport> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid(format!("time must be >= 0, got {t}")));
    }
    let regime = regime_of(r);
    let mut dec = h_vectors(r, rdot);
    let compat_mode = compat && regime.regime == Regime::Critical;
    if compat_mode {
        dec.b_x = AlgebraVector::ZERO;
    }
    let f = scalar_profiles(dec.s, t)?;
    let m = generator_moments(&dec.b_x, &dec.b_y, &dec.b_z, psi, rep)?;
    let parts = QfiParts {
        zz: f.f_z * f.f_z * m.var_z,
        yz: 2.0 * f.f_y * f.f_z * m.cov_yz,
        xz: 2.0 * f.f_x * f.f_z * m.cov_xz,
        yy: f.f_y * f.f_y * m.var_y,
        xy: 2.0 * f.f_x * f.f_y * m.cov_xy,
        xx: f.f_x * f.f_x * m.var_x,
    };
    let total = 4.0 * parts.sum();
    Ok(QfiReport { total, parts, crb: crb(total, 1).ok(), regime, time: t, compat_mode })
}

pub fn qfi_closed_form(
    model: &ModelSpec,
    lambda: f64,
    t: f64,
    psi: &StateVector,
    rep: &FockRepresentation,
    compat: bool,
) -> Result<QfiReport> {
    qfi_from_vectors(&model.r(lambda), &model.rdot(lambda), t, psi, rep, compat)
}

/// Power-law coefficients of `F(t)` at the critical point.
///
/// `F(t) = A_zz t² + A_yz t³ + (A_yy + A_xz) t⁴ + A_xy t⁵ + A_xx t⁶` exactly
/// at `s = 0`. The `B` set drops `h_x`, giving
/// `B_zz t² + B_yz t³ + B_yy t⁴`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticCoefficients {
    pub a_xx: f64,
    pub a_yy: f64,
    pub a_zz: f64,
    pub a_xy: f64,
    pub a_xz: f64,
    pub a_yz: f64,
    pub b_yy: f64,
    pub b_yz: f64,
    pub b_zz: f64,
}

impl AsymptoticCoefficients {
    /// Leading `t⁶` coefficient.
    pub fn leading(&self) -> f64 {
        self.a_xx
    }

    pub fn polynomial(&self, t: f64) -> f64 {
        let t2 = t * t;
        t2 * (self.a_zz + t * (self.a_yz + t * (self.a_yy + self.a_xz + t * (self.a_xy + t * self.a_xx))))
    }

    pub fn compat_polynomial(&self, t: f64) -> f64 {
        let t2 = t * t;
        t2 * (self.b_zz + t * (self.b_yz + t * self.b_yy))
    }
}

/// Evaluates the `b` vectors at the model's first critical value.
pub fn asymptotic_coefficients(
    model: &ModelSpec,
    psi: &StateVector,
    rep: &FockRepresentation,
) -> Result<AsymptoticCoefficients> {
    let lc = model.first_critical()?;
    let dec = h_vectors(&model.r(lc), &model.rdot(lc));
    let m = generator_moments(&dec.b_x, &dec.b_y, &dec.b_z, psi, rep)?;
    Ok(AsymptoticCoefficients {
        a_xx: m.var_x / 9.0,
        a_yy: m.var_y,
        a_zz: 4.0 * m.var_z,
        a_xy: -2.0 / 3.0 * m.cov_xy,
        a_xz: 4.0 / 3.0 * m.cov_xz,
        a_yz: -4.0 * m.cov_yz,
        b_yy: m.var_y,
        b_yz: -4.0 * m.cov_yz,
        b_zz: 4.0 * m.var_z,
    })
}

/// `t⁶` factor of the critical anisotropic Rabi model for the probe
/// `(|0> + |1>)/√2`, whose `Var(Kx - Kz) = 5/16` is built in.
pub fn qrm_asymptotic_factor(zeta: f64, omega: f64) -> f64 {
    320.0 * zeta.powi(4) * omega.powi(6) / (9.0 * (1.0 + zeta).powi(6))
}

/// `(B1, B2)`: the `t⁴` and `t²` coefficients at the critical point with
/// `h_x` dropped, for the probe `(|0> + |1>)/√2`.
pub fn qrm_critical_coefficients(zeta: f64, omega: f64) -> (f64, f64) {
    let d = (1.0 + zeta).powi(2);
    let b1 = 16.0 * zeta * zeta * omega.powi(4) / d;
    let b2 = omega * omega * (16.0 * zeta * zeta + (1.0 + zeta * zeta).powi(2)) / d;
    (b1, b2)
}

/// Cramér-Rao bound `1/√(ν F)`.
pub fn crb(f: f64, nu: u32) -> Result<f64> {
    if nu == 0 {
        return Err(Error::invalid("number of repetitions must be >= 1"));
    }
    if !(f.is_finite() && f > 0.0) {
        return Err(Error::invalid(format!("Cramér-Rao bound needs F > 0, got {f}")));
    }
    Ok(1.0 / (nu as f64 * f).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// Largest `|fit/F - 1|` over the data.
    pub residual: f64,
}

/// Least-squares line through `(log t, log F)`.
pub fn fit_power_law(t_grid: &[f64], f_grid: &[f64]) -> Result<PowerLawFit> {
    if t_grid.len() != f_grid.len() {
        return Err(Error::DimensionMismatch { expected: t_grid.len(), got: f_grid.len() });
    }
    if t_grid.len() < 3 {
        return Err(Error::invalid("power-law fit needs at least 3 points"));
    }
    if t_grid.iter().chain(f_grid).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::invalid("power-law fit needs positive t and F"));
    }
    let n = t_grid.len() as f64;
    let xs: Vec<f64> = t_grid.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = f_grid.iter().map(|f| f.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("power-law fit needs distinct t values"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = sxy / sxx;
    let prefactor = (my - exponent * mx).exp();
    let residual = t_grid
        .iter()
        .zip(f_grid)
        .map(|(t, f)| (prefactor * t.powf(exponent) / f - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(PowerLawFit { exponent, prefactor, residual })
}
