//! The parametrization generator `𝓗 = i (∂λ U†) U` for `U = exp(-i t r·K)`.
//!
//! Nested commutators of `r·K` with `ṙ·K` close on three operators
//! `h_x = b_x·K`, `h_y = b_y·K`, `h_z = b_z·K`, giving
//!
//! ```text
//! 𝓗 = f_x(s, t) h_x + f_y(s, t) h_y + f_z(t) h_z
//! f_y = Σ t^(2n+2) s^n / (2n+2)!     f_x = -Σ t^(2n+3) s^n / (2n+3)!     f_z = -t
//! ```
//!
//! Both series are entire in the radicand `s = r ⊡ r`, so a single evaluation
//! path covers the hyperbolic (`s > 0`), trigonometric (`s < 0`) and critical
//! (`s = 0`) regimes without branching on `sqrt(s)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::su11::{boxtimes, casimir_radicand, regime_of, AlgebraVector, Regime};

/// Below this value of `|s| t²` the profiles are summed as power series.
pub const SERIES_SWITCHOVER: f64 = 0.5;

const SERIES_REL_CUTOFF: f64 = 1e-18;
const SERIES_MAX_TERMS: usize = 200;

/// Coefficient vectors of the three generator operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorDecomposition {
    /// `r ⊠ (r ⊠ ṙ)`, coefficients of `h_x`.
    pub b_x: AlgebraVector,
    /// `r ⊠ ṙ`, coefficients of `h_y`.
    pub b_y: AlgebraVector,
    /// `ṙ`, coefficients of `h_z`.
    pub b_z: AlgebraVector,
    /// `r ⊡ r`.
    pub s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileEvaluation {
    Series,
    Closed,
}

/// Scalar time profiles multiplying `h_x`, `h_y`, `h_z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientProfile {
    pub f_x: f64,
    pub f_y: f64,
    pub f_z: f64,
    /// Sign class of the radicand (exact zero is critical).
    pub regime: Regime,
    pub evaluation: ProfileEvaluation,
}

pub fn h_vectors(r: &AlgebraVector, rdot: &AlgebraVector) -> GeneratorDecomposition {
    let b_y = boxtimes(r, rdot);
    // Double ⊠ stays finite at s = 0, unlike the r(ṙ r - r ṙ) form.
    let b_x = boxtimes(r, &b_y);
    GeneratorDecomposition { b_x, b_y, b_z: *rdot, s: casimir_radicand(r) }
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::invalid(format!("evolution time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// Sums `first * Σ_n Π_{k<n} (s t² / ((offset + 2k + 1)(offset + 2k + 2)))`.
fn entire_series(first: f64, s: f64, t: f64, offset: u32) -> f64 {
    let x = s * t * t;
    let mut term = first;
    let mut sum = first;
    for n in 0..SERIES_MAX_TERMS as u32 {
        let a = f64::from(offset + 2 * n + 1);
        let b = f64::from(offset + 2 * n + 2);
        term *= x / (a * b);
        if term == 0.0 {
            break;
        }
        sum += term;
        if term.abs() < SERIES_REL_CUTOFF * sum.abs() {
            break;
        }
    }
    sum
}

pub fn scalar_profiles(s: f64, t: f64) -> Result<CoefficientProfile> {
    check_time(t)?;
    if !s.is_finite() {
        return Err(Error::invalid(format!("radicand must be finite, got {s}")));
    }
    let regime = if s > 0.0 {
        Regime::Hyperbolic
    } else if s < 0.0 {
        Regime::Trigonometric
    } else {
        Regime::Critical
    };
    let f_z = -t;

    if s.abs() * t * t < SERIES_SWITCHOVER {
        let f_y = entire_series(t * t / 2.0, s, t, 2);
        let f_x = entire_series(-t * t * t / 6.0, s, t, 3);
        return Ok(CoefficientProfile { f_x, f_y, f_z, regime, evaluation: ProfileEvaluation::Series });
    }

    let m = s.abs().sqrt();
    let x = m * t;
    let (f_x, f_y) = if s > 0.0 {
        let half = (0.5 * x).sinh();
        ((x - x.sinh()) / (m * m * m), 2.0 * half * half / (m * m))
    } else {
        let half = (0.5 * x).sin();
        (-(x - x.sin()) / (m * m * m), 2.0 * half * half / (m * m))
    };
    Ok(CoefficientProfile { f_x, f_y, f_z, regime, evaluation: ProfileEvaluation::Closed })
}

/// Coefficient vector `g` with `𝓗 = g·K`.
pub fn generator_vector(r: &AlgebraVector, rdot: &AlgebraVector, t: f64) -> Result<AlgebraVector> {
    generator_vector_with(r, rdot, t, false)
}

/// As [`generator_vector`]; with `drop_critical_hx` set, the `h_x` term is
/// dropped whenever `r` classifies as critical.
pub fn generator_vector_with(
    r: &AlgebraVector,
    rdot: &AlgebraVector,
    t: f64,
    drop_critical_hx: bool,
) -> Result<AlgebraVector> {
    let mut dec = h_vectors(r, rdot);
    if drop_critical_hx && regime_of(r).regime == Regime::Critical {
        dec.b_x = AlgebraVector::ZERO;
    }
    let p = scalar_profiles(dec.s, t)?;
    Ok(p.f_x * dec.b_x + p.f_y * dec.b_y + p.f_z * dec.b_z)
}

/// `v_n = r ⊠ (r ⊠ (... ⊠ ṙ))` with `n` factors of `r`, so that the nested
/// commutator `H^{×n}(∂H) = i^n v_n·K`.
pub fn nested_commutator_vector(r: &AlgebraVector, rdot: &AlgebraVector, n: usize) -> AlgebraVector {
    (0..n).fold(*rdot, |v, _| boxtimes(r, &v))
}

/// Direct partial sum `i Σ_{n ≤ n_max} (it)^{n+1}/(n+1)! H^{×n}(∂H)` in
/// coefficient form: `Σ (-1)^{n+1} t^{n+1}/(n+1)! v_n`.
pub fn series_partial_generator(
    r: &AlgebraVector,
    rdot: &AlgebraVector,
    t: f64,
    n_max: usize,
) -> AlgebraVector {
    let mut v = *rdot;
    let mut coeff = -t;
    let mut sum = coeff * v;
    for n in 1..=n_max {
        v = boxtimes(r, &v);
        coeff *= -t / (n as f64 + 1.0);
        sum = sum + coeff * v;
    }
    sum
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Normalised generator coefficients along a time grid.
///
/// For `s < 0` these are the cycloid `(|r|t - sin|r|t, 1 - cos|r|t, |r|t)`;
/// for `s > 0` the hyperbolic `(|r|t - sinh|r|t, 1 - cosh|r|t, |r|t)`.
/// At `s = 0` the normalisation degenerates and the call fails.
pub fn cycloid_curve(s: f64, t_grid: &[f64]) -> Result<Vec<CurvePoint>> {
    if s == 0.0 || !s.is_finite() {
        return Err(Error::invalid(
            "cycloid curve is degenerate at zero radicand (no normalising frequency)",
        ));
    }
    let m = s.abs().sqrt();
    t_grid
        .iter()
        .map(|&t| {
            let p = scalar_profiles(s, t)?;
            let (x, y) = if s < 0.0 {
                (-m * m * m * p.f_x, m * m * p.f_y)
            } else {
                (m * m * m * p.f_x, -m * m * p.f_y)
            };
            Ok(CurvePoint { t, x, y, z: m * t })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su11::boxdot;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn v(a: f64, b: f64, c: f64) -> AlgebraVector {
        AlgebraVector::new(a, b, c)
    }

    fn rel_close(a: AlgebraVector, b: AlgebraVector) -> f64 {
        (a - b).max_abs() / a.max_abs().max(b.max_abs()).max(1e-300)
    }

    // Critical isotropic QRM at ω = 1.
    const R_CRIT: AlgebraVector = AlgebraVector::new(-1.0, 0.0, 1.0);
    const RDOT_CRIT: AlgebraVector = AlgebraVector::new(-2.0, 0.0, -2.0);

    #[test]
    fn h_vectors_zero_rdot() {
        let d = h_vectors(&v(1., 2., 3.), &AlgebraVector::ZERO);
        assert_eq!(d.b_x, AlgebraVector::ZERO);
        assert_eq!(d.b_y, AlgebraVector::ZERO);
        assert_eq!(d.b_z, AlgebraVector::ZERO);
    }

    #[test]
    fn h_vectors_critical_qrm() {
        let d = h_vectors(&R_CRIT, &RDOT_CRIT);
        assert_eq!(d.b_y, v(0., -4., 0.));
        assert_eq!(d.b_x, v(4., 0., -4.));
        assert_eq!(d.b_z, v(-2., 0., -2.));
        assert_eq!(d.s, 0.0);
        // At s = 0 the Lagrange formula gives b_x = -(r⊡ṙ) r.
        assert_eq!(d.b_x, -boxdot(&R_CRIT, &RDOT_CRIT) * R_CRIT);
    }

    #[test]
    fn h_vectors_lmg() {
        for gamma in [0.0, 0.3, 2.0] {
            let eta = 0.7;
            let r = v(gamma - 1.0, 0.0, 2.0 * eta - gamma - 1.0);
            let d = h_vectors(&r, &v(0., 0., 2.));
            assert_eq!(d.b_z, v(0., 0., 2.));
            assert_eq!(d.b_y, v(0., -2.0 * (gamma - 1.0), 0.));
            // 2 r1 (r3 Kx + r1 Kz)
            let expect = 2.0 * r.r1 * v(r.r3, 0.0, r.r1);
            assert!(rel_close(d.b_x, expect) < 1e-15);
        }
    }

    #[test]
    fn profile_examples() {
        let p = scalar_profiles(0.0, 2.0).unwrap();
        assert_eq!((p.f_x, p.f_y, p.f_z), (-8.0 / 6.0, 2.0, -2.0));
        assert_eq!(p.regime, Regime::Critical);

        let p = scalar_profiles(-1.0, PI).unwrap();
        assert!((p.f_y - 2.0).abs() < 1e-15);
        assert_eq!(p.evaluation, ProfileEvaluation::Closed);

        let p = scalar_profiles(1.0, 1.0).unwrap();
        assert!((p.f_x - (1.0 - 1f64.sinh())).abs() < 1e-15);
        assert!((p.f_x + 0.175_201_193_6).abs() < 1e-10);
    }

    #[test]
    fn profiles_at_zero_time() {
        for s in [-3.0, 0.0, 5.0] {
            let p = scalar_profiles(s, 0.0).unwrap();
            assert_eq!((p.f_x, p.f_y, p.f_z), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn profile_errors() {
        assert!(scalar_profiles(1.0, -0.1).is_err());
        assert!(scalar_profiles(f64::NAN, 1.0).is_err());
        assert!(scalar_profiles(f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn small_argument_stability() {
        // |s| t² = 1e-8: compare against three explicit series terms.
        for (s, t) in [(1e-8, 1.0), (-1e-8, 1.0), (4e-10, 5.0), (-1e-12, 100.0)] {
            let p = scalar_profiles(s, t).unwrap();
            let x = s * t * t;
            let three = -t.powi(3) * (1.0 / 6.0 + x / 120.0 + x * x / 5040.0);
            assert!(((p.f_x - three) / three).abs() < 1e-14, "s={s} t={t}");
        }
    }

    #[test]
    fn generator_examples() {
        assert_eq!(generator_vector(&R_CRIT, &RDOT_CRIT, 0.0).unwrap(), AlgebraVector::ZERO);
        let g = generator_vector(&R_CRIT, &RDOT_CRIT, 1.0).unwrap();
        assert!(rel_close(g, v(4.0 / 3.0, -2.0, 8.0 / 3.0)) < 1e-15);
        assert_eq!(generator_vector(&v(1., 2., 3.), &AlgebraVector::ZERO, 7.0).unwrap(), AlgebraVector::ZERO);
    }

    #[test]
    fn compat_flag_drops_hx_only_at_criticality() {
        let g = generator_vector_with(&R_CRIT, &RDOT_CRIT, 1.0, true).unwrap();
        // t²/2 b_y - t b_z
        assert!(rel_close(g, v(2.0, -2.0, 2.0)) < 1e-15);
        let r = v(-0.81, 0.0, 1.19);
        let rd = v(-1.8, 0.0, -1.8);
        assert_eq!(
            generator_vector_with(&r, &rd, 2.0, true).unwrap(),
            generator_vector(&r, &rd, 2.0).unwrap()
        );
    }

    #[test]
    fn series_examples() {
        let rd = v(0.3, -1.2, 2.0);
        assert_eq!(series_partial_generator(&v(1., 2., 3.), &rd, 1.7, 0), -1.7 * rd);
        for t in [0.5, 1.0, 3.0] {
            let exact = generator_vector(&R_CRIT, &RDOT_CRIT, t).unwrap();
            let two = series_partial_generator(&R_CRIT, &RDOT_CRIT, t, 2);
            assert!(rel_close(exact, two) < 1e-15, "t={t}");
            // nilpotent beyond second order
            assert_eq!(nested_commutator_vector(&R_CRIT, &RDOT_CRIT, 3), AlgebraVector::ZERO);
        }
        let r = v(-0.81, 0.0, 1.19);
        let rd = v(-1.8, 0.0, -1.8);
        let exact = generator_vector(&r, &rd, 3.0).unwrap();
        let series = series_partial_generator(&r, &rd, 3.0, 40);
        assert!(rel_close(exact, series) < 1e-12);
    }

    #[test]
    fn eigenoperator_property() {
        let r = v(0.4, -1.3, 0.9);
        let rd = v(1.1, 0.2, -0.7);
        let d = h_vectors(&r, &rd);
        let mut sn = 1.0;
        for n in 0..4 {
            let odd = nested_commutator_vector(&r, &rd, 2 * n + 1);
            let even = nested_commutator_vector(&r, &rd, 2 * n + 2);
            assert!(rel_close(odd, sn * d.b_y) < 1e-10);
            assert!(rel_close(even, sn * d.b_x) < 1e-10);
            sn *= d.s;
        }
    }

    #[test]
    fn regime_continuity() {
        let d = h_vectors(&v(0.6, 0.8, 1.0), &v(0.5, -0.4, 1.3));
        let g_at = |s: f64, t: f64| {
            let p = scalar_profiles(s, t).unwrap();
            p.f_x * d.b_x + p.f_y * d.b_y + p.f_z * d.b_z
        };
        // Short times: the s-dependence itself is below 1e-10.
        for t in [0.1, 0.3] {
            for ds in [1e-8, -1e-8] {
                assert!(rel_close(g_at(ds, t), g_at(0.0, t)) < 1e-10);
            }
        }
        // Longer times: the deviation is exactly the first-order term in s.
        for t in [1.0, 2.5, 10.0] {
            for ds in [1e-8, -1e-8] {
                let p0 = scalar_profiles(0.0, t).unwrap();
                let p = scalar_profiles(ds, t).unwrap();
                let fx1 = p0.f_x * (1.0 + ds * t * t / 20.0);
                let fy1 = p0.f_y * (1.0 + ds * t * t / 12.0);
                assert!(((p.f_x - fx1) / p0.f_x).abs() < 1e-10);
                assert!(((p.f_y - fy1) / p0.f_y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn switchover_is_seamless() {
        for s in [-3.0f64, -0.2, 0.2, 3.0] {
            let t = (SERIES_SWITCHOVER / s.abs()).sqrt();
            let below = scalar_profiles(s, t * (1.0 - 1e-12)).unwrap();
            let above = scalar_profiles(s, t * (1.0 + 1e-12)).unwrap();
            assert_eq!(below.evaluation, ProfileEvaluation::Series);
            assert_eq!(above.evaluation, ProfileEvaluation::Closed);
            // the 2e-12 relative step in t moves f_x ~ t³ by about 6e-12
            assert!(((below.f_x - above.f_x) / above.f_x).abs() < 1e-11);
            assert!(((below.f_y - above.f_y) / above.f_y).abs() < 1e-11);
            // both paths at the same point
            let m = s.abs().sqrt();
            let x = m * t;
            let (cx, cy) = if s > 0.0 {
                ((x - x.sinh()) / (m * m * m), (x.cosh() - 1.0) / (m * m))
            } else {
                (-(x - x.sin()) / (m * m * m), (1.0 - x.cos()) / (m * m))
            };
            assert!((entire_series(-t * t * t / 6.0, s, t, 3) / cx - 1.0).abs() < 1e-14);
            assert!((entire_series(t * t / 2.0, s, t, 2) / cy - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn cycloid_examples() {
        let pts = cycloid_curve(-1.0, &[0.0, PI, 2.0 * PI]).unwrap();
        assert_eq!((pts[0].x, pts[0].y, pts[0].z), (0.0, 0.0, 0.0));
        assert!((pts[1].x - PI).abs() < 1e-12);
        assert!((pts[1].y - 2.0).abs() < 1e-12);
        assert!((pts[1].z - PI).abs() < 1e-12);
        assert!((pts[2].x - 2.0 * PI).abs() < 1e-12);
        assert!(pts[2].y.abs() < 1e-12);
        assert!((pts[2].z - 2.0 * PI).abs() < 1e-12);

        let hyp = cycloid_curve(1.0, &[1.0]).unwrap();
        assert!((hyp[0].x - (1.0 - 1f64.sinh())).abs() < 1e-15);
        assert!((hyp[0].y - (1.0 - 1f64.cosh())).abs() < 1e-15);

        assert!(cycloid_curve(0.0, &[1.0]).is_err());

        // arches lengthen toward criticality: g = 0.999 needs ωt ≈ 70.3 per arch
        let g: f64 = 0.999;
        let m = 2.0 * (1.0 - g * g).sqrt();
        assert!((2.0 * PI / m - 70.27).abs() < 0.01);
    }

    proptest! {
        #[test]
        fn series_matches_closed_form(
            r in (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64),
            rd in (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64),
            t in 0.01..6.0f64,
        ) {
            let r = v(r.0, r.1, r.2);
            let rd = v(rd.0, rd.1, rd.2);
            let s = casimir_radicand(&r);
            prop_assume!(s.abs() * t * t <= 20.0);
            let exact = generator_vector(&r, &rd, t).unwrap();
            let series = series_partial_generator(&r, &rd, t, 60);
            let scale = exact.max_abs().max(t * rd.max_abs()).max(1e-300);
            prop_assert!((exact - series).max_abs() <= 1e-10 * scale);
        }

        #[test]
        fn profile_bounds(s in -50.0..50.0f64, t in 0.0..10.0f64) {
            let p = scalar_profiles(s, t).unwrap();
            prop_assert!(p.f_y >= 0.0);
            if s < 0.0 {
                prop_assert!(p.f_y <= 4.0 / s.abs() * (1.0 + 1e-14));
            }
        }
    }
}
