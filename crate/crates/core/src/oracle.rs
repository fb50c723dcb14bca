//! Brute-force reference QFI: exact evolution in a truncated Fock space and
//! central finite differences in the parameter.
//!
//! The evolution diagonalizes each connected block of the sparse Hamiltonian
//! that the initial state touches. Blocks with purely real entries go through
//! the real symmetric solver.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{build_state, one_mode_k, two_mode_k, FockRepresentation, ModeCount, ProbeSpec, StateVector};
use crate::generator::series_partial_generator;
use crate::models::ModelSpec;
use crate::operator::{CMatrix, CVector, SparseOperator};
use crate::su11::AlgebraVector;

const HERMITIAN_TOL: f64 = 1e-10;
const RICHARDSON_REL_TOL: f64 = 1e-4;
const RICHARDSON_ABS_TOL: f64 = 1e-8;
const NEGATIVE_QFI_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    /// Relative step: `δ = fd_step · max(1, |λ|)`.
    pub fd_step: f64,
    pub richardson: bool,
    pub trunc_start: usize,
    pub trunc_tol: f64,
    pub trunc_max_one_mode: usize,
    /// Per-mode cap; the two-mode space has `(N+1)²` states.
    pub trunc_max_two_mode: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            fd_step: 1e-5,
            richardson: true,
            trunc_start: 32,
            trunc_tol: 1e-7,
            trunc_max_one_mode: 512,
            trunc_max_two_mode: 60,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.fd_step.is_finite() && self.fd_step > 0.0 && self.fd_step < 0.1) {
            return Err(Error::invalid(format!("fd_step must lie in (0, 0.1), got {}", self.fd_step)));
        }
        if !(self.trunc_tol.is_finite() && self.trunc_tol > 0.0) {
            return Err(Error::invalid(format!("trunc_tol must be > 0, got {}", self.trunc_tol)));
        }
        if self.trunc_start < 8 {
            return Err(Error::invalid("trunc_start must be >= 8"));
        }
        Ok(())
    }

    pub fn max_cutoff(&self, modes: ModeCount) -> usize {
        match modes {
            ModeCount::One => self.trunc_max_one_mode,
            ModeCount::Two => self.trunc_max_two_mode,
        }
    }
}

/// How the Fock cutoff is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruncationPolicy {
    Fixed(usize),
    Adaptive,
}

enum BlockEigen {
    Real { values: DVector<f64>, vectors: DMatrix<f64> },
    Complex { values: DVector<f64>, vectors: CMatrix },
}

/// `exp(-i t H)` with eigendecompositions cached per block.
pub struct Propagator {
    h: SparseOperator,
    blocks: Vec<Vec<usize>>,
    eigen: Vec<Option<BlockEigen>>,
}

impl Propagator {
    pub fn new(h: SparseOperator) -> Result<Self> {
        let residual = h.hermitian_residual();
        if residual > HERMITIAN_TOL * h.max_abs().max(1.0) {
            return Err(Error::NotHermitian(residual));
        }
        let blocks = h.connected_components();
        let eigen = blocks.iter().map(|_| None).collect();
        Ok(Self { h, blocks, eigen })
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    fn block_eigen(&mut self, k: usize) -> &BlockEigen {
        if self.eigen[k].is_none() {
            let m = self.h.dense_block(&self.blocks[k]);
            let e = if m.iter().all(|z| z.im == 0.0) {
                let e = SymmetricEigen::new(m.map(|z| z.re));
                BlockEigen::Real { values: e.eigenvalues, vectors: e.eigenvectors }
            } else {
                let e = SymmetricEigen::new(m);
                BlockEigen::Complex { values: e.eigenvalues, vectors: e.eigenvectors }
            };
            self.eigen[k] = Some(e);
        }
        self.eigen[k].as_ref().expect("filled above")
    }

    pub fn evolve(&mut self, t: f64, psi: &StateVector) -> Result<StateVector> {
        if psi.dimension() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: psi.dimension() });
        }
        if !t.is_finite() {
            return Err(Error::invalid(format!("time must be finite, got {t}")));
        }
        let v = psi.amplitudes();
        if t == 0.0 {
            return Ok(StateVector::from_unit(v.clone()));
        }
        let mut out = CVector::zeros(self.dim());
        for k in 0..self.blocks.len() {
            let idx = self.blocks[k].clone();
            if idx.iter().all(|&i| v[i] == Complex64::new(0.0, 0.0)) {
                continue;
            }
            let local = CVector::from_iterator(idx.len(), idx.iter().map(|&i| v[i]));
            let evolved = match self.block_eigen(k) {
                BlockEigen::Real { values, vectors } => {
                    let re = vectors.tr_mul(&local.map(|z| z.re));
                    let im = vectors.tr_mul(&local.map(|z| z.im));
                    let c = CVector::from_fn(values.len(), |j, _| {
                        Complex64::new(re[j], im[j]) * Complex64::from_polar(1.0, -values[j] * t)
                    });
                    let re = vectors * c.map(|z| z.re);
                    let im = vectors * c.map(|z| z.im);
                    CVector::from_fn(idx.len(), |i, _| Complex64::new(re[i], im[i]))
                }
                BlockEigen::Complex { values, vectors } => {
                    let mut c = vectors.ad_mul(&local);
                    for (j, z) in c.iter_mut().enumerate() {
                        *z *= Complex64::from_polar(1.0, -values[j] * t);
                    }
                    vectors * c
                }
            };
            for (a, &i) in idx.iter().enumerate() {
                out[i] = evolved[a];
            }
        }
        Ok(StateVector::from_unit(out))
    }
}

/// `exp(-i t H) ψ`.
pub fn evolve(h: &SparseOperator, t: f64, psi: &StateVector) -> Result<StateVector> {
    Propagator::new(h.clone())?.evolve(t, psi)
}

fn fubini_study(psi: &CVector, d: &CVector) -> f64 {
    4.0 * (d.norm_squared() - psi.dotc(d).norm_sqr())
}

/// QFI of a pure-state family from central differences of `state_at`, in the
/// phase-invariant form `4(<∂ψ|∂ψ> - |<ψ|∂ψ>|²)`.
///
/// With `richardson`, the derivative is extrapolated from steps `δ` and
/// `δ/2`; a disagreement with the `δ/2` estimate beyond `1e-4` relative is
/// reported as [`Error::RichardsonMismatch`].
pub fn fubini_study_qfi<F>(mut state_at: F, lambda: f64, delta: f64, richardson: bool) -> Result<f64>
where
    F: FnMut(f64) -> Result<CVector>,
{
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::invalid(format!("finite-difference step must be > 0, got {delta}")));
    }
    let psi = state_at(lambda)?;
    let mut central = |h: f64| -> Result<CVector> {
        let plus = state_at(lambda + h)?;
        let minus = state_at(lambda - h)?;
        Ok((plus - minus) / Complex64::from(2.0 * h))
    };
    let half = central(delta / 2.0)?;
    let f = if richardson {
        let full = central(delta)?;
        let d = (half.clone() * Complex64::from(4.0) - full) / Complex64::from(3.0);
        let coarse = fubini_study(&psi, &half);
        let extrapolated = fubini_study(&psi, &d);
        if (coarse - extrapolated).abs() > RICHARDSON_REL_TOL * extrapolated.abs() + RICHARDSON_ABS_TOL {
            return Err(Error::RichardsonMismatch { coarse, extrapolated });
        }
        extrapolated
    } else {
        fubini_study(&psi, &half)
    };
    if f < 0.0 {
        if f > -NEGATIVE_QFI_TOL {
            return Ok(0.0);
        }
        return Err(Error::NegativeQfi(f));
    }
    Ok(f)
}

/// Finite-difference QFI of `exp(-i t H(λ)) ψ` for an arbitrary family of
/// sparse Hamiltonians.
pub fn qfi_finite_difference_with<H>(
    hamiltonian: H,
    domain: (f64, f64),
    lambda: f64,
    t: f64,
    psi: &StateVector,
    cfg: &OracleConfig,
) -> Result<f64>
where
    H: Fn(f64) -> Result<SparseOperator>,
{
    cfg.validate()?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid(format!("time must be >= 0, got {t}")));
    }
    let delta = cfg.fd_step * lambda.abs().max(1.0);
    let (lo, hi) = domain;
    if !(lambda.is_finite() && lambda - delta >= lo && lambda + delta <= hi) {
        return Err(Error::DomainViolation { value: lambda, lo, hi });
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let state_at = |x: f64| -> Result<CVector> {
        let h = hamiltonian(x)?;
        Ok(evolve(&h, t, psi)?.into_amplitudes())
    };
    fubini_study_qfi(state_at, lambda, delta, cfg.richardson)
}

/// Finite-difference QFI for a catalog model in a fixed representation.
pub fn qfi_finite_difference(
    model: &ModelSpec,
    lambda: f64,
    t: f64,
    psi: &StateVector,
    rep: &FockRepresentation,
    cfg: &OracleConfig,
) -> Result<f64> {
    if rep.dimension() != psi.dimension() {
        return Err(Error::DimensionMismatch { expected: rep.dimension(), got: psi.dimension() });
    }
    qfi_finite_difference_with(|x| Ok(model.hamiltonian(x, rep)), model.domain, lambda, t, psi, cfg)
}

/// Runs `compute(N)` for `N = trunc_start, 2 trunc_start, ...` (the last step
/// clamped to the cap for `modes`) until successive values agree to
/// `trunc_tol` relative. Returns the converged value and the cutoff used.
pub fn converge_truncation<F>(mut compute: F, cfg: &OracleConfig, modes: ModeCount) -> Result<(f64, usize)>
where
    F: FnMut(usize) -> Result<f64>,
{
    cfg.validate()?;
    let cap = cfg.max_cutoff(modes);
    let mut n = cfg.trunc_start.min(cap);
    let mut previous = compute(n)?;
    while n < cap {
        n = (2 * n).min(cap);
        let value = compute(n)?;
        if (value - previous).abs() <= cfg.trunc_tol * value.abs() + 1e-14 {
            return Ok((value, n));
        }
        if n == cap {
            return Err(Error::TruncationNotConverged { n_max: cap, previous, last: value });
        }
        previous = value;
    }
    Err(Error::TruncationNotConverged { n_max: cap, previous, last: previous })
}

pub fn representation(modes: ModeCount, cutoff: usize) -> Result<FockRepresentation> {
    match modes {
        ModeCount::One => one_mode_k(cutoff),
        ModeCount::Two => two_mode_k(cutoff),
    }
}

/// Brute-force QFI of a catalog model for a probe, at a fixed cutoff or with
/// adaptive truncation.
pub fn oracle_qfi(
    model: &ModelSpec,
    lambda: f64,
    t: f64,
    probe: &ProbeSpec,
    policy: TruncationPolicy,
    cfg: &OracleConfig,
) -> Result<(f64, usize)> {
    let at_cutoff = |n: usize| -> Result<f64> {
        let rep = representation(model.modes, n)?;
        let psi = build_state(probe, &rep)?;
        qfi_finite_difference(model, lambda, t, &psi, &rep, cfg)
    };
    match policy {
        TruncationPolicy::Fixed(n) => Ok((at_cutoff(n)?, n)),
        TruncationPolicy::Adaptive => converge_truncation(at_cutoff, cfg, model.modes),
    }
}

/// `4 Var` of the truncated nested-commutator series for the generator.
pub fn qfi_series_oracle(
    model: &ModelSpec,
    lambda: f64,
    t: f64,
    psi: &StateVector,
    rep: &FockRepresentation,
    n_max: usize,
) -> Result<f64> {
    let g = series_partial_generator(&model.r(lambda), &model.rdot(lambda), t, n_max);
    Ok(4.0 * crate::fock::variance(&rep.operator(&g), psi)?)
}

/// Weights `k` and probabilities of a probe that is a superposition of
/// lowest-weight states (`|0>`, `|1>` for one mode; `|n,0>`, `|0,n>` for two).
fn lowest_weight_content(probe: &ProbeSpec, modes: ModeCount) -> Result<Vec<(f64, f64)>> {
    let labels: Vec<(Vec<usize>, Complex64)> = match probe {
        ProbeSpec::Vacuum => vec![(vec![0; modes.count()], Complex64::from(1.0))],
        ProbeSpec::Canonical if modes == ModeCount::One => {
            vec![(vec![0], Complex64::from(1.0)), (vec![1], Complex64::from(1.0))]
        }
        ProbeSpec::Fock { amplitudes } => {
            amplitudes.iter().map(|a| (a.n.as_slice().to_vec(), Complex64::new(a.re, a.im))).collect()
        }
        _ => return Err(Error::InvalidState("probe is not a lowest-weight superposition".into())),
    };
    let mut merged: Vec<(f64, Complex64)> = Vec::new();
    for (occ, c) in labels {
        let k = match (modes, occ.as_slice()) {
            (ModeCount::One, &[n]) if n <= 1 => (2 * n + 1) as f64 / 4.0,
            // |n,0> and |0,n> share a weight but sit in different sectors
            (ModeCount::Two, &[n, 0]) => (n + 1) as f64 / 2.0,
            (ModeCount::Two, &[0, n]) => -((n + 1) as f64) / 2.0,
            _ => return Err(Error::InvalidState(format!("{occ:?} is not a lowest-weight state"))),
        };
        match merged.iter_mut().find(|(kk, _)| *kk == k) {
            Some(slot) => slot.1 += c,
            None => merged.push((k, c)),
        }
    }
    let norm: f64 = merged.iter().map(|(_, c)| c.norm_sqr()).sum();
    if norm == 0.0 {
        return Err(Error::InvalidState("probe has zero norm".into()));
    }
    Ok(merged.into_iter().map(|(k, c)| (k.abs(), c.norm_sqr() / norm)).collect())
}

type Mat2 = nalgebra::Matrix2<Complex64>;

/// `exp(-i t r·K)` in the two-dimensional non-unitary representation
/// `Kx = iσx/2`, `Ky = iσy/2`, `Kz = σz/2`.
fn group_element(r: &AlgebraVector, t: f64) -> Mat2 {
    let i = Complex64::i();
    let a = Complex64::from(r.r1 * t / 2.0);
    let b = Complex64::from(r.r2 * t / 2.0);
    let c = -i * (r.r3 * t / 2.0);
    // A = aσx + bσy + cσz with A² = (a² + b² + c²) I
    let q2 = (t * t / 4.0) * (r.r1 * r.r1 + r.r2 * r.r2 - r.r3 * r.r3);
    let (ch, sh) = if q2 >= 0.0 {
        let q = q2.sqrt();
        (q.cosh(), if q == 0.0 { 1.0 } else { q.sinh() / q })
    } else {
        let q = (-q2).sqrt();
        (q.cos(), q.sin() / q)
    };
    let ch = Complex64::from(ch);
    let sh = Complex64::from(sh);
    Mat2::new(ch + sh * c, sh * (a - i * b), sh * (a + i * b), ch - sh * c)
}

/// `ln |<ψ| U(λ)† U(λ') |ψ>|` from the 2×2 representation, using
/// `<k,0| G |k,0> = conj(α)^(-2k)` for lowest-weight states.
fn log_fidelity(content: &[(f64, f64)], m0_inv: &Mat2, m1: &Mat2) -> f64 {
    let g = m0_inv * m1;
    let alpha = g[(0, 0)].conj();
    let overlap: Complex64 = content.iter().map(|&(k, p)| p * alpha.powf(-2.0 * k)).sum();
    overlap.norm().ln()
}

/// Truncation-free QFI for probes built from lowest-weight states, from the
/// fidelity `F = -8 ln|<ψ(λ)|ψ(λ+h)>| / h²` (symmetrised, Richardson
/// extrapolated). Independent of the Fock representation and of the
/// generator decomposition.
pub fn qfi_group_oracle(model: &ModelSpec, lambda: f64, t: f64, probe: &ProbeSpec) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid(format!("time must be >= 0, got {t}")));
    }
    let content = lowest_weight_content(probe, model.modes)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let m0 = group_element(&model.r(lambda), t);
    let m0_inv = m0.try_inverse().ok_or_else(|| Error::invalid("singular group element"))?;
    let (lo, hi) = model.domain;
    let estimate = |h: f64| -> Result<f64> {
        if lambda - h < lo || lambda + h > hi {
            return Err(Error::DomainViolation { value: lambda, lo, hi });
        }
        let plus = log_fidelity(&content, &m0_inv, &group_element(&model.r(lambda + h), t));
        let minus = log_fidelity(&content, &m0_inv, &group_element(&model.r(lambda - h), t));
        Ok(-4.0 * (plus + minus) / (h * h))
    };
    // Coarse pass fixes the scale, then h√F ≈ 0.02 balances the h² bias
    // against cancellation in 1 - |overlap|.
    let rough = estimate(1e-4 * lambda.abs().max(1.0))?;
    if rough <= 0.0 {
        return Ok(0.0);
    }
    let h = 0.02 / rough.sqrt();
    let (f1, f2) = (estimate(h)?, estimate(h / 2.0)?);
    Ok(((4.0 * f2 - f1) / 3.0).max(0.0))
}
