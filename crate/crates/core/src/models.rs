//! Physical models expressed as su(1,1) coefficient maps `λ → r(λ)`.
//!
//! Constant energy offsets are dropped throughout; they do not depend on the
//! estimated parameter and so cannot change the QFI.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{build_state, one_mode_k, FockRepresentation, ModeCount, ProbeSpec, StateVector};
use crate::operator::{CVector, SparseOperator};
use crate::oracle::{converge_truncation, qfi_finite_difference_with, OracleConfig, TruncationPolicy};
use crate::qfi::qfi_closed_form;
use crate::su11::AlgebraVector;

/// Anisotropic Rabi model parameters. `g_tilde = 2g / sqrt(Ω ω)` is the
/// estimated coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QrmParameters {
    #[serde(default = "one")]
    pub omega: f64,
    /// Qubit splitting Ω; only the full spin-boson model uses it.
    #[serde(default)]
    pub qubit_omega: Option<f64>,
    pub zeta: f64,
    pub g_tilde: f64,
}

fn one() -> f64 {
    1.0
}

impl QrmParameters {
    pub fn new(omega: f64, zeta: f64, g_tilde: f64) -> Self {
        Self { omega, qubit_omega: None, zeta, g_tilde }
    }

    pub fn with_qubit(mut self, qubit_omega: f64) -> Self {
        self.qubit_omega = Some(qubit_omega);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::invalid(format!("omega must be > 0, got {}", self.omega)));
        }
        if !(self.zeta.is_finite() && self.zeta >= 0.0) {
            return Err(Error::invalid(format!("zeta must be >= 0, got {}", self.zeta)));
        }
        if !(self.g_tilde.is_finite() && self.g_tilde >= 0.0) {
            return Err(Error::invalid(format!("g_tilde must be >= 0, got {}", self.g_tilde)));
        }
        if let Some(w) = self.qubit_omega {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::invalid(format!("qubit_omega must be > 0, got {w}")));
            }
        }
        Ok(())
    }

    /// Rotating-wave coupling `g̃ (1 + ζ)/2`.
    pub fn g1(&self) -> f64 {
        self.g_tilde * (1.0 + self.zeta) / 2.0
    }

    /// Counter-rotating coupling `g̃ (1 - ζ)/2`.
    pub fn g2(&self) -> f64 {
        self.g_tilde * (1.0 - self.zeta) / 2.0
    }

    /// Normal-phase critical coupling `2 / (1 + |ζ|)`.
    pub fn critical_coupling(&self) -> f64 {
        qrm_critical_coupling(self.zeta)
    }

    /// Bare coupling `g` for a given `g̃`.
    pub fn bare_coupling(&self, g_tilde: f64) -> Result<f64> {
        let big = self
            .qubit_omega
            .ok_or_else(|| Error::invalid("qubit_omega is required for the full Rabi model"))?;
        Ok(g_tilde * (big * self.omega).sqrt() / 2.0)
    }
}

pub fn qrm_critical_coupling(zeta: f64) -> f64 {
    2.0 / (1.0 + zeta.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LmgParameters {
    pub gamma: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AptEstimand {
    Kappa,
    Delta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AptParameters {
    pub delta: f64,
    pub kappa: f64,
    #[serde(default = "default_apt_estimand")]
    pub estimand: AptEstimand,
}

fn default_apt_estimand() -> AptEstimand {
    AptEstimand::Kappa
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModelKind {
    QrmEffective(QrmParameters),
    Lmg(LmgParameters),
    Apt(AptParameters),
    /// `r(λ) = base + λ·slope`.
    Linear { base: AlgebraVector, slope: AlgebraVector },
}

/// A differentiable coefficient map plus its critical set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub name: String,
    pub estimand: String,
    /// The parameter value the model was built at.
    pub nominal: f64,
    pub critical: Vec<f64>,
    pub modes: ModeCount,
    /// Closed interval of admissible `λ` for the coefficient map.
    pub domain: (f64, f64),
    /// Warnings about degenerate inputs.
    pub flags: Vec<String>,
}

impl ModelSpec {
    pub fn r(&self, lambda: f64) -> AlgebraVector {
        match self.kind {
            ModelKind::QrmEffective(p) => {
                let w = p.omega;
                let z = p.zeta;
                let g2 = lambda * lambda;
                // g2² - g1² = -ζ g̃²;  g1² + g2² = g̃² (1 + ζ²)/2
                AlgebraVector::new(-w * z * g2, 0.0, w * (2.0 - g2 * (1.0 + z * z) / 2.0))
            }
            ModelKind::Lmg(p) => AlgebraVector::new(p.gamma - 1.0, 0.0, 2.0 * lambda - p.gamma - 1.0),
            ModelKind::Apt(p) => match p.estimand {
                AptEstimand::Kappa => AlgebraVector::new(0.0, -2.0 * lambda, 2.0 * p.delta),
                AptEstimand::Delta => AlgebraVector::new(0.0, -2.0 * p.kappa, 2.0 * lambda),
            },
            ModelKind::Linear { base, slope } => base + lambda * slope,
        }
    }

    pub fn rdot(&self, lambda: f64) -> AlgebraVector {
        match self.kind {
            ModelKind::QrmEffective(p) => {
                let w = p.omega;
                let z = p.zeta;
                AlgebraVector::new(-2.0 * w * z * lambda, 0.0, -w * (1.0 + z * z) * lambda)
            }
            ModelKind::Lmg(_) => AlgebraVector::new(0.0, 0.0, 2.0),
            ModelKind::Apt(p) => match p.estimand {
                AptEstimand::Kappa => AlgebraVector::new(0.0, -2.0, 0.0),
                AptEstimand::Delta => AlgebraVector::new(0.0, 0.0, 2.0),
            },
            ModelKind::Linear { slope, .. } => slope,
        }
    }

    /// `r(λ)·K` in the given representation.
    pub fn hamiltonian(&self, lambda: f64, rep: &FockRepresentation) -> SparseOperator {
        rep.operator(&self.r(lambda))
    }

    pub fn first_critical(&self) -> Result<f64> {
        self.critical.first().copied().ok_or_else(|| Error::NoCriticalValue(self.name.clone()))
    }

    pub fn check_domain(&self, lambda: f64) -> Result<()> {
        let (lo, hi) = self.domain;
        if lambda.is_finite() && lambda >= lo && lambda <= hi {
            Ok(())
        } else {
            Err(Error::DomainViolation { value: lambda, lo, hi })
        }
    }

    /// Same model with a different fixed parameter record, keyed by field
    /// name. Used by sweeps over `ζ`.
    pub fn with_nominal(&self, lambda: f64) -> Self {
        let mut m = self.clone();
        m.nominal = lambda;
        m
    }
}

/// Effective normal-phase Rabi model, `λ = g̃`.
pub fn qrm_effective(p: &QrmParameters) -> Result<ModelSpec> {
    p.validate()?;
    Ok(ModelSpec {
        kind: ModelKind::QrmEffective(*p),
        name: "qrm".into(),
        estimand: "g_tilde".into(),
        nominal: p.g_tilde,
        critical: vec![p.critical_coupling()],
        modes: ModeCount::One,
        // r(g̃) is even in g̃, so the map extends smoothly through zero.
        domain: (f64::NEG_INFINITY, f64::INFINITY),
        flags: Vec::new(),
    })
}

/// Low-excitation Lipkin-Meshkov-Glick model, `λ = η`.
pub fn lmg(p: &LmgParameters) -> Result<ModelSpec> {
    if !(p.gamma.is_finite() && p.eta.is_finite()) {
        return Err(Error::invalid("LMG parameters must be finite"));
    }
    let mut flags = Vec::new();
    if p.gamma == 1.0 {
        flags.push("gamma = 1: r1 vanishes, only the h_z term survives and the QFI has no critical enhancement".into());
    }
    Ok(ModelSpec {
        kind: ModelKind::Lmg(*p),
        name: "lmg".into(),
        estimand: "eta".into(),
        nominal: p.eta,
        critical: vec![1.0],
        modes: ModeCount::One,
        domain: (f64::NEG_INFINITY, f64::INFINITY),
        flags,
    })
}

/// Two-mode pseudo-anti-parity-time model `2δ Kz - 2κ Ky`.
pub fn apt(p: &AptParameters) -> Result<ModelSpec> {
    if !(p.delta.is_finite() && p.delta >= 0.0 && p.kappa.is_finite() && p.kappa >= 0.0) {
        return Err(Error::invalid(format!(
            "APT requires delta, kappa >= 0, got delta = {}, kappa = {}",
            p.delta, p.kappa
        )));
    }
    let (estimand, nominal, critical) = match p.estimand {
        AptEstimand::Kappa => ("kappa", p.kappa, p.delta),
        AptEstimand::Delta => ("delta", p.delta, p.kappa),
    };
    Ok(ModelSpec {
        kind: ModelKind::Apt(*p),
        name: "apt".into(),
        estimand: estimand.into(),
        nominal,
        critical: vec![critical],
        modes: ModeCount::Two,
        domain: (0.0, f64::INFINITY),
        flags: Vec::new(),
    })
}

/// A bare linear family `r(λ) = base + λ·slope` with no critical set.
pub fn linear(base: AlgebraVector, slope: AlgebraVector, modes: ModeCount) -> ModelSpec {
    ModelSpec {
        kind: ModelKind::Linear { base, slope },
        name: "linear".into(),
        estimand: "lambda".into(),
        nominal: 0.0,
        critical: Vec::new(),
        modes,
        domain: (f64::NEG_INFINITY, f64::INFINITY),
        flags: Vec::new(),
    }
}

/// Index of `|spin, n>` in the spin ⊗ Fock basis; spin 0 is up.
fn spin_boson_index(spin: usize, n: usize, cutoff: usize) -> usize {
    spin * (cutoff + 1) + n
}

/// `ω a†a + (Ω/2) σz + g[(σ+ a + σ- a†) + ζ(σ+ a† + σ- a)]` on spin ⊗ Fock.
pub fn full_rabi_hamiltonian(p: &QrmParameters, g: f64, cutoff: usize) -> Result<SparseOperator> {
    p.validate()?;
    if cutoff < 4 {
        return Err(Error::invalid(format!("full Rabi model needs cutoff >= 4, got {cutoff}")));
    }
    let big = p
        .qubit_omega
        .ok_or_else(|| Error::invalid("qubit_omega is required for the full Rabi model"))?;
    let dim = 2 * (cutoff + 1);
    let up = |n| spin_boson_index(0, n, cutoff);
    let down = |n| spin_boson_index(1, n, cutoff);
    let mut t = Vec::with_capacity(5 * dim);
    let c = Complex64::from;
    for n in 0..=cutoff {
        t.push((up(n), up(n), c(p.omega * n as f64 + big / 2.0)));
        t.push((down(n), down(n), c(p.omega * n as f64 - big / 2.0)));
        if n < cutoff {
            let s = ((n + 1) as f64).sqrt();
            // σ+ a : |↑, n> <↓, n+1|, and its conjugate σ- a†
            t.push((up(n), down(n + 1), c(g * s)));
            t.push((down(n + 1), up(n), c(g * s)));
            // ζ σ+ a† : |↑, n+1> <↓, n|, and its conjugate ζ σ- a
            t.push((up(n + 1), down(n), c(g * p.zeta * s)));
            t.push((down(n), up(n + 1), c(g * p.zeta * s)));
        }
    }
    Ok(SparseOperator::from_triplets(dim, t))
}

/// Embeds a bosonic state as `|↓> ⊗ ψ`.
pub fn lift_spin_down(boson: &StateVector) -> StateVector {
    let n = boson.dimension();
    let mut v = CVector::zeros(2 * n);
    v.rows_mut(n, n).copy_from(boson.amplitudes());
    StateVector::normalized(v).expect("lifted state keeps unit norm")
}

/// Full-model versus effective-model QFI at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwComparison {
    pub f_full: f64,
    pub f_eff: f64,
    /// `|F_full - F_eff| / F_eff`, or 0 when `F_eff = 0`.
    pub gap: f64,
    pub cutoff_used: usize,
}

/// QFI about `g̃` of the full Rabi model (spin-down ⊗ probe) by finite
/// differences.
pub fn full_rabi_qfi(
    p: &QrmParameters,
    t: f64,
    probe: &ProbeSpec,
    policy: TruncationPolicy,
    cfg: &OracleConfig,
) -> Result<(f64, usize)> {
    let at_cutoff = |cutoff: usize| -> Result<f64> {
        let boson = build_state(probe, &one_mode_k(cutoff)?)?;
        let psi = lift_spin_down(&boson);
        let ham = |g_tilde: f64| full_rabi_hamiltonian(p, p.bare_coupling(g_tilde)?, cutoff);
        qfi_finite_difference_with(ham, (f64::NEG_INFINITY, f64::INFINITY), p.g_tilde, t, &psi, cfg)
    };
    match policy {
        TruncationPolicy::Fixed(n) => Ok((at_cutoff(n)?, n)),
        TruncationPolicy::Adaptive => converge_truncation(at_cutoff, cfg, ModeCount::One),
    }
}

pub fn sw_effective_check(
    p: &QrmParameters,
    t: f64,
    probe: &ProbeSpec,
    policy: TruncationPolicy,
    cfg: &OracleConfig,
) -> Result<SwComparison> {
    p.validate()?;
    if p.g_tilde >= p.critical_coupling() {
        return Err(Error::invalid(format!(
            "effective model holds only in the normal phase, g_tilde = {} >= {}",
            p.g_tilde,
            p.critical_coupling()
        )));
    }
    let model = qrm_effective(p)?;
    let rep = one_mode_k(probe.max_excitation().unwrap_or(cfg.trunc_start).max(2) + 2)?;
    let psi = build_state(probe, &rep)?;
    let f_eff = qfi_closed_form(&model, p.g_tilde, t, &psi, &rep, false)?.total;
    let (f_full, cutoff_used) = full_rabi_qfi(p, t, probe, policy, cfg)?;
    let gap = if f_eff == 0.0 { 0.0 } else { (f_full - f_eff).abs() / f_eff };
    Ok(SwComparison { f_full, f_eff, gap, cutoff_used })
}
