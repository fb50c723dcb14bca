//! Truncated Fock-space matrices for the su(1,1) generators.
//!
//! One mode:  `Kx = (a² + a†²)/4`, `Ky = i(a² - a†²)/4`, `Kz = (a†a + a a†)/4`.
//! Two modes: `Kx = (a†b† + ab)/2`, `Ky = i(ab - a†b†)/2`, `Kz = (a†a + b†b + 1)/2`.
//!
//! Two-mode basis index is `n_a * (N + 1) + n_b`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{CVector, SparseOperator};
use crate::su11::AlgebraVector;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeCount {
    One,
    Two,
}

impl ModeCount {
    pub fn count(self) -> usize {
        match self {
            ModeCount::One => 1,
            ModeCount::Two => 2,
        }
    }

    pub fn dimension(self, cutoff: usize) -> usize {
        match self {
            ModeCount::One => cutoff + 1,
            ModeCount::Two => (cutoff + 1) * (cutoff + 1),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FockRepresentation {
    modes: ModeCount,
    cutoff: usize,
    kx: SparseOperator,
    ky: SparseOperator,
    kz: SparseOperator,
}

impl FockRepresentation {
    pub fn new(modes: ModeCount, cutoff: usize) -> Result<Self> {
        match modes {
            ModeCount::One => one_mode_k(cutoff),
            ModeCount::Two => two_mode_k(cutoff),
        }
    }

    pub fn modes(&self) -> ModeCount {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dimension(&self) -> usize {
        self.kx.dim()
    }

    pub fn kx(&self) -> &SparseOperator {
        &self.kx
    }

    pub fn ky(&self) -> &SparseOperator {
        &self.ky
    }

    pub fn kz(&self) -> &SparseOperator {
        &self.kz
    }

    /// `b1 Kx + b2 Ky + b3 Kz`.
    pub fn operator(&self, b: &AlgebraVector) -> SparseOperator {
        SparseOperator::linear_combination(&[
            (Complex64::from(b.r1), &self.kx),
            (Complex64::from(b.r2), &self.ky),
            (Complex64::from(b.r3), &self.kz),
        ])
    }

    /// The same representation with `c·1` added to every generator.
    /// Physically a λ-independent energy offset.
    pub fn shifted(&self, c: f64) -> Self {
        let id = SparseOperator::identity(self.dimension());
        let one = Complex64::from(1.0);
        let shift = |k: &SparseOperator| SparseOperator::linear_combination(&[(one, k), (Complex64::from(c), &id)]);
        Self { modes: self.modes, cutoff: self.cutoff, kx: shift(&self.kx), ky: shift(&self.ky), kz: shift(&self.kz) }
    }

    /// Occupation numbers of a basis index.
    pub fn occupation(&self, index: usize) -> (usize, usize) {
        match self.modes {
            ModeCount::One => (index, 0),
            ModeCount::Two => (index / (self.cutoff + 1), index % (self.cutoff + 1)),
        }
    }

    pub fn index_of(&self, occupation: &[usize]) -> Result<usize> {
        let n = self.cutoff;
        match (self.modes, occupation) {
            (ModeCount::One, [k]) if *k <= n => Ok(*k),
            (ModeCount::Two, [a, b]) if *a <= n && *b <= n => Ok(a * (n + 1) + b),
            (ModeCount::One, [_]) | (ModeCount::Two, [_, _]) => Err(Error::InvalidState(format!(
                "occupation {occupation:?} exceeds cutoff {n}"
            ))),
            _ => Err(Error::InvalidState(format!(
                "occupation {occupation:?} does not match a {:?}-mode representation",
                self.modes
            ))),
        }
    }

    /// Basis indices whose total excitation is at most `N - 2`. Generator
    /// products acting on these never reach past the truncation edge.
    pub fn truncation_safe_indices(&self) -> Vec<usize> {
        let limit = self.cutoff.saturating_sub(2);
        (0..self.dimension())
            .filter(|&i| {
                let (a, b) = self.occupation(i);
                a + b <= limit
            })
            .collect()
    }
}

fn check_cutoff(cutoff: usize) -> Result<()> {
    if cutoff < 2 {
        return Err(Error::invalid(format!("cutoff must be at least 2, got {cutoff}")));
    }
    Ok(())
}

pub fn one_mode_k(cutoff: usize) -> Result<FockRepresentation> {
    check_cutoff(cutoff)?;
    let dim = cutoff + 1;
    let (mut kx, mut ky, mut kz) = (Vec::new(), Vec::new(), Vec::new());
    for n in 0..dim {
        kz.push((n, n, Complex64::from((2 * n + 1) as f64 / 4.0)));
        if n + 2 < dim {
            // <n+2| a†² |n> = sqrt((n+1)(n+2))
            let amp = (((n + 1) * (n + 2)) as f64).sqrt() / 4.0;
            kx.push((n + 2, n, Complex64::from(amp)));
            kx.push((n, n + 2, Complex64::from(amp)));
            ky.push((n + 2, n, -I * amp));
            ky.push((n, n + 2, I * amp));
        }
    }
    Ok(FockRepresentation {
        modes: ModeCount::One,
        cutoff,
        kx: SparseOperator::from_triplets(dim, kx),
        ky: SparseOperator::from_triplets(dim, ky),
        kz: SparseOperator::from_triplets(dim, kz),
    })
}

pub fn two_mode_k(cutoff: usize) -> Result<FockRepresentation> {
    check_cutoff(cutoff)?;
    let side = cutoff + 1;
    let dim = side * side;
    let idx = |a: usize, b: usize| a * side + b;
    let (mut kx, mut ky, mut kz) = (Vec::new(), Vec::new(), Vec::new());
    for a in 0..side {
        for b in 0..side {
            let i = idx(a, b);
            kz.push((i, i, Complex64::from((a + b + 1) as f64 / 2.0)));
            if a < cutoff && b < cutoff {
                // <a+1, b+1| a†b† |a, b> = sqrt((a+1)(b+1))
                let j = idx(a + 1, b + 1);
                let amp = (((a + 1) * (b + 1)) as f64).sqrt() / 2.0;
                kx.push((j, i, Complex64::from(amp)));
                kx.push((i, j, Complex64::from(amp)));
                ky.push((j, i, -I * amp));
                ky.push((i, j, I * amp));
            }
        }
    }
    Ok(FockRepresentation {
        modes: ModeCount::Two,
        cutoff,
        kx: SparseOperator::from_triplets(dim, kx),
        ky: SparseOperator::from_triplets(dim, ky),
        kz: SparseOperator::from_triplets(dim, kz),
    })
}

/// A unit-norm state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
}

impl StateVector {
    /// Normalises `amplitudes`; fails on zero norm.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState(format!("cannot normalise a vector of norm {norm}")));
        }
        Ok(Self { amplitudes: amplitudes.unscale(norm) })
    }

    /// Wraps an already-normalised vector. Used for evolved states, where the
    /// norm is preserved up to roundoff.
    pub(crate) fn from_unit(amplitudes: CVector) -> Self {
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }
}

/// Basis label in a state description: `3` for one mode, `[1, 2]` for two.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Occupation {
    One(usize),
    Two([usize; 2]),
}

impl Occupation {
    pub fn as_slice(&self) -> &[usize] {
        match self {
            Occupation::One(n) => std::slice::from_ref(n),
            Occupation::Two(ab) => ab,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockAmplitude {
    pub n: Occupation,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Declarative probe-state description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProbeSpec {
    Vacuum,
    /// `(|0> + |1>)/sqrt(2)` on a single mode.
    Canonical,
    Fock { amplitudes: Vec<FockAmplitude> },
    Coherent { re: f64, #[serde(default)] im: f64 },
}

impl ProbeSpec {
    /// Highest total occupation with nonzero weight; `None` for coherent states.
    pub fn max_excitation(&self) -> Option<usize> {
        match self {
            ProbeSpec::Vacuum => Some(0),
            ProbeSpec::Canonical => Some(1),
            ProbeSpec::Fock { amplitudes } => {
                amplitudes.iter().map(|a| a.n.as_slice().iter().sum()).max()
            }
            ProbeSpec::Coherent { .. } => None,
        }
    }
}

pub fn build_state(spec: &ProbeSpec, rep: &FockRepresentation) -> Result<StateVector> {
    let dim = rep.dimension();
    let mut psi = CVector::zeros(dim);
    match spec {
        ProbeSpec::Vacuum => psi[0] = Complex64::from(1.0),
        ProbeSpec::Canonical => {
            if rep.modes() != ModeCount::One {
                return Err(Error::InvalidState("the canonical probe is a one-mode state".into()));
            }
            psi[0] = Complex64::from(1.0);
            psi[1] = Complex64::from(1.0);
        }
        ProbeSpec::Fock { amplitudes } => {
            if amplitudes.is_empty() {
                return Err(Error::InvalidState("empty Fock superposition".into()));
            }
            for amp in amplitudes {
                let i = rep.index_of(amp.n.as_slice())?;
                psi[i] += Complex64::new(amp.re, amp.im);
            }
        }
        ProbeSpec::Coherent { re, im } => {
            if rep.modes() != ModeCount::One {
                return Err(Error::InvalidState("coherent probes are one-mode states".into()));
            }
            let alpha = Complex64::new(*re, *im);
            let mut c = Complex64::from((-0.5 * alpha.norm_sqr()).exp());
            psi[0] = c;
            for n in 1..dim {
                c *= alpha / (n as f64).sqrt();
                psi[n] = c;
            }
        }
    }
    StateVector::normalized(psi)
}

/// First and second moments of two Hermitian observables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean_a: f64,
    pub mean_b: f64,
    pub var_a: f64,
    pub var_b: f64,
    /// `<{A, B}>/2 - <A><B>`.
    pub cov: f64,
}

const IMAG_TOL: f64 = 1e-12;

fn real_part_checked(z: Complex64, scale: f64) -> Result<f64> {
    if z.im.abs() > IMAG_TOL * scale.max(1.0) {
        return Err(Error::NotHermitian(z.im.abs()));
    }
    Ok(z.re)
}

pub fn moments(a: &SparseOperator, b: &SparseOperator, psi: &StateVector) -> Result<Moments> {
    let dim = psi.dimension();
    for m in [a, b] {
        if m.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: m.dim() });
        }
    }
    let v = psi.amplitudes();
    let av = a.apply(v);
    let bv = b.apply(v);
    let scale = av.norm() * bv.norm() + av.norm_squared() + bv.norm_squared();
    let mean_a = real_part_checked(v.dotc(&av), scale)?;
    let mean_b = real_part_checked(v.dotc(&bv), scale)?;
    // For Hermitian A, B: <A²> = |Aψ|², <{A,B}>/2 = Re <Aψ|Bψ>.
    let var_a = av.norm_squared() - mean_a * mean_a;
    let var_b = bv.norm_squared() - mean_b * mean_b;
    let cov = av.dotc(&bv).re - mean_a * mean_b;
    Ok(Moments { mean_a, mean_b, var_a, var_b, cov })
}

/// `Var A` alone.
pub fn variance(a: &SparseOperator, psi: &StateVector) -> Result<f64> {
    Ok(moments(a, a, psi)?.var_a)
}
