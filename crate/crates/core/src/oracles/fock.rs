//! Truncated Fock-space sums for ⟨â⟩ and coherent-state algebra.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{default_cutoff, required_cutoff, PoissonWindow};

/// Required captured Poisson mass, 1 − 1e-10.
pub const FOCK_TAIL_TOLERANCE: f64 = 1e-10;

/// Terms below this weight are dropped from the lower tail.
const WEIGHT_FLOOR: f64 = 1e-40;

/// Photon-number sum ⟨â⟩ = α e^{−N_p} Σ_n (N_pⁿ/n!) e^{i[φ(n+1) − φ(n)]} w(n+1, n).
pub struct FockSumSpec<'a> {
    pub n_photons: f64,
    pub cutoff: u64,
    pub per_n_phase: Box<dyn Fn(u64) -> f64 + 'a>,
    /// Mirror overlap or damping factor between neighbouring sectors.
    pub per_pair_weight: Box<dyn Fn(u64, u64) -> Complex64 + 'a>,
    /// Analytic phase used only to pick the 2π winding of the result.
    pub reference_phase: Option<f64>,
}

impl<'a> FockSumSpec<'a> {
    pub fn new(n_photons: f64, per_n_phase: impl Fn(u64) -> f64 + 'a) -> Self {
        FockSumSpec {
            n_photons,
            cutoff: default_cutoff(n_photons),
            per_n_phase: Box::new(per_n_phase),
            per_pair_weight: Box::new(|_, _| Complex64::new(1.0, 0.0)),
            reference_phase: None,
        }
    }

    pub fn with_pair_weight(mut self, w: impl Fn(u64, u64) -> Complex64 + 'a) -> Self {
        self.per_pair_weight = Box::new(w);
        self
    }

    pub fn with_cutoff(mut self, cutoff: u64) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn with_reference_phase(mut self, phase: f64) -> Self {
        self.reference_phase = Some(phase);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockSumResult {
    pub mean_field: Complex64,
    /// |⟨â⟩|/|α|.
    pub modulus_factor: f64,
    /// arg(⟨â⟩/α) in (−π, π].
    pub principal_phase: f64,
    /// principal_phase + 2π·winding.
    pub phase: f64,
    pub winding: i64,
    pub cutoff: u64,
}

/// Neumaier-compensated sum.
#[derive(Debug, Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

pub fn fock_sum_mean_field(spec: &FockSumSpec<'_>, alpha: Complex64) -> Result<FockSumResult> {
    let np = alpha.norm_sqr();
    if !np.is_finite() {
        return Err(Error::invalid("alpha", "must be finite"));
    }
    if (np - spec.n_photons).abs() > 1e-12 * np.max(1.0) {
        return Err(Error::invalid("n_photons", format!("|alpha|^2 = {np} but spec has {}", spec.n_photons)));
    }
    if np == 0.0 {
        return Ok(FockSumResult {
            mean_field: Complex64::new(0.0, 0.0),
            modulus_factor: 1.0,
            principal_phase: 0.0,
            phase: spec.reference_phase.unwrap_or(0.0),
            winding: 0,
            cutoff: spec.cutoff,
        });
    }
    let window = PoissonWindow::new(np, spec.cutoff, WEIGHT_FLOOR);
    let missing = 1.0 - window.mass();
    if missing > FOCK_TAIL_TOLERANCE {
        return Err(Error::CutoffTooSmall {
            cutoff: spec.cutoff,
            required: required_cutoff(np, FOCK_TAIL_TOLERANCE),
            n_photons: np,
            missing,
        });
    }

    let mut re = Compensated::default();
    let mut im = Compensated::default();
    let mut prev_phase = (spec.per_n_phase)(window.start);
    for (n, p) in window.iter() {
        let next_phase = (spec.per_n_phase)(n + 1);
        let term = Complex64::from_polar(p, next_phase - prev_phase) * (spec.per_pair_weight)(n + 1, n);
        re.add(term.re);
        im.add(term.im);
        prev_phase = next_phase;
    }
    let s = Complex64::new(re.value(), im.value());
    let principal = s.arg();
    let reference = spec.reference_phase.unwrap_or_else(|| {
        let mode = np.floor() as u64;
        (spec.per_n_phase)(mode + 1) - (spec.per_n_phase)(mode) + (spec.per_pair_weight)(mode + 1, mode).arg()
    });
    let winding = ((reference - principal) / (2.0 * PI)).round() as i64;
    Ok(FockSumResult {
        mean_field: alpha * s,
        modulus_factor: s.norm(),
        principal_phase: principal,
        phase: principal + 2.0 * PI * winding as f64,
        winding,
        cutoff: spec.cutoff,
    })
}

/// ⟨β|γ⟩ = exp(−|β|²/2 − |γ|²/2 + β̄γ).
pub fn coherent_overlap(beta: Complex64, gamma: Complex64) -> Complex64 {
    (-0.5 * beta.norm_sqr() - 0.5 * gamma.norm_sqr() + beta.conj() * gamma).exp()
}

/// Phase per n² of an N-kick loop, by composing the kick displacements
/// D(β_j), β_j = iλe^{2πij/N}/√2, in the mirror's rotating frame with
/// D(a)D(b) = e^{i Im(a b̄)} D(a + b).
///
/// The loop closes (Σβ_j = 0) so only the accumulated phase remains.
pub fn displacement_loop_phase(lambda: f64, n_kicks: u32) -> Result<f64> {
    if n_kicks < 3 {
        return Err(Error::TooFewKicks(n_kicks));
    }
    let mut total = Complex64::new(0.0, 0.0);
    let mut phase = 0.0;
    for j in 0..n_kicks {
        let theta = 2.0 * PI * j as f64 / n_kicks as f64;
        let beta = Complex64::new(0.0, lambda / std::f64::consts::SQRT_2) * Complex64::from_polar(1.0, theta);
        phase += (beta * total.conj()).im;
        total += beta;
    }
    Ok(phase)
}
