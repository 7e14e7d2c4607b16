//! Michelson-interferometer intensities and visibilities.
//!
//! Port convention: detector a takes the minus branch,
//! I_a = (1 − V cos(Φ − φ))/2 and I_b = 1 − I_a, with I₀ = 1.

use std::f64::consts::{PI, SQRT_2};

use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{one_minus_cos, required_cutoff, theta_minus_sin, PoissonWindow};
use crate::oracles::fock::FOCK_TAIL_TOLERANCE;
use crate::params::{derive_couplings, PhysicalConstants, SystemParams};

/// Largest cutoff for which the dense reduced matrix is built.
pub const MAX_DENSE_CUTOFF: u64 = 4096;

const PHI_GRID_POINTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VisibilityPicture {
    Quantum,
    Classical,
    ClassicalNoisy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilitySample {
    pub t: f64,
    /// Thermal / correlation factor.
    pub nu_cor: f64,
    /// Kerr (quantum) or intensity-noise (noisy classical) factor.
    pub nu_kerr: f64,
    pub nu_total: f64,
    pub picture: VisibilityPicture,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VisibilityCurve {
    pub samples: Vec<VisibilitySample>,
}

impl VisibilityCurve {
    pub fn max_gap(&self, other: &VisibilityCurve) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a.nu_total - b.nu_total).abs())
            .fold(0.0, f64::max)
    }
}

/// ϱ² is exponentially distributed with mean k_B T.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalEnsembleSpec {
    pub temperature: f64,
    /// 1/(k_B T); infinite at T = 0.
    pub beta: f64,
    /// √(k_B T).
    pub rho_scale: f64,
}

impl ThermalEnsembleSpec {
    pub fn new(temperature: f64, consts: &PhysicalConstants) -> Result<Self> {
        if !(temperature >= 0.0) || !temperature.is_finite() {
            return Err(Error::invalid("temperature", "must be non-negative and finite"));
        }
        let kt = consts.k_b * temperature;
        Ok(ThermalEnsembleSpec {
            temperature,
            beta: 1.0 / kt,
            rho_scale: kt.sqrt(),
        })
    }

    pub fn mean_energy(&self) -> f64 {
        self.rho_scale * self.rho_scale
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid("t", "must be non-negative and finite"));
    }
    Ok(())
}

/// ν_q = e^{−k²(1 − cos ωt)(2n̄ + 1)} · e^{−N_p[1 − cos 2k²(ωt − sin ωt)]}.
pub fn quantum_visibility(k: f64, n_bar: f64, n_photons: f64, omega_m: f64, t: f64) -> Result<VisibilitySample> {
    check_time(t)?;
    if !(n_bar >= 0.0) {
        return Err(Error::invalid("n_bar", "must be non-negative"));
    }
    let wt = omega_m * t;
    let nu_cor = (-k * k * one_minus_cos(wt) * (2.0 * n_bar + 1.0)).exp();
    let nu_kerr = (-n_photons * one_minus_cos(2.0 * k * k * theta_minus_sin(wt))).exp();
    Ok(VisibilitySample {
        t,
        nu_cor,
        nu_kerr,
        nu_total: nu_cor * nu_kerr,
        picture: VisibilityPicture::Quantum,
    })
}

pub fn quantum_visibility_curve(k: f64, n_bar: f64, n_photons: f64, omega_m: f64, times: &[f64]) -> Result<VisibilityCurve> {
    let samples = times
        .iter()
        .map(|&t| quantum_visibility(k, n_bar, n_photons, omega_m, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(VisibilityCurve { samples })
}

/// Drive phase (ω/ω_f)χ²E₀(ωt − sin ωt) = 2N_p k²(ωt − sin ωt).
pub fn classical_drive_phase(k: f64, n_photons: f64, omega_t: f64) -> f64 {
    2.0 * n_photons * k * k * theta_minus_sin(omega_t)
}

/// φ_c = √2χϱ[cos θ sin ωt + sin θ(1 − cos ωt)] + (ω/ω_f)χ²E₀(ωt − sin ωt)
/// for a mirror starting at energy ϱ² and phase-space angle θ.
pub fn classical_phase_thermal(
    rho: f64,
    theta: f64,
    params: &SystemParams,
    consts: &PhysicalConstants,
    n_photons: f64,
    t: f64,
) -> Result<f64> {
    if !(rho >= 0.0) {
        return Err(Error::invalid("rho", "must be non-negative"));
    }
    let d = derive_couplings(params, consts)?;
    let wt = params.omega_m() * t;
    let energy = consts.hbar * params.omega_f() * n_photons;
    Ok(thermal_fluctuation_phase(d.chi, rho, theta, wt)
        + params.omega_m() / params.omega_f() * d.chi * d.chi * energy * theta_minus_sin(wt))
}

pub(crate) fn thermal_fluctuation_phase(chi: f64, rho: f64, theta: f64, omega_t: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    SQRT_2 * chi * rho * (c * omega_t.sin() + s * one_minus_cos(omega_t))
}

/// ν_c = exp(−χ² k_B T (1 − cos ωt)); exactly 1 at T = 0.
pub fn classical_visibility(params: &SystemParams, consts: &PhysicalConstants, temperature: f64, t: f64) -> Result<VisibilitySample> {
    check_time(t)?;
    let ens = ThermalEnsembleSpec::new(temperature, consts)?;
    let d = derive_couplings(params, consts)?;
    let nu_cor = if temperature == 0.0 {
        1.0
    } else {
        (-d.chi * d.chi * ens.mean_energy() * one_minus_cos(params.omega_m() * t)).exp()
    };
    Ok(VisibilitySample {
        t,
        nu_cor,
        nu_kerr: 1.0,
        nu_total: nu_cor,
        picture: VisibilityPicture::Classical,
    })
}

/// ν̃_c = ν_c · exp(−2N_p²k⁴Δ²(ωt − sin ωt)²), Δ² the relative variance of the
/// field energy.
pub fn noisy_classical_visibility(
    params: &SystemParams,
    consts: &PhysicalConstants,
    temperature: f64,
    n_photons: f64,
    delta_sq: f64,
    t: f64,
) -> Result<VisibilitySample> {
    if !(delta_sq >= 0.0) {
        return Err(Error::invalid("delta_sq", "must be non-negative"));
    }
    let base = classical_visibility(params, consts, temperature, t)?;
    let k = derive_couplings(params, consts)?.k;
    let drive = classical_drive_phase(k, n_photons, params.omega_m() * t);
    let nu_kerr = (-0.5 * drive * drive * delta_sq).exp();
    Ok(VisibilitySample {
        t,
        nu_cor: base.nu_cor,
        nu_kerr,
        nu_total: base.nu_cor * nu_kerr,
        picture: VisibilityPicture::ClassicalNoisy,
    })
}

fn ports(visibility: f64, phase_difference: f64) -> (f64, f64) {
    let a = 0.5 * (1.0 - visibility * phase_difference.cos());
    (a, 1.0 - a)
}

/// Detector intensities for a coherent probe |α⟩ and a thermal mirror,
/// with phase-shifter setting `phi`.
pub fn quantum_detector_intensities(alpha: Complex64, k: f64, n_bar: f64, omega_m: f64, t: f64, phi: f64) -> Result<(f64, f64)> {
    let np = alpha.norm_sqr();
    let v = quantum_visibility(k, n_bar, np, omega_m, t)?;
    let s = theta_minus_sin(omega_m * t);
    let phase = alpha.arg() + k * k * s + np * (2.0 * k * k * s).sin();
    Ok(ports(v.nu_total, phase - phi))
}

/// Thermal- and noise-averaged classical intensities; with Δ² > 0 the
/// contrast term carries the extra −DΔ² sin(D − φ) from the intensity
/// weighting of the noisy energy.
#[allow(clippy::too_many_arguments)]
pub fn averaged_classical_intensities(
    params: &SystemParams,
    consts: &PhysicalConstants,
    temperature: f64,
    n_photons: f64,
    delta_sq: f64,
    t: f64,
    phi: f64,
) -> Result<(f64, f64)> {
    let v = noisy_classical_visibility(params, consts, temperature, n_photons, delta_sq, t)?;
    let k = derive_couplings(params, consts)?.k;
    let drive = classical_drive_phase(k, n_photons, params.omega_m() * t);
    let arg = drive - phi;
    let contrast = v.nu_total * (arg.cos() - drive * delta_sq * arg.sin());
    let a = 0.5 * (1.0 - contrast);
    Ok((a, 1.0 - a))
}

fn golden_section(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, maximize: bool) -> f64 {
    let g = |x: f64| if maximize { -f(x) } else { f(x) };
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = g(x1);
    let mut f2 = g(x2);
    for _ in 0..100 {
        if (hi - lo).abs() < 1e-12 {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = g(x2);
        }
    }
    f(0.5 * (lo + hi))
}

/// (I_max − I_min)/(I_max + I_min) of one detector over the phase shifter,
/// from a 10⁴-point grid refined by golden-section search.
pub fn visibility_from_intensities(intensity: impl Fn(f64) -> f64) -> f64 {
    let step = 2.0 * PI / PHI_GRID_POINTS as f64;
    let grid: Vec<f64> = (0..PHI_GRID_POINTS).map(|i| intensity(i as f64 * step)).collect();
    let (mut imax, mut imin) = (0usize, 0usize);
    for (i, &v) in grid.iter().enumerate() {
        if v > grid[imax] {
            imax = i;
        }
        if v < grid[imin] {
            imin = i;
        }
    }
    let refine = |i: usize, maximize: bool| {
        let c = i as f64 * step;
        let best = golden_section(&intensity, c - step, c + step, maximize);
        if maximize {
            best.max(grid[i])
        } else {
            best.min(grid[i])
        }
    };
    let hi = refine(imax, true);
    let lo = refine(imin, false);
    (hi - lo) / (hi + lo)
}

/// Reduced field state after tracing out a thermal mirror, dense over
/// 0..=cutoff in both indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedFieldMatrix {
    pub cutoff: u64,
    pub alpha: Complex64,
    pub k: f64,
    pub n_bar: f64,
    pub omega_t: f64,
    entries: Vec<Complex64>,
}

impl ReducedFieldMatrix {
    fn dim(&self) -> usize {
        self.cutoff as usize + 1
    }

    pub fn get(&self, n: u64, m: u64) -> Complex64 {
        self.entries[n as usize * self.dim() + m as usize]
    }

    pub fn trace(&self) -> f64 {
        (0..=self.cutoff).map(|n| self.get(n, n).re).sum()
    }

    /// ⟨â⟩ = Σ √(n+1) ρ_{n+1,n}.
    pub fn mean_field(&self) -> Complex64 {
        (0..self.cutoff)
            .map(|n| ((n + 1) as f64).sqrt() * self.get(n + 1, n))
            .sum()
    }

    pub fn max_hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for n in 0..=self.cutoff {
            for m in 0..n {
                worst = worst.max((self.get(n, m) - self.get(m, n).conj()).norm());
            }
        }
        worst
    }
}

/// ρ_nm = e^{−|α|²} αⁿ ᾱ^m/√(n!m!) · e^{ik²(n² − m²)(ωt − sin ωt)} · e^{−k²(n−m)²(1 − cos ωt)(2n̄+1)}.
///
/// A cutoff below N_p + 10√N_p is raised with a warning.
pub fn reduced_field_density_matrix(alpha: Complex64, k: f64, n_bar: f64, omega_t: f64, cutoff: u64) -> Result<ReducedFieldMatrix> {
    if !(n_bar >= 0.0) {
        return Err(Error::invalid("n_bar", "must be non-negative"));
    }
    let np = alpha.norm_sqr();
    let floor = (np + 10.0 * np.sqrt()).ceil() as u64;
    let cutoff = if cutoff < floor {
        warn!("density-matrix cutoff {cutoff} raised to {floor} for N_p = {np}");
        floor
    } else {
        cutoff
    };
    if cutoff > MAX_DENSE_CUTOFF {
        return Err(Error::invalid(
            "cutoff",
            format!("{cutoff} exceeds the dense-matrix limit {MAX_DENSE_CUTOFF}"),
        ));
    }
    let window = PoissonWindow::new(np, cutoff, 0.0);
    let missing = 1.0 - window.mass();
    if missing > FOCK_TAIL_TOLERANCE {
        return Err(Error::CutoffTooSmall {
            cutoff,
            required: required_cutoff(np, FOCK_TAIL_TOLERANCE),
            n_photons: np,
            missing,
        });
    }
    let dim = cutoff as usize + 1;
    let mut amp = vec![0.0; dim];
    for (n, w) in window.iter() {
        amp[n as usize] = w.sqrt();
    }
    let arg = alpha.arg();
    let s = theta_minus_sin(omega_t);
    let damping = k * k * one_minus_cos(omega_t) * (2.0 * n_bar + 1.0);
    let entries: Vec<Complex64> = (0..dim * dim)
        .into_par_iter()
        .map(|idx| {
            let (n, m) = (idx / dim, idx % dim);
            let (nf, mf) = (n as f64, m as f64);
            let d = nf - mf;
            let phase = d * arg + k * k * (nf * nf - mf * mf) * s;
            Complex64::from_polar(amp[n] * amp[m] * (-damping * d * d).exp(), phase)
        })
        .collect();
    Ok(ReducedFieldMatrix {
        cutoff,
        alpha,
        k,
        n_bar,
        omega_t,
        entries,
    })
}
