//! Monte Carlo averages over the thermal mirror ensemble and Gaussian
//! field-energy noise.
//!
//! Samples are split into 32 shards. Shard `b` draws from ChaCha8 seeded
//! with `seed` on stream `b`, so results do not depend on thread count.
//! Standard errors are sample standard deviations over √n; shard moment
//! sums are combined in shard order.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::{derive_couplings, PhysicalConstants, SystemParams};
use crate::visibility::{classical_drive_phase, thermal_fluctuation_phase, ThermalEnsembleSpec};

pub const MC_BATCHES: usize = 32;
pub const MIN_MC_SAMPLES: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl McEstimate {
    /// |mean − value| in units of the standard error (0/0 counts as 0).
    pub fn deviation_sigmas(&self, value: f64) -> f64 {
        let d = (self.mean - value).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }
}

fn shard_sizes(n_samples: u64) -> Vec<u64> {
    let base = n_samples / MC_BATCHES as u64;
    let extra = n_samples % MC_BATCHES as u64;
    (0..MC_BATCHES as u64).map(|b| base + u64::from(b < extra)).collect()
}

fn shard_rng(seed: u64, shard: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard as u64);
    rng
}

fn check_inputs(temperature: f64, t: f64, n_samples: u64) -> Result<()> {
    if n_samples < MIN_MC_SAMPLES {
        return Err(Error::invalid("n_samples", format!("need at least {MIN_MC_SAMPLES}, got {n_samples}")));
    }
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return Err(Error::invalid("temperature", "must be non-negative and finite"));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid("t", "must be non-negative and finite"));
    }
    Ok(())
}

/// Standard error of a mean from the sum and sum of squares of `n` samples.
fn sample_std_error(sum: f64, sum_sq: f64, n: u64) -> f64 {
    let n = n as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    (var / n).sqrt()
}

struct ThermalSampler {
    rho_sq: Option<Exp<f64>>,
    chi: f64,
    omega_t: f64,
}

impl ThermalSampler {
    fn new(params: &SystemParams, consts: &PhysicalConstants, temperature: f64, t: f64) -> Result<Self> {
        let ens = ThermalEnsembleSpec::new(temperature, consts)?;
        let rho_sq = if temperature > 0.0 {
            Some(Exp::new(ens.beta).map_err(|e| Error::invalid("temperature", e.to_string()))?)
        } else {
            None
        };
        Ok(ThermalSampler {
            rho_sq,
            chi: derive_couplings(params, consts)?.chi,
            omega_t: params.omega_m() * t,
        })
    }

    /// Thermal part of φ_c for one draw of (ϱ², θ).
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match &self.rho_sq {
            None => 0.0,
            Some(exp) => {
                let rho = exp.sample(rng).sqrt();
                let theta = 2.0 * PI * rng.random::<f64>();
                thermal_fluctuation_phase(self.chi, rho, theta, self.omega_t)
            }
        }
    }
}

/// |⟨e^{iφ_c}⟩| over ϱ² ~ Exp(mean k_B T), θ ~ U[0, 2π).
///
/// The deterministic drive is factored out, which leaves the modulus
/// unchanged. The standard error uses the samples projected on the
/// direction of the overall mean.
pub fn mc_classical_visibility(
    params: &SystemParams,
    consts: &PhysicalConstants,
    temperature: f64,
    n_photons: f64,
    t: f64,
    n_samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_inputs(temperature, t, n_samples)?;
    if !(n_photons >= 0.0) {
        return Err(Error::invalid("n_photons", "must be non-negative"));
    }
    let sampler = ThermalSampler::new(params, consts, temperature, t)?;
    if sampler.rho_sq.is_none() {
        return Ok(McEstimate {
            mean: 1.0,
            std_error: 0.0,
            n_samples,
            seed,
        });
    }
    // Per shard: Σz, Σ(Re z)², Σ(Im z)², Σ Re z Im z.
    let moments: Vec<(Complex64, f64, f64, f64)> = shard_sizes(n_samples)
        .par_iter()
        .enumerate()
        .map(|(b, &size)| {
            let mut rng = shard_rng(seed, b);
            let mut acc = (Complex64::new(0.0, 0.0), 0.0, 0.0, 0.0);
            for _ in 0..size {
                let z = Complex64::from_polar(1.0, sampler.draw(&mut rng));
                acc.0 += z;
                acc.1 += z.re * z.re;
                acc.2 += z.im * z.im;
                acc.3 += z.re * z.im;
            }
            acc
        })
        .collect();
    let (mut sum, mut rr, mut ii, mut ri) = (Complex64::new(0.0, 0.0), 0.0, 0.0, 0.0);
    for m in &moments {
        sum += m.0;
        rr += m.1;
        ii += m.2;
        ri += m.3;
    }
    let total = sum / n_samples as f64;
    let mean = total.norm();
    // Project each sample on the direction of the mean: x = Re z cos a + Im z sin a.
    let (c, s) = if mean > 0.0 { (total.re / mean, total.im / mean) } else { (1.0, 0.0) };
    let proj_sum = sum.re * c + sum.im * s;
    let proj_sq = rr * c * c + ii * s * s + 2.0 * ri * c * s;
    Ok(McEstimate {
        mean,
        std_error: sample_std_error(proj_sum, proj_sq, n_samples),
        n_samples,
        seed,
    })
}

/// Aligned-shifter contrast ⟨(1 − ε) cos(δφ_th − Dε)⟩ with field energy
/// E₀(1 − ε), ε ~ N(0, Δ²), and the phase shifter set to the mean drive D.
#[allow(clippy::too_many_arguments)]
pub fn mc_noisy_visibility(
    params: &SystemParams,
    consts: &PhysicalConstants,
    temperature: f64,
    n_photons: f64,
    delta_sq: f64,
    t: f64,
    n_samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_inputs(temperature, t, n_samples)?;
    if !(delta_sq >= 0.0) || !delta_sq.is_finite() {
        return Err(Error::invalid("delta_sq", "must be non-negative and finite"));
    }
    if delta_sq == 0.0 {
        return mc_classical_visibility(params, consts, temperature, n_photons, t, n_samples, seed);
    }
    let sampler = ThermalSampler::new(params, consts, temperature, t)?;
    let k = derive_couplings(params, consts)?.k;
    let drive = classical_drive_phase(k, n_photons, params.omega_m() * t);
    let noise = Normal::new(0.0, delta_sq.sqrt()).map_err(|e| Error::invalid("delta_sq", e.to_string()))?;
    let moments: Vec<(f64, f64)> = shard_sizes(n_samples)
        .par_iter()
        .enumerate()
        .map(|(b, &size)| {
            let mut rng = shard_rng(seed, b);
            let mut acc = (0.0, 0.0);
            for _ in 0..size {
                let delta = sampler.draw(&mut rng);
                let eps = noise.sample(&mut rng);
                let x = (1.0 - eps) * (delta - drive * eps).cos();
                acc.0 += x;
                acc.1 += x * x;
            }
            acc
        })
        .collect();
    let (sum, sum_sq) = moments.iter().fold((0.0, 0.0), |a, m| (a.0 + m.0, a.1 + m.1));
    let mean = sum / n_samples as f64;
    Ok(McEstimate {
        mean,
        std_error: sample_std_error(sum, sum_sq, n_samples),
        n_samples,
        seed,
    })
}
