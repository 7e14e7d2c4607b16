//! Field phase from a sampled mirror trajectory by Romberg quadrature.

use crate::continuous::{ClassicalTrajectory, MIN_SAMPLES_PER_PERIOD};
use crate::error::{Error, Result};
use crate::numerics::{romberg_uniform, uniform_step};
use crate::params::SystemParams;

pub const MAX_ROMBERG_LEVELS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraturePhase {
    pub phase: f64,
    /// Size of the last Richardson correction (∞ if no extrapolation ran).
    pub error_estimate: f64,
}

/// (ω_f/L)∫x dt over the sampled trajectory.
///
/// Samples must be uniform and strictly increasing in time, with at least
/// 32 per mechanical period.
pub fn quadrature_phase(trajectory: &ClassicalTrajectory, params: &SystemParams, refinement: usize) -> Result<QuadraturePhase> {
    let times: Vec<f64> = trajectory.samples.iter().map(|s| s.t).collect();
    let h = uniform_step(&times)?;
    if times.len() < 2 {
        return Ok(QuadraturePhase {
            phase: 0.0,
            error_estimate: 0.0,
        });
    }
    let per_period = params.period() / h;
    if per_period < MIN_SAMPLES_PER_PERIOD as f64 {
        return Err(Error::Undersampled {
            per_period,
            minimum: MIN_SAMPLES_PER_PERIOD,
        });
    }
    let xs: Vec<f64> = trajectory.samples.iter().map(|s| s.x).collect();
    let (integral, err) = romberg_uniform(&xs, h, refinement);
    let scale = params.omega_f() / params.length();
    Ok(QuadraturePhase {
        phase: scale * integral,
        error_estimate: scale * err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuous::TrajectorySample;
    use crate::params::SystemParams;

    fn unit() -> SystemParams {
        SystemParams::nondimensional(0.1, 0.5).unwrap()
    }

    fn traj(f: impl Fn(f64) -> f64, t_end: f64, n: usize) -> ClassicalTrajectory {
        ClassicalTrajectory {
            x0: 0.0,
            p0: 0.0,
            drive: 0.0,
            samples: (0..=n)
                .map(|i| {
                    let t = t_end * i as f64 / n as f64;
                    TrajectorySample { t, x: f(t), p: 0.0 }
                })
                .collect(),
        }
    }

    #[test]
    fn rectangle() {
        let p = unit();
        let r = quadrature_phase(&traj(|_| 0.7, 3.0, 64), &p, MAX_ROMBERG_LEVELS).unwrap();
        assert!((r.phase - p.omega_f() / p.length() * 0.7 * 3.0).abs() < 1e-14);
    }

    #[test]
    fn full_period_sine_vanishes() {
        let p = unit();
        let tau = p.period();
        let r = quadrature_phase(&traj(|t| (t * p.omega_m()).sin(), tau, 64), &p, MAX_ROMBERG_LEVELS).unwrap();
        assert!(r.phase.abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_grids() {
        let p = unit();
        let mut t = traj(|t| t, 1.0, 64);
        t.samples.swap(3, 4);
        assert!(matches!(quadrature_phase(&t, &p, 8), Err(Error::BadTimeGrid { .. })));
        let sparse = traj(|t| t, 4.0 * p.period(), 64);
        assert!(matches!(quadrature_phase(&sparse, &p, 8), Err(Error::Undersampled { .. })));
    }
}
