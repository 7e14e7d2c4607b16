//! N-kick pulse sequences tracing closed regular polygons in mechanical
//! phase space.
//!
//! In the quantum description the sequence collapses to the self-Kerr
//! unitary e^{i c n̂²}, with c the (λ-scaled) polygon area. In the classical
//! description each kick transfers momentum I and the field picks up
//! 2 k_f N_rt x(t_i) per kick.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{DerivedCouplings, FieldState, PhysicalConstants, SystemParams};

/// Which description produced a phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Picture {
    Quantum,
    Classical,
    SemiclassicalQfield,
    SemiclassicalQmirror,
}

/// Phase and modulus reduction of a mean optical field, ⟨â⟩ = α·m·e^{iφ}.
///
/// `phase` is the unwrapped analytic value; use [`principal_value`] for the
/// reduced angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseResult {
    pub phase: f64,
    pub modulus_factor: f64,
    pub picture: Picture,
}

impl PhaseResult {
    pub fn classical(phase: f64) -> Self {
        PhaseResult {
            phase,
            modulus_factor: 1.0,
            picture: Picture::Classical,
        }
    }
}

/// Reduce an angle to (−π, π].
pub fn principal_value(phase: f64) -> f64 {
    let r = phase.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// cot(π/N) as cos/sin; exactly 1 for the square.
pub fn polygon_cot(n_kicks: u32) -> f64 {
    if n_kicks == 4 {
        return 1.0;
    }
    let a = PI / n_kicks as f64;
    a.cos() / a.sin()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolygonLoopSpec {
    pub n_kicks: u32,
    pub lambda: f64,
    pub n_photons: f64,
}

impl PolygonLoopSpec {
    pub fn new(n_kicks: u32, lambda: f64, n_photons: f64) -> Result<Self> {
        if n_kicks < 3 {
            return Err(Error::TooFewKicks(n_kicks));
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::invalid("lambda", "must be non-negative and finite"));
        }
        if !(n_photons >= 0.0) || !n_photons.is_finite() {
            return Err(Error::invalid("n_photons", "must be non-negative and finite"));
        }
        Ok(PolygonLoopSpec {
            n_kicks,
            lambda,
            n_photons,
        })
    }

    pub fn area_coefficient(&self) -> f64 {
        0.25 * self.lambda * self.lambda * self.n_kicks as f64 * polygon_cot(self.n_kicks)
    }
}

/// c = (λ²/4)·N·cot(π/N), the phase per n² of the closed N-kick loop.
pub fn polygon_area_coefficient(lambda: f64, n_kicks: u32) -> Result<f64> {
    Ok(PolygonLoopSpec::new(n_kicks, lambda, 0.0)?.area_coefficient())
}

/// ⟨â⟩ after the N-kick loop applied to |α⟩: phase c + N_p sin 2c and
/// modulus factor exp(−N_p(1 − cos 2c)).
pub fn quantum_pulsed_mean_field(alpha: Complex64, lambda: f64, n_kicks: u32) -> Result<PhaseResult> {
    let spec = PolygonLoopSpec::new(n_kicks, lambda, alpha.norm_sqr())?;
    Ok(kerr_mean_field(spec.area_coefficient(), spec.n_photons))
}

pub(crate) fn kerr_mean_field(c: f64, n_photons: f64) -> PhaseResult {
    let two_c = 2.0 * c;
    PhaseResult {
        phase: c + n_photons * two_c.sin(),
        // 1 − cos 2c = 2 sin² c keeps precision for tiny c.
        modulus_factor: (-n_photons * 2.0 * c.sin().powi(2)).exp(),
        picture: Picture::Quantum,
    }
}

/// Momentum delivered by one kick, I = 2 N_rt E₀ / c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumKick {
    pub impulse: f64,
}

impl MomentumKick {
    pub fn from_energy(energy: f64, params: &SystemParams, consts: &PhysicalConstants) -> Result<Self> {
        if !(energy >= 0.0) {
            return Err(Error::invalid("energy", "must be non-negative"));
        }
        Ok(MomentumKick {
            impulse: 2.0 * params.n_roundtrips() * energy / consts.c_light,
        })
    }

    pub fn from_field(field: &FieldState, params: &SystemParams, consts: &PhysicalConstants) -> Result<Self> {
        Self::from_energy(field.energy(params.omega_f(), consts), params, consts)
    }

    /// Displacement scale ζ = I/(mω).
    pub fn zeta(&self, params: &SystemParams) -> f64 {
        self.impulse / (params.mass() * params.omega_m())
    }
}

/// Mirror state just before kick i, at t_i = iτ/N, in polar form with
/// x = R sin ϑ (momentum axis at ϑ = 0, measured in units of mω).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KickPoint {
    pub r: f64,
    pub theta: f64,
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KickTrajectory {
    pub zeta: f64,
    /// N + 1 points: the N kick times and the closing point at t = τ.
    pub points: Vec<KickPoint>,
}

impl KickTrajectory {
    pub fn n_kicks(&self) -> usize {
        self.points.len() - 1
    }

    /// Σ x(t_i) over the N kick times.
    pub fn position_sum(&self) -> f64 {
        self.points[..self.n_kicks()].iter().map(|p| p.x).sum()
    }

    /// Distance from the origin after the last kick has rotated for τ/N.
    pub fn closure_error(&self) -> f64 {
        self.points[self.n_kicks()].r
    }

    /// Kick-time positions for a mirror that starts at (x₀, v₀ = p₀/mω)
    /// instead of the origin: the free oscillation superposes linearly.
    pub fn positions_from(&self, x0: f64, v0: f64) -> Vec<f64> {
        let n = self.n_kicks() as f64;
        self.points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let a = 2.0 * PI * i as f64 / n;
                p.x + x0 * a.cos() + v0 * a.sin()
            })
            .collect()
    }
}

/// Polar recurrence for the kicked oscillator started at rest at the origin.
///
/// Between kicks the state rotates by 2π/N; each kick adds ζ along the
/// momentum axis. The post-kick angle is the arcsin of R sin ϑ / R', taken
/// on the obtuse branch when ζ + R cos ϑ < 0.
pub fn classical_kick_trajectory(zeta: f64, n_kicks: u32) -> Result<KickTrajectory> {
    if n_kicks < 3 {
        return Err(Error::TooFewKicks(n_kicks));
    }
    if !(zeta >= 0.0) || !zeta.is_finite() {
        return Err(Error::invalid("zeta", "must be non-negative and finite"));
    }
    let step = 2.0 * PI / n_kicks as f64;
    let mut points = Vec::with_capacity(n_kicks as usize + 1);
    let (mut r, mut theta) = (0.0f64, 0.0f64);
    points.push(KickPoint { r, theta, x: 0.0 });
    for _ in 1..=n_kicks {
        let along = zeta + r * theta.cos();
        let across = r * theta.sin();
        let r_next = along.hypot(across);
        let kicked = if r_next > 0.0 {
            let s = (across / r_next).clamp(-1.0, 1.0);
            let a = s.asin();
            if along < 0.0 {
                PI - a
            } else {
                a
            }
        } else {
            0.0
        };
        r = r_next;
        theta = step + kicked;
        points.push(KickPoint {
            r,
            theta,
            x: r * theta.sin(),
        });
    }
    Ok(KickTrajectory { zeta, points })
}

/// φ_c = 2 k_f N_rt Σ x(t_i).
pub fn phase_from_positions(positions: &[f64], params: &SystemParams, couplings: &DerivedCouplings) -> f64 {
    2.0 * couplings.k_f * params.n_roundtrips() * positions.iter().sum::<f64>()
}

/// Closed form φ_c = k_f N_rt (I/mω) N cot(π/N).
pub fn classical_pulsed_phase(
    params: &SystemParams,
    couplings: &DerivedCouplings,
    kick: &MomentumKick,
    n_kicks: u32,
) -> Result<PhaseResult> {
    if n_kicks < 3 {
        return Err(Error::TooFewKicks(n_kicks));
    }
    let zeta = kick.zeta(params);
    Ok(PhaseResult::classical(
        couplings.k_f * params.n_roundtrips() * zeta * n_kicks as f64 * polygon_cot(n_kicks),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumOffset {
    /// (λ²/4)·N·cot(π/N), the intensity-independent term at small λ.
    pub small_coupling: f64,
    /// c + N_p sin 2c − 2 N_p c, valid at any λ.
    pub exact: f64,
}

pub fn quantum_classical_offset(lambda: f64, n_kicks: u32, n_photons: f64) -> Result<QuantumOffset> {
    let spec = PolygonLoopSpec::new(n_kicks, lambda, n_photons)?;
    let c = spec.area_coefficient();
    // sin 2c − 2c summed as a series below 1e-3 to avoid cancellation.
    let two_c = 2.0 * c;
    let sin_minus_arg = if two_c.abs() < 1e-3 {
        let x3 = two_c * two_c * two_c;
        -x3 / 6.0 + x3 * two_c * two_c / 120.0 - x3 * two_c.powi(4) / 5040.0
    } else {
        two_c.sin() - two_c
    };
    Ok(QuantumOffset {
        small_coupling: c,
        exact: c + n_photons * sin_minus_arg,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotNoiseFloor {
    /// 1/√(N_p N_r).
    pub floor: f64,
    /// floor < λ², strictly.
    pub offset_detectable: bool,
}

pub fn shot_noise_phase_floor(n_photons: f64, n_repeats: u64, lambda: f64) -> Result<ShotNoiseFloor> {
    if !(n_photons > 0.0) {
        return Err(Error::invalid("n_photons", "shot-noise floor needs at least some light"));
    }
    if n_repeats == 0 {
        return Err(Error::invalid("n_repeats", "must be at least 1"));
    }
    let floor = 1.0 / (n_photons * n_repeats as f64).sqrt();
    Ok(ShotNoiseFloor {
        floor,
        offset_detectable: floor < lambda * lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::SQRT_2;

    const TWO_PI: f64 = 2.0 * PI;

    #[test]
    fn area_coefficient_values() {
        assert!((polygon_area_coefficient(0.1, 4).unwrap() - 0.01).abs() < 1e-16);
        let six = polygon_area_coefficient(0.1, 6).unwrap();
        assert!((six - 0.01 / 4.0 * 6.0 * 3f64.sqrt()).abs() < 1e-16);
        assert!(matches!(polygon_area_coefficient(0.1, 2), Err(Error::TooFewKicks(2))));
        assert!(polygon_area_coefficient(-0.1, 4).is_err());
    }

    #[test]
    fn area_coefficient_continuum_limit() {
        // With λ_N = 2π√2 k/N, c = 2π²k² cot(π/N)/N = 2πk² (1 − π²/(3N²) − ...).
        let k = 0.3;
        let target = TWO_PI * k * k;
        let mut last = f64::INFINITY;
        for &n in &[1_000u32, 10_000, 100_000] {
            let lam = TWO_PI * SQRT_2 * k / n as f64;
            let c = polygon_area_coefficient(lam, n).unwrap();
            let err = (c - target).abs();
            let predicted = target * PI * PI / (3.0 * (n as f64).powi(2));
            assert!((err - predicted).abs() < 1e-3 * predicted + 1e-15, "n={n}");
            assert!(err < last);
            last = err;
        }
    }

    #[test]
    fn four_pulse_mean_field() {
        let r = quantum_pulsed_mean_field(Complex64::new(10.0, 0.0), 0.1, 4).unwrap();
        assert!((r.phase - 2.009_866_669_333_308).abs() < 1e-12);
        assert!((r.modulus_factor - 0.980_199_326_764_042_5).abs() < 1e-12);
        assert_eq!(r.picture, Picture::Quantum);
    }

    #[test]
    fn vacuum_probe_isolates_offset() {
        for &lam in &[1e-3, 1e-2, 1e-1] {
            let r = quantum_pulsed_mean_field(Complex64::new(0.0, 0.0), lam, 4).unwrap();
            assert_eq!(r.phase, polygon_area_coefficient(lam, 4).unwrap());
            assert_eq!(r.modulus_factor, 1.0);
        }
        let r = quantum_pulsed_mean_field(Complex64::new(3.0, 1.0), 0.0, 7).unwrap();
        assert_eq!((r.phase, r.modulus_factor), (0.0, 1.0));
    }

    #[test]
    fn square_loop_positions() {
        let t = classical_kick_trajectory(1.0, 4).unwrap();
        let xs: Vec<f64> = t.points[..4].iter().map(|p| p.x).collect();
        for (got, want) in xs.iter().zip([0.0, 1.0, 1.0, 0.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!((t.position_sum() - 2.0).abs() < 1e-15);
        assert!(t.closure_error() < 1e-15);
    }

    #[test]
    fn hexagon_sum() {
        let t = classical_kick_trajectory(1.0, 6).unwrap();
        assert!((t.position_sum() - 3.0 * 3f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn zero_impulse_stays_put() {
        let t = classical_kick_trajectory(0.0, 9).unwrap();
        assert!(t.points.iter().all(|p| p.x == 0.0 && p.r == 0.0));
        assert!(classical_kick_trajectory(1.0, 2).is_err());
        assert!(classical_kick_trajectory(f64::NAN, 5).is_err());
    }

    /// Independent Cartesian stepping: rotate (x, v) by 2π/N, kick v by ζ.
    fn cartesian_positions(zeta: f64, n: u32, x0: f64, v0: f64) -> Vec<f64> {
        let a = TWO_PI / n as f64;
        let (mut x, mut v) = (x0, v0);
        let mut out = Vec::new();
        for _ in 0..n {
            out.push(x);
            v += zeta;
            let (xn, vn) = (x * a.cos() + v * a.sin(), v * a.cos() - x * a.sin());
            x = xn;
            v = vn;
        }
        out.push(x);
        out
    }

    #[test]
    fn recurrence_agrees_with_cartesian_stepping() {
        for n in 3..=64u32 {
            let t = classical_kick_trajectory(1.3, n).unwrap();
            let direct = cartesian_positions(1.3, n, 0.0, 0.0);
            for (p, x) in t.points.iter().zip(&direct) {
                assert!((p.x - x).abs() < 1e-11, "n={n}");
            }
        }
    }

    #[test]
    fn closure_and_closed_form_sum() {
        for n in 3..=64u32 {
            for &zeta in &[1e-3, 1.0, 1e3] {
                let t = classical_kick_trajectory(zeta, n).unwrap();
                assert!(t.closure_error() <= 1e-10 * zeta, "n={n} zeta={zeta}");
                let want = 0.5 * zeta * n as f64 * polygon_cot(n);
                assert!(((t.position_sum() - want) / want).abs() < 1e-10, "n={n}");
            }
        }
    }

    fn unit_system(lambda: f64) -> (SystemParams, DerivedCouplings, PhysicalConstants) {
        let c = PhysicalConstants::natural();
        let p = SystemParams::nondimensional(0.05, lambda).unwrap();
        let d = crate::params::derive_couplings(&p, &c).unwrap();
        (p, d, c)
    }

    #[test]
    fn classical_phase_from_kicks() {
        for &(n, np, want) in &[(4u32, 100.0, 2.0), (6, 100.0, 200.0 * 0.01 / 4.0 * 6.0 * 1.732_050_807_568_877_2)] {
            let (p, d, c) = unit_system(0.1);
            let field = FieldState::from_photons(np).unwrap();
            let kick = MomentumKick::from_field(&field, &p, &c).unwrap();
            let closed = classical_pulsed_phase(&p, &d, &kick, n).unwrap();
            let traj = classical_kick_trajectory(kick.zeta(&p), n).unwrap();
            let summed = phase_from_positions(&traj.positions_from(0.0, 0.0)[..n as usize], &p, &d);
            assert!((closed.phase - want).abs() < 1e-12, "{}", closed.phase);
            assert!((summed - want).abs() < 1e-12);
            assert_eq!(closed.modulus_factor, 1.0);
            let c2 = polygon_area_coefficient(d.lambda, n).unwrap();
            assert!((closed.phase - 2.0 * np * c2).abs() < 1e-12);
        }
        let (p, d, c) = unit_system(0.1);
        let kick = MomentumKick::from_energy(0.0, &p, &c).unwrap();
        assert_eq!(classical_pulsed_phase(&p, &d, &kick, 4).unwrap().phase, 0.0);
    }

    #[test]
    fn impulse_identity() {
        let c = PhysicalConstants::default();
        let p = SystemParams::builder()
            .omega_m(2.0 * PI * 1e5)
            .mass(1e-11)
            .length(1e-3)
            .omega_f(1.77e15)
            .n_roundtrips(1000.0)
            .build(&c)
            .unwrap();
        let d = crate::params::derive_couplings(&p, &c).unwrap();
        let field = FieldState::from_photons(1e8).unwrap();
        let kick = MomentumKick::from_field(&field, &p, &c).unwrap();
        let other = 2.0 * d.k_f * p.n_roundtrips() * c.hbar * 1e8;
        assert!(((kick.impulse - other) / other).abs() < 1e-12);
    }

    #[test]
    fn translation_invariance_of_closed_loop() {
        let (p, d, c) = unit_system(0.1);
        let kick = MomentumKick::from_field(&FieldState::from_photons(50.0).unwrap(), &p, &c).unwrap();
        for &n in &[4u32, 7, 12] {
            let traj = classical_kick_trajectory(kick.zeta(&p), n).unwrap();
            let base = phase_from_positions(&traj.positions_from(0.0, 0.0)[..n as usize], &p, &d);
            for &(x0, v0) in &[(0.7, -1.2), (-3.1, 0.4), (12.0, 5.5)] {
                let shifted = traj.positions_from(x0, v0);
                let direct = cartesian_positions(kick.zeta(&p), n, x0, v0);
                for (a, b) in shifted.iter().zip(&direct) {
                    assert!((a - b).abs() < 1e-10);
                }
                let phi = phase_from_positions(&shifted[..n as usize], &p, &d);
                assert!((phi - base).abs() < 1e-10, "n={n}");
            }
        }
    }

    #[test]
    fn offsets() {
        let o = quantum_classical_offset(0.1, 4, 100.0).unwrap();
        assert!((o.small_coupling - 0.01).abs() < 1e-16);
        assert!((o.exact - 9.866_669_333_307_9e-3).abs() < 1e-12);
        // ratio → 1 as λ → 0
        let mut prev = f64::INFINITY;
        for &lam in &[1e-1, 1e-2, 1e-3] {
            let o = quantum_classical_offset(lam, 5, 1e3).unwrap();
            let dev = (o.exact / o.small_coupling - 1.0).abs();
            assert!(dev < prev);
            prev = dev;
        }
        assert!(prev < 1e-6);
    }

    #[test]
    fn shot_noise() {
        let a = shot_noise_phase_floor(1e8, 1, 1e-2).unwrap();
        assert_eq!(a.floor, 1e-4);
        assert!(!a.offset_detectable);
        let b = shot_noise_phase_floor(1e8, 100, 1e-2).unwrap();
        assert!((b.floor - 1e-5).abs() < 1e-20 && b.offset_detectable);
        assert_eq!(shot_noise_phase_floor(1.0, 1, 0.5).unwrap().floor, 1.0);
        assert!(shot_noise_phase_floor(0.0, 1, 0.5).is_err());
        assert!(shot_noise_phase_floor(1.0, 0, 0.5).is_err());
    }

    #[test]
    fn principal_value_range() {
        assert!((principal_value(125.664_301_388_763_27) - (125.664_301_388_763_27 - 40.0 * PI)).abs() < 1e-12);
        assert_eq!(principal_value(PI), PI);
        assert!((principal_value(-PI) - PI).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn modulus_in_unit_interval(lam in 0.0f64..2.0, np in 0.0f64..1e4, n in 3u32..50) {
            let r = quantum_pulsed_mean_field(Complex64::new(np.sqrt(), 0.0), lam, n).unwrap();
            let c = 0.25 * lam * lam * n as f64 * polygon_cot(n);
            // Only an exponent past the f64 range may flush to zero.
            prop_assert!(r.modulus_factor > 0.0 || 2.0 * np * c.sin().powi(2) > 700.0);
            prop_assert!(r.modulus_factor <= 1.0);
        }

        #[test]
        fn modulus_small_coupling_scaling(np in 1.0f64..1e3, n in 3u32..20) {
            // −ln m = N_p (1 − cos 2c) ≈ 2 N_p c², with c = (λ²/4) N cot(π/N).
            let lam = 1e-2;
            let r = quantum_pulsed_mean_field(Complex64::new(np.sqrt(), 0.0), lam, n).unwrap();
            let c = 0.25 * lam * lam * n as f64 * polygon_cot(n);
            let ratio = -r.modulus_factor.ln() / (2.0 * np * c * c);
            prop_assert!((ratio - 1.0).abs() < c * c + 1e-7);
        }
    }
}
