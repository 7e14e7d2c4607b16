//! Continuous interaction over (a fraction of) a mechanical period.
//!
//! Dimensionless operations take the mechanical angle `omega_t` = ωt.
//! Operations on physical trajectories take SI times and a [`SystemParams`].

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{default_cutoff, ln_factorial, one_minus_cos, romberg_uniform, theta_minus_sin, PoissonWindow};
use crate::oracles::quadrature::{quadrature_phase, MAX_ROMBERG_LEVELS};
use crate::oracles::coherent_overlap;
use crate::params::{PhysicalConstants, SystemParams};
use crate::pulsed::{kerr_mean_field, polygon_area_coefficient, PhaseResult, Picture};

/// Minimum trajectory sampling accepted by the quadrature routes.
pub const MIN_SAMPLES_PER_PERIOD: usize = 32;

/// Samples per period used when a route builds its own trajectory.
pub const DEFAULT_SAMPLES_PER_PERIOD: usize = 4096;

/// One Fock sector of the joint field–mirror state at time t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockComponent {
    pub n: u64,
    /// e^{−|α|²/2} αⁿ/√n!
    pub poisson_amplitude: Complex64,
    /// k²n²(ωt − sin ωt) + kn[γ_R sin ωt + γ_I(1 − cos ωt)]
    pub phase_exponent: f64,
    /// Γ_n(t) = γe^{−iωt} + kn(1 − e^{−iωt})
    pub mirror_label: Complex64,
}

/// Joint state |Ψ(t)⟩ = Σ_n c_n |n⟩|Γ_n(t)⟩ starting from |α⟩|γ⟩.
///
/// Components are produced on demand; nothing per-n is stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointStateSnapshot {
    pub omega_t: f64,
    pub alpha: Complex64,
    pub gamma: Complex64,
    pub k: f64,
    pub cutoff: u64,
}

impl JointStateSnapshot {
    pub fn new(alpha: Complex64, gamma: Complex64, k: f64, omega_t: f64, cutoff: Option<u64>) -> Result<Self> {
        let cutoff = cutoff.unwrap_or_else(|| default_cutoff(alpha.norm_sqr()));
        let snap = JointStateSnapshot {
            omega_t,
            alpha,
            gamma,
            k,
            cutoff,
        };
        let np = alpha.norm_sqr();
        let window = PoissonWindow::new(np, cutoff, 0.0);
        let missing = 1.0 - window.mass();
        if missing > 1e-10 {
            return Err(Error::CutoffTooSmall {
                cutoff,
                required: crate::numerics::required_cutoff(np, 1e-10),
                n_photons: np,
                missing,
            });
        }
        Ok(snap)
    }

    pub fn component(&self, n: u64) -> FockComponent {
        let (s, c) = self.omega_t.sin_cos();
        let np = self.alpha.norm_sqr();
        let modulus = if np == 0.0 {
            if n == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            (-0.5 * np + n as f64 * self.alpha.norm().ln() - 0.5 * ln_factorial(n)).exp()
        };
        let nf = n as f64;
        let rot = Complex64::new(c, -s);
        FockComponent {
            n,
            poisson_amplitude: Complex64::from_polar(modulus, nf * self.alpha.arg()),
            phase_exponent: self.k * self.k * nf * nf * theta_minus_sin(self.omega_t)
                + self.k * nf * (self.gamma.re * s + self.gamma.im * one_minus_cos(self.omega_t)),
            mirror_label: self.gamma * rot + self.k * nf * (Complex64::new(1.0, 0.0) - rot),
        }
    }

    pub fn components(&self) -> impl Iterator<Item = FockComponent> + '_ {
        (0..=self.cutoff).map(move |n| self.component(n))
    }

    pub fn truncated_norm(&self) -> f64 {
        self.components().map(|c| c.poisson_amplitude.norm_sqr()).sum()
    }

    /// ⟨â⟩ = Σ_n c_n* c_{n+1} √(n+1) ⟨Γ_n|Γ_{n+1}⟩ from the state itself.
    pub fn mean_field(&self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut prev = self.component(0);
        for n in 0..self.cutoff {
            let next = self.component(n + 1);
            let cn = prev.poisson_amplitude * Complex64::from_polar(1.0, prev.phase_exponent);
            let cn1 = next.poisson_amplitude * Complex64::from_polar(1.0, next.phase_exponent);
            acc += cn.conj() * cn1 * ((n + 1) as f64).sqrt() * coherent_overlap(prev.mirror_label, next.mirror_label);
            prev = next;
        }
        acc
    }
}

/// Optical phase after a continuous interaction of duration ωt with the
/// mirror starting in |γ⟩:
/// 2k[γ_R sin ωt + γ_I(1 − cos ωt)] + k²(ωt − sin ωt) + N_p sin[2k²(ωt − sin ωt)].
///
/// The modulus factor is e^{−k²(1−cos ωt)} e^{−N_p(1 − cos 2k²(ωt − sin ωt))}.
pub fn quantum_continuous_phase(gamma: Complex64, k: f64, n_photons: f64, omega_t: f64) -> PhaseResult {
    let s = theta_minus_sin(omega_t);
    let kerr = 2.0 * k * k * s;
    PhaseResult {
        phase: 2.0 * k * (gamma.re * omega_t.sin() + gamma.im * one_minus_cos(omega_t))
            + k * k * s
            + n_photons * kerr.sin(),
        modulus_factor: (-k * k * one_minus_cos(omega_t) - n_photons * one_minus_cos(kerr)).exp(),
        picture: Picture::Quantum,
    }
}

/// Mean dimensionless quadratures (⟨x̂⟩, ⟨p̂⟩) of the mirror.
pub fn quantum_mean_motion(gamma: Complex64, k: f64, n_photons: f64, omega_t: f64) -> (f64, f64) {
    let (s, c) = omega_t.sin_cos();
    let x = SQRT_2 * (gamma.re * c + gamma.im * s + n_photons * k * one_minus_cos(omega_t));
    let p = SQRT_2 * (gamma.im * c - gamma.re * s + n_photons * k * s);
    (x, p)
}

/// Constant radiation-pressure force E₀/L for N_p photons.
pub fn drive_for_photons(params: &SystemParams, consts: &PhysicalConstants, n_photons: f64) -> f64 {
    consts.hbar * params.omega_f() * n_photons / params.length()
}

/// Driven harmonic motion x(t), p(t) = m dx/dt.
pub fn classical_motion(x0: f64, p0: f64, drive: f64, params: &SystemParams, t: f64) -> (f64, f64) {
    let w = params.omega_m();
    let m = params.mass();
    let (s, c) = (w * t).sin_cos();
    let static_shift = drive / (m * w * w);
    let x = x0 * c + p0 / (m * w) * s + static_shift * one_minus_cos(w * t);
    let p = -x0 * m * w * s + p0 * c + static_shift * m * w * s;
    (x, p)
}

/// (ω_f/Lω)[x₀ sin ωt + (p₀/mω)(1 − cos ωt)] + ω_f E₀ (ωt − sin ωt)/(ω³ m L²).
pub fn classical_continuous_phase(x0: f64, p0: f64, drive: f64, params: &SystemParams, t: f64) -> PhaseResult {
    let w = params.omega_m();
    let m = params.mass();
    let l = params.length();
    let wf = params.omega_f();
    let wt = w * t;
    let energy = drive * l;
    PhaseResult::classical(
        wf / (l * w) * (x0 * wt.sin() + p0 / (m * w) * one_minus_cos(wt))
            + wf * energy * theta_minus_sin(wt) / (w * w * w * m * l * l),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalTrajectory {
    pub x0: f64,
    pub p0: f64,
    /// E₀/L (N).
    pub drive: f64,
    pub samples: Vec<TrajectorySample>,
}

impl ClassicalTrajectory {
    /// Uniform samples of the driven motion on [0, t_end], `intervals` steps.
    pub fn sample(x0: f64, p0: f64, drive: f64, params: &SystemParams, t_end: f64, intervals: usize) -> Self {
        let n = if t_end > 0.0 { intervals.max(1) } else { 0 };
        let samples = (0..=n)
            .map(|i| {
                let t = if n == 0 { 0.0 } else { t_end * i as f64 / n as f64 };
                let (x, p) = classical_motion(x0, p0, drive, params, t);
                TrajectorySample { t, x, p }
            })
            .collect();
        ClassicalTrajectory { x0, p0, drive, samples }
    }

    /// Power-of-two interval count giving at least `per_period` samples per
    /// mechanical period over [0, t_end].
    pub fn intervals_for(params: &SystemParams, t_end: f64, per_period: usize) -> usize {
        let periods = (t_end / params.period()).max(1.0);
        ((per_period as f64 * periods).ceil() as usize).next_power_of_two()
    }
}

/// Quantum field driven by a classical mirror trajectory: phase (ω_f/L)∫x dt,
/// by Romberg quadrature on the sampled trajectory.
pub fn semiclassical_phase_quantum_field(trajectory: &ClassicalTrajectory, params: &SystemParams) -> Result<PhaseResult> {
    let q = quadrature_phase(trajectory, params, MAX_ROMBERG_LEVELS)?;
    Ok(PhaseResult {
        phase: q.phase,
        modulus_factor: 1.0,
        picture: Picture::SemiclassicalQfield,
    })
}

/// Classical field on a quantum mirror: the coherent label evolves to
/// γe^{−iωt} + kN_p(1 − e^{−iωt}) and the phase integrates √2 k ⟨x̂⟩ over ωt.
pub fn semiclassical_phase_quantum_mirror(gamma: Complex64, k: f64, n_photons: f64, omega_t: f64) -> PhaseResult {
    let phase = if omega_t == 0.0 {
        0.0
    } else {
        let periods = (omega_t.abs() / (2.0 * PI)).max(1.0);
        let intervals = ((DEFAULT_SAMPLES_PER_PERIOD as f64 * periods).ceil() as usize).next_power_of_two();
        let h = omega_t / intervals as f64;
        let drive = k * n_photons;
        let xs: Vec<f64> = (0..=intervals)
            .map(|i| {
                let rot = Complex64::from_polar(1.0, -(i as f64) * h);
                let label = gamma * rot + drive * (Complex64::new(1.0, 0.0) - rot);
                SQRT_2 * label.re
            })
            .collect();
        SQRT_2 * k * romberg_uniform(&xs, h, MAX_ROMBERG_LEVELS).0
    };
    PhaseResult {
        phase,
        modulus_factor: 1.0,
        picture: Picture::SemiclassicalQmirror,
    }
}

/// Per-step coupling λ_N = 2π√2 k/N: one period split into N kicks.
pub fn trotter_step_coupling(k: f64, n_steps: u32) -> f64 {
    2.0 * PI * SQRT_2 * k / n_steps as f64
}

/// N-kick polygon with the per-step coupling of an N-way split period;
/// tends to the closed-loop continuous phase as N → ∞ with O(1/N²) error.
pub fn trotter_pulsed_approximation(k: f64, n_photons: f64, n_steps: u32) -> Result<PhaseResult> {
    if !(k >= 0.0) {
        return Err(Error::invalid("k", "must be non-negative"));
    }
    let c = polygon_area_coefficient(trotter_step_coupling(k, n_steps), n_steps)?;
    Ok(kerr_mean_field(c, n_photons))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{coherent_to_phase_space, derive_couplings};
    use proptest::prelude::*;

    const TWO_PI: f64 = 2.0 * PI;

    fn reference_system() -> (SystemParams, PhysicalConstants) {
        let c = PhysicalConstants::default();
        let p = SystemParams::builder()
            .omega_m(TWO_PI * 1e5)
            .mass(1e-11)
            .length(1e-3)
            .omega_f(1.77e15)
            .n_roundtrips(1000.0)
            .build(&c)
            .unwrap()
            .with_k(1e-2, &c)
            .unwrap();
        (p, c)
    }

    #[test]
    fn closed_loop_quantum_phase() {
        let r = quantum_continuous_phase(Complex64::new(0.0, 0.0), 1e-2, 1e5, TWO_PI);
        assert!((r.phase - 125.664_301_388_763_27).abs() < 1e-9);
        for g in [Complex64::new(3.0, -2.0), Complex64::new(-0.5, 7.0)] {
            let q = quantum_continuous_phase(g, 1e-2, 1e5, TWO_PI);
            assert!((q.phase - r.phase).abs() < 1e-12);
        }
        assert_eq!(quantum_continuous_phase(Complex64::new(1.0, 1.0), 0.0, 1e5, 3.0).phase, 0.0);
    }

    #[test]
    fn mean_motion_special_points() {
        let g = Complex64::new(0.3, -1.1);
        let (x, p) = quantum_mean_motion(g, 0.1, 50.0, 0.0);
        assert!((x - SQRT_2 * 0.3).abs() < 1e-15 && (p + SQRT_2 * 1.1).abs() < 1e-15);
        let (x, p) = quantum_mean_motion(Complex64::new(0.0, 0.0), 0.1, 50.0, PI);
        assert!((x - 2.0 * SQRT_2 * 50.0 * 0.1).abs() < 1e-12 && p.abs() < 1e-12);
    }

    #[test]
    fn classical_motion_special_points() {
        let (p, c) = reference_system();
        let tau = p.period();
        let (x, pp) = classical_motion(2e-12, 3e-18, 0.0, &p, tau);
        assert!((x - 2e-12).abs() < 1e-24 && (pp - 3e-18).abs() < 1e-30);
        let drive = drive_for_photons(&p, &c, 1e5);
        let (x, _) = classical_motion(0.0, 0.0, drive, &p, tau / 2.0);
        let want = 2.0 * drive / (p.mass() * p.omega_m().powi(2));
        assert!(((x - want) / want).abs() < 1e-14);
    }

    #[test]
    fn quantum_and_classical_first_moments_agree() {
        let (p, c) = reference_system();
        let d = derive_couplings(&p, &c).unwrap();
        let np = 1e5;
        let drive = drive_for_photons(&p, &c, np);
        for &(g, wt) in &[
            (Complex64::new(1.2, -0.4), 0.7),
            (Complex64::new(-3.0, 2.5), 4.1),
            (Complex64::new(0.1, 9.0), 11.3),
        ] {
            let (xq, pq) = quantum_mean_motion(g, d.k, np, wt);
            let (x0, p0) = coherent_to_phase_space(g, &p, &c);
            let (xc, pc) = classical_motion(x0, p0, drive, &p, wt / p.omega_m());
            let xs = d.x_zpf;
            let ps = c.hbar / d.x_zpf;
            assert!(((xq * xs - xc) / xc).abs() < 1e-10);
            assert!(((pq * ps - pc) / pc).abs() < 1e-10);
        }
    }

    #[test]
    fn classical_closed_loop() {
        let (p, c) = reference_system();
        let drive = drive_for_photons(&p, &c, 1e5);
        let phi = classical_continuous_phase(0.0, 0.0, drive, &p, p.period()).phase;
        assert!((phi - 4.0 * PI * 1e-4 * 1e5).abs() < 1e-9);
        let shifted = classical_continuous_phase(3e-12, -7e-18, drive, &p, p.period()).phase;
        assert!((shifted - phi).abs() < 1e-9);
    }

    #[test]
    fn coupling_form_equals_physical_form() {
        let (p, c) = reference_system();
        let d = derive_couplings(&p, &c).unwrap();
        let np = 3e4;
        let drive = drive_for_photons(&p, &c, np);
        for &(x0, p0, t) in &[(1e-13, 2e-19, 3e-6), (-4e-13, 5e-19, 17e-6)] {
            let wt = p.omega_m() * t;
            let coupled = d.k * (2.0 * p.mass() * p.omega_m() / c.hbar).sqrt()
                * (x0 * wt.sin() + p0 / (p.mass() * p.omega_m()) * (1.0 - wt.cos()))
                + 2.0 * np * d.k * d.k * (wt - wt.sin());
            let phys = classical_continuous_phase(x0, p0, drive, &p, t).phase;
            assert!(((phys - coupled) / coupled).abs() < 1e-10);
        }
    }

    #[test]
    fn quantum_minus_classical_at_period() {
        let k = 1e-2;
        let np = 1e5;
        let q = quantum_continuous_phase(Complex64::new(0.0, 0.0), k, np, TWO_PI).phase;
        let cl = 2.0 * np * k * k * TWO_PI;
        let diff = q - cl;
        let x = 4.0 * PI * k * k;
        let series = TWO_PI * k * k - np * x * x * x / 6.0;
        assert!((diff - 5.952_451_715_370_067e-4).abs() < 1e-10);
        assert!((diff - series).abs() < 1e-9);
    }

    #[test]
    fn semiclassical_field_matches_classical() {
        let (p, c) = reference_system();
        let drive = drive_for_photons(&p, &c, 1e5);
        for &(x0, p0, t) in &[(0.0, 0.0, 1e-5), (2e-13, -1e-19, 1.37e-5), (0.0, 0.0, 0.3e-5)] {
            let n = ClassicalTrajectory::intervals_for(&p, t, 1024);
            let traj = ClassicalTrajectory::sample(x0, p0, drive, &p, t, n);
            let semi = semiclassical_phase_quantum_field(&traj, &p).unwrap();
            let cl = classical_continuous_phase(x0, p0, drive, &p, t);
            assert!((semi.phase - cl.phase).abs() < 1e-8, "{} vs {}", semi.phase, cl.phase);
            assert_eq!(semi.picture, Picture::SemiclassicalQfield);
        }
        let zero = ClassicalTrajectory::sample(0.0, 0.0, 0.0, &p, 1e-5, 64);
        assert_eq!(semiclassical_phase_quantum_field(&zero, &p).unwrap().phase, 0.0);
        let free = ClassicalTrajectory::sample(1e-12, 1e-18, 0.0, &p, p.period(), 64);
        let v = semiclassical_phase_quantum_field(&free, &p).unwrap().phase;
        assert!(v.abs() < 1e-9, "{v}");
    }

    #[test]
    fn undersampled_trajectory_rejected() {
        let (p, _) = reference_system();
        let traj = ClassicalTrajectory::sample(0.0, 0.0, 1.0, &p, 2.0 * p.period(), 32);
        assert!(matches!(
            semiclassical_phase_quantum_field(&traj, &p),
            Err(Error::Undersampled { .. })
        ));
    }

    #[test]
    fn semiclassical_mirror_matches_classical() {
        let k = 1e-2;
        let np = 1e5;
        let at_period = semiclassical_phase_quantum_mirror(Complex64::new(0.0, 0.0), k, np, TWO_PI);
        assert!((at_period.phase - 4.0 * PI * k * k * np).abs() < 1e-10);
        assert_eq!(semiclassical_phase_quantum_mirror(Complex64::new(1.0, 2.0), k, np, 0.0).phase, 0.0);
    }

    #[test]
    fn trotter_limits() {
        let four = trotter_pulsed_approximation(1e-2, 1e3, 4).unwrap();
        let lam = TWO_PI * SQRT_2 * 1e-2 / 4.0;
        let direct = crate::pulsed::quantum_pulsed_mean_field(Complex64::new(1e3f64.sqrt(), 0.0), lam, 4).unwrap();
        assert!((four.phase - direct.phase).abs() < 1e-12);
        for n in [3u32, 10, 1000] {
            assert_eq!(trotter_pulsed_approximation(0.0, 1e5, n).unwrap().phase, 0.0);
        }
        assert!(trotter_pulsed_approximation(1e-2, 1e5, 2).is_err());
    }

    #[test]
    fn trotter_converges_quadratically() {
        let (k, np) = (1e-2, 1e5);
        let exact = quantum_continuous_phase(Complex64::new(0.0, 0.0), k, np, TWO_PI).phase;
        let errs: Vec<f64> = [100u32, 1000, 10_000]
            .iter()
            .map(|&n| (trotter_pulsed_approximation(k, np, n).unwrap().phase - exact).abs())
            .collect();
        let slope = (errs[2].ln() - errs[0].ln()) / (10_000f64.ln() - 100f64.ln());
        assert!((-2.2..=-1.8).contains(&slope), "slope {slope}");
        assert!(errs[2] < 1e-4);
    }

    #[test]
    fn kerr_term_limit() {
        // φ_q − φ_c → k²(ωt − sin ωt) when the Kerr cubic term is negligible.
        let k = 1e-3;
        let np = 10.0;
        for &wt in &[1.0, PI, TWO_PI, 9.0] {
            let s = wt - f64::sin(wt);
            let cubic = np * (2.0 * k * k * wt).powi(3) / 6.0;
            assert!(cubic < 0.01 * k * k * wt);
            let q = quantum_continuous_phase(Complex64::new(0.0, 0.0), k, np, wt).phase;
            let diff = q - 2.0 * np * k * k * s;
            assert!(((diff - k * k * s) / (k * k * s)).abs() < 0.05);
        }
    }

    #[test]
    fn snapshot_geometry_and_norm() {
        let g = Complex64::new(0.4, -0.9);
        let snap = JointStateSnapshot::new(Complex64::new(2.0, 1.0), g, 0.2, 2.3, None).unwrap();
        assert!(snap.truncated_norm() >= 1.0 - 1e-10);
        for c in snap.components().take(20) {
            let centre = Complex64::new(0.2 * c.n as f64, 0.0);
            assert!(((c.mirror_label - centre).norm() - (g - centre).norm()).abs() < 1e-12);
        }
        assert!(matches!(
            JointStateSnapshot::new(Complex64::new(10.0, 0.0), g, 0.2, 1.0, Some(50)),
            Err(Error::CutoffTooSmall { .. })
        ));
    }

    #[test]
    fn snapshot_mean_field_reproduces_phase() {
        let g = Complex64::new(0.4, -0.9);
        let alpha = Complex64::new(3.0, 0.0);
        for &wt in &[0.5, 2.0, TWO_PI, 8.0] {
            let snap = JointStateSnapshot::new(alpha, g, 0.05, wt, None).unwrap();
            let a = snap.mean_field() / alpha;
            let want = quantum_continuous_phase(g, 0.05, 9.0, wt);
            assert!((a.norm() - want.modulus_factor).abs() < 1e-12);
            assert!((a.arg() - crate::pulsed::principal_value(want.phase)).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn closed_loop_independent_of_gamma(re in -20.0f64..20.0, im in -20.0f64..20.0, j in 1u32..4) {
            let wt = TWO_PI * j as f64;
            let base = quantum_continuous_phase(Complex64::new(0.0, 0.0), 1e-2, 1e5, wt).phase;
            let g = quantum_continuous_phase(Complex64::new(re, im), 1e-2, 1e5, wt).phase;
            prop_assert!((g - base).abs() < 1e-12 * base.abs().max(1.0) * 10.0);
        }

        #[test]
        fn classical_closed_loop_independent_of_start(x0 in -1e-11f64..1e-11, p0 in -1e-17f64..1e-17, j in 1u32..4) {
            let (p, c) = reference_system();
            let drive = drive_for_photons(&p, &c, 1e5);
            let t = p.period() * j as f64;
            let base = classical_continuous_phase(0.0, 0.0, drive, &p, t).phase;
            let shifted = classical_continuous_phase(x0, p0, drive, &p, t).phase;
            prop_assert!((shifted - base).abs() < 1e-12 * base.abs() * 10.0);
        }

        #[test]
        fn mirror_semiclassical_matches_dictionary(re in -5.0f64..5.0, im in -5.0f64..5.0, wt in 0.0f64..20.0) {
            let (p, c) = reference_system();
            let d = derive_couplings(&p, &c).unwrap();
            let np = 1e5;
            let g = Complex64::new(re, im);
            let semi = semiclassical_phase_quantum_mirror(g, d.k, np, wt).phase;
            let (x0, p0) = coherent_to_phase_space(g, &p, &c);
            let cl = classical_continuous_phase(x0, p0, drive_for_photons(&p, &c, np), &p, wt / p.omega_m()).phase;
            prop_assert!((semi - cl).abs() < 1e-10, "{} vs {}", semi, cl);
        }
    }
}
