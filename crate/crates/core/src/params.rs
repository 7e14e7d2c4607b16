//! Physical constants, cavity/mirror parameters and the coupling constants
//! derived from them.
//!
//! Everything is SI internally. [`PhysicalConstants::natural`] together with
//! [`SystemParams::nondimensional`] gives the ħ = m = ω = L = 1 system used
//! by most of the closed-form checks.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Below this value of βħω the thermal occupation switches to its
/// high-temperature series.
pub const OCCUPATION_SERIES_THRESHOLD: f64 = 1e-8;

/// Relative mismatch tolerated between a supplied κ and c/(2 L N_rt).
pub const CAVITY_CONSISTENCY_TOL: f64 = 1e-9;

/// κ/ω ratio below which the bad-cavity approximation is flagged.
pub const BAD_CAVITY_RATIO: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant (J·s).
    pub hbar: f64,
    /// Boltzmann constant (J/K).
    pub k_b: f64,
    /// Speed of light (m/s).
    pub c_light: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants {
            hbar: 1.054_571_817e-34,
            k_b: 1.380_649e-23,
            c_light: 299_792_458.0,
        }
    }
}

impl PhysicalConstants {
    pub fn new(hbar: f64, k_b: f64, c_light: f64) -> Result<Self> {
        positive("hbar", hbar)?;
        positive("k_b", k_b)?;
        positive("c_light", c_light)?;
        Ok(PhysicalConstants { hbar, k_b, c_light })
    }

    /// ħ = k_B = c = 1.
    pub fn natural() -> Self {
        PhysicalConstants {
            hbar: 1.0,
            k_b: 1.0,
            c_light: 1.0,
        }
    }
}

/// Validated cavity and mirror parameters.
///
/// κ and N_rt are redundant through κ = c/(2 L N_rt). At least one must be
/// supplied; the other is derived. Supplying both requires them to agree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    omega_m: f64,
    mass: f64,
    length: f64,
    omega_f: f64,
    kappa: f64,
    n_roundtrips: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SystemParamsBuilder {
    omega_m: Option<f64>,
    mass: Option<f64>,
    length: Option<f64>,
    omega_f: Option<f64>,
    kappa: Option<f64>,
    n_roundtrips: Option<f64>,
}

impl SystemParamsBuilder {
    /// Mechanical angular frequency ω (rad/s).
    pub fn omega_m(mut self, v: f64) -> Self {
        self.omega_m = Some(v);
        self
    }

    /// Mirror mass m (kg).
    pub fn mass(mut self, v: f64) -> Self {
        self.mass = Some(v);
        self
    }

    /// Mean cavity length L (m).
    pub fn length(mut self, v: f64) -> Self {
        self.length = Some(v);
        self
    }

    /// Optical angular frequency ω_f (rad/s).
    pub fn omega_f(mut self, v: f64) -> Self {
        self.omega_f = Some(v);
        self
    }

    /// Cavity amplitude decay rate κ (rad/s).
    pub fn kappa(mut self, v: f64) -> Self {
        self.kappa = Some(v);
        self
    }

    /// Number of round trips per kick. Must be a positive integer.
    pub fn n_roundtrips(mut self, v: f64) -> Self {
        self.n_roundtrips = Some(v);
        self
    }

    pub fn build(self, consts: &PhysicalConstants) -> Result<SystemParams> {
        let omega_m = required("omega_m", self.omega_m)?;
        let mass = required("mass", self.mass)?;
        let length = required("length", self.length)?;
        let omega_f = required("omega_f", self.omega_f)?;
        for (name, v) in [
            ("omega_m", omega_m),
            ("mass", mass),
            ("length", length),
            ("omega_f", omega_f),
        ] {
            positive(name, v)?;
        }
        if let Some(n) = self.n_roundtrips {
            positive("n_roundtrips", n)?;
            if n.fract() != 0.0 {
                return Err(Error::invalid("n_roundtrips", format!("{n} is not an integer")));
            }
        }
        if let Some(kappa) = self.kappa {
            positive("kappa", kappa)?;
        }
        let (kappa, n_roundtrips) = match (self.kappa, self.n_roundtrips) {
            (Some(kappa), Some(n)) => {
                check_cavity(kappa, n, length, consts)?;
                (kappa, n)
            }
            (Some(kappa), None) => (kappa, consts.c_light / (2.0 * length * kappa)),
            (None, Some(n)) => (consts.c_light / (2.0 * length * n), n),
            (None, None) => {
                return Err(Error::invalid(
                    "kappa",
                    "one of kappa or n_roundtrips must be given",
                ))
            }
        };
        let params = SystemParams {
            omega_m,
            mass,
            length,
            omega_f,
            kappa,
            n_roundtrips,
        };
        if !params.is_bad_cavity() {
            log::warn!(
                "kappa/omega_m = {:.3e} is not much larger than 1; the pulsed model assumes the bad-cavity limit",
                kappa / omega_m
            );
        }
        Ok(params)
    }
}

impl SystemParams {
    pub fn builder() -> SystemParamsBuilder {
        SystemParamsBuilder::default()
    }

    /// Dimensionless system for [`PhysicalConstants::natural`]:
    /// m = ω = L = 1, with ω_f and κ chosen to produce the given `k` and `λ`.
    pub fn nondimensional(k: f64, lambda: f64) -> Result<Self> {
        positive("k", k)?;
        positive("lambda", lambda)?;
        let consts = PhysicalConstants::natural();
        let g0 = SQRT_2 * k;
        let kappa = g0 / lambda;
        SystemParams::builder()
            .omega_m(1.0)
            .mass(1.0)
            .length(1.0)
            .omega_f(SQRT_2 * k)
            .kappa(kappa)
            .build(&consts)
    }

    pub fn omega_m(&self) -> f64 {
        self.omega_m
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn omega_f(&self) -> f64 {
        self.omega_f
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Effective round-trip count. Integer when it was supplied directly.
    pub fn n_roundtrips(&self) -> f64 {
        self.n_roundtrips
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega_m
    }

    pub fn is_bad_cavity(&self) -> bool {
        self.kappa >= BAD_CAVITY_RATIO * self.omega_m
    }

    /// Same mirror and cavity with ω_f rescaled so that the continuous
    /// coupling equals `k`. κ and N_rt are kept, so λ changes with it.
    pub fn with_k(&self, k: f64, consts: &PhysicalConstants) -> Result<Self> {
        positive("k", k)?;
        let x0 = zero_point_length(consts.hbar, self.mass, self.omega_m);
        Ok(SystemParams {
            omega_f: SQRT_2 * k * self.omega_m * self.length / x0,
            ..*self
        })
    }

    /// Same system with κ (and N_rt) rescaled so that the pulsed coupling
    /// equals `lambda`.
    pub fn with_lambda(&self, lambda: f64, consts: &PhysicalConstants) -> Result<Self> {
        positive("lambda", lambda)?;
        let g0 = self.omega_f * zero_point_length(consts.hbar, self.mass, self.omega_m) / self.length;
        let kappa = g0 / lambda;
        Ok(SystemParams {
            kappa,
            n_roundtrips: consts.c_light / (2.0 * self.length * kappa),
            ..*self
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedCouplings {
    /// Zero-point length √(ħ/mω) (m).
    pub x_zpf: f64,
    /// Single-photon coupling rate ω_f x₀ / L (rad/s).
    pub g0: f64,
    /// Pulsed coupling g₀/κ.
    pub lambda: f64,
    /// Continuous coupling g₀/(√2 ω).
    pub k: f64,
    /// Mechanical period 2π/ω (s).
    pub tau: f64,
    /// Optical wavevector ω_f / c (1/m).
    pub k_f: f64,
    /// ω_f / (ω² L √m), in 1/√J.
    pub chi: f64,
}

pub fn derive_couplings(p: &SystemParams, c: &PhysicalConstants) -> Result<DerivedCouplings> {
    check_cavity(p.kappa, p.n_roundtrips, p.length, c)?;
    let x_zpf = zero_point_length(c.hbar, p.mass, p.omega_m);
    let g0 = p.omega_f * x_zpf / p.length;
    Ok(DerivedCouplings {
        x_zpf,
        g0,
        lambda: g0 / p.kappa,
        k: g0 / (SQRT_2 * p.omega_m),
        tau: p.period(),
        k_f: p.omega_f / c.c_light,
        chi: p.omega_f / (p.omega_m * p.omega_m * p.length * p.mass.sqrt()),
    })
}

/// Mean thermal phonon number 1/(e^{βħω} − 1).
pub fn thermal_occupation(temperature: f64, omega_m: f64, c: &PhysicalConstants) -> Result<f64> {
    if !(temperature >= 0.0) {
        return Err(Error::invalid(
            "temperature",
            format!("{temperature} K is negative or NaN"),
        ));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(occupation_from_reduced(reduced_energy(temperature, omega_m, c)))
}

/// βħω for a mode of angular frequency `omega_m` at `temperature` (> 0).
pub fn reduced_energy(temperature: f64, omega_m: f64, c: &PhysicalConstants) -> f64 {
    c.hbar * omega_m / (c.k_b * temperature)
}

/// 1/(e^x − 1) for x = βħω ≥ 0.
pub fn occupation_from_reduced(x: f64) -> f64 {
    if x < OCCUPATION_SERIES_THRESHOLD {
        1.0 / x - 0.5
    } else {
        1.0 / x.exp_m1()
    }
}

/// Initial mirror state in one of the three descriptions used throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MirrorState {
    QuantumCoherent { gamma: Complex64 },
    ClassicalPoint { x0: f64, p0: f64 },
    Thermal { temperature: f64 },
}

impl MirrorState {
    pub fn thermal(temperature: f64) -> Result<Self> {
        if !(temperature >= 0.0) {
            return Err(Error::invalid("temperature", "must be non-negative"));
        }
        Ok(MirrorState::Thermal { temperature })
    }

    /// Classical point with the same first moments as a coherent state:
    /// x₀ = √2 γ_R √(ħ/mω), p₀ = √2 γ_I √(ħmω).
    pub fn to_classical(&self, p: &SystemParams, c: &PhysicalConstants) -> Option<MirrorState> {
        match *self {
            MirrorState::QuantumCoherent { gamma } => {
                let (x0, p0) = coherent_to_phase_space(gamma, p, c);
                Some(MirrorState::ClassicalPoint { x0, p0 })
            }
            s @ MirrorState::ClassicalPoint { .. } => Some(s),
            MirrorState::Thermal { .. } => None,
        }
    }

    pub fn to_quantum(&self, p: &SystemParams, c: &PhysicalConstants) -> Option<MirrorState> {
        match *self {
            MirrorState::ClassicalPoint { x0, p0 } => Some(MirrorState::QuantumCoherent {
                gamma: phase_space_to_coherent(x0, p0, p, c),
            }),
            s @ MirrorState::QuantumCoherent { .. } => Some(s),
            MirrorState::Thermal { .. } => None,
        }
    }
}

pub fn coherent_to_phase_space(gamma: Complex64, p: &SystemParams, c: &PhysicalConstants) -> (f64, f64) {
    let x0 = SQRT_2 * gamma.re * (c.hbar / (p.mass * p.omega_m)).sqrt();
    let p0 = SQRT_2 * gamma.im * (c.hbar * p.mass * p.omega_m).sqrt();
    (x0, p0)
}

pub fn phase_space_to_coherent(x0: f64, p0: f64, p: &SystemParams, c: &PhysicalConstants) -> Complex64 {
    Complex64::new(
        x0 / (SQRT_2 * (c.hbar / (p.mass * p.omega_m)).sqrt()),
        p0 / (SQRT_2 * (c.hbar * p.mass * p.omega_m).sqrt()),
    )
}

/// Coherent optical probe |α⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldState {
    pub alpha: Complex64,
}

impl FieldState {
    pub fn new(alpha: Complex64) -> Self {
        FieldState { alpha }
    }

    /// Real amplitude √N_p.
    pub fn from_photons(n_photons: f64) -> Result<Self> {
        if !(n_photons >= 0.0) {
            return Err(Error::invalid("n_photons", "must be non-negative"));
        }
        Ok(FieldState {
            alpha: Complex64::new(n_photons.sqrt(), 0.0),
        })
    }

    pub fn n_photons(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    /// E₀ = ħ ω_f N_p (J).
    pub fn energy(&self, omega_f: f64, c: &PhysicalConstants) -> f64 {
        c.hbar * omega_f * self.n_photons()
    }
}

fn zero_point_length(hbar: f64, mass: f64, omega_m: f64) -> f64 {
    (hbar / (mass * omega_m)).sqrt()
}

fn check_cavity(kappa: f64, n_roundtrips: f64, length: f64, c: &PhysicalConstants) -> Result<()> {
    let implied = c.c_light / (2.0 * length * n_roundtrips);
    let mismatch = ((kappa - implied) / implied).abs();
    if mismatch > CAVITY_CONSISTENCY_TOL || !mismatch.is_finite() {
        return Err(Error::InconsistentCavity {
            kappa,
            n_roundtrips,
            implied,
            mismatch,
        });
    }
    Ok(())
}

fn required(name: &'static str, v: Option<f64>) -> Result<f64> {
    v.ok_or_else(|| Error::invalid(name, "missing"))
}

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invalid(name, format!("{v} is not a positive finite number")))
    }
}
