use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::args::{CommonArgs, ContinuousArgs, OutputFormat, PulsedArgs, SweepAxis, VisibilityArgs};
use crate::config::{load_config, ConfigFile};
use crate::continuous::{
    classical_continuous_phase, drive_for_photons, quantum_continuous_phase, semiclassical_phase_quantum_field,
    semiclassical_phase_quantum_mirror, trotter_pulsed_approximation, ClassicalTrajectory,
};
use crate::error::{Error, Result};
use crate::oracles::{mc_classical_visibility, mc_noisy_visibility};
use crate::params::{coherent_to_phase_space, derive_couplings, thermal_occupation, FieldState, PhysicalConstants, SystemParams};
use crate::pulsed::{classical_pulsed_phase, quantum_classical_offset, quantum_pulsed_mean_field, MomentumKick};
use crate::sweep::{Format, SweepResult};
use crate::visibility::{classical_visibility, noisy_classical_visibility, quantum_visibility};

pub const POINTS_PER_PERIOD: usize = 512;
pub const PRESET_OMEGA_M: f64 = 2.0 * PI * 1e5;
pub const PRESET_K: f64 = 1e-2;
pub const PRESET_N_PHOTONS: f64 = 1e5;
pub const PRESET_B_TEMPERATURES: [f64; 3] = [1e-5, 1e-2, 1.0];
pub const PRESET_C_TEMPERATURE: f64 = 5e-2;

const DEFAULT_PULSED_N_PHOTONS: f64 = 100.0;
const DEFAULT_N_KICKS: u32 = 4;
const DEFAULT_TEMPERATURE: f64 = PRESET_C_TEMPERATURE;
const QFIELD_SAMPLES_PER_PERIOD: usize = 1024;

/// Resolved system plus the shared command flags.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: SystemParams,
    pub consts: PhysicalConstants,
    pub seed: u64,
    pub format: Format,
}

impl RunConfig {
    pub fn resolve(common: &CommonArgs) -> Result<Self> {
        let file = match &common.config {
            Some(path) => load_config(path)?,
            None => ConfigFile::default(),
        };
        let (mut params, consts) = file.resolve()?;
        if let Some(k) = common.k {
            params = params.with_k(k, &consts)?;
        }
        if let Some(lambda) = common.lambda {
            params = params.with_lambda(lambda, &consts)?;
        }
        Ok(RunConfig {
            params,
            consts,
            seed: common.seed,
            format: match common.format {
                OutputFormat::Csv => Format::Csv,
                OutputFormat::Json => Format::Json,
            },
        })
    }
}

fn base_meta(out: &mut SweepResult, command: &str, cfg: &RunConfig) {
    out.push_meta("tool", concat!("optophase ", env!("CARGO_PKG_VERSION")));
    out.push_meta("command", command);
    out.push_meta("seed", cfg.seed);
    let p = &cfg.params;
    out.push_meta("omega_m", fmt(p.omega_m()));
    out.push_meta("mass", fmt(p.mass()));
    out.push_meta("length", fmt(p.length()));
    out.push_meta("omega_f", fmt(p.omega_f()));
    out.push_meta("kappa", fmt(p.kappa()));
    out.push_meta("n_roundtrips", fmt(p.n_roundtrips()));
    out.push_meta("hbar", fmt(cfg.consts.hbar));
    out.push_meta("k_b", fmt(cfg.consts.k_b));
    out.push_meta("c_light", fmt(cfg.consts.c_light));
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn non_negative(name: &'static str, v: f64) -> Result<f64> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(Error::invalid(name, format!("{v} must be non-negative and finite")));
    }
    Ok(v)
}

fn linspace(min: f64, max: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![min],
        _ => (0..points)
            .map(|i| {
                if i == points - 1 {
                    max
                } else {
                    min + (max - min) * i as f64 / (points - 1) as f64
                }
            })
            .collect(),
    }
}

fn time_grid(period: f64, periods: f64, points: Option<usize>) -> Result<Vec<f64>> {
    if !(periods > 0.0) || !periods.is_finite() {
        return Err(Error::invalid("periods", "must be positive and finite"));
    }
    let points = points.unwrap_or((POINTS_PER_PERIOD as f64 * periods).ceil() as usize + 1);
    if points < 2 {
        return Err(Error::invalid("points", "a time sweep needs at least 2 points"));
    }
    Ok(linspace(0.0, periods * period, points))
}

/// One pulsed row: quantum and classical phase for (N_p, λ, N).
pub fn pulsed_row(cfg: &RunConfig, n_photons: f64, lambda: f64, n_kicks: u32) -> Result<Vec<f64>> {
    let field = FieldState::from_photons(n_photons)?;
    let q = quantum_pulsed_mean_field(field.alpha, lambda, n_kicks)?;
    let classical = if lambda == 0.0 {
        0.0
    } else {
        let p = cfg.params.with_lambda(lambda, &cfg.consts)?;
        let d = derive_couplings(&p, &cfg.consts)?;
        let kick = MomentumKick::from_field(&field, &p, &cfg.consts)?;
        classical_pulsed_phase(&p, &d, &kick, n_kicks)?.phase
    };
    let off = quantum_classical_offset(lambda, n_kicks, n_photons)?;
    Ok(vec![
        n_photons,
        lambda,
        n_kicks as f64,
        q.phase,
        classical,
        off.small_coupling,
        off.exact,
        q.modulus_factor,
    ])
}

pub const PULSED_COLUMNS: [&str; 8] = [
    "n_photons",
    "lambda",
    "n_kicks",
    "phi_quantum",
    "phi_classical",
    "offset_small_coupling",
    "offset_exact",
    "modulus_factor",
];

pub fn cmd_phase_pulsed(args: &PulsedArgs) -> Result<SweepResult> {
    let cfg = RunConfig::resolve(&args.common)?;
    let c = &args.common;
    let system_lambda = derive_couplings(&cfg.params, &cfg.consts)?.lambda;
    let lambda = c.lambda.unwrap_or(system_lambda);
    let n_photons = non_negative("np", c.np.unwrap_or(DEFAULT_PULSED_N_PHOTONS))?;
    let n_kicks = c.nkicks.unwrap_or(DEFAULT_N_KICKS);

    let (default_min, default_max) = match args.axis {
        SweepAxis::Np => (0.0, 1000.0),
        SweepAxis::Lambda => (1e-3, 1e-1),
        SweepAxis::Nkicks => (3.0, 64.0),
    };
    let min = args.min.unwrap_or(default_min);
    let max = args.max.unwrap_or(default_max);
    if !(min <= max) || !min.is_finite() || !max.is_finite() {
        return Err(Error::invalid("min", format!("sweep range [{min}, {max}] is empty or not finite")));
    }
    let axis_values: Vec<f64> = match args.axis {
        SweepAxis::Nkicks => {
            if min < 3.0 || min.fract() != 0.0 || max.fract() != 0.0 || max > u32::MAX as f64 {
                return Err(Error::invalid("min", "the nkicks axis needs integer bounds of at least 3"));
            }
            let available = (max - min) as usize + 1;
            let points = c.points.unwrap_or(available);
            if points == 0 || points > available {
                return Err(Error::invalid(
                    "points",
                    format!("{points} distinct kick counts requested in [{min}, {max}]"),
                ));
            }
            linspace(min, max, points).into_iter().map(f64::round).collect()
        }
        _ => {
            non_negative("min", min)?;
            let points = c.points.unwrap_or(11);
            if points == 0 {
                return Err(Error::invalid("points", "must be at least 1"));
            }
            linspace(min, max, points)
        }
    };

    let rows = axis_values
        .par_iter()
        .map(|&v| match args.axis {
            SweepAxis::Np => pulsed_row(&cfg, v, lambda, n_kicks),
            SweepAxis::Lambda => pulsed_row(&cfg, n_photons, v, n_kicks),
            SweepAxis::Nkicks => pulsed_row(&cfg, n_photons, lambda, v as u32),
        })
        .collect::<Result<Vec<_>>>()?;

    let mut out = SweepResult::new(&PULSED_COLUMNS);
    base_meta(&mut out, "phase pulsed", &cfg);
    out.push_meta(
        "axis",
        match args.axis {
            SweepAxis::Np => "np",
            SweepAxis::Lambda => "lambda",
            SweepAxis::Nkicks => "nkicks",
        },
    );
    out.push_meta("lambda", fmt(lambda));
    out.push_meta("n_photons", fmt(n_photons));
    out.push_meta("n_kicks", n_kicks);
    out.rows = rows;
    Ok(out)
}

pub const CONTINUOUS_COLUMNS: [&str; 7] = [
    "t",
    "omega_t",
    "phi_quantum",
    "phi_classical",
    "phi_semiclassical_qfield",
    "phi_semiclassical_qmirror",
    "modulus_factor",
];

/// One continuous row at time `t` for mirror amplitude γ.
pub fn continuous_row(cfg: &RunConfig, gamma: Complex64, n_photons: f64, t: f64) -> Result<Vec<f64>> {
    let p = &cfg.params;
    let k = derive_couplings(p, &cfg.consts)?.k;
    let wt = p.omega_m() * t;
    let q = quantum_continuous_phase(gamma, k, n_photons, wt);
    let (x0, p0) = coherent_to_phase_space(gamma, p, &cfg.consts);
    let drive = drive_for_photons(p, &cfg.consts, n_photons);
    let cl = classical_continuous_phase(x0, p0, drive, p, t);
    let intervals = ClassicalTrajectory::intervals_for(p, t, QFIELD_SAMPLES_PER_PERIOD);
    let traj = ClassicalTrajectory::sample(x0, p0, drive, p, t, intervals);
    let qfield = semiclassical_phase_quantum_field(&traj, p)?;
    let qmirror = semiclassical_phase_quantum_mirror(gamma, k, n_photons, wt);
    Ok(vec![t, wt, q.phase, cl.phase, qfield.phase, qmirror.phase, q.modulus_factor])
}

pub fn cmd_phase_continuous(args: &ContinuousArgs) -> Result<SweepResult> {
    let cfg = RunConfig::resolve(&args.common)?;
    let c = &args.common;
    let n_photons = non_negative("np", c.np.unwrap_or(PRESET_N_PHOTONS))?;
    let gamma = Complex64::new(args.gamma_re, args.gamma_im);
    if !gamma.re.is_finite() || !gamma.im.is_finite() {
        return Err(Error::invalid("gamma", "must be finite"));
    }
    let grid = time_grid(cfg.params.period(), c.periods.unwrap_or(1.0), c.points)?;
    let rows = grid
        .par_iter()
        .map(|&t| continuous_row(&cfg, gamma, n_photons, t))
        .collect::<Result<Vec<_>>>()?;

    let k = derive_couplings(&cfg.params, &cfg.consts)?.k;
    let mut out = SweepResult::new(&CONTINUOUS_COLUMNS);
    base_meta(&mut out, "phase continuous", &cfg);
    out.push_meta("k", fmt(k));
    out.push_meta("n_photons", fmt(n_photons));
    out.push_meta("gamma_re", fmt(gamma.re));
    out.push_meta("gamma_im", fmt(gamma.im));
    out.push_meta("closed_loop_offset", fmt(2.0 * PI * k * k));
    if let Some(n) = args.trotter_steps {
        let trotter = trotter_pulsed_approximation(k, n_photons, n)?;
        let exact = quantum_continuous_phase(gamma, k, n_photons, 2.0 * PI);
        out.push_meta("trotter_steps", n);
        out.push_meta("trotter_phi_at_n", fmt(trotter.phase));
        out.push_meta("trotter_error", fmt(trotter.phase - exact.phase));
    }
    out.rows = rows;
    Ok(out)
}

pub const VISIBILITY_COLUMNS: [&str; 8] = [
    "temperature",
    "t",
    "omega_t",
    "nu_q_cor",
    "nu_q_kerr",
    "nu_q",
    "nu_c",
    "nu_c_noisy",
];

pub const VISIBILITY_MC_COLUMNS: [&str; 4] = ["nu_c_mc", "nu_c_mc_stderr", "nu_c_noisy_mc", "nu_c_noisy_mc_stderr"];

/// Inputs of a visibility sweep after presets and overrides.
#[derive(Debug, Clone)]
pub struct VisibilityPlan {
    pub cfg: RunConfig,
    pub preset: Option<&'static str>,
    pub k: f64,
    pub n_photons: f64,
    pub delta_sq: f64,
    pub temperatures: Vec<f64>,
    pub times: Vec<f64>,
    pub samples: Option<u64>,
}

impl VisibilityPlan {
    pub fn from_args(args: &VisibilityArgs) -> Result<Self> {
        let mut cfg = RunConfig::resolve(&args.common)?;
        let c = &args.common;
        let preset = if args.fig2b {
            Some("fig2b")
        } else if args.fig2c {
            Some("fig2c")
        } else {
            None
        };
        if preset.is_some() {
            let p = cfg.params;
            let rebuilt = SystemParams::builder()
                .omega_m(PRESET_OMEGA_M)
                .mass(p.mass())
                .length(p.length())
                .omega_f(p.omega_f())
                .kappa(p.kappa())
                .build(&cfg.consts)?;
            cfg.params = rebuilt.with_k(c.k.unwrap_or(PRESET_K), &cfg.consts)?;
        }
        let k = derive_couplings(&cfg.params, &cfg.consts)?.k;
        let n_photons = non_negative("np", c.np.unwrap_or(PRESET_N_PHOTONS))?;
        let delta_sq = match args.delta_sq {
            Some(d) => non_negative("delta-sq", d)?,
            None if n_photons > 0.0 => 1.0 / n_photons,
            None => 0.0,
        };
        let temperatures = match (c.temp_kelvin, preset) {
            (Some(t), _) => vec![non_negative("temp-kelvin", t)?],
            (None, Some("fig2b")) => PRESET_B_TEMPERATURES.to_vec(),
            (None, _) => vec![DEFAULT_TEMPERATURE],
        };
        let times = time_grid(cfg.params.period(), c.periods.unwrap_or(2.0), c.points)?;
        Ok(VisibilityPlan {
            cfg,
            preset,
            k,
            n_photons,
            delta_sq,
            temperatures,
            times,
            samples: c.samples,
        })
    }

    pub fn row(&self, temperature: f64, t: f64) -> Result<Vec<f64>> {
        let p = &self.cfg.params;
        let consts = &self.cfg.consts;
        let n_bar = thermal_occupation(temperature, p.omega_m(), consts)?;
        let q = quantum_visibility(self.k, n_bar, self.n_photons, p.omega_m(), t)?;
        let cl = classical_visibility(p, consts, temperature, t)?;
        let noisy = noisy_classical_visibility(p, consts, temperature, self.n_photons, self.delta_sq, t)?;
        let mut row = vec![
            temperature,
            t,
            p.omega_m() * t,
            q.nu_cor,
            q.nu_kerr,
            q.nu_total,
            cl.nu_total,
            noisy.nu_total,
        ];
        if let Some(n) = self.samples {
            let seed = self.cfg.seed;
            let mc = mc_classical_visibility(p, consts, temperature, self.n_photons, t, n, seed)?;
            let mcn = mc_noisy_visibility(p, consts, temperature, self.n_photons, self.delta_sq, t, n, seed)?;
            row.extend([mc.mean, mc.std_error, mcn.mean, mcn.std_error]);
        }
        Ok(row)
    }

    pub fn run(&self) -> Result<SweepResult> {
        let pairs: Vec<(f64, f64)> = self
            .temperatures
            .iter()
            .flat_map(|&temp| self.times.iter().map(move |&t| (temp, t)))
            .collect();
        let rows = pairs
            .par_iter()
            .map(|&(temp, t)| self.row(temp, t))
            .collect::<Result<Vec<_>>>()?;

        let mut columns: Vec<&str> = VISIBILITY_COLUMNS.to_vec();
        if self.samples.is_some() {
            columns.extend(VISIBILITY_MC_COLUMNS);
        }
        let mut out = SweepResult::new(&columns);
        base_meta(&mut out, "visibility", &self.cfg);
        out.push_meta("preset", self.preset.unwrap_or("none"));
        out.push_meta("k", fmt(self.k));
        out.push_meta("n_photons", fmt(self.n_photons));
        out.push_meta("delta_sq", fmt(self.delta_sq));
        out.push_meta("tau", fmt(self.cfg.params.period()));
        if let Some(n) = self.samples {
            out.push_meta("mc_samples", n);
        }
        let tau = self.cfg.params.period();
        for (i, &temp) in self.temperatures.iter().enumerate() {
            let gap = rows
                .iter()
                .filter(|r| r[0] == temp && r[1] <= tau * (1.0 + 1e-12))
                .map(|r| (r[5] - r[6]).abs())
                .fold(0.0, f64::max);
            if self.temperatures.len() == 1 {
                out.push_meta("temperature", fmt(temp));
                out.push_meta("max_gap_one_period", fmt(gap));
            } else {
                out.push_meta(&format!("temperature_{i}"), fmt(temp));
                out.push_meta(&format!("max_gap_one_period_{i}"), fmt(gap));
            }
        }
        out.rows = rows;
        Ok(out)
    }
}

pub fn cmd_visibility(args: &VisibilityArgs) -> Result<SweepResult> {
    VisibilityPlan::from_args(args)?.run()
}
