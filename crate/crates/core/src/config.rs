//! `key = value` system description files.
//!
//! ```text
//! # default mirror
//! omega_m = 628318.5307179586   # rad/s
//! mass = 1e-11                  # kg
//! length = 1e-3                 # m
//! omega_f = 1.77e15             # rad/s
//! n_roundtrips = 1000           # or kappa (rad/s); both must agree
//! ```
//!
//! Optional keys `hbar` (J s), `k_b` (J/K) and `c_light` (m/s) replace the
//! CODATA constants. Keys missing from the file take the built-in defaults.

use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};
use crate::params::{PhysicalConstants, SystemParams};

pub const DEFAULT_OMEGA_M: f64 = 2.0 * PI * 1e5;
pub const DEFAULT_MASS: f64 = 1e-11;
pub const DEFAULT_LENGTH: f64 = 1e-3;
pub const DEFAULT_OMEGA_F: f64 = 1.77e15;
pub const DEFAULT_N_ROUNDTRIPS: f64 = 1000.0;

const KEYS: [&str; 9] = [
    "omega_m",
    "mass",
    "length",
    "omega_f",
    "kappa",
    "n_roundtrips",
    "hbar",
    "k_b",
    "c_light",
];

/// Values present in a config file, before defaults are applied.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ConfigFile {
    pub omega_m: Option<f64>,
    pub mass: Option<f64>,
    pub length: Option<f64>,
    pub omega_f: Option<f64>,
    pub kappa: Option<f64>,
    pub n_roundtrips: Option<f64>,
    pub hbar: Option<f64>,
    pub k_b: Option<f64>,
    pub c_light: Option<f64>,
}

impl ConfigFile {
    fn slot(&mut self, key: &str) -> Option<&mut Option<f64>> {
        Some(match key {
            "omega_m" => &mut self.omega_m,
            "mass" => &mut self.mass,
            "length" => &mut self.length,
            "omega_f" => &mut self.omega_f,
            "kappa" => &mut self.kappa,
            "n_roundtrips" => &mut self.n_roundtrips,
            "hbar" => &mut self.hbar,
            "k_b" => &mut self.k_b,
            "c_light" => &mut self.c_light,
            _ => return None,
        })
    }

    pub fn constants(&self) -> Result<PhysicalConstants> {
        let d = PhysicalConstants::default();
        PhysicalConstants::new(
            self.hbar.unwrap_or(d.hbar),
            self.k_b.unwrap_or(d.k_b),
            self.c_light.unwrap_or(d.c_light),
        )
    }

    /// Validated system and constants, filling gaps with the defaults.
    pub fn resolve(&self) -> Result<(SystemParams, PhysicalConstants)> {
        let consts = self.constants()?;
        let mut b = SystemParams::builder()
            .omega_m(self.omega_m.unwrap_or(DEFAULT_OMEGA_M))
            .mass(self.mass.unwrap_or(DEFAULT_MASS))
            .length(self.length.unwrap_or(DEFAULT_LENGTH))
            .omega_f(self.omega_f.unwrap_or(DEFAULT_OMEGA_F));
        match (self.kappa, self.n_roundtrips) {
            (None, None) => b = b.n_roundtrips(DEFAULT_N_ROUNDTRIPS),
            (k, n) => {
                if let Some(k) = k {
                    b = b.kappa(k);
                }
                if let Some(n) = n {
                    b = b.n_roundtrips(n);
                }
            }
        }
        Ok((b.build(&consts)?, consts))
    }
}

pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let mut cfg = ConfigFile::default();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |reason: String| Error::Config { line: line_no, reason };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
        let key = key.trim();
        let value = value.trim();
        let slot = cfg
            .slot(key)
            .ok_or_else(|| err(format!("unknown key `{key}` (expected one of {})", KEYS.join(", "))))?;
        if slot.is_some() {
            return Err(err(format!("duplicate key `{key}`")));
        }
        let v: f64 = value
            .parse()
            .map_err(|_| err(format!("`{value}` is not a number")))?;
        if !v.is_finite() {
            return Err(err(format!("`{key}` must be finite")));
        }
        *slot = Some(v);
    }
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ConfigFile> {
    parse_config(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_documented_example() {
        let text = "# Fig. 2 mirror\nomega_m = 628318.5307179586   # rad/s\nmass = 1e-11\n\n  length=1e-3\nomega_f = 1.77e15\nn_roundtrips = 1000\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.mass, Some(1e-11));
        assert_eq!(cfg.kappa, None);
        let (p, c) = cfg.resolve().unwrap();
        assert_eq!(p.n_roundtrips(), 1000.0);
        assert_eq!(c, PhysicalConstants::default());
    }

    #[test]
    fn empty_file_gives_defaults() {
        let (p, _) = parse_config("").unwrap().resolve().unwrap();
        assert_eq!(p.omega_m(), DEFAULT_OMEGA_M);
        assert_eq!(p.n_roundtrips(), DEFAULT_N_ROUNDTRIPS);
    }

    #[test]
    fn kappa_alone_replaces_default_roundtrips() {
        let (p, c) = parse_config("kappa = 1e9").unwrap().resolve().unwrap();
        assert_eq!(p.kappa(), 1e9);
        assert!((p.n_roundtrips() - c.c_light / (2.0 * DEFAULT_LENGTH * 1e9)).abs() < 1e-9);
    }

    #[test]
    fn errors_carry_line_numbers() {
        for (text, line) in [
            ("mass = 1\nbogus = 2", 2),
            ("mass = 1\nmass = 2", 2),
            ("\n\nlength 3", 3),
            ("omega_f = abc", 1),
            ("hbar = inf", 1),
        ] {
            match parse_config(text) {
                Err(Error::Config { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn inconsistent_cavity_rejected_at_resolve() {
        let cfg = parse_config("kappa = 1e9\nn_roundtrips = 1000").unwrap();
        assert!(matches!(cfg.resolve(), Err(Error::InconsistentCavity { .. })));
        assert!(parse_config("mass = -1").unwrap().resolve().is_err());
    }

    proptest! {
        #[test]
        fn never_panics(s in "\\PC*") {
            let _ = parse_config(&s);
        }

        #[test]
        fn written_values_round_trip(m in 1e-15f64..1.0, l in 1e-6f64..1.0) {
            let text = format!("mass = {m:?}\nlength = {l:?}\n");
            let cfg = parse_config(&text).unwrap();
            prop_assert_eq!(cfg.mass, Some(m));
            prop_assert_eq!(cfg.length, Some(l));
        }
    }
}
