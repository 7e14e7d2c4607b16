//! Log-space Poisson weights and uniform-grid Romberg quadrature.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const EXACT_LN_FACTORIAL_MAX: usize = 256;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(EXACT_LN_FACTORIAL_MAX + 1);
        let mut acc = 0.0f64;
        t.push(0.0);
        for i in 1..=EXACT_LN_FACTORIAL_MAX {
            acc += (i as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// ln(n!). Summed exactly up to 256, Stirling series beyond.
pub fn ln_factorial(n: u64) -> f64 {
    if (n as usize) <= EXACT_LN_FACTORIAL_MAX {
        return ln_factorial_table()[n as usize];
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0))));
    x * x.ln() - x + 0.5 * (2.0 * PI * x).ln() + series
}

/// ln P(n | mean) for the Poisson distribution.
pub fn ln_poisson(n: u64, mean: f64) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -mean + n as f64 * mean.ln() - ln_factorial(n)
}

/// 1 − cos θ as 2 sin²(θ/2).
pub fn one_minus_cos(theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    2.0 * s * s
}

/// θ − sin θ, by its Taylor series near zero where the subtraction cancels.
pub fn theta_minus_sin(theta: f64) -> f64 {
    if theta.abs() < 0.1 {
        let t2 = theta * theta;
        let t3 = t2 * theta;
        t3 * (1.0 / 6.0 - t2 * (1.0 / 120.0 - t2 * (1.0 / 5040.0 - t2 / 362_880.0)))
    } else {
        theta - theta.sin()
    }
}

/// Default photon-number cutoff ⌈N_p + 10√N_p + 20⌉.
pub fn default_cutoff(n_photons: f64) -> u64 {
    (n_photons + 10.0 * n_photons.sqrt() + 20.0).ceil() as u64
}

/// Poisson weights on a contiguous window `[start, start + weights.len())`.
///
/// Weights are built by the ratio recurrence outward from the mode, so the
/// relative error between neighbouring weights stays at rounding level even
/// for means of order 10⁵; only the overall scale comes from ln P(mode).
#[derive(Debug, Clone)]
pub struct PoissonWindow {
    pub start: u64,
    pub weights: Vec<f64>,
}

impl PoissonWindow {
    /// Window ending at `hi`, starting at the lowest index whose weight is
    /// still at least `floor`.
    pub fn new(mean: f64, hi: u64, floor: f64) -> Self {
        if mean == 0.0 {
            let mut weights = vec![0.0; hi as usize + 1];
            weights[0] = 1.0;
            return PoissonWindow { start: 0, weights };
        }
        let mode = (mean.floor() as u64).min(hi);
        let ln_mode = ln_poisson(mode, mean);
        let p_mode = ln_mode.exp();

        let mut down = Vec::new();
        let mut w = p_mode;
        let mut n = mode;
        while n > 0 {
            w *= n as f64 / mean;
            n -= 1;
            if w < floor {
                break;
            }
            down.push(w);
        }
        let start = mode - down.len() as u64;
        let mut weights: Vec<f64> = down.into_iter().rev().collect();
        weights.push(p_mode);
        let mut w = p_mode;
        for n in mode..hi {
            w *= mean / (n + 1) as f64;
            weights.push(w);
        }
        PoissonWindow { start, weights }
    }

    pub fn end(&self) -> u64 {
        self.start + self.weights.len() as u64 - 1
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .map(move |(i, &w)| (self.start + i as u64, w))
    }

    pub fn mass(&self) -> f64 {
        // Small terms first.
        let mut sorted = self.weights.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted.iter().sum()
    }
}

/// Smallest cutoff whose upper Poisson tail is below `tail`.
pub fn required_cutoff(mean: f64, tail: f64) -> u64 {
    if mean == 0.0 {
        return 0;
    }
    let mut n = mean.floor() as u64;
    loop {
        // Upper tail bound: P(n+1)·(1 + r + r² + ...) with r = mean/(n+2).
        let p_next = ln_poisson(n + 1, mean).exp();
        let r = mean / (n + 2) as f64;
        if r < 1.0 && p_next / (1.0 - r) < tail {
            return n;
        }
        n += 1;
    }
}

/// Romberg extrapolation of the trapezoid rule on uniformly spaced samples.
///
/// `values.len() - 1` intervals of width `h`. The nested coarser grids are
/// taken by striding, so the number of Richardson levels is limited by the
/// power of two dividing the interval count, and by `max_levels`. Returns
/// the integral and the magnitude of the last extrapolation correction.
pub fn romberg_uniform(values: &[f64], h: f64, max_levels: usize) -> (f64, f64) {
    let intervals = values.len().saturating_sub(1);
    if intervals == 0 {
        return (0.0, 0.0);
    }
    let mut levels = 0usize;
    while levels < max_levels && intervals.is_multiple_of(1 << (levels + 1)) {
        levels += 1;
    }
    // Trapezoid estimates from coarsest (stride 2^levels) to finest.
    let mut table: Vec<f64> = (0..=levels)
        .rev()
        .map(|l| {
            let stride = 1usize << l;
            let inner: f64 = values[stride..intervals].iter().step_by(stride).sum();
            (h * stride as f64) * (0.5 * (values[0] + values[intervals]) + inner)
        })
        .collect();
    if table.len() == 1 {
        return (table[0], f64::INFINITY);
    }
    let mut err = f64::INFINITY;
    let mut factor = 4.0;
    while table.len() > 1 {
        let next: Vec<f64> = table
            .windows(2)
            .map(|w| w[1] + (w[1] - w[0]) / (factor - 1.0))
            .collect();
        err = (next[next.len() - 1] - table[table.len() - 1]).abs();
        table = next;
        factor *= 4.0;
    }
    (table[0], err)
}

/// Uniform spacing of strictly increasing sample times, or an error naming
/// the first offending sample.
pub fn uniform_step(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Ok(0.0);
    }
    let h = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    if !(h > 0.0) {
        return Err(Error::BadTimeGrid { index: 1 });
    }
    if let Some(i) = times.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::BadTimeGrid { index: i + 1 });
    }
    if let Some(i) = times.windows(2).position(|w| ((w[1] - w[0] - h) / h).abs() > 1e-6) {
        return Err(Error::BadTimeGrid { index: i + 1 });
    }
    Ok(h)
}
