//! Brute-force validators: radial slicing quadrature, Monte Carlo pair
//! sampling and finite cylinders.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, unsupported, Result};
use crate::kernels::{Family, Kernel};
use crate::numerics::simpson;
use crate::specfun::{ball_volume, sphere_area};

/// Number of independent random streams used by the Monte Carlo oracle.
pub const MC_SHARDS: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleEstimate {
    pub value: f64,
    /// Standard error, only for stochastic estimates.
    pub stderr: Option<f64>,
    pub samples_or_nodes: u64,
}

/// I(B_R) = ½|S^{n−1}||S^{n−2}| ∫₀^R S(2√(R²−r²)) r^{n−2} dr with r = R sin θ.
pub fn ball_energy_by_slicing(k: &Kernel, r: f64, n_quad: usize) -> Result<OracleEstimate> {
    if !(r > 0.0 && r.is_finite()) {
        return domain(format!("radius must be positive, got {r}"));
    }
    k.slice_energy(1.0)?;
    let n = k.dim();
    let f = |t: f64| {
        let (s, c) = t.sin_cos();
        k.slice_energy(2.0 * r * c.max(0.0)).unwrap_or(0.0) * (r * s).powi(n as i32 - 2) * r * c
    };
    let half = PI / 2.0;
    // the truncated slice energy has a kink where the chord equals κ
    let integral = match k.kappa().filter(|&kp| k.family() == Family::TruncatedCoulomb && kp < 2.0 * r) {
        Some(kp) => {
            let t0 = (kp / (2.0 * r)).acos();
            simpson(f, 0.0, t0, n_quad)? + simpson(f, t0, half, n_quad)?
        }
        None => simpson(f, 0.0, half, n_quad)?,
    };
    let nodes = if k.family() == Family::TruncatedCoulomb { 2 * n_quad + 2 } else { n_quad + 1 };
    Ok(OracleEstimate { value: 0.5 * sphere_area(n - 1) * sphere_area(n - 2) * integral, stderr: None, samples_or_nodes: nodes as u64 })
}

fn sample_ball(rng: &mut ChaCha8Rng, n: usize, r: f64, out: &mut [f64]) {
    let mut norm2 = 0.0;
    for x in out.iter_mut() {
        let g: f64 = rng.sample(StandardNormal);
        *x = g;
        norm2 += g * g;
    }
    let u: f64 = rng.random();
    let scale = r * u.powf(1.0 / n as f64) / norm2.sqrt();
    for x in out.iter_mut() {
        *x *= scale;
    }
}

/// |B_R|² E[G(|X − Y|)] for X, Y independent and uniform in B_R.
pub fn ball_energy_monte_carlo(k: &Kernel, r: f64, samples: u64, seed: u64) -> Result<OracleEstimate> {
    if samples < 10_000 {
        return domain(format!("Monte Carlo needs at least 10^4 samples, got {samples}"));
    }
    if !(r > 0.0 && r.is_finite()) {
        return domain(format!("radius must be positive, got {r}"));
    }
    let n = k.dim() as usize;
    let per = samples / MC_SHARDS;
    let extra = samples % MC_SHARDS;
    let shards: Vec<(f64, f64)> = (0..MC_SHARDS)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard);
            let m = per + u64::from(shard < extra);
            let (mut x, mut y) = (vec![0.0; n], vec![0.0; n]);
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..m {
                sample_ball(&mut rng, n, r, &mut x);
                sample_ball(&mut rng, n, r, &mut y);
                let d = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                let g = if d > 0.0 { k.eval_unchecked(d) } else { 0.0 };
                s1 += g;
                s2 += g * g;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = shards.iter().fold((0.0, 0.0), |acc, s| (acc.0 + s.0, acc.1 + s.1));
    let nf = samples as f64;
    let mean = s1 / nf;
    let var = (s2 / nf - mean * mean).max(0.0) * nf / (nf - 1.0);
    let v2 = (ball_volume(k.dim()) * r.powi(k.dim() as i32)).powi(2);
    Ok(OracleEstimate { value: v2 * mean, stderr: Some(v2 * (var / nf).sqrt()), samples_or_nodes: samples })
}

/// (P + I)/|C| for the cylinder of radius l and length L (n = 3), with
/// P/|C| = 2/l + 2/L and
/// I/|C| = 8/(l²L) ∫₀^{2l} s I(s) ∫₀^L (L − τ) G(√(s² + τ²)) dτ ds,
/// where I(s) is half the overlap area of two discs at distance s.
pub fn finite_cylinder_ratio(k: &Kernel, l: f64, len: f64, n_quad: usize) -> Result<OracleEstimate> {
    if k.dim() != 3 {
        return unsupported("finite cylinders are only available for n=3");
    }
    if !(l > 0.0 && len > 0.0 && l.is_finite() && len.is_finite()) {
        return domain(format!("l and L must be positive, got l={l}, L={len}"));
    }
    let kappa = k.kappa().unwrap_or(f64::INFINITY);
    let inner = |s: f64| -> f64 {
        let mut top = (len / s).asinh();
        match k.family() {
            Family::TruncatedCoulomb => {
                if s >= kappa {
                    return 0.0;
                }
                top = top.min((kappa / s).acosh());
            }
            Family::Yukawa => top = top.min((40.0 * kappa / s).max(1.0).acosh()),
            Family::Riesz => {}
        }
        if top <= 0.0 {
            return 0.0;
        }
        // τ = s sinh u
        simpson(
            |u: f64| {
                let (sh, ch) = (u.sinh(), u.cosh());
                let rr = s * ch;
                (len - s * sh).max(0.0) * rr * k.eval_unchecked(rr)
            },
            0.0,
            top,
            n_quad,
        )
        .unwrap_or(f64::NAN)
    };
    let disc = |s: f64| l * l * (s / (2.0 * l)).min(1.0).acos() - s / 4.0 * (4.0 * l * l - s * s).max(0.0).sqrt();
    // s = 2l w⁸ flattens the s^{2−α} behaviour at s = 0
    let outer = simpson(
        |w: f64| {
            let w7 = w.powi(7);
            let s = 2.0 * l * w7 * w;
            if s <= 0.0 {
                return 0.0;
            }
            s * disc(s) * inner(s) * 16.0 * l * w7
        },
        0.0,
        1.0,
        n_quad,
    )?;
    let value = 2.0 / l + 2.0 / len + 8.0 / (l * l * len) * outer;
    Ok(OracleEstimate { value, stderr: None, samples_or_nodes: ((n_quad + 1) * (n_quad + 1)) as u64 })
}
