//! Ball energies and optimal energy/mass ratios over balls.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, unsupported, Error, Result};
use crate::kernels::{Family, Kernel};
use crate::numerics::{newton, NewtonOptions};
use crate::specfun::{ball_volume, beta_incomplete, gamma, pi_enclosure, Enclosure, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BallRegime {
    RieszClosedForm,
    TruncSubcritical,
    TruncIntermediate,
    TruncRieszRegime,
    YukawaFlat,
    YukawaInterior,
}

impl BallRegime {
    pub fn as_str(&self) -> &'static str {
        match self {
            BallRegime::RieszClosedForm => "RieszClosedForm",
            BallRegime::TruncSubcritical => "TruncSubcritical",
            BallRegime::TruncIntermediate => "TruncIntermediate",
            BallRegime::TruncRieszRegime => "TruncRieszRegime",
            BallRegime::YukawaFlat => "YukawaFlat",
            BallRegime::YukawaInterior => "YukawaInterior",
        }
    }
}

impl std::fmt::Display for BallRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BallRegime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "RieszClosedForm" => BallRegime::RieszClosedForm,
            "TruncSubcritical" => BallRegime::TruncSubcritical,
            "TruncIntermediate" => BallRegime::TruncIntermediate,
            "TruncRieszRegime" => BallRegime::TruncRieszRegime,
            "YukawaFlat" => BallRegime::YukawaFlat,
            "YukawaInterior" => BallRegime::YukawaInterior,
            other => return Err(Error::Parse(format!("unknown regime `{other}`"))),
        })
    }
}

/// Optimal ball ratio. Riesz and truncated kernels report the optimal
/// radius (infinite when the infimum is not attained); Yukawa reports λ*.
#[derive(Clone, Debug, PartialEq)]
pub struct BallRatioResult {
    pub rho: Value,
    pub r_star: Option<f64>,
    pub lambda_star: Option<f64>,
    pub regime: BallRegime,
}

/// I(B_R) for the Riesz kernel.
pub fn riesz_ball_energy(n: u32, alpha: f64, r: f64) -> Result<f64> {
    check_dim_alpha(n, alpha)?;
    check_radius(r)?;
    Ok(riesz_unit_energy(n, alpha)? * r.powf(2.0 * n as f64 - alpha))
}

fn riesz_unit_energy(n: u32, alpha: f64) -> Result<f64> {
    let nf = n as f64;
    let b = nf + 1.0 - alpha;
    Ok(2f64.powf(b) * PI.powf(nf - 0.5) / (b - 1.0) * gamma(b / 2.0)? / (gamma(nf / 2.0)? * gamma((nf + b + 1.0) / 2.0)?))
}

fn check_dim_alpha(n: u32, alpha: f64) -> Result<()> {
    if n < 2 || !(alpha > 0.0 && alpha < n as f64) {
        return domain(format!("need n >= 2 and 0 < alpha < n, got n={n}, alpha={alpha}"));
    }
    Ok(())
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return domain(format!("radius must be positive, got {r}"));
    }
    Ok(())
}

pub fn rho_ball_riesz(n: u32, alpha: f64) -> Result<BallRatioResult> {
    check_dim_alpha(n, alpha)?;
    let nf = n as f64;
    let b = nf + 1.0 - alpha;
    let i1 = riesz_unit_energy(n, alpha)?;
    let vol = ball_volume(n);
    let rho = nf * b / (b - 1.0) * ((b - 1.0) * i1 / (nf * vol)).powf(1.0 / b);
    let r_star = (nf * vol / ((b - 1.0) * i1)).powf(1.0 / b);
    Ok(BallRatioResult { rho: Value::Fast(rho), r_star: Some(r_star), lambda_star: None, regime: BallRegime::RieszClosedForm })
}

/// I(B_R) for the truncated kernel, through incomplete Beta functions when
/// κ < 2R and equal to the Riesz energy otherwise.
pub fn trunc_ball_energy(n: u32, alpha: f64, kappa: f64, r: f64) -> Result<f64> {
    check_dim_alpha(n, alpha)?;
    check_radius(r)?;
    if !(kappa > 0.0) {
        return domain(format!("kappa must be positive, got {kappa}"));
    }
    let lam = kappa / (2.0 * r);
    if lam >= 1.0 {
        return riesz_ball_energy(n, alpha, r);
    }
    let nf = n as f64;
    let b = nf + 1.0 - alpha;
    let h = (nf - 1.0) / 2.0;
    let c = nf * (nf - 1.0) * ball_volume(n - 1) * kappa.powf(b - 1.0) / (b * (b - 1.0));
    let q = 1.0 - lam * lam;
    let bracket =
        lam.powf(1.0 - b) * beta_incomplete(lam * lam, (b + 2.0) / 2.0, h)? - 2.0 * (b - 1.0) * lam / (nf - 1.0) * q.powf(h) + b * beta_incomplete(q, h, 1.5)?;
    Ok(ball_volume(n) * r.powf(nf) * c * bracket)
}

/// κ_min and κ_max of the truncated three-regime structure (n = 3).
pub fn trunc_thresholds(alpha: f64) -> (f64, f64) {
    let b = 4.0 - alpha;
    ((b / PI).powf(1.0 / b), (b * (b + 2.0) / (2.0 * PI)).powf(1.0 / b))
}

/// f_{α,κ}(λ), the truncated ball ratio as a function of λ = κ/(2R) ∈ [0, 1].
pub fn trunc_f(alpha: f64, kappa: f64, lam: f64) -> f64 {
    let b = 4.0 - alpha;
    6.0 * lam / kappa + 6.0 * PI * kappa.powf(b - 1.0) * (lam.powi(3) / (3.0 * (b + 2.0)) - lam / b + 2.0 / (3.0 * (b - 1.0)))
}

pub fn rho_ball_trunc(alpha: f64, kappa: f64) -> Result<BallRatioResult> {
    check_dim_alpha(3, alpha)?;
    if !(kappa > 0.0 && kappa.is_finite()) {
        return domain(format!("kappa must be positive, got {kappa}"));
    }
    let b = 4.0 - alpha;
    let (kmin, kmax) = trunc_thresholds(alpha);
    if kappa <= kmin {
        let rho = 4.0 * PI * kappa.powf(b - 1.0) / (b - 1.0);
        return Ok(BallRatioResult { rho: Value::Fast(rho), r_star: Some(f64::INFINITY), lambda_star: None, regime: BallRegime::TruncSubcritical });
    }
    if kappa >= kmax {
        let mut r = rho_ball_riesz(3, alpha)?;
        r.regime = BallRegime::TruncRieszRegime;
        return Ok(r);
    }
    let lam = (((b + 2.0) / PI) * (PI / b - kappa.powf(-b))).sqrt();
    Ok(BallRatioResult {
        rho: Value::Fast(trunc_f(alpha, kappa, lam)),
        r_star: Some(kappa / (2.0 * lam)),
        lambda_star: None,
        regime: BallRegime::TruncIntermediate,
    })
}

/// Enclosures of (ρ_ball, λ*) for the Coulomb truncated kernel in the
/// intermediate regime, which must be provable at the working precision.
pub fn rho_ball_trunc_enclosure(kappa: &Enclosure) -> Result<(Enclosure, Enclosure)> {
    let p = kappa.prec();
    let pi = pi_enclosure(p);
    let k3 = kappa.powi(3);
    let lower = &pi * &k3;
    let upper = (&pi * &k3).mul_pow2(1);
    if !Enclosure::from_i64(3, p).certainly_lt(&lower) || !upper.certainly_lt(&Enclosure::from_i64(15, p)) {
        return unsupported("kappa is not provably inside the intermediate truncated regime");
    }
    let three = Enclosure::from_i64(3, p);
    let lam2 = (Enclosure::from_i64(5, p) / &pi) * (&pi / &three - k3.recip());
    let lam = lam2.sqrt();
    let bracket = lam.powi(3) / Enclosure::from_i64(15, p) - &lam / &three + Enclosure::one(p) / &three;
    let rho = Enclosure::from_i64(6, p) * &lam / kappa + Enclosure::from_i64(6, p) * &pi * kappa.square() * bracket;
    Ok((rho, lam))
}

/// Bracket b(λ) with f_κ(λ) = 6λ/κ + 12πκ² b(λ), together with b' and b''.
fn yukawa_bracket(lam: f64) -> (f64, f64, f64) {
    if lam >= 1.0 {
        // a_j = (−1)^{j+1}(j−1)(j−4)/j!, b = Σ_{j≥5} a_j λ^{3−j}
        let x = 1.0 / lam;
        let (mut b, mut db, mut d2b) = (0.0, 0.0, 0.0);
        let mut fact = 120.0;
        let mut pw = x * x;
        for j in 5..80u32 {
            let jf = j as f64;
            let a = (jf - 1.0) * (jf - 4.0) / fact * if j % 2 == 1 { 1.0 } else { -1.0 };
            let t = a * pw;
            b += t;
            db += t * (3.0 - jf) * x;
            d2b += t * (3.0 - jf) * (2.0 - jf) * x * x;
            if t.abs() < 1e-18 * b.abs() {
                break;
            }
            fact *= jf + 1.0;
            pw *= x;
        }
        return (b, db, d2b);
    }
    let e = if lam > 0.0 { (-1.0 / lam).exp() } else { 0.0 };
    let l2 = lam * lam;
    let l3 = l2 * lam;
    let b = 1.0 / 3.0 - lam + 4.0 * l3 - (4.0 * l3 + 4.0 * l2 + lam) * e;
    if e == 0.0 {
        return (b, -1.0 + 12.0 * l2, 24.0 * lam);
    }
    let db = -1.0 + 12.0 * l2 - e * (12.0 * l3 + 12.0 * l2 + 5.0 * lam + 1.0) / lam;
    let d2b = 24.0 * lam - e * (24.0 * l2 * l2 + 24.0 * l3 + 12.0 * l2 + 4.0 * lam + 1.0) / l3;
    (b, db, d2b)
}

/// I(B_R) for the Yukawa kernel (n = 3, α = 1).
pub fn yukawa_ball_energy(kappa: f64, r: f64) -> Result<f64> {
    check_radius(r)?;
    if !(kappa > 0.0) {
        return domain(format!("kappa must be positive, got {kappa}"));
    }
    let lam = kappa / (2.0 * r);
    Ok(r.powi(5) * 64.0 * PI * PI * lam * lam * yukawa_bracket(lam).0)
}

/// f_κ(λ), f'_κ(λ) and f''_κ(λ).
pub fn yukawa_f(kappa: f64, lam: f64) -> Result<(f64, f64, f64)> {
    if !(lam >= 0.0) || !(kappa > 0.0) {
        return domain(format!("yukawa_f needs kappa > 0 and lambda >= 0, got ({kappa}, {lam})"));
    }
    let (b, db, d2b) = yukawa_bracket(lam);
    let c = 12.0 * PI * kappa * kappa;
    Ok((6.0 * lam / kappa + c * b, 6.0 / kappa + c * db, c * d2b))
}

/// Enclosures of f_κ(λ) and f'_κ(λ).
pub fn yukawa_f_enclosure(kappa: &Enclosure, lam: &Enclosure) -> Result<(Enclosure, Enclosure)> {
    if !lam.is_positive() || !kappa.is_positive() {
        return domain("yukawa_f_enclosure needs positive kappa and lambda");
    }
    let p = lam.prec();
    let int = |v: i64| Enclosure::from_i64(v, p);
    let e = (-lam.recip()).exp();
    let l2 = lam.square();
    let l3 = &l2 * lam;
    let b = int(1) / int(3) - lam + &l3 * int(4) - (&l3 * int(4) + &l2 * int(4) + lam) * &e;
    let db = int(-1) + &l2 * int(12) - &e * (&l3 * int(12) + &l2 * int(12) + lam * int(5) + int(1)) / lam;
    let c = pi_enclosure(p) * kappa.square() * int(12);
    let f = int(6) * lam / kappa + &c * b;
    let df = int(6) / kappa + c * db;
    Ok((f, df))
}

/// Threshold (2π)^{−1/3} below which the Yukawa optimum is λ* = 0.
pub fn yukawa_flat_threshold() -> f64 {
    (2.0 * PI).powf(-1.0 / 3.0)
}

pub fn rho_ball_yukawa(kappa: f64) -> Result<BallRatioResult> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return domain(format!("kappa must be positive, got {kappa}"));
    }
    if 2.0 * PI * kappa.powi(3) <= 1.0 {
        return Ok(BallRatioResult { rho: Value::Fast(4.0 * PI * kappa * kappa), r_star: None, lambda_star: Some(0.0), regime: BallRegime::YukawaFlat });
    }
    let df = |l: f64| yukawa_f(kappa, l).map(|v| v.1).unwrap_or(f64::NAN);
    let d2f = |l: f64| yukawa_f(kappa, l).map(|v| v.2).unwrap_or(f64::NAN);
    let mut prev = 0.0;
    let mut bracket = None;
    for i in 0..=320 {
        let l = 1e-4 * 10f64.powf(i as f64 / 40.0);
        if df(l) > 0.0 {
            bracket = Some((prev, l));
            break;
        }
        prev = l;
    }
    let (a, b) = bracket.ok_or_else(|| Error::NoConvergence(format!("no sign change of f' found for kappa={kappa}")))?;
    let x0 = if a > 0.0 { (a * b).sqrt() } else { 0.5 * b };
    let root = newton(df, d2f, x0, NewtonOptions { bracket: Some((a, b)), ..NewtonOptions::default() })?;
    let lam = root.x;
    Ok(BallRatioResult { rho: Value::Fast(yukawa_f(kappa, lam)?.0), r_star: None, lambda_star: Some(lam), regime: BallRegime::YukawaInterior })
}

/// I(B_R) for any supported kernel.
pub fn ball_energy(k: &Kernel, r: f64) -> Result<f64> {
    match k.family() {
        Family::Riesz => riesz_ball_energy(k.dim(), k.alpha(), r),
        Family::TruncatedCoulomb => trunc_ball_energy(k.dim(), k.alpha(), k.kappa().unwrap_or(f64::INFINITY), r),
        Family::Yukawa => {
            k.require_yukawa()?;
            yukawa_ball_energy(k.kappa().unwrap_or(f64::INFINITY), r)
        }
    }
}

/// (P(B_R) + I(B_R)) / |B_R| = n/R + I(B_R)/|B_R|.
pub fn energy_mass_ratio(k: &Kernel, r: f64) -> Result<f64> {
    let n = k.dim();
    Ok(n as f64 / r + ball_energy(k, r)? / (ball_volume(n) * r.powi(n as i32)))
}

/// ρ_ball for any supported kernel.
pub fn rho_ball(k: &Kernel) -> Result<BallRatioResult> {
    match k.family() {
        Family::Riesz => rho_ball_riesz(k.dim(), k.alpha()),
        Family::TruncatedCoulomb => {
            if k.dim() != 3 {
                return unsupported("the truncated ball optimum is only available for n=3");
            }
            rho_ball_trunc(k.alpha(), k.kappa().unwrap_or(f64::INFINITY))
        }
        Family::Yukawa => {
            k.require_yukawa()?;
            rho_ball_yukawa(k.kappa().unwrap_or(f64::INFINITY))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::simpson;
    use crate::specfun::sphere_area;
    use proptest::prelude::*;

    fn slicing(k: &Kernel, r: f64) -> f64 {
        let n = k.dim();
        let c = 0.5 * sphere_area(n - 1) * sphere_area(n - 2);
        let f = |t: f64| {
            let (s, co) = t.sin_cos();
            k.slice_energy(2.0 * r * co).unwrap() * (r * s).powi(n as i32 - 2) * r * co
        };
        let half = std::f64::consts::FRAC_PI_2;
        let cut = k.kappa().filter(|&kp| kp < 2.0 * r).map(|kp| (kp / (2.0 * r)).acos());
        match cut {
            Some(c0) => c * (simpson(f, 0.0, c0, 2000).unwrap() + simpson(f, c0, half, 2000).unwrap()),
            None => c * simpson(f, 0.0, half, 2000).unwrap(),
        }
    }

    #[test]
    fn riesz_coulomb_ball() {
        let e = riesz_ball_energy(3, 1.0, 1.3).unwrap();
        assert!((e - 32.0 * PI * PI * 1.3f64.powi(5) / 15.0).abs() < 1e-12 * e);
        let k = Kernel::riesz(3, 1.0).unwrap();
        assert!((slicing(&k, 1.0) / riesz_ball_energy(3, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn riesz_scaling() {
        for (n, a) in [(2, 0.5), (3, 1.7), (5, 2.0)] {
            let e1 = riesz_ball_energy(n, a, 1.0).unwrap();
            let e2 = riesz_ball_energy(n, a, 2.3).unwrap();
            assert!((e2 / e1 - 2.3f64.powf(2.0 * n as f64 - a)).abs() < 1e-12 * e2 / e1);
        }
    }

    #[test]
    fn riesz_optimum() {
        let r = rho_ball_riesz(3, 1.0).unwrap();
        let exp = 4.5 * (16.0 * PI / 15.0).powf(1.0 / 3.0);
        assert!((r.rho.approx() - exp).abs() < 1e-13);
        let rs = r.r_star.unwrap();
        assert!((rs - (15.0 / (16.0 * PI)).powf(1.0 / 3.0)).abs() < 1e-14);
        let k = Kernel::riesz(3, 1.0).unwrap();
        let h = 1e-5;
        let slope = (energy_mass_ratio(&k, rs + h).unwrap() - energy_mass_ratio(&k, rs - h).unwrap()) / (2.0 * h);
        assert!(slope.abs() < 1e-6);
        for (n, a) in [(3, 1.0), (4, 2.0), (2, 1.5)] {
            let k = Kernel::riesz(n, a).unwrap();
            let rho = rho_ball_riesz(n, a).unwrap().rho.approx();
            let rs = rho_ball_riesz(n, a).unwrap().r_star.unwrap();
            let best = (0..=200_000).map(|i| energy_mass_ratio(&k, rs * (0.9 + 0.2 * i as f64 / 200_000.0)).unwrap()).fold(f64::INFINITY, f64::min);
            assert!((best - rho).abs() < 1e-9, "{n} {a}");
        }
    }

    #[test]
    fn truncated_energy() {
        assert_eq!(trunc_ball_energy(3, 1.0, 3.0, 1.0).unwrap(), riesz_ball_energy(3, 1.0, 1.0).unwrap());
        let at = trunc_ball_energy(3, 1.0, 2.0, 1.0).unwrap();
        let below = trunc_ball_energy(3, 1.0, 2.0 * (1.0 - 1e-13), 1.0).unwrap();
        assert!((at - below).abs() < 1e-10 * at);
        let k = Kernel::truncated(3, 1.0, 1.0).unwrap();
        let e = trunc_ball_energy(3, 1.0, 1.0, 1.0).unwrap();
        assert!((slicing(&k, 1.0) / e - 1.0).abs() < 1e-8);
        let e = trunc_ball_energy(3, 1.0, 1e3 * 0.999, 1.0).unwrap();
        assert!((e / riesz_ball_energy(3, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn truncated_regimes() {
        let (kmin, kmax) = trunc_thresholds(1.0);
        assert!((kmin - (3.0 / PI).powf(1.0 / 3.0)).abs() < 1e-15);
        assert!((kmax - (15.0 / (2.0 * PI)).powf(1.0 / 3.0)).abs() < 1e-15);
        for (k, eps) in [(kmin, 1e-9), (kmax, 1e-9)] {
            let lo = rho_ball_trunc(1.0, k - eps).unwrap();
            let hi = rho_ball_trunc(1.0, k + eps).unwrap();
            assert_ne!(lo.regime, hi.regime);
            assert!((lo.rho.approx() - hi.rho.approx()).abs() < 1e-6);
        }
        let r = rho_ball_trunc(1.0, 1.1).unwrap();
        assert_eq!(r.regime, BallRegime::TruncIntermediate);
        let k = Kernel::truncated(3, 1.0, 1.1).unwrap();
        let grid = (1..=500_000).map(|i| energy_mass_ratio(&k, i as f64 * 1e-4).unwrap()).fold(f64::INFINITY, f64::min);
        assert!((grid - r.rho.approx()).abs() < 1e-6);
        assert_eq!(rho_ball_trunc(1.0, 0.5).unwrap().r_star, Some(f64::INFINITY));
    }

    #[test]
    fn truncated_enclosure_contains_fast() {
        let kap = Enclosure::from_frac(11, 10, 128);
        let (rho, lam) = rho_ball_trunc_enclosure(&kap).unwrap();
        let fast = rho_ball_trunc(1.0, 1.1).unwrap();
        assert!(rho.contains_f64(fast.rho.approx()) || (rho.mid_f64() - fast.rho.approx()).abs() < 1e-14);
        assert!(rho.width_f64() < 1e-30);
        assert!((lam.mid_f64() - 1.1 / (2.0 * fast.r_star.unwrap())).abs() < 1e-14);
        assert!(rho_ball_trunc_enclosure(&Enclosure::from_frac(1, 2, 128)).is_err());
    }

    #[test]
    fn yukawa_energy() {
        let k = Kernel::yukawa(3, 1.0, 1.0).unwrap();
        let e = yukawa_ball_energy(1.0, 1.0).unwrap();
        assert!((slicing(&k, 1.0) / e - 1.0).abs() < 1e-8);
        let riesz = 32.0 * PI * PI / 15.0;
        let far = yukawa_ball_energy(1e6, 1.0).unwrap();
        assert!((far / riesz - 1.0).abs() < 1e-6);
        let lam = 1e-3;
        let near = yukawa_ball_energy(2.0 * lam, 1.0).unwrap();
        assert!((near / (64.0 * PI * PI * lam * lam / 3.0) - 1.0).abs() < 4.0 * lam);
    }

    #[test]
    fn yukawa_bracket_branches_meet() {
        let (a, da, d2a) = yukawa_bracket(1.0);
        let l: f64 = 1.0 - 1e-12;
        let e = (-1.0 / l).exp();
        let b = 1.0 / 3.0 - l + 4.0 * l * l * l - (4.0 * l * l * l + 4.0 * l * l + l) * e;
        assert!((a - b).abs() < 1e-12);
        let (_, db, d2b) = yukawa_bracket(l);
        assert!((da - db).abs() < 1e-10 && (d2a - d2b).abs() < 1e-9);
    }

    #[test]
    fn yukawa_f_properties() {
        let k = 0.56;
        let (f0, df0, _) = yukawa_f(k, 0.0).unwrap();
        assert!((f0 - 4.0 * PI * k * k).abs() < 1e-14);
        assert!((df0 - (6.0 / k - 12.0 * PI * k * k)).abs() < 1e-13);
        for i in 0..1000 {
            let l = 1e-3 * 10f64.powf(6.0 * i as f64 / 999.0);
            assert!(yukawa_f(k, l).unwrap().2 > 0.0, "{l}");
        }
        for i in 0..200 {
            let l = 0.01 * 1000f64.powf(i as f64 / 199.0);
            let h = 1e-5 * l;
            let fd = (yukawa_f(k, l + h).unwrap().0 - yukawa_f(k, l - h).unwrap().0) / (2.0 * h);
            let d = yukawa_f(k, l).unwrap().1;
            assert!((fd - d).abs() <= 1e-6 * d.abs().max(1e-2), "{l}: {fd} vs {d}");
        }
    }

    #[test]
    fn yukawa_optimum() {
        let r = rho_ball_yukawa(0.56).unwrap();
        assert_eq!(r.regime, BallRegime::YukawaInterior);
        let lam = r.lambda_star.unwrap();
        assert!(lam > 8.84e-2 && lam < 8.85e-2, "{lam}");
        let t = yukawa_flat_threshold();
        let a = rho_ball_yukawa(t * (1.0 - 1e-12)).unwrap();
        let b = rho_ball_yukawa(t * (1.0 + 1e-12)).unwrap();
        assert_eq!(a.regime, BallRegime::YukawaFlat);
        assert!((a.rho.approx() - b.rho.approx()).abs() < 1e-9);
    }

    #[test]
    fn yukawa_enclosure_contains_fast() {
        let kap = Enclosure::from_frac(56, 100, 128);
        let lam = Enclosure::from_frac(884, 10_000, 128);
        let (f, df) = yukawa_f_enclosure(&kap, &lam).unwrap();
        let (ff, dff, _) = yukawa_f(0.56, 0.0884).unwrap();
        assert!((f.mid_f64() - ff).abs() < 1e-13 && (df.mid_f64() - dff).abs() < 1e-12);
        assert!(f.width_f64() < 1e-30);
    }

    #[test]
    fn dispatch() {
        let k: Kernel = "trunc:alpha=1,kappa=1.1,n=3".parse().unwrap();
        assert_eq!(rho_ball(&k).unwrap().regime, BallRegime::TruncIntermediate);
        let k = Kernel::truncated(4, 1.0, 1.0).unwrap();
        assert!(matches!(rho_ball(&k), Err(Error::Unsupported(_))));
        for s in ["RieszClosedForm", "YukawaFlat", "TruncSubcritical"] {
            assert_eq!(s.parse::<BallRegime>().unwrap().as_str(), s);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn optimum_below_every_ball(fam in 0usize..3, af in 0.1f64..0.9, kappa in 0.2f64..3.0, seed in 0u64..1000) {
            let k = match fam {
                0 => Kernel::riesz(3, 0.2 + 2.6 * af).unwrap(),
                1 => Kernel::truncated(3, 0.2 + 2.6 * af, kappa).unwrap(),
                _ => Kernel::yukawa(3, 1.0, kappa).unwrap(),
            };
            let rho = rho_ball(&k).unwrap().rho.approx();
            let mut x = seed;
            for _ in 0..100 {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let r = 0.01 + 20.0 * ((x >> 11) as f64 / (1u64 << 53) as f64);
                let v = energy_mass_ratio(&k, r).unwrap();
                prop_assert!(rho <= v * (1.0 + 1e-12), "{k} R={r}: {rho} > {v}");
            }
        }

        #[test]
        fn truncated_matches_slicing(n in 2u32..5, af in 0.1f64..0.9, kappa in 0.2f64..3.0, r in 0.3f64..2.0) {
            let alpha = af * n as f64;
            let k = Kernel::truncated(n, alpha, kappa).unwrap();
            let e = trunc_ball_energy(n, alpha, kappa, r).unwrap();
            prop_assert!((slicing(&k, r) / e - 1.0).abs() < 1e-7);
        }
    }
}
