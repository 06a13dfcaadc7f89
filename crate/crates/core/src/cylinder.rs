//! Energy/mass ratios of infinite cylinders.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ball::riesz_ball_energy;
use crate::error::{domain, unsupported, Result};
use crate::kernels::{cyl_reduction_constant, Family, Kernel};
use crate::numerics::{convergence_study, minimize_1d, simpson, ConvergenceReport, DEFAULT_MIN_TOL};
use crate::specfun::{ball_volume, catalan, catalan_enclosure, k0_enclosure, k0_fast, pi_enclosure, Enclosure, EvalMode, Value, CATALAN_DIGITS};

pub const DEFAULT_N_QUAD: usize = 1 << 12;
pub const REFERENCE_N_QUAD: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CylMethod {
    ClosedForm,
    GIntegral,
    ExactCatalan,
    SimpsonSubtracted,
    RiemannUpper,
}

/// σ_cyl at radius `l`. `RiemannUpper` values never undershoot the true σ.
#[derive(Clone, Debug, PartialEq)]
pub struct CylRatioResult {
    pub sigma: Value,
    pub l: f64,
    pub method: CylMethod,
}

fn check_l(l: f64) -> Result<()> {
    if !(l > 0.0 && l.is_finite()) {
        return domain(format!("cylinder radius must be positive, got {l}"));
    }
    Ok(())
}

fn riesz_cyl_parts(n: u32, alpha: f64) -> Result<(f64, f64)> {
    if n < 3 || !(alpha > 1.0 && alpha < n as f64) {
        return unsupported(format!("cylinder ratio needs n >= 3 and 1 < alpha < n (infinite otherwise), got n={n}, alpha={alpha}"));
    }
    let c = cyl_reduction_constant(alpha)?;
    let i = riesz_ball_energy(n - 1, alpha - 1.0, 1.0)?;
    Ok((n as f64 + 1.0 - alpha, c * i / ball_volume(n - 1)))
}

/// σ(l) = (n−1)/l + c_α l^{β−1} I(B₁^{n−1})/|B₁^{n−1}|.
pub fn sigma_cyl_riesz(n: u32, alpha: f64, l: f64) -> Result<f64> {
    check_l(l)?;
    let (b, a) = riesz_cyl_parts(n, alpha)?;
    Ok((n as f64 - 1.0) / l + a * l.powf(b - 1.0))
}

pub fn rho_cyl_riesz(n: u32, alpha: f64) -> Result<CylRatioResult> {
    let (b, a) = riesz_cyl_parts(n, alpha)?;
    let m = n as f64 - 1.0;
    let rho = m * b / (b - 1.0) * (a * (b - 1.0) / m).powf(1.0 / b);
    let l = (m / ((b - 1.0) * a)).powf(1.0 / b);
    Ok(CylRatioResult { sigma: Value::Fast(rho), l, method: CylMethod::ClosedForm })
}

/// g(ℓ) = (4π/3)[ℓ − arcsin ℓ + 2ℓ(1 − √(1−ℓ²)) + ℓ³ atanh √(1−ℓ²)].
pub fn g_trunc(ell: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&ell) {
        return domain(format!("g_trunc needs 0 <= ell <= 1, got {ell}"));
    }
    if ell == 0.0 {
        return Ok(0.0);
    }
    let y = (1.0 - ell * ell).sqrt();
    let at = if ell == 1.0 { 0.0 } else { 0.5 * ((1.0 + y) * (1.0 + y) / (ell * ell)).ln() };
    // 1 − y = ℓ²/(1 + y)
    Ok(4.0 * PI / 3.0 * (ell - ell.asin() + 2.0 * ell * ell * ell / (1.0 + y) + ell.powi(3) * at))
}

/// Truncated Coulomb σ(l) for l ≤ κ/2, written with r = sin θ.
pub fn sigma_cyl_trunc(kappa: f64, l: f64, n_quad: usize) -> Result<CylRatioResult> {
    check_l(l)?;
    if !(kappa > 0.0) {
        return domain(format!("kappa must be positive, got {kappa}"));
    }
    if l > kappa / 2.0 {
        return unsupported(format!("truncated cylinder ratio is only available for l <= kappa/2 (l={l}, kappa={kappa})"));
    }
    let lam = kappa / (2.0 * l);
    let integral = simpson(
        |t: f64| {
            let c = t.cos().max(0.0);
            g_trunc((c / lam).min(1.0)).unwrap_or(0.0) * c
        },
        0.0,
        PI / 2.0,
        n_quad,
    )?;
    Ok(CylRatioResult { sigma: Value::Fast(4.0 * lam / kappa + 2.0 * lam * kappa * kappa / PI * integral), l, method: CylMethod::GIntegral })
}

/// σ(κ/2) = 4/κ + 4κ²(π/2 − 17/12 + C/2).
pub fn sigma_cyl_trunc_exact_half(kappa: f64, mode: EvalMode) -> Result<CylRatioResult> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return domain(format!("kappa must be positive, got {kappa}"));
    }
    let sigma = match mode {
        EvalMode::Fast => Value::Fast(4.0 / kappa + 4.0 * kappa * kappa * (PI / 2.0 - 17.0 / 12.0 + catalan(mode).approx() / 2.0)),
        EvalMode::Certified(p) => Value::Certified(trunc_exact_half_enclosure(&Enclosure::from_f64(kappa, p.bits()))),
    };
    Ok(CylRatioResult { sigma, l: kappa / 2.0, method: CylMethod::ExactCatalan })
}

/// Enclosure of σ(κ/2) for an enclosed κ.
pub fn trunc_exact_half_enclosure(kappa: &Enclosure) -> Enclosure {
    let p = kappa.prec();
    let bracket = pi_enclosure(p).mul_pow2(-1) - Enclosure::from_frac(17, 12, p) + catalan_enclosure(CATALAN_DIGITS, p).mul_pow2(-1);
    Enclosure::from_i64(4, p) / kappa + kappa.square().mul_pow2(2) * bracket
}

/// I(s) in its three-term form with arccos and arcsin.
pub fn yukawa_geometry_i(l: f64, s: f64) -> Result<f64> {
    check_l(l)?;
    if !(0.0..=2.0 * l).contains(&s) {
        return domain(format!("I(s) needs 0 <= s <= 2l, got s={s}, l={l}"));
    }
    let x = (s / (2.0 * l)).min(1.0);
    Ok(l * (2.0 * l - s) / 2.0 * x.acos() + l * s * ((2.0 * l - s) / (4.0 * l)).sqrt().asin() - s / 4.0 * (4.0 * l * l - s * s).max(0.0).sqrt())
}

/// Components of the Yukawa cylinder integrand F(s) = s K0(s/κ) I(s) and
/// its two leading singular parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct YukawaIntegrand {
    pub kappa: f64,
    pub l: f64,
    k0_end: f64,
}

impl YukawaIntegrand {
    pub fn new(kappa: f64, l: f64) -> Result<Self> {
        check_l(l)?;
        if !(kappa > 0.0 && kappa.is_finite()) {
            return domain(format!("kappa must be positive, got {kappa}"));
        }
        Ok(YukawaIntegrand { kappa, l, k0_end: k0_fast(2.0 * l / kappa) })
    }

    fn root(&self, s: f64) -> f64 {
        (4.0 * self.l * self.l - s * s).max(0.0).sqrt()
    }

    /// I(s) = l² arccos(s/2l) − (s/4)√(4l² − s²).
    pub fn i(&self, s: f64) -> f64 {
        let x = (s / (2.0 * self.l)).clamp(-1.0, 1.0);
        self.l * self.l * x.acos() - s / 4.0 * self.root(s)
    }

    pub fn di(&self, s: f64) -> f64 {
        -0.5 * self.root(s)
    }

    pub fn d2i(&self, s: f64) -> f64 {
        s / (2.0 * self.root(s))
    }

    pub fn g1(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        -(s / self.kappa).ln() * (PI * self.l * self.l / 2.0 * s - self.l * s * s)
    }

    pub fn g2(&self, s: f64) -> f64 {
        4.0 / 3.0 * self.l.powf(1.5) * self.k0_end * (2.0 * self.l - s).max(0.0).powf(1.5)
    }

    pub fn f(&self, s: f64) -> f64 {
        if s <= 0.0 || s >= 2.0 * self.l {
            return 0.0;
        }
        s * k0_fast(s / self.kappa) * self.i(s)
    }

    /// F − G¹ − G², continuous on [0, 2l].
    pub fn f_reg(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return -self.g2(0.0);
        }
        if s >= 2.0 * self.l {
            return -self.g1(2.0 * self.l);
        }
        self.f(s) - self.g1(s) - self.g2(s)
    }

    /// ∫₀^{2l} (G¹ + G²) ds in closed form.
    pub fn singular_integral(&self) -> f64 {
        let l = self.l;
        let big_l = (2.0 * l / self.kappa).ln();
        l * l * (PI * l * l / 2.0) * (1.0 - 2.0 * big_l) - 8.0 / 9.0 * l.powi(4) * (1.0 - 3.0 * big_l) + 32.0 * 2f64.sqrt() / 15.0 * l.powi(4) * self.k0_end
    }

    /// ∫₀^{2l} F ds by singularity subtraction and Simpson on n_quad subintervals.
    pub fn integral(&self, n_quad: usize) -> Result<f64> {
        Ok(simpson(|s| self.f_reg(s), 0.0, 2.0 * self.l, n_quad)? + self.singular_integral())
    }
}

pub fn sigma_cyl_yukawa(kappa: f64, l: f64, n_quad: usize) -> Result<CylRatioResult> {
    let y = YukawaIntegrand::new(kappa, l)?;
    let sigma = 2.0 / l + 8.0 / (l * l) * y.integral(n_quad)?;
    Ok(CylRatioResult { sigma: Value::Fast(sigma), l, method: CylMethod::SimpsonSubtracted })
}

/// Simpson errors on F_reg for each n in `n_list`, against Simpson with
/// `reference_n` subintervals.
pub fn yukawa_convergence(kappa: f64, l: f64, n_list: &[usize], reference_n: usize) -> Result<ConvergenceReport> {
    let y = YukawaIntegrand::new(kappa, l)?;
    if n_list.iter().any(|&n| n >= reference_n) {
        return domain("reference resolution must exceed every n in n_list");
    }
    let f = |s: f64| y.f_reg(s);
    let reference = simpson(f, 0.0, 2.0 * l, reference_n)?;
    convergence_study(f, 0.0, 2.0 * l, n_list, reference)
}

/// Upper bound for σ(l) from a right-endpoint Riemann sum over N cells, with
/// K0(x) ≤ √(π/(2x)) on the first cell.
pub fn sigma_cyl_yukawa_upper(kappa: f64, l: f64, n: u64, mode: EvalMode) -> Result<CylRatioResult> {
    check_l(l)?;
    if !(kappa > 0.0 && kappa.is_finite()) {
        return domain(format!("kappa must be positive, got {kappa}"));
    }
    if n < 2 {
        return domain(format!("Riemann bound needs N >= 2, got {n}"));
    }
    let sigma = match mode {
        EvalMode::Fast => {
            let h = 2.0 * l / n as f64;
            let y = YukawaIntegrand::new(kappa, l)?;
            let first = 2f64.sqrt() / 3.0 * y.i(0.0) * (PI * kappa).sqrt() * h.powf(1.5);
            let sum: f64 = (1..n)
                .map(|k| {
                    let s = k as f64 * h;
                    (k as f64 + 0.5) * y.i(s) * k0_fast(s / kappa)
                })
                .sum();
            Value::Fast(2.0 / l + 8.0 / (l * l) * (first + h * h * sum))
        }
        EvalMode::Certified(p) => {
            let q = |x: f64| BigRational::from_float(x).expect("finite");
            Value::Certified(yukawa_upper_enclosure(&q(kappa), &q(l), n, p.bits())?)
        }
    };
    Ok(CylRatioResult { sigma, l, method: CylMethod::RiemannUpper })
}

/// Enclosure of the Riemann upper bound for exact rational κ and l; its
/// upper endpoint bounds σ(l) from above.
pub fn yukawa_upper_enclosure(kappa: &BigRational, l: &BigRational, n: u64, prec: u32) -> Result<Enclosure> {
    if !kappa.is_positive() || !l.is_positive() {
        return domain("kappa and l must be positive");
    }
    if n < 2 {
        return domain(format!("Riemann bound needs N >= 2, got {n}"));
    }
    let p = prec;
    let pi = pi_enclosure(p);
    let le = Enclosure::from_ratio(l, p);
    let ke = Enclosure::from_ratio(kappa, p);
    let l2 = le.square();
    let nn = BigInt::from(n);
    let step = BigRational::from_integer(BigInt::from(2)) * l / kappa / BigRational::from_integer(nn.clone());
    let terms: Vec<Enclosure> = (1..n)
        .into_par_iter()
        .map(|k| {
            let c = Enclosure::from_ratio(&BigRational::new(BigInt::from(k), nn.clone()), p);
            let geo = c.acos() - &c * (Enclosure::one(p) - c.square()).sqrt();
            let x = Enclosure::from_ratio(&(&step * BigRational::from_u64(k).expect("u64")), p);
            Enclosure::from_i64(2 * k as i64 + 1, p) * geo * k0_enclosure(&x)
        })
        .collect();
    let mut sum = Enclosure::zero(p);
    for t in &terms {
        sum = sum + t;
    }
    let h = le.mul_pow2(1) / Enclosure::from_i64(n as i64, p);
    let i0 = &pi * &l2 * Enclosure::from_frac(1, 2, p);
    let first = Enclosure::from_i64(2, p).sqrt() / Enclosure::from_i64(3, p) * i0 * (&pi * &ke).sqrt() * (&h * h.sqrt());
    // Σ h²(k+½) I(kh) K0 = (h²l²/2) Σ (2k+1) geo_k K0_k
    let riemann = h.square() * &l2 * sum * Enclosure::from_frac(1, 2, p);
    Ok(Enclosure::from_i64(2, p) / &le + Enclosure::from_i64(8, p) / &l2 * (first + riemann))
}

/// Search interval and tolerances for minimizing σ over l.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CylSearch {
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
    pub n_quad: usize,
}

impl CylSearch {
    pub fn default_for(k: &Kernel) -> Self {
        let (lo, hi) = match (k.family(), k.kappa()) {
            (Family::TruncatedCoulomb, Some(kp)) => (1e-3 * kp, kp / 2.0),
            (Family::Yukawa, Some(kp)) => (0.1 * kp, 20.0 * kp),
            _ => (1e-3, 1e3),
        };
        CylSearch { lo, hi, tol: DEFAULT_MIN_TOL, n_quad: DEFAULT_N_QUAD }
    }
}

/// σ_cyl(l) with the family's default method.
pub fn sigma_cyl(k: &Kernel, l: f64, n_quad: usize) -> Result<CylRatioResult> {
    match k.family() {
        Family::Riesz => Ok(CylRatioResult { sigma: Value::Fast(sigma_cyl_riesz(k.dim(), k.alpha(), l)?), l, method: CylMethod::ClosedForm }),
        Family::TruncatedCoulomb => {
            k.require_coulomb_3d()?;
            sigma_cyl_trunc(k.kappa().unwrap_or(f64::INFINITY), l, n_quad)
        }
        Family::Yukawa => {
            k.require_yukawa()?;
            sigma_cyl_yukawa(k.kappa().unwrap_or(f64::INFINITY), l, n_quad)
        }
    }
}

/// Minimizes σ_cyl over the search interval.
pub fn rho_cyl(k: &Kernel, search: CylSearch) -> Result<CylRatioResult> {
    let mut hi = search.hi;
    if let (Family::TruncatedCoulomb, Some(kp)) = (k.family(), k.kappa()) {
        if search.lo >= kp / 2.0 {
            return unsupported("truncated cylinder search must lie inside (0, kappa/2]");
        }
        hi = hi.min(kp / 2.0);
    }
    sigma_cyl(k, search.lo, search.n_quad)?;
    let f = |l: f64| sigma_cyl(k, l, search.n_quad).map(|r| r.sigma.approx()).unwrap_or(f64::INFINITY);
    let (l, _) = minimize_1d(f, search.lo, hi, search.tol)?;
    sigma_cyl(k, l, search.n_quad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::rho_ball_riesz;
    use proptest::prelude::*;

    #[test]
    fn riesz_cylinder_optimum() {
        let r = rho_cyl_riesz(4, 2.0).unwrap();
        let h = 1e-5;
        let slope = (sigma_cyl_riesz(4, 2.0, r.l + h).unwrap() - sigma_cyl_riesz(4, 2.0, r.l - h).unwrap()) / (2.0 * h);
        assert!(slope.abs() < 1e-6);
        let best = (0..=200_000).map(|i| sigma_cyl_riesz(4, 2.0, r.l * (0.9 + 0.2 * i as f64 / 2e5)).unwrap()).fold(f64::INFINITY, f64::min);
        assert!((best - r.sigma.approx()).abs() < 1e-9);
        let ratio = r.sigma.approx() / rho_ball_riesz(4, 2.0).unwrap().rho.approx();
        assert!((ratio - (27.0f64 / 20.0).powf(1.0 / 3.0)).abs() < 1e-12);
        assert!(matches!(rho_cyl_riesz(3, 1.0), Err(crate::Error::Unsupported(_))));
    }

    #[test]
    fn rho_cyl_numeric_matches_closed_form() {
        let k = Kernel::riesz(4, 2.0).unwrap();
        let num = rho_cyl(&k, CylSearch::default_for(&k)).unwrap();
        assert!((num.sigma.approx() - rho_cyl_riesz(4, 2.0).unwrap().sigma.approx()).abs() < 1e-8);
    }

    #[test]
    fn g_values() {
        assert_eq!(g_trunc(0.0).unwrap(), 0.0);
        assert!((g_trunc(1.0).unwrap() - 4.0 * PI / 3.0 * (3.0 - PI / 2.0)).abs() < 1e-14);
        assert!(g_trunc(1.1).is_err());
        let mut prev = 0.0;
        for i in 1..=10_000 {
            let g = g_trunc(i as f64 / 10_000.0).unwrap();
            assert!(g >= prev);
            prev = g;
        }
        let l: f64 = 0.3;
        let y = (1.0 - l * l).sqrt();
        let direct = 4.0 * PI / 3.0 * (l - l.asin() + 2.0 * l * (1.0 - y) + l.powi(3) * y.atanh());
        assert!((g_trunc(l).unwrap() - direct).abs() < 1e-15);
    }

    #[test]
    fn truncated_half_cross_check() {
        let k = 1.1;
        let quad = sigma_cyl_trunc(k, k / 2.0, DEFAULT_N_QUAD).unwrap().sigma.approx();
        let exact = sigma_cyl_trunc_exact_half(k, EvalMode::Fast).unwrap().sigma.approx();
        assert!((quad - exact).abs() < 1e-8, "{quad} {exact}");
        assert!(exact > 6.59 && exact < 6.61);
        assert!(matches!(sigma_cyl_trunc(k, 0.6, 64), Err(crate::Error::Unsupported(_))));
    }

    #[test]
    fn truncated_half_certified() {
        let kap = Enclosure::from_frac(11, 10, 128);
        let e = trunc_exact_half_enclosure(&kap);
        assert!(e.width_f64() <= 1e-10);
        let fast = sigma_cyl_trunc_exact_half(1.1, EvalMode::Fast).unwrap().sigma.approx();
        assert!((e.mid_f64() - fast).abs() < 1e-13);
        let c = sigma_cyl_trunc_exact_half(1.1, EvalMode::certified(128).unwrap()).unwrap();
        assert!(c.sigma.as_enclosure().unwrap().width_f64() <= 1e-10);
    }

    #[test]
    fn geometry_i() {
        let l = 2.09;
        assert!((yukawa_geometry_i(l, 0.0).unwrap() - PI * l * l / 2.0).abs() < 1e-13);
        assert_eq!(yukawa_geometry_i(l, 2.0 * l).unwrap(), 0.0);
        assert!(yukawa_geometry_i(l, 5.0).is_err());
        let y = YukawaIntegrand::new(0.56, l).unwrap();
        for i in 0..=100 {
            let s = 2.0 * l * i as f64 / 100.0;
            assert!((y.i(s) - yukawa_geometry_i(l, s).unwrap()).abs() < 1e-12);
        }
        for i in 1..100 {
            let s = 2.0 * l * i as f64 / 100.0;
            let h = 1e-6;
            let fd = (y.i(s + h) - y.i(s - h)) / (2.0 * h);
            let w = (4.0 * l * l - s * s).sqrt();
            let three_term = -w / 2.0 - l / 2.0 * (s / (2.0 * l)).acos() + l * ((2.0 * l - s) / (4.0 * l)).sqrt().asin();
            assert!((fd - three_term).abs() < 1e-6 && (y.di(s) - three_term).abs() < 1e-12);
            assert!(y.di(s) < 0.0 && y.d2i(s) > 0.0);
            let fd2 = (y.di(s + h) - y.di(s - h)) / (2.0 * h);
            assert!((fd2 - y.d2i(s)).abs() < 1e-5 * y.d2i(s).max(1.0));
        }
        assert!((y.di(0.0) + l).abs() < 1e-15);
    }

    #[test]
    fn yukawa_sigma_reference() {
        let r = sigma_cyl_yukawa(0.56, 2.09, DEFAULT_N_QUAD).unwrap();
        assert!((r.sigma.approx() - 3.8730).abs() < 5e-4);
        let fine = sigma_cyl_yukawa(0.56, 2.09, REFERENCE_N_QUAD).unwrap().sigma.approx();
        assert!((fine - 3.872_951_868_8).abs() < 1e-9, "{fine}");
    }

    #[test]
    fn f_reg_behaviour() {
        let y = YukawaIntegrand::new(0.56, 2.09).unwrap();
        assert!(y.f_reg(0.0).is_finite());
        assert!((y.f_reg(1e-9) - y.f_reg(0.0)).abs() < 1e-6);
        let e = 1e-9;
        assert!((y.f_reg(2.0 * 2.09 - e) - y.f_reg(2.0 * 2.09)).abs() < 1e-6);
        // apart from smooth terms, the remainder behaves like s³ log s
        let smooth = std::f64::consts::LN_2 - crate::specfun::EULER_GAMMA;
        let ratios: Vec<f64> = [1e-2, 1e-3, 1e-4].iter().map(|&s| (y.f(s) - y.g1(s) - s * smooth * y.i(s)) / (s.powi(3) * (s / y.kappa).ln().abs())).collect();
        for r in &ratios {
            assert!(r.abs() < 10.0, "{ratios:?}");
        }
    }

    #[test]
    fn singular_closed_form() {
        let y = YukawaIntegrand::new(0.56, 2.09).unwrap();
        let eps = 1e-6;
        let b = 2.0 * y.l;
        let g = |s: f64| y.g1(s) + y.g2(s);
        let u = |t: f64| {
            let s = eps + (b - 2.0 * eps) * t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
            g(s) * (b - 2.0 * eps) * 30.0 * t * t * (1.0 - t) * (1.0 - t)
        };
        let mid = simpson(u, 0.0, 1.0, 1 << 14).unwrap();
        let i0 = PI * y.l * y.l / 2.0;
        let head = i0 * (eps * eps / 4.0 - eps * eps / 2.0 * (eps / y.kappa).ln()) + y.l * (eps.powi(3) / 3.0 * (eps / y.kappa).ln() - eps.powi(3) / 9.0);
        let tail = 4.0 / 3.0 * y.l.powf(1.5) * k0_fast(b / y.kappa) * 0.4 * eps.powf(2.5) + y.g1(b) * eps;
        assert!((mid + head + tail - y.singular_integral()).abs() < 1e-8);
    }

    #[test]
    fn quadrature_order_near_four() {
        let y = YukawaIntegrand::new(0.56, 2.09).unwrap();
        let reference = y.integral(1 << 16).unwrap();
        let ns = [32usize, 64, 128, 256, 512];
        let pts: Vec<(f64, f64)> = ns.iter().map(|&n| ((2.0 * y.l / n as f64).ln(), (y.integral(n).unwrap() - reference).abs().ln())).collect();
        let order = crate::numerics::ls_slope(&pts);
        assert!(order > 3.5 && order < 4.5, "{order}");
    }

    #[test]
    fn convergence_study_matches_spec_grid() {
        let ns: Vec<usize> = (5..=12).map(|k| 1usize << k).collect();
        let rep = yukawa_convergence(0.56, 2.09, &ns, REFERENCE_N_QUAD).unwrap();
        assert!(rep.fitted_order > 3.5 && rep.fitted_order < 4.5, "{}", rep.fitted_order);
        let fine = rep.rows.last().unwrap().1;
        assert!(fine < 1e-12 || *rep.machine_limited.last().unwrap(), "{fine} {:?}", rep.rows);
        assert!(yukawa_convergence(0.56, 2.09, &[64, 1 << 14], 1 << 14).is_err());
    }

    #[test]
    fn riemann_upper_bound() {
        let simpson_val = sigma_cyl_yukawa(0.56, 2.09, REFERENCE_N_QUAD).unwrap().sigma.approx();
        let mut prev = f64::INFINITY;
        for n in [1000u64, 10_000, 30_000] {
            let up = sigma_cyl_yukawa_upper(0.56, 2.09, n, EvalMode::Fast).unwrap().sigma.approx();
            assert!(up >= simpson_val);
            assert!(up <= prev);
            prev = up;
        }
        assert!(prev <= 3.8747);
    }

    #[test]
    fn riemann_upper_certified_small() {
        let q = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
        let e = yukawa_upper_enclosure(&q(56, 100), &q(209, 100), 200, 128).unwrap();
        let fast = sigma_cyl_yukawa_upper(0.56, 2.09, 200, EvalMode::Fast).unwrap().sigma.approx();
        assert!((e.mid_f64() - fast).abs() < 1e-12 * fast, "{} {}", e.mid_f64(), fast);
        assert!(e.width_f64() < 1e-20);
        assert!(yukawa_upper_enclosure(&q(56, 100), &q(209, 100), 1, 128).is_err());
    }

    #[test]
    fn rho_cyl_yukawa_and_truncated() {
        let k = Kernel::yukawa(3, 1.0, 0.56).unwrap();
        let r = rho_cyl(&k, CylSearch::default_for(&k)).unwrap();
        assert!(r.sigma.approx() <= 3.8747 + 1e-3);
        assert!((r.l - 2.09).abs() < 0.05, "{}", r.l);
        let tol = CylSearch::default_for(&k).tol;
        let s = |l| sigma_cyl(&k, l, DEFAULT_N_QUAD).unwrap().sigma.approx();
        // σ is flat to roundoff over ±tol, so allow a few ulps
        let slack = 1e-14 * r.sigma.approx();
        assert!(r.sigma.approx() <= s(r.l - tol) + slack && r.sigma.approx() <= s(r.l + tol) + slack);
        let t = Kernel::truncated(3, 1.0, 1.1).unwrap();
        let rt = rho_cyl(&t, CylSearch::default_for(&t)).unwrap();
        assert!(rt.l <= 0.55 && rt.sigma.approx() < 6.61);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(30))]

        #[test]
        fn upper_bound_dominates(kappa in 0.3f64..1.5, l in 0.3f64..3.0, n in 50u64..2000) {
            let up = sigma_cyl_yukawa_upper(kappa, l, n, EvalMode::Fast).unwrap().sigma.approx();
            let s = sigma_cyl_yukawa(kappa, l, DEFAULT_N_QUAD).unwrap().sigma.approx();
            prop_assert!(up >= s);
        }

        #[test]
        fn geometry_i_monotone_convex(l in 0.1f64..5.0) {
            let y = YukawaIntegrand::new(1.0, l).unwrap();
            let v: Vec<f64> = (0..=400).map(|i| y.i(2.0 * l * i as f64 / 400.0)).collect();
            for w in v.windows(3) {
                prop_assert!(w[1] <= w[0]);
                prop_assert!(w[2] - 2.0 * w[1] + w[0] >= -1e-12 * l * l);
            }
        }
    }
}
