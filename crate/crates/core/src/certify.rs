//! Machine-checked comparisons between cylinder and ball ratios, and the
//! exact Riesz ratio for integer exponents.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::ball::{rho_ball_riesz, rho_ball_trunc_enclosure, yukawa_f_enclosure};
use crate::cylinder::{rho_cyl_riesz, trunc_exact_half_enclosure, yukawa_upper_enclosure};
use crate::error::{domain, Error, Result};
use crate::specfun::{gamma, Enclosure, MIN_CERTIFIED_BITS};

/// Outward-rounded `f64` endpoints of an enclosure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// True when the closed bounds lie strictly inside `(a, b)`.
    pub fn inside(&self, a: f64, b: f64) -> bool {
        a < self.lo && self.hi < b
    }
}

impl From<&Enclosure> for Bounds {
    fn from(e: &Enclosure) -> Self {
        Bounds { lo: e.lo_f64(), hi: e.hi_f64() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Certified,
    Inconclusive,
}

/// A named intermediate enclosure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub kernel: String,
    pub parameters: BTreeMap<String, String>,
    pub lower_bound_ball: Bounds,
    pub upper_bound_cyl: Bounds,
    pub bracket: Option<(String, String)>,
    pub sign_check: Option<bool>,
    pub verdict: Verdict,
    pub precision_bits: u32,
    pub evidence: Vec<Evidence>,
    pub notes: Vec<String>,
    pub wall_time: f64,
}

impl CertificationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }
}

fn ev(name: &str, e: &Enclosure) -> Evidence {
    Evidence { name: name.to_string(), lo: e.lo_f64(), hi: e.hi_f64() }
}

fn rat_str(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Certified iff the cylinder upper endpoint is strictly below the ball lower
/// endpoint and the working precision is at least [`MIN_CERTIFIED_BITS`].
fn decide(upper_cyl: &Enclosure, lower_ball: &Enclosure, precision: u32, notes: &mut Vec<String>) -> Verdict {
    let separated = upper_cyl.hi() < lower_ball.lo();
    if !separated {
        notes.push("enclosures overlap: no strict separation".into());
    }
    if precision < MIN_CERTIFIED_BITS {
        notes.push(format!("working precision {precision} bits is below the certified minimum of {MIN_CERTIFIED_BITS}"));
    }
    if separated && precision >= MIN_CERTIFIED_BITS {
        Verdict::Certified
    } else {
        Verdict::Inconclusive
    }
}

fn check_precision(precision: u32) -> Result<()> {
    if !(8..=1 << 16).contains(&precision) {
        return domain(format!("precision must be between 8 and 65536 bits, got {precision}"));
    }
    Ok(())
}

/// Compares σ_cyl(κ/2) with ρ_ball for the Coulomb truncated kernel (n = 3).
pub fn certify_trunc_coulomb(kappa: &BigRational, precision: u32) -> Result<CertificationReport> {
    check_precision(precision)?;
    if !kappa.is_positive() {
        return domain("kappa must be positive");
    }
    let start = Instant::now();
    let p = precision;
    let ke = Enclosure::from_ratio(kappa, p);
    let (rho, lam) = rho_ball_trunc_enclosure(&ke)?;
    let sigma = trunc_exact_half_enclosure(&ke);
    let mut notes = Vec::new();
    let verdict = decide(&sigma, &rho, p, &mut notes);
    let mut parameters = BTreeMap::new();
    parameters.insert("kappa".into(), rat_str(kappa));
    parameters.insert("l".into(), rat_str(&(kappa / BigRational::from_integer(BigInt::from(2)))));
    Ok(CertificationReport {
        kernel: format!("trunc:alpha=1,kappa={},n=3", kappa.to_f64().unwrap_or(f64::NAN)),
        parameters,
        lower_bound_ball: Bounds::from(&rho),
        upper_bound_cyl: Bounds::from(&sigma),
        bracket: None,
        sign_check: None,
        verdict,
        precision_bits: p,
        evidence: vec![ev("kappa", &ke), ev("lambda_star", &lam), ev("rho_ball", &rho), ev("sigma_cyl_half", &sigma)],
        notes,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Compares the Riemann upper bound for σ_cyl(l) with the tangent-line lower
/// bound for ρ_ball over the bracket `(a, b)` of λ* (Yukawa, n = 3, α = 1).
pub fn certify_yukawa(kappa: &BigRational, l: &BigRational, n: u64, bracket: (&BigRational, &BigRational), precision: u32) -> Result<CertificationReport> {
    check_precision(precision)?;
    let (a, b) = bracket;
    if !kappa.is_positive() || !l.is_positive() {
        return domain("kappa and l must be positive");
    }
    if !a.is_positive() || !(a < b) {
        return domain("bracket must satisfy 0 < a < b");
    }
    if n < 2 {
        return domain(format!("N must be at least 2, got {n}"));
    }
    let start = Instant::now();
    let p = precision;
    let ke = Enclosure::from_ratio(kappa, p);
    let ae = Enclosure::from_ratio(a, p);
    let be = Enclosure::from_ratio(b, p);
    let (fa, dfa) = yukawa_f_enclosure(&ke, &ae)?;
    let (fb, dfb) = yukawa_f_enclosure(&ke, &be)?;
    if !(dfa.is_negative() && dfb.is_positive()) {
        return Err(Error::SignCheck(format!(
            "f' is not provably negative at {} and positive at {}: f'(a) in [{:e}, {:e}], f'(b) in [{:e}, {:e}]",
            rat_str(a),
            rat_str(b),
            dfa.lo_f64(),
            dfa.hi_f64(),
            dfb.lo_f64(),
            dfb.hi_f64()
        )));
    }
    let width = &be - &ae;
    let ta_b = &fa + &dfa * &width;
    let tb_a = &fb - &dfb * &width;
    let lower = ta_b.min(&tb_a);
    let upper = yukawa_upper_enclosure(kappa, l, n, p)?;
    let mut notes = Vec::new();
    let verdict = decide(&upper, &lower, p, &mut notes);
    let mut parameters = BTreeMap::new();
    parameters.insert("kappa".into(), rat_str(kappa));
    parameters.insert("l".into(), rat_str(l));
    parameters.insert("N".into(), n.to_string());
    Ok(CertificationReport {
        kernel: format!("yukawa:alpha=1,kappa={},n=3", kappa.to_f64().unwrap_or(f64::NAN)),
        parameters,
        lower_bound_ball: Bounds::from(&lower),
        upper_bound_cyl: Bounds::from(&upper),
        bracket: Some((rat_str(a), rat_str(b))),
        sign_check: Some(true),
        verdict,
        precision_bits: p,
        evidence: vec![
            ev("f(a)", &fa),
            ev("f'(a)", &dfa),
            ev("f(b)", &fb),
            ev("f'(b)", &dfb),
            ev("T_a(b)", &ta_b),
            ev("T_b(a)", &tb_a),
            ev("sigma_upper", &upper),
        ],
        notes,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// τ = ρ_cyl/ρ_ball for the Riesz kernel with integer α, as τ = base^{1/β}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RieszRatio {
    pub n: u32,
    pub alpha: u32,
    pub beta: u32,
    pub base: String,
    pub ratio: f64,
}

/// Exact base r with τ = r^{1/β}:
/// r = ((n−1)/n)^{p+1} Π_{j=0}^{p} (n+p−2j)/(n−1+p−2j), p = n − α.
pub fn riesz_ratio_base(n: u32, alpha: u32) -> Result<BigRational> {
    if n < 3 || alpha <= 1 || alpha >= n {
        return domain(format!("need n >= 3 and integer 1 < alpha < n, got n={n}, alpha={alpha}"));
    }
    let p = (n - alpha) as i64;
    let nn = n as i64;
    let q = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
    let mut r = num_traits::pow(q(nn - 1, nn), (p + 1) as usize);
    for j in 0..=p {
        r *= q(nn + p - 2 * j, nn - 1 + p - 2 * j);
    }
    Ok(r)
}

pub fn riesz_ratio(n: u32, alpha: u32) -> Result<RieszRatio> {
    let base = riesz_ratio_base(n, alpha)?;
    let beta = n + 1 - alpha;
    let ratio = base.to_f64().unwrap_or(f64::NAN).powf(1.0 / beta as f64);
    Ok(RieszRatio { n, alpha, beta, base: rat_str(&base), ratio })
}

/// τ through Gamma functions, valid for real 1 < α < n.
pub fn riesz_ratio_gamma(n: u32, alpha: f64) -> Result<f64> {
    if n < 3 || !(alpha > 1.0 && alpha < n as f64) {
        return domain(format!("need n >= 3 and 1 < alpha < n, got n={n}, alpha={alpha}"));
    }
    let nf = n as f64;
    let b = nf + 1.0 - alpha;
    let g = gamma((nf - b) / 2.0)? / gamma((nf - b + 1.0) / 2.0)? * gamma((nf + b + 1.0) / 2.0)? / gamma((nf + b) / 2.0)?;
    Ok((nf - 1.0) / nf * g.powf(1.0 / b))
}

/// τ from the two optimal ratios directly.
pub fn riesz_ratio_direct(n: u32, alpha: f64) -> Result<f64> {
    Ok(rho_cyl_riesz(n, alpha)?.sigma.approx() / rho_ball_riesz(n, alpha)?.rho.approx())
}
