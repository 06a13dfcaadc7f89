//! Enclosures of mathematical constants.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::pow;

use super::dyadic::Round;
use super::enclosure::{atanh_series, Enclosure};

/// Euler–Mascheroni constant, 100 decimals.
const EULER_GAMMA_DIGITS: &str = "0.5772156649015328606065120900824024310421593359399235988057672348848677267776646709369470632917467495";

struct Cache(Mutex<Option<Enclosure>>);

impl Cache {
    const fn new() -> Self {
        Cache(Mutex::new(None))
    }

    fn get(&self, prec: u32, compute: impl FnOnce(u32) -> Enclosure) -> Enclosure {
        let mut slot = self.0.lock().expect("constant cache poisoned");
        if let Some(c) = slot.as_ref() {
            if c.prec() >= prec + 8 {
                return c.clone();
            }
        }
        let w = (prec + 8).max(256);
        let c = compute(w);
        *slot = Some(c.clone());
        c
    }
}

static PI: Cache = Cache::new();
static LN2: Cache = Cache::new();

fn atan_inv(n: i64, w: u32) -> Enclosure {
    let x = Enclosure::from_frac(1, n, w);
    let x2 = x.square();
    let mut pow = x.clone();
    let mut sum = x;
    let eps = -(w as i64) - 4;
    let mut k = 0i64;
    loop {
        k += 1;
        pow = &pow * &x2;
        let t = &pow / &Enclosure::from_i64(2 * k + 1, w);
        sum = if k % 2 == 1 { &sum - &t } else { &sum + &t };
        if pow.mag().top() < eps {
            break;
        }
    }
    sum.inflate(&pow.mag())
}

/// Enclosure of π with width at most `2^(1 - precision)`.
pub fn pi_enclosure(precision: u32) -> Enclosure {
    let c = PI.get(precision, |w| {
        let w2 = w + 16;
        (&atan_inv(5, w2).mul_pow2(4) - &atan_inv(239, w2).mul_pow2(2)).with_prec(w)
    });
    c.with_prec(precision + 1)
}

/// Enclosure of ln 2.
pub fn ln2_enclosure(precision: u32) -> Enclosure {
    let c = LN2.get(precision, |w| {
        let w2 = w + 16;
        atanh_series(&Enclosure::from_frac(1, 3, w2), w2).mul_pow2(1).with_prec(w)
    });
    c.with_prec(precision)
}

/// Enclosure of Euler's constant; tight to about 330 bits.
pub fn euler_gamma_enclosure(precision: u32) -> Enclosure {
    let digits = &EULER_GAMMA_DIGITS[2..];
    let num: BigInt = digits.parse().expect("constant digits");
    let den = pow(BigInt::from(10), digits.len());
    let mid = BigRational::new(num, den.clone());
    let rad = BigRational::new(BigInt::from(1), den);
    Enclosure::from_mid_rad(&mid, &rad, precision)
}

/// Terms needed so the alternating tail of Catalan's series is below
/// `10^-digits / 2`.
pub fn catalan_terms(digits: u32) -> u64 {
    let target = 2.0 * 10f64.powi(digits as i32);
    ((target.sqrt() - 3.0) / 2.0).ceil().max(1.0) as u64
}

static CATALAN: OnceLock<Mutex<HashMap<(u32, u32), Enclosure>>> = OnceLock::new();

/// Enclosure of Catalan's constant from its alternating series, with width
/// at most `10^-digits` once `precision` is large enough.
pub fn catalan_enclosure(digits: u32, precision: u32) -> Enclosure {
    let cache = CATALAN.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().expect("catalan cache").get(&(digits, precision)) {
        return c.clone();
    }
    let n = catalan_terms(digits);
    let w = precision + 24;
    // Pair terms so every summand is positive and exact as a rational.
    let mut sum = Enclosure::zero(w);
    let mut k = 0u64;
    while k <= n {
        let a = BigInt::from(2 * k + 1).pow(2);
        let b = BigInt::from(2 * k + 3).pow(2);
        let term = BigRational::new(&b - &a, a * b);
        sum = &sum + &Enclosure::from_ratio(&term, w);
        k += 2;
    }
    // Partial sum through index k-1 (even count of terms); the next term is
    // positive and bounds the remainder.
    let next = Enclosure::from_ratio(&BigRational::new(BigInt::from(1), BigInt::from(2 * k + 1).pow(2)), w);
    let hi = sum.hi().add(next.hi(), w, Round::Up);
    let res = Enclosure::new(sum.lo().clone(), hi, w).with_prec(precision);
    cache.lock().expect("catalan cache").insert((digits, precision), res.clone());
    res
}

#[cfg(test)]
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;

    #[test]
    fn pi_bracket_and_width() {
        let p53 = pi_enclosure(53);
        assert!(p53.lo_f64() >= 3.14159265358979 && p53.hi_f64() <= 3.14159265358980);
        let mut w = pi_enclosure(60).width_f64();
        for p in 61..200 {
            let e = pi_enclosure(p);
            assert!(e.width_f64() <= 2f64.powi(1 - p as i32));
            assert!(e.width_f64() <= w / 2.0);
            w = e.width_f64();
        }
        let big = pi_enclosure(128);
        let digits = parse("3.14159265358979323846264338327950288419716939937510582097494459");
        assert!(big.intersect(&Enclosure::from_ratio(&digits, 200)).is_some());
    }

    fn parse(s: &str) -> BigRational {
        crate::specfun::parse_rational(s).unwrap()
    }

    #[test]
    fn ln2_matches() {
        let l = ln2_enclosure(128);
        assert!(l.is_positive());
        let reference = parse("0.69314718055994530941723212145817656807550013436025525412068");
        let r = Enclosure::from_ratio(&reference, 180);
        assert!(l.intersect(&r).is_some());
        assert!(l.width_f64() < 1e-37);
    }

    #[test]
    fn catalan_width_and_value() {
        let c = catalan_enclosure(8, 128);
        assert!(c.width_f64() <= 1e-8);
        let reference = parse("0.915965594177219015054603514932384110774");
        assert!(c.intersect(&Enclosure::from_ratio(&reference, 160)).is_some());
    }

    #[test]
    fn euler_gamma_contains_known_value() {
        let g = euler_gamma_enclosure(200);
        assert!((g.mid_f64() - 0.577_215_664_901_532_9).abs() < 2e-16);
        assert!(g.width_f64() < 1e-55);
    }
}
