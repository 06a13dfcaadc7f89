//! Closed intervals `[lo, hi]` with dyadic endpoints and outward rounding.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::constants::{ln2_enclosure, pi_enclosure};
use super::dyadic::{Dyadic, Round};

/// A rigorous enclosure of a real number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    lo: Dyadic,
    hi: Dyadic,
    prec: u32,
}

impl Enclosure {
    pub fn new(lo: Dyadic, hi: Dyadic, prec: u32) -> Self {
        assert!(lo <= hi, "inverted enclosure [{lo}, {hi}]");
        Enclosure { lo: lo.round(prec, Round::Down), hi: hi.round(prec, Round::Up), prec }
    }

    pub fn point(x: Dyadic, prec: u32) -> Self {
        Self::new(x.clone(), x, prec)
    }

    pub fn zero(prec: u32) -> Self {
        Self::point(Dyadic::zero(), prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::point(Dyadic::one(), prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::point(Dyadic::from_i64(v), prec)
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        Self::point(Dyadic::from_f64(x), prec)
    }

    pub fn from_ratio(q: &BigRational, prec: u32) -> Self {
        let lo = Dyadic::from_ratio(q.numer(), q.denom(), prec, Round::Down);
        let hi = Dyadic::from_ratio(q.numer(), q.denom(), prec, Round::Up);
        Enclosure { lo, hi, prec }
    }

    /// `num / den` for integers.
    pub fn from_frac(num: i64, den: i64, prec: u32) -> Self {
        Self::from_ratio(&BigRational::new(BigInt::from(num), BigInt::from(den)), prec)
    }

    /// Midpoint plus or minus `rad`.
    pub fn from_mid_rad(mid: &BigRational, rad: &BigRational, prec: u32) -> Self {
        let lo = Self::from_ratio(&(mid - rad), prec);
        let hi = Self::from_ratio(&(mid + rad), prec);
        Enclosure { lo: lo.lo, hi: hi.hi, prec }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64(Round::Down)
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64(Round::Up)
    }

    pub fn mid_f64(&self) -> f64 {
        self.lo.add(&self.hi, 60, Round::Down).mul_pow2(-1).to_f64(Round::Down)
    }

    /// Upper bound on `hi - lo`.
    pub fn width_f64(&self) -> f64 {
        self.hi.sub(&self.lo, 53, Round::Up).to_f64(Round::Up)
    }

    /// Upper bound on `max |x|`.
    pub fn mag(&self) -> Dyadic {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn mag_f64(&self) -> f64 {
        self.mag().to_f64(Round::Up)
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Self::new(self.lo.clone(), self.hi.clone(), prec)
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        let d = Dyadic::from_f64(x);
        self.lo <= d && d <= self.hi
    }

    pub fn contains_dyadic(&self, d: &Dyadic) -> bool {
        &self.lo <= d && d <= &self.hi
    }

    pub fn contains(&self, other: &Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn contains_zero(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }

    /// True when every element of `self` is below every element of `o`.
    pub fn certainly_lt(&self, o: &Self) -> bool {
        self.hi < o.lo
    }

    pub fn hull(&self, o: &Self) -> Self {
        Enclosure { lo: self.lo.clone().min(o.lo.clone()), hi: self.hi.clone().max(o.hi.clone()), prec: self.prec.max(o.prec) }
    }

    pub fn intersect(&self, o: &Self) -> Option<Self> {
        let lo = self.lo.clone().max(o.lo.clone());
        let hi = self.hi.clone().min(o.hi.clone());
        (lo <= hi).then_some(Enclosure { lo, hi, prec: self.prec.max(o.prec) })
    }

    /// Componentwise minimum of two enclosed values.
    pub fn min(&self, o: &Self) -> Self {
        Enclosure { lo: self.lo.clone().min(o.lo.clone()), hi: self.hi.clone().min(o.hi.clone()), prec: self.prec.max(o.prec) }
    }

    /// `self ± r` for a nonnegative radius.
    pub fn inflate(&self, r: &Dyadic) -> Self {
        let r = r.abs();
        Enclosure { lo: self.lo.sub(&r, self.prec, Round::Down), hi: self.hi.add(&r, self.prec, Round::Up), prec: self.prec }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        Enclosure { lo: self.lo.mul_pow2(k), hi: self.hi.mul_pow2(k), prec: self.prec }
    }

    pub fn abs(&self) -> Self {
        if self.lo.is_negative() && self.hi.is_positive() {
            Enclosure { lo: Dyadic::zero(), hi: self.mag(), prec: self.prec }
        } else if self.hi.is_negative() || (self.hi.is_zero() && self.lo.is_negative()) {
            -self
        } else {
            self.clone()
        }
    }

    pub fn square(&self) -> Self {
        let a = self.abs();
        let p = self.prec;
        Enclosure { lo: a.lo.mul(&a.lo, p, Round::Down), hi: a.hi.mul(&a.hi, p, Round::Up), prec: p }
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Enclosure::one(self.prec);
        let mut base = self.clone();
        let mut k = n;
        if n.is_multiple_of(2) {
            base = base.square();
            k /= 2;
            while k > 0 {
                if k & 1 == 1 {
                    acc = &acc * &base;
                }
                base = base.square();
                k >>= 1;
            }
            return acc;
        }
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = base.square();
            }
        }
        acc
    }

    pub fn recip(&self) -> Self {
        &Enclosure::one(self.prec) / self
    }

    /// Quotient, or `None` when the divisor may vanish.
    pub fn checked_div(&self, o: &Self) -> Option<Self> {
        if o.contains_zero() {
            return None;
        }
        let p = self.prec.max(o.prec);
        let cands = [(&self.lo, &o.lo), (&self.lo, &o.hi), (&self.hi, &o.lo), (&self.hi, &o.hi)];
        let lo = cands.iter().map(|(a, b)| a.div(b, p, Round::Down)).min().unwrap();
        let hi = cands.iter().map(|(a, b)| a.div(b, p, Round::Up)).max().unwrap();
        Some(Enclosure { lo, hi, prec: p })
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.hi.is_negative(), "sqrt of negative enclosure");
        let p = self.prec;
        let lo = if self.lo.is_negative() { Dyadic::zero() } else { self.lo.sqrt(p, Round::Down) };
        Enclosure { lo, hi: self.hi.sqrt(p, Round::Up), prec: p }
    }

    pub fn exp(&self) -> Self {
        let p = self.prec;
        let lo = exp_point(&self.lo, p);
        let hi = if self.lo == self.hi { lo.clone() } else { exp_point(&self.hi, p) };
        Enclosure { lo: lo.lo, hi: hi.hi, prec: p }
    }

    /// Natural logarithm. Panics unless `lo > 0`.
    pub fn ln(&self) -> Self {
        assert!(self.lo.is_positive(), "ln of nonpositive enclosure");
        let p = self.prec;
        let lo = ln_point(&self.lo, p);
        let hi = if self.lo == self.hi { lo.clone() } else { ln_point(&self.hi, p) };
        Enclosure { lo: lo.lo, hi: hi.hi, prec: p }
    }

    pub fn atan(&self) -> Self {
        let p = self.prec;
        let lo = atan_tight(&Enclosure::point(self.lo.clone(), p + 30)).with_prec(p);
        let hi = atan_tight(&Enclosure::point(self.hi.clone(), p + 30)).with_prec(p);
        Enclosure { lo: lo.lo, hi: hi.hi, prec: p }
    }

    /// Arcsine on `[-1, 1]`.
    pub fn asin(&self) -> Self {
        let one = Dyadic::one();
        assert!(self.lo >= -&one && self.hi <= one, "asin outside [-1, 1]");
        let p = self.prec;
        let lo = asin_point(&self.lo, p);
        let hi = asin_point(&self.hi, p);
        Enclosure { lo: lo.lo, hi: hi.hi, prec: p }
    }

    /// Arccosine on `[-1, 1]`.
    pub fn acos(&self) -> Self {
        let p = self.prec;
        let half_pi = pi_enclosure(p + 10).mul_pow2(-1);
        (&half_pi - &self.with_prec(p + 10).asin()).with_prec(p)
    }

    /// Inverse hyperbolic tangent on `(-1, 1)`.
    pub fn atanh(&self) -> Self {
        let one = Dyadic::one();
        assert!(self.lo > -&one && self.hi < one, "atanh outside (-1, 1)");
        let p = self.prec;
        let f = |x: &Dyadic| {
            let w = p + 20;
            let num = Enclosure::point(one.add_exact(x), w);
            let den = Enclosure::point(one.sub_exact(x), w);
            (&num / &den).ln().mul_pow2(-1)
        };
        let lo = f(&self.lo);
        let hi = f(&self.hi);
        Enclosure { lo: lo.lo, hi: hi.hi, prec: p }.with_prec(p)
    }
}

fn exp_point(x: &Dyadic, prec: u32) -> Enclosure {
    if x.is_zero() {
        return Enclosure::one(prec);
    }
    let s = (x.top() + 10).max(0) as u32;
    let w = prec + s + 40;
    let r = Enclosure::point(x.mul_pow2(-(s as i64)), w);
    let mut term = Enclosure::one(w);
    let mut sum = Enclosure::one(w);
    let eps = -(w as i64) - 4;
    for k in 1..10_000i64 {
        term = &(&term * &r) / &Enclosure::from_i64(k, w);
        sum = &sum + &term;
        if term.mag().is_zero() || term.mag().top() < eps {
            break;
        }
    }
    // |r| < 2^-10 bounds the geometric tail by |term| 2^-9.
    let mut acc = sum.inflate(&term.mag().mul_pow2(-9));
    for _ in 0..s {
        acc = acc.square();
    }
    acc.with_prec(prec)
}

fn ln_point(x: &Dyadic, prec: u32) -> Enclosure {
    assert!(x.is_positive());
    let t = x.top();
    let mut e = t - 1;
    let mut m = x.mul_pow2(-e);
    if m.mul_exact(&m) > Dyadic::from_i64(2) {
        m = m.mul_pow2(-1);
        e += 1;
    }
    let w = prec + 40 + (64 - e.unsigned_abs().leading_zeros());
    let one = Dyadic::one();
    let z = &Enclosure::point(m.sub_exact(&one), w) / &Enclosure::point(m.add_exact(&one), w);
    let series = atanh_series(&z, w);
    let res = &series.mul_pow2(1) + &(&ln2_enclosure(w) * &Enclosure::from_i64(e, w));
    res.with_prec(prec)
}

/// `sum z^(2k+1)/(2k+1)` plus tail bound, for `|z| <= 1/2`.
pub(crate) fn atanh_series(z: &Enclosure, w: u32) -> Enclosure {
    let z2 = z.square();
    let mut pow = z.clone();
    let mut sum = z.clone();
    let eps = -(w as i64) - 4;
    let mut k = 0i64;
    loop {
        k += 1;
        pow = &pow * &z2;
        sum = &sum + &(&pow / &Enclosure::from_i64(2 * k + 1, w));
        if pow.mag().is_zero() || pow.mag().top() < eps {
            break;
        }
    }
    // Tail <= |z|^(2k+3)/(1-z^2) <= (4/3)|pow||z|^2.
    let tail = pow.mag().mul(&z2.mag(), 64, Round::Up).mul_pow2(1);
    sum.inflate(&tail)
}

/// Arctangent of an interval argument, tight for tight input.
pub(crate) fn atan_tight(x: &Enclosure) -> Enclosure {
    let w = x.prec() + 20;
    let one = Dyadic::one();
    if x.lo() > &one {
        let half_pi = pi_enclosure(w).mul_pow2(-1);
        return (&half_pi - &atan_tight(&x.with_prec(w).recip())).with_prec(x.prec());
    }
    if x.hi() < &-&one {
        let half_pi = pi_enclosure(w).mul_pow2(-1);
        return (&(-&half_pi) - &atan_tight(&x.with_prec(w).recip())).with_prec(x.prec());
    }
    if x.mag() > one {
        let lo = atan_tight(&Enclosure::point(x.lo().clone(), x.prec()));
        let hi = atan_tight(&Enclosure::point(x.hi().clone(), x.prec()));
        return Enclosure { lo: lo.lo, hi: hi.hi, prec: x.prec() };
    }
    if x.mag().is_zero() {
        return Enclosure::zero(x.prec());
    }
    let mut y = x.with_prec(w);
    let mut k = 0;
    let one_e = Enclosure::one(w);
    while y.mag().top() > -4 {
        let den = &one_e + &(&one_e + &y.square()).sqrt();
        y = &y / &den;
        k += 1;
    }
    let y2 = y.square();
    let mut pow = y.clone();
    let mut sum = y.clone();
    let eps = -(w as i64) - 4;
    let mut j = 0i64;
    loop {
        j += 1;
        pow = &pow * &y2;
        let t = &pow / &Enclosure::from_i64(2 * j + 1, w);
        sum = if j % 2 == 1 { &sum - &t } else { &sum + &t };
        if pow.mag().is_zero() || pow.mag().top() < eps {
            break;
        }
    }
    sum.inflate(&pow.mag().mul(&y2.mag(), 64, Round::Up)).mul_pow2(k).with_prec(x.prec())
}

fn asin_point(x: &Dyadic, prec: u32) -> Enclosure {
    let one = Dyadic::one();
    let w = prec + 20;
    if x.abs() == one {
        let hp = pi_enclosure(w).mul_pow2(-1);
        let r = if x.is_negative() { -&hp } else { hp };
        return r.with_prec(prec);
    }
    let c = one.sub_exact(&x.mul_exact(x));
    let t = &Enclosure::point(x.clone(), w) / &Enclosure::point(c, w).sqrt();
    atan_tight(&t).with_prec(prec)
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Enclosure> for &Enclosure {
            type Output = Enclosure;
            fn $m(self, o: &Enclosure) -> Enclosure {
                let f: fn(&Enclosure, &Enclosure) -> Enclosure = $body;
                f(self, o)
            }
        }
        impl $tr<Enclosure> for Enclosure {
            type Output = Enclosure;
            fn $m(self, o: Enclosure) -> Enclosure {
                (&self).$m(&o)
            }
        }
        impl $tr<&Enclosure> for Enclosure {
            type Output = Enclosure;
            fn $m(self, o: &Enclosure) -> Enclosure {
                (&self).$m(o)
            }
        }
        impl $tr<Enclosure> for &Enclosure {
            type Output = Enclosure;
            fn $m(self, o: Enclosure) -> Enclosure {
                self.$m(&o)
            }
        }
    };
}

binop!(Add, add, |a, b| {
    let p = a.prec.max(b.prec);
    Enclosure { lo: a.lo.add(&b.lo, p, Round::Down), hi: a.hi.add(&b.hi, p, Round::Up), prec: p }
});

binop!(Sub, sub, |a, b| {
    let p = a.prec.max(b.prec);
    Enclosure { lo: a.lo.sub(&b.hi, p, Round::Down), hi: a.hi.sub(&b.lo, p, Round::Up), prec: p }
});

binop!(Mul, mul, |a, b| {
    let p = a.prec.max(b.prec);
    if !a.lo.is_negative() && !b.lo.is_negative() {
        return Enclosure { lo: a.lo.mul(&b.lo, p, Round::Down), hi: a.hi.mul(&b.hi, p, Round::Up), prec: p };
    }
    let cands = [(&a.lo, &b.lo), (&a.lo, &b.hi), (&a.hi, &b.lo), (&a.hi, &b.hi)];
    let lo = cands.iter().map(|(x, y)| x.mul(y, p, Round::Down)).min().unwrap();
    let hi = cands.iter().map(|(x, y)| x.mul(y, p, Round::Up)).max().unwrap();
    Enclosure { lo, hi, prec: p }
});

binop!(Div, div, |a, b| { a.checked_div(b).unwrap_or_else(|| panic!("division by enclosure containing zero [{}, {}]", b.lo, b.hi)) });

impl Neg for &Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        Enclosure { lo: -&self.hi, hi: -&self.lo, prec: self.prec }
    }
}

impl Neg for Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        -&self
    }
}

impl std::fmt::Display for Enclosure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", self.lo_f64(), self.hi_f64())
    }
}

/// Parse `p/q`, an integer, or a decimal with optional exponent into an
/// exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{ip}{fp}").parse().ok()?;
    let scale = exp as i64 - fp.len() as i64;
    let ten = BigInt::from(10);
    let mut q = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        q = -q;
    }
    Some(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 128;

    fn e(x: f64) -> Enclosure {
        Enclosure::from_f64(x, P)
    }

    #[test]
    fn elementary_functions_contain_f64_values() {
        for x in [0.001, 0.3, 0.5, 1.0, 2.0, 10.0, 123.456] {
            let ex = e(x).exp();
            assert!((ex.mid_f64() - x.exp()).abs() <= 1e-15 * x.exp());
            assert!(ex.width_f64() < 1e-30 * x.exp());
            let l = e(x).ln();
            assert!((l.mid_f64() - x.ln()).abs() <= 1e-15);
            let a = e(x).atan();
            assert!((a.mid_f64() - x.atan()).abs() <= 1e-15);
        }
        for x in [-1.0, -0.7, 0.0, 0.25, 0.999, 1.0] {
            let s = e(x).asin();
            assert!((s.mid_f64() - f64::asin(x)).abs() <= 1e-15);
            let c = e(x).acos();
            assert!((c.mid_f64() - f64::acos(x)).abs() <= 1e-15);
        }
        let t = e(0.6).atanh();
        assert!((t.mid_f64() - 0.6f64.atanh()).abs() < 1e-15);
    }

    #[test]
    fn exp_ln_inverse() {
        let x = Enclosure::from_frac(7, 3, P);
        let y = x.exp().ln();
        assert!(y.contains(&x) || (&y - &x).mag_f64() < 1e-35);
        assert!(y.width_f64() < 1e-33);
    }

    #[test]
    fn pi_from_atan() {
        let four_atan_one = e(1.0).atan().mul_pow2(2);
        let pi = pi_enclosure(P);
        assert!(four_atan_one.intersect(&pi).is_some());
        assert!(four_atan_one.width_f64() < 1e-35);
    }

    #[test]
    fn parse_forms() {
        let q = parse_rational("0.0884").unwrap();
        assert_eq!(q, BigRational::new(BigInt::from(221), BigInt::from(2500)));
        assert_eq!(parse_rational("11/10").unwrap(), BigRational::new(11.into(), 10.into()));
        assert_eq!(parse_rational("-2.5e1").unwrap(), BigRational::from_integer((-25).into()));
        assert!(parse_rational("abc").is_none());
        assert!(parse_rational("1/0").is_none());
    }

    #[test]
    fn mul_sign_cases() {
        let a = Enclosure::new(Dyadic::from_f64(-1.0), Dyadic::from_f64(2.0), P);
        let b = Enclosure::new(Dyadic::from_f64(-3.0), Dyadic::from_f64(0.5), P);
        let c = &a * &b;
        assert_eq!(c.lo_f64(), -6.0);
        assert_eq!(c.hi_f64(), 3.0);
        assert_eq!(a.square().lo_f64(), 0.0);
        assert_eq!(a.square().hi_f64(), 4.0);
    }
}
