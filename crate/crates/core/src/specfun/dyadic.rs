//! Binary floating-point numbers `man * 2^exp` with arbitrary mantissa and
//! directed rounding.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

/// Exact dyadic rational, kept with an odd mantissa (or zero).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(man: BigInt, exp: i64) -> Self {
        if man.is_zero() {
            return Self::zero();
        }
        let tz = man.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            Dyadic { man: man >> tz, exp: exp + tz as i64 }
        } else {
            Dyadic { man, exp }
        }
    }

    pub fn zero() -> Self {
        Dyadic { man: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { man: BigInt::one(), exp: 0 }
    }

    pub fn from_i64(v: i64) -> Self {
        Self::new(BigInt::from(v), 0)
    }

    /// Exact conversion. Panics on NaN or infinity.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite value {x}");
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let neg = bits >> 63 == 1;
        let e = ((bits >> 52) & 0x7ff) as i64;
        let f = bits & ((1u64 << 52) - 1);
        let (m, ex) = if e == 0 { (f, -1074) } else { (f | (1u64 << 52), e - 1075) };
        let m = BigInt::from(m);
        Self::new(if neg { -m } else { m }, ex)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.man.is_positive()
    }

    /// Number of significant bits.
    pub fn bits(&self) -> u64 {
        self.man.bits()
    }

    /// Smallest `t` with `|self| < 2^t`. Meaningless for zero.
    pub fn top(&self) -> i64 {
        self.man.bits() as i64 + self.exp
    }

    pub fn abs(&self) -> Self {
        Dyadic { man: self.man.abs(), exp: self.exp }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Dyadic { man: self.man.clone(), exp: self.exp + k }
    }

    /// Round to at most `prec` significant bits.
    pub fn round(&self, prec: u32, dir: Round) -> Self {
        round_parts(self.man.clone(), self.exp, prec, dir)
    }

    pub fn add_exact(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(o.exp);
        let a = &self.man << (self.exp - e) as u64;
        let b = &o.man << (o.exp - e) as u64;
        Self::new(a + b, e)
    }

    pub fn sub_exact(&self, o: &Self) -> Self {
        self.add_exact(&-o)
    }

    pub fn mul_exact(&self, o: &Self) -> Self {
        Self::new(&self.man * &o.man, self.exp + o.exp)
    }

    pub fn add(&self, o: &Self, prec: u32, dir: Round) -> Self {
        if self.is_zero() {
            return o.round(prec, dir);
        }
        if o.is_zero() {
            return self.round(prec, dir);
        }
        let (big, small) = if self.top() >= o.top() { (self, o) } else { (o, self) };
        let pos = big.exp.min(big.top() - 1 - prec as i64) - 2;
        if small.top() < pos {
            // `small` is below every rounding boundary near `big`; a sticky
            // bit of the same sign rounds identically.
            let sticky = Dyadic { man: if small.is_negative() { -BigInt::one() } else { BigInt::one() }, exp: pos - 1 };
            return big.add_exact(&sticky).round(prec, dir);
        }
        self.add_exact(o).round(prec, dir)
    }

    pub fn sub(&self, o: &Self, prec: u32, dir: Round) -> Self {
        self.add(&-o, prec, dir)
    }

    pub fn mul(&self, o: &Self, prec: u32, dir: Round) -> Self {
        round_parts(&self.man * &o.man, self.exp + o.exp, prec, dir)
    }

    /// Directed quotient. Panics on division by zero.
    pub fn div(&self, o: &Self, prec: u32, dir: Round) -> Self {
        assert!(!o.is_zero(), "division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        let need = prec as i64 + 2 + o.man.bits() as i64 - self.man.bits() as i64;
        let s = need.max(0) as u64;
        let num = &self.man << s;
        let (q, r) = num.div_mod_floor(&o.man);
        let e = self.exp - s as i64 - o.exp;
        match dir {
            Round::Down => round_parts(q, e, prec, Round::Down),
            Round::Up => {
                let q = if r.is_zero() { q } else { q + 1 };
                round_parts(q, e, prec, Round::Up)
            }
        }
    }

    /// Directed square root. Panics on negative input.
    pub fn sqrt(&self, prec: u32, dir: Round) -> Self {
        assert!(!self.is_negative(), "sqrt of negative value");
        if self.is_zero() {
            return Self::zero();
        }
        let (m, e) = if self.exp.rem_euclid(2) == 1 { (&self.man << 1u32, self.exp - 1) } else { (self.man.clone(), self.exp) };
        let need = 2 * (prec as i64 + 2) - m.bits() as i64;
        let s = if need > 0 { (need + 1) / 2 } else { 0 } as u64;
        let n = m << (2 * s);
        let r = n.sqrt();
        let exact = &r * &r == n;
        let ex = e / 2 - s as i64;
        match dir {
            Round::Down => round_parts(r, ex, prec, Round::Down),
            Round::Up => round_parts(if exact { r } else { r + 1 }, ex, prec, Round::Up),
        }
    }

    /// Directed conversion to `f64`, saturating outward on overflow and
    /// underflow.
    pub fn to_f64(&self, dir: Round) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let r = self.round(53, dir);
        let neg = r.is_negative();
        if r.top() > 1024 {
            return match (neg, dir) {
                (false, Round::Down) => f64::MAX,
                (false, Round::Up) => f64::INFINITY,
                (true, Round::Down) => f64::NEG_INFINITY,
                (true, Round::Up) => -f64::MAX,
            };
        }
        let r = if self.top() < -1021 {
            let avail = self.top() + 1074;
            if avail <= 0 {
                let tiny = f64::from_bits(1);
                return match (neg, dir) {
                    (false, Round::Down) => 0.0,
                    (false, Round::Up) => tiny,
                    (true, Round::Down) => -tiny,
                    (true, Round::Up) => -0.0,
                };
            }
            self.round(avail as u32, dir)
        } else {
            r
        };
        let m = r.man.to_i64().expect("53-bit mantissa") as f64;
        ldexp(m, r.exp)
    }

    /// Nearest-ish conversion for display.
    pub fn to_f64_approx(&self) -> f64 {
        self.to_f64(Round::Down)
    }

    /// Directed rational approximation `num / den`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32, dir: Round) -> Self {
        Dyadic::new(num.clone(), 0).div(&Dyadic::new(den.clone(), 0), prec, dir)
    }
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e != 0 {
        let step = e.clamp(-1000, 1000);
        x *= f64::from_bits(((step + 1023) as u64) << 52);
        e -= step;
    }
    x
}

fn round_parts(man: BigInt, exp: i64, prec: u32, dir: Round) -> Dyadic {
    let bits = man.bits();
    if bits <= prec as u64 {
        return Dyadic::new(man, exp);
    }
    let shift = bits - prec as u64;
    let floor = &man >> shift;
    let exact = (&floor << shift) == man;
    let q = match dir {
        Round::Down => floor,
        Round::Up if exact => floor,
        Round::Up => floor + 1,
    };
    Dyadic::new(q, exp + shift as i64)
}

impl std::ops::Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { man: -&self.man, exp: self.exp }
    }
}

impl std::ops::Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { man: -self.man, exp: self.exp }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, o: &Self) -> Ordering {
        let sa = self.man.sign();
        let sb = o.man.sign();
        if sa != sb {
            return sa.cmp(&sb);
        }
        if self.is_zero() {
            return Ordering::Equal;
        }
        let mag = match self.top().cmp(&o.top()) {
            Ordering::Equal => {
                let e = self.exp.min(o.exp);
                let a = self.man.abs() << (self.exp - e) as u64;
                let b = o.man.abs() << (o.exp - e) as u64;
                a.cmp(&b)
            }
            c => c,
        };
        if self.is_negative() {
            mag.reverse()
        } else {
            mag
        }
    }
}

impl std::fmt::Display for Dyadic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:e}", self.to_f64_approx())
    }
}
