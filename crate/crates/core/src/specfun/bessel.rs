//! Modified Bessel function of the second kind, order zero.

use super::constants::{euler_gamma_enclosure, pi_enclosure};
use super::dyadic::{Dyadic, Round};
use super::enclosure::Enclosure;
use super::EULER_GAMMA;

/// Fast K0 for `x > 0`.
pub fn k0_fast(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x <= 2.0 {
        k0_series(x)
    } else {
        k0_steed(x)
    }
}

fn k0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut t = 1.0;
    let mut i0 = 1.0;
    let mut s = 0.0;
    let mut h = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        t *= q / (kf * kf);
        h += 1.0 / kf;
        i0 += t;
        s += h * t;
        if t < 1e-18 * i0 {
            break;
        }
    }
    -((0.5 * x).ln() + EULER_GAMMA) * i0 + s
}

/// Steed's continued fraction for K0, valid for moderate and large x.
fn k0_steed(x: f64) -> f64 {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..100_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() / s
}

/// Rigorous enclosure of K0 at a dyadic point `x > 0`.
pub fn k0_point(x: &Dyadic, prec: u32) -> Enclosure {
    assert!(x.is_positive(), "K0 needs x > 0");
    let xf = x.to_f64(Round::Up);
    let raw = if xf >= 64.0 { k0_asymptotic(x, prec) } else { k0_ascending(x, xf, prec) };
    clamp_to_bound(raw, x, prec)
}

/// K0 over an interval of positive reals, using that K0 is decreasing.
pub fn k0_enclosure(x: &Enclosure) -> Enclosure {
    let p = x.prec();
    let at_hi = k0_point(x.hi(), p);
    if x.lo() == x.hi() {
        return at_hi;
    }
    let at_lo = k0_point(x.lo(), p);
    Enclosure::new(at_hi.lo().clone(), at_lo.hi().clone(), p)
}

/// `e^{-x} √(π/(2x))`, a strict upper bound for K0.
pub fn k0_upper_bound(x: &Enclosure) -> Enclosure {
    let p = x.prec() + 10;
    let x = x.with_prec(p);
    let b = &(-&x).exp() * &(&pi_enclosure(p) / &x.mul_pow2(1)).sqrt();
    b.with_prec(x.prec() - 10)
}

fn clamp_to_bound(k: Enclosure, x: &Dyadic, prec: u32) -> Enclosure {
    let bound = k0_upper_bound(&Enclosure::point(x.clone(), prec));
    if k.hi() > bound.hi() && k.lo() <= bound.hi() {
        Enclosure::new(k.lo().clone(), bound.hi().clone(), prec)
    } else {
        k
    }
}

fn k0_ascending(x: &Dyadic, xf: f64, prec: u32) -> Enclosure {
    let w = prec + 40 + (3.0 * xf).ceil() as u32;
    let xe = Enclosure::point(x.clone(), w);
    let q = xe.square().mul_pow2(-2);
    let mut t = Enclosure::one(w);
    let mut i0 = Enclosure::one(w);
    let mut s = Enclosure::zero(w);
    let mut h = Enclosure::zero(w);
    let q_hi = q.hi().to_f64(Round::Up);
    let eps = -(w as i64) - 4;
    let mut k: i64 = 0;
    loop {
        k += 1;
        let kk = Enclosure::from_i64(k * k, w);
        t = &(&t * &q) / &kk;
        h = &h + &Enclosure::from_frac(1, k, w);
        i0 = &i0 + &t;
        s = &s + &(&h * &t);
        let small = t.mag().is_zero() || t.mag().top() < eps;
        if small && ((k + 1) * (k + 1)) as f64 >= 4.0 * q_hi {
            break;
        }
    }
    // Ratios of consecutive terms are at most q/(k+1)^2 <= 1/4 for I0 and
    // 2q/(k+1)^2 <= 1/2 for the harmonic-weighted series.
    let denom = Dyadic::from_i64((k + 1) * (k + 1));
    let tq = t.mag().mul(&q.mag(), 64, Round::Up);
    let tail_i0 = tq.div(&denom, 64, Round::Up).mul_pow2(1);
    let htq = tq.mul(&h.mag(), 64, Round::Up);
    let tail_s = htq.div(&denom, 64, Round::Up).mul_pow2(2);
    let i0 = i0.inflate(&tail_i0);
    let s = s.inflate(&tail_s);
    let log_term = &xe.mul_pow2(-1).ln() + &euler_gamma_enclosure(w);
    (&s - &(&log_term * &i0)).with_prec(prec)
}

fn k0_asymptotic(x: &Dyadic, prec: u32) -> Enclosure {
    let w = prec + 40;
    let xe = Enclosure::point(x.clone(), w);
    let inv8x = Enclosure::one(w) / xe.mul_pow2(3);
    let mut term = Enclosure::one(w);
    let mut sum = Enclosure::one(w);
    let eps = -(w as i64) - 4;
    let mut k: i64 = 0;
    loop {
        k += 1;
        let c = Enclosure::from_i64(-(2 * k - 1) * (2 * k - 1), w);
        let next = &(&(&term * &c) * &inv8x) / &Enclosure::from_i64(k, w);
        let stop = next.mag() >= term.mag() || next.mag().top() < eps || k > 10_000;
        term = next;
        if stop {
            break;
        }
        sum = &sum + &term;
    }
    // Remainder is bounded by the first neglected term.
    let sum = sum.inflate(&term.mag());
    let pref = &(-&xe).exp() * &(&pi_enclosure(w) / &xe.mul_pow2(1)).sqrt();
    (&pref * &sum).with_prec(prec)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    // mpmath besselk(0, x) at 30 digits
    const REF: [(f64, f64); 10] = [
        (0.01, 4.721_244_730_161_094_9),
        (0.1, 2.427_069_024_702_016_6),
        (0.5, 0.924_419_071_227_665_86),
        (1.0, 0.421_024_438_240_708_33),
        (2.0, 0.113_893_872_749_533_44),
        (2.5, 0.062_347_553_200_366_186),
        (5.0, 0.003_691_098_334_042_594_3),
        (10.0, 1.778_006_231_616_765_2e-5),
        (30.0, 2.132_477_496_463_056_4e-14),
        (100.0, 4.656_628_229_175_902e-45),
    ];

    #[test]
    fn fast_matches_reference() {
        for (x, v) in REF {
            let got = k0_fast(x);
            assert!(((got - v) / v).abs() < 1e-13, "K0({x}) = {got}, want {v}");
        }
    }

    #[test]
    fn certified_contains_reference() {
        for (x, v) in REF {
            let e = k0_point(&Dyadic::from_f64(x), 128);
            assert!((e.mid_f64() - v).abs() <= 1e-15 * v, "K0({x}) enclosure {e}");
            assert!(e.width_f64() <= 1e-30 * v, "K0({x}) width {}", e.width_f64());
        }
    }

    #[test]
    fn asymptotic_and_series_agree_near_switch() {
        let x = Dyadic::from_f64(64.0);
        let a = k0_asymptotic(&x, 120);
        let b = k0_ascending(&x, 64.0, 120);
        assert!(a.intersect(&b).is_some());
    }
}
