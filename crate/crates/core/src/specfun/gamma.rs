use crate::error::{domain, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(x: f64) -> f64 {
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    a
}

/// Gamma function for `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("gamma requires x > 0, got {x}"));
    }
    if x == x.floor() && x <= 171.0 {
        let mut f = 1.0f64;
        for k in 2..(x as u64) {
            f *= k as f64;
        }
        return Ok(f);
    }
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return Ok(pi / ((pi * x).sin() * gamma(1.0 - x)?));
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok((2.0 * std::f64::consts::PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z))
}

/// Natural logarithm of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("ln_gamma requires x > 0, got {x}"));
    }
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return Ok((pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x)?);
    }
    if x < 20.0 {
        return Ok(gamma(x)?.ln());
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln())
}

/// Complete beta function.
pub fn beta(x: f64, y: f64) -> Result<f64> {
    Ok((ln_gamma(x)? + ln_gamma(y)? - ln_gamma(x + y)?).exp())
}

fn beta_cf(a: f64, b: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..10_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            return Ok(h);
        }
    }
    Err(crate::Error::NoConvergence("incomplete beta continued fraction".into()))
}

/// Lower incomplete beta `B(z; x, y) = ∫₀ᶻ t^(x-1) (1-t)^(y-1) dt`.
pub fn beta_incomplete(z: f64, x: f64, y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) || !(x > 0.0) || !(y > 0.0) {
        return domain(format!("beta_incomplete requires z in [0,1], x,y > 0; got ({z}, {x}, {y})"));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let full = beta(x, y)?;
    if z == 1.0 {
        return Ok(full);
    }
    if z < (x + 1.0) / (x + y + 2.0) {
        let front = (x * z.ln() + y * (1.0 - z).ln()).exp() / x;
        Ok(front * beta_cf(x, y, z)?)
    } else {
        let w = 1.0 - z;
        let front = (y * w.ln() + x * z.ln()).exp() / y;
        Ok(full - front * beta_cf(y, x, w)?)
    }
}
