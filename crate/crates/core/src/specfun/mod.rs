//! Special functions and constants, in fast (`f64`) and certified
//! (enclosure) flavours.

mod bessel;
mod constants;
mod dyadic;
mod enclosure;
mod gamma;

pub use bessel::{k0_enclosure, k0_fast, k0_point, k0_upper_bound};
pub use constants::{catalan_enclosure, catalan_terms, euler_gamma_enclosure, ln2_enclosure, pi_enclosure};
pub use dyadic::{Dyadic, Round};
pub use enclosure::{parse_rational, Enclosure};
pub use gamma::{beta, beta_incomplete, gamma, ln_gamma};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
pub const CATALAN: f64 = 0.915_965_594_177_219;

/// Smallest working precision accepted by certified evaluation.
pub const MIN_CERTIFIED_BITS: u32 = 113;

/// Default number of Catalan digits requested by certified evaluation.
pub const CATALAN_DIGITS: u32 = 12;

/// Evaluation mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvalMode {
    Fast,
    Certified(Precision),
}

/// Working precision in bits, at least [`MIN_CERTIFIED_BITS`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Precision(u32);

impl Precision {
    pub fn new(bits: u32) -> Result<Self> {
        if bits < MIN_CERTIFIED_BITS {
            return domain(format!("certified precision must be at least {MIN_CERTIFIED_BITS} bits, got {bits}"));
        }
        Ok(Precision(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }
}

impl EvalMode {
    pub fn certified(bits: u32) -> Result<Self> {
        Ok(EvalMode::Certified(Precision::new(bits)?))
    }
}

/// Result of a mode-dependent evaluation.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Fast(f64),
    Certified(Enclosure),
}

impl Value {
    /// Point value, or the midpoint of the enclosure.
    pub fn approx(&self) -> f64 {
        match self {
            Value::Fast(v) => *v,
            Value::Certified(e) => e.mid_f64(),
        }
    }

    pub fn as_fast(&self) -> Option<f64> {
        match self {
            Value::Fast(v) => Some(*v),
            Value::Certified(_) => None,
        }
    }

    pub fn as_enclosure(&self) -> Option<&Enclosure> {
        match self {
            Value::Fast(_) => None,
            Value::Certified(e) => Some(e),
        }
    }
}

/// Modified Bessel function K0.
pub fn bessel_k0(x: f64, mode: EvalMode) -> Result<Value> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("bessel_k0 requires x > 0, got {x}"));
    }
    Ok(match mode {
        EvalMode::Fast => Value::Fast(k0_fast(x)),
        EvalMode::Certified(p) => Value::Certified(k0_point(&Dyadic::from_f64(x), p.bits())),
    })
}

/// Catalan's constant.
pub fn catalan(mode: EvalMode) -> Value {
    match mode {
        EvalMode::Fast => Value::Fast(CATALAN),
        EvalMode::Certified(p) => Value::Certified(catalan_enclosure(CATALAN_DIGITS, p.bits())),
    }
}

/// Partial sum `Σ_{k=0}^{n} (-1)^k/(2k+1)^2` with the enclosure given by
/// the next term.
pub fn catalan_partial(n: u64) -> (f64, f64) {
    let mut s = 0.0;
    for k in (0..=n).rev() {
        let t = 1.0 / ((2 * k + 1) as f64).powi(2);
        s += if k % 2 == 0 { t } else { -t };
    }
    let next = 1.0 / ((2 * n + 3) as f64).powi(2);
    if n.is_multiple_of(2) {
        (s - next, s)
    } else {
        (s, s + next)
    }
}

/// |S^k| = 2 π^{(k+1)/2} / Γ((k+1)/2).
pub fn sphere_area(k: u32) -> f64 {
    let h = (k as f64 + 1.0) / 2.0;
    2.0 * std::f64::consts::PI.powf(h) / gamma(h).expect("positive argument")
}

/// |B^n| = π^{n/2} / Γ(n/2 + 1).
pub fn ball_volume(n: u32) -> f64 {
    let h = n as f64 / 2.0;
    std::f64::consts::PI.powf(h) / gamma(h + 1.0).expect("positive argument")
}
