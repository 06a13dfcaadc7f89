//! Interaction kernels, their one-dimensional slice energies and the
//! kernels obtained by integrating along a cylinder axis.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, unsupported, Error, Result};
use crate::specfun::{bessel_k0, gamma, EvalMode, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Riesz,
    TruncatedCoulomb,
    Yukawa,
}

/// A radial interaction kernel in dimension `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    family: Family,
    alpha: f64,
    kappa: Option<f64>,
    n: u32,
}

impl Kernel {
    pub fn new(family: Family, n: u32, alpha: f64, kappa: Option<f64>) -> Result<Self> {
        if n < 2 {
            return domain(format!("dimension must be at least 2, got {n}"));
        }
        if !(alpha > 0.0 && alpha < n as f64) {
            return domain(format!("alpha must lie in (0, {n}), got {alpha}"));
        }
        match (family, kappa) {
            (Family::Riesz, Some(_)) => return domain("Riesz kernel takes no kappa"),
            (Family::Riesz, None) => {}
            (_, None) => return domain("kappa is required for screened kernels"),
            (_, Some(k)) if !(k > 0.0 && k.is_finite()) => return domain(format!("kappa must be positive, got {k}")),
            _ => {}
        }
        Ok(Kernel { family, alpha, kappa, n })
    }

    pub fn riesz(n: u32, alpha: f64) -> Result<Self> {
        Self::new(Family::Riesz, n, alpha, None)
    }

    pub fn truncated(n: u32, alpha: f64, kappa: f64) -> Result<Self> {
        Self::new(Family::TruncatedCoulomb, n, alpha, Some(kappa))
    }

    pub fn yukawa(n: u32, alpha: f64, kappa: f64) -> Result<Self> {
        Self::new(Family::Yukawa, n, alpha, Some(kappa))
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn kappa(&self) -> Option<f64> {
        self.kappa
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    /// β = n + 1 − α.
    pub fn beta(&self) -> f64 {
        self.n as f64 + 1.0 - self.alpha
    }

    fn kappa_or_inf(&self) -> f64 {
        self.kappa.unwrap_or(f64::INFINITY)
    }

    /// Fails unless the kernel is the three-dimensional Coulomb-type case.
    pub fn require_coulomb_3d(&self) -> Result<()> {
        if self.n != 3 || self.alpha != 1.0 {
            return unsupported(format!("{self}: only n=3, alpha=1 is supported here"));
        }
        Ok(())
    }

    /// Pointwise value G(r).
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return domain(format!("kernel evaluated at r = {r}"));
        }
        Ok(self.eval_unchecked(r))
    }

    pub(crate) fn eval_unchecked(&self, r: f64) -> f64 {
        let base = r.powf(-self.alpha);
        match self.family {
            Family::Riesz => base,
            Family::TruncatedCoulomb => {
                if r < self.kappa_or_inf() {
                    base
                } else {
                    0.0
                }
            }
            Family::Yukawa => (-r / self.kappa_or_inf()).exp() * base,
        }
    }

    /// S_G(L) = ∫₀ᴸ∫₀ᴸ |s−t|^{n−1} G(s−t) ds dt.
    pub fn slice_energy(&self, len: f64) -> Result<f64> {
        if !(len >= 0.0) {
            return domain(format!("slice length must be nonnegative, got {len}"));
        }
        let b = self.beta();
        let c = 2.0 / (b * (b - 1.0));
        match self.family {
            Family::Riesz => Ok(c * len.powf(b)),
            Family::TruncatedCoulomb => {
                let k = self.kappa_or_inf();
                if len <= k {
                    Ok(c * len.powf(b))
                } else {
                    Ok(c * k.powf(b - 1.0) * (b * len - (b - 1.0) * k))
                }
            }
            Family::Yukawa => {
                self.require_yukawa()?;
                Ok(yukawa_slice(self.kappa_or_inf(), len))
            }
        }
    }

    /// dS/dL, used by convexity and junction checks.
    pub fn slice_energy_derivative(&self, len: f64) -> Result<f64> {
        if !(len >= 0.0) {
            return domain(format!("slice length must be nonnegative, got {len}"));
        }
        let b = self.beta();
        let c = 2.0 / (b - 1.0);
        match self.family {
            Family::Riesz => Ok(c * len.powf(b - 1.0)),
            Family::TruncatedCoulomb => {
                let k = self.kappa_or_inf();
                Ok(c * len.min(k).powf(b - 1.0))
            }
            Family::Yukawa => {
                self.require_yukawa()?;
                let k = self.kappa_or_inf();
                let x = len / k;
                Ok(2.0 * k * k * (1.0 - (1.0 + x) * (-x).exp()))
            }
        }
    }

    pub(crate) fn require_yukawa(&self) -> Result<()> {
        if self.n != 3 || self.alpha != 1.0 {
            return unsupported(format!("Yukawa kernel is only available for n=3, alpha=1 (got n={}, alpha={})", self.n, self.alpha));
        }
        Ok(())
    }
}

/// 2κ³(x − 2 + (x + 2)e^{−x}) with x = L/κ, summed as a series for small x.
fn yukawa_slice(kappa: f64, len: f64) -> f64 {
    let x = len / kappa;
    let k3 = 2.0 * kappa.powi(3);
    if x < 0.5 {
        // Σ_{m≥3} (−1)^{m+1}(m−2) x^m / m!
        let mut term = x * x * x / 6.0;
        let mut sum = 0.0;
        for m in 3..60 {
            let t = term * (m as f64 - 2.0);
            sum += if m % 2 == 1 { t } else { -t };
            term *= x / (m as f64 + 1.0);
            if term < 1e-18 * sum.abs() {
                break;
            }
        }
        k3 * sum
    } else {
        k3 * (x - 2.0 + (x + 2.0) * (-x).exp())
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Riesz => write!(f, "riesz:alpha={},n={}", self.alpha, self.n),
            Family::TruncatedCoulomb => {
                write!(f, "trunc:alpha={},kappa={},n={}", self.alpha, self.kappa_or_inf(), self.n)
            }
            Family::Yukawa => write!(f, "yukawa:alpha={},kappa={},n={}", self.alpha, self.kappa_or_inf(), self.n),
        }
    }
}

impl FromStr for Kernel {
    type Err = Error;

    /// Parses `riesz:alpha=1,n=3`, `trunc:alpha=1,kappa=1.1,n=3` or
    /// `yukawa:alpha=1,kappa=0.56,n=3`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("kernel spec `{s}`: {m}"));
        let (name, rest) = s.trim().split_once(':').ok_or_else(|| bad("expected `family:key=value,...`"))?;
        let family = match name.trim().to_ascii_lowercase().as_str() {
            "riesz" => Family::Riesz,
            "trunc" | "truncated" | "trunc-coulomb" => Family::TruncatedCoulomb,
            "yukawa" => Family::Yukawa,
            other => return Err(bad(&format!("unknown family `{other}`"))),
        };
        let (mut alpha, mut kappa, mut n) = (None, None, None);
        for kv in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad(&format!("`{kv}` is not key=value")))?;
            let v = v.trim();
            match k.trim() {
                "alpha" => alpha = Some(v.parse::<f64>().map_err(|_| bad("alpha is not a number"))?),
                "kappa" => kappa = Some(v.parse::<f64>().map_err(|_| bad("kappa is not a number"))?),
                "n" => n = Some(v.parse::<u32>().map_err(|_| bad("n is not an integer"))?),
                other => return Err(bad(&format!("unknown key `{other}`"))),
            }
        }
        let alpha = alpha.ok_or_else(|| bad("missing alpha"))?;
        let n = n.unwrap_or(3);
        Kernel::new(family, n, alpha, kappa).map_err(|e| match e {
            Error::Domain(m) => bad(&m),
            other => other,
        })
    }
}

/// c_α = √π Γ((α−1)/2) / Γ(α/2), the constant in R_α^cyl = c_α R_{α−1}.
pub fn cyl_reduction_constant(alpha: f64) -> Result<f64> {
    if !(alpha > 1.0) {
        return domain(format!("cylinder reduction diverges for alpha <= 1 (got {alpha})"));
    }
    Ok(std::f64::consts::PI.sqrt() * gamma((alpha - 1.0) / 2.0)? / gamma(alpha / 2.0)?)
}

/// 2 atanh(√(1 − (l/κ)²)) for l < κ, and 0 beyond.
pub fn trunc_cyl_kernel(kappa: f64, l: f64) -> f64 {
    if l >= kappa {
        return 0.0;
    }
    let q = l / kappa;
    let y = (1.0 - q * q).sqrt();
    // atanh y = ½ ln((1+y)/(1−y)) with 1 − y = q²/(1 + y)
    ((1.0 + y) * (1.0 + y) / (q * q)).ln()
}

/// 2 K0(s/κ), the Yukawa kernel integrated along the axis.
pub fn yukawa_cyl_kernel(kappa: f64, s: f64, mode: EvalMode) -> Result<Value> {
    if !(s > 0.0) {
        return domain(format!("yukawa_cyl_kernel needs s > 0, got {s}"));
    }
    Ok(match bessel_k0(s / kappa, mode)? {
        Value::Fast(v) => Value::Fast(2.0 * v),
        Value::Certified(e) => Value::Certified(e.mul_pow2(1)),
    })
}
