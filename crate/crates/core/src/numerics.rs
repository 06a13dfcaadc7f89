//! One-dimensional quadrature, root finding, minimization and convergence
//! studies.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::specfun::Enclosure;

pub const DEFAULT_ROOT_TOL: f64 = 1e-12;
pub const DEFAULT_MIN_TOL: f64 = 1e-6;

/// Uniform grid of `n` subintervals on `[a, b]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub h: f64,
}

impl Grid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Grid(format!("need a < b, got [{a}, {b}]")));
        }
        if n == 0 {
            return Err(Error::Grid("need at least one subinterval".into()));
        }
        Ok(Grid { a, b, n, h: (b - a) / n as f64 })
    }

    /// Grid suitable for Simpson's rule.
    pub fn simpson(a: f64, b: f64, n: usize) -> Result<Self> {
        if n == 0 || !n.is_multiple_of(2) {
            return domain(format!("Simpson needs an even positive n, got {n}"));
        }
        Self::new(a, b, n)
    }

    /// Node `k`, with the last node pinned to `b`.
    pub fn node(&self, k: usize) -> f64 {
        if k == self.n {
            self.b
        } else {
            self.a + k as f64 * self.h
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(|k| self.node(k))
    }
}

/// Composite Simpson rule with `n` (even) subintervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> Result<f64> {
    let g = Grid::simpson(a, b, n)?;
    Ok(simpson_on(&g, f))
}

pub(crate) fn simpson_on(g: &Grid, f: impl Fn(f64) -> f64) -> f64 {
    let mut odd = 0.0;
    let mut even = 0.0;
    for k in 1..g.n {
        let v = f(g.node(k));
        if k % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    g.h / 3.0 * (f(g.a) + f(g.b) + 4.0 * odd + 2.0 * even)
}

/// Simpson rule on precomputed samples `v[0..=n]` with spacing `h`.
pub fn simpson_samples(v: &[f64], h: f64) -> Result<f64> {
    let n = v.len().saturating_sub(1);
    if n == 0 || !n.is_multiple_of(2) {
        return domain(format!("Simpson needs an even positive number of subintervals, got {n}"));
    }
    let mut s = v[0] + v[n];
    for (k, x) in v.iter().enumerate().take(n).skip(1) {
        s += if k % 2 == 1 { 4.0 * x } else { 2.0 * x };
    }
    Ok(h / 3.0 * s)
}

/// Newton iteration options.
#[derive(Clone, Copy, Debug)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Sign-change bracket enabling the bisection safeguard.
    pub bracket: Option<(f64, f64)>,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: DEFAULT_ROOT_TOL, max_iter: 100, bracket: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub x: f64,
    pub iterations: usize,
}

/// Newton's method, safeguarded by bisection when a bracket is supplied.
pub fn newton(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, x0: f64, opts: NewtonOptions) -> Result<Root> {
    if !(opts.tol > 0.0) {
        return domain("newton tolerance must be positive");
    }
    let mut bracket = match opts.bracket {
        Some((a, b)) => {
            let (fa, fb) = (f(a), f(b));
            if fa == 0.0 {
                return Ok(Root { x: a, iterations: 0 });
            }
            if fb == 0.0 {
                return Ok(Root { x: b, iterations: 0 });
            }
            if fa * fb > 0.0 {
                return domain(format!("bracket [{a}, {b}] has no sign change"));
            }
            Some(if fa < 0.0 { (a, b) } else { (b, a) })
        }
        None => None,
    };
    let mut x = x0;
    for it in 1..=opts.max_iter {
        let fx = f(x);
        if !fx.is_finite() {
            return Err(Error::NoConvergence(format!("non-finite residual at x = {x}")));
        }
        if fx.abs() <= opts.tol {
            return Ok(Root { x, iterations: it - 1 });
        }
        if let Some((neg, pos)) = bracket.as_mut() {
            if (x - *neg) * (x - *pos) < 0.0 {
                if fx < 0.0 {
                    *neg = x;
                } else {
                    *pos = x;
                }
            }
        }
        let d = df(x);
        let mut next = x - fx / d;
        if let Some((neg, pos)) = bracket {
            let (lo, hi) = if neg < pos { (neg, pos) } else { (pos, neg) };
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (hi - lo).abs() <= opts.tol {
                return Ok(Root { x: next, iterations: it });
            }
        }
        if !next.is_finite() {
            return Err(Error::NoConvergence(format!("Newton step diverged at x = {x}")));
        }
        if (next - x).abs() <= opts.tol * x.abs().max(1.0) {
            return Ok(Root { x: next, iterations: it });
        }
        x = next;
    }
    Err(Error::NoConvergence(format!("Newton did not converge in {} iterations", opts.max_iter)))
}

/// True iff `f(a) f(b) < 0`.
pub fn sign_change_bracket(f: impl Fn(f64) -> f64, a: f64, b: f64) -> bool {
    let (fa, fb) = (f(a), f(b));
    (fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)
}

/// True only when the enclosed values provably have opposite signs.
pub fn sign_change_certified(fa: &Enclosure, fb: &Enclosure) -> bool {
    (fa.is_negative() && fb.is_positive()) || (fa.is_positive() && fb.is_negative())
}

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`.
///
/// The endpoints are also compared, so the returned point is never worse
/// than either end of the interval.
pub fn minimize_1d(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    if !(a < b) {
        return domain(format!("minimize_1d needs a < b, got [{a}, {b}]"));
    }
    if !(tol > 0.0) {
        return domain("minimize_1d tolerance must be positive");
    }
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (a, b);
    let mut c = hi - invphi * (hi - lo);
    let mut d = lo + invphi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > tol {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - invphi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + invphi * (hi - lo);
            fd = f(d);
        }
    }
    let mid = 0.5 * (lo + hi);
    let mut best = (mid, f(mid));
    for x in [a, b] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    Ok(best)
}

/// Empirical convergence study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// `(h, relative error)` pairs.
    pub rows: Vec<(f64, f64)>,
    pub fitted_order: f64,
    /// Rows whose error is at roundoff level and were left out of the fit.
    pub machine_limited: Vec<bool>,
}

/// Errors below this relative level are treated as roundoff.
pub const MACHINE_ERROR_LEVEL: f64 = 1e-13;

/// Relative Simpson errors against `reference` for each `n` in `n_list`,
/// with the least-squares slope of log error against log h.
pub fn convergence_study(f: impl Fn(f64) -> f64, a: f64, b: f64, n_list: &[usize], reference: f64) -> Result<ConvergenceReport> {
    let mut rows = Vec::with_capacity(n_list.len());
    let scale = if reference == 0.0 { 1.0 } else { reference.abs() };
    let mut prev_h = f64::INFINITY;
    for &n in n_list {
        let g = Grid::simpson(a, b, n)?;
        if !(g.h < prev_h) {
            return domain("n_list must be strictly increasing");
        }
        prev_h = g.h;
        let v = simpson_on(&g, &f);
        rows.push((g.h, (v - reference).abs() / scale));
    }
    let machine_limited: Vec<bool> = rows.iter().map(|&(_, e)| e <= MACHINE_ERROR_LEVEL).collect();
    let pts: Vec<(f64, f64)> = rows.iter().zip(&machine_limited).filter(|(_, &m)| !m).map(|(&(h, e), _)| (h.ln(), e.ln())).collect();
    let fitted_order = if pts.len() >= 2 { ls_slope(&pts) } else { f64::NAN };
    Ok(ConvergenceReport { rows, fitted_order, machine_limited })
}

/// Least-squares slope through `(x, y)` points.
pub fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
