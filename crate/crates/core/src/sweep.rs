//! κ-sweeps of ρ_ball and the best cylinder ratio, with a fixed CSV schema.

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::ball::{rho_ball, trunc_thresholds, yukawa_flat_threshold};
use crate::cylinder::{rho_cyl, CylSearch};
use crate::error::{domain, unsupported, Error, Result};
use crate::kernels::{Family, Kernel};

pub const CSV_HEADER: &str = "kappa,rho_ball,l_opt,sigma_cyl,regime";

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub kappa: f64,
    pub rho_ball: f64,
    pub l_opt: f64,
    pub sigma_cyl: f64,
    pub regime: String,
}

/// A sweep: metadata `(key, value)` pairs and rows sorted by κ.
#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub meta: Vec<(String, String)>,
    pub rows: Vec<SweepRow>,
}

#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    pub n_quad: usize,
    pub tol: f64,
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// `steps` equally spaced κ values from `kmin` to `kmax` inclusive.
pub fn kappa_grid(kmin: f64, kmax: f64, steps: usize) -> Result<Vec<f64>> {
    if !(kmin > 0.0 && kmax >= kmin && kmax.is_finite()) {
        return domain(format!("kappa range must be positive and ordered, got [{kmin}, {kmax}]"));
    }
    match steps {
        0 => domain("steps must be at least 1"),
        1 => Ok(vec![kmin]),
        _ => Ok((0..steps).map(|i| kmin + (kmax - kmin) * i as f64 / (steps - 1) as f64).collect()),
    }
}

fn kernel_for(family: Family, kappa: f64) -> Result<Kernel> {
    match family {
        Family::TruncatedCoulomb => Kernel::truncated(3, 1.0, kappa),
        Family::Yukawa => Kernel::yukawa(3, 1.0, kappa),
        Family::Riesz => unsupported("Riesz kernels have no κ to sweep"),
    }
}

pub fn sweep_row(family: Family, kappa: f64, opts: SweepOptions) -> Result<SweepRow> {
    let k = kernel_for(family, kappa)?;
    let ball = rho_ball(&k)?;
    let mut search = CylSearch::default_for(&k);
    search.n_quad = opts.n_quad;
    search.tol = opts.tol;
    let cyl = rho_cyl(&k, search)?;
    Ok(SweepRow { kappa, rho_ball: ball.rho.approx(), l_opt: cyl.l, sigma_cyl: cyl.sigma.approx(), regime: ball.regime.to_string() })
}

/// Coulomb (n = 3, α = 1) sweep over the given κ values, computed in parallel.
pub fn sweep(family: Family, kappas: &[f64], opts: SweepOptions) -> Result<Sweep> {
    let meta = match family {
        Family::TruncatedCoulomb => {
            let (kmin, kmax) = trunc_thresholds(1.0);
            vec![("family".into(), "trunc".into()), ("kappa_min".into(), fmt17(kmin)), ("kappa_max".into(), fmt17(kmax))]
        }
        Family::Yukawa => vec![("family".into(), "yukawa".into()), ("kappa_flat".into(), fmt17(yukawa_flat_threshold()))],
        Family::Riesz => return unsupported("Riesz kernels have no κ to sweep"),
    };
    let mut rows = kappas.par_iter().map(|&kp| sweep_row(family, kp, opts)).collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.kappa.total_cmp(&b.kappa));
    Ok(Sweep { meta, rows })
}

impl Sweep {
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.meta {
            s.push_str(&format!("# {k}={v}\n"));
        }
        s.push_str(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{},{}\n", fmt17(r.kappa), fmt17(r.rho_ball), fmt17(r.l_opt), fmt17(r.sigma_cyl), r.regime));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut meta = Vec::new();
        let mut rows = Vec::new();
        let mut seen_header = false;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(m) = line.strip_prefix('#') {
                let (k, v) = m.trim().split_once('=').ok_or_else(|| Error::Parse(format!("line {}: bad metadata `{line}`", i + 1)))?;
                meta.push((k.trim().to_string(), v.trim().to_string()));
                continue;
            }
            if !seen_header {
                if line != CSV_HEADER {
                    return Err(Error::Parse(format!("line {}: expected header `{CSV_HEADER}`", i + 1)));
                }
                seen_header = true;
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(Error::Parse(format!("line {}: expected 5 fields, got {}", i + 1, f.len())));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("line {}: `{s}`: {e}", i + 1)));
            rows.push(SweepRow { kappa: num(f[0])?, rho_ball: num(f[1])?, l_opt: num(f[2])?, sigma_cyl: num(f[3])?, regime: f[4].to_string() });
        }
        if !seen_header {
            return Err(Error::Parse("missing CSV header".into()));
        }
        Ok(Sweep { meta, rows })
    }
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let name = path.file_name().ok_or_else(|| Error::Domain(format!("not a file path: {}", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let res = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if res.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(res?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cylinder::DEFAULT_N_QUAD;
    use crate::numerics::DEFAULT_MIN_TOL;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const OPTS: SweepOptions = SweepOptions { n_quad: DEFAULT_N_QUAD, tol: DEFAULT_MIN_TOL };

    #[test]
    fn grid_endpoints() {
        let g = kappa_grid(0.5, 1.5, 11).unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], 0.5);
        assert_eq!(g[10], 1.5);
        assert!(kappa_grid(-1.0, 1.0, 3).is_err());
        assert!(kappa_grid(1.0, 2.0, 0).is_err());
    }

    #[test]
    fn riesz_unsupported() {
        assert!(matches!(sweep(Family::Riesz, &[1.0], OPTS), Err(Error::Unsupported(_))));
    }

    #[test]
    fn yukawa_flat_rows() {
        let kf = yukawa_flat_threshold();
        let s = sweep(Family::Yukawa, &[0.3, 0.5, kf * 0.999, 0.56], OPTS).unwrap();
        for r in &s.rows {
            if r.kappa <= kf {
                assert_eq!(r.regime, "YukawaFlat");
                assert!((r.rho_ball - 4.0 * PI * r.kappa * r.kappa).abs() < 1e-12 * r.rho_ball);
            } else {
                assert_eq!(r.regime, "YukawaInterior");
            }
        }
        let r = s.rows.iter().find(|r| r.kappa == 0.56).unwrap();
        assert!(r.sigma_cyl < r.rho_ball);
    }

    #[test]
    fn trunc_regime_switch() {
        let (kmin, _) = trunc_thresholds(1.0);
        assert!((kmin - (3.0 / PI).cbrt()).abs() < 1e-15);
        let s = sweep(Family::TruncatedCoulomb, &[kmin * 0.99, kmin * 1.01, 1.1], OPTS).unwrap();
        assert_eq!(s.rows[0].regime, "TruncSubcritical");
        assert_eq!(s.rows[1].regime, "TruncIntermediate");
        assert!(s.rows[2].sigma_cyl < s.rows[2].rho_ball);
        assert!(s.to_csv().contains("# kappa_min="));
    }

    #[test]
    fn sweep_sorted_and_reproducible() {
        let a = sweep(Family::Yukawa, &[0.8, 0.56, 0.7], OPTS).unwrap();
        let b = sweep(Family::Yukawa, &[0.8, 0.56, 0.7], OPTS).unwrap();
        assert!(a.rows.windows(2).all(|w| w[0].kappa < w[1].kappa));
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(Sweep::from_csv("kappa,x\n").is_err());
        assert!(Sweep::from_csv(&format!("{CSV_HEADER}\n1,2,3\n")).is_err());
        assert!(Sweep::from_csv(&format!("{CSV_HEADER}\n1,2,3,abc,R\n")).is_err());
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![1e-300f64..1e300, -1e10f64..1e10, Just(0.0)]
    }

    proptest! {
        #[test]
        fn csv_round_trip(rows in prop::collection::vec((finite(), finite(), finite(), finite(), "[A-Za-z]{1,20}"), 0..20)) {
            let rows: Vec<SweepRow> = rows.into_iter().map(|(a, b, c, d, r)| SweepRow { kappa: a, rho_ball: b, l_opt: c, sigma_cyl: d, regime: r }).collect();
            let s = Sweep { meta: vec![("family".into(), "yukawa".into())], rows };
            prop_assert_eq!(Sweep::from_csv(&s.to_csv()).unwrap(), s);
        }
    }
}
