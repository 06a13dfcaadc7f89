use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use droplet::ball::{energy_mass_ratio, rho_ball, rho_ball_trunc_enclosure};
use droplet::certify::{certify_trunc_coulomb, certify_yukawa, CertificationReport};
use droplet::cylinder::{rho_cyl, sigma_cyl, sigma_cyl_trunc_exact_half, yukawa_convergence, CylSearch, DEFAULT_N_QUAD, REFERENCE_N_QUAD};
use droplet::kernels::{Family, Kernel};
use droplet::numerics::DEFAULT_MIN_TOL;
use droplet::oracle::ball_energy_monte_carlo;
use droplet::specfun::{ball_volume, parse_rational, Enclosure, EvalMode, Value};
use droplet::sweep::{kappa_grid, sweep, write_atomic, SweepOptions};
use droplet::{Error, Result};

#[derive(Parser)]
#[command(name = "droplet", version, about = "Energy/mass ratios of balls and cylinders for liquid-drop kernels")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Mode::Fast)]
    mode: Mode,
    /// Working precision in bits for certified evaluation.
    #[arg(long, global = true, default_value_t = 128)]
    precision: u32,
    /// Simpson subintervals (even).
    #[arg(long, global = true, default_value_t = DEFAULT_N_QUAD)]
    quad: usize,
    /// Minimizer interval tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_MIN_TOL)]
    tol: f64,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for Monte Carlo estimates.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Fast,
    Certified,
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    Ball,
    Cyl,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepFamily {
    Trunc,
    Yukawa,
    Riesz,
}

#[derive(Subcommand)]
enum Cmd {
    /// Optimal ratio over balls or cylinders, or the ratio at a fixed radius.
    Ratio {
        /// e.g. `yukawa:alpha=1,kappa=0.56,n=3`
        kernel: String,
        #[arg(value_enum)]
        shape: Shape,
        /// Cylinder radius.
        #[arg(long)]
        l: Option<f64>,
        /// Ball radius.
        #[arg(long)]
        r: Option<f64>,
        /// Also estimate the ball energy at `--r` by Monte Carlo with this many pairs.
        #[arg(long)]
        mc_samples: Option<u64>,
    },
    /// Sweep κ for the Coulomb-type kernels and write CSV.
    Sweep {
        #[arg(value_enum)]
        family: SweepFamily,
        #[arg(long)]
        kappa_min: f64,
        #[arg(long)]
        kappa_max: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Certify σ_cyl < ρ_ball and write a JSON report.
    Certify {
        #[command(subcommand)]
        case: CertifyCase,
    },
    /// Simpson convergence on the regularized Yukawa cylinder integrand.
    Converge {
        #[arg(long, default_value = "0.56")]
        kappa: f64,
        #[arg(long, default_value = "2.09")]
        l: f64,
        #[arg(long, value_delimiter = ',', default_values_t = (5..=12).map(|k| 1usize << k).collect::<Vec<_>>())]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = REFERENCE_N_QUAD)]
        reference_n: usize,
    },
}

#[derive(Subcommand)]
enum CertifyCase {
    /// Truncated Coulomb kernel, cylinder at l = κ/2.
    TruncCoulomb {
        #[arg(long)]
        kappa: String,
    },
    /// Yukawa kernel with a Riemann upper bound and a bracketed ball lower bound.
    Yukawa {
        #[arg(long)]
        kappa: String,
        #[arg(long)]
        l: String,
        #[arg(long = "N", default_value_t = 30_000)]
        n: u64,
        /// `a,b` bracketing λ*.
        #[arg(long)]
        bracket: String,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::SignCheck(_) => 1,
        Error::Parse(_) | Error::Domain(_) | Error::Grid(_) => 2,
        Error::Unsupported(_) => 3,
        Error::NoConvergence(_) | Error::Io(_) | Error::Json(_) => 4,
    }
}

fn rational(s: &str) -> Result<BigRational> {
    parse_rational(s).ok_or_else(|| Error::Parse(format!("not a rational number: `{s}`")))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fmt_value(v: &Value) -> String {
    match v {
        Value::Fast(x) => format!("{x}"),
        Value::Certified(e) => e.to_string(),
    }
}

fn certified_bits(cli: &Cli) -> Result<Option<u32>> {
    match cli.mode {
        Mode::Fast => Ok(None),
        Mode::Certified => Ok(Some(EvalMode::certified(cli.precision).map(|_| cli.precision)?)),
    }
}

fn cmd_ratio(cli: &Cli, spec: &str, shape: Shape, l: Option<f64>, r: Option<f64>, mc: Option<u64>) -> Result<u8> {
    let k: Kernel = spec.parse()?;
    let cert = certified_bits(cli)?;
    let mut s = String::new();
    writeln!(s, "kernel = {k}").unwrap();
    match shape {
        Shape::Ball => {
            if l.is_some() {
                return Err(Error::Parse("--l applies to cylinders".into()));
            }
            if let Some(r) = r {
                if cert.is_some() {
                    return Err(Error::Unsupported("certified ratio at a fixed ball radius".into()));
                }
                writeln!(s, "r = {r}\nratio = {}", energy_mass_ratio(&k, r)?).unwrap();
                if let Some(samples) = mc {
                    let est = ball_energy_monte_carlo(&k, r, samples, cli.seed)?;
                    let vol = ball_volume(k.dim()) * r.powi(k.dim() as i32);
                    writeln!(
                        s,
                        "ratio_mc = {}\nratio_mc_stderr = {}\nseed = {}",
                        k.dim() as f64 / r + est.value / vol,
                        est.stderr.unwrap_or(f64::NAN) / vol,
                        cli.seed
                    )
                    .unwrap();
                }
            } else if let Some(bits) = cert {
                let kappa = match (k.family(), k.kappa(), k.dim(), k.alpha()) {
                    (Family::TruncatedCoulomb, Some(kp), 3, 1.0) => kp,
                    _ => return Err(Error::Unsupported("certified ball ratio is available for trunc:alpha=1,n=3 only".into())),
                };
                let (rho, lam) = rho_ball_trunc_enclosure(&Enclosure::from_f64(kappa, bits))?;
                writeln!(s, "rho_ball = {rho}\nlambda_star = {lam}\nprecision = {bits}").unwrap();
            } else {
                let b = rho_ball(&k)?;
                writeln!(s, "rho_ball = {}", fmt_value(&b.rho)).unwrap();
                if let Some(rs) = b.r_star {
                    writeln!(s, "r_star = {rs}").unwrap();
                }
                if let Some(ls) = b.lambda_star {
                    writeln!(s, "lambda_star = {ls}").unwrap();
                }
                writeln!(s, "regime = {}", b.regime).unwrap();
            }
        }
        Shape::Cyl => {
            if r.is_some() || mc.is_some() {
                return Err(Error::Parse("--r and --mc-samples apply to balls".into()));
            }
            if cli.quad < 2 || !cli.quad.is_multiple_of(2) {
                return Err(Error::Domain(format!("--quad must be a positive even integer, got {}", cli.quad)));
            }
            let res = if let Some(bits) = cert {
                let kappa = match (k.family(), k.kappa(), k.dim(), k.alpha()) {
                    (Family::TruncatedCoulomb, Some(kp), 3, a) if a == 1.0 && l.is_none_or(|l| l == kp / 2.0) => kp,
                    _ => return Err(Error::Unsupported("certified cylinder ratio is available for trunc:alpha=1,n=3 at l = kappa/2 only".into())),
                };
                sigma_cyl_trunc_exact_half(kappa, EvalMode::certified(bits)?)?
            } else if let Some(l) = l {
                sigma_cyl(&k, l, cli.quad)?
            } else {
                let mut search = CylSearch::default_for(&k);
                search.n_quad = cli.quad;
                search.tol = cli.tol;
                rho_cyl(&k, search)?
            };
            let name = if l.is_some() || cert.is_some() { "sigma_cyl" } else { "rho_cyl" };
            writeln!(s, "{name} = {}\nl = {}\nmethod = {:?}", fmt_value(&res.sigma), res.l, res.method).unwrap();
        }
    }
    emit(&cli.out, &s)?;
    Ok(0)
}

fn cmd_sweep(cli: &Cli, family: SweepFamily, kmin: f64, kmax: f64, steps: usize) -> Result<u8> {
    let family = match family {
        SweepFamily::Trunc => Family::TruncatedCoulomb,
        SweepFamily::Yukawa => Family::Yukawa,
        SweepFamily::Riesz => return Err(Error::Unsupported("sweeps cover the trunc and yukawa families".into())),
    };
    if cli.mode == Mode::Certified {
        return Err(Error::Unsupported("sweeps run in fast mode".into()));
    }
    let kappas = kappa_grid(kmin, kmax, steps)?;
    let sw = sweep(family, &kappas, SweepOptions { n_quad: cli.quad, tol: cli.tol })?;
    emit(&cli.out, &sw.to_csv())?;
    Ok(0)
}

fn finish_report(cli: &Cli, rep: &CertificationReport) -> Result<u8> {
    let json = rep.to_json()? + "\n";
    emit(&cli.out, &json)?;
    eprintln!(
        "verdict: {:?} (cylinder upper {:.10}, ball lower {:.10}, {} bits, {:.2} s)",
        rep.verdict, rep.upper_bound_cyl.hi, rep.lower_bound_ball.lo, rep.precision_bits, rep.wall_time
    );
    Ok(if rep.is_certified() { 0 } else { 1 })
}

fn cmd_certify(cli: &Cli, case: &CertifyCase) -> Result<u8> {
    let rep = match case {
        CertifyCase::TruncCoulomb { kappa } => certify_trunc_coulomb(&rational(kappa)?, cli.precision)?,
        CertifyCase::Yukawa { kappa, l, n, bracket } => {
            let (a, b) = bracket.split_once(',').ok_or_else(|| Error::Parse(format!("bracket must be `a,b`, got `{bracket}`")))?;
            certify_yukawa(&rational(kappa)?, &rational(l)?, *n, (&rational(a)?, &rational(b)?), cli.precision)?
        }
    };
    finish_report(cli, &rep)
}

fn cmd_converge(cli: &Cli, kappa: f64, l: f64, n_list: &[usize], reference_n: usize) -> Result<u8> {
    let rep = yukawa_convergence(kappa, l, n_list, reference_n)?;
    let mut s = String::new();
    writeln!(s, "# kappa={kappa}\n# l={l}\n# reference_n={reference_n}\n# fitted_order={:.6}", rep.fitted_order).unwrap();
    writeln!(s, "n,h,rel_error,machine_limited").unwrap();
    for ((&n, &(h, e)), &m) in n_list.iter().zip(&rep.rows).zip(&rep.machine_limited) {
        writeln!(s, "{n},{h:.16e},{e:.16e},{m}").unwrap();
    }
    emit(&cli.out, &s)?;
    Ok(0)
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("DROPLET_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| Error::Parse(format!("DROPLET_THREADS must be a positive integer, got `{v}`")))?;
        if n == 0 {
            return Err(Error::Parse("DROPLET_THREADS must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Error::NoConvergence(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<u8> {
    init_threads()?;
    match &cli.cmd {
        Cmd::Ratio { kernel, shape, l, r, mc_samples } => cmd_ratio(cli, kernel, *shape, *l, *r, *mc_samples),
        Cmd::Sweep { family, kappa_min, kappa_max, steps } => cmd_sweep(cli, *family, *kappa_min, *kappa_max, *steps),
        Cmd::Certify { case } => cmd_certify(cli, case),
        Cmd::Converge { kappa, l, n_list, reference_n } => cmd_converge(cli, *kappa, *l, n_list, *reference_n),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
