use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use rug::Float;
use serde::Serialize;

use ivpcount::acceptance::{self, Settings};
use ivpcount::capacity::{capacity_two_disks, capacity_via_op_norms, critical_b};
use ivpcount::gram::{gram_matrix, log_det, op_norms, GramMatrix, OpNorms};
use ivpcount::ivp::{GrowthSpec, NormMode};
use ivpcount::lattice::{
    build_ellipsoid, ellipsoid_log_volume, search_ivps, sup_norm_bounds, witness_rows, EnumConfig, SearchConfig, VaalerBall,
};
use ivpcount::real::{decimal_digits, golden, parse_real, to_decimal, CertifiedReal, Prec};
use ivpcount::Error;

use crate::{Cli, Command, Failure, ModeArg, SpecArgs};

struct Config {
    prec: Prec,
    eps: Float,
    dim_cap: usize,
}

impl Config {
    fn digits(&self) -> usize {
        decimal_digits(self.prec)
    }

    fn real(&self, s: &str) -> Result<Float, Failure> {
        parse_real(self.prec, s).map_err(Failure::from)
    }

    fn dec(&self, x: &Float) -> String {
        to_decimal(x, self.digits())
    }
}

pub fn dispatch(cli: Cli) -> Result<u8, Failure> {
    if cli.precision < 64 {
        return Err(Failure::usage(format!("--precision must be at least 64, got {}", cli.precision)));
    }
    let prec = cli.precision;
    let eps = parse_real(prec, &cli.eps)?;
    if !(eps > 0) {
        return Err(Failure::usage("--eps must be positive"));
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::usage(e.to_string()))?;
    }
    let cfg = Config { prec, eps, dim_cap: cli.dim_cap };
    match cli.command {
        Command::Capacity { a, b, cross_check, kmax } => capacity(&cfg, &a, &b, cross_check.then_some(kmax)),
        Command::CriticalCurve { a_min, a_max, steps, tol, out } => {
            critical_curve(&cfg, &a_min, &a_max, steps, tol, out.as_deref())
        }
        Command::Search { spec, witness_cap, witnesses_out } => search(&cfg, &spec, witness_cap, witnesses_out.as_deref()),
        Command::Gram { spec, matrix } => gram(&cfg, &spec, matrix),
        Command::Verify { quick, criterion } => verify(&cfg, quick, &criterion),
    }
}

fn print_json<T: Serialize>(v: &T) -> Result<(), Failure> {
    let s = serde_json::to_string_pretty(v).map_err(|e| Failure::from(Error::Numeric(e.to_string())))?;
    let mut out = io::stdout().lock();
    writeln!(out, "{s}")?;
    Ok(())
}

#[derive(Serialize)]
struct CapacityOut {
    a: String,
    b: String,
    gamma: String,
    error: String,
    certified: bool,
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    cross_check: Option<CrossCheckOut>,
}

#[derive(Serialize)]
struct CrossCheckOut {
    method: &'static str,
    kmax: String,
    gamma: String,
    error: String,
    difference: String,
}

fn capacity(cfg: &Config, a: &str, b: &str, kmax: Option<usize>) -> Result<u8, Failure> {
    let (a, b) = (cfg.real(a)?, cfg.real(b)?);
    let g = capacity_two_disks(&a, &b)?;
    let cross_check = match kmax {
        Some(k) => {
            let est = capacity_via_op_norms(&a, Some(&b), k)?;
            let diff = Float::with_val(cfg.prec, est.value() - g.value()).abs();
            Some(CrossCheckOut {
                method: "op_ratio",
                kmax: k.to_string(),
                gamma: cfg.dec(est.value()),
                error: to_decimal(est.error(), 6),
                difference: to_decimal(&diff, 6),
            })
        }
        None => None,
    };
    print_json(&CapacityOut {
        a: cfg.dec(&a),
        b: cfg.dec(&b),
        gamma: cfg.dec(g.value()),
        error: to_decimal(g.error(), 6),
        certified: g.certified,
        method: "theta",
        cross_check,
    })?;
    Ok(0)
}

fn critical_curve(cfg: &Config, a_min: &str, a_max: &str, steps: usize, tol: f64, out: Option<&Path>) -> Result<u8, Failure> {
    let prec = cfg.prec;
    let (lo, hi) = (cfg.real(a_min)?, cfg.real(a_max)?);
    if !(lo > golden(prec) && lo < hi) {
        return Err(Failure::usage("need phi < a_min < a_max"));
    }
    if steps < 2 {
        return Err(Failure::usage("--steps must be at least 2"));
    }
    if !(tol > 0.0) {
        return Err(Failure::usage("--tol must be positive"));
    }
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    let csv_err = |e: csv::Error| Failure { code: 1, message: e.to_string() };
    w.write_record(["A", "B_critical", "gamma_residual", "flag"]).map_err(csv_err)?;
    let step = Float::with_val(prec, &hi - &lo) / (steps as u32 - 1);
    let digits = 17;
    for i in 0..steps {
        let a = if i + 1 == steps { hi.clone() } else { Float::with_val(prec, &step * i as u32) + &lo };
        let row = match critical_b(&a, tol) {
            Ok(b) => {
                let g = capacity_two_disks(&a, &b)?;
                let residual = Float::with_val(prec, g.value() - 1u32);
                [to_decimal(&a, digits), to_decimal(&b, digits), to_decimal(&residual, 6), "ok".to_string()]
            }
            Err(Error::NoBracket { .. }) => [to_decimal(&a, digits), String::new(), String::new(), "no_bracket".to_string()],
            Err(e) => return Err(e.into()),
        };
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(0)
}

fn growth_spec(cfg: &Config, args: &SpecArgs) -> Result<GrowthSpec, Failure> {
    let prec = cfg.prec;
    let a = cfg.real(&args.a)?;
    let b = args.b.as_deref().map(|b| cfg.real(b)).transpose()?;
    let t = match (&args.t, &args.t_squared, args.t_squared_below_phi) {
        (Some(t), _, _) => cfg.real(t)?,
        (_, Some(t2), _) => {
            let t2 = cfg.real(t2)?;
            if t2 < 0 {
                return Err(Failure::usage("--t-squared must be non-negative"));
            }
            t2.sqrt()
        }
        (_, _, true) => {
            let one = Float::with_val(prec, 1);
            let shrink = one - Float::with_val(prec, 1e-6f64);
            Float::with_val(prec, golden(prec) * shrink).sqrt()
        }
        _ => return Err(Failure::usage("one of --t, --t-squared, --t-squared-below-phi is required")),
    };
    let mode = match args.mode {
        ModeArg::Linf => NormMode::LInf,
        ModeArg::L2 => NormMode::L2,
        ModeArg::L2w => NormMode::L2Weighted,
    };
    Ok(GrowthSpec::new(a, b, mode, t)?)
}

fn search(cfg: &Config, args: &SpecArgs, witness_cap: usize, witnesses_out: Option<&Path>) -> Result<u8, Failure> {
    let spec = growth_spec(cfg, args)?;
    let sc = SearchConfig {
        enumeration: EnumConfig { dim_cap: cfg.dim_cap, ..EnumConfig::default() },
        witness_cap,
        eps: Some(cfg.eps.clone()),
    };
    let report = search_ivps(&spec, args.degree, &sc)?;
    if let Some(path) = witnesses_out {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(path)
            .map_err(|e| Failure { code: 1, message: e.to_string() })?;
        let mut header = vec!["degree".to_string()];
        header.extend((0..=args.degree).map(|k| format!("c_{k}")));
        let csv_err = |e: csv::Error| Failure { code: 1, message: e.to_string() };
        w.write_record(&header).map_err(csv_err)?;
        for row in witness_rows(&report) {
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
    }
    print_json(&report)?;
    Ok(0)
}

#[derive(Serialize)]
struct GramOut<'a> {
    params: &'a GrowthSpec,
    d: String,
    gram_mode: String,
    prefactor: &'static str,
    truncation: Option<String>,
    entry_error: String,
    log_det: CertifiedReal,
    op_norms: OpNorms,
    /// Log-volume of the body (the inner one for two-sided L2 constraints).
    logvol: CertifiedReal,
    #[serde(skip_serializing_if = "Option::is_none")]
    logvol_outer: Option<CertifiedReal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vaaler: Option<VaalerBall>,
    gamma: CertifiedReal,
    /// `logvol/d^2 + (1/2) log gamma`.
    diagnostic: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostic_outer: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matrix: Option<&'a GramMatrix>,
}

/// Capacity governing the volume growth: `gamma_{A,B}` for two-sided
/// constraints, the image-circle radius `A/(A^2-1)` for one-sided ones.
fn growth_capacity(spec: &GrowthSpec) -> Result<CertifiedReal, Failure> {
    let prec = spec.prec();
    match spec.b() {
        Some(b) => Ok(capacity_two_disks(spec.a(), b)?.gamma),
        None => {
            let a = spec.a();
            let den = Float::with_val(prec, a.square_ref()) - 1u32;
            Ok(CertifiedReal::rounded(Float::with_val(prec, a / &den)))
        }
    }
}

fn gram(cfg: &Config, args: &SpecArgs, with_matrix: bool) -> Result<u8, Failure> {
    let prec = cfg.prec;
    let spec = growth_spec(cfg, args)?;
    let d = args.degree;
    let g = gram_matrix(&spec, d, &cfg.eps)?;
    let ld = log_det(&g)?;
    let norms = op_norms(&g)?;
    let (logvol, logvol_outer, vaaler) = match spec.mode() {
        NormMode::LInf => {
            let (vb, lv) = sup_norm_bounds(&spec, d, &cfg.eps)?;
            (lv, None, Some(vb))
        }
        _ => {
            let e = build_ellipsoid(&spec, d, &cfg.eps)?;
            let lv = ellipsoid_log_volume(&e)?;
            let outer = spec.is_two_sided().then(|| {
                let half_n = Float::with_val(prec, (d + 1) as u32) / 2u32;
                lv.add(&CertifiedReal::rounded(Float::with_val(prec, 2u32).ln() * half_n))
            });
            (lv, outer, None)
        }
    };
    let gamma = growth_capacity(&spec)?;
    let half_log_gamma = gamma.ln()?.scale(&Float::with_val(prec, 0.5f64));
    let diag = |lv: &CertifiedReal| -> Option<String> {
        (d > 0).then(|| {
            let d2 = Float::with_val(prec, (d * d) as u32);
            let v = Float::with_val(prec, lv.value() / &d2) + half_log_gamma.value();
            to_decimal(&v, 12)
        })
    };
    let out = GramOut {
        params: &spec,
        d: d.to_string(),
        gram_mode: format!("{:?}", g.mode()),
        prefactor: g.mode().prefactor(),
        truncation: g.truncation().map(|m| m.to_string()),
        entry_error: to_decimal(&g.entry_error(), 6),
        diagnostic: diag(&logvol),
        diagnostic_outer: logvol_outer.as_ref().and_then(diag),
        log_det: ld,
        op_norms: norms,
        logvol,
        logvol_outer,
        vaaler,
        gamma,
        matrix: with_matrix.then_some(&g),
    };
    print_json(&out)?;
    Ok(0)
}

fn verify(cfg: &Config, quick: bool, only: &[u8]) -> Result<u8, Failure> {
    let settings = Settings { prec: cfg.prec, quick };
    let ids: Vec<u8> = if only.is_empty() { (1..=12).collect() } else { only.to_vec() };
    let mut out = io::stdout().lock();
    let mut failed = 0;
    for &id in &ids {
        let r = acceptance::run(id, &settings)?;
        writeln!(out, "{}", r.line())?;
        for d in &r.details {
            writeln!(out, "    {d}")?;
        }
        out.flush()?;
        failed += usize::from(!r.passed);
    }
    writeln!(out, "{} of {} criteria passed", ids.len() - failed, ids.len())?;
    Ok(if failed == 0 { 0 } else { 1 })
}
