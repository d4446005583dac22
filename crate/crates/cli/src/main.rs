//! `ramanujan`: q-expansions, differential modular forms, Gauss-Manin data,
//! period matrices and Ramanujan flows from the command line.
//!
//! Exit status: 0 on success, 1 when a requested check fails, 2 on invalid input
//! or a computation error.

mod complex;
mod config;
mod expr;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::{Complex, Complex64};
use ramanujan_core::dmf::{hecke, hecke_composition_check, DmfElement};
use ramanujan_core::eisenstein::{discriminant_series, generators, j_series};
use ramanujan_core::foliation::{flow, FlowTrajectory};
use ramanujan_core::gaussmanin::{
    matrices, picard_fuchs_transport, verify_basis_change, verify_det_identities,
    verify_ra_discriminant, BasisTag, TransportOptions,
};
use ramanujan_core::numeric::{from_c64, to_c64, FloatMode, Hp};
use ramanujan_core::periods::{
    period_matrix, period_matrix_generic, reduce_tau, CurvePoint, PeriodMatrix,
};
use ramanujan_core::verify::{verify_all, SUITES};
use serde_json::{json, Value};

use complex::{fmt_complex, parse_complex};
use config::{Config, Format};

/// Version of every JSON document this tool prints.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "ramanujan",
    version,
    about = "Differential modular forms and the Ramanujan foliation"
)]
struct Cli {
    /// TOML configuration (default: $RAMANUJAN_CONFIG, then built-in defaults).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesName {
    #[value(name = "E2")]
    E2,
    #[value(name = "E4")]
    E4,
    #[value(name = "E6")]
    E6,
    Delta,
    J,
    G1,
    G2,
    G3,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact q-expansion up to and including q^N.
    Qexp {
        #[arg(value_enum, ignore_case = true)]
        series: SeriesName,
        n: i64,
    },
    /// Apply D = (g1^2 - g2/12) d/dg1 + (4 g1 g2 - 6 g3) d/dg2 + (6 g1 g3 - g2^2/3) d/dg3.
    Diff {
        expr: String,
        /// Also print the associated functions f_0..f_n.
        #[arg(long)]
        associated: bool,
    },
    /// Hecke operator T_p on a homogeneous element.
    Hecke {
        expr: String,
        p: u64,
        /// Also compare T_p T_q with the composition law on this many coefficients.
        #[arg(long, value_name = "Q")]
        compose: Option<u64>,
        #[arg(long, default_value_t = 40)]
        order: i64,
    },
    /// Gauss-Manin connection data.
    Gm {
        #[command(subcommand)]
        cmd: GmCmd,
    },
    /// Normalized period matrix of y^2 = 4 (x - t1)^3 - t2 (x - t1) - t3.
    Periods {
        #[arg(long, allow_hyphen_values = true)]
        t1: String,
        #[arg(long, allow_hyphen_values = true)]
        t2: String,
        #[arg(long, allow_hyphen_values = true)]
        t3: String,
        /// Use double-double arithmetic.
        #[arg(long)]
        hp: bool,
    },
    /// Integrate the Ramanujan vector field for real time.
    Flow {
        /// Start point `t1,t2,t3` (complex entries like 0.5-2i).
        #[arg(long, allow_hyphen_values = true, conflicts_with = "eisenstein")]
        start: Option<String>,
        /// Start at g(z) instead.
        #[arg(long, allow_hyphen_values = true)]
        eisenstein: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        length: f64,
        /// Relative tolerance of the integrator.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        /// Write samples as CSV to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Skip the period-based monitors.
        #[arg(long)]
        no_periods: bool,
    },
    /// Run the self-check suites.
    VerifyAll {
        #[arg(long)]
        seed: Option<u64>,
        /// Restrict to the named suites (repeatable).
        #[arg(long = "suite", value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suites: Vec<String>,
    },
}

#[derive(Subcommand)]
enum GmCmd {
    /// Print A_0..A_3 and Delta.
    Print {
        #[arg(long, default_value = "classical")]
        basis: BasisTag,
    },
    /// Check the symbolic identities.
    Verify,
    /// Transport the period matrix along a polyline given as a JSON list of `[t0, t1, t2, t3]`.
    Transport {
        #[arg(long)]
        path: PathBuf,
        #[arg(long, default_value = "classical")]
        basis: BasisTag,
    },
}

enum Outcome {
    Ok,
    ChecksFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let mut cfg = Config::load(cli.config.as_deref())?;
    if cli.json {
        cfg.format = Format::Json;
    }
    let json = cfg.format == Format::Json;
    match cli.cmd {
        Cmd::Qexp { series, n } => qexp(series, n, json),
        Cmd::Diff { expr, associated } => diff(&expr, associated, json),
        Cmd::Hecke {
            expr,
            p,
            compose,
            order,
        } => hecke_cmd(&expr, p, compose, order, json),
        Cmd::Gm { cmd } => gm(cmd, json),
        Cmd::Periods { t1, t2, t3, hp } => periods(
            &t1,
            &t2,
            &t3,
            hp || cfg.float_mode == FloatMode::HighPrecision,
            json,
        ),
        Cmd::Flow {
            start,
            eisenstein,
            length,
            tol,
            samples,
            csv,
            no_periods,
        } => {
            let mut opts = cfg.flow;
            if let Some(t) = tol {
                opts.ode.rtol = t;
                opts.ode.atol = t * 1e-2;
            }
            if let Some(s) = samples {
                opts.samples = s;
            }
            if no_periods {
                opts.period_monitors = false;
            }
            let start = match (start, eisenstein) {
                (Some(s), None) => parse_triple(&s)?,
                (None, Some(z)) => {
                    let z = parse_complex(&z).map_err(|e| anyhow!(e))?;
                    ramanujan_core::eisenstein::g_values(z, cfg.order)?
                }
                _ => bail!("give exactly one of --start or --eisenstein"),
            };
            let tr = flow(start, length, &opts)?;
            flow_output(&tr, csv, cfg.format)
        }
        Cmd::VerifyAll { seed, suites } => {
            let mut v = cfg.verify;
            if let Some(s) = seed {
                v.seed = s;
            }
            let report = verify_all(&v, &suites);
            if json {
                print_json(json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": "verify-all",
                    "seed": report.seed,
                    "passed": report.passed(),
                    "failed": report.failed(),
                    "checks": report.checks,
                }));
            } else {
                for c in &report.checks {
                    let tag = match (c.passed, c.informational) {
                        (true, _) => "PASS",
                        (false, false) => "FAIL",
                        (false, true) => "NOTE",
                    };
                    let detail = if c.detail.is_empty() {
                        String::new()
                    } else {
                        format!("  [{}]", c.detail)
                    };
                    println!("{tag} {:<14} {}{detail}", c.suite, c.name);
                }
                println!(
                    "seed {}: {} passed, {} failed",
                    report.seed,
                    report.passed(),
                    report.failed()
                );
            }
            Ok(if report.all_pass() {
                Outcome::Ok
            } else {
                Outcome::ChecksFailed
            })
        }
    }
}

fn print_json(v: Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(&v).expect("serializable")
    );
}

fn parse_expr(s: &str) -> Result<DmfElement> {
    expr::parse(s).map_err(|e| anyhow!("{e}\n  {s}\n  {}^", " ".repeat(e.pos)))
}

fn qexp(series: SeriesName, n: i64, json: bool) -> Result<Outcome> {
    if n < 0 {
        bail!("N must be non-negative");
    }
    let order = n + 1;
    let s = match series {
        SeriesName::E2 => generators(order)[0].clone(),
        SeriesName::E4 => generators(order)[1].clone(),
        SeriesName::E6 => generators(order)[2].clone(),
        SeriesName::Delta => discriminant_series(order),
        SeriesName::J => j_series(order),
        SeriesName::G1 => DmfElement::g(1).to_qseries(order),
        SeriesName::G2 => DmfElement::g(2).to_qseries(order),
        SeriesName::G3 => DmfElement::g(3).to_qseries(order),
    };
    if json {
        print_json(
            json!({ "schema_version": SCHEMA_VERSION, "command": "qexp", "series": s.to_json() }),
        );
    } else {
        println!("{}", s.render_upto(n));
    }
    Ok(Outcome::Ok)
}

fn grade_json(f: &DmfElement) -> Value {
    match f.grade() {
        Ok((m, n)) => json!({ "weight": m, "depth": n }),
        Err(_) => Value::Null,
    }
}

fn diff(src: &str, associated: bool, json: bool) -> Result<Outcome> {
    let f = parse_expr(src)?;
    let d = f.diff_op();
    let assoc = if associated {
        f.grade()?;
        Some(f.associated_functions())
    } else {
        None
    };
    if json {
        print_json(json!({
            "schema_version": SCHEMA_VERSION,
            "command": "diff",
            "input": f.to_json(),
            "result": d.to_json(),
            "result_text": d.to_string(),
            "grade": grade_json(&d),
            "associated": assoc.as_ref().map(|a| a.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
        }));
    } else {
        println!("{d}");
        if let Some(a) = assoc {
            for (i, x) in a.iter().enumerate() {
                println!("f_{i} = {x}");
            }
        }
    }
    Ok(Outcome::Ok)
}

fn hecke_cmd(src: &str, p: u64, compose: Option<u64>, order: i64, json: bool) -> Result<Outcome> {
    if p == 0 {
        bail!("p must be positive");
    }
    let f = parse_expr(src)?;
    let t = hecke(&f, p)?;
    let report = match compose {
        Some(q) => Some(hecke_composition_check(p, q, &f, order)?),
        None => None,
    };
    if json {
        print_json(json!({
            "schema_version": SCHEMA_VERSION,
            "command": "hecke",
            "p": p,
            "input": f.to_json(),
            "result": t.to_json(),
            "result_text": t.to_string(),
            "composition": report.as_ref().map(|r| json!({
                "q": r.q,
                "order": r.order,
                "law_m_minus_n_minus_1": r.stated_law_holds,
                "law_m_minus_2n_minus_1": r.corrected_law_holds,
                "summary": r.summary(),
            })),
        }));
    } else {
        println!("{t}");
        if let Some(r) = &report {
            println!("{}", r.summary());
        }
    }
    Ok(Outcome::Ok)
}

fn gm(cmd: GmCmd, json: bool) -> Result<Outcome> {
    match cmd {
        GmCmd::Print { basis } => {
            let m = matrices(basis);
            if json {
                print_json(
                    json!({ "schema_version": SCHEMA_VERSION, "command": "gm print", "connection": m.to_json() }),
                );
            } else {
                println!("basis: {basis}");
                println!("Delta = {}", m.discriminant);
                for (i, a) in m.a.iter().enumerate() {
                    println!("A{i}:");
                    for r in 0..2 {
                        println!("  [{}, {}]", a.entry(r, 0), a.entry(r, 1));
                    }
                }
            }
            Ok(Outcome::Ok)
        }
        GmCmd::Verify => {
            let checks: Vec<_> = [
                verify_det_identities(),
                verify_basis_change(),
                verify_ra_discriminant(),
            ]
            .into_iter()
            .flat_map(|r| r.checks)
            .collect();
            let ok = checks.iter().all(|c| c.holds);
            if json {
                print_json(
                    json!({ "schema_version": SCHEMA_VERSION, "command": "gm verify", "all_hold": ok, "checks": checks }),
                );
            } else {
                for c in &checks {
                    println!("{} {}", if c.holds { "PASS" } else { "FAIL" }, c.name);
                }
            }
            Ok(if ok {
                Outcome::Ok
            } else {
                Outcome::ChecksFailed
            })
        }
        GmCmd::Transport { path, basis } => {
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading {}", path.display()))?;
            let waypoints = parse_waypoints(&text)?;
            let first = waypoints[0];
            if (first[0] - 1.0).norm() > 0.0 {
                bail!("the first waypoint must have t0 = 1 so that its periods can be computed");
            }
            let pm0 = period_matrix(&CurvePoint::new(first[1], first[2], first[3]))?;
            let opts = TransportOptions {
                basis,
                ..TransportOptions::default()
            };
            let r = picard_fuchs_transport(&pm0, &waypoints, &opts)?;
            if json {
                print_json(json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": "gm transport",
                    "start": pm0.x.map(fmt_complex),
                    "end": r.pm.x.map(fmt_complex),
                    "det": fmt_complex(r.pm.det()),
                    "min_abs_delta": r.min_abs_delta,
                    "steps": r.stats.accepted,
                    "rejected": r.stats.rejected,
                }));
            } else {
                print_matrix("start", &pm0);
                print_matrix("end", &r.pm);
                println!("det = {}", fmt_complex(r.pm.det()));
                println!("min |Delta| = {:e}", r.min_abs_delta);
                println!(
                    "steps = {} accepted, {} rejected",
                    r.stats.accepted, r.stats.rejected
                );
            }
            Ok(Outcome::Ok)
        }
    }
}

fn json_complex(v: &Value) -> Result<Complex64> {
    match v {
        Value::Number(n) => Ok(Complex64::new(
            n.as_f64().ok_or_else(|| anyhow!("bad number"))?,
            0.0,
        )),
        Value::String(s) => parse_complex(s).map_err(|e| anyhow!(e)),
        Value::Array(a) if a.len() == 2 => {
            let f = |x: &Value| {
                x.as_f64()
                    .ok_or_else(|| anyhow!("expected [re, im], got {v}"))
            };
            Ok(Complex64::new(f(&a[0])?, f(&a[1])?))
        }
        _ => bail!("expected a number, \"a+bi\" or [re, im], got {v}"),
    }
}

fn parse_waypoints(text: &str) -> Result<Vec<[Complex64; 4]>> {
    let v: Value = serde_json::from_str(text).context("path file is not JSON")?;
    let list = v
        .as_array()
        .ok_or_else(|| anyhow!("path must be a JSON list of waypoints"))?;
    if list.is_empty() {
        bail!("path has no waypoints");
    }
    list.iter()
        .enumerate()
        .map(|(i, w)| {
            let a = w
                .as_array()
                .filter(|a| a.len() == 4)
                .ok_or_else(|| anyhow!("waypoint {i} must have 4 entries"))?;
            Ok([
                json_complex(&a[0])?,
                json_complex(&a[1])?,
                json_complex(&a[2])?,
                json_complex(&a[3])?,
            ])
        })
        .collect()
}

fn parse_triple(s: &str) -> Result<[Complex64; 3]> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        bail!("expected t1,t2,t3, got {s:?}");
    }
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = parse_complex(p).map_err(|e| anyhow!(e))?;
    }
    Ok(out)
}

fn print_matrix(label: &str, pm: &PeriodMatrix) {
    println!("{label}:");
    println!("  x1 = {}", fmt_complex(pm.x[0]));
    println!("  x2 = {}", fmt_complex(pm.x[1]));
    println!("  x3 = {}", fmt_complex(pm.x[2]));
    println!("  x4 = {}", fmt_complex(pm.x[3]));
}

fn periods(t1: &str, t2: &str, t3: &str, hp: bool, json: bool) -> Result<Outcome> {
    let p = |s: &str| parse_complex(s).map_err(|e| anyhow!(e));
    let t = CurvePoint::new(p(t1)?, p(t2)?, p(t3)?);
    let pm = if hp {
        let x = period_matrix_generic::<Hp>(t.to_array().map(from_c64))?;
        PeriodMatrix { x: x.map(to_c64) }
    } else {
        period_matrix(&t)?
    };
    let b = pm.b_values();
    let ratio: Complex<f64> = pm.x[1] / pm.x[0];
    let (tau_red, a) = reduce_tau(pm.tau());
    if json {
        print_json(json!({
            "schema_version": SCHEMA_VERSION,
            "command": "periods",
            "precision": if hp { "high-precision" } else { "double" },
            "t": [fmt_complex(t.t1), fmt_complex(t.t2), fmt_complex(t.t3)],
            "x": pm.x.map(fmt_complex),
            "det": fmt_complex(pm.det()),
            "b1": b.b1,
            "b2": b.b2,
            "b3": fmt_complex(b.b3),
            "second_kind_ratio": fmt_complex(ratio),
            "tau": fmt_complex(pm.tau()),
            "reduced_tau": fmt_complex(tau_red),
            "reduction": a.0,
        }));
    } else {
        print_matrix("period matrix", &pm);
        println!("det = {}", fmt_complex(pm.det()));
        println!("B1 = {}", b.b1);
        println!("B2 = {}", b.b2);
        println!("B3 = {}", fmt_complex(b.b3));
        println!("I(t) = x2/x1 = {}", fmt_complex(ratio));
        println!("tau = {}", fmt_complex(pm.tau()));
        println!("reduced tau = {} via {:?}", fmt_complex(tau_red), a.0);
    }
    Ok(Outcome::Ok)
}

/// CSV columns, in order.
pub const FLOW_COLUMNS: [&str; 11] = [
    "s",
    "t1_re",
    "t1_im",
    "t2_re",
    "t2_im",
    "t3_re",
    "t3_im",
    "abs_delta",
    "b2",
    "abs_b3",
    "dist_to_sing",
];

fn write_flow_csv<W: Write>(tr: &FlowTrajectory, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(FLOW_COLUMNS)?;
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for s in &tr.samples {
        out.write_record([
            s.s.to_string(),
            s.t[0].re.to_string(),
            s.t[0].im.to_string(),
            s.t[1].re.to_string(),
            s.t[1].im.to_string(),
            s.t[2].re.to_string(),
            s.t[2].im.to_string(),
            s.delta.norm().to_string(),
            opt(s.b2),
            opt(s.b3_abs),
            s.dist_to_sing.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

fn flow_output(tr: &FlowTrajectory, csv_path: Option<PathBuf>, format: Format) -> Result<Outcome> {
    if let Some(path) = &csv_path {
        let f =
            std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_flow_csv(tr, f)?;
    }
    match format {
        Format::Csv if csv_path.is_none() => write_flow_csv(tr, std::io::stdout().lock())?,
        Format::Json => print_json(json!({
            "schema_version": SCHEMA_VERSION,
            "command": "flow",
            "columns": FLOW_COLUMNS,
            "samples": tr.samples,
            "steps": tr.stats.accepted,
            "rejected": tr.stats.rejected,
        })),
        _ => {
            println!(
                "{:>10} {:>24} {:>24} {:>24} {:>12} {:>12} {:>12}",
                "s", "t1", "t2", "t3", "|Delta|", "B2", "|B3|"
            );
            for s in &tr.samples {
                let o =
                    |x: Option<f64>| x.map(|v| format!("{v:.6e}")).unwrap_or_else(|| "-".into());
                println!(
                    "{:>10.4} {:>24} {:>24} {:>24} {:>12.5e} {:>12} {:>12}",
                    s.s,
                    short(s.t[0]),
                    short(s.t[1]),
                    short(s.t[2]),
                    s.delta.norm(),
                    o(s.b2),
                    o(s.b3_abs)
                );
                if let Some((m, n)) = s.k_flag {
                    println!("{:>10} near K: {m} x2 + {n} x4 ~ 0", "");
                }
            }
        }
    }
    Ok(Outcome::Ok)
}

fn short(z: Complex64) -> String {
    format!("{:.6}{:+.6}i", z.re, z.im)
}
