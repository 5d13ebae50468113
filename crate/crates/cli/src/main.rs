//! Command-line frontend: simulate / verify / classify / scan / reduce with
//! stable, scriptable output formats.
//!
//! Exit codes: 0 success (verify: all checks pass or carry documented
//! notes), 1 verification failure, 2 usage error, 3 numeric failure
//! (collision, step underflow, singular reduction point).

mod parse;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

use aristotle_core::integrator::{
    drift_report, integrate, IntegrationConfig, ModelKind, Termination,
};
use aristotle_core::reduction::{characteristic_slope, reduced_potential, reduced_rhs, to_plane};
use aristotle_core::roots::{
    classify, cubic_roots, discriminant, lambda_of, real_root_count_from_delta,
};
use aristotle_core::verify::{run_verify, Suite, VerifyConfig};
use parse::{parse_couplings, parse_range, parse_state};

const CSV_HEADER: &str = "t,u_re,u_im,v_re,v_im,w_re,w_im,h1_re,h1_im,h2_re,h2_im,hfund_dirres";
const SCAN_HEADER: &str = "p,q,delta,n_real_roots,min_root_gap,lambda_re,lambda_im";

#[derive(Parser)]
#[command(
    name = "aristotle",
    about = "Simulate, classify, and numerically audit a first-order complex three-body model",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Physical,
    Auxiliary,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one model and write the trajectory.
    Simulate(SimulateArgs),
    /// Run a verification suite and report one line per audited identity.
    Verify(VerifyArgs),
    /// Classify couplings and print the derived root profile.
    Classify(ClassifyArgs),
    /// Scan the (p, q) parameter plane and write a CSV grid.
    Scan(ScanArgs),
    /// Print the plane coordinates and reduced flow at one state.
    Reduce(ReduceArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Couplings "a,b,c".
    #[arg(long, allow_hyphen_values = true)]
    couplings: String,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    omega: f64,
    /// Initial state "u,v,w" (complex literals like 1.25-0.5i).
    #[arg(long, allow_hyphen_values = true)]
    initial: String,
    #[arg(long, allow_negative_numbers = true)]
    t0: f64,
    #[arg(long, allow_negative_numbers = true)]
    t1: f64,
    #[arg(long, default_value_t = 1e-10)]
    rtol: f64,
    #[arg(long, default_value_t = 1e-12)]
    atol: f64,
    /// Starting complexified time (auxiliary model).
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    tau0: String,
    /// Unit complex direction of the tau line (auxiliary model).
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    direction: String,
    #[arg(long)]
    max_step: Option<f64>,
    #[arg(long)]
    initial_step: Option<f64>,
    #[arg(long, default_value_t = 1e-8)]
    sep_floor: f64,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value = "1,1,1", allow_hyphen_values = true)]
    couplings: String,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    omega: f64,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Half-width of the real sampling box.
    #[arg(long = "box", default_value_t = 5.0)]
    box_radius: f64,
    /// Emit the full report as JSON.
    #[arg(long)]
    json: bool,
    /// Fail (exit 1) on any identity that does not hold as stated, even
    /// when the failure is documented.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long, allow_hyphen_values = true)]
    couplings: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ScanArgs {
    /// p grid as "lo:hi:n".
    #[arg(long, allow_hyphen_values = true)]
    p_range: String,
    /// q grid as "lo:hi:n".
    #[arg(long, allow_hyphen_values = true)]
    q_range: String,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long, allow_hyphen_values = true)]
    couplings: String,
    /// State "u,v,w" (must be real for the reduced flow).
    #[arg(long, allow_hyphen_values = true)]
    state: String,
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Simulate(args) => run_simulate(args),
        Command::Verify(args) => run_verify_cmd(args),
        Command::Classify(args) => run_classify(args),
        Command::Scan(args) => run_scan(args),
        Command::Reduce(args) => run_reduce(args),
    };
    std::process::exit(code);
}

fn usage_error(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    2
}

fn fmt_f(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.17e}")
    }
}

fn fmt_c(z: aristotle_core::C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

fn run_simulate(args: SimulateArgs) -> i32 {
    let params = match parse_couplings(&args.couplings, args.omega) {
        Ok(p) => p,
        Err(e) => return usage_error(e),
    };
    let initial = match parse_state(&args.initial) {
        Ok(s) => s,
        Err(e) => return usage_error(e),
    };
    let tau0 = match parse::parse_complex(&args.tau0) {
        Ok(t) => t,
        Err(e) => return usage_error(e),
    };
    let direction = match parse::parse_complex(&args.direction) {
        Ok(d) => d,
        Err(e) => return usage_error(e),
    };
    let mut config = IntegrationConfig::new(args.t0, args.t1).with_tolerances(args.rtol, args.atol);
    config.max_step = args.max_step;
    config.initial_step = args.initial_step;
    config.tau0 = tau0;
    config.direction = direction;
    config.sep_floor = args.sep_floor;
    let model = match args.model {
        ModelArg::Physical => ModelKind::Physical,
        ModelArg::Auxiliary => ModelKind::Auxiliary,
    };

    let traj = match integrate(model, &initial, &params, &config) {
        Ok(t) => t,
        Err(e) => return usage_error(e),
    };

    let mut out = String::new();
    match args.format {
        FormatArg::Csv => {
            out.push_str(CSV_HEADER);
            out.push('\n');
            for s in &traj.samples {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    fmt_f(s.t),
                    fmt_f(s.state.u.re),
                    fmt_f(s.state.u.im),
                    fmt_f(s.state.v.re),
                    fmt_f(s.state.v.im),
                    fmt_f(s.state.w.re),
                    fmt_f(s.state.w.im),
                    fmt_f(s.h1.re),
                    fmt_f(s.h1.im),
                    fmt_f(s.h2.re),
                    fmt_f(s.h2.im),
                    fmt_f(s.fund_dirres),
                ));
            }
        }
        FormatArg::Json => {
            let samples: Vec<serde_json::Value> = traj
                .samples
                .iter()
                .map(|s| {
                    serde_json::json!({
                        "t": s.t,
                        "u_re": s.state.u.re, "u_im": s.state.u.im,
                        "v_re": s.state.v.re, "v_im": s.state.v.im,
                        "w_re": s.state.w.re, "w_im": s.state.w.im,
                        "h1_re": s.h1.re, "h1_im": s.h1.im,
                        "h2_re": s.h2.re, "h2_im": s.h2.im,
                        "hfund_dirres": if s.fund_dirres.is_nan() {
                            serde_json::Value::Null
                        } else {
                            serde_json::json!(s.fund_dirres)
                        },
                    })
                })
                .collect();
            let doc = serde_json::json!({
                "meta": {
                    "schema_version": 1,
                    "model": traj.model,
                    "couplings": params,
                    "t0": args.t0,
                    "t1": args.t1,
                    "rtol": args.rtol,
                    "atol": args.atol,
                    "sep_floor": args.sep_floor,
                    "accepted": traj.accepted,
                    "rejected": traj.rejected,
                },
                "samples": samples,
                "termination": traj.termination,
            });
            out = serde_json::to_string_pretty(&doc).expect("serializable") + "\n";
        }
    }
    if let Err(e) = std::fs::write(&args.output, out) {
        return usage_error(format!("cannot write {}: {e}", args.output.display()));
    }

    if let Ok(report) = drift_report(&traj, &params) {
        eprintln!(
            "{} samples, {} accepted / {} rejected steps, termination: {}",
            report.samples, traj.accepted, traj.rejected, traj.termination
        );
    }
    match traj.termination {
        Termination::Completed => 0,
        Termination::Collision | Termination::StepUnderflow => 3,
    }
}

fn run_verify_cmd(args: VerifyArgs) -> i32 {
    let suite: Suite = match args.suite.parse() {
        Ok(s) => s,
        Err(e) => return usage_error(e),
    };
    let params = match parse_couplings(&args.couplings, args.omega) {
        Ok(p) => p,
        Err(e) => return usage_error(e),
    };
    let cfg = VerifyConfig {
        suite,
        samples: args.samples,
        seed: args.seed,
        box_radius: args.box_radius,
    };
    let report = run_verify(&params, &cfg);

    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("serializable")
        );
    } else {
        for c in &report.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            let mut line = format!(
                "{status}  {:36} samples={:<4} residual={:9.3e} scale={:9.3e} tol={:7.1e}",
                c.name, c.samples, c.max_residual, c.scale, c.tol
            );
            if let Some(k) = c.calibration {
                line.push_str(&format!(" k={k:.12}"));
            }
            println!("{line}");
            if let Some(note) = &c.note {
                println!("      note: {note}");
            }
        }
        let passed = report.checks.iter().filter(|c| c.pass).count();
        let noted = report
            .checks
            .iter()
            .filter(|c| !c.pass && c.note.is_some())
            .count();
        println!(
            "{} checks: {} passed, {} failed as documented, {} failed",
            report.checks.len(),
            passed,
            noted,
            report.checks.len() - passed - noted
        );
    }

    let ok = if args.strict {
        report.all_pass
    } else {
        report.all_acceptable
    };
    if ok {
        0
    } else {
        1
    }
}

fn run_classify(args: ClassifyArgs) -> i32 {
    let params = match parse_couplings(&args.couplings, 1.0) {
        Ok(p) => p,
        Err(e) => return usage_error(e),
    };
    let profile = classify(&params);
    if args.json {
        let doc = serde_json::json!({
            "schema_version": 1,
            "couplings": params,
            "profile": profile,
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("serializable")
        );
        return 0;
    }
    println!("case: {}", profile.case_label);
    if let (Some(p), Some(q)) = (profile.p, profile.q) {
        println!("p: {p}");
        println!("q: {q}");
    }
    if let Some(lam) = profile.lambda {
        println!("lambda: {}", fmt_c(lam));
    }
    if let Some(theta) = profile.theta {
        let fmt: Vec<String> = theta.iter().map(|t| fmt_c(*t)).collect();
        println!("theta roots: {}", fmt.join(", "));
    }
    if let Some(nr) = profile.num_roots {
        let fmt: Vec<String> = nr.iter().map(|t| fmt_c(*t)).collect();
        println!("numerator roots: {}", fmt.join(", "));
    }
    if let Some(delta) = profile.delta {
        println!("delta: {delta}");
    }
    if let Some(res) = profile.root_residual {
        println!("root residual: {res:.3e}");
    }
    if let Some(mu) = profile.mu {
        println!("mu: {mu}");
    }
    if let Some(k) = profile.k {
        println!("k: {k}");
    }
    if profile.degenerate {
        println!("degenerate roots: yes");
    }
    for hit in &profile.locus_hits {
        println!("special locus: {hit}");
    }
    if let Some(note) = &profile.note {
        println!("note: {note}");
    }
    0
}

fn run_scan(args: ScanArgs) -> i32 {
    let ps = match parse_range(&args.p_range) {
        Ok(r) => r,
        Err(e) => return usage_error(e),
    };
    let qs = match parse_range(&args.q_range) {
        Ok(r) => r,
        Err(e) => return usage_error(e),
    };
    let mut out = String::with_capacity(64 * ps.len() * qs.len());
    out.push_str(SCAN_HEADER);
    out.push('\n');
    for &p in &ps {
        for &q in &qs {
            let delta = discriminant(p, q);
            let roots = cubic_roots(p, q);
            let lam = lambda_of(p, q);
            let mut gap = f64::INFINITY;
            for i in 0..3 {
                for j in (i + 1)..3 {
                    gap = gap.min((roots.shifted[i] - roots.shifted[j]).norm());
                }
            }
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                fmt_f(p),
                fmt_f(q),
                fmt_f(delta),
                real_root_count_from_delta(delta),
                fmt_f(gap),
                fmt_f(lam.re),
                fmt_f(lam.im),
            ));
        }
    }
    if let Err(e) = std::fs::write(&args.output, out) {
        return usage_error(format!("cannot write {}: {e}", args.output.display()));
    }
    0
}

fn run_reduce(args: ReduceArgs) -> i32 {
    let params = match parse_couplings(&args.couplings, 1.0) {
        Ok(p) => p,
        Err(e) => return usage_error(e),
    };
    let state = match parse_state(&args.state) {
        Ok(s) => s,
        Err(e) => return usage_error(e),
    };
    if !state.is_real(1e-12) {
        return usage_error("reduce requires a real state");
    }
    let plane = to_plane(&state);
    let (zeta, eta, xi) = plane
        .try_real(1e-12)
        .expect("real state maps to real plane");
    println!("zeta: {zeta}");
    println!("eta: {eta}");
    println!("xi: {xi}");
    match reduced_rhs(eta, xi, &params) {
        Ok((ed, xd)) => {
            println!("eta_dot: {ed}");
            println!("xi_dot: {xd}");
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 3;
        }
    }
    match characteristic_slope(eta, xi, &params) {
        Ok(slope) => println!("slope: {slope}"),
        Err(_) => println!("slope: vertical"),
    }
    match reduced_potential(eta, xi, &params) {
        Ok(f) => println!("reduced potential: {f}"),
        Err(_) => println!("reduced potential: undefined (log arguments not all positive)"),
    }
    0
}
