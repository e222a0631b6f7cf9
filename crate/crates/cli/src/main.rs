use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fastslow_core::config::{load_scan, load_system};
use fastslow_core::diophantine::{
    build_resonance_model, dirichlet_capped, dirichlet_sequence, ResonanceOptions, DEFAULT_ALPHA_CONSTANT,
    DEFAULT_SCAN_LIMIT,
};
use fastslow_core::harness::{
    run_certification, run_drift_scan, sample_initial_state, scan_report, write_records_csv, CertifyConfig,
    RecordStatus,
};
use fastslow_core::integrator::{integrate, max_drift, write_csv, IntegratorConfig, RunStatus, Scheme};
use fastslow_core::normal_form::normalize;
use fastslow_core::QuadSurd;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "fastslow", version, about = "Energy exchange between fast oscillators and a slow system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one trajectory and write its energy series.
    Simulate(SimulateArgs),
    /// Drift scan over an epsilon grid and frequency families.
    Scan(ScanArgs),
    /// Resonant normal form of a system file.
    Normalize(NormalizeArgs),
    /// Simultaneous rational approximations of frequency ratios.
    Dirichlet(DirichletArgs),
    /// Normal form plus the drift budget at a given epsilon.
    Certify(CertifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Strang,
    Leapfrog,
}

#[derive(Args)]
struct SimulateArgs {
    system: PathBuf,
    /// Overrides the file's epsilon.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Defaults to epsilon^-2.
    #[arg(long)]
    horizon: Option<f64>,
    /// Defaults to 2 pi epsilon / 40.
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, value_enum, default_value = "strang")]
    scheme: SchemeArg,
    #[arg(long, default_value_t = 1)]
    stride: u64,
    /// CSV output; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Fail when the relative fast-energy drift exceeds this.
    #[arg(long)]
    max_drift: Option<f64>,
}

#[derive(Args)]
struct ScanArgs {
    config: PathBuf,
    /// Overrides the config's output path.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct NormalizeArgs {
    system: PathBuf,
    #[arg(long, short = 'N', default_value_t = 2)]
    order: usize,
    #[arg(long, short, default_value_t = 0.1)]
    budget: f64,
    /// Serialized transformed Hamiltonian and generators.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DirichletArgs {
    /// Ratios such as `sqrt(2)` or `3/2`.
    #[arg(required = true, num_args = 1..)]
    ratios: Vec<String>,
    /// Capped approximation with denominator at most this.
    #[arg(long, conflicts_with = "count")]
    cap: Option<u64>,
    /// Number of successive uncapped solutions.
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SCAN_LIMIT)]
    scan_limit: u64,
}

#[derive(Args)]
struct CertifyArgs {
    system: PathBuf,
    #[arg(long, short = 'N', default_value_t = 2)]
    order: usize,
    #[arg(long, short, default_value_t = 0.1)]
    budget: f64,
    #[arg(long)]
    epsilon: f64,
    /// Fast energy `E`.
    #[arg(long, default_value_t = 1.0)]
    energy: f64,
    /// Bound on the slow coordinates; defaults to sqrt(2).
    #[arg(long)]
    slow_radius: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_ALPHA_CONSTANT)]
    alpha_constant: u32,
}

fn out_writer(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

fn simulate(args: SimulateArgs) -> Result<bool> {
    let system = load_system(&args.system).with_context(|| format!("reading {}", args.system.display()))?;
    let freq = system.frequencies(args.epsilon)?;
    let state0 = match system.explicit_state()? {
        Some(s) => s,
        None => {
            let init = &system.initial;
            let mut rng = ChaCha8Rng::seed_from_u64(init.seed.unwrap_or(0));
            sample_initial_state(
                &freq,
                &system.hamiltonian,
                init.fast_energy.unwrap_or(1.0),
                init.slow_energy.unwrap_or(0.5),
                &mut rng,
            )?
        }
    };
    let eps = freq.epsilon();
    let mut cfg = IntegratorConfig::new(
        args.dt.unwrap_or_else(|| IntegratorConfig::default_dt(&freq)),
        args.horizon.unwrap_or(eps.powi(-2)),
    );
    cfg.sample_stride = args.stride;
    cfg.scheme = match args.scheme {
        SchemeArg::Strang => Scheme::ExactFastStrang,
        SchemeArg::Leapfrog => Scheme::LeapfrogReference,
    };
    let traj = integrate(&state0, &freq, &system.hamiltonian, &cfg)?;
    write_csv(&traj.samples, out_writer(args.output.as_ref())?)?;
    let s = &traj.summary;
    for w in &s.warnings {
        eprintln!("warning: {w}");
    }
    let drift = max_drift(&traj.samples)?;
    eprintln!(
        "steps {} dt {:.6e} h_omega(0) {:.6e} max relative drift: fast {:.6e} total {:.6e} (sampled {:.6e})",
        s.steps,
        cfg.dt,
        s.initial_fast,
        s.relative_drift_fast(),
        s.relative_drift_total(),
        drift.relative
    );
    let mut ok = true;
    if let RunStatus::BlowUp { t, max_abs } = s.status {
        eprintln!("blow-up at t = {t:.6e} (|z| = {max_abs:.3e})");
        ok = false;
    }
    if let Some(limit) = args.max_drift {
        if s.relative_drift_fast() > limit {
            eprintln!("drift {:.6e} exceeds {limit:.6e}", s.relative_drift_fast());
            ok = false;
        }
    }
    Ok(ok)
}

fn scan(args: ScanArgs) -> Result<bool> {
    let mut cfg = load_scan(&args.config).with_context(|| format!("reading {}", args.config.display()))?;
    if args.output.is_some() {
        cfg.output = args.output;
    }
    let records = run_drift_scan(&cfg)?;
    if let Some(path) = &cfg.output {
        write_records_csv(&records, out_writer(Some(path))?)?;
    }
    print!("{}", scan_report(&cfg, &records));
    // records must finish and stay within E b (drift is relative to E)
    let bad: Vec<_> = records
        .iter()
        .filter(|r| r.status != RecordStatus::Ok || r.drift_fast > cfg.budget)
        .collect();
    for r in &bad {
        println!(
            "check failed: eps={} family={} member={} status={} drift={:.3e} budget={}",
            r.epsilon, r.family, r.member, r.status, r.drift_fast, cfg.budget
        );
    }
    Ok(bad.is_empty())
}

fn normalize_cmd(args: NormalizeArgs) -> Result<bool> {
    let system = load_system(&args.system).with_context(|| format!("reading {}", args.system.display()))?;
    let model = build_resonance_model(&system.ratios, args.order, args.budget, &ResonanceOptions::default())?;
    let result = normalize(&system.hamiltonian, &model, args.order)?;
    println!("resonance model: {model}");
    for s in &result.stages {
        println!(
            "stage {}: order {} resonant {} nonresonant {} |chi| {:.6e}",
            s.stage, s.order, s.resonant_terms, s.nonresonant_terms, s.generator_norm
        );
    }
    match result.residual_min_order {
        Some(o) => println!("residual bracket min order: {o}"),
        None => println!("residual bracket vanishes"),
    }
    println!("validity radius factor: {:.6e}", result.generator_norm_product());
    let ok = result.checks.hold();
    println!("transform checks: {}", if ok { "ok" } else { "FAILED" });
    if let Some(path) = &args.output {
        std::fs::write(path, result.to_text()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(ok)
}

fn dirichlet(args: DirichletArgs) -> Result<bool> {
    let ratios = args
        .ratios
        .iter()
        .map(|r| r.parse::<QuadSurd>().with_context(|| format!("bad ratio `{r}`")))
        .collect::<Result<Vec<_>>>()?;
    match (args.cap, args.count) {
        (Some(cap), _) => println!("{}", dirichlet_capped(&ratios, cap)?.record_line(None)),
        (None, count) => {
            for a in dirichlet_sequence(&ratios, count.unwrap_or(5), args.scan_limit)? {
                println!("{}", a.record_line(None));
            }
        }
    }
    Ok(true)
}

fn certify(args: CertifyArgs) -> Result<bool> {
    let system = load_system(&args.system).with_context(|| format!("reading {}", args.system.display()))?;
    let mut cfg = CertifyConfig::new(args.order, args.budget, args.epsilon);
    cfg.fast_energy = args.energy;
    if let Some(r) = args.slow_radius {
        cfg.slow_radius = r;
    }
    cfg.options.alpha_constant = args.alpha_constant;
    let report = run_certification(&system, &cfg)?;
    print!("{report}");
    Ok(report.holds())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Scan(a) => scan(a),
        Command::Normalize(a) => normalize_cmd(a),
        Command::Dirichlet(a) => dirichlet(a),
        Command::Certify(a) => certify(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
