//! `genramsey`: command-line front end for the generalized Ramsey engine.
//!
//! Exit codes: 0 success, 1 spec or parameter error, 2 no candidate within
//! the horizon, 3 capacity exceeded, 4 sieve bound too small, 5 self-test or
//! internal consistency failure.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use genramsey::engine::{
    classical_instance, ramsey_number, EngineConfig, EngineError, InjectionPolicy, RamseyBase, RamseySymbol,
    SearchReport,
};
use genramsey::field::FieldSpec;
use genramsey::indicator::{
    build_indicator, evaluate, expand_reduced, ideal_membership, Coloring, IndicatorError, DEFAULT_MAX_POINTS,
    DEFAULT_TERM_CAPACITY,
};
use genramsey::primes::{
    ap_ramsey, greentao_ramsey, polignac_ramsey, twin_prime_ramsey, zhang_ramsey_scan, PolignacMode, PrimeError,
    PrimeReport, PrimeTable, ZhangRow, DEFAULT_SIEVE_BOUND,
};
use genramsey::selftest::{run_selftest, SelftestOptions};
use genramsey::spec::{check_instance_heredity, parse_coloring, parse_indicator_spec, parse_instance, SpecError};

#[derive(Parser, Debug)]
#[command(name = "genramsey", version, about = "Generalized Ramsey numbers over graph families")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Worker threads for coloring scans.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    workers: u64,
    /// Largest number of colorings a single arrows check may scan.
    #[arg(long, global = true, env = "RAMSEY_CAPACITY", default_value_t = DEFAULT_MAX_POINTS as u64,
          value_parser = clap::value_parser!(u64).range(1..))]
    capacity: u64,
    /// Largest q^|E| accepted when expanding an indicator.
    #[arg(long, global = true, env = "RAMSEY_TERM_CAPACITY", default_value_t = DEFAULT_TERM_CAPACITY as u64,
          value_parser = clap::value_parser!(u64).range(1..))]
    term_capacity: u64,
    /// Upper bound of the prime sieve.
    #[arg(long, global = true, env = "RAMSEY_SIEVE_BOUND", default_value_t = DEFAULT_SIEVE_BOUND,
          value_parser = clap::value_parser!(u64).range(2..))]
    sieve_bound: u64,
    /// Counterexample colorings reported per index where arrows fails.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    witnesses: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classical R(z_1, ..., z_m) over the complete family.
    Classical {
        #[arg(required = true, value_parser = clap::value_parser!(u64).range(1..))]
        z: Vec<u64>,
        #[arg(long, default_value_t = 8)]
        horizon: usize,
    },
    /// Generalized number of the instance in a JSON spec file.
    General {
        spec: PathBuf,
        /// Overrides the horizon given in the spec (default 8).
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Indicator polynomial operations on an indicator spec file.
    Indicator {
        #[command(subcommand)]
        op: IndicatorOp,
    },
    /// Prime-window encodings.
    Primes {
        #[command(subcommand)]
        op: PrimesOp,
    },
    /// Runs the built-in invariant suites.
    Selftest {
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Subcommand, Debug)]
enum IndicatorOp {
    /// Value at one coloring (comma-separated codes or a JSON array of elements).
    Eval {
        spec: PathBuf,
        #[arg(long)]
        coloring: String,
    },
    /// Reduced form modulo the field equations.
    Expand { spec: PathBuf },
    /// Membership in the ideal of the field equations.
    Member { spec: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    ShortCircuit,
    Exhaustive,
    Both,
}

#[derive(Subcommand, Debug)]
enum PrimesOp {
    Twin {
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 10)]
        horizon: usize,
    },
    Ap {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        k: u64,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 12)]
        horizon: usize,
    },
    Polignac {
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 8)]
        horizon: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::ShortCircuit)]
        mode: ModeArg,
    },
    Greentao {
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 12)]
        horizon: usize,
    },
    ZhangScan {
        #[arg(long, default_value_t = 10)]
        m_max: usize,
        #[arg(long, default_value_t = 3)]
        t_max: usize,
        #[arg(long, default_value_t = 50)]
        horizon: usize,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl From<SpecError> for Failure {
    fn from(e: SpecError) -> Self {
        Failure::new(1, format!("spec error at {}: {}", e.path, e.message))
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let code = match &e {
            EngineError::CapacityExceeded { .. } | EngineError::Indicator(IndicatorError::CapacityExceeded { .. }) => 3,
            EngineError::BackendDisagreement { .. } | EngineError::Indicator(IndicatorError::Inconsistent(_)) => 5,
            _ => 1,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<IndicatorError> for Failure {
    fn from(e: IndicatorError) -> Self {
        EngineError::from(e).into()
    }
}

impl From<PrimeError> for Failure {
    fn from(e: PrimeError) -> Self {
        match e {
            PrimeError::SieveTooSmall { .. } => Failure::new(4, e.to_string()),
            PrimeError::Engine(inner) => inner.into(),
            PrimeError::InvalidParameter(_) => Failure::new(1, e.to_string()),
        }
    }
}

/// What a command produced: JSON, its table view, and the exit code.
struct Output {
    json: Value,
    table: String,
    code: u8,
}

fn engine_config(g: &Global) -> EngineConfig {
    EngineConfig {
        max_points: g.capacity as u128,
        workers: g.workers as usize,
        witness_limit: g.witnesses as usize,
        ..Default::default()
    }
}

fn report_table(r: &SearchReport) -> String {
    let mut s = String::new();
    let c = &r.classification;
    let _ = writeln!(s, "family        {} ({})", r.convention.family, r.convention.index_rule);
    let _ = writeln!(
        s,
        "classification finite_type={} maximal={} uniform={} exact={} galois_type={} hereditary={}",
        c.finite_type, c.maximal, c.uniform, c.exact, c.galois_type, c.family_hereditary
    );
    let _ = writeln!(s, "{:>6}  {:<6}  {:<18}  points", "index", "arrows", "source");
    for e in &r.arrows_trace {
        let _ = writeln!(s, "{:>6}  {:<6}  {:<18}  {}", e.index, e.arrows, e.source, e.points);
    }
    let cand = r.candidate_value.map_or("none within horizon".to_string(), |v| v.to_string());
    let _ = writeln!(s, "candidate     {cand}");
    let _ = writeln!(s, "soundness     {}", json!(r.soundness).as_str().unwrap_or_default());
    for w in &r.witnesses {
        let _ = writeln!(s, "witness       index {}: [{}]", w.index, w.coloring.join(","));
    }
    s
}

fn search_output(report: SearchReport) -> Output {
    let code = if report.candidate_value.is_some() { 0 } else { 2 };
    Output { table: report_table(&report), json: serde_json::to_value(&report).expect("serializable"), code }
}

fn run_instance(
    base: &RamseyBase,
    symbol: &RamseySymbol,
    field: Option<FieldSpec>,
    horizon: usize,
    g: &Global,
) -> Result<Output, Failure> {
    let mut config = engine_config(g);
    if let Some(f) = field {
        config.injection = InjectionPolicy::CanonicalIn(f);
    }
    Ok(search_output(ramsey_number(base, symbol, horizon, &config)?))
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::new(1, format!("cannot read {}: {e}", path.display())))
}

fn prime_table(g: &Global) -> PrimeTable {
    PrimeTable::sieve(g.sieve_bound)
}

fn prime_output(r: PrimeReport) -> Output {
    let primes = r.realizing_primes.as_ref().map_or("-".to_string(), |p| format!("{p:?}"));
    let table = format!(
        "{:<9} {:>3} {:>4} {:>3} {:>9}  {:<20} oracle_agreement\n{:<9} {:>3} {:>4} {:>3} {:>9}  {:<20} {}\n",
        "problem",
        "t",
        "k",
        "m",
        "candidate",
        "primes",
        r.problem,
        r.t,
        r.k.map_or("-".into(), |k| k.to_string()),
        r.m,
        r.candidate_index.map_or("-".into(), |c| c.to_string()),
        primes,
        r.oracle_agreement
    );
    let code = if r.candidate_index.is_some() { 0 } else { 2 };
    Output { json: serde_json::to_value(&r).expect("serializable"), table, code }
}

fn zhang_output(rows: Vec<ZhangRow>) -> Output {
    let mut table = format!("{:>3} {:>4}  found_for_all_m  candidates\n", "t", "gap");
    for r in &rows {
        let cands: Vec<String> =
            r.entries.iter().map(|e| e.candidate_index.map_or("-".into(), |c| c.to_string())).collect();
        let _ = writeln!(table, "{:>3} {:>4}  {:<15}  {}", r.t, r.gap, r.found_for_all_m, cands.join(" "));
    }
    Output { json: json!({ "rows": rows }), table, code: 0 }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let g = &cli.global;
    match &cli.command {
        Command::Classical { z, horizon } => {
            let z: Vec<usize> = z.iter().map(|&v| v as usize).collect();
            let (base, symbol) = classical_instance(&z)?;
            run_instance(&base, &symbol, None, *horizon, g)
        }
        Command::General { spec, horizon } => {
            let inst = parse_instance(&read(spec)?)?;
            let horizon = horizon.or(inst.horizon).unwrap_or(8);
            check_instance_heredity(&inst, horizon)?;
            run_instance(&inst.base, &inst.symbol, inst.field.clone(), horizon, g)
        }
        Command::Indicator { op } => {
            let path = match op {
                IndicatorOp::Eval { spec, .. } | IndicatorOp::Expand { spec } | IndicatorOp::Member { spec } => spec,
            };
            let spec = parse_indicator_spec(&read(path)?)?;
            let f = &spec.field;
            let expr = build_indicator(&spec.host, &spec.targets, f)?;
            match op {
                IndicatorOp::Eval { coloring, .. } => {
                    let rho = parse_coloring(coloring, f)?;
                    let v = evaluate(&expr, &Coloring(rho))?;
                    Ok(Output {
                        json: json!({ "value": f.coefficients(v), "display": f.format(v), "vanishes": v.is_zero() }),
                        table: format!("{}\n", f.format(v)),
                        code: 0,
                    })
                }
                IndicatorOp::Expand { .. } => {
                    let p = expand_reduced(&expr, g.term_capacity as u128)?;
                    let mut table = String::new();
                    for (exps, c) in p.terms() {
                        let _ = writeln!(table, "{:>10}  {exps:?}", f.format(*c));
                    }
                    if p.is_zero() {
                        table.push_str("0\n");
                    }
                    Ok(Output {
                        json: json!({
                            "field": genramsey::field::FieldSpecJson::from(f),
                            "variables": p.variables(),
                            "terms": p.to_json(),
                        }),
                        table,
                        code: 0,
                    })
                }
                IndicatorOp::Member { .. } => {
                    let m = ideal_membership(&expr, g.term_capacity as u128, g.capacity as u128, g.workers as usize)?;
                    Ok(Output {
                        table: format!("{} (route: {})\n", m.member, m.route()),
                        json: json!({
                            "member": m.member,
                            "route": m.route(),
                            "by_reduction": m.by_reduction,
                            "by_evaluation": m.by_evaluation,
                        }),
                        code: 0,
                    })
                }
            }
        }
        Command::Primes { op } => {
            let config = engine_config(g);
            let table = prime_table(g);
            match op {
                PrimesOp::Twin { m, horizon } => Ok(prime_output(twin_prime_ramsey(*m, *horizon, &table, &config)?)),
                PrimesOp::Ap { t, k, m, horizon } => Ok(prime_output(ap_ramsey(*t, *k, *m, *horizon, &table, &config)?)),
                PrimesOp::Greentao { t, horizon } => Ok(prime_output(greentao_ramsey(*t, *horizon, &table, &config)?)),
                PrimesOp::Polignac { t, m, horizon, mode } => {
                    let mode = match mode {
                        ModeArg::ShortCircuit => PolignacMode::ShortCircuit,
                        ModeArg::Exhaustive => PolignacMode::Exhaustive,
                        ModeArg::Both => PolignacMode::Both,
                    };
                    let r = polignac_ramsey(*t, *m, *horizon, mode, &table, &config)?;
                    let table = format!(
                        "t={} gap={} m={} candidate={} primes={} oracle_agreement={} modes_agree={}\n",
                        r.t,
                        r.gap,
                        r.m,
                        r.candidate_index.map_or("-".into(), |c| c.to_string()),
                        r.realizing_primes.as_ref().map_or("-".into(), |p| format!("{p:?}")),
                        r.oracle_agreement,
                        r.modes_agree.map_or("-".into(), |a| a.to_string()),
                    );
                    let code = if r.candidate_index.is_some() { 0 } else { 2 };
                    Ok(Output { json: serde_json::to_value(&r).expect("serializable"), table, code })
                }
                PrimesOp::ZhangScan { m_max, t_max, horizon } => {
                    Ok(zhang_output(zhang_ramsey_scan(*m_max, *t_max, *horizon, &table, &config)?))
                }
            }
        }
        Command::Selftest { seed, inject_fault } => {
            let opts = SelftestOptions { workers: g.workers.max(2) as usize, seed: *seed, corrupt_field: *inject_fault };
            let results = run_selftest(&opts);
            let mut table = String::new();
            for r in &results {
                let _ = writeln!(table, "[{}] {} ({} checks)", if r.passed { "PASS" } else { "FAIL" }, r.name, r.checks);
                if let Some(f) = &r.failure {
                    let _ = writeln!(table, "       reproducer: {f}");
                }
            }
            let passed = results.iter().all(|r| r.passed);
            if !passed {
                for r in results.iter().filter(|r| !r.passed) {
                    eprintln!("selftest failure in {}: {}", r.name, r.failure.as_deref().unwrap_or(""));
                }
            }
            Ok(Output { json: json!({ "passed": passed, "suites": results }), table, code: if passed { 0 } else { 5 } })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            match cli.global.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable")),
                Format::Table => print!("{}", out.table),
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
