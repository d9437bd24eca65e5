mod args;
mod report;

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;

use chrono::Utc;
use clap::Parser;
use num_rational::BigRational;
use serde_json::json;
use vinogradov::cache::CountCache;
use vinogradov::congruence::SCongruenceParams;
use vinogradov::context::Counter;
use vinogradov::counting::strategy::StrategyRegistry;
use vinogradov::counting::{effective_exponent, CongruenceSpec, CountQuery};
use vinogradov::exponent::{self, Q};
use vinogradov::lemmas::{parse_bound, run_sweep, LemmaRegistry, SweepConfig, SweepSummary};
use vinogradov::ENGINE_VERSION;

use args::{Cli, Command, CountCmd, Format, RecursionArgs, TrendArgs, VerifyArgs};
use report::{failure_lines, CacheSection, Report, RunManifest};

const EXIT_CHECK_FAILED: u8 = 2;
const EXIT_CONFIG: u8 = 3;
const EXIT_SCALE: u8 = 4;

#[derive(Debug)]
enum Failure {
    Check(String),
    Config(String),
    Scale(String),
    Other(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => EXIT_CHECK_FAILED,
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Scale(_) => EXIT_SCALE,
            Failure::Other(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Check(m) | Failure::Config(m) | Failure::Scale(m) | Failure::Other(m) => m,
        }
    }
}

impl From<vinogradov::Error> for Failure {
    fn from(e: vinogradov::Error) -> Self {
        use vinogradov::Error::*;
        match e {
            ScaleLimit(_) | Infeasible(_) | Overflow => Failure::Scale(e.to_string()),
            Precondition(_) | UnknownStrategy(_) | Cache(_) => Failure::Config(e.to_string()),
            Io(_) => Failure::Other(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("vmvt: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> CmdResult {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Failure::Other(e.to_string()))?;
    }
    match &cli.command {
        Command::Engines => {
            for engine in StrategyRegistry::with_defaults().iter() {
                println!("{}\t{}", engine.name(), engine.description());
            }
            Ok(())
        }
        Command::Recursion(args) => recursion(args),
        Command::Count(cmd) => count(&cli, &open_counter(&cli)?, cmd),
        Command::Verify(args) => verify(&cli, &open_counter(&cli)?, args),
        Command::Trend(args) => trend(&cli, &open_counter(&cli)?, args),
    }
}

fn open_counter(cli: &Cli) -> Result<Counter, Failure> {
    let cache = match &cli.cache {
        Some(path) => CountCache::open(path)?,
        None => CountCache::in_memory(),
    };
    Ok(Counter::with_engine(Arc::new(cache), &cli.engine)?)
}

fn bound(text: &str) -> Result<vinogradov::counting::Bound, Failure> {
    parse_bound(text).map_err(|e| Failure::Config(e.to_string()))
}

fn rational(text: &str) -> Result<Q, Failure> {
    text.trim()
        .parse::<BigRational>()
        .map_err(|_| Failure::Config(format!("`{text}` is not a rational number")))
}

fn count(cli: &Cli, counter: &Counter, cmd: &CountCmd) -> CmdResult {
    let (kind, value, extra) = match cmd {
        CountCmd::J { s, k, x } => {
            let q = CountQuery::new(*s, *k, bound(x)?);
            ("J", counter.j(&q)?, None)
        }
        CountCmd::I { s, k, x, p, a, b, m, xi, eta } => {
            let q = CountQuery::new(*s, *k, bound(x)?);
            match (xi, eta) {
                (Some(xi), Some(eta)) => {
                    let spec = CongruenceSpec { p: *p, a: *a, b: *b, xi: *xi, eta: *eta, m: *m };
                    ("I", counter.i_class_persistent(&q, &spec)?, None)
                }
                _ => {
                    let best = counter.i_max(&q, *p, *a, *b, *m)?;
                    ("I", best.count, Some((best.xi, best.eta)))
                }
            }
        }
        CountCmd::N { p, nu, a, c } => match nu {
            Some(nu) => ("N", counter.n(&SCongruenceParams::new(*p, *nu, *a, *c))?, None),
            None => ("N", counter.n_max(*p, *a, *c)?, None),
        },
    };
    match cli.format {
        Format::Csv => match extra {
            Some((xi, eta)) => println!("{value},{xi},{eta}"),
            None => println!("{value}"),
        },
        Format::Json => {
            let mut out = json!({ "kind": kind, "count": value.to_string() });
            if let Some((xi, eta)) = extra {
                out["argmax_xi"] = json!(xi);
                out["argmax_eta"] = json!(eta);
            }
            println!("{out}");
        }
    }
    Ok(())
}

fn sweep_config(args: &VerifyArgs) -> Result<SweepConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
        }
        None => SweepConfig::default(),
    };
    if let Some(l) = &args.lemmas {
        cfg.lemmas = l.clone();
    }
    if let Some(p) = &args.primes {
        cfg.primes = p.clone();
    }
    if let Some(xs) = &args.x {
        cfg.x = xs.iter().map(|x| bound(x)).collect::<Result<_, _>>()?;
    }
    if let Some(pairs) = &args.pairs {
        cfg.pairs = pairs
            .iter()
            .map(|s| {
                s.split_once(':')
                    .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                    .ok_or_else(|| Failure::Config(format!("pair `{s}` is not of the form a:b")))
            })
            .collect::<Result<_, _>>()?;
    }
    if let Some(levels) = &args.levels {
        cfg.levels = levels.clone();
    }
    Ok(cfg)
}

fn write_file(path: &Path, bytes: &[u8]) -> CmdResult {
    fs::write(path, bytes).map_err(|e| Failure::Other(format!("cannot write {}: {e}", path.display())))
}

fn verify(cli: &Cli, counter: &Counter, args: &VerifyArgs) -> CmdResult {
    let started_at = Utc::now().to_rfc3339();
    let cfg = sweep_config(args)?;
    let registry = LemmaRegistry::with_defaults();
    let outcomes = run_sweep(counter, &registry, &cfg).map_err(|e| match e {
        vinogradov::Error::Precondition(m) => Failure::Config(m),
        other => other.into(),
    })?;
    let summary = SweepSummary::of(&outcomes);

    fs::create_dir_all(&args.out)?;
    let mut csv_bytes = Vec::new();
    report::write_csv(&mut csv_bytes, &outcomes).map_err(|e| Failure::Other(e.to_string()))?;
    write_file(&args.out.join("report.csv"), &csv_bytes)?;
    let report = Report { engine_version: ENGINE_VERSION, config: &cfg, summary, outcomes: &outcomes };
    let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::Other(e.to_string()))?;
    write_file(&args.out.join("report.json"), json.as_bytes())?;

    let failures = failure_lines(&outcomes);
    let manifest = RunManifest {
        command: std::env::args().collect::<Vec<_>>().join(" "),
        config: &cfg,
        engine: counter.engine_name(),
        engine_version: ENGINE_VERSION,
        threads: rayon::current_num_threads(),
        started_at,
        finished_at: Utc::now().to_rfc3339(),
        cache: CacheSection {
            path: cli.cache.as_ref().map(|p| p.display().to_string()),
            stats: counter.stats(),
        },
        summary,
        failures: failures.clone(),
    };
    let manifest = serde_json::to_string_pretty(&manifest).map_err(|e| Failure::Other(e.to_string()))?;
    write_file(&args.out.join("manifest.json"), manifest.as_bytes())?;

    match cli.format {
        Format::Csv => {
            println!(
                "checked={} passed={} failed={} informational_failed={} skipped={} errored={}",
                summary.checked, summary.passed, summary.failed, summary.informational_failed, summary.skipped, summary.errored
            );
            for line in &failures {
                println!("FAIL {line}");
            }
        }
        Format::Json => println!("{}", serde_json::to_string(&summary).map_err(|e| Failure::Other(e.to_string()))?),
    }
    if summary.all_hold() {
        Ok(())
    } else {
        Err(Failure::Check(format!("{} check(s) failed, {} errored", summary.failed, summary.errored)))
    }
}

fn recursion(args: &RecursionArgs) -> CmdResult {
    let theta = rational(&args.theta)?;
    let mut out = serde_json::Map::new();
    out.insert("theta".into(), json!(theta.to_string()));

    if let Some(n) = args.n {
        let pair = exponent::iterate(n, &theta);
        let fixed = exponent::ExponentPair::new(exponent::qi(-4), exponent::qi(2));
        out.insert("n".into(), json!(n));
        out.insert("alpha".into(), json!(pair.alpha.to_string()));
        out.insert("beta".into(), json!(pair.beta.to_string()));
        out.insert("distance_to_fixed_point".into(), json!(pair.sub(&fixed).norm().to_string()));
        let direction = exponent::asymptotic_direction(&theta);
        out.insert("limit_direction".into(), json!([direction.alpha.to_string(), direction.beta.to_string()]));
        out.insert("error_constant".into(), json!(exponent::asymptotic_error_constant(&theta)?.to_string()));
    }
    if args.eigen {
        let data = exponent::eigen_data()?;
        let (_, m) = exponent::recursion_constants(&theta);
        let mut eig = serde_json::to_value(&data).map_err(|e| Failure::Other(e.to_string()))?;
        eig["m"] = serde_json::to_value(&m).map_err(|e| Failure::Other(e.to_string()))?;
        eig["reconstructs"] = json!(data.reconstruct() == m);
        out.insert("eigen".into(), eig);
    }
    if let Some(values) = &args.induction {
        let v: Vec<Q> = values.iter().map(|s| rational(s)).collect::<Result<_, _>>()?;
        let e = exponent::induction_exponent(&v[0], &v[1], &v[2], &v[3])?;
        let ok = exponent::verify_induction_step(&v[0], &v[1], &v[2], &v[3])?;
        out.insert(
            "induction".into(),
            json!({ "n": v[0].to_string(), "delta": v[1].to_string(), "a": v[2].to_string(), "b": v[3].to_string(),
                    "exponent": e.to_string(), "step_verified": ok }),
        );
    }
    if let Some(delta) = &args.threshold {
        let n = exponent::contradiction_threshold(&rational(delta)?);
        out.insert("threshold".into(), json!(n.map(|n| n.to_string())));
    }
    if let Some(values) = &args.window {
        let n: u32 = values[0].parse().map_err(|_| Failure::Config(format!("`{}` is not an integer", values[0])))?;
        let window = exponent::prime_window(n, &rational(&values[1])?)?;
        out.insert("window".into(), serde_json::to_value(&window).map_err(|e| Failure::Other(e.to_string()))?);
    }
    if out.len() == 1 {
        let (c, m) = exponent::recursion_constants(&theta);
        out.insert("c".into(), serde_json::to_value(&c).map_err(|e| Failure::Other(e.to_string()))?);
        out.insert("m".into(), serde_json::to_value(&m).map_err(|e| Failure::Other(e.to_string()))?);
    }
    println!("{}", serde_json::Value::Object(out));
    Ok(())
}

fn trend(cli: &Cli, counter: &Counter, args: &TrendArgs) -> CmdResult {
    let mut rows = Vec::new();
    for text in &args.x {
        let q = CountQuery::new(args.s, args.k, bound(text)?);
        let j = counter.j(&q)?;
        let n = q.floor() as u128;
        let lower = n.pow(args.s);
        let upper = n.pow(2 * args.s);
        if j < lower || j > upper {
            return Err(Failure::Check(format!("J({}) = {j} outside [{lower}, {upper}]", q.x)));
        }
        rows.push((q.x, q.floor(), j, effective_exponent(j, q.floor())));
    }
    match cli.format {
        Format::Csv => {
            println!("# effective_exponent = ln J / ln floor(x), fixed to 6 when floor(x) <= 1");
            println!("x,floor_x,j,effective_exponent");
            for (x, n, j, e) in rows {
                println!("{x},{n},{j},{e:.6}");
            }
        }
        Format::Json => {
            let rows: Vec<_> = rows
                .into_iter()
                .map(|(x, n, j, e)| json!({ "x": x.to_string(), "floor_x": n, "j": j.to_string(), "effective_exponent": e }))
                .collect();
            println!("{}", serde_json::Value::Array(rows));
        }
    }
    Ok(())
}
