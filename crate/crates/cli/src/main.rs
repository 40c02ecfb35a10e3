use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex;
use serde_json::{json, Value};
use twofloat::TwoFloat;

use cmroot::arith::FactorConfig;
use cmroot::curves::{normalize_d, CurveClass};
use cmroot::experiments::{self, average_report, manytheta_report, mertens_report, Report};
use cmroot::gaussint::{classify_prime, PrimeKind};
use cmroot::hecke::{count_points, hecke_at_prime, verify_trace, POINT_COUNT_CAP};
use cmroot::rootnum::{
    all_local_root_numbers, global_root_number, global_root_ratio, local_root_number, local_root_oracle, Place, RootConfig,
};
use cmroot::scalar::RealScalar;
use cmroot::selftest::{selftest, Scale};
use cmroot::symbols::{quartic_symbol_composite, quartic_symbol_fast, Mu4};
use cmroot::{numeric, GaussInt};

/// Root numbers of Hecke characters of y² = x³ − dx over Q(i).
#[derive(Parser, Debug)]
#[command(name = "cmroot", version)]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Significant digits: up to 15 uses f64, up to 31 double-double.
    #[arg(long, global = true, env = "CMROOT_PRECISION", default_value_t = 31)]
    precision: u32,
    /// Prime-norm bound for searches and scans.
    #[arg(long, global = true, env = "CMROOT_NORM_BOUND")]
    norm_bound: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "CMROOT_THREADS")]
    threads: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, global = true, env = "CMROOT_OUT")]
    out: Option<PathBuf>,
    /// Output format; inferred from the --out extension when omitted.
    #[arg(long, global = true, env = "CMROOT_FORMAT")]
    format: Option<Format>,
    /// Leave Q = 1 out of the family Q(X).
    #[arg(long = "exclude-unit-Q", alias = "exclude-unit-q", global = true, env = "CMROOT_EXCLUDE_UNIT_Q")]
    exclude_unit_q: bool,
    /// Seed for the factorization routine and for sampled checks.
    #[arg(long, global = true, env = "CMROOT_SEED", default_value_t = 0x5eed)]
    seed: u64,
    /// Total rho iterations allowed when factoring.
    #[arg(long, global = true, env = "CMROOT_RHO_ITERATIONS", default_value_t = 5_000_000)]
    rho_iterations: u64,
    /// Largest residue field for a Gauss sum.
    #[arg(long, global = true, env = "CMROOT_GAUSS_CAP", default_value_t = cmroot::rootnum::gauss::GAUSS_SUM_CAP)]
    gauss_cap: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SymbolMode {
    Oracle,
    Fast,
    Both,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Quartic residue symbol (alpha/beta)_4.
    Symbol {
        #[arg(long, value_parser = parse_gauss, allow_hyphen_values = true)]
        alpha: GaussInt,
        #[arg(long, value_parser = parse_gauss, allow_hyphen_values = true)]
        beta: GaussInt,
        #[arg(long, value_enum, default_value_t = SymbolMode::Both)]
        mode: SymbolMode,
    },
    /// Canonical class, factorization and reduction data of E_d.
    Curve {
        #[arg(long, value_parser = parse_gauss, allow_hyphen_values = true)]
        d: GaussInt,
    },
    /// Hecke character value and point count at a good odd prime.
    Hecke {
        #[arg(long, value_parser = parse_gauss, allow_hyphen_values = true)]
        d: GaussInt,
        #[arg(long, value_parser = parse_gauss, allow_hyphen_values = true)]
        prime: GaussInt,
    },
    /// Local and global root numbers of chi_d.
    Rootnum {
        #[arg(long, value_parser = parse_gauss, allow_hyphen_values = true)]
        d: GaussInt,
        /// A single place: a Gaussian prime or "infinity".
        #[arg(long, allow_hyphen_values = true)]
        place: Option<String>,
        /// Also evaluate the independent route at bad odd places.
        #[arg(long)]
        oracle: bool,
    },
    /// Desk-scale experiments.
    #[command(subcommand)]
    Experiment(Experiment),
    /// Run the invariant suite.
    Selftest {
        /// Smaller bounds.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Subcommand, Debug)]
enum Experiment {
    /// Witnesses near each point of a grid on the unit circle.
    Density {
        #[arg(long, default_value_t = 16)]
        points: u32,
        #[arg(long, default_value_t = 0.15)]
        eps: f64,
    },
    /// Unit-twist ratio tables at primes congruent to 3+2i mod 4.
    Nusym,
    /// Many classes sharing one local root number.
    Manytheta {
        #[arg(long, value_parser = parse_gauss, allow_hyphen_values = true)]
        d: GaussInt,
        #[arg(long, value_parser = parse_gauss, allow_hyphen_values = true)]
        place: GaussInt,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Mean of w/w_2 over the family Q(X).
    Average {
        #[arg(long, value_parser = parse_gauss, allow_hyphen_values = true)]
        d: GaussInt,
        #[arg(long = "X", alias = "x", value_delimiter = ',', required = true)]
        xs: Vec<u64>,
    },
    /// Decay exponent of prod (1 - xi/p) over a progression.
    Mertens {
        /// xi = e^{2 pi i t}; with a and m omitted the three standard cases run.
        #[arg(long)]
        turns: Option<f64>,
        #[arg(long)]
        a: Option<u64>,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long = "X", alias = "x", default_value_t = 10_000_000)]
        x: u64,
    },
}

fn parse_gauss(s: &str) -> Result<GaussInt, String> {
    s.parse::<GaussInt>().map_err(|e| e.to_string())
}

enum Failure {
    Usage(String),
    Compute(cmroot::Error),
}

impl From<cmroot::Error> for Failure {
    fn from(e: cmroot::Error) -> Self {
        Failure::Compute(e)
    }
}

type Outcome = Result<Output, Failure>;

/// A command result: the JSON document and a flat table for CSV.
struct Output {
    json: Value,
    table: Report,
}

impl Output {
    fn from_report(r: Report) -> Self {
        Self { json: serde_json::to_value(&r).expect("report serializes"), table: r }
    }
}

impl RunConfig {
    fn root(&self) -> RootConfig {
        RootConfig { gauss_cap: self.gauss_cap, ..RootConfig::default() }
    }

    fn factor(&self) -> FactorConfig {
        FactorConfig { rho_iterations: self.rho_iterations, seed: self.seed }
    }

    fn format(&self) -> Format {
        self.format.unwrap_or_else(|| match self.out.as_ref().and_then(|p| p.extension()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Json,
        })
    }
}

macro_rules! with_precision {
    ($digits:expr, $f:ident($($arg:expr),*)) => {
        match $digits {
            15 => $f::<f64>($($arg),*),
            16..=31 => $f::<TwoFloat>($($arg),*),
            d => Err(Failure::Usage(format!("--precision {d} is not supported (15 to 31)"))),
        }
    };
}

fn doc(command: &str, digits: u32, body: Value) -> Value {
    let mut v = json!({ "schema": experiments::report::SCHEMA, "command": command, "digits": digits });
    if let (Value::Object(m), Value::Object(b)) = (&mut v, body) {
        m.extend(b);
    }
    v
}

fn symbol(alpha: &GaussInt, beta: &GaussInt, mode: SymbolMode) -> Outcome {
    let oracle = matches!(mode, SymbolMode::Oracle | SymbolMode::Both).then(|| quartic_symbol_composite(alpha, beta)).transpose()?;
    let fast = matches!(mode, SymbolMode::Fast | SymbolMode::Both).then(|| quartic_symbol_fast(alpha, beta)).transpose()?;
    let value: Mu4 = oracle.or(fast).expect("one route ran");
    let agree = oracle.zip(fast).map(|(a, b)| a == b);
    let mut t = Report::new("symbol", 15, &["alpha", "beta", "symbol", "exponent", "oracle", "fast"]);
    let show = |m: Option<Mu4>| m.map(|v| v.to_string()).unwrap_or_default();
    t.row(vec![alpha.to_string(), beta.to_string(), value.to_string(), value.exponent().to_string(), show(oracle), show(fast)]);
    if let Some(a) = agree {
        t.check("routes agree", a, "");
    }
    let json = doc(
        "symbol",
        15,
        json!({
            "alpha": alpha.to_string(), "beta": beta.to_string(),
            "symbol": value.to_string(), "exponent": value.exponent(),
            "oracle": oracle.map(|m| m.to_string()), "fast": fast.map(|m| m.to_string()),
            "routes_agree": agree,
        }),
    );
    Ok(Output { json, table: t })
}

fn curve(d: &GaussInt, run: &RunConfig) -> Outcome {
    let (_, x) = normalize_d(d, &run.factor())?;
    let c = CurveClass::with_config(d, &run.factor())?;
    let mut t = Report::new("curve", 15, &["place", "kind", "valuation", "conductor_exponent", "epsilon_order"]);
    let mut places = Vec::new();
    for v in c.bad_odd_places() {
        let n = c.valuation(&v.generator);
        let order = c.epsilon_order(&v)?;
        t.row(vec![v.generator.to_string(), kind_name(v.kind).into(), n.to_string(), "2".into(), order.to_string()]);
        places.push(json!({ "place": v.generator.to_string(), "kind": kind_name(v.kind), "valuation": n, "conductor_exponent": 2, "epsilon_order": order }));
    }
    let e = &c.even_reduction;
    t.row(vec!["1+i".into(), "even".into(), c.fact.n_2.to_string(), e.f2.to_string(), String::new()]);
    let json = doc(
        "curve",
        15,
        json!({
            "input": d.to_string(),
            "d": c.d.to_string(),
            "fourth_power_removed": x.to_string(),
            "unit_exponent": c.fact.n_u,
            "one_plus_i_exponent": c.fact.n_2,
            "odd_factors": c.fact.odd.iter().map(|(p, k)| json!([p.to_string(), k])).collect::<Vec<_>>(),
            "even_reduction": { "kodaira": e.kodaira.to_string(), "conductor_exponent": e.f2, "table_row": e.row, "digits": e.digits },
            "good_at_two": c.has_good_reduction_at_two(),
            "odd_bad_places": places,
        }),
    );
    Ok(Output { json, table: t })
}

fn kind_name(k: PrimeKind) -> &'static str {
    match k {
        PrimeKind::Even => "even",
        PrimeKind::DegreeOne => "degree_one",
        PrimeKind::DegreeTwo => "degree_two",
    }
}

fn hecke(d: &GaussInt, prime: &GaussInt, run: &RunConfig) -> Outcome {
    let c = CurveClass::with_config(d, &run.factor())?;
    let v = classify_prime(prime)?;
    let count = count_points(&c.d, &v, POINT_COUNT_CAP)?;
    let ok = verify_trace(&c.d, &v, POINT_COUNT_CAP)?;
    let chi = (v.kind == PrimeKind::DegreeOne).then(|| hecke_at_prime(&c.d, &v)).transpose()?;
    let mut t = Report::new("hecke", 15, &["d", "place", "kind", "chi", "trace", "points", "trace_formula_holds"]);
    let chi_s = chi.as_ref().map(|h| h.value.to_string()).unwrap_or_default();
    let tr = chi.as_ref().map(|h| h.trace().to_string()).unwrap_or_default();
    t.row(vec![c.d.to_string(), v.generator.to_string(), kind_name(v.kind).into(), chi_s.clone(), tr.clone(), count.to_string(), ok.to_string()]);
    t.check("trace formula", ok, "");
    let json = doc(
        "hecke",
        15,
        json!({
            "d": c.d.to_string(), "place": v.generator.to_string(), "kind": kind_name(v.kind),
            "chi": chi.as_ref().map(|h| h.value.to_string()), "trace": chi.as_ref().map(|h| h.trace().to_string()),
            "points": count, "trace_formula_holds": ok,
        }),
    );
    Ok(Output { json, table: t })
}

fn parse_place(s: &str) -> Result<Place, Failure> {
    match s.trim().to_ascii_lowercase().as_str() {
        "infinity" | "inf" | "archimedean" => Ok(Place::Archimedean),
        _ => {
            let g = parse_gauss(s).map_err(Failure::Usage)?;
            Ok(Place::of_prime(&g)?)
        }
    }
}

fn rootnum<F: RealScalar>(d: &GaussInt, place: Option<&str>, oracle: bool, run: &RunConfig) -> Outcome {
    let cfg = run.root();
    let c = CurveClass::with_config(d, &run.factor())?;
    let places: Vec<Place> = match place {
        Some(p) => vec![parse_place(p)?],
        None => all_local_root_numbers::<F>(&c, &cfg)?.into_iter().map(|(p, _)| p).collect(),
    };
    let cols = ["place", "kind", "w_re", "w_im", "zeta_exponent", "certificate", "method", "oracle_re", "oracle_im"];
    let mut t = Report::new("rootnum", F::DIGITS, &cols);
    let mut locals = Vec::new();
    let mut agree = true;
    for p in &places {
        let w = local_root_number::<F>(&c, p, &cfg)?;
        let mut entry = serde_json::to_value(&w).expect("serializes");
        let mut orc = (String::new(), String::new());
        if let (true, Place::Finite(v)) = (oracle, p) {
            if v.kind != PrimeKind::Even && c.valuation(&v.generator) > 0 {
                let raw = local_root_oracle::<F>(&c, v, &cfg)?;
                let o = numeric::to_c64(raw);
                let delta = numeric::dist(w.value, raw);
                agree &= delta < numeric::TOLERANCE;
                entry["oracle_re"] = json!(o.re);
                entry["oracle_im"] = json!(o.im);
                entry["oracle_distance"] = json!(delta);
                orc = (experiments::report::fmt_f64(o.re), experiments::report::fmt_f64(o.im));
            }
        }
        entry["place"] = json!(p.to_string());
        entry["kind"] = json!(p.kind());
        let z = w.to_c64();
        t.row(vec![
            p.to_string(),
            p.kind().into(),
            experiments::report::fmt_f64(z.re),
            experiments::report::fmt_f64(z.im),
            w.certificate.as_ref().map(|c| c.zeta.exponent().to_string()).unwrap_or_default(),
            w.certificate.as_ref().map(|c| c.to_string()).unwrap_or_default(),
            serde_json::to_value(w.method).unwrap().as_str().unwrap_or_default().into(),
            orc.0,
            orc.1,
        ]);
        locals.push(entry);
    }
    let mut body = json!({ "d": c.d.to_string(), "good_at_two": c.has_good_reduction_at_two(), "places": locals });
    if place.is_none() {
        let ratio = global_root_ratio::<F>(&c, &cfg)?;
        body["global_ratio"] = serde_json::to_value(&ratio).unwrap();
        body["global"] = match global_root_number::<F>(&c, &cfg) {
            Ok(w) => serde_json::to_value(&w).unwrap(),
            Err(e) => json!({ "unavailable": e.to_string() }),
        };
    }
    if oracle {
        body["routes_agree"] = json!(agree);
        t.check("closed form agrees with oracle", agree, "");
    }
    Ok(Output { json: doc("rootnum", F::DIGITS, body), table: t })
}

fn density<F: RealScalar>(points: u32, eps: f64, bound: u64, cfg: &RootConfig) -> Outcome {
    Ok(Output::from_report(experiments::density_report::<F>(points, eps, bound, cfg)?))
}

fn average<F: RealScalar>(d: &GaussInt, xs: &[u64], exclude: bool, cfg: &RootConfig) -> Outcome {
    Ok(Output::from_report(average_report::<F>(d, xs, exclude, cfg)?))
}

fn experiment(e: &Experiment, run: &RunConfig) -> Outcome {
    let cfg = run.root();
    match e {
        Experiment::Density { points, eps } => {
            let bound = run.norm_bound.unwrap_or(100_000);
            with_precision!(run.precision, density(*points, *eps, bound, &cfg))
        }
        Experiment::Nusym => Ok(Output::from_report(experiments::nusym_report(run.norm_bound.unwrap_or(2000), &cfg)?)),
        Experiment::Manytheta { d, place, count } => {
            let r = manytheta_report(&[(d.clone(), place.clone())], *count, run.norm_bound.unwrap_or(100_000), &cfg)?;
            Ok(Output::from_report(r))
        }
        Experiment::Average { d, xs } => with_precision!(run.precision, average(d, xs, run.exclude_unit_q, &cfg)),
        Experiment::Mertens { turns, a, m, x } => {
            let cases = match (turns, a, m) {
                (None, None, None) => vec![(Complex::new(1.0, 0.0), 3, 4), (Complex::new(-1.0, 0.0), 3, 4), (Complex::new(0.0, 1.0), 1, 4)],
                (t, Some(a), Some(m)) => {
                    let t = t.unwrap_or(0.0);
                    vec![(Complex::from_polar(1.0, std::f64::consts::TAU * t), *a, *m)]
                }
                _ => return Err(Failure::Usage("--a and --m go together".into())),
            };
            Ok(Output::from_report(mertens_report(&cases, *x)?))
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let r = &cli.run;
    if !(15..=31).contains(&r.precision) {
        return Err(Failure::Usage(format!("--precision {} is outside 15 to 31", r.precision)));
    }
    if r.gauss_cap == 0 || r.rho_iterations == 0 || r.norm_bound == Some(0) || r.threads == Some(0) {
        return Err(Failure::Usage("caps and thread counts must be positive".into()));
    }
    let precision = if r.precision <= 15 { 15 } else { r.precision };
    match &cli.command {
        Command::Symbol { alpha, beta, mode } => symbol(alpha, beta, *mode),
        Command::Curve { d } => curve(d, r),
        Command::Hecke { d, prime } => hecke(d, prime, r),
        Command::Rootnum { d, place, oracle } => with_precision!(precision, rootnum(d, place.as_deref(), *oracle, r)),
        Command::Experiment(e) => {
            let mut r2 = r.clone();
            r2.precision = precision;
            experiment(e, &r2)
        }
        Command::Selftest { quick } => {
            let scale = if *quick { Scale::Quick } else { Scale::Full };
            Ok(Output::from_report(selftest(scale, r.seed, &r.root())?))
        }
    }
}

fn write(out: &Output, run: &RunConfig) -> Result<(), String> {
    let text = match run.format() {
        Format::Json => serde_json::to_string_pretty(&out.json).expect("json") + "\n",
        Format::Csv => out.table.to_csv().map_err(|e| e.to_string())?,
    };
    match &run.out {
        Some(p) => fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.run.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let start = Instant::now();
    let result = run(&cli);
    let code = match result {
        Ok(out) => {
            if let Err(e) = write(&out, &cli.run) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            for c in out.table.checks.iter().filter(|c| !c.passed) {
                eprintln!("check failed: {}: {}", c.name, c.detail);
            }
            if out.table.all_passed() {
                0
            } else {
                1
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            2
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            1
        }
    };
    eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
    ExitCode::from(code)
}
