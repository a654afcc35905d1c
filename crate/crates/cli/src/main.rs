use std::fmt::Write as _;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use isocluster::cluster::{classify, ExtendedExchangeMatrix};
use isocluster::count::{
    count_bruteforce, count_formula, verify_match, PointCountSample, VerifyOptions, VerifyReport,
    DEFAULT_BRUTE_BUDGET,
};
use isocluster::hodge::{check_chl, check_pw, epoly, pw_table, BigradedTable, ChlReport, ChlStatus, PwReport};
use isocluster::variety::{
    build_descriptor, fibration_eval, random_point, structure_decomposition, FibrationPoint,
};
use isocluster::IntMatrix;
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "isocluster", version, about = "Isolated cluster varieties: structure, weight tables and point counts")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Seed for every random choice.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,

    /// Largest torus size (q-1)^m that brute-force counting may enumerate.
    #[arg(long, default_value_t = DEFAULT_BRUTE_BUDGET, global = true)]
    brute_budget: u128,

    /// Total number of primes counted by `verify` (default n + m + 3).
    #[arg(long, global = true)]
    prime_budget: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mutate a seed along a sequence of 1-based mutable vertices.
    Mutate {
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        seq: Vec<usize>,
    },
    /// Acyclic / isolated / Louise classification of a seed.
    Classify { input: PathBuf },
    /// Defining equations of X(M).
    Describe { input: PathBuf },
    /// d, T, Mbar and the group gamma with X(M) = X(d)^n / gamma x (C*)^(m-n).
    Decompose { input: PathBuf },
    /// Bigraded (degree, weight, perverse, character) table of H^*(X(M)).
    PwTable { input: PathBuf },
    /// E-polynomial of X(M) from its weight table.
    Epoly { input: PathBuf },
    /// Number of points of X(M) over F_q.
    Count {
        input: PathBuf,
        #[arg(long)]
        prime: u64,
        /// Enumerate the torus instead of using the counting formula.
        #[arg(long)]
        brute: bool,
    },
    /// Compare the structure E-polynomial with point counts and check P=W.
    Verify {
        input: PathBuf,
        /// Also check the curious hard Lefschetz symmetry.
        #[arg(long)]
        chl: bool,
    },
    /// A point of X(M) sampled from --seed.
    SamplePoint { input: PathBuf },
    /// Evaluate h = (|x^2 - y^2|, log|z|) at --point, or at the point sampled from --seed.
    Fibration {
        input: PathBuf,
        #[arg(long)]
        point: Option<PathBuf>,
    },
}

/// Errors the user can fix by changing the input or flags.
struct InputError(String);

impl From<isocluster::Error> for InputError {
    fn from(e: isocluster::Error) -> Self {
        InputError(e.to_string())
    }
}

struct Output {
    body: String,
    pass: bool,
}

impl Output {
    fn ok(body: String) -> Self {
        Output { body, pass: true }
    }
}

fn read_input(path: &Path) -> Result<String, InputError> {
    let mut s = String::new();
    if path == Path::new("-") {
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| InputError(format!("stdin: {e}")))?;
    } else {
        s = std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    }
    Ok(s)
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, what: &str) -> Result<T, InputError> {
    let text = read_input(path)?;
    serde_json::from_str(&text).map_err(|e| InputError(format!("{}: invalid {what}: {e}", path.display())))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("outputs serialize");
    s.push('\n');
    s
}

fn csv_matrix(m: &IntMatrix) -> String {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>().join(",") + "\n")
        .collect()
}

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep)
}

/// Classification with 1-based vertex labels.
#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
struct ClassifyOutput {
    acyclic: bool,
    isolated: bool,
    louise: bool,
    separating_edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
struct VerifyOutput {
    pass: bool,
    report: VerifyReport,
    pw: PwReport,
    pw_note: String,
    chl: Option<ChlReport>,
}

const PW_NOTE: &str = "perverse levels of the C* and X(d) blocks are taken from their base cases; \
the check covers the Kunneth and quotient bookkeeping";

fn mutate(cli: &Cli, input: &Path, seq: &[usize]) -> Result<Output, InputError> {
    let b: ExtendedExchangeMatrix = parse(input, "seed")?;
    let mut labels = Vec::with_capacity(seq.len());
    for &k in seq {
        if k == 0 || !b.is_mutable(k - 1) {
            let mutable: Vec<usize> = b.mutable_vertices().iter().map(|v| v + 1).collect();
            return Err(InputError(format!("vertex {k} is not one of the mutable vertices {mutable:?}")));
        }
        labels.push(k - 1);
    }
    let out = b.mutate_seq(&labels)?;
    Ok(Output::ok(match cli.format {
        Format::Json => json(&out),
        Format::Csv => csv_matrix(out.matrix()),
        Format::Text => format!("n = {}, m = {}\n{}\n", out.n(), out.m(), out.matrix()),
    }))
}

fn classify_cmd(cli: &Cli, input: &Path) -> Result<Output, InputError> {
    let b: ExtendedExchangeMatrix = parse(input, "seed")?;
    let c = classify(&b);
    let out = ClassifyOutput {
        acyclic: c.acyclic,
        isolated: c.isolated,
        louise: c.louise,
        separating_edges: c.separating_edges.iter().map(|&(i, j)| (i + 1, j + 1)).collect(),
    };
    let edges: Vec<String> = out.separating_edges.iter().map(|(i, j)| format!("{i}->{j}")).collect();
    Ok(Output::ok(match cli.format {
        Format::Json => json(&out),
        Format::Csv => format!(
            "acyclic,isolated,louise,separating_edges\n{},{},{},{}\n",
            out.acyclic,
            out.isolated,
            out.louise,
            edges.join(" ")
        ),
        Format::Text => format!(
            "acyclic: {}\nisolated: {}\nlouise: {}\nseparating edges: {}\n",
            out.acyclic,
            out.isolated,
            out.louise,
            if edges.is_empty() { "none".into() } else { edges.join(", ") }
        ),
    }))
}

fn describe(cli: &Cli, input: &Path) -> Result<Output, InputError> {
    let m: IntMatrix = parse(input, "matrix")?;
    let desc = build_descriptor(&m);
    Ok(Output::ok(match cli.format {
        Format::Json => json(&desc),
        Format::Csv => {
            let mut s = String::from("j");
            for i in 1..=desc.m() {
                write!(s, ",z{i}").unwrap();
            }
            s.push('\n');
            for (j, eq) in desc.equations().iter().enumerate() {
                writeln!(s, "{},{}", j + 1, join(eq, ",")).unwrap();
            }
            s
        }
        Format::Text => {
            let mut s = format!("X(M) in C^{} x (C*)^{}, dimension {}\n", 2 * desc.n(), desc.m(), desc.dimension());
            for (j, eq) in desc.equations().iter().enumerate() {
                let mono: Vec<String> = eq
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| e.bits() != 0)
                    .map(|(i, e)| format!("z{}^{}", i + 1, e))
                    .collect();
                let mono = if mono.is_empty() { "1".to_string() } else { mono.join(" ") };
                writeln!(s, "x{0} y{0} = {1} + 1", j + 1, mono).unwrap();
            }
            s
        }
    }))
}

fn decompose(cli: &Cli, input: &Path) -> Result<Output, InputError> {
    let m: IntMatrix = parse(input, "matrix")?;
    let s = structure_decomposition(&m)?;
    let order = s.gamma.order();
    Ok(Output::ok(match cli.format {
        Format::Json => json(&s),
        Format::Csv => {
            let mut out = format!(
                "key,value\nd,{}\nn,{}\nm,{}\ntorus_rank,{}\ngamma_order,{}\n",
                s.d, s.n, s.m, s.torus_rank, order
            );
            for g in &s.gamma.generators {
                writeln!(out, "gamma_generator,{}", join(g, " ")).unwrap();
            }
            out
        }
        Format::Text => format!(
            "d = {}\nX(M) = X({})^{} / gamma x (C*)^{}\ngamma = {} of order {}\nT =\n{}\nMbar =\n{}\n",
            s.d, s.d, s.n, s.torus_rank, s.gamma, order, s.completion.t, s.completion.mbar
        ),
    }))
}

fn table_csv(t: &BigradedTable) -> String {
    let mut s = String::from("k,w,p,chi,dim\n");
    for e in t.entries() {
        writeln!(s, "{},{},{},{},{}", e.k, e.w, e.p, join(&e.chi, " "), e.dim).unwrap();
    }
    s
}

fn pw_table_cmd(cli: &Cli, input: &Path) -> Result<Output, InputError> {
    let m: IntMatrix = parse(input, "matrix")?;
    let t = pw_table(&m)?;
    Ok(Output::ok(match cli.format {
        Format::Json => json(&t),
        Format::Csv => table_csv(&t),
        Format::Text => format!("{t}betti = {:?}\n", t.betti()),
    }))
}

fn epoly_cmd(cli: &Cli, input: &Path) -> Result<Output, InputError> {
    let m: IntMatrix = parse(input, "matrix")?;
    let e = epoly(&pw_table(&m)?)?;
    Ok(Output::ok(match cli.format {
        Format::Json => json(&e),
        Format::Csv => {
            let mut s = String::from("degree,coefficient\n");
            for (i, c) in e.coeffs().iter().enumerate() {
                writeln!(s, "{i},{c}").unwrap();
            }
            s
        }
        Format::Text => format!("E(q) = {e}\n"),
    }))
}

fn timed_sample(m: &IntMatrix, q: u64, brute: bool, budget: u128) -> Result<(PointCountSample, u128), InputError> {
    let start = Instant::now();
    let s = if brute { count_bruteforce(m, q, budget)? } else { count_formula(m, q)? };
    Ok((s, start.elapsed().as_millis()))
}

fn sample_rows(rows: &[(PointCountSample, u128)]) -> String {
    let mut s = String::from("q,count,method,millis\n");
    for (p, ms) in rows {
        writeln!(s, "{},{},{},{}", p.q, p.count, p.method, ms).unwrap();
    }
    s
}

fn count_cmd(cli: &Cli, input: &Path, q: u64, brute: bool) -> Result<Output, InputError> {
    let m: IntMatrix = parse(input, "matrix")?;
    let (sample, ms) = timed_sample(&m, q, brute, cli.brute_budget)?;
    Ok(Output::ok(match cli.format {
        Format::Json => json(&sample),
        Format::Csv => sample_rows(&[(sample, ms)]),
        Format::Text => format!("#X(M)(F_{}) = {} ({})\n", sample.q, sample.count, sample.method),
    }))
}

fn verify_cmd(cli: &Cli, input: &Path, with_chl: bool) -> Result<Output, InputError> {
    let m: IntMatrix = parse(input, "matrix")?;
    let opts = VerifyOptions {
        prime_budget: cli.prime_budget,
        brute_budget: cli.brute_budget,
        parallel: true,
    };
    let report = verify_match(&m, &opts)?;
    let table = pw_table(&m)?;
    let pw = check_pw(&table);
    let chl = with_chl.then(|| check_chl(&table));
    let chl_ok = chl.as_ref().is_none_or(|c| c.status != ChlStatus::Fail);
    let out = VerifyOutput {
        pass: report.matched && pw.pass && chl_ok,
        report,
        pw,
        pw_note: PW_NOTE.into(),
        chl,
    };
    let body = match cli.format {
        Format::Json => json(&out),
        Format::Csv => {
            let mut rows = Vec::new();
            for s in &out.report.samples {
                rows.push(timed_sample(&m, s.q, false, cli.brute_budget)?);
            }
            if let Some(b) = &out.report.brute_check {
                rows.push(timed_sample(&m, b.q, true, cli.brute_budget)?);
            }
            sample_rows(&rows)
        }
        Format::Text => verify_text(&out),
    };
    Ok(Output { body, pass: out.pass })
}

fn verify_text(out: &VerifyOutput) -> String {
    let r = &out.report;
    let mut s = String::new();
    writeln!(s, "structure E(q): {}", r.structure_epoly).unwrap();
    match (&r.counted_epoly, &r.interpolation_error) {
        (Some(p), _) => writeln!(s, "counted   E(q): {p}").unwrap(),
        (None, Some(e)) => writeln!(s, "counted   E(q): interpolation failed: {e}").unwrap(),
        (None, None) => {}
    }
    writeln!(s, "fit primes: {}; holdout primes: {}", join(&r.fit_primes, ", "), join(&r.holdout_primes, ", ")).unwrap();
    match &r.brute_check {
        Some(b) => writeln!(
            s,
            "brute-force check at q = {}: {} (formula {}){}",
            b.q,
            b.brute,
            b.formula,
            if b.agree { "" } else { " MISMATCH" }
        )
        .unwrap(),
        None => writeln!(s, "brute-force check: skipped (over budget)").unwrap(),
    }
    writeln!(s, "E-polynomials: {}", if r.matched { "match" } else { "MISMATCH" }).unwrap();
    writeln!(
        s,
        "P=W: {} ({} violations)",
        if out.pw.pass { "pass" } else { "FAIL" },
        out.pw.violations.len()
    )
    .unwrap();
    writeln!(s, "  note: {}", out.pw_note).unwrap();
    if let Some(c) = &out.chl {
        let status = match c.status {
            ChlStatus::Pass => "pass",
            ChlStatus::Fail => "FAIL",
            ChlStatus::SkippedOddDimension => "skipped (odd dimension)",
        };
        writeln!(s, "curious hard Lefschetz: {status} (center weight {})", c.center).unwrap();
    }
    writeln!(s, "{}", if out.pass { "PASS" } else { "FAIL" }).unwrap();
    s
}

fn point_csv(p: &FibrationPoint) -> String {
    let mut s = String::from("coordinate,index,re,im\n");
    for (name, v) in [("x", &p.x), ("y", &p.y), ("z", &p.z)] {
        for (i, c) in v.iter().enumerate() {
            writeln!(s, "{name},{},{},{}", i + 1, c.re, c.im).unwrap();
        }
    }
    s
}

fn sample_point(cli: &Cli, input: &Path) -> Result<Output, InputError> {
    let m: IntMatrix = parse(input, "matrix")?;
    let p = random_point(&build_descriptor(&m), cli.seed)?;
    Ok(Output::ok(match cli.format {
        Format::Json => json(&p),
        Format::Csv | Format::Text => point_csv(&p),
    }))
}

fn fibration(cli: &Cli, input: &Path, point: Option<&Path>) -> Result<Output, InputError> {
    let m: IntMatrix = parse(input, "matrix")?;
    let desc = build_descriptor(&m);
    let p: FibrationPoint = match point {
        Some(path) => parse(path, "point")?,
        None => random_point(&desc, cli.seed)?,
    };
    let h = fibration_eval(&desc, &p)?;
    Ok(Output::ok(match cli.format {
        Format::Json => json(&h),
        Format::Csv => {
            let mut s = String::from("component,value\n");
            for (i, v) in h.iter().enumerate() {
                writeln!(s, "{},{v}", i + 1).unwrap();
            }
            s
        }
        Format::Text => format!("h = ({})\n", join(&h, ", ")),
    }))
}

fn run(cli: &Cli) -> Result<Output, InputError> {
    match &cli.command {
        Command::Mutate { input, seq } => mutate(cli, input, seq),
        Command::Classify { input } => classify_cmd(cli, input),
        Command::Describe { input } => describe(cli, input),
        Command::Decompose { input } => decompose(cli, input),
        Command::PwTable { input } => pw_table_cmd(cli, input),
        Command::Epoly { input } => epoly_cmd(cli, input),
        Command::Count { input, prime, brute } => count_cmd(cli, input, *prime, *brute),
        Command::Verify { input, chl } => verify_cmd(cli, input, *chl),
        Command::SamplePoint { input } => sample_point(cli, input),
        Command::Fibration { input, point } => fibration(cli, input, point.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            eprintln!("{}", msg.lines().next().unwrap_or("invalid arguments"));
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            if stdout.write_all(out.body.as_bytes()).is_err() {
                return ExitCode::from(2);
            }
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(InputError(msg)) => {
            eprintln!("error: {}", msg.replace('\n', " "));
            ExitCode::from(2)
        }
    }
}
