//! `dcover`: generate double cover instances, check regularity at points,
//! tabulate the codimension census and audit the multiplicity ledger.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dcover::census::{ledger_audit, prop51_bound_check, CensusTable, LedgerAudit, LedgerExtras, LedgerStatus};
use dcover::regularity::{
    generate_instance, random_point, run_full_report, sample_points, CheckOptions, DoubleCoverInstance, GenConfig,
    ImposedPoint, ReportHeader, Verdict,
};
use dcover::PrimeField;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

const EXIT_ERROR: u8 = 1;
const EXIT_FAIL: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

/// Separates the point-sampling stream of `check` from the one used by `gen`.
const SAMPLING_STREAM: u64 = 0x5a4d_504c_4550_4f49;

#[derive(Parser)]
#[command(name = "dcover", version, about = "Regularity verification for Fano double covers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit the version and timestamp header.
    #[arg(long)]
    no_header: bool,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random instance with dense coefficients.
    Gen(GenArgs),
    /// Check the regularity conditions at points of an instance.
    Check(CheckArgs),
    /// Tabulate the codimension bounds for every strict (M, m, l) in a range.
    Census(CensusArgs),
    /// Audit the multiplicity ledger and the multiplicity bound.
    Audit(AuditArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "M")]
    big_m: u32,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    l: u32,
    #[arg(long, default_value_t = 32003)]
    p: u32,
    /// Allow M < 6 or m + l != M + 1; the instance is marked as toy.
    #[arg(long)]
    toy: bool,
    /// A point the instance must pass through, as comma-separated coordinates.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    point: Option<Vec<u32>>,
    /// Make g vanish at the requested point (the origin if none is given).
    #[arg(long)]
    through_branch_point: bool,
    /// Additional random points imposed on Q.
    #[arg(long, default_value_t = 0)]
    points: usize,
    /// How many of the random points lie on the branch divisor.
    #[arg(long, default_value_t = 0)]
    branch_points: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct CheckArgs {
    /// Instance file (JSON).
    instance: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample this many points of Q instead of using the points in the file.
    #[arg(long)]
    points: Option<usize>,
    #[arg(long, default_value_t = 20)]
    lambda_samples: usize,
    /// Random hyperplanes in addition to the tangent one.
    #[arg(long, default_value_t = 5)]
    hyperplanes: usize,
    #[arg(long, default_value_t = 12)]
    dcap: u32,
    #[arg(long, default_value_t = 4)]
    saturation: u32,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long, default_value_t = 6)]
    m_min: u64,
    #[arg(long, default_value_t = 20)]
    m_max: u64,
    /// Aligned text table instead of JSON.
    #[arg(long)]
    text: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long, default_value_t = 4)]
    m: u64,
    #[arg(long, default_value_t = 1)]
    n: u64,
    /// `mult_o D_T` for a single ledger cell (rational, e.g. 3/2).
    #[arg(long, requires = "b")]
    a: Option<String>,
    /// `mult_{B_T} D_T^+` for a single ledger cell.
    #[arg(long, requires = "a")]
    b: Option<String>,
    #[arg(long)]
    mult_o_d: Option<String>,
    #[arg(long)]
    excess: Option<String>,
    #[arg(long)]
    mult_b_d_plus: Option<String>,
    /// Largest value of a and b in the sweep.
    #[arg(long, default_value_t = 6)]
    grid_max: u64,
    /// Sweep step is 1 / grid_den.
    #[arg(long, default_value_t = 2)]
    grid_den: u64,
    /// Seeded random cells of the multiplicity bound check.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    #[serde(skip_serializing_if = "Option::is_none")]
    header: Option<ReportHeader>,
    #[serde(flatten)]
    body: T,
}

fn header(output: &Output) -> Option<ReportHeader> {
    (!output.no_header).then(|| ReportHeader {
        tool: "dcover".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
    })
}

fn write_out(output: &Output, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn write_json<T: Serialize>(output: &Output, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_out(output, &text)
}

fn configure_threads(output: &Output) -> Result<()> {
    if let Some(t) = output.threads {
        if t == 0 {
            bail!("--threads must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    Ok(())
}

fn rational(name: &str, text: &str) -> Result<BigRational> {
    let parse = |s: &str| s.trim().parse::<BigInt>().with_context(|| format!("{name}: `{text}` is not a rational number"));
    match text.split_once('/') {
        Some((n, d)) => {
            let d = parse(d)?;
            if d == BigInt::from(0) {
                bail!("{name}: zero denominator");
            }
            Ok(BigRational::new(parse(n)?, d))
        }
        None => Ok(BigRational::from_integer(parse(text)?)),
    }
}

fn cmd_gen(args: &GenArgs) -> Result<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let n = args.big_m as usize + 1;
    let field = PrimeField::new(args.p as u64)?;
    if args.branch_points > args.points {
        bail!("--branch-points exceeds --points");
    }
    let mut imposed = Vec::new();
    match (&args.point, args.through_branch_point) {
        (Some(coords), on_branch) => imposed.push(ImposedPoint { coords: coords.clone(), on_branch }),
        (None, true) => imposed.push(ImposedPoint { coords: vec![0; n], on_branch: true }),
        (None, false) => {}
    }
    for i in 0..args.points {
        imposed.push(ImposedPoint { coords: random_point(&field, n, &mut rng), on_branch: i < args.branch_points });
    }
    let cfg = GenConfig {
        big_m: args.big_m,
        m: args.m,
        l: args.l,
        p: args.p,
        toy: args.toy,
        seed: args.seed,
        imposed,
    };
    let inst = generate_instance(&cfg, &mut rng)?;
    let mut text = inst.to_json();
    text.push('\n');
    write_out(&args.output, &text)?;
    Ok(0)
}

fn cmd_check(args: &CheckArgs) -> Result<u8> {
    configure_threads(&args.output)?;
    let text = fs::read_to_string(&args.instance).with_context(|| format!("cannot read {}", args.instance.display()))?;
    let inst = DoubleCoverInstance::from_json(&text)?;
    let points = match args.points {
        Some(k) => sample_points(&inst, k, &mut ChaCha8Rng::seed_from_u64(args.seed ^ SAMPLING_STREAM))?,
        None => inst.points.clone(),
    };
    let opts = CheckOptions {
        seed: args.seed,
        lambda_samples: args.lambda_samples,
        hyperplanes: args.hyperplanes,
        dcap: args.dcap,
        saturation: args.saturation,
    };
    let mut report = run_full_report(&inst, &points, &opts);
    report.header = header(&args.output);
    write_json(&args.output, &report)?;
    Ok(match report.verdict() {
        Verdict::Pass => 0,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
        Verdict::Fail => EXIT_FAIL,
    })
}

fn cmd_census(args: &CensusArgs) -> Result<u8> {
    configure_threads(&args.output)?;
    let table = CensusTable::build(args.m_min, args.m_max)?;
    if args.text {
        write_out(&args.output, &table.to_text())?;
    } else {
        write_json(&args.output, &Envelope { header: header(&args.output), body: &table })?;
    }
    Ok(if table.all_pass { 0 } else { EXIT_FAIL })
}

#[derive(Serialize)]
struct LedgerCell {
    a: String,
    b: String,
    a_plus_2b: String,
    status: LedgerStatus,
}

#[derive(Serialize)]
struct LedgerSweep {
    m: u64,
    n: u64,
    deg_y_m: String,
    /// `4n`: the sweep is consistent exactly when `a + 2b` does not exceed it.
    threshold: String,
    largest_consistent: Option<String>,
    smallest_contradictory: Option<String>,
    /// Every cell agrees with the reduced inequality `a + 2b <= 4n`.
    boundary_consistent: bool,
    consistent: usize,
    contradictory: usize,
    cells: Vec<LedgerCell>,
}

#[derive(Serialize)]
struct BoundCell {
    n: String,
    nu: String,
    mult_b: String,
    holds: bool,
}

#[derive(Serialize)]
struct BoundSweep {
    seed: u64,
    /// Every cell holds exactly when `nu + mult_B <= 2n`.
    boundary_consistent: bool,
    holds: usize,
    violated: usize,
    cells: Vec<BoundCell>,
}

#[derive(Serialize)]
struct AuditReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    cell: Option<LedgerAudit>,
    ledger: LedgerSweep,
    bound: BoundSweep,
}

fn ledger_sweep(args: &AuditArgs) -> Result<LedgerSweep> {
    if args.grid_den == 0 {
        bail!("--grid-den must be positive");
    }
    let steps = args.grid_max * args.grid_den;
    let threshold = BigRational::from_integer(BigInt::from(4 * args.n));
    let mut cells = Vec::new();
    let mut largest_ok: Option<BigRational> = None;
    let mut smallest_bad: Option<BigRational> = None;
    let mut boundary_consistent = true;
    let mut deg_y_m = String::new();
    for i in 0..=steps {
        for j in 0..=steps {
            let a = BigRational::new(BigInt::from(i), BigInt::from(args.grid_den));
            let b = BigRational::new(BigInt::from(j), BigInt::from(args.grid_den));
            let audit = ledger_audit(args.m, args.n, &a, &b, None)?;
            deg_y_m = audit.deg_y_m.clone();
            let s = &a + &b * BigInt::from(2);
            boundary_consistent &= audit.is_consistent() == (s <= threshold);
            if audit.is_consistent() {
                if largest_ok.as_ref().map_or(true, |x| &s > x) {
                    largest_ok = Some(s.clone());
                }
            } else if smallest_bad.as_ref().map_or(true, |x| &s < x) {
                smallest_bad = Some(s.clone());
            }
            cells.push(LedgerCell { a: a.to_string(), b: b.to_string(), a_plus_2b: s.to_string(), status: audit.status });
        }
    }
    let consistent = cells.iter().filter(|c| c.status == LedgerStatus::Consistent).count();
    Ok(LedgerSweep {
        m: args.m,
        n: args.n,
        deg_y_m,
        threshold: threshold.to_string(),
        largest_consistent: largest_ok.map(|x| x.to_string()),
        smallest_contradictory: smallest_bad.map(|x| x.to_string()),
        boundary_consistent,
        consistent,
        contradictory: cells.len() - consistent,
        cells,
    })
}

fn bound_sweep(args: &AuditArgs) -> BoundSweep {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut cells = Vec::new();
    let mut boundary_consistent = true;
    for _ in 0..args.samples {
        let n = BigRational::from_integer(BigInt::from(rng.gen_range(1..=6)));
        let den = rng.gen_range(1..=4i64);
        let two_n_scaled = 2 * n.to_integer().try_into().unwrap_or(0i64) * den;
        // Sums land on, just below and just above the boundary.
        let total = (two_n_scaled + rng.gen_range(-2..=2i64)).max(0);
        let nu_num = rng.gen_range(0..=total);
        let nu = BigRational::new(BigInt::from(nu_num), BigInt::from(den));
        let mult_b = BigRational::new(BigInt::from(total - nu_num), BigInt::from(den));
        let holds = prop51_bound_check(&n, &nu, &mult_b);
        boundary_consistent &= holds == (&nu + &mult_b <= &n * BigInt::from(2));
        cells.push(BoundCell { n: n.to_string(), nu: nu.to_string(), mult_b: mult_b.to_string(), holds });
    }
    let holds = cells.iter().filter(|c| c.holds).count();
    BoundSweep { seed: args.seed, boundary_consistent, holds, violated: cells.len() - holds, cells }
}

fn cmd_audit(args: &AuditArgs) -> Result<u8> {
    let cell = match (&args.a, &args.b) {
        (Some(a), Some(b)) => {
            let extras = match (&args.mult_o_d, &args.excess, &args.mult_b_d_plus) {
                (Some(x), Some(e), Some(y)) => Some(LedgerExtras {
                    mult_o_d: rational("mult-o-d", x)?,
                    excess: rational("excess", e)?,
                    mult_b_d_plus: rational("mult-b-d-plus", y)?,
                }),
                (None, None, None) => None,
                _ => bail!("--mult-o-d, --excess and --mult-b-d-plus go together"),
            };
            Some(ledger_audit(args.m, args.n, &rational("a", a)?, &rational("b", b)?, extras.as_ref())?)
        }
        _ => None,
    };
    let report = AuditReport { cell, ledger: ledger_sweep(args)?, bound: bound_sweep(args) };
    write_json(&args.output, &Envelope { header: header(&args.output), body: &report })?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Check(a) => cmd_check(a),
        Command::Census(a) => cmd_census(a),
        Command::Audit(a) => cmd_audit(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
