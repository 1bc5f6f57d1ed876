//! `torus`: build, verify, census and decode nested perfect toroidal arrays.
//!
//! Exit codes: 0 when the queried property holds (or the command succeeded),
//! 1 when a verification property fails (a witness is printed), 2 on usage or
//! parse errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use torus_core::gf2::BitMatrix;
use torus_core::io::{self, ArrayFormat};
use torus_core::pascal::{build_variant, RotationProfile};
use torus_core::tiles::matrix_from_index;
use torus_core::torus::{build_affine_array, AffineSpec, Modulo, WindowSpec};
use torus_core::verify::{self, CensusMode};
use torus_core::Error;

#[derive(Parser)]
#[command(
    name = "torus",
    about = "Nested perfect toroidal arrays: construction, verification, census, decoding",
    version
)]
struct Cli {
    /// Worker threads for verification (default: all cores; env TORUS_THREADS)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a column-rotated Pascal matrix with its borders annotated
    Matrix(MatrixArgs),
    /// Build an array of the affine family and write it to a file or stdout
    Generate(GenerateArgs),
    /// Check a single perfectness query against an array file
    Verify(VerifyArgs),
    /// Check nestedness (all subdivision levels) against an array file
    VerifyNested(VerifyNestedArgs),
    /// Generate family members and report distinctness and nestedness
    Census(CensusArgs),
    /// Locate a pattern by solving linear systems instead of scanning
    Decode(DecodeArgs),
}

#[derive(Args)]
struct MatrixArgs {
    /// Matrix size (a power of two)
    #[arg(long)]
    n: usize,
    /// Comma-separated rotation counts, or "zero"
    #[arg(long, default_value = "zero")]
    profile: String,
}

#[derive(Args)]
struct GenerateArgs {
    /// Tile size: 2 or 4
    #[arg(long)]
    n: usize,
    /// Comma-separated rotation counts, or "zero"
    #[arg(long, default_value = "zero")]
    profile: String,
    /// Offset matrix as a hex string of n*n bits (row-major, most significant
    /// first), or "zero"
    #[arg(long, default_value = "zero")]
    z: String,
    /// Output format: text or pbm
    #[arg(long, default_value = "text")]
    format: String,
    /// Output path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Window size as "rows,cols"
    #[arg(long)]
    window: String,
    /// Modulo as "rows,cols"
    #[arg(long)]
    modulo: String,
    /// Emit the report as JSON
    #[arg(long)]
    json: bool,
    /// Report path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Array file (text grid or PBM P1)
    file: PathBuf,
}

#[derive(Args)]
struct VerifyNestedArgs {
    /// Square form: tile size n (window n,n and modulo n,n; the file side
    /// must be n·2^(n²/2))
    #[arg(long, conflicts_with_all = ["window", "modulo"])]
    n: Option<usize>,
    /// General form: window size as "rows,cols"
    #[arg(long, requires = "modulo")]
    window: Option<String>,
    /// General form: modulo as "rows,cols"
    #[arg(long, requires = "window")]
    modulo: Option<String>,
    /// Emit the report as JSON
    #[arg(long)]
    json: bool,
    /// Report path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Array file (text grid or PBM P1)
    file: PathBuf,
}

#[derive(Args)]
struct CensusArgs {
    /// Tile size: 2 (exhaustive or sample) or 4 (sample only)
    #[arg(long)]
    n: usize,
    /// Generate every family member (n = 2 only)
    #[arg(long, conflicts_with = "sample")]
    exhaustive: bool,
    /// Generate this many seeded random members
    #[arg(long)]
    sample: Option<usize>,
    /// Seed for sampling
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit the report as JSON
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DecodeArgs {
    /// Tile size: 2 or 4
    #[arg(long)]
    n: usize,
    /// Comma-separated rotation counts, or "zero"
    #[arg(long, default_value = "zero")]
    profile: String,
    /// Offset matrix as hex, or "zero"
    #[arg(long, default_value = "zero")]
    z: String,
    /// Pattern rows of 0/1 separated by "/", e.g. 01/01 (k rows of n cells)
    #[arg(long)]
    pattern: String,
    /// Residue class as "i,j"
    #[arg(long)]
    class: String,
    /// Aligned-part index as "p,q" for levels below the top
    #[arg(long, default_value = "0,0")]
    part: String,
    /// Cross-check the answer against a brute-force scan of the part
    #[arg(long)]
    check: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("TORUS_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    match run_with_threads(threads, cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(feature = "parallel")]
fn run_with_threads(threads: Option<usize>, command: Command) -> Result<bool, Error> {
    match threads {
        Some(n) if n > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("cannot build thread pool: {e}")))?;
            pool.install(|| run(command))
        }
        _ => run(command),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_with_threads(threads: Option<usize>, command: Command) -> Result<bool, Error> {
    if threads.is_some_and(|n| n > 1) {
        eprintln!("warning: built without the parallel feature; --threads ignored");
    }
    run(command)
}

/// Returns whether the queried property holds (always true for commands that
/// only produce output).
fn run(command: Command) -> Result<bool, Error> {
    match command {
        Command::Matrix(args) => cmd_matrix(args),
        Command::Generate(args) => cmd_generate(args),
        Command::Verify(args) => cmd_verify(args),
        Command::VerifyNested(args) => cmd_verify_nested(args),
        Command::Census(args) => cmd_census(args),
        Command::Decode(args) => cmd_decode(args),
    }
}

fn parse_pair(text: &str, what: &str) -> Result<(usize, usize), Error> {
    let mut parts = text.split(',');
    let err = || Error::InvalidArgument(format!("{what} must be two comma-separated numbers, got {text:?}"));
    let a = parts.next().and_then(|p| p.trim().parse().ok()).ok_or_else(err)?;
    let b = parts.next().and_then(|p| p.trim().parse().ok()).ok_or_else(err)?;
    if parts.next().is_some() {
        return Err(err());
    }
    Ok((a, b))
}

fn parse_profile(text: &str, n: usize) -> Result<RotationProfile, Error> {
    if text == "zero" {
        return RotationProfile::zero(n);
    }
    let counts: Vec<usize> = text
        .split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad rotation count {p:?} in --profile")))
        })
        .collect::<Result<_, _>>()?;
    if counts.len() != n {
        return Err(Error::InvalidArgument(format!(
            "--profile has {} counts, expected {n}",
            counts.len()
        )));
    }
    RotationProfile::new(counts)
}

fn parse_offset(text: &str, n: usize) -> Result<BitMatrix, Error> {
    if text == "zero" {
        return Ok(BitMatrix::zeros(n, n));
    }
    let bits = n * n;
    if text.is_empty() || text.len() > bits.div_ceil(4) {
        return Err(Error::InvalidArgument(format!(
            "--z must be at most {} hex digits for n = {n}",
            bits.div_ceil(4)
        )));
    }
    let value = u64::from_str_radix(text, 16)
        .map_err(|_| Error::InvalidArgument(format!("--z {text:?} is not a hex number")))?;
    matrix_from_index(n, value)
}

fn parse_pattern(text: &str, n: usize) -> Result<BitMatrix, Error> {
    let rows: Vec<Vec<u8>> = text
        .split('/')
        .enumerate()
        .map(|(i, row)| {
            row.chars()
                .map(|c| match c {
                    '0' => Ok(0u8),
                    '1' => Ok(1u8),
                    other => Err(Error::InvalidArgument(format!(
                        "illegal character {other:?} in pattern row {}",
                        i + 1
                    ))),
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    if rows.is_empty() || rows.len() > n {
        return Err(Error::InvalidArgument(format!(
            "pattern must have between 1 and {n} rows"
        )));
    }
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument(format!("every pattern row must have {n} cells")));
    }
    Ok(BitMatrix::from_fn(rows.len(), n, |i, j| rows[i][j] == 1))
}

fn tile_exponent(n: usize) -> Result<u32, Error> {
    if !n.is_power_of_two() || n < 2 {
        return Err(Error::InvalidArgument(format!(
            "--n must be a power of two with n >= 2, got {n}"
        )));
    }
    Ok(n.trailing_zeros())
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_matrix(args: MatrixArgs) -> Result<bool, Error> {
    let d = tile_exponent(args.n).or_else(|_| {
        if args.n == 1 {
            Ok(0)
        } else {
            Err(Error::InvalidArgument(format!(
                "--n must be a power of two, got {}",
                args.n
            )))
        }
    })?;
    let profile = parse_profile(&args.profile, args.n)?;
    let variant = build_variant(d, profile)?;
    println!("{}", variant.matrix());
    let n = variant.size();
    let fmt_row = |values: Vec<usize>| {
        values
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    };
    println!("upper-border: {}", fmt_row((0..n).map(|j| variant.upper_border(j)).collect()));
    println!("lower-border: {}", fmt_row((0..n).map(|j| variant.lower_border(j)).collect()));
    println!("tau: {}", fmt_row(variant.tau()));
    Ok(true)
}

fn cmd_generate(args: GenerateArgs) -> Result<bool, Error> {
    let d = tile_exponent(args.n)?;
    let profile = parse_profile(&args.profile, args.n)?;
    let z = parse_offset(&args.z, args.n)?;
    let format: ArrayFormat = args.format.parse()?;
    let array = build_affine_array(&AffineSpec::new(d, profile, z)?)?;
    emit(&io::write_array(&array, format), args.out.as_ref())?;
    Ok(true)
}

fn cmd_verify(args: VerifyArgs) -> Result<bool, Error> {
    let (wr, wc) = parse_pair(&args.window, "--window")?;
    let (mr, mc) = parse_pair(&args.modulo, "--modulo")?;
    let array = io::load_array(&args.file)?;
    let report = verify::is_perfect(&array, WindowSpec::new(wr, wc)?, Modulo::new(mr, mc)?)?;
    let text = if args.json {
        let mut s = serde_json::to_string_pretty(&report)
            .map_err(|e| Error::Io(e.to_string()))?;
        s.push('\n');
        s
    } else {
        io::render_perfectness(&report)
    };
    emit(&text, args.out.as_ref())?;
    Ok(report.perfect)
}

fn cmd_verify_nested(args: VerifyNestedArgs) -> Result<bool, Error> {
    let array = io::load_array(&args.file)?;
    let report = match (args.n, args.window, args.modulo) {
        (Some(n), None, None) => verify::is_nested_perfect(&array, n)?,
        (None, Some(window), Some(modulo)) => {
            let (wr, wc) = parse_pair(&window, "--window")?;
            let (mr, mc) = parse_pair(&modulo, "--modulo")?;
            verify::is_nested(&array, WindowSpec::new(wr, wc)?, Modulo::new(mr, mc)?)?
        }
        _ => {
            return Err(Error::InvalidArgument(
                "pass either --n, or both --window and --modulo".into(),
            ))
        }
    };
    let text = if args.json {
        let mut s = serde_json::to_string_pretty(&report)
            .map_err(|e| Error::Io(e.to_string()))?;
        s.push('\n');
        s
    } else {
        io::render_nested(&report)
    };
    emit(&text, args.out.as_ref())?;
    Ok(report.nested)
}

fn cmd_census(args: CensusArgs) -> Result<bool, Error> {
    let mode = match (args.exhaustive, args.sample) {
        (true, None) => CensusMode::Exhaustive,
        (false, Some(count)) => CensusMode::Sample {
            count,
            seed: args.seed,
        },
        _ => {
            return Err(Error::InvalidArgument(
                "pass exactly one of --exhaustive or --sample <count>".into(),
            ))
        }
    };
    let report = verify::census_affine(args.n, mode)?;
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?
        );
    } else {
        print!("{}", io::render_census(&report));
    }
    Ok(report.all_good())
}

fn cmd_decode(args: DecodeArgs) -> Result<bool, Error> {
    let d = tile_exponent(args.n)?;
    let profile = parse_profile(&args.profile, args.n)?;
    let z = parse_offset(&args.z, args.n)?;
    let spec = AffineSpec::new(d, profile, z)?;
    let pattern = parse_pattern(&args.pattern, args.n)?;
    let class = parse_pair(&args.class, "--class")?;
    let part = parse_pair(&args.part, "--part")?;
    let level = pattern.rows();

    let position = verify::locate_pattern(&spec, level, part, &pattern, class)?;
    println!("position: ({},{})", position.0, position.1);

    if args.check {
        let array = build_affine_array(&spec)?;
        let part_side = args.n << (level * args.n / 2);
        let part_array = array.aligned_subarray(part_side, part)?;
        let hits = verify::find_occurrences(
            &part_array,
            &pattern,
            Modulo::new(args.n, args.n)?,
            class,
            usize::MAX,
        )?;
        if hits != vec![position] {
            eprintln!("check failed: scan found {hits:?}");
            return Ok(false);
        }
        println!("check: scan agrees");
    }
    Ok(true)
}
