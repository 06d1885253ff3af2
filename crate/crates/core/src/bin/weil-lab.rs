use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use weil_lab::arith::odd_primes_in;
use weil_lab::groups::{classify_prime, EnhancedLagrangian, SymplecticVector};
use weil_lab::harness::{
    selftest, universal_sweep, value_distribution, write_distribution_csv, write_jsonl, write_sweep_csv,
    CharacterPolicy, PrimeContext, RealizationPolicy, SweepConfig,
};
use weil_lab::hecke::{eigenfunctions, write_eigenfunction_csv, HeckeEigenfunction};
use weil_lab::linalg::write_matrix;
use weil_lab::{CatMap, Error, Frame};

#[derive(Parser)]
#[command(
    name = "weil-lab",
    version,
    about = "Hecke eigenfunctions of quantized cat maps over F_p"
)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for prime-level parallelism (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Directory for artifacts. Without it, tables go to stdout and the
    /// summary to stderr.
    #[arg(long, global = true, env = "WEIL_LAB_OUT")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Realizations {
    Defining,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Characters {
    Simple,
    All,
}

#[derive(Clone, Copy)]
struct PrimeRange(u32, u32);

fn parse_range(s: &str) -> Result<PrimeRange, String> {
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (s, s),
    };
    let lo: u32 = lo
        .trim()
        .parse()
        .map_err(|_| format!("bad prime range {s:?}, expected lo..hi"))?;
    let hi: u32 = hi
        .trim()
        .parse()
        .map_err(|_| format!("bad prime range {s:?}, expected lo..hi"))?;
    if lo > hi {
        return Err(format!("empty prime range {s:?}"));
    }
    Ok(PrimeRange(lo, hi))
}

fn parse_matrix(s: &str) -> Result<CatMap, String> {
    s.parse::<CatMap>().map_err(|e| e.to_string())
}

fn parse_realization(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("bad realization {s:?}, expected x:y"))?;
    let x = a.trim().parse().map_err(|_| format!("bad realization {s:?}"))?;
    let y = b.trim().parse().map_err(|_| format!("bad realization {s:?}"))?;
    Ok((x, y))
}

#[derive(Subcommand)]
enum Command {
    /// Split / inert / ramified type of each prime.
    Classify {
        #[arg(long, value_parser = parse_matrix, default_value = "2,1;1,1")]
        matrix: CatMap,
        #[arg(long, value_parser = parse_range)]
        primes: PrimeRange,
    },
    /// Character decomposition at one prime, with optional dumps.
    Spectrum {
        #[arg(long, value_parser = parse_matrix, default_value = "2,1;1,1")]
        matrix: CatMap,
        #[arg(long)]
        prime: u32,
        /// Realization vector σ as x:y (default: the defining 0:1).
        #[arg(long, value_parser = parse_realization)]
        realization: Option<(i64, i64)>,
        /// Write the Weil operators of the torus elements as text matrices.
        #[arg(long)]
        dump_operators: bool,
    },
    /// Sup-norm bound over a prime range.
    Sweep {
        #[arg(long, value_parser = parse_matrix, default_value = "2,1;1,1")]
        matrix: CatMap,
        #[arg(long, value_parser = parse_range)]
        primes: PrimeRange,
        #[arg(long, value_enum, default_value_t = Realizations::Defining)]
        realizations: Realizations,
        #[arg(long, value_enum, default_value_t = Characters::All)]
        characters: Characters,
        /// Realizations per prime re-extracted from scratch for comparison.
        #[arg(long, default_value_t = 1)]
        agreement_samples: usize,
    },
    /// Distribution of |Ψ(x)| over inert primes against the SU(2) trace law.
    Distribution {
        #[arg(long, value_parser = parse_matrix, default_value = "2,1;1,1")]
        matrix: CatMap,
        #[arg(long, value_parser = parse_range)]
        primes: PrimeRange,
    },
    /// Fast internal consistency checks.
    Selftest {
        #[arg(long, value_parser = parse_matrix, default_value = "2,1;1,1")]
        matrix: CatMap,
        #[arg(long, value_parser = parse_range, default_value = "5..13")]
        primes: PrimeRange,
    },
}

/// Where tables and the human summary go.
struct Sink {
    out: Option<PathBuf>,
}

impl Sink {
    fn table(&self, name: &str) -> io::Result<Box<dyn Write>> {
        match &self.out {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                let path = dir.join(name);
                info!("writing {}", path.display());
                Ok(Box::new(BufWriter::new(File::create(path)?)))
            }
            None => Ok(Box::new(io::stdout().lock())),
        }
    }

    fn summary(&self) -> Box<dyn Write> {
        if self.out.is_some() {
            Box::new(io::stdout().lock())
        } else {
            Box::new(io::stderr().lock())
        }
    }
}

fn ext(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "jsonl",
    }
}

fn run(cli: Cli) -> Result<bool, Error> {
    let sink = Sink { out: cli.out.clone() };
    let io_err = |e: io::Error| Error::Harness(e.into());
    match cli.command {
        Command::Classify { matrix, primes } => {
            let mut rows = Vec::new();
            for p in odd_primes_in(primes.0, primes.1) {
                rows.push((p, classify_prime(&matrix, p)?));
            }
            let mut w = sink.table(&format!("classify.{}", ext(cli.format))).map_err(io_err)?;
            match cli.format {
                Format::Csv => {
                    writeln!(w, "p,kind").map_err(io_err)?;
                    for (p, k) in &rows {
                        writeln!(w, "{p},{k}").map_err(io_err)?;
                    }
                }
                Format::Json => {
                    let items: Vec<_> = rows
                        .iter()
                        .map(|(p, k)| serde_json::json!({"p": p, "kind": k}))
                        .collect();
                    write_jsonl(&mut w, &items).map_err(io_err)?;
                }
            }
            Ok(true)
        }
        Command::Spectrum {
            matrix,
            prime,
            realization,
            dump_operators,
        } => {
            let ctx = PrimeContext::new(&matrix, prime)?;
            let frame = match realization {
                None => ctx.defining,
                Some((x, y)) => {
                    let l = EnhancedLagrangian::new(SymplecticVector::from_ints(x, y, prime))?;
                    Frame::standard(l)
                }
            };
            let spectrum = ctx.spectrum(&frame)?;
            let mut s = sink.summary();
            writeln!(
                s,
                "p = {prime} ({}), torus order {}, realization {}",
                spectrum.kind,
                spectrum.torus_order,
                frame.lagrangian().label()
            )
            .map_err(io_err)?;
            writeln!(s, "character,multiplicity,trace,indeterminate").map_err(io_err)?;
            for sp in &spectrum.spaces {
                writeln!(
                    s,
                    "{},{},{:.6},{}",
                    sp.index, sp.multiplicity, sp.trace, sp.indeterminate
                )
                .map_err(io_err)?;
            }
            drop(s);
            let functions: Vec<HeckeEigenfunction> = spectrum
                .spaces
                .iter()
                .filter(|sp| sp.multiplicity > 0 && !sp.indeterminate)
                .flat_map(|sp| eigenfunctions(&spectrum, sp.index).unwrap_or_default())
                .collect();
            let mut w = sink
                .table(&format!("eigenfunctions.{}", ext(cli.format)))
                .map_err(io_err)?;
            match cli.format {
                Format::Csv => write_eigenfunction_csv(&mut w, &functions).map_err(io_err)?,
                Format::Json => {
                    let rows: Vec<_> = functions.iter().flat_map(weil_lab::hecke::eigenfunction_rows).collect();
                    write_jsonl(&mut w, &rows).map_err(io_err)?;
                }
            }
            drop(w);
            if dump_operators {
                dump_torus_operators(&sink, &ctx, &frame).map_err(io_err)?;
            }
            Ok(spectrum.total_multiplicity() == prime as usize && !spectrum.has_indeterminate())
        }
        Command::Sweep {
            matrix,
            primes,
            realizations,
            characters,
            agreement_samples,
        } => {
            let mut cfg = SweepConfig::new(matrix, primes.0, primes.1);
            cfg.realizations = match realizations {
                Realizations::Defining => RealizationPolicy::Defining,
                Realizations::All => RealizationPolicy::All,
            };
            cfg.characters = match characters {
                Characters::Simple => CharacterPolicy::Simple,
                Characters::All => CharacterPolicy::All,
            };
            cfg.seed = cli.seed;
            cfg.jobs = cli.jobs;
            cfg.agreement_samples = agreement_samples;
            let report = universal_sweep(&cfg)?;
            let mut w = sink.table(&format!("sweep.{}", ext(cli.format))).map_err(io_err)?;
            match cli.format {
                Format::Csv => write_sweep_csv(&mut w, &report.records).map_err(io_err)?,
                Format::Json => write_jsonl(&mut w, &report.records).map_err(io_err)?,
            }
            drop(w);
            let mut s = sink.summary();
            writeln!(s, "p,kind,records,max_sup,p^(3/8)").map_err(io_err)?;
            for sm in &report.summaries {
                writeln!(
                    s,
                    "{},{},{},{:.6},{:.6}",
                    sm.p, sm.kind, sm.records, sm.max_sup, sm.p_three_eighths
                )
                .map_err(io_err)?;
            }
            for sk in &report.skipped {
                writeln!(s, "skipped p = {}: {}", sk.p, sk.reason).map_err(io_err)?;
            }
            for f in &report.failures {
                writeln!(s, "FAILED p = {}: {}", f.p, f.reason).map_err(io_err)?;
            }
            let worst = report.agreement.iter().map(|a| a.deviation).fold(0.0, f64::max);
            writeln!(
                s,
                "agreement checks: {} (max deviation {worst:.2e})",
                report.agreement.len()
            )
            .map_err(io_err)?;
            let ok = report.gating_pass();
            writeln!(s, "gating: {}", if ok { "PASS" } else { "FAIL" }).map_err(io_err)?;
            Ok(ok)
        }
        Command::Distribution { matrix, primes } => {
            let mut cfg = SweepConfig::new(matrix, primes.0, primes.1);
            cfg.seed = cli.seed;
            cfg.jobs = cli.jobs;
            let report = value_distribution(&cfg)?;
            let mut w = sink
                .table(&format!("distribution.{}", ext(cli.format)))
                .map_err(io_err)?;
            match cli.format {
                Format::Csv => write_distribution_csv(&mut w, &report).map_err(io_err)?,
                Format::Json => write_jsonl(&mut w, std::slice::from_ref(&report)).map_err(io_err)?,
            }
            drop(w);
            let mut s = sink.summary();
            writeln!(s, "inert primes: {:?}", report.primes).map_err(io_err)?;
            writeln!(s, "excluded (split or ramified): {:?}", report.excluded).map_err(io_err)?;
            writeln!(s, "samples: {}, KS distance: {:.4}", report.samples, report.ks_distance).map_err(io_err)?;
            for k in 0..4 {
                writeln!(
                    s,
                    "E|Ψ|^{} = {:.4}  (reference {:.4})",
                    k + 1,
                    report.moments[k],
                    report.reference_moments[k]
                )
                .map_err(io_err)?;
            }
            Ok(true)
        }
        Command::Selftest { matrix, primes } => {
            let ps = odd_primes_in(primes.0, primes.1);
            let lines = selftest(&matrix, &ps, cli.seed);
            let mut s = sink.summary();
            for l in &lines {
                writeln!(
                    s,
                    "{} {} p={} value={:.3e} tol={:.0e}",
                    if l.pass { "PASS" } else { "FAIL" },
                    l.name,
                    l.p,
                    l.value,
                    l.tolerance
                )
                .map_err(io_err)?;
            }
            Ok(lines.iter().all(|l| l.pass))
        }
    }
}

fn dump_torus_operators(sink: &Sink, ctx: &PrimeContext, frame: &Frame) -> io::Result<()> {
    let dir: &Path = match &sink.out {
        Some(d) => d,
        None => {
            let mut s = io::stderr().lock();
            writeln!(s, "--dump-operators needs --out; skipped")?;
            return Ok(());
        }
    };
    let sub = dir.join("operators");
    fs::create_dir_all(&sub)?;
    for (j, g) in ctx.torus.elements().iter().enumerate() {
        let m = ctx.system.weil_op(frame, g).matrix;
        let mut f = BufWriter::new(File::create(sub.join(format!("rho_{j:04}.txt")))?);
        write_matrix(&mut f, &m)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
