//! The `hhh` command-line tool.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input,
//! 3 missing base case.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::cache::Store;
use crate::engine::{CoxeterDegrees, Engine, EvalMode};
use crate::error::{BaseCaseError, EngineError, VerifyError};
use crate::format::{format_series, Format};
use crate::oracle::Oracle;
use crate::selftest::{bundled_a0_table, Harness};
use crate::torus_base::{derive_ft4_a0, BaseCaseTable};
use crate::verify::compare_with_ideal;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_MISSING_BASE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "hhh", version, about = "Triply graded homology of 4-strand Coxeter braids")]
pub struct Cli {
    /// Worker threads (speed only; output is identical for any value)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Cache directory for engine nodes and oracle dimensions
    #[arg(long, global = true, env = "HHH_CACHE")]
    cache: Option<PathBuf>,
    /// Extra base-case files (hhh-basecase v1), may be repeated
    #[arg(long = "basecases", global = true)]
    basecases: Vec<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct DegreeArgs {
    /// d1,d2,d3,d4 with 0 <= d1 <= d2 <= d3 <= d4
    #[arg(long, value_parser = parse_degrees)]
    d: [u32; 4],
}

#[derive(Subcommand, Debug)]
enum Command {
    /// HHH of the Coxeter braid beta(d1, d2, d3, d4)
    Hhh {
        #[command(flatten)]
        d: DegreeArgs,
        /// Specialize to a = 0
        #[arg(long)]
        a0: bool,
        /// Print the q-expansion to this order instead of the closed form
        #[arg(long)]
        series: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Bigraded Hilbert function of the ideal J(d)
    Hilb {
        #[command(flatten)]
        d: DegreeArgs,
        #[arg(long = "max-total")]
        max_total: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Compare the engine (a = 0) against the ideal oracle
    Verify {
        #[command(flatten)]
        d: DegreeArgs,
        #[arg(long = "max-total")]
        max_total: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Manage HHH(FT4^n) base cases
    Basecase {
        #[command(subcommand)]
        action: BasecaseAction,
    },
    /// Run the acceptance suite
    Selftest,
}

#[derive(Subcommand, Debug)]
enum BasecaseAction {
    /// Rebuild the a = 0 layer of HHH(FT4^n) from the oracle
    Derive {
        #[arg(long)]
        n: u32,
        /// Oracle truncation; defaults to 6n + 5
        #[arg(long)]
        order: Option<u32>,
    },
    /// Validate a base-case file and print it in canonical form
    Import { file: PathBuf },
    /// List available entries (bundled plus --basecases files)
    List,
}

fn parse_degrees(s: &str) -> Result<[u32; 4], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("expected four comma-separated integers, got `{s}`"));
    }
    let mut d = [0u32; 4];
    for (slot, p) in d.iter_mut().zip(parts) {
        *slot = p.trim().parse().map_err(|_| format!("bad degree `{p}`"))?;
    }
    Ok(d)
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl ToString) -> Self {
        Failure {
            code: EXIT_INVALID,
            message: message.to_string(),
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let code = match e {
            EngineError::MissingBaseCase { .. } => EXIT_MISSING_BASE,
            EngineError::InvalidDegrees(_) => EXIT_INVALID,
            EngineError::Cache(_) => EXIT_INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Engine(e) => e.into(),
            VerifyError::AmbiguousShift(_) => Failure {
                code: EXIT_MISMATCH,
                message: e.to_string(),
            },
            other => Failure::invalid(other),
        }
    }
}

impl From<BaseCaseError> for Failure {
    fn from(e: BaseCaseError) -> Self {
        Failure::invalid(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::invalid(e)
    }
}

struct Context {
    store: Option<Store>,
    bases: BaseCaseTable,
}

impl Context {
    fn engine(&self) -> Engine {
        Engine::with_bases(self.bases.clone()).with_store(self.store.clone())
    }

    fn oracle(&self) -> Oracle {
        Oracle::new().with_store(self.store.clone())
    }
}

fn degrees(d: &DegreeArgs) -> Result<CoxeterDegrees, Failure> {
    Ok(CoxeterDegrees::new(d.d)?)
}

fn expansion_text(x: &crate::ring::GradedSeries, order: u32, format: Format) -> Result<String, Failure> {
    let table = x.expand(order);
    match format {
        Format::Text => {
            let mut s = format!("expansion v1 order {order}\n");
            for ((q, t, a), c) in table.entries() {
                s.push_str(&format!("{c} {q} {t} {a}\n"));
            }
            s.push_str("end\n");
            Ok(s)
        }
        Format::Json => {
            let terms: Vec<_> = table
                .entries()
                .map(|((q, t, a), c)| serde_json::json!({"coef": c.to_string(), "q": q, "t": t, "a": a}))
                .collect();
            let v = serde_json::json!({"format": "expansion v1", "order": order, "terms": terms});
            Ok(serde_json::to_string_pretty(&v).expect("expansion serializes") + "\n")
        }
        Format::Latex => Err(Failure::invalid("--series supports text and json output")),
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let store = match &cli.cache {
        Some(dir) => Some(Store::open(dir).map_err(Failure::invalid)?),
        None => None,
    };
    let mut bases = bundled_a0_table();
    for path in &cli.basecases {
        bases.merge(&BaseCaseTable::import(path)?)?;
    }
    let ctx = Context { store, bases };
    match cli.command {
        Command::Hhh { d, a0, series, format } => {
            let d = degrees(&d)?;
            let mode = if a0 { EvalMode::A0 } else { EvalMode::FullA };
            let x = ctx.engine().hhh_coxeter(&d, mode)?;
            let text = match series {
                Some(order) => expansion_text(&x, order, format)?,
                None => format_series(&x, format),
            };
            out.write_all(text.as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Hilb { d, max_total, format } => {
            let d = degrees(&d)?;
            let t = ctx.oracle().hilb_table(&d, max_total).map_err(Failure::invalid)?;
            let text = match format {
                Format::Text => t.to_text(),
                Format::Json => t.to_json() + "\n",
                Format::Latex => return Err(Failure::invalid("hilb supports text and json output")),
            };
            out.write_all(text.as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Verify { d, max_total, format } => {
            let d = degrees(&d)?;
            let r = compare_with_ideal(&ctx.engine(), &ctx.oracle(), &d, max_total)?;
            let text = match format {
                Format::Text => r.to_text(),
                Format::Json => r.to_json() + "\n",
                Format::Latex => return Err(Failure::invalid("verify supports text and json output")),
            };
            out.write_all(text.as_bytes())?;
            Ok(if r.verdict { EXIT_OK } else { EXIT_MISMATCH })
        }
        Command::Basecase { action } => match action {
            BasecaseAction::Derive { n, order } => {
                if n == 0 {
                    return Err(Failure::invalid("n must be at least 1"));
                }
                let order = order.unwrap_or(6 * n + 5);
                let d = CoxeterDegrees::new([n; 4])?;
                let table = ctx.oracle().hilb_table(&d, order).map_err(Failure::invalid)?;
                let r = derive_ft4_a0(&table, order).map_err(|e| match e {
                    BaseCaseError::NotStabilized { .. } | BaseCaseError::NegativeCoefficient { .. } => Failure {
                        code: EXIT_MISMATCH,
                        message: e.to_string(),
                    },
                    other => Failure::invalid(other),
                })?;
                let mut t = BaseCaseTable::default();
                t.insert(r.into_entry(n))?;
                out.write_all(t.to_text().as_bytes())?;
                Ok(EXIT_OK)
            }
            BasecaseAction::Import { file } => {
                let t = BaseCaseTable::import(&file)?;
                out.write_all(t.to_text().as_bytes())?;
                Ok(EXIT_OK)
            }
            BasecaseAction::List => {
                for e in ctx.bases.entries() {
                    let prov = e.provenance.as_deref().unwrap_or("-");
                    writeln!(out, "FT4 n {} mode {} checksum {} provenance {prov}", e.n, e.mode, e.checksum())?;
                }
                Ok(EXIT_OK)
            }
        },
        Command::Selftest => {
            let h = Harness::new(true, ctx.store.clone());
            let mut ok = true;
            for r in h.run_all() {
                log::info!("{}", r.line_with_time());
                writeln!(out, "{}", r.line())?;
                ok &= r.pass;
            }
            Ok(if ok { EXIT_OK } else { EXIT_MISMATCH })
        }
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit code. Diagnostics go to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let threads = cli.threads;
    let work = move || {
        let mut buf = Vec::new();
        let r = execute(cli, &mut buf);
        (r, buf)
    };
    let (result, buf) = match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(work),
            Err(e) => (Err(Failure::invalid(e)), Vec::new()),
        },
        None => work(),
    };
    if let Err(e) = out.write_all(&buf).and_then(|_| out.flush()) {
        let _ = writeln!(err, "error: {e}");
        return EXIT_INVALID;
    }
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
