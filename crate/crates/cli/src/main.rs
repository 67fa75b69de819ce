use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use corkcalc::certificate::{Certificate, Check};
use corkcalc::group::document::GroupDoc;
use corkcalc::pipeline::{self, Command, LedgerMode, Limits, PipelineRequest, DEFAULT_BALL};

/// Wreath-product embeddings, block hat actions and cork-twist ledgers,
/// each run emitting a replayable JSON certificate.
///
/// CORKCALC_MAX_ORDER overrides the cap on exhaustively enumerated groups.
#[derive(Parser)]
#[command(name = "corkcalc", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Prime-cyclic series and the iterated wreath embedding of a group.
    Embed(Params),
    /// The block for Z_{n_1}≀…≀Z_{n_r}: (P1) after gluing, (P2) after amplification.
    Block(Params),
    /// Full twist ledger with its effectiveness certificate.
    Cork(Params),
    /// Replay a certificate and compare it byte for byte.
    Verify {
        certificate: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in groups.
    Catalog {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Weak,
    Equivariant,
    SteinShadow,
}

#[derive(Args)]
struct Params {
    /// Catalog name, JSON group document, or path to one.
    #[arg(long)]
    group: Option<String>,
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Number of elements of Z^m ≀ G to label.
    #[arg(long, default_value_t = DEFAULT_BALL)]
    ball: usize,
    /// Verification window for countable leaf sets.
    #[arg(long, default_value_t = corkcalc::blocks::DEFAULT_WINDOW)]
    window: i64,
    #[arg(long, value_enum, default_value_t = ModeArg::Weak)]
    mode: ModeArg,
    #[arg(long, default_value_t = Limits::default().max_r)]
    max_r: usize,
    #[arg(long, default_value_t = Limits::default().max_n)]
    max_n: usize,
    #[arg(long, default_value_t = Limits::default().max_m)]
    max_m: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn group_doc(arg: &str) -> Result<GroupDoc, String> {
    let path = PathBuf::from(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        return GroupDoc::parse(&text).map_err(|e| e.to_string());
    }
    GroupDoc::from_argument(arg).map_err(|e| e.to_string())
}

fn request(command: Command, p: &Params) -> Result<PipelineRequest, String> {
    let group = p.group.as_deref().map(group_doc).transpose()?;
    let mode = match p.mode {
        ModeArg::Weak => LedgerMode::Weak,
        ModeArg::Equivariant => LedgerMode::Equivariant,
        ModeArg::SteinShadow => LedgerMode::SteinShadow,
    };
    Ok(PipelineRequest {
        command,
        group,
        n: p.n.clone(),
        m: p.m,
        ball: p.ball,
        window: p.window,
        mode,
        limits: Limits { max_r: p.max_r, max_n: p.max_n, max_m: p.max_m },
    })
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn run_params(command: Command, p: &Params) -> (Certificate, Option<PathBuf>) {
    let cert = match request(command, p) {
        Ok(req) => pipeline::run(&req, now()),
        Err(e) => {
            let mut c = Certificate::new();
            c.checks.push(Check::fail("request parses", "arguments", e));
            c.timestamp = now();
            c
        }
    };
    (cert, p.out.clone())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cert, out) = match &cli.command {
        Cmd::Embed(p) => run_params(Command::Embed, p),
        Cmd::Block(p) => run_params(Command::Block, p),
        Cmd::Cork(p) => run_params(Command::Cork, p),
        Cmd::Catalog { out } => {
            let req = PipelineRequest::new(Command::Catalog);
            (pipeline::run(&req, now()), out.clone())
        }
        Cmd::Verify { certificate, out } => {
            let cert = match std::fs::read_to_string(certificate) {
                Ok(text) => pipeline::verify(&text),
                Err(e) => {
                    let mut c = Certificate::new();
                    c.checks.push(Check::fail("certificate readable", certificate.display().to_string(), e.to_string()));
                    c
                }
            };
            (cert, out.clone())
        }
    };
    let text = cert.to_json();
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, &text) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        // a closed pipe (`| head`) is not a failure of the run
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
        }
    }
    let failed: Vec<&Check> = cert.failures().collect();
    if failed.is_empty() {
        eprintln!("pass: {} checks", cert.checks.len());
        ExitCode::SUCCESS
    } else {
        for c in &failed {
            eprintln!("fail: {} ({}): {}", c.name, c.range, c.witness.as_deref().unwrap_or(""));
        }
        ExitCode::FAILURE
    }
}
