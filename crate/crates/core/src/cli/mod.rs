//! Command-line front end.

pub mod format;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::attack::{self, AttackConfig, Branch};
use crate::codes::{self, LinearCode};
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::grs::GrsParams;
use crate::linalg;
use crate::rng;
use crate::scheme;

#[derive(Parser, Debug)]
#[command(
    name = "grs-squarebreak",
    version,
    about = "GRS McEliece variant with a rank-one masked permutation, and its square-code attack"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a key pair.
    Keygen(KeygenArgs),
    /// Encrypt a message file under a public key.
    Encrypt(EncryptArgs),
    /// Decrypt with a secret key, or with a recovered key and the public key.
    Decrypt(DecryptArgs),
    /// Report the square-code dimension of a code.
    Distinguish(DistinguishArgs),
    /// Recover a decryption key from a public key.
    Attack(AttackArgs),
    /// Run seeded attack replicas over a parameter grid.
    Bench(BenchArgs),
    /// Write a GRS or random code file.
    GenCode(GenCodeArgs),
}

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    /// Modulus polynomial as a base-p integer; smallest irreducible if omitted.
    #[arg(long)]
    pub poly: Option<u32>,
}

impl FieldArgs {
    pub fn field(&self) -> Result<Field> {
        match self.poly {
            Some(poly) => Field::new(self.p, self.m, poly),
            None => {
                Field::new(self.p, 1, 0)?;
                let q = u64::from(self.p).checked_pow(self.m).unwrap_or(u64::MAX);
                if q > crate::gf::MAX_ORDER {
                    return Err(Error::FieldTooLarge(q));
                }
                Field::with_order(q as u32)
            }
        }
    }
}

#[derive(Args, Debug)]
pub struct KeygenArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "key.pub")]
    pub out_pub: PathBuf,
    #[arg(long, default_value = "key.sec")]
    pub out_sec: PathBuf,
}

#[derive(Args, Debug)]
pub struct EncryptArgs {
    #[arg(long = "pub")]
    pub public: PathBuf,
    /// Message file (`@vec 1 k`).
    #[arg(long)]
    pub msg: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Ciphertext destination; stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DecryptArgs {
    #[arg(long, required_unless_present = "recovered")]
    pub sec: Option<PathBuf>,
    /// Recovered key written by `attack`; needs `--pub`.
    #[arg(long, requires = "public", conflicts_with = "sec")]
    pub recovered: Option<PathBuf>,
    #[arg(long = "pub")]
    pub public: Option<PathBuf>,
    #[arg(long)]
    pub ct: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DistinguishArgs {
    /// Code file (`@G`, or a public key's `@Gpub`).
    #[arg(long)]
    pub code: PathBuf,
}

#[derive(Args, Debug)]
pub struct AttackArgs {
    #[arg(long = "pub")]
    pub public: PathBuf,
    #[arg(long, default_value = "key.rec")]
    pub out: PathBuf,
    /// Outer trial cap; defaults to 100 q^3.
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "auto")]
    pub branch: Branch,
    /// Encrypt and decrypt this many fresh messages with the recovered key.
    #[arg(long, requires = "sec")]
    pub verify: Option<usize>,
    /// Secret key used by `--verify` as the reference decryptor.
    #[arg(long)]
    pub sec: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Grid cell `q:n:k`; repeatable.
    #[arg(long = "cell")]
    pub cells: Vec<Cell>,
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub q: u32,
    pub n: usize,
    pub k: usize,
}

impl std::str::FromStr for Cell {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Cell, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || format!("expected q:n:k, found {s:?}");
        if parts.len() != 3 {
            return Err(bad());
        }
        Ok(Cell {
            q: parts[0].parse().map_err(|_| bad())?,
            n: parts[1].parse().map_err(|_| bad())?,
            k: parts[2].parse().map_err(|_| bad())?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum CodeKind {
    Grs,
    Random,
}

#[derive(Args, Debug)]
pub struct GenCodeArgs {
    #[arg(long, value_enum)]
    pub kind: CodeKind,
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Process exit status for an error.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::DecryptionFailure | Error::DecodeFailure => 2,
        Error::NotApplicable { .. } => 3,
        Error::TrialBudgetExceeded(_) => 4,
        _ => 1,
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write(p, text),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Keygen(a) => cmd_keygen(&a, out),
        Command::Encrypt(a) => cmd_encrypt(&a, out),
        Command::Decrypt(a) => cmd_decrypt(&a, out),
        Command::Distinguish(a) => cmd_distinguish(&a, out),
        Command::Attack(a) => cmd_attack(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
        Command::GenCode(a) => cmd_gen_code(&a, out),
    }
}

pub fn cmd_keygen(a: &KeygenArgs, out: &mut dyn Write) -> Result<()> {
    let f = a.field.field()?;
    let (pk, sk) = scheme::keygen(&f, a.n, a.k, &mut rng::seeded(a.seed))?;
    write(&a.out_pub, &format::write_public(&pk))?;
    write(&a.out_sec, &format::write_secret(&sk, &pk))?;
    match attack::applicable_branch(a.n, a.k) {
        Ok(b) => writeln!(out, "branch: {b}")?,
        Err(_) if 2 * a.k + 2 >= a.n && 2 * a.k <= a.n + 2 => writeln!(
            out,
            "warning: n={} k={} lies in the unattackable interval; the bundled attack does not apply",
            a.n, a.k
        )?,
        Err(_) => writeln!(
            out,
            "warning: n={} k={} is below the size floor of both attack branches",
            a.n, a.k
        )?,
    }
    Ok(())
}

pub fn cmd_encrypt(a: &EncryptArgs, out: &mut dyn Write) -> Result<()> {
    let pk = format::read_public(&read(&a.public)?)?;
    let m = format::read_vec(&read(&a.msg)?, pk.field(), pk.k())?;
    let c = scheme::encrypt(&pk, &m, &mut rng::seeded(a.seed))?;
    emit(
        out,
        a.out.as_deref(),
        &format::write_vec(pk.field(), pk.n(), pk.k(), &c),
    )
}

pub fn cmd_decrypt(a: &DecryptArgs, out: &mut dyn Write) -> Result<()> {
    let (pk, m) = if let Some(sec) = &a.sec {
        let (sk, pk) = format::read_secret(&read(sec)?)?;
        let c = format::read_vec(&read(&a.ct)?, pk.field(), pk.n())?;
        let m = scheme::decrypt(&sk, &pk, &c)?;
        (pk, m)
    } else {
        let rec = a
            .recovered
            .as_deref()
            .expect("clap enforces --sec or --recovered");
        let public = a.public.as_deref().expect("clap enforces --pub");
        let pk = format::read_public(&read(public)?)?;
        let rk = format::read_recovered(&read(rec)?)?;
        let c = format::read_vec(&read(&a.ct)?, pk.field(), pk.n())?;
        let m = attack::decrypt_with_pair(&rk, &pk, &c)?;
        (pk, m)
    };
    emit(
        out,
        a.out.as_deref(),
        &format::write_vec(pk.field(), pk.n(), pk.k(), &m),
    )
}

pub fn cmd_distinguish(a: &DistinguishArgs, out: &mut dyn Write) -> Result<()> {
    let code = format::read_code(&read(&a.code)?)?;
    writeln!(out, "{}", codes::distinguish(&code))?;
    Ok(())
}

pub fn cmd_attack(a: &AttackArgs, out: &mut dyn Write) -> Result<()> {
    let pk = format::read_public(&read(&a.public)?)?;
    let mut cfg = AttackConfig::for_field_order(pk.field().q());
    cfg.branch = a.branch;
    if let Some(t) = a.trials {
        cfg.max_outer_trials = t;
    }
    let mut r = rng::seeded(a.seed);
    let start = Instant::now();
    let rk = attack::attack(&pk, &cfg, &mut r)?;
    let elapsed = start.elapsed().as_secs_f64();
    write(&a.out, &format::write_recovered(&rk))?;
    let branch = rk
        .stats
        .branch
        .map_or("degenerate".to_string(), |b| b.to_string());
    writeln!(
        out,
        "branch: {branch}\nouter_trials: {}\nrestarts: {}\nwall_time_s: {elapsed:.3}",
        rk.stats.outer_trials, rk.stats.restarts
    )?;
    if let (Some(count), Some(sec)) = (a.verify, &a.sec) {
        let (sk, _) = format::read_secret(&read(sec)?)?;
        let f = pk.field();
        let mut ok = 0;
        for _ in 0..count {
            let m = linalg::random_vec(f, pk.k(), &mut r);
            let c = scheme::encrypt(&pk, &m, &mut r)?;
            let ours = attack::decrypt_with_pair(&rk, &pk, &c);
            if ours.as_ref() == Ok(&m) && scheme::decrypt(&sk, &pk, &c).as_ref() == Ok(&m) {
                ok += 1;
            }
        }
        writeln!(out, "verify: {ok}/{count}")?;
        if ok != count {
            return Err(Error::DecryptionFailure);
        }
    }
    Ok(())
}

/// One attack replica.
#[derive(Clone, Debug)]
pub struct Replica {
    pub success: bool,
    pub trials: u64,
    pub seconds: f64,
}

/// Aggregates for one grid cell.
#[derive(Clone, Debug)]
pub struct CellSummary {
    pub cell: Cell,
    pub branch: String,
    pub reps: usize,
    pub success_rate: f64,
    pub mean_trials: f64,
    pub median_trials: f64,
    pub mean_seconds: f64,
    /// `mean_trials / q^3`
    pub ratio: f64,
}

/// One seeded keygen and attack, checked against the secret key.
fn replica(f: &Field, cell: Cell, seed: u64, index: u64) -> Result<Replica> {
    let mut r = rng::stream(seed, index);
    let (pk, sk) = scheme::keygen(f, cell.n, cell.k, &mut r)?;
    let start = Instant::now();
    let res = attack::attack(&pk, &AttackConfig::for_field_order(f.q()), &mut r);
    let seconds = start.elapsed().as_secs_f64();
    let rk = match res {
        Ok(rk) => rk,
        Err(Error::TrialBudgetExceeded(t)) => {
            return Ok(Replica {
                success: false,
                trials: t,
                seconds,
            })
        }
        Err(e) => return Err(e),
    };
    let mut success = rk.grs.code() == sk.permuted_grs().code() && rk.is_valid_for(&pk.code());
    // small codes admit a second plaintext within radius t; the attack
    // succeeds when the true one is among the decodings
    for _ in 0..5 {
        let m = linalg::random_vec(f, cell.k, &mut r);
        let c = scheme::encrypt(&pk, &m, &mut r)?;
        success &= attack::decrypt_candidates_with_pair(&rk, &pk, &c)?.contains(&m);
    }
    Ok(Replica {
        success,
        trials: rk.stats.outer_trials,
        seconds,
    })
}

pub fn bench_cell(cell: Cell, reps: usize, seed: u64, cell_index: usize) -> Result<CellSummary> {
    let f = Field::with_order(cell.q)?;
    let branch = attack::applicable_branch(cell.n, cell.k)?;
    let base = (cell_index * reps) as u64;
    let runs: Vec<Replica> = (0..reps)
        .into_par_iter()
        .map(|i| replica(&f, cell, seed, base + i as u64))
        .collect::<Result<_>>()?;
    let mut trials: Vec<u64> = runs.iter().map(|r| r.trials).collect();
    trials.sort_unstable();
    let reps_f = reps.max(1) as f64;
    let mean_trials = trials.iter().sum::<u64>() as f64 / reps_f;
    let median_trials = match trials.len() {
        0 => 0.0,
        l if l % 2 == 1 => trials[l / 2] as f64,
        l => (trials[l / 2 - 1] + trials[l / 2]) as f64 / 2.0,
    };
    Ok(CellSummary {
        cell,
        branch: branch.to_string(),
        reps,
        success_rate: runs.iter().filter(|r| r.success).count() as f64 / reps_f,
        mean_trials,
        median_trials,
        mean_seconds: runs.iter().map(|r| r.seconds).sum::<f64>() / reps_f,
        ratio: mean_trials / f64::from(cell.q).powi(3),
    })
}

pub const CSV_HEADER: &str =
    "q,n,k,branch,reps,success_rate,mean_trials,median_trials,mean_seconds,trials_over_q3";

pub fn csv_row(s: &CellSummary) -> String {
    format!(
        "{},{},{},{},{},{:.3},{:.1},{:.1},{:.4},{:.3}",
        s.cell.q,
        s.cell.n,
        s.cell.k,
        s.branch,
        s.reps,
        s.success_rate,
        s.mean_trials,
        s.median_trials,
        s.mean_seconds,
        s.ratio
    )
}

pub fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let summaries: Vec<CellSummary> = a
        .cells
        .iter()
        .enumerate()
        .map(|(i, &cell)| bench_cell(cell, a.reps, a.seed, i))
        .collect::<Result<_>>()?;
    writeln!(
        out,
        "{:>5} {:>4} {:>4} {:>15} {:>5} {:>8} {:>11} {:>11} {:>9} {:>7}",
        "q", "n", "k", "branch", "reps", "success", "mean_tr", "median_tr", "mean_s", "tr/q^3"
    )?;
    for s in &summaries {
        writeln!(
            out,
            "{:>5} {:>4} {:>4} {:>15} {:>5} {:>8.3} {:>11.1} {:>11.1} {:>9.4} {:>7.3}",
            s.cell.q,
            s.cell.n,
            s.cell.k,
            s.branch,
            s.reps,
            s.success_rate,
            s.mean_trials,
            s.median_trials,
            s.mean_seconds,
            s.ratio
        )?;
    }
    let mut csv = format!("{CSV_HEADER}\n");
    for s in &summaries {
        csv.push_str(&csv_row(s));
        csv.push('\n');
    }
    match &a.csv {
        Some(p) => write(p, &csv),
        None => Ok(out.write_all(format!("\n{csv}").as_bytes())?),
    }
}

pub fn cmd_gen_code(a: &GenCodeArgs, out: &mut dyn Write) -> Result<()> {
    let f = a.field.field()?;
    if a.k == 0 || a.k > a.n || a.n > f.q() as usize {
        return Err(Error::InvalidDimensions { n: a.n, k: a.k });
    }
    let mut r = rng::seeded(a.seed);
    let code = match a.kind {
        CodeKind::Grs => GrsParams::random(&f, a.n, a.k, &mut r).code(),
        CodeKind::Random => LinearCode::random(&f, a.n, a.k, &mut r),
    };
    write(&a.out, &format::write_code(&code))?;
    writeln!(
        out,
        "wrote {:?} code n={} k={} to {}",
        a.kind,
        a.n,
        a.k,
        a.out.display()
    )?;
    Ok(())
}
