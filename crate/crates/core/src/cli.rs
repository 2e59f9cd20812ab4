//! Command-line front end: `classify`, `witness`, `norm` and `scan`.
//!
//! Exit codes: 0 success, 2 invalid input, 3 certification failure,
//! 4 resource or size cap.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::functionals::ratio;
use crate::norms::{garling_norm, inclusion_gap_for, lorentz_norm, symmetric_defect, FiniteVector, NormResult};
use crate::oracles::garling_norm_bruteforce;
use crate::scalar::{format_f64, parse_rational, rational_to_f64};
use crate::weights::{WeightFamily, DEFAULT_CAP};
use crate::witness::{
    build_witness, certify, extend_block_lengths, reverify, Mode, WitnessCertificate, DEFAULT_SLACK,
    MAX_SLACK,
};

/// Largest `--rmax` accepted by `scan`.
pub const SCAN_LIMIT: usize = 6;
/// Largest vector `norm --oracle` will cross-check.
pub const ORACLE_LIMIT: usize = 16;

/// Column set of `scan` CSV output.
pub const SCAN_COLUMNS: [&str; 9] = [
    "r",
    "d_r",
    "n_r",
    "A",
    "B",
    "ratio",
    "certified",
    "symmetric_defect",
    "inclusion_gap",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Float,
    Rational,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Float => Mode::Float,
            ModeArg::Rational => Mode::Rational,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "seqspace", version)]
#[command(about = "Lorentz/Garling sequence-space norms and rearrangement witness certificates")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunConfig {
    /// Weight family: power:<alpha>, harmonic, ctail:<floor>, explicit:<file.json>
    #[arg(short = 'w', long = "weights", global = true)]
    pub family: Option<String>,

    /// Norm exponent p >= 1
    #[arg(short = 'p', global = true, default_value_t = 1.0)]
    pub p: f64,

    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Float)]
    pub mode: ModeArg,

    /// Relative margin on the witness search inequalities, in [0, 0.1]
    #[arg(long, global = true, default_value_t = DEFAULT_SLACK)]
    pub slack: f64,

    /// Largest admissible index for prefix sums and block lengths
    #[arg(long, global = true, env = "SEQSPACE_CAP", default_value_t = DEFAULT_CAP)]
    pub cap: u64,

    /// Cross-check against brute-force oracles where feasible
    #[arg(long, global = true)]
    pub oracle: bool,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub output: OutputFormat,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a weight: summable, bounded below, or vanishing but divergent
    Classify,
    /// Build and certify the witness f^(r)
    Witness {
        #[arg(short = 'r', long = "rmax", required_unless_present = "verify_only")]
        r: Option<usize>,
        /// Re-check an existing certificate from scratch
        #[arg(long, value_name = "FILE")]
        verify_only: Option<PathBuf>,
        /// Write the certificate here instead of stdout
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Garling and Lorentz norms of a vector (JSON array of numbers or strings)
    Norm {
        vector: PathBuf,
    },
    /// One row per r = 1..rmax: block length, A, B, ratio, r/6, defect, gap
    Scan {
        #[arg(short = 'r', long = "rmax", default_value_t = 5)]
        rmax: usize,
    },
}

impl RunConfig {
    fn family(&self) -> Result<WeightFamily> {
        let spec = self
            .family
            .as_deref()
            .ok_or_else(|| Error::InvalidInput("a weight family (-w) is required".into()))?;
        Ok(WeightFamily::parse(spec)?.with_cap(self.cap))
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=MAX_SLACK).contains(&self.slack) {
            return Err(Error::InvalidInput(format!(
                "--slack must lie in [0, {MAX_SLACK}], got {}",
                self.slack
            )));
        }
        if !(self.p.is_finite() && self.p >= 1.0) {
            return Err(Error::InvalidInput(format!("-p must be >= 1, got {}", self.p)));
        }
        Ok(())
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing results to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        // --help and --version
        Err(e) if !e.use_stderr() => {
            write!(out, "{e}")?;
            return Ok(());
        }
        Err(e) => return Err(Error::InvalidInput(e.to_string())),
    };
    execute(&cli, out)
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let config = &cli.config;
    config.validate()?;
    match &cli.command {
        Command::Classify => cmd_classify(config, out),
        Command::Witness { r, verify_only, out: path } => match verify_only {
            Some(file) => cmd_verify(file, out),
            None => cmd_witness(config, r.unwrap_or(1), path.as_deref(), out),
        },
        Command::Norm { vector } => cmd_norm(config, vector, out),
        Command::Scan { rmax } => cmd_scan(config, *rmax, out),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn cmd_classify(config: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let fam = config.family()?;
    let class = fam.classify();
    let constant = class.constant.map(format_f64);
    match config.output {
        OutputFormat::Json => {
            let value = json!({
                "family": fam.spec(),
                "branch": class.branch,
                "constant": constant,
                "evidence": class.evidence,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?;
        }
        OutputFormat::Csv => {
            writeln!(out, "family,branch,constant,evidence")?;
            writeln!(
                out,
                "{},{},{},{}",
                csv_field(&fam.spec()),
                class.branch,
                constant.unwrap_or_default(),
                csv_field(&class.evidence)
            )?;
        }
    }
    Ok(())
}

pub fn cmd_witness(config: &RunConfig, r: usize, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let fam = config.family()?;
    let cert = certify(&fam, r, config.slack, config.cap, config.mode.into())?;
    let text = cert.to_json();
    match path {
        Some(p) => std::fs::write(p, format!("{text}\n"))?,
        None => writeln!(out, "{text}")?,
    }
    Ok(())
}

fn cmd_verify(file: &Path, out: &mut dyn Write) -> Result<()> {
    let cert = WitnessCertificate::from_json(&std::fs::read_to_string(file)?)?;
    let fresh = reverify(&cert)?;
    writeln!(out, "{}", fresh.to_json())?;
    Ok(())
}

#[derive(Serialize)]
struct NormReport<'a> {
    family: String,
    p: f64,
    m: usize,
    garling: &'a NormResult,
    lorentz: &'a NormResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<serde_json::Value>,
}

/// Reads a JSON array of numbers or decimal/rational strings.
pub fn read_vector(path: &Path) -> Result<FiniteVector> {
    let raw: Vec<serde_json::Value> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let entries = raw
        .iter()
        .map(|v| match v {
            serde_json::Value::String(s) => parse_rational(s).map(|q| rational_to_f64(&q)),
            serde_json::Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("unrepresentable number {n}"))),
            other => Err(Error::Parse(format!("vector entries must be numbers or strings, got {other}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    FiniteVector::new(entries)
}

pub fn cmd_norm(config: &RunConfig, vector: &Path, out: &mut dyn Write) -> Result<()> {
    let fam = config.family()?;
    let b = read_vector(vector)?;
    let garling = garling_norm(&b, &fam, config.p)?;
    let lorentz = lorentz_norm(&b, &fam, config.p)?;
    let oracle = if config.oracle {
        if b.len() > ORACLE_LIMIT {
            return Err(Error::Size(format!(
                "--oracle supports vectors up to length {ORACLE_LIMIT}, got {}",
                b.len()
            )));
        }
        let brute = garling_norm_bruteforce(&b, &fam, config.p)?;
        let rel = (brute - garling.value).abs() / brute.abs().max(f64::MIN_POSITIVE);
        if brute != garling.value && rel > 1e-12 {
            return Err(Error::Certification {
                condition: "Garling norm agrees with subset brute force".into(),
                residual: format_f64(rel),
            });
        }
        Some(json!({ "garling_bruteforce": brute, "relative_error": rel, "agrees": true }))
    } else {
        None
    };
    match config.output {
        OutputFormat::Json => {
            let report = NormReport {
                family: fam.spec(),
                p: config.p,
                m: b.len(),
                garling: &garling,
                lorentz: &lorentz,
                oracle,
            };
            writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
        }
        OutputFormat::Csv => {
            writeln!(out, "norm,value,p,selector")?;
            for (name, res) in [("garling", &garling), ("lorentz", &lorentz)] {
                let sel = res.selector.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
                writeln!(out, "{name},{},{},{sel}", format_f64(res.value), res.p)?;
            }
        }
    }
    Ok(())
}

/// Rows are written and flushed one at a time, so a failure at some `r`
/// leaves every earlier row in place.
pub fn cmd_scan(config: &RunConfig, rmax: usize, out: &mut dyn Write) -> Result<()> {
    if rmax == 0 || rmax > SCAN_LIMIT {
        return Err(Error::InvalidInput(format!("--rmax must lie in 1..={SCAN_LIMIT}, got {rmax}")));
    }
    let fam = config.family()?;
    fam.require_vanishing_divergent()?;
    let mode: Mode = config.mode.into();
    if config.output == OutputFormat::Csv {
        writeln!(out, "{}", SCAN_COLUMNS.join(","))?;
        out.flush()?;
    }
    let mut d = Vec::new();
    for r in 1..=rmax {
        let (a, b, ratio_text) = match mode {
            Mode::Float => {
                extend_block_lengths(&fam, &mut d, config.slack, config.cap)?;
                let rep = ratio(&build_witness(&fam, &d)?, &fam)?;
                (format_f64(rep.a), format_f64(rep.b), format_f64(rep.ratio))
            }
            Mode::Rational => {
                let cert = certify(&fam, r, 0.0, config.cap, Mode::Rational)?;
                d = cert.d;
                (cert.a, cert.b, cert.ratio)
            }
        };
        let f = build_witness(&fam, &d)?;
        let m = f.support_len();
        let defect = symmetric_defect(&f, &fam, config.p, m)?.defect;
        let gap = inclusion_gap_for(&f, &fam, config.p)?;
        let certified = format_f64(r as f64 / 6.0);
        let d_r = d[r - 1];
        match config.output {
            OutputFormat::Csv => writeln!(
                out,
                "{r},{d_r},{m},{a},{b},{ratio_text},{certified},{},{}",
                format_f64(defect),
                format_f64(gap)
            )?,
            OutputFormat::Json => {
                let row = json!({
                    "r": r, "d_r": d_r, "n_r": m, "A": a, "B": b, "ratio": ratio_text,
                    "certified": certified,
                    "symmetric_defect": format_f64(defect),
                    "inclusion_gap": format_f64(gap),
                });
                writeln!(out, "{row}")?;
            }
        }
        out.flush()?;
    }
    Ok(())
}
