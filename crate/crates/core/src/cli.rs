//! Command-line front end. Errors are reported on stderr as one JSON object.

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::codes::{
    build_code, griesmer_report, naive_generator, rm1_generator, scrs_dmin_formula, scrs_generator, scrs_tiling,
    simplex_generator, GeneratorMatrix,
};
use crate::error::{Error, Result};
use crate::fusion::CodewordSetMatrix;
use crate::gf::FieldSpec;
use crate::harness::{
    achievable_rate, fit_rows, reproduce, run_ser_sweep, DecoderKind, ExperimentConfig, Family, PresetOverrides,
    RunOptions, SweepResult,
};

#[derive(Parser, Debug)]
#[command(name = "codiv", version, about = "Coded distributed diversity: codes, SER sweeps, rates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a generator matrix and print it with d_min and the bound report.
    Code(CodeArgs),
    /// Run a Monte-Carlo SER sweep and write CSV.
    Ser(RunArgs),
    /// Estimate average achievable rates and write CSV.
    Rate(RunArgs),
    /// Fit the diversity slope of one decoder curve in a sweep CSV.
    Diversity(DiversityArgs),
    /// Run a desk-scale preset.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug)]
struct CodeArgs {
    #[arg(long, default_value = "scrs")]
    family: String,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long = "K")]
    k: usize,
    #[arg(long = "B")]
    b: u32,
    /// Field polynomial (default primitive polynomial otherwise).
    #[arg(long)]
    polynomial: Option<u32>,
    /// Generator file (`K N B poly` header, then rows) for the custom family.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// TOML configuration; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    constellation: Option<String>,
    #[arg(long = "B")]
    b: Option<u32>,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long = "K")]
    k: Option<usize>,
    #[arg(long)]
    family: Option<String>,
    /// Comma-separated decoder names.
    #[arg(long, value_delimiter = ',')]
    decoders: Option<Vec<String>>,
    /// Comma-separated SNR grid in dB.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    mc_samples: Option<usize>,
    #[arg(long)]
    draws: Option<usize>,
    /// Disable receiver noise (debugging).
    #[arg(long)]
    noiseless: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct OutArgs {
    /// CSV destination (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a JSON mirror here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct DiversityArgs {
    /// Sweep CSV produced by `ser` or `reproduce`.
    #[arg(long)]
    csv: PathBuf,
    /// Decoder label; every curve when absent.
    #[arg(long)]
    decoder: Option<String>,
    /// Fit window `lo:hi` in dB (automatic otherwise).
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    /// One of motivating, fig2, fig3, fig4a, fig4b, fig5a, fig5b.
    name: String,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    draws: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    out: OutArgs,
}

/// Parse arguments, run, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let text = e.render().to_string();
            let first = text.lines().next().unwrap_or_default().trim_start_matches("error: ");
            report("usage", first, &[text.trim_end().to_string()], 2);
            return 2;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            let details = match &e {
                Error::Config(list) => list.clone(),
                _ => vec![],
            };
            report(e.kind(), &e.to_string(), &details, e.exit_code());
            e.exit_code()
        }
    }
}

fn report(kind: &str, message: &str, details: &[String], code: i32) {
    let value = json!({
        "error": kind,
        "message": message,
        "details": details,
        "exit_code": code,
    });
    eprintln!("{value}");
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Code(a) => code(a),
        Command::Ser(a) => {
            let opts = RunOptions { workers: a.out.workers };
            let cfg = build_config(&a)?;
            let result = run_ser_sweep(&cfg, opts)?;
            emit(&a.out, &result.to_csv_string()?, &result.to_json()?)
        }
        Command::Rate(a) => {
            let opts = RunOptions { workers: a.out.workers };
            let cfg = build_config(&a)?;
            let result = achievable_rate(&cfg, opts)?;
            emit(&a.out, &result.to_csv_string()?, &result.to_json()?)
        }
        Command::Diversity(a) => diversity(a),
        Command::Reproduce(a) => {
            let overrides = PresetOverrides {
                trials: a.trials,
                draws: a.draws,
                seed: a.seed,
            };
            let out = reproduce(&a.name, overrides, RunOptions { workers: a.out.workers })?;
            emit(&a.out, &out.to_csv_string()?, &out.to_json()?)
        }
    }
}

fn emit(out: &OutArgs, csv: &str, json: &str) -> Result<()> {
    match &out.out {
        Some(path) => fs::write(path, csv)?,
        None => io::stdout().write_all(csv.as_bytes())?,
    }
    if let Some(path) = &out.json {
        fs::write(path, json)?;
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))
}

fn build_config(a: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &a.config {
        Some(path) => ExperimentConfig::from_toml(&read(path)?)?,
        None => {
            let family = match &a.family {
                Some(f) => Family::parse(f)?,
                None => Family::Scrs,
            };
            ExperimentConfig::new("qpsk", 1, 3, family)
        }
    };
    if a.config.is_none() {
        cfg.n = None;
    }
    if let Some(c) = &a.constellation {
        cfg.constellation = c.clone();
    }
    if let Some(b) = a.b {
        cfg.b = b;
    }
    if a.n.is_some() {
        cfg.n = a.n;
    }
    if a.k.is_some() {
        cfg.k = a.k;
    }
    if let Some(f) = &a.family {
        cfg.code.family = Some(Family::parse(f)?);
    }
    if let Some(list) = &a.decoders {
        cfg.decoders = list.iter().map(|d| DecoderKind::parse(d)).collect::<Result<_>>()?;
    }
    if let Some(snr) = &a.snr {
        cfg.snr_grid_db = snr.clone();
    }
    if let Some(t) = a.trials {
        cfg.trials_per_point = t;
    }
    if let Some(s) = a.seed {
        cfg.master_seed = s;
    }
    if let Some(m) = a.mc_samples {
        cfg.mc_samples = m;
    }
    if let Some(d) = a.draws {
        cfg.rate.draws = d;
    }
    if a.noiseless {
        cfg.noiseless = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn code(a: CodeArgs) -> Result<()> {
    let family = Family::parse(&a.family)?;
    let field = match a.polynomial {
        Some(p) => FieldSpec::with_polynomial(a.b, p)?,
        None => FieldSpec::new(a.b)?,
    };
    let need_n = || a.n.ok_or_else(|| Error::config(format!("family {} needs --N", family.name())));
    let g: GeneratorMatrix = match family {
        Family::Simplex => simplex_generator(a.k, &field)?,
        Family::Rm1 => rm1_generator(a.k, &field)?,
        Family::Scrs => scrs_generator(need_n()?, a.k, &field)?,
        Family::Naive => naive_generator(need_n()?, a.k, &field)?,
        Family::Custom => {
            let path = a.matrix.as_ref().ok_or_else(|| Error::config("custom family needs --matrix"))?;
            GeneratorMatrix::from_text(&read(path)?)?
        }
        Family::CodewordSet => {
            let m = CodewordSetMatrix::prior_art_qpsk_n10();
            let rows: Vec<usize> = (0..m.rows()).collect();
            let code = m.to_code(&rows)?;
            let text = (0..m.rows())
                .map(|r| m.row_bits(r).iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "))
                .collect::<Vec<_>>()
                .join("\n");
            if a.json {
                println!("{}", json!({"family": "codeword_set", "n": m.n(), "d_min": code.d_min(), "rows": text}));
            } else {
                println!("{text}\nd_min {}", code.d_min());
            }
            return Ok(());
        }
    };
    if let Some(n) = a.n {
        if n != g.n() {
            return Err(Error::config(format!("{} has N = {}, not {n}", family.name(), g.n())));
        }
    }
    let code = build_code(&g)?;
    let d = code.d_min() as u64;
    let report = griesmer_report(g.k(), a.b, d, g.n() as u64);
    let scrs = (family == Family::Scrs).then(|| (scrs_dmin_formula(g.n(), g.k(), a.b), scrs_tiling(g.n(), g.k(), a.b)));
    if a.json {
        let mut v = json!({
            "family": family.name(),
            "generator": g.to_text(),
            "n": g.n(),
            "k": g.k(),
            "b": a.b,
            "d_min": d,
            "bounds": report,
        });
        if let Some((formula, (n_out, n_in))) = scrs {
            v["scrs"] = json!({"formula": formula, "n_out": n_out, "n_in": n_in});
        }
        println!("{}", serde_json::to_string_pretty(&v).expect("json"));
    } else {
        print!("{}", g.to_text());
        println!("d_min                     {d}");
        print!("{report}");
        if let Some((formula, (n_out, n_in))) = scrs {
            println!("scrs_n_out n_in            {n_out} {n_in}");
            println!(
                "scrs_formula_d            {}{}",
                formula.value,
                if formula.exact { "" } else { " (lower bound)" }
            );
            if let Some(lit) = formula.literal_k2 {
                println!("scrs_formula_literal      {lit}");
            }
        }
    }
    Ok(())
}

fn parse_window(w: &str) -> Result<(f64, f64)> {
    let (lo, hi) = w
        .split_once(':')
        .ok_or_else(|| Error::config(format!("window must be lo:hi, got {w:?}")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| Error::config(format!("bad window bound {s:?}: {e}")))
    };
    Ok((parse(lo)?, parse(hi)?))
}

fn diversity(a: DiversityArgs) -> Result<()> {
    let file = fs::File::open(&a.csv).map_err(|e| Error::config(format!("cannot open {}: {e}", a.csv.display())))?;
    let sweep = SweepResult::read_csv(BufReader::new(file))?;
    let window = a.window.as_deref().map(parse_window).transpose()?;
    let labels: Vec<String> = match &a.decoder {
        Some(d) => vec![d.clone()],
        None => sweep.decoders().iter().map(|s| s.to_string()).collect(),
    };
    let mut fits = Vec::new();
    for label in &labels {
        let rows = sweep.curve(label);
        if rows.is_empty() {
            return Err(Error::config(format!("no rows for decoder {label:?}")));
        }
        let fit = fit_rows(&rows, window);
        if a.json {
            fits.push(match &fit {
                Ok(f) => json!({"decoder": label, "fit": f}),
                Err(e) => json!({"decoder": label, "error": e.kind(), "message": e.to_string()}),
            });
        } else {
            match &fit {
                Ok(f) => println!(
                    "{label:<24} slope {:.3} +/- {:.3} (95% [{:.3}, {:.3}]) window {}..{} dB, {} points",
                    f.slope, f.std_err, f.ci_lo, f.ci_hi, f.window.0, f.window.1, f.points
                ),
                Err(e) => println!("{label:<24} not estimable: {e}"),
            }
        }
        if a.decoder.is_some() {
            fit?;
        }
    }
    if a.json {
        println!("{}", serde_json::to_string_pretty(&fits).expect("json"));
    }
    Ok(())
}
