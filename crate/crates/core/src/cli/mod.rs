//! The `logpot` command line.
//!
//! Exit codes: 0 success, 1 experiment verdict `fail`, 2 validation error,
//! 3 numerical non-convergence, 4 conjecture counterexample candidate.
//! Errors are reported as one JSON object on stderr.

mod experiment;
mod output;
mod parse;

pub use experiment::{default_blob, run_experiment, ExperimentName, CONFIG_SCHEMA_VERSION};
pub use output::Outputs;
pub use parse::{parse_list, parse_normal, parse_shape, shape_shorthand};

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::disc_spectrum::{leading_eigs, neg_eig};
use crate::error::{Error, ErrorKind, Result};
use crate::geom2d::io::{mask_from_text, mask_to_text, MaskMeta};
use crate::geom2d::{polarize_set, schwarz_set, PixelMask, Polarizer, Shape};
use crate::solver::{assemble, refine_study, solve, KernelSpec};
use crate::tdiam::{classify, tdiam_report, TdiamOptions};
use crate::verify::Verdict;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT_FAIL: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_COUNTEREXAMPLE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "logpot", version, about = "Logarithmic and Riesz potential operators on planar grids")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for sweeps and restarts.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form eigenvalues of a disc.
    DiscSpectrum {
        #[arg(long)]
        radius: f64,
        #[arg(long, default_value_t = 3)]
        count: usize,
        /// Append the negative eigenvalue (radius > 1 only).
        #[arg(long)]
        negative: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extreme eigenvalues of the discretized operator.
    Solve {
        #[command(flatten)]
        input: MaskInput,
        /// `log` or `riesz:<alpha>`.
        #[arg(long, default_value = "log")]
        kernel: String,
        #[arg(long, default_value_t = 3)]
        topk: usize,
        /// Include eigenvectors in the JSON.
        #[arg(long)]
        vectors: bool,
        /// Write the dense matrix (header + row-major f64).
        #[arg(long)]
        dump_matrix: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-point rearrangement of a mask across a grid-compatible line.
    Polarize {
        #[command(flatten)]
        input: MaskInput,
        /// pos_x, neg_x, pos_y, neg_y, pos_diag, neg_diag, pos_anti, neg_anti.
        #[arg(long)]
        normal: String,
        /// Offset in units of h/2 (axis normals) or h/sqrt 2 (diagonals).
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        /// Write the rearranged mask as text.
        #[arg(long)]
        mask_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Discrete Schwarz symmetrization of a mask.
    Schwarz {
        #[command(flatten)]
        input: MaskInput,
        #[arg(long)]
        mask_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Transfinite diameter by the Robin route, with the rho_n sequence.
    Tdiam {
        #[arg(long)]
        shape: String,
        /// Largest n of the rho_n sequence; 0 skips it.
        #[arg(long, default_value_t = 12)]
        n: usize,
        #[arg(long, default_value_t = 512)]
        nodes: usize,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named experiment from a JSON config.
    Experiment {
        #[arg(value_enum)]
        name: ExperimentName,
        /// JSON config; defaults apply to omitted fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Extreme eigenvalues over a sequence of spacings, with extrapolation.
    Refine {
        #[arg(long)]
        shape: String,
        #[arg(long, default_value = "log")]
        kernel: String,
        /// Strictly descending, comma separated.
        #[arg(long, default_value = "0.1,0.05,0.025")]
        h_list: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, clap::Args)]
pub struct MaskInput {
    /// Shorthand (`disc:1`), inline JSON or a JSON file.
    #[arg(long, conflicts_with = "mask", required_unless_present = "mask")]
    pub shape: Option<String>,
    /// Mask text file, instead of a shape.
    #[arg(long)]
    pub mask: Option<PathBuf>,
    /// Grid spacing, required with `--shape`.
    #[arg(long)]
    pub h: Option<f64>,
}

impl MaskInput {
    fn load(&self) -> Result<(PixelMask, Option<Shape>)> {
        match (&self.shape, &self.mask) {
            (Some(s), _) => {
                let shape = parse_shape(s)?;
                let h = self
                    .h
                    .ok_or_else(|| Error::InvalidInput("--h is required with --shape".into()))?;
                Ok((PixelMask::rasterize(&shape, h)?, Some(shape)))
            }
            (None, Some(p)) => {
                let m = mask_from_text(&std::fs::read_to_string(p)?)?;
                if let Some(h) = self.h {
                    if (h - m.h()).abs() > 1e-12 * h {
                        return Err(Error::InvalidInput(format!("--h {h} disagrees with the mask spacing {}", m.h())));
                    }
                }
                Ok((m, None))
            }
            (None, None) => Err(Error::InvalidInput("one of --shape or --mask is required".into())),
        }
    }
}

/// What a successful command produced.
pub struct Outcome {
    pub json: Value,
    pub outputs: Outputs,
    pub exit_code: i32,
}

fn to_json<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn pretty(v: &Value) -> Result<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(v)?;
    s.push(b'\n');
    Ok(s)
}

/// Route the main JSON to `out` when given; otherwise it goes to stdout.
fn finish(json: Value, out: &Option<PathBuf>, mut outputs: Outputs, exit_code: i32) -> Result<Outcome> {
    if let Some(p) = out {
        outputs.add(p, pretty(&json)?);
    }
    Ok(Outcome {
        json,
        outputs,
        exit_code,
    })
}

fn rearranged(src: PixelMask, shape: Option<Shape>, out_mask: PixelMask, mask_out: &Option<PathBuf>, out: &Option<PathBuf>) -> Result<Outcome> {
    let mut outputs = Outputs::default();
    if let Some(p) = mask_out {
        outputs.add(p, mask_to_text(&out_mask));
    }
    let json = json!({
        "input": MaskMeta::of(&src, shape.as_ref()),
        "output": MaskMeta::of(&out_mask, None),
        "unchanged": src.same_cells(&out_mask),
    });
    finish(json, out, outputs, EXIT_OK)
}

/// Execute a parsed command. Nothing is written to disk here; the caller
/// commits `Outcome::outputs`.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::DiscSpectrum {
            radius,
            count,
            negative,
            out,
        } => {
            let mut eigs = leading_eigs(*radius, *count)?;
            if *negative {
                eigs.push(neg_eig(*radius)?);
            }
            finish(to_json(&eigs)?, out, Outputs::default(), EXIT_OK)
        }
        Command::Solve {
            input,
            kernel,
            topk,
            vectors,
            dump_matrix,
            out,
        } => {
            let kernel: KernelSpec = kernel.parse()?;
            let (mask, _) = input.load()?;
            let mask = Arc::new(mask);
            let res = solve(&mask, &kernel, *topk)?;
            let mut summary = res.summary();
            if *vectors {
                summary.vectors = Some(
                    res.top
                        .iter()
                        .chain(std::iter::once(&res.bottom))
                        .map(|p| p.vector.values().to_vec())
                        .collect(),
                );
            }
            let mut outputs = Outputs::default();
            if let Some(p) = dump_matrix {
                let mut buf = Vec::new();
                assemble(&mask, &kernel)?.write_binary(&mut buf)?;
                outputs.add(p, buf);
            }
            finish(to_json(&summary)?, out, outputs, EXIT_OK)
        }
        Command::Polarize {
            input,
            normal,
            k,
            mask_out,
            out,
        } => {
            let normal = parse_normal(normal)?;
            let (src, shape) = input.load()?;
            let pol = Polarizer::grid(normal, *k, src.h());
            let p = polarize_set(&src, &pol)?;
            rearranged(src, shape, p, mask_out, out)
        }
        Command::Schwarz { input, mask_out, out } => {
            let (src, shape) = input.load()?;
            let s = schwarz_set(&src)?;
            rearranged(src, shape, s, mask_out, out)
        }
        Command::Tdiam {
            shape,
            n,
            nodes,
            restarts,
            out,
        } => {
            let shape = parse_shape(shape)?;
            let opts = TdiamOptions {
                nodes: *nodes,
                n_max: *n,
                restarts: *restarts,
                seed: cli.seed,
            };
            let est = tdiam_report(&shape, &opts)?;
            let json = json!({
                "tdiam": est.tdiam,
                "rho_sequence": est.rho_sequence,
                "robin": {
                    "v_e": est.v_e,
                    "nodes": nodes,
                    "tdiam_coarse": est.tdiam_coarse,
                    "band": est.band(),
                },
                "upper_bounds_consistent": est.upper_bounds_consistent,
                "classification": classify(&est),
            });
            finish(json, out, Outputs::default(), EXIT_OK)
        }
        Command::Experiment { name, config, out, csv } => {
            let raw = match config {
                Some(p) => std::fs::read_to_string(p)?,
                None => String::new(),
            };
            let rep = run_experiment(*name, &raw, cli.seed)?;
            let mut outputs = Outputs::default();
            if let Some(p) = csv {
                outputs.add(p, rep.to_csv());
            }
            finish(to_json(&rep)?, out, outputs, exit_code_for_verdict(rep.verdict))
        }
        Command::Refine {
            shape,
            kernel,
            h_list,
            out,
        } => {
            let shape = parse_shape(shape)?;
            let kernel: KernelSpec = kernel.parse()?;
            let table = refine_study(&shape, &kernel, &parse_list(h_list)?)?;
            finish(to_json(&table)?, out, Outputs::default(), EXIT_OK)
        }
    }
}

pub fn exit_code_for_verdict(v: Verdict) -> i32 {
    match v {
        Verdict::Fail => EXIT_VERDICT_FAIL,
        Verdict::CounterexampleCandidate => EXIT_COUNTEREXAMPLE,
        Verdict::Pass | Verdict::Inconclusive | Verdict::InconclusiveSupporting => EXIT_OK,
    }
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e.kind() {
        ErrorKind::Numerical => EXIT_NUMERICAL,
        ErrorKind::Validation | ErrorKind::Io => EXIT_VALIDATION,
    }
}

pub fn error_json(code: &str, kind: &str, message: &str, exit_code: i32) -> Value {
    json!({ "error": { "code": code, "kind": kind, "message": message }, "exit_code": exit_code })
}

fn report_error(e: &Error) -> i32 {
    let code = exit_code_for(e);
    let v = error_json(e.code(), &e.kind().to_string(), &e.to_string(), code);
    eprintln!("{v}");
    code
}

/// Parse `args`, run, write outputs, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind as K;
            if matches!(e.kind(), K::DisplayHelp | K::DisplayVersion | K::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                return EXIT_OK;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("{}", error_json("usage", "validation", first, EXIT_VALIDATION));
            return EXIT_VALIDATION;
        }
    };
    if cli.threads == 0 {
        return report_error(&Error::InvalidInput("--threads must be at least 1".into()));
    }
    // fails only when a pool already exists (repeated in-process calls)
    let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    match execute(&cli) {
        Ok(outcome) => {
            let print = !outcome_has_out(&cli);
            let json = outcome.json;
            if let Err(e) = outcome.outputs.commit() {
                return report_error(&e);
            }
            if print {
                let mut stdout = std::io::stdout().lock();
                let _ = stdout.write_all(&pretty(&json).unwrap_or_default());
            }
            outcome.exit_code
        }
        Err(e) => report_error(&e),
    }
}

fn outcome_has_out(cli: &Cli) -> bool {
    match &cli.command {
        Command::DiscSpectrum { out, .. }
        | Command::Solve { out, .. }
        | Command::Polarize { out, .. }
        | Command::Schwarz { out, .. }
        | Command::Tdiam { out, .. }
        | Command::Experiment { out, .. }
        | Command::Refine { out, .. } => out.is_some(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code_for_verdict(Verdict::CounterexampleCandidate), 4);
        assert_eq!(exit_code_for_verdict(Verdict::Fail), 1);
        assert_eq!(exit_code_for_verdict(Verdict::InconclusiveSupporting), 0);
        let e = Error::NonConvergence {
            what: "lanczos".into(),
            iterations: 10,
            residual: 1.0,
        };
        assert_eq!(exit_code_for(&e), 3);
        assert_eq!(exit_code_for(&Error::EmptyMask), 2);
    }

    #[test]
    fn outputs_are_staged_until_commit() {
        let dir = tempfile::tempdir().unwrap();
        let cli = Cli::try_parse_from([
            "logpot",
            "disc-spectrum",
            "--radius",
            "1",
            "--out",
            dir.path().join("d.json").to_str().unwrap(),
        ])
        .unwrap();
        let o = execute(&cli).unwrap();
        assert!(!dir.path().join("d.json").exists());
        o.outputs.commit().unwrap();
        let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("d.json")).unwrap()).unwrap();
        assert_eq!(v, o.json);
    }
}
