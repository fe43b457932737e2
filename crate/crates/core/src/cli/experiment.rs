//! Experiment configs. Every field has a default; unknown fields are
//! rejected so that a typo fails validation instead of silently running the
//! default.

use std::f64::consts::PI;
use std::sync::Arc;

use clap::ValueEnum;
use serde::Deserialize;

use super::parse::{kernel_field, shape_field};
use crate::error::{Error, Result};
use crate::geom2d::{GridFunction, GridNormal, PixelMask, Polarizer, Shape, Vec2};
use crate::solver::KernelSpec;
use crate::verify::{
    annulus_sweep, conjecture_scan, domain_monotonicity_check, dumbbell_sweep, obstacle_sweep, polarization_flow,
    reverse_fk_polarization, reverse_fk_schwarz, riesz_suite, sandwich_check, two_ball_sweep, ConjectureKind,
    ExperimentReport, FkGap, ObstacleFamily, Placement, ScanConfig, SweepOptions, DEFAULT_EXPERIMENT_CAP,
};

/// Config format version accepted by `experiment`.
pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum ExperimentName {
    AnnulusSweep,
    ObstacleSweep,
    TwoBallSweep,
    DumbbellSweep,
    ReverseFkPolarization,
    ReverseFkSchwarz,
    DomainMonotonicity,
    Sandwich,
    RieszSuite,
    PolarizationFlow,
    ConjectureScan,
}

impl std::str::FromStr for ExperimentName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        <Self as ValueEnum>::from_str(s.trim(), false)
            .map_err(|_| Error::InvalidInput(format!("unknown experiment `{s}`")))
    }
}

fn log_kernel() -> KernelSpec {
    KernelSpec::log()
}
fn yes() -> bool {
    true
}
fn cap() -> usize {
    DEFAULT_EXPERIMENT_CAP
}
fn jitter3() -> Placement {
    Placement::Jitter { k: 3 }
}
fn lattice() -> Placement {
    Placement::Lattice
}
fn version() -> u32 {
    CONFIG_SCHEMA_VERSION
}

// serde's `flatten` does not combine with `deny_unknown_fields`, so the
// shared sweep options are spelled out per config.
macro_rules! config {
    ($name:ident, $placement:literal, { $($(#[$m:meta])* $f:ident : $t:ty),* $(,)? }) => {
        #[derive(Clone, Debug, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            #[serde(default = "version")]
            schema_version: u32,
            $($(#[$m])* $f: $t,)*
            #[serde(default = "log_kernel", deserialize_with = "kernel_field")]
            kernel: KernelSpec,
            #[serde(default = $placement)]
            placement: Placement,
            #[serde(default = "yes")]
            refine: bool,
            #[serde(default = "cap")]
            cap: usize,
        }

        impl $name {
            fn opts(&self) -> SweepOptions {
                SweepOptions {
                    kernel: self.kernel,
                    placement: self.placement,
                    cap: self.cap,
                    refine: self.refine,
                }
            }
        }
    };
}

config!(AnnulusCfg, "jitter3", {
    #[serde(default = "d_outer")] outer: f64,
    #[serde(default = "d_inner")] inner: f64,
    #[serde(default = "d_t")] t_values: Vec<f64>,
    #[serde(default = "d_h_annulus")] h: f64,
});
fn d_outer() -> f64 {
    0.45
}
fn d_inner() -> f64 {
    0.1
}
fn d_t() -> Vec<f64> {
    vec![0.0, 0.1, 0.2, 0.3]
}
fn d_h_annulus() -> f64 {
    0.01
}

config!(ObstacleCfg, "jitter3", {
    #[serde(default = "ObstacleFamily::default_translate")] family: ObstacleFamily,
    #[serde(default)] params: Option<Vec<f64>>,
    #[serde(default = "d_h_annulus")] h: f64,
});

config!(TwoBallCfg, "lattice", {
    #[serde(default = "d_d_two")] d_values: Vec<f64>,
    #[serde(default = "d_h_two")] h: f64,
});
fn d_d_two() -> Vec<f64> {
    vec![3.0, 6.0, 12.0]
}
fn d_h_two() -> f64 {
    0.05
}

config!(DumbbellCfg, "lattice", {
    #[serde(default = "d_c")] c: f64,
    #[serde(default = "d_d_dumb")] d_values: Vec<f64>,
    #[serde(default = "d_h_dumb")] h: f64,
});
fn d_c() -> f64 {
    3.0 * PI
}
fn d_d_dumb() -> Vec<f64> {
    vec![6.0, 12.0, 24.0]
}
fn d_h_dumb() -> f64 {
    0.02
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolarizerCfg {
    normal: GridNormal,
    /// Offset in units of `h/2` (axis normals) or `h/sqrt 2` (diagonals).
    k: i64,
}

config!(FkPolCfg, "lattice", {
    #[serde(deserialize_with = "shape_field")] shape: Shape,
    h: f64,
    polarizer: PolarizerCfg,
    #[serde(default)] force: bool,
});

config!(FkSchwarzCfg, "lattice", {
    #[serde(default = "d_square", deserialize_with = "shape_field")] shape: Shape,
    #[serde(default = "d_h_annulus")] h: f64,
    #[serde(default)] force: bool,
});
fn d_square() -> Shape {
    Shape::square(Vec2::ZERO, PI.sqrt() / 4.0)
}

config!(MonotoneCfg, "lattice", {
    #[serde(deserialize_with = "shape_field")] inner: Shape,
    #[serde(deserialize_with = "shape_field")] outer: Shape,
    h: f64,
});

config!(SandwichCfg, "lattice", {
    #[serde(default = "d_blob", deserialize_with = "shape_field")] shape: Shape,
    #[serde(default = "d_h_sand")] h: f64,
});
fn d_h_sand() -> f64 {
    0.08
}

/// `r(theta) = 2 + 0.5 cos 2 theta`: contains `B_1.5`, inside `B_2.5`.
pub fn default_blob() -> Shape {
    let n = 720;
    Shape::polygon(
        (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                Vec2::from_polar(2.0 + 0.5 * (2.0 * t).cos(), t)
            })
            .collect(),
    )
}
fn d_blob() -> Shape {
    default_blob()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RieszCfg {
    #[serde(default = "version")]
    schema_version: u32,
    #[serde(default = "log_kernel", deserialize_with = "kernel_field")]
    kernel: KernelSpec,
    #[serde(default = "d_count")]
    count: usize,
}
fn d_count() -> usize {
    1000
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowCfg {
    #[serde(default = "version")]
    schema_version: u32,
    #[serde(default = "d_ellipse", deserialize_with = "shape_field")]
    shape: Shape,
    #[serde(default = "d_h_two")]
    h: f64,
    #[serde(default = "d_steps")]
    steps: usize,
    #[serde(default = "log_kernel", deserialize_with = "kernel_field")]
    kernel: KernelSpec,
}
fn d_ellipse() -> Shape {
    Shape::ellipse(Vec2::new(0.2, -0.1), 0.5, 0.2)
}
fn d_steps() -> usize {
    500
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanCfg {
    #[serde(default = "version")]
    schema_version: u32,
    #[serde(default = "d_kind")]
    kind: ConjectureKind,
    #[serde(default = "d_cases")]
    cases: usize,
    #[serde(default = "d_h_scan")]
    h: f64,
}
fn d_kind() -> ConjectureKind {
    ConjectureKind::TdiamPol
}
fn d_cases() -> usize {
    200
}
fn d_h_scan() -> f64 {
    0.1
}

fn check_version(v: u32) -> Result<()> {
    if v == CONFIG_SCHEMA_VERSION {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "config schema_version {v} is not supported (expected {CONFIG_SCHEMA_VERSION})"
        )))
    }
}

fn check_h(h: f64) -> Result<()> {
    if h.is_finite() && h > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("h must be positive, got {h}")))
    }
}

fn fk_report(name: &str, g: &FkGap) -> ExperimentReport {
    let mut rep = ExperimentReport::new(name, &["tau1", "tau1_rearranged", "gap", "tolerance"]);
    rep.push_row(vec![g.tau, g.tau_rearranged, g.gap, g.tolerance]);
    rep.param("hypothesis_verified", g.hypothesis_verified).param("unchanged", g.unchanged);
    rep.metric("cells", g.cells as f64).metric("diameter", g.diameter);
    rep.tolerance_used = g.tolerance;
    rep.verdict = g.verdict();
    if !g.hypothesis_verified {
        rep.notes.push("forced run: diameter above 1, eigenfunction sign hypothesis unverified".into());
    }
    if g.unchanged {
        rep.notes.push("rearranged mask equals the input; the gap is rounding only".into());
    }
    rep
}

fn parse<T: for<'de> Deserialize<'de>>(raw: &str) -> Result<T> {
    Ok(serde_json::from_str(raw)?)
}

/// Parse and validate `raw` for `name`, then run it. Validation finishes
/// before any computation starts.
pub fn run_experiment(name: ExperimentName, raw: &str, seed: u64) -> Result<ExperimentReport> {
    use ExperimentName::*;
    let raw = if raw.trim().is_empty() { "{}" } else { raw };
    let mut rep = match name {
        AnnulusSweep => {
            let c: AnnulusCfg = parse(raw)?;
            check_version(c.schema_version)?;
            check_h(c.h)?;
            annulus_sweep(c.outer, c.inner, &c.t_values, c.h, &c.opts())?
        }
        ObstacleSweep => {
            let c: ObstacleCfg = parse(raw)?;
            check_version(c.schema_version)?;
            check_h(c.h)?;
            let params = c.params.clone().unwrap_or_else(|| match c.family {
                ObstacleFamily::Translate { .. } => vec![0.0, 0.08, 0.16, 0.24],
                ObstacleFamily::Rotate { .. } => vec![0.0, PI / 6.0, PI / 3.0],
            });
            obstacle_sweep(&c.family, &params, c.h, &c.opts())?
        }
        TwoBallSweep => {
            let c: TwoBallCfg = parse(raw)?;
            check_version(c.schema_version)?;
            check_h(c.h)?;
            two_ball_sweep(&c.d_values, c.h, &c.opts())?
        }
        DumbbellSweep => {
            let c: DumbbellCfg = parse(raw)?;
            check_version(c.schema_version)?;
            check_h(c.h)?;
            dumbbell_sweep(c.c, &c.d_values, c.h, &c.opts())?
        }
        ReverseFkPolarization => {
            let c: FkPolCfg = parse(raw)?;
            check_version(c.schema_version)?;
            check_h(c.h)?;
            let pol = Polarizer::grid(c.polarizer.normal, c.polarizer.k, c.h);
            fk_report("reverse_fk_polarization", &reverse_fk_polarization(&c.shape, &pol, c.h, c.force, &c.opts())?)
        }
        ReverseFkSchwarz => {
            let c: FkSchwarzCfg = parse(raw)?;
            check_version(c.schema_version)?;
            check_h(c.h)?;
            fk_report("reverse_fk_schwarz", &reverse_fk_schwarz(&c.shape, c.h, c.force, &c.opts())?)
        }
        DomainMonotonicity => {
            let c: MonotoneCfg = parse(raw)?;
            check_version(c.schema_version)?;
            check_h(c.h)?;
            domain_monotonicity_check(&c.inner, &c.outer, c.h, &c.opts())?
        }
        Sandwich => {
            let c: SandwichCfg = parse(raw)?;
            check_version(c.schema_version)?;
            check_h(c.h)?;
            sandwich_check(&c.shape, c.h, &c.opts())?
        }
        RieszSuite => {
            let c: RieszCfg = parse(raw)?;
            check_version(c.schema_version)?;
            riesz_suite(&c.kernel, c.count, seed)?
        }
        PolarizationFlow => {
            let c: FlowCfg = parse(raw)?;
            check_version(c.schema_version)?;
            check_h(c.h)?;
            let m = Arc::new(PixelMask::rasterize(&c.shape, c.h)?);
            polarization_flow(&GridFunction::indicator(m), c.steps, seed, &c.kernel)?
        }
        ConjectureScan => {
            let c: ScanCfg = parse(raw)?;
            check_version(c.schema_version)?;
            check_h(c.h)?;
            conjecture_scan(c.kind, &ScanConfig { cases: c.cases, h: c.h }, seed)?
        }
    };
    if !rep.seeds.contains(&seed) {
        rep.seeds.push(seed);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_fields_are_rejected() {
        let e = run_experiment(ExperimentName::TwoBallSweep, r#"{"d_values":[3,6],"hh":0.1}"#, 0).unwrap_err();
        assert!(matches!(e, Error::Json(_)), "{e}");
        let e = run_experiment(ExperimentName::TwoBallSweep, r#"{"schema_version":2}"#, 0).unwrap_err();
        assert!(matches!(e, Error::InvalidInput(_)), "{e}");
        let e = run_experiment(ExperimentName::Sandwich, r#"{"shape":"disc:2","h":-1}"#, 0).unwrap_err();
        assert!(matches!(e, Error::InvalidInput(_)), "{e}");
    }

    #[test]
    fn shape_fields_accept_shorthand() {
        let r = run_experiment(
            ExperimentName::ReverseFkSchwarz,
            r#"{"shape":"ellipse:0.3,0.15","h":0.05,"refine":false}"#,
            0,
        )
        .unwrap();
        assert_eq!(r.name, "reverse_fk_schwarz");
        assert_eq!(r.rows.len(), 1);
    }

    #[test]
    fn blob_is_sandwiched() {
        let b = default_blob();
        assert!(b.contains(Vec2::new(1.49, 0.0)) && b.contains(Vec2::new(0.0, -1.49)));
        assert!(!b.contains(Vec2::new(2.51, 0.0)));
    }
}
