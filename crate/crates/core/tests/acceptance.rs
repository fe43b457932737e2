//! Acceptance run: ten criteria, one PASS/FAIL line each, with the numbers
//! behind the verdict. Runs as a plain binary (`harness = false`) so the
//! lines are always printed; exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use logpot::cli::default_blob;
use logpot::disc_spectrum::neg_eig;
use logpot::geom2d::{PixelMask, Shape, Vec2};
use logpot::solver::{solve, KernelSpec};
use logpot::specfun::{bessel_j, bessel_zero};
use logpot::tdiam::{rho_n, tdiam_estimate};
use logpot::verify::{
    annulus_sweep, dumbbell_sweep, reverse_fk_schwarz, riesz_suite, sandwich_check, two_ball_sweep, Placement,
    SweepOptions, Verdict,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(t: Duration, limit_s: f64) -> bool {
    t.as_secs_f64() < limit_s
}

/// Analytic disc spectrum through the CLI.
fn disc_spectrum() -> Outcome {
    let t = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_logpot"))
        .args(["disc-spectrum", "--radius", "1", "--count", "3"])
        .output()
        .expect("run logpot");
    let elapsed = t.elapsed();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("JSON on stdout");
    let taus: Vec<f64> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["tau"].as_f64().unwrap())
        .collect();
    let j01 = bessel_zero(0, 1);
    let res = bessel_j(0, j01).abs();
    let want = 1.0 / (j01 * j01);
    let all_equal = taus.len() == 3 && taus.iter().all(|t| (t - want).abs() <= 1e-12 * want);
    let j11 = bessel_zero(1, 1);
    let j02 = bessel_zero(0, 2);
    let pass = out.status.success()
        && all_equal
        && res <= 1e-10
        && (j11 - 3.8317).abs() <= 5e-4
        && (j02 - 5.5201).abs() <= 5e-4
        && within(elapsed, 1.0);
    outcome(
        pass,
        format!(
            "tau = {taus:?}, 1/j01^2 = {want:.12}, |J0(j01)| = {res:.1e}, j11 = {j11:.6}, j02 = {j02:.6}, {:.3}s",
            elapsed.as_secs_f64()
        ),
    )
}

/// Top triple on the unit disc at h = 0.04.
fn positive_oracle() -> Outcome {
    let t = Instant::now();
    let m = Arc::new(PixelMask::rasterize(&Shape::disc(Vec2::ZERO, 1.0), 0.04).unwrap());
    let r = solve(&m, &KernelSpec::log(), 3).unwrap();
    let want = 1.0 / bessel_zero(0, 1).powi(2);
    let top = r.tau_top();
    let worst = top.iter().map(|x| (x - want).abs() / want).fold(0.0, f64::max);
    let spread = (top[0] - top[2]) / top[0];
    let elapsed = t.elapsed();
    outcome(
        worst < 0.03 && spread < 0.02 && within(elapsed, 120.0),
        format!(
            "n = {}, top = {top:?}, max rel err {worst:.4}, spread {spread:.4}, {:.2}s",
            m.active_count(),
            elapsed.as_secs_f64()
        ),
    )
}

/// Smallest eigenvalue on B_2 at h = 0.08, and the positivity threshold.
fn negative_side() -> (Outcome, f64) {
    let t = Instant::now();
    let m = Arc::new(PixelMask::rasterize(&Shape::disc(Vec2::ZERO, 2.0), 0.08).unwrap());
    let r = solve(&m, &KernelSpec::log(), 1).unwrap();
    let want = neg_eig(2.0).unwrap().tau;
    let got = r.tau_bottom();
    let rel = (got - want).abs() / want.abs();
    let elapsed = t.elapsed();
    (
        outcome(
            rel < 0.05 && within(elapsed, 120.0),
            format!(
                "n = {}, numeric {got:.6}, analytic {want:.6}, rel err {rel:.4}, {:.2}s",
                m.active_count(),
                elapsed.as_secs_f64()
            ),
        ),
        got,
    )
}

fn positivity(b2_bottom: f64) -> Outcome {
    let m = Arc::new(PixelMask::rasterize(&Shape::disc(Vec2::ZERO, 0.5), 0.02).unwrap());
    let r = solve(&m, &KernelSpec::log(), 1).unwrap();
    let (top, bottom) = (r.tau_top()[0], r.tau_bottom());
    outcome(
        bottom >= -1e-3 * top && b2_bottom < 0.0,
        format!("B_0.5 (h = 0.02): bottom {bottom:.3e} vs -1e-3 tau1 = {:.3e}; B_2 bottom {b2_bottom:.4}", -1e-3 * top),
    )
}

fn asymptotics() -> Outcome {
    let t = Instant::now();
    let r = 1.01f64;
    let near = neg_eig(r).unwrap().tau / (-r * r * r.ln().powi(2));
    let r = 100.0f64;
    let far = neg_eig(r).unwrap().tau / (-r * r * r.ln() / 2.0);
    let elapsed = t.elapsed();
    outcome(
        (0.95..=1.05).contains(&near) && (0.85..=1.15).contains(&far) && within(elapsed, 1.0),
        format!("R = 1.01 ratio {near:.4}, R = 100 ratio {far:.4}, {:.3}s", elapsed.as_secs_f64()),
    )
}

fn riesz() -> Outcome {
    let t = Instant::now();
    let a = riesz_suite(&KernelSpec::log(), 1000, 0).unwrap();
    let b = riesz_suite(&KernelSpec::riesz(1.0).unwrap(), 1000, 1).unwrap();
    let elapsed = t.elapsed();
    outcome(
        a.verdict == Verdict::Pass && b.verdict == Verdict::Pass && within(elapsed, 60.0),
        format!(
            "min margin log {:.3e}, riesz:1 {:.3e} (tolerance -1e-12), {:.2}s",
            a.metrics["min_margin"],
            b.metrics["min_margin"],
            elapsed.as_secs_f64()
        ),
    )
}

fn reverse_fk() -> Outcome {
    let opts = SweepOptions {
        placement: Placement::Jitter { k: 3 },
        ..SweepOptions::default()
    };
    let sweep = annulus_sweep(0.45, 0.1, &[0.0, 0.1, 0.2, 0.3], 0.01, &opts).unwrap();
    let taus = sweep.column("tau1").unwrap();
    let square = Shape::square(Vec2::ZERO, PI.sqrt() / 4.0);
    let gap = reverse_fk_schwarz(&square, 0.01, false, &SweepOptions::default()).unwrap();
    outcome(
        sweep.verdict == Verdict::Pass && gap.verdict() == Verdict::Pass,
        format!(
            "annulus tau1 {taus:?}, min step {:.3e}, uncertainty {:.3e} (jitter 3x3); square gap {:.3e} > 3 x {:.1e}",
            sweep.metrics["min_step"], sweep.metrics["uncertainty"], gap.gap, gap.tolerance
        ),
    )
}

fn transfinite() -> Outcome {
    let t = Instant::now();
    let disc = Shape::disc(Vec2::ZERO, 1.0);
    let mut worst = 0.0f64;
    for n in 3..=6 {
        let r = rho_n(&disc, n, 4, 0).unwrap().rho_n;
        worst = worst.max((r - (n as f64).powf(1.0 / (n as f64 - 1.0))).abs());
    }
    let ell = tdiam_estimate(&Shape::ellipse(Vec2::ZERO, 2.0, 0.25)).unwrap();
    let ann = tdiam_estimate(&Shape::annulus(Vec2::ZERO, 1.5, 0.5)).unwrap();
    let elapsed = t.elapsed();
    outcome(
        worst <= 1e-6 && (ell - 1.125).abs() <= 0.03 * 1.125 && (ann - 1.5).abs() <= 0.03 * 1.5 && within(elapsed, 60.0),
        format!(
            "max |rho_n - n^(1/(n-1))| {worst:.1e}, ellipse {ell:.6}, annulus {ann:.6}, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn divergence() -> Outcome {
    let opts = SweepOptions::default();
    let balls = two_ball_sweep(&[3.0, 6.0, 12.0], 0.05, &opts).unwrap();
    let t = balls.column("tau_tilde1").unwrap();
    let bell = dumbbell_sweep(3.0 * PI, &[6.0, 12.0, 24.0], 0.02, &opts).unwrap();
    let d = bell.column("tau_tilde1").unwrap();
    // tau(12) at least 1.5 times as negative as tau(3)
    let ratio = t[2] / t[0];
    outcome(
        balls.verdict == Verdict::Pass && ratio >= 1.5 && bell.verdict == Verdict::Pass,
        format!(
            "two balls {t:?} (ratio {ratio:.3}); dumbbell {d:?}, area err {:.2}%, step/uncertainty {:.1}",
            100.0 * bell.metrics["area_rel_err"],
            bell.metrics["step_to_uncertainty"]
        ),
    )
}

fn sandwich() -> Outcome {
    let r = sandwich_check(&default_blob(), 0.08, &SweepOptions::default()).unwrap();
    let row = &r.rows[0];
    let slack = r.metrics["slack"];
    let tau = row[3];
    // the nominal disc radii of the blob give a wider interval
    let lo = neg_eig(2.5).unwrap().tau;
    let hi = neg_eig(1.5).unwrap().tau;
    let nominal = tau >= lo - slack && tau <= hi + slack;
    outcome(
        r.verdict == Verdict::Pass && nominal,
        format!(
            "tau~1 {tau:.5} in [{:.5}, {:.5}] (mask radii {:.4}, {:.4}) and in [{lo:.5}, {hi:.5}] (R = 2.5, 1.5), slack {slack:.1e}",
            row[2], row[4], row[0], row[1]
        ),
    )
}

fn main() {
    let start = Instant::now();
    let (c3, b2) = negative_side();
    let results = [
        ("1 analytic disc spectrum", disc_spectrum()),
        ("2 numeric vs analytic, positive side", positive_oracle()),
        ("3 numeric vs analytic, negative side", c3),
        ("4 positivity threshold", positivity(b2)),
        ("5 negative eigenvalue asymptotics", asymptotics()),
        ("6 discrete Riesz inequality", riesz()),
        ("7 reverse Faber-Krahn sweeps", reverse_fk()),
        ("8 transfinite diameter", transfinite()),
        ("9 negative eigenvalue divergence", divergence()),
        ("10 sandwich bound", sandwich()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed, {:.1}s",
        results.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
