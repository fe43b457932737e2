use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use super::bessel::{bessel_j, bessel_jp};

const SCAN_STEP: f64 = PI / 8.0;

/// Ascending positive zeros `j_{m,1} < j_{m,2} < ...` of `J_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct BesselRootTable {
    pub m: u32,
    pub roots: Vec<f64>,
}

/// Refine a bracketed sign change of `f` by bisection, then polish with
/// Newton steps that stay inside the bracket.
pub(crate) fn refine_root(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1e-300) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..3 {
        let d = df(x);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let nx = x - f(x) / d;
        if !(nx >= lo && nx <= hi) {
            break;
        }
        x = nx;
    }
    x
}

fn scan_zeros(m: u32, from: f64, count: usize, out: &mut Vec<f64>) {
    let f = |t: f64| bessel_j(m, t);
    let df = |t: f64| bessel_jp(m, t);
    let mut a = from;
    let mut fa = f(a);
    while out.len() < count {
        let b = a + SCAN_STEP;
        let fb = f(b);
        if fa == 0.0 {
            out.push(a);
        } else if (fa < 0.0) != (fb < 0.0) && fb != 0.0 {
            out.push(refine_root(f, df, a, b));
        }
        a = b;
        fa = fb;
    }
}

fn table() -> &'static Mutex<HashMap<u32, Vec<f64>>> {
    static ZEROS: OnceLock<Mutex<HashMap<u32, Vec<f64>>>> = OnceLock::new();
    ZEROS.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The first `count` positive zeros of `J_m`, from a lazily extended table.
pub fn bessel_zeros(m: u32, count: usize) -> BesselRootTable {
    let mut guard = table().lock().unwrap_or_else(|e| e.into_inner());
    let roots = guard.entry(m).or_default();
    if roots.len() < count {
        // j_{m,1} > m, so the scan can start just past m
        let from = match roots.last() {
            Some(&last) => last + 1e-9 * last,
            None => (m as f64).max(0.1),
        };
        scan_zeros(m, from, count, roots);
    }
    BesselRootTable {
        m,
        roots: roots[..count].to_vec(),
    }
}

/// The `n`-th positive zero `j_{m,n}` of `J_m` (`n >= 1`).
pub fn bessel_zero(m: u32, n: usize) -> f64 {
    assert!(n >= 1, "zero index starts at 1");
    bessel_zeros(m, n).roots[n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    const J0: [f64; 5] = [
        2.4048255576957727686,
        5.5200781102863106496,
        8.653727912911012217,
        11.791534439014281614,
        14.930917708487785948,
    ];
    const J1: [f64; 5] = [
        3.8317059702075123156,
        7.0155866698156187535,
        10.173468135062722077,
        13.323691936314223032,
        16.470630050877632813,
    ];
    const J2: [f64; 3] = [5.1356223018406825563, 8.4172441403998648578, 11.619841172149059427];
    const J3: [f64; 2] = [6.3801618959239835062, 9.7610231299816696785];

    #[test]
    fn zeros_match_reference() {
        for (m, want) in [(0u32, &J0[..]), (1, &J1[..]), (2, &J2[..]), (3, &J3[..])] {
            for (k, &z) in want.iter().enumerate() {
                let got = bessel_zero(m, k + 1);
                assert!((got - z).abs() < 1e-12, "j_{m},{} = {got}", k + 1);
                assert!(bessel_j(m, got).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn published_rounded_values() {
        assert!((bessel_zero(1, 1) - 3.8317).abs() < 5e-4);
        assert!((bessel_zero(0, 2) - 5.5201).abs() < 5e-4);
        assert!((bessel_zero(0, 1) - 2.404826).abs() < 1e-6);
    }

    #[test]
    fn zeros_interlace() {
        for m in 0..6 {
            let a = bessel_zeros(m, 8).roots;
            let b = bessel_zeros(m + 1, 8).roots;
            for n in 0..7 {
                assert!(a[n] < b[n] && b[n] < a[n + 1], "m={m} n={n}");
            }
            assert!(a.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn concurrent_first_use() {
        let handles: Vec<_> = (0..8)
            .map(|k| std::thread::spawn(move || bessel_zero(7, 3 + k % 3)))
            .collect();
        for h in handles {
            let z = h.join().unwrap();
            assert!(bessel_j(7, z).abs() < 1e-12);
        }
    }
}
