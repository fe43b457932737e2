//! Closed-form spectrum of the logarithmic potential operator on a disc `B_R`.
//!
//! Radial eigenvalues are `R^2 / mu_{0,n}(B_R)^2`, non-radial ones
//! `R^2 / j_{m-1,n}^2` (cos/sin pair), and for `R > 1` there is one negative
//! eigenvalue `-R^2 / mu_0(B_R)^2` with an `I_0` profile.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom2d::Vec2;
use crate::specfun::{bessel_i0, bessel_j, bessel_zero, mu_modified, mu_radial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigKind {
    Radial,
    Nonradial,
    Negative,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscEig {
    /// Angular index.
    pub m: u32,
    /// Radial index, from 1.
    pub n: usize,
    pub tau: f64,
    pub kind: EigKind,
    pub multiplicity: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Angular {
    Cos,
    Sin,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// `J_m(scale * r)`.
    J,
    /// `I_0(scale * r)`.
    I0,
}

/// An eigenfunction `profile(scale * r) * angular(m * theta)` on `B_R`,
/// defined up to a constant multiple.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenfunctionSpec {
    pub m: u32,
    pub n: usize,
    pub radius: f64,
    pub scale: f64,
    pub angular: Angular,
    pub profile: Profile,
}

fn check_radius(radius: f64) -> Result<()> {
    if radius.is_finite() && radius > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("radius must be positive, got {radius}")))
    }
}

/// The first `count` radial eigenvalues, descending.
pub fn radial_eigs(radius: f64, count: usize) -> Result<Vec<DiscEig>> {
    check_radius(radius)?;
    (1..=count)
        .map(|n| {
            let mu = mu_radial(radius, n)?.value;
            Ok(DiscEig {
                m: 0,
                n,
                tau: radius * radius / (mu * mu),
                kind: EigKind::Radial,
                multiplicity: 1,
            })
        })
        .collect()
}

/// Non-radial eigenvalues `tau_{m,n} = R^2 / j_{m-1,n}^2` for
/// `1 <= m <= m_max`, `1 <= n <= n_max`, ordered by `m` then `n`.
pub fn nonradial_eigs(radius: f64, m_max: u32, n_max: usize) -> Result<Vec<DiscEig>> {
    check_radius(radius)?;
    let mut out = Vec::with_capacity(m_max as usize * n_max);
    for m in 1..=m_max {
        for n in 1..=n_max {
            let j = bessel_zero(m - 1, n);
            out.push(DiscEig {
                m,
                n,
                tau: radius * radius * (1.0 / (j * j)),
                kind: EigKind::Nonradial,
                multiplicity: 2,
            });
        }
    }
    Ok(out)
}

/// The unique negative eigenvalue `-R^2 / mu_0(B_R)^2`; only for `R > 1`.
pub fn neg_eig(radius: f64) -> Result<DiscEig> {
    check_radius(radius)?;
    let mu = mu_modified(radius)?.value;
    Ok(DiscEig {
        m: 0,
        n: 1,
        tau: -radius * radius / (mu * mu),
        kind: EigKind::Negative,
        multiplicity: 1,
    })
}

/// The `count` largest positive eigenvalues, repeated by multiplicity, in
/// descending order. Ties keep radial entries first.
pub fn leading_eigs(radius: f64, count: usize) -> Result<Vec<DiscEig>> {
    check_radius(radius)?;
    if count == 0 {
        return Ok(Vec::new());
    }
    let depth = count + 1;
    let mut all = radial_eigs(radius, depth)?;
    all.extend(nonradial_eigs(radius, depth as u32, depth)?);
    all.sort_by(|a, b| b.tau.total_cmp(&a.tau));
    let mut out = Vec::with_capacity(count);
    for e in all {
        for _ in 0..e.multiplicity {
            if out.len() == count {
                return Ok(out);
            }
            out.push(e);
        }
    }
    Ok(out)
}

/// The three largest positive eigenvalues with their labels.
///
/// `tau_{0,1}` and `tau_{1,1}` are compared numerically: for `R < 1` the radial
/// one leads, at `R = 1` all three coincide, and for `R > 1` the `m = 1` pair
/// leads with the radial eigenvalue third.
pub fn top3(radius: f64) -> Result<[DiscEig; 3]> {
    let v = leading_eigs(radius, 3)?;
    Ok([v[0], v[1], v[2]])
}

/// Piecewise asymptotic surrogate for the negative eigenvalue:
/// `-R^2 (log R)^2` near `R = 1`, `-R^2 log R / 2` for large `R`, switching
/// at `log R = 1`.
pub fn asymptotic_neg(radius: f64) -> Result<f64> {
    check_radius(radius)?;
    if radius <= 1.0 {
        return Err(Error::NoNegativeEigenvalue { radius });
    }
    let l = radius.ln();
    let r2 = radius * radius;
    Ok(if l < 1.0 { -r2 * l * l } else { -r2 * l / 2.0 })
}

impl DiscEig {
    /// Eigenfunction of this eigenvalue on `B_radius`. `angular` selects the
    /// cos or sin member of a non-radial pair and is ignored otherwise.
    pub fn eigenfunction(&self, radius: f64, angular: Angular) -> Result<EigenfunctionSpec> {
        check_radius(radius)?;
        let (scale, angular, profile) = match self.kind {
            EigKind::Radial => (mu_radial(radius, self.n)?.value / radius, Angular::None, Profile::J),
            EigKind::Nonradial => {
                let a = if angular == Angular::None { Angular::Cos } else { angular };
                (bessel_zero(self.m - 1, self.n) / radius, a, Profile::J)
            }
            EigKind::Negative => (mu_modified(radius)?.value / radius, Angular::None, Profile::I0),
        };
        Ok(EigenfunctionSpec {
            m: self.m,
            n: self.n,
            radius,
            scale,
            angular,
            profile,
        })
    }
}

/// Evaluate an eigenfunction at `p`, which must lie in the closed disc.
pub fn eval_eigenfunction(spec: &EigenfunctionSpec, p: Vec2) -> Result<f64> {
    let r = p.norm();
    if r > spec.radius * (1.0 + 1e-12) {
        return Err(Error::OutsideDomain {
            x: p.x,
            y: p.y,
            radius: spec.radius,
        });
    }
    let radial = match spec.profile {
        Profile::J => bessel_j(spec.m, spec.scale * r),
        Profile::I0 => bessel_i0(spec.scale * r)?,
    };
    let theta = p.y.atan2(p.x);
    let ang = match spec.angular {
        Angular::Cos => (spec.m as f64 * theta).cos(),
        Angular::Sin => (spec.m as f64 * theta).sin(),
        Angular::None => 1.0,
    };
    Ok(radial * ang)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{bessel_i0e, bessel_i1e, bessel_jp};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn unit_disc_radial_and_nonradial() {
        let j01 = bessel_zero(0, 1);
        let r = radial_eigs(1.0, 1).unwrap();
        assert_eq!(r[0].tau, 1.0 / (j01 * j01));
        let nr = nonradial_eigs(1.0, 1, 1).unwrap();
        assert_eq!(nr[0].tau, 1.0 / (j01 * j01));
        assert_eq!(nr[0].multiplicity, 2);
        let t3 = top3(1.0).unwrap();
        assert!(t3.iter().all(|e| e.tau == t3[0].tau));
        assert!((t3[0].tau - 0.17291).abs() < 1e-5);
    }

    #[test]
    fn radial_bounds_by_bessel_zeros() {
        let r = 0.5;
        let e = radial_eigs(r, 2).unwrap();
        let (j1, j2) = (bessel_zero(0, 1), bessel_zero(0, 2));
        assert!(r * r / (j2 * j2) < e[1].tau && e[1].tau < r * r / (j1 * j1));
        assert!(e[0].tau > e[1].tau);
        let r = 2.0;
        let e = radial_eigs(r, 1).unwrap();
        assert!(r * r / (j2 * j2) < e[0].tau && e[0].tau < r * r / (j1 * j1));
    }

    #[test]
    fn nonradial_scaling_is_exact() {
        let base = nonradial_eigs(1.0, 4, 3).unwrap();
        for &r in &[0.3, 2.0, 5.5] {
            let scaled = nonradial_eigs(r, 4, 3).unwrap();
            for (a, b) in base.iter().zip(&scaled) {
                assert_eq!(b.tau, r * r * a.tau);
            }
        }
        let t21 = nonradial_eigs(1.0, 2, 1).unwrap()[1];
        assert!((t21.tau - 1.0 / 3.8317f64.powi(2)).abs() < 1e-4);
    }

    #[test]
    fn top3_labels() {
        let j01 = bessel_zero(0, 1);
        let r = 0.5;
        let t = top3(r).unwrap();
        assert_eq!(t[0].kind, EigKind::Radial);
        assert_eq!((t[1].kind, t[2].kind), (EigKind::Nonradial, EigKind::Nonradial));
        assert!(rel(t[1].tau, r * r / (j01 * j01)) < 1e-15);
        let mu = mu_radial(r, 1).unwrap().value;
        assert!(rel(t[0].tau, r * r / (mu * mu)) < 1e-15);

        let r = 2.0;
        let t = top3(r).unwrap();
        assert_eq!((t[0].kind, t[1].kind), (EigKind::Nonradial, EigKind::Nonradial));
        assert_eq!(t[2].kind, EigKind::Radial);
        let mu = mu_radial(r, 1).unwrap().value;
        assert!(rel(t[2].tau, r * r / (mu * mu)) < 1e-15);
    }

    #[test]
    fn negative_eigenvalue() {
        let e = std::f64::consts::E;
        let v = neg_eig(e).unwrap();
        assert!(rel(v.tau, -2.8567084974221766814) < 1e-10);
        assert!(rel(neg_eig(1.01).unwrap().tau, -9.999916659351253608e-5) < 1e-9);
        assert!(rel(neg_eig(2.0).unwrap().tau, -0.95564454052215833075) < 1e-10);
        assert!(rel(neg_eig(1000.0).unwrap().tau, -3330412.7372155714572) < 1e-9);
        assert!(matches!(neg_eig(1.0), Err(Error::NoNegativeEigenvalue { .. })));

        let r = 1.0001f64;
        let near = -r * r * r.ln().powi(2);
        assert!((neg_eig(r).unwrap().tau / near - 1.0).abs() < 0.05);
        let r = 1000.0f64;
        let far = -r * r * r.ln() / 2.0;
        assert!((neg_eig(r).unwrap().tau / far - 1.0).abs() < 0.15);
    }

    #[test]
    fn asymptotic_branches() {
        let r = 1.01f64;
        assert_eq!(asymptotic_neg(r).unwrap(), -r * r * r.ln().powi(2));
        let r = 4.0f64.exp();
        assert!(rel(asymptotic_neg(r).unwrap(), -2.0 * r * r) < 1e-14);
        for &r in &[1.01, 100.0] {
            let q = asymptotic_neg(r).unwrap() / neg_eig(r).unwrap().tau;
            assert!((0.8..=1.2).contains(&q), "R={r}: {q}");
        }
        assert!(asymptotic_neg(0.9).is_err());
    }

    #[test]
    fn eigenfunction_values_and_boundary_conditions() {
        let r = 1.7f64;
        let lr = r.ln();
        let rad = radial_eigs(r, 3).unwrap();
        for e in &rad {
            let s = e.eigenfunction(r, Angular::None).unwrap();
            assert_eq!(eval_eigenfunction(&s, Vec2::ZERO).unwrap(), 1.0);
            // Phi(R) - R log R Phi'(R) = 0 with Phi(x) = J0(scale x)
            let z = s.scale * r;
            let bc = bessel_j(0, z) - r * lr * s.scale * bessel_jp(0, z);
            assert!(bc.abs() < 1e-12, "{bc}");
        }
        for e in nonradial_eigs(r, 4, 3).unwrap() {
            let s = e.eigenfunction(r, Angular::Sin).unwrap();
            assert_eq!(eval_eigenfunction(&s, Vec2::ZERO).unwrap(), 0.0);
            // m Phi(R) + R Phi'(R) = 0
            let z = s.scale * r;
            let bc = e.m as f64 * bessel_j(e.m, z) + z * bessel_jp(e.m, z);
            assert!(bc.abs() < 1e-12, "m={} n={}: {bc}", e.m, e.n);
        }
        let s = neg_eig(r).unwrap().eigenfunction(r, Angular::None).unwrap();
        let edge = eval_eigenfunction(&s, Vec2::new(0.0, r)).unwrap();
        let mu = s.scale * r;
        assert!(rel(edge, bessel_i0(mu).unwrap()) < 1e-14);
        let bc = bessel_i0e(mu) - lr * mu * bessel_i1e(mu);
        assert!(bc.abs() < 1e-13);
        assert!(matches!(
            eval_eigenfunction(&s, Vec2::new(r, 0.1)),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn sampled_eigenfunctions_are_orthogonal() {
        let r = 1.3;
        let mut specs = Vec::new();
        for e in radial_eigs(r, 3).unwrap() {
            specs.push(e.eigenfunction(r, Angular::None).unwrap());
        }
        for e in nonradial_eigs(r, 2, 2).unwrap() {
            specs.push(e.eigenfunction(r, Angular::Cos).unwrap());
            specs.push(e.eigenfunction(r, Angular::Sin).unwrap());
        }
        specs.push(neg_eig(r).unwrap().eigenfunction(r, Angular::None).unwrap());
        // midpoint polar quadrature, r dr dtheta
        let (nr, nt) = (400, 256);
        let mut samples = vec![Vec::with_capacity(nr * nt); specs.len()];
        let mut w = Vec::with_capacity(nr * nt);
        for a in 0..nr {
            let rho = (a as f64 + 0.5) / nr as f64 * r;
            for b in 0..nt {
                let th = (b as f64 + 0.5) / nt as f64 * std::f64::consts::TAU;
                let p = Vec2::from_polar(rho, th);
                w.push(rho);
                for (k, s) in specs.iter().enumerate() {
                    samples[k].push(eval_eigenfunction(s, p).unwrap());
                }
            }
        }
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).zip(&w).map(|((x, y), w)| x * y * w).sum::<f64>();
        for i in 0..specs.len() {
            for j in i + 1..specs.len() {
                let c = dot(&samples[i], &samples[j]);
                let n = (dot(&samples[i], &samples[i]) * dot(&samples[j], &samples[j])).sqrt();
                assert!(c.abs() <= 1e-3 * n, "{i} vs {j}: {}", c / n);
            }
        }
    }
}
