use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelKind {
    /// `log(1 / r)`.
    Log,
    /// `1 / r^(dim - alpha)` with `0 < alpha < dim`.
    Riesz { alpha: f64, dim: u32 },
}

/// Radial kernel `prefactor * K(r)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    #[serde(flatten)]
    pub kind: KernelKind,
    pub prefactor: f64,
}

impl KernelSpec {
    /// `(1 / 2 pi) log(1 / r)`.
    pub fn log() -> Self {
        KernelSpec {
            kind: KernelKind::Log,
            prefactor: 1.0 / (2.0 * PI),
        }
    }

    /// Planar Riesz kernel `1 / r^(2 - alpha)`.
    pub fn riesz(alpha: f64) -> Result<Self> {
        let k = KernelSpec {
            kind: KernelKind::Riesz { alpha, dim: 2 },
            prefactor: 1.0,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.prefactor.is_finite() && self.prefactor > 0.0) {
            return Err(Error::InvalidInput(format!(
                "kernel prefactor must be positive, got {}",
                self.prefactor
            )));
        }
        match self.kind {
            KernelKind::Log => Ok(()),
            KernelKind::Riesz { alpha, dim } => {
                if dim != 2 {
                    return Err(Error::InvalidInput(format!(
                        "Riesz kernel on planar masks needs dim = 2, got {dim}"
                    )));
                }
                if !(alpha > 0.0 && alpha < dim as f64) {
                    return Err(Error::InvalidInput(format!("Riesz kernel needs 0 < alpha < {dim}, got {alpha}")));
                }
                Ok(())
            }
        }
    }

    /// `K(r)` without the prefactor; strictly decreasing in `r`.
    pub fn profile(&self, r: f64) -> f64 {
        match self.kind {
            KernelKind::Log => -r.ln(),
            KernelKind::Riesz { alpha, dim } => r.powf(alpha - dim as f64),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.prefactor * self.profile(r)
    }

    /// Integral of the kernel over the disc of area `h^2` centred at the
    /// singularity, radius `rho = h / sqrt(pi)`.
    pub fn cell_self(&self, h: f64) -> f64 {
        let rho = h / PI.sqrt();
        let v = match self.kind {
            // pi rho^2 (log(1/rho) + 1/2)
            KernelKind::Log => h * h * (-rho.ln() + 0.5),
            // 2 pi rho^beta / beta with beta = alpha - dim + 2
            KernelKind::Riesz { alpha, dim } => {
                let beta = alpha - dim as f64 + 2.0;
                2.0 * PI * rho.powf(beta) / beta
            }
        };
        self.prefactor * v
    }

    /// Matrix entry between two cells at lattice offset `(di, dj)`.
    pub fn entry(&self, h: f64, di: i64, dj: i64) -> f64 {
        if di == 0 && dj == 0 {
            self.cell_self(h)
        } else {
            let r = h * ((di * di + dj * dj) as f64).sqrt();
            h * h * self.eval(r)
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            KernelKind::Log => f.write_str("log"),
            KernelKind::Riesz { alpha, .. } => write!(f, "riesz:{alpha}"),
        }
    }
}

impl FromStr for KernelSpec {
    type Err = Error;

    /// `log` or `riesz:<alpha>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("log") {
            return Ok(KernelSpec::log());
        }
        if let Some(a) = s.strip_prefix("riesz:") {
            let alpha: f64 = a
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad Riesz exponent `{a}`")))?;
            return KernelSpec::riesz(alpha);
        }
        Err(Error::InvalidInput(format!("unknown kernel `{s}`; expected `log` or `riesz:<alpha>`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_self_integral() {
        // numerical integral of log(1/|y|) over B_rho in polar coordinates
        let h = 0.07;
        let rho = h / PI.sqrt();
        let m = 200_000;
        let mut s = 0.0;
        for k in 0..m {
            let r = (k as f64 + 0.5) / m as f64 * rho;
            s += -r.ln() * r;
        }
        s *= 2.0 * PI * rho / m as f64;
        let k = KernelSpec::log();
        assert!((k.cell_self(h) - s / (2.0 * PI)).abs() < 1e-9);
    }

    #[test]
    fn riesz_self_integral() {
        let h = 0.05;
        let k = KernelSpec::riesz(1.0).unwrap();
        let rho = h / PI.sqrt();
        // int_{B_rho} 1/|y| = 2 pi rho
        assert!((k.cell_self(h) - 2.0 * PI * rho).abs() < 1e-15);
    }

    #[test]
    fn adjacent_entry() {
        let h = 0.1;
        let k = KernelSpec::log();
        let want = h * h / (2.0 * PI) * (1.0 / h).ln();
        assert!((k.entry(h, 1, 0) - want).abs() < 1e-16);
    }

    #[test]
    fn parse_and_validate() {
        assert_eq!("log".parse::<KernelSpec>().unwrap(), KernelSpec::log());
        let r: KernelSpec = "riesz:1".parse().unwrap();
        assert_eq!(r.kind, KernelKind::Riesz { alpha: 1.0, dim: 2 });
        assert!("riesz:2".parse::<KernelSpec>().is_err());
        assert!("riesz:0".parse::<KernelSpec>().is_err());
        assert!("gauss".parse::<KernelSpec>().is_err());
        let json = serde_json::to_string(&r).unwrap();
        let back: KernelSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
