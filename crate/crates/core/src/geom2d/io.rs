//! Text serialization of pixel masks.
//!
//! ```text
//! LPMASK 1
//! origin <x> <y>
//! h <h>
//! dims <nx> <ny>
//! <ny rows of nx characters '0'/'1'; the first row is j = iy0 (lowest y)>
//! ```
//!
//! `origin` is the centre of the first window cell and must lie on the lattice
//! `h * Z^2`. Lines starting with `#` are ignored. The JSON sidecar written by
//! [`MaskMeta`] repeats the header fields plus the active count.

use serde::{Deserialize, Serialize};

use super::mask::PixelMask;
use super::Shape;
use crate::error::{Error, Result};

pub const MASK_MAGIC: &str = "LPMASK";
pub const MASK_VERSION: u32 = 1;

pub fn mask_to_text(mask: &PixelMask) -> String {
    let (nx, ny) = mask.dims();
    let o = mask.origin();
    let mut s = String::with_capacity((nx + 1) * ny + 64);
    s.push_str(&format!("{MASK_MAGIC} {MASK_VERSION}\n"));
    s.push_str(&format!("origin {:?} {:?}\n", o.x, o.y));
    s.push_str(&format!("h {:?}\n", mask.h()));
    s.push_str(&format!("dims {nx} {ny}\n"));
    for row in mask.occupancy().chunks(nx.max(1)) {
        s.extend(row.iter().map(|&b| if b { '1' } else { '0' }));
        s.push('\n');
    }
    s
}

pub fn mask_from_text(text: &str) -> Result<PixelMask> {
    let bad = |m: &str| Error::Format(m.to_string());
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let head = lines.next().ok_or_else(|| bad("empty input"))?;
    let mut it = head.split_whitespace();
    if it.next() != Some(MASK_MAGIC) {
        return Err(bad("missing LPMASK header"));
    }
    let version: u32 = it
        .next()
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| bad("missing version"))?;
    if version != MASK_VERSION {
        return Err(Error::Format(format!("unsupported mask version {version}")));
    }
    let mut field = |name: &str, n: usize| -> Result<Vec<String>> {
        let line = lines.next().ok_or_else(|| Error::Format(format!("missing `{name}` line")))?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(name) {
            return Err(Error::Format(format!("expected `{name}`, got `{line}`")));
        }
        let vals: Vec<String> = parts.map(String::from).collect();
        if vals.len() != n {
            return Err(Error::Format(format!("`{name}` takes {n} values")));
        }
        Ok(vals)
    };
    let num = |s: &str| -> Result<f64> { s.parse().map_err(|_| Error::Format(format!("bad number `{s}`"))) };
    let int = |s: &str| -> Result<usize> { s.parse().map_err(|_| Error::Format(format!("bad integer `{s}`"))) };
    let origin = field("origin", 2)?;
    let (ox, oy) = (num(&origin[0])?, num(&origin[1])?);
    let h = num(&field("h", 1)?[0])?;
    let dims = field("dims", 2)?;
    let (nx, ny) = (int(&dims[0])?, int(&dims[1])?);
    if !(h.is_finite() && h > 0.0) {
        return Err(bad("h must be positive"));
    }
    let snap = |v: f64| -> Result<i64> {
        let k = (v / h).round();
        if (v - k * h).abs() > 1e-9 * h.max(v.abs()) {
            return Err(Error::Format(format!("origin coordinate {v} is not a multiple of h")));
        }
        Ok(k as i64)
    };
    let (ix0, iy0) = (snap(ox)?, snap(oy)?);
    let mut occ = Vec::with_capacity(nx * ny);
    for r in 0..ny {
        let row = lines.next().ok_or_else(|| Error::Format(format!("missing row {r}")))?;
        if row.len() != nx {
            return Err(Error::Format(format!("row {r} has {} cells, expected {nx}", row.len())));
        }
        for ch in row.chars() {
            occ.push(match ch {
                '0' => false,
                '1' => true,
                _ => return Err(Error::Format(format!("bad cell character `{ch}`"))),
            });
        }
    }
    if lines.next().is_some() {
        return Err(bad("trailing data after mask rows"));
    }
    PixelMask::new(h, ix0, iy0, nx, ny, occ)
}

/// JSON metadata accompanying a mask file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaskMeta {
    pub version: u32,
    pub origin: [f64; 2],
    pub h: f64,
    pub dims: [usize; 2],
    pub active_count: usize,
    pub area: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<Shape>,
}

impl MaskMeta {
    pub fn of(mask: &PixelMask, shape: Option<&Shape>) -> Self {
        let o = mask.origin();
        let (nx, ny) = mask.dims();
        MaskMeta {
            version: MASK_VERSION,
            origin: [o.x, o.y],
            h: mask.h(),
            dims: [nx, ny],
            active_count: mask.active_count(),
            area: mask.area(),
            shape: shape.cloned(),
        }
    }
}
