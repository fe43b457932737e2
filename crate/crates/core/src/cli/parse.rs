use std::path::Path;

use serde::{Deserialize, Deserializer};

use crate::error::{Error, Result};
use crate::geom2d::{GridNormal, Shape, Vec2};
use crate::solver::KernelSpec;
use crate::verify::{dumbbell, two_balls};

fn numbers(body: &str) -> Result<Vec<f64>> {
    body.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("`{t}` is not a number")))
        })
        .collect()
}

fn arity(name: &str, v: &[f64], allowed: &[usize]) -> Result<()> {
    if allowed.contains(&v.len()) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "`{name}` takes {allowed:?} parameters, got {}",
            v.len()
        )))
    }
}

/// `kind:p1,p2,...` shorthand. Everything is centred at the origin unless a
/// centre is given.
///
/// ```text
/// disc:R[,cx,cy]   annulus:R,r   eccentric_annulus:R,r,t
/// ellipse:a,b[,angle]   square:side   rect:w,t
/// two_balls:d   dumbbell:c,d
/// ```
pub fn shape_shorthand(s: &str) -> Result<Shape> {
    let (name, body) = s
        .split_once(':')
        .ok_or_else(|| Error::InvalidInput(format!("`{s}` is not a shape shorthand")))?;
    let name = name.trim();
    let v = numbers(body)?;
    let shape = match name {
        "disc" => {
            arity(name, &v, &[1, 3])?;
            let c = if v.len() == 3 { Vec2::new(v[1], v[2]) } else { Vec2::ZERO };
            Shape::disc(c, v[0])
        }
        "annulus" => {
            arity(name, &v, &[2])?;
            Shape::annulus(Vec2::ZERO, v[0], v[1])
        }
        "eccentric_annulus" => {
            arity(name, &v, &[3])?;
            Shape::eccentric_annulus(v[0], v[1], v[2])
        }
        "ellipse" => {
            arity(name, &v, &[2, 3])?;
            Shape::Ellipse {
                center: Vec2::ZERO,
                semi_a: v[0],
                semi_b: v[1],
                angle: v.get(2).copied().unwrap_or(0.0),
            }
        }
        "square" => {
            arity(name, &v, &[1])?;
            Shape::square(Vec2::ZERO, v[0])
        }
        "rect" => {
            arity(name, &v, &[2])?;
            let d = Vec2::new(v[0] / 2.0, v[1] / 2.0);
            Shape::rect(-d, d)
        }
        "two_balls" => {
            arity(name, &v, &[1])?;
            two_balls(v[0])?
        }
        "dumbbell" => {
            arity(name, &v, &[2])?;
            dumbbell(v[0], v[1])?
        }
        _ => return Err(Error::InvalidInput(format!("unknown shape kind `{name}`"))),
    };
    shape.validate()?;
    Ok(shape)
}

/// A shape from inline JSON, a shorthand, or a path to a JSON file.
pub fn parse_shape(arg: &str) -> Result<Shape> {
    let t = arg.trim();
    let shape: Shape = if t.starts_with('{') {
        serde_json::from_str(t)?
    } else if Path::new(t).is_file() {
        serde_json::from_str(&std::fs::read_to_string(t)?)?
    } else if t.contains(':') {
        return shape_shorthand(t);
    } else {
        return Err(Error::InvalidInput(format!(
            "`{t}` is neither inline JSON, a shorthand like `disc:1`, nor a readable file"
        )));
    };
    shape.validate()?;
    Ok(shape)
}

/// Comma-separated list of spacings.
pub fn parse_list(arg: &str) -> Result<Vec<f64>> {
    numbers(arg)
}

pub fn parse_normal(arg: &str) -> Result<GridNormal> {
    serde_json::from_value(serde_json::Value::String(arg.trim().to_string()))
        .map_err(|_| Error::InvalidInput(format!("unknown grid normal `{arg}`; expected pos_x, neg_x, pos_y, neg_y, pos_diag, neg_diag, pos_anti or neg_anti")))
}

pub(crate) fn kernel_field<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<KernelSpec, D::Error> {
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

/// A shape field in a config: a JSON object or a shorthand string.
pub(crate) fn shape_field<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Shape, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Text(String),
        Json(Shape),
    }
    let shape = match Raw::deserialize(d)? {
        Raw::Text(s) => shape_shorthand(&s).map_err(serde::de::Error::custom)?,
        Raw::Json(s) => s,
    };
    shape.validate().map_err(serde::de::Error::custom)?;
    Ok(shape)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthands() {
        assert_eq!(parse_shape("disc:2").unwrap(), Shape::disc(Vec2::ZERO, 2.0));
        assert_eq!(parse_shape("ellipse:2,0.25").unwrap(), Shape::ellipse(Vec2::ZERO, 2.0, 0.25));
        assert_eq!(
            parse_shape(r#"{"kind":"disc","center":[1,0],"radius":0.5}"#).unwrap(),
            Shape::disc(Vec2::new(1.0, 0.0), 0.5)
        );
        assert!(parse_shape("disc:1,2").is_err());
        assert!(parse_shape("blob:1").is_err());
        assert!(parse_shape("annulus:1,2").is_err());
        assert!(parse_shape("no-such-file").is_err());
    }

    #[test]
    fn normals() {
        assert_eq!(parse_normal("neg_diag").unwrap(), GridNormal::NegDiag);
        assert!(parse_normal("up").is_err());
    }
}
