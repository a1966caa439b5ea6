//! JSON encodings. Rationals are strings `"p/q"` (or `"p"`); integer JSON
//! numbers are accepted on input.

use serde_json::{json, Value};

use crate::decomposition::ZariskiDecomposition;
use crate::error::{Error, Result};
use crate::exactgeom::polytope::{Halfspace, Polytope};
use crate::exactgeom::rational::{self, QVector, Rational};
use crate::surface::model::{Curve, LatticeSurface};
use crate::toric::fan::ToricVariety;

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

pub fn rational_to_json(x: &Rational) -> Value {
    Value::String(rational::format(x))
}

pub fn vector_to_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational_to_json).collect())
}

pub fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => rational::parse(s),
        Value::Number(n) => n
            .as_i64()
            .map(rational::int)
            .ok_or_else(|| schema(format!("rational must be an integer or a \"p/q\" string, got {n}"))),
        other => Err(schema(format!("expected a rational, got {other}"))),
    }
}

pub fn vector_from_json(v: &Value) -> Result<QVector> {
    v.as_array()
        .ok_or_else(|| schema(format!("expected an array of rationals, got {v}")))?
        .iter()
        .map(rational_from_json)
        .collect()
}

fn field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| schema(format!("missing field {key:?}")))
}

fn int_list<T: TryFrom<i64>>(v: &Value) -> Result<Vec<T>> {
    v.as_array()
        .ok_or_else(|| schema(format!("expected an array of integers, got {v}")))?
        .iter()
        .map(|x| {
            x.as_i64()
                .and_then(|i| T::try_from(i).ok())
                .ok_or_else(|| schema(format!("expected an integer, got {x}")))
        })
        .collect()
}

fn int_matrix<T: TryFrom<i64>>(v: &Value) -> Result<Vec<Vec<T>>> {
    v.as_array()
        .ok_or_else(|| schema(format!("expected an array of arrays, got {v}")))?
        .iter()
        .map(int_list)
        .collect()
}

pub fn polytope_to_json(p: &Polytope) -> Value {
    json!({
        "ambient_dim": p.ambient_dim(),
        "vertices": p.vertices().iter().map(|v| vector_to_json(v)).collect::<Vec<_>>(),
        "halfspaces": p.halfspaces().iter().map(|h| json!({
            "normal": vector_to_json(&h.normal),
            "offset": rational_to_json(&h.offset),
        })).collect::<Vec<_>>(),
    })
}

/// Rebuilds from the vertices when present, otherwise from the halfspaces.
pub fn polytope_from_json(v: &Value) -> Result<Polytope> {
    let vertices: Vec<QVector> = match v.get("vertices") {
        Some(vs) => vs
            .as_array()
            .ok_or_else(|| schema("vertices must be an array"))?
            .iter()
            .map(vector_from_json)
            .collect::<Result<_>>()?,
        None => Vec::new(),
    };
    let halfspaces: Vec<Halfspace> = match v.get("halfspaces") {
        Some(hs) => hs
            .as_array()
            .ok_or_else(|| schema("halfspaces must be an array"))?
            .iter()
            .map(|h| {
                Ok(Halfspace::new(
                    vector_from_json(field(h, "normal")?)?,
                    rational_from_json(field(h, "offset")?)?,
                ))
            })
            .collect::<Result<_>>()?,
        None => Vec::new(),
    };
    let dim = match v.get("ambient_dim").and_then(Value::as_u64) {
        Some(d) => d as usize,
        None => vertices
            .first()
            .map(Vec::len)
            .or_else(|| halfspaces.first().map(|h| h.normal.len()))
            .ok_or_else(|| schema("cannot infer the ambient dimension of an empty polytope"))?,
    };
    if vertices.iter().any(|x| x.len() != dim) || halfspaces.iter().any(|h| h.normal.len() != dim) {
        return Err(schema("polytope coordinates disagree with the ambient dimension"));
    }
    if !vertices.is_empty() {
        Ok(Polytope::hull_in(dim, &vertices))
    } else if !halfspaces.is_empty() {
        Polytope::from_halfspaces(dim, &halfspaces)
    } else {
        Ok(Polytope::empty(dim))
    }
}

/// A variety file: toric fan or lattice surface.
#[derive(Debug, Clone, PartialEq)]
pub enum Variety {
    Toric(ToricVariety),
    Surface(LatticeSurface),
}

impl Variety {
    pub fn divisor_len(&self) -> usize {
        match self {
            Variety::Toric(x) => x.num_rays(),
            Variety::Surface(s) => s.rank,
        }
    }
}

pub fn variety_to_json(v: &Variety) -> Value {
    match v {
        Variety::Toric(x) => json!({"type": "toric", "rays": x.rays, "max_cones": x.max_cones}),
        Variety::Surface(s) => json!({
            "type": "surface",
            "rank": s.rank,
            "Q": s.q,
            "curves": s.curves.iter().map(|c| json!({"name": c.name, "class": vector_to_json(&c.class)})).collect::<Vec<_>>(),
            "effective_generators": s.effective_generators.iter().map(|g| vector_to_json(g)).collect::<Vec<_>>(),
            "fibrations": s.fibrations.iter().map(|f| json!({"F": vector_to_json(f)})).collect::<Vec<_>>(),
            "abundant": s.abundant,
        }),
    }
}

pub fn variety_from_json(v: &Value) -> Result<Variety> {
    match field(v, "type")?.as_str() {
        Some("toric") => {
            let rays: Vec<Vec<i64>> = int_matrix(field(v, "rays")?)?;
            let cones: Vec<Vec<usize>> = int_matrix(field(v, "max_cones")?)?;
            if rays.is_empty() {
                return Err(schema("a fan needs rays"));
            }
            if cones.iter().flatten().any(|&i| i >= rays.len()) {
                return Err(schema("cone refers to a missing ray"));
            }
            let x = ToricVariety::new(rays, cones);
            let report = x.validate();
            if !report.is_valid() {
                return Err(Error::InvalidInput(report.describe().join("; ")));
            }
            Ok(Variety::Toric(x))
        }
        Some("surface") => {
            let rank = field(v, "rank")?
                .as_u64()
                .ok_or_else(|| schema("rank must be a nonnegative integer"))? as usize;
            let q: Vec<Vec<i64>> = int_matrix(field(v, "Q")?)?;
            let curves = field(v, "curves")?
                .as_array()
                .ok_or_else(|| schema("curves must be an array"))?
                .iter()
                .map(|c| {
                    Ok(Curve {
                        name: field(c, "name")?
                            .as_str()
                            .ok_or_else(|| schema("curve name must be a string"))?
                            .to_string(),
                        class: vector_from_json(field(c, "class")?)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let effective_generators = field(v, "effective_generators")?
                .as_array()
                .ok_or_else(|| schema("effective_generators must be an array"))?
                .iter()
                .map(vector_from_json)
                .collect::<Result<Vec<_>>>()?;
            let fibrations = match v.get("fibrations") {
                Some(fs) => fs
                    .as_array()
                    .ok_or_else(|| schema("fibrations must be an array"))?
                    .iter()
                    .map(|f| vector_from_json(field(f, "F")?))
                    .collect::<Result<Vec<_>>>()?,
                None => Vec::new(),
            };
            let abundant = v.get("abundant").and_then(Value::as_bool).unwrap_or(false);
            let s = LatticeSurface {
                rank,
                q,
                curves,
                effective_generators,
                fibrations,
                abundant,
            };
            let report = s.validate();
            if !report.is_valid() {
                return Err(Error::InvalidInput(report.problems.join("; ")));
            }
            Ok(Variety::Surface(s))
        }
        _ => Err(schema("variety type must be \"toric\" or \"surface\"")),
    }
}

/// `{"coeffs": [...]}` for toric divisors, `{"class": [...]}` for surface
/// classes; either key is accepted for both.
pub fn divisor_from_json(v: &Value, variety: &Variety) -> Result<QVector> {
    let raw = v
        .get("coeffs")
        .or_else(|| v.get("class"))
        .ok_or_else(|| schema("divisor needs \"coeffs\" or \"class\""))?;
    let d = vector_from_json(raw)?;
    if d.len() != variety.divisor_len() {
        return Err(schema(format!(
            "divisor has {} entries, the variety needs {}",
            d.len(),
            variety.divisor_len()
        )));
    }
    Ok(d)
}

pub fn divisor_to_json(d: &[Rational], variety: &Variety) -> Value {
    match variety {
        Variety::Toric(_) => json!({"coeffs": vector_to_json(d)}),
        Variety::Surface(_) => json!({"class": vector_to_json(d)}),
    }
}

/// `{"cone": [...]}` (ordered rays) or `{"curve": "E", "point": "general"}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlagSpec {
    Invariant(Vec<usize>),
    General { curve: String },
}

pub fn flag_from_json(v: &Value) -> Result<FlagSpec> {
    if let Some(c) = v.get("cone") {
        return Ok(FlagSpec::Invariant(int_list(c)?));
    }
    let curve = field(v, "curve")?
        .as_str()
        .ok_or_else(|| schema("flag curve must be a name"))?
        .to_string();
    match v.get("point").and_then(Value::as_str).unwrap_or("general") {
        "general" => Ok(FlagSpec::General { curve }),
        other => Err(schema(format!("only general flag points are supported, got {other:?}"))),
    }
}

pub fn flag_to_json(f: &FlagSpec) -> Value {
    match f {
        FlagSpec::Invariant(order) => json!({"cone": order}),
        FlagSpec::General { curve } => json!({"curve": curve, "point": "general"}),
    }
}

/// `{"P": [...], "N": [{"curve": "E", "coeff": "1"}], "kind": "sigma"}`.
pub fn decomposition_to_json(z: &ZariskiDecomposition) -> Value {
    json!({
        "P": vector_to_json(&z.positive),
        "N": z.negative.iter().map(|c| json!({"curve": c.name, "coeff": rational_to_json(&c.coeff)})).collect::<Vec<_>>(),
        "kind": z.kind.as_str(),
    })
}

pub fn read_json(path: &std::path::Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| schema(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::rational::{frac, qvec};
    use crate::surface::model;
    use crate::toric::models;

    #[test]
    fn rationals_round_trip() {
        let v = vec![frac(1, 2), frac(-3, 1), frac(0, 5)];
        let j = vector_to_json(&v);
        assert_eq!(j, json!(["1/2", "-3", "0"]));
        assert_eq!(vector_from_json(&j).unwrap(), v);
        assert_eq!(
            vector_from_json(&json!([1, "2/4"])).unwrap(),
            vec![frac(1, 1), frac(1, 2)]
        );
        assert!(rational_from_json(&json!(0.5)).is_err());
    }

    #[test]
    fn polytope_round_trip() {
        let p = Polytope::hull(&[qvec(&[0, 0]), qvec(&[1, 0]), vec![frac(1, 3), frac(2, 3)]]);
        let back = polytope_from_json(&polytope_to_json(&p)).unwrap();
        assert!(back.equals(&p));
        let mut hs_only = polytope_to_json(&p);
        hs_only.as_object_mut().unwrap().remove("vertices");
        assert!(polytope_from_json(&hs_only).unwrap().equals(&p));
        let empty = Polytope::empty(3);
        assert!(polytope_from_json(&polytope_to_json(&empty)).unwrap().is_empty());
    }

    #[test]
    fn varieties_round_trip() {
        for v in [Variety::Toric(models::bl_p3()), Variety::Surface(model::bl1_p2())] {
            assert_eq!(variety_from_json(&variety_to_json(&v)).unwrap(), v);
        }
        let bad = json!({"type": "toric", "rays": [[1, 0], [0, 1]], "max_cones": [[0, 1]]});
        assert!(matches!(variety_from_json(&bad), Err(Error::InvalidInput(_))));
        assert!(matches!(
            variety_from_json(&json!({"type": "cone"})),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn flags_and_divisors() {
        assert_eq!(
            flag_from_json(&json!({"cone": [1, 0]})).unwrap(),
            FlagSpec::Invariant(vec![1, 0])
        );
        assert_eq!(
            flag_from_json(&json!({"curve": "E", "point": "general"})).unwrap(),
            FlagSpec::General { curve: "E".into() }
        );
        let v = Variety::Toric(models::p2());
        assert_eq!(
            divisor_from_json(&json!({"coeffs": ["0", "0", "1"]}), &v).unwrap(),
            qvec(&[0, 0, 1])
        );
        assert!(divisor_from_json(&json!({"coeffs": ["1"]}), &v).is_err());
    }
}
