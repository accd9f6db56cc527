//! Lossless JSON description of a surface: polygons as vertex lists with
//! each coordinate split into rational numerators/denominators, gluing
//! pairs, marked points, and involution centers. Big integers travel as
//! decimal strings.

use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::geom::V2;
use crate::qfield::{QuadNum, Rat};
use crate::surface::{
    EdgeRef, PointOnSurface, Polygon, PrymLabel, SurfaceError, TranslationSurface,
};

#[derive(Serialize, Deserialize)]
struct CoordJson {
    p_num: String,
    p_den: String,
    q_num: String,
    q_den: String,
    #[serde(rename = "D")]
    d: u64,
}

#[derive(Serialize, Deserialize)]
struct PointJson {
    x: CoordJson,
    y: CoordJson,
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    poly: usize,
    edge: usize,
}

#[derive(Serialize, Deserialize)]
struct MarkedJson {
    label: String,
    poly: usize,
    pos: PointJson,
}

#[derive(Serialize, Deserialize)]
struct SurfaceJson {
    d_param: u64,
    polygons: Vec<Vec<PointJson>>,
    gluings: Vec<(EdgeJson, EdgeJson)>,
    marked_points: Vec<MarkedJson>,
    involution_centers: Vec<PointJson>,
}

fn rat_to_strings(r: &Rat) -> (String, String) {
    (r.numer().to_string(), r.denom().to_string())
}

fn rat_from_strings(num: &str, den: &str) -> Result<Rat, SurfaceError> {
    let n = BigInt::from_str(num).map_err(|e| SurfaceError::Io(e.to_string()))?;
    let d = BigInt::from_str(den).map_err(|e| SurfaceError::Io(e.to_string()))?;
    if d == BigInt::from(0) {
        return Err(SurfaceError::Io("zero denominator".into()));
    }
    Ok(Rat::new(n, d))
}

fn coord_to_json(x: &QuadNum) -> CoordJson {
    let (pn, pd) = rat_to_strings(x.p());
    let (qn, qd) = rat_to_strings(x.q());
    CoordJson {
        p_num: pn,
        p_den: pd,
        q_num: qn,
        q_den: qd,
        d: x.d_param(),
    }
}

fn coord_from_json(c: &CoordJson) -> Result<QuadNum, SurfaceError> {
    Ok(QuadNum::new(
        c.d,
        rat_from_strings(&c.p_num, &c.p_den)?,
        rat_from_strings(&c.q_num, &c.q_den)?,
    ))
}

fn point_to_json(v: &V2) -> PointJson {
    PointJson {
        x: coord_to_json(&v.x),
        y: coord_to_json(&v.y),
    }
}

fn point_from_json(p: &PointJson) -> Result<V2, SurfaceError> {
    Ok(V2::new(coord_from_json(&p.x)?, coord_from_json(&p.y)?))
}

/// Serialize a surface to the JSON-shaped description format.
pub fn surface_to_json(s: &TranslationSurface) -> String {
    let doc = SurfaceJson {
        d_param: s.d_param(),
        polygons: s
            .polygons()
            .iter()
            .map(|p| p.vertices.iter().map(point_to_json).collect())
            .collect(),
        gluings: s
            .gluings()
            .iter()
            .map(|(a, b)| {
                (
                    EdgeJson {
                        poly: a.poly,
                        edge: a.edge,
                    },
                    EdgeJson {
                        poly: b.poly,
                        edge: b.edge,
                    },
                )
            })
            .collect(),
        marked_points: s
            .marked_points()
            .iter()
            .map(|(l, p)| MarkedJson {
                label: l.to_string(),
                poly: p.poly,
                pos: point_to_json(&p.pos),
            })
            .collect(),
        involution_centers: s.involution_centers().iter().map(point_to_json).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("surface serialization")
}

/// Re-ingest a surface from the JSON description format.
pub fn surface_from_json(text: &str) -> Result<TranslationSurface, SurfaceError> {
    let doc: SurfaceJson =
        serde_json::from_str(text).map_err(|e| SurfaceError::Io(e.to_string()))?;
    let polygons = doc
        .polygons
        .iter()
        .map(|verts| {
            Ok(Polygon {
                vertices: verts
                    .iter()
                    .map(point_from_json)
                    .collect::<Result<Vec<_>, _>>()?,
            })
        })
        .collect::<Result<Vec<_>, SurfaceError>>()?;
    let gluings = doc
        .gluings
        .iter()
        .map(|(a, b)| {
            (
                EdgeRef {
                    poly: a.poly,
                    edge: a.edge,
                },
                EdgeRef {
                    poly: b.poly,
                    edge: b.edge,
                },
            )
        })
        .collect();
    let marked = doc
        .marked_points
        .iter()
        .map(|m| {
            let label = match m.label.as_str() {
                "w1" => PrymLabel::W1,
                "w2" => PrymLabel::W2,
                "w3" => PrymLabel::W3,
                other => return Err(SurfaceError::Io(format!("unknown label {other}"))),
            };
            Ok((
                label,
                PointOnSurface {
                    poly: m.poly,
                    pos: point_from_json(&m.pos)?,
                },
            ))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let centers = doc
        .involution_centers
        .iter()
        .map(point_from_json)
        .collect::<Result<Vec<_>, _>>()?;
    TranslationSurface::new(doc.d_param, polygons, gluings, marked, centers)
}
