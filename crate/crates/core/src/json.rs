//! JSON formats for scalars, matrices, tori, polarizations and graphs.
//!
//! A scalar is a bare integer, a rational string `"p/q"`, or an object
//! `{"rat": "p/q", "irr": "r/s"}` meaning `rat + irr * sqrt(D)`. A matrix is
//! `{"D": D, "entries": [[scalar, ...], ...]}` with `D` defaulting to 0.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{format_rational, parse_rational, FieldScalar};
use crate::field_matrix::FieldMatrix;
use crate::graph::{BalancedMap, Edge, EdgeMap, MetricGraph};
use crate::matrix::IntMatrix;
use crate::tori::{Polarization, TropicalTorus};

/// Writes a `BigInt` as a JSON number when it fits in `i64`, else as a string.
pub fn ser_bigint<S: Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    match n.to_i64() {
        Some(k) => s.serialize_i64(k),
        None => s.serialize_str(&n.to_string()),
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
enum RawRational {
    Int(i64),
    Str(String),
}

impl RawRational {
    fn value(&self) -> Result<BigRational> {
        match self {
            RawRational::Int(k) => Ok(BigRational::from_integer((*k).into())),
            RawRational::Str(s) => parse_rational(s),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum RawScalar {
    Plain(RawRational),
    Pair { rat: RawRational, irr: RawRational },
}

impl RawScalar {
    fn value(&self, d: u64) -> Result<FieldScalar> {
        match self {
            RawScalar::Plain(q) => Ok(FieldScalar::rational_in(q.value()?, d)),
            RawScalar::Pair { rat, irr } => FieldScalar::new(rat.value()?, irr.value()?, d),
        }
    }
}

impl Serialize for FieldScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Pair {
            rat: String,
            irr: String,
        }
        if self.is_rational() {
            s.serialize_str(&format_rational(self.rat()))
        } else {
            Pair {
                rat: format_rational(self.rat()),
                irr: format_rational(self.irr()),
            }
            .serialize(s)
        }
    }
}

#[derive(Deserialize)]
struct RawMatrix {
    #[serde(rename = "D", default)]
    d: u64,
    entries: Vec<Vec<RawScalar>>,
}

fn build_matrix(d: u64, rows: &[Vec<RawScalar>]) -> Result<FieldMatrix> {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|x| x.value(d)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    FieldMatrix::from_rows(d, rows)
}

impl Serialize for FieldMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            #[serde(rename = "D")]
            d: u64,
            entries: Vec<Vec<FieldScalar>>,
        }
        Out {
            d: self.discriminant(),
            entries: self.to_rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldMatrix {
    fn deserialize<De: Deserializer<'de>>(de: De) -> std::result::Result<Self, De::Error> {
        let raw = RawMatrix::deserialize(de)?;
        build_matrix(raw.d, &raw.entries).map_err(De::Error::custom)
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_field_matrix(text: &str) -> Result<FieldMatrix> {
    parse(text)
}

#[derive(Deserialize)]
struct RawTorus {
    g: usize,
    #[serde(rename = "D", default)]
    d: u64,
    #[serde(rename = "J")]
    j: Vec<Vec<RawScalar>>,
}

/// `{"g": 2, "D": 2, "J": [[...], [...]]}`.
pub fn parse_torus(text: &str) -> Result<TropicalTorus> {
    let raw: RawTorus = parse(text)?;
    let j = build_matrix(raw.d, &raw.j)?;
    if j.rows() != raw.g {
        return Err(Error::DimensionMismatch(format!(
            "g = {} but J has {} rows",
            raw.g,
            j.rows()
        )));
    }
    TropicalTorus::new(j)
}

pub fn torus_to_json(t: &TropicalTorus) -> serde_json::Value {
    let m = t.embedding();
    serde_json::json!({ "g": t.rank(), "D": m.discriminant(), "J": m.to_rows() })
}

#[derive(Deserialize)]
struct RawPolarization {
    #[serde(rename = "C")]
    c: IntMatrix,
}

/// `{"C": [[1, 0], [0, 2]]}`.
pub fn parse_polarization(text: &str) -> Result<Polarization> {
    let raw: RawPolarization = parse(text)?;
    Polarization::new(raw.c)
}

pub fn polarization_to_json(p: &Polarization) -> serde_json::Value {
    serde_json::json!({ "C": p.matrix() })
}

#[derive(Deserialize)]
struct RawEdge {
    u: usize,
    v: usize,
    len: RawScalar,
    #[serde(default)]
    w: Option<u64>,
    #[serde(default)]
    slope: Option<Vec<i64>>,
}

#[derive(Deserialize)]
struct RawGraph {
    vertices: usize,
    #[serde(rename = "D", default)]
    d: u64,
    edges: Vec<RawEdge>,
}

fn graph_from_raw(raw: &RawGraph) -> Result<MetricGraph> {
    let edges = raw
        .edges
        .iter()
        .map(|e| {
            Ok(Edge {
                u: e.u,
                v: e.v,
                len: e.len.value(raw.d)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    MetricGraph::new(raw.vertices, edges)
}

/// `{"vertices": 2, "D": 0, "edges": [{"u": 0, "v": 1, "len": "1/2"}, ...]}`.
pub fn parse_graph(text: &str) -> Result<MetricGraph> {
    graph_from_raw(&parse(text)?)
}

/// A graph whose edges also carry `"w"` and `"slope"`.
pub fn parse_balanced_map(text: &str) -> Result<BalancedMap> {
    let raw: RawGraph = parse(text)?;
    let graph = graph_from_raw(&raw)?;
    let edges = raw
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| match (e.w, &e.slope) {
            (Some(weight), Some(slope)) => Ok(EdgeMap {
                weight,
                slope: slope.clone(),
            }),
            _ => Err(Error::Parse(format!("edge {i} needs \"w\" and \"slope\""))),
        })
        .collect::<Result<Vec<_>>>()?;
    let rank = edges.first().map_or(0, |e| e.slope.len());
    Ok(BalancedMap { graph, rank, edges })
}

pub fn graph_to_json(g: &MetricGraph) -> serde_json::Value {
    serde_json::json!({
        "vertices": g.vertex_count(),
        "D": g.discriminant(),
        "edges": g.edges(),
    })
}
