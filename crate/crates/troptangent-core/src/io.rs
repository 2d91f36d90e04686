//! Problem files (JSON), stage pipelines and SVG figure emission.
//!
//! A problem file describes `n−1` hypersurfaces cutting out a space
//! curve in projective `n`-space by their monomial supports and exact
//! rational coefficient valuations:
//!
//! ```json
//! {"n": 3,
//!  "hypersurfaces": [
//!    {"monomials": [[0,0,0,4],[2,0,1,1],[1,0,3,0]],
//!     "valuations": ["0","0","0"]}, …]}
//! ```
//!
//! Monomials are either projective exponent vectors of equal total
//! degree (converted to Laurent form by dividing out the
//! lexicographically smallest monomial) or degree-zero Laurent
//! exponent vectors used verbatim. All rationals travel as strings so
//! that no floating point is ever involved.

use std::str::FromStr;

use num_traits::{Signed, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::cell::normalize_cell;
use crate::complexes::{
    dual_complex, gauss_complex, graph_complex, tangential_complex, OneComplex, WComplex,
};
use crate::curve::{check_assumptions, intersect_curve, CellRef, TropicalCurve};
use crate::error::Error;
use crate::hypersurface::ValuedSupport;
use crate::lattice::ExpVec;
use crate::newton::{lattice_points, newton_polytope};
use crate::rat::{format_q, parse_q, qi, Aff, Q, Val, Z};
use crate::tangent::{edge_tangents, vertex_tangents, PiecewiseAff};

// ---------------------------------------------------------------------------
// Problem specifications
// ---------------------------------------------------------------------------

/// A parsed and validated problem: the ambient projective dimension
/// and the `n−1` valued supports in degree-zero Laurent form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemSpec {
    /// Ambient projective dimension `n`.
    pub n: usize,
    /// The `n−1` hypersurfaces.
    pub supports: Vec<ValuedSupport>,
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Parse a problem from JSON text.
pub fn parse_problem_str(text: &str) -> Result<ProblemSpec, Error> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| parse_err(format!("malformed JSON: {e}")))?;
    let obj = root
        .as_object()
        .ok_or_else(|| parse_err("top level must be a JSON object"))?;
    let n = obj
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| parse_err("missing or non-integer field \"n\""))? as usize;
    if n < 2 {
        return Err(parse_err("\"n\" must be at least 2"));
    }
    let hyps = obj
        .get("hypersurfaces")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err("missing array field \"hypersurfaces\""))?;
    if hyps.is_empty() {
        return Err(parse_err("the hypersurface list is empty"));
    }
    if hyps.len() != n - 1 {
        return Err(parse_err(format!(
            "expected n−1 = {} hypersurfaces, found {}",
            n - 1,
            hyps.len()
        )));
    }
    let mut supports = Vec::with_capacity(hyps.len());
    for (hi, h) in hyps.iter().enumerate() {
        supports.push(parse_support(n, hi, h)?);
    }
    Ok(ProblemSpec { n, supports })
}

fn parse_support(n: usize, hi: usize, h: &Value) -> Result<ValuedSupport, Error> {
    let obj = h
        .as_object()
        .ok_or_else(|| parse_err(format!("hypersurface {hi} is not an object")))?;
    let monomials = obj
        .get("monomials")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err(format!("hypersurface {hi}: missing \"monomials\" array")))?;
    let valuations = obj
        .get("valuations")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err(format!("hypersurface {hi}: missing \"valuations\" array")))?;
    if monomials.len() != valuations.len() {
        return Err(parse_err(format!(
            "hypersurface {hi}: {} monomials but {} valuations",
            monomials.len(),
            valuations.len()
        )));
    }
    let mut exps: Vec<Vec<i64>> = Vec::with_capacity(monomials.len());
    for (mi, m) in monomials.iter().enumerate() {
        let row = m
            .as_array()
            .ok_or_else(|| parse_err(format!("hypersurface {hi}: monomial {mi} is not a list")))?;
        if row.len() != n + 1 {
            return Err(parse_err(format!(
                "hypersurface {hi}: monomial {mi} has {} exponents, expected n+1 = {}",
                row.len(),
                n + 1
            )));
        }
        let exps_row: Option<Vec<i64>> = row.iter().map(Value::as_i64).collect();
        exps.push(exps_row.ok_or_else(|| {
            parse_err(format!("hypersurface {hi}: monomial {mi} has a non-integer exponent"))
        })?);
    }
    let mut vals: Vec<Q> = Vec::with_capacity(valuations.len());
    for (vi, v) in valuations.iter().enumerate() {
        let s = v.as_str().ok_or_else(|| {
            parse_err(format!(
                "hypersurface {hi}: valuation {vi} must be a rational string"
            ))
        })?;
        vals.push(parse_q(s).map_err(|e| parse_err(format!("hypersurface {hi}: {e}")))?);
    }
    // Projective supports of equal total degree are divided by the
    // lexicographically smallest monomial; degree-zero Laurent
    // supports pass through unchanged.
    let degrees: Vec<i64> = exps.iter().map(|e| e.iter().sum()).collect();
    if degrees.iter().any(|&d| d != 0) {
        if degrees.windows(2).any(|w| w[0] != w[1]) {
            return Err(parse_err(format!(
                "hypersurface {hi}: monomials have mixed total degrees {degrees:?}"
            )));
        }
        let lex_min = exps.iter().min().cloned().unwrap();
        for e in &mut exps {
            for (c, m) in e.iter_mut().zip(&lex_min) {
                *c -= m;
            }
        }
    }
    let terms: Result<Vec<(ExpVec, Q)>, Error> = exps
        .into_iter()
        .zip(vals)
        .map(|(e, v)| Ok((ExpVec::new(e)?, v)))
        .collect();
    ValuedSupport::new(terms?).map_err(|e| parse_err(format!("hypersurface {hi}: {e}")))
}

/// Read and parse a problem file.
pub fn parse_problem(path: &std::path::Path) -> Result<ProblemSpec, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| parse_err(format!("cannot read {}: {e}", path.display())))?;
    parse_problem_str(&text)
}

/// Serialize a problem back to JSON text (degree-zero Laurent form).
/// `parse_problem_str ∘ serialize_problem` is the identity.
pub fn serialize_problem(spec: &ProblemSpec) -> String {
    let hyps: Vec<Value> = spec
        .supports
        .iter()
        .map(|s| {
            json!({
                "monomials": s.terms().iter().map(|(w, _)| w.0.clone()).collect::<Vec<_>>(),
                "valuations": s.terms().iter().map(|(_, v)| format_q(v)).collect::<Vec<_>>(),
            })
        })
        .collect();
    let doc = json!({ "n": spec.n, "hypersurfaces": hyps });
    serde_json::to_string_pretty(&doc).expect("serialization cannot fail")
}

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

/// The pipeline stages exposed by the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    /// The tropical curve.
    Curve,
    /// Tangent-line families at every cell.
    Tangents,
    /// The tropicalized Gauss image.
    Gauss,
    /// The tropical dual variety with multiplicities.
    Dual,
    /// The tropical tangential variety with multiplicities.
    Tau,
    /// Newton polytope and degree of the dual hypersurface.
    Newton,
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "curve" => Ok(Stage::Curve),
            "tangents" => Ok(Stage::Tangents),
            "gauss" => Ok(Stage::Gauss),
            "dual" => Ok(Stage::Dual),
            "tau" => Ok(Stage::Tau),
            "newton" => Ok(Stage::Newton),
            other => Err(Error::InvalidInput(format!(
                "unknown stage {other:?}; expected curve|tangents|gauss|dual|tau|newton"
            ))),
        }
    }
}

fn qs(q: &Q) -> Value {
    Value::String(format_q(q))
}

fn qvs(v: &[Q]) -> Value {
    Value::Array(v.iter().map(qs).collect())
}

fn zs(z: &Z) -> Value {
    Value::String(z.to_string())
}

fn val_json(v: &Val) -> Value {
    match v.finite() {
        Some(q) => qs(q),
        None => Value::Null,
    }
}

fn aff_json(a: &Aff) -> Value {
    json!({ "constant": format_q(&a.a), "slope": format_q(&a.b) })
}

fn piecewise_json(p: &PiecewiseAff) -> Value {
    Value::Array(
        p.pieces
            .iter()
            .map(|(from, to, aff)| {
                json!({ "from": format_q(from), "to": val_json(to), "value": aff_json(aff) })
            })
            .collect(),
    )
}

fn cellref_json(c: &CellRef) -> Value {
    Value::String(match c {
        CellRef::Vertex(i) => format!("V{i}"),
        CellRef::Edge(i) => format!("E{i}"),
    })
}

fn pairs_json(pairs: &[(usize, usize)]) -> Value {
    Value::Array(pairs.iter().map(|&(i, j)| json!([i, j])).collect())
}

fn curve_json(curve: &TropicalCurve, spec: &ProblemSpec) -> Value {
    let report = check_assumptions(&spec.supports);
    json!({
        "stage": "curve",
        "n": curve.n,
        "vertices": curve.vertices.iter().map(|v| qvs(&v.0)).collect::<Vec<_>>(),
        "edges": curve.edges.iter().map(|e| json!({
            "base": qvs(&e.base),
            "dir": e.dir,
            "length": val_json(&e.length),
            "mult": zs(&e.mult),
        })).collect::<Vec<_>>(),
        "assumptions": {
            "complete_intersection": report.complete_intersection,
            "three_term": report.three_term,
            "trivalent": report.trivalent,
            "non_colliding": report.non_colliding,
            "very_general_effective": report.very_general_effective,
            "all_passed": report.all_passed(),
            "notes": report.notes,
        },
    })
}

fn tangents_json(curve: &TropicalCurve, spec: &ProblemSpec) -> Result<Value, Error> {
    let mut cells = Vec::new();
    for vi in 0..curve.vertices.len() {
        let ctx = normalize_cell(curve, CellRef::Vertex(vi), &spec.supports)?;
        let fam = vertex_tangents(&ctx)?;
        cells.push(json!({
            "cell": cellref_json(&fam.cell),
            "pairs": pairs_json(&fam.pairs),
            "base": fam.base.iter().map(val_json).collect::<Vec<_>>(),
            "status": fam.status.iter().map(|s| format!("{s:?}")).collect::<Vec<_>>(),
            "classes": fam.classes,
            "thresholds": fam.thresholds.iter().map(val_json).collect::<Vec<_>>(),
            "branches": fam.branches.iter().map(|b| json!({
                "smax": val_json(&b.smax),
                "slacks": b.slacks.iter().map(aff_json).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        }));
    }
    for ei in 0..curve.edges.len() {
        let ctx = normalize_cell(curve, CellRef::Edge(ei), &spec.supports)?;
        let fam = edge_tangents(&ctx)?;
        cells.push(json!({
            "cell": cellref_json(&fam.cell),
            "pairs": pairs_json(&fam.pairs),
            "q": fam.q.iter().map(|q| match q {
                Some(p) => piecewise_json(p),
                None => Value::Null,
            }).collect::<Vec<_>>(),
        }));
    }
    Ok(json!({ "stage": "tangents", "n": curve.n, "cells": cells }))
}

fn one_complex_json(stage: &str, c: &OneComplex) -> Value {
    let (v, b, u) = c.f_vector();
    json!({
        "stage": stage,
        "ambient": c.ambient,
        "f_vector": [v, b, u],
        "cells": c.cells.iter().map(|cell| json!({
            "base": qvs(&cell.base),
            "dir": cell.dir,
            "length": val_json(&cell.length),
            "mult": zs(&cell.mult),
            "sources": cell.sources.iter().map(cellref_json).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "balanced": c.is_balanced(),
    })
}

fn w_complex_json(stage: &str, c: &WComplex) -> Value {
    json!({
        "stage": stage,
        "ambient": c.ambient,
        "dim": c.dim,
        "cells": c.cells.iter().map(|cell| json!({
            "vertices": cell.poly.verts.iter().map(|v| qvs(v)).collect::<Vec<_>>(),
            "rays": cell.poly.rays.clone(),
            "mult": zs(&cell.mult),
            "sources": cell.sources.iter().map(cellref_json).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

fn newton_json(dual: &WComplex) -> Result<Value, Error> {
    let p = newton_polytope(dual)?;
    let points = lattice_points(&p);
    Ok(json!({
        "stage": "newton",
        "degree": zs(&p.degree),
        "f_vector": p.f_vector(),
        "lattice_points": points.len(),
        "vertices": p.vertices.iter()
            .map(|v| v.iter().map(|c| c.to_string()).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "chart_vertices": p.chart_vertices.iter()
            .map(|v| v.iter().map(|c| c.to_string()).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "edges": p.edges.iter().map(|&(i, j)| json!([i, j])).collect::<Vec<_>>(),
        "facets": p.facets.iter().map(|(a, b)| json!({
            "normal": a.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "rhs": b.to_string(),
        })).collect::<Vec<_>>(),
    }))
}

/// Run one pipeline stage on a parsed problem and return the JSON
/// document describing the result. Ordering is fully deterministic.
pub fn run_pipeline(spec: &ProblemSpec, stage: Stage) -> Result<Value, Error> {
    let curve = intersect_curve(&spec.supports)?;
    match stage {
        Stage::Curve => Ok(curve_json(&curve, spec)),
        Stage::Tangents => tangents_json(&curve, spec),
        Stage::Gauss => {
            let graph = graph_complex(&curve, &spec.supports)?;
            Ok(one_complex_json("gauss", &gauss_complex(&graph)?))
        }
        Stage::Dual => {
            let graph = graph_complex(&curve, &spec.supports)?;
            Ok(w_complex_json("dual", &dual_complex(&graph)?))
        }
        Stage::Tau => {
            let graph = graph_complex(&curve, &spec.supports)?;
            Ok(w_complex_json("tau", &tangential_complex(&graph)?))
        }
        Stage::Newton => {
            let graph = graph_complex(&curve, &spec.supports)?;
            newton_json(&dual_complex(&graph)?)
        }
    }
}

/// The error document serialized on failure:
/// `{"error": {"code": …, "message": …, "cell"?: …}}`.
pub fn error_document(err: &Error) -> Value {
    let mut inner = serde_json::Map::new();
    inner.insert("code".into(), Value::String(err.code().into()));
    inner.insert("message".into(), Value::String(err.to_string()));
    if let Some(cell) = err.cell() {
        inner.insert("cell".into(), Value::String(cell.into()));
    }
    json!({ "error": inner })
}

// ---------------------------------------------------------------------------
// SVG figures
// ---------------------------------------------------------------------------

/// How to project a complex to the plane for rendering.
#[derive(Clone, Debug)]
pub enum Projection {
    /// An explicit 2×ambient rational matrix.
    Matrix(Vec<Vec<Q>>),
    /// A deterministic pseudo-random matrix derived from a seed,
    /// re-drawn until nondegenerate on the figure.
    Seeded(u64),
}

/// Parse a `"a,b,c;d,e,f"` projection matrix (two rows of rationals).
pub fn parse_projection(s: &str) -> Result<Vec<Vec<Q>>, Error> {
    let rows: Vec<&str> = s.split(';').collect();
    if rows.len() != 2 {
        return Err(Error::InvalidInput(format!(
            "projection must have exactly two rows separated by ';', found {}",
            rows.len()
        )));
    }
    let mut out = Vec::with_capacity(2);
    for row in rows {
        let entries: Result<Vec<Q>, String> = row.split(',').map(parse_q).collect();
        out.push(entries.map_err(Error::InvalidInput)?);
    }
    if out[0].len() != out[1].len() {
        return Err(Error::InvalidInput(
            "projection rows have different lengths".into(),
        ));
    }
    Ok(out)
}

/// The unbounded end of a drawable segment.
enum SegEnd {
    /// Bounded: the second endpoint.
    Point(Vec<Q>),
    /// Unbounded: a direction to extend towards.
    Ray(Vec<Q>),
}

/// A stage result reduced to drawable primitives in its exact ambient
/// coordinates.
pub struct Shape {
    ambient: usize,
    dots: Vec<Vec<Q>>,
    segs: Vec<(Vec<Q>, SegEnd)>,
    labels: Vec<(Vec<Q>, String)>,
}

fn push_dot(dots: &mut Vec<Vec<Q>>, p: Vec<Q>) {
    if !dots.contains(&p) {
        dots.push(p);
    }
}

fn shape_from_curve(curve: &TropicalCurve) -> Shape {
    let mut shape = Shape {
        ambient: curve.n,
        dots: Vec::new(),
        segs: Vec::new(),
        labels: Vec::new(),
    };
    for v in &curve.vertices {
        push_dot(&mut shape.dots, v.0.clone());
    }
    for e in &curve.edges {
        let dir: Vec<Q> = e.dir.iter().map(|&c| qi(c)).collect();
        let (end, mid) = match e.length.finite() {
            Some(len) => {
                let far = e.point_at(len).0;
                let mid: Vec<Q> = e
                    .base
                    .iter()
                    .zip(&far)
                    .map(|(a, b)| (a + b) / qi(2))
                    .collect();
                (SegEnd::Point(far), mid)
            }
            None => {
                let mid: Vec<Q> = e.base.iter().zip(&dir).map(|(a, d)| a + d).collect();
                (SegEnd::Ray(dir), mid)
            }
        };
        if e.mult > Z::from(1) {
            shape.labels.push((mid, e.mult.to_string()));
        }
        shape.segs.push((e.base.clone(), end));
    }
    shape
}

fn shape_from_one(c: &OneComplex) -> Shape {
    let mut shape = Shape {
        ambient: c.ambient,
        dots: Vec::new(),
        segs: Vec::new(),
        labels: Vec::new(),
    };
    for cell in &c.cells {
        push_dot(&mut shape.dots, cell.base.clone());
        let dir: Vec<Q> = cell.dir.iter().map(|&c| qi(c)).collect();
        let (end, mid) = match cell.far_end() {
            Some(far) => {
                push_dot(&mut shape.dots, far.clone());
                let mid: Vec<Q> = cell
                    .base
                    .iter()
                    .zip(&far)
                    .map(|(a, b)| (a + b) / qi(2))
                    .collect();
                (SegEnd::Point(far), mid)
            }
            None => {
                let mid: Vec<Q> = cell.base.iter().zip(&dir).map(|(a, d)| a + d).collect();
                (SegEnd::Ray(dir), mid)
            }
        };
        if cell.mult > Z::from(1) {
            shape.labels.push((mid, cell.mult.to_string()));
        }
        shape.segs.push((cell.base.clone(), end));
    }
    shape
}

fn shape_from_w(c: &WComplex) -> Result<Shape, Error> {
    let mut shape = Shape {
        ambient: c.ambient,
        dots: Vec::new(),
        segs: Vec::new(),
        labels: Vec::new(),
    };
    for cell in &c.cells {
        for v in &cell.poly.verts {
            push_dot(&mut shape.dots, v.clone());
        }
        let edges = if cell.poly.dim() <= 1 {
            vec![cell.poly.clone()]
        } else {
            crate::poly::edges_of(&cell.poly)?
        };
        for e in edges {
            match (e.verts.len(), e.rays.len()) {
                (2, 0) => shape
                    .segs
                    .push((e.verts[0].clone(), SegEnd::Point(e.verts[1].clone()))),
                (1, 1) => {
                    let dir: Vec<Q> = e.rays[0].iter().map(|&c| qi(c)).collect();
                    shape.segs.push((e.verts[0].clone(), SegEnd::Ray(dir)));
                }
                _ => {}
            }
        }
        if cell.mult > Z::from(1) {
            // Label at a deterministic interior point of the cell.
            let mut centroid = vec![Q::zero(); c.ambient];
            let k = qi(cell.poly.verts.len() as i64);
            for v in &cell.poly.verts {
                for (acc, x) in centroid.iter_mut().zip(v) {
                    *acc += x / &k;
                }
            }
            for r in &cell.poly.rays {
                for (acc, &x) in centroid.iter_mut().zip(r) {
                    *acc += qi(x) / qi(2);
                }
            }
            shape.labels.push((centroid, cell.mult.to_string()));
        }
    }
    Ok(shape)
}

/// Reduce a stage result to drawable primitives.
pub fn shape_for_stage(spec: &ProblemSpec, stage: Stage) -> Result<Shape, Error> {
    let curve = intersect_curve(&spec.supports)?;
    match stage {
        Stage::Curve => Ok(shape_from_curve(&curve)),
        Stage::Gauss => {
            let graph = graph_complex(&curve, &spec.supports)?;
            Ok(shape_from_one(&gauss_complex(&graph)?))
        }
        Stage::Dual => {
            let graph = graph_complex(&curve, &spec.supports)?;
            shape_from_w(&dual_complex(&graph)?)
        }
        Stage::Tau => {
            let graph = graph_complex(&curve, &spec.supports)?;
            shape_from_w(&tangential_complex(&graph)?)
        }
        Stage::Tangents | Stage::Newton => Err(Error::InvalidInput(
            "this stage has no figure; use curve, gauss, dual or tau".into(),
        )),
    }
}

fn project(m: &[Vec<Q>], x: &[Q]) -> (Q, Q) {
    let row = |r: &[Q]| r.iter().zip(x).map(|(a, b)| a * b).sum::<Q>();
    (row(&m[0]), row(&m[1]))
}

/// Whether a projection matrix draws the shape faithfully: distinct
/// dots stay distinct and no segment collapses to a point.
fn projection_ok(shape: &Shape, m: &[Vec<Q>]) -> bool {
    let pts: Vec<(Q, Q)> = shape.dots.iter().map(|p| project(m, p)).collect();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if pts[i] == pts[j] {
                return false;
            }
        }
    }
    for (base, end) in &shape.segs {
        let b = project(m, base);
        let degenerate = match end {
            SegEnd::Point(p) => project(m, p) == b,
            SegEnd::Ray(d) => {
                let (dx, dy) = project(m, d);
                dx.is_zero() && dy.is_zero()
            }
        };
        if degenerate {
            return false;
        }
    }
    true
}

fn seeded_matrix(rng: &mut ChaCha8Rng, ambient: usize) -> Vec<Vec<Q>> {
    (0..2)
        .map(|_| {
            (0..ambient)
                .map(|_| qi((rng.next_u32() % 19) as i64 - 9))
                .collect()
        })
        .collect()
}

/// Fixed-point decimal formatting of an exact rational (two places),
/// avoiding any floating-point arithmetic.
fn dec(q: &Q) -> String {
    let scaled = (q * qi(100)).round().to_integer();
    let neg = scaled.is_negative();
    let abs = scaled.abs();
    let hundred = Z::from(100);
    let int = &abs / &hundred;
    let frac = &abs % &hundred;
    format!("{}{}.{:02}", if neg { "-" } else { "" }, int, frac)
}

/// Render a shape as an SVG 1.1 document. Deterministic given the same
/// shape and projection.
pub fn render_svg(shape: &Shape, proj: &Projection) -> Result<String, Error> {
    let matrix: Vec<Vec<Q>> = match proj {
        Projection::Matrix(m) => {
            if m[0].len() != shape.ambient {
                return Err(Error::InvalidInput(format!(
                    "projection has {} columns but the complex lives in dimension {}",
                    m[0].len(),
                    shape.ambient
                )));
            }
            if !projection_ok(shape, m) {
                return Err(Error::Degenerate(
                    "degenerate projection: the figure collapses under this matrix".into(),
                ));
            }
            m.clone()
        }
        Projection::Seeded(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut found = None;
            for _ in 0..64 {
                let m = seeded_matrix(&mut rng, shape.ambient);
                if projection_ok(shape, &m) {
                    found = Some(m);
                    break;
                }
            }
            found.ok_or_else(|| {
                Error::Degenerate("no nondegenerate seeded projection found".into())
            })?
        }
    };

    // Project everything, resolving rays to finite endpoints relative
    // to the bounded extent of the figure.
    let dots: Vec<(Q, Q)> = shape.dots.iter().map(|p| project(&matrix, p)).collect();
    let mut finite: Vec<(Q, Q)> = dots.clone();
    for (base, end) in &shape.segs {
        finite.push(project(&matrix, base));
        if let SegEnd::Point(p) = end {
            finite.push(project(&matrix, p));
        }
    }
    let span = |vals: Vec<&Q>| -> Q {
        match (vals.iter().min(), vals.iter().max()) {
            (Some(lo), Some(hi)) => (*hi).clone() - (*lo).clone(),
            _ => Q::zero(),
        }
    };
    let extent = {
        let sx = span(finite.iter().map(|(x, _)| x).collect());
        let sy = span(finite.iter().map(|(_, y)| y).collect());
        let m = if sx > sy { sx } else { sy };
        if m.is_zero() {
            qi(1)
        } else {
            m
        }
    };
    let segs: Vec<((Q, Q), (Q, Q))> = shape
        .segs
        .iter()
        .map(|(base, end)| {
            let b = project(&matrix, base);
            let e = match end {
                SegEnd::Point(p) => project(&matrix, p),
                SegEnd::Ray(d) => {
                    let (dx, dy) = project(&matrix, d);
                    let norm = {
                        let (ax, ay) = (dx.abs(), dy.abs());
                        if ax > ay {
                            ax
                        } else {
                            ay
                        }
                    };
                    let scale = &extent / (qi(2) * norm);
                    (&b.0 + dx * &scale, &b.1 + dy * &scale)
                }
            };
            (b, e)
        })
        .collect();
    let labels: Vec<((Q, Q), &str)> = shape
        .labels
        .iter()
        .map(|(p, s)| (project(&matrix, p), s.as_str()))
        .collect();

    // Layout: fit the bounding box of everything into a padded canvas.
    let mut all: Vec<(Q, Q)> = Vec::new();
    all.extend(dots.iter().cloned());
    for (b, e) in &segs {
        all.push(b.clone());
        all.push(e.clone());
    }
    for (p, _) in &labels {
        all.push(p.clone());
    }
    let (width, height, map) = if all.is_empty() {
        (qi(200), qi(200), None)
    } else {
        let minx = all.iter().map(|(x, _)| x).min().unwrap().clone();
        let maxx = all.iter().map(|(x, _)| x).max().unwrap().clone();
        let miny = all.iter().map(|(_, y)| y).min().unwrap().clone();
        let maxy = all.iter().map(|(_, y)| y).max().unwrap().clone();
        let spanx = &maxx - &minx;
        let spany = &maxy - &miny;
        let big = if spanx > spany { &spanx } else { &spany };
        let scale = if big.is_zero() {
            qi(1)
        } else {
            qi(360) / big.clone()
        };
        let width = &spanx * &scale + qi(40);
        let height = &spany * &scale + qi(40);
        (width, height.clone(), Some((minx, maxy, scale, height)))
    };

    let to_canvas = |p: &(Q, Q)| -> (Q, Q) {
        match &map {
            Some((minx, maxy, scale, _)) => (
                (&p.0 - minx) * scale + qi(20),
                (maxy - &p.1) * scale + qi(20),
            ),
            None => p.clone(),
        }
    };

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
        w = dec(&width),
        h = dec(&height),
    ));
    for (b, e) in &segs {
        let (x1, y1) = to_canvas(b);
        let (x2, y2) = to_canvas(e);
        out.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" \
             stroke=\"black\" stroke-width=\"1.5\"/>\n",
            dec(&x1),
            dec(&y1),
            dec(&x2),
            dec(&y2),
        ));
    }
    for d in &dots {
        let (x, y) = to_canvas(d);
        out.push_str(&format!(
            "  <circle cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"black\"/>\n",
            dec(&x),
            dec(&y),
        ));
    }
    for (p, text) in &labels {
        let (x, y) = to_canvas(p);
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"crimson\">{}</text>\n",
            dec(&(x + qi(4))),
            dec(&(y - qi(4))),
            text,
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}
