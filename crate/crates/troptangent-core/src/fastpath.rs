//! Closed-form shortcuts for especially simple cells of the curve.
//!
//! Two situations admit contributions to the dual and tangential
//! complexes that can be written down directly, without running the
//! stable-intersection pipeline:
//!
//! * a *tame* vertex, where the tangent span avoids every coordinate
//!   subspace of codimension two: its dual contribution is a union of
//!   translated coordinate quadrants sharing one multiplicity;
//! * an edge whose direction avoids the same coordinate subspaces
//!   (or whose failures are global to the curve): its dual and
//!   tangential contributions are the edge plus a translated fiber line.
//!
//! Both are cross-checked against the general pipeline in the tests.

use num_traits::{Signed, Zero};

use crate::cell::CellContext;
use crate::curve::{CellRef, TropicalCurve};
use crate::error::Error;
use crate::lattice::{chart_dir_in_coord_span, det, minor_delta, subsets, IntMatrix};
use crate::poly::{from_gens, Polyhedron};
use crate::rat::{qi, Q, Z};
use crate::tangent::{plucker_to_line, TropLine};

/// The chart image in `R^n` of the coordinate direction `e_k` of
/// `R^{n+1}` (so `e_0 ↦ (−1, …, −1)`).
fn chart_unit(n: usize, k: usize) -> Vec<Q> {
    if k == 0 {
        vec![qi(-1); n]
    } else {
        let mut v = vec![qi(0); n];
        v[k - 1] = qi(1);
        v
    }
}

/// Absolute value of the maximal minors of an `n × (n+1)` integer
/// matrix, which must all agree (asserted) and be nonzero.
fn equal_abs_minors(rows: &[Vec<i64>]) -> Result<Z, Error> {
    let n = rows.len();
    let m = IntMatrix::from_i64(rows)?;
    let mut minors: Vec<Z> = Vec::with_capacity(n + 1);
    for drop in 0..=n {
        let sub: Vec<Vec<Z>> = (0..n)
            .map(|r| {
                (0..=n)
                    .filter(|&c| c != drop)
                    .map(|c| m.rows[r][c].clone())
                    .collect()
            })
            .collect();
        minors.push(det(&sub));
    }
    let first = minors[0].abs();
    if minors.iter().any(|x| x.abs() != first) {
        return Err(Error::inconsistency(
            "maximal minors of the vertex matrix disagree in absolute value",
        ));
    }
    if first.is_zero() {
        return Err(Error::degenerate("vertex matrix is singular"));
    }
    Ok(first)
}

/// Whether the vertex is tame: no coordinate pair `J` has both minors
/// `Δ_J(v)` and `Δ_J(v′)` vanish (equivalently, the tangent span at the
/// vertex lies in no coordinate subspace of codimension two).
pub fn is_tame_vertex(ctx: &CellContext) -> Result<bool, Error> {
    let vp = ctx
        .v_prime
        .as_ref()
        .ok_or_else(|| Error::invalid_input("is_tame_vertex needs a vertex cell"))?;
    let mv = IntMatrix::from_expvecs(&ctx.v);
    let mvp = IntMatrix::from_expvecs(vp);
    for j in subsets(ctx.n + 1, 2) {
        let pair = (j[0], j[1]);
        if minor_delta(&mv, pair)?.is_zero() && minor_delta(&mvp, pair)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Multiplicity shared by all dual contributions of a tame vertex: the
/// absolute value of any maximal minor of the matrix with rows
/// `v′_{i0}, v_1, …, v_{n−1}` (all agree up to sign — asserted).
pub fn tame_vertex_mult(ctx: &CellContext) -> Result<Z, Error> {
    let (i0, vp) = match (ctx.i0, ctx.v_prime.as_ref()) {
        (Some(i0), Some(vp)) => (i0, vp),
        _ => return Err(Error::invalid_input("tame_vertex_mult needs a vertex cell")),
    };
    if !is_tame_vertex(ctx)? {
        return Err(Error::not_applicable(
            "the vertex is not tame: its tangent span lies in a coordinate \
             subspace of codimension two",
        ));
    }
    let mut rows: Vec<Vec<i64>> = vec![vp[i0].0.clone()];
    rows.extend(ctx.v.iter().map(|v| v.0.clone()));
    equal_abs_minors(&rows)
}

/// Dual contributions of a tame vertex `α`: one cell
/// `−α + Σ_{i∉J} R≥0·e_i` of multiplicity `tame_vertex_mult` for every
/// pair `J` such that no edge adjacent to `α` has its direction in the
/// span of `{e_k : k ∉ J}`.
pub fn tame_vertex_dual_cells(
    curve: &TropicalCurve,
    ctx: &CellContext,
    vi: usize,
) -> Result<Vec<(Polyhedron, Z)>, Error> {
    let mult = tame_vertex_mult(ctx)?;
    let n = ctx.n;
    let alpha = &curve
        .vertices
        .get(vi)
        .ok_or_else(|| Error::invalid_input("vertex index out of range"))?
        .0;
    let neg_alpha: Vec<Q> = alpha.iter().map(|x| -x).collect();
    let mut out = Vec::new();
    for j in subsets(n + 1, 2) {
        let comp: Vec<usize> = (0..=n).filter(|k| !j.contains(k)).collect();
        let qualifies = curve.incident_edges(vi).iter().all(|&ei| {
            let d = curve.outgoing_dir(ei, vi);
            !chart_dir_in_coord_span(&d, &comp)
        });
        if !qualifies {
            continue;
        }
        let rays: Vec<Vec<Q>> = comp.iter().map(|&k| chart_unit(n, k)).collect();
        out.push((from_gens(&[neg_alpha.clone()], &rays)?, mult.clone()));
    }
    Ok(out)
}

/// Whether every direction of the curve lies in the chart span of
/// `{e_k : k ∈ js}`.
fn curve_span_in_coord_span(curve: &TropicalCurve, js: &[usize]) -> bool {
    curve
        .edge_directions()
        .iter()
        .all(|d| chart_dir_in_coord_span(d, js))
}

/// Whether the edge qualifies for the fiber-line shortcut: for every
/// pair `J`, either the edge direction avoids the span of
/// `{e_k : k ∉ J}`, or the whole curve lies in that span.
pub fn bergman_edge_qualifies(
    curve: &TropicalCurve,
    ctx: &CellContext,
) -> Result<bool, Error> {
    let (dir, _) = ctx
        .dir
        .as_ref()
        .ok_or_else(|| Error::invalid_input("bergman_edge_qualifies needs an edge cell"))?;
    for j in subsets(ctx.n + 1, 2) {
        let comp: Vec<usize> = (0..=ctx.n).filter(|k| !j.contains(k)).collect();
        if !chart_dir_in_coord_span(dir, &comp) {
            continue;
        }
        if curve_span_in_coord_span(curve, &comp) {
            continue;
        }
        return Ok(false);
    }
    Ok(true)
}

/// The tropical fiber line of an edge from the exponent matrix `v`
/// (2 × 4 at `n = 3`): Plücker valuations are 0 where the corresponding
/// minor of `v` is nonzero. `dual` selects the minors on the column
/// pair (the row-span line) instead of their complements (the kernel
/// line).
fn bergman_fiber_line(ctx: &CellContext, dual: bool) -> Result<TropLine, Error> {
    if ctx.n != 3 {
        return Err(Error::not_applicable(
            "the fiber of the shortcut is a line only for curves in 3-space",
        ));
    }
    let m = IntMatrix::from_expvecs(&ctx.v);
    let mut beta = Vec::new();
    for j in subsets(4, 2) {
        let pair = (j[0], j[1]);
        let comp: Vec<usize> = (0..4).filter(|k| *k != pair.0 && *k != pair.1).collect();
        let minor = if dual {
            // Minor on the columns of the pair = Δ of the complement.
            minor_delta(&m, (comp[0], comp[1]))?
        } else {
            minor_delta(&m, pair)?
        };
        if minor.is_zero() {
            return Err(Error::not_applicable(
                "a Plücker coordinate of the fiber line has infinite valuation",
            ));
        }
        beta.push(Q::zero());
    }
    Ok(plucker_to_line(3, &beta))
}

/// Minkowski sum of the (possibly negated) edge with the pieces of a
/// tropical line: one cell per coordinate ray, plus the bounded part of
/// the line when its two vertices differ.
fn edge_plus_line(
    curve: &TropicalCurve,
    ctx: &CellContext,
    line: &TropLine,
    negate: bool,
) -> Result<Vec<Polyhedron>, Error> {
    let n = ctx.n;
    let ei = match ctx.cell {
        CellRef::Edge(ei) => ei,
        CellRef::Vertex(_) => {
            return Err(Error::invalid_input("edge_plus_line needs an edge cell"))
        }
    };
    let edge = &curve.edges[ei];
    let sign = if negate { qi(-1) } else { qi(1) };
    let mut edge_verts: Vec<Vec<Q>> = vec![edge.base.iter().map(|x| x * &sign).collect()];
    let mut edge_rays: Vec<Vec<Q>> = Vec::new();
    match edge.far_end() {
        Some(p) => edge_verts.push(p.0.iter().map(|x| x * &sign).collect()),
        None => edge_rays.push(edge.dir.iter().map(|&d| qi(d) * &sign).collect()),
    }

    let mut out = Vec::new();
    for i in 0..=n {
        let attach = line.ray_vertex_chart(i);
        let verts: Vec<Vec<Q>> = edge_verts
            .iter()
            .map(|v| crate::linalg::vadd(v, &attach))
            .collect();
        let mut rays = edge_rays.clone();
        rays.push(chart_unit(n, i));
        out.push(from_gens(&verts, &rays)?);
    }
    // Bounded part of the line: the distinct attachment vertices.
    let mut line_verts: Vec<Vec<Q>> = Vec::new();
    for i in 0..=n {
        let v = line.ray_vertex_chart(i);
        if !line_verts.contains(&v) {
            line_verts.push(v);
        }
    }
    if line_verts.len() > 1 {
        let mut verts = Vec::new();
        for ev in &edge_verts {
            for lv in &line_verts {
                verts.push(crate::linalg::vadd(ev, lv));
            }
        }
        out.push(from_gens(&verts, &edge_rays)?);
    }
    Ok(out)
}

/// Support of the dual contribution of a qualifying edge: `−E` plus the
/// tropicalized row-span line of the exponent matrix.
pub fn bergman_edge_dual_support(
    curve: &TropicalCurve,
    ctx: &CellContext,
) -> Result<Vec<Polyhedron>, Error> {
    if !bergman_edge_qualifies(curve, ctx)? {
        return Err(Error::not_applicable(
            "the edge direction meets a coordinate subspace of codimension \
             two that does not contain the curve",
        ));
    }
    let line = bergman_fiber_line(ctx, true)?;
    edge_plus_line(curve, ctx, &line, true)
}

/// Support of the tangential contribution of a qualifying edge: `E`
/// plus the tropicalized kernel line of the exponent matrix.
pub fn bergman_edge_tau_support(
    curve: &TropicalCurve,
    ctx: &CellContext,
) -> Result<Vec<Polyhedron>, Error> {
    if !bergman_edge_qualifies(curve, ctx)? {
        return Err(Error::not_applicable(
            "the edge direction meets a coordinate subspace of codimension \
             two that does not contain the curve",
        ));
    }
    let line = bergman_fiber_line(ctx, false)?;
    edge_plus_line(curve, ctx, &line, false)
}
