//! Tropical complete intersections of hypersurfaces: construction of the
//! tropical curve, transversality checks, and edge multiplicities.

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::hypersurface::{TropPoint, ValuedSupport};
use crate::lattice::primitive_q;
use crate::linalg;
use crate::rat::{Q, Val};

/// Reference to a cell of a tropical curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellRef {
    /// Index into the vertex list.
    Vertex(usize),
    /// Index into the edge list.
    Edge(usize),
}

impl std::fmt::Display for CellRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CellRef::Vertex(i) => write!(f, "vertex {i}"),
            CellRef::Edge(i) => write!(f, "edge {i}"),
        }
    }
}

/// An edge (bounded segment or unbounded ray) of a tropical curve,
/// stored as basepoint, primitive direction and parameter interval
/// `[0, ℓ]` with `ℓ ∈ Q_{>0} ∪ {∞}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    /// Start point `α(0)`, in the chart `α_0 = 0`.
    pub base: Vec<Q>,
    /// Primitive integer direction.
    pub dir: Vec<i64>,
    /// Parameter length: `α(s) = base + s·dir`, `s ∈ [0, length]`.
    pub length: Val,
    /// Tropical multiplicity.
    pub mult: crate::rat::Z,
}

impl Edge {
    /// The point `α(s)` on (the affine hull of) this edge.
    pub fn point_at(&self, s: &Q) -> TropPoint {
        TropPoint(
            self.base
                .iter()
                .zip(&self.dir)
                .map(|(b, &d)| b + Q::from_integer(d.into()) * s)
                .collect(),
        )
    }

    /// A point in the relative interior (midpoint, or `s = 1` on rays).
    pub fn interior_point(&self) -> TropPoint {
        match &self.length {
            Val::Fin(l) => self.point_at(&(l / Q::from_integer(2.into()))),
            Val::Inf => self.point_at(&Q::one()),
        }
    }

    /// The far endpoint, if bounded.
    pub fn far_end(&self) -> Option<TropPoint> {
        self.length.finite().map(|l| self.point_at(l))
    }
}

/// A tropical curve: a one-dimensional weighted polyhedral complex in
/// `T^n` (chart `α_0 = 0`).
#[derive(Clone, Debug)]
pub struct TropicalCurve {
    /// Ambient dimension `n`.
    pub n: usize,
    /// Vertices, sorted lexicographically.
    pub vertices: Vec<TropPoint>,
    /// Edges; bounded edges start and end at vertices.
    pub edges: Vec<Edge>,
}

impl TropicalCurve {
    /// Index of the vertex at `p`, if any.
    pub fn vertex_index(&self, p: &TropPoint) -> Option<usize> {
        self.vertices.iter().position(|v| v == p)
    }

    /// Edges incident to vertex `vi` (at either end).
    pub fn incident_edges(&self, vi: usize) -> Vec<usize> {
        let v = &self.vertices[vi];
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| {
                TropPoint(e.base.clone()) == *v || e.far_end().as_ref() == Some(v)
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// Outgoing primitive direction of edge `ei` as seen from vertex
    /// `vi` (which must be an endpoint).
    pub fn outgoing_dir(&self, ei: usize, vi: usize) -> Vec<i64> {
        let e = &self.edges[ei];
        if TropPoint(e.base.clone()) == self.vertices[vi] {
            e.dir.clone()
        } else {
            e.dir.iter().map(|&d| -d).collect()
        }
    }

    /// Exact balancing check at every vertex:
    /// `Σ mult·(primitive outgoing direction) = 0`.
    pub fn is_balanced(&self) -> bool {
        for vi in 0..self.vertices.len() {
            let mut acc = vec![crate::rat::Z::zero(); self.n];
            for ei in self.incident_edges(vi) {
                let d = self.outgoing_dir(ei, vi);
                for (a, &x) in acc.iter_mut().zip(&d) {
                    *a += &self.edges[ei].mult * crate::rat::Z::from(x);
                }
            }
            if acc.iter().any(|x| !x.is_zero()) {
                return false;
            }
        }
        true
    }

    /// Directions of all edges (primitive, one per edge).
    pub fn edge_directions(&self) -> Vec<Vec<i64>> {
        self.edges.iter().map(|e| e.dir.clone()).collect()
    }
}

/// One linear constraint `c·t + d ≥ 0` over parameter space.
type Constraint = (Vec<Q>, Q);

/// Strict feasibility of `{c·t + d > 0}` by Fourier–Motzkin elimination.
fn fm_strictly_feasible(cons: &[Constraint], nvars: usize) -> bool {
    if nvars == 0 {
        return cons.iter().all(|(_, d)| d.is_positive());
    }
    let k = nvars - 1;
    let mut pos: Vec<Constraint> = Vec::new();
    let mut neg: Vec<Constraint> = Vec::new();
    let mut rest: Vec<Constraint> = Vec::new();
    for (c, d) in cons {
        if c[k].is_positive() {
            pos.push((c.clone(), d.clone()));
        } else if c[k].is_negative() {
            neg.push((c.clone(), d.clone()));
        } else {
            rest.push((c[..k].to_vec(), d.clone()));
        }
    }
    for (cp, dp) in &pos {
        for (cn, dn) in &neg {
            // Combine: t_k > −(cp'·t + dp)/cp_k and t_k < −(cn'·t + dn)/cn_k.
            let a = cp[k].clone();
            let b = -cn[k].clone();
            let c: Vec<Q> = (0..k).map(|j| &cp[j] * &b + &cn[j] * &a).collect();
            let d = dp * &b + dn * &a;
            rest.push((c, d));
        }
    }
    fm_strictly_feasible(&rest, k)
}

/// Dimension of the polyhedron `{t ∈ R^h : c·t + d ≥ 0}`;
/// `None` when empty.
pub(crate) fn polyhedron_dim(cons: &[Constraint], h: usize) -> Option<usize> {
    // Drop vacuous constraints; detect constant infeasibility.
    let mut live: Vec<Constraint> = Vec::new();
    for (c, d) in cons {
        if c.iter().all(|x| x.is_zero()) {
            if d.is_negative() {
                return None;
            }
        } else {
            live.push((c.clone(), d.clone()));
        }
    }
    if live.is_empty() {
        return Some(h);
    }
    if fm_strictly_feasible(&live, h) {
        return Some(h);
    }
    // No interior point: the set lies in the union of the constraint
    // hyperplanes; recurse into each.
    let mut best: Option<usize> = None;
    for (idx, (c, d)) in live.iter().enumerate() {
        // Solve c·t + d = 0 for the last variable with nonzero coefficient.
        let piv = c.iter().rposition(|x| !x.is_zero()).expect("nonzero constraint");
        let inv = -c[piv].recip();
        // t_piv = inv·(Σ_{j≠piv} c_j t_j + d)·(−1)... substitute into others.
        let subst = |cc: &[Q], dd: &Q| -> Constraint {
            let f = &cc[piv];
            let mut nc: Vec<Q> = (0..c.len())
                .filter(|&j| j != piv)
                .map(|j| &cc[j] + f * &inv * &c[j])
                .collect();
            let nd = dd + f * &inv * d;
            nc.shrink_to_fit();
            (nc, nd)
        };
        let sub_cons: Vec<Constraint> = live
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != idx)
            .map(|(_, (cc, dd))| subst(cc, dd))
            .collect();
        if let Some(dim) = polyhedron_dim(&sub_cons, h - 1) {
            best = Some(best.map_or(dim, |b: usize| b.max(dim)));
        }
    }
    best
}

/// Clip the line `t ∈ R` by constraints, returning the feasible closed
/// interval `(lo, hi)` with `None` meaning unbounded on that side;
/// `None` overall when empty.
pub(crate) fn clip_interval(cons: &[Constraint]) -> Option<(Option<Q>, Option<Q>)> {
    let mut lo: Option<Q> = None;
    let mut hi: Option<Q> = None;
    for (c, d) in cons {
        let c0 = &c[0];
        if c0.is_zero() {
            if d.is_negative() {
                return None;
            }
            continue;
        }
        let bound = -(d / c0);
        if c0.is_positive() {
            if lo.as_ref().map_or(true, |l| bound > *l) {
                lo = Some(bound);
            }
        } else if hi.as_ref().map_or(true, |h| bound < *h) {
            hi = Some(bound);
        }
    }
    if let (Some(l), Some(h)) = (&lo, &hi) {
        if l > h {
            return None;
        }
    }
    Some((lo, hi))
}

/// Enumerate subsets of `0..n` of size ≥ 2.
fn subsets_ge2(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() >= 2 {
            out.push((0..n).filter(|i| mask >> i & 1 == 1).collect());
        }
    }
    out
}

/// Intersect `n−1` tropical hypersurfaces in `T^n` into a tropical
/// curve.
///
/// Enumerates tuples `(S_1, …, S_{n−1})` of minimal-term subsets with
/// total excess `Σ(|S_i|−1) ∈ {n−1, n}`, solves the exact equality
/// system and clips by the inequality system. Fails when the
/// transversality codimension condition is violated on any tuple.
pub fn intersect_curve(hs: &[ValuedSupport]) -> Result<TropicalCurve, Error> {
    if hs.is_empty() {
        return Err(Error::invalid_input("need at least one hypersurface"));
    }
    let ambient = hs[0].ambient();
    let n = ambient - 1;
    if hs.len() != n - 1 {
        return Err(Error::invalid_input(format!(
            "expected {} hypersurfaces for curves in {}-space, got {}",
            n - 1,
            n,
            hs.len()
        )));
    }
    if hs.iter().any(|h| h.ambient() != ambient) {
        return Err(Error::invalid_input("mixed ambient dimensions"));
    }

    let subset_lists: Vec<Vec<Vec<usize>>> =
        hs.iter().map(|h| subsets_ge2(h.len())).collect();

    let mut raw_edges: Vec<(Vec<Q>, Vec<i64>, Val)> = Vec::new();
    let mut vertices: Vec<TropPoint> = Vec::new();

    let mut tuple_idx = vec![0usize; hs.len()];
    'outer: loop {
        let tuple: Vec<&Vec<usize>> = tuple_idx
            .iter()
            .zip(&subset_lists)
            .map(|(&i, l)| &l[i])
            .collect();
        let excess: usize = tuple.iter().map(|s| s.len() - 1).sum();
        if excess == n - 1 || excess == n {
            process_tuple(hs, &tuple, n, excess, &mut raw_edges, &mut vertices)?;
        }
        // Advance the mixed-radix tuple counter.
        for k in 0..hs.len() {
            tuple_idx[k] += 1;
            if tuple_idx[k] < subset_lists[k].len() {
                continue 'outer;
            }
            tuple_idx[k] = 0;
        }
        break;
    }

    vertices.sort_by(|a, b| a.0.cmp(&b.0));
    vertices.dedup();

    // Split edges at vertices lying in their interior (collinear cells).
    let mut edges: Vec<(Vec<Q>, Vec<i64>, Val)> = Vec::new();
    for (base, dir, len) in raw_edges {
        let mut cuts: Vec<Q> = Vec::new();
        for v in &vertices {
            if let Some(s) = param_on_segment(&base, &dir, &len, &v.0) {
                if s.is_positive() && Val::Fin(s.clone()) < len {
                    cuts.push(s);
                }
            }
        }
        cuts.sort();
        cuts.dedup();
        let mut start = Q::zero();
        let mut start_pt = base.clone();
        for c in cuts {
            let seg = &c - &start;
            edges.push((start_pt.clone(), dir.clone(), Val::Fin(seg.clone())));
            start_pt = point_on(&start_pt, &dir, &seg);
            start = c;
        }
        let remaining = match &len {
            Val::Fin(l) => Val::Fin(l - &start),
            Val::Inf => Val::Inf,
        };
        edges.push((start_pt, dir, remaining));
    }
    edges.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
    edges.dedup();

    let mut curve = TropicalCurve {
        n,
        vertices,
        edges: edges
            .into_iter()
            .map(|(base, dir, length)| Edge {
                base,
                dir,
                length,
                mult: crate::rat::Z::one(),
            })
            .collect(),
    };

    // Fill in edge multiplicities from the normalized contexts.
    for ei in 0..curve.edges.len() {
        let ctx = crate::cell::normalize_cell(&curve, CellRef::Edge(ei), hs)?;
        curve.edges[ei].mult = edge_multiplicity(&ctx)?;
    }

    Ok(curve)
}

fn point_on(base: &[Q], dir: &[i64], s: &Q) -> Vec<Q> {
    base.iter()
        .zip(dir)
        .map(|(b, &d)| b + Q::from_integer(d.into()) * s)
        .collect()
}

/// Parameter of `p` on the edge `(base, dir)` restricted to `[0, len]`,
/// if `p` lies on it.
fn param_on_segment(base: &[Q], dir: &[i64], len: &Val, p: &[Q]) -> Option<Q> {
    let mut s: Option<Q> = None;
    for ((b, &d), x) in base.iter().zip(dir).zip(p) {
        let dq = Q::from_integer(d.into());
        if dq.is_zero() {
            if b != x {
                return None;
            }
        } else {
            let si = (x - b) / dq;
            match &s {
                None => s = Some(si),
                Some(prev) if *prev != si => return None,
                _ => {}
            }
        }
    }
    let s = s?;
    if s.is_negative() || Val::Fin(s.clone()) > *len {
        return None;
    }
    Some(s)
}

fn process_tuple(
    hs: &[ValuedSupport],
    tuple: &[&Vec<usize>],
    n: usize,
    excess: usize,
    raw_edges: &mut Vec<(Vec<Q>, Vec<i64>, Val)>,
    vertices: &mut Vec<TropPoint>,
) -> Result<(), Error> {
    // Equality system over α ∈ Q^n (chart α_0 = 0): all terms in S_i equal.
    let mut a_rows: Vec<Vec<Q>> = Vec::new();
    let mut b_vals: Vec<Q> = Vec::new();
    for (h, s) in hs.iter().zip(tuple) {
        let (w0, v0) = &h.terms()[s[0]];
        for &idx in &s[1..] {
            let (w, v) = &h.terms()[idx];
            let diff = w - w0;
            a_rows.push(diff.0[1..].iter().map(|&x| Q::from_integer(x.into())).collect());
            b_vals.push(v0 - v);
        }
    }
    let Some((point, homog)) = linalg::solve_affine(&a_rows, &b_vals) else {
        return Ok(());
    };
    let h_dim = homog.len();
    let expected = n - excess;

    // Inequality constraints: all other terms ≥ the chosen minimum,
    // expressed over the parameters t of the solution space.
    let mut cons: Vec<Constraint> = Vec::new();
    for (h, s) in hs.iter().zip(tuple) {
        let (w0, v0) = &h.terms()[s[0]];
        for (idx, (w, v)) in h.terms().iter().enumerate() {
            if s.contains(&idx) {
                continue;
            }
            let diff = w - w0;
            let d0 = (v - v0) + diff.dot_chart(&point);
            let c: Vec<Q> = homog.iter().map(|hv| diff.dot_chart(hv)).collect();
            cons.push((c, d0));
        }
    }

    let dim = polyhedron_dim(&cons, h_dim);
    let Some(dim) = dim else {
        return Ok(()); // Empty cell.
    };
    if dim > expected {
        let desc = desc_cells(tuple, hs);
        return Err(Error::hypothesis_at(
            format!(
                "not a tropical complete intersection: cell tuple {desc} has dimension {dim}, expected at most {expected}"
            ),
            desc,
        ));
    }

    if expected == 0 && h_dim == 0 && dim == 0 {
        let p = TropPoint(point);
        if !vertices.contains(&p) {
            vertices.push(p);
        }
    } else if expected == 1 && h_dim == 1 && dim == 1 {
        let (lo, hi) = clip_interval(&cons).expect("nonempty by dim check");
        let u = &homog[0];
        match (lo, hi) {
            (Some(l), Some(hh)) => {
                if l < hh {
                    let start = linalg::axpy(&point, &l, u);
                    let dir = primitive_q(u)?;
                    let span = linalg::vsub(&linalg::axpy(&point, &hh, u), &start);
                    let c = length_along(&span, &dir);
                    raw_edges.push((start, dir, Val::Fin(c)));
                }
            }
            (Some(l), None) => {
                let start = linalg::axpy(&point, &l, u);
                raw_edges.push((start, primitive_q(u)?, Val::Inf));
            }
            (None, Some(hh)) => {
                let start = linalg::axpy(&point, &hh, u);
                let neg: Vec<Q> = u.iter().map(|x| -x.clone()).collect();
                raw_edges.push((start, primitive_q(&neg)?, Val::Inf));
            }
            (None, None) => {
                let neg: Vec<Q> = u.iter().map(|x| -x.clone()).collect();
                raw_edges.push((point.clone(), primitive_q(u)?, Val::Inf));
                raw_edges.push((point.clone(), primitive_q(&neg)?, Val::Inf));
            }
        }
    }
    Ok(())
}

fn desc_cells(tuple: &[&Vec<usize>], hs: &[ValuedSupport]) -> String {
    tuple
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let exps: Vec<String> = s
                .iter()
                .map(|&k| format!("{:?}", hs[i].terms()[k].0 .0))
                .collect();
            format!("f{}:{{{}}}", i + 1, exps.join(","))
        })
        .collect::<Vec<_>>()
        .join(" × ")
}

/// Scalar `c > 0` with `span = c·dir`.
fn length_along(span: &[Q], dir: &[i64]) -> Q {
    for (s, &d) in span.iter().zip(dir) {
        if d != 0 {
            return s / Q::from_integer(d.into());
        }
    }
    Q::zero()
}

/// Tropical multiplicity of an edge: the index of the group generated by
/// the normalized exponent tuples `v_i` inside the saturation of their
/// span.
pub fn edge_multiplicity(ctx: &crate::cell::CellContext) -> Result<crate::rat::Z, Error> {
    if ctx.i0.is_some() {
        return Err(Error::invalid_input("edge_multiplicity needs an edge cell"));
    }
    let gens: Vec<Vec<i64>> = ctx.v.iter().map(|v| v.0.clone()).collect();
    crate::lattice::lattice_index_i64(&gens)
}

/// Report of the standing assumptions checked on an input system.
#[derive(Clone, Debug)]
pub struct AssumptionReport {
    /// Transversality of the tropical complete intersection.
    pub complete_intersection: bool,
    /// Every vertex has exactly one three-term hypersurface and every
    /// edge exactly two minimal terms per hypersurface.
    pub three_term: bool,
    /// Every vertex of the curve is trivalent.
    pub trivalent: bool,
    /// Non-colliding valuations: finite critical locus and the
    /// prescribed shape of every cancellative pair.
    pub non_colliding: bool,
    /// Whether the effective very-generality check is available (it is
    /// enforced at runtime inside the ζ/g reduction; violations surface
    /// as errors there).
    pub very_general_effective: bool,
    /// Human-readable notes (including where "sufficiently general
    /// lowest order parts" was assumed).
    pub notes: Vec<String>,
}

impl AssumptionReport {
    /// All mandatory checks passed.
    pub fn all_passed(&self) -> bool {
        self.complete_intersection && self.three_term && self.trivalent && self.non_colliding
    }
}

/// Verify the standing assumptions for the input system, returning a
/// report (never an error; downstream stages refuse on failed checks).
pub fn check_assumptions(hs: &[ValuedSupport]) -> AssumptionReport {
    let mut report = AssumptionReport {
        complete_intersection: false,
        three_term: false,
        trivalent: false,
        non_colliding: false,
        very_general_effective: true,
        notes: Vec::new(),
    };
    let curve = match intersect_curve(hs) {
        Ok(c) => c,
        Err(e) => {
            report.notes.push(format!("intersection failed: {e}"));
            return report;
        }
    };
    report.complete_intersection = true;

    report.three_term = true;
    for vi in 0..curve.vertices.len() {
        if crate::cell::normalize_cell(&curve, CellRef::Vertex(vi), hs).is_err() {
            report.three_term = false;
            report.notes.push(format!("vertex {vi} violates the three-term condition"));
        }
    }
    for ei in 0..curve.edges.len() {
        if crate::cell::normalize_cell(&curve, CellRef::Edge(ei), hs).is_err() {
            report.three_term = false;
            report.notes.push(format!("edge {ei} has a degenerate minimal-term set"));
        }
    }

    report.trivalent = (0..curve.vertices.len()).all(|vi| curve.incident_edges(vi).len() == 3);

    if report.three_term {
        match crate::tangent::critical_locus(&curve, hs) {
            Ok(data) => {
                report.non_colliding = data.iter().all(|d| d.conforming);
                if !report.non_colliding {
                    report
                        .notes
                        .push("a cancellative pair violates the non-colliding shape".into());
                }
            }
            Err(e) => {
                report.non_colliding = false;
                report.notes.push(format!("critical locus: {e}"));
            }
        }
    }

    report
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::lattice::ExpVec;
    use crate::rat::{qi, qr};

    fn ev(v: &[i64]) -> ExpVec {
        ExpVec::new(v.to_vec()).unwrap()
    }

    fn sup(terms: &[(&[i64], Q)]) -> ValuedSupport {
        ValuedSupport::new(
            terms
                .iter()
                .map(|(w, v)| (ev(w), v.clone()))
                .collect(),
        )
        .unwrap()
    }

    pub(crate) fn p3_system() -> Vec<ValuedSupport> {
        vec![
            sup(&[
                (&[0, 0, 0, 0], qi(0)),
                (&[2, 0, 1, -3], qi(0)),
                (&[1, 0, 3, -4], qi(0)),
            ]),
            sup(&[
                (&[0, 0, 0, 0], qi(0)),
                (&[0, 1, 1, -2], qi(0)),
                (&[1, -1, 0, 0], qi(3)),
            ]),
        ]
    }

    pub(crate) fn cubic_system() -> Vec<ValuedSupport> {
        vec![sup(&[
            (&[0, 0, 0], qi(0)),
            (&[0, -1, 1], qi(0)),
            (&[-2, 1, 1], qi(0)),
        ])]
    }

    #[test]
    fn p3_curve_structure() {
        let curve = intersect_curve(&p3_system()).unwrap();
        let vs: Vec<Vec<Q>> = curve.vertices.iter().map(|v| v.0.clone()).collect();
        assert_eq!(
            vs,
            vec![
                vec![qi(0), qi(0), qi(0)],
                vec![qi(3), qi(0), qi(0)],
                vec![qi(3), qi(1), qi(2)],
            ]
        );
        assert_eq!(curve.edges.len(), 7);
        // E5 = R≥0·(−2,−4,−3) from the origin.
        assert!(curve.edges.iter().any(|e| e.base == vec![qi(0), qi(0), qi(0)]
            && e.dir == vec![-2, -4, -3]
            && e.length == Val::Inf));
        // E1 = conv{(0,0,0),(3,1,2)} with direction (3,1,2).
        assert!(curve.edges.iter().any(|e| {
            e.base == vec![qi(0), qi(0), qi(0)]
                && e.dir == vec![3, 1, 2]
                && e.length == Val::Fin(qi(1))
        }));
        // E2 = (3,0,0) + s(0,1,2), s ∈ [0,1].
        assert!(curve.edges.iter().any(|e| {
            e.base == vec![qi(3), qi(0), qi(0)]
                && e.dir == vec![0, 1, 2]
                && e.length == Val::Fin(qi(1))
        }));
        // All multiplicities are one.
        assert!(curve.edges.iter().all(|e| e.mult == 1.into()));
        assert!(curve.is_balanced());
        // Trivalence.
        for vi in 0..3 {
            assert_eq!(curve.incident_edges(vi).len(), 3);
        }
    }

    #[test]
    fn cubic_curve_structure() {
        let curve = intersect_curve(&cubic_system()).unwrap();
        assert_eq!(curve.vertices.len(), 1);
        assert_eq!(curve.vertices[0].0, vec![qi(0), qi(0)]);
        assert_eq!(curve.edges.len(), 3);
        let mut dirs: Vec<(Vec<i64>, crate::rat::Z)> = curve
            .edges
            .iter()
            .map(|e| (e.dir.clone(), e.mult.clone()))
            .collect();
        dirs.sort();
        assert_eq!(
            dirs,
            vec![
                (vec![-1, 1], 1.into()),
                (vec![0, -1], 2.into()),
                (vec![1, 1], 1.into()),
            ]
        );
        assert!(curve.is_balanced());
    }

    /// A plane and a binomial plane meeting transversally in a
    /// degree-one curve (a line inside the plane `x_3 = 0`).
    pub(crate) fn line_system() -> Vec<ValuedSupport> {
        vec![
            sup(&[
                (&[0, 0, 0, 0], qi(0)),
                (&[-1, 1, 0, 0], qi(0)),
                (&[-1, 0, 1, 0], qi(0)),
                (&[-1, 0, 0, 1], qi(1)),
            ]),
            sup(&[(&[0, 0, 0, 0], qi(0)), (&[-1, 0, 0, 1], qi(0))]),
        ]
    }

    #[test]
    fn plane_meets_binomial_in_a_line() {
        let curve = intersect_curve(&line_system()).unwrap();
        // One trivalent vertex at the origin with three planar rays.
        assert_eq!(curve.vertices.len(), 1);
        assert_eq!(curve.vertices[0].0, vec![qi(0), qi(0), qi(0)]);
        assert_eq!(curve.edges.len(), 3);
        let mut ray_dirs: Vec<Vec<i64>> = curve
            .edges
            .iter()
            .map(|e| {
                assert_eq!(e.length, Val::Inf);
                e.dir.clone()
            })
            .collect();
        ray_dirs.sort();
        assert_eq!(
            ray_dirs,
            vec![vec![-1, -1, 0], vec![0, 1, 0], vec![1, 0, 0]]
        );
        assert!(curve.edges.iter().all(|e| e.mult == 1.into()));
        assert!(curve.is_balanced());
    }

    #[test]
    fn overlapping_planes_fail_transversality() {
        // Two tropical planes with the same support have overlapping
        // parallel facets: the set-theoretic intersection is
        // two-dimensional and is rejected.
        let f1 = sup(&[
            (&[0, 0, 0, 0], qi(0)),
            (&[-1, 1, 0, 0], qi(0)),
            (&[-1, 0, 1, 0], qi(0)),
            (&[-1, 0, 0, 1], qi(0)),
        ]);
        let f2 = sup(&[
            (&[0, 0, 0, 0], qi(0)),
            (&[-1, 1, 0, 0], qi(1)),
            (&[-1, 0, 1, 0], qi(-1)),
            (&[-1, 0, 0, 1], qi(0)),
        ]);
        let err = intersect_curve(&[f1, f2]).unwrap_err();
        assert!(err.is_hypothesis(), "expected hypothesis failure, got {err}");
    }

    #[test]
    fn duplicated_hypersurface_fails_transversality() {
        let g1 = sup(&[
            (&[0, 0, 0, 0], qi(0)),
            (&[-1, 1, 0, 0], qi(0)),
            (&[-1, 0, 1, 0], qi(0)),
            (&[-1, 0, 0, 1], qi(0)),
        ]);
        let err = intersect_curve(&[g1.clone(), g1.clone()]).unwrap_err();
        assert!(err.is_hypothesis(), "expected hypothesis failure, got {err}");
        let report = check_assumptions(&[g1.clone(), g1]);
        assert!(!report.complete_intersection);
        assert!(!report.all_passed());
    }

    #[test]
    fn interval_clipping() {
        let cons = vec![
            (vec![qi(1)], qi(0)),  // t ≥ 0
            (vec![qi(-2)], qi(3)), // t ≤ 3/2
        ];
        assert_eq!(clip_interval(&cons), Some((Some(qi(0)), Some(qr(3, 2)))));
        let empty = vec![(vec![qi(1)], qi(-2)), (vec![qi(-1)], qi(1))];
        assert_eq!(clip_interval(&empty), None);
    }

    #[test]
    fn polyhedron_dim_cases() {
        // Square in R²: full-dimensional.
        let square = vec![
            (vec![qi(1), qi(0)], qi(0)),
            (vec![qi(-1), qi(0)], qi(1)),
            (vec![qi(0), qi(1)], qi(0)),
            (vec![qi(0), qi(-1)], qi(1)),
        ];
        assert_eq!(polyhedron_dim(&square, 2), Some(2));
        // Segment: x ≥ 0, −x ≥ 0 pinches to the line x = 0.
        let seg = vec![
            (vec![qi(1), qi(0)], qi(0)),
            (vec![qi(-1), qi(0)], qi(0)),
            (vec![qi(0), qi(1)], qi(0)),
        ];
        assert_eq!(polyhedron_dim(&seg, 2), Some(1));
        // Point.
        let pt = vec![
            (vec![qi(1), qi(0)], qi(0)),
            (vec![qi(-1), qi(0)], qi(0)),
            (vec![qi(0), qi(1)], qi(0)),
            (vec![qi(0), qi(-1)], qi(0)),
        ];
        assert_eq!(polyhedron_dim(&pt, 2), Some(0));
        // Empty.
        let empty = vec![
            (vec![qi(1), qi(0)], qi(0)),
            (vec![qi(-1), qi(0)], qi(-1)),
        ];
        assert_eq!(polyhedron_dim(&empty, 2), None);
    }
}
