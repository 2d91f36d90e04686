//! Weighted polyhedral complexes derived from the tangent families: the
//! graph of the tangent assignment, the Gauss image, the tropical dual
//! variety and the tropical tangential variety.

use num_traits::{Signed, Zero};

use crate::cell::{normalize_cell, CellContext};
use crate::curve::{CellRef, TropicalCurve};
use crate::error::Error;
use crate::hypersurface::ValuedSupport;
use crate::lattice::IntMatrix;
use crate::rat::{qi, Aff, Q, Val, Z};
use crate::poly::{solve_system, AffForm, HSystem, Polyhedron};
use crate::tangent::{edge_tangents, vertex_tangents};

// ---------------------------------------------------------------------------
// The graph complex
// ---------------------------------------------------------------------------

/// A one-dimensional cell of the graph of the tangent assignment in
/// `T^n × T^{C(n+1,2)}`: both the curve point `α` and the Plücker vector
/// `β` are affine functions of one parameter `s ∈ [0, smax]`.
#[derive(Clone, Debug)]
pub struct GraphCell {
    /// The curve cell this piece comes from.
    pub source: CellRef,
    /// Curve point, coordinate by coordinate (length `n`).
    pub alpha: Vec<Aff>,
    /// Plücker coordinates in ascending lexicographic pair order;
    /// `None` means identically infinite on this cell.
    pub beta: Vec<Option<Aff>>,
    /// Parameter range `[0, smax]`.
    pub smax: Val,
    /// Multiplicity.
    pub mult: Z,
}

impl GraphCell {
    /// Evaluate the finite part of `β` at a parameter value.
    pub fn beta_at(&self, s: &Q) -> Vec<Option<Q>> {
        self.beta
            .iter()
            .map(|b| b.as_ref().map(|aff| aff.eval(s)))
            .collect()
    }
}

/// The graph complex of the tangent assignment.
#[derive(Clone, Debug)]
pub struct GraphComplex {
    /// Ambient curve dimension `n`.
    pub n: usize,
    /// Number of Plücker coordinates `C(n+1,2)`.
    pub pluecker_dim: usize,
    /// The one-dimensional cells.
    pub cells: Vec<GraphCell>,
}

/// Multiplicity of the tangent branches at a vertex: the absolute value
/// of the maximal minors of the integer matrix with rows
/// `v_1, …, v_{n−1}, v_{i0} − v'_{i0}`. All maximal minors agree up to
/// sign because every row sums to zero; this is asserted.
pub fn vertex_branch_mult(ctx: &CellContext) -> Result<Z, Error> {
    let (i0, vp) = match (ctx.i0, ctx.v_prime.as_ref()) {
        (Some(i0), Some(vp)) => (i0, vp),
        _ => {
            return Err(Error::invalid_input(
                "vertex_branch_mult needs a vertex cell",
            ))
        }
    };
    let mut rows: Vec<Vec<i64>> = ctx.v.iter().map(|v| v.0.clone()).collect();
    let diff: Vec<i64> = ctx.v[i0]
        .0
        .iter()
        .zip(&vp[i0].0)
        .map(|(a, b)| a - b)
        .collect();
    rows.push(diff);
    let m = IntMatrix::from_i64(&rows)?;
    let n = ctx.n;
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
        minors.push(crate::lattice::det(&sub));
    }
    let first = minors[0].abs();
    if minors.iter().any(|x| x.abs() != first) {
        return Err(Error::inconsistency(
            "maximal minors of the branch matrix disagree in absolute value",
        ));
    }
    if first.is_zero() {
        return Err(Error::degenerate(
            "branch multiplicity matrix is singular",
        ));
    }
    Ok(first)
}

/// Assemble the graph complex from the tangent families of every cell of
/// the curve.
pub fn graph_complex(
    curve: &TropicalCurve,
    hs: &[ValuedSupport],
) -> Result<GraphComplex, Error> {
    let n = curve.n;
    let pluecker_dim = (n + 1) * n / 2;
    let mut cells: Vec<GraphCell> = Vec::new();

    for ei in 0..curve.edges.len() {
        let ctx = normalize_cell(curve, CellRef::Edge(ei), hs)?;
        let fam = edge_tangents(&ctx)?;
        let edge = &curve.edges[ei];
        // Common breakpoints over all coordinates.
        let mut cuts: Vec<Q> = vec![Q::zero()];
        for q in fam.q.iter().flatten() {
            for (start, _, _) in &q.pieces {
                if !start.is_zero() {
                    cuts.push(start.clone());
                }
            }
        }
        cuts.sort();
        cuts.dedup();
        for (ci, start) in cuts.iter().enumerate() {
            let end: Val = cuts
                .get(ci + 1)
                .map(|c| Val::Fin(c.clone()))
                .unwrap_or_else(|| edge.length.clone());
            let smax = &end - start;
            if smax <= Val::zero() {
                continue;
            }
            let alpha: Vec<Aff> = edge
                .base
                .iter()
                .zip(&edge.dir)
                .map(|(b, &d)| Aff {
                    a: b + Q::from_integer(d.into()) * start,
                    b: Q::from_integer(d.into()),
                })
                .collect();
            let beta: Vec<Option<Aff>> = fam
                .q
                .iter()
                .map(|q| {
                    q.as_ref().map(|pw| {
                        let (_, _, aff) = pw
                            .pieces
                            .iter()
                            .find(|(lo, hi, _)| lo <= start && Val::Fin(start.clone()) < *hi)
                            .expect("pieces cover the interval");
                        // Reparameterize to the sub-piece.
                        Aff {
                            a: aff.eval(start),
                            b: aff.b.clone(),
                        }
                    })
                })
                .collect();
            cells.push(GraphCell {
                source: CellRef::Edge(ei),
                alpha,
                beta,
                smax,
                mult: edge.mult.clone(),
            });
        }
    }

    for vi in 0..curve.vertices.len() {
        let ctx = normalize_cell(curve, CellRef::Vertex(vi), hs)?;
        let fam = vertex_tangents(&ctx)?;
        let mult = vertex_branch_mult(&ctx)?;
        let alpha: Vec<Aff> = curve.vertices[vi]
            .0
            .iter()
            .map(|x| Aff::constant(x.clone()))
            .collect();
        for branch in &fam.branches {
            let beta: Vec<Option<Aff>> = fam
                .base
                .iter()
                .zip(&branch.slacks)
                .map(|(b, slack)| match b {
                    Val::Fin(v) => Some(Aff {
                        a: v.clone(),
                        b: slack.b.clone(),
                    }
                    .add(&Aff::constant(slack.a.clone()))),
                    Val::Inf => {
                        debug_assert!(slack.is_zero());
                        None
                    }
                })
                .collect();
            cells.push(GraphCell {
                source: CellRef::Vertex(vi),
                alpha: alpha.clone(),
                beta,
                smax: branch.smax.clone(),
                mult: mult.clone(),
            });
        }
    }

    Ok(GraphComplex {
        n,
        pluecker_dim,
        cells,
    })
}

// ---------------------------------------------------------------------------
// One-dimensional weighted complexes (Gauss image, planar duals)
// ---------------------------------------------------------------------------

/// A one-dimensional weighted cell: segment or ray.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneCell {
    /// Start point.
    pub base: Vec<Q>,
    /// Primitive integer direction.
    pub dir: Vec<i64>,
    /// Lattice length (`Inf` for rays).
    pub length: Val,
    /// Multiplicity.
    pub mult: Z,
    /// Curve cells contributing to this cell.
    pub sources: Vec<CellRef>,
}

impl OneCell {
    /// The far endpoint, when bounded.
    pub fn far_end(&self) -> Option<Vec<Q>> {
        self.length.finite().map(|l| {
            self.base
                .iter()
                .zip(&self.dir)
                .map(|(b, &d)| b + Q::from_integer(d.into()) * l)
                .collect()
        })
    }

    /// Canonical key ignoring multiplicity and sources, with bounded
    /// segments oriented by their lexicographically smaller endpoint.
    fn key(&self) -> (Vec<Q>, Vec<i64>, Val) {
        if let Some(far) = self.far_end() {
            if far < self.base {
                return (
                    far,
                    self.dir.iter().map(|&d| -d).collect(),
                    self.length.clone(),
                );
            }
        }
        (self.base.clone(), self.dir.clone(), self.length.clone())
    }
}

/// A one-dimensional weighted polyhedral complex.
#[derive(Clone, Debug)]
pub struct OneComplex {
    /// Ambient dimension.
    pub ambient: usize,
    /// Maximal cells.
    pub cells: Vec<OneCell>,
}

impl OneComplex {
    /// `(vertices, bounded cells, unbounded cells)`.
    pub fn f_vector(&self) -> (usize, usize, usize) {
        let mut endpoints: Vec<Vec<Q>> = Vec::new();
        let mut bounded = 0;
        let mut unbounded = 0;
        for c in &self.cells {
            endpoints.push(c.base.clone());
            match c.far_end() {
                Some(far) => {
                    endpoints.push(far);
                    bounded += 1;
                }
                None => unbounded += 1,
            }
        }
        endpoints.sort();
        endpoints.dedup();
        (endpoints.len(), bounded, unbounded)
    }

    /// Exact balancing at every endpoint: the weighted primitive
    /// outgoing directions of the cells ending there sum to zero (cells
    /// passing through a point contribute both directions and cancel).
    pub fn is_balanced(&self) -> bool {
        let mut points: Vec<Vec<Q>> = Vec::new();
        for c in &self.cells {
            points.push(c.base.clone());
            if let Some(far) = c.far_end() {
                points.push(far);
            }
        }
        points.sort();
        points.dedup();
        for p in &points {
            let mut acc = vec![Z::zero(); self.ambient];
            for c in &self.cells {
                // Parameter of p on the cell line, if any.
                let mut t: Option<Q> = None;
                let mut on = true;
                for ((b, &d), x) in c.base.iter().zip(&c.dir).zip(p) {
                    let dq = Q::from_integer(d.into());
                    if dq.is_zero() {
                        if b != x {
                            on = false;
                            break;
                        }
                    } else {
                        let ti = (x - b) / dq;
                        match &t {
                            None => t = Some(ti),
                            Some(prev) if *prev != ti => {
                                on = false;
                                break;
                            }
                            _ => {}
                        }
                    }
                }
                if !on {
                    continue;
                }
                let t = t.unwrap_or_else(Q::zero);
                if t.is_zero() {
                    for (a, &d) in acc.iter_mut().zip(&c.dir) {
                        *a += &c.mult * Z::from(d);
                    }
                } else if Val::Fin(t.clone()) == c.length {
                    for (a, &d) in acc.iter_mut().zip(&c.dir) {
                        *a -= &c.mult * Z::from(d);
                    }
                }
                // Interior crossings contribute both directions: zero.
            }
            if acc.iter().any(|x| !x.is_zero()) {
                return false;
            }
        }
        true
    }
}

/// Merge cells with identical support, summing multiplicities.
fn merge_one_cells(cells: Vec<OneCell>) -> Vec<OneCell> {
    let mut out: Vec<OneCell> = Vec::new();
    for c in cells {
        let key = c.key();
        if let Some(existing) = out.iter_mut().find(|e| e.key() == key) {
            existing.mult += &c.mult;
            for s in c.sources {
                if !existing.sources.contains(&s) {
                    existing.sources.push(s);
                }
            }
        } else {
            out.push(c);
        }
    }
    out.sort_by(|a, b| (&a.base, &a.dir).cmp(&(&b.base, &b.dir)));
    out
}

/// The tropicalized Gauss image: the projection of the graph complex to
/// the Plücker factor, in the chart subtracting the first coordinate.
///
/// Fails when the curve is a line (the image degenerates to a point).
pub fn gauss_complex(graph: &GraphComplex) -> Result<OneComplex, Error> {
    let chart_dim = graph.pluecker_dim - 1;
    // Line detection first: if β is constant on every cell (up to the
    // global additive scalar of the torus `R^{C}/R·1`) the image is a
    // single point and there is nothing to compute.
    let any_motion = graph.cells.iter().any(|cell| {
        let mut finite = cell.beta.iter().flatten();
        match finite.next() {
            Some(first) => finite.any(|aff| aff.b != first.b),
            None => false,
        }
    });
    if !any_motion {
        return Err(Error::hypothesis(
            "the Gauss image is a single point: the input curve is a line \
             (this computation requires a curve that is not a line)",
        ));
    }
    let mut cells: Vec<OneCell> = Vec::new();
    for cell in &graph.cells {
        let finite: Vec<&Aff> = cell
            .beta
            .iter()
            .map(|b| {
                b.as_ref().ok_or_else(|| {
                    Error::degenerate(
                        "identically infinite Plücker coordinate in the Gauss chart",
                    )
                })
            })
            .collect::<Result<_, _>>()?;
        let base: Vec<Q> = (1..graph.pluecker_dim)
            .map(|k| &finite[k].a - &finite[0].a)
            .collect();
        let slope: Vec<Q> = (1..graph.pluecker_dim)
            .map(|k| &finite[k].b - &finite[0].b)
            .collect();
        if slope.iter().all(|x| x.is_zero()) {
            continue;
        }
        let dir = crate::lattice::primitive_q(&slope)?;
        // Integer content of the slope vector.
        let content = {
            let ints = crate::lattice::clear_denominators(&slope);
            debug_assert_eq!(
                ints,
                dir.iter().map(|&d| Z::from(d)).collect::<Vec<_>>()
            );
            let mut g = Z::zero();
            for s in &slope {
                debug_assert!(s.denom() == &Z::from(1));
                g = num_integer::Integer::gcd(&g, s.numer());
            }
            g
        };
        let length = match &cell.smax {
            Val::Fin(l) => Val::Fin(l * Q::from_integer(content.clone())),
            Val::Inf => Val::Inf,
        };
        cells.push(OneCell {
            base,
            dir,
            length,
            mult: &cell.mult * &content,
            sources: vec![cell.source],
        });
    }
    Ok(OneComplex {
        ambient: chart_dim,
        cells: merge_one_cells(cells),
    })
}

// ---------------------------------------------------------------------------
// Dual and tangential varieties
// ---------------------------------------------------------------------------

/// A weighted polyhedral cell.
#[derive(Clone, Debug)]
pub struct WCell {
    pub poly: Polyhedron,
    pub mult: Z,
    /// Curve cells contributing to this cell.
    pub sources: Vec<CellRef>,
}

/// A weighted polyhedral complex, pure of dimension `dim`. Cells may
/// overlap in lower-dimensional sets; the multiplicity at a generic
/// point is the sum over the cells containing it.
#[derive(Clone, Debug)]
pub struct WComplex {
    pub ambient: usize,
    pub dim: usize,
    pub cells: Vec<WCell>,
}

impl WComplex {
    /// Cells contributed by one curve cell.
    pub fn cells_from(&self, source: CellRef) -> Vec<&WCell> {
        self.cells
            .iter()
            .filter(|c| c.sources.contains(&source))
            .collect()
    }

    /// Total multiplicity at a point (sum over cells containing it).
    pub fn mult_at(&self, x: &[Q]) -> Z {
        let mut total = Z::zero();
        for c in &self.cells {
            if c.poly.contains(x) {
                total += &c.mult;
            }
        }
        total
    }
}

/// Ascending-lexicographic index of the pair `{i, j}` with `i < j`
/// among all 2-subsets of `{0, …, n}`.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j <= n);
    (0..i).map(|x| n - x).sum::<usize>() + (j - i - 1)
}

/// One tropical equation: a list of affine terms over the variables
/// `(s, x_1, …, x_n)`; a point satisfies it when the minimum of the
/// terms is attained at least twice.
pub(crate) type TropEquation = Vec<AffForm>;

/// The equations cutting out the dual incidence complex over one graph
/// cell: for each `j`, the terms `β_ij + y_i` over `i ≠ j` (skipping
/// identically infinite Plücker coordinates). Returns `None` when some
/// equation degenerates to a single monomial (no solutions).
pub(crate) fn dual_equations(n: usize, cell: &GraphCell) -> Option<Vec<TropEquation>> {
    let dim = 1 + n;
    let mut eqs: Vec<TropEquation> = Vec::new();
    for j in 0..=n {
        let mut terms: Vec<AffForm> = Vec::new();
        for i in (0..=n).filter(|&i| i != j) {
            let pair = if i < j { (i, j) } else { (j, i) };
            let Some(beta) = &cell.beta[pair_index(n, pair.0, pair.1)] else {
                continue;
            };
            let mut coeffs = vec![Q::zero(); dim];
            coeffs[0] = beta.b.clone();
            if i > 0 {
                coeffs[i] = Q::new(1.into(), 1.into());
            }
            terms.push(AffForm::new(coeffs, beta.a.clone()));
        }
        match terms.len() {
            0 => {}
            1 => return None,
            _ => eqs.push(terms),
        }
    }
    Some(eqs)
}

/// The equations cutting out the tangential incidence complex over one
/// graph cell: for each triple `i < j < k`, the terms `β_ij + x_k`,
/// `β_ik + x_j`, `β_jk + x_i`.
pub(crate) fn tau_equations(n: usize, cell: &GraphCell) -> Option<Vec<TropEquation>> {
    let dim = 1 + n;
    let mut eqs: Vec<TropEquation> = Vec::new();
    for i in 0..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                let mut terms: Vec<AffForm> = Vec::new();
                for ((a, b), x) in [((i, j), k), ((i, k), j), ((j, k), i)] {
                    let Some(beta) = &cell.beta[pair_index(n, a, b)] else {
                        continue;
                    };
                    let mut coeffs = vec![Q::zero(); dim];
                    coeffs[0] = beta.b.clone();
                    if x > 0 {
                        coeffs[x] = Q::new(1.into(), 1.into());
                    }
                    terms.push(AffForm::new(coeffs, beta.a.clone()));
                }
                match terms.len() {
                    0 => {}
                    1 => return None,
                    _ => eqs.push(terms),
                }
            }
        }
    }
    Some(eqs)
}

/// Push the incidence complex of one graph cell through the projection
/// that drops the parameter `s`, keeping cells of dimension `n−1`.
pub(crate) fn project_incidence(
    n: usize,
    cell: &GraphCell,
    equations: &[TropEquation],
    out: &mut Vec<WCell>,
) -> Result<(), Error> {
    let dim = 1 + n;
    // Pair choices per equation.
    let pair_lists: Vec<Vec<(usize, usize)>> = equations
        .iter()
        .map(|terms| {
            let mut pairs = Vec::new();
            for a in 0..terms.len() {
                for b in a + 1..terms.len() {
                    pairs.push((a, b));
                }
            }
            pairs
        })
        .collect();
    let mut solutions: Vec<Polyhedron> = Vec::new();
    let mut choice = vec![0usize; equations.len()];
    'outer: loop {
        // Build and solve the system for this choice.
        let mut sys = HSystem {
            dim,
            eqs: Vec::new(),
            ineqs: Vec::new(),
        };
        for (eq, terms) in equations.iter().enumerate() {
            let (a, b) = pair_lists[eq][choice[eq]];
            sys.eqs.push(terms[a].sub(&terms[b]));
            for (c, term) in terms.iter().enumerate() {
                if c != a && c != b {
                    sys.ineqs.push(term.sub(&terms[a]));
                }
            }
        }
        let mut s_low = vec![Q::zero(); dim];
        s_low[0] = Q::new(1.into(), 1.into());
        sys.ineqs.push(AffForm::new(s_low, Q::zero()));
        if let Val::Fin(smax) = &cell.smax {
            let mut s_high = vec![Q::zero(); dim];
            s_high[0] = -Q::new(1.into(), 1.into());
            sys.ineqs.push(AffForm::new(s_high, smax.clone()));
        }
        if let Some(q) = solve_system(&sys)? {
            if !solutions.contains(&q) {
                solutions.push(q);
            }
        }
        // Advance the mixed-radix choice counter.
        for eq in 0..equations.len() {
            choice[eq] += 1;
            if choice[eq] < pair_lists[eq].len() {
                continue 'outer;
            }
            choice[eq] = 0;
        }
        break;
    }
    // Drop solution cells strictly contained in another solution cell
    // (coarser argmin choices subsume finer ones).
    let maximal: Vec<&Polyhedron> = solutions
        .iter()
        .filter(|q| {
            !solutions
                .iter()
                .any(|r| r != *q && crate::poly::poly_subset(q, r))
        })
        .collect();
    for q in maximal {
        // Cheap dimension check on the projected generators before
        // minimalizing: pieces of the wrong dimension are dropped, and
        // some of them (e.g. projections collapsing onto a line) are
        // not representable as pointed polyhedra.
        let base = &q.verts[0][1..];
        let mut dirs_q: Vec<Vec<Q>> = q
            .verts
            .iter()
            .skip(1)
            .map(|v| crate::linalg::vsub(&v[1..], base))
            .collect();
        dirs_q.extend(
            q.rays
                .iter()
                .map(|r| r[1..].iter().map(|&c| qi(c)).collect::<Vec<Q>>()),
        );
        if crate::linalg::rank_q(&dirs_q) != n - 1 {
            continue;
        }
        let projected = crate::poly::project_drop(q, &[0])?;
        if projected.dim() != n - 1 {
            continue;
        }
        // Multiplicity: m(cell) times the index of the projected
        // saturated direction lattice in its saturation.
        let dirs: Vec<Vec<Z>> = q
            .directions()
            .iter()
            .map(|v| crate::lattice::clear_denominators(v))
            .collect();
        let sat = crate::lattice::saturation_basis(&dirs);
        let proj_basis: Vec<Vec<Z>> = sat.iter().map(|v| v[1..].to_vec()).collect();
        let idx = crate::lattice::lattice_index(&proj_basis)?;
        out.push(WCell {
            poly: projected,
            mult: &cell.mult * idx,
            sources: vec![cell.source],
        });
    }
    Ok(())
}

/// Merge cells with identical support, summing multiplicities.
pub(crate) fn merge_wcells(cells: Vec<WCell>) -> Vec<WCell> {
    let mut out: Vec<WCell> = Vec::new();
    for c in cells {
        if let Some(e) = out.iter_mut().find(|e| e.poly == c.poly) {
            e.mult += &c.mult;
            for s in c.sources {
                if !e.sources.contains(&s) {
                    e.sources.push(s);
                }
            }
        } else {
            out.push(c);
        }
    }
    out.sort_by(|a, b| a.poly.cmp(&b.poly));
    out
}

/// The tropical dual variety as a weighted complex of dimension `n−1`
/// in the chart `y_0 = 0`.
pub fn dual_complex(graph: &GraphComplex) -> Result<WComplex, Error> {
    let n = graph.n;
    let mut cells: Vec<WCell> = Vec::new();
    for cell in &graph.cells {
        if let Some(eqs) = dual_equations(n, cell) {
            project_incidence(n, cell, &eqs, &mut cells)?;
        }
    }
    Ok(WComplex {
        ambient: n,
        dim: n - 1,
        cells: merge_wcells(cells),
    })
}

/// The tropical tangential variety as a weighted complex of dimension
/// `n−1` in the chart `x_0 = 0`. Requires a curve not contained in a
/// plane; in particular `n ≥ 3`.
pub fn tangential_complex(graph: &GraphComplex) -> Result<WComplex, Error> {
    let n = graph.n;
    if n < 3 {
        return Err(Error::hypothesis(
            "the tangential variety fills the ambient plane: the curve is \
             contained in a plane (this computation requires a curve that \
             is not contained in a plane)",
        ));
    }
    let mut cells: Vec<WCell> = Vec::new();
    for cell in &graph.cells {
        if let Some(eqs) = tau_equations(n, cell) {
            project_incidence(n, cell, &eqs, &mut cells)?;
        }
    }
    if cells.is_empty() {
        return Err(Error::hypothesis(
            "the tangential variety has no cells of the expected dimension: \
             the curve appears to be contained in a plane (this computation \
             requires a curve that is not contained in a plane)",
        ));
    }
    Ok(WComplex {
        ambient: n,
        dim: n - 1,
        cells: merge_wcells(cells),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::intersect_curve;
    use crate::curve::tests::{cubic_system, line_system, p3_system};

    #[test]
    fn branch_mult_pins() {
        let hs = p3_system();
        let curve = intersect_curve(&hs).unwrap();
        let expected = [(vec![qi(0), qi(0), qi(0)], 5), (vec![qi(3), qi(1), qi(2)], 3), (vec![qi(3), qi(0), qi(0)], 5)];
        for (p, m) in expected {
            let vi = curve
                .vertex_index(&crate::hypersurface::TropPoint(p))
                .unwrap();
            let ctx = normalize_cell(&curve, CellRef::Vertex(vi), &hs).unwrap();
            assert_eq!(vertex_branch_mult(&ctx).unwrap(), Z::from(m));
        }
        let hs = cubic_system();
        let curve = intersect_curve(&hs).unwrap();
        let ctx = normalize_cell(&curve, CellRef::Vertex(0), &hs).unwrap();
        assert_eq!(vertex_branch_mult(&ctx).unwrap(), Z::from(2));
    }

    #[test]
    fn graph_complex_p3_shape() {
        let hs = p3_system();
        let curve = intersect_curve(&hs).unwrap();
        let graph = graph_complex(&curve, &hs).unwrap();
        // 7 edge cells (single piece each) + 7 + 3 + 8 vertex branches.
        assert_eq!(graph.cells.len(), 25);
        assert_eq!(graph.pluecker_dim, 6);
    }

    #[test]
    fn gauss_f_vector_p3() {
        let hs = p3_system();
        let curve = intersect_curve(&hs).unwrap();
        let graph = graph_complex(&curve, &hs).unwrap();
        let gauss = gauss_complex(&graph).unwrap();
        assert_eq!(gauss.f_vector(), (6, 5, 20));
        assert!(gauss.is_balanced());
    }

    #[test]
    fn gauss_mults_cubic() {
        let hs = cubic_system();
        let curve = intersect_curve(&hs).unwrap();
        let graph = graph_complex(&curve, &hs).unwrap();
        // 3 edges + 1 vertex branch.
        assert_eq!(graph.cells.len(), 4);
        let gauss = gauss_complex(&graph).unwrap();
        assert_eq!(gauss.cells.len(), 4);
        // Multiplicities by source: E+ ↦ 3, E− ↦ 1, E′ ↦ 4, branch ↦ 2.
        let mult_of = |source: CellRef| -> Z {
            gauss
                .cells
                .iter()
                .find(|c| c.sources == vec![source])
                .unwrap()
                .mult
                .clone()
        };
        let dir_of = |d: &[i64]| -> CellRef {
            let ei = curve.edges.iter().position(|e| e.dir == d).unwrap();
            CellRef::Edge(ei)
        };
        assert_eq!(mult_of(dir_of(&[1, 1])), Z::from(3));
        assert_eq!(mult_of(dir_of(&[-1, 1])), Z::from(1));
        assert_eq!(mult_of(dir_of(&[0, -1])), Z::from(4));
        assert_eq!(mult_of(CellRef::Vertex(0)), Z::from(2));
        assert!(gauss.is_balanced());
    }

    #[test]
    fn gauss_refuses_lines() {
        let hs = line_system();
        let curve = intersect_curve(&hs).unwrap();
        let graph = graph_complex(&curve, &hs).unwrap();
        let err = gauss_complex(&graph).unwrap_err();
        assert!(err.is_hypothesis(), "unexpected error class: {err}");
        assert!(err.to_string().contains("not a line"), "{err}");
    }
}

#[cfg(test)]
mod projection_tests {
    use super::*;
    use crate::curve::intersect_curve;
    use crate::curve::tests::{cubic_system, p3_system};
    use crate::poly::from_gens;
    use crate::rat::qr;

    fn qv(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| qi(x)).collect()
    }

    fn epoly(verts: &[&[i64]], rays: &[&[i64]]) -> Polyhedron {
        let pts: Vec<Vec<Q>> = verts.iter().map(|v| qv(v)).collect();
        let rs: Vec<Vec<Q>> = rays.iter().map(|r| qv(r)).collect();
        from_gens(&pts, &rs).unwrap()
    }

    /// Deterministic points in the relative interior of a cell: convex
    /// combinations of the vertices with positive weights plus strictly
    /// positive ray combinations, for a few generic weight profiles.
    fn rel_interior_samples(p: &Polyhedron) -> Vec<Vec<Q>> {
        let dim = p.ambient();
        let mut out = Vec::new();
        for t in 1..=3i64 {
            let mut x = vec![Q::zero(); dim];
            let mut total = Q::zero();
            for (i, v) in p.verts.iter().enumerate() {
                let w = qr(2 * i as i64 + t, 2 + t);
                for (k, c) in v.iter().enumerate() {
                    x[k] += &w * c;
                }
                total += w;
            }
            for c in &mut x {
                *c /= &total;
            }
            for (j, r) in p.rays.iter().enumerate() {
                let u = qr(3 * j as i64 + 2 * t + 1, 5 + 2 * t);
                for (k, c) in r.iter().enumerate() {
                    x[k] += &u * qi(*c);
                }
            }
            out.push(x);
        }
        out
    }

    fn expected_mult_at(list: &[(Polyhedron, i64)], x: &[Q]) -> Z {
        let mut m = Z::zero();
        for (p, mult) in list {
            if p.contains(x) {
                m += Z::from(*mult);
            }
        }
        m
    }

    const E0: &[i64] = &[-1, -1, -1];
    const E1: &[i64] = &[1, 0, 0];
    const E2: &[i64] = &[0, 1, 0];
    const E3: &[i64] = &[0, 0, 1];
    const UNITS: [&[i64]; 4] = [E0, E1, E2, E3];

    fn quadrants(base: &[i64], skip: Option<(usize, usize)>, mult: i64) -> Vec<(Polyhedron, i64)> {
        let mut out = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                if skip == Some((i, j)) {
                    continue;
                }
                out.push((epoly(&[base], &[UNITS[i], UNITS[j]]), mult));
            }
        }
        out
    }

    /// The weighted top-dimensional cells of the dual of the space-curve
    /// fixture, in the chart (y1, y2, y3) with e0 = -(1,1,1).
    fn expected_dual_p3() -> Vec<(Polyhedron, i64)> {
        let mut t = Vec::new();
        // Vertex contributions: quadrant cones at the negated vertices.
        t.extend(quadrants(&[0, 0, 0], None, 5));
        t.extend(quadrants(&[-3, -1, -2], Some((2, 3)), 3));
        t.extend(quadrants(&[-3, 0, 0], None, 5));
        // Unbounded-edge contributions: negated edge plus one unit ray.
        for (dir, heavy, m) in [
            (&[-3i64, -2, -4] as &[i64], 1usize, 2i64), // from V2
            (&[1, -3, -1], 0, 2),                       // from V1
            (&[2, 4, 3], 3, 2),                         // from V1
        ] {
            let base: &[i64] = if dir == [-3, -2, -4] { &[-3, -1, -2] } else { &[0, 0, 0] };
            for (i, unit) in UNITS.iter().enumerate() {
                t.push((epoly(&[base], &[dir, unit]), if i == heavy { m } else { 1 }));
            }
        }
        // Bounded edge between the negated torus vertices of the curve.
        for unit in UNITS {
            t.push((epoly(&[&[-3, -1, -2], &[0, 0, 0]], &[unit]), 1));
        }
        // Bounded edge inside the coordinate plane y1 = -3.
        for unit in [E0, E1] {
            t.push((epoly(&[&[-3, -1, -2], &[-3, 0, 0]], &[unit]), 1));
        }
        t.push((epoly(&[&[-3, -1, -2], &[-3, 0, 0], &[-3, 3, 3]], &[]), 1));
        t.push((epoly(&[&[-3, -1, -2], &[-3, 3, 3]], &[E2]), 5));
        t.push((epoly(&[&[-3, -1, -2], &[-3, 3, 3]], &[E3]), 4));
        // Unbounded edges inside the coordinate plane y1 = -3.
        t.push((epoly(&[&[-3, 0, 0]], &[&[0, -3, -1], E0]), 1));
        t.push((epoly(&[&[-3, 0, 0]], &[&[0, -3, -1], E1]), 1));
        t.push((epoly(&[&[-3, 0, 0], &[-3, 3, 3]], &[&[0, -3, -1], &[0, -1, 0]]), 2));
        t.push((epoly(&[&[-3, 3, 3]], &[&[0, -1, 0], E3]), 2));
        t.push((epoly(&[&[-3, 0, 0]], &[&[0, 4, 3], E0]), 1));
        t.push((epoly(&[&[-3, 0, 0]], &[&[0, 4, 3], E1]), 1));
        t.push((epoly(&[&[-3, 0, 0], &[-3, 3, 3]], &[&[0, 4, 3], &[0, 6, 5]]), 1));
        t.push((epoly(&[&[-3, 3, 3]], &[E2, &[0, 6, 5]]), 5));
        t.push((epoly(&[&[-3, 3, 3]], &[E3, &[0, 6, 5]]), 6));
        t
    }

    /// The support of the tangential surface of the space-curve fixture.
    fn expected_tau_p3_support() -> Vec<Polyhedron> {
        let mut t = Vec::new();
        // Edge contributions: edge plus one unit ray.
        for unit in UNITS {
            t.push(epoly(&[&[0, 0, 0], &[3, 1, 2]], &[unit]));
            t.push(epoly(&[&[3, 1, 2]], &[&[3, 2, 4], unit]));
            t.push(epoly(&[&[0, 0, 0]], &[&[-1, 3, 1], unit]));
            t.push(epoly(&[&[0, 0, 0]], &[&[-2, -4, -3], unit]));
        }
        // Vertex contributions.
        for q in quadrants(&[3, 3, 3], None, 1) {
            t.push(q.0);
        }
        for q in quadrants(&[3, -3, -3], None, 1) {
            t.push(q.0);
        }
        let neg_e1: &[i64] = &[-1, 0, 0];
        for unit in [E0, E2, E3] {
            t.push(epoly(&[&[3, 1, 2]], &[neg_e1, unit]));
        }
        for unit in [E2, E3] {
            t.push(epoly(&[&[3, 1, 2]], &[E1, unit]));
        }
        // Bounded edge between the two torus vertices of the curve.
        t.push(epoly(&[&[3, 1, 2], &[3, 0, 0], &[3, -3, -3]], &[]));
        t.push(epoly(&[&[3, 0, 0], &[3, 1, 2]], &[E2]));
        t.push(epoly(&[&[3, 0, 0], &[3, 1, 2]], &[E3]));
        t.push(epoly(&[&[3, 1, 2], &[3, -3, -3]], &[E0]));
        t.push(epoly(&[&[3, 1, 2], &[3, -3, -3]], &[E1]));
        // Unbounded edges inside the coordinate plane y1 = 3.
        t.push(epoly(&[&[3, 0, 0]], &[E2, E3]));
        t.push(epoly(&[&[3, 0, 0], &[3, -3, -3]], &[E2]));
        t.push(epoly(&[&[3, -3, -3]], &[E2, E0]));
        t.push(epoly(&[&[3, -3, -3]], &[E2, E1]));
        t.push(epoly(&[&[3, 0, 0]], &[&[0, -4, -3], E2]));
        t.push(epoly(&[&[3, 0, 0]], &[&[0, -4, -3], E3]));
        t.push(epoly(&[&[3, -3, -3]], &[&[0, -6, -5], E0]));
        t.push(epoly(&[&[3, -3, -3]], &[&[0, -6, -5], E1]));
        t
    }

    #[test]
    fn dual_cubic_pinned() {
        let hs = cubic_system();
        let curve = intersect_curve(&hs).unwrap();
        let graph = graph_complex(&curve, &hs).unwrap();
        let dual = dual_complex(&graph).unwrap();
        assert_eq!(dual.cells.len(), 4);
        let origin = vec![qi(0), qi(0)];
        let expect = [
            (vec![-1i64, -1], 3i64),
            (vec![0, 1], 4),
            (vec![1, -1], 1),
            (vec![1, 0], 2),
        ];
        for (ray, mult) in expect {
            let c = dual
                .cells
                .iter()
                .find(|c| c.poly.rays == vec![ray.clone()])
                .unwrap_or_else(|| panic!("missing dual ray {ray:?}"));
            assert_eq!(c.poly.verts, vec![origin.clone()]);
            assert_eq!(c.mult, Z::from(mult));
        }
    }

    #[test]
    fn dual_p3_matches_tables() {
        let hs = p3_system();
        let curve = intersect_curve(&hs).unwrap();
        let graph = graph_complex(&curve, &hs).unwrap();
        let dual = dual_complex(&graph).unwrap();
        let expected = expected_dual_p3();
        // The weighted supports agree pointwise: sample relative-interior
        // points on both sides and compare multiplicity sums.
        for cell in &dual.cells {
            for x in rel_interior_samples(&cell.poly) {
                let want = expected_mult_at(&expected, &x);
                let got = dual.mult_at(&x);
                assert_eq!(got, want, "computed cell sample {x:?} of {:?}", cell.sources);
            }
        }
        for (p, _) in &expected {
            for x in rel_interior_samples(p) {
                let want = expected_mult_at(&expected, &x);
                let got = dual.mult_at(&x);
                assert_eq!(got, want, "table cell sample {x:?}");
            }
        }
    }

    #[test]
    fn tau_p3_matches_support() {
        let hs = p3_system();
        let curve = intersect_curve(&hs).unwrap();
        let graph = graph_complex(&curve, &hs).unwrap();
        let tau = tangential_complex(&graph).unwrap();
        let expected = expected_tau_p3_support();
        for cell in &tau.cells {
            for x in rel_interior_samples(&cell.poly) {
                assert!(
                    expected.iter().any(|p| p.contains(&x)),
                    "computed tangential cell sample {x:?} of {:?} outside the table support",
                    cell.sources
                );
            }
        }
        for p in &expected {
            for x in rel_interior_samples(p) {
                assert!(
                    tau.mult_at(&x) > Z::zero(),
                    "table support sample {x:?} missing from the computed tangential surface"
                );
            }
        }
    }

    #[test]
    fn tau_refuses_plane_curves() {
        let hs = cubic_system();
        let curve = intersect_curve(&hs).unwrap();
        let graph = graph_complex(&curve, &hs).unwrap();
        let err = tangential_complex(&graph).unwrap_err();
        assert!(err.is_hypothesis(), "unexpected error class: {err}");
        assert!(err.to_string().contains("not contained in a plane"), "{err}");
    }

    #[test]
    fn dual_p3_balanced() {
        let hs = p3_system();
        let curve = intersect_curve(&hs).unwrap();
        let graph = graph_complex(&curve, &hs).unwrap();
        let dual = dual_complex(&graph).unwrap();
        let cells: Vec<(Polyhedron, Z)> = dual
            .cells
            .iter()
            .map(|c| (c.poly.clone(), c.mult.clone()))
            .collect();
        assert!(crate::poly::is_balanced_2(&cells).unwrap());
    }

    #[test]
    fn tau_p3_balanced() {
        let hs = p3_system();
        let curve = intersect_curve(&hs).unwrap();
        let graph = graph_complex(&curve, &hs).unwrap();
        let tau = tangential_complex(&graph).unwrap();
        let cells: Vec<(Polyhedron, Z)> = tau
            .cells
            .iter()
            .map(|c| (c.poly.clone(), c.mult.clone()))
            .collect();
        assert!(crate::poly::is_balanced_2(&cells).unwrap());
    }
}
