//! Recovery of the Newton polytope and degree of the dual hypersurface
//! from the weighted dual complex.
//!
//! The weighted recession fan of the dual complex is the codimension-1
//! skeleton of the normal fan of the Newton polytope, with cone weights
//! equal to the lattice lengths of the dual edges. The polytope is
//! recovered (up to translation) by shooting a deterministic generic
//! direction to anchor one vertex and integrating the multiplicity
//! jumps across the fan cones toward probe directions on both sides of
//! every cone; the resulting candidate hull is then *certified* by
//! recomputing its weighted normal-fan skeleton and comparing it
//! pointwise with the input fan. A weighted balanced fan of codimension
//! one determines the polytope uniquely up to translation, so a
//! successful comparison proves the reconstruction correct.

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::complexes::WComplex;
use crate::error::Error;
use crate::lattice::{integer_kernel, primitive};
use crate::linalg::{dot, solve_affine, vadd, vscale, vsub};
use crate::poly::{is_balanced_2, solve_system, AffForm, HSystem, Polyhedron};
use crate::rat::{qi, qr, Q, Z};

/// The Newton polytope of the dual hypersurface.
#[derive(Clone, Debug)]
pub struct LatticePolytope {
    /// Ambient chart dimension `n`.
    pub n: usize,
    /// Common coordinate sum of the homogenized vertices.
    pub degree: Z,
    /// Vertices in the chart `Z^n`, canonically translated so that the
    /// minimum of every coordinate is 0.
    pub chart_vertices: Vec<Vec<Z>>,
    /// Homogenized vertices in `Z^{n+1}` (coordinate 0 first).
    pub vertices: Vec<Vec<Z>>,
    /// Edges as index pairs into `chart_vertices`.
    pub edges: Vec<(usize, usize)>,
    /// Facet inequalities `a·x ≥ b` in the chart.
    pub facets: Vec<(Vec<Z>, Z)>,
}

impl LatticePolytope {
    /// Face counts `(vertices, edges[, facets])` for chart dimension 2
    /// or 3.
    pub fn f_vector(&self) -> Vec<usize> {
        match self.n {
            2 => vec![self.chart_vertices.len(), self.edges.len()],
            _ => vec![
                self.chart_vertices.len(),
                self.edges.len(),
                self.facets.len(),
            ],
        }
    }
}

/// The common coordinate sum of the homogenized vertices.
pub fn degree(p: &LatticePolytope) -> Result<Z, Error> {
    let mut d: Option<Z> = None;
    for v in &p.vertices {
        let s: Z = v.iter().sum();
        match &d {
            None => d = Some(s),
            Some(prev) if *prev == s => {}
            Some(_) => {
                return Err(Error::invalid_input(
                    "polytope vertices do not lie on a common coordinate-sum \
                     hyperplane",
                ))
            }
        }
    }
    d.ok_or_else(|| Error::invalid_input("polytope has no vertices"))
}

// ---------------------------------------------------------------------------
// Recession fan
// ---------------------------------------------------------------------------

/// A full-dimensional cone of the weighted recession fan.
#[derive(Clone, Debug)]
struct RecCone {
    /// `n−1` linearly independent primitive ray generators.
    rays: Vec<Vec<Q>>,
    /// Primitive integer normal of the cone's span.
    normal: Vec<Q>,
    /// Total weight.
    mult: Z,
}

/// Location of a point relative to a simplicial cone spanned by
/// linearly independent rays.
#[derive(PartialEq, Eq, Clone, Copy, Debug)]
enum Loc {
    Outside,
    Boundary,
    Interior,
}

/// Classify `x` against the cone generated by linearly independent
/// `rays` (all exact).
fn locate_in_cone(rays: &[Vec<Q>], x: &[Q]) -> Loc {
    let dim = x.len();
    let a: Vec<Vec<Q>> = (0..dim)
        .map(|c| rays.iter().map(|r| r[c].clone()).collect())
        .collect();
    let Some((lambda, _)) = solve_affine(&a, x) else {
        return Loc::Outside;
    };
    if lambda.iter().any(|l| l.is_negative()) {
        return Loc::Outside;
    }
    if lambda.iter().any(|l| l.is_zero()) {
        return Loc::Boundary;
    }
    Loc::Interior
}

/// Collect the full-dimensional recession cones of the complex,
/// merging cones with identical ray sets.
fn recession_cones(dual: &WComplex) -> Result<Vec<RecCone>, Error> {
    let n = dual.ambient;
    let mut cones: Vec<(Vec<Vec<i64>>, Z)> = Vec::new();
    for cell in &dual.cells {
        if cell.poly.rays.len() != n - 1 {
            continue;
        }
        let rays_q: Vec<Vec<Q>> = cell
            .poly
            .rays
            .iter()
            .map(|r| r.iter().map(|&c| qi(c)).collect())
            .collect();
        if crate::linalg::rank_q(&rays_q) != n - 1 {
            continue;
        }
        let mut rays: Vec<Vec<i64>> = cell
            .poly
            .rays
            .iter()
            .map(|r| primitive(r))
            .collect::<Result<_, _>>()?;
        rays.sort();
        if let Some(e) = cones.iter_mut().find(|(r, _)| *r == rays) {
            e.1 += &cell.mult;
        } else {
            cones.push((rays, cell.mult.clone()));
        }
    }
    if cones.is_empty() {
        return Err(Error::degenerate(
            "the complex has no full-dimensional recession cones",
        ));
    }
    let mut out = Vec::new();
    for (rays, mult) in cones {
        let rows: Vec<Vec<Z>> = rays
            .iter()
            .map(|r| r.iter().map(|&c| Z::from(c)).collect())
            .collect();
        let kernel = integer_kernel(&rows);
        if kernel.len() != 1 {
            return Err(Error::inconsistency(
                "recession cone span has no unique normal",
            ));
        }
        out.push(RecCone {
            rays: rays
                .iter()
                .map(|r| r.iter().map(|&c| qi(c)).collect())
                .collect(),
            normal: kernel[0].iter().map(|c| Q::from_integer(c.clone())).collect(),
            mult,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Balance check of the input complex
// ---------------------------------------------------------------------------

/// Balance test for a one-dimensional weighted complex: at every cell
/// endpoint, the weighted primitive outgoing directions of the cells
/// having that endpoint as a vertex sum to zero. (Cells passing
/// through the point contribute both directions and cancel.)
pub(crate) fn balanced_1(dual: &WComplex) -> Result<bool, Error> {
    let mut points: Vec<Vec<Q>> = Vec::new();
    for cell in &dual.cells {
        for v in &cell.poly.verts {
            if !points.contains(v) {
                points.push(v.clone());
            }
        }
    }
    for p in &points {
        let mut sum = vec![Q::zero(); dual.ambient];
        for cell in &dual.cells {
            if !cell.poly.verts.contains(p) {
                continue;
            }
            let m = Q::from_integer(cell.mult.clone());
            for v in &cell.poly.verts {
                if v == p {
                    continue;
                }
                let d = crate::lattice::primitive_q(&vsub(v, p))?;
                for (s, &di) in sum.iter_mut().zip(&d) {
                    *s += qi(di) * &m;
                }
            }
            for r in &cell.poly.rays {
                for (s, &ri) in sum.iter_mut().zip(r) {
                    *s += qi(ri) * &m;
                }
            }
        }
        if sum.iter().any(|s| !s.is_zero()) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_balance(dual: &WComplex) -> Result<(), Error> {
    let ok = match dual.dim {
        1 => balanced_1(dual)?,
        2 => {
            let cells: Vec<(Polyhedron, Z)> = dual
                .cells
                .iter()
                .map(|c| (c.poly.clone(), c.mult.clone()))
                .collect();
            is_balanced_2(&cells)?
        }
        d => {
            return Err(Error::not_applicable(format!(
                "balance checking of {d}-dimensional complexes is not supported"
            )))
        }
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Unbalanced(
            "the input complex violates the balancing condition; the facet \
             walk cannot close up"
                .into(),
        ))
    }
}

// ---------------------------------------------------------------------------
// Vertex reconstruction
// ---------------------------------------------------------------------------

/// A probe failed for a removable reason (the segment or the point hit
/// a lower-dimensional stratum); the caller retries with different
/// deterministic data.
struct ProbeDegenerate;

/// The vertex difference `v(z) − v(w0)`: sum of the multiplicity jumps
/// across the fan cones crossed by the open segment `(w0, z)`.
fn vertex_offset(
    w0: &[Q],
    z: &[Q],
    cones: &[RecCone],
) -> Result<Vec<Z>, ProbeDegenerate> {
    let n = w0.len();
    let d = vsub(z, w0);
    let mut offset = vec![Z::zero(); n];
    for cone in cones {
        let at_w0 = dot(&cone.normal, w0);
        let at_z = dot(&cone.normal, z);
        let den = &at_w0 - &at_z;
        if den.is_zero() {
            if at_w0.is_zero() {
                // Segment inside the cone's span: retry.
                return Err(ProbeDegenerate);
            }
            continue;
        }
        let t = &at_w0 / &den;
        if !t.is_positive() || t >= Q::from_integer(1.into()) {
            continue;
        }
        let p = vadd(w0, &vscale(&t, &d));
        match locate_in_cone(&cone.rays, &p) {
            Loc::Outside => continue,
            Loc::Boundary => return Err(ProbeDegenerate),
            Loc::Interior => {}
        }
        // Jump −m·u with u the primitive normal oriented along the
        // direction of travel (min-plus argmin exchange).
        let towards = dot(&cone.normal, &d);
        debug_assert!(!towards.is_zero());
        let sign = if towards.is_positive() { 1 } else { -1 };
        for (o, u) in offset.iter_mut().zip(&cone.normal) {
            *o -= &cone.mult * Z::from(sign) * u.to_integer();
        }
    }
    Ok(offset)
}

/// A deterministic direction off every cone's span.
fn generic_direction(n: usize, cones: &[RecCone]) -> Result<Vec<Q>, Error> {
    let mut m: i64 = 1009;
    for _ in 0..24 {
        let mut w = Vec::with_capacity(n);
        let mut acc: i64 = 1;
        for _ in 0..n {
            w.push(qi(acc));
            acc = acc.checked_mul(m).ok_or_else(|| {
                Error::inconsistency("generic direction search overflowed")
            })?;
        }
        if cones.iter().all(|c| !dot(&c.normal, &w).is_zero()) {
            return Ok(w);
        }
        m += 2;
    }
    Err(Error::inconsistency(
        "no generic base direction found off the fan cones",
    ))
}

/// Probe sectors `(a, b, normal)`: for every minimal covered sector of
/// the fan, an interior point of the sector is a positive combination
/// of `a` and `b`, and `normal` spans the orthogonal direction.
///
/// Dual edges of the polytope correspond to maximal regions of
/// constant total weight inside the planes spanned by the cones; one
/// input cone can straddle several of them. Splitting each plane's
/// cones along *all* boundary rays present in that plane yields
/// minimal sectors, each contained in a single such region, so probing
/// every covered minimal sector reaches every dual edge.
fn probe_sectors(n: usize, cones: &[RecCone]) -> Result<Vec<(Vec<Q>, Vec<Q>, Vec<Q>)>, Error> {
    if n == 2 {
        // Cones are rays and coincide with the wall pieces.
        return Ok(cones
            .iter()
            .map(|c| (c.rays[0].clone(), c.rays[0].clone(), c.normal.clone()))
            .collect());
    }
    // Group cones by plane (primitive normal up to sign).
    let mut groups: Vec<(Vec<Q>, Vec<usize>)> = Vec::new();
    for (ci, cone) in cones.iter().enumerate() {
        let mut normal = cone.normal.clone();
        if let Some(first) = normal.iter().find(|x| !x.is_zero()) {
            if first.is_negative() {
                normal = vscale(&qi(-1), &normal);
            }
        }
        if let Some(g) = groups.iter_mut().find(|(u, _)| *u == normal) {
            g.1.push(ci);
        } else {
            groups.push((normal, vec![ci]));
        }
    }
    let mut out = Vec::new();
    for (normal, members) in &groups {
        // 2D coordinates within the plane, in the basis of the first
        // cone's rays.
        let basis = &cones[members[0]].rays;
        let a_mat: Vec<Vec<Q>> = (0..n)
            .map(|c| basis.iter().map(|r| r[c].clone()).collect())
            .collect();
        let mut dirs2: Vec<Vec<Z>> = Vec::new();
        let mut dirs_ambient: Vec<Vec<Q>> = Vec::new();
        for &ci in members {
            for r in &cones[ci].rays {
                let (coords, _) = solve_affine(&a_mat, r).ok_or_else(|| {
                    Error::inconsistency("coplanar cones disagree on their plane")
                })?;
                let d2 = crate::lattice::primitive_q(&coords)?;
                let d2: Vec<Z> = d2.iter().map(|&c| Z::from(c)).collect();
                if !dirs2.contains(&d2) {
                    dirs2.push(d2);
                    dirs_ambient.push(r.clone());
                }
            }
        }
        // Wall boundaries inside this plane need not be rays of the
        // cones lying in it: one cell's recession cone can straddle
        // two polytope edges with parallel edge directions. Every wall
        // boundary ray lies in at least one further cone plane, so
        // splitting along the intersection lines with all other planes
        // isolates each wall.
        for (other, _) in &groups {
            if other == normal {
                continue;
            }
            let d = vec![
                &normal[1] * &other[2] - &normal[2] * &other[1],
                &normal[2] * &other[0] - &normal[0] * &other[2],
                &normal[0] * &other[1] - &normal[1] * &other[0],
            ];
            if d.iter().all(|c| c.is_zero()) {
                continue;
            }
            let (coords, _) = solve_affine(&a_mat, &d).ok_or_else(|| {
                Error::inconsistency("a plane intersection line left its plane")
            })?;
            let base = crate::lattice::primitive_q(&coords)?;
            for sign in [1i64, -1] {
                let d2: Vec<Z> = base.iter().map(|&c| Z::from(sign * c)).collect();
                if dirs2.contains(&d2) {
                    continue;
                }
                let mut amb = vec![Q::zero(); n];
                for (r, c) in basis.iter().zip(&d2) {
                    amb = vadd(&amb, &vscale(&Q::from_integer(c.clone()), r));
                }
                dirs2.push(d2);
                dirs_ambient.push(amb);
            }
        }
        // Sort directions by angle (exact: half-plane, then cross
        // product).
        let upper = |d: &Vec<Z>| d[1].is_positive() || (d[1].is_zero() && d[0].is_positive());
        let cross = |a: &Vec<Z>, b: &Vec<Z>| &a[0] * &b[1] - &a[1] * &b[0];
        let mut order: Vec<usize> = (0..dirs2.len()).collect();
        order.sort_by(|&i, &j| {
            let (a, b) = (&dirs2[i], &dirs2[j]);
            match (upper(a), upper(b)) {
                (true, false) => std::cmp::Ordering::Less,
                (false, true) => std::cmp::Ordering::Greater,
                _ => Z::zero().cmp(&cross(a, b)),
            }
        });
        for k in 0..order.len() {
            let i = order[k];
            let j = order[(k + 1) % order.len()];
            if !cross(&dirs2[i], &dirs2[j]).is_positive() {
                continue; // sector of angle ≥ π: cannot be covered
            }
            let mid2: Vec<Z> = vec![&dirs2[i][0] + &dirs2[j][0], &dirs2[i][1] + &dirs2[j][1]];
            let mid: Vec<Q> = {
                let mut y = vec![Q::zero(); n];
                for (r, c) in basis.iter().zip(&mid2) {
                    y = vadd(&y, &vscale(&Q::from_integer(c.clone()), r));
                }
                y
            };
            let covered = members
                .iter()
                .any(|&ci| locate_in_cone(&cones[ci].rays, &mid) == Loc::Interior);
            if covered {
                out.push((
                    dirs_ambient[i].clone(),
                    dirs_ambient[j].clone(),
                    normal.clone(),
                ));
            }
        }
    }
    Ok(out)
}

/// Half the distance from `y` to the first wall met strictly along
/// direction `s`, or 1 when no wall is met. Stepping by this amount
/// from a point on a wall is guaranteed to stay inside the open region
/// (a single vertex normal cone) adjacent to that wall.
fn safe_step(y: &[Q], s: &[Q], cones: &[RecCone]) -> Q {
    let mut t_min: Option<Q> = None;
    for cone in cones {
        let den = dot(&cone.normal, s);
        if den.is_zero() {
            continue;
        }
        let t = -dot(&cone.normal, y) / den;
        if !t.is_positive() {
            continue;
        }
        let p = vadd(y, &vscale(&t, s));
        if locate_in_cone(&cone.rays, &p) != Loc::Outside
            && t_min.as_ref().is_none_or(|m| &t < m)
        {
            t_min = Some(t);
        }
    }
    match t_min {
        Some(t) => t / qi(2),
        None => Q::from_integer(1.into()),
    }
}

/// Whether `z` lies on some wall of the fan.
fn on_wall(z: &[Q], cones: &[RecCone]) -> bool {
    cones.iter().any(|c| {
        dot(&c.normal, z).is_zero() && locate_in_cone(&c.rays, z) != Loc::Outside
    })
}

/// Candidate vertex offsets from probes on both sides of every
/// minimal covered sector of the fan.
fn candidate_vertices(
    n: usize,
    cones: &[RecCone],
    w0: &[Q],
) -> Result<Vec<Vec<Z>>, Error> {
    let mut cands: Vec<Vec<Z>> = vec![vec![Z::zero(); n]];
    for (ray_a, ray_b, normal) in probe_sectors(n, cones)? {
        let normal_neg = vscale(&qi(-1), &normal);
        let mut done = false;
        'attempt: for attempt in 0..8i64 {
            let wa = qr(attempt + 1, attempt + 2);
            let wb = qr(2 * attempt + 3, attempt + 3);
            let y = vadd(&vscale(&wa, &ray_a), &vscale(&wb, &ray_b));
            let z_plus = vadd(&y, &vscale(&safe_step(&y, &normal, cones), &normal));
            let z_minus =
                vadd(&y, &vscale(&safe_step(&y, &normal_neg, cones), &normal_neg));
            if on_wall(&z_plus, cones) || on_wall(&z_minus, cones) {
                continue 'attempt;
            }
            let (Ok(v_plus), Ok(v_minus)) = (
                vertex_offset(w0, &z_plus, cones),
                vertex_offset(w0, &z_minus, cones),
            ) else {
                continue 'attempt;
            };
            for v in [v_plus, v_minus] {
                if !cands.contains(&v) {
                    cands.push(v);
                }
            }
            done = true;
            break 'attempt;
        }
        if !done {
            return Err(Error::inconsistency(
                "no generic probe found near a recession cone",
            ));
        }
    }
    Ok(cands)
}

// ---------------------------------------------------------------------------
// Hull structure and certification
// ---------------------------------------------------------------------------

fn as_q(v: &[Z]) -> Vec<Q> {
    v.iter().map(|c| Q::from_integer(c.clone())).collect()
}

/// The normal cone of the face where `sel` minimizes `⟨·, x⟩` over the
/// candidate set (min-plus convention).
fn normal_cone(
    cands: &[Vec<Z>],
    sel: &[usize],
) -> Result<Option<Polyhedron>, Error> {
    let n = cands[0].len();
    let v0 = as_q(&cands[sel[0]]);
    let mut sys = HSystem {
        dim: n,
        eqs: Vec::new(),
        ineqs: Vec::new(),
    };
    for &s in &sel[1..] {
        sys.eqs
            .push(AffForm::new(vsub(&as_q(&cands[s]), &v0), Q::zero()));
    }
    for (i, u) in cands.iter().enumerate() {
        if sel.contains(&i) {
            continue;
        }
        sys.ineqs
            .push(AffForm::new(vsub(&as_q(u), &v0), Q::zero()));
    }
    solve_system(&sys)
}

/// Lattice length (content) of an integer vector.
fn content(v: &[Z]) -> Z {
    let mut g = Z::zero();
    for c in v {
        g = g.gcd(c);
    }
    g
}

/// Certify that the weighted normal-fan skeleton of the hull equals
/// the input recession fan, comparing total weights at deterministic
/// generic points of every cone on both sides.
fn certify(
    cones: &[RecCone],
    edge_cones: &[(Polyhedron, Z)],
) -> Result<(), Error> {
    let weight_mismatch = || {
        Error::inconsistency(
            "the reconstructed polytope's recession data does not match the \
             input complex (facet walk failed to close)",
        )
    };
    // Weight of the input fan / the hull skeleton at a generic point.
    let weigh = |sets: &[(Vec<Vec<Q>>, &Z)], x: &[Q]| -> Result<Z, ProbeDegenerate> {
        let mut total = Z::zero();
        for (rays, m) in sets {
            match locate_in_cone(rays, x) {
                Loc::Outside => {}
                Loc::Boundary => return Err(ProbeDegenerate),
                Loc::Interior => total += *m,
            }
        }
        Ok(total)
    };
    let cone_sets: Vec<(Vec<Vec<Q>>, &Z)> = cones
        .iter()
        .map(|c| (c.rays.clone(), &c.mult))
        .collect();
    let edge_sets: Vec<(Vec<Vec<Q>>, &Z)> = edge_cones
        .iter()
        .map(|(p, m)| {
            let rays: Vec<Vec<Q>> = p
                .rays
                .iter()
                .map(|r| r.iter().map(|&c| qi(c)).collect())
                .collect();
            (rays, m)
        })
        .collect();
    // Both directions: every input cone must be covered with the right
    // total, and every hull edge cone must carry the input weight.
    for (rays, _) in cone_sets.iter().chain(edge_sets.iter()) {
        let mut done = false;
        for attempt in 0..12i64 {
            let weights: Vec<Q> = (0..rays.len() as i64)
                .map(|i| qr(3 * i + attempt + 1, 2 * attempt + 3))
                .collect();
            let mut y = vec![Q::zero(); rays[0].len()];
            for (r, w) in rays.iter().zip(&weights) {
                y = vadd(&y, &vscale(w, r));
            }
            let (Ok(win), Ok(whull)) = (weigh(&cone_sets, &y), weigh(&edge_sets, &y))
            else {
                continue;
            };
            if win != whull {
                return Err(weight_mismatch());
            }
            done = true;
            break;
        }
        if !done {
            return Err(Error::inconsistency(
                "no generic certification point found in a fan cone",
            ));
        }
    }
    Ok(())
}

/// Facet inequalities `a·x ≥ b` of the full-dimensional hull of the
/// chart vertices, by enumeration of supporting hyperplanes through
/// `n` affinely independent vertices.
fn facet_inequalities(verts: &[Vec<Z>], n: usize) -> Result<Vec<(Vec<Z>, Z)>, Error> {
    let mut out: Vec<(Vec<Z>, Z)> = Vec::new();
    for sel in crate::lattice::subsets(verts.len(), n) {
        let base = &verts[sel[0]];
        let diffs: Vec<Vec<Z>> = sel[1..]
            .iter()
            .map(|&i| verts[i].iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        let kernel = integer_kernel(&diffs);
        if kernel.len() != 1 {
            continue; // affinely dependent selection
        }
        let mut a = kernel[0].clone();
        let mut b: Z = a.iter().zip(base).map(|(x, y)| x * y).sum();
        let mut lower = false;
        let mut upper = false;
        for v in verts {
            let s: Z = a.iter().zip(v).map(|(x, y)| x * y).sum();
            if s < b {
                lower = true;
            }
            if s > b {
                upper = true;
            }
        }
        if lower && upper {
            continue; // not supporting
        }
        if lower {
            a = a.iter().map(|c| -c).collect();
            b = -b;
        }
        if !out.contains(&(a.clone(), b.clone())) {
            out.push((a, b));
        }
    }
    Ok(out)
}

/// Recover the Newton polytope from the weighted dual complex.
pub fn newton_polytope(dual: &WComplex) -> Result<LatticePolytope, Error> {
    let n = dual.ambient;
    if dual.dim + 1 != n {
        return Err(Error::invalid_input(
            "newton_polytope expects a complex of codimension one",
        ));
    }
    check_balance(dual)?;
    let cones = recession_cones(dual)?;
    let w0 = generic_direction(n, &cones)?;
    let cands = candidate_vertices(n, &cones, &w0)?;

    // Keep candidates whose normal cone is full-dimensional.
    let full_dim_err = |e: Error| match e {
        Error::InvalidInput(_) | Error::Inconsistency(_) => e,
        _ => Error::degenerate("the dual polytope is not full-dimensional"),
    };
    let mut verts: Vec<Vec<Z>> = Vec::new();
    for (i, _) in cands.iter().enumerate() {
        if let Some(p) = normal_cone(&cands, &[i]).map_err(full_dim_err)? {
            if p.dim() == n {
                verts.push(cands[i].clone());
            }
        }
    }
    if verts.len() < n + 1 {
        return Err(Error::degenerate(
            "the dual polytope is not full-dimensional",
        ));
    }

    // Edges and their normal cones.
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut edge_cones: Vec<(Polyhedron, Z)> = Vec::new();
    for i in 0..verts.len() {
        for j in i + 1..verts.len() {
            if let Some(p) = normal_cone(&verts, &[i, j]).map_err(full_dim_err)? {
                if p.dim() == n - 1 {
                    let e: Vec<Z> = verts[j]
                        .iter()
                        .zip(&verts[i])
                        .map(|(a, b)| a - b)
                        .collect();
                    edges.push((i, j));
                    edge_cones.push((p, content(&e)));
                }
            }
        }
    }
    certify(&cones, &edge_cones)?;

    // Canonical translation: minimum of every chart coordinate is 0.
    let mins: Vec<Z> = (0..n)
        .map(|c| verts.iter().map(|v| v[c].clone()).min().expect("nonempty"))
        .collect();
    let mut chart_vertices: Vec<Vec<Z>> = verts
        .iter()
        .map(|v| v.iter().zip(&mins).map(|(x, m)| x - m).collect())
        .collect();
    // Sort vertices canonically, remapping the edge indices.
    let mut order: Vec<usize> = (0..chart_vertices.len()).collect();
    order.sort_by(|&a, &b| chart_vertices[a].cmp(&chart_vertices[b]));
    let rank: Vec<usize> = {
        let mut r = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            r[old] = new;
        }
        r
    };
    chart_vertices = order.iter().map(|&i| chart_vertices[i].clone()).collect();
    let mut edges: Vec<(usize, usize)> = edges
        .into_iter()
        .map(|(a, b)| {
            let (a, b) = (rank[a], rank[b]);
            if a < b { (a, b) } else { (b, a) }
        })
        .collect();
    edges.sort();

    // Homogenize: coordinate 0 makes every coordinate sum equal.
    let deg: Z = chart_vertices
        .iter()
        .map(|v| v.iter().sum::<Z>())
        .max()
        .expect("nonempty");
    let vertices: Vec<Vec<Z>> = chart_vertices
        .iter()
        .map(|v| {
            let mut h = Vec::with_capacity(n + 1);
            h.push(&deg - v.iter().sum::<Z>());
            h.extend(v.iter().cloned());
            h
        })
        .collect();
    let facets = facet_inequalities(&chart_vertices, n)?;
    Ok(LatticePolytope {
        n,
        degree: deg,
        chart_vertices,
        vertices,
        edges,
        facets,
    })
}

/// Exact enumeration of the lattice points of the chart polytope
/// (bounding-box scan with facet tests).
pub fn lattice_points(p: &LatticePolytope) -> Vec<Vec<Z>> {
    let n = p.n;
    let lo: Vec<i64> = vec![0; n];
    let hi: Vec<i64> = (0..n)
        .map(|c| {
            p.chart_vertices
                .iter()
                .map(|v| i64::try_from(&v[c]).expect("vertex fits in i64"))
                .max()
                .expect("nonempty")
        })
        .collect();
    let mut out = Vec::new();
    let mut x: Vec<i64> = lo.clone();
    loop {
        let xz: Vec<Z> = x.iter().map(|&c| Z::from(c)).collect();
        let inside = p.facets.iter().all(|(a, b)| {
            let s: Z = a.iter().zip(&xz).map(|(ai, xi)| ai * xi).sum();
            s >= *b
        });
        if inside {
            out.push(xz);
        }
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            x[k] += 1;
            if x[k] <= hi[k] {
                break;
            }
            x[k] = lo[k];
        }
    }
}
