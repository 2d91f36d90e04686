//! Exact rational polyhedra of small dimension.
//!
//! Everything here is exact arithmetic over `Q`: conversion from
//! half-space descriptions to minimal vertex/ray descriptions (by
//! enumerating tight constraint subsets of a pointed homogenization
//! cone), feasibility of mixed strict/non-strict linear systems via
//! Fourier–Motzkin elimination, membership and tangent-direction tests,
//! edge enumeration for two-dimensional cells, and the balancing test
//! for weighted two-dimensional complexes.

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::Error;
use crate::lattice::{clear_denominators, primitive_q, saturation_basis, subsets};
use crate::linalg::{dot, nullspace_q, rank_q, solve_affine, vadd, vscale, vsub};
use crate::rat::{Q, Z};

/// Affine form `x ↦ coeffs·x + cst`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffForm {
    pub coeffs: Vec<Q>,
    pub cst: Q,
}

impl AffForm {
    pub fn new(coeffs: Vec<Q>, cst: Q) -> Self {
        AffForm { coeffs, cst }
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        dot(&self.coeffs, x) + &self.cst
    }

    pub fn sub(&self, other: &AffForm) -> AffForm {
        AffForm {
            coeffs: vsub(&self.coeffs, &other.coeffs),
            cst: &self.cst - &other.cst,
        }
    }
}

/// A system `eqs = 0`, `ineqs ≥ 0` over `R^dim`.
#[derive(Clone, Debug, Default)]
pub struct HSystem {
    pub dim: usize,
    pub eqs: Vec<AffForm>,
    pub ineqs: Vec<AffForm>,
}

/// A polyhedron in minimal V-representation: the convex hull of
/// `verts` plus the cone over the primitive integer `rays`. Both lists
/// are sorted, so equal polyhedra compare equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Polyhedron {
    pub verts: Vec<Vec<Q>>,
    pub rays: Vec<Vec<i64>>,
}

impl Polyhedron {
    pub fn ambient(&self) -> usize {
        self.verts[0].len()
    }

    /// Rational spanning set of the direction space `lin(P)`.
    pub fn directions(&self) -> Vec<Vec<Q>> {
        let mut dirs: Vec<Vec<Q>> = self
            .verts
            .iter()
            .skip(1)
            .map(|v| vsub(v, &self.verts[0]))
            .collect();
        for r in &self.rays {
            dirs.push(r.iter().map(|&x| Q::from_integer(x.into())).collect());
        }
        dirs
    }

    /// Dimension of the polyhedron.
    pub fn dim(&self) -> usize {
        rank_q(&self.directions())
    }

    /// A point in the relative interior.
    pub fn interior_point(&self) -> Vec<Q> {
        let mut p = vec![Q::zero(); self.ambient()];
        let k = Q::from_integer(self.verts.len().into());
        for v in &self.verts {
            p = vadd(&p, &vscale(&(Q::new(1.into(), 1.into()) / &k), v));
        }
        // Push slightly along each ray with distinct weights so the
        // point leaves every proper face.
        for (i, r) in self.rays.iter().enumerate() {
            let w = Q::new(1.into(), (3 + 2 * i as i64).into());
            let rq: Vec<Q> = r.iter().map(|&x| Q::from_integer(x.into())).collect();
            p = vadd(&p, &vscale(&w, &rq));
        }
        p
    }
}

// ---------------------------------------------------------------------------
// Fourier–Motzkin feasibility
// ---------------------------------------------------------------------------

/// One inequality row: `coeffs·x + cst ≥ 0`, or `> 0` when `strict`.
type FmRow = (Vec<Q>, Q, bool);

fn fm_normalize(mut row: FmRow) -> FmRow {
    // Scale by a positive rational so the first nonzero entry is ±1.
    let lead = row
        .0
        .iter()
        .find(|c| !c.is_zero())
        .cloned()
        .unwrap_or_else(|| row.1.clone());
    if !lead.is_zero() {
        let scale = lead.abs().recip();
        for c in &mut row.0 {
            *c *= &scale;
        }
        row.1 *= &scale;
    }
    row
}

/// Feasibility of a system of mixed strict and non-strict inequalities
/// by Fourier–Motzkin elimination.
pub fn fm_feasible(dim: usize, rows: &[FmRow]) -> bool {
    let mut rows: Vec<FmRow> = rows.iter().cloned().map(fm_normalize).collect();
    rows.sort();
    rows.dedup();
    for var in 0..dim {
        let (mut pos, mut neg, mut rest): (Vec<FmRow>, Vec<FmRow>, Vec<FmRow>) =
            (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            if r.0[var].is_positive() {
                pos.push(r);
            } else if r.0[var].is_negative() {
                neg.push(r);
            } else {
                rest.push(r);
            }
        }
        for p in &pos {
            for n in &neg {
                // a·p_row + (−b)·n_row with a = n-coeff magnitude etc.
                let a = n.0[var].abs();
                let b = p.0[var].clone();
                let coeffs: Vec<Q> = p
                    .0
                    .iter()
                    .zip(&n.0)
                    .map(|(pc, nc)| pc * &a + nc * &b)
                    .collect();
                let cst = &p.1 * &a + &n.1 * &b;
                rest.push(fm_normalize((coeffs, cst, p.2 || n.2)));
            }
        }
        rest.sort();
        rest.dedup();
        rows = rest;
    }
    rows.iter().all(|(_, cst, strict)| {
        if *strict {
            cst.is_positive()
        } else {
            !cst.is_negative()
        }
    })
}

/// Feasibility of `eqs = 0` together with mixed inequalities: the
/// equalities are eliminated exactly first, then Fourier–Motzkin runs
/// on the reduced system.
pub fn feasible(dim: usize, eqs: &[AffForm], ineqs: &[(AffForm, bool)]) -> bool {
    let a: Vec<Vec<Q>> = eqs.iter().map(|f| f.coeffs.clone()).collect();
    let b: Vec<Q> = eqs.iter().map(|f| -&f.cst).collect();
    let (x0, basis) = if eqs.is_empty() {
        (
            vec![Q::zero(); dim],
            (0..dim)
                .map(|i| {
                    let mut e = vec![Q::zero(); dim];
                    e[i] = Q::new(1.into(), 1.into());
                    e
                })
                .collect::<Vec<_>>(),
        )
    } else {
        match solve_affine(&a, &b) {
            Some(s) => s,
            None => return false,
        }
    };
    let rows: Vec<FmRow> = ineqs
        .iter()
        .map(|(f, strict)| {
            let coeffs: Vec<Q> = basis.iter().map(|n| dot(&f.coeffs, n)).collect();
            (coeffs, f.eval(&x0), *strict)
        })
        .collect();
    fm_feasible(basis.len(), &rows)
}

// ---------------------------------------------------------------------------
// H-representation to minimal V-representation
// ---------------------------------------------------------------------------

/// Solve an `HSystem` into a minimal V-representation; `None` when
/// the solution set is empty. Fails on polyhedra with a lineality
/// space (these do not occur for the complexes computed here).
pub fn solve_system(sys: &HSystem) -> Result<Option<Polyhedron>, Error> {
    let a: Vec<Vec<Q>> = sys.eqs.iter().map(|f| f.coeffs.clone()).collect();
    let b: Vec<Q> = sys.eqs.iter().map(|f| -&f.cst).collect();
    let (x0, basis) = if sys.eqs.is_empty() {
        (
            vec![Q::zero(); sys.dim],
            (0..sys.dim)
                .map(|i| {
                    let mut e = vec![Q::zero(); sys.dim];
                    e[i] = Q::new(1.into(), 1.into());
                    e
                })
                .collect::<Vec<_>>(),
        )
    } else {
        match solve_affine(&a, &b) {
            Some(s) => s,
            None => return Ok(None),
        }
    };
    let k = basis.len();
    if k == 0 {
        if sys.ineqs.iter().all(|f| !f.eval(&x0).is_negative()) {
            return Ok(Some(Polyhedron {
                verts: vec![x0],
                rays: vec![],
            }));
        }
        return Ok(None);
    }

    // Homogenization cone in R^{k+1}: rows (c', d') with
    // c'·z + d'·t ≥ 0; last coordinate is t, constrained t ≥ 0.
    let mut hrows: Vec<Vec<Q>> = sys
        .ineqs
        .iter()
        .map(|f| {
            let mut row: Vec<Q> = basis.iter().map(|n| dot(&f.coeffs, n)).collect();
            row.push(f.eval(&x0));
            row
        })
        .collect();
    let mut t_row = vec![Q::zero(); k + 1];
    t_row[k] = Q::new(1.into(), 1.into());
    hrows.push(t_row);
    hrows.sort();
    hrows.dedup();

    // Lineality check: the cone must be pointed.
    if !nullspace_q(&hrows).is_empty() {
        return Err(Error::inconsistency(
            "solution polyhedron has a lineality space",
        ));
    }

    // Extreme rays: one-dimensional kernels of (k)-subsets of rows,
    // kept when feasible for every row.
    let d = k + 1;
    let mut gens: Vec<Vec<Q>> = Vec::new();
    for idx in subsets(hrows.len(), d - 1) {
        let sub: Vec<Vec<Q>> = idx.iter().map(|&i| hrows[i].clone()).collect();
        let kernel = nullspace_q(&sub);
        if kernel.len() != 1 {
            continue;
        }
        let mut r = kernel.into_iter().next().unwrap();
        let sign_ok = |r: &[Q]| hrows.iter().all(|row| !dot(row, r).is_negative());
        if !sign_ok(&r) {
            r = vscale(&-Q::new(1.into(), 1.into()), &r);
            if !sign_ok(&r) {
                continue;
            }
        }
        let prim = primitive_q(&r)?;
        let rq: Vec<Q> = prim.iter().map(|&x| Q::from_integer(x.into())).collect();
        if !gens.contains(&rq) {
            gens.push(rq);
        }
    }

    let mut verts: Vec<Vec<Q>> = Vec::new();
    let mut rays: Vec<Vec<i64>> = Vec::new();
    for g in gens {
        let t = &g[k];
        if t.is_zero() {
            // Recession direction: lift to ambient coordinates.
            let mut dir = vec![Q::zero(); sys.dim];
            for (c, n) in g[..k].iter().zip(&basis) {
                dir = vadd(&dir, &vscale(c, n));
            }
            rays.push(primitive_q(&dir)?);
        } else {
            let mut v = x0.clone();
            for (c, n) in g[..k].iter().zip(&basis) {
                v = vadd(&v, &vscale(&(c / t), n));
            }
            verts.push(v);
        }
    }
    if verts.is_empty() {
        return Ok(None);
    }
    verts.sort();
    verts.dedup();
    rays.sort();
    rays.dedup();
    Ok(Some(Polyhedron { verts, rays }))
}

// ---------------------------------------------------------------------------
// Membership and minimalization from generators
// ---------------------------------------------------------------------------

/// Build the feasibility system for `x + ε·d ∈ conv(verts) + cone(rays)`
/// over variables `(λ, μ, ε)` and test it. `d = None` tests plain
/// membership (ε fixed to zero).
fn membership_feasible(
    verts: &[Vec<Q>],
    rays: &[Vec<Q>],
    x: &[Q],
    d: Option<&[Q]>,
) -> bool {
    let n = x.len();
    let nv = verts.len();
    let nr = rays.len();
    let with_eps = d.is_some();
    let dim = nv + nr + usize::from(with_eps);
    let mut eqs: Vec<AffForm> = Vec::new();
    for c in 0..n {
        let mut coeffs = vec![Q::zero(); dim];
        for (i, v) in verts.iter().enumerate() {
            coeffs[i] = v[c].clone();
        }
        for (j, r) in rays.iter().enumerate() {
            coeffs[nv + j] = r[c].clone();
        }
        if let Some(d) = d {
            coeffs[nv + nr] = -&d[c];
        }
        eqs.push(AffForm::new(coeffs, -&x[c]));
    }
    // Σλ = 1.
    let mut coeffs = vec![Q::zero(); dim];
    for c in coeffs.iter_mut().take(nv) {
        *c = Q::new(1.into(), 1.into());
    }
    eqs.push(AffForm::new(coeffs, -Q::new(1.into(), 1.into())));
    let mut ineqs: Vec<(AffForm, bool)> = Vec::new();
    for i in 0..dim {
        let mut coeffs = vec![Q::zero(); dim];
        coeffs[i] = Q::new(1.into(), 1.into());
        let strict = with_eps && i == dim - 1;
        ineqs.push((AffForm::new(coeffs, Q::zero()), strict));
    }
    feasible(dim, &eqs, &ineqs)
}

impl Polyhedron {
    /// Whether the polyhedron contains the point.
    pub fn contains(&self, x: &[Q]) -> bool {
        let rays: Vec<Vec<Q>> = self
            .rays
            .iter()
            .map(|r| r.iter().map(|&c| Q::from_integer(c.into())).collect())
            .collect();
        membership_feasible(&self.verts, &rays, x, None)
    }

    /// Whether `x + ε·d` stays inside for some small `ε > 0`
    /// (assumes `x ∈ P`).
    pub fn direction_feasible(&self, x: &[Q], d: &[Q]) -> bool {
        let rays: Vec<Vec<Q>> = self
            .rays
            .iter()
            .map(|r| r.iter().map(|&c| Q::from_integer(c.into())).collect())
            .collect();
        membership_feasible(&self.verts, &rays, x, Some(d))
    }
}

/// Minimal V-representation from an arbitrary generating set.
/// The recession cone must be pointed.
pub fn from_gens(points: &[Vec<Q>], ray_gens: &[Vec<Q>]) -> Result<Polyhedron, Error> {
    if points.is_empty() {
        return Err(Error::invalid_input("from_gens needs at least one point"));
    }
    let mut verts: Vec<Vec<Q>> = points.to_vec();
    verts.sort();
    verts.dedup();
    let mut rays: Vec<Vec<i64>> = Vec::new();
    for r in ray_gens {
        if r.iter().all(|c| c.is_zero()) {
            continue;
        }
        let p = primitive_q(r)?;
        if !rays.contains(&p) {
            rays.push(p);
        }
    }
    let rays_q: Vec<Vec<Q>> = rays
        .iter()
        .map(|r| r.iter().map(|&c| Q::from_integer(c.into())).collect())
        .collect();

    // Pointedness: no nontrivial nonnegative combination of rays is 0.
    if !rays.is_empty() {
        let nr = rays.len();
        let n = points[0].len();
        let mut eqs: Vec<AffForm> = Vec::new();
        for c in 0..n {
            let coeffs: Vec<Q> = rays_q.iter().map(|r| r[c].clone()).collect();
            eqs.push(AffForm::new(coeffs, Q::zero()));
        }
        eqs.push(AffForm::new(
            vec![Q::new(1.into(), 1.into()); nr],
            -Q::new(1.into(), 1.into()),
        ));
        let ineqs: Vec<(AffForm, bool)> = (0..nr)
            .map(|i| {
                let mut coeffs = vec![Q::zero(); nr];
                coeffs[i] = Q::new(1.into(), 1.into());
                (AffForm::new(coeffs, Q::zero()), false)
            })
            .collect();
        if feasible(nr, &eqs, &ineqs) {
            return Err(Error::inconsistency(
                "generated cone has a lineality space",
            ));
        }
    }

    // Drop non-extreme rays, then non-extreme points.
    let mut keep_rays: Vec<usize> = Vec::new();
    for i in 0..rays_q.len() {
        let others: Vec<Vec<Q>> = rays_q
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, r)| r.clone())
            .collect();
        // r extreme iff not in cone(others): test membership of the
        // ray tip from the origin.
        let origin = vec![Q::zero(); rays_q[i].len()];
        if others.is_empty()
            || !membership_feasible(&[origin], &others, &rays_q[i], None)
        {
            keep_rays.push(i);
        }
    }
    let rays_kept: Vec<Vec<i64>> = keep_rays.iter().map(|&i| rays[i].clone()).collect();
    let rays_kept_q: Vec<Vec<Q>> = keep_rays.iter().map(|&i| rays_q[i].clone()).collect();

    let mut keep_verts: Vec<Vec<Q>> = Vec::new();
    for (i, v) in verts.iter().enumerate() {
        let others: Vec<Vec<Q>> = verts
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, w)| w.clone())
            .collect();
        if others.is_empty() || !membership_feasible(&others, &rays_kept_q, v, None) {
            keep_verts.push(v.clone());
        }
    }
    let mut rays = rays_kept;
    rays.sort();
    keep_verts.sort();
    Ok(Polyhedron {
        verts: keep_verts,
        rays,
    })
}

/// Whether `a ⊆ b` (vertex containment plus recession-cone containment).
pub fn poly_subset(a: &Polyhedron, b: &Polyhedron) -> bool {
    if !a.verts.iter().all(|v| b.contains(v)) {
        return false;
    }
    let b_rays: Vec<Vec<Q>> = b
        .rays
        .iter()
        .map(|r| r.iter().map(|&c| Q::from_integer(c.into())).collect())
        .collect();
    a.rays.iter().all(|r| {
        let rq: Vec<Q> = r.iter().map(|&c| Q::from_integer(c.into())).collect();
        let origin = vec![Q::zero(); rq.len()];
        !b_rays.is_empty() && membership_feasible(&[origin], &b_rays, &rq, None)
    })
}

/// Project a polyhedron by dropping the coordinates in `drop` (raw
/// generators, then re-minimalized).
pub fn project_drop(p: &Polyhedron, drop: &[usize]) -> Result<Polyhedron, Error> {
    let keep: Vec<usize> = (0..p.ambient()).filter(|i| !drop.contains(i)).collect();
    let points: Vec<Vec<Q>> = p
        .verts
        .iter()
        .map(|v| keep.iter().map(|&i| v[i].clone()).collect())
        .collect();
    let rays: Vec<Vec<Q>> = p
        .rays
        .iter()
        .map(|r| {
            keep.iter()
                .map(|&i| Q::from_integer(r[i].into()))
                .collect()
        })
        .collect();
    from_gens(&points, &rays)
}

// ---------------------------------------------------------------------------
// Faces of two-dimensional cells and balancing
// ---------------------------------------------------------------------------

/// Orthogonal basis of the affine hull directions (rational).
pub fn hull_basis(p: &Polyhedron) -> Vec<Vec<Q>> {
    let mut m = p.directions();
    let pivots = crate::linalg::rref(&mut m);
    m.truncate(pivots.len());
    m
}

/// The 1-faces (edges) of a two-dimensional cell.
pub fn edges_of(p: &Polyhedron) -> Result<Vec<Polyhedron>, Error> {
    debug_assert_eq!(p.dim(), 2);
    let basis = hull_basis(p);
    let o = &p.verts[0];
    // Intrinsic 2D coordinates for all generators.
    let coords = |x: &[Q]| -> Vec<Q> {
        let a: Vec<Vec<Q>> = (0..o.len()).map(|c| vec![basis[0][c].clone(), basis[1][c].clone()]).collect();
        let b: Vec<Q> = vsub(x, o);
        solve_affine(&a, &b).expect("generator lies in the hull").0
    };
    let vp: Vec<Vec<Q>> = p.verts.iter().map(|v| coords(v)).collect();
    let rp: Vec<Vec<Q>> = p
        .rays
        .iter()
        .map(|r| {
            let rq: Vec<Q> = r.iter().map(|&c| Q::from_integer(c.into())).collect();
            coords(&vadd(o, &rq))
        })
        .collect();

    let rot = |d: &[Q]| vec![-&d[1], d[0].clone()];
    // Candidate facet lines through two generators.
    let mut cands: Vec<(Vec<Q>, Q)> = Vec::new();
    for i in 0..vp.len() {
        for j in i + 1..vp.len() {
            let d = vsub(&vp[j], &vp[i]);
            if d.iter().all(|c| c.is_zero()) {
                continue;
            }
            cands.push((rot(&d), dot(&rot(&d), &vp[i])));
        }
        for r in &rp {
            if r.iter().all(|c| c.is_zero()) {
                continue;
            }
            cands.push((rot(r), dot(&rot(r), &vp[i])));
        }
    }
    let mut edges: Vec<Polyhedron> = Vec::new();
    let mut seen: Vec<(Vec<i64>, Q)> = Vec::new();
    for (a, b) in cands {
        // Orient so the cell is on the ≥ side.
        let mut a = a;
        let mut b = b;
        let on_ge = vp.iter().all(|v| dot(&a, v) >= b)
            && rp.iter().all(|r| !dot(&a, r).is_negative());
        if !on_ge {
            a = vscale(&-Q::new(1.into(), 1.into()), &a);
            b = -b;
            let on_le = vp.iter().all(|v| dot(&a, v) >= b)
                && rp.iter().all(|r| !dot(&a, r).is_negative());
            if !on_le {
                continue;
            }
        }
        let prim = primitive_q(&a)?;
        let scale = if a[0].is_zero() { &a[1] / Q::from_integer(prim[1].into()) } else { &a[0] / Q::from_integer(prim[0].into()) };
        let key = (prim.clone(), &b / &scale);
        if seen.contains(&key) {
            continue;
        }
        seen.push(key.clone());
        let aq: Vec<Q> = key.0.iter().map(|&c| Q::from_integer(c.into())).collect();
        let bq = key.1.clone();
        // Tight generators.
        let tight_pts: Vec<Vec<Q>> = p
            .verts
            .iter()
            .zip(&vp)
            .filter(|(_, v2)| dot(&aq, v2) == bq)
            .map(|(v, _)| v.clone())
            .collect();
        let tight_rays: Vec<Vec<Q>> = p
            .rays
            .iter()
            .zip(&rp)
            .filter(|(_, r2)| dot(&aq, r2).is_zero())
            .map(|(r, _)| r.iter().map(|&c| Q::from_integer(c.into())).collect())
            .collect();
        if tight_pts.is_empty() {
            continue;
        }
        if tight_pts.len() + tight_rays.len() < 2 {
            continue; // supporting line at a single vertex, not a facet
        }
        let edge = from_gens(&tight_pts, &tight_rays)?;
        if edge.dim() == 1 && !edges.contains(&edge) {
            edges.push(edge);
        }
    }
    Ok(edges)
}

/// A primitive integer vector `w` in `lin(C) ∩ Z^n` such that `(d, w)`
/// is a basis of the saturated lattice `lin(C) ∩ Z^n`, where `d` is a
/// primitive vector of the 1-face. The sign is not yet oriented.
pub fn lattice_normal(cell: &Polyhedron, d: &[i64]) -> Result<Vec<i64>, Error> {
    let dirs = cell.directions();
    let int_dirs: Vec<Vec<Z>> = dirs.iter().map(|v| clear_denominators(v)).collect();
    let sat = saturation_basis(&int_dirs);
    if sat.len() != 2 {
        return Err(Error::inconsistency("cell is not two-dimensional"));
    }
    // d = x·b1 + y·b2 with gcd(x,y) = 1; complete to a unimodular basis.
    let a: Vec<Vec<Q>> = (0..d.len())
        .map(|c| {
            vec![
                Q::from_integer(sat[0][c].clone()),
                Q::from_integer(sat[1][c].clone()),
            ]
        })
        .collect();
    let b: Vec<Q> = d.iter().map(|&c| Q::from_integer(c.into())).collect();
    let (sol, _) = solve_affine(&a, &b)
        .ok_or_else(|| Error::inconsistency("face direction outside cell plane"))?;
    let x: Z = sol[0].to_integer();
    let y: Z = sol[1].to_integer();
    debug_assert!(sol[0].is_integer() && sol[1].is_integer());
    let g = x.extended_gcd(&y);
    debug_assert!(g.gcd.abs() == Z::from(1));
    // x·q − y·p = ±1 with p = −g.y·sign, q = g.x·sign … derive directly:
    // extended_gcd gives g.x·x + g.y·y = gcd. Take w = −g.y·b1 + g.x·b2,
    // then det[[x, y], [−g.y, g.x]] = x·g.x + y·g.y = ±1.
    let w: Vec<i64> = (0..d.len())
        .map(|c| {
            let val: Z = -&g.y * &sat[0][c] + &g.x * &sat[1][c];
            i64::try_from(&val).expect("normal fits in i64")
        })
        .collect();
    Ok(w)
}

/// Balancing test for a weighted two-dimensional complex given as a
/// list of (possibly overlapping) cells with multiplicities: for every
/// candidate 1-face point, the weighted lattice normals of the cells
/// bordering the face sum to a multiple of the face direction.
pub fn is_balanced_2(cells: &[(Polyhedron, Z)]) -> Result<bool, Error> {
    let all_edges: Vec<Vec<Polyhedron>> = cells
        .iter()
        .map(|(c, _)| edges_of(c))
        .collect::<Result<_, _>>()?;
    for (ci, (_, _)) in cells.iter().enumerate() {
        for face in &all_edges[ci] {
            let d: Vec<i64> = if !face.rays.is_empty() {
                face.rays[0].clone()
            } else {
                primitive_q(&vsub(&face.verts[1], &face.verts[0]))?
            };
            let dq: Vec<Q> = d.iter().map(|&c| Q::from_integer(c.into())).collect();
            let base = &face.verts[0];
            // Events along the face from all other cells' edges.
            let mut params: Vec<Q> = Vec::new();
            for (cj, _) in cells.iter().enumerate() {
                for other in &all_edges[cj] {
                    if other == face {
                        continue;
                    }
                    // Solve base + t·d = o' + u·d' (two unknowns).
                    let o2 = &other.verts[0];
                    let d2: Vec<Q> = if !other.rays.is_empty() {
                        other.rays[0]
                            .iter()
                            .map(|&c| Q::from_integer(c.into()))
                            .collect()
                    } else {
                        vsub(&other.verts[1], &other.verts[0])
                    };
                    let a: Vec<Vec<Q>> = (0..base.len())
                        .map(|c| vec![dq[c].clone(), -&d2[c]])
                        .collect();
                    let rhs = vsub(o2, base);
                    if let Some((sol, basis)) = solve_affine(&a, &rhs) {
                        if basis.is_empty() {
                            params.push(sol[0].clone());
                        }
                    }
                }
            }
            // Face parameter range.
            let tmax: Option<Q> = if face.rays.is_empty() {
                // Parameter of the far vertex.
                let diff = vsub(&face.verts[1], &face.verts[0]);
                let i = dq.iter().position(|c| !c.is_zero()).unwrap();
                Some(&diff[i] / &dq[i])
            } else {
                None
            };
            params.retain(|t| {
                t.is_positive() && tmax.as_ref().map(|m| t < m).unwrap_or(true)
            });
            params.sort();
            params.dedup();
            // Sample midpoints of consecutive events.
            let mut samples: Vec<Q> = Vec::new();
            let mut prev = Q::zero();
            for t in &params {
                samples.push((&prev + t) / Q::from_integer(2.into()));
                prev = t.clone();
            }
            match &tmax {
                Some(m) => samples.push((&prev + m) / Q::from_integer(2.into())),
                None => samples.push(&prev + Q::new(1.into(), 1.into())),
            }
            for t in samples {
                let x: Vec<Q> = base
                    .iter()
                    .zip(&dq)
                    .map(|(b, dc)| b + dc * &t)
                    .collect();
                let mut acc = vec![Q::zero(); x.len()];
                for (cell, mult) in cells {
                    if !cell.contains(&x) {
                        continue;
                    }
                    let neg_dq: Vec<Q> = dq.iter().map(|c| -c).collect();
                    if !cell.direction_feasible(&x, &dq)
                        || !cell.direction_feasible(&x, &neg_dq)
                    {
                        continue;
                    }
                    let w = lattice_normal(cell, &d)?;
                    let wq: Vec<Q> = w.iter().map(|&c| Q::from_integer(c.into())).collect();
                    let neg_wq: Vec<Q> = wq.iter().map(|c| -c).collect();
                    let plus = cell.direction_feasible(&x, &wq);
                    let minus = cell.direction_feasible(&x, &neg_wq);
                    let mq = Q::from_integer(mult.clone());
                    match (plus, minus) {
                        (true, true) => {} // face interior to the cell
                        (true, false) => acc = vadd(&acc, &vscale(&mq, &wq)),
                        (false, true) => acc = vsub(&acc, &vscale(&mq, &wq)),
                        (false, false) => {
                            return Err(Error::inconsistency(
                                "cell locally degenerate at a 1-face",
                            ))
                        }
                    }
                }
                // Balanced iff acc lies on the face direction line.
                if rank_q(&[acc.clone(), dq.clone()]) > 1 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
