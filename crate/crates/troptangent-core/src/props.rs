//! Randomized property suites for the core invariants: determinant
//! expansion identities, tropical Plücker relations, balancing of the
//! output complexes, Θ-vanishing versus kernel ranks, lattice indices
//! against Smith normal form, threshold-reduction postconditions,
//! refinement invariance of pushforward multiplicities, and agreement
//! of the fast paths with the general pipeline.

use std::sync::OnceLock;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cell::normalize_cell;
use crate::complexes::{
    dual_complex, dual_equations, gauss_complex, graph_complex, merge_wcells, project_incidence,
    tau_equations, GraphCell, GraphComplex, WCell,
};
use crate::curve::tests::{cubic_system, p3_system};
use crate::curve::{intersect_curve, CellRef, TropicalCurve};
use crate::error::Error;
use crate::fastpath::{
    bergman_edge_dual_support, bergman_edge_qualifies, bergman_edge_tau_support,
    tame_vertex_dual_cells,
};
use crate::hypersurface::ValuedSupport;
use crate::lattice::{
    integer_kernel, lattice_index, minor_delta, rank_z, smith_diagonal, subsets, theta, ExpVec,
    IntMatrix,
};
use crate::newton::balanced_1;
use crate::poly::Polyhedron;
use crate::rat::{qi, qr, Aff, Q, Val, Z};
use crate::tangent::{
    edge_tangents, generic_edge_tangents, plucker_relations_hold, vertex_tangents, PiecewiseAff,
};

// ---------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------

fn sup(terms: &[(Vec<i64>, Q)]) -> ValuedSupport {
    ValuedSupport::new(
        terms
            .iter()
            .map(|(w, v)| (ExpVec::new(w.clone()).unwrap(), v.clone()))
            .collect(),
    )
    .unwrap()
}

/// The plane-cubic support with caller-chosen coefficient valuations.
fn cubic_with(vals: &[Q]) -> Vec<ValuedSupport> {
    vec![sup(&[
        (vec![0, 0, 0], vals[0].clone()),
        (vec![0, -1, 1], vals[1].clone()),
        (vec![-2, 1, 1], vals[2].clone()),
    ])]
}

/// The fixture system with every coefficient valuation shifted.
fn perturbed(base: &[ValuedSupport], deltas: &[Q]) -> Vec<ValuedSupport> {
    let mut k = 0usize;
    base.iter()
        .map(|s| {
            ValuedSupport::new(
                s.terms()
                    .iter()
                    .map(|(w, v)| {
                        let t = (w.clone(), v + &deltas[k]);
                        k += 1;
                        t
                    })
                    .collect(),
            )
            .unwrap()
        })
        .collect()
}

/// Exact integer power of a rational.
fn qpow(x: &Q, e: i64) -> Q {
    let base = if e < 0 { x.recip() } else { x.clone() };
    let mut r = Q::one();
    for _ in 0..e.abs() {
        r *= &base;
    }
    r
}

/// Monomial value `Π_j x_j^{w_j}`.
fn mono(x: &[Q], w: &[i64]) -> Q {
    x.iter().zip(w).map(|(xi, &wi)| qpow(xi, wi)).product()
}

/// Plain rational determinant by Gaussian elimination (test oracle,
/// deliberately independent of the integer Bareiss routine).
fn det_q(mut m: Vec<Vec<Q>>) -> Q {
    let k = m.len();
    let mut det = Q::one();
    for c in 0..k {
        let Some(p) = (c..k).find(|&r| !m[r][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        let pv = m[c][c].clone();
        det *= &pv;
        for r in c + 1..k {
            let f = &m[r][c] / &pv;
            for cc in c..k {
                let sub = &f * &m[c][cc];
                m[r][cc] -= sub;
            }
        }
    }
    det
}

fn nonzero_q() -> impl Strategy<Value = Q> {
    (1i64..=9, any::<bool>(), 1i64..=6)
        .prop_map(|(n, neg, d)| if neg { qr(-n, d) } else { qr(n, d) })
}

fn small_q() -> impl Strategy<Value = Q> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| qr(n, d))
}

/// Strictly positive pseudo-random rational with modest denominator.
fn rng_q(rng: &mut ChaCha8Rng, num: u32, den: u32) -> Q {
    qr(1 + (rng.next_u32() % num) as i64, 1 + (rng.next_u32() % den) as i64)
}

/// A point of the relative interior: strictly positive vertex weights
/// (normalized) plus strictly positive ray coefficients. Numerators and
/// denominators are drawn from large ranges so that the point avoids
/// any fixed measure-zero locus (cell walls, overlap boundaries) except
/// with negligible probability.
fn sample_point(p: &Polyhedron, rng: &mut ChaCha8Rng) -> Vec<Q> {
    let fine = |rng: &mut ChaCha8Rng| {
        qr(
            1 + (rng.next_u32() % 999_983) as i64,
            1 + (rng.next_u32() % 1_000_003) as i64,
        )
    };
    let weights: Vec<Q> = p.verts.iter().map(|_| fine(rng)).collect();
    let total: Q = weights.iter().sum();
    let mut x = vec![Q::zero(); p.verts[0].len()];
    for (v, w) in p.verts.iter().zip(&weights) {
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi += vi * w / &total;
        }
    }
    for r in &p.rays {
        let u = fine(rng);
        for (xi, &ri) in x.iter_mut().zip(r) {
            *xi += qi(ri) * &u;
        }
    }
    x
}

fn weight(cells: &[WCell], x: &[Q]) -> Z {
    cells
        .iter()
        .filter(|c| c.poly.contains(x))
        .map(|c| c.mult.clone())
        .sum()
}

fn weight_pm(cells: &[(Polyhedron, Z)], x: &[Q]) -> Z {
    cells
        .iter()
        .filter(|(p, _)| p.contains(x))
        .map(|(_, m)| m.clone())
        .sum()
}

/// Skip the case on a legitimate refusal, but fail loudly on internal
/// inconsistencies or balance violations.
macro_rules! ok_or_skip {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => {
                prop_assert!(
                    !matches!(err, Error::Inconsistency(_) | Error::Unbalanced(_)),
                    "internal error: {err}"
                );
                return Ok(());
            }
        }
    };
}

fn eval_pw(pw: &PiecewiseAff, s: &Q) -> Q {
    let (_, _, aff) = pw
        .pieces
        .iter()
        .find(|(lo, hi, _)| lo <= s && Val::Fin(s.clone()) <= *hi)
        .expect("parameter outside the piecewise domain");
    aff.eval(s)
}

struct Fixture {
    hs: Vec<ValuedSupport>,
    curve: TropicalCurve,
    graph: GraphComplex,
}

fn fixtures() -> &'static Vec<Fixture> {
    static DATA: OnceLock<Vec<Fixture>> = OnceLock::new();
    DATA.get_or_init(|| {
        [cubic_system(), p3_system()]
            .into_iter()
            .map(|hs| {
                let curve = intersect_curve(&hs).unwrap();
                let graph = graph_complex(&curve, &hs).unwrap();
                Fixture { hs, curve, graph }
            })
            .collect()
    })
}

/// General-pipeline contributions of a single curve cell.
fn general_cells(graph: &GraphComplex, source: CellRef, tau: bool) -> Vec<WCell> {
    let mut out = Vec::new();
    for cell in graph.cells.iter().filter(|c| c.source == source) {
        let eqs = if tau {
            tau_equations(graph.n, cell)
        } else {
            dual_equations(graph.n, cell)
        };
        if let Some(eqs) = eqs {
            project_incidence(graph.n, cell, &eqs, &mut out).unwrap();
        }
    }
    merge_wcells(out)
}

// ---------------------------------------------------------------------
// Suite 1: row-multilinearity expansion of the deleted-column minors.
//
// With `g_{ij} = Σ_w c_{iw} w_j x^w` (that is, `x_j ∂f_i/∂x_j` for
// `f_i = Σ_w c_{iw} x^w`), the determinant of `[g_{ij}]` over the
// columns outside a pair `J` expands as
// `Σ_(w_1,…,w_{n−1}) Δ_J(w_1,…,w_{n−1}) Π_i c_{iw_i} x^{Σ_i w_i}`.
// The left side is computed by an independent rational elimination.
// ---------------------------------------------------------------------

type LaplaceSupports = Vec<Vec<(Vec<i64>, Q)>>;

fn laplace_case() -> impl Strategy<Value = (usize, LaplaceSupports, Vec<Q>)> {
    (2usize..=4).prop_flat_map(|n| {
        let term = (prop::collection::vec(-3i64..=3, n + 1), nonzero_q());
        let support = prop::collection::vec(term, 2..=4);
        (
            Just(n),
            prop::collection::vec(support, n - 1),
            prop::collection::vec(nonzero_q(), n + 1),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn minor_expansion_matches_rational_determinant(
        (n, supports, x) in laplace_case()
    ) {
        // g[i][j] = Σ_w c_{iw} · w_j · x^w.
        let g: Vec<Vec<Q>> = supports
            .iter()
            .map(|s| {
                (0..=n)
                    .map(|j| {
                        s.iter()
                            .map(|(w, c)| c * qi(w[j]) * mono(&x, w))
                            .sum()
                    })
                    .collect()
            })
            .collect();
        let ranges: Vec<Vec<usize>> = supports.iter().map(|s| (0..s.len()).collect()).collect();
        for pair in subsets(n + 1, 2) {
            let (j0, j1) = (pair[0], pair[1]);
            let lhs = det_q(
                g.iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(j, _)| *j != j0 && *j != j1)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect(),
            );
            let mut rhs = Q::zero();
            for tuple in ranges.iter().map(|r| r.iter().copied()).multi_cartesian_product() {
                let rows: Vec<Vec<i64>> = tuple
                    .iter()
                    .zip(&supports)
                    .map(|(&t, s)| s[t].0.clone())
                    .collect();
                let delta = minor_delta(&IntMatrix::from_i64(&rows).unwrap(), (j0, j1)).unwrap();
                if delta.is_zero() {
                    continue;
                }
                let coeff: Q = tuple
                    .iter()
                    .zip(&supports)
                    .map(|(&t, s)| s[t].1.clone())
                    .product();
                let total: Vec<i64> = (0..=n)
                    .map(|j| rows.iter().map(|r| r[j]).sum())
                    .collect();
                rhs += Q::from_integer(delta) * coeff * mono(&x, &total);
            }
            prop_assert_eq!(&lhs, &rhs, "columns deleted: ({}, {})", j0, j1);
        }
    }
}

// ---------------------------------------------------------------------
// Suite 2: every point of every emitted tangent family satisfies the
// tropical Plücker relations (three-term minimum attained twice).
// ---------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn graph_betas_satisfy_plucker_relations(
        which in 0usize..2,
        pick in any::<usize>(),
        num in 0i64..=64,
        stretch in 1i64..=12,
    ) {
        let fixture = &fixtures()[which];
        let graph = &fixture.graph;
        let cell = &graph.cells[pick % graph.cells.len()];
        if cell.beta.iter().any(Option::is_none) {
            return Ok(());
        }
        let s = match &cell.smax {
            Val::Fin(m) => m * qr(num, 64),
            Val::Inf => qr(num * stretch, 7),
        };
        let beta: Vec<Q> = cell
            .beta_at(&s)
            .into_iter()
            .map(Option::unwrap)
            .collect();
        prop_assert!(
            plucker_relations_hold(graph.n, &beta),
            "cell of {:?} at parameter {s}",
            cell.source
        );
    }
}

// ---------------------------------------------------------------------
// Suite 3: balancing of every output complex under random coefficient
// valuations (skipping inputs the pipeline legitimately refuses).
// ---------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn cubic_outputs_balanced(vals in prop::collection::vec(small_q(), 3)) {
        let hs = cubic_with(&vals);
        let curve = ok_or_skip!(intersect_curve(&hs));
        prop_assert!(curve.is_balanced(), "curve unbalanced for {vals:?}");
        let graph = ok_or_skip!(graph_complex(&curve, &hs));
        let gauss = ok_or_skip!(gauss_complex(&graph));
        prop_assert!(gauss.is_balanced(), "Gauss image unbalanced for {vals:?}");
        let dual = ok_or_skip!(dual_complex(&graph));
        let balanced = ok_or_skip!(balanced_1(&dual));
        prop_assert!(balanced, "dual unbalanced for {vals:?}");
    }

    #[test]
    fn perturbed_space_curve_outputs_balanced(
        deltas in prop::collection::vec((-2i64..=2, 1i64..=2).prop_map(|(n, d)| qr(n, d)), 6)
    ) {
        let hs = perturbed(&p3_system(), &deltas);
        let curve = ok_or_skip!(intersect_curve(&hs));
        prop_assert!(curve.is_balanced(), "curve unbalanced for {deltas:?}");
        let graph = ok_or_skip!(graph_complex(&curve, &hs));
        let gauss = ok_or_skip!(gauss_complex(&graph));
        prop_assert!(gauss.is_balanced(), "Gauss image unbalanced for {deltas:?}");
    }
}

// ---------------------------------------------------------------------
// Suite 4: Θ-vanishing ⇔ rank condition. For full-rank exponent
// matrices `A`, `A′` with zero row sums and kernels `K`, `K′`
// (each of rank two, both containing the all-ones vector):
//   • if rank(K ∪ K′) = 2 the pairing vanishes identically;
//   • if rank(K ∪ K′) = 3 it vanishes exactly when stacking the kernel
//     of the two pair differences on top keeps the rank ≤ n.
// ---------------------------------------------------------------------

fn zero_sum_matrix(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-4i64..=4, n), n - 1).prop_map(move |rows| {
        rows.into_iter()
            .map(|mut r| {
                let s: i64 = r.iter().sum();
                r.push(-s);
                r
            })
            .collect()
    })
}

fn theta_case() -> impl Strategy<Value = (usize, Vec<Vec<i64>>, Vec<Vec<i64>>, usize, usize)> {
    (2usize..=4).prop_flat_map(|n| {
        (
            Just(n),
            zero_sum_matrix(n),
            zero_sum_matrix(n),
            any::<usize>(),
            any::<usize>(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn theta_vanishing_matches_kernel_rank((n, a, a2, pi, pj) in theta_case()) {
        let pairs = subsets(n + 1, 2);
        let i = &pairs[pi % pairs.len()];
        let j = &pairs[pj % pairs.len()];
        prop_assume!(i != j);
        let az: Vec<Vec<Z>> = a.iter().map(|r| r.iter().map(|&x| Z::from(x)).collect()).collect();
        let a2z: Vec<Vec<Z>> = a2.iter().map(|r| r.iter().map(|&x| Z::from(x)).collect()).collect();
        prop_assume!(rank_z(&az) == n - 1 && rank_z(&a2z) == n - 1);
        let k = integer_kernel(&az);
        let k2 = integer_kernel(&a2z);
        let mut union = k.clone();
        union.extend(k2.iter().cloned());
        let r = rank_z(&union);
        let th = theta(
            &IntMatrix::from_i64(&a).unwrap(),
            &IntMatrix::from_i64(&a2).unwrap(),
            (i[0], i[1]),
            (j[0], j[1]),
        )
        .unwrap();
        if r == 2 {
            prop_assert!(th.is_zero(), "equal tangent spans must give Θ = 0");
        } else {
            prop_assert_eq!(r, 3);
            let mut diff = vec![Z::zero(); n + 1];
            diff[i[0]] = Z::one();
            diff[i[1]] = -Z::one();
            let mut diff2 = vec![Z::zero(); n + 1];
            diff2[j[0]] = Z::one();
            diff2[j[1]] = -Z::one();
            let v = integer_kernel(&[diff, diff2]);
            let mut stacked = union.clone();
            stacked.extend(v);
            prop_assert_eq!(
                th.is_zero(),
                rank_z(&stacked) <= n,
                "Θ = {} for pairs {:?}, {:?}",
                th,
                i,
                j
            );
        }
    }
}

// ---------------------------------------------------------------------
// Suite 5: the lattice index (gcd of maximal minors) agrees with the
// product of the Smith normal form diagonal, and both detect rank
// deficiency identically.
// ---------------------------------------------------------------------

fn index_case() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (1usize..=4)
        .prop_flat_map(|k| {
            (k..=5usize).prop_flat_map(move |d| {
                (
                    Just(k),
                    prop::collection::vec(prop::collection::vec(-9i64..=9, d), k),
                )
            })
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn lattice_index_matches_smith_form((k, rows) in index_case()) {
        let rz: Vec<Vec<Z>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Z::from(x)).collect())
            .collect();
        let rank = rank_z(&rz);
        let diag = smith_diagonal(&rz);
        let nonzero: Vec<&Z> = diag.iter().filter(|x| !x.is_zero()).collect();
        prop_assert_eq!(nonzero.len(), rank, "Smith rank disagrees");
        match lattice_index(&rz) {
            Ok(idx) => {
                prop_assert_eq!(rank, k, "index must refuse rank-deficient input");
                let prod: Z = nonzero.iter().map(|x| x.abs()).product();
                prop_assert_eq!(idx, prod);
            }
            Err(Error::Degenerate(_)) => prop_assert!(rank < k),
            Err(e) => prop_assert!(false, "unexpected error: {e}"),
        }
    }
}

// ---------------------------------------------------------------------
// Suite 6: the threshold-reduction loop terminates under its iteration
// cap with its per-step postconditions intact (violations surface as
// `Inconsistency`, which must never happen), and the emitted families
// are structurally sound.
// ---------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn tangent_families_sound_under_perturbation(
        which in 0usize..2,
        deltas in prop::collection::vec((-2i64..=2, 1i64..=2).prop_map(|(n, d)| qr(n, d)), 6),
    ) {
        let base = if which == 0 { cubic_system() } else { p3_system() };
        let hs = perturbed(&base, &deltas);
        let curve = ok_or_skip!(intersect_curve(&hs));
        let n = curve.n;
        for vi in 0..curve.vertices.len() {
            let ctx = match normalize_cell(&curve, CellRef::Vertex(vi), &hs) {
                Ok(ctx) => ctx,
                Err(e) => {
                    prop_assert!(!matches!(e, Error::Inconsistency(_)), "vertex {vi}: {e}");
                    continue;
                }
            };
            match vertex_tangents(&ctx) {
                Ok(fam) => {
                    prop_assert_eq!(fam.base.len(), fam.pairs.len());
                    for branch in &fam.branches {
                        prop_assert_eq!(branch.slacks.len(), fam.pairs.len());
                        if let Val::Fin(m) = &branch.smax {
                            prop_assert!(m >= &Q::zero(), "negative branch length");
                        }
                        if fam.base.iter().all(|b| !b.is_inf()) {
                            let s = match &branch.smax {
                                Val::Fin(m) => m * qr(1, 2),
                                Val::Inf => qi(1),
                            };
                            let beta: Vec<Q> = fam
                                .base
                                .iter()
                                .zip(&branch.slacks)
                                .map(|(b, sl)| b.expect_finite() + sl.eval(&s))
                                .collect();
                            prop_assert!(
                                plucker_relations_hold(n, &beta),
                                "vertex {} branch violates the relations at {s}",
                                vi
                            );
                        }
                    }
                }
                Err(e) => prop_assert!(
                    !matches!(e, Error::Inconsistency(_) | Error::Unbalanced(_)),
                    "vertex {vi}: {e}"
                ),
            }
        }
        for ei in 0..curve.edges.len() {
            let ctx = match normalize_cell(&curve, CellRef::Edge(ei), &hs) {
                Ok(ctx) => ctx,
                Err(e) => {
                    prop_assert!(!matches!(e, Error::Inconsistency(_)), "edge {ei}: {e}");
                    continue;
                }
            };
            match edge_tangents(&ctx) {
                Ok(fam) => {
                    for pw in fam.q.iter().flatten() {
                        prop_assert!(!pw.pieces.is_empty());
                        prop_assert_eq!(&pw.pieces[0].0, &Q::zero());
                        for win in pw.pieces.windows(2) {
                            let (_, hi1, f1) = &win[0];
                            let (lo2, _, f2) = &win[1];
                            prop_assert!(hi1 == &Val::Fin(lo2.clone()), "gap in the pieces");
                            prop_assert_eq!(f1.eval(lo2), f2.eval(lo2), "discontinuous q");
                        }
                    }
                    if fam.q.iter().all(Option::is_some) {
                        let s = match &curve.edges[ei].length {
                            Val::Fin(m) => m * qr(1, 3),
                            Val::Inf => qi(2),
                        };
                        let beta: Vec<Q> = fam
                            .q
                            .iter()
                            .map(|pw| eval_pw(pw.as_ref().unwrap(), &s))
                            .collect();
                        prop_assert!(
                            plucker_relations_hold(n, &beta),
                            "edge {} violates the relations at {s}",
                            ei
                        );
                    }
                }
                Err(e) => prop_assert!(
                    !matches!(e, Error::Inconsistency(_) | Error::Unbalanced(_)),
                    "edge {ei}: {e}"
                ),
            }
        }
    }
}

// ---------------------------------------------------------------------
// Suite 7: refinement invariance — splitting graph cells at interior
// parameters never changes the pushforward multiplicity at any point
// (splitting can only double-count the measure-zero image of the split
// parameter itself, so we compare against two independent splits: the
// weight never drops, and at least one split reproduces it exactly).
// ---------------------------------------------------------------------

fn split_cell(c: &GraphCell, t: &Q) -> (GraphCell, GraphCell) {
    let shift = |f: &Aff| Aff { a: f.eval(t), b: f.b.clone() };
    let first = GraphCell {
        source: c.source,
        alpha: c.alpha.clone(),
        beta: c.beta.clone(),
        smax: Val::Fin(t.clone()),
        mult: c.mult.clone(),
    };
    let second = GraphCell {
        source: c.source,
        alpha: c.alpha.iter().map(shift).collect(),
        beta: c.beta.iter().map(|b| b.as_ref().map(shift)).collect(),
        smax: match &c.smax {
            Val::Fin(m) => Val::Fin(m - t),
            Val::Inf => Val::Inf,
        },
        mult: c.mult.clone(),
    };
    (first, second)
}

/// An interior split parameter whose fractional part has denominator
/// exactly `den` (a prime). Parameters produced with distinct primes
/// can never coincide, so a sample point lies on the image of at most
/// one of two independently drawn splits.
fn split_param(smax: &Val, rng: &mut ChaCha8Rng, den: i64) -> Option<Q> {
    let frac = qr(1 + (rng.next_u32() as i64 % (den - 1)), den);
    match smax {
        Val::Fin(m) if m.is_zero() => None,
        Val::Fin(m) => Some(m * frac),
        Val::Inf => Some(qi(1 + (rng.next_u32() % 40) as i64) + frac),
    }
}

fn refine_graph(g: &GraphComplex, rng: &mut ChaCha8Rng, den: i64) -> GraphComplex {
    let mut cells = Vec::new();
    for c in &g.cells {
        match split_param(&c.smax, rng, den) {
            Some(t) => {
                let (a, b) = split_cell(c, &t);
                cells.push(a);
                cells.push(b);
            }
            None => cells.push(c.clone()),
        }
    }
    GraphComplex {
        n: g.n,
        pluecker_dim: g.pluecker_dim,
        cells,
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn refinement_preserves_dual_multiplicities_plane(
        vals in prop::collection::vec(small_q(), 3),
        seed in any::<u64>(),
        seed2 in any::<u64>(),
        seed3 in any::<u64>(),
    ) {
        let hs = cubic_with(&vals);
        let curve = ok_or_skip!(intersect_curve(&hs));
        let graph = ok_or_skip!(graph_complex(&curve, &hs));
        let d1 = ok_or_skip!(dual_complex(&graph));
        let d2 = dual_complex(&refine_graph(&graph, &mut ChaCha8Rng::seed_from_u64(seed2), 11))
            .map_err(|e| TestCaseError::fail(format!("refined dual failed: {e}")))?;
        let d3 = dual_complex(&refine_graph(&graph, &mut ChaCha8Rng::seed_from_u64(seed3), 13))
            .map_err(|e| TestCaseError::fail(format!("refined dual failed: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for cell in &d1.cells {
            let x = sample_point(&cell.poly, &mut rng);
            let (w1, w2, w3) = (d1.mult_at(&x), d2.mult_at(&x), d3.mult_at(&x));
            prop_assert!(w2 >= w1 && w3 >= w1, "refinement lost weight at {x:?}");
            prop_assert!(w2 == w1 || w3 == w1, "refinement changed weight at {x:?}");
        }
    }

    #[test]
    fn refinement_preserves_pushforward_space_curve(
        pick in any::<usize>(),
        tau in any::<bool>(),
        seed in any::<u64>(),
        seed2 in any::<u64>(),
        seed3 in any::<u64>(),
    ) {
        let graph = &fixtures()[1].graph;
        let n = graph.n;
        let cell = &graph.cells[pick % graph.cells.len()];
        let eqs = if tau { tau_equations(n, cell) } else { dual_equations(n, cell) };
        let Some(eqs) = eqs else { return Ok(()) };
        let mut orig = Vec::new();
        project_incidence(n, cell, &eqs, &mut orig).unwrap();
        let orig = merge_wcells(orig);
        let refined = |seed: u64, den: i64| -> Vec<WCell> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::new();
            match split_param(&cell.smax, &mut rng, den) {
                Some(t) => {
                    for half in [split_cell(cell, &t).0, split_cell(cell, &t).1] {
                        if let Some(eqs) = if tau {
                            tau_equations(n, &half)
                        } else {
                            dual_equations(n, &half)
                        } {
                            project_incidence(n, &half, &eqs, &mut out).unwrap();
                        }
                    }
                }
                None => project_incidence(n, cell, &eqs, &mut out).unwrap(),
            }
            merge_wcells(out)
        };
        let r2 = refined(seed2, 11);
        let r3 = refined(seed3, 13);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for c in &orig {
            let x = sample_point(&c.poly, &mut rng);
            let (w1, w2, w3) = (weight(&orig, &x), weight(&r2, &x), weight(&r3, &x));
            prop_assert!(w2 >= w1 && w3 >= w1, "refinement lost weight at {x:?}");
            prop_assert!(w2 == w1 || w3 == w1, "refinement changed weight at {x:?}");
        }
    }
}

// ---------------------------------------------------------------------
// Suite 8: the fast paths (tame vertices, fiber-line edges, generic
// tangent formulas) agree with the general pipeline on every
// qualifying cell of both fixtures, at randomized sample points.
// ---------------------------------------------------------------------

struct TameEntry {
    fast: Vec<(Polyhedron, Z)>,
    general: Vec<WCell>,
}

struct BergEntry {
    fast_dual: Vec<Polyhedron>,
    gen_dual: Vec<WCell>,
    fast_tau: Vec<Polyhedron>,
    gen_tau: Vec<WCell>,
}

struct GenericEdgeEntry {
    fast: Vec<Aff>,
    general: Vec<Aff>,
    length: Val,
}

struct FastGenData {
    tame: Vec<TameEntry>,
    berg: Vec<BergEntry>,
    generic: Vec<GenericEdgeEntry>,
}

fn fastgen() -> &'static FastGenData {
    static DATA: OnceLock<FastGenData> = OnceLock::new();
    DATA.get_or_init(|| {
        let mut data = FastGenData {
            tame: Vec::new(),
            berg: Vec::new(),
            generic: Vec::new(),
        };
        for fixture in fixtures() {
            let (curve, hs, graph) = (&fixture.curve, &fixture.hs, &fixture.graph);
            for vi in 0..curve.vertices.len() {
                let ctx = normalize_cell(curve, CellRef::Vertex(vi), hs).unwrap();
                match tame_vertex_dual_cells(curve, &ctx, vi) {
                    Ok(fast) => data.tame.push(TameEntry {
                        fast,
                        general: general_cells(graph, CellRef::Vertex(vi), false),
                    }),
                    Err(Error::NotApplicable(_)) => {}
                    Err(e) => panic!("unexpected error at vertex {vi}: {e}"),
                }
            }
            for ei in 0..curve.edges.len() {
                if curve.n >= 3 {
                    let ctx = normalize_cell(curve, CellRef::Edge(ei), hs).unwrap();
                    if bergman_edge_qualifies(curve, &ctx).unwrap() {
                        data.berg.push(BergEntry {
                            fast_dual: bergman_edge_dual_support(curve, &ctx).unwrap(),
                            gen_dual: general_cells(graph, CellRef::Edge(ei), false),
                            fast_tau: bergman_edge_tau_support(curve, &ctx).unwrap(),
                            gen_tau: general_cells(graph, CellRef::Edge(ei), true),
                        });
                    }
                }
                if let Some(fast) = generic_edge_tangents(curve, ei) {
                    let ctx = normalize_cell(curve, CellRef::Edge(ei), hs).unwrap();
                    let fam = edge_tangents(&ctx).unwrap();
                    let general: Vec<Aff> = fam
                        .q
                        .iter()
                        .map(|p| p.as_ref().unwrap().as_single().unwrap().clone())
                        .collect();
                    data.generic.push(GenericEdgeEntry {
                        fast,
                        general,
                        length: curve.edges[ei].length.clone(),
                    });
                }
            }
        }
        assert!(!data.tame.is_empty(), "no tame vertex qualifies");
        assert!(!data.berg.is_empty(), "no fiber-line edge qualifies");
        assert!(!data.generic.is_empty(), "no generic edge qualifies");
        data
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn fast_paths_agree_with_general_pipeline(seed in any::<u64>()) {
        let data = fastgen();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (k, entry) in data.tame.iter().enumerate() {
            let f = &entry.fast[rng.next_u32() as usize % entry.fast.len()];
            let x = sample_point(&f.0, &mut rng);
            prop_assert_eq!(
                weight_pm(&entry.fast, &x),
                weight(&entry.general, &x),
                "tame vertex {} disagrees at a fast-cell sample",
                k
            );
            let g = &entry.general[rng.next_u32() as usize % entry.general.len()];
            let y = sample_point(&g.poly, &mut rng);
            prop_assert_eq!(
                weight_pm(&entry.fast, &y),
                weight(&entry.general, &y),
                "tame vertex {} disagrees at a general-cell sample",
                k
            );
        }
        for (k, entry) in data.berg.iter().enumerate() {
            for (fast, general) in [
                (&entry.fast_dual, &entry.gen_dual),
                (&entry.fast_tau, &entry.gen_tau),
            ] {
                let f = &fast[rng.next_u32() as usize % fast.len()];
                let x = sample_point(f, &mut rng);
                prop_assert!(
                    general.iter().any(|c| c.poly.contains(&x)),
                    "fiber-line support of edge entry {} not covered at {:?}",
                    k,
                    x
                );
                let g = &general[rng.next_u32() as usize % general.len()];
                let y = sample_point(&g.poly, &mut rng);
                prop_assert!(
                    fast.iter().any(|p| p.contains(&y)),
                    "general support of edge entry {} not covered at {:?}",
                    k,
                    y
                );
            }
        }
        for (k, entry) in data.generic.iter().enumerate() {
            let s = match &entry.length {
                Val::Fin(m) => m * qr(1 + (rng.next_u32() % 7) as i64, 8),
                Val::Inf => rng_q(&mut rng, 50, 6),
            };
            prop_assert_eq!(entry.fast.len(), entry.general.len());
            for (f, g) in entry.fast.iter().zip(&entry.general) {
                prop_assert_eq!(
                    f.eval(&s),
                    g.eval(&s),
                    "generic tangent formula of edge entry {} disagrees at {}",
                    k,
                    s
                );
            }
        }
    }
}

