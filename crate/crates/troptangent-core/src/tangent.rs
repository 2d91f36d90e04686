//! Tangent lines along a tropical space curve.
//!
//! For each cell of the curve this module determines, coordinate by
//! Plücker coordinate, whether the valuation of the coordinate is forced
//! by the leading terms or free to increase, computes the exact
//! interaction thresholds between simultaneously-free coordinates by a
//! symbolic series reduction, and assembles the resulting families of
//! tropical Plücker vectors.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::cell::{lower_envelope, normalize_cell, CellContext, TupleIdx};
use crate::curve::{CellRef, TropicalCurve};
use crate::error::Error;
use crate::hypersurface::{TropPoint, ValuedSupport};
use crate::lattice::{in_span, ExpVec};
use crate::rat::{Aff, Q, Val, Z};

// ---------------------------------------------------------------------------
// Critical locus
// ---------------------------------------------------------------------------

/// A point of the curve where two distinct exponent tuples attain the
/// same valuation (so that cancellation between their coefficients is
/// possible).
#[derive(Clone, Debug)]
pub struct CriticalPoint {
    /// The cell containing the point.
    pub cell: CellRef,
    /// The point itself.
    pub point: TropPoint,
    /// Edge parameter of the point, when interior to an edge.
    pub param: Option<Q>,
    /// The cancellative tuple pairs at the point.
    pub pairs: Vec<(TupleIdx, TupleIdx)>,
    /// Whether the pairs have the non-colliding shape (common difference
    /// supported on fixed slots; at a vertex, the three-term slot).
    pub conforming: bool,
}

/// All tuple pairs with equal valuation at `alpha`.
fn cancellative_pairs_at(ctx: &CellContext, alpha: &TropPoint) -> Vec<(TupleIdx, TupleIdx)> {
    let tuples = ctx.tuples();
    let nus: Vec<Q> = tuples.iter().map(|t| ctx.nu_w_at(t, alpha)).collect();
    let mut out = Vec::new();
    for a in 0..tuples.len() {
        for b in a + 1..tuples.len() {
            if nus[a] == nus[b] {
                out.push((tuples[a].clone(), tuples[b].clone()));
            }
        }
    }
    out
}

/// Check the non-colliding shape of a set of cancellative pairs: all
/// pairs share one difference vector per slot and agree with the
/// reference pair on the slots where it differs. At a vertex, the pairs
/// must differ exactly in the three-term slot, with entries `v_{i0}`
/// and `v'_{i0}`.
fn pairs_conform(ctx: &CellContext, pairs: &[(TupleIdx, TupleIdx)]) -> bool {
    let Some((r0, rp0)) = pairs.first() else {
        return true;
    };
    let mut r = ctx.tuple_exponents(r0);
    let mut rp = ctx.tuple_exponents(rp0);
    let diff_slots: Vec<usize> = (0..r.len()).filter(|&i| r[i] != rp[i]).collect();
    if let (Some(i0), Some(vp)) = (ctx.i0, ctx.v_prime.as_ref()) {
        if diff_slots != vec![i0] {
            return false;
        }
        let want = (&ctx.v[i0], &vp[i0]);
        if (&r[i0], &rp[i0]) == (want.1, want.0) {
            std::mem::swap(&mut r, &mut rp);
        } else if (&r[i0], &rp[i0]) != want {
            return false;
        }
    }
    let delta: Vec<ExpVec> = (0..r.len()).map(|i| &rp[i] - &r[i]).collect();
    for (w0, wp0) in pairs {
        let w = ctx.tuple_exponents(w0);
        let wp = ctx.tuple_exponents(wp0);
        let fits = |a: &[ExpVec], b: &[ExpVec]| {
            (0..a.len()).all(|i| &b[i] - &a[i] == delta[i])
                && diff_slots.iter().all(|&i| a[i] == r[i])
        };
        if !fits(&w, &wp) && !fits(&wp, &w) {
            return false;
        }
    }
    true
}

/// Compute the critical locus of the curve: all vertices, plus every
/// point interior to an edge where two tuple valuations collide. A
/// collision holding identically along an edge is reported as a single
/// non-conforming entry for that edge.
pub fn critical_locus(
    curve: &TropicalCurve,
    hs: &[ValuedSupport],
) -> Result<Vec<CriticalPoint>, Error> {
    let mut out = Vec::new();
    for vi in 0..curve.vertices.len() {
        let ctx = normalize_cell(curve, CellRef::Vertex(vi), hs)?;
        let alpha = &curve.vertices[vi];
        let pairs = cancellative_pairs_at(&ctx, alpha);
        let conforming = pairs_conform(&ctx, &pairs);
        out.push(CriticalPoint {
            cell: CellRef::Vertex(vi),
            point: alpha.clone(),
            param: None,
            pairs,
            conforming,
        });
    }
    for ei in 0..curve.edges.len() {
        let ctx = normalize_cell(curve, CellRef::Edge(ei), hs)?;
        let edge = &curve.edges[ei];
        let base_is_vertex = curve
            .vertex_index(&TropPoint(edge.base.clone()))
            .is_some();
        let tuples = ctx.tuples();
        let affs: Vec<Aff> = tuples.iter().map(|t| ctx.nu_w_aff(t)).collect();
        let mut params: Vec<Q> = Vec::new();
        let mut identical: Option<(TupleIdx, TupleIdx)> = None;
        for a in 0..tuples.len() {
            for b in a + 1..tuples.len() {
                let d = affs[a].sub(&affs[b]);
                if d.is_zero() {
                    identical = Some((tuples[a].clone(), tuples[b].clone()));
                } else if !d.b.is_zero() {
                    let s = -&d.a / &d.b;
                    let interior = (s.is_positive() || (s.is_zero() && !base_is_vertex))
                        && Val::Fin(s.clone()) < edge.length;
                    if interior {
                        params.push(s);
                    }
                }
            }
        }
        if let Some(pair) = identical {
            out.push(CriticalPoint {
                cell: CellRef::Edge(ei),
                point: edge.interior_point(),
                param: None,
                pairs: vec![pair],
                conforming: false,
            });
            continue;
        }
        params.sort();
        params.dedup();
        for s in params {
            let point = edge.point_at(&s);
            let pairs = cancellative_pairs_at(&ctx, &point);
            let conforming = pairs_conform(&ctx, &pairs);
            out.push(CriticalPoint {
                cell: CellRef::Edge(ei),
                point,
                param: Some(s),
                pairs,
                conforming,
            });
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Forced/free classification
// ---------------------------------------------------------------------------

/// Why a Plücker coordinate valuation is forced at a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ForcedCase {
    /// No cancellative pair at the point at all.
    NotCritical,
    /// No minimizing pair has both members contributing to the
    /// coordinate.
    NoMinimalPair,
    /// Vertex: the two cofactors of the pair are equal, so the leading
    /// coefficients cannot cancel.
    EqualDelta,
    /// Edge point: the pair's total exponent difference lies in the span
    /// of the edge data; forced for sufficiently general lowest-order
    /// parts.
    DegenerateSpan,
}

/// Classification of one Plücker coordinate at one point.
#[derive(Clone, Debug)]
pub enum CancelStatus {
    /// No tuple contributes: the coordinate is identically infinite.
    Degenerate,
    /// The valuation equals the tuple minimum.
    Forced(ForcedCase),
    /// The valuation can exceed the tuple minimum; carries the oriented
    /// minimizing pair that witnesses the freedom.
    Free {
        /// Pair member aligned with `v` in the differing slot.
        r: TupleIdx,
        /// Pair member aligned with `v'`.
        r_prime: TupleIdx,
    },
}

impl CancelStatus {
    /// Whether the status is `Free`.
    pub fn is_free(&self) -> bool {
        matches!(self, CancelStatus::Free { .. })
    }
}

/// Minimal tuple valuation among tuples contributing to `J`, with the
/// minimizer indices. `None` when no tuple contributes.
fn nu_j(
    ctx: &CellContext,
    alpha: &TropPoint,
    j: (usize, usize),
) -> Result<Option<(Q, Vec<usize>)>, Error> {
    let tuples = ctx.tuples();
    let mut best: Option<Q> = None;
    let mut mins: Vec<usize> = Vec::new();
    for (k, t) in tuples.iter().enumerate() {
        if ctx.delta(t, j)?.is_zero() {
            continue;
        }
        let nu = ctx.nu_w_at(t, alpha);
        match &best {
            Some(b) if nu > *b => {}
            Some(b) if nu == *b => mins.push(k),
            _ => {
                best = Some(nu);
                mins = vec![k];
            }
        }
    }
    Ok(best.map(|b| (b, mins)))
}

/// Classify the coordinate `q_J` at `alpha` on the given cell.
pub fn classify(
    ctx: &CellContext,
    alpha: &TropPoint,
    j: (usize, usize),
) -> Result<CancelStatus, Error> {
    let Some((nu, mins)) = nu_j(ctx, alpha, j)? else {
        return Ok(CancelStatus::Degenerate);
    };
    let tuples = ctx.tuples();
    let nus: Vec<Q> = tuples.iter().map(|t| ctx.nu_w_at(t, alpha)).collect();
    let any_pair = (0..tuples.len())
        .any(|a| (a + 1..tuples.len()).any(|b| nus[a] == nus[b]));
    if !any_pair {
        return Ok(CancelStatus::Forced(ForcedCase::NotCritical));
    }
    // Minimizing pairs with both cofactors nonzero.
    let mut pair: Option<(usize, usize)> = None;
    for (ai, &a) in mins.iter().enumerate() {
        for &b in &mins[ai + 1..] {
            if nus[a] == nu && nus[b] == nu {
                pair = Some((a, b));
                break;
            }
        }
        if pair.is_some() {
            break;
        }
    }
    let Some((a, b)) = pair else {
        return Ok(CancelStatus::Forced(ForcedCase::NoMinimalPair));
    };
    let (mut r, mut rp) = (tuples[a].clone(), tuples[b].clone());
    if let (Some(i0), Some(vps)) = (ctx.i0, ctx.v_prime.as_ref()) {
        // Orient so that r carries v_{i0} and r' carries v'_{i0}.
        let re = ctx.tuple_exponents(&r);
        let rpe = ctx.tuple_exponents(&rp);
        if re[i0] == vps[i0] && rpe[i0] == ctx.v[i0] {
            std::mem::swap(&mut r, &mut rp);
        } else if !(re[i0] == ctx.v[i0] && rpe[i0] == vps[i0]) {
            return Err(Error::hypothesis_at(
                "cancellative pair does not have the non-colliding vertex shape",
                ctx.cell.to_string(),
            ));
        }
        let dr = ctx.delta(&r, j)?;
        let drp = ctx.delta(&rp, j)?;
        if dr == drp {
            return Ok(CancelStatus::Forced(ForcedCase::EqualDelta));
        }
        return Ok(CancelStatus::Free { r, r_prime: rp });
    }
    // Edge point: freedom requires the total exponent difference of the
    // pair to leave the span of the edge exponent data.
    let re = ctx.tuple_exponents(&r);
    let rpe = ctx.tuple_exponents(&rp);
    let mut total = vec![Z::zero(); ctx.n + 1];
    for i in 0..re.len() {
        for (k, acc) in total.iter_mut().enumerate() {
            *acc += Z::from(re[i].0[k] - rpe[i].0[k]);
        }
    }
    let gens: Vec<Vec<Z>> = ctx
        .v
        .iter()
        .map(|v| v.0.iter().map(|&x| Z::from(x)).collect())
        .collect();
    if in_span(&gens, &total) {
        return Ok(CancelStatus::Forced(ForcedCase::DegenerateSpan));
    }
    Ok(CancelStatus::Free { r, r_prime: rp })
}

// ---------------------------------------------------------------------------
// Symbolic series elements and the threshold reduction
// ---------------------------------------------------------------------------

/// Marginal exponent key of a Laurent monomial in the tuple
/// coefficients: per hypersurface, the (possibly negative) multiplicity
/// of each non-unit term. Monomials with equal marginals have equal
/// images under the coefficient substitution, so they are merged.
pub type MargKey = Vec<Vec<i64>>;

/// A finite sum of marginal monomials with rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaurentElem {
    /// Monomials and their coefficients (zero coefficients pruned).
    pub terms: BTreeMap<MargKey, Q>,
}

impl LaurentElem {
    fn add_term(&mut self, key: MargKey, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            // Re-fetch the key: remove zero entries to keep supports tight.
            let dead: Vec<MargKey> = self
                .terms
                .iter()
                .filter(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .collect();
            for k in dead {
                self.terms.remove(&k);
            }
        }
    }

    fn sub(&self, other: &LaurentElem) -> LaurentElem {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), -c.clone());
        }
        out
    }

    fn add(&self, other: &LaurentElem) -> LaurentElem {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    fn mul(&self, other: &LaurentElem) -> LaurentElem {
        let mut out = LaurentElem::default();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let key: MargKey = k1
                    .iter()
                    .zip(k2)
                    .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                    .collect();
                out.add_term(key, c1 * c2);
            }
        }
        out
    }

    /// Minimal monomial valuation and the keys attaining it.
    fn min_val(&self, term_vals: &[Vec<Q>]) -> Option<(Q, Vec<MargKey>)> {
        let mut best: Option<Q> = None;
        let mut mins: Vec<MargKey> = Vec::new();
        for k in self.terms.keys() {
            let v = key_val(k, term_vals);
            match &best {
                Some(b) if v > *b => {}
                Some(b) if v == *b => mins.push(k.clone()),
                _ => {
                    best = Some(v);
                    mins = vec![k.clone()];
                }
            }
        }
        best.map(|b| (b, mins))
    }
}

/// Valuation of a marginal monomial at the point underlying `term_vals`.
fn key_val(key: &MargKey, term_vals: &[Vec<Q>]) -> Q {
    let mut acc = Q::zero();
    for (slot, tv) in key.iter().zip(term_vals) {
        for (m, v) in slot.iter().zip(tv) {
            if *m != 0 {
                acc += v * Q::from_integer((*m).into());
            }
        }
    }
    acc
}

/// Marginal key of the monomial `y_t` for a tuple `t`.
fn key_of_tuple(ctx: &CellContext, t: &TupleIdx) -> MargKey {
    (0..t.len())
        .map(|i| {
            let mut slot = vec![0i64; ctx.nonunit_terms(i).len()];
            slot[t[i]] = 1;
            slot
        })
        .collect()
}

/// `key = base + j·step` for an integer `j`, if one exists.
fn key_multiple(base: &MargKey, key: &MargKey, step: &[Vec<i64>]) -> Option<i64> {
    let mut j: Option<i64> = None;
    for (slot, (b, k)) in base.iter().zip(key).enumerate() {
        for (idx, (x, y)) in b.iter().zip(k).enumerate() {
            let d = y - x;
            let s = step[slot][idx];
            if s == 0 {
                if d != 0 {
                    return None;
                }
            } else {
                if d % s != 0 {
                    return None;
                }
                let cand = d / s;
                match j {
                    None => j = Some(cand),
                    Some(prev) if prev != cand => return None,
                    _ => {}
                }
            }
        }
    }
    Some(j.unwrap_or(0))
}

/// The interaction threshold `ω̂` between two free coordinates `I` and
/// `J` at a point: how far the valuation of `q_J` can be pushed by the
/// cancellation driving `q_I`, measured relative to the tuple minimum
/// of `J`. `Inf` means the two valuations move together indefinitely.
///
/// `(r, r_prime)` is the oriented minimizing pair of `I` (both cofactors
/// nonzero).
pub fn omega_hat(
    ctx: &CellContext,
    alpha: &TropPoint,
    i_pair: (usize, usize),
    j_pair: (usize, usize),
    r: &TupleIdx,
    r_prime: &TupleIdx,
) -> Result<Val, Error> {
    let term_vals: Vec<Vec<Q>> = (0..ctx.supports.len())
        .map(|i| {
            ctx.nonunit_terms(i)
                .iter()
                .map(|(w, val)| val + w.dot_chart(&alpha.0))
                .collect()
        })
        .collect();
    let tuples = ctx.tuples();
    let nu = nu_j(ctx, alpha, j_pair)?
        .ok_or_else(|| {
            Error::hypothesis_at("coordinate has no contributing tuple", ctx.cell.to_string())
        })?
        .0;

    let dir = ctx.delta(r, i_pair)?;
    let dirp = ctx.delta(r_prime, i_pair)?;
    if dir.is_zero() || dirp.is_zero() {
        return Err(Error::invalid_input(
            "threshold reduction needs a pair with both cofactors nonzero",
        ));
    }
    let key_r = key_of_tuple(ctx, r);
    let key_rp = key_of_tuple(ctx, r_prime);
    // step = key_r − key_rp, as signed marginals.
    let step: Vec<Vec<i64>> = key_r
        .iter()
        .zip(&key_rp)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
        .collect();

    // Relation remainder: Σ_{w ∉ {r, r'}} Δ_I(w)·y_w.
    let mut rest = LaurentElem::default();
    let mut zeta = LaurentElem::default();
    for t in &tuples {
        let key = key_of_tuple(ctx, t);
        if t != r && t != r_prime {
            rest.add_term(key.clone(), Q::from_integer(ctx.delta(t, i_pair)?));
        }
        zeta.add_term(key, Q::from_integer(ctx.delta(t, j_pair)?));
    }

    let distinct_tuple_vals = {
        let mut vals: Vec<Q> = tuples
            .iter()
            .map(|t| ctx.nu_w_at(t, alpha))
            .collect();
        vals.sort();
        vals.dedup();
        vals.len()
    };
    let cap = 16 * tuples.len().max(1) * distinct_tuple_vals.max(1);

    let qdir = Q::from_integer(dir.clone());
    let qdirp = Q::from_integer(dirp.clone());
    let mut last_min: Option<Q> = None;

    for _ in 0..cap {
        if zeta.terms.is_empty() {
            return Ok(Val::Inf);
        }
        let (minval, mins) = zeta.min_val(&term_vals).expect("nonempty");
        if let Some(prev) = &last_min {
            if minval < *prev {
                return Err(Error::inconsistency(
                    "minimal valuation decreased during threshold reduction",
                ));
            }
        }
        last_min = Some(minval.clone());
        if mins.len() == 1 {
            return Ok(Val::Fin(minval - nu));
        }
        if zeta.terms.len() == 2 {
            // ζ is exactly a monomial multiple of the relation's leading
            // binomial: the two valuations track each other forever.
            let proportional = |a: &MargKey, b: &MargKey| -> bool {
                matches!(key_multiple(a, b, &step), Some(-1))
                    && &zeta.terms[b] * &qdir == &zeta.terms[a] * &qdirp
            };
            if proportional(&mins[0], &mins[1]) || proportional(&mins[1], &mins[0]) {
                return Ok(Val::Inf);
            }
        }
        // Inner reduction: clear the minimal level down to at most one
        // monomial by dividing out the pair relation.
        let mut f = zeta.clone();
        let mut g = LaurentElem::default();
        let mut progressed = false;
        for _ in 0..cap {
            let Some((fmin, fmins)) = f.min_val(&term_vals) else {
                break;
            };
            if fmin > minval || fmins.len() <= 1 {
                break;
            }
            let reference = fmins[0].clone();
            let mut jexps: Vec<(i64, MargKey)> = Vec::with_capacity(fmins.len());
            for m in &fmins {
                let Some(je) = key_multiple(&reference, m, &step) else {
                    return Err(Error::hypothesis_at(
                        format!(
                            "coefficient valuations are not sufficiently general: \
                             incomparable minimal monomials while reducing q_{}{} \
                             against q_{}{}",
                            j_pair.0, j_pair.1, i_pair.0, i_pair.1
                        ),
                        ctx.cell.to_string(),
                    ));
                };
                jexps.push((je, m.clone()));
            }
            let jmax = jexps.iter().map(|(j, _)| *j).max().expect("nonempty");
            let mut gpp = LaurentElem::default();
            for (je, m) in &jexps {
                if *je != jmax {
                    continue;
                }
                // Divide by Δ_I(r)·y_r (Laurent division: marginals may
                // go negative).
                let key: MargKey = m
                    .iter()
                    .zip(&key_r)
                    .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
                    .collect();
                gpp.add_term(key, &f.terms[m] / &qdir);
            }
            // f ← f − (Δ_I(r)·y_r + Δ_I(r')·y_{r'})·g″.
            let mut rel = LaurentElem::default();
            rel.add_term(key_r.clone(), qdir.clone());
            rel.add_term(key_rp.clone(), qdirp.clone());
            f = f.sub(&rel.mul(&gpp));
            g = g.add(&gpp);
            progressed = true;
        }
        if !progressed {
            return Err(Error::inconsistency(
                "threshold reduction stalled without progress",
            ));
        }
        // Substitute the relation: ζ ← h − g·Σ_{w∉{r,r'}} Δ_I(w)·y_w.
        zeta = f.sub(&g.mul(&rest));
    }
    Err(Error::hypothesis_at(
        "threshold reduction exceeded its iteration cap",
        ctx.cell.to_string(),
    ))
}

// ---------------------------------------------------------------------------
// Edge tangent families
// ---------------------------------------------------------------------------

/// A piecewise affine function of the edge parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseAff {
    /// Maximal pieces `(start, end, affine value)` covering `[0, ℓ]`.
    pub pieces: Vec<(Q, Val, Aff)>,
}

impl PiecewiseAff {
    /// A single affine piece covering the whole interval.
    pub fn single(aff: Aff, length: Val) -> Self {
        PiecewiseAff {
            pieces: vec![(Q::zero(), length, aff)],
        }
    }

    /// The unique affine value when there is exactly one piece.
    pub fn as_single(&self) -> Option<&Aff> {
        if self.pieces.len() == 1 {
            Some(&self.pieces[0].2)
        } else {
            None
        }
    }
}

/// The tangent-line family along an edge: every Plücker coordinate is a
/// piecewise affine function of the edge parameter (or identically
/// infinite).
#[derive(Clone, Debug)]
pub struct EdgeTangentFamily {
    /// The edge.
    pub cell: CellRef,
    /// Index pairs `J`, in ascending lexicographic order.
    pub pairs: Vec<(usize, usize)>,
    /// `q_J` per pair; `None` when identically infinite.
    pub q: Vec<Option<PiecewiseAff>>,
}

/// Compute the tangent family along an edge. Fails when a coordinate is
/// free somewhere in the edge interior (the family would not be a
/// function of the edge parameter) or when the collision locus is
/// infinite.
pub fn edge_tangents(ctx: &CellContext) -> Result<EdgeTangentFamily, Error> {
    let (_, length) = ctx
        .dir
        .clone()
        .ok_or_else(|| Error::invalid_input("edge_tangents needs an edge cell"))?;
    let tuples = ctx.tuples();
    let affs: Vec<Aff> = tuples.iter().map(|t| ctx.nu_w_aff(t)).collect();

    // Locate interior collision parameters and verify everything stays
    // forced there.
    let mut crit: Vec<Q> = Vec::new();
    for a in 0..tuples.len() {
        for b in a + 1..tuples.len() {
            let d = affs[a].sub(&affs[b]);
            if d.is_zero() {
                return Err(Error::hypothesis_at(
                    "valuations collide along the whole edge (non-colliding assumption fails)",
                    ctx.cell.to_string(),
                ));
            }
            if !d.b.is_zero() {
                let s = -&d.a / &d.b;
                if s.is_positive() && Val::Fin(s.clone()) < length {
                    crit.push(s);
                }
            }
        }
    }
    crit.sort();
    crit.dedup();
    let jps = ctx.index_pairs();
    for s in &crit {
        let point = TropPoint(
            ctx.base
                .iter()
                .zip(&ctx.dir.as_ref().expect("edge").0)
                .map(|(b, &d)| b + Q::from_integer(d.into()) * s)
                .collect(),
        );
        for &j in &jps {
            if classify(ctx, &point, j)?.is_free() {
                return Err(Error::hypothesis_at(
                    format!(
                        "coordinate q_{}{} is free at an interior edge point",
                        j.0, j.1
                    ),
                    ctx.cell.to_string(),
                ));
            }
        }
    }

    let mut q = Vec::with_capacity(jps.len());
    for &j in &jps {
        let mut fns: Vec<Aff> = Vec::new();
        for (t, aff) in tuples.iter().zip(&affs) {
            if !ctx.delta(t, j)?.is_zero() {
                fns.push(aff.clone());
            }
        }
        if fns.is_empty() {
            q.push(None);
            continue;
        }
        let offset = ctx.sum_alpha_complement(j);
        let env = lower_envelope(&fns, &length);
        let pieces: Vec<(Q, Val, Aff)> = env
            .into_iter()
            .map(|p| (p.start, p.end, p.aff.sub(&offset)))
            .collect();
        q.push(Some(PiecewiseAff { pieces }));
    }
    Ok(EdgeTangentFamily {
        cell: ctx.cell,
        pairs: jps,
        q,
    })
}

// ---------------------------------------------------------------------------
// Vertex tangent families
// ---------------------------------------------------------------------------

/// One one-parameter branch of the tangent family at a vertex: the
/// Plücker vector is `base + slacks(s)` for `s ∈ [0, smax]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexBranch {
    /// Slack of each coordinate as an affine function of the branch
    /// parameter (index pairs in ascending lexicographic order).
    pub slacks: Vec<Aff>,
    /// Upper bound of the branch parameter.
    pub smax: Val,
}

/// The full tangent family at a vertex.
#[derive(Clone, Debug)]
pub struct VertexTangentFamily {
    /// The vertex.
    pub cell: CellRef,
    /// Index pairs `J`, ascending lexicographic.
    pub pairs: Vec<(usize, usize)>,
    /// `q_J` with all slacks zero (`Inf` for degenerate coordinates).
    pub base: Vec<Val>,
    /// Per-coordinate classification.
    pub status: Vec<CancelStatus>,
    /// Simultaneity classes of the free coordinates (indices into
    /// `pairs`).
    pub classes: Vec<Vec<usize>>,
    /// Common pairwise threshold of each class (`Inf` for singletons and
    /// indefinitely tracking classes).
    pub thresholds: Vec<Val>,
    /// The one-parameter branches sweeping out the family.
    pub branches: Vec<VertexBranch>,
}

/// Compute the tangent family at a vertex.
pub fn vertex_tangents(ctx: &CellContext) -> Result<VertexTangentFamily, Error> {
    if ctx.i0.is_none() {
        return Err(Error::invalid_input("vertex_tangents needs a vertex cell"));
    }
    let alpha = TropPoint(ctx.base.clone());
    let jps = ctx.index_pairs();

    let mut base = Vec::with_capacity(jps.len());
    let mut status = Vec::with_capacity(jps.len());
    for &j in &jps {
        let st = classify(ctx, &alpha, j)?;
        match nu_j(ctx, &alpha, j)? {
            Some((nu, _)) => base.push(Val::Fin(nu - ctx.sum_alpha_complement(j).a.clone())),
            None => base.push(Val::Inf),
        }
        status.push(st);
    }

    // Simultaneity classes: free coordinates with proportional pair
    // cofactors (cross-multiplied to stay exact).
    let free: Vec<usize> = (0..jps.len()).filter(|&k| status[k].is_free()).collect();
    let pair_of = |k: usize| -> (&TupleIdx, &TupleIdx) {
        match &status[k] {
            CancelStatus::Free { r, r_prime } => (r, r_prime),
            _ => unreachable!("filtered to free"),
        }
    };
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &k in &free {
        let (rk, rpk) = pair_of(k);
        let dk = ctx.delta(rk, jps[k])?;
        let dpk = ctx.delta(rpk, jps[k])?;
        let mut placed = false;
        for class in classes.iter_mut() {
            let m = class[0];
            let (rm, rpm) = pair_of(m);
            let dm = ctx.delta(rm, jps[m])?;
            let dpm = ctx.delta(rpm, jps[m])?;
            if &dk * &dpm == &dm * &dpk {
                class.push(k);
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push(vec![k]);
        }
    }

    // Pairwise thresholds within each class.
    let mut thresholds: Vec<Val> = Vec::with_capacity(classes.len());
    for class in &classes {
        if class.len() == 1 {
            thresholds.push(Val::Inf);
            continue;
        }
        let mut common: Option<Val> = None;
        for (ai, &a) in class.iter().enumerate() {
            for &b in &class[ai + 1..] {
                let (ra, rpa) = pair_of(a);
                let (rb, rpb) = pair_of(b);
                let om_ab = omega_hat(ctx, &alpha, jps[a], jps[b], ra, rpa)?;
                let om_ba = omega_hat(ctx, &alpha, jps[b], jps[a], rb, rpb)?;
                if om_ab != om_ba {
                    return Err(Error::inconsistency(format!(
                        "asymmetric thresholds between q_{}{} and q_{}{}: {om_ab} vs {om_ba}",
                        jps[a].0, jps[a].1, jps[b].0, jps[b].1
                    )));
                }
                match &common {
                    None => common = Some(om_ab),
                    Some(c) if *c == om_ab => {}
                    Some(c) => {
                        return Err(Error::hypothesis_at(
                            format!(
                                "unequal thresholds within one simultaneity class \
                                 ({c} vs {om_ab})"
                            ),
                            ctx.cell.to_string(),
                        ));
                    }
                }
            }
        }
        thresholds.push(common.expect("class has a pair"));
    }

    // Branch enumeration: each class moves one at a time.
    let mut branches: Vec<VertexBranch> = Vec::new();
    for (class, threshold) in classes.iter().zip(&thresholds) {
        let mut diag = vec![Aff::zero(); jps.len()];
        for &k in class {
            diag[k] = Aff::new_int(0, 1);
        }
        if class.len() == 1 {
            branches.push(VertexBranch {
                slacks: diag,
                smax: Val::Inf,
            });
            continue;
        }
        match threshold {
            Val::Inf => {
                // The coordinates track each other indefinitely.
                branches.push(VertexBranch {
                    slacks: diag,
                    smax: Val::Inf,
                });
            }
            Val::Fin(om) => {
                if om.is_positive() {
                    branches.push(VertexBranch {
                        slacks: diag,
                        smax: Val::Fin(om.clone()),
                    });
                }
                for &kfree in class {
                    let mut slacks = vec![Aff::zero(); jps.len()];
                    for &k in class {
                        slacks[k] = if k == kfree {
                            Aff {
                                a: om.clone(),
                                b: Q::one(),
                            }
                        } else {
                            Aff::constant(om.clone())
                        };
                    }
                    branches.push(VertexBranch {
                        slacks,
                        smax: Val::Inf,
                    });
                }
            }
        }
    }

    Ok(VertexTangentFamily {
        cell: ctx.cell,
        pairs: jps,
        base,
        status,
        classes,
        thresholds,
        branches,
    })
}

// ---------------------------------------------------------------------------
// Identically vanishing Plücker coordinates
// ---------------------------------------------------------------------------

/// Index pairs whose Plücker coordinate is identically infinite on the
/// whole curve (every cell degenerate for that pair). These coordinates
/// are omitted from the dual equations.
pub fn vanishing_pluckers(
    curve: &TropicalCurve,
    hs: &[ValuedSupport],
) -> Result<Vec<(usize, usize)>, Error> {
    let n = curve.n;
    let mut cells: Vec<CellContext> = Vec::new();
    for vi in 0..curve.vertices.len() {
        cells.push(normalize_cell(curve, CellRef::Vertex(vi), hs)?);
    }
    for ei in 0..curve.edges.len() {
        cells.push(normalize_cell(curve, CellRef::Edge(ei), hs)?);
    }
    let jps: Vec<(usize, usize)> = {
        let mut out = Vec::new();
        for i in 0..=n {
            for j in i + 1..=n {
                out.push((i, j));
            }
        }
        out
    };
    let mut out = Vec::new();
    'pairs: for &j in &jps {
        for ctx in &cells {
            for t in ctx.tuples() {
                if !ctx.delta(&t, j)?.is_zero() {
                    continue 'pairs;
                }
            }
        }
        out.push(j);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Generic-position fast paths
// ---------------------------------------------------------------------------

/// Tangent family along an edge in generic position: every Plücker
/// coordinate is `−Σ_{j∉J} α_j`. Applies when the edge direction lies in
/// no proper coordinate subspace cut out by a pair complement; returns
/// `None` (with a reason) otherwise.
pub fn generic_edge_tangents(curve: &TropicalCurve, ei: usize) -> Option<Vec<Aff>> {
    let n = curve.n;
    let edge = curve.edges.get(ei)?;
    for i in 0..=n {
        for j in i + 1..=n {
            let complement: Vec<usize> = (0..=n).filter(|&k| k != i && k != j).collect();
            if crate::lattice::chart_dir_in_coord_span(&edge.dir, &complement) {
                return None;
            }
        }
    }
    let dir_q: Vec<Q> = edge.dir.iter().map(|&d| Q::from_integer(d.into())).collect();
    let mut out = Vec::new();
    for i in 0..=n {
        for j in i + 1..=n {
            let mut a = Q::zero();
            let mut b = Q::zero();
            for k in 1..=n {
                if k != i && k != j {
                    a -= &edge.base[k - 1];
                    b -= &dir_q[k - 1];
                }
            }
            out.push(Aff { a, b });
        }
    }
    Some(out)
}

/// Chart image of the coordinate direction `e_m` (with `e_0` mapping to
/// `(−1, …, −1)`).
fn chart_unit(n: usize, m: usize) -> Vec<Q> {
    if m == 0 {
        vec![-Q::one(); n]
    } else {
        let mut v = vec![Q::zero(); n];
        v[m - 1] = Q::one();
        v
    }
}

/// Tangent family at a vertex in generic position: the base Plücker
/// vector `−Σ_{j∉J} α_j` with each coordinate free one at a time, except
/// those pinned to the base value by an adjacent edge lying in the
/// corresponding coordinate subspace.
///
/// The position hypotheses are deliberately strong (the span of the
/// adjacent edge directions must avoid every coordinate direction, which
/// rules out any simultaneity class); `None` means the hypotheses fail
/// and the general machinery must be used.
pub fn generic_vertex_tangents(curve: &TropicalCurve, vi: usize) -> Option<VertexTangentFamily> {
    let n = curve.n;
    let alpha = curve.vertices.get(vi)?;
    let incident = curve.incident_edges(vi);
    let dirs: Vec<Vec<i64>> = incident
        .iter()
        .map(|&ei| curve.outgoing_dir(ei, vi))
        .collect();
    // The span of the star must leave every pair-complement subspace...
    for i in 0..=n {
        for j in i + 1..=n {
            let complement: Vec<usize> = (0..=n).filter(|&k| k != i && k != j).collect();
            if dirs
                .iter()
                .all(|d| crate::lattice::chart_dir_in_coord_span(d, &complement))
            {
                return None;
            }
        }
    }
    // ...and must not contain any coordinate direction (otherwise free
    // coordinates can move simultaneously and the one-at-a-time
    // conclusion fails).
    let span: Vec<Vec<Q>> = dirs
        .iter()
        .map(|d| d.iter().map(|&x| Q::from_integer(x.into())).collect())
        .collect();
    let rank0 = crate::linalg::rank_q(&span);
    for m in 0..=n {
        let mut with = span.clone();
        with.push(chart_unit(n, m));
        if crate::linalg::rank_q(&with) == rank0 {
            return None;
        }
    }

    let mut jps = Vec::new();
    for i in 0..=n {
        for j in i + 1..=n {
            jps.push((i, j));
        }
    }
    let mut base = Vec::with_capacity(jps.len());
    let mut status = Vec::with_capacity(jps.len());
    let mut classes = Vec::new();
    let mut thresholds = Vec::new();
    let mut branches = Vec::new();
    for (k, &(i, j)) in jps.iter().enumerate() {
        let mut b = Q::zero();
        for c in 1..=n {
            if c != i && c != j {
                b -= &alpha.0[c - 1];
            }
        }
        base.push(Val::Fin(b));
        // Pinned when some adjacent edge lies in the coordinate subspace
        // of the pair complement.
        let complement: Vec<usize> = (0..=n).filter(|&k2| k2 != i && k2 != j).collect();
        let pinned = dirs
            .iter()
            .any(|d| crate::lattice::chart_dir_in_coord_span(d, &complement));
        if pinned {
            status.push(CancelStatus::Forced(ForcedCase::NoMinimalPair));
        } else {
            // Free one at a time.
            let r: TupleIdx = Vec::new();
            status.push(CancelStatus::Free {
                r: r.clone(),
                r_prime: r,
            });
            classes.push(vec![k]);
            thresholds.push(Val::Inf);
            let mut slacks = vec![Aff::zero(); jps.len()];
            slacks[k] = Aff::new_int(0, 1);
            branches.push(VertexBranch {
                slacks,
                smax: Val::Inf,
            });
        }
    }
    Some(VertexTangentFamily {
        cell: CellRef::Vertex(vi),
        pairs: jps,
        base,
        status,
        classes,
        thresholds,
        branches,
    })
}

// ---------------------------------------------------------------------------
// Tropical Plücker vectors and tropical lines
// ---------------------------------------------------------------------------

/// A tropical line in `T^n`, described by the attachment vertex of each
/// coordinate ray `e_i` (homogeneous coordinates, length `n+1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropLine {
    /// `ray_vertices[i]` is the point where the ray in direction `e_i`
    /// attaches.
    pub ray_vertices: Vec<Vec<Q>>,
}

impl TropLine {
    /// The attachment vertex of ray `e_i` in the chart `α_0 = 0`.
    pub fn ray_vertex_chart(&self, i: usize) -> Vec<Q> {
        let v = &self.ray_vertices[i];
        v[1..].iter().map(|x| x - &v[0]).collect()
    }
}

/// Look up `β_{ij}` in a vector indexed by ascending lexicographic pairs.
pub fn beta_at(beta: &[Q], n: usize, i: usize, j: usize) -> &Q {
    assert_ne!(i, j);
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    let mut idx = 0;
    for x in 0..a {
        idx += n - x;
    }
    &beta[idx + (b - a - 1)]
}

/// Reconstruct the tropical line with tropical Plücker vector `beta`
/// (finite coordinates, ascending lexicographic pair order).
pub fn plucker_to_line(n: usize, beta: &[Q]) -> TropLine {
    let mut ray_vertices = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut v = vec![Q::zero(); n + 1];
        for j in 0..=n {
            if j != i {
                v[j] = beta_at(beta, n, i, j).clone();
            }
        }
        // The i-th coordinate is the largest consistent value.
        let mut best: Option<Q> = None;
        for j in 0..=n {
            for k in j + 1..=n {
                if j == i || k == i {
                    continue;
                }
                let cand =
                    beta_at(beta, n, i, j) + beta_at(beta, n, i, k) - beta_at(beta, n, j, k);
                if best.as_ref().map_or(true, |b| cand > *b) {
                    best = Some(cand);
                }
            }
        }
        v[i] = best.expect("n >= 2");
        ray_vertices.push(v);
    }
    TropLine { ray_vertices }
}

/// Tropical Plücker vector of the line through two points given in
/// homogeneous coordinates (stable 2×2 tropical minors), ascending
/// lexicographic pair order.
pub fn line_plucker_from_points(p: &[Q], q: &[Q]) -> Vec<Q> {
    let n = p.len() - 1;
    let mut out = Vec::new();
    for i in 0..=n {
        for j in i + 1..=n {
            out.push(std::cmp::min(&p[i] + &q[j], &p[j] + &q[i]));
        }
    }
    out
}

/// Whether the three-term tropical Plücker relations hold for `beta`
/// (minimum attained at least twice on every 4-subset). Vacuous for
/// `n < 3`.
pub fn plucker_relations_hold(n: usize, beta: &[Q]) -> bool {
    for s in crate::lattice::subsets(n + 1, 4) {
        let (i, j, k, l) = (s[0], s[1], s[2], s[3]);
        let a = beta_at(beta, n, i, j) + beta_at(beta, n, k, l);
        let b = beta_at(beta, n, i, k) + beta_at(beta, n, j, l);
        let c = beta_at(beta, n, i, l) + beta_at(beta, n, j, k);
        let m = a.clone().min(b.clone()).min(c.clone());
        let hits = [&a, &b, &c].iter().filter(|x| ***x == m).count();
        if hits < 2 {
            return false;
        }
    }
    true
}
