//! Per-cell normalization of the defining hypersurfaces: translation so
//! that the minimal terms on the cell include the monomial 1 at
//! valuation 0, extraction of the two-term/three-term exponent data, and
//! the tuple bookkeeping shared by the tangent computations.

use num_traits::Zero;

use crate::curve::{CellRef, TropicalCurve};
use crate::error::Error;
use crate::hypersurface::{min_terms, TropPoint, ValuedSupport};
use crate::lattice::{minor_delta, ExpVec, IntMatrix};
use crate::rat::{Aff, Q, Val, Z};

/// A curve cell together with the normalized supports and the exponent
/// tuples `v` (and `v′`, `i0` at a vertex) of its normal form.
#[derive(Clone, Debug)]
pub struct CellContext {
    /// Which cell of the curve this is.
    pub cell: CellRef,
    /// Ambient dimension `n`.
    pub n: usize,
    /// Supports after the monomial rescale: exponent 0 is a minimal term
    /// with valuation 0 everywhere on the cell.
    pub supports: Vec<ValuedSupport>,
    /// The distinguished minimal exponents `(v_1, …, v_{n−1})`.
    pub v: Vec<ExpVec>,
    /// At a vertex: the tuple differing from `v` exactly in slot `i0`.
    pub v_prime: Option<Vec<ExpVec>>,
    /// Index of the three-term hypersurface (vertices only).
    pub i0: Option<usize>,
    /// Basepoint of the cell (the vertex, or the edge's `α(0)`).
    pub base: Vec<Q>,
    /// For edges: primitive direction and parameter length.
    pub dir: Option<(Vec<i64>, Val)>,
}

/// One choice of non-unit exponent per hypersurface: an element of
/// `𝒜 = Π(𝒜_i ∖ {0})`, stored as term indices into the normalized
/// supports (skipping the unit).
pub type TupleIdx = Vec<usize>;

impl CellContext {
    /// Whether the cell is a vertex.
    pub fn is_vertex(&self) -> bool {
        self.v_prime.is_some()
    }

    /// The non-unit terms of normalized support `i` (the set
    /// `𝒜_i ∖ {0}`), in construction order.
    pub fn nonunit_terms(&self, i: usize) -> Vec<(ExpVec, Q)> {
        self.supports[i]
            .terms()
            .iter()
            .filter(|(w, _)| !w.is_zero())
            .cloned()
            .collect()
    }

    /// All tuples of `𝒜`, as index vectors, in lexicographic order.
    pub fn tuples(&self) -> Vec<TupleIdx> {
        let sizes: Vec<usize> = (0..self.supports.len())
            .map(|i| self.nonunit_terms(i).len())
            .collect();
        let mut out = Vec::new();
        let mut cur = vec![0usize; sizes.len()];
        loop {
            out.push(cur.clone());
            let mut k = sizes.len();
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                cur[k] += 1;
                if cur[k] < sizes[k] {
                    break;
                }
                cur[k] = 0;
            }
        }
    }

    /// The exponent vectors of a tuple.
    pub fn tuple_exponents(&self, t: &TupleIdx) -> Vec<ExpVec> {
        t.iter()
            .enumerate()
            .map(|(i, &k)| self.nonunit_terms(i)[k].0.clone())
            .collect()
    }

    /// The tuple index corresponding to given exponents, if present.
    pub fn tuple_of_exponents(&self, exps: &[ExpVec]) -> Option<TupleIdx> {
        exps.iter()
            .enumerate()
            .map(|(i, w)| {
                self.nonunit_terms(i)
                    .iter()
                    .position(|(u, _)| u == w)
            })
            .collect()
    }

    /// `Δ_J(w)` for a tuple `w` (rows are the tuple's exponents).
    pub fn delta(&self, t: &TupleIdx, j: (usize, usize)) -> Result<Z, Error> {
        let m = IntMatrix::from_expvecs(&self.tuple_exponents(t));
        minor_delta(&m, j)
    }

    /// `ν_w(α) = Σ_i (val(c_{i,w_i}) + α·w_i)` for a tuple at a point.
    pub fn nu_w_at(&self, t: &TupleIdx, alpha: &TropPoint) -> Q {
        let mut acc = Q::zero();
        for (i, &k) in t.iter().enumerate() {
            let (w, val) = &self.nonunit_terms(i)[k];
            acc += val + w.dot_chart(&alpha.0);
        }
        acc
    }

    /// `ν_w` as an affine function of the edge parameter (edges only).
    pub fn nu_w_aff(&self, t: &TupleIdx) -> Aff {
        let (dir, _) = self.dir.as_ref().expect("edge cell");
        let dir_q: Vec<Q> = dir.iter().map(|&d| Q::from_integer(d.into())).collect();
        let mut a = Q::zero();
        let mut b = Q::zero();
        for (i, &k) in t.iter().enumerate() {
            let (w, val) = &self.nonunit_terms(i)[k];
            a += val + w.dot_chart(&self.base);
            b += w.dot_chart(&dir_q);
        }
        Aff { a, b }
    }

    /// All index pairs `J ⊂ {0..n}` in ascending lexicographic order.
    pub fn index_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..=self.n {
            for j in i + 1..=self.n {
                out.push((i, j));
            }
        }
        out
    }

    /// `Σ_{j∉J} α_j` as an affine function of the edge parameter (for
    /// vertices, a constant). Includes `α_0 = 0` when `0 ∉ J`.
    pub fn sum_alpha_complement(&self, j: (usize, usize)) -> Aff {
        let dir_q: Vec<Q> = match &self.dir {
            Some((d, _)) => d.iter().map(|&x| Q::from_integer(x.into())).collect(),
            None => vec![Q::zero(); self.n],
        };
        let mut a = Q::zero();
        let mut b = Q::zero();
        for k in 1..=self.n {
            if k != j.0 && k != j.1 {
                a += &self.base[k - 1];
                b += &dir_q[k - 1];
            }
        }
        Aff { a, b }
    }
}

/// Normalize the supports on a cell of the curve.
///
/// The unit is the first term (in construction order) among the minimal
/// terms on the cell; the remaining minimal terms give `v` (and `v′` at
/// a vertex), also in construction order.
pub fn normalize_cell(
    curve: &TropicalCurve,
    cell: CellRef,
    hs: &[ValuedSupport],
) -> Result<CellContext, Error> {
    let n = curve.n;
    let (rep, base, dir) = match cell {
        CellRef::Vertex(vi) => {
            let p = curve
                .vertices
                .get(vi)
                .ok_or_else(|| Error::invalid_input("vertex index out of range"))?;
            (p.clone(), p.0.clone(), None)
        }
        CellRef::Edge(ei) => {
            let e = curve
                .edges
                .get(ei)
                .ok_or_else(|| Error::invalid_input("edge index out of range"))?;
            (
                e.interior_point(),
                e.base.clone(),
                Some((e.dir.clone(), e.length.clone())),
            )
        }
    };
    let is_vertex = dir.is_none();

    let mut supports = Vec::new();
    let mut v = Vec::new();
    let mut v_prime_slot: Option<(usize, ExpVec)> = None;
    for (i, h) in hs.iter().enumerate() {
        let mins = min_terms(h, &rep);
        let unit = mins
            .first()
            .expect("minimal set nonempty")
            .clone();
        match (is_vertex, mins.len()) {
            (false, 2) => {}
            (true, 2) => {}
            (true, 3) => {
                if v_prime_slot.is_some() {
                    return Err(Error::hypothesis_at(
                        "two hypersurfaces have three minimal terms at a vertex \
                         (exactly one three-term hypersurface expected)",
                        cell.to_string(),
                    ));
                }
                v_prime_slot = Some((i, &mins[2] - &unit));
            }
            (_, k) => {
                return Err(Error::hypothesis_at(
                    format!(
                        "hypersurface {} has {} minimal terms on the cell (expected 2 or 3)",
                        i + 1,
                        k
                    ),
                    cell.to_string(),
                ));
            }
        }
        v.push(&mins[1] - &unit);
        let unit_val = h
            .valuation_of(&unit)
            .expect("unit is a term")
            .clone();
        supports.push(h.translated(&unit, &unit_val));
    }

    let (i0, v_prime) = if is_vertex {
        let (i0, vp) = v_prime_slot.ok_or_else(|| {
            Error::hypothesis_at(
                "no hypersurface has three minimal terms at the vertex",
                cell.to_string(),
            )
        })?;
        let mut vp_tuple = v.clone();
        vp_tuple[i0] = vp;
        (Some(i0), Some(vp_tuple))
    } else {
        if v_prime_slot.is_some() {
            return Err(Error::hypothesis_at(
                "three minimal terms in the relative interior of an edge",
                cell.to_string(),
            ));
        }
        (None, None)
    };

    Ok(CellContext {
        cell,
        n,
        supports,
        v,
        v_prime,
        i0,
        base,
        dir,
    })
}

/// A maximal piece of a lower envelope over an edge parameter interval.
#[derive(Clone, Debug)]
pub struct EnvelopePiece {
    /// Piece interval start.
    pub start: Q,
    /// Piece interval end (may be infinite).
    pub end: Val,
    /// The envelope restricted to the piece.
    pub aff: Aff,
    /// Indices of the functions achieving the minimum on the piece.
    pub minimizers: Vec<usize>,
}

/// Lower envelope of affine functions over `[0, ℓ]`.
///
/// Returns the maximal subintervals on which the set of minimizers is
/// constant; empty input yields an empty envelope.
pub fn lower_envelope(fns: &[Aff], length: &Val) -> Vec<EnvelopePiece> {
    if fns.is_empty() {
        return Vec::new();
    }
    // Breakpoint candidates: pairwise intersections inside the interval.
    let mut cuts: Vec<Q> = vec![Q::zero()];
    if let Val::Fin(l) = length {
        cuts.push(l.clone());
    }
    for i in 0..fns.len() {
        for k in i + 1..fns.len() {
            let db = &fns[i].b - &fns[k].b;
            if db.is_zero() {
                continue;
            }
            let s = (&fns[k].a - &fns[i].a) / db;
            if s > Q::zero() && Val::Fin(s.clone()) < *length {
                cuts.push(s);
            }
        }
    }
    cuts.sort();
    cuts.dedup();

    let two = Q::from_integer(2.into());
    let mut pieces: Vec<EnvelopePiece> = Vec::new();
    for (idx, start) in cuts.iter().enumerate() {
        let end: Val = cuts
            .get(idx + 1)
            .map(|c| Val::Fin(c.clone()))
            .unwrap_or_else(|| length.clone());
        if Val::Fin(start.clone()) >= end {
            continue;
        }
        // Sample the relative interior of the piece.
        let sample = match &end {
            Val::Fin(e) => (start + e) / &two,
            Val::Inf => start + Q::from_integer(1.into()),
        };
        let vals: Vec<Q> = fns.iter().map(|f| f.eval(&sample)).collect();
        let min = vals.iter().min().expect("nonempty").clone();
        let minimizers: Vec<usize> = (0..fns.len()).filter(|&i| vals[i] == min).collect();
        let aff = fns[minimizers[0]].clone();
        // Merge with the previous piece when the minimizer set persists.
        if let Some(last) = pieces.last_mut() {
            if last.minimizers == minimizers {
                last.end = end;
                continue;
            }
        }
        pieces.push(EnvelopePiece {
            start: start.clone(),
            end,
            aff,
            minimizers,
        });
    }
    pieces
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::tests::{cubic_system, p3_system};
    use crate::curve::intersect_curve;
    use crate::rat::qi;

    fn ev(v: &[i64]) -> ExpVec {
        ExpVec::new(v.to_vec()).unwrap()
    }

    #[test]
    fn normalize_v1() {
        let hs = p3_system();
        let curve = intersect_curve(&hs).unwrap();
        let vi = curve
            .vertex_index(&TropPoint(vec![qi(0), qi(0), qi(0)]))
            .unwrap();
        let ctx = normalize_cell(&curve, CellRef::Vertex(vi), &hs).unwrap();
        assert_eq!(ctx.v, vec![ev(&[2, 0, 1, -3]), ev(&[0, 1, 1, -2])]);
        assert_eq!(
            ctx.v_prime,
            Some(vec![ev(&[1, 0, 3, -4]), ev(&[0, 1, 1, -2])])
        );
        assert_eq!(ctx.i0, Some(0));
        // Unit at valuation zero on the cell.
        for s in &ctx.supports {
            assert_eq!(s.valuation_of(&ExpVec::zeros(4)), Some(&qi(0)));
        }
    }

    #[test]
    fn normalize_e2() {
        let hs = p3_system();
        let curve = intersect_curve(&hs).unwrap();
        let ei = curve
            .edges
            .iter()
            .position(|e| e.base == vec![qi(3), qi(0), qi(0)] && e.dir == vec![0, 1, 2])
            .unwrap();
        let ctx = normalize_cell(&curve, CellRef::Edge(ei), &hs).unwrap();
        assert_eq!(ctx.v, vec![ev(&[-1, 0, 2, -1]), ev(&[1, -1, 0, 0])]);
        assert!(ctx.v_prime.is_none());
    }

    #[test]
    fn normalize_cubic_eprime() {
        let hs = cubic_system();
        let curve = intersect_curve(&hs).unwrap();
        let ei = curve.edges.iter().position(|e| e.dir == vec![0, -1]).unwrap();
        let ctx = normalize_cell(&curve, CellRef::Edge(ei), &hs).unwrap();
        assert_eq!(ctx.v, vec![ev(&[-2, 2, 0])]);
    }

    #[test]
    fn tuples_and_deltas() {
        let hs = p3_system();
        let curve = intersect_curve(&hs).unwrap();
        let vi = curve
            .vertex_index(&TropPoint(vec![qi(0), qi(0), qi(0)]))
            .unwrap();
        let ctx = normalize_cell(&curve, CellRef::Vertex(vi), &hs).unwrap();
        let tuples = ctx.tuples();
        assert_eq!(tuples.len(), 4);
        // Δ_{13}((v1, w)) = −1 with w = (1,−1,0,0).
        let t = ctx
            .tuple_of_exponents(&[ev(&[2, 0, 1, -3]), ev(&[1, -1, 0, 0])])
            .unwrap();
        assert_eq!(ctx.delta(&t, (1, 3)).unwrap(), Z::from(-1));
        // ν_w at the vertex: val 3 from the t³ term.
        assert_eq!(ctx.nu_w_at(&t, &TropPoint(vec![qi(0), qi(0), qi(0)])), qi(3));
    }

    #[test]
    fn envelope_basic() {
        // min(3, s, 2s−1) on [0, ∞).
        let fns = vec![Aff::new_int(3, 0), Aff::new_int(0, 1), Aff::new_int(-1, 2)];
        let env = lower_envelope(&fns, &Val::Inf);
        // On [0,1] the minimum is 2s−1, on [1,3] it is s, beyond 3 it is
        // the constant 3.
        assert_eq!(env.len(), 3);
        assert_eq!(env[0].minimizers, vec![2]);
        assert_eq!(env[0].end, Val::Fin(qi(1)));
        assert_eq!(env[1].minimizers, vec![1]);
        assert_eq!(env[1].end, Val::Fin(qi(3)));
        assert_eq!(env[2].minimizers, vec![0]);
        assert_eq!(env[2].end, Val::Inf);
    }
}
