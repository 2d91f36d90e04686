//! A single tropical hypersurface: valued supports, min-term queries and
//! tropical smoothness via the regular subdivision.

use num_traits::Zero;

use crate::error::Error;
use crate::lattice::{lattice_index_i64, ExpVec};
use crate::linalg;
use crate::rat::Q;

/// One hypersurface, tropically: a finite support of degree-zero Laurent
/// exponent vectors, each with an exact rational coefficient valuation.
///
/// Term order is preserved from construction; it is the tie-breaking
/// order used by cell normalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuedSupport {
    terms: Vec<(ExpVec, Q)>,
}

/// A point of the tropical torus `T^n` in the chart `α_0 = 0`
/// (coordinates `(α_1 − α_0, …, α_n − α_0)`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TropPoint(pub Vec<Q>);

impl TropPoint {
    /// The origin of `T^n`.
    pub fn origin(n: usize) -> Self {
        TropPoint(vec![Q::zero(); n])
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl ValuedSupport {
    /// Build a valued support. Requires at least two terms, all exponent
    /// vectors distinct and in the degree-zero lattice, all valuations
    /// finite.
    pub fn new(terms: Vec<(ExpVec, Q)>) -> Result<Self, Error> {
        if terms.len() < 2 {
            return Err(Error::invalid_input(
                "a hypersurface support needs at least two terms",
            ));
        }
        let len = terms[0].0.len();
        for (w, _) in &terms {
            if w.len() != len {
                return Err(Error::invalid_input("mixed exponent-vector lengths"));
            }
            if w.0.iter().sum::<i64>() != 0 {
                return Err(Error::invalid_input(format!(
                    "exponent vector {:?} is not degree-zero",
                    w.0
                )));
            }
        }
        for i in 0..terms.len() {
            for j in i + 1..terms.len() {
                if terms[i].0 == terms[j].0 {
                    return Err(Error::invalid_input(format!(
                        "duplicate exponent vector {:?}",
                        terms[i].0 .0
                    )));
                }
            }
        }
        Ok(ValuedSupport { terms })
    }

    /// The terms, in construction order.
    pub fn terms(&self) -> &[(ExpVec, Q)] {
        &self.terms
    }

    /// Number of terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Always false for well-formed supports.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Ambient `n+1` (length of exponent vectors).
    pub fn ambient(&self) -> usize {
        self.terms[0].0.len()
    }

    /// The valuation attached to the term `w`, if present.
    pub fn valuation_of(&self, w: &ExpVec) -> Option<&Q> {
        self.terms.iter().find(|(u, _)| u == w).map(|(_, v)| v)
    }

    /// Translate the support by `−u` and shift valuations by `−c`
    /// (i.e. divide `f` by the monomial with exponent `u` and valuation
    /// `c`). Does not change which terms are minimal anywhere.
    pub fn translated(&self, u: &ExpVec, c: &Q) -> ValuedSupport {
        ValuedSupport {
            terms: self
                .terms
                .iter()
                .map(|(w, v)| (w - u, v - c))
                .collect(),
        }
    }
}

/// The valuation of the term `w` of `s` at the point `α`:
/// `val(c_w) + α·w`.
pub fn term_valuation(s: &ValuedSupport, w: &ExpVec, alpha: &TropPoint) -> Result<Q, Error> {
    let val = s
        .valuation_of(w)
        .ok_or_else(|| Error::invalid_input(format!("term {:?} absent from support", w.0)))?;
    Ok(val + w.dot_chart(&alpha.0))
}

/// The set of terms of `s` achieving the minimal valuation at `α`,
/// in construction order.
pub fn min_terms(s: &ValuedSupport, alpha: &TropPoint) -> Vec<ExpVec> {
    let vals: Vec<Q> = s
        .terms
        .iter()
        .map(|(w, v)| v + w.dot_chart(&alpha.0))
        .collect();
    let min = vals.iter().min().expect("nonempty support").clone();
    s.terms
        .iter()
        .zip(&vals)
        .filter(|(_, v)| **v == min)
        .map(|((w, _), _)| w.clone())
        .collect()
}

/// The minimal valuation of `s` at `α` (the tropical evaluation).
pub fn trop_eval(s: &ValuedSupport, alpha: &TropPoint) -> Q {
    s.terms
        .iter()
        .map(|(w, v)| v + w.dot_chart(&alpha.0))
        .min()
        .expect("nonempty support")
}

/// Maximal cells of the regular subdivision of the support of `s`
/// induced by the lower convex hull of the valuation lift.
///
/// Points are taken in the chart `Z^n` (coordinate 0 of each exponent
/// vector dropped). Each cell is returned as the set of term indices
/// lying on the supporting affine functional.
pub fn regular_subdivision(s: &ValuedSupport) -> Vec<Vec<usize>> {
    let pts: Vec<Vec<Q>> = s
        .terms
        .iter()
        .map(|(w, _)| w.0[1..].iter().map(|&x| Q::from_integer(x.into())).collect())
        .collect();
    let lifts: Vec<Q> = s.terms.iter().map(|(_, v)| v.clone()).collect();
    let k = pts.len();
    let n = pts[0].len();

    // Dimension of the affine hull of the support.
    let diffs: Vec<Vec<Q>> = (1..k).map(|i| linalg::vsub(&pts[i], &pts[0])).collect();
    let d = linalg::rank_q(&diffs);

    // A supporting functional on the affine hull is determined by d+1
    // affinely independent points with prescribed values. For each such
    // subset, solve for the functional ℓ(x) = c·x + c0 restricted to the
    // hull (we solve the interpolation system in the full chart, adding
    // hull constraints implicitly by evaluating only on support points).
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for subset in crate::lattice::subsets(k, d + 1) {
        // Affine independence check.
        let base = &pts[subset[0]];
        let dirs: Vec<Vec<Q>> = subset[1..]
            .iter()
            .map(|&i| linalg::vsub(&pts[i], base))
            .collect();
        if linalg::rank_q(&dirs) != d {
            continue;
        }
        // Solve for ℓ = (c, c0): c·p_i + c0 = lift_i on the subset.
        let a: Vec<Vec<Q>> = subset
            .iter()
            .map(|&i| {
                let mut row = pts[i].clone();
                row.push(Q::from_integer(1.into()));
                row
            })
            .collect();
        let b: Vec<Q> = subset.iter().map(|&i| lifts[i].clone()).collect();
        let Some((ell, _)) = linalg::solve_affine(&a, &b) else {
            continue;
        };
        let eval = |i: usize| -> Q { linalg::dot(&ell[..n], &pts[i]) + ell[n].clone() };
        // Supporting from below?
        if (0..k).any(|i| eval(i) > lifts[i]) {
            continue;
        }
        let cell: Vec<usize> = (0..k).filter(|&i| eval(i) == lifts[i]).collect();
        // Cell must be full-dimensional within the hull.
        let cdirs: Vec<Vec<Q>> = cell[1..]
            .iter()
            .map(|&i| linalg::vsub(&pts[i], &pts[cell[0]]))
            .collect();
        if linalg::rank_q(&cdirs) != d {
            continue;
        }
        if !cells.contains(&cell) {
            cells.push(cell);
        }
    }
    cells.sort();
    cells
}

/// Whether the regular subdivision of `s` is a unimodular triangulation
/// of the convex hull of its support: every maximal cell is a simplex
/// (exactly `dim + 1` of the support points) of lattice index 1.
pub fn is_tropically_smooth(s: &ValuedSupport) -> bool {
    let cells = regular_subdivision(s);
    let pts: Vec<Vec<i64>> = s.terms.iter().map(|(w, _)| w.0[1..].to_vec()).collect();
    let diffs: Vec<Vec<Q>> = (1..pts.len())
        .map(|i| {
            pts[i]
                .iter()
                .zip(&pts[0])
                .map(|(a, b)| Q::from_integer((a - b).into()))
                .collect()
        })
        .collect();
    let d = linalg::rank_q(&diffs);
    for cell in &cells {
        if cell.len() != d + 1 {
            return false;
        }
        let gens: Vec<Vec<i64>> = cell[1..]
            .iter()
            .map(|&i| {
                pts[i]
                    .iter()
                    .zip(&pts[cell[0]])
                    .map(|(a, b)| a - b)
                    .collect()
            })
            .collect();
        match lattice_index_i64(&gens) {
            Ok(idx) if idx == 1.into() => {}
            _ => return false,
        }
    }
    true
}

/// Minimal valuation as an affine function of `s` along the segment
/// `α(s) = base + s·dir` for `s` in a closed subinterval where the set
/// of minimizers is constant. Helper used by edge computations.
pub fn term_val_aff(
    sup: &ValuedSupport,
    w: &ExpVec,
    base: &[Q],
    dir: &[Q],
) -> crate::rat::Aff {
    let val = sup
        .valuation_of(w)
        .expect("term must belong to support")
        .clone();
    crate::rat::Aff {
        a: val + w.dot_chart(base),
        b: w.dot_chart(dir),
    }
}
