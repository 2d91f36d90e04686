//! Exact linear algebra over the rationals: row reduction, rank,
//! nullspaces and affine solution spaces.

use num_traits::Zero;

use crate::rat::Q;

/// Reduced row-echelon form in place; returns the pivot columns.
pub fn rref(m: &mut Vec<Vec<Q>>) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = m[r][c].recip();
        for j in c..cols {
            let v = &m[r][j] * &inv;
            m[r][j] = v;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let v = &m[i][j] - &f * &m[r][j];
                    m[i][j] = v;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

/// Rank of a rational matrix.
pub fn rank_q(m: &[Vec<Q>]) -> usize {
    let mut work = m.to_vec();
    rref(&mut work).len()
}

/// Basis of the right nullspace `{x : M·x = 0}` of a rational matrix.
pub fn nullspace_q(m: &[Vec<Q>]) -> Vec<Vec<Q>> {
    if m.is_empty() {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut work = m.to_vec();
    let pivots = rref(&mut work);
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Q::zero(); cols];
        v[free] = Q::from_integer(1.into());
        for (ri, &pc) in pivots.iter().enumerate() {
            v[pc] = -work[ri][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Solution of the affine system `A·x = b` as a particular point plus a
/// basis of the homogeneous solution space; `None` if inconsistent.
pub fn solve_affine(a: &[Vec<Q>], b: &[Q]) -> Option<(Vec<Q>, Vec<Vec<Q>>)> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut aug: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&cols) {
        return None; // Pivot in the constant column: inconsistent.
    }
    let mut point = vec![Q::zero(); cols];
    for (ri, &pc) in pivots.iter().enumerate() {
        point[pc] = aug[ri][cols].clone();
    }
    let homogeneous: Vec<Vec<Q>> = {
        let stripped: Vec<Vec<Q>> = aug
            .iter()
            .take(pivots.len())
            .map(|r| r[..cols].to_vec())
            .collect();
        nullspace_q(&stripped)
    };
    Some((point, homogeneous))
}

/// Dot product of rational vectors.
pub fn dot(a: &[Q], b: &[Q]) -> Q {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Q::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// `a + c·b` for rational vectors.
pub fn axpy(a: &[Q], c: &Q, b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x + c * y).collect()
}

/// `a - b` for rational vectors.
pub fn vsub(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `a + b` for rational vectors.
pub fn vadd(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `c·a` for a rational vector.
pub fn vscale(c: &Q, a: &[Q]) -> Vec<Q> {
    a.iter().map(|x| c * x).collect()
}
