//! Exact Gaussian elimination over the rationals.

use num_traits::{One, Zero};

use crate::rational::Rational;

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(m: &mut [Vec<Rational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::one() / &m[r][c];
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        let pivot = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let factor = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot) {
                    if !p.is_zero() {
                        *x -= &factor * p;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Basis of `{x : row·x = 0 for every row}` in `ℚ^dim`.
pub fn nullspace(rows: &[Vec<Rational>], dim: usize) -> Vec<Vec<Rational>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..dim).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); dim];
            v[f] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// Greedy maximal independent subset of `vectors` (in order) together with
/// the coordinates of every input vector in that basis.
pub struct IndependentReduction {
    pub basis: Vec<usize>,
    /// `coords[i][k]` is the coefficient of `vectors[basis[k]]` in `vectors[i]`.
    pub coords: Vec<Vec<Rational>>,
}

pub fn independent_reduction(vectors: &[Vec<Rational>]) -> IndependentReduction {
    let mut basis: Vec<usize> = Vec::new();
    for (i, _) in vectors.iter().enumerate() {
        let mut candidate: Vec<Vec<Rational>> = basis.iter().map(|&b| vectors[b].clone()).collect();
        candidate.push(vectors[i].clone());
        if rank(&candidate) == candidate.len() {
            basis.push(i);
        }
    }
    let coords = vectors
        .iter()
        .map(|v| express_in_basis(&basis.iter().map(|&b| vectors[b].clone()).collect::<Vec<_>>(), v))
        .collect();
    IndependentReduction { basis, coords }
}

/// Solves `Σ c_k basis[k] = v` for independent `basis`; panics if `v` is not
/// in their span.
fn express_in_basis(basis: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    let k = basis.len();
    let dim = v.len();
    // Columns are basis vectors; augmented with v.
    let mut m: Vec<Vec<Rational>> = (0..dim)
        .map(|r| {
            let mut row: Vec<Rational> = basis.iter().map(|b| b[r].clone()).collect();
            row.push(v[r].clone());
            row
        })
        .collect();
    let pivots = rref(&mut m);
    assert!(!pivots.contains(&k), "vector outside the span of the basis");
    let mut c = vec![Rational::zero(); k];
    for (r, &p) in pivots.iter().enumerate() {
        c[p] = m[r][k].clone();
    }
    c
}

/// Solves a square system; `None` when singular.
pub fn solve_square(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.len() < n || pivots.contains(&n) {
        return None;
    }
    Some((0..n).map(|i| m[i][n].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn v(x: &[i64]) -> Vec<Rational> {
        x.iter().map(|&a| int(a)).collect()
    }

    #[test]
    fn nullspace_of_plane() {
        let ns = nullspace(&[v(&[1, -1, 0]), v(&[0, 1, -1])], 3);
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0], v(&[1, 1, 1]));
    }

    #[test]
    fn reduction_finds_dependents() {
        let red = independent_reduction(&[v(&[1, 0]), v(&[0, 1]), v(&[1, 1]), v(&[0, 0])]);
        assert_eq!(red.basis, vec![0, 1]);
        assert_eq!(red.coords[2], v(&[1, 1]));
        assert_eq!(red.coords[3], v(&[0, 0]));
    }

    #[test]
    fn square_solve() {
        let x = solve_square(&[v(&[2, 1]), v(&[1, 3])], &v(&[3, 5])).unwrap();
        assert_eq!(x, vec![int(4) / int(5), int(7) / int(5)]);
        assert!(solve_square(&[v(&[1, 1]), v(&[2, 2])], &v(&[1, 2])).is_none());
    }
}
