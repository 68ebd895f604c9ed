//! Exact rank and right-nullspace via fraction-free elimination.
//!
//! Rows are first scaled to coprime integers, then reduced with
//! Bareiss-style division-free steps so intermediate entries stay at
//! minor-sized magnitudes instead of exploding.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::num::Rat;

/// Echelon form of an integer copy of the matrix, plus pivot columns.
struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>, // pivot column per reduced row, increasing
}

fn to_integer_rows(matrix: &[Vec<Rat>]) -> Result<(Vec<Vec<BigInt>>, usize), Error> {
    if matrix.is_empty() {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    let cols = matrix[0].len();
    if cols == 0 || matrix.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidInput(
            "matrix must be rectangular and non-empty".into(),
        ));
    }
    let rows = matrix
        .iter()
        .map(|row| {
            let mut l = BigInt::one();
            for c in row {
                l = l.lcm(c.denom());
            }
            row.iter()
                .map(|c| c.numer() * (&l / c.denom()))
                .collect::<Vec<_>>()
        })
        .collect();
    Ok((rows, cols))
}

fn eliminate(mut rows: Vec<Vec<BigInt>>, cols: usize) -> Echelon {
    let mut pivots = Vec::new();
    let mut r = 0;
    let mut prev_pivot = BigInt::one();
    for c in 0..cols {
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        for i in r + 1..rows.len() {
            // Bareiss step: row_i = (row_i * pivot - row_r * row_i[c]) / prev_pivot
            let factor = rows[i][c].clone();
            let pivot = rows[r][c].clone();
            for j in 0..cols {
                let t = &rows[i][j] * &pivot - &rows[r][j] * &factor;
                let (q, rem) = t.div_rem(&prev_pivot);
                debug_assert!(rem.is_zero());
                rows[i][j] = q;
            }
        }
        prev_pivot = rows[r][c].clone();
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    Echelon { rows, pivots }
}

/// Rank of a rational matrix.
pub fn rank(matrix: &[Vec<Rat>]) -> Result<usize, Error> {
    let (rows, cols) = to_integer_rows(matrix)?;
    Ok(eliminate(rows, cols).pivots.len())
}

/// Exact determinant of a square rational matrix via Bareiss elimination
/// on an integer scaling of the rows.
pub fn determinant(matrix: &[Vec<Rat>]) -> Result<Rat, Error> {
    let n = matrix.len();
    if n == 0 || matrix.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("determinant needs a square matrix".into()));
    }
    // Scale each row to integers, remembering the factor pulled out.
    let mut scale = Rat::one();
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for row in matrix {
        let mut l = BigInt::one();
        for c in row {
            l = l.lcm(c.denom());
        }
        scale /= Rat::from_integer(l.clone());
        rows.push(row.iter().map(|c| c.numer() * (&l / c.denom())).collect());
    }
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| !rows[i][c].is_zero()) else {
            return Ok(Rat::zero());
        };
        if pr != c {
            rows.swap(c, pr);
            sign = -sign;
        }
        for i in c + 1..n {
            let factor = rows[i][c].clone();
            let pivot = rows[c][c].clone();
            for j in 0..n {
                let t = &rows[i][j] * &pivot - &rows[c][j] * &factor;
                let (q, rem) = t.div_rem(&prev);
                debug_assert!(rem.is_zero());
                rows[i][j] = q;
            }
        }
        prev = rows[c][c].clone();
    }
    let det = Rat::from_integer(rows[n - 1][n - 1].clone()) * scale;
    Ok(if sign < 0 { -det } else { det })
}

/// Basis of the right nullspace, one vector per free column in ascending
/// column order; empty exactly when the matrix has full column rank.
/// Each vector is scaled to coprime integers with its first nonzero entry
/// positive, and substituting it back gives exactly zero on every row.
pub fn nullspace(matrix: &[Vec<Rat>]) -> Result<Vec<Vec<Rat>>, Error> {
    let (rows, cols) = to_integer_rows(matrix)?;
    let ech = eliminate(rows, cols);
    let pivot_of_col: Vec<Option<usize>> = {
        let mut v = vec![None; cols];
        for (i, &c) in ech.pivots.iter().enumerate() {
            v[c] = Some(i);
        }
        v
    };
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut x = vec![Rat::zero(); cols];
        x[free] = Rat::one();
        // Back-substitute through pivot rows, bottom-up.
        for (i, &pc) in ech.pivots.iter().enumerate().rev() {
            let mut s = Rat::zero();
            for j in pc + 1..cols {
                if !x[j].is_zero() && !ech.rows[i][j].is_zero() {
                    s += Rat::from_integer(ech.rows[i][j].clone()) * &x[j];
                }
            }
            x[pc] = -s / Rat::from_integer(ech.rows[i][pc].clone());
        }
        basis.push(normalize(x));
    }
    Ok(basis)
}

/// Scale a rational vector to coprime integers with the first nonzero
/// entry positive; identity on the zero vector. This is the
/// canonicalization used for nullspace vectors, plane keys, and implicit
/// line forms.
pub fn normalize(v: Vec<Rat>) -> Vec<Rat> {
    let mut den_lcm = BigInt::one();
    let mut num_gcd = BigInt::zero();
    for c in &v {
        den_lcm = den_lcm.lcm(c.denom());
        num_gcd = num_gcd.gcd(c.numer());
    }
    if num_gcd.is_zero() {
        return v;
    }
    let mut scale = Rat::new(den_lcm, num_gcd).abs();
    if let Some(first) = v.iter().find(|c| !c.is_zero()) {
        if first.is_negative() {
            scale = -scale;
        }
    }
    v.into_iter().map(|c| c * &scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rat>> {
        rows.iter()
            .map(|r| r.iter().map(|&c| rat(c)).collect())
            .collect()
    }

    #[test]
    fn single_equation_two_unknowns() {
        let basis = nullspace(&m(&[&[1, 1]])).unwrap();
        assert_eq!(basis.len(), 1);
        // up to scale (1, -1); normalized form has first entry positive
        assert_eq!(basis[0], vec![rat(1), rat(-1)]);
    }

    #[test]
    fn identity_has_empty_nullspace() {
        let basis = nullspace(&m(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])).unwrap();
        assert!(basis.is_empty());
        assert_eq!(rank(&m(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])).unwrap(), 3);
    }

    #[test]
    fn rank_one_matrix_has_nullity_two() {
        let mat = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let basis = nullspace(&mat).unwrap();
        assert_eq!(basis.len(), 2);
        assert_eq!(rank(&mat).unwrap(), 1);
        // substitution gives exactly zero rows
        for v in &basis {
            for row in &mat {
                let dot: Rat = row.iter().zip(v).map(|(a, b)| a * b).sum();
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn rejects_empty_and_ragged() {
        assert!(nullspace(&[]).is_err());
        let ragged = vec![vec![rat(1)], vec![rat(1), rat(2)]];
        assert!(nullspace(&ragged).is_err());
    }

    #[test]
    fn fractional_entries_are_exact() {
        use crate::num::ratio;
        // rows (1/2, 1/3), (1/4, 1/6) are proportional
        let mat = vec![
            vec![ratio(1, 2), ratio(1, 3)],
            vec![ratio(1, 4), ratio(1, 6)],
        ];
        let basis = nullspace(&mat).unwrap();
        assert_eq!(basis.len(), 1);
        for row in &mat {
            let dot: Rat = row.iter().zip(&basis[0]).map(|(a, b)| a * b).sum();
            assert!(dot.is_zero());
        }
    }
}
