//! Exact rational linear algebra on small integer matrices.

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

type Q = Ratio<i128>;

/// Reduced row echelon form; returns the nonzero rows and pivot columns.
fn rref(rows: &[Vec<i64>], ncols: usize) -> (Vec<Vec<Q>>, Vec<usize>) {
    let mut m: Vec<Vec<Q>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| Q::from_integer(x as i128)).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x *= inv;
        }
        for i in 0..m.len() {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col];
                let pivot_row = m[row].clone();
                for (x, p) in m[i].iter_mut().zip(&pivot_row) {
                    *x -= *p * f;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    m.truncate(row);
    (m, pivots)
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Scales a rational vector to a primitive integer vector with a positive leading entry.
fn primitive(v: &[Q]) -> Vec<i64> {
    let lcm = v.iter().fold(1i128, |l, x| l / gcd(l, *x.denom()) * x.denom());
    let ints: Vec<i128> = v.iter().map(|x| (x * Q::from_integer(lcm)).to_integer()).collect();
    let g = ints.iter().fold(0i128, |g, &x| gcd(g, x)).max(1);
    let sign = if ints.iter().find(|x| **x != 0).is_some_and(|x| x.is_negative()) { -1 } else { 1 };
    ints.iter().map(|x| (sign * x / g) as i64).collect()
}

pub fn rank(rows: &[Vec<i64>], ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

/// Integer basis of the row space.
pub fn row_space_basis(rows: &[Vec<i64>], ncols: usize) -> Vec<Vec<i64>> {
    rref(rows, ncols).0.iter().map(|r| primitive(r)).collect()
}

/// Integer basis of {u : r·u = 0 for every row r}.
pub fn orthogonal_complement(rows: &[Vec<i64>], ncols: usize) -> Vec<Vec<i64>> {
    let (m, pivots) = rref(rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut u = vec![Q::zero(); ncols];
            u[f] = Q::one();
            for (r, &pc) in pivots.iter().enumerate() {
                u[pc] = -m[r][f];
            }
            primitive(&u)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_complement() {
        let rows = vec![vec![1, -1], vec![-1, 1], vec![0, 0]];
        assert_eq!(rank(&rows, 2), 1);
        assert_eq!(row_space_basis(&rows, 2), vec![vec![1, -1]]);
        assert_eq!(orthogonal_complement(&rows, 2), vec![vec![1, 1]]);
    }

    #[test]
    fn empty_and_full() {
        assert_eq!(rank(&[], 3), 0);
        assert_eq!(orthogonal_complement(&[], 2).len(), 2);
        let rows = vec![vec![2, 0, 1], vec![0, 3, 0], vec![1, 1, 1]];
        assert_eq!(rank(&rows, 3), 3);
        assert!(orthogonal_complement(&rows, 3).is_empty());
    }

    #[test]
    fn complement_is_orthogonal() {
        let rows = vec![vec![1, 2, 3, 4], vec![2, 4, 6, 9]];
        let c = orthogonal_complement(&rows, 4);
        assert_eq!(c.len(), 2);
        for u in &c {
            for r in &rows {
                assert_eq!(r.iter().zip(u).map(|(a, b)| a * b).sum::<i64>(), 0);
            }
        }
    }
}
