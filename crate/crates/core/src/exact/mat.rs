//! Dense rational linear algebra. Matrices are `Vec<Vec<Rat>>` in row-major
//! order; everything is exact.

use super::{rat, Rat};
use crate::{Error, Result};
use num_traits::{One, Zero};

pub type Mat = Vec<Vec<Rat>>;

pub fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![Rat::zero(); c]; r]
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rat::one();
    }
    m
}

pub fn transpose(a: &Mat) -> Mat {
    if a.is_empty() {
        return vec![];
    }
    let (r, c) = (a.len(), a[0].len());
    let mut t = zeros(c, r);
    for i in 0..r {
        for j in 0..c {
            t[j][i] = a[i][j].clone();
        }
    }
    t
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let (r, inner) = (a.len(), b.len());
    let c = if inner == 0 { 0 } else { b[0].len() };
    let mut out = zeros(r, c);
    for i in 0..r {
        assert_eq!(a[i].len(), inner, "shape mismatch");
        for k in 0..inner {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..c {
                let t = &a[i][k] * &b[k][j];
                out[i][j] += t;
            }
        }
    }
    out
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn sub(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn scale(a: &Mat, c: &Rat) -> Mat {
    a.iter()
        .map(|row| row.iter().map(|x| x * c).collect())
        .collect()
}

/// Row vector times matrix.
pub fn vec_mul(v: &[Rat], a: &Mat) -> Vec<Rat> {
    assert_eq!(v.len(), a.len());
    let c = if a.is_empty() { 0 } else { a[0].len() };
    let mut out = vec![Rat::zero(); c];
    for (vi, row) in v.iter().zip(a) {
        if vi.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(row) {
            *o += vi * x;
        }
    }
    out
}

/// Matrix times column vector.
pub fn mul_vec(a: &Mat, v: &[Rat]) -> Vec<Rat> {
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), v.len());
            row.iter()
                .zip(v)
                .fold(Rat::zero(), |acc, (x, y)| acc + x * y)
        })
        .collect()
}

pub fn dot(u: &[Rat], v: &[Rat]) -> Rat {
    assert_eq!(u.len(), v.len());
    u.iter()
        .zip(v)
        .fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

pub fn trace(a: &Mat) -> Rat {
    (0..a.len()).fold(Rat::zero(), |acc, i| acc + &a[i][i])
}

/// Reduced row echelon form; returns (rref, pivot column per pivot row).
pub fn rref(a: &Mat) -> (Mat, Vec<usize>) {
    let mut m = a.clone();
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
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
        let inv = m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = &*x / &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

pub fn rank(a: &Mat) -> usize {
    rref(a).1.len()
}

pub fn det(a: &Mat) -> Rat {
    let n = a.len();
    let mut m = a.clone();
    let mut d = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            m.swap(c, p);
            d = -d;
        }
        d *= m[c][c].clone();
        let inv = m[c][c].clone();
        for i in (c + 1)..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &inv;
            for j in c..n {
                let t = &f * &m[c][j];
                m[i][j] -= t;
            }
        }
    }
    d
}

pub fn inverse(a: &Mat) -> Result<Mat> {
    let n = a.len();
    let mut work: Mat = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "inverse of non-square matrix");
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    let (red, pivots) = rref(&work);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
        return Err(Error::InvalidInput("singular matrix".into()));
    }
    work = red;
    Ok(work.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Solve x * A = b for a row vector x (A square invertible).
pub fn solve_left(a: &Mat, b: &[Rat]) -> Result<Vec<Rat>> {
    let at = transpose(a);
    solve_right(&at, b)
}

/// Solve A * x = b for a column vector x (A square invertible).
pub fn solve_right(a: &Mat, b: &[Rat]) -> Result<Vec<Rat>> {
    let n = a.len();
    assert_eq!(b.len(), n);
    let mut work: Mat = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (red, pivots) = rref(&work);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
        return Err(Error::InvalidInput("singular system".into()));
    }
    work = red;
    Ok(work.into_iter().map(|row| row[n].clone()).collect())
}

/// Express each row of `b` in the row space of `basis` (full row rank);
/// returns the coefficient matrix c with c * basis = b, or an error if some
/// row lies outside the span.
pub fn express_in_rowspace(basis: &Mat, b: &Mat) -> Result<Mat> {
    let k = basis.len();
    if k == 0 {
        return if b.iter().all(|r| r.iter().all(|x| x.is_zero())) {
            Ok(vec![vec![]; b.len()])
        } else {
            Err(Error::Linalg("vector outside span".into()))
        };
    }
    let cols = basis[0].len();
    // Solve via rref of [basis^T | b^T] column-wise.
    let bt = transpose(basis);
    let mut out = Vec::with_capacity(b.len());
    // Precompute rref of the stacked system once per call.
    for row in b {
        assert_eq!(row.len(), cols);
        let mut aug: Mat = bt.clone();
        for (i, r) in aug.iter_mut().enumerate() {
            r.push(row[i].clone());
        }
        let (red, pivots) = rref(&aug);
        if pivots.contains(&k) {
            return Err(Error::Linalg("vector outside span".into()));
        }
        let mut coeffs = vec![Rat::zero(); k];
        for (i, &c) in pivots.iter().enumerate() {
            coeffs[c] = red[i][k].clone();
        }
        out.push(coeffs);
    }
    Ok(out)
}

/// Basis for the right kernel {x : A x = 0}, as column vectors.
pub fn kernel(a: &Mat) -> Vec<Vec<Rat>> {
    let cols = if a.is_empty() { 0 } else { a[0].len() };
    let (red, pivots) = rref(a);
    let mut free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.sort_unstable();
    let mut basis = Vec::new();
    for &f in &free {
        let mut v = vec![Rat::zero(); cols];
        v[f] = Rat::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = -red[i][f].clone();
        }
        basis.push(v);
    }
    basis
}

/// Characteristic polynomial, ascending coefficients, monic of degree n.
/// Faddeev-LeVerrier: exact over the rationals.
pub fn charpoly(a: &Mat) -> Vec<Rat> {
    let n = a.len();
    let mut coeffs = vec![Rat::zero(); n + 1];
    coeffs[n] = Rat::one();
    let mut m = identity(n);
    for k in 1..=n {
        m = mul(a, &m);
        let c = -trace(&m) / rat(k as i64);
        coeffs[n - k] = c.clone();
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += &c;
        }
    }
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    fn m(rows: &[&[i64]]) -> Mat {
        rows.iter()
            .map(|r| r.iter().map(|&x| rat(x)).collect())
            .collect()
    }

    #[test]
    fn inverse_roundtrip() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(mul(&a, &inv), identity(3));
        assert_eq!(mul(&inv, &a), identity(3));
    }

    #[test]
    fn singular_rejected() {
        let a = m(&[&[1, 2], &[2, 4]]);
        assert!(inverse(&a).is_err());
        assert_eq!(det(&a), rat(0));
        assert_eq!(rank(&a), 1);
    }

    #[test]
    fn det_values() {
        assert_eq!(det(&m(&[&[3]])), rat(3));
        assert_eq!(det(&m(&[&[1, 2], &[3, 4]])), rat(-2));
        let a = m(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
        assert_eq!(det(&a), rat(1));
    }

    #[test]
    fn solve_both_sides() {
        let a = m(&[&[2, 0], &[1, 3]]);
        let x = solve_right(&a, &[rat(4), rat(5)]).unwrap();
        assert_eq!(mul_vec(&a, &x), vec![rat(4), rat(5)]);
        let y = solve_left(&a, &[rat(4), rat(5)]).unwrap();
        assert_eq!(vec_mul(&y, &a), vec![rat(4), rat(5)]);
    }

    #[test]
    fn kernel_dimension() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = kernel(&a);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(mul_vec(&a, v), vec![rat(0), rat(0)]);
        }
    }

    #[test]
    fn express_rows() {
        let basis = m(&[&[1, 0, 1], &[0, 2, 0]]);
        let b = m(&[&[2, 2, 2], &[1, -4, 1]]);
        let c = express_in_rowspace(&basis, &b).unwrap();
        assert_eq!(mul(&c, &basis), b);
        let outside = m(&[&[0, 0, 1]]);
        assert!(express_in_rowspace(&basis, &outside).is_err());
    }

    #[test]
    fn charpoly_companion() {
        // companion matrix of x^3 - 2x - 5
        let a = m(&[&[0, 0, 5], &[1, 0, 2], &[0, 1, 0]]);
        let cp = charpoly(&a);
        assert_eq!(cp, vec![rat(-5), rat(-2), rat(0), rat(1)]);
        // Cayley-Hamilton for a random-ish rational matrix
        let b = vec![
            vec![ratio(1, 2), rat(3), rat(0)],
            vec![rat(-1), ratio(2, 3), rat(1)],
            vec![rat(4), rat(0), ratio(-1, 5)],
        ];
        let cp = charpoly(&b);
        let mut acc = zeros(3, 3);
        let mut power = identity(3);
        for c in &cp {
            acc = add(&acc, &scale(&power, c));
            power = mul(&power, &b);
        }
        assert_eq!(acc, zeros(3, 3));
    }
}
