//! Exact enumeration of vectors of a prescribed value under a positive
//! definite rational quadratic form. Bounds are seeded with floating point
//! estimates and then fixed up with exact rational predicates, so the output
//! is provably complete.

use super::hnf::Lattice;
use super::mat::{self, Mat};
use super::{rat_to_f64, Int, Rat};
use crate::{Error, Result};
use num_traits::{Signed, Zero};

/// LDL^T decomposition of a symmetric positive definite rational matrix:
/// returns (L, d) with L unit lower triangular and all d[i] > 0.
pub fn ldl(gram: &Mat) -> Result<(Mat, Vec<Rat>)> {
    let n = gram.len();
    for (i, row) in gram.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidInput("non-square Gram matrix".into()));
        }
        for j in 0..n {
            if gram[i][j] != gram[j][i] {
                return Err(Error::InvalidInput("non-symmetric Gram matrix".into()));
            }
        }
    }
    let mut l = mat::identity(n);
    let mut d = vec![Rat::zero(); n];
    for j in 0..n {
        let mut dj = gram[j][j].clone();
        for k in 0..j {
            dj -= &l[j][k] * &l[j][k] * &d[k];
        }
        if !dj.is_positive() {
            return Err(Error::InvalidInput(
                "quadratic form is not positive definite".into(),
            ));
        }
        d[j] = dj;
        for i in (j + 1)..n {
            let mut x = gram[i][j].clone();
            for k in 0..j {
                x -= &l[i][k] * &l[j][k] * &d[k];
            }
            l[i][j] = x / &d[j];
        }
    }
    Ok((l, d))
}

/// Largest integer m with m <= s + sqrt(r), for rational s and r >= 0.
fn floor_plus_sqrt(s: &Rat, r: &Rat) -> Int {
    debug_assert!(!r.is_negative());
    let le = |m: &Int| -> bool {
        // m <= s + sqrt(r)  <=>  m - s <= sqrt(r)
        let t = Rat::from_integer(m.clone()) - s;
        !t.is_positive() || &t * &t <= *r
    };
    let seed = rat_to_f64(s) + rat_to_f64(r).max(0.0).sqrt();
    let mut m = Int::from(seed.floor() as i64);
    while le(&(&m + 1)) {
        m += 1;
    }
    while !le(&m) {
        m -= 1;
    }
    m
}

/// Smallest integer m with m >= s - sqrt(r), for rational s and r >= 0.
fn ceil_minus_sqrt(s: &Rat, r: &Rat) -> Int {
    debug_assert!(!r.is_negative());
    let ge = |m: &Int| -> bool {
        // m >= s - sqrt(r)  <=>  s - m <= sqrt(r)
        let t = s - Rat::from_integer(m.clone());
        !t.is_positive() || &t * &t <= *r
    };
    let seed = rat_to_f64(s) - rat_to_f64(r).max(0.0).sqrt();
    let mut m = Int::from(seed.ceil() as i64);
    while ge(&(&m - 1)) {
        m -= 1;
    }
    while !ge(&m) {
        m += 1;
    }
    m
}

/// All integer vectors c with c^T G c = target, sorted lexicographically.
/// G must be symmetric positive definite. target < 0 gives an empty list,
/// target = 0 gives the zero vector only.
pub fn enumerate_gram(gram: &Mat, target: &Rat) -> Result<Vec<Vec<Int>>> {
    let n = gram.len();
    if target.is_negative() {
        return Ok(vec![]);
    }
    let (l, d) = ldl(gram)?;
    // DFS assigning c[n-1], ..., c[0]; u_i = c_i + sum_{j>i} L[j][i] c_j,
    // value = sum d_i u_i^2.
    let mut out: Vec<Vec<Int>> = Vec::new();
    let mut c = vec![Int::zero(); n];
    fn dfs(
        i: usize,
        rem: &Rat, // target minus contributions of levels > i
        l: &Mat,
        d: &[Rat],
        c: &mut Vec<Int>,
        out: &mut Vec<Vec<Int>>,
    ) {
        // shift s_i = sum_{j>i} L[j][i] c_j
        let mut s = Rat::zero();
        for j in (i + 1)..c.len() {
            if !c[j].is_zero() {
                s += &l[j][i] * Rat::from_integer(c[j].clone());
            }
        }
        // d_i (c_i + s)^2 <= rem
        let bound = rem / &d[i];
        let lo = ceil_minus_sqrt(&(-s.clone()), &bound);
        let hi = floor_plus_sqrt(&(-s.clone()), &bound);
        let mut ci = lo;
        while ci <= hi {
            let u = Rat::from_integer(ci.clone()) + &s;
            let used = &d[i] * &u * &u;
            let rem2 = rem - &used;
            debug_assert!(!rem2.is_negative());
            c[i] = ci.clone();
            if i == 0 {
                if rem2.is_zero() {
                    out.push(c.clone());
                }
            } else {
                dfs(i - 1, &rem2, l, d, c, out);
            }
            ci += 1;
        }
        c[i] = Int::zero();
    }
    if n == 0 {
        if target.is_zero() {
            out.push(vec![]);
        }
        return Ok(out);
    }
    dfs(n - 1, target, &l, &d, &mut c, &mut out);
    out.sort();
    Ok(out)
}

/// All lattice vectors v with q(v) = target where q has ambient Gram matrix
/// `gram` (q(v) = v G v^T for row vectors). Returns ambient coordinates,
/// sorted lexicographically.
pub fn enumerate_in_lattice(lat: &Lattice, gram: &Mat, target: &Rat) -> Result<Vec<Vec<Rat>>> {
    let basis = lat.basis();
    if basis.is_empty() {
        return Ok(if target.is_zero() {
            vec![vec![Rat::zero(); lat.dim()]]
        } else {
            vec![]
        });
    }
    let g = gram_of_basis(&basis, gram);
    let coords = enumerate_gram(&g, target)?;
    let mut out: Vec<Vec<Rat>> = coords
        .into_iter()
        .map(|c| {
            let cr: Vec<Rat> = c.into_iter().map(Rat::from_integer).collect();
            mat::vec_mul(&cr, &basis)
        })
        .collect();
    out.sort();
    Ok(out)
}

/// Gram matrix of a basis under an ambient symmetric bilinear form.
pub fn gram_of_basis(basis: &[Vec<Rat>], gram: &Mat) -> Mat {
    let k = basis.len();
    let mut g = mat::zeros(k, k);
    for i in 0..k {
        let gi = mat::mul_vec(gram, &basis[i]);
        for j in 0..k {
            g[i][j] = mat::dot(&basis[j], &gi);
        }
    }
    g
}

/// Shortest nonzero value heuristic helper: smallest t > 0 with nonempty
/// solution set among candidate targets (used by tests).
pub fn minimum_positive_value(gram: &Mat, targets: &[Rat]) -> Result<Option<Rat>> {
    for t in targets {
        if t.is_positive() && !enumerate_gram(gram, t)?.is_empty() {
            return Ok(Some(t.clone()));
        }
    }
    Ok(None)
}
