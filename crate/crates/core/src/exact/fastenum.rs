//! Batched short-vector enumeration with machine-word arithmetic: one pass
//! visits every vector of an integral positive definite form up to a norm
//! bound. Box bounds come from a floating LDL decomposition widened by a
//! safety margin, and membership is decided by an exact integer norm
//! check, so floating error can only cost bounded extra scan work, never a
//! wrong answer.

use crate::{Error, Result};

/// Exact norm c^T A c in wide arithmetic.
fn exact_norm(a: &[Vec<i64>], c: &[i64]) -> i128 {
    let n = c.len();
    let mut s: i128 = 0;
    for r in 0..n {
        if c[r] == 0 {
            continue;
        }
        let mut row: i128 = 0;
        for t in 0..n {
            row += (a[r][t] as i128) * (c[t] as i128);
        }
        s += (c[r] as i128) * row;
    }
    s
}

/// Visits every nonzero vector c with c^T A c <= bound, both signs
/// included, for A symmetric positive definite with i64 entries. The
/// visitor receives the coordinates and the exact norm.
pub fn enumerate_batch(
    a: &[Vec<i64>],
    bound: i64,
    visit: &mut dyn FnMut(&[i64], i64),
) -> Result<()> {
    let n = a.len();
    if n == 0 || bound < 0 {
        return Ok(());
    }
    // floating LDL: Q(c) = sum_r d_r (c_r + sum_{s>r} l_{rs} c_s)^2
    let mut g: Vec<Vec<f64>> = a
        .iter()
        .map(|row| row.iter().map(|&x| x as f64).collect())
        .collect();
    let mut d = vec![0f64; n];
    let mut l = vec![vec![0f64; n]; n];
    for r in 0..n {
        d[r] = g[r][r];
        if !(d[r] > 0.0) {
            return Err(Error::InvalidInput(
                "batch enumeration requires a positive definite form".into(),
            ));
        }
        for s in (r + 1)..n {
            l[r][s] = g[r][s] / d[r];
        }
        for s in (r + 1)..n {
            for t in s..n {
                let v = g[s][t] - d[r] * l[r][s] * l[r][t];
                g[s][t] = v;
                g[t][s] = v;
            }
        }
    }
    const MARGIN: f64 = 0.75;
    let mut c = vec![0i64; n];
    // iterative descent over coordinates n-1 .. 0 with per-level budgets
    let mut budget = vec![0f64; n + 1]; // remaining quadratic budget at level r
    let mut center = vec![0f64; n]; // -sum_{s>r} l_{rs} c_s at level r
    let mut lo = vec![0i64; n];
    let mut hi = vec![0i64; n];
    budget[n - 1] = bound as f64;
    let mut r = n - 1;
    let mut entering = true;
    loop {
        if entering {
            // compute the scan range at level r
            let mut ctr = 0f64;
            for s in (r + 1)..n {
                ctr -= l[r][s] * (c[s] as f64);
            }
            center[r] = ctr;
            let rad = (budget[r].max(0.0) / d[r]).sqrt() + MARGIN;
            lo[r] = (ctr - rad).ceil() as i64;
            hi[r] = (ctr + rad).floor() as i64;
            c[r] = lo[r] - 1;
        }
        // advance at level r
        c[r] += 1;
        if c[r] > hi[r] {
            // exhausted: pop up
            if r == n - 1 {
                break;
            }
            r += 1;
            entering = false;
            continue;
        }
        if r == 0 {
            let norm = exact_norm(a, &c);
            if norm > 0 && norm <= bound as i128 {
                visit(&c, norm as i64);
            }
            entering = false;
            continue;
        }
        // descend with the reduced budget
        let off = c[r] as f64 - center[r];
        budget[r - 1] = budget[r] - d[r] * off * off;
        r -= 1;
        entering = true;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::enumerate::enumerate_gram;
    use crate::exact::mat::Mat;
    use crate::exact::{rat, Rat};
    use std::collections::BTreeMap;

    fn to_mat(a: &[Vec<i64>]) -> Mat {
        a.iter()
            .map(|row| row.iter().map(|&x| rat(x)).collect())
            .collect()
    }

    fn batch_counts(a: &[Vec<i64>], bound: i64) -> BTreeMap<i64, u64> {
        let mut counts = BTreeMap::new();
        enumerate_batch(a, bound, &mut |_c, norm| {
            *counts.entry(norm).or_insert(0) += 1;
        })
        .unwrap();
        counts
    }

    #[test]
    fn matches_exact_enumeration() {
        let forms: Vec<Vec<Vec<i64>>> = vec![
            vec![vec![2, 0, 0, 0], vec![0, 2, 0, 0], vec![0, 0, 2, 0], vec![0, 0, 0, 2]],
            vec![vec![2, 1, 0, 0], vec![1, 4, 1, 0], vec![0, 1, 6, 2], vec![0, 0, 2, 8]],
            vec![vec![4, -1, 1], vec![-1, 6, 0], vec![1, 0, 10]],
        ];
        for a in &forms {
            let counts = batch_counts(a, 60);
            let gram = to_mat(a);
            for target in 1..=60i64 {
                let exact = enumerate_gram(&gram, &rat(target)).unwrap().len() as u64;
                assert_eq!(
                    counts.get(&target).copied().unwrap_or(0),
                    exact,
                    "target {target}"
                );
            }
        }
    }

    #[test]
    fn four_squares_counts() {
        // Q = 2 sum x_i^2: the count at norm 2n is r_4(n) = 8 sigma(n) for
        // odd n, 24 sigma(odd part) for even n
        let a = vec![
            vec![2, 0, 0, 0],
            vec![0, 2, 0, 0],
            vec![0, 0, 2, 0],
            vec![0, 0, 0, 2],
        ];
        let counts = batch_counts(&a, 80);
        let sigma = |n: i64| (1..=n).filter(|d| n % d == 0).sum::<i64>();
        for n in 1..=40i64 {
            let odd = {
                let mut m = n;
                while m % 2 == 0 {
                    m /= 2;
                }
                m
            };
            let want = if n % 2 == 1 {
                8 * sigma(n)
            } else {
                24 * sigma(odd)
            };
            assert_eq!(counts[&(2 * n)] as i64, want, "n={n}");
        }
        // odd norms never occur
        assert!(counts.keys().all(|v| v % 2 == 0));
    }

    #[test]
    fn rejects_indefinite() {
        let a = vec![vec![2, 0], vec![0, -2]];
        assert!(enumerate_batch(&a, 10, &mut |_, _| {}).is_err());
    }
}
