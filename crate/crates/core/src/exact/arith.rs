//! Elementary number theory over machine integers: primes, factorization,
//! the Kronecker symbol, fundamental discriminants and class numbers of
//! imaginary quadratic fields.

use crate::{Error, Result};

/// Primes up to and including `limit`.
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return vec![];
    }
    let n = limit as usize;
    let mut is_comp = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !is_comp[p] {
            primes.push(p as u64);
            let mut m = p * p;
            while m <= n {
                is_comp[m] = true;
                m += p;
            }
        }
    }
    primes
}

/// Prime factorization of `n != 0` by trial division, smallest prime first.
pub fn factor(n: i64) -> Vec<(i64, u32)> {
    assert!(n != 0, "factor(0)");
    let mut m = n.unsigned_abs();
    let mut out = Vec::new();
    let mut p: u64 = 2;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p as i64, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push((m as i64, 1));
    }
    out
}

pub fn is_prime(n: i64) -> bool {
    n >= 2 && factor(n).len() == 1 && factor(n)[0].1 == 1
}

/// Largest square divisor `g*g | n` together with the squarefree kernel:
/// `n = kernel * g*g` with `kernel` squarefree (signs follow `n`).
pub fn squarefree_decompose(n: i64) -> (i64, i64) {
    assert!(n != 0);
    let mut g: i64 = 1;
    let mut kernel: i64 = n.signum();
    for (p, e) in factor(n) {
        g *= p.pow(e / 2);
        if e % 2 == 1 {
            kernel *= p;
        }
    }
    (kernel, g)
}

/// Kronecker symbol (a|n), defined for all integers with the standard
/// conventions at 2, -1 and 0.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut a = a;
    let mut n = n;
    let mut result: i32 = 1;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    // (a|2) factor for each power of two in n.
    while n % 2 == 0 {
        n /= 2;
        if a % 2 == 0 {
            return 0;
        }
        let r = a.rem_euclid(8);
        if r == 3 || r == 5 {
            result = -result;
        }
    }
    // Jacobi symbol on the odd part by quadratic reciprocity.
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.rem_euclid(4) == 3 && n.rem_euclid(4) == 3 {
            result = -result;
        }
        a = a.rem_euclid(n);
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Is `d` a fundamental discriminant (of a quadratic field, or 1)?
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 1 {
        return true;
    }
    if d == 0 {
        return false;
    }
    let r = d.rem_euclid(4);
    if r == 1 {
        let (kernel, _) = squarefree_decompose(d);
        kernel == d
    } else if r == 0 {
        let m = d / 4;
        let rm = m.rem_euclid(4);
        if rm == 2 || rm == 3 {
            let (kernel, _) = squarefree_decompose(m);
            kernel == m
        } else {
            false
        }
    } else {
        false
    }
}

/// Fundamental discriminant of Q(sqrt(d0)) for squarefree-kernel input, and
/// the conductor f with d0 = dK * f^2 in general.
pub fn fundamental_discriminant(d0: i64) -> (i64, i64) {
    assert!(d0 != 0);
    let (kernel, mut f) = squarefree_decompose(d0);
    let dk = if kernel.rem_euclid(4) == 1 {
        kernel
    } else {
        4 * kernel
    };
    // d0 = kernel * f^2; if dk = 4*kernel then f picks up the factor 2 only
    // when d0 itself had it, i.e. d0 = dk * (f')^2 requires 4 | d0/kernel.
    if dk != kernel {
        if f % 2 == 0 {
            f /= 2;
        } else {
            // d0 = kernel * f^2 with f odd is not divisible by dk.
            return (dk, 0);
        }
    }
    (dk, f)
}

/// Number of units modulo +-1 scaling conventions: w(-3) = 3, w(-4) = 2,
/// else 1; returned doubled (the classical w) for class number weighting.
pub fn unit_count(d: i64) -> u32 {
    match d {
        -3 => 6,
        -4 => 4,
        _ => 2,
    }
}

/// Class number of the imaginary quadratic field of fundamental
/// discriminant `d < 0`, by counting reduced primitive binary quadratic
/// forms (a, b, c) of discriminant d.
pub fn class_number(d: i64) -> Result<u64> {
    if d >= 0 || !is_fundamental_discriminant(d) {
        return Err(Error::InvalidInput(format!(
            "class_number requires a negative fundamental discriminant, got {d}"
        )));
    }
    Ok(count_reduced_forms(d, true))
}

/// Hurwitz class number H(n) for n >= 0, as a pair (numerator, denominator)
/// with denominator dividing 3: H(0) = -1/12, H(3) = 1/3, H(4) = 1/2.
/// Counts all (not necessarily primitive) reduced forms of discriminant -n,
/// weighting forms equivalent to a*(x^2+y^2) by 1/2 and a*(x^2+xy+y^2) by
/// 1/3.
pub fn hurwitz_class_number(n: u64) -> (i64, i64) {
    if n == 0 {
        return (-1, 12);
    }
    let r = n % 4;
    if r == 1 || r == 2 {
        return (0, 1);
    }
    let d = -(n as i64);
    // Sum over conductors: H(n) = sum over f^2 | n with d/f^2 a discriminant
    // of h(d/f^2)/w-weight. Equivalent and simpler: directly count reduced
    // forms of discriminant d including imprimitive ones, with the boundary
    // weights folded in via the form's shape.
    let mut six_times = 0i64; // accumulate 6*H(n)
    let mut b = if n % 2 == 0 { 0i64 } else { 1i64 };
    while b * b <= d.abs() / 3 {
        let ac4 = b * b - d;
        debug_assert!(ac4 % 4 == 0);
        let ac = ac4 / 4;
        let mut a = if b == 0 { 1 } else { b };
        while a * a <= ac {
            if a > 0 && ac % a == 0 {
                let c = ac / a;
                // reduced: |b| <= a <= c; b >= 0 when |b| = a or a = c
                let weight = if a == c && b == a {
                    // multiple of x^2 + xy + y^2 (b = a = c)
                    2
                } else if a == c || b == a {
                    // b = 0, a = c is a multiple of x^2 + y^2: weight 1/2;
                    // forms with b = a < c or 0 <= b < a = c count once but
                    // only for b >= 0 (handled below); the (a,a,c)/(a,c,c)
                    // shapes with b = a or a = c pair with their negatives.
                    if b == 0 && a == c {
                        3
                    } else {
                        6
                    }
                } else if b == 0 {
                    6
                } else {
                    // b and -b both reduced: count twice
                    12
                };
                six_times += weight;
            }
            a += 1;
        }
        b += 2;
    }
    let g = gcd_i64(six_times, 6);
    (six_times / g, 6 / g)
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    if a == 0 {
        1
    } else {
        a
    }
}

fn count_reduced_forms(d: i64, primitive_only: bool) -> u64 {
    assert!(d < 0 && d.rem_euclid(4) <= 1);
    let mut count = 0u64;
    let mut b = if d.rem_euclid(2) == 0 { 0i64 } else { 1i64 };
    while b * b <= -d / 3 {
        let ac = (b * b - d) / 4;
        let mut a = std::cmp::max(1, b);
        while a * a <= ac {
            if ac % a == 0 {
                let c = ac / a;
                let prim = gcd_i64(gcd_i64(a, b), c) == 1;
                if prim || !primitive_only {
                    if b == 0 || b == a || a == c {
                        count += 1; // only b >= 0 representative
                    } else {
                        count += 2; // (a, +-b, c) both reduced
                    }
                }
            }
            a += 1;
        }
        b += 2;
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_small() {
        assert_eq!(sieve_primes(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn factor_roundtrip() {
        for n in [2i64, 12, 720, 1024, 9973, -60] {
            let f = factor(n);
            let mut prod = n.signum();
            for (p, e) in &f {
                prod *= p.pow(*e);
            }
            assert_eq!(prod, n);
        }
    }

    #[test]
    fn squarefree_parts() {
        assert_eq!(squarefree_decompose(12), (3, 2));
        assert_eq!(squarefree_decompose(27), (3, 3));
        assert_eq!(squarefree_decompose(-50), (-2, 5));
        assert_eq!(squarefree_decompose(1), (1, 1));
    }

    #[test]
    fn kronecker_matches_legendre_for_odd_primes() {
        // (a|p) = a^((p-1)/2) mod p for odd primes p
        for &p in &[3i64, 5, 7, 11, 13, 17, 19, 23] {
            for a in -20..20i64 {
                let expect = {
                    let r = mod_pow(a.rem_euclid(p), ((p - 1) / 2) as u64, p);
                    if r == 0 {
                        0
                    } else if r == 1 {
                        1
                    } else {
                        -1
                    }
                };
                assert_eq!(kronecker(a, p), expect, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn kronecker_multiplicative() {
        for a in -15..15i64 {
            for n1 in 1..12i64 {
                for n2 in 1..12i64 {
                    assert_eq!(
                        kronecker(a, n1 * n2),
                        kronecker(a, n1) * kronecker(a, n2)
                    );
                }
            }
        }
        for a1 in -12..12i64 {
            for a2 in -12..12i64 {
                for n in 1..15i64 {
                    assert_eq!(
                        kronecker(a1 * a2, n),
                        kronecker(a1, n) * kronecker(a2, n)
                    );
                }
            }
        }
    }

    #[test]
    fn kronecker_at_two_and_minus_one() {
        assert_eq!(kronecker(2, 7), 1);
        assert_eq!(kronecker(2, 3), -1);
        assert_eq!(kronecker(-1, 5), 1);
        assert_eq!(kronecker(-1, 7), -1);
        assert_eq!(kronecker(-4, 7), -1);
        assert_eq!(kronecker(-4, 5), 1);
        // periodicity of (d|.) mod |d| for discriminants
        for &d in &[-3i64, -4, -7, -8, -11, -15, 5, 8, 12, 13] {
            for n in 1..60i64 {
                assert_eq!(kronecker(d, n), kronecker(d, n + d.abs()));
            }
        }
    }

    fn mod_pow(mut base: i64, mut exp: u64, m: i64) -> i64 {
        let mut acc = 1i64;
        base = base.rem_euclid(m);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            exp >>= 1;
        }
        acc
    }

    #[test]
    fn fundamental_discriminants() {
        for d in [-3i64, -4, -7, -8, -11, -15, -19, -20, -23, -24, 5, 8, 12, 13] {
            assert!(is_fundamental_discriminant(d), "{d}");
        }
        for d in [-9i64, -12, -16, -18, -25, -27, -28, 9, 16] {
            assert!(!is_fundamental_discriminant(d), "{d}");
        }
        assert_eq!(fundamental_discriminant(-27), (-3, 3));
        assert_eq!(fundamental_discriminant(-4), (-4, 1));
        assert_eq!(fundamental_discriminant(-100), (-4, 5));
    }

    #[test]
    fn class_numbers_known() {
        // textbook values
        let known: &[(i64, u64)] = &[
            (-3, 1),
            (-4, 1),
            (-7, 1),
            (-8, 1),
            (-11, 1),
            (-15, 2),
            (-19, 1),
            (-20, 2),
            (-23, 3),
            (-24, 2),
            (-31, 3),
            (-39, 4),
            (-43, 1),
            (-47, 5),
            (-67, 1),
            (-71, 7),
            (-84, 4),
            (-95, 8),
            (-163, 1),
            (-231, 12),
        ];
        for &(d, h) in known {
            assert_eq!(class_number(d).unwrap(), h, "d={d}");
        }
        assert!(class_number(-9).is_err());
        assert!(class_number(5).is_err());
    }

    /// Independent recursion oracle: the two Kronecker-Hurwitz relations
    ///   sum_{t^2<=4n} H(4n-t^2)          = 2*sigma1(n) - sum_{d|n} min(d,n/d)
    ///   sum_{t^2<=4n} (t^2-n) H(4n-t^2)  = - sum_{d|n} min(d,n/d)^3
    /// determine H(4n) and H(4n-1) from smaller values. Solve the 2x2 system
    /// per n and compare against the direct form count, then compare
    /// h(d) = H(|d|) * w(d) / 2 for fundamental d.
    #[test]
    fn hurwitz_recursion_oracle() {
        let nmax = 250u64;
        // store 12*H to stay integral: H(0) = -1/12 -> 12H = -1
        let mut h12: Vec<i64> = vec![0; (4 * nmax + 1) as usize];
        h12[0] = -1;
        for n in 1..=nmax {
            let sigma1: i64 = divisors(n).iter().map(|&d| d as i64).sum();
            let minsum: i64 = divisors(n)
                .iter()
                .map(|&d| std::cmp::min(d, n / d) as i64)
                .sum();
            let minsum3: i64 = divisors(n)
                .iter()
                .map(|&d| {
                    let m = std::cmp::min(d, n / d) as i64;
                    m * m * m
                })
                .sum();
            // known part of each relation from t with t^2 < 4n, t != 0,1 cases:
            // unknowns are H(4n) (t=0) and H(4n-1) (t=+-1).
            let mut rhs1 = 12 * (2 * sigma1 - minsum);
            let mut rhs2 = 12 * (-minsum3);
            let tmax = (4.0 * n as f64).sqrt() as i64 + 1;
            for t in -tmax..=tmax {
                let t2 = t * t;
                if t2 > 4 * n as i64 {
                    continue;
                }
                let m = 4 * n as i64 - t2;
                if t == 0 || t == 1 || t == -1 {
                    continue; // unknown slots
                }
                rhs1 -= h12[m as usize];
                rhs2 -= (t2 - n as i64) * h12[m as usize];
            }
            // unknowns x = 12*H(4n), y = 12*H(4n-1):
            //   x + 2y = rhs1
            //   -n x + 2(1-n) y = rhs2
            // Solve explicitly: from first eq x = rhs1 - 2y; substitute:
            // -n(rhs1 - 2y) + 2(1-n)y = rhs2 => y(2n + 2 - 2n) = rhs2 + n*rhs1
            let y2 = rhs2 + n as i64 * rhs1;
            assert_eq!(y2 % 2, 0);
            let y = y2 / 2;
            let x = rhs1 - 2 * y;
            h12[(4 * n) as usize] = x;
            h12[(4 * n - 1) as usize] = y;
        }
        // Compare recursion-derived H against direct reduced-form counts.
        for m in 1..=(4 * nmax) {
            if m % 4 == 1 || m % 4 == 2 {
                assert_eq!(h12[m as usize], 0, "H({m}) should vanish");
                continue;
            }
            let (num, den) = hurwitz_class_number(m);
            assert_eq!(h12[m as usize] * den, 12 * num, "H({m})");
        }
        // h(d) = H(|d|) * w(d) / 2 for fundamental d
        for d in (-(4 * nmax as i64))..0 {
            if !is_fundamental_discriminant(d) {
                continue;
            }
            let (num, den) = hurwitz_class_number((-d) as u64);
            let w = unit_count(d) as i64;
            let h = class_number(d).unwrap() as i64;
            // h = H * w/2  =>  2*h*den = w*num
            assert_eq!(2 * h * den, w * num, "d={d}");
        }
    }

    fn divisors(n: u64) -> Vec<u64> {
        let mut v = Vec::new();
        let mut d = 1;
        while d * d <= n {
            if n % d == 0 {
                v.push(d);
                if d * d != n {
                    v.push(n / d);
                }
            }
            d += 1;
        }
        v
    }
}
