//! Definite quaternion algebras (a, b / Q) in the basis 1, i, j, k with
//! i^2 = a, j^2 = b, k = ij, and their ramification data.

use crate::exact::arith::{factor, kronecker};
use crate::exact::mat::Mat;
use crate::exact::{int, rat, rat_of, Int, Rat};
use crate::{Error, Result};
use num_traits::{Signed, Zero};

/// Quaternion with rational coordinates (t, x, y, z) = t + xi + yj + zk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quat(pub [Rat; 4]);

impl Quat {
    pub fn zero() -> Quat {
        Quat([Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()])
    }

    pub fn one() -> Quat {
        let mut q = Quat::zero();
        q.0[0] = rat(1);
        q
    }

    pub fn from_vec(v: &[Rat]) -> Quat {
        assert_eq!(v.len(), 4);
        Quat([v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()])
    }

    pub fn to_vec(&self) -> Vec<Rat> {
        self.0.to_vec()
    }

    pub fn conj(&self) -> Quat {
        Quat([
            self.0[0].clone(),
            -self.0[1].clone(),
            -self.0[2].clone(),
            -self.0[3].clone(),
        ])
    }

    pub fn trd(&self) -> Rat {
        &self.0[0] + &self.0[0]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Quat) -> Quat {
        Quat([
            &self.0[0] + &other.0[0],
            &self.0[1] + &other.0[1],
            &self.0[2] + &other.0[2],
            &self.0[3] + &other.0[3],
        ])
    }

    pub fn sub(&self, other: &Quat) -> Quat {
        Quat([
            &self.0[0] - &other.0[0],
            &self.0[1] - &other.0[1],
            &self.0[2] - &other.0[2],
            &self.0[3] - &other.0[3],
        ])
    }

    pub fn scale(&self, c: &Rat) -> Quat {
        Quat([
            &self.0[0] * c,
            &self.0[1] * c,
            &self.0[2] * c,
            &self.0[3] * c,
        ])
    }

    pub fn neg(&self) -> Quat {
        self.scale(&rat(-1))
    }

    /// Canonical representative of {q, -q}: first nonzero coordinate
    /// positive.
    pub fn canonical_sign(&self) -> Quat {
        for c in &self.0 {
            if c.is_positive() {
                return self.clone();
            }
            if c.is_negative() {
                return self.neg();
            }
        }
        self.clone()
    }

    /// Trace-zero part (x, y, z) in the basis i, j, k.
    pub fn pure_part(&self) -> [Rat; 3] {
        [self.0[1].clone(), self.0[2].clone(), self.0[3].clone()]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuatAlgebra {
    pub a: Int,
    pub b: Int,
}

impl QuatAlgebra {
    /// Definite algebra (a, b / Q); a and b must be negative. Rational
    /// parameters are replaced by the integer representatives a*den(a)^2,
    /// b*den(b)^2 of the same square classes.
    pub fn new(a: &Rat, b: &Rat) -> Result<QuatAlgebra> {
        if !a.is_negative() || !b.is_negative() {
            return Err(Error::InvalidInput(format!(
                "algebra parameters must be negative for a definite algebra, got a={a}, b={b}"
            )));
        }
        Ok(QuatAlgebra {
            a: a.numer() * a.denom(),
            b: b.numer() * b.denom(),
        })
    }

    pub fn from_ints(a: i64, b: i64) -> Result<QuatAlgebra> {
        QuatAlgebra::new(&rat(a), &rat(b))
    }

    pub fn mul(&self, p: &Quat, q: &Quat) -> Quat {
        let (t1, x1, y1, z1) = (&p.0[0], &p.0[1], &p.0[2], &p.0[3]);
        let (t2, x2, y2, z2) = (&q.0[0], &q.0[1], &q.0[2], &q.0[3]);
        let a = rat_of(&self.a);
        let b = rat_of(&self.b);
        let ab = &a * &b;
        Quat([
            t1 * t2 + &a * x1 * x2 + &b * y1 * y2 - &ab * z1 * z2,
            t1 * x2 + x1 * t2 - &b * (y1 * z2 - z1 * y2),
            t1 * y2 + y1 * t2 + &a * (x1 * z2 - z1 * x2),
            t1 * z2 + z1 * t2 + (x1 * y2 - y1 * x2),
        ])
    }

    pub fn nrd(&self, q: &Quat) -> Rat {
        let (t, x, y, z) = (&q.0[0], &q.0[1], &q.0[2], &q.0[3]);
        let a = rat_of(&self.a);
        let b = rat_of(&self.b);
        t * t - &a * x * x - &b * y * y + &a * &b * z * z
    }

    pub fn inv(&self, q: &Quat) -> Result<Quat> {
        let n = self.nrd(q);
        if n.is_zero() {
            return Err(Error::InvalidInput("inverse of zero quaternion".into()));
        }
        Ok(q.conj().scale(&(rat(1) / n)))
    }

    /// disc(x) = trd(x)^2 - 4 nrd(x); negative definite on nonzero
    /// trace-zero elements.
    pub fn disc_elem(&self, q: &Quat) -> Rat {
        let t = q.trd();
        &t * &t - rat(4) * self.nrd(q)
    }

    /// Gram matrix of the reduced norm as a quadratic form on (t, x, y, z):
    /// diag(1, -a, -b, ab), positive definite.
    pub fn nrd_gram(&self) -> Mat {
        let mut g = crate::exact::mat::zeros(4, 4);
        g[0][0] = rat(1);
        g[1][1] = -rat_of(&self.a);
        g[2][2] = -rat_of(&self.b);
        g[3][3] = rat_of(&self.a) * rat_of(&self.b);
        g
    }

    /// Finite primes where the algebra ramifies, ascending. The infinite
    /// place is ramified too (definite), so the list has odd length.
    pub fn ramified_primes(&self) -> Vec<i64> {
        let a = int_to_i64(&self.a);
        let b = int_to_i64(&self.b);
        let mut candidates: Vec<i64> = vec![2];
        for (p, _) in factor(a) {
            if p != 2 && !candidates.contains(&p) {
                candidates.push(p);
            }
        }
        for (p, _) in factor(b) {
            if p != 2 && !candidates.contains(&p) {
                candidates.push(p);
            }
        }
        let mut ram: Vec<i64> = candidates
            .into_iter()
            .filter(|&p| hilbert_symbol(a, b, p) == -1)
            .collect();
        ram.sort_unstable();
        // definite algebra: infinite place ramified, so finite count is odd
        assert!(ram.len() % 2 == 1, "ramification parity violated");
        ram
    }

    pub fn is_ramified(&self, p: i64) -> bool {
        hilbert_symbol(int_to_i64(&self.a), int_to_i64(&self.b), p) == -1
    }

    /// Product of the finite ramified primes.
    pub fn discriminant(&self) -> Int {
        self.ramified_primes()
            .iter()
            .fold(int(1), |acc, &p| acc * int(p))
    }
}

pub fn int_to_i64(n: &Int) -> i64 {
    n.to_string().parse::<i64>().expect("integer out of i64 range")
}

/// Hilbert symbol (a, b)_p for a prime p (finite), with a, b nonzero.
pub fn hilbert_symbol(a: i64, b: i64, p: i64) -> i32 {
    assert!(a != 0 && b != 0 && p >= 2);
    let (alpha, u) = strip(a, p);
    let (beta, v) = strip(b, p);
    if p == 2 {
        let eps = |x: i64| ((x.rem_euclid(8) - 1) / 2) % 2; // (x-1)/2 mod 2 for odd x
        let omega = |x: i64| {
            let r = x.rem_euclid(8);
            if r == 1 || r == 7 {
                0
            } else {
                1
            }
        };
        let e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u);
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    } else {
        let mut sign = 1i32;
        if (alpha * beta) % 2 == 1 && (p - 1) / 2 % 2 == 1 {
            sign = -sign;
        }
        if beta % 2 == 1 {
            sign *= kronecker(u, p);
        }
        if alpha % 2 == 1 {
            sign *= kronecker(v, p);
        }
        sign
    }
}

fn strip(n: i64, p: i64) -> (i64, i64) {
    let mut e = 0;
    let mut m = n;
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    (e, m)
}

/// Quaternion valued at integer coordinates, convenience for tests.
pub fn quat_i(t: i64, x: i64, y: i64, z: i64) -> Quat {
    Quat([rat(t), rat(x), rat(y), rat(z)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    #[test]
    fn multiplication_table() {
        let alg = QuatAlgebra::from_ints(-1, -1).unwrap();
        let i = quat_i(0, 1, 0, 0);
        let j = quat_i(0, 0, 1, 0);
        let k = quat_i(0, 0, 0, 1);
        assert_eq!(alg.mul(&i, &i), quat_i(-1, 0, 0, 0));
        assert_eq!(alg.mul(&j, &j), quat_i(-1, 0, 0, 0));
        assert_eq!(alg.mul(&i, &j), k);
        assert_eq!(alg.mul(&j, &i), k.neg());
        assert_eq!(alg.mul(&k, &k), quat_i(-1, 0, 0, 0));
        assert_eq!(alg.mul(&i, &k), j.neg());
        assert_eq!(alg.mul(&k, &i), j);
        // general a, b
        let alg = QuatAlgebra::from_ints(-2, -7).unwrap();
        let (a, b) = (rat(-2), rat(-7));
        assert_eq!(alg.mul(&i, &k), j.scale(&a));
        assert_eq!(alg.mul(&k, &i), j.scale(&a).neg());
        assert_eq!(alg.mul(&j, &k), i.scale(&b).neg());
        assert_eq!(alg.mul(&k, &j), i.scale(&b));
        assert_eq!(alg.mul(&k, &k), quat_i(-14, 0, 0, 0));
    }

    #[test]
    fn norm_trace_mult() {
        let alg = QuatAlgebra::from_ints(-1, -11).unwrap();
        let p = quat_i(1, 2, -1, 3);
        let q = quat_i(-2, 0, 5, 1);
        // nrd multiplicative
        assert_eq!(
            alg.nrd(&alg.mul(&p, &q)),
            alg.nrd(&p) * alg.nrd(&q)
        );
        // q * conj(q) = nrd(q)
        let n = alg.mul(&p, &p.conj());
        assert_eq!(n.0[0], alg.nrd(&p));
        assert!(n.0[1].is_zero() && n.0[2].is_zero() && n.0[3].is_zero());
        // trace formula
        assert_eq!(p.trd(), rat(2));
        // inverse
        let inv = alg.inv(&q).unwrap();
        assert_eq!(alg.mul(&q, &inv), Quat::one());
        assert_eq!(alg.mul(&inv, &q), Quat::one());
        // disc of a pure quaternion is -4 nrd
        let w = quat_i(0, 1, 2, 3);
        assert_eq!(alg.disc_elem(&w), rat(-4) * alg.nrd(&w));
    }

    #[test]
    fn algebra_normalizes_rationals() {
        let alg = QuatAlgebra::new(&ratio(-1, 2), &ratio(-3, 5)).unwrap();
        assert_eq!(alg.a, int(-2));
        assert_eq!(alg.b, int(-15));
        assert!(QuatAlgebra::from_ints(1, -1).is_err());
    }

    #[test]
    fn hilbert_symbol_values() {
        // (-1,-1) ramifies exactly at 2 (and infinity)
        assert_eq!(hilbert_symbol(-1, -1, 2), -1);
        for &p in &[3i64, 5, 7, 11, 13] {
            assert_eq!(hilbert_symbol(-1, -1, p), 1, "p={p}");
        }
        // (-1,-11): ramified at 11 only
        assert_eq!(hilbert_symbol(-1, -11, 2), 1);
        assert_eq!(hilbert_symbol(-1, -11, 11), -1);
        assert_eq!(hilbert_symbol(-1, -11, 3), 1);
        // (-1,-3): ramified at 3
        assert_eq!(hilbert_symbol(-1, -3, 2), 1);
        assert_eq!(hilbert_symbol(-1, -3, 3), -1);
        // symmetry and square invariance
        for &(a, b) in &[(-1i64, -1i64), (-2, -5), (-3, -7), (-1, -23)] {
            for &p in &[2i64, 3, 5, 7, 11, 23] {
                assert_eq!(hilbert_symbol(a, b, p), hilbert_symbol(b, a, p));
                assert_eq!(hilbert_symbol(a, b, p), hilbert_symbol(a * 9, b, p));
                assert_eq!(hilbert_symbol(a, b, p), hilbert_symbol(a, b * 4, p));
            }
        }
        // bilinearity in first argument at odd p
        for &p in &[3i64, 5, 7, 13] {
            for a1 in [-6i64, -5, -2, -1, 2, 3] {
                for a2 in [-7i64, -3, -1, 1, 5] {
                    for b in [-11i64, -2, 7] {
                        assert_eq!(
                            hilbert_symbol(a1 * a2, b, p),
                            hilbert_symbol(a1, b, p) * hilbert_symbol(a2, b, p),
                            "a1={a1} a2={a2} b={b} p={p}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn ramified_sets() {
        assert_eq!(
            QuatAlgebra::from_ints(-1, -1).unwrap().ramified_primes(),
            vec![2]
        );
        assert_eq!(
            QuatAlgebra::from_ints(-1, -11).unwrap().ramified_primes(),
            vec![11]
        );
        assert_eq!(
            QuatAlgebra::from_ints(-1, -3).unwrap().ramified_primes(),
            vec![3]
        );
        assert_eq!(
            QuatAlgebra::from_ints(-2, -5).unwrap().ramified_primes(),
            vec![5]
        );
        assert_eq!(
            QuatAlgebra::from_ints(-1, -7).unwrap().ramified_primes(),
            vec![7]
        );
        // product of two ramified sets
        let alg = QuatAlgebra::from_ints(-1, -33).unwrap();
        let ram = alg.ramified_primes();
        assert_eq!(ram.len() % 2, 1);
        assert_eq!(alg.discriminant(), int(ram.iter().product::<i64>()));
    }
}
