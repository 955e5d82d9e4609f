//! The weight-k coefficient representation: harmonic homogeneous
//! polynomials of degree k on the trace-zero space W of a definite
//! quaternion algebra, with the positive form Q(w) = 4 nrd(w) = -disc(w),
//! its apolar inner product, the conjugation action of B^x, and the
//! reproducing (Gegenbauer) vectors.

use crate::exact::mat::{self, Mat};
use crate::exact::{int, rat, Int, Rat};
use crate::quat::algebra::{Quat, QuatAlgebra};
use crate::{Error, Result};
use num_traits::{One, Zero};

/// Monomial exponents (a, b, c) for the three W-coordinates, total degree k.
pub type Mono = [u32; 3];

#[derive(Clone, Debug)]
pub struct HarmonicSpace {
    pub alg: QuatAlgebra,
    pub k: u32,
    /// diagonal Gram entries of Q on W in the basis (i, j, ij):
    /// (-4a, -4b, 4ab), all positive.
    pub gram_w: [Rat; 3],
    /// degree-k monomials in a fixed order
    pub monos: Vec<Mono>,
    /// harmonic basis, rows of monomial coordinates, echelon-canonical
    pub basis: Vec<Vec<Rat>>,
    /// Gram matrix of the inner product on the harmonic basis
    pub gram: Mat,
    gram_inv: Mat,
}

fn mono_list(k: u32) -> Vec<Mono> {
    let mut v = Vec::new();
    for a in (0..=k).rev() {
        for b in (0..=(k - a)).rev() {
            v.push([a, b, k - a - b]);
        }
    }
    v
}

fn factorial_int(n: u32) -> Int {
    (1..=n).fold(int(1), |acc, i| acc * int(i as i64))
}

impl HarmonicSpace {
    pub fn new(alg: &QuatAlgebra, k: u32) -> Result<HarmonicSpace> {
        let a = rat_of_int(&alg.a);
        let b = rat_of_int(&alg.b);
        let gram_w = [rat(-4) * &a, rat(-4) * &b, rat(4) * &a * &b];
        for g in &gram_w {
            if *g <= Rat::zero() {
                return Err(Error::InvalidInput(
                    "the quadratic form on W must be positive definite".into(),
                ));
            }
        }
        let monos = mono_list(k);
        let n = monos.len();
        // monomial norms of the normalized apolar pairing:
        // <x^e, x^e> = e! / (k! prod g_i^{e_i}).
        // The 1/k! makes the reproducing vector at a point of value D have
        // squared norm exactly D^k s_k.
        let kfact = Rat::from_integer(factorial_int(k));
        let mono_norms: Vec<Rat> = monos
            .iter()
            .map(|e| {
                let mut v = Rat::one() / &kfact;
                for i in 0..3 {
                    v *= Rat::from_integer(factorial_int(e[i]));
                    v /= gram_w[i].clone().pow(e[i] as i32);
                }
                v
            })
            .collect();
        // harmonic = kernel of the Laplacian of the dual form,
        // sum_i (1/g_i) d_i^2, mapping degree k to degree k-2
        let basis = if k < 2 {
            mat::identity(n)
        } else {
            let lower = mono_list(k - 2);
            let mut lap = mat::zeros(n, lower.len());
            for (col, e) in monos.iter().enumerate() {
                for i in 0..3 {
                    if e[i] >= 2 {
                        let mut e2 = *e;
                        e2[i] -= 2;
                        let row = lower.iter().position(|m| *m == e2).unwrap();
                        lap[col][row] = rat((e[i] * (e[i] - 1)) as i64) / &gram_w[i];
                    }
                }
            }
            // coefficient vectors p with p * lap = 0
            let ker = mat::kernel(&mat::transpose(&lap));
            mat::rref(&ker).0
        };
        if basis.len() != (2 * k + 1) as usize {
            return Err(Error::Consistency(format!(
                "harmonic space at k={k} has dimension {}, expected {}",
                basis.len(),
                2 * k + 1
            )));
        }
        // Gram of the basis under the diagonal monomial pairing
        let dim = basis.len();
        let mut gram = mat::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut s = Rat::zero();
                for m in 0..n {
                    s += &basis[i][m] * &basis[j][m] * &mono_norms[m];
                }
                gram[i][j] = s;
            }
        }
        let gram_inv = mat::inverse(&gram)?;
        Ok(HarmonicSpace {
            alg: alg.clone(),
            k,
            gram_w,
            monos,
            basis,
            gram,
            gram_inv,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Inner product of two vectors given in harmonic-basis coordinates.
    pub fn inner(&self, p: &[Rat], q: &[Rat]) -> Rat {
        let mut s = Rat::zero();
        for i in 0..p.len() {
            if p[i].is_zero() {
                continue;
            }
            for j in 0..q.len() {
                s += &p[i] * &q[j] * &self.gram[i][j];
            }
        }
        s
    }

    /// Evaluate a harmonic-basis vector at a point of W.
    pub fn eval(&self, p: &[Rat], w: &[Rat; 3]) -> Rat {
        let mut s = Rat::zero();
        for (c, row) in p.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            let mut t = Rat::zero();
            for (cm, e) in row.iter().zip(&self.monos) {
                if cm.is_zero() {
                    continue;
                }
                let mut term = cm.clone();
                for i in 0..3 {
                    term *= w[i].clone().pow(e[i] as i32);
                }
                t += term;
            }
            s += c * t;
        }
        s
    }

    /// The 3x3 matrix of conjugation w -> gamma w gamma^{-1} on W-coordinates.
    pub fn conj_matrix(&self, gamma: &Quat) -> Result<Mat> {
        let ginv = self.alg.inv(gamma)?;
        let mut c = mat::zeros(3, 3);
        for j in 0..3 {
            let mut e = Quat::zero();
            e.0[j + 1] = Rat::one();
            let img = self.alg.mul(&self.alg.mul(gamma, &e), &ginv);
            debug_assert!(img.trd().is_zero());
            for i in 0..3 {
                c[i][j] = img.0[i + 1].clone();
            }
        }
        Ok(c)
    }

    /// Matrix of the action P -> P((conjugation by gamma) w) on
    /// harmonic-basis coordinates: coords map as v -> v A, row convention.
    pub fn act_matrix(&self, gamma: &Quat) -> Result<Mat> {
        let c = self.conj_matrix(gamma)?;
        // substituted monomials: x^e -> prod_i (sum_j c[i][j] x_j)^{e_i}
        let n = self.monos.len();
        let mut sub = mat::zeros(n, n);
        for (col, e) in self.monos.iter().enumerate() {
            // expand the product over i of linear forms to a monomial vector
            let mut acc: Vec<(Mono, Rat)> = vec![([0, 0, 0], Rat::one())];
            for i in 0..3 {
                for _ in 0..e[i] {
                    let mut next: Vec<(Mono, Rat)> = Vec::new();
                    for (m, coef) in &acc {
                        for j in 0..3 {
                            if c[i][j].is_zero() {
                                continue;
                            }
                            let mut m2 = *m;
                            m2[j] += 1;
                            let coef2 = coef * &c[i][j];
                            if let Some(entry) = next.iter_mut().find(|(mm, _)| *mm == m2) {
                                entry.1 += coef2;
                            } else {
                                next.push((m2, coef2));
                            }
                        }
                    }
                    acc = next;
                }
            }
            for (m, coef) in acc {
                let row = self.monos.iter().position(|mm| *mm == m).unwrap();
                sub[col][row] = coef;
            }
        }
        // each substituted basis row must lie in the harmonic row space
        let imgs: Mat = self
            .basis
            .iter()
            .map(|row| mat::vec_mul(row, &sub))
            .collect();
        mat::express_in_rowspace(&self.basis, &imgs)
    }

    /// Apply the action of gamma to a coordinate vector.
    pub fn act(&self, p: &[Rat], gamma: &Quat) -> Result<Vec<Rat>> {
        Ok(mat::vec_mul(p, &self.act_matrix(gamma)?))
    }

    /// The reproducing vector at a point w of W with Q(w) = D > 0:
    /// <P, P_w> = P(w) for every harmonic P. Returned in basis coordinates.
    pub fn gegenbauer_vector(&self, w: &[Rat; 3]) -> Result<Vec<Rat>> {
        let d = self.q_value(w);
        if d <= Rat::zero() {
            return Err(Error::InvalidInput(
                "reproducing vector requires a nonzero point".into(),
            ));
        }
        let rhs: Vec<Rat> = (0..self.dim())
            .map(|i| {
                let mut unit = vec![Rat::zero(); self.dim()];
                unit[i] = Rat::one();
                self.eval(&unit, w)
            })
            .collect();
        Ok(mat::mul_vec(&self.gram_inv, &rhs))
    }

    /// Q(w) = 4 nrd(w) for w in W.
    pub fn q_value(&self, w: &[Rat; 3]) -> Rat {
        let mut s = Rat::zero();
        for i in 0..3 {
            s += &self.gram_w[i] * &w[i] * &w[i];
        }
        s
    }

    /// Projection of a quaternion to W: strip half the trace, return the
    /// three pure coordinates.
    pub fn project(&self, q: &Quat) -> [Rat; 3] {
        [q.0[1].clone(), q.0[2].clone(), q.0[3].clone()]
    }
}

fn rat_of_int(n: &Int) -> Rat {
    Rat::from_integer(n.clone())
}

/// s_k = 2^k (k!)^2 / (2k)! = k!/(2k-1)!!, the squared norm of the
/// reproducing vector at a point of value 1. Together with r_k this gives
/// c(k) = 2^(k+1).
pub fn s_k(k: u32) -> Rat {
    let num = rat(2).pow(k as i32)
        * Rat::from_integer(factorial_int(k))
        * Rat::from_integer(factorial_int(k));
    num / Rat::from_integer(factorial_int(2 * k))
}

/// r_k = 2^(2k+1) (k!)^2 / (2k)!
pub fn r_k(k: u32) -> Rat {
    let num = rat(2).pow(2 * k as i32 + 1)
        * Rat::from_integer(factorial_int(k))
        * Rat::from_integer(factorial_int(k));
    num / Rat::from_integer(factorial_int(2 * k))
}

/// c(k) = r_k / s_k
pub fn c_k(k: u32) -> Rat {
    r_k(k) / s_k(k)
}
