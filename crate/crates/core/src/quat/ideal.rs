//! Right ideals of a quaternion order: norms, inverses, left orders, and
//! the connecting elements between two ideals that drive both the
//! isomorphism test and the Hecke block construction.

use super::algebra::{Quat, QuatAlgebra};
use super::order::QuatOrder;
use crate::exact::{rat_sqrt, Lattice, Rat};
use crate::{Error, Result};
use num_traits::One;

/// A full-rank lattice I with I * R = I for a fixed order R (the right
/// order, stored with the ideal).
#[derive(Clone, Debug, PartialEq)]
pub struct RightIdeal {
    pub order: QuatOrder,
    pub lattice: Lattice,
}

impl RightIdeal {
    pub fn new(order: QuatOrder, lattice: Lattice) -> Result<RightIdeal> {
        if lattice.rank() != 4 || lattice.dim() != 4 {
            return Err(Error::InvalidInput("ideal lattice must have rank 4".into()));
        }
        let ideal = RightIdeal { order, lattice };
        if !ideal.is_right_stable() {
            return Err(Error::InvalidInput(
                "lattice is not stable under the order acting on the right".into(),
            ));
        }
        Ok(ideal)
    }

    /// The unit ideal R itself.
    pub fn unit_ideal(order: &QuatOrder) -> RightIdeal {
        RightIdeal {
            order: order.clone(),
            lattice: order.lattice.clone(),
        }
    }

    /// The principal ideal x R.
    pub fn principal(order: &QuatOrder, x: &Quat) -> Result<RightIdeal> {
        let alg = order.alg.clone();
        let gens: Vec<Vec<Rat>> = order
            .basis()
            .iter()
            .map(|b| alg.mul(x, b).to_vec())
            .collect();
        RightIdeal::new(order.clone(), Lattice::span(4, &gens))
    }

    fn is_right_stable(&self) -> bool {
        let alg = &self.order.alg;
        for v in self.lattice.basis() {
            let q = Quat::from_vec(&v);
            for b in self.order.basis() {
                if !self.lattice.contains(&alg.mul(&q, &b).to_vec()) {
                    return false;
                }
            }
        }
        true
    }

    /// Reduced norm: the positive rational with n(I)^2 = [R : I] as a
    /// generalized (determinant ratio) index.
    pub fn norm(&self) -> Rat {
        let index = self.lattice.index_in(&self.order.lattice);
        rat_sqrt(&index).expect("ideal index is a square of a rational")
    }

    /// Conjugate lattice (a left ideal of R; returned as a raw lattice).
    pub fn conj_lattice(&self) -> Lattice {
        let gens: Vec<Vec<Rat>> = self
            .lattice
            .basis()
            .iter()
            .map(|v| Quat::from_vec(v).conj().to_vec())
            .collect();
        Lattice::span(4, &gens)
    }

    /// Inverse lattice conj(I)/n(I): satisfies I * inv = left order of I
    /// and inv * I = R.
    pub fn inverse_lattice(&self) -> Lattice {
        self.conj_lattice().scaled(&(Rat::one() / self.norm()))
    }

    /// Left order {x : x I within I}, computed as the intersection of the
    /// lattices I b^{-1} over a basis b of I.
    pub fn left_order(&self) -> Result<QuatOrder> {
        let alg = &self.order.alg;
        let mut result: Option<Lattice> = None;
        for v in self.lattice.basis() {
            let binv = alg.inv(&Quat::from_vec(&v))?;
            let gens: Vec<Vec<Rat>> = self
                .lattice
                .basis()
                .iter()
                .map(|w| alg.mul(&Quat::from_vec(w), &binv).to_vec())
                .collect();
            let li = Lattice::span(4, &gens);
            result = Some(match result {
                None => li,
                Some(acc) => acc.intersect(&li)?,
            });
        }
        QuatOrder::new(alg.clone(), result.unwrap())
    }

    /// Scale every element by a nonzero rational.
    pub fn scaled(&self, r: &Rat) -> RightIdeal {
        RightIdeal {
            order: self.order.clone(),
            lattice: self.lattice.scaled(r),
        }
    }
}

/// Span of all pairwise products xy, x in A, y in B.
pub fn mul_lattices(alg: &QuatAlgebra, a: &Lattice, b: &Lattice) -> Lattice {
    let mut gens = Vec::with_capacity(16);
    for x in a.basis() {
        let qx = Quat::from_vec(&x);
        for y in b.basis() {
            gens.push(alg.mul(&qx, &Quat::from_vec(&y)).to_vec());
        }
    }
    Lattice::span(4, &gens)
}

/// Elements of I J^{-1} of reduced norm m n(I)/n(J), one representative
/// per +- pair, in a fixed deterministic order. Nonempty at m = 1 exactly
/// when I and J are isomorphic as right modules over their common order.
pub fn connecting_elements(i: &RightIdeal, j: &RightIdeal, m: i64) -> Result<Vec<Quat>> {
    let alg = &i.order.alg;
    let prod = mul_lattices(alg, &i.lattice, &j.inverse_lattice());
    let target = Rat::from_integer(m.into()) * i.norm() / j.norm();
    let gram = alg.nrd_gram();
    let mut out: Vec<Quat> = crate::exact::enumerate::enumerate_in_lattice(&prod, &gram, &target)?
        .iter()
        .map(|v| Quat::from_vec(v).canonical_sign())
        .collect();
    out.sort_by(|a, b| a.to_vec().cmp(&b.to_vec()));
    out.dedup();
    Ok(out)
}

/// Right-module isomorphism test over the common right order.
pub fn isomorphic(i: &RightIdeal, j: &RightIdeal) -> Result<bool> {
    Ok(!connecting_elements(i, j, 1)?.is_empty())
}
