//! Two-sided ideals W_p of an order R, one per prime dividing the reduced
//! discriminant, satisfying W_p^2 = p^v R with v = v_p(disc). They generate
//! the group of Atkin-Lehner symmetries of the right ideal classes: each W_p
//! acts by I -> I W_p, an involution on classes.

use super::classes::ClassSet;
use super::ideal::{connecting_elements, isomorphic, mul_lattices, RightIdeal};
use super::order::QuatOrder;
use crate::exact::enumerate::enumerate_in_lattice;
use crate::exact::{int, rat, Int, Lattice, Rat};
use crate::quat::algebra::Quat;
use crate::{Error, Result};
use num_traits::Zero;
use std::collections::BTreeMap;

/// The two-sided ideal over p: for v = 1 the preimage of the radical of
/// R/pR, otherwise R w for the first enumerated element w of reduced norm
/// p^v normalizing R. Verified to square to p^v R.
pub fn normalizer_w(order: &QuatOrder, p: i64) -> Result<Lattice> {
    let disc = order.reduced_discriminant();
    let mut v = 0u32;
    let mut d = disc.clone();
    let pi = int(p);
    while (&d % &pi).is_zero() {
        d /= &pi;
        v += 1;
    }
    if v == 0 {
        return Err(Error::InvalidInput(format!(
            "prime {p} does not divide the reduced discriminant {disc}"
        )));
    }
    let w = if v == 1 {
        // pR plus lifts of the radical of R/pR
        let rad = order.radical_mod_p(p);
        let mut gens: Vec<Vec<Rat>> = Vec::new();
        for b in order.lattice.basis() {
            gens.push(b.iter().map(|c| c * rat(p)).collect());
        }
        let basis = order.basis();
        for r in &rad {
            // radical rows are coordinates in the order basis mod p
            let mut q = Quat::zero();
            for (c, b) in r.iter().zip(&basis) {
                q = q.add(&b.scale(&rat(*c)));
            }
            gens.push(q.to_vec());
        }
        Lattice::span(4, &gens)
    } else {
        let target = rat(p).pow(v as i32);
        let candidates = enumerate_in_lattice(&order.lattice, &order.alg.nrd_gram(), &target)?;
        let mut found = None;
        for cand in &candidates {
            let q = Quat::from_vec(cand);
            let q = q.canonical_sign();
            if normalizes(order, &q)? {
                found = Some(q);
                break;
            }
        }
        let w_elt = found.ok_or_else(|| {
            Error::NotFound(format!(
                "no element of reduced norm {p}^{v} normalizing the order; \
                 the two-sided ideal over {p} is not principal"
            ))
        })?;
        let gens: Vec<Vec<Rat>> = order
            .basis()
            .iter()
            .map(|b| order.alg.mul(b, &w_elt).to_vec())
            .collect();
        Lattice::span(4, &gens)
    };
    // certificate: W^2 = p^v R exactly
    let w2 = mul_lattices(&order.alg, &w, &w);
    let pvr = order.lattice.scaled(&rat(p).pow(v as i32));
    if w2 != pvr {
        return Err(Error::Consistency(format!(
            "two-sided ideal over {p} does not square to {p}^{v} R"
        )));
    }
    Ok(w)
}

fn normalizes(order: &QuatOrder, w: &Quat) -> Result<bool> {
    let winv = order.alg.inv(w)?;
    for b in order.basis() {
        let c = order.alg.mul(&order.alg.mul(w, &b), &winv);
        if !order.contains(&c) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All two-sided generators, one per prime of the reduced discriminant.
pub fn normalizer_generators(order: &QuatOrder) -> Result<BTreeMap<i64, Lattice>> {
    let mut out = BTreeMap::new();
    let disc = int_to_small(&order.reduced_discriminant())?;
    for (p, _) in crate::exact::arith::factor(disc) {
        out.insert(p, normalizer_w(order, p)?);
    }
    Ok(out)
}

fn int_to_small(n: &Int) -> Result<i64> {
    use num_traits::ToPrimitive;
    n.to_i64()
        .ok_or_else(|| Error::Unsupported("discriminant exceeds i64".into()))
}

/// Action of a two-sided ideal on the ideal classes: the permutation sigma
/// with [I_i W] = [I_sigma(i)] and for each class a connecting element
/// gamma_i with gamma_i I_sigma(i) = I_i W.
pub struct ClassAction {
    pub perm: Vec<usize>,
    pub twists: Vec<Quat>,
}

pub fn class_action(classes: &ClassSet, w: &Lattice) -> Result<ClassAction> {
    let h = classes.class_number();
    let mut perm = vec![usize::MAX; h];
    let mut twists = Vec::with_capacity(h);
    for i in 0..h {
        let jw_lat = mul_lattices(&classes.order.alg, &classes.ideals[i].lattice, w);
        let jw = RightIdeal::new(classes.order.clone(), jw_lat)?;
        let mut image = None;
        for (j, rep) in classes.ideals.iter().enumerate() {
            if isomorphic(&jw, rep)? {
                image = Some(j);
                break;
            }
        }
        let j = image.ok_or_else(|| {
            Error::Consistency("ideal times two-sided ideal leaves the class set".into())
        })?;
        perm[i] = j;
        let conn = connecting_elements(&jw, &classes.ideals[j], 1)?;
        let gamma = conn
            .into_iter()
            .next()
            .ok_or_else(|| Error::Consistency("isomorphic ideals with no connecting element".into()))?;
        twists.push(gamma);
    }
    // must be a bijection
    let mut seen = vec![false; h];
    for &j in &perm {
        if j == usize::MAX || seen[j] {
            return Err(Error::Consistency(
                "two-sided ideal action is not a permutation of classes".into(),
            ));
        }
        seen[j] = true;
    }
    Ok(ClassAction { perm, twists })
}

/// The abstract Atkin-Lehner group has order 2^(number of primes dividing
/// the reduced discriminant); list the subset products' class permutations
/// and verify each generator is an involution on classes.
pub fn bil_order(order: &QuatOrder) -> Result<u64> {
    let disc = int_to_small(&order.reduced_discriminant())?;
    let omega = crate::exact::arith::factor(disc).len() as u32;
    Ok(1u64 << omega)
}

/// Weight of a prime p in the discriminant (the exponent v_p).
pub fn disc_valuation(order: &QuatOrder, p: i64) -> u32 {
    let mut v = 0u32;
    let mut d = order.reduced_discriminant();
    let pi = int(p);
    while (&d % &pi).is_zero() {
        d /= &pi;
        v += 1;
    }
    v
}
