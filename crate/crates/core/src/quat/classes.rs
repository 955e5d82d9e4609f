//! Enumeration of the right ideal classes of an order by walking the
//! q-neighbor graph at an auxiliary prime q coprime to the discriminant,
//! with the weighted mass serving as the completeness certificate.

use super::algebra::{int_to_i64, Quat};
use super::ideal::{isomorphic, RightIdeal};
use super::order::QuatOrder;
use crate::exact::arith::is_prime;
use crate::exact::{int, rat, ratio, Lattice, Rat};
use crate::{Error, Result};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// The right ideal classes of an order: representatives (the first one is
/// the order itself), their left orders, and the unit weights w_x that
/// enter every weighted sum over classes.
#[derive(Clone, Debug)]
pub struct ClassSet {
    pub order: QuatOrder,
    pub ideals: Vec<RightIdeal>,
    pub left_orders: Vec<QuatOrder>,
    pub weights: Vec<u64>,
}

impl ClassSet {
    pub fn class_number(&self) -> usize {
        self.ideals.len()
    }

    /// Sum of 1/w_x, equal to the mass formula once the set is complete.
    pub fn mass(&self) -> Rat {
        self.weights
            .iter()
            .fold(Rat::zero(), |acc, &w| acc + ratio(1, w as i64))
    }

    /// Walk the q-neighbor graph from the trivial class until the
    /// accumulated mass matches the formula. q is the smallest prime not
    /// dividing the reduced discriminant.
    pub fn build(order: &QuatOrder) -> Result<ClassSet> {
        let target = order.mass_formula()?;
        let n = int_to_i64(&order.reduced_discriminant());
        let q = (2..).find(|&c| is_prime(c) && n % c != 0).unwrap();

        let mut ideals = vec![RightIdeal::unit_ideal(order)];
        let mut left_orders = vec![order.clone()];
        let mut weights = vec![order.units_mod_center().len() as u64];
        let mut acc = ratio(1, weights[0] as i64);
        let mut next = 0usize;
        while acc != target {
            if next >= ideals.len() {
                return Err(Error::Consistency(format!(
                    "neighbor graph at q={q} exhausted at mass {acc}, \
                     but the formula demands {target}"
                )));
            }
            let frontier = ideals[next].clone();
            next += 1;
            for nb in q_neighbors(&frontier, q)? {
                let nb = primitive_part(&nb);
                let mut known = false;
                for rep in &ideals {
                    if isomorphic(&nb, rep)? {
                        known = true;
                        break;
                    }
                }
                if known {
                    continue;
                }
                let lo = nb.left_order()?;
                let w = lo.units_mod_center().len() as u64;
                acc += ratio(1, w as i64);
                ideals.push(nb);
                left_orders.push(lo);
                weights.push(w);
                if acc == target {
                    break;
                }
            }
            if acc > target {
                return Err(Error::Consistency(
                    "accumulated mass exceeds the formula; class \
                     identification failed"
                        .into(),
                ));
            }
        }
        Ok(ClassSet {
            order: order.clone(),
            ideals,
            left_orders,
            weights,
        })
    }
}

/// The q + 1 right ideals J with qI < J < I of index q^2, for q coprime
/// to the discriminant: images of the rank-one lines in I/qI under the
/// right action of the order.
pub fn q_neighbors(ideal: &RightIdeal, q: i64) -> Result<Vec<RightIdeal>> {
    let alg = &ideal.order.alg;
    let basis = ideal.lattice.basis();
    // right multiplication by each order basis element, as an integer
    // matrix on I-coordinates mod q
    let mut mult_rows: Vec<Vec<Vec<i64>>> = Vec::new();
    for b in ideal.order.basis() {
        let mut m = Vec::with_capacity(4);
        for v in &basis {
            let prod = alg.mul(&Quat::from_vec(v), &b);
            let coords = ideal
                .lattice
                .coords(&prod.to_vec())
                .ok_or_else(|| Error::Consistency("ideal not right-stable".into()))?;
            let row: Vec<i64> = coords
                .iter()
                .map(|c| {
                    debug_assert!(c.denom().is_one());
                    int_to_i64(&(c.numer() % int(q))).rem_euclid(q)
                })
                .collect();
            m.push(row);
        }
        mult_rows.push(m);
    }
    let mut subspaces: Vec<Vec<Vec<i64>>> = Vec::new();
    let mut line = [0i64; 4];
    while incr4(&mut line, q) {
        if line.iter().copied().find(|&c| c != 0) != Some(1) {
            continue;
        }
        // span of v * R mod q
        let mut gens: Vec<Vec<i64>> = Vec::new();
        for m in &mult_rows {
            let mut img = vec![0i64; 4];
            for i in 0..4 {
                if line[i] == 0 {
                    continue;
                }
                for k in 0..4 {
                    img[k] = (img[k] + line[i] * m[i][k]).rem_euclid(q);
                }
            }
            gens.push(img);
        }
        let span = fp_rref(&gens, q);
        if span.len() == 2 && !subspaces.contains(&span) {
            subspaces.push(span);
        }
    }
    if subspaces.len() != (q + 1) as usize {
        return Err(Error::Consistency(format!(
            "expected {} rank-one neighbor subspaces at q={q}, found {}",
            q + 1,
            subspaces.len()
        )));
    }
    let mut out = Vec::new();
    for s in subspaces {
        let mut gens: Vec<Vec<Rat>> = basis
            .iter()
            .map(|b| b.iter().map(|x| x * rat(q)).collect())
            .collect();
        for coords in &s {
            let mut w = vec![Rat::zero(); 4];
            for (i, &c) in coords.iter().enumerate() {
                if c != 0 {
                    for (wk, bk) in w.iter_mut().zip(&basis[i]) {
                        *wk += rat(c) * bk;
                    }
                }
            }
            gens.push(w);
        }
        out.push(RightIdeal::new(
            ideal.order.clone(),
            Lattice::span(4, &gens),
        )?);
    }
    Ok(out)
}

/// Divide out the content: the largest positive rational c with
/// (1/c) I still inside the order.
pub fn primitive_part(ideal: &RightIdeal) -> RightIdeal {
    let mut den = int(1);
    let mut coords_all: Vec<Rat> = Vec::new();
    for v in ideal.lattice.basis() {
        let c = ideal
            .order
            .lattice
            .coords(&v)
            .expect("full lattice coordinates");
        for x in c {
            den = den.lcm(x.denom());
            coords_all.push(x);
        }
    }
    let mut g = int(0);
    for x in &coords_all {
        let scaled = x.numer() * (&den / x.denom());
        g = g.gcd(&scaled);
    }
    assert!(g.is_positive());
    let content = Rat::new(g, den);
    if content.is_one() {
        ideal.clone()
    } else {
        ideal.scaled(&(Rat::one() / content))
    }
}

fn incr4(x: &mut [i64; 4], p: i64) -> bool {
    for c in x.iter_mut() {
        *c += 1;
        if *c < p {
            return true;
        }
        *c = 0;
    }
    false
}

/// Reduced row echelon form over F_p, zero rows dropped: a canonical
/// label for the row space.
fn fp_rref(rows: &[Vec<i64>], p: i64) -> Vec<Vec<i64>> {
    let Some(first) = rows.first() else {
        return vec![];
    };
    let cols = first.len();
    let mut m: Vec<Vec<i64>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x.rem_euclid(p)).collect())
        .collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = mod_inverse(m[rank][c], p);
        for x in m[rank].iter_mut() {
            *x = (*x * inv).rem_euclid(p);
        }
        for i in 0..m.len() {
            if i != rank && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..cols {
                    m[i][j] = (m[i][j] - f * m[rank][j]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    m.truncate(rank);
    m
}

fn mod_inverse(a: i64, p: i64) -> i64 {
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (p, a.rem_euclid(p));
    while new_r != 0 {
        let k = r / new_r;
        (t, new_t) = (new_t, t - k * new_t);
        (r, new_r) = (new_r, r - k * new_r);
    }
    assert_eq!(r, 1, "not invertible mod p");
    t.rem_euclid(p)
}
