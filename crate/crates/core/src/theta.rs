//! Theta lifts from Brandt modules to half-integral weight forms: the
//! discriminant-pair grid, Fourier coefficients by enumeration on the
//! trace-zero lattices of the ideal classes, special points with their
//! stabilizers, an independent coefficient route through reproducing
//! vectors and the height pairing, and the T(p^2) coefficient relation
//! that certifies the Shimura correspondence.

use crate::brandt::BrandtModule;
use crate::exact::arith::{fundamental_discriminant, is_fundamental_discriminant, is_prime, kronecker};
use crate::exact::enumerate::{enumerate_gram, gram_of_basis};
use crate::exact::mat::{self, Mat};
use crate::exact::numberfield::{NfElem, NumberField};
use crate::exact::{rat, rat_sqrt, ratio, Int, Lattice, Rat};
use crate::quat::algebra::int_to_i64;
use crate::{Error, Result};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// A value D > 0 together with a cusp scale a > 0. The coefficient of a
/// lift at (D, a) counts lattice vectors y in (1/a)L_x of square length D;
/// the pair carries the integer invariant m = D a^2 and the negative
/// discriminant -m.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DiscPair {
    /// the represented value D
    pub value: Rat,
    /// the cusp scale a
    pub cusp: Rat,
}

impl DiscPair {
    pub fn new(value: Rat, cusp: Rat) -> DiscPair {
        DiscPair { value, cusp }
    }

    /// D a^2 as an integer, when it is one.
    pub fn norm_value(&self) -> Option<Int> {
        let m = &self.value * &self.cusp * &self.cusp;
        if m.is_integer() {
            Some(m.to_integer())
        } else {
            None
        }
    }

    /// The negative discriminant -D a^2, when integral.
    pub fn disc(&self) -> Option<i64> {
        self.norm_value().map(|m| -int_to_i64(&m))
    }

    pub fn is_discriminant(&self) -> bool {
        is_discriminant(&self.value, &self.cusp)
    }

    /// Whether -D a^2 is a fundamental discriminant.
    pub fn is_fundamental(&self) -> bool {
        self.is_discriminant() && is_fundamental_discriminant(self.disc().unwrap())
    }
}

/// (D, a) heads a coefficient slot exactly when D a^2 is a positive integer
/// congruent to 0 or 3 mod 4, i.e. -D a^2 is the discriminant of an order
/// in an imaginary quadratic field.
pub fn is_discriminant(value: &Rat, cusp: &Rat) -> bool {
    if !value.is_positive() || !cusp.is_positive() {
        return false;
    }
    let m = value * cusp * cusp;
    if !m.is_integer() {
        return false;
    }
    let r = m.to_integer().mod_floor(&Int::from(4));
    r == Int::from(0) || r == Int::from(3)
}

/// The unique cusp scale a > 0 making -D a^2 a fundamental discriminant.
pub fn fundamental_pair(value: &Rat) -> Result<DiscPair> {
    if !value.is_positive() {
        return Err(Error::InvalidInput(
            "fundamental pairs require a positive value".into(),
        ));
    }
    let p = int_to_i64(value.numer());
    let q = int_to_i64(value.denom());
    let (dk, _) = fundamental_discriminant(-p * q);
    // a^2 = |dk| / D is always a rational square: both sides have the same
    // squarefree kernel.
    let a2 = rat(dk.abs()) / value;
    let cusp = rat_sqrt(&a2).ok_or_else(|| {
        Error::Consistency(format!("|{dk}|/{value} is not a rational square"))
    })?;
    let pair = DiscPair::new(value.clone(), cusp);
    if !pair.is_fundamental() {
        return Err(Error::Consistency(format!(
            "constructed pair {pair:?} is not fundamental"
        )));
    }
    Ok(pair)
}

/// All cusp scales a = u/v with v^2 | D, gcd(u, v) = 1, D u^2 / v^2 <= bound
/// and -D u^2/v^2 a discriminant: the finite grid of coefficient slots that
/// share the integer value D.
pub fn cusp_grid(value: i64, bound: i64) -> Vec<Rat> {
    let mut out = Vec::new();
    if value <= 0 {
        return out;
    }
    let mut v = 1i64;
    while v * v <= value {
        if value % (v * v) == 0 {
            let d0 = value / (v * v);
            let mut u = 1i64;
            while d0 * u * u <= bound {
                if u.gcd(&v) == 1 {
                    let m = d0 * u * u;
                    if m % 4 == 0 || m % 4 == 3 {
                        out.push(ratio(u, v));
                    }
                }
                u += 1;
            }
        }
        v += 1;
    }
    out.sort();
    out
}

/// One orbit of special points: a representative y in (1/a)L_x on class x,
/// the orbit length under the unit group of the class, and the stabilizer
/// order (the unit index of the optimal order at y).
#[derive(Clone, Debug)]
pub struct SpecialPoint {
    pub class: usize,
    pub rep: [Rat; 3],
    pub orbit_size: u64,
    pub stabilizer: u64,
}

/// The special points attached to a pair: unit-group orbits of the solution
/// sets across all ideal classes. The orbit count is the point count of the
/// double coset space the coefficient formula sums over.
#[derive(Clone, Debug)]
pub struct SpecialPointSet {
    pub pair: DiscPair,
    pub points: Vec<SpecialPoint>,
}

impl SpecialPointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// The theta machinery over a Brandt module: per class, the trace-zero
/// lattice of its left order with the Gram matrix of the norm form, and the
/// cached unit actions used for orbit decomposition and transport.
pub struct ThetaSpace<'a> {
    pub module: &'a BrandtModule,
    /// per class, a basis of the rank-3 projection of the left order
    bases: Vec<Vec<Vec<Rat>>>,
    /// per class, the Gram matrix of that basis under Q
    grams: Vec<Mat>,
    /// per class and unit u, the 3x3 matrix of w -> u w u^{-1}
    conj_units: Vec<Vec<Mat>>,
    /// per class and unit u, the matrix of the weight-k action of u
    act_units: Vec<Vec<Mat>>,
}

impl<'a> ThetaSpace<'a> {
    pub fn new(module: &'a BrandtModule) -> Result<ThetaSpace<'a>> {
        let space = &module.space;
        let gw = gram_w_matrix(module);
        let h = module.classes.class_number();
        let mut bases = Vec::with_capacity(h);
        let mut grams = Vec::with_capacity(h);
        let mut conj_units = Vec::with_capacity(h);
        let mut act_units = Vec::with_capacity(h);
        for x in 0..h {
            let order = &module.classes.left_orders[x];
            let gens: Vec<Vec<Rat>> = order
                .basis()
                .iter()
                .map(|q| space.project(q).to_vec())
                .collect();
            let lat = Lattice::span(3, &gens);
            if lat.rank() != 3 {
                return Err(Error::Consistency(format!(
                    "trace-zero lattice of class {x} has rank {}",
                    lat.rank()
                )));
            }
            let basis = lat.basis();
            let gram = gram_of_basis(&basis, &gw);
            // Q takes integer values 0, 3 mod 4 on the lattice: its values
            // are negated discriminants of integral elements.
            for i in 0..3 {
                let d = &gram[i][i];
                if !d.is_integer() || {
                    let r = d.to_integer().mod_floor(&Int::from(4));
                    r != Int::from(0) && r != Int::from(3)
                } {
                    return Err(Error::Consistency(format!(
                        "class {x}: basis value {d} is not a negated discriminant"
                    )));
                }
            }
            let units = order.units_mod_center();
            if units.len() != module.classes.weights[x] as usize {
                return Err(Error::Consistency(
                    "unit count disagrees with the class weight".into(),
                ));
            }
            let mut cm = Vec::with_capacity(units.len());
            let mut am = Vec::with_capacity(units.len());
            for u in &units {
                cm.push(space.conj_matrix(u)?);
                am.push(space.act_matrix(u)?);
            }
            bases.push(basis);
            grams.push(gram);
            conj_units.push(cm);
            act_units.push(am);
        }
        Ok(ThetaSpace {
            module,
            bases,
            grams,
            conj_units,
            act_units,
        })
    }

    /// All vectors of the class-x lattice with Q(v) = target.
    fn enumerate_class(&self, x: usize, target: &Rat) -> Result<Vec<Vec<Rat>>> {
        let coords = enumerate_gram(&self.grams[x], target)?;
        Ok(coords
            .into_iter()
            .map(|c| {
                let cr: Vec<Rat> = c.into_iter().map(Rat::from_integer).collect();
                mat::vec_mul(&cr, &self.bases[x])
            })
            .collect())
    }

    /// The coefficient at (D, a) as a linear functional on module
    /// coordinates: entry (x, s) is 1/(a^{k+1} w_x) times the sum of the
    /// s-th invariant basis polynomial over the lattice vectors v in L_x
    /// with Q(v) = D a^2 (evaluation at y = v/a contributes a^{-k}).
    pub fn coefficient_functional(&self, pair: &DiscPair) -> Result<Vec<Rat>> {
        let space = &self.module.space;
        let mut out = vec![Rat::zero(); self.module.dim];
        if !pair.cusp.is_positive() || pair.value.is_negative() {
            return Ok(out);
        }
        let target = &pair.value * &pair.cusp * &pair.cusp;
        let k = space.k as i32;
        for x in 0..self.module.classes.class_number() {
            if self.module.blocks[x].is_empty() {
                continue;
            }
            let pts = self.enumerate_class(x, &target)?;
            if pts.is_empty() {
                continue;
            }
            let w = rat(self.module.classes.weights[x] as i64);
            let scale = Rat::one() / (pair.cusp.clone().pow(k + 1) * w);
            for (s, row) in self.module.blocks[x].iter().enumerate() {
                let mut sum = Rat::zero();
                for v in &pts {
                    sum += space.eval(row, &[v[0].clone(), v[1].clone(), v[2].clone()]);
                }
                out[self.module.offsets[x] + s] = &scale * sum;
            }
        }
        Ok(out)
    }

    /// Orbit decomposition of the solution sets under the unit groups, with
    /// an orbit-stabilizer certificate per orbit.
    pub fn special_points(&self, pair: &DiscPair) -> Result<SpecialPointSet> {
        let mut points = Vec::new();
        if pair.cusp.is_positive() && pair.value.is_positive() {
            let target = &pair.value * &pair.cusp * &pair.cusp;
            for x in 0..self.module.classes.class_number() {
                let pts = self.enumerate_class(x, &target)?;
                let units = &self.conj_units[x];
                let w_x = units.len();
                let mut seen = vec![false; pts.len()];
                for i in 0..pts.len() {
                    if seen[i] {
                        continue;
                    }
                    let mut orbit = vec![i];
                    seen[i] = true;
                    let mut qi = 0;
                    while qi < orbit.len() {
                        let cur = pts[orbit[qi]].clone();
                        qi += 1;
                        for c in units {
                            let img = mat::mul_vec(c, &cur);
                            let j = pts.iter().position(|p| *p == img).ok_or_else(|| {
                                Error::Consistency(
                                    "unit action does not preserve the solution set".into(),
                                )
                            })?;
                            if !seen[j] {
                                seen[j] = true;
                                orbit.push(j);
                            }
                        }
                    }
                    let rep_v = &pts[i];
                    let stab = units
                        .iter()
                        .filter(|c| mat::mul_vec(c, rep_v) == *rep_v)
                        .count();
                    if stab * orbit.len() != w_x {
                        return Err(Error::Consistency(format!(
                            "orbit of size {} with stabilizer {} inside a unit group of order {}",
                            orbit.len(),
                            stab,
                            w_x
                        )));
                    }
                    let rep = [
                        &rep_v[0] / &pair.cusp,
                        &rep_v[1] / &pair.cusp,
                        &rep_v[2] / &pair.cusp,
                    ];
                    points.push(SpecialPoint {
                        class: x,
                        rep,
                        orbit_size: orbit.len() as u64,
                        stabilizer: stab as u64,
                    });
                }
            }
        }
        Ok(SpecialPointSet {
            pair: pair.clone(),
            points,
        })
    }

    /// The same coefficient functional computed through the height pairing:
    /// per class, sum over special-point orbits of the unit-group transport
    /// of the reproducing vector at the representative, weighted by the
    /// inverse stabilizer order; then entry (x, s) is 1/(a w_x) times the
    /// inner product of that class value against the invariant basis.
    pub fn eta_functional(&self, pair: &DiscPair) -> Result<Vec<Rat>> {
        let space = &self.module.space;
        let h = self.module.classes.class_number();
        let vdim = space.dim();
        let mut eta: Vec<Vec<Rat>> = vec![vec![Rat::zero(); vdim]; h];
        let sp = self.special_points(pair)?;
        for pt in &sp.points {
            let g = space.gegenbauer_vector(&pt.rep)?;
            let mut moved_sum = vec![Rat::zero(); vdim];
            for a in &self.act_units[pt.class] {
                let moved = mat::vec_mul(&g, a);
                for (acc, m) in moved_sum.iter_mut().zip(moved) {
                    *acc += m;
                }
            }
            let wt = ratio(1, pt.stabilizer as i64);
            for (acc, m) in eta[pt.class].iter_mut().zip(moved_sum) {
                *acc += &wt * m;
            }
        }
        let mut out = vec![Rat::zero(); self.module.dim];
        for x in 0..h {
            let c = Rat::one() / (&pair.cusp * rat(self.module.classes.weights[x] as i64));
            for (s, row) in self.module.blocks[x].iter().enumerate() {
                out[self.module.offsets[x] + s] = &c * space.inner(row, &eta[x]);
            }
        }
        Ok(out)
    }

    /// Coefficient of the lift of a rational form at a pair.
    pub fn theta_coefficient(&self, phi: &[Rat], pair: &DiscPair) -> Result<Rat> {
        Ok(mat::dot(&self.coefficient_functional(pair)?, phi))
    }

    /// Coefficient of the lift of a form with coordinates in a number field.
    pub fn theta_coefficient_nf(
        &self,
        field: &NumberField,
        coords: &[NfElem],
        pair: &DiscPair,
    ) -> Result<NfElem> {
        let l = self.coefficient_functional(pair)?;
        Ok(apply_functional(field, &l, coords))
    }

    /// The independent coefficient route. Computes the value through
    /// special points and the height pairing and demands exact agreement
    /// with the enumeration route before returning it.
    pub fn eta_check(&self, phi: &[Rat], pair: &DiscPair) -> Result<Rat> {
        let l = self.eta_functional(pair)?;
        if l != self.coefficient_functional(pair)? {
            return Err(Error::Consistency(format!(
                "the two coefficient routes disagree at {pair:?}"
            )));
        }
        Ok(mat::dot(&l, phi))
    }

    pub fn eta_check_nf(
        &self,
        field: &NumberField,
        coords: &[NfElem],
        pair: &DiscPair,
    ) -> Result<NfElem> {
        let l = self.eta_functional(pair)?;
        if l != self.coefficient_functional(pair)? {
            return Err(Error::Consistency(format!(
                "the two coefficient routes disagree at {pair:?}"
            )));
        }
        Ok(apply_functional(field, &l, coords))
    }

    /// The lift of a rational form, with every coefficient of integer
    /// invariant m = D a^2 <= bound materialized.
    pub fn theta_lift(&self, phi: &[Rat], bound: i64) -> Result<HalfIntegralForm> {
        let field = NumberField::rationals();
        let coords: Vec<NfElem> = phi.iter().map(|c| field.from_rat(c)).collect();
        self.theta_lift_nf(&field, &coords, bound)
    }

    /// The lift of a form with number-field coordinates. At odd k the lift
    /// is identically zero (the theta kernel is even in the lattice
    /// variable while the weight representation is odd), so the zero form
    /// is returned carrying a parity flag.
    pub fn theta_lift_nf(
        &self,
        field: &NumberField,
        coords: &[NfElem],
        bound: i64,
    ) -> Result<HalfIntegralForm> {
        if bound < 0 {
            return Err(Error::InvalidInput("negative coefficient bound".into()));
        }
        let k = self.module.space.k;
        let zero_by_parity = k % 2 == 1;
        let mut mu = BTreeMap::new();
        for m in 0..=bound {
            let val = if zero_by_parity {
                field.zero()
            } else {
                let l = self.coefficient_functional(&DiscPair::new(rat(m), Rat::one()))?;
                apply_functional(field, &l, coords)
            };
            mu.insert(m, val);
        }
        let n = int_to_i64(&self.module.classes.order.reduced_discriminant());
        Ok(HalfIntegralForm {
            level: 4 * n,
            k,
            field: field.clone(),
            mu,
            zero_by_parity,
            bound,
        })
    }
}

fn gram_w_matrix(module: &BrandtModule) -> Mat {
    let mut g = mat::zeros(3, 3);
    for i in 0..3 {
        g[i][i] = module.space.gram_w[i].clone();
    }
    g
}

fn apply_functional(field: &NumberField, l: &[Rat], coords: &[NfElem]) -> NfElem {
    let mut acc = field.zero();
    for (c, coord) in l.iter().zip(coords) {
        if !c.is_zero() {
            acc = field.add(&acc, &field.mul_rat(coord, c));
        }
    }
    acc
}

/// A form of weight k + 3/2 on the congruence group of level 4N, stored
/// through the canonical coefficients mu(m) at cusp scale 1: the value at
/// any pair (D, a) with D a^2 = m is mu(m)/a^{k+1}, and the constant term
/// is mu(0)/a. Coefficients live in the coordinate field of the source
/// form.
pub struct HalfIntegralForm {
    pub level: i64,
    pub k: u32,
    pub field: NumberField,
    /// m -> coefficient at (m, 1), for all integers 0 <= m <= bound
    pub mu: BTreeMap<i64, NfElem>,
    /// set when the weight representation has odd degree, forcing the lift
    /// to vanish identically
    pub zero_by_parity: bool,
    pub bound: i64,
}

/// One row of the exported coefficient table.
#[derive(Clone, Debug)]
pub struct CoeffRow {
    /// negative discriminant -D a^2
    pub disc: i64,
    /// integer value D
    pub value: i64,
    /// cusp scale a
    pub cusp: Rat,
    pub lambda: NfElem,
}

impl HalfIntegralForm {
    /// Twice the weight, an odd integer.
    pub fn weight_twice(&self) -> i64 {
        2 * self.k as i64 + 3
    }

    /// The coefficient at a pair. Pairs outside the discriminant grid give
    /// zero; pairs beyond the materialized bound are an error.
    pub fn coefficient(&self, pair: &DiscPair) -> Result<NfElem> {
        if !pair.cusp.is_positive() {
            return Err(Error::InvalidInput("cusp scale must be positive".into()));
        }
        let m = match pair.norm_value() {
            Some(m) if !m.is_negative() => int_to_i64(&m),
            _ => return Ok(self.field.zero()),
        };
        if m > self.bound {
            return Err(Error::InvalidInput(format!(
                "coefficient at invariant {m} exceeds the computed bound {}",
                self.bound
            )));
        }
        if m == 0 {
            let inv = Rat::one() / &pair.cusp;
            return Ok(self.field.mul_rat(&self.mu[&0], &inv));
        }
        if m % 4 == 1 || m % 4 == 2 {
            return Ok(self.field.zero());
        }
        let k = self.k as i32;
        let scale = Rat::one() / pair.cusp.clone().pow(k + 1);
        Ok(self.field.mul_rat(&self.mu[&m], &scale))
    }

    /// The coefficient at a pair for forms with rational coordinates.
    pub fn coefficient_rat(&self, pair: &DiscPair) -> Result<Rat> {
        let c = self.coefficient(pair)?;
        self.field.is_rational(&c).ok_or_else(|| {
            Error::InvalidInput("coefficient is not rational in this field".into())
        })
    }

    /// The exported table: one row per materialized pair (D, a), ordered by
    /// (D, a).
    pub fn rows(&self) -> Vec<CoeffRow> {
        let mut out = Vec::new();
        for d in 1..=self.bound {
            for a in cusp_grid(d, self.bound) {
                let pair = DiscPair::new(rat(d), a.clone());
                let lambda = self.coefficient(&pair).expect("within bound");
                out.push(CoeffRow {
                    disc: pair.disc().expect("grid pairs are integral"),
                    value: d,
                    cusp: a,
                    lambda,
                });
            }
        }
        out
    }
}

/// Verifies the coefficient relation of the half-integral Hecke operator
/// T(p^2) against a prescribed eigenvalue a_p: for every materialized pair,
///   lambda(p^2 D, a) + chi(-D a^2 | p) p^k lambda(D, a)
///     + p^{2k+1} lambda(D/p^2, a) = a_p lambda(D, a),
/// where the last term contributes only when (D/p^2, a) is itself on the
/// discriminant grid. Returns the offending pairs; an empty list certifies
/// the relation on the grid limited by p^2 D a^2 <= bound.
pub fn shimura_consistency(
    f: &HalfIntegralForm,
    p: i64,
    a_p: &NfElem,
) -> Result<Vec<DiscPair>> {
    if p <= 2 || !is_prime(p) || f.level % p == 0 {
        return Err(Error::InvalidInput(format!(
            "T(p^2) relation requires an odd prime p coprime to the level, got {p}"
        )));
    }
    let field = &f.field;
    let k = f.k;
    let pk = rat(p).pow(k as i32);
    let p2k1 = rat(p).pow(2 * k as i32 + 1);
    let dmax = f.bound / (p * p);
    let mut offenders = Vec::new();
    for d in 1..=dmax {
        for a in cusp_grid(d, dmax) {
            let pair = DiscPair::new(rat(d), a.clone());
            let m = int_to_i64(&pair.norm_value().expect("grid pairs are integral"));
            let lam = f.coefficient(&pair)?;
            let up = f.coefficient(&DiscPair::new(rat(p * p * d), a.clone()))?;
            let mid = field.mul_rat(&lam, &(rat(kronecker(-m, p) as i64) * &pk));
            let down = field.mul_rat(
                &f.coefficient(&DiscPair::new(ratio(d, p * p), a.clone()))?,
                &p2k1,
            );
            let lhs = field.add(&field.add(&up, &mid), &down);
            let rhs = field.mul(a_p, &lam);
            if lhs != rhs {
                offenders.push(pair);
            }
        }
    }
    Ok(offenders)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brandt::BrandtModule;
    use crate::exact::arith::class_number;
    use crate::exact::int;
    use crate::quat::{build_order, maximal_order, ClassSet, QuatAlgebra};
    use std::collections::BTreeMap as Map;

    fn module(a: i64, b: i64, n: i64, eps: &[(i64, i8)], k: u32) -> BrandtModule {
        let alg = QuatAlgebra::from_ints(a, b).unwrap();
        let order = if eps.is_empty() {
            maximal_order(&alg).unwrap()
        } else {
            let map: Map<i64, i8> = eps.iter().cloned().collect();
            build_order(&alg, n, &map).unwrap()
        };
        let classes = ClassSet::build(&order).unwrap();
        BrandtModule::build(classes, k).unwrap()
    }

    fn rational_coords(e: &crate::brandt::Eigenform) -> Vec<Rat> {
        e.coords
            .iter()
            .map(|c| e.field.is_rational(c).expect("rational eigenform"))
            .collect()
    }

    #[test]
    fn discriminant_pair_logic() {
        assert!(is_discriminant(&rat(3), &rat(1)));
        assert!(!is_discriminant(&rat(1), &rat(1)));
        assert!(is_discriminant(&rat(4), &rat(1)));
        assert!(!is_discriminant(&rat(5), &rat(1)));
        assert!(is_discriminant(&rat(7), &rat(1)));
        assert!(is_discriminant(&rat(3), &rat(2)));
        assert!(!is_discriminant(&rat(3), &ratio(1, 3)));
        assert!(is_discriminant(&rat(27), &ratio(1, 3)));
        assert!(!is_discriminant(&rat(-3), &rat(1)));

        let p = fundamental_pair(&rat(3)).unwrap();
        assert_eq!((p.value, p.cusp), (rat(3), rat(1)));
        let p = fundamental_pair(&rat(27)).unwrap();
        assert_eq!(p.cusp, ratio(1, 3));
        assert_eq!(p.disc(), Some(-3));
        let p = fundamental_pair(&rat(12)).unwrap();
        assert_eq!(p.cusp, ratio(1, 2));
        let p = fundamental_pair(&rat(4)).unwrap();
        assert_eq!(p.cusp, rat(1));
        assert_eq!(p.disc(), Some(-4));
        let p = fundamental_pair(&rat(75)).unwrap();
        assert_eq!(p.cusp, ratio(1, 5));
        let p = fundamental_pair(&rat(8)).unwrap();
        assert_eq!(p.cusp, rat(1));
        let p = fundamental_pair(&rat(18)).unwrap();
        assert_eq!(p.cusp, ratio(2, 3));
        assert_eq!(p.disc(), Some(-8));
        let p = fundamental_pair(&ratio(3, 4)).unwrap();
        assert_eq!(p.cusp, rat(2));
        assert!(fundamental_pair(&rat(0)).is_err());
        assert!(fundamental_pair(&rat(-3)).is_err());
    }

    #[test]
    fn cusp_grid_materialization() {
        let g = cusp_grid(3, 200);
        let want: Vec<Rat> = (1..=8).map(rat).collect();
        assert_eq!(g, want);

        let g = cusp_grid(12, 200);
        let mut want = vec![rat(1), rat(2), rat(3), rat(4)];
        want.extend([ratio(1, 2), ratio(3, 2), ratio(5, 2), ratio(7, 2)]);
        want.sort();
        assert_eq!(g, want);

        // values 1 and 2 mod 4 never enter the grid at cusp scale 1
        assert!(cusp_grid(5, 50).iter().all(|a| *a != rat(1)));
        assert!(cusp_grid(5, 50).contains(&rat(2))); // 5*4 = 20 is 0 mod 4
    }

    #[test]
    fn routes_agree_level_11_weight_0() {
        let m = module(-1, -11, 11, &[], 0);
        let t = ThetaSpace::new(&m).unwrap();
        for d in 1..=60i64 {
            for a in cusp_grid(d, 60) {
                let pair = DiscPair::new(rat(d), a);
                let theta = t.coefficient_functional(&pair).unwrap();
                let eta = t.eta_functional(&pair).unwrap();
                assert_eq!(theta, eta, "routes disagree at {pair:?}");
            }
        }
        // off the discriminant grid both routes vanish identically
        for mval in [1i64, 2, 5, 6, 9, 10, 13, 37, 49, 50] {
            let pair = DiscPair::new(rat(mval), rat(1));
            let l = t.coefficient_functional(&pair).unwrap();
            if mval % 4 == 1 || mval % 4 == 2 {
                assert!(l.iter().all(|c| c.is_zero()), "support leak at {mval}");
            }
        }
    }

    #[test]
    fn special_point_counts_level_11() {
        let m = module(-1, -11, 11, &[], 0);
        let t = ThetaSpace::new(&m).unwrap();
        // fundamental d coprime to 2N with the ramified prime inert: the
        // orbit count is 2^(number of primes dividing N) times the class
        // number; split d gives the empty set.
        for (d, expect) in [(-3i64, Some(1)), (-23, Some(3)), (-31, Some(3)),
                            (-7, None), (-19, None)] {
            let pair = fundamental_pair(&rat(-d)).unwrap();
            assert_eq!(pair.cusp, rat(1));
            let sp = t.special_points(&pair).unwrap();
            match expect {
                Some(h) => {
                    assert_eq!(class_number(d).unwrap(), h as u64, "class number oracle");
                    assert_eq!(sp.len(), 2 * h, "count at d={d}");
                }
                None => assert!(sp.is_empty(), "expected no points at d={d}"),
            }
            // stabilizers are the unit index of the maximal order of K
            let t_k = crate::exact::arith::unit_count(d) / 2;
            for pt in &sp.points {
                assert_eq!(pt.stabilizer, t_k as u64, "stabilizer at d={d}");
            }
        }
        // non-fundamental pair: stabilizers may shrink to the suborder index
        let pair = DiscPair::new(rat(12), rat(1));
        let sp = t.special_points(&pair).unwrap();
        assert!(!sp.is_empty());
    }

    #[test]
    fn eisenstein_and_cusp_constant_terms() {
        let m = module(-1, -11, 11, &[], 0);
        let t = ThetaSpace::new(&m).unwrap();
        let eis = m.eisenstein();
        assert_eq!(eis.len(), 1);
        let zero_pair = DiscPair::new(rat(0), rat(1));
        let c = t.theta_coefficient(&eis[0], &zero_pair).unwrap();
        assert_eq!(c, ratio(5, 6), "constant term is the total mass");

        let forms = m.eigenforms(10).unwrap();
        assert_eq!(forms.len(), 1);
        let phi = rational_coords(&forms[0]);
        assert_eq!(t.theta_coefficient(&phi, &zero_pair).unwrap(), rat(0));
        // first fundamental coefficient is nonzero
        let c3 = t
            .theta_coefficient(&phi, &DiscPair::new(rat(3), rat(1)))
            .unwrap();
        assert!(!c3.is_zero());
        // eta_check agrees and enforces the gate internally
        let e3 = t.eta_check(&phi, &DiscPair::new(rat(3), rat(1))).unwrap();
        assert_eq!(c3, e3);
    }

    #[test]
    fn scaling_identity() {
        for k in [0u32, 2] {
            let m = module(-1, -11, 11, &[], k);
            let t = ThetaSpace::new(&m).unwrap();
            for (d, a, p) in [(3i64, rat(1), 2i64), (4, rat(1), 3), (12, ratio(1, 2), 2)] {
                let base = t
                    .coefficient_functional(&DiscPair::new(rat(d), a.clone()))
                    .unwrap();
                let scaled = t
                    .coefficient_functional(&DiscPair::new(rat(p * p * d), &a / rat(p)))
                    .unwrap();
                let factor = rat(p).pow(k as i32 + 1);
                let expect: Vec<Rat> = base.iter().map(|c| c * &factor).collect();
                assert_eq!(scaled, expect, "k={k} d={d} p={p}");
            }
        }
    }

    #[test]
    fn hecke_equivariance_of_coefficients() {
        // the lift intertwines T_p on the source with T(p^2) on the
        // target: as functionals, l_{(D,1)} composed with T_p equals
        // l_{(p^2 D, 1)} + chi(-D|p) p^k l_{(D,1)} + p^{2k+1} l_{(D/p^2,1)}
        for k in [0u32, 2] {
            let m = module(-1, -11, 11, &[], k);
            let t = ThetaSpace::new(&m).unwrap();
            let bound = if k == 0 { 20 } else { 8 };
            let primes: &[i64] = if k == 0 { &[3, 7] } else { &[3] };
            for &p in primes {
                let tp = m.hecke(p).unwrap();
                let dmax = if p == 3 { bound } else { 4 };
                for d in 1..=dmax {
                    let l = t
                        .coefficient_functional(&DiscPair::new(rat(d), rat(1)))
                        .unwrap();
                    let lhs = mat::vec_mul(&l, &tp);
                    let up = t
                        .coefficient_functional(&DiscPair::new(rat(p * p * d), rat(1)))
                        .unwrap();
                    let down = t
                        .coefficient_functional(&DiscPair::new(ratio(d, p * p), rat(1)))
                        .unwrap();
                    let chi = rat(kronecker(-d, p) as i64) * rat(p).pow(k as i32);
                    let p21 = rat(p).pow(2 * k as i32 + 1);
                    let rhs: Vec<Rat> = (0..l.len())
                        .map(|i| &up[i] + &chi * &l[i] + &p21 * &down[i])
                        .collect();
                    assert_eq!(lhs, rhs, "k={k} p={p} d={d}");
                }
            }
        }
    }

    #[test]
    fn shimura_relation_level_11_weight_0() {
        let m = module(-1, -11, 11, &[], 0);
        let t = ThetaSpace::new(&m).unwrap();
        let forms = m.eigenforms(10).unwrap();
        let phi = rational_coords(&forms[0]);
        let f = t.theta_lift(&phi, 360).unwrap();
        assert_eq!(f.level, 44);
        assert_eq!(f.weight_twice(), 3);

        let a3 = forms[0].eigenvalues[&3].clone();
        assert_eq!(f.field.is_rational(&a3), Some(rat(-1)));
        let off = shimura_consistency(&f, 3, &a3).unwrap();
        assert!(off.is_empty(), "offenders: {off:?}");

        let a7 = forms[0].eigenvalues[&7].clone();
        assert_eq!(f.field.is_rational(&a7), Some(rat(-2)));
        let off = shimura_consistency(&f, 7, &a7).unwrap();
        assert!(off.is_empty(), "offenders: {off:?}");

        // negative control: corrupting one coefficient breaks the relation
        let mut g = t.theta_lift(&phi, 360).unwrap();
        let bad = g.field.add(&g.mu[&3], &g.field.one());
        g.mu.insert(3, bad);
        let off = shimura_consistency(&g, 3, &a3).unwrap();
        assert!(!off.is_empty());
        assert!(off.contains(&DiscPair::new(rat(3), rat(1))));
    }

    #[test]
    fn lift_table_and_pair_access() {
        let m = module(-1, -11, 11, &[], 0);
        let t = ThetaSpace::new(&m).unwrap();
        let forms = m.eigenforms(10).unwrap();
        let phi = rational_coords(&forms[0]);
        let f = t.theta_lift(&phi, 80).unwrap();
        // the (27, 1/3) slot is the (3, 1) value rescaled
        let lam3 = f.coefficient_rat(&DiscPair::new(rat(3), rat(1))).unwrap();
        let lam27 = f
            .coefficient_rat(&DiscPair::new(rat(27), ratio(1, 3)))
            .unwrap();
        assert_eq!(lam27, lam3 * rat(3));
        // direct functional agreement on a non-trivial cusp scale
        let direct = t
            .theta_coefficient(&phi, &DiscPair::new(rat(27), ratio(1, 3)))
            .unwrap();
        assert_eq!(direct, lam27);
        // table rows carry consistent discriminants
        for row in f.rows() {
            let m = rat(row.value) * &row.cusp * &row.cusp;
            assert!(m.is_integer());
            assert_eq!(-int_to_i64(&m.to_integer()), row.disc);
            assert!(row.disc % 4 == 0 || row.disc.rem_euclid(4) == 1);
        }
        // beyond the bound is an error, off-grid is zero
        assert!(f.coefficient(&DiscPair::new(rat(81), rat(1))).is_err());
        assert_eq!(
            f.coefficient_rat(&DiscPair::new(rat(5), rat(1))).unwrap(),
            rat(0)
        );
    }

    #[test]
    fn atkin_lehner_fixes_coefficients() {
        for k in [0u32, 2] {
            let m = module(-1, -11, 11, &[], k);
            let t = ThetaSpace::new(&m).unwrap();
            let w = m.atkin_lehner(11).unwrap();
            for d in [3i64, 4, 8, 11, 12] {
                let l = t
                    .coefficient_functional(&DiscPair::new(rat(d), rat(1)))
                    .unwrap();
                assert_eq!(mat::vec_mul(&l, &w), l, "k={k} d={d}");
            }
        }
    }

    #[test]
    fn weight_2_lifts_and_shimura() {
        let m = module(-1, -11, 11, &[], 2);
        let t = ThetaSpace::new(&m).unwrap();
        // routes agree on the weight-2 grid
        for d in 1..=40i64 {
            for a in cusp_grid(d, 40) {
                let pair = DiscPair::new(rat(d), a);
                assert_eq!(
                    t.coefficient_functional(&pair).unwrap(),
                    t.eta_functional(&pair).unwrap(),
                    "routes disagree at {pair:?}"
                );
            }
        }

        let forms = m.eigenforms(10).unwrap();
        assert_eq!(forms.len(), 4);
        let rational: Vec<_> = forms.iter().filter(|e| e.field.degree() == 1).collect();
        assert_eq!(rational.len(), 1);
        let cubic: Vec<_> = forms.iter().filter(|e| e.field.degree() == 3).collect();
        assert_eq!(cubic.len(), 3);

        // the rational eigenform has the wrong sign at the ramified prime:
        // its lift vanishes identically
        let phi = rational_coords(rational[0]);
        let f = t.theta_lift(&phi, 60).unwrap();
        assert!(!f.zero_by_parity);
        assert!(f.mu.values().all(|v| f.field.is_zero(v)));
        let a3 = rational[0].eigenvalues[&3].clone();
        assert!(shimura_consistency(&f, 3, &a3).unwrap().is_empty());

        // the cubic family lifts nontrivially and satisfies the relation
        // exactly in its coefficient field
        let e = cubic[0];
        let f = t.theta_lift_nf(&e.field, &e.coords, 108).unwrap();
        assert!(f.mu.values().any(|v| !e.field.is_zero(v)));
        let a3 = e.eigenvalues[&3].clone();
        let off = shimura_consistency(&f, 3, &a3).unwrap();
        assert!(off.is_empty(), "offenders: {off:?}");

        // eta route agrees for number-field coordinates as well
        let pair = DiscPair::new(rat(3), rat(1));
        let via_theta = t.theta_coefficient_nf(&e.field, &e.coords, &pair).unwrap();
        let via_eta = t.eta_check_nf(&e.field, &e.coords, &pair).unwrap();
        assert_eq!(via_theta, via_eta);
    }

    #[test]
    fn odd_weight_forces_zero() {
        let m = module(-1, -11, 11, &[], 1);
        assert!(m.dim > 0);
        let t = ThetaSpace::new(&m).unwrap();
        for d in [3i64, 4, 8, 11, 12, 16] {
            let l = t
                .coefficient_functional(&DiscPair::new(rat(d), rat(1)))
                .unwrap();
            assert!(l.iter().all(|c| c.is_zero()), "parity leak at {d}");
            let e = t.eta_functional(&DiscPair::new(rat(d), rat(1))).unwrap();
            assert!(e.iter().all(|c| c.is_zero()));
        }
        let phi = vec![Rat::one(); m.dim];
        let f = t.theta_lift(&phi, 20).unwrap();
        assert!(f.zero_by_parity);
        assert!(f.mu.values().all(|v| f.field.is_zero(v)));
    }

    #[test]
    fn level_27_special_order() {
        let m = module(-1, -3, 27, &[(3, -1)], 0);
        let t = ThetaSpace::new(&m).unwrap();
        for d in 1..=60i64 {
            for a in cusp_grid(d, 60) {
                let pair = DiscPair::new(rat(d), a);
                assert_eq!(
                    t.coefficient_functional(&pair).unwrap(),
                    t.eta_functional(&pair).unwrap(),
                    "routes disagree at {pair:?}"
                );
            }
        }
        // orbit counts: 2^(omega(27)) h(K) for embeddable fundamental d
        // coprime to 6, empty when 3 splits in K
        for (d, expect) in [(-7i64, Some(1u64)), (-19, Some(1)), (-31, Some(3)),
                            (-55, Some(4)), (-11, None), (-23, None), (-35, None)] {
            let pair = fundamental_pair(&rat(-d)).unwrap();
            let sp = t.special_points(&pair).unwrap();
            match expect {
                Some(h) => {
                    assert_eq!(class_number(d).unwrap(), h);
                    assert_eq!(sp.len() as u64, 2 * h, "count at d={d}");
                }
                None => assert!(sp.is_empty(), "expected no points at d={d}"),
            }
        }
        // the eigenform coefficients vanish on the split side
        let forms = m.eigenforms(15).unwrap();
        let cusp: Vec<_> = forms
            .iter()
            .filter(|e| {
                e.field
                    .is_rational(&e.eigenvalues[&2])
                    .map(|a2| a2 != rat(3)) // excludes the Eisenstein line
                    .unwrap_or(true)
            })
            .collect();
        assert_eq!(cusp.len(), 1);
        let phi = rational_coords(cusp[0]);
        let f = t.theta_lift(&phi, 60).unwrap();
        for d in [-11i64, -23, -35, -59] {
            let lam = f
                .coefficient_rat(&DiscPair::new(rat(-d), rat(1)))
                .unwrap();
            assert_eq!(lam, rat(0), "split discriminant d={d} must not support");
        }
        // an inert fundamental discriminant with nonzero coefficient exists
        let nonzero = [-7i64, -19, -31, -43]
            .iter()
            .any(|d| {
                !f.coefficient_rat(&DiscPair::new(rat(-d), rat(1)))
                    .unwrap()
                    .is_zero()
            });
        assert!(nonzero);
    }

    #[test]
    fn shimura_guard_rejects_bad_primes() {
        let m = module(-1, -11, 11, &[], 0);
        let t = ThetaSpace::new(&m).unwrap();
        let f = t.theta_lift(&vec![Rat::zero(); m.dim], 20).unwrap();
        let one = f.field.one();
        assert!(shimura_consistency(&f, 2, &one).is_err());
        assert!(shimura_consistency(&f, 11, &one).is_err());
        assert!(shimura_consistency(&f, 9, &one).is_err());
        // the zero form satisfies the relation vacuously
        assert!(shimura_consistency(&f, 3, &one).unwrap().is_empty());
    }

    #[test]
    fn int_helpers() {
        assert_eq!(rat_sqrt(&ratio(4, 9)), Some(ratio(2, 3)));
        assert_eq!(rat_sqrt(&rat(0)), Some(rat(0)));
        assert_eq!(rat_sqrt(&ratio(2, 1)), None);
        assert_eq!(rat_sqrt(&rat(-4)), None);
        let _ = int(0);
    }
}
