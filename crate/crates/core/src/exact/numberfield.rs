//! Number fields Q[x]/(f) with exact arithmetic and real embeddings.
//!
//! Elements are coefficient vectors of length deg(f) over Q. The rationals
//! themselves are the degree-1 field with modulus x, so callers can treat
//! every eigenvalue field uniformly.

use super::poly::{self, Poly};
use super::{rat, Rat};
use crate::{Error, Result};
use num_traits::{One, Zero};
use rug::Float;

#[derive(Clone, Debug, PartialEq)]
pub struct NumberField {
    /// Monic irreducible modulus, ascending coefficients.
    modulus: Poly,
    degree: usize,
}

pub type NfElem = Vec<Rat>;

impl NumberField {
    pub fn new(modulus: Poly) -> Result<NumberField> {
        let d = poly::deg(&modulus)
            .ok_or_else(|| Error::InvalidInput("zero modulus".into()))?;
        if d == 0 {
            return Err(Error::InvalidInput("constant modulus".into()));
        }
        if !modulus[d].is_one() {
            return Err(Error::InvalidInput("modulus must be monic".into()));
        }
        Ok(NumberField { modulus, degree: d })
    }

    /// Q itself, presented as Q[x]/(x).
    pub fn rationals() -> NumberField {
        NumberField {
            modulus: vec![Rat::zero(), Rat::one()],
            degree: 1,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn zero(&self) -> NfElem {
        vec![Rat::zero(); self.degree]
    }

    pub fn one(&self) -> NfElem {
        self.from_rat(&Rat::one())
    }

    pub fn from_rat(&self, c: &Rat) -> NfElem {
        let mut v = vec![Rat::zero(); self.degree];
        v[0] = c.clone();
        v
    }

    /// The class of x, i.e. the distinguished generator.
    pub fn gen(&self) -> NfElem {
        let mut v = vec![Rat::zero(); self.degree];
        if self.degree == 1 {
            // x reduces to -c0 mod (x + c0)
            v[0] = -self.modulus[0].clone();
        } else {
            v[1] = Rat::one();
        }
        v
    }

    pub fn is_rational(&self, a: &NfElem) -> Option<Rat> {
        if a[1..].iter().all(|c| c.is_zero()) {
            Some(a[0].clone())
        } else {
            None
        }
    }

    pub fn add(&self, a: &NfElem, b: &NfElem) -> NfElem {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn sub(&self, a: &NfElem, b: &NfElem) -> NfElem {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn neg(&self, a: &NfElem) -> NfElem {
        a.iter().map(|x| -x.clone()).collect()
    }

    pub fn mul_rat(&self, a: &NfElem, c: &Rat) -> NfElem {
        a.iter().map(|x| x * c).collect()
    }

    pub fn mul(&self, a: &NfElem, b: &NfElem) -> NfElem {
        let prod = poly::mul(a, b);
        self.reduce(prod)
    }

    fn reduce(&self, p: Poly) -> NfElem {
        let (_, mut r) = poly::divrem(&p, &self.modulus);
        r.resize(self.degree, Rat::zero());
        r
    }

    pub fn inv(&self, a: &NfElem) -> Result<NfElem> {
        let mut ap = a.clone();
        poly::trim(&mut ap);
        if poly::deg(&ap).is_none() {
            return Err(Error::InvalidInput("division by zero".into()));
        }
        let (g, s, _) = poly::xgcd(&ap, &self.modulus);
        if poly::deg(&g) != Some(0) {
            return Err(Error::InvalidInput(
                "element not invertible (modulus not irreducible?)".into(),
            ));
        }
        // g is the constant 1 after normalization in xgcd
        Ok(self.reduce(s))
    }

    pub fn div(&self, a: &NfElem, b: &NfElem) -> Result<NfElem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn is_zero(&self, a: &NfElem) -> bool {
        a.iter().all(|c| c.is_zero())
    }

    pub fn pow(&self, a: &NfElem, e: u64) -> NfElem {
        let mut acc = self.one();
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Isolating rational intervals for the real embeddings (images of the
    /// generator), sorted ascending, refined to width 2^-bits.
    pub fn real_embeddings(&self, bits: u32) -> Vec<(Rat, Rat)> {
        poly::isolate_real_roots(&self.modulus, bits)
    }

    /// Evaluate an element under the embedding sending the generator into
    /// the given interval, at `prec` bits. The interval should be refined
    /// enough for the target accuracy (see `real_embeddings`).
    pub fn embed(&self, a: &NfElem, root: &(Rat, Rat), prec: u32) -> Float {
        let mid = (&root.0 + &root.1) / rat(2);
        let x = rat_to_float(&mid, prec);
        let mut acc = Float::with_val(prec, 0);
        for c in a.iter().rev() {
            acc *= &x;
            acc += rat_to_float(c, prec);
        }
        acc
    }
}

/// Exact conversion of a big rational to an MPFR float at given precision.
pub fn rat_to_float(r: &Rat, prec: u32) -> Float {
    let num = rug::Integer::from_str_radix(&r.numer().to_string(), 10).unwrap();
    let den = rug::Integer::from_str_radix(&r.denom().to_string(), 10).unwrap();
    let q = rug::Rational::from((num, den));
    Float::with_val(prec, q)
}
