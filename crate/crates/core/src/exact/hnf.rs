//! Integer row Hermite normal form and lattices over Q.
//!
//! A lattice is stored as `rows / den`: an integer matrix in canonical HNF
//! (positive pivots, entries above a pivot reduced into [0, pivot)) plus a
//! minimal positive denominator. Two equal lattices always have identical
//! storage, so equality is structural.

use super::mat;
use super::{Int, Rat};
use crate::{Error, Result};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Canonical Hermite normal form of the row span of `rows` (zero rows
/// dropped). The input may be rank deficient; the output rows are a basis.
pub fn hnf_span(rows: &[Vec<Int>]) -> Vec<Vec<Int>> {
    if rows.is_empty() {
        return vec![];
    }
    let cols = rows[0].len();
    let mut m: Vec<Vec<Int>> = rows.to_vec();
    for r in &m {
        assert_eq!(r.len(), cols, "ragged matrix");
    }
    let mut rank = 0usize;
    for col in 0..cols {
        // Reduce all entries below `rank` in this column to a single one by
        // repeated euclidean steps.
        loop {
            let mut idx: Option<usize> = None;
            for i in rank..m.len() {
                if !m[i][col].is_zero() {
                    idx = match idx {
                        None => Some(i),
                        Some(j) => {
                            if m[i][col].abs() < m[j][col].abs() {
                                Some(i)
                            } else {
                                Some(j)
                            }
                        }
                    };
                }
            }
            let Some(p) = idx else { break };
            m.swap(rank, p);
            let mut others = false;
            for i in (rank + 1)..m.len() {
                if m[i][col].is_zero() {
                    continue;
                }
                let q = div_round(&m[i][col], &m[rank][col]);
                if !q.is_zero() {
                    for j in 0..cols {
                        let t = &q * &m[rank][j];
                        m[i][j] -= t;
                    }
                }
                if !m[i][col].is_zero() {
                    others = true;
                }
            }
            if !others {
                break;
            }
        }
        if rank < m.len() && !m[rank][col].is_zero() {
            if m[rank][col].is_negative() {
                for x in m[rank].iter_mut() {
                    *x = -x.clone();
                }
            }
            rank += 1;
        }
    }
    m.truncate(rank);
    // Reduce entries above each pivot into [0, pivot), left to right so a
    // later step never disturbs an already-reduced pivot column.
    for i in 0..rank {
        let pcol = m[i].iter().position(|x| !x.is_zero()).unwrap();
        for k in 0..i {
            let q = m[k][pcol].div_floor(&m[i][pcol]);
            if !q.is_zero() {
                for j in 0..cols {
                    let t = &q * &m[i][j];
                    m[k][j] -= t;
                }
            }
        }
    }
    m
}

/// Nearest-integer division used to shrink entries fast.
fn div_round(a: &Int, b: &Int) -> Int {
    let (q, r) = a.div_rem(b);
    let two_r = &r * 2i32;
    if two_r.abs() > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// HNF of a full-rank list of rows; rejects rank-deficient input.
pub fn hnf(rows: &[Vec<Int>]) -> Result<Vec<Vec<Int>>> {
    let h = hnf_span(rows);
    if h.len() != rows.len() {
        return Err(Error::InvalidInput(format!(
            "rank-deficient input: {} rows span rank {}",
            rows.len(),
            h.len()
        )));
    }
    Ok(h)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    dim: usize,
    den: Int,
    rows: Vec<Vec<Int>>,
}

impl Lattice {
    /// Lattice spanned by the given rational row vectors (any rank).
    pub fn span(dim: usize, gens: &[Vec<Rat>]) -> Lattice {
        let mut den = Int::one();
        for g in gens {
            assert_eq!(g.len(), dim, "generator of wrong dimension");
            for x in g {
                den = den.lcm(x.denom());
            }
        }
        let int_rows: Vec<Vec<Int>> = gens
            .iter()
            .map(|g| g.iter().map(|x| x.numer() * (&den / x.denom())).collect())
            .collect();
        let rows = hnf_span(&int_rows);
        Lattice::normalized(dim, den, rows)
    }

    /// Lattice with the given rational basis; rejects dependent rows.
    pub fn from_basis(dim: usize, basis: &[Vec<Rat>]) -> Result<Lattice> {
        let l = Lattice::span(dim, basis);
        if l.rank() != basis.len() {
            return Err(Error::InvalidInput(
                "basis rows are linearly dependent".into(),
            ));
        }
        Ok(l)
    }

    fn normalized(dim: usize, den: Int, rows: Vec<Vec<Int>>) -> Lattice {
        let mut g = den.clone();
        for r in &rows {
            for x in r {
                g = g.gcd(x);
            }
        }
        if g.is_zero() || g.is_one() {
            return Lattice { dim, den, rows };
        }
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(|x| x / &g).collect())
            .collect();
        Lattice {
            dim,
            den: den / g,
            rows,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn zero(dim: usize) -> Lattice {
        Lattice {
            dim,
            den: Int::one(),
            rows: vec![],
        }
    }

    /// Standard integer lattice Z^dim.
    pub fn standard(dim: usize) -> Lattice {
        let gens: Vec<Vec<Rat>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                    .collect()
            })
            .collect();
        Lattice::span(dim, &gens)
    }

    pub fn basis(&self) -> Vec<Vec<Rat>> {
        let d = Rat::from_integer(self.den.clone());
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| Rat::from_integer(x.clone()) / &d)
                    .collect()
            })
            .collect()
    }

    /// Coordinates of `v` in this basis if `v` lies in the rational span.
    pub fn coords(&self, v: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(v.len(), self.dim);
        let basis = self.basis();
        let mut rem: Vec<Rat> = v.to_vec();
        let mut coords = Vec::with_capacity(self.rows.len());
        for row in &basis {
            let pcol = row.iter().position(|x| !x.is_zero());
            let Some(p) = pcol else {
                coords.push(Rat::zero());
                continue;
            };
            let c = &rem[p] / &row[p];
            if !c.is_zero() {
                for (r, b) in rem.iter_mut().zip(row) {
                    *r -= &c * b;
                }
            }
            coords.push(c);
        }
        if rem.iter().all(|x| x.is_zero()) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        match self.coords(v) {
            Some(c) => c.iter().all(|x| x.denom().is_one()),
            None => false,
        }
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis().iter().all(|row| self.contains(row))
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        assert_eq!(self.dim, other.dim);
        let mut gens = self.basis();
        gens.extend(other.basis());
        Lattice::span(self.dim, &gens)
    }

    pub fn scaled(&self, c: &Rat) -> Lattice {
        assert!(!c.is_zero());
        let gens: Vec<Vec<Rat>> = self
            .basis()
            .iter()
            .map(|r| r.iter().map(|x| x * c).collect())
            .collect();
        Lattice::span(self.dim, &gens)
    }

    /// |det| of the basis matrix; full-rank square lattices only.
    pub fn det_abs(&self) -> Rat {
        assert_eq!(self.rank(), self.dim, "det of non-full-rank lattice");
        // HNF is upper staircase, so the determinant is the pivot product.
        let mut d = Rat::one();
        for row in &self.rows {
            let p = row.iter().position(|x| !x.is_zero()).unwrap();
            d *= Rat::from_integer(row[p].clone());
        }
        let denpow = (0..self.dim).fold(Rat::one(), |acc, _| {
            acc * Rat::from_integer(self.den.clone())
        });
        d / denpow
    }

    /// Index [other : self] as a positive rational (both full rank, same
    /// dimension; equals |det self| / |det other|).
    pub fn index_in(&self, other: &Lattice) -> Rat {
        self.det_abs() / other.det_abs()
    }

    /// Dual lattice {x : <x, self> in Z} for full-rank lattices, rows of the
    /// inverse-transpose basis matrix.
    pub fn dual(&self) -> Result<Lattice> {
        assert_eq!(self.rank(), self.dim, "dual of non-full-rank lattice");
        let b = self.basis();
        let binv = mat::inverse(&b)?;
        let bt = mat::transpose(&binv);
        Lattice::from_basis(self.dim, &bt)
    }

    /// Intersection of two full-rank lattices via duality.
    pub fn intersect(&self, other: &Lattice) -> Result<Lattice> {
        let d = self.dual()?.sum(&other.dual()?);
        d.dual()
    }

    /// Integer HNF data: (denominator, rows). Stable across equal lattices.
    pub fn raw(&self) -> (&Int, &[Vec<Int>]) {
        (&self.den, &self.rows)
    }
}
