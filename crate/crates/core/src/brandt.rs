//! Brandt modules: vector-valued functions on the right ideal classes of a
//! definite order, with values in the unit-group invariants of the weight-k
//! harmonic representation. Provides the Hecke operators, the weighted
//! height pairing, the Eisenstein/cuspidal split, exact simultaneous
//! eigenform decomposition over number fields, and the Atkin-Lehner action.

use crate::exact::mat::{self, Mat};
use crate::exact::numberfield::{NfElem, NumberField};
use crate::exact::poly::{self, Factor, Poly};
use crate::exact::{rat, ratio, Int, Rat};
use crate::harmonic::HarmonicSpace;
use crate::quat::normalizer::{class_action, normalizer_w};
use crate::quat::{connecting_elements, ClassSet, Quat};
use crate::{Error, Result};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

pub struct BrandtModule {
    pub classes: ClassSet,
    pub space: HarmonicSpace,
    /// per class, rows spanning the unit-invariant subspace of V
    pub blocks: Vec<Mat>,
    /// starting coordinate of each class block
    pub offsets: Vec<usize>,
    pub dim: usize,
    /// Gram matrix of the height pairing in module coordinates
    pub height_gram: Mat,
}

impl BrandtModule {
    pub fn build(classes: ClassSet, k: u32) -> Result<BrandtModule> {
        let space = HarmonicSpace::new(&classes.order.alg, k)?;
        let h = classes.class_number();
        let vdim = space.dim();
        let mut blocks = Vec::with_capacity(h);
        let mut offsets = Vec::with_capacity(h);
        let mut dim = 0usize;
        for x in 0..h {
            let units = classes.left_orders[x].units_mod_center();
            let w = units.len();
            debug_assert_eq!(w as u64, classes.weights[x]);
            // averaging projector onto the invariants
            let mut proj = mat::zeros(vdim, vdim);
            for u in &units {
                let a = space.act_matrix(u)?;
                for r in 0..vdim {
                    for c in 0..vdim {
                        proj[r][c] += &a[r][c];
                    }
                }
            }
            let wr = rat(w as i64);
            for row in proj.iter_mut() {
                for e in row.iter_mut() {
                    *e /= &wr;
                }
            }
            let (red, pivots) = mat::rref(&proj);
            let basis: Mat = red.into_iter().take(pivots.len()).collect();
            offsets.push(dim);
            dim += basis.len();
            blocks.push(basis);
        }
        // block diagonal height Gram: (1/w_x) <b_s, b_t> on each class
        let mut height_gram = mat::zeros(dim, dim);
        for x in 0..h {
            let b = &blocks[x];
            let w = ratio(1, classes.weights[x] as i64);
            for s in 0..b.len() {
                for t in 0..b.len() {
                    height_gram[offsets[x] + s][offsets[x] + t] =
                        space.inner(&b[s], &b[t]) * &w;
                }
            }
        }
        Ok(BrandtModule {
            classes,
            space,
            blocks,
            offsets,
            dim,
            height_gram,
        })
    }

    pub fn class_number(&self) -> usize {
        self.classes.class_number()
    }

    /// The value of a module vector at class x, in harmonic V-coordinates.
    pub fn value(&self, phi: &[Rat], x: usize) -> Vec<Rat> {
        let b = &self.blocks[x];
        let mut v = vec![Rat::zero(); self.space.dim()];
        for (t, row) in b.iter().enumerate() {
            let c = &phi[self.offsets[x] + t];
            if c.is_zero() {
                continue;
            }
            for (vi, ri) in v.iter_mut().zip(row) {
                *vi += c * ri;
            }
        }
        v
    }

    /// Hecke operator at level m >= 1 as a dim x dim matrix acting on
    /// column coordinate vectors: (T phi)(x_i) is a weighted sum of
    /// phi(x_j) moved by the norm-m connecting elements. The overall m^k
    /// factor puts the eigenvalues in the arithmetic normalization of
    /// weight 2k+2, where T_1 = id and |a_p| <= 2 p^{(2k+1)/2}.
    pub fn hecke(&self, m: i64) -> Result<Mat> {
        if m < 1 {
            return Err(Error::InvalidInput("Hecke level must be positive".into()));
        }
        let weight_scale = rat(m).pow(self.space.k as i32);
        let h = self.class_number();
        let mut out = mat::zeros(self.dim, self.dim);
        for i in 0..h {
            for j in 0..h {
                let conn = connecting_elements(
                    &self.classes.ideals[j],
                    &self.classes.ideals[i],
                    m,
                )?;
                if conn.is_empty() {
                    continue;
                }
                // sum of the action matrices over the connecting elements
                let vdim = self.space.dim();
                let mut rho_sum = mat::zeros(vdim, vdim);
                for g in &conn {
                    let a = self.space.act_matrix(g)?;
                    for r in 0..vdim {
                        for c in 0..vdim {
                            rho_sum[r][c] += &a[r][c];
                        }
                    }
                }
                let wj = &weight_scale / rat(self.classes.weights[j] as i64);
                // each block-j basis row maps into the block-i row space
                let imgs: Mat = self.blocks[j]
                    .iter()
                    .map(|row| {
                        mat::vec_mul(row, &rho_sum)
                            .into_iter()
                            .map(|e| e * &wj)
                            .collect()
                    })
                    .collect();
                let coeffs = mat::express_in_rowspace(&self.blocks[i], &imgs).map_err(|_| {
                    Error::Consistency(
                        "Hecke image leaves the unit-invariant subspace".into(),
                    )
                })?;
                for (t, row) in coeffs.iter().enumerate() {
                    for (s, c) in row.iter().enumerate() {
                        out[self.offsets[i] + s][self.offsets[j] + t] = c.clone();
                    }
                }
            }
        }
        Ok(out)
    }

    /// Hecke eigenvalue table for an eigenform: a_m for every 1 <= m <=
    /// bound from one batched lattice pass per class, instead of one
    /// enumeration per operator level. The eigenform is probed at a class
    /// and a point of W where its value is nonzero; each connecting
    /// element gamma then contributes the probe value moved by gamma, and
    /// the eigenvalue falls out as an exact ratio in the coefficient
    /// field. Slot m of the result holds a_m; slot 0 is unused.
    pub fn eigenvalue_table(&self, e: &Eigenform, bound: i64) -> Result<Vec<NfElem>> {
        if bound < 1 {
            return Err(Error::InvalidInput("table bound must be positive".into()));
        }
        let field = &e.field;
        let space = &self.space;
        let alg = &self.classes.order.alg;
        let h = self.class_number();
        let k = space.k;
        let nmono = space.monos.len();

        // probe point: class i0 and integer w0 in W with nonzero value;
        // a grid wider than the degree cannot be a zero set
        let r = k as i64 + 1;
        let mut probe: Option<(usize, [i64; 3], NfElem)> = None;
        'outer: for i0 in 0..h {
            if self.blocks[i0].is_empty() {
                continue;
            }
            for x in -r..=r {
                for y in -r..=r {
                    for z in -r..=r {
                        let w0 = [rat(x), rat(y), rat(z)];
                        let mut val = field.zero();
                        for (t, row) in self.blocks[i0].iter().enumerate() {
                            let ev = space.eval(row, &w0);
                            if !ev.is_zero() {
                                let c = &e.coords[self.offsets[i0] + t];
                                val = field.add(&val, &field.mul_rat(c, &ev));
                            }
                        }
                        if !field.is_zero(&val) {
                            probe = Some((i0, [x, y, z], val));
                            break 'outer;
                        }
                    }
                }
            }
        }
        let (i0, w0, val0) = probe.ok_or_else(|| {
            Error::Consistency("eigenform vanishes at every probe point".into())
        })?;
        let w0q = Quat::from_vec(&[rat(0), rat(w0[0]), rat(w0[1]), rat(w0[2])]);

        let to_i64 = |v: &Rat, what: &str| -> Result<i64> {
            if !v.is_integer() {
                return Err(Error::Consistency(format!("{what} is not integral")));
            }
            Ok(crate::quat::algebra::int_to_i64(v.numer()))
        };

        let mut s_table: Vec<NfElem> = vec![field.zero(); bound as usize + 1];
        for j in 0..h {
            if self.blocks[j].is_empty() {
                continue;
            }
            let prod = crate::quat::ideal::mul_lattices(
                alg,
                &self.classes.ideals[j].lattice,
                &self.classes.ideals[i0].inverse_lattice(),
            );
            let sigma = self.classes.ideals[j].norm() / self.classes.ideals[i0].norm();
            let basis = prod.basis();
            let mut den = crate::exact::int(1);
            for v in &basis {
                for c in v {
                    den = num_integer::Integer::lcm(&den, c.denom());
                }
            }
            let den_r = Rat::from_integer(den);
            let bq: Vec<Quat> = basis
                .iter()
                .map(|v| {
                    let scaled: Vec<Rat> = v.iter().map(|c| c * &den_r).collect();
                    Quat::from_vec(&scaled)
                })
                .collect();
            // integer Gram of twice the norm form on the scaled basis
            let mut a = vec![vec![0i64; 4]; 4];
            for r in 0..4 {
                for s in 0..4 {
                    let tr = alg.mul(&bq[r], &bq[s].conj()).trd();
                    a[r][s] = to_i64(&tr, "norm Gram entry")?;
                }
            }
            // symmetrized pure components of b_r w0 conj(b_s): the point
            // moved by gamma = sum c_r b_r has 2 * coordinates c^T T_i c
            let mut tmat = vec![vec![vec![0i64; 4]; 4]; 3];
            for r in 0..4 {
                for s in 0..4 {
                    let p1 = alg.mul(&alg.mul(&bq[r], &w0q), &bq[s].conj());
                    let p2 = alg.mul(&alg.mul(&bq[s], &w0q), &bq[r].conj());
                    let scalar = &p1.0[0] + &p2.0[0];
                    if !scalar.is_zero() {
                        return Err(Error::Consistency(
                            "symmetrized moved point is not trace free".into(),
                        ));
                    }
                    for i in 0..3 {
                        let c = &p1.0[i + 1] + &p2.0[i + 1];
                        tmat[i][r][s] = to_i64(&c, "moved-point form entry")?;
                    }
                }
            }
            // nrd(gamma * den) = m * tt with tt = sigma den^2
            let tt = &sigma * &den_r * &den_r;
            let tt_num = crate::quat::algebra::int_to_i64(tt.numer());
            let tt_den = crate::quat::algebra::int_to_i64(tt.denom());
            let b2_rat = rat(2 * bound) * &tt;
            let b2 = crate::quat::algebra::int_to_i64(&b2_rat.to_integer());
            let mut acc: Vec<Vec<i128>> = vec![vec![0i128; nmono]; bound as usize + 1];
            let mut overflow = false;
            crate::exact::fastenum::enumerate_batch(&a, b2, &mut |c, norm2| {
                // norm2 = 2 nrd(gamma den); recover the operator level m
                let num = (norm2 as i128) * (tt_den as i128);
                let d2 = 2i128 * (tt_num as i128);
                if num % d2 != 0 {
                    return;
                }
                let m = num / d2;
                if m < 1 || m > bound as i128 {
                    return;
                }
                let mut u = [0i128; 3];
                for (i, ui) in u.iter_mut().enumerate() {
                    let t = &tmat[i];
                    let mut s: i128 = 0;
                    for r in 0..4 {
                        if c[r] == 0 {
                            continue;
                        }
                        let mut row: i128 = 0;
                        for q in 0..4 {
                            row += (t[r][q] as i128) * (c[q] as i128);
                        }
                        s += (c[r] as i128) * row;
                    }
                    *ui = s;
                }
                let row = &mut acc[m as usize];
                for (mi, exps) in space.monos.iter().enumerate() {
                    let mut term: i128 = 1;
                    for (i, &ei) in exps.iter().enumerate() {
                        for _ in 0..ei {
                            term = match term.checked_mul(u[i]) {
                                Some(v) => v,
                                None => {
                                    overflow = true;
                                    return;
                                }
                            };
                        }
                    }
                    row[mi] = match row[mi].checked_add(term) {
                        Some(v) => v,
                        None => {
                            overflow = true;
                            return;
                        }
                    };
                }
            })?;
            if overflow {
                return Err(Error::InvalidInput(
                    "eigenvalue table bound too large for machine accumulators".into(),
                ));
            }
            // moved point has coordinates u/2 after undoing the den scale
            // inside nrd(gamma)^k; assemble with 1/(2 w_j 2^k tt^k)
            let w_j = rat(self.classes.weights[j] as i64);
            let scale =
                Rat::one() / (rat(2) * w_j * rat(2).pow(k as i32) * tt.pow(k as i32));
            let mono_coeffs: Vec<Vec<Rat>> = self.blocks[j]
                .iter()
                .map(|row| mat::vec_mul(row, &space.basis))
                .collect();
            for m in 1..=bound as usize {
                if acc[m].iter().all(|v| *v == 0) {
                    continue;
                }
                let accm: Vec<Rat> = acc[m]
                    .iter()
                    .map(|v| Rat::from_integer(Int::from(*v)))
                    .collect();
                for (t, mc) in mono_coeffs.iter().enumerate() {
                    let mut f = Rat::zero();
                    for (cmi, am) in mc.iter().zip(&accm) {
                        if !cmi.is_zero() {
                            f += cmi * am;
                        }
                    }
                    if f.is_zero() {
                        continue;
                    }
                    let phi_t = &e.coords[self.offsets[j] + t];
                    let contrib = field.mul_rat(phi_t, &(&f * &scale));
                    s_table[m] = field.add(&s_table[m], &contrib);
                }
            }
        }
        let mut out = vec![field.zero(); bound as usize + 1];
        for m in 1..=bound as usize {
            out[m] = field.div(&s_table[m], &val0)?;
        }
        if out[1] != field.one() {
            return Err(Error::Consistency(
                "eigenvalue table fails the identity at level 1".into(),
            ));
        }
        Ok(out)
    }

    /// Height pairing in module coordinates.
    pub fn height(&self, phi: &[Rat], psi: &[Rat]) -> Rat {
        let mut s = Rat::zero();
        for i in 0..self.dim {
            if phi[i].is_zero() {
                continue;
            }
            for j in 0..self.dim {
                s += &phi[i] * &psi[j] * &self.height_gram[i][j];
            }
        }
        s
    }

    /// Independent height computation through the unit-orbit sums: pairs
    /// the values via the norm-one connecting elements between classes,
    /// with both class weights dividing.
    pub fn height_via_orbits(&self, phi: &[Rat], psi: &[Rat]) -> Result<Rat> {
        let h = self.class_number();
        let mut total = Rat::zero();
        for x in 0..h {
            let vx = self.value(phi, x);
            for y in 0..h {
                let vy = self.value(psi, y);
                let conn = connecting_elements(
                    &self.classes.ideals[x],
                    &self.classes.ideals[y],
                    1,
                )?;
                if conn.is_empty() {
                    continue;
                }
                let mut s = Rat::zero();
                for g in &conn {
                    let moved = self.space.act(&vx, g)?;
                    s += self.space.inner(&moved, &vy);
                }
                let wx = rat(self.classes.weights[x] as i64);
                let wy = rat(self.classes.weights[y] as i64);
                total += s / (wx * wy);
            }
        }
        Ok(total)
    }

    /// The Eisenstein subspace: spanned by the constant-1 vector when
    /// k = 0, zero otherwise. Returns basis rows in module coordinates.
    pub fn eisenstein(&self) -> Mat {
        if self.space.k != 0 {
            return Vec::new();
        }
        // at k = 0 every block is one-dimensional, spanned by a constant;
        // the Eisenstein vector has value 1 at every class
        let mut v = vec![Rat::zero(); self.dim];
        for x in 0..self.class_number() {
            // block basis row is c * (constant polynomial), solve c * b = 1
            let b = &self.blocks[x][0][0];
            v[self.offsets[x]] = Rat::one() / b;
        }
        vec![v]
    }

    /// Rows spanning the cuspidal subspace: the orthogonal complement of
    /// the Eisenstein subspace under the height pairing.
    pub fn cuspidal(&self) -> Mat {
        let eis = self.eisenstein();
        if eis.is_empty() {
            return mat::identity(self.dim);
        }
        // kernel of the functional phi -> <eis, phi>
        let mut functional = vec![vec![Rat::zero(); self.dim]];
        for j in 0..self.dim {
            let mut s = Rat::zero();
            for i in 0..self.dim {
                s += &eis[0][i] * &self.height_gram[i][j];
            }
            functional[0][j] = s;
        }
        let ker = mat::kernel(&functional);
        mat::rref(&ker).0
    }

    /// Restriction of a module operator to the row space of `rows`:
    /// returns A with (c * A) * rows = (matrix applied to c * rows).
    fn restrict(&self, op: &Mat, rows: &Mat) -> Result<Mat> {
        let imgs: Mat = rows
            .iter()
            .map(|r| {
                // op acts on columns; row r maps to (op * r^T)^T
                let col = mat::mul_vec(op, r);
                col
            })
            .collect();
        mat::express_in_rowspace(rows, &imgs)
            .map_err(|_| Error::Consistency("operator does not preserve the subspace".into()))
    }

    /// Decompose the cuspidal subspace into simultaneous eigenvectors of
    /// the Hecke operators at primes not dividing the discriminant, up to
    /// `bound`. Each family is returned once per real embedding of its
    /// coefficient field, sorted by embedded eigenvalue tuples.
    pub fn eigenforms(&self, bound: i64) -> Result<Vec<Eigenform>> {
        let disc = self.classes.order.reduced_discriminant();
        let primes: Vec<i64> = crate::exact::arith::sieve_primes(bound.max(2) as u64)
            .into_iter()
            .map(|p| p as i64)
            .filter(|p| !(&disc % crate::exact::int(*p)).is_zero())
            .collect();
        if primes.is_empty() {
            return Err(Error::InvalidInput(
                "eigenform bound admits no prime away from the discriminant".into(),
            ));
        }
        let cusp = self.cuspidal();
        let mut families = Vec::new();
        if !cusp.is_empty() {
            self.split(cusp, &primes, 0, &mut families)?;
        }
        // expand families into embedded eigenforms and sort
        let mut forms = Vec::new();
        for fam in families {
            let roots = fam.field.real_embeddings(96);
            if roots.len() != fam.field.degree() {
                return Err(Error::Consistency(
                    "eigenvalue field is not totally real".into(),
                ));
            }
            for (idx, root) in roots.into_iter().enumerate() {
                forms.push(Eigenform {
                    field: fam.field.clone(),
                    coords: fam.coords.clone(),
                    eigenvalues: fam.eigenvalues.clone(),
                    root,
                    root_index: idx,
                });
            }
        }
        forms.sort_by(|a, b| {
            for p in &primes {
                let ea = a.embed_eigenvalue(*p, 96);
                let eb = b.embed_eigenvalue(*p, 96);
                if let Some(ord) = ea.partial_cmp(&eb) {
                    if ord != std::cmp::Ordering::Equal {
                        return ord;
                    }
                }
            }
            std::cmp::Ordering::Equal
        });
        Ok(forms)
    }

    fn split(
        &self,
        rows: Mat,
        primes: &[i64],
        idx: usize,
        out: &mut Vec<Family>,
    ) -> Result<()> {
        if rows.is_empty() {
            return Ok(());
        }
        if idx >= primes.len() {
            return Err(Error::NotFound(
                "simultaneous eigenspaces unresolved; raise the Hecke bound".into(),
            ));
        }
        let p = primes[idx];
        let t = self.hecke(p)?;
        let a = self.restrict(&t, &rows)?;
        let cp = mat::charpoly(&a);
        let factors = poly::factor_rational(&cp);
        for f in &factors {
            match f {
                Factor::Unfactored(_) => {
                    return Err(Error::NotFound(format!(
                        "characteristic polynomial of T_{p} resisted factorization"
                    )));
                }
                Factor::Root(r, mult) => {
                    let lin = vec![-r.clone(), Rat::one()];
                    let sub = self.factor_kernel(&a, &rows, &lin)?;
                    if *mult == 1 {
                        debug_assert_eq!(sub.len(), 1);
                        self.finalize(sub, primes, out)?;
                    } else {
                        self.split(sub, primes, idx + 1, out)?;
                    }
                }
                Factor::Irreducible(g, mult) => {
                    let sub = self.factor_kernel(&a, &rows, g)?;
                    if *mult == 1 {
                        self.finalize(sub, primes, out)?;
                    } else {
                        self.split(sub, primes, idx + 1, out)?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Rows of the kernel of g(A) acting on row coefficient vectors,
    /// mapped back to module coordinates.
    fn factor_kernel(&self, a: &Mat, rows: &Mat, g: &Poly) -> Result<Mat> {
        let n = a.len();
        // evaluate g at A (row action): sum g_i A^i
        let mut acc = mat::zeros(n, n);
        let mut pw = mat::identity(n);
        for (i, c) in g.iter().enumerate() {
            if i > 0 {
                pw = mat::mul(&pw, a);
            }
            if c.is_zero() {
                continue;
            }
            for r in 0..n {
                for s in 0..n {
                    acc[r][s] += c * &pw[r][s];
                }
            }
        }
        // row vectors c with c * acc = 0
        let ker = mat::kernel(&mat::transpose(&acc));
        let coeff_rows = mat::rref(&ker).0;
        Ok(coeff_rows
            .iter()
            .map(|c| {
                let mut v = vec![Rat::zero(); self.dim];
                for (ci, row) in c.iter().zip(rows) {
                    if ci.is_zero() {
                        continue;
                    }
                    for (vi, ri) in v.iter_mut().zip(row) {
                        *vi += ci * ri;
                    }
                }
                v
            })
            .collect())
    }

    /// The subspace has irreducible characteristic polynomial under some
    /// T_p; build the eigenform family over its coefficient field by the
    /// cyclic-vector construction.
    fn finalize(&self, rows: Mat, primes: &[i64], out: &mut Vec<Family>) -> Result<()> {
        let d = rows.len();
        if d == 1 {
            // rational eigenform
            let field = NumberField::rationals();
            let coords: Vec<NfElem> = rows[0].iter().map(|c| vec![c.clone()]).collect();
            let eigenvalues = self.eigenvalue_map(&field, &coords, primes)?;
            out.push(Family {
                field,
                coords,
                eigenvalues,
            });
            return Ok(());
        }
        // find a prime whose restriction has irreducible charpoly equal to
        // the minimal polynomial of the whole block
        for p in primes {
            let t = self.hecke(*p)?;
            let a = self.restrict(&t, &rows)?;
            let cp = mat::charpoly(&a);
            let factors = poly::factor_rational(&cp);
            if factors.len() != 1 {
                continue;
            }
            let g = match &factors[0] {
                Factor::Irreducible(g, 1) => g.clone(),
                _ => continue,
            };
            let field = NumberField::new(g.clone())?;
            // cyclic basis e, eA, ..., eA^{d-1}; in that basis the action
            // is companion, and the eigenvector of eigenvalue xbar has
            // Horner-sequence coordinates c_j = partial evaluation of g
            let e: Vec<Rat> = {
                let mut v = vec![Rat::zero(); d];
                v[0] = Rat::one();
                v
            };
            let mut cyc = vec![e];
            for _ in 1..d {
                let last = cyc.last().unwrap();
                cyc.push(mat::vec_mul(last, &a));
            }
            if mat::rank(&cyc) != d {
                return Err(Error::Consistency(
                    "cyclic vector failed for irreducible block".into(),
                ));
            }
            // c_{d-1} = 1, c_{j-1} = xbar c_j + g_j  (g monic of degree d)
            let mut cs: Vec<NfElem> = vec![field.zero(); d];
            cs[d - 1] = field.one();
            for j in (1..d).rev() {
                let xc = field.mul(&field.gen(), &cs[j]);
                cs[j - 1] = field.add(&xc, &field.from_rat(&g[j]));
            }
            // eigen-row in coefficient space: sum_j c_j * cyc_j, then to
            // module coordinates through `rows`
            let mut coeffs: Vec<NfElem> = vec![field.zero(); d];
            for (j, c) in cs.iter().enumerate() {
                for (t_i, cv) in cyc[j].iter().enumerate() {
                    let term = field.mul_rat(c, cv);
                    coeffs[t_i] = field.add(&coeffs[t_i], &term);
                }
            }
            let mut coords: Vec<NfElem> = vec![field.zero(); self.dim];
            for (ci, row) in coeffs.iter().zip(&rows) {
                for (m_i, rv) in row.iter().enumerate() {
                    let term = field.mul_rat(ci, rv);
                    coords[m_i] = field.add(&coords[m_i], &term);
                }
            }
            let eigenvalues = self.eigenvalue_map(&field, &coords, primes)?;
            out.push(Family {
                field,
                coords,
                eigenvalues,
            });
            return Ok(());
        }
        Err(Error::NotFound(
            "no prime in range isolates the eigenvalue field; raise the Hecke bound".into(),
        ))
    }

    /// Apply a rational module operator to number-field coordinates.
    pub fn apply_nf(&self, field: &NumberField, op: &Mat, v: &[NfElem]) -> Vec<NfElem> {
        let mut out = vec![field.zero(); self.dim];
        for (r, row) in op.iter().enumerate() {
            for (c, e) in row.iter().enumerate() {
                if e.is_zero() {
                    continue;
                }
                let term = field.mul_rat(&v[c], e);
                out[r] = field.add(&out[r], &term);
            }
        }
        out
    }

    /// The eigenvalue of an operator on a known eigenvector, verified at
    /// every coordinate.
    pub fn eigenvalue_of(
        &self,
        field: &NumberField,
        coords: &[NfElem],
        op: &Mat,
    ) -> Result<NfElem> {
        let img = self.apply_nf(field, op, coords);
        let pivot = coords
            .iter()
            .position(|c| !field.is_zero(c))
            .ok_or_else(|| Error::InvalidInput("zero eigenvector".into()))?;
        let lam = field.div(&img[pivot], &coords[pivot])?;
        for i in 0..self.dim {
            let expect = field.mul(&lam, &coords[i]);
            if expect != img[i] {
                return Err(Error::Consistency(
                    "claimed eigenvector is not an eigenvector".into(),
                ));
            }
        }
        Ok(lam)
    }

    fn eigenvalue_map(
        &self,
        field: &NumberField,
        coords: &[NfElem],
        primes: &[i64],
    ) -> Result<BTreeMap<i64, NfElem>> {
        let mut map = BTreeMap::new();
        for p in primes {
            let t = self.hecke(*p)?;
            map.insert(*p, self.eigenvalue_of(field, coords, &t)?);
        }
        Ok(map)
    }

    /// Matrix of the Atkin-Lehner action of the two-sided ideal over p.
    /// Squares to the identity and commutes with the Hecke operators.
    pub fn atkin_lehner(&self, p: i64) -> Result<Mat> {
        let w = normalizer_w(&self.classes.order, p)?;
        let act = class_action(&self.classes, &w)?;
        let mut out = mat::zeros(self.dim, self.dim);
        for i in 0..self.class_number() {
            let j = act.perm[i];
            let rho = self.space.act_matrix(&act.twists[i])?;
            // (phi . w)(x_i) = phi(x_j) . gamma_i : block j feeds block i
            let imgs: Mat = self.blocks[j]
                .iter()
                .map(|row| mat::vec_mul(row, &rho))
                .collect();
            let coeffs = mat::express_in_rowspace(&self.blocks[i], &imgs).map_err(|_| {
                Error::Consistency("Atkin-Lehner image leaves the invariant subspace".into())
            })?;
            for (t, row) in coeffs.iter().enumerate() {
                for (s, c) in row.iter().enumerate() {
                    out[self.offsets[i] + s][self.offsets[j] + t] = c.clone();
                }
            }
        }
        // involution certificate
        let sq = mat::mul(&out, &out);
        if sq != mat::identity(self.dim) {
            return Err(Error::Consistency(format!(
                "Atkin-Lehner matrix at {p} is not an involution"
            )));
        }
        Ok(out)
    }

    /// Sign of the Atkin-Lehner involution on an eigenform: +1 or -1, or
    /// an error if the form is not an eigenvector.
    pub fn atkin_lehner_sign(
        &self,
        field: &NumberField,
        coords: &[NfElem],
        p: i64,
    ) -> Result<i8> {
        let w = self.atkin_lehner(p)?;
        let lam = self.eigenvalue_of(field, coords, &w)?;
        match field.is_rational(&lam) {
            Some(r) if r == rat(1) => Ok(1),
            Some(r) if r == rat(-1) => Ok(-1),
            _ => Err(Error::Consistency(format!(
                "Atkin-Lehner eigenvalue at {p} is not a sign"
            ))),
        }
    }
}

/// One Galois family of eigenforms over its coefficient field.
struct Family {
    field: NumberField,
    coords: Vec<NfElem>,
    eigenvalues: BTreeMap<i64, NfElem>,
}

/// An eigenform together with one chosen real embedding of its field.
#[derive(Clone)]
pub struct Eigenform {
    pub field: NumberField,
    /// module coordinates over the field
    pub coords: Vec<NfElem>,
    /// Hecke eigenvalues at the splitting primes
    pub eigenvalues: BTreeMap<i64, NfElem>,
    /// isolating interval of the chosen real root of the field polynomial
    pub root: (Rat, Rat),
    pub root_index: usize,
}

impl Eigenform {
    /// Embedded eigenvalue at p as f64 (sorting and reporting).
    pub fn embed_eigenvalue(&self, p: i64, prec: u32) -> f64 {
        match self.eigenvalues.get(&p) {
            Some(e) => self.field.embed(e, &self.root, prec).to_f64(),
            None => f64::NAN,
        }
    }

    /// Embed an arbitrary field element at the chosen root.
    pub fn embed(&self, e: &NfElem, prec: u32) -> rug::Float {
        self.field.embed(e, &self.root, prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::order::build_order;
    use crate::quat::{maximal_order, QuatAlgebra};

    fn module(a: i64, b: i64, n: i64, eps: &[(i64, i8)], k: u32) -> BrandtModule {
        let alg = QuatAlgebra::from_ints(a, b).unwrap();
        let order = if eps.is_empty() {
            maximal_order(&alg).unwrap()
        } else {
            let map: BTreeMap<i64, i8> = eps.iter().cloned().collect();
            build_order(&alg, n, &map).unwrap()
        };
        let classes = ClassSet::build(&order).unwrap();
        BrandtModule::build(classes, k).unwrap()
    }

    #[test]
    fn level_11_weight_0_structure() {
        let m = module(-1, -11, 11, &[], 0);
        assert_eq!(m.dim, 2);
        assert_eq!(m.height_gram, vec![
            vec![ratio(1, 2), rat(0)],
            vec![rat(0), ratio(1, 3)],
        ]);
        // T_1 = identity
        assert_eq!(m.hecke(1).unwrap(), mat::identity(2));
        // T_2 has eigenvalues 3 (Eisenstein) and -2 (cusp form)
        let t2 = m.hecke(2).unwrap();
        let cp = mat::charpoly(&t2);
        assert_eq!(poly::eval(&cp, &rat(3)), rat(0));
        assert_eq!(poly::eval(&cp, &rat(-2)), rat(0));
        // Eisenstein vector is an eigenvector with eigenvalue sigma_1(m)
        let eis = m.eisenstein();
        let img = mat::mul_vec(&t2, &eis[0]);
        let expect: Vec<Rat> = eis[0].iter().map(|c| c * rat(3)).collect();
        assert_eq!(img, expect);
    }

    #[test]
    fn hecke_commute_self_adjoint_multiplicative() {
        let m = module(-1, -11, 11, &[], 0);
        let mut ts: BTreeMap<i64, Mat> = BTreeMap::new();
        for n in 1..=20i64 {
            ts.insert(n, m.hecke(n).unwrap());
        }
        // commutation
        for a in [2i64, 3, 5, 7] {
            for b in [2i64, 3, 5, 7] {
                assert_eq!(mat::mul(&ts[&a], &ts[&b]), mat::mul(&ts[&b], &ts[&a]));
            }
        }
        // self-adjoint for the height Gram: G T = T^t G
        for n in [2i64, 3, 5, 7, 13] {
            let gt = mat::mul(&m.height_gram, &ts[&n]);
            let ttg = mat::mul(&mat::transpose(&ts[&n]), &m.height_gram);
            assert_eq!(gt, ttg, "T_{n} self-adjointness");
        }
        // multiplicativity on coprime levels
        for (a, b) in [(2i64, 3i64), (2, 5), (3, 4), (2, 7), (3, 5), (4, 5)] {
            assert_eq!(
                ts[&(a * b)],
                mat::mul(&ts[&a], &ts[&b]),
                "T_{a} T_{b} = T_{}",
                a * b
            );
        }
        // prime power recursion T_{p^2} = T_p^2 - p^{1+2k} T_1 at k = 0
        for p in [2i64, 3] {
            let lhs = ts[&(p * p)].clone();
            let tp2 = mat::mul(&ts[&p], &ts[&p]);
            let mut rhs = tp2;
            for i in 0..m.dim {
                rhs[i][i] -= rat(p);
            }
            assert_eq!(lhs, rhs, "recursion at {p}");
        }
    }

    #[test]
    fn eigenvalue_table_matches_operators() {
        // the batched table must equal the per-operator eigenvalues, for
        // composite levels included: apply T_m to the eigenform and read
        // off the exact ratio at a nonzero coordinate
        let cases: &[(i64, i64, i64, &[(i64, i8)], u32, i64)] = &[
            (-1, -11, 11, &[], 0, 20),
            (-1, -11, 11, &[], 2, 10),
            (-1, -3, 27, &[(3, -1)], 0, 15),
        ];
        for &(a, b, n, eps, k, mmax) in cases {
            let m = module(a, b, n, eps, k);
            for e in m.eigenforms(12).unwrap() {
                let field = &e.field;
                let table = m.eigenvalue_table(&e, mmax).unwrap();
                assert_eq!(table[1], field.one());
                for lvl in 1..=mmax {
                    let t = m.hecke(lvl).unwrap();
                    // image coordinates of the eigenform under T_lvl
                    let pivot = e
                        .coords
                        .iter()
                        .position(|c| !field.is_zero(c))
                        .unwrap();
                    let mut img = field.zero();
                    for (j, c) in e.coords.iter().enumerate() {
                        if !t[pivot][j].is_zero() {
                            img = field.add(&img, &field.mul_rat(c, &t[pivot][j]));
                        }
                    }
                    let want = field.div(&img, &e.coords[pivot]).unwrap();
                    assert_eq!(
                        table[lvl as usize], want,
                        "N={n} k={k} level {lvl}"
                    );
                }
                // stored prime eigenvalues agree with the table
                for (p, ap) in &e.eigenvalues {
                    if *p <= mmax {
                        assert_eq!(table[*p as usize], *ap, "stored prime {p}");
                    }
                }
            }
        }
    }

    #[test]
    fn heights_agree_between_routes() {
        for k in [0u32, 2] {
            let m = module(-1, -11, 11, &[], k);
            let vecs: Vec<Vec<Rat>> = (0..m.dim)
                .map(|i| {
                    let mut v = vec![Rat::zero(); m.dim];
                    v[i] = Rat::one();
                    v
                })
                .collect();
            for a in &vecs {
                for b in &vecs {
                    assert_eq!(m.height(a, b), m.height_via_orbits(a, b).unwrap());
                }
            }
        }
    }

    #[test]
    fn level_11_weight_2_eigenforms() {
        let m = module(-1, -11, 11, &[], 2);
        assert_eq!(m.dim, 4);
        // all cuspidal at k > 0
        assert!(m.eisenstein().is_empty());
        assert_eq!(m.cuspidal().len(), 4);
        // traces of the weight-6 Hecke operators on the full cusp space
        let tr = |mm: &Mat| {
            let mut s = Rat::zero();
            for i in 0..mm.len() {
                s += &mm[i][i];
            }
            s
        };
        assert_eq!(tr(&m.hecke(2).unwrap()), rat(-4));
        assert_eq!(tr(&m.hecke(3).unwrap()), rat(19));
        let forms = m.eigenforms(12).unwrap();
        assert_eq!(forms.len(), 4);
        let rational: Vec<_> = forms.iter().filter(|f| f.field.degree() == 1).collect();
        let cubic: Vec<_> = forms.iter().filter(|f| f.field.degree() == 3).collect();
        assert_eq!(rational.len(), 1);
        assert_eq!(cubic.len(), 3);
        // the rational form is the weight-6 level-11 newform
        let a2 = &rational[0].eigenvalues[&2];
        assert_eq!(rational[0].field.is_rational(a2), Some(rat(-4)));
        let a3 = &rational[0].eigenvalues[&3];
        assert_eq!(rational[0].field.is_rational(a3), Some(rat(-15)));
        // the cubic family has a_2 generating x^3 - 90x + 188
        let modulus = cubic[0].field.modulus().clone();
        assert_eq!(modulus, vec![rat(188), rat(-90), rat(0), rat(1)]);
        // Ramanujan bound |a_p| <= 2 p^{(1+2k)/2} at p = 2, k = 2
        for f in &forms {
            let e = f.embed_eigenvalue(2, 96);
            assert!(e.abs() <= 2.0 * 32f64.sqrt() + 1e-9);
        }
        // prime power recursion T_4 = T_2^2 - 2^5 T_1 in weight 6
        let t2 = m.hecke(2).unwrap();
        let t4 = m.hecke(4).unwrap();
        let mut rhs = mat::mul(&t2, &t2);
        for i in 0..m.dim {
            rhs[i][i] -= rat(32);
        }
        assert_eq!(t4, rhs);
        // multiplicativity T_6 = T_2 T_3
        let t3 = m.hecke(3).unwrap();
        assert_eq!(m.hecke(6).unwrap(), mat::mul(&t2, &t3));
        // self-adjointness for the height Gram
        for t in [&t2, &t3] {
            assert_eq!(
                mat::mul(&m.height_gram, t),
                mat::mul(&mat::transpose(t), &m.height_gram)
            );
        }
    }

    #[test]
    fn level_27_weight_0_eigenform() {
        let m = module(-1, -3, 27, &[(3, -1)], 0);
        assert_eq!(m.dim, 2);
        let forms = m.eigenforms(13).unwrap();
        assert_eq!(forms.len(), 1);
        let f = &forms[0];
        let get = |p: i64| f.field.is_rational(&f.eigenvalues[&p]).unwrap();
        assert_eq!(get(2), rat(0));
        assert_eq!(get(7), rat(-1));
        assert_eq!(get(13), rat(5));
    }

    #[test]
    fn atkin_lehner_action() {
        // level 11, k = 0: involution, commutes with Hecke, fixes the
        // Eisenstein vector
        let m = module(-1, -11, 11, &[], 0);
        let w = m.atkin_lehner(11).unwrap();
        let t2 = m.hecke(2).unwrap();
        assert_eq!(mat::mul(&w, &t2), mat::mul(&t2, &w));
        let eis = m.eisenstein();
        assert_eq!(mat::mul_vec(&w, &eis[0]), eis[0]);
        // the k = 0 cusp form at level 11 has Atkin-Lehner sign +1
        let forms = m.eigenforms(7).unwrap();
        assert_eq!(forms.len(), 1);
        let f = &forms[0];
        assert_eq!(m.atkin_lehner_sign(&f.field, &f.coords, 11).unwrap(), 1);
        // and eigenvalue a_2 = -2
        assert_eq!(f.field.is_rational(&f.eigenvalues[&2]), Some(rat(-2)));
    }

    #[test]
    fn atkin_lehner_weight_2() {
        let m = module(-1, -11, 11, &[], 2);
        let w = m.atkin_lehner(11).unwrap();
        assert_eq!(mat::mul(&w, &w), mat::identity(m.dim));
        // signs: the rational weight-6 form has a_11 = -121, so its
        // Atkin-Lehner eigenvalue on g is +1 and the module action is -1;
        // the cubic family has a_11 = +121 and module action +1
        let forms = m.eigenforms(12).unwrap();
        for f in forms.iter() {
            let s = m.atkin_lehner_sign(&f.field, &f.coords, 11).unwrap();
            if f.field.degree() == 1 {
                assert_eq!(s, -1);
            } else {
                assert_eq!(s, 1);
            }
        }
    }
}
