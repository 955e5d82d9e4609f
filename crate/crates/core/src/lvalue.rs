//! Central values of the L-functions attached to Brandt eigenforms and
//! their quadratic twists, computed by a smoothed approximate functional
//! equation, and the ratio table comparing squared theta-lift coefficients
//! against those central values.
//!
//! Conventions. An eigenform of harmonic weight `k` corresponds to a
//! newform of classical weight `kappa = 2k + 2`. Coefficients are kept in
//! the classical arithmetic normalization (`a_1 = 1`, `|a_p| <= 2
//! p^{(kappa-1)/2}` at good primes); the analytically normalized Dirichlet
//! series `sum a_n n^{-(kappa-1)/2} n^{-s}` then has its functional
//! equation under `s <-> 1 - s`, and all central values reported here are
//! values of that series at `s = 1/2`.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use rug::float::Constant;
use rug::Float;

use crate::brandt::{BrandtModule, Eigenform};
use crate::error::{Error, Result};
use crate::exact::arith::{factor, is_fundamental_discriminant, kronecker};
use crate::exact::numberfield::{NfElem, NumberField};
use crate::exact::{rat, Int, Rat};
use crate::theta::{DiscPair, HalfIntegralForm};

/// A twist is treated as numerically zero below this; used to decide
/// whether a vanishing lift coefficient is matched by a vanishing L-value.
pub const L_ZERO_TOL: f64 = 1e-6;

/// Largest smoothing parameter used in the functional-equation self test.
const X_SHIFT: (u32, u32) = (5, 4);

/// Classical coefficient data of the newform attached to a Brandt
/// eigenform, with enough structure to evaluate twisted central values.
pub struct NewformData {
    /// level of the newform (the reduced discriminant of the order)
    pub level: i64,
    /// harmonic weight; the classical weight is 2k + 2
    pub k: u32,
    pub field: NumberField,
    /// isolating interval of the real embedding used for analytic work
    pub root: (Rat, Rat),
    /// classical coefficients a_1 .. a_bound; slot 0 is unused and zero
    pub coeffs: Vec<NfElem>,
    /// Atkin-Lehner sign of the newform at each prime dividing the level
    pub al_signs: BTreeMap<i64, i8>,
}

impl NewformData {
    /// Classical weight.
    pub fn kappa(&self) -> u32 {
        2 * self.k + 2
    }

    /// Index of the largest available coefficient.
    pub fn bound(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Sign of the functional equation of the untwisted L-function:
    /// (-1)^{kappa/2} times the product of the Atkin-Lehner signs.
    pub fn sign(&self) -> i8 {
        let mut s: i32 = if self.k % 2 == 0 { -1 } else { 1 };
        for v in self.al_signs.values() {
            s *= *v as i32;
        }
        s as i8
    }

    /// Sign of the functional equation of the twist by the quadratic
    /// character of fundamental discriminant `d < 0` coprime to the level:
    /// the untwisted sign times chi_d(-N).
    pub fn twisted_sign(&self, d: i64) -> i8 {
        // chi_d(-N) = chi_d(-1) chi_d(N), and chi_d(-1) = -1 for d < 0.
        let chi = -kronecker(d, self.level);
        (self.sign() as i32 * chi) as i8
    }
}

/// Build the classical coefficient table a_1 .. a_bound of the newform
/// attached to `e`: good-prime values from one batched pass over the
/// Brandt module, ramified primes from the Atkin-Lehner sign (v_p = 1:
/// a_p = -eps_p p^k; v_p >= 2: a_p = 0), and everything else by the Hecke
/// recursion and multiplicativity. Every coefficient coprime to the level
/// is checked against the Brandt table as it is produced.
pub fn coefficients(module: &BrandtModule, e: &Eigenform, bound: usize) -> Result<NewformData> {
    if bound < 1 {
        return Err(Error::InvalidInput("coefficient bound must be positive".into()));
    }
    let level = int_to_i64(&module.classes.order.reduced_discriminant())?;
    let k = module.space.k;
    let field = e.field.clone();

    let mut al_signs = BTreeMap::new();
    let mut ramified: BTreeMap<i64, NfElem> = BTreeMap::new();
    for (p, v) in factor(level) {
        let s = module.atkin_lehner_sign(&field, &e.coords, p)?;
        // the newform sign is the negative of the module sign
        al_signs.insert(p, -s);
        let ap = if v == 1 {
            field.from_rat(&(rat(s as i64) * rat(p).pow(k as i32)))
        } else {
            field.zero()
        };
        ramified.insert(p, ap);
    }

    let table = module.eigenvalue_table(e, bound as i64)?;

    let mut coeffs = vec![field.zero(); bound + 1];
    coeffs[1] = field.one();
    // smallest prime factor sieve
    let mut spf: Vec<usize> = (0..=bound).collect();
    let mut q = 2;
    while q * q <= bound {
        if spf[q] == q {
            let mut m = q * q;
            while m <= bound {
                if spf[m] == m {
                    spf[m] = q;
                }
                m += q;
            }
        }
        q += 1;
    }

    for n in 2..=bound {
        let p = spf[n];
        let mut pe = p;
        let mut m = n / p;
        while m % p == 0 {
            pe *= p;
            m /= p;
        }
        let an = if m > 1 {
            field.mul(&coeffs[pe], &coeffs[m])
        } else if pe == p {
            match ramified.get(&(p as i64)) {
                Some(ap) => ap.clone(),
                None => table[p].clone(),
            }
        } else if ramified.contains_key(&(p as i64)) {
            field.mul(&coeffs[pe / p], &coeffs[p])
        } else {
            // a_{p^e} = a_p a_{p^{e-1}} - p^{2k+1} a_{p^{e-2}}
            let scale = Rat::from(Int::from(p as i64).pow(2 * k + 1));
            let lead = field.mul(&coeffs[p], &coeffs[pe / p]);
            field.sub(&lead, &field.mul_rat(&coeffs[pe / (p * p)], &scale))
        };
        if level % (p as i64) != 0 && an != table[n] {
            return Err(Error::Consistency(format!(
                "coefficient a_{n} disagrees with the Brandt eigenvalue table"
            )));
        }
        coeffs[n] = an;
    }

    // refine the embedding interval once for all later analytic work
    let roots = field.real_embeddings(256);
    if roots.len() <= e.root_index {
        return Err(Error::Consistency("embedding index out of range".into()));
    }
    let root = roots[e.root_index].clone();

    Ok(NewformData { level, k, field, root, coeffs, al_signs })
}

/// Is `-d_abs` a fundamental discriminant whose quadratic character takes
/// the prescribed value at every prime of the level, with `d_abs` coprime
/// to twice the level? These are the discriminants whose twisted central
/// values the correspondence controls.
pub fn permitted(d_abs: i64, eps: &BTreeMap<i64, i8>, level: i64) -> bool {
    if d_abs <= 0 {
        return false;
    }
    let d = -d_abs;
    if !is_fundamental_discriminant(d) {
        return false;
    }
    if num_integer::gcd(d_abs, 2 * level) != 1 {
        return false;
    }
    eps.iter().all(|(p, e)| kronecker(d, *p) == *e as i32)
}

/// A computed central value with its accuracy certificate.
pub struct CentralValue {
    /// L(1/2) in the analytic normalization
    pub value: Float,
    /// sign of the functional equation used
    pub sign: i8,
    /// number of Dirichlet coefficients consumed
    pub terms: usize,
    /// rigorous bound on the truncation error
    pub tail_bound: f64,
}

/// How many classical coefficients a central value at conductor
/// `level * d^2`, `|d| <= d_bound`, will consume at the given accuracy.
pub fn coefficient_demand(level: i64, k: u32, d_bound: i64, eps_abs: f64) -> Result<usize> {
    let m = (level as f64) * (d_bound as f64) * (d_bound as f64);
    Ok(terms_needed(m, k + 1, eps_abs)?.0)
}

/// Central value L(1/2, g x chi_d) of the twist of the newform by the
/// quadratic character of fundamental discriminant `d < 0` coprime to
/// twice the level (`twist = 1` gives the untwisted value), by the
/// smoothed approximate functional equation with elementary incomplete
/// Gamma weights. The value is computed twice with different smoothing
/// parameters and the two results are required to agree within the stated
/// accuracy; `eps_abs` bounds the truncation error of the result.
pub fn central_value(
    nf: &NewformData,
    twist: i64,
    eps_abs: f64,
    prec: u32,
) -> Result<CentralValue> {
    if prec < 80 {
        return Err(Error::InvalidInput("precision below 80 bits".into()));
    }
    if !(eps_abs > 0.0) {
        return Err(Error::InvalidInput("accuracy must be positive".into()));
    }
    let (d, sign) = if twist == 1 {
        (1i64, nf.sign())
    } else {
        if twist >= 0
            || !is_fundamental_discriminant(twist)
            || num_integer::gcd(-twist, 2 * nf.level) != 1
        {
            return Err(Error::InvalidInput(format!(
                "twist {twist} is not a negative fundamental discriminant coprime to 2N"
            )));
        }
        (twist, nf.twisted_sign(twist))
    };
    let m = (nf.level as f64) * (d as f64) * (d as f64);
    let j = nf.k + 1;
    let (terms, tail_bound) = terms_needed(m, j, eps_abs)?;
    if nf.bound() < terms {
        return Err(Error::InvalidInput(format!(
            "need coefficients up to {terms}, have {}",
            nf.bound()
        )));
    }

    // x_n = 2 pi n / sqrt(M); precompute the step
    let pi = Float::with_val(prec, Constant::Pi);
    let sqrt_m = Float::with_val(prec, m).sqrt();
    let step = Float::with_val(prec, 2 * &pi) / &sqrt_m;

    // evaluate with smoothing X and with X = 1; both approximate the same
    // value, and their difference certifies the sign and conductor
    let mut values: Vec<Float> = Vec::new();
    for (num, den) in [(1u32, 1u32), X_SHIFT] {
        let x_shift = Float::with_val(prec, num) / Float::with_val(prec, den);
        let mut sum = Float::with_val(prec, 0);
        for n in 1..=terms {
            let chi = if d == 1 { 1 } else { kronecker(d, n as i64) };
            if chi == 0 {
                continue;
            }
            let an = nf.field.embed(&nf.coeffs[n], &nf.root, prec);
            if an.is_zero() {
                continue;
            }
            let x = Float::with_val(prec, &step * n);
            // L(1/2) = sum a_n chi(n) n^{-j} [Q_j(x/X) + eps Q_j(x X)]
            let lo = gamma_q(j, &(x.clone() / &x_shift));
            let hi = gamma_q(j, &(x * &x_shift));
            let mut w = lo;
            if sign > 0 {
                w += &hi;
            } else {
                w -= &hi;
            }
            let nj = Float::with_val(prec, (n as u64).pow(j));
            sum += an * chi * w / nj;
        }
        values.push(sum);
    }

    let resid = Float::with_val(prec, &values[0] - &values[1])
        .abs()
        .to_f64();
    if resid > 2.0 * eps_abs {
        return Err(Error::Consistency(format!(
            "functional equation self test failed: smoothing residual {resid:.3e}"
        )));
    }

    Ok(CentralValue { value: values.swap_remove(0), sign, terms, tail_bound })
}

/// Truncation length and rigorous tail bound for conductor `m` and Gamma
/// parameter `j`: past the cutoff every term is at most `4 e^{-x_n/(2X)}`
/// (using `|a_n| <= d(n) n^{(kappa-1)/2}` and `Q_j(x) <= e^{-x/2}` for
/// `x >= 40`, valid for j <= 5), so the tail is a geometric series.
fn terms_needed(m: f64, j: u32, eps_abs: f64) -> Result<(usize, f64)> {
    if j > 5 {
        return Err(Error::InvalidInput(
            "tail bound only established for harmonic weight at most 4".into(),
        ));
    }
    let pi = std::f64::consts::PI;
    let xmax = X_SHIFT.0 as f64 / X_SHIFT.1 as f64;
    let beta = pi / (xmax * m.sqrt());
    let q = (-beta).exp();
    // every tail term must sit in the dominated range x_n / X >= 40
    let thresh = (40.0 * xmax * m.sqrt() / (2.0 * pi)).ceil();
    // 4 q^{n+1} / (1 - q) <= eps_abs / 4
    let need = ((16.0 / (eps_abs * (1.0 - q))).ln() / beta).ceil();
    let n0 = thresh.max(need).max(16.0);
    if n0 > 1e8 {
        return Err(Error::InvalidInput("conductor too large for direct summation".into()));
    }
    let n0 = n0 as usize;
    let tail = 4.0 * (-beta * (n0 as f64 + 1.0)).exp() / (1.0 - q);
    Ok((n0, tail))
}

/// Normalized upper incomplete Gamma Q_j(x) = Gamma(j, x) / Gamma(j)
/// = e^{-x} sum_{i<j} x^i / i! for integer j >= 1.
fn gamma_q(j: u32, x: &Float) -> Float {
    let prec = x.prec();
    let mut term = Float::with_val(prec, 1);
    let mut sum = Float::with_val(prec, 1);
    for i in 1..j {
        term *= x;
        term /= i;
        sum += &term;
    }
    sum * Float::with_val(prec, -x.clone()).exp()
}

/// The elementary constants entering the explicit formula at a given level,
/// weight and discriminant pair: the level factor prod (p+1) p^{v-1}, the
/// weight factor c(k) from the Gegenbauer pairing, and the cusp norm N(a).
pub struct FormulaConstants {
    pub level_factor: Rat,
    pub weight_factor: Rat,
    pub cusp_factor: Rat,
}

pub fn constants(level: i64, k: u32, pair: &DiscPair) -> Result<FormulaConstants> {
    if level <= 0 {
        return Err(Error::InvalidInput("level must be positive".into()));
    }
    let mut level_factor = rat(1);
    for (p, v) in factor(level) {
        level_factor *= rat(p + 1) * rat(p).pow(v as i32 - 1);
    }
    Ok(FormulaConstants {
        level_factor,
        weight_factor: crate::harmonic::c_k(k),
        cusp_factor: pair.cusp.clone(),
    })
}

/// Height norm of an eigenform in its coefficient field: the height
/// pairing of the module coordinates with themselves.
pub fn eigenform_norm(module: &BrandtModule, e: &Eigenform) -> NfElem {
    let mut s = e.field.zero();
    for i in 0..module.dim {
        if e.field.is_zero(&e.coords[i]) {
            continue;
        }
        for j in 0..module.dim {
            let pq = e.field.mul(&e.coords[i], &e.coords[j]);
            s = e.field.add(&s, &e.field.mul_rat(&pq, &module.height_gram[i][j]));
        }
    }
    s
}

/// One row of the ratio table: a permitted discriminant pair, the lift
/// coefficient there, the central values of the base form and its twist,
/// and their ratio against the squared coefficient.
pub struct RatioRow {
    /// fundamental discriminant of the twist (negative)
    pub disc: i64,
    /// D of the pair, with D a^2 = |disc|
    pub value: i64,
    /// cusp scale a of the pair
    pub cusp: Rat,
    /// embedded lift coefficient lambda(D, a)
    pub lambda: f64,
    /// exact vanishing of the coefficient in the Hecke field
    pub lambda_zero: bool,
    /// L(1/2, g x chi_d)
    pub l_twist: f64,
    /// L_D(1/2, g) = L(1/2, g) L(1/2, g x chi_d)
    pub l_product: f64,
    /// L_D D^{k+1/2} / (N(a) lambda^2), when lambda != 0
    pub ratio: Option<f64>,
    /// exactly one of lambda, L_D vanishes; or a sign or
    /// nonnegativity check failed
    pub failure: bool,
}

/// The assembled verification table over all permitted fundamental
/// discriminants up to a bound.
pub struct WaldspurgerReport {
    pub level: i64,
    pub k: u32,
    /// untwisted central value L(1/2, g)
    pub l_base: f64,
    /// embedded height norm of the source eigenform
    pub phi_norm: f64,
    pub rows: Vec<RatioRow>,
    /// mean ratio over rows with nonvanishing coefficient
    pub fitted: f64,
    /// the fitted ratio times the eigenform norm: the constant of the
    /// absolute form of the formula, with the Petersson norm of the
    /// newform left inside it
    pub fitted_norm_product: f64,
    /// largest relative deviation of a ratio from the mean
    pub max_rel_dev: f64,
    /// number of rows flagged as failures
    pub failures: usize,
    /// largest number of Dirichlet coefficients consumed by one value
    pub terms: usize,
}

/// Tabulate, for every permitted fundamental discriminant `-D` with
/// `D <= d_bound`, the ratio of the twisted central value against the
/// squared theta-lift coefficient, normalized so the ratio is constant in
/// D. With `extended` set, each fundamental row is followed by companion
/// rows at the non-fundamental pairs (D t^2, 1/t), t = 2, 3, which must
/// produce the identical ratio. A row fails when exactly one of the
/// coefficient and the central value vanishes, or when a central value is
/// negative beyond tolerance.
pub fn waldspurger_report(
    nf: &NewformData,
    f: &HalfIntegralForm,
    phi_norm: &NfElem,
    d_bound: i64,
    extended: bool,
    eps_abs: f64,
    prec: u32,
) -> Result<WaldspurgerReport> {
    if f.level != 4 * nf.level || f.k != nf.k {
        return Err(Error::InvalidInput(
            "lift and newform belong to different spaces".into(),
        ));
    }
    if f.field.degree() != nf.field.degree() {
        return Err(Error::InvalidInput(
            "lift and newform coefficient fields disagree".into(),
        ));
    }
    if d_bound > f.bound {
        return Err(Error::InvalidInput(format!(
            "lift coefficients reach {}, need {d_bound}",
            f.bound
        )));
    }
    let phi_norm_emb = nf.field.embed(phi_norm, &nf.root, prec).to_f64();
    if !(phi_norm_emb > 0.0) {
        return Err(Error::Consistency(
            "eigenform height norm is not positive".into(),
        ));
    }

    let base = central_value(nf, 1, eps_abs, prec)?;
    let l_base = base.value.to_f64();
    let mut terms = base.terms;

    let mut rows: Vec<RatioRow> = Vec::new();
    for d_abs in 3..=d_bound {
        if !permitted(d_abs, &nf.al_signs, nf.level) {
            continue;
        }
        let cv = central_value(nf, -d_abs, eps_abs, prec)?;
        let l_twist = cv.value.to_f64();
        let l_product = l_base * l_twist;
        // the signs of the base and twisted functional equations cancel
        let sign_coherent = cv.sign as i32 * base.sign as i32 == 1;
        terms = terms.max(cv.terms);

        let mut pairs = vec![DiscPair::new(rat(d_abs), rat(1))];
        if extended {
            for t in [2i64, 3] {
                if d_abs * t * t <= f.bound {
                    pairs.push(DiscPair::new(
                        rat(d_abs * t * t),
                        Rat::new(Int::from(1), Int::from(t)),
                    ));
                }
            }
        }
        for pair in pairs {
            let lam = f.coefficient(&pair)?;
            let lambda_zero = nf.field.is_zero(&lam);
            let lambda = nf.field.embed(&lam, &nf.root, prec).to_f64();
            if !pair.value.is_integer() {
                return Err(Error::InvalidInput("pair with non-integral D".into()));
            }
            let value = int_to_i64(&pair.value.to_integer())?;
            let cusp_norm = rat_to_f64(&pair.cusp);
            let mut failure = l_twist < -L_ZERO_TOL || !sign_coherent;
            let ratio = if lambda_zero {
                if l_product.abs() > L_ZERO_TOL {
                    failure = true;
                }
                None
            } else {
                if l_product.abs() <= L_ZERO_TOL {
                    failure = true;
                }
                let dk = (value as f64).powf(nf.k as f64 + 0.5);
                Some(l_product * dk / (cusp_norm * lambda * lambda))
            };
            rows.push(RatioRow {
                disc: -d_abs,
                value,
                cusp: pair.cusp.clone(),
                lambda,
                lambda_zero,
                l_twist,
                l_product,
                ratio,
                failure,
            });
        }
    }

    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    let fitted = if ratios.is_empty() {
        0.0
    } else {
        ratios.iter().sum::<f64>() / ratios.len() as f64
    };
    let max_rel_dev = ratios
        .iter()
        .map(|r| (r - fitted).abs() / fitted.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    let failures = rows.iter().filter(|r| r.failure).count();

    Ok(WaldspurgerReport {
        level: nf.level,
        k: nf.k,
        l_base,
        phi_norm: phi_norm_emb,
        rows,
        fitted,
        fitted_norm_product: fitted * phi_norm_emb,
        max_rel_dev,
        failures,
        terms,
    })
}

fn int_to_i64(n: &Int) -> Result<i64> {
    n.to_i64()
        .ok_or_else(|| Error::InvalidInput("value exceeds machine range".into()))
}

fn rat_to_f64(r: &Rat) -> f64 {
    let num = r.numer().to_f64().unwrap_or(f64::NAN);
    let den = r.denom().to_f64().unwrap_or(f64::NAN);
    num / den
}
