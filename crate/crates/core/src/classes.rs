//! Characteristic-class weights of matroids and the identities relating
//! them to characteristic and Tutte polynomials.

use num_bigint::BigInt;
use serde::Serialize;

use crate::algebra::{LatticeVector, Polynomial};
use crate::braid::{self, Flag};
use crate::error::{Error, Result};
use crate::fan::{minkowski_balancing_check, MinkowskiReport};
use crate::matroid::{Matroid, MinorEvaluator};
use crate::weights::{matroidal_fan, Domain, ProductEngine, Weight};

fn require_loopless(m: &Matroid) -> Result<()> {
    match m.loop_count() {
        0 => Ok(()),
        k => Err(Error::Loops(k)),
    }
}

fn minus_one_minus_y() -> Polynomial {
    Polynomial::univariate("y", &[-1, -1])
}

fn neg_y() -> Polynomial {
    Polynomial::univariate("y", &[0, -1])
}

/// `g^D(F) = (-1-y)^ℓ(F) ∏ χ̄_minor(-y)` on the flags of flats.
pub fn mcy_dual_weight(m: &Matroid) -> Result<Weight> {
    require_loopless(m)?;
    let ev = MinorEvaluator::new(m, |minor| Ok(minor.reduced_char_poly()?.substitute("t", &neg_y())));
    let base = minus_one_minus_y();
    Weight::from_fn(Domain::Matroid(m.clone()), |f| Ok(&base.pow(f.len() as u32) * &ev.eval(f)?))
}

/// `(-1)^(r-1-k) ∏ β(minor)` on flags of flats of length `k`, zero on the
/// other flags.
pub fn csm_weight(m: &Matroid, k: usize) -> Result<Weight> {
    require_loopless(m)?;
    let r = m.rank();
    if r == 0 || k > r - 1 {
        return Err(Error::Precondition(format!("need 0 <= k <= {} for rank {r}, got {k}", r as i64 - 1)));
    }
    let ev = MinorEvaluator::new(m, |minor| Ok(Polynomial::constant(minor.beta()?)));
    let sign = BigInt::from(if (r - 1 - k) % 2 == 0 { 1 } else { -1 });
    Weight::from_fn(Domain::Matroid(m.clone()), |f| {
        if f.len() == k {
            Ok(ev.eval(f)?.scale(&sign))
        } else {
            Ok(Polynomial::zero())
        }
    })
}

/// Codimension-one balancing of `csm_k` on the matroidal fan.
pub fn csm_balancing_check(m: &Matroid, k: usize) -> Result<MinkowskiReport> {
    let w = csm_weight(m, k)?;
    let fan = matroidal_fan(m)?;
    minkowski_balancing_check(&fan, w.values(), m.rank() - 1 - k)
}

fn braid_minor_weight(
    m: &Matroid,
    phi: impl Fn(&Matroid) -> Result<Polynomial> + Send + Sync,
) -> Result<Weight> {
    let ev = MinorEvaluator::new(m, phi);
    Weight::from_fn(Domain::Braid(m.n()), |f| ev.eval(f))
}

/// `F ↦ u^r T(1+1/u, 1+v)[F]`, through the subset expansion per minor.
pub fn taut_weight(m: &Matroid) -> Result<Weight> {
    braid_minor_weight(m, |minor| Ok(minor.rank_generating_poly()))
}

/// `F ↦ I(u)[F]`, the independence polynomials of the minors.
pub fn sub_weight(m: &Matroid) -> Result<Weight> {
    braid_minor_weight(m, |minor| Ok(minor.independence_poly()))
}

/// `F ↦ (1+v)^loop[F]`.
pub fn quot_weight(m: &Matroid) -> Result<Weight> {
    let one_plus_v = Polynomial::univariate("v", &[1, 1]);
    braid_minor_weight(m, move |minor| Ok(one_plus_v.pow(minor.loop_count() as u32)))
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub matroid: String,
    pub lhs: String,
    pub rhs: String,
    pub difference: String,
    pub pass: bool,
}

impl IdentityReport {
    fn new(identity: impl Into<String>, m: &Matroid, lhs: &Polynomial, rhs: &Polynomial) -> Self {
        let diff = lhs - rhs;
        Self {
            identity: identity.into(),
            matroid: label(m),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            difference: diff.to_string(),
            pass: diff.is_zero(),
        }
    }
}

pub fn label(m: &Matroid) -> String {
    m.name().map(str::to_string).unwrap_or_else(|| format!("matroid on {} elements", m.n()))
}

/// Compares the displaced double sum of `I(u)[F] (1+v)^loop[G]` over flag
/// pairs with trivial common face against `Σ_A u^r(A) v^(|A|-r(A))`.
/// `w` defaults to `2^i`.
pub fn verify_tutte_identity(m: &Matroid, w: Option<&LatticeVector>) -> Result<IdentityReport> {
    require_loopless(m)?;
    if m.n() == 1 {
        // the fan of [1] is the origin alone
        return Ok(IdentityReport::new("tutte-identity", m, &m.independence_poly(), &m.rank_generating_poly()));
    }
    tutte_identity_with(m, &ProductEngine::new(m.n(), w)?)
}

/// [`verify_tutte_identity`] reusing the displacement data of `engine`.
pub fn tutte_identity_with(m: &Matroid, engine: &ProductEngine) -> Result<IdentityReport> {
    require_loopless(m)?;
    if engine.n() != m.n() {
        return Err(Error::DomainMismatch(format!("engine for [{}], matroid on [{}]", engine.n(), m.n())));
    }
    let sub = sub_weight(m)?;
    let quot = quot_weight(m)?;
    let lhs = engine.table().product_at(engine.fan(), sub.values(), quot.values(), 0)?;
    Ok(IdentityReport::new("tutte-identity", m, &lhs, &m.rank_generating_poly()))
}

fn check_element(m: &Matroid, i: usize) -> Result<()> {
    if i == 0 || i > m.n() {
        return Err(Error::Precondition(format!("element {i} not in [1, {}]", m.n())));
    }
    Ok(())
}

fn char_poly_along(m: &Matroid, f: &Flag) -> Result<Polynomial> {
    let mut acc = Polynomial::one();
    for (lo, hi) in f.intervals() {
        acc = &acc * &m.interval_minor(lo, hi)?.char_poly();
    }
    Ok(acc)
}

/// Flags of nonempty proper flats all of whose members pass `keep`, the
/// empty flag included.
fn flat_chains(m: &Matroid, keep: impl Fn(u32) -> bool) -> Vec<Flag> {
    braid::enumerate_chains(m.n(), &|s| keep(s) && m.is_flat(s))
}

fn alternating_char_sum(m: &Matroid, flags: &[Flag]) -> Result<Polynomial> {
    let mut acc = Polynomial::zero();
    for f in flags {
        let c = char_poly_along(m, f)?;
        acc = if f.len() % 2 == 0 { &acc + &c } else { &acc - &c };
    }
    Ok(acc)
}

/// `χ̄_M(t) = Σ_{F ∋ i} (-1)^(rk F - 1) β(M|F) χ_{M/F}(t)` over flats
/// containing `i`, including the ground set.
pub fn pointed_convolution_check(m: &Matroid, i: usize) -> Result<IdentityReport> {
    require_loopless(m)?;
    check_element(m, i)?;
    let lhs = m.reduced_char_poly()?;
    let mut rhs = Polynomial::zero();
    for f in m.flats().into_iter().filter(|f| f >> (i - 1) & 1 == 1) {
        let restriction = m.restrict(f)?;
        let sign = if restriction.rank() % 2 == 1 { 1 } else { -1 };
        let coeff = restriction.beta()? * BigInt::from(sign);
        rhs = &rhs + &m.contract(f)?.char_poly().scale(&coeff);
    }
    Ok(IdentityReport::new(format!("pointed-convolution(i={i})"), m, &lhs, &rhs))
}

/// `Σ_F (-1)^ℓ(F) χ(t)[F] = (-1)^(r-1) β (t - 1)` over flags of flats whose
/// members all contain `i`, the empty flag included.
pub fn psi_formula_check(m: &Matroid, i: usize) -> Result<IdentityReport> {
    require_loopless(m)?;
    check_element(m, i)?;
    let bi = 1u32 << (i - 1);
    let lhs = alternating_char_sum(m, &flat_chains(m, |s| s & bi != 0))?;
    let sign = if m.rank() % 2 == 1 { 1 } else { -1 };
    let rhs = Polynomial::univariate("t", &[-1, 1]).scale(&(m.beta()? * BigInt::from(sign)));
    Ok(IdentityReport::new(format!("psi-formula(i={i})"), m, &lhs, &rhs))
}

/// `A_ij = Σ_{F ≠ ∅} (-1)^ℓ(F) χ(t)[F]` over nonempty flags of flats whose
/// members all contain `i` and avoid `j`.
pub fn a_ij(m: &Matroid, i: usize, j: usize) -> Result<Polynomial> {
    require_loopless(m)?;
    check_element(m, i)?;
    check_element(m, j)?;
    if i == j {
        return Err(Error::Precondition(format!("need i != j, got {i} twice")));
    }
    let (bi, bj) = (1u32 << (i - 1), 1u32 << (j - 1));
    let flags: Vec<Flag> = flat_chains(m, |s| s & bi != 0 && s & bj == 0)
        .into_iter()
        .filter(|f| !f.is_empty())
        .collect();
    alternating_char_sum(m, &flags)
}

pub fn aij_symmetry_check(m: &Matroid, i: usize, j: usize) -> Result<IdentityReport> {
    let lhs = a_ij(m, i, j)?;
    let rhs = a_ij(m, j, i)?;
    Ok(IdentityReport::new(format!("aij-symmetry(i={i},j={j})"), m, &lhs, &rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::catalog;
    use crate::weights::{balance_check_braid, balance_check_matroid};

    fn p(s: &str) -> Polynomial {
        Polynomial::parse(s).unwrap()
    }

    fn flag(n: usize, sets: &[&[usize]]) -> Flag {
        Flag::from_elements(n, &sets.iter().map(|s| s.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn same(a: &Polynomial, b: &Polynomial) -> bool {
        (a - b).is_zero()
    }

    #[test]
    fn mcy_values() {
        let m = Matroid::uniform(2, 3).unwrap();
        let g = mcy_dual_weight(&m).unwrap();
        assert!(same(g.value(&Flag::empty(3)).unwrap(), &p("-y - 2")));
        assert!(same(g.value(&flag(3, &[&[1]])).unwrap(), &p("-1 - y")));
        let r1 = Matroid::uniform(1, 3).unwrap();
        assert!(same(mcy_dual_weight(&r1).unwrap().value(&Flag::empty(3)).unwrap(), &p("1")));
        assert!(balance_check_matroid(&m, &g).unwrap().pass);
    }

    #[test]
    fn mcy_matches_single_division() {
        // χ(-y)[F] / (-1-y), computed with one exact division per flag
        let m = catalog("k4").unwrap();
        let g = mcy_dual_weight(&m).unwrap();
        for (f, v) in g.flags().iter().zip(g.values()) {
            let chi = char_poly_along(&m, f).unwrap().substitute("t", &neg_y());
            assert!(same(v, &chi.exact_div(&minus_one_minus_y()).unwrap()), "{f}");
        }
    }

    #[test]
    fn csm_values() {
        let m = Matroid::uniform(2, 3).unwrap();
        assert!(same(csm_weight(&m, 0).unwrap().value(&Flag::empty(3)).unwrap(), &p("-1")));
        assert!(same(csm_weight(&m, 1).unwrap().value(&flag(3, &[&[1]])).unwrap(), &p("1")));
        assert!(csm_weight(&m, 2).is_err());
        let k4 = catalog("k4").unwrap();
        let top = csm_weight(&k4, 2).unwrap();
        for (f, v) in top.flags().iter().zip(top.values()) {
            let expected = if f.len() == 2 { 1 } else { 0 };
            assert_eq!(v.as_constant(), Some(BigInt::from(expected)), "{f}");
        }
    }

    #[test]
    fn csm_is_y_minus_one_limit_of_mcy() {
        let m = catalog("fano").unwrap();
        let ev = MinorEvaluator::new(&m, |minor| Ok(minor.reduced_char_poly()?.substitute("t", &neg_y())));
        for k in 0..m.rank() {
            let c = csm_weight(&m, k).unwrap();
            for (f, v) in c.flags().iter().zip(c.values()).filter(|(f, _)| f.len() == k) {
                assert!(same(v, &ev.eval(f).unwrap().evaluate("y", -1)), "{f}");
            }
        }
    }

    #[test]
    fn csm_balanced_small() {
        let m = Matroid::uniform(3, 4).unwrap();
        for k in 0..3 {
            assert!(csm_balancing_check(&m, k).unwrap().pass, "k = {k}");
        }
    }

    #[test]
    fn taut_examples() {
        let m = Matroid::uniform(1, 2).unwrap();
        assert!(same(taut_weight(&m).unwrap().value(&Flag::empty(2)).unwrap(), &p("1 + 2*u + u*v")));
        let m = Matroid::uniform(2, 3).unwrap();
        let taut = taut_weight(&m).unwrap();
        let sub = sub_weight(&m).unwrap();
        let quot = quot_weight(&m).unwrap();
        for ((a, b), c) in taut.values().iter().zip(sub.values()).zip(quot.values()) {
            assert!(same(&a.evaluate("v", 0), b));
            assert!(same(&a.evaluate("u", 0), c));
        }
        for (f, v) in quot.flags().iter().zip(quot.values()) {
            if m.is_flag_of_flats(f) {
                assert!(same(v, &p("1")), "{f}");
            }
        }
        assert!(balance_check_braid(&taut).unwrap().pass);
    }

    #[test]
    fn tutte_identity_small() {
        for m in [Matroid::uniform(1, 2).unwrap(), Matroid::uniform(2, 3).unwrap(), Matroid::uniform(1, 1).unwrap()] {
            let r = verify_tutte_identity(&m, None).unwrap();
            assert!(r.pass, "{r:?}");
        }
        let r = verify_tutte_identity(&Matroid::uniform(1, 2).unwrap(), Some(&LatticeVector::from_i64(&[2, 4]))).unwrap();
        assert!(same(&p(&r.lhs), &p("1 + 2*u + u*v")));
        let bad = verify_tutte_identity(&Matroid::uniform(2, 3).unwrap(), Some(&LatticeVector::from_i64(&[1, 2, 3])));
        assert!(matches!(bad, Err(Error::NotGeneric(_))));
    }

    #[test]
    fn lemma_examples() {
        let r1 = Matroid::uniform(1, 1).unwrap();
        let r = psi_formula_check(&r1, 1).unwrap();
        assert!(r.pass && same(&p(&r.lhs), &p("t - 1")));
        let u23 = Matroid::uniform(2, 3).unwrap();
        let r = pointed_convolution_check(&u23, 1).unwrap();
        assert!(r.pass && same(&p(&r.rhs), &p("t - 2")), "{r:?}");
        let fano = catalog("fano").unwrap();
        for i in 1..=7 {
            assert!(pointed_convolution_check(&fano, i).unwrap().pass);
            assert!(psi_formula_check(&fano, i).unwrap().pass);
            for j in i + 1..=7 {
                assert!(aij_symmetry_check(&fano, i, j).unwrap().pass);
            }
        }
        assert!(aij_symmetry_check(&fano, 1, 1).is_err());
        assert!(psi_formula_check(&fano, 8).is_err());
    }

    #[test]
    fn loops_rejected() {
        let m = Matroid::from_rank_table(2, vec![0, 0, 1, 1]).unwrap();
        assert!(matches!(mcy_dual_weight(&m), Err(Error::Loops(1))));
        assert!(matches!(csm_weight(&m, 0), Err(Error::Loops(1))));
    }
}
