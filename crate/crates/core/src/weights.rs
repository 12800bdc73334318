//! Weights on the permutohedral fan and on matroidal fans: flag-indexed
//! polynomial values, their balancing checks, zero-extension and products.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{LatticeVector, Polynomial};
use crate::braid::{self, Flag, FlagIndex, FlagJson};
use crate::error::{Error, Result};
use crate::fan::{DisplacementTable, Fan};
use crate::matroid::{Matroid, MatroidJson};

#[derive(Clone, Debug)]
pub enum Domain {
    Braid(usize),
    Matroid(Matroid),
}

/// Matroids compare by rank table; names are labels only.
impl PartialEq for Domain {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Domain::Braid(a), Domain::Braid(b)) => a == b,
            (Domain::Matroid(a), Domain::Matroid(b)) => a.rank_table() == b.rank_table(),
            _ => false,
        }
    }
}

impl Domain {
    pub fn n(&self) -> usize {
        match self {
            Domain::Braid(n) => *n,
            Domain::Matroid(m) => m.n(),
        }
    }

    /// The flags of the domain in canonical order.
    pub fn flags(&self) -> Result<Vec<Flag>> {
        match self {
            Domain::Braid(n) => braid::enumerate_flags(*n),
            Domain::Matroid(m) => m.flags_of_flats(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Domain::Braid(n) => format!("braid({n})"),
            Domain::Matroid(m) => format!("matroid({})", m.name().unwrap_or("unnamed")),
        }
    }
}

/// A function from the flags of a domain to polynomials, stored densely in
/// canonical flag order. All values carry the same indeterminates.
#[derive(Clone, Debug)]
pub struct Weight {
    domain: Domain,
    index: Arc<FlagIndex>,
    values: Vec<Polynomial>,
}

impl PartialEq for Weight {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain
            && self.values.len() == other.values.len()
            && self.values.iter().zip(&other.values).all(|(a, b)| (a - b).is_zero())
    }
}

fn common_ring(values: Vec<Polynomial>) -> Result<Vec<Polynomial>> {
    let mut names: Vec<String> = values.iter().flat_map(|p| p.strip_unused().vars().to_vec()).collect();
    names.sort();
    names.dedup();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    values.iter().map(|p| p.strip_unused().with_indeterminates(&refs)).collect()
}

impl Weight {
    /// Values in canonical flag order of the domain.
    pub fn new(domain: Domain, values: Vec<Polynomial>) -> Result<Self> {
        let index = Arc::new(FlagIndex::new(domain.flags()?));
        Self::with_index(domain, index, values)
    }

    fn with_index(domain: Domain, index: Arc<FlagIndex>, values: Vec<Polynomial>) -> Result<Self> {
        if values.len() != index.len() {
            return Err(Error::MissingValue(format!(
                "{} values given, {} has {} flags",
                values.len(),
                domain.describe(),
                index.len()
            )));
        }
        Ok(Self { domain, index, values: common_ring(values)? })
    }

    pub fn from_fn(domain: Domain, f: impl Fn(&Flag) -> Result<Polynomial> + Sync + Send) -> Result<Self> {
        let index = Arc::new(FlagIndex::new(domain.flags()?));
        let values = index.flags().par_iter().map(&f).collect::<Result<Vec<_>>>()?;
        Self::with_index(domain, index, values)
    }

    pub fn constant(domain: Domain, c: impl Into<BigInt>) -> Result<Self> {
        let index = Arc::new(FlagIndex::new(domain.flags()?));
        let values = vec![Polynomial::constant(c); index.len()];
        Self::with_index(domain, index, values)
    }

    /// The weight that is 1 on `flag` and 0 elsewhere.
    pub fn indicator(domain: Domain, flag: &Flag) -> Result<Self> {
        let mut w = Self::constant(domain, 0)?;
        let k = w.position(flag)?;
        w.values[k] = Polynomial::one();
        Ok(w)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn n(&self) -> usize {
        self.domain.n()
    }

    pub fn flags(&self) -> &[Flag] {
        self.index.flags()
    }

    pub fn values(&self) -> &[Polynomial] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The indeterminates shared by all values.
    pub fn value_ring(&self) -> Vec<String> {
        self.values.first().map(|p| p.vars().to_vec()).unwrap_or_default()
    }

    fn position(&self, f: &Flag) -> Result<usize> {
        self.index
            .get(f)
            .ok_or_else(|| Error::MissingValue(format!("{f} is not a flag of {}", self.domain.describe())))
    }

    pub fn value(&self, f: &Flag) -> Result<&Polynomial> {
        Ok(&self.values[self.position(f)?])
    }

    /// Applies `op` to every value.
    pub fn map(&self, op: impl Fn(&Polynomial) -> Polynomial + Sync + Send) -> Result<Self> {
        let values = self.values.par_iter().map(op).collect();
        Self::with_index(self.domain.clone(), self.index.clone(), values)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Polynomial::is_zero)
    }

    /// Values as machine integers, when every value is such a constant.
    pub fn as_i64(&self) -> Option<Vec<i64>> {
        self.values.iter().map(|p| p.as_constant().and_then(|c| c.to_i64())).collect()
    }

    pub fn to_json(&self) -> WeightJson {
        let domain = match &self.domain {
            Domain::Braid(n) => DomainJson::Braid { braid: *n },
            Domain::Matroid(m) => DomainJson::Matroid { matroid: m.to_json() },
        };
        let values = self
            .flags()
            .iter()
            .zip(&self.values)
            .map(|(f, v)| ValueJson { flag: FlagJson(f.to_json()), value: v.to_string() })
            .collect();
        WeightJson { domain, values }
    }

    /// Reads a weight. Every flag of the domain must be listed exactly once.
    pub fn from_json(j: &WeightJson) -> Result<Self> {
        let domain = match &j.domain {
            DomainJson::Braid { braid } => Domain::Braid(*braid),
            DomainJson::Matroid { matroid } => Domain::Matroid(matroid.build()?),
        };
        let index = Arc::new(FlagIndex::new(domain.flags()?));
        let mut slots: Vec<Option<Polynomial>> = vec![None; index.len()];
        for entry in &j.values {
            let f = entry.flag.resolve(domain.n())?;
            let k = index
                .get(&f)
                .ok_or_else(|| Error::MissingValue(format!("{f} is not a flag of {}", domain.describe())))?;
            if slots[k].is_some() {
                return Err(Error::Parse(format!("flag {f} listed twice")));
            }
            slots[k] = Some(Polynomial::parse(&entry.value)?);
        }
        let values = slots
            .into_iter()
            .enumerate()
            .map(|(k, v)| v.ok_or_else(|| Error::MissingValue(index.flags()[k].to_string())))
            .collect::<Result<Vec<_>>>()?;
        Self::with_index(domain, index, values)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(text)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainJson {
    Braid { braid: usize },
    Matroid { matroid: MatroidJson },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValueJson {
    pub flag: FlagJson,
    pub value: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightJson {
    pub domain: DomainJson,
    pub values: Vec<ValueJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairFailure {
    pub i: usize,
    pub j: usize,
    pub flag: FlagJson,
    pub residual: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightBalanceReport {
    pub pass: bool,
    pub relations_checked: usize,
    pub failures: Vec<PairFailure>,
}

fn alternating_sum(w: &Weight, flags: &[Flag]) -> Result<Polynomial> {
    let mut acc = Polynomial::zero();
    for f in flags {
        let v = w.value(f)?;
        acc = if f.len() % 2 == 0 { &acc + v } else { &acc - v };
    }
    Ok(acc)
}

/// Runs the relation `Σ_{S_ij(G)} (-1)^ℓ g - Σ_{S_ji(G)} (-1)^ℓ g` for
/// every unordered pair and every neutral flag `G` of `w`'s domain, with
/// refinements restricted to sets accepted by `admissible`.
fn balance_check(w: &Weight, admissible: &(dyn Fn(u32) -> bool + Sync)) -> Result<WeightBalanceReport> {
    let n = w.n();
    let jobs: Vec<(usize, usize, &Flag)> = (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .flat_map(|(i, j)| {
            w.flags().iter().filter(move |g| braid::is_ij_neutral(g, i, j)).map(move |g| (i, j, g))
        })
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(i, j, g)| {
            let (bi, bj) = (1u32 << (i - 1), 1u32 << (j - 1));
            let sij = braid::strict_refinements_by(g, &|h| h & bi != 0 && h & bj == 0 && admissible(h));
            let sji = braid::strict_refinements_by(g, &|h| h & bj != 0 && h & bi == 0 && admissible(h));
            let r = &alternating_sum(w, &sij)? - &alternating_sum(w, &sji)?;
            Ok((!r.is_zero()).then(|| PairFailure {
                i,
                j,
                flag: FlagJson(g.to_json()),
                residual: r.to_string(),
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let failures: Vec<PairFailure> = results.into_iter().flatten().collect();
    Ok(WeightBalanceReport { pass: failures.is_empty(), relations_checked: jobs.len(), failures })
}

/// Balancing on the permutohedral fan.
pub fn balance_check_braid(w: &Weight) -> Result<WeightBalanceReport> {
    match w.domain() {
        Domain::Braid(_) => balance_check(w, &|_| true),
        d => Err(Error::DomainMismatch(format!("expected a braid weight, got {}", d.describe()))),
    }
}

/// Balancing on the matroidal fan, refining only by flats.
pub fn balance_check_matroid(m: &Matroid, w: &Weight) -> Result<WeightBalanceReport> {
    match w.domain() {
        Domain::Matroid(wm) if wm.rank_table() == m.rank_table() => balance_check(w, &|h| m.is_flat(h)),
        d => Err(Error::DomainMismatch(format!("expected a weight on the flags of flats of M, got {}", d.describe()))),
    }
}

/// Extends a weight on the flags of flats of `m` by zero to all flags.
pub fn zero_extend(m: &Matroid, w: &Weight) -> Result<Weight> {
    match w.domain() {
        Domain::Matroid(wm) if wm.rank_table() == m.rank_table() => {}
        d => return Err(Error::DomainMismatch(format!("expected a weight on the flags of flats of M, got {}", d.describe()))),
    }
    let zero = Polynomial::zero().with_indeterminates(
        &w.value_ring().iter().map(String::as_str).collect::<Vec<_>>(),
    )?;
    Weight::from_fn(Domain::Braid(m.n()), |f| match w.index.get(f) {
        Some(k) => Ok(w.values[k].clone()),
        None => Ok(zero.clone()),
    })
}

/// The matroidal fan: cones are the flags of nonempty proper flats, in the
/// same order as the flags of a matroid-domain weight.
pub fn matroidal_fan(m: &Matroid) -> Result<Fan> {
    Fan::from_flags(m.n(), &m.flags_of_flats()?, false)
}

/// `v_i = 2^i`.
pub fn default_generic_vector(n: usize) -> LatticeVector {
    LatticeVector::new((1..=n).map(|i| BigInt::from(1u8) << i).collect())
}

/// Products of weights on the permutohedral fan for a fixed generic vector.
/// Building the engine does the feasibility work once.
pub struct ProductEngine {
    n: usize,
    fan: Fan,
    index: Arc<FlagIndex>,
    table: DisplacementTable,
    /// `(sigma, tau, gamma, sign)` for every contributing pair.
    terms: Vec<(usize, usize, usize, i8)>,
}

impl ProductEngine {
    /// `v` defaults to `2^i`; fails with [`Error::NotGeneric`].
    pub fn new(n: usize, v: Option<&LatticeVector>) -> Result<Self> {
        let fan = Fan::braid(n)?;
        let v = v.cloned().unwrap_or_else(|| default_generic_vector(n));
        let table = DisplacementTable::new(&fan, &v)?;
        let d = fan.rank();
        let terms = table
            .pairs()
            .iter()
            .map(|&(s, t)| {
                let gamma = fan.meet(s, t);
                let parity = fan.cone(s).len() + fan.cone(t).len() + d + fan.cone(gamma).len();
                (s, t, gamma, if parity % 2 == 0 { 1 } else { -1 })
            })
            .collect();
        let index = Arc::new(FlagIndex::new(braid::enumerate_flags(n)?));
        Ok(Self { n, fan, index, table, terms })
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn table(&self) -> &DisplacementTable {
        &self.table
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check(&self, w: &Weight) -> Result<()> {
        match w.domain() {
            Domain::Braid(n) if *n == self.n => Ok(()),
            d => Err(Error::DomainMismatch(format!("product needs braid({}) weights, got {}", self.n, d.describe()))),
        }
    }

    pub fn product(&self, g1: &Weight, g2: &Weight) -> Result<Weight> {
        self.check(g1)?;
        self.check(g2)?;
        let values = match (g1.as_i64(), g2.as_i64()) {
            (Some(a), Some(b)) => self.product_i64(&a, &b),
            _ => self.table.product_all(&self.fan, &g1.values, &g2.values)?,
        };
        Weight::with_index(Domain::Braid(self.n), self.index.clone(), values)
    }

    fn product_i64(&self, a: &[i64], b: &[i64]) -> Vec<Polynomial> {
        let mut acc = vec![BigInt::zero(); a.len()];
        let mut small = vec![0i128; a.len()];
        for &(s, t, gamma, sign) in &self.terms {
            match (a[s] as i128).checked_mul(b[t] as i128).and_then(|p| small[gamma].checked_add(sign as i128 * p)) {
                Some(x) => small[gamma] = x,
                None => {
                    acc[gamma] += BigInt::from(small[gamma]) + BigInt::from(sign) * BigInt::from(a[s]) * BigInt::from(b[t]);
                    small[gamma] = 0;
                }
            }
        }
        acc.into_iter().zip(small).map(|(x, s)| Polynomial::constant(x + BigInt::from(s))).collect()
    }
}

/// The product of two weights on the permutohedral fan; `v` defaults to
/// `2^i`.
pub fn product(g1: &Weight, g2: &Weight, v: Option<&LatticeVector>) -> Result<Weight> {
    let n = g1.n();
    ProductEngine::new(n, v)?.product(g1, g2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn braid_ones(n: usize) -> Weight {
        Weight::constant(Domain::Braid(n), 1).unwrap()
    }

    #[test]
    fn constant_weight_balanced() {
        for n in 2..=4 {
            let r = balance_check_braid(&braid_ones(n)).unwrap();
            assert!(r.pass, "n = {n}");
            assert!(r.relations_checked > 0);
        }
    }

    #[test]
    fn single_flag_indicator_fails() {
        let d = Domain::Braid(3);
        let top = Flag::from_elements(3, &[vec![1], vec![1, 2]]).unwrap();
        let r = balance_check_braid(&Weight::indicator(d, &top).unwrap()).unwrap();
        assert!(!r.pass);
        assert!(r.failures.iter().all(|f| !f.residual.is_empty()));
    }

    #[test]
    fn matroid_all_ones() {
        let m = Matroid::uniform(2, 4).unwrap();
        let w = Weight::constant(Domain::Matroid(m.clone()), 1).unwrap();
        assert!(balance_check_matroid(&m, &w).unwrap().pass);
        let m3 = Matroid::uniform(2, 3).unwrap();
        let top = Flag::from_elements(3, &[vec![1]]).unwrap();
        let ind = Weight::indicator(Domain::Matroid(m3.clone()), &top).unwrap();
        assert!(!balance_check_matroid(&m3, &ind).unwrap().pass);
        assert!(balance_check_braid(&w).is_err());
        assert!(balance_check_matroid(&m3, &w).is_err());
    }

    #[test]
    fn zero_extension() {
        let m = Matroid::uniform(2, 3).unwrap();
        let w = Weight::constant(Domain::Matroid(m.clone()), 1).unwrap();
        let z = zero_extend(&m, &w).unwrap();
        assert_eq!(z.len(), 13);
        let ones = z.values().iter().filter(|v| v.as_constant() == Some(BigInt::from(1))).count();
        assert_eq!(ones, 4);
        assert!(balance_check_braid(&z).unwrap().pass);
        let boolean = Matroid::uniform(3, 3).unwrap();
        let b = Weight::constant(Domain::Matroid(boolean.clone()), 1).unwrap();
        assert_eq!(zero_extend(&boolean, &b).unwrap(), braid_ones(3));
        let zero = Weight::constant(Domain::Matroid(m.clone()), 0).unwrap();
        assert!(zero_extend(&m, &zero).unwrap().is_zero());
    }

    #[test]
    fn unit_law_and_symmetry() {
        let one = braid_ones(3);
        let y = Polynomial::var("y");
        let g = Weight::from_fn(Domain::Braid(3), |f| Ok(&y + &Polynomial::constant(f.len() as i64))).unwrap();
        let p = product(&g, &one, None).unwrap();
        assert_eq!(p, g);
        assert_eq!(product(&one, &g, None).unwrap(), g);
        assert_eq!(product(&one, &one, None).unwrap(), one);
    }

    #[test]
    fn non_generic_rejected() {
        let one = braid_ones(3);
        let v = LatticeVector::from_i64(&[1, 2, 3]);
        assert!(matches!(product(&one, &one, Some(&v)), Err(Error::NotGeneric(_))));
        assert!(product(&one, &braid_ones(4), None).is_err());
    }

    #[test]
    fn json_round_trip() {
        let y = Polynomial::var("y");
        let g = Weight::from_fn(Domain::Braid(3), |f| Ok(y.pow(f.len() as u32))).unwrap();
        let text = serde_json::to_string(&g.to_json()).unwrap();
        assert!(text.starts_with(r#"{"domain":{"braid":3},"values":[{"flag":[],"value":"1"}"#), "{text}");
        assert_eq!(Weight::parse(&text).unwrap(), g);
        let m = Matroid::uniform(2, 3).unwrap();
        let w = Weight::constant(Domain::Matroid(m), 1).unwrap();
        let back = Weight::parse(&serde_json::to_string(&w.to_json()).unwrap()).unwrap();
        assert_eq!(back, w);
        let missing = r#"{"domain":{"braid":2},"values":[{"flag":[],"value":"1"}]}"#;
        assert!(matches!(Weight::parse(missing), Err(Error::MissingValue(_))));
    }

    #[test]
    fn value_lookup_errors() {
        let m = Matroid::uniform(2, 3).unwrap();
        let w = Weight::constant(Domain::Matroid(m), 1).unwrap();
        let nonflat = Flag::from_elements(3, &[vec![1, 2]]).unwrap();
        assert!(matches!(w.value(&nonflat), Err(Error::MissingValue(_))));
    }

    #[test]
    fn matroidal_fan_shape() {
        let m = Matroid::uniform(2, 4).unwrap();
        let f = matroidal_fan(&m).unwrap();
        assert_eq!(f.num_cones(), 5);
        assert_eq!(f.dim(), 1);
        assert!(!f.is_complete());
    }
}
