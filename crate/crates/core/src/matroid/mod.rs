//! Matroids on `[n]` stored by their full rank table.

mod catalog;

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::algebra::Polynomial;
use crate::braid::{self, elements, full_set, Flag};
use crate::error::{Error, Result};

pub use catalog::{all_loopless_matroids, catalog, catalog_names, MatroidJson};

pub const DEFAULT_MATROID_CAP: usize = 12;
pub const MATROID_HARD_CAP: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matroid {
    n: usize,
    rank: Vec<u8>,
    name: Option<String>,
}

/// Maps a subset of the ground set `g` to a subset of `[|g|]`, keeping order.
pub fn compress(s: u32, g: u32) -> u32 {
    let mut out = 0;
    let mut k = 0;
    for i in 0..32 {
        if g >> i & 1 == 1 {
            if s >> i & 1 == 1 {
                out |= 1 << k;
            }
            k += 1;
        }
    }
    out
}

/// Inverse of [`compress`].
pub fn expand(s: u32, g: u32) -> u32 {
    let mut out = 0;
    let mut k = 0;
    for i in 0..32 {
        if g >> i & 1 == 1 {
            if s >> k & 1 == 1 {
                out |= 1 << i;
            }
            k += 1;
        }
    }
    out
}

impl Matroid {
    /// Validates the rank axioms exhaustively.
    pub fn from_rank_table(n: usize, rank: Vec<u8>) -> Result<Self> {
        if n > MATROID_HARD_CAP {
            return Err(Error::CapExceeded { requested: n, cap: MATROID_HARD_CAP });
        }
        if rank.len() != 1 << n {
            return Err(Error::MatroidAxiom(format!("rank table has {} entries, expected {}", rank.len(), 1usize << n)));
        }
        let m = Self { n, rank, name: None };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        if self.rank[0] != 0 {
            return Err(Error::MatroidAxiom("r({}) != 0".into()));
        }
        let full = full_set(self.n);
        for s in 0..=full {
            let rs = self.rank[s as usize];
            for e in 0..self.n {
                let be = 1u32 << e;
                if s & be != 0 {
                    continue;
                }
                let re = self.rank[(s | be) as usize];
                if re < rs || re > rs + 1 {
                    return Err(Error::MatroidAxiom(format!(
                        "r(S + e) - r(S) not in {{0, 1}} for S = {:?}, e = {}",
                        elements(s),
                        e + 1
                    )));
                }
                for f in e + 1..self.n {
                    let bf = 1u32 << f;
                    if s & bf != 0 {
                        continue;
                    }
                    let rf = self.rank[(s | bf) as usize];
                    let ref_ = self.rank[(s | be | bf) as usize];
                    if (re as u16 + rf as u16) < (ref_ as u16 + rs as u16) {
                        return Err(Error::MatroidAxiom(format!(
                            "submodularity r(S+e) + r(S+f) >= r(S+e+f) + r(S) fails for S = {:?}, e = {}, f = {}",
                            elements(s),
                            e + 1,
                            f + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Bases as bitmasks over `[n]` (bit `i - 1` for element `i`).
    pub fn from_bases(n: usize, bases: &[u32]) -> Result<Self> {
        if n > MATROID_HARD_CAP {
            return Err(Error::CapExceeded { requested: n, cap: MATROID_HARD_CAP });
        }
        let Some(&first) = bases.first() else {
            return Err(Error::MatroidAxiom("no bases given".into()));
        };
        let r = first.count_ones();
        let full = full_set(n);
        for &b in bases {
            if b & !full != 0 {
                return Err(Error::MatroidAxiom(format!("basis {:?} is not a subset of [{n}]", elements(b))));
            }
            if b.count_ones() != r {
                return Err(Error::MatroidAxiom(format!(
                    "bases {:?} and {:?} differ in size",
                    elements(first),
                    elements(b)
                )));
            }
        }
        let size = 1usize << n;
        let mut indep = vec![false; size];
        for &b in bases {
            indep[b as usize] = true;
        }
        for s in (0..size).rev() {
            if indep[s] {
                continue;
            }
            indep[s] = (0..n).any(|e| s >> e & 1 == 0 && indep[s | 1 << e]);
        }
        let mut rank = vec![0u8; size];
        for s in 1..size {
            rank[s] = if indep[s] {
                (s as u32).count_ones() as u8
            } else {
                (0..n).filter(|e| s >> e & 1 == 1).map(|e| rank[s & !(1 << e)]).max().unwrap_or(0)
            };
        }
        let m = Self { n, rank, name: None };
        m.validate()?;
        let mut given: Vec<u32> = bases.to_vec();
        given.sort_unstable();
        given.dedup();
        let derived = m.bases();
        if given != derived {
            let extra = derived.iter().find(|b| given.binary_search(b).is_err());
            return Err(Error::MatroidAxiom(match extra {
                Some(b) => format!("basis exchange fails: {:?} is forced to be a basis", elements(*b)),
                None => "basis exchange fails".into(),
            }));
        }
        Ok(m)
    }

    pub fn uniform(r: usize, n: usize) -> Result<Self> {
        if r > n {
            return Err(Error::Precondition(format!("U_{{{r},{n}}} needs r <= n")));
        }
        if n > MATROID_HARD_CAP {
            return Err(Error::CapExceeded { requested: n, cap: MATROID_HARD_CAP });
        }
        let rank = (0..1u32 << n).map(|s| (s.count_ones() as usize).min(r) as u8).collect();
        Ok(Self { n, rank, name: Some(format!("U({r},{n})")) })
    }

    /// Cycle matroid of a multigraph; element `k + 1` is edge `k`.
    pub fn from_graph(edges: &[(usize, usize)]) -> Result<Self> {
        let n = edges.len();
        if n > MATROID_HARD_CAP {
            return Err(Error::CapExceeded { requested: n, cap: MATROID_HARD_CAP });
        }
        let mut verts: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
        verts.sort_unstable();
        verts.dedup();
        let idx: HashMap<usize, usize> = verts.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        let es: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (idx[&a], idx[&b])).collect();
        let mut rank = vec![0u8; 1 << n];
        let mut parent = vec![0usize; verts.len()];
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for s in 1..1usize << n {
            for (k, p) in parent.iter_mut().enumerate() {
                *p = k;
            }
            let mut r = 0;
            for (k, &(a, b)) in es.iter().enumerate() {
                if s >> k & 1 == 1 {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    if ra != rb {
                        parent[ra] = rb;
                        r += 1;
                    }
                }
            }
            rank[s] = r;
        }
        Ok(Self { n, rank, name: None })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ground(&self) -> u32 {
        full_set(self.n)
    }

    pub fn rank(&self) -> usize {
        self.rank[self.ground() as usize] as usize
    }

    pub fn rank_of(&self, s: u32) -> usize {
        self.rank[s as usize] as usize
    }

    pub fn rank_table(&self) -> &[u8] {
        &self.rank
    }

    pub fn loop_count(&self) -> usize {
        (0..self.n).filter(|e| self.rank[1 << e] == 0).count()
    }

    pub fn is_loopless(&self) -> bool {
        self.loop_count() == 0
    }

    pub fn is_independent(&self, s: u32) -> bool {
        self.rank_of(s) == s.count_ones() as usize
    }

    pub fn bases(&self) -> Vec<u32> {
        let r = self.rank();
        (0..=self.ground()).filter(|&s| s.count_ones() as usize == r && self.is_independent(s)).collect()
    }

    pub fn closure(&self, s: u32) -> u32 {
        let r = self.rank_of(s);
        (0..self.n).fold(s, |acc, e| if self.rank_of(s | 1 << e) == r { acc | 1 << e } else { acc })
    }

    pub fn is_flat(&self, s: u32) -> bool {
        self.closure(s) == s
    }

    /// All flats in subset order.
    pub fn flats(&self) -> Vec<u32> {
        let mut f: Vec<u32> = (0..=self.ground()).filter(|&s| self.is_flat(s)).collect();
        f.sort_by(|a, b| braid::subset_cmp(*a, *b));
        f
    }

    /// The minor `(M | hi) / lo` on `hi \ lo`, relabelled in increasing order.
    pub fn interval_minor(&self, lo: u32, hi: u32) -> Result<Matroid> {
        if lo & !hi != 0 || hi & !self.ground() != 0 {
            return Err(Error::Precondition(format!(
                "{:?} is not contained in {:?}",
                elements(lo),
                elements(hi)
            )));
        }
        let g = hi & !lo;
        let k = g.count_ones() as usize;
        let base = self.rank[lo as usize];
        let rank = (0..1u32 << k).map(|s| self.rank[(expand(s, g) | lo) as usize] - base).collect();
        Ok(Matroid { n: k, rank, name: None })
    }

    pub fn restrict(&self, f: u32) -> Result<Matroid> {
        self.interval_minor(0, f)
    }

    pub fn contract(&self, f: u32) -> Result<Matroid> {
        self.interval_minor(f, self.ground())
    }

    /// Deletes element `e` (1-based).
    pub fn delete_element(&self, e: usize) -> Result<Matroid> {
        self.restrict(self.ground() & !(1 << (e - 1)))
    }

    pub fn contract_element(&self, e: usize) -> Result<Matroid> {
        self.contract(1 << (e - 1))
    }

    /// `χ(t) = sum over S of (-1)^|S| t^(r - r(S))`.
    pub fn char_poly(&self) -> Polynomial {
        let r = self.rank();
        let mut c = vec![0i64; r + 1];
        for s in 0..=self.ground() {
            let sign = if s.count_ones() % 2 == 0 { 1 } else { -1 };
            c[r - self.rank_of(s)] += sign;
        }
        Polynomial::univariate("t", &c)
    }

    /// `χ(t)` from the Möbius function of the lattice of flats.
    pub fn char_poly_mobius(&self) -> Polynomial {
        if !self.is_loopless() {
            return Polynomial::univariate("t", &[0]);
        }
        let r = self.rank();
        let mut flats = self.flats();
        flats.sort_by_key(|&f| (self.rank_of(f), f));
        let mut mu: Vec<i64> = Vec::with_capacity(flats.len());
        for (k, &f) in flats.iter().enumerate() {
            let v = if k == 0 {
                1
            } else {
                -(0..k).filter(|&j| flats[j] & !f == 0).map(|j| mu[j]).sum::<i64>()
            };
            mu.push(v);
        }
        let mut c = vec![0i64; r + 1];
        for (k, &f) in flats.iter().enumerate() {
            c[r - self.rank_of(f)] += mu[k];
        }
        Polynomial::univariate("t", &c)
    }

    /// `χ(t) / (t - 1)`.
    pub fn reduced_char_poly(&self) -> Result<Polynomial> {
        let loops = self.loop_count();
        if loops > 0 {
            return Err(Error::Loops(loops));
        }
        self.char_poly().exact_div(&Polynomial::univariate("t", &[-1, 1]))
    }

    /// `(-1)^(r-1) χ̄(1)`.
    pub fn beta(&self) -> Result<BigInt> {
        let red = self.reduced_char_poly()?;
        let v = red.evaluate("t", 1).as_constant().expect("univariate");
        Ok(if self.rank() % 2 == 1 { v } else { -v })
    }

    /// Counts of subsets by `(r - r(A), |A| - r(A))`.
    fn corank_nullity_counts(&self) -> Vec<Vec<i64>> {
        let r = self.rank();
        let mut cnt = vec![vec![0i64; self.n + 1]; r + 1];
        for s in 0..=self.ground() {
            let rs = self.rank_of(s);
            cnt[r - rs][s.count_ones() as usize - rs] += 1;
        }
        cnt
    }

    /// `T(x, y) = sum over A of (x-1)^(r - r(A)) (y-1)^(|A| - r(A))`.
    pub fn tutte_poly(&self) -> Polynomial {
        let xm = Polynomial::univariate("x", &[-1, 1]);
        let ym = Polynomial::univariate("y", &[-1, 1]);
        let mut out = Polynomial::zero().with_indeterminates(&["x", "y"]).expect("fresh names");
        for (a, row) in self.corank_nullity_counts().iter().enumerate() {
            for (b, &c) in row.iter().enumerate() {
                if c != 0 {
                    out = out + (&xm.pow(a as u32) * &ym.pow(b as u32)).scale(&BigInt::from(c));
                }
            }
        }
        out
    }

    /// `sum over A of u^r(A) v^(|A| - r(A))`.
    pub fn rank_generating_poly(&self) -> Polynomial {
        let r = self.rank();
        let terms = self.corank_nullity_counts().into_iter().enumerate().flat_map(|(a, row)| {
            row.into_iter()
                .enumerate()
                .filter(|(_, c)| *c != 0)
                .map(move |(b, c)| (vec![(r - a) as u32, b as u32], BigInt::from(c)))
                .collect::<Vec<_>>()
        });
        Polynomial::from_terms(vec!["u".into(), "v".into()], terms).expect("two exponents")
    }

    /// `sum over independent I of u^|I|`.
    pub fn independence_poly(&self) -> Polynomial {
        let mut c = vec![0i64; self.rank() + 1];
        for s in 0..=self.ground() {
            if self.is_independent(s) {
                c[s.count_ones() as usize] += 1;
            }
        }
        Polynomial::univariate("u", &c)
    }

    /// Flags of nonempty proper flats, the empty flag first.
    pub fn flags_of_flats(&self) -> Result<Vec<Flag>> {
        let loops = self.loop_count();
        if loops > 0 {
            return Err(Error::Loops(loops));
        }
        if self.n < 2 {
            return Err(Error::Precondition(format!("ground set size {} < 2", self.n)));
        }
        Ok(braid::enumerate_chains(self.n, &|s| self.is_flat(s)))
    }

    pub fn is_flag_of_flats(&self, f: &Flag) -> bool {
        f.n() == self.n && f.sets().iter().all(|&s| self.is_flat(s))
    }
}

/// A flag whose members are flats of a given matroid.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlagOfFlats(Flag);

impl FlagOfFlats {
    pub fn new(m: &Matroid, f: Flag) -> Result<Self> {
        if !m.is_flag_of_flats(&f) {
            return Err(Error::InvalidFlag(format!("{f} is not a flag of flats")));
        }
        Ok(Self(f))
    }

    pub fn flag(&self) -> &Flag {
        &self.0
    }

    pub fn into_flag(self) -> Flag {
        self.0
    }
}

/// `φ(M|F_1) φ(M|F_2/F_1) ... φ(M/F_k)`.
pub fn successive_minor_eval(phi: impl Fn(&Matroid) -> Result<Polynomial>, m: &Matroid, f: &Flag) -> Result<Polynomial> {
    if f.n() != m.n() {
        return Err(Error::DomainMismatch(format!("flag on [{}], matroid on [{}]", f.n(), m.n())));
    }
    let mut acc = Polynomial::one();
    for (lo, hi) in f.intervals() {
        acc = &acc * &phi(&m.interval_minor(lo, hi)?)?;
    }
    Ok(acc)
}

type PhiFn<'a> = Box<dyn Fn(&Matroid) -> Result<Polynomial> + Send + Sync + 'a>;

/// [`successive_minor_eval`] with per-interval memoization.
pub struct MinorEvaluator<'a> {
    m: &'a Matroid,
    phi: PhiFn<'a>,
    cache: Mutex<HashMap<(u32, u32), Polynomial>>,
}

impl<'a> MinorEvaluator<'a> {
    pub fn new(m: &'a Matroid, phi: impl Fn(&Matroid) -> Result<Polynomial> + Send + Sync + 'a) -> Self {
        Self { m, phi: Box::new(phi), cache: Mutex::new(HashMap::new()) }
    }

    pub fn interval(&self, lo: u32, hi: u32) -> Result<Polynomial> {
        if let Some(p) = self.cache.lock().expect("cache lock").get(&(lo, hi)) {
            return Ok(p.clone());
        }
        let p = (self.phi)(&self.m.interval_minor(lo, hi)?)?;
        self.cache.lock().expect("cache lock").insert((lo, hi), p.clone());
        Ok(p)
    }

    pub fn eval(&self, f: &Flag) -> Result<Polynomial> {
        if f.n() != self.m.n() {
            return Err(Error::DomainMismatch(format!("flag on [{}], matroid on [{}]", f.n(), self.m.n())));
        }
        let mut acc = Polynomial::one();
        for (lo, hi) in f.intervals() {
            acc = &acc * &self.interval(lo, hi)?;
        }
        Ok(acc)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatroidSummary {
    pub name: Option<String>,
    pub n: usize,
    pub rank: usize,
    pub loops: usize,
    pub flats: usize,
    pub bases: usize,
    pub char_poly: String,
    pub beta: Option<String>,
}

impl Matroid {
    pub fn summary(&self) -> MatroidSummary {
        MatroidSummary {
            name: self.name.clone(),
            n: self.n,
            rank: self.rank(),
            loops: self.loop_count(),
            flats: self.flats().len(),
            bases: self.bases().len(),
            char_poly: self.char_poly().to_string(),
            beta: self.beta().ok().map(|b| b.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(xs: &[usize]) -> u32 {
        xs.iter().fold(0, |m, &e| m | 1 << (e - 1))
    }

    fn t(c: &[i64]) -> Polynomial {
        Polynomial::univariate("t", c)
    }

    #[test]
    fn uniform_rank_table() {
        let m = Matroid::uniform(2, 3).unwrap();
        for s in 0..8u32 {
            assert_eq!(m.rank_of(s), (s.count_ones() as usize).min(2));
        }
        assert_eq!(m.flats(), vec![0, 1, 2, 4, 7]);
    }

    #[test]
    fn triangle_graph_is_u23() {
        let g = Matroid::from_graph(&[(1, 2), (2, 3), (1, 3)]).unwrap();
        assert_eq!(g.rank_table(), Matroid::uniform(2, 3).unwrap().rank_table());
    }

    #[test]
    fn from_bases_round_trip() {
        let u = Matroid::uniform(2, 4).unwrap();
        let m = Matroid::from_bases(4, &u.bases()).unwrap();
        assert_eq!(m.rank_table(), u.rank_table());
    }

    #[test]
    fn bad_inputs_fail_loudly() {
        // {1,2} and {3,4} alone violate exchange
        let e = Matroid::from_bases(4, &[mask(&[1, 2]), mask(&[3, 4])]).unwrap_err();
        assert!(matches!(e, Error::MatroidAxiom(_)));
        assert!(Matroid::from_bases(3, &[mask(&[1]), mask(&[2, 3])]).is_err());
        assert!(Matroid::from_bases(3, &[]).is_err());
        let e = Matroid::from_rank_table(2, vec![0, 1, 1, 0]).unwrap_err();
        assert!(e.to_string().contains("S = [1]"));
        assert!(Matroid::from_rank_table(2, vec![0, 2, 1, 2]).is_err());
        assert!(Matroid::from_rank_table(2, vec![0, 1, 1]).is_err());
    }

    #[test]
    fn minors() {
        let u = Matroid::uniform(2, 3).unwrap();
        let c = u.contract(mask(&[1])).unwrap();
        assert_eq!((c.n(), c.rank(), c.loop_count()), (2, 1, 0));
        assert_eq!(c.rank_table(), Matroid::uniform(1, 2).unwrap().rank_table());
        let fano = catalog("fano").unwrap();
        let line = fano.restrict(mask(&[1, 2, 3])).unwrap();
        assert_eq!(line.rank_table(), u.rank_table());
    }

    #[test]
    fn characteristic_polynomials() {
        let u = Matroid::uniform(2, 3).unwrap();
        assert_eq!(u.char_poly(), t(&[2, -3, 1]));
        assert_eq!(u.char_poly_mobius(), t(&[2, -3, 1]));
        assert_eq!(u.reduced_char_poly().unwrap(), t(&[-2, 1]));
        assert_eq!(u.beta().unwrap(), BigInt::from(1));
        for n in 1..=4 {
            let r1 = Matroid::uniform(1, n).unwrap();
            assert_eq!(r1.reduced_char_poly().unwrap(), t(&[1]));
            assert_eq!(r1.beta().unwrap(), BigInt::from(1));
        }
    }

    #[test]
    fn loops() {
        let m = Matroid::from_graph(&[(1, 1), (1, 2)]).unwrap();
        assert_eq!(m.loop_count(), 1);
        assert!(m.char_poly().is_zero());
        assert!(matches!(m.reduced_char_poly(), Err(Error::Loops(1))));
        assert!(m.flags_of_flats().is_err());
    }

    #[test]
    fn tutte_and_independence() {
        let u12 = Matroid::uniform(1, 2).unwrap();
        assert_eq!(u12.tutte_poly(), Polynomial::parse("x + y").unwrap());
        let u23 = Matroid::uniform(2, 3).unwrap();
        assert_eq!(u23.independence_poly(), Polynomial::univariate("u", &[1, 3, 3]));
        assert_eq!(u23.tutte_poly(), Polynomial::parse("x^2 + x + y").unwrap());
        assert_eq!(u23.loop_count(), 0);
    }

    #[test]
    fn successive_minors() {
        let u = Matroid::uniform(2, 3).unwrap();
        let chi = |m: &Matroid| Ok(m.char_poly());
        assert_eq!(successive_minor_eval(chi, &u, &Flag::empty(3)).unwrap(), u.char_poly());
        let f = Flag::from_elements(3, &[vec![1]]).unwrap();
        assert_eq!(successive_minor_eval(chi, &u, &f).unwrap(), &t(&[-1, 1]) * &t(&[-1, 1]));
        let one = |_: &Matroid| Ok(Polynomial::one());
        let ev = MinorEvaluator::new(&u, chi);
        for g in braid::enumerate_flags(3).unwrap() {
            assert_eq!(successive_minor_eval(one, &u, &g).unwrap(), Polynomial::one());
            assert_eq!(ev.eval(&g).unwrap(), successive_minor_eval(chi, &u, &g).unwrap());
        }
    }

    #[test]
    fn flag_of_flats_counts() {
        assert_eq!(Matroid::uniform(2, 3).unwrap().flags_of_flats().unwrap().len(), 4);
        assert_eq!(Matroid::uniform(3, 4).unwrap().flags_of_flats().unwrap().len(), 23);
        for n in 2..=5 {
            let b = Matroid::uniform(n, n).unwrap();
            assert_eq!(b.flags_of_flats().unwrap(), braid::enumerate_flags(n).unwrap());
        }
        let u = Matroid::uniform(2, 3).unwrap();
        assert!(FlagOfFlats::new(&u, Flag::from_elements(3, &[vec![1, 2]]).unwrap()).is_err());
        assert!(FlagOfFlats::new(&u, Flag::from_elements(3, &[vec![2]]).unwrap()).is_ok());
    }

    #[test]
    fn compress_expand() {
        let g = mask(&[2, 4, 5]);
        assert_eq!(compress(mask(&[2, 5]), g), 0b101);
        assert_eq!(expand(0b101, g), mask(&[2, 5]));
    }
}
