//! Flags of nonempty proper subsets of `[n]`, the cones of the permutohedral fan.
//!
//! Elements are 1-based. A subset is a `u32` bitmask with bit `i - 1` set
//! for element `i`. Subsets are ordered by popcount, then numeric value, and
//! flags by length, then member-wise by that subset order. Every enumeration
//! in this module returns flags in that order.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::algebra::LatticeVector;
use crate::error::{Error, Result};

pub const DEFAULT_CAP: usize = 8;
pub const HARD_CAP: usize = 16;

/// A subset of `[n]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SubsetE {
    pub n: usize,
    pub bits: u32,
}

impl SubsetE {
    pub fn new(n: usize, bits: u32) -> Self {
        debug_assert!(n <= 32 && (n == 32 || bits >> n == 0));
        Self { n, bits }
    }

    pub fn from_elements(n: usize, elements: &[usize]) -> Result<Self> {
        let mut bits = 0u32;
        for &e in elements {
            if e == 0 || e > n {
                return Err(Error::InvalidFlag(format!("element {e} outside [1, {n}]")));
            }
            bits |= 1 << (e - 1);
        }
        Ok(Self { n, bits })
    }

    pub fn contains(&self, e: usize) -> bool {
        e >= 1 && e <= self.n && self.bits & (1 << (e - 1)) != 0
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_proper_nonempty(&self) -> bool {
        self.bits != 0 && self.bits != full_set(self.n)
    }

    pub fn elements(&self) -> Vec<usize> {
        elements(self.bits)
    }
}

impl Ord for SubsetE {
    fn cmp(&self, other: &Self) -> Ordering {
        subset_cmp(self.bits, other.bits)
    }
}

impl PartialOrd for SubsetE {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn full_set(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

pub fn subset_cmp(a: u32, b: u32) -> Ordering {
    a.count_ones().cmp(&b.count_ones()).then(a.cmp(&b))
}

/// 1-based elements of a bitmask, increasing.
pub fn elements(bits: u32) -> Vec<usize> {
    (0..32).filter(|i| bits & (1 << i) != 0).map(|i| i + 1).collect()
}

fn bit(e: usize) -> u32 {
    1 << (e - 1)
}

/// The default cap, overridden by the `GW_NCAP` environment variable
/// (clamped to the hard cap).
pub fn effective_cap() -> usize {
    std::env::var("GW_NCAP")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(DEFAULT_CAP)
        .min(HARD_CAP)
}

pub fn check_cap(n: usize, cap: usize) -> Result<()> {
    let cap = cap.min(HARD_CAP);
    if n > cap {
        return Err(Error::CapExceeded { requested: n, cap });
    }
    Ok(())
}

/// A strictly increasing chain of nonempty proper subsets of `[n]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Flag {
    n: usize,
    chain: Vec<u32>,
}

impl Flag {
    pub fn empty(n: usize) -> Self {
        Self { n, chain: Vec::new() }
    }

    pub fn new(n: usize, chain: Vec<u32>) -> Result<Self> {
        let full = full_set(n);
        for &s in &chain {
            if s == 0 || s == full || s & !full != 0 {
                return Err(Error::InvalidFlag(format!(
                    "{:?} is not a nonempty proper subset of [{n}]",
                    elements(s)
                )));
            }
        }
        for w in chain.windows(2) {
            if w[0] & !w[1] != 0 || w[0] == w[1] {
                return Err(Error::InvalidFlag(format!(
                    "{:?} is not strictly contained in {:?}",
                    elements(w[0]),
                    elements(w[1])
                )));
            }
        }
        Ok(Self { n, chain })
    }

    pub(crate) fn new_unchecked(n: usize, chain: Vec<u32>) -> Self {
        Self { n, chain }
    }

    /// Builds a flag from 1-based element lists, e.g. `[[1], [1, 3]]`.
    pub fn from_elements(n: usize, sets: &[Vec<usize>]) -> Result<Self> {
        let chain = sets
            .iter()
            .map(|s| SubsetE::from_elements(n, s).map(|x| x.bits))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, chain)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Length of the flag (dimension of its cone).
    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    pub fn sets(&self) -> &[u32] {
        &self.chain
    }

    pub fn members(&self) -> Vec<SubsetE> {
        self.chain.iter().map(|&b| SubsetE::new(self.n, b)).collect()
    }

    pub fn contains_set(&self, s: u32) -> bool {
        self.chain.binary_search_by(|x| subset_cmp(*x, s)).is_ok()
    }

    /// Every set of `other` appears in `self`.
    pub fn refines(&self, other: &Flag) -> bool {
        other.chain.iter().all(|s| self.contains_set(*s))
    }

    /// The flag of sets common to both; its cone is the intersection of the two cones.
    pub fn common(&self, other: &Flag) -> Flag {
        Flag {
            n: self.n,
            chain: self.chain.iter().copied().filter(|s| other.contains_set(*s)).collect(),
        }
    }

    /// Consecutive pairs `(F_a, F_{a+1})` with `F_0 = {}` and `F_{k+1} = [n]`.
    pub fn intervals(&self) -> Vec<(u32, u32)> {
        let mut bounds = Vec::with_capacity(self.chain.len() + 2);
        bounds.push(0);
        bounds.extend_from_slice(&self.chain);
        bounds.push(full_set(self.n));
        bounds.windows(2).map(|w| (w[0], w[1])).collect()
    }

    pub fn to_json(&self) -> Vec<Vec<usize>> {
        self.chain.iter().map(|&s| elements(s)).collect()
    }
}

impl Ord for Flag {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then(self.chain.len().cmp(&other.chain.len()))
            .then_with(|| {
                for (a, b) in self.chain.iter().zip(&other.chain) {
                    match subset_cmp(*a, *b) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                Ordering::Equal
            })
    }
}

impl PartialOrd for Flag {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, s) in self.chain.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            let e: Vec<String> = elements(*s).iter().map(|x| x.to_string()).collect();
            write!(f, "[{}]", e.join(","))?;
        }
        write!(f, "]")
    }
}

impl Serialize for Flag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// A flag in JSON form without its ground-set size; resolve with [`FlagJson::resolve`].
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(transparent)]
pub struct FlagJson(pub Vec<Vec<usize>>);

impl FlagJson {
    pub fn resolve(&self, n: usize) -> Result<Flag> {
        let mut sets = self.0.clone();
        for s in &mut sets {
            s.sort_unstable();
        }
        Flag::from_elements(n, &sets)
    }
}

/// Every chain of subsets accepted by `admissible` and strictly between
/// `lower` and `upper`, including the empty chain.
pub(crate) fn chains_between(lower: u32, upper: u32, admissible: &dyn Fn(u32) -> bool) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    let free = upper & !lower;
    let mut candidates: Vec<u32> = submasks(free)
        .into_iter()
        .filter(|&m| m != 0 && m != free)
        .map(|m| lower | m)
        .filter(|&s| admissible(s))
        .collect();
    candidates.sort_by(|a, b| subset_cmp(*a, *b));
    fn extend(
        prefix: &mut Vec<u32>,
        candidates: &[u32],
        out: &mut Vec<Vec<u32>>,
    ) {
        let last = prefix.last().copied();
        for &c in candidates {
            let ok = match last {
                None => true,
                Some(l) => l & !c == 0 && l != c,
            };
            if ok {
                prefix.push(c);
                out.push(prefix.clone());
                extend(prefix, candidates, out);
                prefix.pop();
            }
        }
    }
    extend(&mut Vec::new(), &candidates, &mut out);
    out
}

fn submasks(m: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut s = m;
    loop {
        out.push(s);
        if s == 0 {
            break;
        }
        s = (s - 1) & m;
    }
    out
}

/// All flags of subsets accepted by `admissible`, including the empty flag,
/// in canonical order.
pub(crate) fn enumerate_chains(n: usize, admissible: &dyn Fn(u32) -> bool) -> Vec<Flag> {
    let mut flags: Vec<Flag> = chains_between(0, full_set(n), admissible)
        .into_iter()
        .map(|c| Flag::new_unchecked(n, c))
        .collect();
    flags.sort();
    flags
}

/// All flags of nonempty proper subsets of `[n]`, the empty flag first.
pub fn enumerate_flags(n: usize) -> Result<Vec<Flag>> {
    enumerate_flags_capped(n, effective_cap())
}

pub fn enumerate_flags_capped(n: usize, cap: usize) -> Result<Vec<Flag>> {
    if n < 2 {
        return Err(Error::Precondition(format!("ground set size {n} < 2")));
    }
    check_cap(n, cap)?;
    Ok(enumerate_chains(n, &|_| true))
}

/// Ray generators `e_{F_1}, ..., e_{F_k}` in the quotient lattice, in chain order.
pub fn cone_rays(f: &Flag) -> Vec<LatticeVector> {
    f.chain.iter().map(|&s| subset_ray(f.n, s)).collect()
}

pub fn subset_ray(n: usize, s: u32) -> LatticeVector {
    LatticeVector::in_quotient(
        (0..n)
            .map(|i| BigInt::from(((s >> i) & 1) as i64))
            .collect(),
    )
    .canonical()
}

pub fn is_ij_neutral(g: &Flag, i: usize, j: usize) -> bool {
    let (bi, bj) = (bit(i), bit(j));
    g.chain
        .iter()
        .all(|&s| (s & bi != 0) == (s & bj != 0))
}

/// Strict refinements of `g` whose new sets all pass `admissible`.
pub(crate) fn strict_refinements_by(g: &Flag, admissible: &dyn Fn(u32) -> bool) -> Vec<Flag> {
    let mut combos: Vec<Vec<u32>> = vec![Vec::new()];
    let intervals = g.intervals();
    for (a, &(lo, hi)) in intervals.iter().enumerate() {
        let options = chains_between(lo, hi, admissible);
        let mut next = Vec::with_capacity(combos.len() * options.len());
        for prefix in &combos {
            for opt in &options {
                let mut c = prefix.clone();
                c.extend_from_slice(opt);
                if a + 1 < intervals.len() {
                    c.push(hi);
                }
                next.push(c);
            }
        }
        combos = next;
    }
    let mut out: Vec<Flag> = combos
        .into_iter()
        .filter(|c| c.len() > g.len())
        .map(|c| Flag::new_unchecked(g.n, c))
        .collect();
    out.sort();
    out
}

fn check_pair(n: usize, i: usize, j: usize) -> Result<()> {
    if i == j || i == 0 || j == 0 || i > n || j > n {
        return Err(Error::Precondition(format!("need distinct i, j in [1, {n}], got {i}, {j}")));
    }
    Ok(())
}

/// The refinement set `S_ij(g)`: strict refinements whose new sets contain
/// `i` and avoid `j`.
pub fn strict_refinements_ij(g: &Flag, i: usize, j: usize) -> Result<Vec<Flag>> {
    check_pair(g.n, i, j)?;
    if !is_ij_neutral(g, i, j) {
        return Err(Error::Precondition(format!("flag {g} is not {{{i},{j}}}-neutral")));
    }
    let (bi, bj) = (bit(i), bit(j));
    Ok(strict_refinements_by(g, &|h| h & bi != 0 && h & bj == 0))
}

/// Index from flag to its position in a canonical enumeration.
#[derive(Clone, Debug)]
pub struct FlagIndex {
    flags: Vec<Flag>,
    index: HashMap<Flag, usize>,
}

impl FlagIndex {
    pub fn new(flags: Vec<Flag>) -> Self {
        let index = flags.iter().cloned().enumerate().map(|(k, f)| (f, k)).collect();
        Self { flags, index }
    }

    pub fn flags(&self) -> &[Flag] {
        &self.flags
    }

    pub fn get(&self, f: &Flag) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute force: every set of distinct nonempty proper subsets that is
    /// totally ordered by inclusion.
    fn oracle_flag_count(n: usize) -> usize {
        let full = full_set(n);
        let proper: Vec<u32> = (1..full).collect();
        let mut count = 0;
        // subsets of `proper` of bounded size: a chain has at most n - 1 members
        fn rec(proper: &[u32], start: usize, chosen: &mut Vec<u32>, count: &mut usize) {
            *count += 1;
            for k in start..proper.len() {
                let c = proper[k];
                if chosen.iter().all(|&s| s & c == s || s & c == c) {
                    chosen.push(c);
                    rec(proper, k + 1, chosen, count);
                    chosen.pop();
                }
            }
        }
        rec(&proper, 0, &mut Vec::new(), &mut count);
        count
    }

    fn oracle_refinements(g: &Flag, i: usize, j: usize) -> Vec<Flag> {
        let all = enumerate_flags(g.n()).unwrap();
        let mut out: Vec<Flag> = all
            .into_iter()
            .filter(|f| f.refines(g) && f != g)
            .filter(|f| {
                f.sets()
                    .iter()
                    .filter(|s| !g.contains_set(**s))
                    .all(|&h| h & bit(i) != 0 && h & bit(j) == 0)
            })
            .collect();
        out.sort();
        out
    }

    fn flag(n: usize, sets: &[&[usize]]) -> Flag {
        Flag::from_elements(n, &sets.iter().map(|s| s.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn flag_counts_match_chain_oracle() {
        assert_eq!(enumerate_flags(2).unwrap().len(), 3);
        assert_eq!(enumerate_flags(3).unwrap().len(), 13);
        assert_eq!(enumerate_flags(4).unwrap().len(), 75);
        for n in 2..=6 {
            assert_eq!(enumerate_flags(n).unwrap().len(), oracle_flag_count(n), "n = {n}");
        }
    }

    #[test]
    fn n2_flags() {
        let fs = enumerate_flags(2).unwrap();
        assert_eq!(fs, vec![Flag::empty(2), flag(2, &[&[1]]), flag(2, &[&[2]])]);
    }

    #[test]
    fn enumeration_respects_cap() {
        assert!(matches!(enumerate_flags(9), Err(Error::CapExceeded { .. })));
        assert!(enumerate_flags(1).is_err());
    }

    #[test]
    fn cone_rays_of_chain() {
        assert!(cone_rays(&Flag::empty(3)).is_empty());
        let r = cone_rays(&flag(3, &[&[1], &[1, 2]]));
        assert_eq!(r[0], LatticeVector::quotient_from_i64(&[1, 0, 0]));
        assert_eq!(r[1], LatticeVector::quotient_from_i64(&[1, 1, 0]));
    }

    #[test]
    fn invalid_flags_rejected() {
        assert!(Flag::from_elements(3, &[vec![1, 2, 3]]).is_err());
        assert!(Flag::from_elements(3, &[vec![1, 2], vec![1]]).is_err());
        assert!(Flag::from_elements(3, &[vec![1], vec![2]]).is_err());
        assert!(Flag::from_elements(3, &[vec![]]).is_err());
    }

    #[test]
    fn neutrality() {
        assert!(is_ij_neutral(&Flag::empty(3), 1, 2));
        assert!(is_ij_neutral(&flag(3, &[&[1, 2]]), 1, 2));
        assert!(!is_ij_neutral(&flag(3, &[&[1]]), 1, 2));
    }

    #[test]
    fn refinements_small_cases() {
        assert_eq!(
            strict_refinements_ij(&Flag::empty(2), 1, 2).unwrap(),
            vec![flag(2, &[&[1]])]
        );
        assert_eq!(
            strict_refinements_ij(&Flag::empty(3), 1, 2).unwrap(),
            vec![flag(3, &[&[1]]), flag(3, &[&[1, 3]]), flag(3, &[&[1], &[1, 3]])]
        );
        // below {1,2} only {1} contains 1 and avoids 2; nothing fits above
        assert_eq!(
            strict_refinements_ij(&flag(3, &[&[1, 2]]), 1, 2).unwrap(),
            vec![flag(3, &[&[1], &[1, 2]])]
        );
        assert!(strict_refinements_ij(&flag(3, &[&[1]]), 1, 2).is_err());
        assert!(strict_refinements_ij(&Flag::empty(3), 2, 2).is_err());
    }

    #[test]
    fn refinements_match_brute_force() {
        for n in 2..=5 {
            for g in enumerate_flags(n).unwrap() {
                for i in 1..=n {
                    for j in 1..=n {
                        if i == j || !is_ij_neutral(&g, i, j) {
                            continue;
                        }
                        let fast = strict_refinements_ij(&g, i, j).unwrap();
                        assert_eq!(fast, oracle_refinements(&g, i, j), "g = {g}, i = {i}, j = {j}");
                        let other = strict_refinements_ij(&g, j, i).unwrap();
                        assert!(fast.iter().all(|f| !other.contains(f) && f.len() > g.len()));
                    }
                }
            }
        }
    }

    #[test]
    fn common_face_is_meet() {
        let fs = enumerate_flags(4).unwrap();
        for a in &fs {
            for b in &fs {
                let c = a.common(b);
                assert!(a.refines(&c) && b.refines(&c));
                assert_eq!(c, b.common(a));
                // the meet is the largest common coarsening
                for d in &fs {
                    if a.refines(d) && b.refines(d) {
                        assert!(c.refines(d));
                    }
                }
            }
        }
    }

    #[test]
    fn flag_json() {
        let f = flag(3, &[&[1], &[1, 3]]);
        assert_eq!(serde_json::to_string(&f).unwrap(), "[[1],[1,3]]");
        let j: FlagJson = serde_json::from_str("[[3,1],[1]]").unwrap();
        assert!(j.resolve(3).is_err());
        let j: FlagJson = serde_json::from_str("[[1],[3,1]]").unwrap();
        assert_eq!(j.resolve(3).unwrap(), f);
        assert_eq!(serde_json::to_string(&Flag::empty(3)).unwrap(), "[]");
    }
}
