//! Generalized permutohedra given by integral submodular support values,
//! their lattice points, and the weights `F ↦ |face_F(P) ∩ M|`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::Polynomial;
use crate::braid::{self, elements, full_set, Flag, SubsetE};
use crate::error::{Error, Result};
use crate::weights::{Domain, Weight};

/// `P = {x : Σ_{i∈S} x_i ≤ z(S) for all S, Σ x_i = z([n])}`. `z` is indexed
/// by subset bitmask, `z[0] = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenPermutohedron {
    n: usize,
    z: Vec<i64>,
}

impl GenPermutohedron {
    /// Validates submodularity over all pairs of subsets.
    pub fn new(n: usize, z: Vec<i64>) -> Result<Self> {
        braid::check_cap(n, braid::effective_cap())?;
        if n == 0 || z.len() != 1 << n {
            return Err(Error::Precondition(format!("need 2^{n} support values, got {}", z.len())));
        }
        if z[0] != 0 {
            return Err(Error::NotSubmodular(format!("z(∅) = {} must be 0", z[0])));
        }
        for a in 0..z.len() {
            for b in a + 1..z.len() {
                if z[a] + z[b] < z[a | b] + z[a & b] {
                    return Err(Error::NotSubmodular(format!(
                        "z({:?}) + z({:?}) < z({:?}) + z({:?})",
                        elements(a as u32),
                        elements(b as u32),
                        elements((a | b) as u32),
                        elements((a & b) as u32)
                    )));
                }
            }
        }
        Ok(Self { n, z })
    }

    /// The single point `{0}`.
    pub fn point(n: usize) -> Result<Self> {
        Self::new(n, vec![0; 1 << n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn z(&self, s: u32) -> i64 {
        self.z[s as usize]
    }

    pub fn level(&self) -> i64 {
        self.z(full_set(self.n))
    }

    /// Integer points of `P`, in lexicographic order.
    pub fn lattice_points(&self) -> Vec<Vec<i64>> {
        let n = self.n;
        let full = full_set(n);
        let lo: Vec<i64> = (0..n).map(|i| self.level() - self.z(full & !(1 << i))).collect();
        let hi: Vec<i64> = (0..n).map(|i| self.z(1 << i)).collect();
        let mut out = Vec::new();
        let mut x = vec![0i64; n];
        self.scan(0, &lo, &hi, &mut x, &mut out);
        out
    }

    fn scan(&self, k: usize, lo: &[i64], hi: &[i64], x: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        let n = self.n;
        if k + 1 == n {
            x[k] = self.level() - x[..k].iter().sum::<i64>();
            if x[k] >= lo[k] && x[k] <= hi[k] && self.satisfied_through(k, x) {
                out.push(x.clone());
            }
            return;
        }
        for v in lo[k]..=hi[k] {
            x[k] = v;
            if self.satisfied_through(k, x) {
                self.scan(k + 1, lo, hi, x, out);
            }
        }
    }

    /// All constraints on subsets of `{1..k+1}` that contain `k+1`.
    fn satisfied_through(&self, k: usize, x: &[i64]) -> bool {
        let top = 1u32 << k;
        (0..top).all(|rest| {
            let s = rest | top;
            sum_over(s, x) <= self.z(s)
        })
    }

    /// Integer points of the face maximizing every `e_S`, `S` in the flag.
    pub fn face_points(&self, f: &Flag) -> Vec<Vec<i64>> {
        self.lattice_points().into_iter().filter(|x| self.tight(f, x)).collect()
    }

    fn tight(&self, f: &Flag, x: &[i64]) -> bool {
        f.sets().iter().all(|&s| sum_over(s, x) == self.z(s))
    }

    pub fn to_json(&self) -> GenPermutohedronJson {
        let z = (1..self.z.len() as u32)
            .map(|s| (subset_key(s), self.z(s)))
            .collect();
        GenPermutohedronJson { n: self.n, z }
    }

    /// Missing subsets are an error.
    pub fn from_json(j: &GenPermutohedronJson) -> Result<Self> {
        let n = j.n;
        braid::check_cap(n, braid::effective_cap())?;
        let mut z = vec![None; 1 << n];
        z[0] = Some(0);
        for (key, &v) in &j.z {
            let elems = key
                .split(',')
                .map(|e| e.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad subset key {key:?}"))))
                .collect::<Result<Vec<_>>>()?;
            let s = SubsetE::from_elements(n, &elems)?;
            if s.is_empty() {
                return Err(Error::Parse(format!("bad subset key {key:?}")));
            }
            z[s.bits as usize] = Some(v);
        }
        let z = z
            .into_iter()
            .enumerate()
            .map(|(s, v)| v.ok_or_else(|| Error::MissingValue(format!("no support value for {:?}", elements(s as u32)))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, z)
    }
}

fn sum_over(s: u32, x: &[i64]) -> i64 {
    x.iter().enumerate().filter(|(i, _)| s >> i & 1 == 1).map(|(_, v)| v).sum()
}

fn subset_key(s: u32) -> String {
    elements(s).iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GenPermutohedronJson {
    pub n: usize,
    pub z: BTreeMap<String, i64>,
}

/// `Δ_I = conv(e_i - e_{i_0} : i ∈ I)` with `i_0 = min I`.
pub fn gp_delta_i(n: usize, i: &SubsetE) -> Result<GenPermutohedron> {
    if i.is_empty() || i.n != n {
        return Err(Error::Precondition(format!("need a nonempty subset of [{n}]")));
    }
    let i0 = 1u32 << i.bits.trailing_zeros();
    let z = (0..1u32 << n)
        .map(|s| i64::from(s & i.bits != 0) - i64::from(s & i0 != 0))
        .collect();
    GenPermutohedron::new(n, z)
}

pub fn gp_minkowski_sum(p: &GenPermutohedron, q: &GenPermutohedron) -> Result<GenPermutohedron> {
    if p.n != q.n {
        return Err(Error::DomainMismatch(format!("polytopes in dimensions {} and {}", p.n, q.n)));
    }
    let z = p.z.iter().zip(&q.z).map(|(a, b)| a + b).collect();
    Ok(GenPermutohedron { n: p.n, z })
}

pub fn face_lattice_count(p: &GenPermutohedron, f: &Flag) -> Result<usize> {
    if f.n() != p.n {
        return Err(Error::DomainMismatch(format!("flag on [{}], polytope in dimension {}", f.n(), p.n)));
    }
    Ok(p.face_points(f).len())
}

/// `F ↦ |face_F(P) ∩ M|` on all flags of `[n]`.
pub fn weight_of_polytope(p: &GenPermutohedron) -> Result<Weight> {
    let points = p.lattice_points();
    Weight::from_fn(Domain::Braid(p.n), |f| {
        Ok(Polynomial::constant(points.iter().filter(|x| p.tight(f, x)).count() as i64))
    })
}

/// `|I ∩ F_t|` for the first member `F_t` of the flag (with `[n]` appended)
/// that meets `I`.
pub fn delta_i_closed_form(i: &SubsetE, f: &Flag) -> usize {
    let full = full_set(f.n());
    let first = f.sets().iter().copied().chain([full]).find(|s| s & i.bits != 0).unwrap_or(full);
    (first & i.bits).count_ones() as usize
}

pub fn weight_delta_i_closed_form(n: usize, i: &SubsetE) -> Result<Weight> {
    if i.is_empty() || i.n != n {
        return Err(Error::Precondition(format!("need a nonempty subset of [{n}]")));
    }
    Weight::from_fn(Domain::Braid(n), |f| Ok(Polynomial::constant(delta_i_closed_form(i, f) as i64)))
}
