//! The displacement product of weights on a complete strongly unimodular fan.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use super::fm::signed_solution_exists;
use super::Fan;
use crate::algebra::{rational_rank, LatticeVector, Polynomial};
use crate::error::{Error, Result};

fn displaced_system(fan: &Fan, sigma: usize, v: &[BigInt], tau: usize) -> (Vec<Vec<BigInt>>, Vec<BigInt>, usize) {
    let (s, t) = (fan.cone(sigma), fan.cone(tau));
    let k = s.len() + t.len();
    let rows = (0..fan.rank())
        .map(|i| {
            s.iter()
                .map(|&r| fan.ray_coords(r)[i].clone())
                .chain(t.iter().map(|&r| -fan.ray_coords(r)[i].clone()))
                .collect()
        })
        .collect();
    let rhs = v.iter().map(|x| -x).collect();
    (rows, rhs, k)
}

fn meets(fan: &Fan, sigma: usize, v: &[BigInt], tau: usize, strict: bool) -> bool {
    let (a, b, k) = displaced_system(fan, sigma, v, tau);
    signed_solution_exists(&a, &b, k, strict)
}

/// Whether `(sigma + v) ∩ tau` is nonempty.
pub fn displaced_intersection_nonempty(fan: &Fan, sigma: usize, v: &LatticeVector, tau: usize) -> Result<bool> {
    let vc = fan.point_coords(v)?;
    Ok(meets(fan, sigma, &vc, tau, false))
}

/// Whether the relative interiors of `sigma + v` and `tau` meet.
pub fn relative_interiors_meet(fan: &Fan, sigma: usize, v: &LatticeVector, tau: usize) -> Result<bool> {
    let vc = fan.point_coords(v)?;
    Ok(meets(fan, sigma, &vc, tau, true))
}

fn pair_rank(fan: &Fan, sigma: usize, tau: usize) -> usize {
    let mut rays: Vec<usize> = fan.cone(sigma).iter().chain(fan.cone(tau)).copied().collect();
    rays.sort_unstable();
    rays.dedup();
    let vecs: Vec<Vec<BigInt>> = rays.iter().map(|&r| fan.ray_coords(r).to_vec()).collect();
    rational_rank(&vecs)
}

fn all_pairs(fan: &Fan) -> Vec<(usize, usize)> {
    let n = fan.num_cones();
    (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect()
}

/// Checks every cone pair: a nonempty displaced intersection must meet in
/// relative interiors, and the two cones must together span `N_R`.
pub fn is_generic_general(fan: &Fan, v: &LatticeVector) -> Result<bool> {
    let vc = fan.point_coords(v)?;
    Ok(all_pairs(fan).par_iter().all(|&(s, t)| {
        !meets(fan, s, &vc, t, false) || (meets(fan, s, &vc, t, true) && pair_rank(fan, s, t) == fan.rank())
    }))
}

fn braid_differences_distinct(v: &[BigInt]) -> bool {
    let mut diffs = Vec::new();
    for (i, a) in v.iter().enumerate() {
        for (j, b) in v.iter().enumerate() {
            if i != j {
                diffs.push(a - b);
            }
        }
    }
    let len = diffs.len();
    diffs.sort();
    diffs.dedup();
    diffs.len() == len
}

/// Genericity of `v`. On a permutohedral fan with `v` given in `Z^n`, the
/// test is that all differences `v_i - v_j` are distinct; otherwise every
/// cone pair is checked.
pub fn is_generic(fan: &Fan, v: &LatticeVector) -> Result<bool> {
    if let Some(n) = fan.braid_n() {
        if v.coords.len() == n {
            return Ok(braid_differences_distinct(&v.coords));
        }
    }
    is_generic_general(fan, v)
}

/// The cone pairs `(sigma, tau)` with `(sigma + v) ∩ tau` nonempty, for a
/// fixed generic `v`.
#[derive(Clone, Debug)]
pub struct DisplacementTable {
    v: Vec<BigInt>,
    rank: usize,
    num_cones: usize,
    pairs: Vec<(usize, usize)>,
}

impl DisplacementTable {
    /// Fails with [`Error::NotGeneric`] when `v` is not generic for the fan.
    pub fn new(fan: &Fan, v: &LatticeVector) -> Result<Self> {
        let vc = fan.point_coords(v)?;
        let d = fan.rank();
        let fast = fan.braid_n().is_some_and(|n| v.coords.len() == n);
        let candidates: Vec<(usize, usize)> = all_pairs(fan)
            .into_iter()
            .filter(|&(s, t)| !fast || fan.cone(s).len() + fan.cone(t).len() >= d)
            .collect();
        if fast && !braid_differences_distinct(&v.coords) {
            return Err(Error::NotGeneric(v.to_string()));
        }
        let checked: Vec<Option<(usize, usize)>> = candidates
            .par_iter()
            .map(|&(s, t)| {
                if !meets(fan, s, &vc, t, false) {
                    return Ok(None);
                }
                if !fast && !(meets(fan, s, &vc, t, true) && pair_rank(fan, s, t) == d) {
                    return Err(Error::NotGeneric(v.to_string()));
                }
                Ok(Some((s, t)))
            })
            .collect::<Result<_>>()?;
        let pairs = checked.into_iter().flatten().collect();
        Ok(Self { v: vc, rank: d, num_cones: fan.num_cones(), pairs })
    }

    pub fn v(&self) -> &[BigInt] {
        &self.v
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    fn check(&self, fan: &Fan, g1: &[Polynomial], g2: &[Polynomial]) -> Result<()> {
        if fan.num_cones() != self.num_cones || fan.rank() != self.rank {
            return Err(Error::DomainMismatch("table was built for a different fan".into()));
        }
        for g in [g1, g2] {
            if g.len() != self.num_cones {
                return Err(Error::MissingValue(format!(
                    "weight has {} values, fan has {} cones",
                    g.len(),
                    self.num_cones
                )));
            }
        }
        Ok(())
    }

    fn sign(&self, fan: &Fan, s: usize, t: usize, gamma_dim: usize) -> bool {
        (fan.cone(s).len() + fan.cone(t).len() + self.rank + gamma_dim) % 2 == 0
    }

    /// Pairs contributing at `gamma` with their sign: both cones contain
    /// `gamma` and their common face lies in the span of `gamma`.
    pub fn contributions(&self, fan: &Fan, gamma: usize) -> Vec<(usize, usize, i8)> {
        let g = fan.cone(gamma);
        let span: Vec<Vec<BigInt>> = g.iter().map(|&r| fan.ray_coords(r).to_vec()).collect();
        self.pairs
            .iter()
            .filter(|&&(s, t)| fan.contains_face(s, gamma) && fan.contains_face(t, gamma))
            .filter(|&&(s, t)| {
                fan.cone(fan.meet(s, t)).iter().all(|r| {
                    if g.binary_search(r).is_ok() {
                        return true;
                    }
                    let mut vs = span.clone();
                    vs.push(fan.ray_coords(*r).to_vec());
                    rational_rank(&vs) == span.len()
                })
            })
            .map(|&(s, t)| (s, t, if self.sign(fan, s, t, g.len()) { 1 } else { -1 }))
            .collect()
    }

    /// The product at one cone, summing the defining formula directly.
    pub fn product_at(&self, fan: &Fan, g1: &[Polynomial], g2: &[Polynomial], gamma: usize) -> Result<Polynomial> {
        self.check(fan, g1, g2)?;
        let mut acc = Polynomial::zero();
        for (s, t, sign) in self.contributions(fan, gamma) {
            let term = &g1[s] * &g2[t];
            acc = if sign > 0 { acc + term } else { acc - term };
        }
        Ok(acc)
    }

    /// The product at every cone. In a simplicial fan a pair contributes
    /// exactly at its common face, so one pass over the pairs suffices.
    pub fn product_all(&self, fan: &Fan, g1: &[Polynomial], g2: &[Polynomial]) -> Result<Vec<Polynomial>> {
        self.check(fan, g1, g2)?;
        let mut out = vec![Polynomial::zero(); self.num_cones];
        for &(s, t) in &self.pairs {
            if g1[s].is_zero() || g2[t].is_zero() {
                continue;
            }
            let gamma = fan.meet(s, t);
            let term = &g1[s] * &g2[t];
            let slot = &mut out[gamma];
            *slot = if self.sign(fan, s, t, fan.cone(gamma).len()) {
                &*slot + &term
            } else {
                &*slot - &term
            };
        }
        Ok(out)
    }
}

impl DisplacementTable {
    /// Signed counts of the pairs contributing at `gamma`, binned by
    /// `(dim sigma, dim tau)`.
    pub fn dimension_matrix(&self, fan: &Fan, gamma: usize) -> Vec<Vec<i64>> {
        let size = fan.dim() + 1;
        let mut m = vec![vec![0i64; size]; size];
        for (s, t, sign) in self.contributions(fan, gamma) {
            m[fan.cone(s).len()][fan.cone(t).len()] += i64::from(sign);
        }
        m
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct P2Report {
    pub v: Vec<i64>,
    pub m: Vec<Vec<i64>>,
    pub b: Vec<Vec<i64>>,
    pub bm: Vec<Vec<i64>>,
    pub bmb: Vec<Vec<i64>>,
    /// `m` equals `[[0,0,1],[0,1,-1],[1,-1,0]]`.
    pub m_expected: bool,
    pub pass: bool,
}

fn matmul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    (0..a.len())
        .map(|i| (0..b[0].len()).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

/// The product rule on `P^2` at the zero cone with `v = (1, 2)`, in the
/// basis `1, x, x^2` of `K(P^2)`: `B[i][k] = χ(x^(i+k)) = [i + k <= 2]`, and
/// the rule amounts to `B m B = B`.
pub fn p2_example() -> Result<P2Report> {
    let fan = Fan::projective(2)?;
    let v = [1i64, 2];
    let table = DisplacementTable::new(&fan, &LatticeVector::from_i64(&v))?;
    let m = table.dimension_matrix(&fan, 0);
    let b: Vec<Vec<i64>> = (0..3).map(|i| (0..3).map(|k| i64::from(i + k <= 2)).collect()).collect();
    let bm = matmul(&b, &m);
    let bmb = matmul(&bm, &b);
    let identity: Vec<Vec<i64>> = (0..3).map(|i| (0..3).map(|k| i64::from(i == k)).collect()).collect();
    let m_expected = m == vec![vec![0, 0, 1], vec![0, 1, -1], vec![1, -1, 0]];
    let pass = m_expected && bm == identity && bmb == b;
    Ok(P2Report { v: v.to_vec(), m, b, bm, bmb, m_expected, pass })
}

/// The product of two weights at the cone `gamma`.
pub fn product_rule(fan: &Fan, g1: &[Polynomial], g2: &[Polynomial], v: &LatticeVector, gamma: usize) -> Result<Polynomial> {
    DisplacementTable::new(fan, v)?.product_at(fan, g1, g2, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(xs)
    }

    #[test]
    fn p2_matrix() {
        let r = p2_example().unwrap();
        assert_eq!(r.m, vec![vec![0, 0, 1], vec![0, 1, -1], vec![1, -1, 0]]);
        assert!(r.pass);
    }

    fn ones(f: &Fan) -> Vec<Polynomial> {
        vec![Polynomial::one(); f.num_cones()]
    }

    #[test]
    fn trivial_displacements() {
        let p2 = Fan::projective(2).unwrap();
        assert!(!displaced_intersection_nonempty(&p2, 0, &v(&[1, 2]), 0).unwrap());
        assert!(displaced_intersection_nonempty(&p2, 0, &v(&[0, 0]), 0).unwrap());
        let top = p2.cone_index(&[0, 1]).unwrap();
        assert!(displaced_intersection_nonempty(&p2, 0, &v(&[1, 2]), top).unwrap());
        let far = p2.cone_index(&[0, 2]).unwrap();
        assert!(displaced_intersection_nonempty(&p2, 0, &v(&[1, -2]), far).unwrap());
        assert!(!displaced_intersection_nonempty(&p2, 0, &v(&[1, 2]), far).unwrap());
    }

    #[test]
    fn genericity() {
        let b4 = Fan::braid(4).unwrap();
        assert!(is_generic(&b4, &v(&[2, 4, 8, 16])).unwrap());
        let b3 = Fan::braid(3).unwrap();
        assert!(!is_generic(&b3, &v(&[1, 2, 3])).unwrap());
        // distinct differences is sufficient only; the pairwise check accepts (1,2,3)
        assert!(is_generic_general(&b3, &LatticeVector::quotient_from_i64(&[1, 2, 3])).unwrap());
        assert!(!is_generic_general(&b3, &LatticeVector::quotient_from_i64(&[1, 2, 2])).unwrap());
        let p2 = Fan::projective(2).unwrap();
        assert!(is_generic(&p2, &v(&[1, 2])).unwrap());
        assert!(!is_generic(&p2, &v(&[1, 1])).unwrap());
        assert!(matches!(DisplacementTable::new(&b3, &v(&[1, 2, 3])), Err(Error::NotGeneric(_))));
    }

    #[test]
    fn braid_fast_path_implies_general() {
        let b3 = Fan::braid(3).unwrap();
        for w in [[2, 4, 8], [1, 3, 7], [0, 1, 5], [5, -3, 0]] {
            if is_generic(&b3, &v(&w)).unwrap() {
                let q = LatticeVector::quotient_from_i64(&w);
                assert!(is_generic_general(&b3, &q).unwrap(), "{w:?}");
            }
        }
    }

    #[test]
    fn pruned_table_matches_full_scan() {
        for n in 3..=4 {
            let f = Fan::braid(n).unwrap();
            let w: Vec<i64> = (1..=n as u32).map(|i| 1 << i).collect();
            let fast = DisplacementTable::new(&f, &v(&w)).unwrap();
            let full = DisplacementTable::new(&f, &LatticeVector::quotient_from_i64(&w)).unwrap();
            assert_eq!(fast.pairs(), full.pairs());
        }
    }

    #[test]
    fn unit_law_and_binning() {
        let f = Fan::braid(3).unwrap();
        let t = DisplacementTable::new(&f, &v(&[2, 4, 8])).unwrap();
        let g: Vec<Polynomial> = (0..f.num_cones()).map(|k| Polynomial::constant(k as i64 * 3 - 7)).collect();
        let all = t.product_all(&f, &g, &ones(&f)).unwrap();
        for gamma in 0..f.num_cones() {
            assert_eq!(t.product_at(&f, &g, &ones(&f), gamma).unwrap(), g[gamma]);
            assert_eq!(all[gamma], g[gamma]);
        }
        // a non-balanced input still gives agreeing routes
        let all = t.product_all(&f, &g, &g).unwrap();
        for gamma in 0..f.num_cones() {
            assert_eq!(t.product_at(&f, &g, &g, gamma).unwrap(), all[gamma]);
        }
    }

    #[test]
    fn p2_unit() {
        let p2 = Fan::projective(2).unwrap();
        let g: Vec<Polynomial> = (0..p2.num_cones()).map(|k| Polynomial::constant(k as i64 + 1)).collect();
        for gamma in 0..p2.num_cones() {
            assert_eq!(product_rule(&p2, &ones(&p2), &g, &v(&[1, 2]), gamma).unwrap(), g[gamma]);
        }
    }
}
