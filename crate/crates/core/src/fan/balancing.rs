//! Linear relations satisfied by Grothendieck weights, and the
//! codimension-one balancing condition for Minkowski weights.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::Fan;
use crate::algebra::{ints_json, rational_rank, smith_normal_form, IntegerMatrix, LatticeVector, Polynomial};
use crate::error::{Error, Result};

/// Rays split by their pairing with a direction `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RaySplit {
    pub positive: Vec<usize>,
    pub negative: Vec<usize>,
    pub neutral: Vec<usize>,
}

fn pairing(q: &[BigInt], u: &[BigInt]) -> BigInt {
    q.iter().zip(u).map(|(a, b)| a * b).sum()
}

pub fn pq_nq(fan: &Fan, q: &LatticeVector) -> Result<RaySplit> {
    let qc = fan.dual_coords(q)?;
    split(fan, q, &qc)
}

fn split(fan: &Fan, q: &LatticeVector, qc: &[BigInt]) -> Result<RaySplit> {
    let mut s = RaySplit { positive: Vec::new(), negative: Vec::new(), neutral: Vec::new() };
    for r in 0..fan.num_rays() {
        let p = pairing(qc, fan.ray_coords(r));
        if p.is_zero() {
            s.neutral.push(r);
        } else if p.is_one() {
            s.positive.push(r);
        } else if p == -BigInt::one() {
            s.negative.push(r);
        } else {
            return Err(Error::OutsideQ(q.to_string(), p.to_string()));
        }
    }
    Ok(s)
}

/// One relation per direction `q` and `q`-neutral cone `tau`.
#[derive(Clone, Debug)]
pub struct BalancingRelation {
    pub q: LatticeVector,
    pub tau: usize,
    /// `(cone, coefficient)` with coefficient `±1`, in cone order.
    pub coefficients: Vec<(usize, i8)>,
}

impl BalancingRelation {
    pub fn evaluate(&self, g: &[Polynomial]) -> Polynomial {
        let mut acc = Polynomial::zero();
        for &(c, s) in &self.coefficients {
            if s > 0 {
                acc = &acc + &g[c];
            } else {
                acc = &acc - &g[c];
            }
        }
        acc
    }
}

fn relations_for(fan: &Fan, q: &LatticeVector, sp: &RaySplit) -> Vec<BalancingRelation> {
    let mut side = vec![0i8; fan.num_rays()];
    for &r in &sp.positive {
        side[r] = 1;
    }
    for &r in &sp.negative {
        side[r] = -1;
    }
    let up = fan.supercones();
    let mut out = Vec::new();
    for tau in 0..fan.num_cones() {
        let t = fan.cone(tau);
        if t.iter().any(|&r| side[r] != 0) {
            continue;
        }
        let mut coefficients = Vec::new();
        for &sigma in &up[tau] {
            let new: Vec<i8> = fan.cone(sigma).iter().filter(|r| t.binary_search(r).is_err()).map(|&r| side[r]).collect();
            let parity: i8 = if fan.cone(sigma).len() % 2 == 0 { 1 } else { -1 };
            if new.iter().all(|&s| s == 1) {
                coefficients.push((sigma, parity));
            } else if new.iter().all(|&s| s == -1) {
                coefficients.push((sigma, -parity));
            }
        }
        if !coefficients.is_empty() {
            coefficients.sort_unstable();
            out.push(BalancingRelation { q: q.clone(), tau, coefficients });
        }
    }
    out
}

pub fn balancing_relations(fan: &Fan, directions: &[LatticeVector]) -> Result<Vec<BalancingRelation>> {
    let mut out = Vec::new();
    for q in directions {
        let sp = pq_nq(fan, q)?;
        out.extend(relations_for(fan, q, &sp));
    }
    Ok(out)
}

/// For every cone `tau`, the directions orthogonal to `tau` generate `M(tau)`.
pub fn basis_property_check(fan: &Fan, directions: &[LatticeVector]) -> Result<bool> {
    let d = fan.rank();
    let qs: Vec<Vec<BigInt>> = directions.iter().map(|q| fan.dual_coords(q)).collect::<Result<_>>()?;
    for tau in 0..fan.num_cones() {
        let t = fan.cone(tau);
        let orth: Vec<Vec<BigInt>> = qs
            .iter()
            .filter(|q| t.iter().all(|&r| pairing(q, fan.ray_coords(r)).is_zero()))
            .cloned()
            .collect();
        let need = d - t.len();
        if need == 0 {
            continue;
        }
        if orth.is_empty() {
            return Ok(false);
        }
        let snf = smith_normal_form(&IntegerMatrix::from_columns(&orth, d));
        if snf.rank != need || !snf.all_ones() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug)]
pub struct BalancingFailure {
    pub q: Vec<BigInt>,
    pub tau: Vec<usize>,
    pub residual: Polynomial,
}

impl Serialize for BalancingFailure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serde_json::json!({
            "relation": { "q": ints_json(&self.q), "tau": self.tau },
            "residual": self.residual.to_string(),
        })
        .serialize(s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BalancingReport {
    pub pass: bool,
    pub relations_checked: usize,
    pub failures: Vec<BalancingFailure>,
}

/// Evaluates every relation from `directions` on `g` (indexed by cone).
pub fn check_k_balancing(fan: &Fan, g: &[Polynomial], directions: &[LatticeVector]) -> Result<BalancingReport> {
    if g.len() != fan.num_cones() {
        return Err(Error::MissingValue(format!(
            "weight has {} values, fan has {} cones",
            g.len(),
            fan.num_cones()
        )));
    }
    let splits: Vec<(LatticeVector, RaySplit)> = directions
        .iter()
        .map(|q| Ok((q.clone(), pq_nq(fan, q)?)))
        .collect::<Result<_>>()?;
    fan.supercones();
    let per_q: Vec<(usize, Vec<BalancingFailure>)> = splits
        .par_iter()
        .map(|(q, sp)| {
            let rels = relations_for(fan, q, sp);
            let qc = fan.dual_coords(q).expect("checked above");
            let fails = rels
                .iter()
                .filter_map(|rel| {
                    let r = rel.evaluate(g);
                    (!r.is_zero()).then(|| BalancingFailure {
                        q: qc.clone(),
                        tau: fan.cone(rel.tau).to_vec(),
                        residual: r,
                    })
                })
                .collect();
            (rels.len(), fails)
        })
        .collect();
    let relations_checked = per_q.iter().map(|x| x.0).sum();
    let failures: Vec<BalancingFailure> = per_q.into_iter().flat_map(|x| x.1).collect();
    Ok(BalancingReport { pass: failures.is_empty(), relations_checked, failures })
}

#[derive(Clone, Debug, Serialize)]
pub struct MinkowskiReport {
    pub pass: bool,
    pub walls_checked: usize,
    /// Ray sets of the walls where balancing fails.
    pub failures: Vec<Vec<usize>>,
}

/// Codimension-one balancing of `c` on the cones of codimension `k` in the
/// fan (codimension counted from the largest cone dimension). For each cone
/// `tau` one dimension lower, `sum c(sigma) u_{sigma/tau}` must lie in the
/// span of `tau`. Only cones present in the fan are summed over.
pub fn minkowski_balancing_check(fan: &Fan, c: &[Polynomial], k: usize) -> Result<MinkowskiReport> {
    if c.len() != fan.num_cones() {
        return Err(Error::MissingValue(format!(
            "weight has {} values, fan has {} cones",
            c.len(),
            fan.num_cones()
        )));
    }
    let top = fan.dim();
    if k > top {
        return Err(Error::Precondition(format!("codimension {k} exceeds fan dimension {top}")));
    }
    let dim = top - k;
    if dim == 0 {
        return Ok(MinkowskiReport { pass: true, walls_checked: 0, failures: Vec::new() });
    }
    let up = fan.supercones();
    let walls: Vec<usize> = (0..fan.num_cones()).filter(|&t| fan.cone(t).len() == dim - 1).collect();
    let failures: Vec<Vec<usize>> = walls
        .par_iter()
        .filter_map(|&tau| {
            let t = fan.cone(tau);
            // monomial -> integer vector accumulated over sigma
            let mut sums: BTreeMap<String, Vec<BigInt>> = BTreeMap::new();
            for &sigma in &up[tau] {
                let s = fan.cone(sigma);
                if s.len() != dim || c[sigma].is_zero() {
                    continue;
                }
                let new = *s.iter().find(|r| t.binary_search(r).is_err()).expect("one new ray");
                let u = fan.ray_coords(new);
                let poly = c[sigma].strip_unused();
                for (exp, coeff) in poly.terms() {
                    let key = monomial_key(poly.vars(), exp);
                    let acc = sums.entry(key).or_insert_with(|| vec![BigInt::zero(); fan.rank()]);
                    for (a, x) in acc.iter_mut().zip(u) {
                        *a += coeff * x;
                    }
                }
            }
            let span: Vec<Vec<BigInt>> = t.iter().map(|&r| fan.ray_coords(r).to_vec()).collect();
            let ok = sums.values().all(|w| {
                if w.iter().all(|x| x.is_zero()) {
                    return true;
                }
                let mut vs = span.clone();
                vs.push(w.clone());
                rational_rank(&vs) == span.len()
            });
            (!ok).then(|| t.to_vec())
        })
        .collect();
    Ok(MinkowskiReport { pass: failures.is_empty(), walls_checked: walls.len(), failures })
}

fn monomial_key(vars: &[String], exp: &[u32]) -> String {
    let mut parts: Vec<String> = vars
        .iter()
        .zip(exp)
        .filter(|(_, &e)| e > 0)
        .map(|(v, e)| format!("{v}^{e}"))
        .collect();
    parts.sort();
    parts.join("*")
}

/// The `{e_i - e_j}` directions for the permutohedral fan on `[n]`.
pub fn braid_directions(n: usize) -> Vec<LatticeVector> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let mut c = vec![0i64; n];
                c[i] = 1;
                c[j] = -1;
                out.push(LatticeVector::from_i64(&c));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones(f: &Fan) -> Vec<Polynomial> {
        vec![Polynomial::one(); f.num_cones()]
    }

    #[test]
    fn split_braid3() {
        let f = Fan::braid(3).unwrap();
        let sp = pq_nq(&f, &LatticeVector::from_i64(&[1, -1, 0])).unwrap();
        // rays in subset order: {1},{2},{3},{1,2},{1,3},{2,3}
        assert_eq!(sp.positive, vec![0, 4]);
        assert_eq!(sp.negative, vec![1, 5]);
        assert_eq!(sp.neutral, vec![2, 3]);
        let zero = pq_nq(&f, &LatticeVector::from_i64(&[0, 0, 0])).unwrap();
        assert_eq!(zero.neutral.len(), 6);
        assert!(pq_nq(&f, &LatticeVector::from_i64(&[2, -2, 0])).is_err());
        assert!(pq_nq(&f, &LatticeVector::from_i64(&[1, 0, 0])).is_err());
    }

    #[test]
    fn split_p2() {
        let f = Fan::projective(2).unwrap();
        let sp = pq_nq(&f, &LatticeVector::from_i64(&[1, 0])).unwrap();
        assert_eq!((sp.positive, sp.negative, sp.neutral), (vec![0], vec![2], vec![1]));
    }

    #[test]
    fn braid2_single_relation() {
        let f = Fan::braid(2).unwrap();
        let rels = balancing_relations(&f, &[LatticeVector::from_i64(&[1, -1])]).unwrap();
        assert_eq!(rels.len(), 1);
        assert_eq!(rels[0].tau, 0);
        // cone 1 = {1} (P side, dim 1): -1; cone 2 = {2} (N side): +1
        assert_eq!(rels[0].coefficients, vec![(1, -1), (2, 1)]);
    }

    #[test]
    fn p2_relation_through_a_ray() {
        let f = Fan::projective(2).unwrap();
        let rels = balancing_relations(&f, &[LatticeVector::from_i64(&[1, 0])]).unwrap();
        let tau = f.cone_index(&[1]).unwrap();
        let r = rels.iter().find(|r| r.tau == tau).unwrap();
        let a = f.cone_index(&[0, 1]).unwrap();
        let b = f.cone_index(&[1, 2]).unwrap();
        assert_eq!(r.coefficients, vec![(a, 1), (b, -1)]);
        // codimension-0 cones give no relation
        assert!(rels.iter().all(|r| f.cone(r.tau).len() < 2));
    }

    #[test]
    fn basis_property() {
        assert!(basis_property_check(&Fan::braid(4).unwrap(), &braid_directions(4)).unwrap());
        assert!(!basis_property_check(&Fan::braid(3).unwrap(), &[LatticeVector::from_i64(&[1, -1, 0])]).unwrap());
        let p2 = Fan::projective(2).unwrap();
        // no direction of this pair is orthogonal to the ray (-1,-1)
        let dirs = [LatticeVector::from_i64(&[1, 0]), LatticeVector::from_i64(&[0, 1])];
        assert!(!basis_property_check(&p2, &dirs).unwrap());
        let dirs = [
            LatticeVector::from_i64(&[1, 0]),
            LatticeVector::from_i64(&[0, 1]),
            LatticeVector::from_i64(&[1, -1]),
        ];
        assert!(basis_property_check(&p2, &dirs).unwrap());
    }

    #[test]
    fn constant_weight_balanced() {
        for n in 2..=4 {
            let f = Fan::braid(n).unwrap();
            let r = check_k_balancing(&f, &ones(&f), &braid_directions(n)).unwrap();
            assert!(r.pass, "n = {n}");
            assert!(r.relations_checked > 0);
        }
        let p2 = Fan::projective(2).unwrap();
        let dirs = [LatticeVector::from_i64(&[1, 0]), LatticeVector::from_i64(&[0, 1])];
        assert!(check_k_balancing(&p2, &ones(&p2), &dirs).unwrap().pass);
    }

    #[test]
    fn delta_weight_unbalanced() {
        let f = Fan::braid(3).unwrap();
        let mut g = vec![Polynomial::zero(); f.num_cones()];
        g[f.maximal_cones()[0]] = Polynomial::one();
        let r = check_k_balancing(&f, &g, &braid_directions(3)).unwrap();
        assert!(!r.pass);
        assert!(r.failures.iter().all(|x| !x.residual.is_zero()));
    }

    #[test]
    fn braid2_balanced_iff_equal_rays() {
        let f = Fan::braid(2).unwrap();
        let dirs = braid_directions(2);
        for (a, b, ok) in [(3, 3, true), (1, 2, false)] {
            let g = vec![Polynomial::constant(7), Polynomial::constant(a), Polynomial::constant(b)];
            assert_eq!(check_k_balancing(&f, &g, &dirs).unwrap().pass, ok);
        }
    }

    #[test]
    fn minkowski_fundamental_class() {
        let f = Fan::braid(3).unwrap();
        assert!(minkowski_balancing_check(&f, &ones(&f), 0).unwrap().pass);
        let mut c = vec![Polynomial::zero(); f.num_cones()];
        c[f.maximal_cones()[0]] = Polynomial::one();
        let r = minkowski_balancing_check(&f, &c, 0).unwrap();
        assert!(!r.pass);
        assert_eq!(r.failures.len(), 2);
    }

    #[test]
    fn weight_length_checked() {
        let f = Fan::braid(3).unwrap();
        assert!(check_k_balancing(&f, &[Polynomial::one()], &braid_directions(3)).is_err());
    }
}
