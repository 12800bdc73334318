//! Simplicial fans in a lattice `N` of rank `d`.
//!
//! Rays are stored both as given and in plain coordinates of `Z^d`; a fan
//! whose rays are quotient vectors in `Z^(d+1) / Z(1, ..., 1)` is read in the
//! coordinates of [`LatticeVector::plain_coords`]. Cones are sorted ray-index
//! sets, closed under taking faces, ordered by dimension and then
//! lexicographically. Cone 0 is always the zero cone.

mod balancing;
pub mod fm;
mod product;

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{rational_rank, smith_normal_form, IntegerMatrix, LatticeVector};
use crate::braid::{self, subset_cmp, Flag};
use crate::error::{Error, Result};

pub use balancing::{
    balancing_relations, basis_property_check, braid_directions, check_k_balancing, minkowski_balancing_check,
    pq_nq, BalancingFailure, BalancingRelation, BalancingReport, MinkowskiReport, RaySplit,
};
pub use product::{
    displaced_intersection_nonempty, is_generic, is_generic_general, product_rule,
    relative_interiors_meet, p2_example, DisplacementTable, P2Report,
};

#[derive(Debug)]
pub struct Fan {
    rank: usize,
    rays: Vec<LatticeVector>,
    plain: Vec<Vec<BigInt>>,
    cones: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    complete: bool,
    quotient: bool,
    braid_n: Option<usize>,
    supercones: OnceLock<Vec<Vec<usize>>>,
}

impl Clone for Fan {
    fn clone(&self) -> Self {
        Self {
            rank: self.rank,
            rays: self.rays.clone(),
            plain: self.plain.clone(),
            cones: self.cones.clone(),
            index: self.index.clone(),
            complete: self.complete,
            quotient: self.quotient,
            braid_n: self.braid_n,
            supercones: OnceLock::new(),
        }
    }
}

fn cone_cmp(a: &Vec<usize>, b: &Vec<usize>) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

impl Fan {
    /// Builds a fan from rays and a list of cones (typically the maximal
    /// ones); the list is closed under faces. Rays must be primitive and
    /// every cone simplicial.
    pub fn new(rank: usize, rays: Vec<LatticeVector>, cones: Vec<Vec<usize>>, complete: bool) -> Result<Self> {
        let quotient = rays.first().is_some_and(|r| r.quotient);
        let mut plain = Vec::with_capacity(rays.len());
        for r in &rays {
            if r.quotient != quotient || r.ambient_rank() != rank {
                return Err(Error::InvalidFan(format!("ray {r} does not live in a lattice of rank {rank}")));
            }
            let p = r.plain_coords();
            let g = p.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            if !g.is_one() {
                return Err(Error::InvalidFan(format!("ray {r} is not primitive")));
            }
            plain.push(p);
        }
        if plain.iter().collect::<HashSet<_>>().len() != plain.len() {
            return Err(Error::InvalidFan("repeated ray".into()));
        }
        let mut all: HashSet<Vec<usize>> = HashSet::new();
        all.insert(Vec::new());
        for i in 0..rays.len() {
            all.insert(vec![i]);
        }
        for c in cones {
            let mut c = c;
            c.sort_unstable();
            c.dedup();
            if c.iter().any(|&i| i >= rays.len()) {
                return Err(Error::InvalidFan(format!("cone {c:?} refers to a missing ray")));
            }
            let vecs: Vec<Vec<BigInt>> = c.iter().map(|&i| plain[i].clone()).collect();
            if rational_rank(&vecs) != c.len() {
                return Err(Error::InvalidFan(format!("cone {c:?} is not simplicial")));
            }
            if all.contains(&c) {
                continue;
            }
            for mask in 0u64..(1u64 << c.len()) {
                let face: Vec<usize> = (0..c.len()).filter(|k| mask >> k & 1 == 1).map(|k| c[k]).collect();
                all.insert(face);
            }
        }
        let mut cones: Vec<Vec<usize>> = all.into_iter().collect();
        cones.sort_by(cone_cmp);
        Ok(Self::assemble(rank, rays, plain, cones, complete, quotient, None))
    }

    fn assemble(
        rank: usize,
        rays: Vec<LatticeVector>,
        plain: Vec<Vec<BigInt>>,
        cones: Vec<Vec<usize>>,
        complete: bool,
        quotient: bool,
        braid_n: Option<usize>,
    ) -> Self {
        let index = cones.iter().cloned().enumerate().map(|(k, c)| (c, k)).collect();
        Self { rank, rays, plain, cones, index, complete, quotient, braid_n, supercones: OnceLock::new() }
    }

    /// The permutohedral fan on `[n]`. Ray `k` is `e_S` for the `k`-th
    /// nonempty proper subset in subset order; cone `k` is the `k`-th flag of
    /// [`braid::enumerate_flags`].
    pub fn braid(n: usize) -> Result<Self> {
        Self::braid_capped(n, braid::effective_cap())
    }

    pub fn braid_capped(n: usize, cap: usize) -> Result<Self> {
        let flags = braid::enumerate_flags_capped(n, cap)?;
        let mut f = Self::from_flags(n, &flags, true)?;
        f.braid_n = Some(n);
        Ok(f)
    }

    /// The fan in `Z^n / Z(1, ..., 1)` whose cones are the given flags,
    /// which must be closed under taking subflags and listed in canonical
    /// order. Cone `k` is `flags[k]`; rays are the sets used, in subset order.
    pub fn from_flags(n: usize, flags: &[Flag], complete: bool) -> Result<Self> {
        let mut subsets: Vec<u32> = flags.iter().flat_map(|f| f.sets().iter().copied()).collect();
        subsets.sort_by(|a, b| subset_cmp(*a, *b));
        subsets.dedup();
        let position: HashMap<u32, usize> = subsets.iter().enumerate().map(|(k, &s)| (s, k)).collect();
        let rays: Vec<LatticeVector> = subsets.iter().map(|&s| braid::subset_ray(n, s)).collect();
        let plain = rays.iter().map(LatticeVector::plain_coords).collect();
        let cones: Vec<Vec<usize>> = flags
            .iter()
            .map(|f| f.sets().iter().map(|s| position[s]).collect())
            .collect();
        if !cones.windows(2).all(|w| cone_cmp(&w[0], &w[1]).is_lt()) || cones.first().is_some_and(|c| !c.is_empty()) {
            return Err(Error::InvalidFan("flags are not in canonical order".into()));
        }
        let fan = Self::assemble(n - 1, rays, plain, cones, complete, true, None);
        for c in fan.cones() {
            for k in 0..c.len() {
                let mut face = c.clone();
                face.remove(k);
                if fan.cone_index(&face).is_none() {
                    return Err(Error::InvalidFan(format!("flag list is not closed: missing face of {c:?}")));
                }
            }
        }
        Ok(fan)
    }

    /// The fan of projective space `P^d`: rays `e_1, ..., e_d, -(e_1 + ... + e_d)`.
    pub fn projective(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Precondition("P^0 has no fan rays".into()));
        }
        let mut rays = Vec::new();
        for i in 0..d {
            let mut c = vec![0i64; d];
            c[i] = 1;
            rays.push(LatticeVector::from_i64(&c));
        }
        rays.push(LatticeVector::from_i64(&vec![-1; d]));
        let maximal = (0..=d).map(|skip| (0..=d).filter(|&i| i != skip).collect()).collect();
        Self::new(d, rays, maximal, true)
    }

    /// A fan in `Z^4` satisfying the index condition but not unimodular:
    /// the cone on `e1, e1 + 2 e2` together with the rays `e3` and `e4`.
    pub fn non_unimodular_example() -> Self {
        let rays = vec![
            LatticeVector::from_i64(&[1, 0, 0, 0]),
            LatticeVector::from_i64(&[1, 2, 0, 0]),
            LatticeVector::from_i64(&[0, 0, 1, 0]),
            LatticeVector::from_i64(&[0, 0, 0, 1]),
        ];
        Self::new(4, rays, vec![vec![0, 1]], false).expect("valid fan")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Largest cone dimension.
    pub fn dim(&self) -> usize {
        self.cones.last().map_or(0, Vec::len)
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn ray_coords(&self, i: usize) -> &[BigInt] {
        &self.plain[i]
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn cone(&self, k: usize) -> &[usize] {
        &self.cones[k]
    }

    pub fn num_cones(&self) -> usize {
        self.cones.len()
    }

    pub fn cone_index(&self, rays: &[usize]) -> Option<usize> {
        let mut key = rays.to_vec();
        key.sort_unstable();
        self.index.get(&key).copied()
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn braid_n(&self) -> Option<usize> {
        self.braid_n
    }

    /// Cone index of a flag of a permutohedral fan.
    pub fn flag_cone(&self, f: &Flag) -> Option<usize> {
        let n = self.braid_n?;
        if f.n() != n {
            return None;
        }
        let rays: Vec<usize> = f
            .sets()
            .iter()
            .map(|&s| self.rays.iter().position(|r| *r == braid::subset_ray(n, s)))
            .collect::<Option<_>>()?;
        self.cone_index(&rays)
    }

    /// The common face of two cones.
    pub fn meet(&self, a: usize, b: usize) -> usize {
        let (x, y) = (&self.cones[a], &self.cones[b]);
        let common: Vec<usize> = x.iter().copied().filter(|r| y.binary_search(r).is_ok()).collect();
        self.index[&common]
    }

    pub fn contains_face(&self, cone: usize, face: usize) -> bool {
        let c = &self.cones[cone];
        self.cones[face].iter().all(|r| c.binary_search(r).is_ok())
    }

    /// For each cone, the cones strictly containing it.
    pub fn supercones(&self) -> &[Vec<usize>] {
        self.supercones.get_or_init(|| {
            let mut up = vec![Vec::new(); self.cones.len()];
            for (k, c) in self.cones.iter().enumerate() {
                let full = (1u64 << c.len()) - 1;
                for mask in 0..full {
                    let face: Vec<usize> =
                        (0..c.len()).filter(|t| mask >> t & 1 == 1).map(|t| c[t]).collect();
                    up[self.index[&face]].push(k);
                }
            }
            up
        })
    }

    pub fn maximal_cones(&self) -> Vec<usize> {
        let up = self.supercones();
        (0..self.cones.len()).filter(|&k| up[k].is_empty()).collect()
    }

    /// Converts a vector of `M = Hom(N, Z)` to plain coordinates. For a
    /// quotient fan a vector of length `d + 1` must have coordinate sum 0.
    pub fn dual_coords(&self, q: &LatticeVector) -> Result<Vec<BigInt>> {
        if q.coords.len() == self.rank {
            return Ok(q.coords.clone());
        }
        if self.quotient && q.coords.len() == self.rank + 1 {
            let sum: BigInt = q.coords.iter().sum();
            if !sum.is_zero() {
                return Err(Error::Precondition(format!("{q} has nonzero coordinate sum, not in M")));
            }
            return Ok(q.coords[..self.rank].to_vec());
        }
        Err(Error::Precondition(format!("{q} has the wrong length for a rank-{} lattice", self.rank)))
    }

    /// Converts a vector of `N` to plain coordinates.
    pub fn point_coords(&self, v: &LatticeVector) -> Result<Vec<BigInt>> {
        if v.coords.len() == self.rank && !v.quotient {
            return Ok(v.coords.clone());
        }
        if self.quotient && v.coords.len() == self.rank + 1 {
            return Ok(LatticeVector::in_quotient(v.coords.clone()).plain_coords());
        }
        Err(Error::Precondition(format!("{v} has the wrong length for a rank-{} lattice", self.rank)))
    }

    fn ray_matrix(&self, rays: &[usize]) -> IntegerMatrix {
        let cols: Vec<Vec<BigInt>> = rays.iter().map(|&r| self.plain[r].clone()).collect();
        IntegerMatrix::from_columns(&cols, self.rank)
    }

    pub fn to_json(&self) -> FanJson {
        FanJson {
            rank: self.rank,
            rays: self
                .rays
                .iter()
                .map(|r| r.canonical().coords.iter().map(|c| c.to_i64().unwrap_or(i64::MAX)).collect())
                .collect(),
            cones: self.cones.clone(),
            complete: self.complete,
        }
    }

    /// Rays of length `rank + 1` are read as quotient vectors.
    pub fn from_json(j: &FanJson) -> Result<Self> {
        let rays = j
            .rays
            .iter()
            .map(|r| {
                if r.len() == j.rank + 1 {
                    Ok(LatticeVector::quotient_from_i64(r).canonical())
                } else if r.len() == j.rank {
                    Ok(LatticeVector::from_i64(r))
                } else {
                    Err(Error::InvalidFan(format!("ray {r:?} has the wrong length")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(j.rank, rays, j.cones.clone(), j.complete)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FanJson {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
    pub complete: bool,
}

/// Star of a cone: the fan of cones containing `sigma`, in `N / N_sigma`.
pub fn star_fan(fan: &Fan, sigma: usize) -> Result<Fan> {
    if sigma >= fan.num_cones() {
        return Err(Error::Precondition(format!("cone {sigma} is not in the fan")));
    }
    let s = fan.cone(sigma).to_vec();
    let k = s.len();
    let d = fan.rank;
    let snf = smith_normal_form(&fan.ray_matrix(&s));
    let project = |x: &[BigInt]| -> Vec<BigInt> {
        let full: Vec<BigInt> = (0..d)
            .map(|i| (0..d).map(|j| &snf.u[(i, j)] * &x[j]).sum())
            .collect();
        let tail = full[k..].to_vec();
        let g = tail.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if g.is_zero() {
            tail
        } else {
            tail.into_iter().map(|x| x / &g).collect()
        }
    };
    let mut above: Vec<usize> = fan.supercones()[sigma].clone();
    above.sort_unstable();
    let mut new_rays: Vec<Vec<BigInt>> = Vec::new();
    let mut ray_of: HashMap<usize, usize> = HashMap::new();
    for &t in &above {
        for &r in fan.cone(t) {
            if s.contains(&r) || ray_of.contains_key(&r) {
                continue;
            }
            let img = project(&fan.plain[r]);
            let idx = match new_rays.iter().position(|x| *x == img) {
                Some(i) => i,
                None => {
                    new_rays.push(img);
                    new_rays.len() - 1
                }
            };
            ray_of.insert(r, idx);
        }
    }
    let cones = above
        .iter()
        .map(|&t| fan.cone(t).iter().filter(|r| !s.contains(r)).map(|r| ray_of[r]).collect())
        .collect();
    let rays = new_rays.into_iter().map(LatticeVector::new).collect();
    Fan::new(d - k, rays, cones, fan.complete)
}

/// Product fan in `N_a + N_b`.
pub fn product_fan(a: &Fan, b: &Fan) -> Result<Fan> {
    let (da, db) = (a.rank, b.rank);
    let mut rays = Vec::new();
    for r in &a.plain {
        let mut c = r.clone();
        c.extend(std::iter::repeat_n(BigInt::zero(), db));
        rays.push(LatticeVector::new(c));
    }
    for r in &b.plain {
        let mut c = vec![BigInt::zero(); da];
        c.extend(r.iter().cloned());
        rays.push(LatticeVector::new(c));
    }
    let off = a.num_rays();
    let mut cones = Vec::new();
    for x in a.maximal_cones() {
        for y in b.maximal_cones() {
            let mut c = a.cone(x).to_vec();
            c.extend(b.cone(y).iter().map(|r| r + off));
            cones.push(c);
        }
    }
    Fan::new(da + db, rays, cones, a.complete && b.complete)
}

/// The subfan formed by the listed cones, which must be closed under faces.
/// Rays not used by any listed cone are dropped.
pub fn subfan(fan: &Fan, cones: &[usize]) -> Result<Fan> {
    let listed: HashSet<usize> = cones.iter().copied().chain([0]).collect();
    for &c in &listed {
        if c >= fan.num_cones() {
            return Err(Error::Precondition(format!("cone {c} is not in the fan")));
        }
        let rays = fan.cone(c);
        for mask in 0u64..(1u64 << rays.len()) {
            let face: Vec<usize> = (0..rays.len()).filter(|t| mask >> t & 1 == 1).map(|t| rays[t]).collect();
            if !listed.contains(&fan.index[&face]) {
                return Err(Error::InvalidFan(format!("face {face:?} of cone {rays:?} is not listed")));
            }
        }
    }
    let mut used: Vec<usize> = listed.iter().flat_map(|&c| fan.cone(c).iter().copied()).collect();
    used.sort_unstable();
    used.dedup();
    let new_index: HashMap<usize, usize> = used.iter().enumerate().map(|(k, &r)| (r, k)).collect();
    let rays = used.iter().map(|&r| fan.rays[r].clone()).collect();
    let new_cones = listed
        .iter()
        .map(|&c| fan.cone(c).iter().map(|r| new_index[r]).collect())
        .collect();
    Fan::new(fan.rank, rays, new_cones, false)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConeFailure {
    pub cone: Vec<usize>,
    pub invariant_factors: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnimodularityReport {
    pub pass: bool,
    pub cones_checked: usize,
    pub failures: Vec<ConeFailure>,
}

/// Every maximal cone is generated by part of a basis of `N`.
pub fn check_unimodular(fan: &Fan) -> UnimodularityReport {
    let maximal = fan.maximal_cones();
    let mut failures = Vec::new();
    for &c in &maximal {
        let rays = fan.cone(c);
        if rays.is_empty() {
            continue;
        }
        let snf = smith_normal_form(&fan.ray_matrix(rays));
        if !(snf.rank == rays.len() && snf.all_ones()) {
            failures.push(ConeFailure {
                cone: rays.to_vec(),
                invariant_factors: snf.diagonal.iter().map(|x| x.to_string()).collect(),
            });
        }
    }
    UnimodularityReport { pass: failures.is_empty(), cones_checked: maximal.len(), failures }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairFailure {
    pub sigma: Vec<usize>,
    pub tau: Vec<usize>,
    pub index: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexReport {
    pub pass: bool,
    pub pairs_checked: usize,
    pub failures: Vec<PairFailure>,
}

/// Index of the lattice spanned by the `k` rows of `rows` (row-major, `d`
/// columns) in `Z^d`, with machine integers. `Some(None)` means infinite
/// index; `None` means overflow.
fn small_index(rows: &mut [i64], k: usize, d: usize) -> Option<Option<u64>> {
    let mut top = 0;
    let mut index: u64 = 1;
    for col in 0..d {
        loop {
            let pivot = (top..k)
                .filter(|&r| rows[r * d + col] != 0)
                .min_by_key(|&r| rows[r * d + col].unsigned_abs());
            let Some(p) = pivot else { break };
            for c in 0..d {
                rows.swap(top * d + c, p * d + c);
            }
            let mut clean = true;
            for r in top + 1..k {
                if rows[r * d + col] == 0 {
                    continue;
                }
                let f = rows[r * d + col] / rows[top * d + col];
                for c in col..d {
                    let delta = f.checked_mul(rows[top * d + c])?;
                    rows[r * d + c] = rows[r * d + c].checked_sub(delta)?;
                }
                if rows[r * d + col] != 0 {
                    clean = false;
                }
            }
            if clean {
                index = index.checked_mul(rows[top * d + col].unsigned_abs())?;
                top += 1;
                break;
            }
        }
        if top == k && col + 1 < d {
            return Some(None);
        }
    }
    Some((top == d).then_some(index))
}

/// `[N : N_sigma + N_tau]` is 1 or infinite for every pair of cones. For a
/// cone `sigma` with saturated `N_sigma`, the index equals that of the image
/// of `N_tau` in `N / N_sigma`, computed through a Smith form of `sigma`
/// once. Pairs containing a cone that alone spans `N` are skipped.
pub fn check_index_condition(fan: &Fan) -> IndexReport {
    let d = fan.rank;
    let small: Option<Vec<Vec<i64>>> = fan
        .plain
        .iter()
        .map(|r| r.iter().map(ToPrimitive::to_i64).collect())
        .collect();
    let full_index = |rays: &[usize]| -> Option<BigInt> {
        let cols: Vec<Vec<BigInt>> = rays.iter().map(|&r| fan.plain[r].clone()).collect();
        crate::algebra::lattice_index(&cols, d)
    };
    let spans_n: Vec<bool> = (0..fan.num_cones())
        .map(|c| fan.cone(c).len() == d && full_index(fan.cone(c)).is_some_and(|i| i.is_one()))
        .collect();
    // rows of U below rank(sigma), applied to every ray, when N_sigma is saturated
    let projection = |a: usize| -> Option<(usize, Vec<Vec<i64>>)> {
        small.as_ref()?;
        let snf = smith_normal_form(&fan.ray_matrix(fan.cone(a)));
        if snf.rank != fan.cone(a).len() || !snf.all_ones() {
            return None;
        }
        let m = d - snf.rank;
        let rows: Vec<Vec<BigInt>> = (snf.rank..d).map(|i| (0..d).map(|j| snf.u[(i, j)].clone()).collect()).collect();
        let images = fan
            .plain
            .iter()
            .map(|ray| {
                rows.iter()
                    .map(|row| row.iter().zip(ray).map(|(x, y)| x * y).sum::<BigInt>().to_i64())
                    .collect::<Option<Vec<i64>>>()
            })
            .collect::<Option<Vec<_>>>()?;
        Some((m, images))
    };

    let mut failures = Vec::new();
    let mut pairs = 0usize;
    let mut scratch: Vec<i64> = Vec::new();
    for a in 0..fan.num_cones() {
        if spans_n[a] {
            pairs += fan.num_cones() - a;
            continue;
        }
        let proj = projection(a);
        for b in a..fan.num_cones() {
            pairs += 1;
            if spans_n[b] || fan.cone(a).len() + fan.cone(b).len() < d {
                continue;
            }
            let fast = proj.as_ref().and_then(|(m, images)| {
                scratch.clear();
                for &r in fan.cone(b) {
                    scratch.extend_from_slice(&images[r]);
                }
                small_index(&mut scratch, fan.cone(b).len(), *m)
            });
            let idx = match fast {
                Some(res) => res.map(BigInt::from),
                None => {
                    let mut union: Vec<usize> = fan.cone(a).iter().chain(fan.cone(b)).copied().collect();
                    union.sort_unstable();
                    union.dedup();
                    full_index(&union)
                }
            };
            if let Some(i) = idx {
                if !i.is_one() {
                    failures.push(PairFailure {
                        sigma: fan.cone(a).to_vec(),
                        tau: fan.cone(b).to_vec(),
                        index: i.to_string(),
                    });
                }
            }
        }
    }
    IndexReport { pass: failures.is_empty(), pairs_checked: pairs, failures }
}
