//! Named matroids, exhaustive enumeration of small matroids, and the JSON form.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::Matroid;
use crate::braid::{elements, full_set};
use crate::error::{Error, Result};

fn mask(xs: &[usize]) -> u32 {
    xs.iter().fold(0, |m, &e| m | 1 << (e - 1))
}

fn subsets_of_size(n: usize, k: usize) -> Vec<u32> {
    (0..=full_set(n)).filter(|s| s.count_ones() as usize == k).collect()
}

/// Bases of a rank-`r` matroid on `[n]` given by its non-bases.
fn from_nonbases(n: usize, r: usize, nonbases: &[&[usize]]) -> Result<Matroid> {
    let bad: Vec<u32> = nonbases.iter().map(|s| mask(s)).collect();
    let bases: Vec<u32> = subsets_of_size(n, r).into_iter().filter(|b| !bad.contains(b)).collect();
    Matroid::from_bases(n, &bases)
}

const FANO_LINES: [[usize; 3]; 7] = [[1, 2, 3], [1, 4, 5], [1, 6, 7], [2, 4, 6], [2, 5, 7], [3, 4, 7], [3, 5, 6]];

pub fn catalog_names() -> Vec<&'static str> {
    vec!["fano", "nonfano", "vamos", "k4", "u<r><n> (e.g. u24, u35)"]
}

/// Looks up a named matroid: `fano`, `nonfano`, `vamos`, `k4`, or `u<r><n>`
/// (also `u<r>,<n>`).
pub fn catalog(name: &str) -> Result<Matroid> {
    let key = name.trim().to_ascii_lowercase().replace(['-', '_', ' '], "");
    let m = match key.as_str() {
        "fano" => {
            let lines: Vec<&[usize]> = FANO_LINES.iter().map(|l| l.as_slice()).collect();
            from_nonbases(7, 3, &lines)?
        }
        "nonfano" => {
            // the Fano plane with the line {3,5,6} relaxed
            let lines: Vec<&[usize]> = FANO_LINES[..6].iter().map(|l| l.as_slice()).collect();
            from_nonbases(7, 3, &lines)?
        }
        "vamos" => from_nonbases(
            8,
            4,
            &[&[1, 2, 3, 4], &[1, 2, 5, 6], &[1, 2, 7, 8], &[3, 4, 5, 6], &[3, 4, 7, 8]],
        )?,
        "k4" => Matroid::from_graph(&[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)])?,
        "k3" => Matroid::from_graph(&[(1, 2), (2, 3), (1, 3)])?,
        k if k.starts_with('u') => {
            let rest = &k[1..];
            let (r, n) = match rest.split_once(',') {
                Some((a, b)) => (a.parse::<usize>(), b.parse::<usize>()),
                None if rest.len() == 2 => (rest[..1].parse::<usize>(), rest[1..].parse::<usize>()),
                None => return Err(Error::Parse(format!("unknown matroid {name:?}"))),
            };
            match (r, n) {
                (Ok(r), Ok(n)) => Matroid::uniform(r, n)?,
                _ => return Err(Error::Parse(format!("unknown matroid {name:?}"))),
            }
        }
        _ => return Err(Error::Parse(format!("unknown matroid {name:?}"))),
    };
    let label = match key.as_str() {
        k if k.starts_with('u') => m.name().unwrap_or(k).to_string(),
        k => k.to_string(),
    };
    Ok(m.with_name(label))
}

/// Every loopless matroid on `[n]` (labelled, so distinct rank tables),
/// `1 <= n <= 5`.
pub fn all_loopless_matroids(n: usize) -> Result<Vec<Matroid>> {
    if !(1..=5).contains(&n) {
        return Err(Error::Precondition(format!("exhaustive enumeration supports 1 <= n <= 5, got {n}")));
    }
    let full = full_set(n);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for r in 1..=n {
        let cands = subsets_of_size(n, r);
        for fam in 1u64..(1u64 << cands.len()) {
            let bases: Vec<u32> = (0..cands.len()).filter(|k| fam >> k & 1 == 1).map(|k| cands[k]).collect();
            if bases.iter().fold(0, |a, b| a | b) != full || !exchange_holds(&bases) {
                continue;
            }
            let m = Matroid::from_bases(n, &bases)?;
            if seen.insert(m.rank_table().to_vec()) {
                out.push(m);
            }
        }
    }
    Ok(out)
}

fn exchange_holds(bases: &[u32]) -> bool {
    bases.iter().all(|&b1| {
        bases.iter().all(|&b2| {
            (0..32).filter(|x| (b1 & !b2) >> x & 1 == 1).all(|x| {
                (0..32)
                    .filter(|y| (b2 & !b1) >> y & 1 == 1)
                    .any(|y| bases.contains(&((b1 & !(1 << x)) | 1 << y)))
            })
        })
    })
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum MatroidJson {
    Bases { n: usize, bases: Vec<Vec<usize>> },
    Rank { n: usize, rank: Vec<u8> },
    Uniform { uniform: [usize; 2] },
    Graph { graph: Vec<[usize; 2]> },
    Catalog { catalog: String },
}

impl MatroidJson {
    pub fn build(&self) -> Result<Matroid> {
        match self {
            MatroidJson::Bases { n, bases } => {
                let masks = bases
                    .iter()
                    .map(|b| {
                        if b.iter().any(|&e| e == 0 || e > *n) {
                            Err(Error::Parse(format!("basis {b:?} has an element outside [1, {n}]")))
                        } else {
                            Ok(mask(b))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Matroid::from_bases(*n, &masks)
            }
            MatroidJson::Rank { n, rank } => Matroid::from_rank_table(*n, rank.clone()),
            MatroidJson::Uniform { uniform: [r, n] } => Matroid::uniform(*r, *n),
            MatroidJson::Graph { graph } => {
                Matroid::from_graph(&graph.iter().map(|e| (e[0], e[1])).collect::<Vec<_>>())
            }
            MatroidJson::Catalog { catalog: name } => catalog(name),
        }
    }

    pub fn parse(text: &str) -> Result<Matroid> {
        let j: MatroidJson = serde_json::from_str(text)?;
        j.build()
    }
}

impl Matroid {
    pub fn to_json(&self) -> MatroidJson {
        MatroidJson::Bases { n: self.n(), bases: self.bases().into_iter().map(elements).collect() }
    }
}
