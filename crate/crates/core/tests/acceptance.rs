//! Acceptance suite. Runs every criterion, prints one line each, and exits
//! nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use gw_core::braid::{enumerate_flags, Flag, SubsetE};
use gw_core::classes::{
    aij_symmetry_check, csm_balancing_check, csm_weight, mcy_dual_weight, pointed_convolution_check,
    psi_formula_check, quot_weight, sub_weight, taut_weight, tutte_identity_with, verify_tutte_identity,
};
use gw_core::fan::{check_index_condition, check_unimodular, p2_example, Fan};
use gw_core::matroid::{all_loopless_matroids, catalog, successive_minor_eval, Matroid};
use gw_core::polytope::{gp_delta_i, weight_delta_i_closed_form, weight_of_polytope};
use gw_core::weights::{
    balance_check_braid, balance_check_matroid, default_generic_vector, Domain, ProductEngine, Weight,
};
use gw_core::{LatticeVector, Polynomial};
use num_bigint::BigInt;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn same(a: &Polynomial, b: &Polynomial) -> bool {
    (a - b).is_zero()
}

fn delta_weights(n: usize) -> Result<Vec<(u32, Weight)>, String> {
    (1..1u32 << n)
        .map(|bits| {
            let p = gp_delta_i(n, &SubsetE::new(n, bits)).map_err(e)?;
            Ok((bits, weight_of_polytope(&p).map_err(e)?))
        })
        .collect()
}

/// `v_i = 2^i - 1` and `v_i = 3^i`: all pairwise differences distinct.
fn other_generic_vectors(n: usize) -> Vec<LatticeVector> {
    let a = (1..=n as u32).map(|i| (1i64 << i) - 1).collect::<Vec<_>>();
    let b = (1..=n as u32).map(|i| 3i64.pow(i)).collect::<Vec<_>>();
    vec![LatticeVector::from_i64(&a), LatticeVector::from_i64(&b)]
}

fn criterion_1() -> Outcome {
    let r = p2_example().map_err(e)?;
    ensure(r.m_expected, || format!("m = {:?}", r.m))?;
    ensure(r.pass, || format!("Bm = {:?}, BmB = {:?}", r.bm, r.bmb))?;
    Ok(format!("m = {:?}, Bm = I, BmB = B", r.m))
}

fn criterion_2() -> Outcome {
    for n in 3..=6 {
        let f = Fan::braid(n).map_err(e)?;
        let u = check_unimodular(&f);
        let i = check_index_condition(&f);
        ensure(u.pass && i.pass, || format!("braid n={n}: unimodular {} index {}", u.pass, i.pass))?;
    }
    let f = Fan::non_unimodular_example();
    let i = check_index_condition(&f);
    let u = check_unimodular(&f);
    ensure(i.pass, || "non-unimodular example fails the index condition".into())?;
    ensure(!u.pass && !u.failures.is_empty(), || "non-unimodular example passes unimodularity".into())?;
    let w = &u.failures[0];
    Ok(format!("braid n=3..6 strongly unimodular; witness cone {:?} factors {:?}", w.cone, w.invariant_factors))
}

fn criterion_3() -> Outcome {
    let mut checked = 0;
    for n in 3..=5 {
        let one = Weight::constant(Domain::Braid(n), 1).map_err(e)?;
        ensure(balance_check_braid(&one).map_err(e)?.pass, || format!("constant 1 fails at n={n}"))?;
        for (bits, w) in delta_weights(n)? {
            let closed = weight_delta_i_closed_form(n, &SubsetE::new(n, bits)).map_err(e)?;
            ensure(w == closed, || format!("lattice count differs from closed form, I={bits:b}"))?;
            let r = balance_check_braid(&w).map_err(e)?;
            ensure(r.pass, || format!("g_Delta_I fails, n={n} I={bits:b}: {:?}", r.failures.first()))?;
            checked += 1;
        }
    }
    let flags = enumerate_flags(3).map_err(e)?;
    let mut accepted = Vec::new();
    for f in &flags {
        let w = Weight::indicator(Domain::Braid(3), f).map_err(e)?;
        if balance_check_braid(&w).map_err(e)?.pass {
            accepted.push(f.clone());
        }
    }
    if !accepted.is_empty() {
        return Err(format!(
            "{checked} Delta_I weights balanced, {} of {} indicators rejected; indicator of {} balances \
             (the zero cone occurs in no relation: {})",
            flags.len() - accepted.len(),
            flags.len(),
            accepted.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(", "),
            point_class_note()?
        ));
    }
    Ok(format!("{checked} Delta_I weights balanced; all {} indicators rejected", flags.len()))
}

/// The indicator `δ` of the empty flag behaves as the class of a point:
/// `g · δ = g(F_max) δ`, the rank of the class times `δ`, for the basket.
fn point_class_note() -> Outcome {
    let engine = ProductEngine::new(3, None).map_err(e)?;
    let delta = Weight::indicator(Domain::Braid(3), &Flag::empty(3)).map_err(e)?;
    let top = enumerate_flags(3).map_err(e)?.pop().expect("maximal flag");
    for (_, g) in delta_weights(3)? {
        let rank = g.value(&top).map_err(e)?.clone();
        let expected = delta.map(|x| x * &rank).map_err(e)?;
        if engine.product(&g, &delta).map_err(e)? != expected {
            return Ok("product check inconclusive".into());
        }
    }
    Ok("g * delta = g(F_max) delta for every Delta_I, so it is the weight of a point class".into())
}

fn criterion_4() -> Outcome {
    let mut out = Vec::new();
    for name in ["u24", "fano", "nonfano", "vamos"] {
        let m = catalog(name).map_err(e)?;
        let g = mcy_dual_weight(&m).map_err(e)?;
        let r = balance_check_matroid(&m, &g).map_err(e)?;
        ensure(r.pass, || format!("{name}: {:?}", r.failures.first()))?;
        out.push(format!("{name} ({} relations)", r.relations_checked));
    }
    Ok(out.join(", "))
}

/// Integer points of `Δ_I + Δ_J` tight on every member of the flag, by a
/// plain box scan of the defining inequalities.
fn oracle_face_count(n: usize, i: u32, j: u32, f: &Flag) -> i64 {
    let z = |s: u32| -> i64 {
        let d = |set: u32| i64::from(s & set != 0) - i64::from(s & (1 << set.trailing_zeros()) != 0);
        d(i) + d(j)
    };
    let full = (1u32 << n) - 1;
    let sum = |s: u32, x: &[i64]| -> i64 { (0..n).filter(|k| s >> k & 1 == 1).map(|k| x[k]).sum() };
    let mut count = 0;
    let width = 5i64;
    for code in 0..width.pow(n as u32) {
        let x: Vec<i64> = (0..n).map(|k| code / width.pow(k as u32) % width - 2).collect();
        if sum(full, &x) == z(full)
            && (1..full).all(|s| sum(s, &x) <= z(s))
            && f.sets().iter().all(|&s| sum(s, &x) == z(s))
        {
            count += 1;
        }
    }
    count
}

fn criterion_5() -> Outcome {
    let mut pairs = 0;
    for n in 3..=4 {
        let engine = ProductEngine::new(n, None).map_err(e)?;
        let basket = delta_weights(n)?;
        for (i, gi) in &basket {
            for (j, gj) in &basket {
                let p = engine.product(gi, gj).map_err(e)?;
                for (f, v) in p.flags().iter().zip(p.values()) {
                    let expected = oracle_face_count(n, *i, *j, f);
                    ensure(v.as_constant() == Some(BigInt::from(expected)), || {
                        format!("n={n} I={i:b} J={j:b} F={f}: product {v}, lattice count {expected}")
                    })?;
                }
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} pairs match lattice counts on every flag"))
}

fn criterion_6() -> Outcome {
    let mut products = 0usize;
    for n in 3..=4 {
        let basket: Vec<Weight> = delta_weights(n)?.into_iter().map(|x| x.1).collect();
        let one = Weight::constant(Domain::Braid(n), 1).map_err(e)?;
        let mut vectors = vec![default_generic_vector(n)];
        vectors.extend(other_generic_vectors(n));
        let mut reference: Option<Vec<Vec<Weight>>> = None;
        for v in &vectors {
            let engine = ProductEngine::new(n, Some(v)).map_err(e)?;
            let k = basket.len();
            let mut table = vec![Vec::with_capacity(k); k];
            for (a, ga) in basket.iter().enumerate() {
                ensure(engine.product(ga, &one).map_err(e)? == *ga, || format!("unit law fails, v={v}"))?;
                for gb in &basket {
                    table[a].push(engine.product(ga, gb).map_err(e)?);
                }
            }
            for a in 0..k {
                for b in 0..k {
                    ensure(table[a][b] == table[b][a], || format!("not commutative, v={v}"))?;
                    for c in 0..k {
                        let left = engine.product(&table[a][b], &basket[c]).map_err(e)?;
                        let right = engine.product(&basket[a], &table[b][c]).map_err(e)?;
                        ensure(left == right, || format!("not associative at ({a},{b},{c}), v={v}"))?;
                        products += 2;
                    }
                }
            }
            match &reference {
                None => reference = Some(table),
                Some(r) => ensure(*r == table, || format!("products depend on v = {v}"))?,
            }
        }
    }
    Ok(format!("unital, commutative, associative, v-independent ({products} triple products)"))
}

fn criterion_7() -> Outcome {
    let mut ms = Vec::new();
    for n in 1..=4 {
        ms.extend(all_loopless_matroids(n).map_err(e)?);
    }
    let small = ms.len();
    ms.push(Matroid::uniform(2, 5).map_err(e)?);
    ms.push(Matroid::uniform(3, 5).map_err(e)?);
    let mut engines: Vec<(usize, Vec<ProductEngine>)> = Vec::new();
    for n in 2..=5 {
        let mut vs = vec![default_generic_vector(n)];
        vs.extend(other_generic_vectors(n));
        engines.push((n, vs.iter().map(|v| ProductEngine::new(n, Some(v))).collect::<Result<_, _>>().map_err(e)?));
    }
    for m in &ms {
        let reports = match engines.iter().find(|(n, _)| *n == m.n()) {
            Some((_, es)) => es.iter().map(|en| tutte_identity_with(m, en)).collect::<Result<Vec<_>, _>>(),
            None => verify_tutte_identity(m, None).map(|r| vec![r]),
        }
        .map_err(e)?;
        for r in reports {
            ensure(r.pass, || format!("{}: {} vs {}", r.matroid, r.lhs, r.rhs))?;
        }
    }
    Ok(format!("{small} loopless matroids on <= 4 elements plus U(2,5), U(3,5), three vectors each"))
}

fn criterion_8() -> Outcome {
    let mut walls = 0;
    for name in ["u24", "u35", "fano", "k4"] {
        let m = catalog(name).map_err(e)?;
        let r = m.rank();
        for k in 0..r {
            let w = csm_weight(&m, k).map_err(e)?;
            let sign = if (r - 1 - k) % 2 == 0 { 1 } else { -1 };
            for (f, v) in w.flags().iter().zip(w.values()) {
                let expected = if f.len() == k {
                    successive_minor_eval(|minor| Ok(Polynomial::constant(minor.beta()?)), &m, f)
                        .map_err(e)?
                        .scale(&BigInt::from(sign))
                } else {
                    Polynomial::zero()
                };
                ensure(same(v, &expected), || format!("{name} k={k} F={f}: {v} vs {expected}"))?;
            }
            let b = csm_balancing_check(&m, k).map_err(e)?;
            ensure(b.pass, || format!("{name} k={k}: unbalanced walls {:?}", b.failures))?;
            walls += b.walls_checked;
        }
    }
    Ok(format!("values match and {walls} walls balanced"))
}

fn criterion_9() -> Outcome {
    let mut count = 0;
    for name in ["u23", "u24", "u25", "u35", "k3", "k4", "fano", "nonfano", "vamos"] {
        let m = catalog(name).map_err(e)?;
        for i in 1..=m.n() {
            for r in [pointed_convolution_check(&m, i).map_err(e)?, psi_formula_check(&m, i).map_err(e)?] {
                ensure(r.pass, || format!("{} {}: difference {}", r.matroid, r.identity, r.difference))?;
                count += 1;
            }
            for j in 1..=m.n() {
                if i != j {
                    let r = aij_symmetry_check(&m, i, j).map_err(e)?;
                    ensure(r.pass, || format!("{} {}: difference {}", r.matroid, r.identity, r.difference))?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} identities with zero difference"))
}

fn criterion_10() -> Outcome {
    let mut flags = 0;
    for name in ["k3", "u12", "u23", "u13", "u24", "u34", "u15", "u25", "u35", "u45"] {
        let m = catalog(name).map_err(e)?;
        let taut = taut_weight(&m).map_err(e)?;
        let sub = sub_weight(&m).map_err(e)?;
        let quot = quot_weight(&m).map_err(e)?;
        for (k, f) in taut.flags().iter().enumerate() {
            let t = &taut.values()[k];
            ensure(same(&t.evaluate("v", 0), &sub.values()[k]), || format!("{name} F={f}: v=0"))?;
            ensure(same(&t.evaluate("u", 0), &quot.values()[k]), || format!("{name} F={f}: u=0"))?;
            flags += 1;
        }
    }
    Ok(format!("{flags} flag values agree under both specializations"))
}

fn tutte_recurrence_holds(m: &Matroid) -> Result<bool, String> {
    let t = m.tutte_poly();
    let full = m.ground();
    for e_ in 1..=m.n() {
        let bit = 1u32 << (e_ - 1);
        let del = m.delete_element(e_).map_err(e)?.tutte_poly();
        let con = m.contract_element(e_).map_err(e)?.tutte_poly();
        let expected = if m.rank_of(bit) == 0 {
            &Polynomial::var("y") * &del
        } else if m.rank_of(full & !bit) < m.rank() {
            &Polynomial::var("x") * &con
        } else {
            &del + &con
        };
        if !same(&t, &expected) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn criterion_11() -> Outcome {
    let mut ms = Vec::new();
    for n in 1..=4 {
        ms.extend(all_loopless_matroids(n).map_err(e)?);
    }
    for name in ["fano", "nonfano", "vamos", "k4", "u25", "u35"] {
        ms.push(catalog(name).map_err(e)?);
    }
    // a matroid with a loop and a parallel pair
    ms.push(Matroid::from_graph(&[(1, 1), (1, 2), (1, 2), (2, 3)]).map_err(e)?);
    let one_minus_t = Polynomial::univariate("t", &[1, -1]);
    let t_minus_one = Polynomial::univariate("t", &[-1, 1]);
    for m in &ms {
        let chi = m.char_poly();
        ensure(same(&chi, &m.char_poly_mobius()), || format!("{}: Möbius and rank sums differ", m.n()))?;
        let sign = BigInt::from(if m.rank() % 2 == 0 { 1 } else { -1 });
        let from_tutte = m.tutte_poly().substitute("x", &one_minus_t).evaluate("y", 0).scale(&sign);
        ensure(same(&chi, &from_tutte.strip_unused()), || format!("χ vs T(1-t, 0): {chi} / {from_tutte}"))?;
        if m.is_loopless() && m.rank() > 0 {
            ensure(chi.exact_div(&t_minus_one).is_ok(), || format!("t - 1 does not divide {chi}"))?;
        }
        ensure(tutte_recurrence_holds(m)?, || "deletion-contraction fails".into())?;
    }
    Ok(format!("{} matroids", ms.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, u64); 11] = [
        ("P^2 product example", criterion_1, 1),
        ("strong unimodularity", criterion_2, 10),
        ("K-balancing soundness", criterion_3, 30),
        ("dual motivic Chern weights balanced", criterion_4, 120),
        ("product rule vs Minkowski lattice counts", criterion_5, 120),
        ("ring laws of the product", criterion_6, 300),
        ("Tutte identity", criterion_7, 300),
        ("CSM Minkowski weights", criterion_8, 60),
        ("convolution, psi and A_ij identities", criterion_9, 60),
        ("tautological specializations", criterion_10, 60),
        ("matroid polynomial cross-checks", criterion_11, 30),
    ];
    let mut failed = 0;
    for (k, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(*limit) => {
                Err(format!("{detail}; took {elapsed:.2?}, limit {limit} s"))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS [{elapsed:.2?}] {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL [{elapsed:.2?}] {name}: {why}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
