use std::path::Path;

use gw_core::braid::SubsetE;
use gw_core::classes::{
    aij_symmetry_check, csm_balancing_check, csm_weight, label, mcy_dual_weight, pointed_convolution_check,
    psi_formula_check, quot_weight, sub_weight, taut_weight, verify_tutte_identity, IdentityReport,
};
use gw_core::fan::{check_index_condition, check_unimodular, p2_example, FanJson};
use gw_core::matroid::{catalog, MatroidJson};
use gw_core::polytope::{gp_delta_i, gp_minkowski_sum, weight_of_polytope, GenPermutohedronJson};
use gw_core::weights::{balance_check_braid, balance_check_matroid, zero_extend, ProductEngine};
use gw_core::{Domain, Fan, GenPermutohedron, LatticeVector, Matroid, Weight};
use serde_json::{json, Value};

use crate::output::{usage, CliError, CliResult, Output};
use crate::{
    ClassArgs, ClassKind, Command, FanCommand, FanSource, Identity, Invariant, MatroidArgs, MatroidSource,
    VerifyArgs, WeightBuilder, WeightCommand,
};

pub fn run(cmd: &Command) -> CliResult<Output> {
    match cmd {
        Command::Fan(FanCommand::Check(src)) => fan_check(src),
        Command::Fan(FanCommand::Show(src)) => {
            let fan = load_fan(src)?;
            Ok(Output::report(to_value(&fan.to_json()), true))
        }
        Command::Matroid(args) => matroid_cmd(args),
        Command::Weight(w) => weight_cmd(w),
        Command::Class(args) => class_cmd(args),
        Command::Verify(args) => verify_cmd(args),
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> CliResult<Vec<T>> {
    s.split(',')
        .map(|x| x.trim())
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<T>().map_err(|_| usage(format!("bad {what} {s:?}"))))
        .collect()
}

fn parse_vector(v: Option<&str>, n: usize) -> CliResult<Option<LatticeVector>> {
    let Some(v) = v else { return Ok(None) };
    let coords: Vec<i64> = parse_list(v, "vector")?;
    if coords.len() != n {
        return Err(usage(format!("--v needs {n} coordinates, got {}", coords.len())));
    }
    Ok(Some(LatticeVector::from_i64(&coords)))
}

fn load_fan(src: &FanSource) -> CliResult<Fan> {
    let chosen = [src.path.is_some(), src.braid.is_some(), src.projective.is_some(), src.non_unimodular_example];
    if chosen.iter().filter(|&&b| b).count() != 1 {
        return Err(usage("give exactly one of PATH, --braid, --projective, --non-unimodular-example"));
    }
    if let Some(p) = &src.path {
        let j: FanJson = serde_json::from_str(&read(p)?).map_err(gw_core::Error::from)?;
        return Ok(Fan::from_json(&j)?);
    }
    if let Some(n) = src.braid {
        return Ok(Fan::braid(n)?);
    }
    if let Some(d) = src.projective {
        return Ok(Fan::projective(d)?);
    }
    Ok(Fan::non_unimodular_example())
}

fn fan_check(src: &FanSource) -> CliResult<Output> {
    let fan = load_fan(src)?;
    let uni = check_unimodular(&fan);
    let index = check_index_condition(&fan);
    let status = match (uni.pass, index.pass) {
        (true, true) => "strongly unimodular",
        (false, _) => "unimodularity failed",
        (true, false) => "index condition failed",
    };
    let pass = uni.pass && index.pass;
    let j = json!({
        "status": status,
        "pass": pass,
        "rank": fan.rank(),
        "rays": fan.num_rays(),
        "cones": fan.num_cones(),
        "unimodularity": uni,
        "index_condition": index,
    });
    Ok(Output::report(j, pass))
}

fn load_matroid(src: &MatroidSource) -> CliResult<Matroid> {
    let chosen = [src.uniform.is_some(), src.catalog.is_some(), src.graph.is_some(), src.matroid.is_some()];
    match chosen.iter().filter(|&&b| b).count() {
        1 => {}
        0 => return Err(usage("no matroid given: use --uniform, --catalog, --graph or --matroid")),
        _ => return Err(usage("give only one of --uniform, --catalog, --graph, --matroid")),
    }
    if let Some(u) = &src.uniform {
        let rn: Vec<usize> = parse_list(u, "uniform spec")?;
        let [r, n] = rn[..] else { return Err(usage(format!("--uniform needs R,N, got {u:?}"))) };
        return Ok(Matroid::uniform(r, n)?.with_name(format!("U({r},{n})")));
    }
    if let Some(name) = &src.catalog {
        return Ok(catalog(name)?);
    }
    if let Some(p) = &src.graph {
        let text = read(p)?;
        let edges = parse_edges(&text)?;
        let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        return Ok(Matroid::from_graph(&edges)?.with_name(name));
    }
    let p = src.matroid.as_ref().expect("counted above");
    let m = MatroidJson::parse(&read(p)?)?;
    Ok(match m.name() {
        Some(_) => m,
        None => {
            let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            m.with_name(name)
        }
    })
}

/// JSON `[[a,b], ...]`, or one edge `a b` per line (`#` comments).
fn parse_edges(text: &str) -> CliResult<Vec<(usize, usize)>> {
    if text.trim_start().starts_with('[') {
        let e: Vec<[usize; 2]> = serde_json::from_str(text).map_err(gw_core::Error::from)?;
        return Ok(e.into_iter().map(|[a, b]| (a, b)).collect());
    }
    let mut edges = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let xs: Vec<usize> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|_| gw_core::Error::Parse(format!("line {}: {line:?}", k + 1))))
            .collect::<Result<_, _>>()?;
        let [a, b] = xs[..] else {
            return Err(gw_core::Error::Parse(format!("line {}: expected two vertices", k + 1)).into());
        };
        edges.push((a, b));
    }
    Ok(edges)
}

fn sets_json(sets: &[u32]) -> Value {
    to_value(&sets.iter().map(|&s| gw_core::braid::elements(s)).collect::<Vec<_>>())
}

fn matroid_cmd(args: &MatroidArgs) -> CliResult<Output> {
    let mut src = args.source.clone();
    if let Some(name) = &args.name {
        if src.catalog.is_some() {
            return Err(usage("catalog name given twice"));
        }
        src.catalog = Some(name.clone());
    }
    let m = load_matroid(&src)?;
    let poly = |key: &str, p: gw_core::Polynomial| Output::report(json!({ "matroid": label(&m), key: p.to_string() }), true);
    Ok(match args.invariant {
        Invariant::Summary => Output::report(to_value(&m.summary()), true),
        Invariant::CharPoly => poly("char_poly", m.char_poly()),
        Invariant::ReducedCharPoly => poly("reduced_char_poly", m.reduced_char_poly()?),
        Invariant::Beta => Output::report(json!({ "matroid": label(&m), "beta": m.beta()?.to_string() }), true),
        Invariant::Tutte => poly("tutte", m.tutte_poly()),
        Invariant::RankGenerating => poly("rank_generating", m.rank_generating_poly()),
        Invariant::Independence => poly("independence", m.independence_poly()),
        Invariant::Flats => list_output(&m, "flats", m.flats().iter().map(|&f| sets_json(&[f])[0].clone()).collect()),
        Invariant::Bases => list_output(&m, "bases", m.bases().iter().map(|&b| sets_json(&[b])[0].clone()).collect()),
        Invariant::Flags => {
            let fs = m.flags_of_flats()?;
            list_output(&m, "flags", fs.iter().map(|f| sets_json(f.sets())).collect())
        }
    })
}

fn list_output(m: &Matroid, key: &str, items: Vec<Value>) -> Output {
    let rows: Vec<Value> = items.iter().map(|x| json!({ key: x.to_string() })).collect();
    let j = json!({ "matroid": label(m), key: items });
    Output::table(j, &rows, true)
}

fn delta(n: usize, spec: &str) -> CliResult<GenPermutohedron> {
    let elems: Vec<usize> = parse_list(spec, "subset")?;
    Ok(gp_delta_i(n, &SubsetE::from_elements(n, &elems)?)?)
}

fn need_n(n: Option<usize>, what: &str) -> CliResult<usize> {
    n.ok_or_else(|| usage(format!("{what} needs --n")))
}

/// Every weight named by the builder: files first, then each `--delta`, then
/// `--ones`.
fn build_weights(b: &WeightBuilder) -> CliResult<Vec<Weight>> {
    let mut out = Vec::new();
    for p in &b.files {
        out.push(Weight::parse(&read(p)?)?);
    }
    if !b.deltas.is_empty() || b.ones {
        let n = need_n(b.n, "--delta/--ones")?;
        for d in &b.deltas {
            out.push(weight_of_polytope(&delta(n, d)?)?);
        }
        if b.ones {
            out.push(Weight::constant(Domain::Braid(n), 1)?);
        }
    }
    Ok(out)
}

fn balance(w: &Weight) -> CliResult<gw_core::weights::WeightBalanceReport> {
    Ok(match w.domain() {
        Domain::Braid(_) => balance_check_braid(w)?,
        Domain::Matroid(m) => balance_check_matroid(m, w)?,
    })
}

fn weight_cmd(cmd: &WeightCommand) -> CliResult<Output> {
    match cmd {
        WeightCommand::Balance(b) => {
            // several --delta describe their Minkowski sum
            let w = if b.files.is_empty() && b.deltas.len() > 1 && !b.ones {
                let n = need_n(b.n, "--delta")?;
                let mut p = GenPermutohedron::point(n)?;
                for d in &b.deltas {
                    p = gp_minkowski_sum(&p, &delta(n, d)?)?;
                }
                weight_of_polytope(&p)?
            } else {
                let mut ws = build_weights(b)?;
                if ws.len() != 1 {
                    return Err(usage(format!("balance needs one weight, got {}", ws.len())));
                }
                ws.remove(0)
            };
            let r = balance(&w)?;
            let mut j = to_value(&r);
            j["domain"] = Value::String(w.domain().describe());
            Ok(Output::report(j, r.pass))
        }
        WeightCommand::Product { weights, v } => {
            let ws = build_weights(weights)?;
            let [a, b] = &ws[..] else {
                return Err(usage(format!("product needs two weights, got {}", ws.len())));
            };
            let n = a.n();
            let v = parse_vector(v.as_deref(), n)?;
            let engine = ProductEngine::new(n, v.as_ref())?;
            Ok(Output::weight(&engine.product(a, b)?))
        }
        WeightCommand::Polytope { deltas, n, file } => {
            let p = match file {
                Some(path) => {
                    if !deltas.is_empty() {
                        return Err(usage("give --file or --delta, not both"));
                    }
                    let j: GenPermutohedronJson = serde_json::from_str(&read(path)?).map_err(gw_core::Error::from)?;
                    GenPermutohedron::from_json(&j)?
                }
                None => {
                    let n = need_n(*n, "--delta")?;
                    let mut p = GenPermutohedron::point(n)?;
                    for d in deltas {
                        p = gp_minkowski_sum(&p, &delta(n, d)?)?;
                    }
                    p
                }
            };
            Ok(Output::weight(&weight_of_polytope(&p)?))
        }
    }
}

fn csm_range(m: &Matroid) -> std::ops::Range<usize> {
    0..m.rank()
}

fn class_cmd(args: &ClassArgs) -> CliResult<Output> {
    let m = load_matroid(&args.source)?;
    if args.k.is_some() && args.kind != ClassKind::Csm {
        return Err(usage("--k applies to csm only"));
    }
    let w = match args.kind {
        ClassKind::Mcy => mcy_dual_weight(&m)?,
        ClassKind::Taut => taut_weight(&m)?,
        ClassKind::Sub => sub_weight(&m)?,
        ClassKind::Quot => quot_weight(&m)?,
        ClassKind::Csm => match args.k {
            Some(k) => csm_weight(&m, k)?,
            None => {
                let ws = csm_range(&m).map(|k| Ok((k, csm_weight(&m, k)?))).collect::<CliResult<Vec<_>>>()?;
                let j = Value::Array(ws.iter().map(|(k, w)| json!({ "k": k, "weight": w.to_json() })).collect());
                let tagged: Vec<(Option<String>, &Weight)> = ws.iter().map(|(k, w)| (Some(k.to_string()), w)).collect();
                return Ok(Output::weights(&tagged, j));
            }
        },
    };
    Ok(Output::weight(&w))
}

fn elements_or_all(m: &Matroid, i: Option<usize>) -> Vec<usize> {
    match i {
        Some(i) => vec![i],
        None => (1..=m.n()).collect(),
    }
}

fn identity_output(key: &str, reports: Vec<IdentityReport>) -> Output {
    let pass = reports.iter().all(|r| r.pass);
    let items: Vec<Value> = reports.iter().map(to_value).collect();
    if items.len() == 1 {
        return Output::table(items[0].clone(), &items, pass);
    }
    Output::table(json!({ "identity": key, "pass": pass, "reports": items }), &items, pass)
}

fn check_rows(key: &str, rows: Vec<Value>) -> Output {
    let pass = rows.iter().all(|r| r["pass"] == Value::Bool(true));
    Output::table(json!({ "identity": key, "pass": pass, "checks": rows }), &rows, pass)
}

fn verify_cmd(args: &VerifyArgs) -> CliResult<Output> {
    let has_matroid =
        args.source.uniform.is_some() || args.source.catalog.is_some() || args.source.graph.is_some() || args.source.matroid.is_some();
    match args.identity {
        Identity::P2Example => {
            let r = p2_example()?;
            let pass = r.pass;
            let mut j = to_value(&r);
            j["identity"] = Value::String("p2-example".into());
            Ok(Output::report(j, pass))
        }
        Identity::BalanceBraid => {
            let mut rows = Vec::new();
            if has_matroid {
                let m = load_matroid(&args.source)?;
                for (name, w) in [("taut", taut_weight(&m)?), ("mcy zero-extended", zero_extend(&m, &mcy_dual_weight(&m)?)?)] {
                    let r = balance_check_braid(&w)?;
                    rows.push(json!({ "weight": format!("{name} {}", label(&m)), "relations_checked": r.relations_checked, "pass": r.pass }));
                }
            } else {
                let n = need_n(args.n, "balance-braid without a matroid")?;
                gw_core::braid::check_cap(n, gw_core::braid::effective_cap())?;
                for bits in 1..1u32 << n {
                    let s = SubsetE::new(n, bits);
                    let r = balance_check_braid(&weight_of_polytope(&gp_delta_i(n, &s)?)?)?;
                    rows.push(json!({ "weight": format!("Delta {:?}", s.elements()), "relations_checked": r.relations_checked, "pass": r.pass }));
                }
            }
            Ok(check_rows("balance-braid", rows))
        }
        Identity::BalanceMatroid => {
            let m = load_matroid(&args.source)?;
            let mut rows = Vec::new();
            for (name, w) in [("mcy", mcy_dual_weight(&m)?), ("one", Weight::constant(Domain::Matroid(m.clone()), 1)?)] {
                let r = balance_check_matroid(&m, &w)?;
                rows.push(json!({ "weight": format!("{name} {}", label(&m)), "relations_checked": r.relations_checked, "pass": r.pass }));
            }
            Ok(check_rows("balance-matroid", rows))
        }
        Identity::ProductOracle => {
            let n = args.n.unwrap_or(3);
            let v = parse_vector(args.v.as_deref(), n)?;
            let engine = ProductEngine::new(n, v.as_ref())?;
            let subsets: Vec<SubsetE> = (1..1u32 << n).map(|b| SubsetE::new(n, b)).collect();
            let mut rows = Vec::new();
            for (x, a) in subsets.iter().enumerate() {
                for b in &subsets[x..] {
                    let (pa, pb) = (gp_delta_i(n, a)?, gp_delta_i(n, b)?);
                    let prod = engine.product(&weight_of_polytope(&pa)?, &weight_of_polytope(&pb)?)?;
                    let sum = weight_of_polytope(&gp_minkowski_sum(&pa, &pb)?)?;
                    rows.push(json!({ "i": a.elements(), "j": b.elements(), "pass": prod == sum }));
                }
            }
            Ok(check_rows("product-oracle", rows))
        }
        Identity::TutteIdentity => {
            let m = load_matroid(&args.source)?;
            let v = parse_vector(args.v.as_deref(), m.n())?;
            Ok(identity_output("tutte-identity", vec![verify_tutte_identity(&m, v.as_ref())?]))
        }
        Identity::PointedConvolution => {
            let m = load_matroid(&args.source)?;
            let rs = elements_or_all(&m, args.i).into_iter().map(|i| pointed_convolution_check(&m, i)).collect::<Result<_, _>>()?;
            Ok(identity_output("pointed-convolution", rs))
        }
        Identity::PsiFormula => {
            let m = load_matroid(&args.source)?;
            let rs = elements_or_all(&m, args.i).into_iter().map(|i| psi_formula_check(&m, i)).collect::<Result<_, _>>()?;
            Ok(identity_output("psi-formula", rs))
        }
        Identity::AijSymmetry => {
            let m = load_matroid(&args.source)?;
            let mut rs = Vec::new();
            for i in elements_or_all(&m, args.i) {
                for j in elements_or_all(&m, args.j) {
                    if i < j || (args.i.is_some() && args.j.is_some() && i != j) {
                        rs.push(aij_symmetry_check(&m, i, j)?);
                    }
                }
            }
            if rs.is_empty() {
                return Err(usage("aij-symmetry needs two distinct elements"));
            }
            Ok(identity_output("aij-symmetry", rs))
        }
        Identity::CsmBalancing => {
            let m = load_matroid(&args.source)?;
            let ks: Vec<usize> = match args.k {
                Some(k) => vec![k],
                None => csm_range(&m).collect(),
            };
            let mut rows = Vec::new();
            for k in ks {
                let r = csm_balancing_check(&m, k)?;
                rows.push(json!({ "matroid": label(&m), "k": k, "walls_checked": r.walls_checked, "pass": r.pass }));
            }
            Ok(check_rows("csm-balancing", rows))
        }
    }
}
