use std::io::Read;

use num_traits::{One, ToPrimitive};
use serde_json::json;

use spf_core::approx::{
    evaluate_against_bounds, r1_estimate, r2_estimate, ApproxResult, TprimeSchedule,
};
use spf_core::automata::{
    aut_of_with_cap, eppstein, exponent_bfs_with_cap, is_irreducible, is_synchronizing,
    reset_threshold_exact_with_cap, sg_diameter,
};
use spf_core::boolmat::MatrixSet;
use spf_core::families;
use spf_core::lp::{reduce_columns, solve_dual, solve_primal};
use spf_core::semigroup::{build_ht, prune_ht_columns, ProductLayer};
use spf_core::spf::{
    check_stagnation_theorems, spf_k_with, spf_kbar_with, spf_keq_with, stagnations, SpfOptions,
    SpfSeries,
};
use spf_core::{rat, rat_int, Rational};

use crate::format::{
    parse_matrix_set, rational_decimal, rational_exact, serialize_matrix_set, word_string,
};
use crate::{AutomataOp, CliError, Command, Family, InputArg, Method, Mode};

/// Safety horizon when no --t-max is given.
const AUTO_T_CAP: usize = 500;

struct Caps {
    layer: usize,
    letter: u128,
    state: usize,
    closure: usize,
}

fn env_usize(name: &str, default: usize) -> usize {
    std::env::var(name)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(default)
}

fn caps() -> Caps {
    Caps {
        layer: env_usize("SPF_LAYER_CAP", spf_core::semigroup::DEFAULT_LAYER_CAP),
        letter: std::env::var("SPF_LETTER_CAP")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(spf_core::automata::DEFAULT_LETTER_CAP),
        state: env_usize("SPF_STATE_CAP", spf_core::automata::DEFAULT_STATE_CAP),
        closure: env_usize("SPF_CLOSURE_CAP", spf_core::automata::DEFAULT_CLOSURE_CAP),
    }
}

fn read_input(arg: &InputArg) -> Result<MatrixSet, CliError> {
    let text = if arg.input == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::Parse(format!("reading stdin: {e}")))?;
        buf
    } else {
        std::fs::read_to_string(&arg.input)
            .map_err(|e| CliError::Parse(format!("reading {}: {e}", arg.input)))?
    };
    parse_matrix_set(&text)
}

fn parse_tprime(spec: &str) -> Result<TprimeSchedule, CliError> {
    match spec {
        "log" => Ok(TprimeSchedule::LogN),
        "1.5log" => Ok(TprimeSchedule::ThreeHalvesLogN),
        "2log" => Ok(TprimeSchedule::TwoLogN),
        other => other
            .parse()
            .map(TprimeSchedule::Explicit)
            .map_err(|_| CliError::Usage(format!("bad --tprime value `{other}`"))),
    }
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Check { input, json } => cmd_check(&input, json),
        Command::Spf {
            input,
            t_max,
            mode,
            no_prune,
            json,
        } => cmd_spf(&input, t_max, mode, no_prune, json),
        Command::Approx {
            input,
            method,
            tprime,
            json,
        } => cmd_approx(&input, method, &tprime, json),
        Command::Automata {
            input,
            op,
            transpose,
            json,
        } => cmd_automata(&input, op, transpose, json),
        Command::Gen {
            family,
            n,
            m,
            seed,
            id,
        } => cmd_gen(family, n, m, seed, id.as_deref()),
        Command::Corpus {
            family,
            count,
            seed,
            n,
            m,
            tprime,
            json,
        } => cmd_corpus(family, count, seed, n, m, &tprime, json),
    }
}

fn cmd_check(input: &InputArg, json: bool) -> Result<(), CliError> {
    let caps = caps();
    let set = read_input(input)?;
    let nz = set.is_nz();
    let irreducible = is_irreducible(&set);
    let primitive = if nz {
        irreducible && is_synchronizing(&aut_of_with_cap(&set, caps.letter)?)
    } else {
        false
    };
    // the exponent search can overflow its cap even when primitivity is
    // already settled; report what is known, then surface the overflow
    let (exponent, capped) = if primitive {
        match exponent_bfs_with_cap(&set, caps.closure) {
            Ok(found) => (found, None),
            Err(e) => (None, Some(e)),
        }
    } else {
        (None, None)
    };
    if json {
        let (exp, witness) = match &exponent {
            Some((e, w)) => (json!(e), json!(word_string(w))),
            None => (json!(null), json!(null)),
        };
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "n": set.dim(),
                "m": set.len(),
                "nz": nz,
                "irreducible": irreducible,
                "primitive": primitive,
                "exponent": exp,
                "exponent_search_capped": capped.is_some(),
                "witness": witness,
            }))
            .unwrap()
        );
    } else {
        println!("n: {}", set.dim());
        println!("m: {}", set.len());
        println!("nz: {nz}");
        println!("irreducible: {irreducible}");
        println!("primitive: {primitive}");
        match (&exponent, &capped) {
            (Some((e, w)), _) => {
                println!("exponent: {e}");
                println!("witness: {}", word_string(w));
            }
            (None, Some(_)) => println!("exponent: unknown (search capped)"),
            (None, None) => println!("exponent: -"),
        }
    }
    match capped {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn series_for(set: &MatrixSet, mode: Mode, t_max: usize, opts: &SpfOptions) -> Option<SpfSeries> {
    match mode {
        Mode::K => Some(spf_k_with(set, t_max, opts)),
        Mode::Kbar => Some(spf_kbar_with(set, t_max, opts)),
        Mode::Keq => Some(spf_keq_with(set, t_max, opts)),
        Mode::All => None,
    }
}

fn cmd_spf(
    input: &InputArg,
    t_max: Option<usize>,
    mode: Mode,
    no_prune: bool,
    json: bool,
) -> Result<(), CliError> {
    let set = read_input(input)?;
    let caps = caps();
    let opts = SpfOptions {
        layer_cap: caps.layer,
        ..if no_prune {
            SpfOptions::no_pruning()
        } else {
            SpfOptions::default()
        }
    };

    // the horizon: explicit, or wherever the leading series stops
    let horizon_probe = t_max.unwrap_or(AUTO_T_CAP);
    let (k, kbar, keq) = match mode {
        Mode::All => {
            let k = spf_k_with(&set, horizon_probe, &opts);
            let t_view = k.last_t();
            let kbar = spf_kbar_with(&set, t_view, &opts);
            let keq = spf_keq_with(&set, t_view, &opts);
            (Some(k), Some(kbar), Some(keq))
        }
        m => {
            let series = series_for(&set, m, horizon_probe, &opts).unwrap();
            match m {
                Mode::K => (Some(series), None, None),
                Mode::Kbar => (None, Some(series), None),
                Mode::Keq => (None, None, Some(series)),
                Mode::All => unreachable!(),
            }
        }
    };

    let lead = k.as_ref().or(kbar.as_ref()).or(keq.as_ref()).unwrap();
    let t_view = lead.last_t();
    let cap_hit = [&k, &kbar, &keq]
        .iter()
        .filter_map(|s| s.as_ref())
        .any(|s| s.cap_hit);
    let stagnation = stagnations(lead);
    let in_run = |t: usize| {
        stagnation
            .intervals
            .iter()
            .any(|&(start, len)| t >= start && t <= start + len)
    };

    let mode_name = match mode {
        Mode::K => "k",
        Mode::Kbar => "kbar",
        Mode::Keq => "keq",
        Mode::All => "all",
    };
    let meta = [
        ("input", input.input.clone()),
        ("n", set.dim().to_string()),
        ("m", set.len().to_string()),
        ("seed", "-".to_string()),
        ("mode", mode_name.to_string()),
        ("pruning", if no_prune { "off" } else { "on" }.to_string()),
        ("t_max", t_view.to_string()),
        ("cap_hit", cap_hit.to_string()),
    ];

    let cell = |series: &Option<SpfSeries>, t: usize| -> Option<Rational> {
        series.as_ref().and_then(|s| s.value_clamped(t))
    };

    if json {
        let mut rows = Vec::new();
        for t in 0..=t_view {
            let mut row = serde_json::Map::new();
            row.insert("t".into(), json!(t));
            for (name, series) in [("k", &k), ("kbar", &kbar), ("keq", &keq)] {
                if series.is_some() {
                    match cell(series, t) {
                        Some(v) => {
                            row.insert(name.into(), json!(rational_exact(&v)));
                            row.insert(
                                format!("{name}_dec"),
                                json!(v.to_f64().unwrap_or(f64::NAN)),
                            );
                        }
                        None => {
                            row.insert(name.into(), json!(null));
                        }
                    }
                }
            }
            row.insert("stagnation".into(), json!(in_run(t)));
            rows.push(serde_json::Value::Object(row));
        }
        let meta_obj: serde_json::Map<String, serde_json::Value> = meta
            .iter()
            .map(|(k, v)| (k.to_string(), json!(v)))
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({ "metadata": meta_obj, "rows": rows })).unwrap()
        );
    } else {
        for (key, value) in &meta {
            println!("# {key},{value}");
        }
        let mut header = vec!["t".to_string()];
        for (name, series) in [("k", &k), ("kbar", &kbar), ("keq", &keq)] {
            if series.is_some() {
                header.push(name.to_string());
                header.push(format!("{name}_dec"));
            }
        }
        header.push("stagnation".into());
        println!("{}", header.join(","));
        for t in 0..=t_view {
            let mut cells = vec![t.to_string()];
            for series in [&k, &kbar, &keq] {
                if series.is_some() {
                    match cell(series, t) {
                        Some(v) => {
                            cells.push(rational_exact(&v));
                            cells.push(rational_decimal(&v));
                        }
                        None => {
                            cells.push(String::new());
                            cells.push(String::new());
                        }
                    }
                }
            }
            cells.push(if in_run(t) { "1" } else { "0" }.to_string());
            println!("{}", cells.join(","));
        }
    }
    Ok(())
}

fn cmd_approx(input: &InputArg, method: Method, tprime: &str, json: bool) -> Result<(), CliError> {
    let set = read_input(input)?;
    let caps = caps();
    let schedule = parse_tprime(tprime)?;
    let tprime_value = schedule.evaluate(set.dim());
    let opts = SpfOptions {
        layer_cap: caps.layer,
        ..SpfOptions::default()
    };
    let series = spf_k_with(&set, tprime_value.max(1), &opts);
    let l0 = stagnations(&series).l0;
    let fit: ApproxResult = match method {
        Method::R1 => r1_estimate(&series, l0, tprime_value)?,
        Method::R2 => r2_estimate(&series, l0, tprime_value)?,
    };
    let verdict = evaluate_against_bounds(&set, &fit)?;
    let method_name = match method {
        Method::R1 => "r1",
        Method::R2 => "r2",
    };
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "method": method_name,
                "l0": fit.l0,
                "tprime": fit.tprime,
                "tprime_rule": schedule.describe(),
                "slope": rational_exact(&fit.slope),
                "intercept": rational_exact(&fit.intercept),
                "estimate": rational_exact(&fit.estimate),
                "estimate_dec": fit.estimate.to_f64().unwrap_or(f64::NAN),
                "diameter_lower": verdict.diameter_lower,
                "eppstein_upper": verdict.eppstein_upper,
                "respects_lower": verdict.respects_lower,
                "respects_upper": verdict.respects_upper,
            }))
            .unwrap()
        );
    } else {
        println!("method: {method_name}");
        println!("l0: {}", fit.l0);
        println!("tprime: {} ({})", fit.tprime, schedule.describe());
        println!("slope: {}", rational_exact(&fit.slope));
        println!("intercept: {}", rational_exact(&fit.intercept));
        println!(
            "estimate: {} ({})",
            rational_exact(&fit.estimate),
            rational_decimal(&fit.estimate)
        );
        println!("diameter_lower: {}", verdict.diameter_lower);
        println!("eppstein_upper: {}", verdict.eppstein_upper);
        println!("respects_lower: {}", verdict.respects_lower);
        println!("respects_upper: {}", verdict.respects_upper);
    }
    Ok(())
}

fn cmd_automata(
    input: &InputArg,
    op: AutomataOp,
    transpose: bool,
    json: bool,
) -> Result<(), CliError> {
    let caps = caps();
    let mut set = read_input(input)?;
    if transpose {
        set = set.transpose();
    }
    if !set.is_nz() {
        return Err(CliError::Usage("the set must be NZ".into()));
    }
    let dfa = aut_of_with_cap(&set, caps.letter)?;
    let (key, value, witness): (&str, serde_json::Value, Option<String>) = match op {
        AutomataOp::Rt => {
            let res = reset_threshold_exact_with_cap(&dfa, caps.state)?;
            if !res.synchronizing {
                return Err(CliError::Usage("the DFA is not synchronizing".into()));
            }
            (
                "rt",
                json!(res.rt.unwrap()),
                res.witness_word.as_deref().map(word_string),
            )
        }
        AutomataOp::Eppstein => {
            let res = eppstein(&dfa)?;
            (
                "eppstein",
                json!(res.rt.unwrap()),
                res.witness_word.as_deref().map(word_string),
            )
        }
        AutomataOp::Diameter => ("diameter", json!(sg_diameter(&dfa)), None),
        AutomataOp::Sync => ("synchronizing", json!(is_synchronizing(&dfa)), None),
    };
    if json {
        let mut obj = serde_json::Map::new();
        obj.insert("n".into(), json!(dfa.n()));
        obj.insert("letters".into(), json!(dfa.letter_count()));
        obj.insert("transpose".into(), json!(transpose));
        obj.insert(key.into(), value);
        if let Some(w) = witness {
            obj.insert("witness".into(), json!(w));
        }
        println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::Value::Object(obj)).unwrap()
        );
    } else {
        println!("n: {}", dfa.n());
        println!("letters: {}", dfa.letter_count());
        println!("transpose: {transpose}");
        println!("{key}: {value}");
        if let Some(w) = witness {
            println!("witness: {w}");
        }
    }
    Ok(())
}

fn cmd_gen(
    family: Family,
    n: Option<usize>,
    m: Option<usize>,
    seed: u64,
    id: Option<&str>,
) -> Result<(), CliError> {
    let need_n = || n.ok_or_else(|| CliError::Usage("--n is required for this family".into()));
    let need_m = || m.ok_or_else(|| CliError::Usage("--m is required for this family".into()));
    let set = match family {
        Family::CernyNz => families::cerny_nz(need_n()?)?,
        Family::Mn => families::mn_family(need_n()?)?,
        Family::Perturbed => {
            let n = need_n()?;
            let m = need_m()?;
            if !(2..=64).contains(&n) || m < 2 {
                return Err(CliError::Usage(
                    "perturbed needs 2 <= n <= 64 and m >= 2".into(),
                ));
            }
            families::perturbed_permutation(n, m, seed)
        }
        Family::Uniform => {
            let n = need_n()?;
            let m = need_m()?;
            if !(1..=64).contains(&n) || m < 1 {
                return Err(CliError::Usage(
                    "uniform needs 1 <= n <= 64 and m >= 1".into(),
                ));
            }
            families::uniform_nz(n, m, seed)
        }
        Family::Example => {
            let id = id.ok_or_else(|| {
                CliError::Usage(format!(
                    "--id is required for --family example (one of: {})",
                    families::EXAMPLE_IDS.join(", ")
                ))
            })?;
            families::example_set(id)?
        }
    };
    print!("{}", serialize_matrix_set(&set));
    Ok(())
}

struct CorpusRow {
    seed: u64,
    irreducible: bool,
    primitive: bool,
    exp: Option<usize>,
    rt: Option<usize>,
    rt_t: Option<usize>,
    diam: Option<usize>,
    epp: Option<usize>,
    epp_t: Option<usize>,
    kbar_one: Option<usize>,
    kbar_one_t: Option<usize>,
    duality_ok: Option<bool>,
    thresholds_ok: Option<bool>,
    kbar_ok: Option<bool>,
    reduction_ok: Option<bool>,
    chain_ok: Option<bool>,
    pair_bound_ok: Option<bool>,
    r1: Option<Rational>,
    r2: Option<Rational>,
    r1_in_bounds: Option<bool>,
    r2_in_bounds: Option<bool>,
}

fn cmd_corpus(
    family: Family,
    count: usize,
    seed0: u64,
    n: usize,
    m: usize,
    tprime: &str,
    json: bool,
) -> Result<(), CliError> {
    let generate: fn(usize, usize, u64) -> MatrixSet = match family {
        Family::Perturbed => {
            if !(2..=64).contains(&n) || m < 2 {
                return Err(CliError::Usage(
                    "perturbed needs 2 <= n <= 64 and m >= 2".into(),
                ));
            }
            families::perturbed_permutation
        }
        Family::Uniform => {
            if !(1..=64).contains(&n) || m < 1 {
                return Err(CliError::Usage(
                    "uniform needs 1 <= n <= 64 and m >= 1".into(),
                ));
            }
            families::uniform_nz
        }
        _ => {
            return Err(CliError::Usage(
                "corpus sweeps need a seeded family (perturbed or uniform)".into(),
            ))
        }
    };
    let caps = caps();
    let schedule = parse_tprime(tprime)?;
    let tprime_value = schedule.evaluate(n);
    let opts = SpfOptions {
        layer_cap: caps.layer,
        ..SpfOptions::default()
    };

    let mut rows = Vec::with_capacity(count);
    for i in 0..count {
        let seed = seed0 + i as u64;
        let set = generate(n, m, seed);
        rows.push(corpus_row(&set, seed, &caps, &opts, tprime_value));
    }

    let meta = [
        (
            "family",
            match family {
                Family::Perturbed => "perturbed".to_string(),
                Family::Uniform => "uniform".to_string(),
                _ => unreachable!(),
            },
        ),
        ("count", count.to_string()),
        ("seed", seed0.to_string()),
        ("n", n.to_string()),
        ("m", m.to_string()),
        (
            "tprime",
            format!("{tprime_value} ({})", schedule.describe()),
        ),
    ];

    let rate = |f: &dyn Fn(&CorpusRow) -> Option<bool>| -> String {
        let evaluated: Vec<bool> = rows.iter().filter_map(f).collect();
        if evaluated.is_empty() {
            "-".to_string()
        } else {
            let pass = evaluated.iter().filter(|&&b| b).count();
            format!("{:.3}", pass as f64 / evaluated.len() as f64)
        }
    };
    let aggregates = [
        ("primitive_rate", {
            let prim = rows.iter().filter(|r| r.primitive).count();
            format!("{:.3}", prim as f64 / rows.len().max(1) as f64)
        }),
        ("duality_pass_rate", rate(&|r| r.duality_ok)),
        ("thresholds_pass_rate", rate(&|r| r.thresholds_ok)),
        ("kbar_pass_rate", rate(&|r| r.kbar_ok)),
        ("reduction_pass_rate", rate(&|r| r.reduction_ok)),
        ("chain_pass_rate", rate(&|r| r.chain_ok)),
        ("pair_bound_pass_rate", rate(&|r| r.pair_bound_ok)),
        ("r1_within_bounds_rate", rate(&|r| r.r1_in_bounds)),
        ("r2_within_bounds_rate", rate(&|r| r.r2_in_bounds)),
    ];

    let opt_str = |v: &Option<usize>| v.map_or(String::new(), |x| x.to_string());
    let opt_bool = |v: &Option<bool>| v.map_or(String::new(), |x| x.to_string());
    let opt_rat = |v: &Option<Rational>| v.as_ref().map_or(String::new(), rational_exact);

    if json {
        let rows_json: Vec<serde_json::Value> = rows
            .iter()
            .map(|r| {
                json!({
                    "seed": r.seed,
                    "irreducible": r.irreducible,
                    "primitive": r.primitive,
                    "exp": r.exp,
                    "rt": r.rt,
                    "rt_t": r.rt_t,
                    "diam": r.diam,
                    "epp": r.epp,
                    "epp_t": r.epp_t,
                    "kbar_one": r.kbar_one,
                    "kbar_one_t": r.kbar_one_t,
                    "duality_ok": r.duality_ok,
                    "thresholds_ok": r.thresholds_ok,
                    "kbar_ok": r.kbar_ok,
                    "reduction_ok": r.reduction_ok,
                    "chain_ok": r.chain_ok,
                    "pair_bound_ok": r.pair_bound_ok,
                    "r1": r.r1.as_ref().map(rational_exact),
                    "r2": r.r2.as_ref().map(rational_exact),
                    "r1_in_bounds": r.r1_in_bounds,
                    "r2_in_bounds": r.r2_in_bounds,
                })
            })
            .collect();
        let meta_obj: serde_json::Map<String, serde_json::Value> = meta
            .iter()
            .map(|(k, v)| (k.to_string(), json!(v)))
            .collect();
        let agg_obj: serde_json::Map<String, serde_json::Value> = aggregates
            .iter()
            .map(|(k, v)| (k.to_string(), json!(v)))
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "metadata": meta_obj,
                "rows": rows_json,
                "aggregates": agg_obj,
            }))
            .unwrap()
        );
    } else {
        for (key, value) in &meta {
            println!("# {key},{value}");
        }
        println!(
            "seed,irreducible,primitive,exp,rt,rt_t,diam,epp,epp_t,kbar_one,kbar_one_t,\
             duality_ok,thresholds_ok,kbar_ok,reduction_ok,chain_ok,pair_bound_ok,\
             r1,r2,r1_in_bounds,r2_in_bounds"
        );
        for r in &rows {
            println!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.seed,
                r.irreducible,
                r.primitive,
                opt_str(&r.exp),
                opt_str(&r.rt),
                opt_str(&r.rt_t),
                opt_str(&r.diam),
                opt_str(&r.epp),
                opt_str(&r.epp_t),
                opt_str(&r.kbar_one),
                opt_str(&r.kbar_one_t),
                opt_bool(&r.duality_ok),
                opt_bool(&r.thresholds_ok),
                opt_bool(&r.kbar_ok),
                opt_bool(&r.reduction_ok),
                opt_bool(&r.chain_ok),
                opt_bool(&r.pair_bound_ok),
                opt_rat(&r.r1),
                opt_rat(&r.r2),
                opt_bool(&r.r1_in_bounds),
                opt_bool(&r.r2_in_bounds),
            );
        }
        for (key, value) in &aggregates {
            println!("# {key},{value}");
        }
    }
    Ok(())
}

fn corpus_row(
    set: &MatrixSet,
    seed: u64,
    caps: &Caps,
    opts: &SpfOptions,
    tprime: usize,
) -> CorpusRow {
    let n = set.dim();
    let mut row = CorpusRow {
        seed,
        irreducible: is_irreducible(set),
        primitive: false,
        exp: None,
        rt: None,
        rt_t: None,
        diam: None,
        epp: None,
        epp_t: None,
        kbar_one: None,
        kbar_one_t: None,
        duality_ok: None,
        thresholds_ok: None,
        kbar_ok: None,
        reduction_ok: None,
        chain_ok: None,
        pair_bound_ok: None,
        r1: None,
        r2: None,
        r1_in_bounds: None,
        r2_in_bounds: None,
    };
    let Ok(dfa) = aut_of_with_cap(set, caps.letter) else {
        return row;
    };
    row.primitive = row.irreducible && is_synchronizing(&dfa);
    if !row.primitive {
        return row;
    }

    let k = spf_k_with(set, AUTO_T_CAP, opts);
    let Some(exp) = k.reached_one_at else {
        return row;
    };
    row.exp = Some(exp);
    let kbar = spf_kbar_with(set, exp, opts);
    let kbar_t = spf_kbar_with(&set.transpose(), exp + n, opts);
    row.kbar_one = kbar.reached_one_at;
    row.kbar_one_t = kbar_t.reached_one_at;
    if let (Some(a), Some(b)) = (row.kbar_one, row.kbar_one_t) {
        row.pair_bound_ok = Some(exp <= a + b);
    }

    if n <= caps.state {
        let dfa_t = aut_of_with_cap(&set.transpose(), caps.letter).ok();
        let rt = reset_threshold_exact_with_cap(&dfa, caps.state)
            .ok()
            .and_then(|r| r.rt);
        let rt_t = dfa_t.as_ref().and_then(|d| {
            reset_threshold_exact_with_cap(d, caps.state)
                .ok()
                .and_then(|r| r.rt)
        });
        let epp = eppstein(&dfa).ok().and_then(|r| r.rt);
        let epp_t = dfa_t
            .as_ref()
            .and_then(|d| eppstein(d).ok().and_then(|r| r.rt));
        let diam = sg_diameter(&dfa);
        row.diam = Some(diam);
        row.rt = rt;
        row.rt_t = rt_t;
        row.epp = epp;
        row.epp_t = epp_t;
        if let (Some(rt), Some(rt_t), Some(epp)) = (rt, rt_t, epp) {
            row.chain_ok = Some(diam <= rt && rt <= epp && rt <= exp && exp <= rt + rt_t + n - 1);
        }
    }

    // exact value checks along the series
    let mut duality = true;
    let mut reduction = true;
    let mut layer = ProductLayer::initial_with_cap(n, opts.layer_cap);
    for t in 0..=exp {
        if t > 0 {
            if layer.grow(set).is_err() {
                duality = false;
                break;
            }
            layer.prune_dominated();
        }
        let h = prune_ht_columns(&build_ht(&layer));
        let (Ok(primal), Ok(dual)) = (solve_primal(&h), solve_dual(&h)) else {
            duality = false;
            break;
        };
        duality &= primal.value == dual.value && primal.value == k.points[t].value;
        let (reduced, _) = reduce_columns(&h, &dual.q_opt);
        reduction &=
            reduced.h() <= n && solve_dual(&reduced).map(|s| s.value) == Ok(dual.value.clone());
    }
    row.duality_ok = Some(duality);
    row.reduction_ok = Some(reduction);

    let one_over_n = rat(1, n as i64);
    let mut thresholds = k.points[0].value == one_over_n;
    if let Some(at_n) = k.value_clamped(n) {
        thresholds &= at_n > one_over_n;
    }
    for point in &k.points {
        let v = &point.value;
        if *v > one_over_n {
            thresholds &= *v >= rat((n + 1) as i64, (n * n) as i64);
        }
        if !v.is_one() {
            thresholds &= *v <= rat((n * n - 1) as i64, (n * n) as i64);
        }
    }
    row.thresholds_ok = Some(thresholds);

    let mut kbar_ok = kbar.reached_one_at.is_some();
    for (t, kv) in k.values() {
        match kbar.value_clamped(t) {
            Some(kb) => {
                kbar_ok &= kb >= *kv;
                kbar_ok &= (kb * rat_int(n as i64)).is_integer();
            }
            None => kbar_ok = false,
        }
    }
    kbar_ok &= check_stagnation_theorems(&kbar).iter().all(|c| c.satisfied);
    row.kbar_ok = Some(kbar_ok);

    if tprime > 0 {
        let l0 = stagnations(&k).l0;
        if tprime > l0 {
            if let Ok(fit) = r1_estimate(&k, l0, tprime) {
                if let Ok(v) = evaluate_against_bounds(set, &fit) {
                    row.r1_in_bounds = Some(v.respects_lower && v.respects_upper);
                }
                row.r1 = Some(fit.estimate);
            }
            if let Ok(fit) = r2_estimate(&k, l0, tprime) {
                if let Ok(v) = evaluate_against_bounds(set, &fit) {
                    row.r2_in_bounds = Some(v.respects_lower && v.respects_upper);
                }
                row.r2 = Some(fit.estimate);
            }
        }
    }
    row
}
