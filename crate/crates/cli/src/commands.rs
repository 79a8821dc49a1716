use std::collections::BTreeSet;
use std::fs;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use spineless::acm::{
    accepts, accepts_with, admissibility_probe, ambient_successors, parse_acm, AcceptanceResult,
    Acm, Fuel, Id, ProbeCaps, StepRules,
};
use spineless::eqcore::{
    acc_quasiequation, delta, is_expansive, is_mingly, is_trivial, parse_equation,
    quasi_to_equation, to_simple, BasicEquation, ExponentVector, SimpleEquation,
    SimpleReductionVerdict, Substitution,
};
use spineless::frames::{random_frame, random_simple_equation, PlusAlgebra};
use spineless::mk::construct_mk;
use spineless::spine::{
    check_star_falsifier, classify_prespinal, falsify_star, heuristic_k, onevar_star_bound,
    search_star_counterexample, verify_spinal, Classification, Limits, StarMode,
};

use crate::report::{big, Report, Verdict};

pub type CmdResult = Result<Report, String>;

/// Search caps shared by the simulation commands.
#[derive(Clone, Copy, Debug)]
pub struct SearchCaps {
    pub depth: usize,
    pub reg: u64,
    pub width: usize,
}

impl SearchCaps {
    fn fuel(&self) -> Fuel {
        Fuel::new(self.depth, self.reg, self.width)
    }

    fn to_value(self) -> Value {
        json!({"depth": self.depth, "reg": self.reg, "width": self.width})
    }
}

fn vector(v: &ExponentVector) -> Value {
    json!(v.entries())
}

fn vectors<'a>(vs: impl IntoIterator<Item = &'a ExponentVector>) -> Value {
    Value::Array(vs.into_iter().map(vector).collect())
}

fn matrix(s: &Substitution) -> Value {
    json!(s.rows())
}

fn load_acm(path: &str) -> Result<Acm, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {}", path, e))?;
    parse_acm(&text).map_err(|e| format!("{}: {}", path, e))
}

fn load_equation(text: &str) -> Result<BasicEquation, String> {
    parse_equation(text).map_err(|e| format!("equation '{}': {}", text, e))
}

/// Reduces an equation to a simple one or explains why that is impossible.
fn require_simple(eq: &BasicEquation) -> Result<SimpleEquation, String> {
    match to_simple(eq) {
        SimpleReductionVerdict::Simple(s) => Ok(s),
        SimpleReductionVerdict::Trivial => Err(format!("{} is trivial", eq)),
        SimpleReductionVerdict::ImpliesIntegrality => Err(format!("{} implies integrality", eq)),
        SimpleReductionVerdict::Unsupported(r) => Err(format!("{}: {}", eq, r)),
    }
}

fn reduction_verdict(v: &SimpleReductionVerdict) -> Verdict {
    match v {
        SimpleReductionVerdict::Simple(s) => Verdict::new("reduction", "simple").witness(json!({
            "arity": s.arity(),
            "columns": vectors(s.columns()),
            "equation": s.to_string(),
        })),
        SimpleReductionVerdict::Trivial => Verdict::new("reduction", "trivial"),
        SimpleReductionVerdict::ImpliesIntegrality => {
            Verdict::new("reduction", "implies-integrality")
        }
        SimpleReductionVerdict::Unsupported(r) => {
            Verdict::new("reduction", "unsupported").witness(r.as_str())
        }
    }
}

fn one_variable(eq: &BasicEquation) -> Option<(u64, BTreeSet<u64>)> {
    if eq.arity() != 1 {
        return None;
    }
    Some((eq.lhs().get(0), eq.rhs().iter().map(|d| d.get(0)).collect()))
}

pub fn analyze(text: &str) -> CmdResult {
    let eq = load_equation(text)?;
    let mut r = Report::new("analyze");
    r.input("equation", text);
    r.input("normalized", eq.to_string());
    let reduced = to_simple(&eq);
    r.push(reduction_verdict(&reduced));
    let SimpleReductionVerdict::Simple(s) = reduced else {
        r.note(format!(
            "{}: not reducible to a nontrivial simple equation",
            eq
        ));
        return Ok(r);
    };
    let trivial = is_trivial(&s);
    r.push(Verdict::new("trivial", trivial));

    let mingly = is_mingly(&s);
    let mut v = Verdict::new("mingly", mingly.is_some());
    if let Some(sigma) = &mingly {
        v = v.witness(json!({"sigma": matrix(sigma)}));
    }
    r.push(v);

    let exp = is_expansive(&s);
    let mut v = Verdict::new("expansive", exp.is_some());
    if let Some(w) = &exp {
        v = v.witness(json!({"sigma": matrix(&w.sigma), "n": w.n, "c": w.c}));
    }
    r.push(v);

    let limits = Limits::default();
    let class = classify_prespinal(&s, &limits).map_err(|e| e.to_string())?;
    let caps = json!({"max_arity": limits.max_arity, "max_columns": limits.max_columns});
    let v = match &class {
        Classification::Prespinal(w) => Verdict::new("prespinal", true).witness(json!({
            "blocking_rows": w.blocking.rows.iter().map(|r| r.iter().map(|i| i + 1).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "sigma": matrix(&w.sigma),
            "f": vector(&w.f),
            "v": vectors(&w.v),
            "spinal": verify_spinal(&w.f, &w.v),
        })),
        Classification::Spineless => Verdict::new("prespinal", false).witness("spineless"),
    };
    r.push(v.caps(caps));

    let d = delta(s.columns());
    r.push(
        Verdict::new("heuristic_k", heuristic_k(&s))
            .witness(json!({"delta": d, "heuristic": true})),
    );
    if let Some((n, p)) = one_variable(&eq) {
        if let Ok(k) = onevar_star_bound(n, &p) {
            r.push(Verdict::new("certified_k", k).witness(json!({"n": n, "p": p})));
        }
    }
    r.note(format!(
        "{}: {}, {}, {}, {}",
        eq,
        if trivial { "trivial" } else { "nontrivial" },
        if mingly.is_some() {
            "mingly"
        } else {
            "not mingly"
        },
        if exp.is_some() {
            "expansive"
        } else {
            "not expansive"
        },
        if class.is_prespinal() {
            "prespinal"
        } else {
            "spineless"
        },
    ));
    Ok(r)
}

pub fn linearize(text: &str) -> CmdResult {
    let eq = load_equation(text)?;
    let mut r = Report::new("linearize");
    r.input("equation", text);
    r.input("normalized", eq.to_string());
    let reduced = to_simple(&eq);
    match &reduced {
        SimpleReductionVerdict::Simple(s) => r.note(format!("{} ~> {}", eq, s)),
        other => r.note(format!("{}: {:?}", eq, other)),
    }
    r.push(reduction_verdict(&reduced));
    Ok(r)
}

fn acceptance_verdict(name: &str, m: &Acm, res: &AcceptanceResult, caps: SearchCaps) -> Verdict {
    match res {
        AcceptanceResult::Accepted(t) => {
            let steps: Vec<Value> = t
                .steps
                .iter()
                .map(|(id, label)| json!({"id": m.show_id(id), "step": label}))
                .collect();
            Verdict::new(name, "accepted")
                .witness(json!({"length": t.len(), "start": m.show_id(&t.start), "trace": steps}))
        }
        AcceptanceResult::Unknown(info) => Verdict::new(name, "unknown").witness(json!({
            "exhausted": info.exhausted,
            "explored": info.explored,
            "reg_pruned": info.reg_pruned,
            "unbounded_length": info.unbounded_length,
        })),
    }
    .caps(caps.to_value())
}

fn describe(res: &AcceptanceResult) -> String {
    match res {
        AcceptanceResult::Accepted(t) => format!("accepted, trace of length {}", t.len()),
        AcceptanceResult::Unknown(i) if i.exhausted => {
            "not accepted (search space exhausted under the caps)".into()
        }
        AcceptanceResult::Unknown(_) => "unknown (caps reached)".into(),
    }
}

fn parse_init(m: &Acm, init: &str) -> Result<Id, String> {
    m.parse_id(init)
        .map_err(|e| format!("initial ID '{}': {}", init, e))
}

pub fn simulate(path: &str, init: &str, caps: SearchCaps) -> CmdResult {
    let m = load_acm(path)?;
    let u = parse_init(&m, init)?;
    let mut r = Report::new("simulate");
    r.input("machine", path);
    r.input("init", m.show_id(&u));
    let res = accepts(&m, &u, caps.fuel());
    r.note(format!("{}: {}", m.show_id(&u), describe(&res)));
    r.push(acceptance_verdict("accepts", &m, &res, caps));
    Ok(r)
}

pub fn ambient_simulate(
    path: &str,
    equation: &str,
    init: &str,
    caps: SearchCaps,
    degree_cap: u64,
) -> CmdResult {
    let m = load_acm(path)?;
    let eq = load_equation(equation)?;
    let d = require_simple(&eq)?;
    let u = parse_init(&m, init)?;
    let mut r = Report::new("ambient-simulate");
    r.input("machine", path);
    r.input("equation", d.to_string());
    r.input("init", m.show_id(&u));
    let next: Vec<Value> = ambient_successors(&m, &d, &u, degree_cap)
        .iter()
        .map(|s| json!({"id": m.show_id(&s.id), "step": s.label}))
        .collect();
    r.push(
        Verdict::new("ambient_successors", next.len())
            .witness(next)
            .caps(json!({"degree_cap": degree_cap})),
    );
    let plain = accepts(&m, &u, caps.fuel());
    let rules = StepRules::with_ambient(&m, &d, degree_cap);
    let extended = accepts_with(&rules, &u, caps.fuel());
    r.note(format!("machine alone: {}", describe(&plain)));
    r.note(format!("with the equation: {}", describe(&extended)));
    r.push(acceptance_verdict("accepts", &m, &plain, caps));
    let mut caps_v = caps.to_value();
    caps_v["degree_cap"] = json!(degree_cap);
    r.push(acceptance_verdict("accepts_with_equation", &m, &extended, caps).caps(caps_v));
    Ok(r)
}

pub fn admissibility(path: &str, equation: &str, reg: u64, degree_cap: u64) -> CmdResult {
    let m = load_acm(path)?;
    let eq = load_equation(equation)?;
    let d = require_simple(&eq)?;
    let caps = ProbeCaps {
        max_reg: reg,
        degree_cap,
    };
    let rep = admissibility_probe(&m, &d, caps);
    let mut r = Report::new("admissibility");
    r.input("machine", path);
    r.input("equation", d.to_string());
    let diff: Vec<String> = rep.difference.iter().map(|c| m.show_config(c)).collect();
    let value = if diff.is_empty() {
        "no violation found within bounds"
    } else {
        "violation found"
    };
    r.note(format!("{} ({} witnesses)", value, diff.len()));
    r.push(
        Verdict::new("difference", value)
            .witness(json!({
                "accepted": rep.plain.len(),
                "accepted_with_equation": rep.extended.len(),
                "witnesses": diff,
            }))
            .caps(json!({"reg": reg, "degree_cap": degree_cap})),
    );
    Ok(r)
}

pub fn build_mk(path: &str, k: u64, out: Option<&str>) -> CmdResult {
    let m = load_acm(path)?;
    let mk = construct_mk(&m, k).map_err(|e| e.to_string())?;
    let text = mk.to_text();
    let round_trip = parse_acm(&text).map(|x| x == mk).unwrap_or(false);
    let mut r = Report::new("build-mk");
    r.input("machine", path);
    r.input("K", k);
    let mut w = json!({
        "states": mk.states().len(),
        "instructions": mk.instructions().len(),
        "final": mk.state_name(mk.final_state()),
    });
    match out {
        Some(p) => {
            fs::write(p, &text).map_err(|e| format!("cannot write {}: {}", p, e))?;
            w["output"] = json!(p);
        }
        None => w["text"] = json!(text),
    }
    r.note(format!(
        "M_{}: {} states, {} instructions",
        k,
        mk.states().len(),
        mk.instructions().len()
    ));
    r.push(Verdict::new("machine", "constructed").witness(w));
    r.push(Verdict::new("round_trip", round_trip));
    if !round_trip {
        return Err("the generated machine does not re-parse to itself".into());
    }
    Ok(r)
}

pub fn falsify(equation: &str, k: u64) -> CmdResult {
    let eq = load_equation(equation)?;
    let f = eq.lhs().clone();
    let v: Vec<ExponentVector> = eq.rhs().iter().filter(|x| !x.is_zero()).cloned().collect();
    let mut r = Report::new("falsify-star");
    r.input("equation", eq.to_string());
    r.input("K", k);
    let all: Vec<ExponentVector> = eq.rhs().iter().cloned().collect();
    if !verify_spinal(&f, &all) {
        return Err(format!("{} is not spinal", eq));
    }
    let w = falsify_star(&f, &v, k).map_err(|e| e.to_string())?;
    let ok = check_star_falsifier(&f, &v, k, &w);
    r.note(format!(
        "tau = ({}), C = {}: {}",
        w.tau
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(","),
        w.c,
        if ok { "verified" } else { "check failed" }
    ));
    r.push(Verdict::new("falsifier", "found").witness(json!({
        "tau": w.tau.iter().map(|&t| big(t)).collect::<Vec<_>>(),
        "c": big(w.c),
    })));
    r.push(Verdict::new("check", ok));
    if !ok {
        return Err("the falsifier failed its check".into());
    }
    Ok(r)
}

pub fn star_search(equation: &str, k: Option<u64>, mode: StarMode, bound: u64) -> CmdResult {
    let eq = load_equation(equation)?;
    let d = require_simple(&eq)?;
    let (k, source) = match k {
        Some(k) => (k, "given"),
        None => match one_variable(&eq).map(|(n, p)| onevar_star_bound(n, &p)) {
            Some(Ok(k)) => (k, "certified"),
            _ => (heuristic_k(&d), "heuristic"),
        },
    };
    let mut r = Report::new("star-search");
    r.input("equation", d.to_string());
    r.input("K", k);
    r.input("K_source", source);
    r.input(
        "mode",
        match mode {
            StarMode::Single => "single",
            StarMode::Double => "double",
        },
    );
    let found = search_star_counterexample(&d, k, mode, bound).map_err(|e| e.to_string())?;
    let caps = json!({"bound": bound});
    match found {
        Some(w) => {
            let mut wv = json!({"sigma": w.sigma, "c": big(w.c)});
            if let Some((s2, c2)) = &w.second {
                wv["second"] = json!({"sigma": s2, "c": big(*c2)});
            }
            r.note(format!("counterexample found: {}", wv));
            r.push(
                Verdict::new("counterexample", "found")
                    .witness(wv)
                    .caps(caps),
            );
        }
        None => {
            r.note(format!("no counterexample with entries up to {}", bound));
            r.push(Verdict::new("counterexample", "none").caps(caps));
        }
    }
    Ok(r)
}

pub fn frame_check(seed: u64, count: usize) -> CmdResult {
    const EQUATIONS: usize = 5;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = Report::new("frame-check");
    r.input("seed", seed);
    r.input("count", count);
    let mut mismatches = Vec::new();
    let mut largest = 0;
    for i in 0..count {
        let f = random_frame(&mut rng, 2, 3);
        if !f.is_nuclear() {
            return Err(format!("frame {} is not nuclear", i));
        }
        let alg = PlusAlgebra::new(f.clone()).map_err(|e| format!("frame {}: {}", i, e))?;
        largest = largest.max(alg.len());
        for _ in 0..EQUATIONS {
            let e = random_simple_equation(&mut rng, 2, 3, 3);
            let a = alg.satisfies_simple(&e).map_err(|x| x.to_string())?;
            let b = f.frame_condition(&e).map_err(|x| x.to_string())?;
            if a != b {
                mismatches.push(json!({"frame": i, "equation": e.to_string(), "algebra": a, "frame_condition": b}));
            }
        }
    }
    r.note(format!(
        "{} frames x {} equations: {} mismatches",
        count,
        EQUATIONS,
        mismatches.len()
    ));
    r.push(
        Verdict::new("mismatches", mismatches.len())
            .witness(json!({"cases": mismatches, "largest_algebra": largest}))
            .caps(json!({"generators": 2, "cap": 3, "arity": 2, "columns": 3, "equations_per_frame": EQUATIONS})),
    );
    if !mismatches.is_empty() {
        return Err(format!("{} mismatches", mismatches.len()));
    }
    Ok(r)
}

pub fn acc_quasieq(path: &str, init: &str) -> CmdResult {
    let m = load_acm(path)?;
    let u = parse_init(&m, init)?;
    let q = acc_quasiequation(&m, &u);
    let mut r = Report::new("acc-quasieq");
    r.input("machine", path);
    r.input("init", m.show_id(&u));
    r.note(q.consequent.to_string());
    r.push(Verdict::new("quasiequation", q.to_string()).witness(json!({
        "antecedent": q.antecedent.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "consequent": q.consequent.to_string(),
    })));
    Ok(r)
}

pub fn epsilon_sn(path: &str, init: &str, n: u32) -> CmdResult {
    if n == 0 {
        return Err("the exponent must be at least 1".into());
    }
    let m = load_acm(path)?;
    let u = parse_init(&m, init)?;
    let q = acc_quasiequation(&m, &u);
    let e = quasi_to_equation(&q.antecedent, &q.consequent, n);
    let mut r = Report::new("epsilon-sn");
    r.input("machine", path);
    r.input("init", m.show_id(&u));
    r.input("n", n);
    r.note(e.to_string());
    r.push(Verdict::new("equation", e.to_string()).witness(json!({
        "premises": q.antecedent.len(),
        "lhs": e.lhs.to_string(),
        "rhs": e.rhs.to_string(),
    })));
    Ok(r)
}
