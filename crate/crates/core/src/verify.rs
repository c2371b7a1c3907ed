//! Registry of checkable statements, each bound to an exhaustive computation
//! with a machine-readable verdict.
//!
//! Every search inside a claim gets the full node budget from [`RunConfig`];
//! a search that runs out turns the claim into `skipped` with reason
//! `budget`, never into `verified`.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{stick_sequence_search, stick_sequence_valid, StickRule};
use crate::constructions::{
    build_complete_minus_color, build_d_star, build_k6_geometric, build_k_star, build_round_robin,
};
use crate::ecgraph::ColoredGraph;
use crate::explorer::{
    colorings_isomorphic, enumerate_proper_colorings, forall_check, ColoringFamily, ForallReport, Verdict,
};
use crate::patterns::{
    broom_pattern, caterpillar_pattern, enumerate_free_trees, path_pattern, CaterpillarSpec, TreePattern,
};
use crate::rainbow::{
    check_maximal_path_degree_bound, count_rainbow_cycles, count_rainbow_tree, find_rainbow_tree, longest_rainbow_path,
    rainbow_girth, PathDegreeBound, SearchBudget, SearchOptions, SearchOutcome,
};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SkipReason {
    Budget,
    ParameterInfeasible,
    SizeCap,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Status {
    Verified,
    Refuted,
    Skipped { reason: SkipReason },
    Mismatch { found: Value, expected: Value },
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Verified => "VERIFIED",
            Self::Refuted => "REFUTED",
            Self::Skipped { .. } => "SKIPPED",
            Self::Mismatch { .. } => "MISMATCH",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClaimReport {
    pub claim_id: String,
    #[serde(flatten)]
    pub status: Status,
    pub formula_check: bool,
    pub witness: Option<Value>,
    pub details: Value,
    pub nodes_visited: u64,
    pub wall_time_ms: u64,
}

impl ClaimReport {
    /// The report as JSON without the timing field.
    pub fn untimed(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v.as_object_mut().expect("object").remove("wall_time_ms");
        v
    }

    pub fn summary_line(&self) -> String {
        let extra = match &self.status {
            Status::Skipped { reason } => format!(" ({})", serde_json::to_value(reason).expect("enum")),
            Status::Mismatch { found, expected } => format!(" (found {found}, expected {expected})"),
            _ => String::new(),
        };
        format!("{:<18} {}{}", self.claim_id, self.status.label(), extra)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub budget: SearchBudget,
    /// 1 runs claims one after another; otherwise claims and their searches
    /// share a pool of this many threads (0 = rayon default).
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { budget: SearchBudget::DEFAULT, threads: 1 }
    }
}

impl RunConfig {
    fn search(&self) -> SearchOptions {
        SearchOptions { budget: self.budget, anchor: None, threads: if self.threads == 1 { 1 } else { 0 } }
    }
}

struct Eval {
    status: Status,
    witness: Option<Value>,
    details: Value,
    nodes: u64,
}

impl Eval {
    fn new(status: Status, nodes: u64, details: Value) -> Self {
        Self { status, witness: None, details, nodes }
    }

    fn with_witness(mut self, w: Value) -> Self {
        self.witness = Some(w);
        self
    }

    fn budget(nodes: u64, details: Value) -> Self {
        Self::new(Status::Skipped { reason: SkipReason::Budget }, nodes, details)
    }
}

type Runner = Box<dyn Fn(&RunConfig) -> Result<Eval, Error> + Send + Sync>;

pub struct Claim {
    pub id: String,
    pub description: String,
    /// Compares a closed-form count with enumeration; a mismatch is a
    /// finding about the formula, not a tool failure.
    pub formula_check: bool,
    run: Runner,
}

impl Claim {
    fn new(id: impl Into<String>, description: impl Into<String>, run: Runner) -> Self {
        Self { id: id.into(), description: description.into(), formula_check: false, run }
    }

    fn formula(mut self) -> Self {
        self.formula_check = true;
        self
    }

    pub fn run(&self, config: &RunConfig) -> Result<ClaimReport, Error> {
        let start = Instant::now();
        let eval = (self.run)(config)?;
        debug_assert!(
            !matches!(eval.status, Status::Refuted) || eval.witness.is_some(),
            "{} refuted without a witness",
            self.id
        );
        Ok(ClaimReport {
            claim_id: self.id.clone(),
            status: eval.status,
            formula_check: self.formula_check,
            witness: eval.witness,
            details: eval.details,
            nodes_visited: eval.nodes,
            wall_time_ms: start.elapsed().as_millis() as u64,
        })
    }
}

// ---------------------------------------------------------------------------
// Individual claims

fn to_json<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn d_path(s: u32, config: &RunConfig) -> Result<Eval, Error> {
    let g = build_d_star(s)?;
    // Translations v -> v ^ a are automorphisms of D* that fix every color,
    // so anchoring at 0 is exhaustive.
    let opts = config.search().anchored(0);
    let k = s as usize + 1;
    let r = find_rainbow_tree(&g, &path_pattern(k)?, &opts)?;
    let mut nodes = r.nodes_visited;
    match r.outcome {
        SearchOutcome::Found(e) => {
            return Ok(Eval::new(Status::Refuted, nodes, json!({"rainbow_path_length": k})).with_witness(to_json(&e)))
        }
        SearchOutcome::BudgetExceeded => return Ok(Eval::budget(nodes, json!({"stage": "path search"}))),
        SearchOutcome::NotFound => {}
    }
    let l = longest_rainbow_path(&g, &opts)?;
    nodes += l.nodes_visited;
    Ok(match l.outcome {
        SearchOutcome::Found(p) => {
            let details = json!({"pattern_edges": k, "longest_rainbow_path": p.len(), "longest_witness": to_json(&p)});
            if p.len() == s as usize {
                Eval::new(Status::Verified, nodes, details)
            } else {
                Eval::new(Status::Refuted, nodes, details).with_witness(to_json(&p))
            }
        }
        _ => Eval::budget(nodes, json!({"stage": "longest path"})),
    })
}

fn d_girth(s: u32, config: &RunConfig) -> Result<Eval, Error> {
    let g = build_d_star(s)?;
    let cap = s as usize + 1;
    let r = rainbow_girth(&g, cap, &config.search())?;
    Ok(match r.outcome {
        SearchOutcome::Found(Some((len, c))) => {
            let details = json!({"girth": len, "expected": cap});
            let status = if len == cap { Status::Verified } else { Status::Refuted };
            Eval::new(status, r.nodes_visited, details).with_witness(to_json(&c))
        }
        SearchOutcome::Found(None) => Eval::new(Status::Refuted, r.nodes_visited, json!({"girth": null, "cap": cap}))
            .with_witness(json!({"rainbow_cycle_up_to_cap": null})),
        _ => Eval::budget(r.nodes_visited, Value::Null),
    })
}

fn forall_eval(report: ForallReport, nodes: u64) -> Eval {
    match report {
        ForallReport::HoldsForAll { classes } => Eval::new(Status::Verified, nodes, json!({"classes": classes})),
        ForallReport::Counterexample { index, class, witness } => {
            let w: Value = serde_json::from_str(&witness).unwrap_or(Value::String(witness));
            Eval::new(Status::Refuted, nodes, json!({"class_index": index}))
                .with_witness(json!({"coloring": to_json(&class), "detail": w}))
        }
        ForallReport::Inconclusive { index, reason } => {
            Eval::budget(nodes, json!({"class_index": index, "reason": reason}))
        }
    }
}

/// Predicate "no rainbow copy of `t`", tallying search nodes.
fn avoids<'a>(
    t: &'a TreePattern,
    opts: SearchOptions,
    nodes: &'a mut u64,
) -> impl FnMut(&ColoredGraph) -> Verdict + 'a {
    move |g| match find_rainbow_tree(g, t, &opts) {
        Ok(r) => {
            *nodes += r.nodes_visited;
            match r.outcome {
                SearchOutcome::NotFound => Verdict::Holds,
                SearchOutcome::Found(e) => Verdict::Fails(to_json(&e).to_string()),
                SearchOutcome::BudgetExceeded => Verdict::Unknown("budget".into()),
            }
        }
        Err(e) => Verdict::Unknown(e.to_string()),
    }
}

fn contains<'a>(
    t: &'a TreePattern,
    opts: SearchOptions,
    nodes: &'a mut u64,
) -> impl FnMut(&ColoredGraph) -> Verdict + 'a {
    move |g| match find_rainbow_tree(g, t, &opts) {
        Ok(r) => {
            *nodes += r.nodes_visited;
            match r.outcome {
                SearchOutcome::Found(_) => Verdict::Holds,
                SearchOutcome::NotFound => Verdict::Fails(json!({"missing_rainbow_edges": t.edge_count()}).to_string()),
                SearchOutcome::BudgetExceeded => Verdict::Unknown("budget".into()),
            }
        }
        Err(e) => Verdict::Unknown(e.to_string()),
    }
}

fn broom_k2(k: usize, config: &RunConfig) -> Result<Eval, Error> {
    let t = broom_pattern(k, 2)?;
    if k % 2 == 1 {
        let mut nodes = 0;
        let report =
            forall_check(ColoringFamily::OneFactorizations { n: k + 1 }, avoids(&t, config.search(), &mut nodes))?;
        return Ok(forall_eval(report, nodes));
    }
    let g = build_complete_minus_color(k as u32)?;
    let edges_ok = g.edge_count() == k * k / 2;
    let r = find_rainbow_tree(&g, &t, &config.search())?;
    let details = json!({"edges": g.edge_count(), "expected_edges": k * k / 2});
    Ok(match r.outcome {
        SearchOutcome::Found(e) => Eval::new(Status::Refuted, r.nodes_visited, details)
            .with_witness(json!({"host": g.to_json_value(), "embedding": to_json(&e)})),
        SearchOutcome::NotFound if edges_ok => Eval::new(Status::Verified, r.nodes_visited, details),
        SearchOutcome::NotFound => Eval::new(Status::Refuted, r.nodes_visited, details.clone()).with_witness(details),
        SearchOutcome::BudgetExceeded => Eval::budget(r.nodes_visited, details),
    })
}

fn broom_k3(s: u32, config: &RunConfig) -> Result<Eval, Error> {
    let k = (1usize << s) - 1;
    if s < 3 {
        return Ok(Eval::new(
            Status::Skipped { reason: SkipReason::ParameterInfeasible },
            0,
            json!({"note": format!("B_{{{k},3}} is the path P_3; the statement needs s >= 3")}),
        ));
    }
    let g = build_k_star(s)?;
    let r = find_rainbow_tree(&g, &broom_pattern(k, 3)?, &config.search().anchored(0))?;
    Ok(absent(r.outcome, r.nodes_visited, json!({"k": k})))
}

/// Verdict for a search whose expected outcome is "no rainbow copy".
fn absent<T: Serialize>(outcome: SearchOutcome<T>, nodes: u64, details: Value) -> Eval {
    match outcome {
        SearchOutcome::NotFound => Eval::new(Status::Verified, nodes, details),
        SearchOutcome::Found(w) => Eval::new(Status::Refuted, nodes, details).with_witness(to_json(&w)),
        SearchOutcome::BudgetExceeded => Eval::budget(nodes, details),
    }
}

fn broom_sequences(config: &RunConfig) -> Result<Eval, Error> {
    let mut nodes = 0;
    let mut per_d = Vec::new();
    let mut witness = None;
    let mut ok = true;
    for d in 2..=10 {
        let r = stick_sequence_search(d, StickRule::Strict, false)?;
        nodes += r.nodes;
        let expected_sat = d == 10;
        let valid = r.witness().is_none_or(|w| stick_sequence_valid(w, StickRule::Strict));
        ok &= r.is_sat() == expected_sat && valid;
        if let Some(w) = r.witness() {
            witness = Some(w.vectors.clone());
        }
        per_d.push(json!({"d": d, "sat": r.is_sat(), "nodes": r.nodes}));
    }
    let membership: Vec<usize> = (2..=10)
        .filter(|&d| stick_sequence_search(d, StickRule::Membership, false).map(|r| r.is_sat()).unwrap_or(false))
        .collect();
    let g = build_k_star(3)?;
    let mut cross = Vec::new();
    for d in 4..=6 {
        let r = find_rainbow_tree(&g, &broom_pattern(7, d)?, &config.search().anchored(0))?;
        nodes += r.nodes_visited;
        match r.outcome {
            SearchOutcome::NotFound => cross.push(json!({"d": d, "status": "none"})),
            SearchOutcome::Found(e) => {
                return Ok(Eval::new(Status::Refuted, nodes, json!({"cross_check_d": d})).with_witness(to_json(&e)))
            }
            SearchOutcome::BudgetExceeded => return Ok(Eval::budget(nodes, json!({"cross_check_d": d}))),
        }
    }
    let details = json!({
        "sequences": per_d,
        "membership_only_sat_lengths": membership,
        "direct_k8_brooms": cross,
    });
    let status = if ok { Status::Verified } else { Status::Refuted };
    Ok(Eval::new(status, nodes, details).with_witness(json!({"d10": witness})))
}

fn broom_direct_s4(config: &RunConfig) -> Result<Eval, Error> {
    let g = build_k_star(4)?;
    let opts = config.search().anchored(0);
    let mut nodes = 0;
    let mut rows = Vec::new();
    let mut witness = None;
    for d in 2..=10 {
        let r = find_rainbow_tree(&g, &broom_pattern(15, d)?, &opts)?;
        nodes += r.nodes_visited;
        let expect_found = d == 10;
        match r.outcome {
            SearchOutcome::BudgetExceeded => return Ok(Eval::budget(nodes, json!({"d": d}))),
            SearchOutcome::Found(e) if expect_found => witness = Some(to_json(&e)),
            SearchOutcome::NotFound if !expect_found => {}
            SearchOutcome::Found(e) => {
                return Ok(Eval::new(Status::Refuted, nodes, json!({"d": d})).with_witness(to_json(&e)))
            }
            SearchOutcome::NotFound => {
                return Ok(Eval::new(Status::Refuted, nodes, json!({"d": d}))
                    .with_witness(json!({"missing_broom": format!("B_{{15,{d}}}")})))
            }
        }
        rows.push(json!({"d": d, "status": if expect_found { "found" } else { "none" }}));
    }
    Ok(Eval::new(Status::Verified, nodes, json!({"brooms": rows})).with_witness(witness.expect("d = 10 found")))
}

/// Caterpillars on `2^s - 1` edges from the five families, one per
/// isomorphism class (mirror images are dropped).
pub fn caterpillar_instances(s: u32) -> Vec<(char, CaterpillarSpec)> {
    let k = (1usize << s) - 1;
    let mut out = Vec::new();
    let odd3 = |x: usize| x >= 3 && x % 2 == 1;
    if k >= 6 {
        out.push(('a', CaterpillarSpec::new(vec![1, k - 4, 1])));
    }
    let pairs = |sum: Option<usize>, ok: &dyn Fn(usize) -> bool| -> Vec<(usize, usize)> {
        sum.map_or(Vec::new(), |sum| (0..=sum / 2).filter(|&t| ok(t) && ok(sum - t)).map(|t| (t, sum - t)).collect())
    };
    for (t, q) in pairs(k.checked_sub(1), &odd3) {
        out.push(('b', CaterpillarSpec::new(vec![t, q])));
    }
    for (t, q) in pairs(k.checked_sub(2), &|x| x >= 2) {
        out.push(('c', CaterpillarSpec::new(vec![t, 0, q])));
    }
    for (t, q) in pairs(k.checked_sub(3), &|x| x >= 2) {
        out.push(('d', CaterpillarSpec::new(vec![t, 0, 0, q])));
    }
    for (t, q) in pairs(k.checked_sub(3), &odd3) {
        out.push(('e', CaterpillarSpec::new(vec![t, 1, q])));
    }
    out
}

fn caterpillars(s: u32, config: &RunConfig) -> Result<Eval, Error> {
    let g = build_k_star(s)?;
    let opts = config.search().anchored(0);
    let instances = caterpillar_instances(s);
    let mut nodes = 0;
    let mut rows = Vec::new();
    for (family, spec) in &instances {
        let t = caterpillar_pattern(spec)?;
        let r = find_rainbow_tree(&g, &t, &opts)?;
        nodes += r.nodes_visited;
        match r.outcome {
            SearchOutcome::NotFound => {
                rows.push(json!({"family": family.to_string(), "caterpillar": spec.to_string(), "status": "none"}))
            }
            SearchOutcome::Found(e) => {
                return Ok(Eval::new(Status::Refuted, nodes, json!({"caterpillar": spec.to_string()}))
                    .with_witness(to_json(&e)))
            }
            SearchOutcome::BudgetExceeded => {
                return Ok(Eval::budget(nodes, json!({"caterpillar": spec.to_string(), "checked": rows})))
            }
        }
    }
    let empty: Vec<String> = ['a', 'b', 'c', 'd', 'e']
        .iter()
        .filter(|f| !instances.iter().any(|(g, _)| g == *f))
        .map(|f| f.to_string())
        .collect();
    let mut details = json!({"instances": rows, "families_without_instances": empty});
    if s == 3 {
        // Even leaf counts fall outside the families; record what happens.
        let probe = CaterpillarSpec::new(vec![2, 2]);
        let r = find_rainbow_tree(&g, &caterpillar_pattern(&probe)?, &opts)?;
        nodes += r.nodes_visited;
        details["probe"] = json!({"caterpillar": probe.to_string(), "status": r.outcome.status()});
    }
    Ok(Eval::new(Status::Verified, nodes, details))
}

fn seven_edge_trees(config: &RunConfig) -> Result<Eval, Error> {
    let g = build_k_star(3)?;
    let trees = enumerate_free_trees(7)?;
    let opts = config.search().anchored(0);
    let mut nodes = 0;
    let mut embeddable = Vec::new();
    let mut blocked = Vec::new();
    for t in &trees {
        let r = find_rainbow_tree(&g, t, &opts)?;
        nodes += r.nodes_visited;
        match r.outcome {
            SearchOutcome::Found(e) => embeddable.push((t.canonical_code().to_string(), t.edges().to_vec(), e)),
            SearchOutcome::NotFound => blocked.push(t.canonical_code().to_string()),
            SearchOutcome::BudgetExceeded => {
                return Ok(Eval::budget(nodes, json!({"tree": t.canonical_code().to_string()})))
            }
        }
    }
    let path_blocked = blocked.contains(&path_pattern(7)?.canonical_code().to_string());
    let details = json!({
        "classes": trees.len(),
        "embeddable": embeddable.iter().map(|e| e.0.clone()).collect::<Vec<_>>(),
        "not_embeddable": blocked,
        "expected_embeddable": 3,
    });
    if trees.len() == 23 && embeddable.len() == 3 && path_blocked {
        return Ok(Eval::new(Status::Verified, nodes, details));
    }
    let witness: Vec<Value> = embeddable
        .iter()
        .map(|(code, edges, e)| json!({"code": code, "edges": edges, "embedding": to_json(e)}))
        .collect();
    Ok(Eval::new(Status::Refuted, nodes, details).with_witness(Value::Array(witness)))
}

fn falling(k: u128, l: u128) -> u128 {
    (k - l + 1..=k).product()
}

fn compare(found: Vec<u128>, expected: Vec<i128>, nodes: u64, details: Value) -> Eval {
    let same = found.len() == expected.len() && found.iter().zip(&expected).all(|(&f, &e)| e >= 0 && f == e as u128);
    if same {
        Eval::new(Status::Verified, nodes, details)
    } else {
        let one = found.len() == 1;
        let (found, expected) =
            if one { (json!(found[0]), json!(expected[0])) } else { (json!(found), json!(expected)) };
        Eval::new(Status::Mismatch { found, expected }, nodes, details)
    }
}

fn counted(r: crate::rainbow::SearchResult<SearchOutcome<u128>>, nodes: &mut u64) -> Option<u128> {
    *nodes += r.nodes_visited;
    match r.outcome {
        SearchOutcome::Found(c) => Some(c),
        _ => None,
    }
}

fn count_paths(s: u32, config: &RunConfig) -> Result<Eval, Error> {
    let g = build_d_star(s)?;
    let n = g.n() as u128;
    let k = s as u128 + 1;
    let mut nodes = 0;
    let mut found = Vec::new();
    let mut expected = Vec::new();
    for l in 1..k {
        let Some(c) = counted(count_rainbow_tree(&g, &path_pattern(l as usize)?, &config.search())?, &mut nodes) else {
            return Ok(Eval::budget(nodes, json!({"length": l as u64})));
        };
        found.push(c);
        expected.push((n * falling(k, l) / 2) as i128);
    }
    let Some(full) = counted(count_rainbow_tree(&g, &path_pattern(k as usize)?, &config.search())?, &mut nodes) else {
        return Ok(Eval::budget(nodes, json!({"length": k as u64})));
    };
    let details = json!({
        "lengths": (1..k as u64).collect::<Vec<_>>(),
        "enumerated": found.iter().map(|&c| c as u64).collect::<Vec<_>>(),
        "formula": expected,
        "length_k": {"length": k as u64, "enumerated": full as u64, "formula": (n * falling(k, k) / 2) as u64},
    });
    Ok(compare(found, expected, nodes, details))
}

fn count_cycles(g: &ColoredGraph, len: usize, formula: (i128, i128), config: &RunConfig) -> Result<Eval, Error> {
    let mut nodes = 0;
    let Some(c) = counted(count_rainbow_cycles(g, len, &config.search())?, &mut nodes) else {
        return Ok(Eval::budget(nodes, json!({"cycle_length": len})));
    };
    let (num, den) = formula;
    let details = json!({
        "n": g.n(),
        "cycle_length": len,
        "enumerated": c as u64,
        "formula": if num % den == 0 { json!(num / den) } else { json!(format!("{num}/{den}")) },
    });
    if num % den != 0 {
        let expected = details["formula"].clone();
        return Ok(Eval::new(Status::Mismatch { found: json!(c as u64), expected }, nodes, details));
    }
    Ok(compare(vec![c], vec![num / den], nodes, details))
}

fn count_d_cycle(s: u32, config: &RunConfig) -> Result<Eval, Error> {
    let g = build_d_star(s)?;
    let n = g.n() as i128;
    let k = s as i128 + 1;
    let fact: i128 = (1..k).product();
    count_cycles(&g, k as usize, (n * fact, 2), config)
}

fn count_k_cycle(s: u32, len: usize, config: &RunConfig) -> Result<Eval, Error> {
    let g = build_k_star(s)?;
    let n = g.n() as i128;
    let k = (1i128 << s) - 1;
    let formula = match len {
        3 => (n * k * (k - 1), 6),
        4 => (n * k * (k - 1) * (k - 2), 8),
        _ => (n * k * (k - 1) * (k - 3) * (k - 7), 10),
    };
    count_cycles(&g, len, formula, config)
}

fn k6_geometric(config: &RunConfig) -> Result<Eval, Error> {
    let g = build_k6_geometric();
    let r = longest_rainbow_path(&g, &config.search())?;
    let mut nodes = r.nodes_visited;
    let longest = match r.outcome {
        SearchOutcome::Found(p) => p,
        _ => return Ok(Eval::budget(nodes, Value::Null)),
    };
    let p5 = path_pattern(5)?;
    let mut without = Vec::new();
    for class in enumerate_proper_colorings(6, 5)? {
        let h = class.to_graph();
        let r = find_rainbow_tree(&h, &p5, &config.search())?;
        nodes += r.nodes_visited;
        match r.outcome {
            SearchOutcome::NotFound => without.push(h),
            SearchOutcome::Found(_) => {}
            SearchOutcome::BudgetExceeded => return Ok(Eval::budget(nodes, Value::Null)),
        }
    }
    let mut iso = Vec::new();
    for h in &without {
        iso.push(colorings_isomorphic(&g, h)?);
    }
    let details = json!({
        "longest_rainbow_path": longest.len(),
        "five_color_classes_without_rainbow_p5": without.len(),
        "isomorphic_to_geometric": iso,
    });
    let ok = longest.len() == 4 && !without.is_empty() && iso.iter().all(|&b| b);
    let status = if ok { Status::Verified } else { Status::Refuted };
    Ok(Eval::new(status, nodes, details).with_witness(to_json(&longest)))
}

fn k5_sweep(config: &RunConfig) -> Result<Eval, Error> {
    let t = path_pattern(4)?;
    let mut nodes = 0;
    let report = forall_check(
        ColoringFamily::ProperColorings { n: 5, max_colors: 10 },
        contains(&t, config.search(), &mut nodes),
    )?;
    Ok(forall_eval(report, nodes))
}

fn k4_probe(config: &RunConfig) -> Result<Eval, Error> {
    let t = path_pattern(3)?;
    let mut nodes = 0;
    let mut without = Vec::new();
    for class in enumerate_proper_colorings(4, 6)? {
        let r = find_rainbow_tree(&class.to_graph(), &t, &config.search())?;
        nodes += r.nodes_visited;
        match r.outcome {
            SearchOutcome::NotFound => without.push(class),
            SearchOutcome::Found(_) => {}
            SearchOutcome::BudgetExceeded => return Ok(Eval::budget(nodes, Value::Null)),
        }
    }
    let factorization = build_k_star(2)?;
    let mut hits = Vec::new();
    for c in &without {
        hits.push(colorings_isomorphic(&c.to_graph(), &factorization)?);
    }
    let details = json!({"classes_without_rainbow_p3": without.len(), "is_one_factorization": hits});
    let status = if hits.contains(&true) { Status::Verified } else { Status::Refuted };
    let witness = without.first().map(to_json).unwrap_or(json!({"classes_without_rainbow_p3": 0}));
    Ok(Eval::new(status, nodes, details).with_witness(witness))
}

fn degree_bound_hosts() -> Result<Vec<(String, ColoredGraph)>, Error> {
    let edge = ColoredGraph::new(2, [(0, 1, crate::ColorId(0))])?;
    Ok(vec![
        ("K2".into(), edge),
        ("K*_4".into(), build_k_star(2)?),
        ("K*_8".into(), build_k_star(3)?),
        ("D*_8".into(), build_d_star(3)?),
        ("D*_16".into(), build_d_star(4)?),
        ("K6-geometric".into(), build_k6_geometric()),
        ("K8-round-robin".into(), build_round_robin(8)?),
    ])
}

fn path_degree(bound: PathDegreeBound, config: &RunConfig) -> Result<Eval, Error> {
    let mut nodes = 0;
    let mut rows = Vec::new();
    let mut violation = None;
    for (name, g) in degree_bound_hosts()? {
        let r = check_maximal_path_degree_bound(&g, bound, &config.search())?;
        nodes += r.nodes_visited;
        let rep = match r.outcome {
            SearchOutcome::Found(rep) => rep,
            _ => return Ok(Eval::budget(nodes, json!({"host": name}))),
        };
        rows.push(json!({"host": name, "holds": rep.holds, "paths_checked": rep.paths_checked}));
        if let (Some(v), None) = (&rep.violation, &violation) {
            violation = Some(json!({"host": name, "violation": to_json(v)}));
        }
    }
    let details = json!({"bound": to_json(&bound), "hosts": rows});
    Ok(match violation {
        None => Eval::new(Status::Verified, nodes, details),
        Some(w) => Eval::new(Status::Refuted, nodes, details).with_witness(w),
    })
}

// ---------------------------------------------------------------------------
// Registry

macro_rules! claim {
    ($id:expr, $desc:expr, $body:expr) => {
        Claim::new($id, $desc, Box::new($body))
    };
}

/// Every registered claim, in report order.
pub fn registry() -> Vec<Claim> {
    let mut claims = Vec::new();
    for s in 2..=7u32 {
        claims.push(claim!(
            format!("D-PATH-S{s}"),
            format!("D*_{} has no rainbow P_{} and its longest rainbow path has length {s}", 1 << s, s + 1),
            move |c: &RunConfig| d_path(s, c)
        ));
    }
    for s in 2..=7u32 {
        claims.push(claim!(
            format!("D-GIRTH-S{s}"),
            format!("the shortest rainbow cycle in D*_{} has length {}", 1 << s, s + 1),
            move |c: &RunConfig| d_girth(s, c)
        ));
    }
    for k in 2..=7usize {
        let desc = if k % 2 == 1 {
            format!("no 1-factorization of K_{} contains a rainbow B_{{{k},2}}", k + 1)
        } else {
            format!("K_{} minus one color class has {} edges and no rainbow B_{{{k},2}}", k + 1, k * k / 2)
        };
        claims.push(claim!(format!("BK2-K{k}"), desc, move |c: &RunConfig| broom_k2(k, c)));
    }
    for s in 2..=4u32 {
        claims.push(claim!(
            format!("BK3-S{s}"),
            format!("K*_{} has no rainbow B_{{{},3}}", 1 << s, (1 << s) - 1),
            move |c: &RunConfig| broom_k3(s, c)
        ));
    }
    claims.push(claim!(
        "BROOM-SEQ",
        "stick sequences do not exist for 2 <= d <= 9 and exist for d = 10; K*_8 has no rainbow B_{7,d}, 4 <= d <= 6",
        broom_sequences
    ));
    claims.push(claim!(
        "BROOM-S4",
        "K*_16 has no rainbow B_{15,d} for 2 <= d <= 9 and has a rainbow B_{15,10}",
        broom_direct_s4
    ));
    for s in 3..=4u32 {
        claims.push(claim!(
            format!("CAT-S{s}"),
            format!("K*_{} has no rainbow caterpillar from the families on {} edges", 1 << s, (1 << s) - 1),
            move |c: &RunConfig| caterpillars(s, c)
        ));
    }
    claims.push(claim!("TREES7", "of the 23 trees on 7 edges exactly 3 have a rainbow copy in K*_8", seven_edge_trees));
    for s in 2..=4u32 {
        claims.push(claim!(
            format!("COUNT-P-S{s}"),
            format!("rainbow P_l in D*_{} number n k!/(2(k-l)!) for 1 <= l <= k - 1, k = {}", 1 << s, s + 1),
            move |c: &RunConfig| count_paths(s, c)
        ));
        claims.push(claim!(
            format!("COUNT-CK-D-S{s}"),
            format!("rainbow C_{} in D*_{} number n (k-1)!/2", s + 1, 1 << s),
            move |c: &RunConfig| count_d_cycle(s, c)
        ));
        claims.push(claim!(
            format!("COUNT-C3-K-S{s}"),
            format!("rainbow C_3 in K*_{} number n k(k-1)/6", 1 << s),
            move |c: &RunConfig| count_k_cycle(s, 3, c)
        ));
        claims.push(
            claim!(
                format!("COUNT-C4-K-S{s}"),
                format!("rainbow C_4 in K*_{} number n k(k-1)(k-2)/8", 1 << s),
                move |c: &RunConfig| count_k_cycle(s, 4, c)
            )
            .formula(),
        );
        claims.push(
            claim!(
                format!("COUNT-C5-K-S{s}"),
                format!("rainbow C_5 in K*_{} number n k(k-1)(k-3)(k-7)/10", 1 << s),
                move |c: &RunConfig| count_k_cycle(s, 5, c)
            )
            .formula(),
        );
    }
    claims.push(claim!(
        "K6-GEOM",
        "the pentagon 1-factorization of K_6 has longest rainbow path 4 and is the only 5-coloring class without a rainbow P_5",
        k6_geometric
    ));
    claims.push(claim!("K5-SWEEP", "every proper edge-coloring of K_5 has a rainbow P_4", k5_sweep));
    claims.push(claim!("K4-PROBE", "the 1-factorization of K_4 has no rainbow P_3", k4_probe));
    claims.push(claim!(
        "PATHDEG-2K-2",
        "an endpoint v of a rainbow path of length k that cannot be extended at v has d(v) <= 2k - 2",
        |c: &RunConfig| path_degree(PathDegreeBound::TwoKMinusTwo, c)
    ));
    claims.push(claim!(
        "PATHDEG-2K-1",
        "an endpoint v of a rainbow path of length k that cannot be extended at v has d(v) <= 2k - 1",
        |c: &RunConfig| path_degree(PathDegreeBound::TwoKMinusOne, c)
    ));
    claims
}

/// `*` matches any run of characters; everything else matches literally.
pub fn glob_match(pattern: &str, text: &str) -> bool {
    let p: Vec<char> = pattern.chars().collect();
    let t: Vec<char> = text.chars().collect();
    let (mut pi, mut ti) = (0, 0);
    let mut star: Option<(usize, usize)> = None;
    while ti < t.len() {
        if pi < p.len() && p[pi] != '*' && p[pi] == t[ti] {
            pi += 1;
            ti += 1;
        } else if pi < p.len() && p[pi] == '*' {
            star = Some((pi, ti));
            pi += 1;
        } else if let Some((sp, st)) = star {
            pi = sp + 1;
            ti = st + 1;
            star = Some((sp, st + 1));
        } else {
            return false;
        }
    }
    p[pi..].iter().all(|&c| c == '*')
}

pub fn run_all(filter: Option<&str>, config: &RunConfig) -> Result<Vec<ClaimReport>, Error> {
    let claims: Vec<Claim> = registry().into_iter().filter(|c| filter.is_none_or(|f| glob_match(f, &c.id))).collect();
    if config.threads == 1 {
        return claims.iter().map(|c| c.run(config)).collect();
    }
    let body = || claims.par_iter().map(|c| c.run(config)).collect::<Vec<_>>();
    let results = if config.threads == 0 {
        body()
    } else {
        rayon::ThreadPoolBuilder::new().num_threads(config.threads).build().expect("thread pool").install(body)
    };
    results.into_iter().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunVerdict {
    Success,
    /// Something was refuted, or a count disagreed outside a formula check.
    Failure,
    /// Nothing failed but some claim gave up on budget or size.
    Abstained,
}

pub fn overall_verdict(reports: &[ClaimReport]) -> RunVerdict {
    let failed = reports.iter().any(|r| match r.status {
        Status::Refuted => true,
        Status::Mismatch { .. } => !r.formula_check,
        _ => false,
    });
    let abstained = reports
        .iter()
        .any(|r| matches!(r.status, Status::Skipped { reason: SkipReason::Budget | SkipReason::SizeCap }));
    if failed {
        RunVerdict::Failure
    } else if abstained {
        RunVerdict::Abstained
    } else {
        RunVerdict::Success
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn globbing() {
        assert!(glob_match("D-*", "D-PATH-S3"));
        assert!(glob_match("*S3", "D-PATH-S3"));
        assert!(glob_match("D-*-S3", "D-GIRTH-S3"));
        assert!(!glob_match("D-*-S3", "D-GIRTH-S4"));
        assert!(glob_match("*", ""));
        assert!(glob_match("K5-SWEEP", "K5-SWEEP"));
        assert!(!glob_match("K5", "K5-SWEEP"));
        assert!(glob_match("**A*", "xxA"));
    }

    #[test]
    fn ids_are_unique() {
        let mut ids: Vec<String> = registry().into_iter().map(|c| c.id).collect();
        let n = ids.len();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), n);
    }

    #[test]
    fn caterpillar_families() {
        let s3: Vec<String> = caterpillar_instances(3).iter().map(|(f, c)| format!("{f}{c}")).collect();
        assert_eq!(s3, ["aCP(1,3,1)", "bCP(3,3)", "cCP(2,0,3)", "dCP(2,0,0,2)"]);
        let e4: Vec<String> =
            caterpillar_instances(4).iter().filter(|(f, _)| *f == 'e').map(|(_, c)| c.to_string()).collect();
        assert_eq!(e4, ["CP(3,1,9)", "CP(5,1,7)"]);
        for s in 3..=4 {
            for (_, c) in caterpillar_instances(s) {
                assert_eq!(c.edge_count(), (1 << s) - 1);
            }
        }
    }

    #[test]
    fn verdict_policy() {
        let report = |status, formula_check| ClaimReport {
            claim_id: "X".into(),
            status,
            formula_check,
            witness: None,
            details: Value::Null,
            nodes_visited: 1,
            wall_time_ms: 0,
        };
        let mismatch = || Status::Mismatch { found: json!(0), expected: json!(3) };
        assert_eq!(overall_verdict(&[report(Status::Verified, false)]), RunVerdict::Success);
        assert_eq!(overall_verdict(&[report(mismatch(), true)]), RunVerdict::Success);
        assert_eq!(overall_verdict(&[report(mismatch(), false)]), RunVerdict::Failure);
        assert_eq!(overall_verdict(&[report(Status::Refuted, false)]), RunVerdict::Failure);
        let budget = Status::Skipped { reason: SkipReason::Budget };
        assert_eq!(overall_verdict(&[report(budget, false)]), RunVerdict::Abstained);
        let infeasible = Status::Skipped { reason: SkipReason::ParameterInfeasible };
        assert_eq!(overall_verdict(&[report(infeasible, false)]), RunVerdict::Success);
    }

    #[test]
    fn report_json_field_order() {
        let r = registry().into_iter().find(|c| c.id == "D-PATH-S3").unwrap().run(&RunConfig::default()).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let keys = [
            "\"claim_id\"",
            "\"status\"",
            "\"formula_check\"",
            "\"witness\"",
            "\"details\"",
            "\"nodes_visited\"",
            "\"wall_time_ms\"",
        ];
        let pos: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]), "{text}");
        assert_eq!(r.status, Status::Verified);
        assert!(r.nodes_visited > 0);
    }
}
