//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use actform::action::{am_frame_class_holds, execute, execute_indexed, seq_compose, PointedActionModel};
use actform::bisim::{am_n_bisimilar, refines};
use actform::check::{check, check_via_reduction, eval_all, random_action_model, random_model, Checker, Sampler};
use actform::correspond::correspond;
use actform::kripke::{frame_class_holds, KripkeModel, PointedKripkeModel};
use actform::normform::{to_explicit, ExplicitBudget};
use actform::reduce::Reducer;
use actform::synth::{synthesize, verify_with};
use actform::syntax::{fold, parse_action, parse_formula, print_action, print_formula, Act, Action, AgentSet, Formula, F};
use actform::tau::tau;
use actform::FrameClass;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Rng8 = ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn two_agents() -> AgentSet {
    ["a".to_string(), "b".to_string()].into()
}

fn atoms() -> Vec<String> {
    vec!["p".to_string(), "q".to_string()]
}

fn sampler() -> Sampler {
    Sampler::basic(&two_agents(), &atoms())
}

// ---------------------------------------------------------------------------
// 1. Grant scenario

const GRANT_ACTION: &str =
    "L{ed}(?p) ; L{james}(L{ed}(?p) + L{ed}(?~p) + L{tim}(?p) + L{tim}(?~p)) ; L{tim}((?~p ; L{james}(?~p)) + ?true)";

fn grant() -> Result<Outcome, actform::Error> {
    let started = Instant::now();
    let agents: AgentSet = ["ed", "james", "tim"].iter().map(|s| s.to_string()).collect();
    let all = [("w1", "w1"), ("w1", "w2"), ("w2", "w1"), ("w2", "w2")];
    let m0 = KripkeModel::new(&agents, &["w1", "w2"], &[("w1", &["p"])], &[("ed", &all), ("james", &all), ("tim", &all)])?;
    let m0 = PointedKripkeModel::at(m0, 0);
    let alpha = parse_action(GRANT_ACTION, &agents)?;
    let am = tau(&alpha, FrameClass::K, &agents)?;
    let result = execute(&m0, &am, &mut |km, f| eval_all(km, f))?;
    let f = |s: &str| parse_formula(s, &agents);
    let mut verdicts = Vec::new();
    let goals = [
        ("[ed] p", true),
        ("[james] ([ed] p | [ed] ~p | [tim] p | [tim] ~p)", true),
        ("~[james] p & ~[james] ~p", true),
    ];
    let mut pass = !result.points.is_empty();
    for (text, _) in goals {
        let v = check(&result, &f(text)?, FrameClass::K)?;
        pass &= v;
        verdicts.push(format!("{text}={v}"));
    }
    // The dynamic formulations must agree at the initial point.
    for (text, _) in goals {
        let dynamic = f(&format!("[{GRANT_ACTION}] ({text})"))?;
        pass &= check(&m0, &dynamic, FrameClass::K)?;
        pass &= check_via_reduction(&m0, &dynamic, FrameClass::K)?;
    }
    let tim = check(&result, &f("~[tim] p & ~[tim] ~p & [tim] (~p -> [james] ~p)")?, FrameClass::K)?;
    let elapsed = started.elapsed();
    pass &= elapsed < Duration::from_secs(1);
    Ok(Outcome {
        pass,
        detail: format!("{}; Tim goal (recorded only)={tim}; {:?}", verdicts.join(", "), elapsed),
    })
}

// ---------------------------------------------------------------------------
// 2. Axiom soundness

/// Truth of `[A_T]ψ` at every state, where `inner` evaluates `ψ` on the
/// updated model.
fn am_box(
    m: &KripkeModel,
    a: &PointedActionModel,
    inner: &mut dyn FnMut(&KripkeModel) -> Vec<bool>,
) -> Vec<bool> {
    let whole = PointedKripkeModel::new(m.clone(), (0..m.len()).collect());
    let (result, pairs) = execute_indexed(&whole, a, &mut |km, f| eval_all(km, f)).expect("execution");
    let mut out = vec![true; m.len()];
    if pairs.is_empty() {
        return out;
    }
    let v = inner(&result.model);
    for (k, &(s, t)) in pairs.iter().enumerate() {
        if a.points.contains(&t) {
            out[s] &= v[k];
        }
    }
    out
}

fn with_points(a: &PointedActionModel, points: Vec<usize>) -> Option<PointedActionModel> {
    PointedActionModel::new(a.model.clone(), points).ok()
}

fn implies(x: &[bool], y: &[bool]) -> Vec<bool> {
    x.iter().zip(y).map(|(a, b)| !a || *b).collect()
}

fn and(x: &[bool], y: &[bool]) -> Vec<bool> {
    x.iter().zip(y).map(|(a, b)| *a && *b).collect()
}

/// A formula whose top modal layer avoids `excluded`; bodies are unrestricted.
fn restricted(rng: &mut Rng8, s: &Sampler, excluded: &AgentSet, depth: usize) -> F {
    let others: Vec<&String> = s.agents.iter().filter(|a| !excluded.contains(*a)).collect();
    match rng.gen_range(0..5) {
        0 | 1 => s.literal(rng),
        2 | 3 if others.is_empty() || depth == 0 => s.literal(rng),
        2 if depth > 0 && !others.is_empty() => fold::boxed(others.choose(rng).unwrap(), s.formula(rng, depth - 1)),
        3 if depth > 0 && !others.is_empty() => Formula::diamond(others.choose(rng).unwrap(), s.formula(rng, depth - 1)),
        _ => Formula::and(restricted(rng, s, excluded, depth), restricted(rng, s, excluded, depth)),
    }
}

fn axioms() -> Result<Outcome, actform::Error> {
    let started = Instant::now();
    let agents = two_agents();
    let s = sampler();
    let mut rng = Rng8::seed_from_u64(2);
    let mut failures: BTreeMap<&'static str, usize> = BTreeMap::new();
    let mut supplementary: Vec<bool> = Vec::new();
    let mut counts: BTreeMap<&'static str, usize> = BTreeMap::new();
    let mut record = |name: &'static str, ok: bool| {
        *counts.entry(name).or_default() += 1;
        if !ok {
            *failures.entry(name).or_default() += 1;
        }
    };
    let agent_list: Vec<String> = agents.iter().cloned().collect();
    let checker_iff = |m: &PointedKripkeModel, c: FrameClass, lhs: F, rhs: F| -> Result<bool, actform::Error> {
        let mut ch = Checker::new(c, m.model.agent_set());
        let l = ch.values(&m.model, &lhs)?;
        let r = ch.values(&m.model, &rhs)?;
        Ok(l == r)
    };

    for _ in 0..200 {
        // Learning axioms in K, and the restricted variant in K45.
        let m = random_model(&mut rng, FrameClass::K, 6, &agents, &atoms());
        let alpha = s.action(&mut rng, 2);
        let beta = s.action(&mut rng, 2);
        let phi = s.formula(&mut rng, 2);
        let psi = s.formula(&mut rng, 2);
        let a = agent_list.choose(&mut rng).unwrap().clone();
        let other = agent_list.iter().find(|x| **x != a).unwrap().clone();
        let with_a: AgentSet = if rng.gen_bool(0.5) { agents.clone() } else { [a.clone()].into() };
        let learn = Action::learn(with_a.clone(), alpha.clone(), beta.clone());
        let learn_other = Action::learn([other.clone()].into(), alpha.clone(), beta.clone());
        let k = FrameClass::K;
        let db = |x: &Act, f: F| Formula::dyn_box(x.clone(), f);
        record("LT", checker_iff(&m, k, db(&Action::test(phi.clone()), psi.clone()), Formula::implies(phi.clone(), psi.clone()))?);
        record(
            "LU",
            checker_iff(&m, k, db(&Action::choice(alpha.clone(), beta.clone()), phi.clone()), Formula::and(db(&alpha, phi.clone()), db(&beta, phi.clone())))?,
        );
        record("LS", checker_iff(&m, k, db(&Action::compose(alpha.clone(), beta.clone()), phi.clone()), db(&alpha, db(&beta, phi.clone())))?);
        record("LP", checker_iff(&m, k, db(&learn, Formula::atom("p")), Formula::atom("p"))?);
        record("LN", checker_iff(&m, k, db(&learn, Formula::not(phi.clone())), Formula::not(db(&learn, phi.clone())))?);
        record(
            "LC",
            checker_iff(&m, k, db(&learn, Formula::and(phi.clone(), psi.clone())), Formula::and(db(&learn, phi.clone()), db(&learn, psi.clone())))?,
        );
        record(
            "LK1",
            checker_iff(&m, k, db(&learn, Formula::boxed(&a, phi.clone())), Formula::boxed(&a, db(&Action::choice(alpha.clone(), beta.clone()), phi.clone())))?,
        );
        record("LK2", checker_iff(&m, k, db(&learn_other, Formula::boxed(&a, phi.clone())), Formula::boxed(&a, phi.clone()))?);

        let m45 = random_model(&mut rng, FrameClass::K45, 6, &agents, &atoms());
        let lk1 = |chi: F| {
            checker_iff(&m45, FrameClass::K45, db(&learn, Formula::boxed(&a, chi.clone())), Formula::boxed(&a, db(&Action::choice(alpha.clone(), beta.clone()), chi)))
        };
        let chi = restricted(&mut rng, &s, &[a.clone()].into(), 1);
        record("LK1 (K45, restricted)", lk1(chi)?);
        // Supplementary: χ free of every learning agent's top-level modality.
        let chi = restricted(&mut rng, &s, &with_a, 1);
        supplementary.push(lk1(chi)?);

        // Action model axioms in K, evaluated by direct execution.
        let am1 = random_action_model(&mut rng, FrameClass::K, 3, &s, 1);
        let am2 = random_action_model(&mut rng, FrameClass::K, 3, &s, 1);
        let km = &m.model;
        let t = am1.points[0];
        let phi_v = |km: &KripkeModel| eval_all(km, &phi).unwrap();
        let mut red = Reducer::new(FrameClass::K, agents.clone());
        let composed = seq_compose(&am1, &am2, &mut |am, x, post| Ok(fold::and(am.pre[x].clone(), red.tr(am, x, post)?)))?;
        let lhs = am_box(km, &composed, &mut |km| phi_v(km));
        let rhs = am_box(km, &am1, &mut |km| am_box(km, &am2, &mut |km| phi_v(km)));
        record("AS", lhs == rhs);
        let subset: Vec<usize> = (0..am1.model.len()).filter(|_| rng.gen_bool(0.6)).collect();
        if let Some(multi) = with_points(&am1, subset.clone()) {
            let lhs = am_box(km, &multi, &mut |km| phi_v(km));
            let mut rhs = vec![true; km.len()];
            for &x in &subset {
                rhs = and(&rhs, &am_box(km, &am1.at(x), &mut |km| phi_v(km)));
            }
            record("AU", lhs == rhs);
        }
        let pre_v = eval_all(km, &am1.model.pre[t])?;
        let p_v = eval_all(km, &Formula::atom("p"))?;
        record("AP", am_box(km, &am1, &mut |km| eval_all(km, &Formula::atom("p")).unwrap()) == implies(&pre_v, &p_v));
        let not_phi = Formula::not(phi.clone());
        let lhs = am_box(km, &am1, &mut |km| eval_all(km, &not_phi).unwrap());
        let inner: Vec<bool> = am_box(km, &am1, &mut |km| phi_v(km)).into_iter().map(|x| !x).collect();
        record("AN", lhs == implies(&pre_v, &inner));
        let conj = Formula::and(phi.clone(), psi.clone());
        let lhs = am_box(km, &am1, &mut |km| eval_all(km, &conj).unwrap());
        let rhs = and(&am_box(km, &am1, &mut |km| phi_v(km)), &am_box(km, &am1, &mut |km| eval_all(km, &psi).unwrap()));
        record("AC", lhs == rhs);
        let ai = km.agent_index(&a).unwrap();
        let boxed = Formula::boxed(&a, phi.clone());
        let lhs = am_box(km, &am1, &mut |km| eval_all(km, &boxed).unwrap());
        let succ = am1.model.succ(ai, t).to_vec();
        let after = match with_points(&am1, succ) {
            Some(next) => am_box(km, &next, &mut |km| phi_v(km)),
            None => vec![true; km.len()],
        };
        let boxed_after: Vec<bool> = (0..km.len()).map(|x| km.succ(ai, x).iter().all(|&y| after[y])).collect();
        record("AK", lhs == implies(&pre_v, &boxed_after));

        // Refinement axioms per class.
        for c in FrameClass::ALL {
            let mc = random_model(&mut rng, c, 6, &agents, &atoms());
            let x = s.formula(&mut rng, 2);
            let y = s.formula(&mut rng, 2);
            let all = |f: F| Formula::ref_box(f);
            let ex = |f: F| Formula::ref_diamond(f);
            let r_axiom = Formula::implies(all(Formula::implies(x.clone(), y.clone())), Formula::implies(all(x.clone()), all(y.clone())));
            record(label(c, "R"), checker_iff(&mc, c, r_axiom, Formula::top())?);
            let pi = s.formula(&mut rng, 0);
            record(label(c, "RP"), checker_iff(&mc, c, all(pi.clone()), pi)?);
            match c {
                FrameClass::K | FrameClass::K45 => {
                    let gen = |rng: &mut Rng8, agent: &str| -> BTreeSet<F> {
                        let n = rng.gen_range(0..=2);
                        (0..n)
                            .map(|_| if c == FrameClass::K { s.formula(rng, 1) } else { restricted(rng, &s, &[agent.to_string()].into(), 1) })
                            .collect()
                    };
                    let ga = gen(&mut rng, &a);
                    let gb = gen(&mut rng, &other);
                    let lhs = ex(Formula::cover(&a, ga.iter().cloned()));
                    let rhs = Formula::conj(ga.iter().map(|g| Formula::diamond(&a, ex(g.clone()))));
                    record(label(c, if c == FrameClass::K { "RK" } else { "RK45" }), checker_iff(&mc, c, lhs, rhs)?);
                    let both = ex(Formula::and(Formula::cover(&a, ga.iter().cloned()), Formula::cover(&other, gb.iter().cloned())));
                    let split = Formula::and(ex(Formula::cover(&a, ga.iter().cloned())), ex(Formula::cover(&other, gb.iter().cloned())));
                    record(label(c, "RDist"), checker_iff(&mc, c, both, split)?);
                }
                FrameClass::S5 => {
                    let Some(e) = random_explicit(&mut rng, &s) else { continue };
                    let gamma0 = Formula::and(e.pi.clone(), e.gamma0.clone());
                    for (agent, gamma) in &e.covers {
                        let lhs = ex(Formula::and(gamma0.clone(), Formula::cover(agent, gamma.iter().cloned())));
                        let rhs = Formula::and(
                            ex(gamma0.clone()),
                            Formula::conj(gamma.iter().map(|g| Formula::diamond(agent, ex(g.clone())))),
                        );
                        record(label(c, "RS5"), checker_iff(&mc, c, lhs, rhs)?);
                    }
                    let whole = ex(e.to_formula());
                    let split = Formula::conj(e.covers.iter().map(|(agent, gamma)| {
                        ex(Formula::and(gamma0.clone(), Formula::cover(agent, gamma.iter().cloned())))
                    }));
                    let ok = checker_iff(&mc, c, whole.clone(), split.clone())?;
                    record(label(c, "RDist"), ok);
                }
            }
        }
    }
    let elapsed = started.elapsed();
    let total: usize = counts.values().sum();
    let failed: usize = failures.values().sum();
    let pass = failed == 0 && elapsed < Duration::from_secs(60);
    let detail = if failed == 0 {
        format!("{} axioms, {total} instances, {:?}", counts.len(), elapsed)
    } else {
        format!("failures {failures:?} of {total}, {:?}", elapsed)
    };
    let held = supplementary.iter().filter(|x| **x).count();
    let detail = format!("{detail}; K45 LK1 with χ free of all learning agents: {held}/{} hold", supplementary.len());
    Ok(Outcome { pass, detail })
}

fn label(c: FrameClass, name: &'static str) -> &'static str {
    let key = format!("{name} ({c})");
    Box::leak(key.into_boxed_str())
}

/// A random explicit formula over one or two agents.
fn random_explicit(rng: &mut Rng8, s: &Sampler) -> Option<actform::normform::Explicit> {
    for _ in 0..20 {
        let f = s.formula(rng, 2);
        if f.agents().is_empty() {
            continue;
        }
        let budget = ExplicitBudget { max_items: 8, max_candidates: 6, max_disjuncts: 400 };
        if let Ok(es) = to_explicit(&f, budget) {
            if let Some(e) = es.choose(rng) {
                return Some(e.clone());
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// 3. Dual path

fn dual_path() -> Result<Outcome, actform::Error> {
    let started = Instant::now();
    let agents = two_agents();
    let mut s = sampler();
    s.dynamic = true;
    s.refinement = true;
    s.max_ops = 2;
    let mut bad = Vec::new();
    let mut total = 0;
    for c in FrameClass::ALL {
        let mut rng = Rng8::seed_from_u64(3 + c as u64);
        for _ in 0..300 {
            let m = random_model(&mut rng, c, 5, &agents, &atoms());
            let f = s.full_formula(&mut rng, 2);
            total += 1;
            let x = check(&m, &f, c)?;
            let y = check_via_reduction(&m, &f, c)?;
            if x != y {
                bad.push(format!("{c}: {}", print_formula(&f)));
            }
        }
    }
    Ok(Outcome {
        pass: bad.is_empty(),
        detail: format!("{} of {total} disagree{}; {:?}", bad.len(), first(&bad), started.elapsed()),
    })
}

fn first(items: &[String]) -> String {
    items.first().map(|x| format!(", e.g. {x}")).unwrap_or_default()
}

// ---------------------------------------------------------------------------
// 4. Correspondence

fn correspondence() -> Result<Outcome, actform::Error> {
    let started = Instant::now();
    let agents = two_agents();
    let s = sampler();
    let mut bad = Vec::new();
    let mut total = 0;
    for c in FrameClass::ALL {
        let mut rng = Rng8::seed_from_u64(4 + c as u64);
        for _ in 0..100 {
            let a = random_action_model(&mut rng, c, 4, &s, 1);
            for n in 0..=2 {
                total += 1;
                let alpha = correspond(&a, n, c)?;
                if !am_n_bisimilar(&tau(&alpha, c, &agents)?, &a, n, c)? {
                    bad.push(format!("{c} n={n}: {}", print_action(&alpha)));
                }
            }
        }
    }
    Ok(Outcome { pass: bad.is_empty(), detail: format!("{} of {total} fail{}; {:?}", bad.len(), first(&bad), started.elapsed()) })
}

// ---------------------------------------------------------------------------
// 5. Synthesis contracts

fn synthesis() -> Result<Outcome, actform::Error> {
    let started = Instant::now();
    let agents = two_agents();
    let s = sampler();
    let mut counterexamples = Vec::new();
    let mut runs = 0;
    for c in FrameClass::ALL {
        let mut rng = Rng8::seed_from_u64(5 + c as u64);
        for i in 0..100 {
            let goal = s.formula(&mut rng, 2);
            let alpha = synthesize(&goal, c, &agents)?;
            let report = verify_with(&goal, &alpha, c, &agents, 50, 1000 * c as u64 + i, 5)?;
            runs += report.executions_attempted;
            for cx in report.counterexamples {
                counterexamples.push(format!("{c} goal {} ({}): {}", print_formula(&goal), cx.contract, cx.model));
            }
        }
    }
    for cx in &counterexamples {
        println!("  counterexample {cx}");
    }
    Ok(Outcome {
        pass: counterexamples.is_empty(),
        detail: format!("{} counterexamples over {runs} executions; {:?}", counterexamples.len(), started.elapsed()),
    })
}

// ---------------------------------------------------------------------------
// 6. Frame preservation

fn frames() -> Result<Outcome, actform::Error> {
    let started = Instant::now();
    let agents = two_agents();
    let s = sampler();
    let mut bad = Vec::new();
    let mut total = 0;
    for c in FrameClass::ALL {
        let mut rng = Rng8::seed_from_u64(6 + c as u64);
        for _ in 0..200 {
            total += 1;
            let alpha = s.action(&mut rng, 3);
            let am = tau(&alpha, c, &agents)?;
            let m = random_model(&mut rng, c, 5, &agents, &atoms());
            let result = execute(&m, &am, &mut |km, f| eval_all(km, f))?;
            if !am_frame_class_holds(&am.model, c) || !frame_class_holds(&result.model, c) {
                bad.push(format!("{c}: {}", print_action(&alpha)));
            }
        }
    }
    Ok(Outcome { pass: bad.is_empty(), detail: format!("{} of {total} leave the class{}; {:?}", bad.len(), first(&bad), started.elapsed()) })
}

// ---------------------------------------------------------------------------
// 7. Algebraic validities of choice and composition

fn algebra() -> Result<Outcome, actform::Error> {
    let started = Instant::now();
    let agents = two_agents();
    let s = sampler();
    let mut bad = Vec::new();
    let mut total = 0;
    for c in FrameClass::ALL {
        let mut rng = Rng8::seed_from_u64(7 + c as u64);
        for _ in 0..100 {
            let m = random_model(&mut rng, c, 5, &agents, &atoms());
            let (x, y, z) = (s.action(&mut rng, 2), s.action(&mut rng, 2), s.action(&mut rng, 2));
            let phi = s.formula(&mut rng, 2);
            let db = |a: Act| Formula::dyn_box(a, phi.clone());
            let ch = Action::choice;
            let co = Action::compose;
            let laws: [(&str, F, F); 7] = [
                ("choice", db(ch(x.clone(), y.clone())), Formula::and(db(x.clone()), db(y.clone()))),
                ("sequence", db(co(x.clone(), y.clone())), Formula::dyn_box(x.clone(), db(y.clone()))),
                ("idempotence", db(ch(x.clone(), x.clone())), db(x.clone())),
                ("commutativity", db(ch(x.clone(), y.clone())), db(ch(y.clone(), x.clone()))),
                ("choice associativity", db(ch(ch(x.clone(), y.clone()), z.clone())), db(ch(x.clone(), ch(y.clone(), z.clone())))),
                ("sequence associativity", db(co(co(x.clone(), y.clone()), z.clone())), db(co(x.clone(), co(y.clone(), z.clone())))),
                (
                    "distribution",
                    db(co(ch(x.clone(), y.clone()), z.clone())),
                    db(ch(co(x.clone(), z.clone()), co(y.clone(), z.clone()))),
                ),
            ];
            let mut checker = Checker::new(c, agents.clone());
            for (name, lhs, rhs) in laws {
                total += 1;
                let l = checker.values(&m.model, &lhs)?;
                let r = checker.values(&m.model, &rhs)?;
                if l != r {
                    bad.push(format!("{c} {name}: {} / {}", print_action(&x), print_formula(&phi)));
                }
            }
        }
    }
    Ok(Outcome { pass: bad.is_empty(), detail: format!("{} of {total} fail{}; {:?}", bad.len(), first(&bad), started.elapsed()) })
}

// ---------------------------------------------------------------------------
// 8. Updates are refinements

fn refinement() -> Result<Outcome, actform::Error> {
    let started = Instant::now();
    let agents = two_agents();
    let s = sampler();
    let mut rng = Rng8::seed_from_u64(8);
    let (mut pairs, mut tries, mut bad) = (0, 0, Vec::new());
    while pairs < 100 && tries < 10_000 {
        tries += 1;
        let c = *FrameClass::ALL.choose(&mut rng).unwrap();
        let m = random_model(&mut rng, c, 5, &agents, &atoms());
        let alpha = s.action(&mut rng, 2);
        let result = execute(&m, &tau(&alpha, c, &agents)?, &mut |km, f| eval_all(km, f))?;
        if result.points.is_empty() {
            continue;
        }
        pairs += 1;
        for &r in &result.points {
            if !refines(&result.with_points(vec![r]), &m)? {
                bad.push(format!("{c}: {}", print_action(&alpha)));
            }
        }
    }
    Ok(Outcome {
        pass: pairs == 100 && bad.is_empty(),
        detail: format!("{pairs} successful executions, {} not refinements{}; {:?}", bad.len(), first(&bad), started.elapsed()),
    })
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome, actform::Error>); 8] = [
        ("grant scenario", grant),
        ("axiom soundness", axioms),
        ("dual-path agreement", dual_path),
        ("correspondence", correspondence),
        ("synthesis contracts", synthesis),
        ("frame preservation", frames),
        ("choice and composition laws", algebra),
        ("updates are refinements", refinement),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run().unwrap_or_else(|e| Outcome { pass: false, detail: format!("error: {e}") });
        all &= outcome.pass;
        println!("criterion {} ({name}): {} - {}", i + 1, if outcome.pass { "PASS" } else { "FAIL" }, outcome.detail);
    }
    if !all {
        std::process::exit(1);
    }
}
