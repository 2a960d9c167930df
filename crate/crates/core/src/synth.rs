//! Synthesis of action formulae that achieve an epistemic goal wherever it
//! is achievable, and a randomized check of that contract.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::action::{execute, ActionModel, PointedActionModel};
use crate::check::{eval_all, eval_basic, random_model};
use crate::correspond::correspond_multi;
use crate::error::{Error, Result};
use crate::kripke::{frame_class_holds, FrameClass};
use crate::normform::{boxify, to_adnf, to_dnf, Dnf};
use crate::reduce::{Reducer, WitnessNode};
use crate::syntax::{modal_depth, print_action, print_formula, Act, Action, AgentSet, Formula, F};
use crate::tau::tau;

/// An action formula `α` with `⟦α⟧goal` valid and `∃goal → ⟨α⟩goal` valid
/// in class `c`. Guards are basic formulae.
pub fn synthesize(goal: &F, c: FrameClass, agents: &AgentSet) -> Result<Act> {
    if !goal.is_basic() {
        return Err(Error::NotBasic(print_formula(goal)));
    }
    if !goal.agents().is_subset(agents) {
        return Err(Error::AgentMismatch);
    }
    let mut s = Synth { red: Reducer::new(c, agents.clone()), agents: agents.clone(), memo: BTreeMap::new() };
    match c {
        FrameClass::K => s.dnf(&to_dnf(goal)?),
        FrameClass::K45 => s.dnf(&to_adnf(goal)?),
        FrameClass::S5 => s.s5(goal),
    }
}

struct Synth {
    red: Reducer,
    agents: AgentSet,
    memo: BTreeMap<F, Act>,
}

impl Synth {
    /// Choice over the clauses; each clause is guarded by its own
    /// achievability and makes every covered agent learn the choice of its
    /// members' actions.
    fn dnf(&mut self, d: &Dnf) -> Result<Act> {
        let key = d.to_formula();
        if let Some(a) = self.memo.get(&key) {
            return Ok(a.clone());
        }
        let mut branches = Vec::new();
        for clause in &d.0 {
            let guard = self.red.exists_dnf(&Dnf(vec![clause.clone()]))?;
            let mut parts = vec![Action::test(guard)];
            for (agent, members) in &clause.covers {
                let options = members.iter().map(|m| self.dnf(m)).collect::<Result<Vec<_>>>()?;
                let inner = Action::choice_all(options).unwrap_or_else(|| Action::test(Formula::bot()));
                parts.push(Action::learn1(agent, inner));
            }
            branches.push(Action::compose_all(parts).expect("guard present"));
        }
        let out = Action::choice_all(branches).unwrap_or_else(|| Action::test(Formula::bot()));
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    /// Builds the action model whose shape mirrors the refinement witnessing
    /// achievability, then expresses it as an action formula accurate to the
    /// goal's modal depth.
    fn s5(&mut self, goal: &F) -> Result<Act> {
        let g = boxify(goal)?;
        let nodes = self.red.exists_s5(&g, None)?;
        if nodes.is_empty() {
            return Ok(Action::test(Formula::bot()));
        }
        let model = witness_model(&nodes, &self.agents)?;
        correspond_multi(&model, modal_depth(goal)?, FrameClass::S5)
    }
}

/// One action point per node occurrence. A node reached as a witness for
/// agent `e` shares its `e`-class with its parent; every other class is its
/// own, extended by its witnesses.
fn witness_model(nodes: &[WitnessNode], agents: &AgentSet) -> Result<PointedActionModel> {
    struct Build<'a> {
        agents: Vec<&'a String>,
        pre: Vec<F>,
        class_of: Vec<Vec<usize>>,
        fresh: usize,
    }
    impl Build<'_> {
        fn add(&mut self, n: &WitnessNode, ctx: Option<(usize, usize)>) -> usize {
            let p = self.pre.len();
            self.pre.push(n.guard.clone());
            for i in 0..self.agents.len() {
                let class = match ctx {
                    Some((e, c)) if e == i => c,
                    _ => {
                        self.fresh += 1;
                        self.fresh
                    }
                };
                self.class_of[i].push(class);
            }
            for (agent, alts) in &n.witnesses {
                let e = self.agents.iter().position(|a| *a == agent).expect("witness agent is declared");
                let class = self.class_of[e][p];
                for alt in alts.iter() {
                    self.add(alt, Some((e, class)));
                }
            }
            p
        }
    }
    let mut b = Build { agents: agents.iter().collect(), pre: Vec::new(), class_of: vec![Vec::new(); agents.len()], fresh: 0 };
    let points: Vec<usize> = nodes.iter().map(|n| b.add(n, None)).collect();
    let n = b.pre.len();
    let rel = b
        .class_of
        .iter()
        .map(|cls| (0..n).map(|p| (0..n).filter(|&q| cls[q] == cls[p]).collect()).collect())
        .collect();
    let names = (0..n).map(|p| format!("w{p}")).collect();
    PointedActionModel::new(ActionModel::new(agents, names, b.pre, rel)?, points)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SynthesisReport {
    pub trials: usize,
    /// Models where the goal was achievable.
    pub achievable: usize,
    pub executions_attempted: usize,
    pub executions_succeeded: usize,
    pub goal_satisfied: usize,
    pub counterexamples: Vec<Counterexample>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    /// `necessity` or `sufficiency`.
    pub contract: String,
    pub model: serde_json::Value,
}

/// Checks both contracts of `alpha` for `goal` on `trials` random models.
pub fn verify_synthesis(goal: &F, alpha: &Act, c: FrameClass, agents: &AgentSet, trials: usize, seed: u64) -> Result<SynthesisReport> {
    verify_with(goal, alpha, c, agents, trials, seed, 5)
}

pub fn verify_with(
    goal: &F,
    alpha: &Act,
    c: FrameClass,
    agents: &AgentSet,
    trials: usize,
    seed: u64,
    max_states: usize,
) -> Result<SynthesisReport> {
    let mut atoms: Vec<String> = goal.atoms().into_iter().collect();
    if atoms.is_empty() {
        atoms.push("p".into());
    }
    let mut red = Reducer::new(c, agents.clone());
    let achievable = red.exists(goal)?;
    let am = tau(alpha, c, agents)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SynthesisReport { trials, ..Default::default() };
    for _ in 0..trials {
        let m = random_model(&mut rng, c, max_states, agents, &atoms);
        let ex = eval_basic(&m, &achievable)?;
        report.achievable += ex as usize;
        report.executions_attempted += 1;
        let result = execute(&m, &am, &mut |km, f| eval_all(km, f))?;
        let ran = !result.points.is_empty() && frame_class_holds(&result.model, c);
        let (all, some) = if ran {
            let v = eval_all(&result.model, goal)?;
            (result.points.iter().all(|&s| v[s]), result.points.iter().any(|&s| v[s]))
        } else {
            (true, false)
        };
        if ran {
            report.executions_succeeded += 1;
            report.goal_satisfied += all as usize;
        }
        let json = || serde_json::to_value(m.to_json_value()).expect("model serializes");
        if ran && !all {
            report.counterexamples.push(Counterexample { contract: "necessity".into(), model: json() });
        }
        if ex && !some {
            report.counterexamples.push(Counterexample { contract: "sufficiency".into(), model: json() });
        }
    }
    Ok(report)
}

impl SynthesisReport {
    pub fn summary(&self, alpha: &Act) -> String {
        format!(
            "{}\n{} trials, {} achievable, {} executions succeeded, {} satisfied the goal\n{} counterexamples",
            print_action(alpha),
            self.trials,
            self.achievable,
            self.executions_succeeded,
            self.goal_satisfied,
            self.counterexamples.len()
        )
    }
}
