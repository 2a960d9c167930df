//! Model checking for the full language and random instance generation.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::action::{execute_indexed, ActionModel, PointedActionModel};
use crate::error::{Error, Result};
use crate::kripke::{frame_class_holds, FrameClass, KripkeModel, PointedKripkeModel};
use crate::reduce::Reducer;
use crate::syntax::{expand_cover, print_formula, Act, Action, AgentSet, Formula, F};
use crate::tau;

/// Truth value of a basic formula at every state.
pub fn eval_all(m: &KripkeModel, f: &F) -> Result<Vec<bool>> {
    let mut memo = HashMap::new();
    eval_in(m, f, &mut memo)
}

fn eval_in(m: &KripkeModel, f: &F, memo: &mut HashMap<*const Formula, (F, Vec<bool>)>) -> Result<Vec<bool>> {
    let key = Arc::as_ptr(f);
    if let Some((_, v)) = memo.get(&key) {
        return Ok(v.clone());
    }
    let n = m.len();
    let zip = |x: Vec<bool>, y: Vec<bool>, op: fn(bool, bool) -> bool| -> Vec<bool> {
        x.into_iter().zip(y).map(|(a, b)| op(a, b)).collect()
    };
    let v = match &**f {
        Formula::Top => vec![true; n],
        Formula::Bottom => vec![false; n],
        Formula::Atom(p) => (0..n).map(|s| m.holds(s, p)).collect(),
        Formula::Not(g) => eval_in(m, g, memo)?.into_iter().map(|b| !b).collect(),
        Formula::And(a, b) => zip(eval_in(m, a, memo)?, eval_in(m, b, memo)?, |x, y| x && y),
        Formula::Or(a, b) => zip(eval_in(m, a, memo)?, eval_in(m, b, memo)?, |x, y| x || y),
        Formula::Implies(a, b) => zip(eval_in(m, a, memo)?, eval_in(m, b, memo)?, |x, y| !x || y),
        Formula::Iff(a, b) => zip(eval_in(m, a, memo)?, eval_in(m, b, memo)?, |x, y| x == y),
        Formula::Box(a, g) | Formula::Diamond(a, g) => {
            let ag = m.agent_index(a).ok_or(Error::AgentMismatch)?;
            let inner = eval_in(m, g, memo)?;
            let is_box = matches!(**f, Formula::Box(..));
            (0..n)
                .map(|s| {
                    let succ = m.succ(ag, s);
                    if is_box {
                        succ.iter().all(|&t| inner[t])
                    } else {
                        succ.iter().any(|&t| inner[t])
                    }
                })
                .collect()
        }
        Formula::Cover(a, gs) => eval_in(m, &expand_cover(a, gs), memo)?,
        _ => return Err(Error::NotBasic(print_formula(f))),
    };
    memo.insert(key, (f.clone(), v.clone()));
    Ok(v)
}

/// Satisfaction at every designated state; vacuously true without any.
pub fn eval_basic(m: &PointedKripkeModel, f: &F) -> Result<bool> {
    let v = eval_all(&m.model, f)?;
    Ok(m.points.iter().all(|&s| v[s]))
}

/// Semantic checker: dynamic modalities by translation and execution,
/// refinement quantifiers by reduction.
pub struct Checker {
    reducer: Reducer,
}

impl Checker {
    pub fn new(c: FrameClass, agents: AgentSet) -> Self {
        Checker { reducer: Reducer::new(c, agents) }
    }

    pub fn with_budget(c: FrameClass, agents: AgentSet, budget: usize) -> Self {
        Checker { reducer: Reducer::with_budget(c, agents, budget) }
    }

    pub fn class(&self) -> FrameClass {
        self.reducer.class()
    }

    pub fn check(&mut self, m: &PointedKripkeModel, f: &F) -> Result<bool> {
        if !frame_class_holds(&m.model, self.class()) {
            return Err(Error::ClassViolation(self.class().to_string()));
        }
        let v = self.values(&m.model, f)?;
        Ok(m.points.iter().all(|&s| v[s]))
    }

    /// Truth value at every state of a model in the checker's class. The work
    /// budget applies to each call separately.
    pub fn values(&mut self, m: &KripkeModel, f: &F) -> Result<Vec<bool>> {
        self.reducer.restart_budget();
        self.eval(m, f)
    }

    fn eval(&mut self, m: &KripkeModel, f: &F) -> Result<Vec<bool>> {
        let n = m.len();
        Ok(match &**f {
            Formula::Top | Formula::Bottom | Formula::Atom(_) => eval_all(m, f)?,
            Formula::Not(g) => self.eval(m, g)?.into_iter().map(|b| !b).collect(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                let x = self.eval(m, a)?;
                let y = self.eval(m, b)?;
                x.into_iter()
                    .zip(y)
                    .map(|(x, y)| match &**f {
                        Formula::And(..) => x && y,
                        Formula::Or(..) => x || y,
                        Formula::Implies(..) => !x || y,
                        _ => x == y,
                    })
                    .collect()
            }
            Formula::Box(a, g) | Formula::Diamond(a, g) => {
                let ag = m.agent_index(a).ok_or(Error::AgentMismatch)?;
                let inner = self.eval(m, g)?;
                let is_box = matches!(**f, Formula::Box(..));
                (0..n)
                    .map(|s| {
                        let succ = m.succ(ag, s);
                        if is_box {
                            succ.iter().all(|&t| inner[t])
                        } else {
                            succ.iter().any(|&t| inner[t])
                        }
                    })
                    .collect()
            }
            Formula::Cover(a, gs) => self.eval(m, &expand_cover(a, gs))?,
            Formula::DynBox(alpha, g) => self.dynamic(m, alpha, g, true)?,
            Formula::DynDiamond(alpha, g) => self.dynamic(m, alpha, g, false)?,
            Formula::RefBox(_) | Formula::RefDiamond(_) => {
                let r = self.reducer.reduce(f)?;
                eval_all(m, &r)?
            }
        })
    }

    fn dynamic(&mut self, m: &KripkeModel, alpha: &Action, g: &F, is_box: bool) -> Result<Vec<bool>> {
        let n = m.len();
        let am = tau::build(alpha, &mut self.reducer, "")?;
        let whole = PointedKripkeModel::new(m.clone(), (0..n).collect());
        let (result, pairs) = execute_indexed(&whole, &am, &mut |km, p| self.eval(km, p))?;
        if pairs.is_empty() || !frame_class_holds(&result.model, self.class()) {
            return Ok(vec![is_box; n]);
        }
        let inner = self.eval(&result.model, g)?;
        let designated: BTreeSet<usize> = am.points.iter().copied().collect();
        let mut out = vec![is_box; n];
        for (k, &(s, t)) in pairs.iter().enumerate() {
            if designated.contains(&t) {
                if is_box {
                    out[s] &= inner[k];
                } else {
                    out[s] |= inner[k];
                }
            }
        }
        Ok(out)
    }
}

pub fn check(m: &PointedKripkeModel, f: &F, c: FrameClass) -> Result<bool> {
    Checker::new(c, m.model.agent_set()).check(m, f)
}

pub fn check_via_reduction(m: &PointedKripkeModel, f: &F, c: FrameClass) -> Result<bool> {
    if !frame_class_holds(&m.model, c) {
        return Err(Error::ClassViolation(c.to_string()));
    }
    let r = Reducer::new(c, m.model.agent_set()).reduce(f)?;
    eval_basic(m, &r)
}

// ---------------------------------------------------------------------------
// Random instances

/// A random relation closed into the requested class.
fn random_relation<R: Rng>(rng: &mut R, n: usize, c: FrameClass) -> Vec<Vec<usize>> {
    let density = rng.gen_range(0.15..0.6);
    match c {
        FrameClass::S5 => {
            let blocks = rng.gen_range(1..=n);
            let label: Vec<usize> = (0..n).map(|_| rng.gen_range(0..blocks)).collect();
            (0..n).map(|s| (0..n).filter(|&t| label[t] == label[s]).collect()).collect()
        }
        _ => {
            let mut adj: Vec<Vec<bool>> = (0..n).map(|_| (0..n).map(|_| rng.gen_bool(density)).collect()).collect();
            if c == FrameClass::K45 {
                loop {
                    let mut changed = false;
                    for s in 0..n {
                        for t in 0..n {
                            if !adj[s][t] {
                                continue;
                            }
                            for u in 0..n {
                                // transitive: s→t→u; Euclidean: s→t, s→u gives t→u
                                if adj[t][u] && !adj[s][u] {
                                    adj[s][u] = true;
                                    changed = true;
                                }
                                if adj[s][u] && !adj[t][u] {
                                    adj[t][u] = true;
                                    changed = true;
                                }
                            }
                        }
                    }
                    if !changed {
                        break;
                    }
                }
            }
            adj.iter().map(|row| (0..n).filter(|&t| row[t]).collect()).collect()
        }
    }
}

pub fn random_model<R: Rng>(
    rng: &mut R,
    c: FrameClass,
    max_states: usize,
    agents: &AgentSet,
    atoms: &[String],
) -> PointedKripkeModel {
    let n = rng.gen_range(1..=max_states.max(1));
    let states = (0..n).map(|i| format!("w{i}")).collect();
    let valuation = (0..n)
        .map(|_| atoms.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect())
        .collect();
    let rel = agents.iter().map(|_| random_relation(rng, n, c)).collect();
    let model = KripkeModel::from_parts(agents, states, valuation, rel).expect("generated model is well formed");
    let point = rng.gen_range(0..n);
    PointedKripkeModel::new(model, vec![point])
}

/// Random single-pointed action model in class `c` with basic preconditions
/// of modal depth at most `pre_depth`.
pub fn random_action_model<R: Rng>(
    rng: &mut R,
    c: FrameClass,
    max_points: usize,
    sampler: &Sampler,
    pre_depth: usize,
) -> PointedActionModel {
    let n = rng.gen_range(1..=max_points.max(1));
    let agents: AgentSet = sampler.agents.iter().cloned().collect();
    let names = (0..n).map(|i| format!("e{i}")).collect();
    let pre = (0..n).map(|_| sampler.formula(rng, pre_depth)).collect();
    let rel = agents.iter().map(|_| random_relation(rng, n, c)).collect();
    let model = ActionModel::new(&agents, names, pre, rel).expect("generated action model is well formed");
    let point = rng.gen_range(0..n);
    PointedActionModel::new(model, vec![point]).expect("point in range")
}

pub fn sample_model(c: FrameClass, max_states: usize, agents: &AgentSet, atoms: &[String], seed: u64) -> PointedKripkeModel {
    random_model(&mut ChaCha8Rng::seed_from_u64(seed), c, max_states, agents, atoms)
}

/// Vocabulary and size limits for random formulae and actions.
#[derive(Clone, Debug)]
pub struct Sampler {
    pub agents: Vec<String>,
    pub atoms: Vec<String>,
    /// Upper bound on dynamic and refinement operators per formula.
    pub max_ops: usize,
    pub refinement: bool,
    pub dynamic: bool,
    pub covers: bool,
}

impl Sampler {
    pub fn basic(agents: &AgentSet, atoms: &[String]) -> Self {
        Sampler {
            agents: agents.iter().cloned().collect(),
            atoms: atoms.to_vec(),
            max_ops: 0,
            refinement: false,
            dynamic: false,
            covers: true,
        }
    }

    pub fn literal<R: Rng>(&self, rng: &mut R) -> F {
        let p = Formula::atom(self.atoms.choose(rng).expect("non-empty atom set"));
        if rng.gen_bool(0.5) {
            p
        } else {
            Formula::not(p)
        }
    }

    /// Basic formula of modal depth at most `depth`.
    pub fn formula<R: Rng>(&self, rng: &mut R, depth: usize) -> F {
        let mut ops = 0;
        self.gen(rng, depth, &mut ops)
    }

    /// Formula with up to `max_ops` dynamic or refinement operators.
    pub fn full_formula<R: Rng>(&self, rng: &mut R, depth: usize) -> F {
        let mut ops = self.max_ops;
        self.gen(rng, depth, &mut ops)
    }

    fn gen<R: Rng>(&self, rng: &mut R, depth: usize, ops: &mut usize) -> F {
        if depth == 0 || rng.gen_bool(0.2) {
            return match rng.gen_range(0..12) {
                0 => Formula::top(),
                1 => Formula::bot(),
                _ => self.literal(rng),
            };
        }
        let pick_agent = |rng: &mut R| self.agents.choose(rng).expect("non-empty agent set").clone();
        loop {
            let choice = rng.gen_range(0..14);
            return match choice {
                0 => Formula::not(self.gen(rng, depth, ops)),
                1 | 2 => Formula::and(self.gen(rng, depth - 1, ops), self.gen(rng, depth - 1, ops)),
                3 | 4 => Formula::or(self.gen(rng, depth - 1, ops), self.gen(rng, depth - 1, ops)),
                5 => Formula::implies(self.gen(rng, depth - 1, ops), self.gen(rng, depth - 1, ops)),
                6 => Formula::iff(self.gen(rng, depth - 1, ops), self.gen(rng, depth - 1, ops)),
                7 | 8 => Formula::boxed(&pick_agent(rng), self.gen(rng, depth - 1, ops)),
                9 | 10 => Formula::diamond(&pick_agent(rng), self.gen(rng, depth - 1, ops)),
                11 if self.covers => {
                    let k = rng.gen_range(0..=2);
                    let members: Vec<F> = (0..k).map(|_| self.gen(rng, depth - 1, ops)).collect();
                    Formula::cover(&pick_agent(rng), members)
                }
                12 if self.dynamic && *ops > 0 => {
                    *ops -= 1;
                    let alpha = self.action(rng, 2);
                    let body = self.gen(rng, depth - 1, ops);
                    if rng.gen_bool(0.5) {
                        Formula::dyn_box(alpha, body)
                    } else {
                        Formula::dyn_diamond(alpha, body)
                    }
                }
                13 if self.refinement && *ops > 0 => {
                    *ops -= 1;
                    let body = self.gen(rng, depth - 1, ops);
                    if rng.gen_bool(0.5) {
                        Formula::ref_box(body)
                    } else {
                        Formula::ref_diamond(body)
                    }
                }
                _ => continue,
            };
        }
    }

    /// Action formula with at most `size` learning or composition layers;
    /// tests carry basic formulae of depth at most one.
    pub fn action<R: Rng>(&self, rng: &mut R, size: usize) -> Act {
        if size == 0 || rng.gen_bool(0.3) {
            return Action::test(self.formula(rng, 1));
        }
        match rng.gen_range(0..4) {
            0 => Action::choice(self.action(rng, size - 1), self.action(rng, size - 1)),
            1 => Action::compose(self.action(rng, size - 1), self.action(rng, size - 1)),
            _ => {
                let mut group: AgentSet = self.agents.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
                if group.is_empty() {
                    group.insert(self.agents.choose(rng).expect("non-empty agent set").clone());
                }
                let a = self.action(rng, size - 1);
                let b = if rng.gen_bool(0.5) { a.clone() } else { self.action(rng, size - 1) };
                Action::learn(group, a, b)
            }
        }
    }
}

pub fn sample_formula(depth: usize, agents: &AgentSet, atoms: &[String], seed: u64) -> F {
    Sampler::basic(agents, atoms).formula(&mut ChaCha8Rng::seed_from_u64(seed), depth)
}

pub fn sample_action(size: usize, agents: &AgentSet, atoms: &[String], seed: u64) -> Act {
    Sampler::basic(agents, atoms).action(&mut ChaCha8Rng::seed_from_u64(seed), size)
}
