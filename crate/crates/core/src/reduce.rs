//! Rewriting of the full language into basic modal logic.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use crate::action::{ActionModel, PointedActionModel};
use crate::error::{Error, Result};
use crate::kripke::FrameClass;
use crate::normform::{boxify, closure, to_adnf, to_dnf, Dnf};
use crate::prover::Prover;
use crate::syntax::{expand_cover, fold, print_formula, Action, AgentSet, Formula, F};
use crate::tau;

pub const DEFAULT_BUDGET: usize = 2_000_000;

type ExKey = (F, Option<(String, Vec<(F, bool)>)>);

/// One way of realising an S5 refinement goal at a world: the world must
/// satisfy `guard`, and for each listed agent some world in its class must
/// realise one of the alternatives.
#[derive(Clone, Debug)]
pub(crate) struct WitnessNode {
    pub guard: F,
    pub witnesses: Vec<(String, Arc<Vec<WitnessNode>>)>,
}

/// Reduction state for one frame class and agent set; memo tables are reused
/// across calls.
pub struct Reducer {
    class: FrameClass,
    agents: AgentSet,
    budget: usize,
    steps: usize,
    memo: HashMap<*const Formula, (F, F)>,
    ex_memo: BTreeMap<ExKey, Arc<Vec<WitnessNode>>>,
    props: Prover,
}

impl Reducer {
    pub fn new(class: FrameClass, agents: AgentSet) -> Self {
        Self::with_budget(class, agents, DEFAULT_BUDGET)
    }

    pub fn with_budget(class: FrameClass, agents: AgentSet, budget: usize) -> Self {
        Reducer {
            class,
            agents,
            budget,
            steps: 0,
            memo: HashMap::new(),
            ex_memo: BTreeMap::new(),
            props: Prover::new(FrameClass::K),
        }
    }

    pub fn class(&self) -> FrameClass {
        self.class
    }

    pub fn agents(&self) -> &AgentSet {
        &self.agents
    }

    /// Restarts the work budget; memo tables are kept.
    pub fn restart_budget(&mut self) {
        self.steps = 0;
    }

    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.budget {
            Err(Error::ResourceExhausted)
        } else {
            Ok(())
        }
    }

    pub fn reduce(&mut self, f: &F) -> Result<F> {
        let key = std::sync::Arc::as_ptr(f);
        if let Some((_, r)) = self.memo.get(&key) {
            return Ok(r.clone());
        }
        self.tick()?;
        let r = match &**f {
            Formula::Top | Formula::Bottom | Formula::Atom(_) => f.clone(),
            Formula::Not(g) => fold::not(self.reduce(g)?),
            Formula::And(a, b) => fold::and(self.reduce(a)?, self.reduce(b)?),
            Formula::Or(a, b) => fold::or(self.reduce(a)?, self.reduce(b)?),
            Formula::Implies(a, b) => fold::implies(self.reduce(a)?, self.reduce(b)?),
            Formula::Iff(a, b) => fold::iff(self.reduce(a)?, self.reduce(b)?),
            Formula::Box(a, g) => fold::boxed(a, self.reduce(g)?),
            Formula::Diamond(a, g) => fold::diamond(a, self.reduce(g)?),
            Formula::Cover(a, gs) => {
                let members = gs.iter().map(|g| self.reduce(g)).collect::<Result<BTreeSet<_>>>()?;
                Formula::cover(a, members)
            }
            Formula::DynBox(alpha, g) => {
                let body = self.reduce(g)?;
                let am = self.tau_basic(alpha)?;
                let mut parts = Vec::new();
                for &t in &am.points {
                    parts.push(fold::implies(am.model.pre[t].clone(), self.tr(&am.model, t, &body)?));
                }
                fold::conj(parts)
            }
            Formula::DynDiamond(alpha, g) => {
                let body = self.reduce(g)?;
                let am = self.tau_basic(alpha)?;
                let mut parts = Vec::new();
                for &t in &am.points {
                    parts.push(fold::and(am.model.pre[t].clone(), self.tr(&am.model, t, &body)?));
                }
                fold::disj(parts)
            }
            Formula::RefDiamond(g) => {
                let body = self.reduce(g)?;
                self.exists(&body)?
            }
            Formula::RefBox(g) => {
                let body = self.reduce(g)?;
                fold::not(self.exists(&fold::not(body))?)
            }
        };
        self.memo.insert(key, (f.clone(), r.clone()));
        Ok(r)
    }

    /// Translation of `alpha` with every precondition reduced.
    pub fn tau_basic(&mut self, alpha: &Action) -> Result<PointedActionModel> {
        let am = tau::build(alpha, self, "")?;
        self.basic_preconditions(&am)
    }

    pub fn basic_preconditions(&mut self, am: &PointedActionModel) -> Result<PointedActionModel> {
        let mut out = am.clone();
        for p in out.model.pre.iter_mut() {
            if !p.is_basic() {
                *p = self.reduce(p)?;
            }
        }
        Ok(out)
    }

    /// The formula that holds at `s` exactly when `(s,t)` satisfies `chi`,
    /// assuming `pre(t)` holds at `s`. Preconditions and `chi` must be basic.
    pub fn tr(&mut self, am: &ActionModel, t: usize, chi: &F) -> Result<F> {
        let mut memo = HashMap::new();
        self.tr_in(am, t, chi, &mut memo)
    }

    fn tr_in(
        &mut self,
        am: &ActionModel,
        t: usize,
        chi: &F,
        memo: &mut HashMap<(usize, *const Formula), (F, F)>,
    ) -> Result<F> {
        let key = (t, std::sync::Arc::as_ptr(chi));
        if let Some((_, r)) = memo.get(&key) {
            return Ok(r.clone());
        }
        self.tick()?;
        let r = match &**chi {
            Formula::Top | Formula::Bottom | Formula::Atom(_) => chi.clone(),
            Formula::Not(g) => fold::not(self.tr_in(am, t, g, memo)?),
            Formula::And(a, b) => fold::and(self.tr_in(am, t, a, memo)?, self.tr_in(am, t, b, memo)?),
            Formula::Or(a, b) => fold::or(self.tr_in(am, t, a, memo)?, self.tr_in(am, t, b, memo)?),
            Formula::Implies(a, b) => fold::implies(self.tr_in(am, t, a, memo)?, self.tr_in(am, t, b, memo)?),
            Formula::Iff(a, b) => fold::iff(self.tr_in(am, t, a, memo)?, self.tr_in(am, t, b, memo)?),
            Formula::Box(a, g) => {
                let ag = am.agent_index(a).ok_or(Error::AgentMismatch)?;
                let mut parts = Vec::new();
                for &u in am.succ(ag, t) {
                    parts.push(fold::implies(am.pre[u].clone(), self.tr_in(am, u, g, memo)?));
                }
                fold::boxed(a, fold::conj(parts))
            }
            Formula::Diamond(a, g) => {
                let ag = am.agent_index(a).ok_or(Error::AgentMismatch)?;
                let mut parts = Vec::new();
                for &u in am.succ(ag, t) {
                    parts.push(fold::and(am.pre[u].clone(), self.tr_in(am, u, g, memo)?));
                }
                fold::diamond(a, fold::disj(parts))
            }
            Formula::Cover(a, gs) => {
                let expanded = expand_cover(a, gs);
                self.tr_in(am, t, &expanded, memo)?
            }
            _ => return Err(Error::NotBasic(print_formula(chi))),
        };
        memo.insert(key, (chi.clone(), r.clone()));
        Ok(r)
    }

    /// `∃φ` for a basic `φ`, as a basic formula.
    pub fn exists(&mut self, phi: &F) -> Result<F> {
        match self.class {
            FrameClass::K => {
                let d = to_dnf(phi)?;
                self.exists_dnf(&d)
            }
            FrameClass::K45 => {
                let d = to_adnf(phi)?;
                self.exists_dnf(&d)
            }
            FrameClass::S5 => {
                let g = boxify(phi)?;
                let nodes = self.exists_s5(&g, None)?;
                Ok(fold::disj(nodes.iter().map(|n| n.guard.clone())))
            }
        }
    }

    pub(crate) fn exists_dnf(&mut self, d: &Dnf) -> Result<F> {
        let mut out = Vec::new();
        for clause in &d.0 {
            self.tick()?;
            let mut parts: Vec<F> = clause
                .props
                .iter()
                .map(|(p, &pos)| if pos { Formula::atom(p) } else { Formula::not(Formula::atom(p)) })
                .collect();
            for (a, members) in &clause.covers {
                for m in members {
                    parts.push(fold::diamond(a, self.exists_dnf(m)?));
                }
            }
            out.push(fold::conj(parts));
        }
        Ok(fold::disj(out))
    }

    /// `g` is boxified. Under a context `(e, ρ)` the current world was reached
    /// through agent `e` and shares its `e`-boxes with the world it came from,
    /// whose values are `ρ`.
    pub(crate) fn exists_s5(&mut self, g: &F, ctx: Option<(&str, &BTreeMap<F, bool>)>) -> Result<Arc<Vec<WitnessNode>>> {
        let items = closure(g);
        let boxes: Vec<F> = items.iter().filter(|x| matches!(***x, Formula::Box(..))).cloned().collect();
        let mut fixed: BTreeMap<F, bool> = BTreeMap::new();
        let mut free: Vec<F> = Vec::new();
        for b in &boxes {
            match (&**b, ctx) {
                (Formula::Box(a, _), Some((e, rho))) if a == e => match rho.get(b) {
                    Some(&v) => {
                        fixed.insert(b.clone(), v);
                    }
                    None => free.push(b.clone()),
                },
                _ => free.push(b.clone()),
            }
        }
        let key: ExKey = (g.clone(), ctx.map(|(e, _)| (e.to_string(), fixed.iter().map(|(k, v)| (k.clone(), *v)).collect())));
        if let Some(r) = self.ex_memo.get(&key) {
            return Ok(r.clone());
        }
        if free.len() > 20 {
            return Err(Error::ResourceExhausted);
        }
        let mut disjuncts: BTreeMap<F, WitnessNode> = BTreeMap::new();
        'sigma: for bits in 0u64..(1 << free.len()) {
            self.tick()?;
            let mut sigma = fixed.clone();
            for (i, b) in free.iter().enumerate() {
                sigma.insert(b.clone(), bits >> i & 1 == 1);
            }
            // Propositional residue: φ and every true box's body at this world.
            let mut local = vec![substitute_boxes(g, &sigma)];
            for (b, &v) in &sigma {
                if let (Formula::Box(_, body), true) = (&**b, v) {
                    local.push(substitute_boxes(body, &sigma));
                }
            }
            let residue = fold::conj(local);
            if matches!(*residue, Formula::Bottom) || !self.props.satisfiable(&residue)? {
                continue;
            }
            let mut parts = vec![residue];
            let mut witnesses = Vec::new();
            let agents: BTreeSet<String> = sigma
                .keys()
                .filter_map(|b| match &**b {
                    Formula::Box(a, _) => Some(a.clone()),
                    _ => None,
                })
                .collect();
            for e in agents {
                if ctx.map(|(c, _)| c == e).unwrap_or(false) {
                    continue;
                }
                let of_e: BTreeMap<F, bool> = sigma
                    .iter()
                    .filter(|(b, _)| matches!(&***b, Formula::Box(a, _) if *a == e))
                    .map(|(b, v)| (b.clone(), *v))
                    .collect();
                let holding: Vec<F> = of_e
                    .iter()
                    .filter(|(_, &v)| v)
                    .filter_map(|(b, _)| match &**b {
                        Formula::Box(_, body) => Some(body.clone()),
                        _ => None,
                    })
                    .collect();
                for (b, &v) in &of_e {
                    if v {
                        continue;
                    }
                    let Formula::Box(_, psi) = &**b else { continue };
                    let theta = fold::conj(std::iter::once(fold::not(psi.clone())).chain(holding.iter().cloned()));
                    let w = self.exists_s5(&theta, Some((&e, &of_e)))?;
                    if w.is_empty() {
                        continue 'sigma;
                    }
                    parts.push(fold::diamond(&e, fold::disj(w.iter().map(|n| n.guard.clone()))));
                    witnesses.push((e.clone(), w));
                }
            }
            let guard = fold::conj(parts);
            disjuncts.entry(guard.clone()).or_insert(WitnessNode { guard, witnesses });
        }
        let r = Arc::new(disjuncts.into_values().collect::<Vec<_>>());
        self.ex_memo.insert(key, r.clone());
        Ok(r)
    }
}

fn substitute_boxes(f: &F, sigma: &BTreeMap<F, bool>) -> F {
    match &**f {
        Formula::Box(..) => match sigma.get(f) {
            Some(true) => Formula::top(),
            Some(false) => Formula::bot(),
            None => f.clone(),
        },
        Formula::Not(g) => fold::not(substitute_boxes(g, sigma)),
        Formula::And(a, b) => fold::and(substitute_boxes(a, sigma), substitute_boxes(b, sigma)),
        Formula::Or(a, b) => fold::or(substitute_boxes(a, sigma), substitute_boxes(b, sigma)),
        Formula::Implies(a, b) => fold::implies(substitute_boxes(a, sigma), substitute_boxes(b, sigma)),
        Formula::Iff(a, b) => fold::iff(substitute_boxes(a, sigma), substitute_boxes(b, sigma)),
        _ => f.clone(),
    }
}

/// Rewrites `f` into an equivalent basic formula for class `c`.
pub fn reduce(f: &F, c: FrameClass, agents: &AgentSet) -> Result<F> {
    Reducer::new(c, agents.clone()).reduce(f)
}

/// `∃φ` for basic `φ`.
pub fn exists(phi: &F, c: FrameClass, agents: &AgentSet) -> Result<F> {
    Reducer::new(c, agents.clone()).exists(phi)
}

/// Reduction in K by the learning axioms directly, without building action
/// models. Refinement quantifiers are handed to the general reduction.
pub fn reduce_afl_fastpath(f: &F, c: FrameClass, agents: &AgentSet) -> Result<F> {
    if c != FrameClass::K {
        return Err(Error::Input("the learning axioms fast path is defined for class K only".into()));
    }
    Fast { red: Reducer::new(c, agents.clone()) }.formula(f)
}

struct Fast {
    red: Reducer,
}

impl Fast {
    fn formula(&mut self, f: &F) -> Result<F> {
        Ok(match &**f {
            Formula::Top | Formula::Bottom | Formula::Atom(_) => f.clone(),
            Formula::Not(g) => fold::not(self.formula(g)?),
            Formula::And(a, b) => fold::and(self.formula(a)?, self.formula(b)?),
            Formula::Or(a, b) => fold::or(self.formula(a)?, self.formula(b)?),
            Formula::Implies(a, b) => fold::implies(self.formula(a)?, self.formula(b)?),
            Formula::Iff(a, b) => fold::iff(self.formula(a)?, self.formula(b)?),
            Formula::Box(a, g) => fold::boxed(a, self.formula(g)?),
            Formula::Diamond(a, g) => fold::diamond(a, self.formula(g)?),
            Formula::Cover(a, gs) => {
                Formula::cover(a, gs.iter().map(|g| self.formula(g)).collect::<Result<BTreeSet<_>>>()?)
            }
            Formula::DynBox(alpha, g) => {
                let body = self.formula(g)?;
                self.dyn_box(alpha, &body)?
            }
            Formula::DynDiamond(alpha, g) => {
                let body = fold::not(self.formula(g)?);
                fold::not(self.dyn_box(alpha, &body)?)
            }
            Formula::RefBox(g) | Formula::RefDiamond(g) => {
                let body = self.formula(g)?;
                let outer = if matches!(**f, Formula::RefBox(_)) { Formula::ref_box(body) } else { Formula::ref_diamond(body) };
                self.red.reduce(&outer)?
            }
        })
    }

    /// `⟦alpha⟧chi` for basic `chi`.
    fn dyn_box(&mut self, alpha: &Action, chi: &F) -> Result<F> {
        Ok(match alpha {
            Action::Test(phi) => fold::implies(self.formula(phi)?, chi.clone()),
            Action::Choice(a, b) => fold::and(self.dyn_box(a, chi)?, self.dyn_box(b, chi)?),
            Action::Compose(a, b) => {
                let inner = self.dyn_box(b, chi)?;
                self.dyn_box(a, &inner)?
            }
            Action::Learn(group, a, b) => self.learn(group, a, b, chi)?,
        })
    }

    fn learn(&mut self, group: &AgentSet, a: &Action, b: &Action, chi: &F) -> Result<F> {
        let again = |s: &mut Self, g: &F| s.learn(group, a, b, g);
        Ok(match &**chi {
            Formula::Top | Formula::Bottom | Formula::Atom(_) => chi.clone(),
            Formula::Not(g) => fold::not(again(self, g)?),
            Formula::And(x, y) => fold::and(again(self, x)?, again(self, y)?),
            Formula::Or(x, y) => fold::or(again(self, x)?, again(self, y)?),
            Formula::Implies(x, y) => fold::implies(again(self, x)?, again(self, y)?),
            Formula::Iff(x, y) => fold::iff(again(self, x)?, again(self, y)?),
            Formula::Box(ag, g) if group.contains(ag) => {
                let body = if a == b {
                    self.dyn_box(a, g)?
                } else {
                    fold::and(self.dyn_box(a, g)?, self.dyn_box(b, g)?)
                };
                fold::boxed(ag, body)
            }
            Formula::Box(..) => chi.clone(),
            Formula::Diamond(ag, g) => {
                let as_box = Formula::not(Formula::boxed(ag, fold::not(g.clone())));
                again(self, &as_box)?
            }
            Formula::Cover(ag, gs) => again(self, &expand_cover(ag, gs))?,
            _ => return Err(Error::NotBasic(print_formula(chi))),
        })
    }
}
