//! Disjunctive, alternating disjunctive and explicit normal forms.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::kripke::FrameClass;
use crate::prover::Prover;
use crate::syntax::{expand_cover, fold, print_formula, Formula, F};

/// `π ∧ ⋀_a ∇_a Γ_a` with every member of every `Γ_a` itself in normal form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Clause {
    /// Atom to polarity.
    pub props: BTreeMap<String, bool>,
    pub covers: BTreeMap<String, Vec<Dnf>>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Dnf(pub Vec<Clause>);

impl Clause {
    pub fn to_formula(&self) -> F {
        let props = self
            .props
            .iter()
            .map(|(p, &pos)| if pos { Formula::atom(p) } else { Formula::not(Formula::atom(p)) });
        let covers = self
            .covers
            .iter()
            .map(|(a, members)| Formula::cover(a, members.iter().map(Dnf::to_formula)));
        Formula::conj(props.chain(covers))
    }
}

impl Dnf {
    pub fn to_formula(&self) -> F {
        Formula::disj(self.0.iter().map(Clause::to_formula))
    }

    /// Within any `a`-cover, the members' clauses carry no `a`-cover.
    pub fn is_alternating(&self) -> bool {
        fn walk(d: &Dnf, outer: Option<&str>) -> bool {
            d.0.iter().all(|cl| {
                cl.covers.iter().all(|(a, members)| {
                    Some(a.as_str()) != outer && members.iter().all(|m| walk(m, Some(a)))
                })
            })
        }
        walk(self, None)
    }
}

#[derive(Clone, Debug)]
enum Lit {
    Prop(String, bool),
    Box(String, F),
    Dia(String, F),
}

type Conjs = Vec<Vec<Lit>>;

fn product(x: Conjs, y: Conjs) -> Conjs {
    let mut out = Vec::new();
    for a in &x {
        'pair: for b in &y {
            let mut c = a.clone();
            for l in b {
                if let Lit::Prop(p, pos) = l {
                    if a.iter().any(|m| matches!(m, Lit::Prop(q, s) if q == p && s != pos)) {
                        continue 'pair;
                    }
                }
                c.push(l.clone());
            }
            out.push(c);
        }
    }
    out
}

fn top_dnf(f: &Formula, pos: bool) -> Result<Conjs> {
    let dual = |a: Conjs, b: Conjs, conj: bool| if conj { product(a, b) } else { [a, b].concat() };
    Ok(match f {
        Formula::Top => if pos { vec![vec![]] } else { vec![] },
        Formula::Bottom => if pos { vec![] } else { vec![vec![]] },
        Formula::Atom(p) => vec![vec![Lit::Prop(p.clone(), pos)]],
        Formula::Not(g) => top_dnf(g, !pos)?,
        Formula::And(a, b) => dual(top_dnf(a, pos)?, top_dnf(b, pos)?, pos),
        Formula::Or(a, b) => dual(top_dnf(a, pos)?, top_dnf(b, pos)?, !pos),
        Formula::Implies(a, b) => dual(top_dnf(a, !pos)?, top_dnf(b, pos)?, !pos),
        Formula::Iff(a, b) => {
            let same = product(top_dnf(a, true)?, top_dnf(b, true)?);
            let diff = product(top_dnf(a, true)?, top_dnf(b, false)?);
            let both_false = product(top_dnf(a, false)?, top_dnf(b, false)?);
            let other = product(top_dnf(a, false)?, top_dnf(b, true)?);
            if pos { [same, both_false].concat() } else { [diff, other].concat() }
        }
        Formula::Box(a, g) if pos => vec![vec![Lit::Box(a.clone(), g.clone())]],
        Formula::Box(a, g) => vec![vec![Lit::Dia(a.clone(), Formula::not(g.clone()))]],
        Formula::Diamond(a, g) if pos => vec![vec![Lit::Dia(a.clone(), g.clone())]],
        Formula::Diamond(a, g) => vec![vec![Lit::Box(a.clone(), Formula::not(g.clone()))]],
        Formula::Cover(a, gs) => top_dnf(&expand_cover(a, gs), pos)?,
        _ => return Err(Error::NotBasic(print_formula(f))),
    })
}

/// Disjunctive normal form, equivalent in K.
pub fn to_dnf(f: &F) -> Result<Dnf> {
    let mut clauses = BTreeSet::new();
    for conj in top_dnf(f, true)? {
        let mut props = BTreeMap::new();
        let mut boxes: BTreeMap<String, Vec<F>> = BTreeMap::new();
        let mut dias: BTreeMap<String, Vec<F>> = BTreeMap::new();
        for l in conj {
            match l {
                Lit::Prop(p, pos) => {
                    props.insert(p, pos);
                }
                Lit::Box(a, g) => boxes.entry(a).or_default().push(g),
                Lit::Dia(a, g) => dias.entry(a).or_default().push(g),
            }
        }
        // Each agent contributes one or two alternative cover sets.
        let agents: BTreeSet<&String> = boxes.keys().chain(dias.keys()).collect();
        let mut partial: Vec<BTreeMap<String, Vec<Dnf>>> = vec![BTreeMap::new()];
        for a in agents {
            let phi = fold::conj(boxes.get(a).into_iter().flatten().cloned());
            let options: Vec<BTreeSet<F>> = match dias.get(a) {
                Some(ds) => {
                    let mut g: BTreeSet<F> = ds.iter().map(|d| fold::and(phi.clone(), d.clone())).collect();
                    g.insert(phi.clone());
                    vec![g]
                }
                None => vec![[phi.clone()].into(), BTreeSet::new()],
            };
            let mut next = Vec::new();
            for opt in options {
                let members: Vec<Dnf> = opt.iter().map(to_dnf).collect::<Result<BTreeSet<_>>>()?.into_iter().collect();
                // A member without clauses is unsatisfiable; the cover cannot hold.
                if members.iter().any(|m| m.0.is_empty()) {
                    continue;
                }
                for base in &partial {
                    let mut covers = base.clone();
                    covers.insert(a.clone(), members.clone());
                    next.push(covers);
                }
            }
            partial = next;
        }
        for covers in partial {
            clauses.insert(Clause { props: props.clone(), covers });
        }
    }
    Ok(Dnf(clauses.into_iter().collect()))
}

/// Moves `a`-modal formulae out of the bodies of `a`-modalities, which is
/// sound in K45 where such formulae are constant along `a`-edges.
pub fn pull_out(f: &F) -> Result<F> {
    Ok(match &**f {
        Formula::Top | Formula::Bottom | Formula::Atom(_) => f.clone(),
        Formula::Not(g) => fold::not(pull_out(g)?),
        Formula::And(a, b) => fold::and(pull_out(a)?, pull_out(b)?),
        Formula::Or(a, b) => fold::or(pull_out(a)?, pull_out(b)?),
        Formula::Implies(a, b) => fold::implies(pull_out(a)?, pull_out(b)?),
        Formula::Iff(a, b) => fold::iff(pull_out(a)?, pull_out(b)?),
        Formula::Box(a, g) => pull_agent(a, pull_out(g)?, true),
        Formula::Diamond(a, g) => pull_agent(a, pull_out(g)?, false),
        Formula::Cover(a, gs) => pull_out(&expand_cover(a, gs))?,
        _ => return Err(Error::NotBasic(print_formula(f))),
    })
}

fn pull_agent(agent: &str, body: F, is_box: bool) -> F {
    match first_top_modal(&body, agent) {
        None if is_box => fold::boxed(agent, body),
        None => fold::diamond(agent, body),
        Some(x) => {
            let on = pull_agent(agent, substitute(&body, &x, &Formula::top()), is_box);
            let off = pull_agent(agent, substitute(&body, &x, &Formula::bot()), is_box);
            fold::or(fold::and(x.clone(), on), fold::and(fold::not(x), off))
        }
    }
}

fn first_top_modal(f: &F, agent: &str) -> Option<F> {
    match &**f {
        Formula::Box(a, _) | Formula::Diamond(a, _) | Formula::Cover(a, _) if a == agent => Some(f.clone()),
        Formula::Not(g) => first_top_modal(g, agent),
        Formula::And(x, y) | Formula::Or(x, y) | Formula::Implies(x, y) | Formula::Iff(x, y) => {
            first_top_modal(x, agent).or_else(|| first_top_modal(y, agent))
        }
        _ => None,
    }
}

/// Replaces occurrences of `x` outside any modality.
fn substitute(f: &F, x: &F, by: &F) -> F {
    if f == x {
        return by.clone();
    }
    match &**f {
        Formula::Not(g) => fold::not(substitute(g, x, by)),
        Formula::And(a, b) => fold::and(substitute(a, x, by), substitute(b, x, by)),
        Formula::Or(a, b) => fold::or(substitute(a, x, by), substitute(b, x, by)),
        Formula::Implies(a, b) => fold::implies(substitute(a, x, by), substitute(b, x, by)),
        Formula::Iff(a, b) => fold::iff(substitute(a, x, by), substitute(b, x, by)),
        _ => f.clone(),
    }
}

/// Alternating disjunctive normal form, equivalent in K45.
pub fn to_adnf(f: &F) -> Result<Dnf> {
    to_dnf(&pull_out(f)?)
}

// ---------------------------------------------------------------------------
// Closure assignments, shared with the S5 refinement elimination.

/// Rewrites diamonds and covers into boxes.
pub(crate) fn boxify(f: &F) -> Result<F> {
    Ok(match &**f {
        Formula::Top | Formula::Bottom | Formula::Atom(_) => f.clone(),
        Formula::Not(g) => Formula::not(boxify(g)?),
        Formula::And(a, b) => Formula::and(boxify(a)?, boxify(b)?),
        Formula::Or(a, b) => Formula::or(boxify(a)?, boxify(b)?),
        Formula::Implies(a, b) => Formula::implies(boxify(a)?, boxify(b)?),
        Formula::Iff(a, b) => Formula::iff(boxify(a)?, boxify(b)?),
        Formula::Box(a, g) => Formula::boxed(a, boxify(g)?),
        Formula::Diamond(a, g) => Formula::not(Formula::boxed(a, Formula::not(boxify(g)?))),
        Formula::Cover(a, gs) => boxify(&expand_cover(a, gs))?,
        _ => return Err(Error::NotBasic(print_formula(f))),
    })
}

/// Atoms and boxes occurring outside any modality of a boxified formula.
pub(crate) fn top_items(f: &F, out: &mut BTreeSet<F>) {
    match &**f {
        Formula::Atom(_) | Formula::Box(..) => {
            out.insert(f.clone());
        }
        Formula::Not(g) => top_items(g, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            top_items(a, out);
            top_items(b, out);
        }
        _ => {}
    }
}

/// Top items of `f` together with the top items of every box body reached.
pub(crate) fn closure(f: &F) -> BTreeSet<F> {
    let mut out = BTreeSet::new();
    top_items(f, &mut out);
    let mut stack: Vec<F> = out.iter().cloned().collect();
    while let Some(x) = stack.pop() {
        if let Formula::Box(_, body) = &*x {
            let mut found = BTreeSet::new();
            top_items(body, &mut found);
            for y in found {
                if out.insert(y.clone()) {
                    stack.push(y);
                }
            }
        }
    }
    out
}

/// Truth value of a boxified formula under an assignment to its top items.
pub(crate) fn eval_items(f: &Formula, sigma: &BTreeMap<F, bool>) -> bool {
    match f {
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Not(g) => !eval_items(g, sigma),
        Formula::And(a, b) => eval_items(a, sigma) && eval_items(b, sigma),
        Formula::Or(a, b) => eval_items(a, sigma) || eval_items(b, sigma),
        Formula::Implies(a, b) => !eval_items(a, sigma) || eval_items(b, sigma),
        Formula::Iff(a, b) => eval_items(a, sigma) == eval_items(b, sigma),
        _ => sigma.get(f).copied().unwrap_or(false),
    }
}

/// Every true box has a true body: the world is among its own alternatives.
pub(crate) fn locally_consistent(sigma: &BTreeMap<F, bool>) -> bool {
    sigma.iter().all(|(item, &v)| match &**item {
        Formula::Box(_, body) if v => eval_items(body, sigma),
        _ => true,
    })
}

// ---------------------------------------------------------------------------
// Explicit formulae.

/// `π ∧ γ0 ∧ ⋀_a ∇_a Γ_a` with `γ0 ∈ Γ_a` for every agent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Explicit {
    pub pi: F,
    pub gamma0: F,
    pub covers: BTreeMap<String, BTreeSet<F>>,
}

impl Explicit {
    pub fn to_formula(&self) -> F {
        let base = Formula::and(self.pi.clone(), self.gamma0.clone());
        self.covers
            .iter()
            .fold(base, |acc, (a, g)| Formula::and(acc, Formula::cover(a, g.iter().cloned())))
    }

    /// Reads the explicit shape; covers are peeled from the right.
    pub fn from_formula(f: &F) -> Result<Self> {
        let shape = |msg: &str| Error::Input(format!("not of explicit shape ({msg}): {}", print_formula(f)));
        let mut covers = BTreeMap::new();
        let mut cur = f.clone();
        loop {
            let next = match &*cur {
                Formula::And(rest, last) => match &**last {
                    Formula::Cover(a, g) => {
                        if covers.insert(a.clone(), g.clone()).is_some() {
                            return Err(shape("repeated agent"));
                        }
                        rest.clone()
                    }
                    _ => break,
                },
                _ => return Err(shape("expected a conjunction")),
            };
            cur = next;
        }
        let (pi, gamma0) = match &*cur {
            Formula::And(pi, g0) if pi.is_propositional() => (pi.clone(), g0.clone()),
            _ => return Err(shape("expected a propositional part and a modal part")),
        };
        if covers.is_empty() || f.agents().iter().any(|a| !covers.contains_key(a)) {
            return Err(shape("an agent has no cover"));
        }
        if covers.values().any(|g| !g.contains(&gamma0)) {
            return Err(shape("the modal part is missing from a cover"));
        }
        Ok(Explicit { pi, gamma0, covers })
    }

    /// Conditions 1 and 2, decided in S5.
    pub fn conditions_hold(&self, prover: &mut Prover) -> Result<bool> {
        let mut psi = BTreeSet::new();
        for g in self.covers.values().flatten() {
            psi.extend(crate::syntax::subformulae(g));
        }
        for (a, gamma) in &self.covers {
            for g in gamma {
                for p in &psi {
                    if !prover.entails(g, p)? && !prover.entails(g, &Formula::not(p.clone()))? {
                        return Ok(false);
                    }
                }
                for p in &psi {
                    if let Formula::Box(b, body) = &**p {
                        if b != a {
                            continue;
                        }
                        let lhs = prover.entails(g, p)?;
                        let mut rhs = true;
                        for other in gamma {
                            if !prover.entails(other, body)? {
                                rhs = false;
                                break;
                            }
                        }
                        if lhs != rhs {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        Ok(true)
    }
}

pub fn is_explicit(f: &F) -> Result<bool> {
    let e = Explicit::from_formula(f)?;
    e.conditions_hold(&mut Prover::new(FrameClass::S5))
}

/// Limits for [`to_explicit`].
#[derive(Clone, Copy, Debug)]
pub struct ExplicitBudget {
    pub max_items: usize,
    pub max_candidates: usize,
    pub max_disjuncts: usize,
}

impl Default for ExplicitBudget {
    fn default() -> Self {
        ExplicitBudget { max_items: 14, max_candidates: 12, max_disjuncts: 20_000 }
    }
}

/// A disjunction of explicit formulae equivalent to `f` in S5, over the
/// agents occurring in `f`. Built from complete assignments to the closure
/// of `f`; the candidate cover sets are enumerated exhaustively within the budget.
pub fn to_explicit(f: &F, budget: ExplicitBudget) -> Result<Vec<Explicit>> {
    if let Ok(e) = Explicit::from_formula(f) {
        if e.conditions_hold(&mut Prover::new(FrameClass::S5))? {
            return Ok(vec![e]);
        }
    }
    let g = boxify(f)?;
    let items: Vec<F> = closure(&g).into_iter().collect();
    if items.len() > budget.max_items {
        return Err(Error::NotConverted(format!("closure of {} items exceeds the budget", items.len())));
    }
    let agents = f.agents();
    let mut prover = Prover::new(FrameClass::S5);
    let mut types: Vec<(BTreeMap<F, bool>, F)> = Vec::new();
    for bits in 0u64..(1 << items.len()) {
        let sigma: BTreeMap<F, bool> = items.iter().enumerate().map(|(i, x)| (x.clone(), bits >> i & 1 == 1)).collect();
        if !locally_consistent(&sigma) {
            continue;
        }
        let gamma = Formula::conj(
            sigma.iter().map(|(x, &v)| if v { x.clone() } else { Formula::not(x.clone()) }),
        );
        if prover.satisfiable(&gamma)? {
            types.push((sigma, gamma));
        }
    }
    let agrees = |x: &BTreeMap<F, bool>, y: &BTreeMap<F, bool>, a: &str| {
        x.iter().all(|(k, v)| !matches!(&**k, Formula::Box(b, _) if b == a) || y.get(k) == Some(v))
    };
    let mut out = Vec::new();
    for (i, (sigma0, gamma0)) in types.iter().enumerate() {
        if !eval_items(&g, sigma0) {
            continue;
        }
        let mut per_agent: Vec<(String, Vec<BTreeSet<F>>)> = Vec::new();
        for a in &agents {
            let cands: Vec<usize> = (0..types.len())
                .filter(|&j| {
                    j != i
                        && agrees(sigma0, &types[j].0, a)
                        && sigma0.iter().all(|(k, &v)| match &**k {
                            Formula::Box(b, body) if b == a && v => eval_items(body, &types[j].0),
                            _ => true,
                        })
                })
                .collect();
            if cands.len() > budget.max_candidates {
                return Err(Error::NotConverted(format!("{} candidate alternatives exceed the budget", cands.len())));
            }
            let false_boxes: Vec<&F> = sigma0
                .iter()
                .filter_map(|(k, &v)| match &**k {
                    Formula::Box(b, body) if b == a && !v => Some(body),
                    _ => None,
                })
                .collect();
            let mut options = Vec::new();
            for mask in 0u64..(1 << cands.len()) {
                let members: Vec<usize> =
                    std::iter::once(i).chain(cands.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &j)| j)).collect();
                let witnessed =
                    false_boxes.iter().all(|body| members.iter().any(|&j| !eval_items(body, &types[j].0)));
                if witnessed {
                    options.push(members.iter().map(|&j| types[j].1.clone()).collect());
                }
            }
            per_agent.push((a.clone(), options));
        }
        let pi = Formula::conj(sigma0.iter().filter_map(|(k, &v)| match &**k {
            Formula::Atom(_) => Some(if v { k.clone() } else { Formula::not(k.clone()) }),
            _ => None,
        }));
        let mut partial = vec![BTreeMap::new()];
        for (a, options) in &per_agent {
            let mut next = Vec::new();
            for base in &partial {
                for opt in options {
                    let mut covers: BTreeMap<String, BTreeSet<F>> = base.clone();
                    covers.insert(a.clone(), opt.clone());
                    next.push(covers);
                }
            }
            if next.len() + out.len() > budget.max_disjuncts {
                return Err(Error::NotConverted("too many explicit disjuncts".into()));
            }
            partial = next;
        }
        for covers in partial {
            out.push(Explicit { pi: pi.clone(), gamma0: gamma0.clone(), covers });
        }
    }
    Ok(out)
}

pub fn explicit_disjunction(es: &[Explicit]) -> F {
    Formula::disj(es.iter().map(Explicit::to_formula))
}
