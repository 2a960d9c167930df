//! Tableau decision procedure for basic multi-agent modal logic over K, K45 and S5.
//!
//! Formulae are interned in negation normal form. A node of the tableau is a
//! set of node ids. In K45 and S5 a world reached through agent `a` shares the
//! `a`-modal theory of its parent, so such "member" nodes carry the parent's
//! `a`-modal literals and never spawn `a`-successors of their own.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::kripke::FrameClass;
use crate::syntax::{print_formula, Formula, F};

pub const DEFAULT_BUDGET: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Lit(u32, bool),
    And(Vec<u32>),
    Or(Vec<u32>),
    Box(u32, u32),
    Dia(u32, u32),
}

const TRUE: u32 = 0;
const FALSE: u32 = 1;

type Key = (Vec<u32>, Option<u32>);

pub struct Prover {
    class: FrameClass,
    budget: usize,
    steps: usize,
    nodes: Vec<Node>,
    neg: Vec<u32>,
    table: HashMap<Node, u32>,
    atoms: HashMap<String, u32>,
    agents: HashMap<String, u32>,
    seen: HashMap<*const Formula, (F, u32)>,
    memo: HashMap<Key, bool>,
}

impl Prover {
    pub fn new(class: FrameClass) -> Self {
        Self::with_budget(class, DEFAULT_BUDGET)
    }

    /// `budget` bounds the number of tableau nodes expanded per query.
    pub fn with_budget(class: FrameClass, budget: usize) -> Self {
        let mut p = Prover {
            class,
            budget,
            steps: 0,
            nodes: Vec::new(),
            neg: Vec::new(),
            table: HashMap::new(),
            atoms: HashMap::new(),
            agents: HashMap::new(),
            seen: HashMap::new(),
            memo: HashMap::new(),
        };
        let t = p.mk(Node::True);
        debug_assert_eq!((t, p.neg[t as usize]), (TRUE, FALSE));
        p
    }

    pub fn class(&self) -> FrameClass {
        self.class
    }

    pub fn satisfiable(&mut self, f: &F) -> Result<bool> {
        let id = self.intern(f)?;
        self.steps = 0;
        self.sat(vec![id], None)
    }

    pub fn valid(&mut self, f: &F) -> Result<bool> {
        let id = self.intern(f)?;
        self.steps = 0;
        Ok(!self.sat(vec![self.neg[id as usize]], None)?)
    }

    /// Whether every conjunct set satisfying `f` satisfies `g`.
    pub fn entails(&mut self, f: &F, g: &F) -> Result<bool> {
        let a = self.intern(f)?;
        let b = self.intern(g)?;
        self.steps = 0;
        let set = self.mk_and(vec![a, self.neg[b as usize]]);
        Ok(!self.sat(vec![set], None)?)
    }

    pub fn equiv(&mut self, f: &F, g: &F) -> Result<bool> {
        Ok(self.entails(f, g)? && self.entails(g, f)?)
    }

    /// Satisfiability of a conjunction.
    pub fn consistent(&mut self, fs: &[F]) -> Result<bool> {
        let mut ids = Vec::with_capacity(fs.len());
        for f in fs {
            ids.push(self.intern(f)?);
        }
        self.steps = 0;
        let set = self.mk_and(ids);
        self.sat(vec![set], None)
    }

    // -- interning ---------------------------------------------------------

    fn mk(&mut self, node: Node) -> u32 {
        if let Some(&id) = self.table.get(&node) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(node.clone());
        self.neg.push(u32::MAX);
        self.table.insert(node.clone(), id);
        let dual = match &node {
            Node::True => Node::False,
            Node::False => Node::True,
            Node::Lit(p, b) => Node::Lit(*p, !b),
            Node::And(cs) => Node::Or(self.negs(cs)),
            Node::Or(cs) => Node::And(self.negs(cs)),
            Node::Box(a, b) => Node::Dia(*a, self.neg[*b as usize]),
            Node::Dia(a, b) => Node::Box(*a, self.neg[*b as usize]),
        };
        let nid = self.nodes.len() as u32;
        self.nodes.push(dual.clone());
        self.neg.push(id);
        self.table.insert(dual, nid);
        self.neg[id as usize] = nid;
        id
    }

    fn negs(&self, cs: &[u32]) -> Vec<u32> {
        let mut v: Vec<u32> = cs.iter().map(|&c| self.neg[c as usize]).collect();
        v.sort_unstable();
        v
    }

    fn mk_and(&mut self, items: Vec<u32>) -> u32 {
        self.mk_junction(items, true)
    }

    fn mk_or(&mut self, items: Vec<u32>) -> u32 {
        self.mk_junction(items, false)
    }

    fn mk_junction(&mut self, items: Vec<u32>, conj: bool) -> u32 {
        let (unit, zero) = if conj { (TRUE, FALSE) } else { (FALSE, TRUE) };
        let mut flat = Vec::new();
        for c in items {
            if c == unit {
                continue;
            }
            if c == zero {
                return zero;
            }
            match (&self.nodes[c as usize], conj) {
                (Node::And(cs), true) | (Node::Or(cs), false) => flat.extend(cs.iter().copied()),
                _ => flat.push(c),
            }
        }
        flat.sort_unstable();
        flat.dedup();
        if flat.iter().any(|&c| flat.binary_search(&self.neg[c as usize]).is_ok()) {
            return zero;
        }
        match flat.len() {
            0 => unit,
            1 => flat[0],
            _ if conj => self.mk(Node::And(flat)),
            _ => self.mk(Node::Or(flat)),
        }
    }

    fn agent_id(&mut self, a: &str) -> u32 {
        let n = self.agents.len() as u32;
        *self.agents.entry(a.to_string()).or_insert(n)
    }

    fn intern(&mut self, f: &F) -> Result<u32> {
        let key = std::sync::Arc::as_ptr(f);
        if let Some((_, id)) = self.seen.get(&key) {
            return Ok(*id);
        }
        let id = match &**f {
            Formula::Top => TRUE,
            Formula::Bottom => FALSE,
            Formula::Atom(p) => {
                let n = self.atoms.len() as u32;
                let p = *self.atoms.entry(p.clone()).or_insert(n);
                self.mk(Node::Lit(p, true))
            }
            Formula::Not(g) => {
                let g = self.intern(g)?;
                self.neg[g as usize]
            }
            Formula::And(x, y) => {
                let v = vec![self.intern(x)?, self.intern(y)?];
                self.mk_and(v)
            }
            Formula::Or(x, y) => {
                let v = vec![self.intern(x)?, self.intern(y)?];
                self.mk_or(v)
            }
            Formula::Implies(x, y) => {
                let x = self.intern(x)?;
                let y = self.intern(y)?;
                self.mk_or(vec![self.neg[x as usize], y])
            }
            Formula::Iff(x, y) => {
                let x = self.intern(x)?;
                let y = self.intern(y)?;
                let both = self.mk_and(vec![x, y]);
                let neither = self.mk_and(vec![self.neg[x as usize], self.neg[y as usize]]);
                self.mk_or(vec![both, neither])
            }
            Formula::Box(a, g) => {
                let a = self.agent_id(a);
                let g = self.intern(g)?;
                self.mk_box(a, g)
            }
            Formula::Diamond(a, g) => {
                let a = self.agent_id(a);
                let g = self.intern(g)?;
                let b = self.mk_box(a, self.neg[g as usize]);
                self.neg[b as usize]
            }
            Formula::Cover(a, gs) => {
                let a = self.agent_id(a);
                let ids = gs.iter().map(|g| self.intern(g)).collect::<Result<Vec<_>>>()?;
                let any = self.mk_or(ids.clone());
                let mut parts = vec![self.mk_box(a, any)];
                for g in ids {
                    let b = self.mk_box(a, self.neg[g as usize]);
                    parts.push(self.neg[b as usize]);
                }
                self.mk_and(parts)
            }
            _ => return Err(Error::NotBasic(print_formula(f))),
        };
        self.seen.insert(key, (f.clone(), id));
        Ok(id)
    }

    fn mk_box(&mut self, a: u32, body: u32) -> u32 {
        if body == TRUE {
            TRUE
        } else {
            self.mk(Node::Box(a, body))
        }
    }

    // -- tableau -----------------------------------------------------------

    fn sat(&mut self, mut set: Vec<u32>, member: Option<u32>) -> Result<bool> {
        set.sort_unstable();
        set.dedup();
        let key = (set, member);
        if let Some(&r) = self.memo.get(&key) {
            return Ok(r);
        }
        self.steps += 1;
        if self.steps > self.budget {
            return Err(Error::ResourceExhausted);
        }
        let r = self.expand(key.0.iter().copied().collect(), member)?;
        self.memo.insert(key, r);
        Ok(r)
    }

    fn reflexive(&self, agent: u32, member: Option<u32>) -> bool {
        match self.class {
            FrameClass::K => false,
            FrameClass::K45 => member == Some(agent),
            FrameClass::S5 => true,
        }
    }

    fn expand(&mut self, mut set: BTreeSet<u32>, member: Option<u32>) -> Result<bool> {
        let mut pending: Vec<u32> = set.iter().copied().collect();
        while let Some(id) = pending.pop() {
            match &self.nodes[id as usize] {
                Node::False => return Ok(false),
                Node::And(cs) => {
                    for &c in cs {
                        if set.insert(c) {
                            pending.push(c);
                        }
                    }
                }
                Node::Box(a, b) if self.reflexive(*a, member) => {
                    if set.insert(*b) {
                        pending.push(*b);
                    }
                }
                _ => {}
            }
        }
        if set.iter().any(|&id| set.contains(&self.neg[id as usize])) {
            return Ok(false);
        }

        // Disjunctions, with semantic branching.
        let open = set.iter().find_map(|&id| match &self.nodes[id as usize] {
            Node::Or(ds) if !ds.iter().any(|d| set.contains(d)) => Some(ds.clone()),
            _ => None,
        });
        if let Some(ds) = open {
            for (i, &d) in ds.iter().enumerate() {
                if set.contains(&self.neg[d as usize]) {
                    continue;
                }
                let mut branch: Vec<u32> = set.iter().copied().collect();
                branch.push(d);
                branch.extend(ds[..i].iter().map(|&e| self.neg[e as usize]));
                if self.sat(branch, member)? {
                    return Ok(true);
                }
            }
            return Ok(false);
        }

        let agents = self.agents.len() as u32;
        if self.class != FrameClass::K {
            for a in 0..agents {
                if member == Some(a) {
                    continue;
                }
                if let Some(x) = self.undecided(&set, a) {
                    for choice in [x, self.neg[x as usize]] {
                        let mut branch: Vec<u32> = set.iter().copied().collect();
                        branch.push(choice);
                        if self.sat(branch, member)? {
                            return Ok(true);
                        }
                    }
                    return Ok(false);
                }
            }
        }

        for a in 0..agents {
            if self.class != FrameClass::K && member == Some(a) {
                continue;
            }
            let mut boxes = Vec::new();
            let mut dias = Vec::new();
            let mut literals = Vec::new();
            for &id in &set {
                match self.nodes[id as usize] {
                    Node::Box(b, body) if b == a => {
                        boxes.push(body);
                        literals.push(id);
                    }
                    Node::Dia(b, body) if b == a => {
                        dias.push(body);
                        literals.push(id);
                    }
                    _ => {}
                }
            }
            let child_member = if self.class == FrameClass::K { None } else { Some(a) };
            for psi in dias {
                let mut child = boxes.clone();
                child.push(psi);
                if self.class != FrameClass::K {
                    child.extend(literals.iter().copied());
                }
                if !self.sat(child, child_member)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// First formula of the agent's modal closure that the set leaves open.
    fn undecided(&self, set: &BTreeSet<u32>, a: u32) -> Option<u32> {
        let mut closure = BTreeSet::new();
        let mut stack: Vec<u32> = set.iter().copied().filter(|&id| self.is_modal_of(id, a)).collect();
        while let Some(id) = stack.pop() {
            let id = self.positive(id);
            if !closure.insert(id) {
                continue;
            }
            let body = match self.nodes[id as usize] {
                Node::Box(_, b) | Node::Dia(_, b) => b,
                _ => continue,
            };
            self.top_modal(body, a, &mut stack);
        }
        closure.into_iter().find(|&x| !set.contains(&x) && !set.contains(&self.neg[x as usize]))
    }

    fn positive(&self, id: u32) -> u32 {
        match self.nodes[id as usize] {
            Node::Dia(..) => self.neg[id as usize],
            _ => id,
        }
    }

    fn is_modal_of(&self, id: u32, a: u32) -> bool {
        matches!(self.nodes[id as usize], Node::Box(b, _) | Node::Dia(b, _) if b == a)
    }

    fn top_modal(&self, id: u32, a: u32, out: &mut Vec<u32>) {
        match &self.nodes[id as usize] {
            Node::And(cs) | Node::Or(cs) => cs.iter().for_each(|&c| self.top_modal(c, a, out)),
            _ if self.is_modal_of(id, a) => out.push(id),
            _ => {}
        }
    }
}

pub fn valid(f: &F, c: FrameClass) -> Result<bool> {
    Prover::new(c).valid(f)
}

pub fn satisfiable(f: &F, c: FrameClass) -> Result<bool> {
    Prover::new(c).satisfiable(f)
}

pub fn equiv(f: &F, g: &F, c: FrameClass) -> Result<bool> {
    Prover::new(c).equiv(f, g)
}
