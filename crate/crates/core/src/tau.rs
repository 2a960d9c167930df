//! Translation of action formulae into pointed action models, per frame class.

use crate::action::{choice_union, seq_compose_generated, ActionModel, PointedActionModel};
use crate::error::{Error, Result};
use crate::kripke::FrameClass;
use crate::reduce::Reducer;
use crate::syntax::{fold, Action, AgentSet, Formula, F};

/// Action model of `alpha` in class `c` over the given agents.
///
/// Test preconditions are stored as written; preconditions of composed points
/// are reduced to basic formulae.
pub fn tau(alpha: &Action, c: FrameClass, agents: &AgentSet) -> Result<PointedActionModel> {
    let mut red = Reducer::new(c, agents.clone());
    build(alpha, &mut red, "")
}

fn child(path: &str, step: &str) -> String {
    if path.is_empty() {
        step.to_string()
    } else {
        format!("{path}.{step}")
    }
}

pub(crate) fn build(alpha: &Action, red: &mut Reducer, path: &str) -> Result<PointedActionModel> {
    let c = red.class();
    let agents = red.agents().clone();
    let n = agents.len();
    match alpha {
        Action::Test(phi) => {
            let names = vec![format!("test@{path}"), format!("skip@{path}")];
            let pre = vec![phi.clone(), Formula::top()];
            let per_agent = match c {
                FrameClass::S5 => vec![vec![0, 1], vec![0, 1]],
                _ => vec![vec![1], vec![1]],
            };
            let model = ActionModel::new(&agents, names, pre, vec![per_agent; n])?;
            PointedActionModel::new(model, vec![0])
        }
        Action::Choice(a, b) => {
            let x = build(a, red, &child(path, "u0"))?;
            let y = build(b, red, &child(path, "u1"))?;
            choice_union(&x, &y)
        }
        Action::Compose(a, b) => {
            let x = build(a, red, &child(path, "c0"))?;
            let x = red.basic_preconditions(&x)?;
            let y = build(b, red, &child(path, "c1"))?;
            let y = red.basic_preconditions(&y)?;
            let mut normalize =
                |am: &ActionModel, t: usize, post: &F| -> Result<F> { Ok(fold::and(am.pre[t].clone(), red.tr(am, t, post)?)) };
            seq_compose_generated(&x, &y, &mut normalize)
        }
        Action::Learn(group, a, b) => {
            if group.is_empty() || !group.is_subset(&agents) {
                return Err(Error::Input(format!("learning group {group:?} is not a non-empty set of declared agents")));
            }
            let same = a == b;
            let inner = if same || c == FrameClass::S5 {
                let x = build(a, red, &child(path, "L0"))?;
                if same {
                    (x.clone(), x.points.len())
                } else {
                    let y = build(b, red, &child(path, "L1"))?;
                    let k = x.points.len();
                    (choice_union(&x, &y)?, k)
                }
            } else {
                let joined = Action::Choice(a.clone(), b.clone());
                let x = build(&joined, red, &child(path, "L0"))?;
                let k = x.points.len();
                (x, k)
            };
            match c {
                FrameClass::K => learn_k(inner.0, group, path),
                FrameClass::K45 => learn_k45(inner.0, group, path),
                FrameClass::S5 => learn_s5(inner.0, inner.1, group, path),
            }
        }
    }
}

/// Appends a root and a skip point; returns their indices.
fn add_root_and_skip(m: &mut ActionModel, path: &str) -> (usize, usize) {
    let root = m.names.len();
    m.names.push(format!("root@{path}"));
    m.names.push(format!("skip@{path}"));
    m.pre.push(Formula::top());
    m.pre.push(Formula::top());
    for per_agent in m.rel.iter_mut() {
        per_agent.push(Vec::new());
        per_agent.push(vec![root + 1]);
    }
    (root, root + 1)
}

fn learn_k(inner: PointedActionModel, group: &AgentSet, path: &str) -> Result<PointedActionModel> {
    let mut m = inner.model;
    let (root, skip) = add_root_and_skip(&mut m, path);
    for (i, agent) in m.agents.clone().iter().enumerate() {
        m.rel[i][root] = if group.contains(agent) { inner.points.clone() } else { vec![skip] };
    }
    PointedActionModel::new(m, vec![root])
}

fn add_proxies(m: &mut ActionModel, originals: &[usize], path: &str) -> Vec<usize> {
    let mut proxies = Vec::new();
    for &t in originals {
        proxies.push(m.names.len());
        m.names.push(format!("proxy@{path}:{}", m.names[t]));
        m.pre.push(m.pre[t].clone());
        for per_agent in m.rel.iter_mut() {
            per_agent.push(Vec::new());
        }
    }
    proxies
}

fn learn_k45(inner: PointedActionModel, group: &AgentSet, path: &str) -> Result<PointedActionModel> {
    let mut m = inner.model;
    let proxies = add_proxies(&mut m, &inner.points, path);
    let (root, skip) = add_root_and_skip(&mut m, path);
    for (i, agent) in m.agents.clone().iter().enumerate() {
        if group.contains(agent) {
            m.rel[i][root] = proxies.clone();
            for &p in &proxies {
                m.rel[i][p] = proxies.clone();
            }
        } else {
            m.rel[i][root] = vec![skip];
            for (&p, &t) in proxies.iter().zip(&inner.points) {
                m.rel[i][p] = m.rel[i][t].clone();
            }
        }
    }
    PointedActionModel::new(m, vec![root])
}

/// `actual` is the number of leading designated points that belong to the
/// first operand.
fn learn_s5(inner: PointedActionModel, actual: usize, group: &AgentSet, path: &str) -> Result<PointedActionModel> {
    let mut m = inner.model;
    let proxies = add_proxies(&mut m, &inner.points, path);
    let size = m.names.len();
    for (i, agent) in m.agents.clone().iter().enumerate() {
        if group.contains(agent) {
            for &p in &proxies {
                m.rel[i][p] = proxies.clone();
            }
        } else {
            // Each proxy joins the class of its original; classes that come to
            // share a proxy are merged.
            let mut uf = UnionFind::new(size);
            for s in 0..size {
                for &t in &m.rel[i][s] {
                    uf.union(s, t);
                }
            }
            for (&p, &t) in proxies.iter().zip(&inner.points) {
                uf.union(p, t);
            }
            let mut classes: Vec<Vec<usize>> = vec![Vec::new(); size];
            for s in 0..size {
                classes[uf.find(s)].push(s);
            }
            for s in 0..size {
                m.rel[i][s] = classes[uf.find(s)].clone();
            }
        }
    }
    PointedActionModel::new(m, proxies[..actual].to_vec())
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}
