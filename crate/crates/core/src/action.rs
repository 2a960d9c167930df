//! Action models, product update and sequential composition.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kripke::{relation_in_class, FrameClass, KripkeModel, PointedKripkeModel, Relations};
use crate::syntax::{parse_formula, print_formula, AgentSet, F};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionModel {
    pub agents: Vec<String>,
    pub names: Vec<String>,
    pub pre: Vec<F>,
    /// `rel[agent][point]` is the sorted successor list.
    pub rel: Relations,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedActionModel {
    pub model: ActionModel,
    pub points: Vec<usize>,
}

impl ActionModel {
    pub fn new(agents: &AgentSet, names: Vec<String>, pre: Vec<F>, mut rel: Relations) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::InvalidModel("action model without points".into()));
        }
        if pre.len() != names.len() || rel.len() != agents.len() {
            return Err(Error::InvalidModel("dimension mismatch".into()));
        }
        for per_agent in rel.iter_mut() {
            if per_agent.len() != names.len() {
                return Err(Error::InvalidModel("relation size mismatch".into()));
            }
            for succ in per_agent.iter_mut() {
                succ.sort_unstable();
                succ.dedup();
            }
        }
        Ok(ActionModel { agents: agents.iter().cloned().collect(), names, pre, rel })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn agent_set(&self) -> AgentSet {
        self.agents.iter().cloned().collect()
    }

    pub fn agent_index(&self, a: &str) -> Option<usize> {
        self.agents.binary_search_by(|x| x.as_str().cmp(a)).ok()
    }

    pub fn succ(&self, agent: usize, t: usize) -> &[usize] {
        &self.rel[agent][t]
    }

    pub fn point_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

impl PointedActionModel {
    pub fn new(model: ActionModel, mut points: Vec<usize>) -> Result<Self> {
        points.sort_unstable();
        points.dedup();
        if points.is_empty() {
            return Err(Error::InvalidModel("pointed action model needs a designated point".into()));
        }
        if points.iter().any(|&t| t >= model.len()) {
            return Err(Error::InvalidModel("designated point out of range".into()));
        }
        Ok(PointedActionModel { model, points })
    }

    pub fn at(&self, t: usize) -> PointedActionModel {
        PointedActionModel { model: self.model.clone(), points: vec![t] }
    }

    pub fn to_json_value(&self) -> ActionModelJson {
        let m = &self.model;
        ActionModelJson {
            agents: m.agents.clone(),
            states: m.names.clone(),
            pre: (0..m.len()).map(|t| (m.names[t].clone(), print_formula(&m.pre[t]))).collect(),
            relations: m
                .agents
                .iter()
                .enumerate()
                .map(|(a, name)| {
                    let pairs = (0..m.len())
                        .flat_map(|s| m.rel[a][s].iter().map(move |&t| (s, t)))
                        .map(|(s, t)| (m.names[s].clone(), m.names[t].clone()))
                        .collect();
                    (name.clone(), pairs)
                })
                .collect(),
            points: self.points.iter().map(|&t| m.names[t].clone()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("action model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let json: ActionModelJson = serde_json::from_str(text).map_err(|e| Error::InvalidModel(e.to_string()))?;
        let agents: AgentSet = json.agents.iter().cloned().collect();
        let index: HashMap<&str, usize> = json.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        if index.len() != json.states.len() {
            return Err(Error::InvalidModel("duplicate action point".into()));
        }
        let lookup = |s: &str| {
            index.get(s).copied().ok_or_else(|| Error::InvalidModel(format!("unknown action point '{s}'")))
        };
        let mut pre = Vec::with_capacity(json.states.len());
        for s in &json.states {
            let text = json.pre.get(s).ok_or_else(|| Error::InvalidModel(format!("missing precondition for '{s}'")))?;
            pre.push(parse_formula(text, &agents)?);
        }
        for a in json.relations.keys() {
            if !agents.contains(a) {
                return Err(Error::InvalidModel(format!("relation for undeclared agent '{a}'")));
            }
        }
        let mut rel = Vec::new();
        for a in &agents {
            let pairs = json
                .relations
                .get(a)
                .ok_or_else(|| Error::InvalidModel(format!("missing relation for agent '{a}'")))?;
            let mut adj = vec![Vec::new(); json.states.len()];
            for (s, t) in pairs {
                adj[lookup(s)?].push(lookup(t)?);
            }
            rel.push(adj);
        }
        let points = json.points.iter().map(|s| lookup(s)).collect::<Result<Vec<_>>>()?;
        PointedActionModel::new(ActionModel::new(&agents, json.states.clone(), pre, rel)?, points)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionModelJson {
    pub agents: Vec<String>,
    pub states: Vec<String>,
    pub pre: BTreeMap<String, String>,
    pub relations: BTreeMap<String, Vec<(String, String)>>,
    pub points: Vec<String>,
}

pub fn export_dot(a: &PointedActionModel) -> String {
    let esc = |s: &str| s.replace('\\', "\\\\").replace('"', "\\\"");
    let m = &a.model;
    let mut out = String::from("digraph action {\n");
    for t in 0..m.len() {
        let shape = if a.points.contains(&t) { "doublecircle" } else { "circle" };
        let label = format!("{}: {}", m.names[t], print_formula(&m.pre[t]));
        out.push_str(&format!("  \"{}\" [label=\"{}\", shape={shape}];\n", esc(&m.names[t]), esc(&label)));
    }
    for (i, agent) in m.agents.iter().enumerate() {
        for t in 0..m.len() {
            for &u in m.succ(i, t) {
                out.push_str(&format!("  \"{}\" -> \"{}\" [label=\"{}\"];\n", esc(&m.names[t]), esc(&m.names[u]), esc(agent)));
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Decides a precondition at every state of a model at once.
pub type SatOracle<'a> = dyn FnMut(&KripkeModel, &F) -> Result<Vec<bool>> + 'a;

/// Rewrites `⟨A,t⟩φ` into a basic formula.
pub type DiamondOracle<'a> = dyn FnMut(&ActionModel, usize, &F) -> Result<F> + 'a;

/// Product update. The designated set of the result may be empty.
pub fn execute(m: &PointedKripkeModel, a: &PointedActionModel, sat: &mut SatOracle) -> Result<PointedKripkeModel> {
    Ok(execute_indexed(m, a, sat)?.0)
}

/// [`execute`], also returning the (state, action point) pair behind each
/// result state.
pub fn execute_indexed(
    m: &PointedKripkeModel,
    a: &PointedActionModel,
    sat: &mut SatOracle,
) -> Result<(PointedKripkeModel, Vec<(usize, usize)>)> {
    let km = &m.model;
    let am = &a.model;
    if km.agents() != am.agents.as_slice() {
        return Err(Error::AgentMismatch);
    }
    let nt = am.len();
    let mut slot = vec![usize::MAX; km.len() * nt];
    let mut names = Vec::new();
    let mut valuation = Vec::new();
    let mut pairs = Vec::new();
    let truth: Vec<Vec<bool>> = am.pre.iter().map(|p| sat(km, p)).collect::<Result<_>>()?;
    for s in 0..km.len() {
        for t in 0..nt {
            if truth[t][s] {
                slot[s * nt + t] = names.len();
                names.push(format!("({},{})", km.state_name(s), am.names[t]));
                valuation.push(km.atoms_at(s).clone());
                pairs.push((s, t));
            }
        }
    }
    if names.is_empty() {
        return Ok((empty_result(km)?, pairs));
    }
    let rel = (0..km.agents().len())
        .map(|ag| {
            pairs
                .iter()
                .map(|&(s, t)| {
                    let mut out = Vec::new();
                    for &u in km.succ(ag, s) {
                        for &v in am.succ(ag, t) {
                            let k = slot[u * nt + v];
                            if k != usize::MAX {
                                out.push(k);
                            }
                        }
                    }
                    out
                })
                .collect()
        })
        .collect();
    let model = KripkeModel::from_parts(&km.agent_set(), names, valuation, rel)?;
    let mut points = Vec::new();
    for &s in &m.points {
        for &t in &a.points {
            let k = slot[s * nt + t];
            if k != usize::MAX {
                points.push(k);
            }
        }
    }
    Ok((PointedKripkeModel::new(model, points), pairs))
}

/// Result of an execution in which no state survives: a single inert state
/// standing in for the empty model, with no designated points.
fn empty_result(km: &KripkeModel) -> Result<PointedKripkeModel> {
    let agents = km.agent_set();
    // A reflexive placeholder state keeps the result inside every class.
    let rel = vec![vec![vec![0]]; agents.len()];
    let model = KripkeModel::from_parts(&agents, vec!["(none)".into()], vec![Default::default()], rel)?;
    Ok(PointedKripkeModel { model, points: vec![] })
}

fn product(
    a: &PointedActionModel,
    b: &PointedActionModel,
    only_generated: bool,
    normalize: &mut DiamondOracle,
) -> Result<PointedActionModel> {
    let (ma, mb) = (&a.model, &b.model);
    if ma.agents != mb.agents {
        return Err(Error::AgentMismatch);
    }
    let nb = mb.len();
    let mut slot: HashMap<(usize, usize), usize> = HashMap::new();
    let mut order: Vec<(usize, usize)> = Vec::new();
    if only_generated {
        let mut queue = VecDeque::new();
        for &x in &a.points {
            for &y in &b.points {
                if slot.insert((x, y), order.len()).is_none() {
                    order.push((x, y));
                    queue.push_back((x, y));
                }
            }
        }
        while let Some((x, y)) = queue.pop_front() {
            for ag in 0..ma.agents.len() {
                for &u in ma.succ(ag, x) {
                    for &v in mb.succ(ag, y) {
                        if let std::collections::hash_map::Entry::Vacant(e) = slot.entry((u, v)) {
                            e.insert(order.len());
                            order.push((u, v));
                            queue.push_back((u, v));
                        }
                    }
                }
            }
        }
    } else {
        for x in 0..ma.len() {
            for y in 0..nb {
                slot.insert((x, y), order.len());
                order.push((x, y));
            }
        }
    }
    let mut names = Vec::with_capacity(order.len());
    let mut pre = Vec::with_capacity(order.len());
    for &(x, y) in &order {
        names.push(format!("{}|{}", ma.names[x], mb.names[y]));
        pre.push(normalize(ma, x, &mb.pre[y])?);
    }
    let rel = (0..ma.agents.len())
        .map(|ag| {
            order
                .iter()
                .map(|&(x, y)| {
                    let mut out = Vec::new();
                    for &u in ma.succ(ag, x) {
                        for &v in mb.succ(ag, y) {
                            if let Some(&k) = slot.get(&(u, v)) {
                                out.push(k);
                            }
                        }
                    }
                    out
                })
                .collect()
        })
        .collect();
    let model = ActionModel::new(&ma.agent_set(), names, pre, rel)?;
    let points = a.points.iter().flat_map(|&x| b.points.iter().map(move |&y| (x, y))).map(|k| slot[&k]).collect();
    PointedActionModel::new(model, points)
}

/// Full product of two action models; `normalize` computes `⟨A,x⟩ pre'(y)`.
pub fn seq_compose(a: &PointedActionModel, b: &PointedActionModel, normalize: &mut DiamondOracle) -> Result<PointedActionModel> {
    product(a, b, false, normalize)
}

/// The part of [`seq_compose`] reachable from the designated pairs; bisimilar
/// to the full product at every designated point.
pub fn seq_compose_generated(
    a: &PointedActionModel,
    b: &PointedActionModel,
    normalize: &mut DiamondOracle,
) -> Result<PointedActionModel> {
    product(a, b, true, normalize)
}

pub fn am_frame_class_holds(a: &ActionModel, c: FrameClass) -> bool {
    a.rel.iter().all(|r| relation_in_class(r, c))
}

/// Disjoint union; points of `b` are renamed when their names collide with `a`.
pub fn choice_union(a: &PointedActionModel, b: &PointedActionModel) -> Result<PointedActionModel> {
    let (ma, mb) = (&a.model, &b.model);
    if ma.agents != mb.agents {
        return Err(Error::AgentMismatch);
    }
    let collide = mb.names.iter().any(|n| ma.names.contains(n));
    let names = if collide {
        ma.names.iter().map(|n| format!("{n}#1")).chain(mb.names.iter().map(|n| format!("{n}#2"))).collect()
    } else {
        ma.names.iter().chain(mb.names.iter()).cloned().collect()
    };
    let off = ma.len();
    let pre = ma.pre.iter().chain(mb.pre.iter()).cloned().collect();
    let rel = (0..ma.agents.len())
        .map(|ag| {
            ma.rel[ag]
                .iter()
                .cloned()
                .chain(mb.rel[ag].iter().map(|s| s.iter().map(|t| t + off).collect()))
                .collect()
        })
        .collect();
    let model = ActionModel::new(&ma.agent_set(), names, pre, rel)?;
    let points = a.points.iter().copied().chain(b.points.iter().map(|t| t + off)).collect();
    PointedActionModel::new(model, points)
}

/// Restriction to points reachable from the designated ones.
pub fn generated_submodel(a: &PointedActionModel) -> PointedActionModel {
    let m = &a.model;
    let mut keep = vec![false; m.len()];
    let mut stack: Vec<usize> = a.points.clone();
    for &t in &stack {
        keep[t] = true;
    }
    while let Some(t) = stack.pop() {
        for ag in 0..m.agents.len() {
            for &u in m.succ(ag, t) {
                if !keep[u] {
                    keep[u] = true;
                    stack.push(u);
                }
            }
        }
    }
    if keep.iter().all(|&k| k) {
        return a.clone();
    }
    let mut map = vec![usize::MAX; m.len()];
    let mut next = 0;
    for t in 0..m.len() {
        if keep[t] {
            map[t] = next;
            next += 1;
        }
    }
    let names = (0..m.len()).filter(|&t| keep[t]).map(|t| m.names[t].clone()).collect();
    let pre = (0..m.len()).filter(|&t| keep[t]).map(|t| m.pre[t].clone()).collect();
    let rel = m
        .rel
        .iter()
        .map(|per| {
            (0..m.len()).filter(|&t| keep[t]).map(|t| per[t].iter().map(|&u| map[u]).collect()).collect()
        })
        .collect();
    let model = ActionModel { agents: m.agents.clone(), names, pre, rel };
    PointedActionModel { model, points: a.points.iter().map(|&t| map[t]).collect() }
}
