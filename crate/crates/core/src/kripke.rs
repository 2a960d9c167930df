//! Finite multi-agent Kripke models.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::syntax::AgentSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FrameClass {
    K,
    K45,
    S5,
}

impl FrameClass {
    pub const ALL: [FrameClass; 3] = [FrameClass::K, FrameClass::K45, FrameClass::S5];
}

impl FromStr for FrameClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "k" => Ok(FrameClass::K),
            "k45" => Ok(FrameClass::K45),
            "s5" => Ok(FrameClass::S5),
            _ => Err(Error::Input(format!("unknown frame class '{s}' (expected k, k45 or s5)"))),
        }
    }
}

impl fmt::Display for FrameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameClass::K => "K",
            FrameClass::K45 => "K45",
            FrameClass::S5 => "S5",
        })
    }
}

/// Adjacency per agent: `rel[agent][state]` is the sorted successor list.
pub type Relations = Vec<Vec<Vec<usize>>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeModel {
    agents: Vec<String>,
    states: Vec<String>,
    index: HashMap<String, usize>,
    valuation: Vec<BTreeSet<String>>,
    rel: Relations,
}

impl KripkeModel {
    /// Builds a model from index-based parts. Agents are sorted; `rel` follows that order.
    pub fn from_parts(
        agents: &AgentSet,
        states: Vec<String>,
        valuation: Vec<BTreeSet<String>>,
        mut rel: Relations,
    ) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidModel("no states".into()));
        }
        if valuation.len() != states.len() || rel.len() != agents.len() {
            return Err(Error::InvalidModel("dimension mismatch".into()));
        }
        let mut index = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidModel(format!("duplicate state '{s}'")));
            }
        }
        for per_agent in rel.iter_mut() {
            if per_agent.len() != states.len() {
                return Err(Error::InvalidModel("relation size mismatch".into()));
            }
            for succ in per_agent.iter_mut() {
                succ.sort_unstable();
                succ.dedup();
                if succ.iter().any(|&t| t >= states.len()) {
                    return Err(Error::InvalidModel("edge endpoint out of range".into()));
                }
            }
        }
        Ok(KripkeModel { agents: agents.iter().cloned().collect(), states, index, valuation, rel })
    }

    pub fn new(
        agents: &AgentSet,
        states: &[&str],
        valuation: &[(&str, &[&str])],
        relations: &[(&str, &[(&str, &str)])],
    ) -> Result<Self> {
        let json = ModelJson {
            agents: agents.iter().cloned().collect(),
            states: states.iter().map(|s| s.to_string()).collect(),
            valuation: valuation
                .iter()
                .map(|(s, ps)| (s.to_string(), ps.iter().map(|p| p.to_string()).collect()))
                .collect(),
            relations: relations
                .iter()
                .map(|(a, es)| (a.to_string(), es.iter().map(|(x, y)| (x.to_string(), y.to_string())).collect()))
                .collect(),
            points: vec![],
        };
        Ok(PointedKripkeModel::from_json_value(json)?.model)
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn agent_set(&self) -> AgentSet {
        self.agents.iter().cloned().collect()
    }

    pub fn agent_index(&self, a: &str) -> Option<usize> {
        self.agents.binary_search_by(|x| x.as_str().cmp(a)).ok()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn atoms_at(&self, s: usize) -> &BTreeSet<String> {
        &self.valuation[s]
    }

    pub fn holds(&self, s: usize, atom: &str) -> bool {
        self.valuation[s].contains(atom)
    }

    pub fn succ(&self, agent: usize, s: usize) -> &[usize] {
        &self.rel[agent][s]
    }

    pub fn relations(&self) -> &Relations {
        &self.rel
    }

    pub fn edge_count(&self) -> usize {
        self.rel.iter().flatten().map(Vec::len).sum()
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        self.valuation.iter().flatten().cloned().collect()
    }
}

pub fn relation_in_class(rel: &[Vec<usize>], c: FrameClass) -> bool {
    let n = rel.len();
    let mut adj = vec![vec![false; n]; n];
    for (s, succ) in rel.iter().enumerate() {
        for &t in succ {
            adj[s][t] = true;
        }
    }
    if c == FrameClass::S5 && (0..n).any(|s| !adj[s][s]) {
        return false;
    }
    if c == FrameClass::K {
        return true;
    }
    for s in 0..n {
        for &t in &rel[s] {
            for &u in &rel[s] {
                // Euclidean: s→t, s→u ⇒ t→u
                if !adj[t][u] {
                    return false;
                }
            }
            for &u in &rel[t] {
                // transitive: s→t→u ⇒ s→u
                if !adj[s][u] {
                    return false;
                }
            }
        }
    }
    true
}

pub fn frame_class_holds(m: &KripkeModel, c: FrameClass) -> bool {
    m.rel.iter().all(|r| relation_in_class(r, c))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedKripkeModel {
    pub model: KripkeModel,
    pub points: Vec<usize>,
}

impl PointedKripkeModel {
    pub fn new(model: KripkeModel, mut points: Vec<usize>) -> Self {
        points.sort_unstable();
        points.dedup();
        PointedKripkeModel { model, points }
    }

    pub fn at(model: KripkeModel, point: usize) -> Self {
        PointedKripkeModel { model, points: vec![point] }
    }

    pub fn with_points(&self, points: Vec<usize>) -> Self {
        PointedKripkeModel::new(self.model.clone(), points)
    }

    pub fn to_json_value(&self) -> ModelJson {
        let m = &self.model;
        ModelJson {
            agents: m.agents.clone(),
            states: m.states.clone(),
            valuation: (0..m.len())
                .map(|s| (m.states[s].clone(), m.valuation[s].iter().cloned().collect()))
                .collect(),
            relations: m
                .agents
                .iter()
                .enumerate()
                .map(|(a, name)| {
                    let pairs = (0..m.len())
                        .flat_map(|s| m.rel[a][s].iter().map(move |&t| (s, t)))
                        .map(|(s, t)| (m.states[s].clone(), m.states[t].clone()))
                        .collect();
                    (name.clone(), pairs)
                })
                .collect(),
            points: self.points.iter().map(|&s| m.states[s].clone()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let json: ModelJson = serde_json::from_str(text).map_err(|e| Error::InvalidModel(e.to_string()))?;
        Self::from_json_value(json)
    }

    pub fn from_json_value(json: ModelJson) -> Result<Self> {
        let agents: AgentSet = json.agents.iter().cloned().collect();
        if agents.len() != json.agents.len() {
            return Err(Error::InvalidModel("duplicate agent".into()));
        }
        let index: HashMap<&str, usize> = json.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let lookup = |s: &str| {
            index.get(s).copied().ok_or_else(|| Error::InvalidModel(format!("unknown state '{s}'")))
        };
        let mut valuation = vec![BTreeSet::new(); json.states.len()];
        for (s, atoms) in &json.valuation {
            valuation[lookup(s)?] = atoms.iter().cloned().collect();
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
        let model = KripkeModel::from_parts(&agents, json.states.clone(), valuation, rel)?;
        Ok(PointedKripkeModel::new(model, points))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelJson {
    pub agents: Vec<String>,
    pub states: Vec<String>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
    pub relations: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default)]
    pub points: Vec<String>,
}

/// Union of two models over the same agents; returns the index maps of each copy.
pub fn disjoint_union(m1: &KripkeModel, m2: &KripkeModel) -> Result<(KripkeModel, Vec<usize>, Vec<usize>)> {
    if m1.agents != m2.agents {
        return Err(Error::AgentMismatch);
    }
    let n1 = m1.len();
    let states = m1
        .states
        .iter()
        .map(|s| format!("{s}#1"))
        .chain(m2.states.iter().map(|s| format!("{s}#2")))
        .collect();
    let valuation = m1.valuation.iter().chain(m2.valuation.iter()).cloned().collect();
    let rel = (0..m1.agents.len())
        .map(|a| {
            m1.rel[a]
                .iter()
                .cloned()
                .chain(m2.rel[a].iter().map(|succ| succ.iter().map(|t| t + n1).collect()))
                .collect()
        })
        .collect();
    let union = KripkeModel::from_parts(&m1.agent_set(), states, valuation, rel)?;
    Ok((union, (0..n1).collect(), (n1..n1 + m2.len()).collect()))
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn export_dot(m: &PointedKripkeModel) -> String {
    let model = &m.model;
    let mut out = String::from("digraph kripke {\n");
    for s in 0..model.len() {
        let name = model.state_name(s);
        let atoms: Vec<&str> = model.atoms_at(s).iter().map(String::as_str).collect();
        let label = if atoms.is_empty() { name.to_string() } else { format!("{name}: {}", atoms.join(", ")) };
        let shape = if m.points.contains(&s) { "doublecircle" } else { "circle" };
        out.push_str(&format!("  \"{}\" [label=\"{}\", shape={shape}];\n", dot_escape(name), dot_escape(&label)));
    }
    for (a, agent) in model.agents().iter().enumerate() {
        for s in 0..model.len() {
            for &t in model.succ(a, s) {
                out.push_str(&format!(
                    "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
                    dot_escape(model.state_name(s)),
                    dot_escape(model.state_name(t)),
                    dot_escape(agent)
                ));
            }
        }
    }
    out.push_str("}\n");
    out
}
