//! Bisimulation, bounded bisimulation, group bisimulation and refinement checks.

use std::collections::{BTreeSet, HashMap};

use crate::action::PointedActionModel;
use crate::error::{Error, Result};
use crate::kripke::{disjoint_union, FrameClass, KripkeModel, PointedKripkeModel, Relations};
use crate::prover::Prover;
use crate::syntax::{print_formula, AgentSet, F};

/// Signature refinement starting from `colors`. With `rounds = None` this
/// runs to the coarsest stable partition; otherwise it stops after that many
/// rounds, which yields the bounded relation of the same depth.
fn refine(mut colors: Vec<usize>, rel: &Relations, rounds: Option<usize>) -> Vec<usize> {
    let mut classes = colors.iter().collect::<BTreeSet<_>>().len();
    let mut done = 0;
    while rounds.map_or(true, |r| done < r) {
        let mut ids: HashMap<(usize, Vec<BTreeSet<usize>>), usize> = HashMap::new();
        let next: Vec<usize> = (0..colors.len())
            .map(|s| {
                let sig = (colors[s], rel.iter().map(|r| r[s].iter().map(|&t| colors[t]).collect()).collect());
                let fresh = ids.len();
                *ids.entry(sig).or_insert(fresh)
            })
            .collect();
        done += 1;
        let stable = ids.len() == classes;
        classes = ids.len();
        colors = next;
        if stable && rounds.is_none() {
            break;
        }
    }
    colors
}

fn single_point(m: &PointedKripkeModel) -> Result<usize> {
    match m.points.as_slice() {
        [s] => Ok(*s),
        _ => Err(Error::Input("a single designated state is required".into())),
    }
}

fn valuation_colors(m: &KripkeModel) -> Vec<usize> {
    let mut ids: HashMap<&BTreeSet<String>, usize> = HashMap::new();
    (0..m.len())
        .map(|s| {
            let fresh = ids.len();
            *ids.entry(m.atoms_at(s)).or_insert(fresh)
        })
        .collect()
}

/// Colours of the union of both models after refinement, with the two points.
fn union_colors(m1: &PointedKripkeModel, m2: &PointedKripkeModel, rounds: Option<usize>) -> Result<(Vec<usize>, usize, usize)> {
    let (s1, s2) = (single_point(m1)?, single_point(m2)?);
    let (u, left, right) = disjoint_union(&m1.model, &m2.model)?;
    let colors = refine(valuation_colors(&u), u.relations(), rounds);
    Ok((colors, left[s1], right[s2]))
}

pub fn bisimilar(m1: &PointedKripkeModel, m2: &PointedKripkeModel) -> Result<bool> {
    let (c, s, t) = union_colors(m1, m2, None)?;
    Ok(c[s] == c[t])
}

pub fn n_bisimilar(m1: &PointedKripkeModel, m2: &PointedKripkeModel, n: usize) -> Result<bool> {
    let (c, s, t) = union_colors(m1, m2, Some(n))?;
    Ok(c[s] == c[t])
}

/// Atoms at the points, and back and forth for the agents in `group` with
/// full bisimilarity of the matched successors.
pub fn b_bisimilar(m1: &PointedKripkeModel, m2: &PointedKripkeModel, group: &AgentSet) -> Result<bool> {
    let (s1, s2) = (single_point(m1)?, single_point(m2)?);
    let (u, left, right) = disjoint_union(&m1.model, &m2.model)?;
    let (s, t) = (left[s1], right[s2]);
    if u.atoms_at(s) != u.atoms_at(t) {
        return Ok(false);
    }
    let colors = refine(valuation_colors(&u), u.relations(), None);
    for b in group {
        let ag = u.agent_index(b).ok_or(Error::AgentMismatch)?;
        let from_s: BTreeSet<usize> = u.succ(ag, s).iter().map(|&x| colors[x]).collect();
        let from_t: BTreeSet<usize> = u.succ(ag, t).iter().map(|&x| colors[x]).collect();
        if from_s != from_t {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `m1` is a refinement of `m2`: some relation containing the two
/// points satisfies atoms and forth from `m1` into `m2`.
pub fn refines(m1: &PointedKripkeModel, m2: &PointedKripkeModel) -> Result<bool> {
    let (a, b) = (&m1.model, &m2.model);
    if a.agents() != b.agents() {
        return Err(Error::AgentMismatch);
    }
    let (s1, s2) = (single_point(m1)?, single_point(m2)?);
    let mut rel: Vec<Vec<bool>> =
        (0..a.len()).map(|s| (0..b.len()).map(|t| a.atoms_at(s) == b.atoms_at(t)).collect()).collect();
    loop {
        let mut changed = false;
        for s in 0..a.len() {
            for t in 0..b.len() {
                if !rel[s][t] {
                    continue;
                }
                let forth = (0..a.agents().len())
                    .all(|ag| a.succ(ag, s).iter().all(|&x| b.succ(ag, t).iter().any(|&y| rel[x][y])));
                if !forth {
                    rel[s][t] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(rel[s1][s2]);
        }
    }
}

/// Groups preconditions of both models into provable-equivalence classes.
/// Also reports which preconditions are unsatisfiable.
fn precondition_colors(pre: &[F], c: FrameClass) -> Result<(Vec<usize>, Vec<bool>)> {
    if let Some(f) = pre.iter().find(|f| !f.is_basic()) {
        return Err(Error::NotBasic(print_formula(f)));
    }
    let mut prover = Prover::new(c);
    let mut reps: Vec<&F> = Vec::new();
    let mut out = Vec::with_capacity(pre.len());
    let mut dead = Vec::with_capacity(pre.len());
    for f in pre {
        dead.push(!prover.satisfiable(f)?);
        let mut found = None;
        for (i, r) in reps.iter().enumerate() {
            if *r == f || prover.equiv(r, f)? {
                found = Some(i);
                break;
            }
        }
        out.push(found.unwrap_or_else(|| {
            reps.push(f);
            reps.len() - 1
        }));
    }
    Ok((out, dead))
}

fn am_union_colors(
    a1: &PointedActionModel,
    a2: &PointedActionModel,
    c: FrameClass,
    rounds: Option<usize>,
) -> Result<(Vec<usize>, usize, usize)> {
    let (m1, m2) = (&a1.model, &a2.model);
    if m1.agents != m2.agents {
        return Err(Error::AgentMismatch);
    }
    let (s1, s2) = match (a1.points.as_slice(), a2.points.as_slice()) {
        ([s], [t]) => (*s, *t),
        _ => return Err(Error::Input("a single designated action point is required".into())),
    };
    let n1 = m1.len();
    let pre: Vec<F> = m1.pre.iter().chain(&m2.pre).cloned().collect();
    let (colors, dead) = precondition_colors(&pre, c)?;
    // Points that can never execute are dropped as successors.
    let rel: Relations = (0..m1.agents.len())
        .map(|ag| {
            m1.rel[ag]
                .iter()
                .cloned()
                .chain(m2.rel[ag].iter().map(|succ| succ.iter().map(|t| t + n1).collect()))
                .map(|succ: Vec<usize>| succ.into_iter().filter(|&t| !dead[t]).collect())
                .collect()
        })
        .collect();
    let colors = refine(colors, &rel, rounds);
    Ok((colors, s1, s2 + n1))
}

pub fn am_bisimilar(a1: &PointedActionModel, a2: &PointedActionModel, c: FrameClass) -> Result<bool> {
    let (col, s, t) = am_union_colors(a1, a2, c, None)?;
    Ok(col[s] == col[t])
}

pub fn am_n_bisimilar(a1: &PointedActionModel, a2: &PointedActionModel, n: usize, c: FrameClass) -> Result<bool> {
    let (col, s, t) = am_union_colors(a1, a2, c, Some(n))?;
    Ok(col[s] == col[t])
}
