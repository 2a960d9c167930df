//! Action formulae that agree with a given action model up to a bounded depth.

use std::collections::HashMap;

use crate::action::{am_frame_class_holds, ActionModel, PointedActionModel};
use crate::error::{Error, Result};
use crate::kripke::FrameClass;
use crate::syntax::{print_formula, Act, Action, Formula};

struct Builder<'a> {
    model: &'a ActionModel,
    class: FrameClass,
    memo: HashMap<(usize, usize), Act>,
}

impl Builder<'_> {
    /// The successors of `t` for every agent, as a choice of depth `n` formulae.
    fn options(&mut self, agent: usize, t: usize, n: usize) -> Option<Act> {
        let succ = self.model.rel[agent][t].clone();
        Action::choice_all(succ.into_iter().map(|u| self.point(u, n)))
    }

    fn point(&mut self, t: usize, n: usize) -> Act {
        if let Some(a) = self.memo.get(&(t, n)) {
            return a.clone();
        }
        let test = Action::test(self.model.pre[t].clone());
        let out = if n == 0 {
            test
        } else {
            match self.class {
                FrameClass::K | FrameClass::K45 => {
                    let mut parts = vec![test];
                    for (i, agent) in self.model.agents.iter().enumerate() {
                        // No successors: learning an action that never executes.
                        let inner = self.options(i, t, n - 1).unwrap_or_else(|| Action::test(Formula::bot()));
                        parts.push(Action::learn1(agent, inner));
                    }
                    Action::compose_all(parts).expect("at least the test")
                }
                FrameClass::S5 => {
                    // Each learning fixes one agent's class of the designated
                    // point and leaves the others as built so far.
                    let mut acc = self.point(t, n - 1);
                    for (i, agent) in self.model.agents.iter().enumerate() {
                        let others = self.options(i, t, n - 1).expect("S5 relations are reflexive");
                        acc = Action::learn([agent.clone()].into(), acc, others);
                    }
                    acc
                }
            }
        };
        self.memo.insert((t, n), out.clone());
        out
    }
}

fn validate(a: &PointedActionModel, c: FrameClass) -> Result<()> {
    if let Some(f) = a.model.pre.iter().find(|f| !f.is_basic()) {
        return Err(Error::NotBasic(print_formula(f)));
    }
    if !am_frame_class_holds(&a.model, c) {
        return Err(Error::ClassViolation(c.to_string()));
    }
    Ok(())
}

/// Action formula whose translation is `n`-bisimilar to `a` at its single point.
pub fn correspond(a: &PointedActionModel, n: usize, c: FrameClass) -> Result<Act> {
    let [t] = a.points.as_slice() else {
        return Err(Error::Input("a single designated action point is required".into()));
    };
    validate(a, c)?;
    Ok(Builder { model: &a.model, class: c, memo: HashMap::new() }.point(*t, n))
}

/// Choice over the formulae of every designated point.
pub fn correspond_multi(a: &PointedActionModel, n: usize, c: FrameClass) -> Result<Act> {
    validate(a, c)?;
    let mut b = Builder { model: &a.model, class: c, memo: HashMap::new() };
    let parts: Vec<Act> = a.points.iter().map(|&t| b.point(t, n)).collect();
    Ok(Action::choice_all(parts).expect("designated points are non-empty"))
}
