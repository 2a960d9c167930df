//! Formula and action-formula syntax trees, the surface grammar, and
//! structural measures.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type AgentSet = BTreeSet<String>;
pub type F = Arc<Formula>;
pub type Act = Arc<Action>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Bottom,
    Atom(String),
    Not(F),
    And(F, F),
    Or(F, F),
    Implies(F, F),
    Iff(F, F),
    Box(String, F),
    Diamond(String, F),
    Cover(String, BTreeSet<F>),
    DynBox(Act, F),
    DynDiamond(Act, F),
    RefBox(F),
    RefDiamond(F),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Test(F),
    Choice(Act, Act),
    Compose(Act, Act),
    Learn(AgentSet, Act, Act),
}

impl Formula {
    pub fn top() -> F {
        Arc::new(Formula::Top)
    }
    pub fn bot() -> F {
        Arc::new(Formula::Bottom)
    }
    pub fn atom(p: &str) -> F {
        Arc::new(Formula::Atom(p.to_string()))
    }
    pub fn not(f: F) -> F {
        Arc::new(Formula::Not(f))
    }
    pub fn and(a: F, b: F) -> F {
        Arc::new(Formula::And(a, b))
    }
    pub fn or(a: F, b: F) -> F {
        Arc::new(Formula::Or(a, b))
    }
    pub fn implies(a: F, b: F) -> F {
        Arc::new(Formula::Implies(a, b))
    }
    pub fn iff(a: F, b: F) -> F {
        Arc::new(Formula::Iff(a, b))
    }
    pub fn boxed(a: &str, f: F) -> F {
        Arc::new(Formula::Box(a.to_string(), f))
    }
    pub fn diamond(a: &str, f: F) -> F {
        Arc::new(Formula::Diamond(a.to_string(), f))
    }
    pub fn cover(a: &str, gamma: impl IntoIterator<Item = F>) -> F {
        Arc::new(Formula::Cover(a.to_string(), gamma.into_iter().collect()))
    }
    pub fn dyn_box(alpha: Act, f: F) -> F {
        Arc::new(Formula::DynBox(alpha, f))
    }
    pub fn dyn_diamond(alpha: Act, f: F) -> F {
        Arc::new(Formula::DynDiamond(alpha, f))
    }
    pub fn ref_box(f: F) -> F {
        Arc::new(Formula::RefBox(f))
    }
    pub fn ref_diamond(f: F) -> F {
        Arc::new(Formula::RefDiamond(f))
    }

    /// Left-nested conjunction; `Top` when empty.
    pub fn conj(items: impl IntoIterator<Item = F>) -> F {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::top(),
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// Left-nested disjunction; `Bottom` when empty.
    pub fn disj(items: impl IntoIterator<Item = F>) -> F {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::bot(),
            Some(first) => it.fold(first, Formula::or),
        }
    }

    pub fn is_basic(&self) -> bool {
        match self {
            Formula::Top | Formula::Bottom | Formula::Atom(_) => true,
            Formula::Not(f) | Formula::Box(_, f) | Formula::Diamond(_, f) => f.is_basic(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.is_basic() && b.is_basic()
            }
            Formula::Cover(_, g) => g.iter().all(|f| f.is_basic()),
            Formula::DynBox(..) | Formula::DynDiamond(..) | Formula::RefBox(_) | Formula::RefDiamond(_) => {
                false
            }
        }
    }

    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::Top | Formula::Bottom | Formula::Atom(_) => true,
            Formula::Not(f) => f.is_propositional(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.is_propositional() && b.is_propositional()
            }
            _ => false,
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        collect_atoms(self, &mut out);
        out
    }

    pub fn agents(&self) -> AgentSet {
        let mut out = BTreeSet::new();
        collect_agents(self, &mut out);
        out
    }
}

impl Action {
    pub fn test(f: F) -> Act {
        Arc::new(Action::Test(f))
    }
    pub fn choice(a: Act, b: Act) -> Act {
        Arc::new(Action::Choice(a, b))
    }
    pub fn compose(a: Act, b: Act) -> Act {
        Arc::new(Action::Compose(a, b))
    }
    pub fn learn(agents: AgentSet, a: Act, b: Act) -> Act {
        Arc::new(Action::Learn(agents, a, b))
    }
    pub fn learn1(agent: &str, a: Act) -> Act {
        Arc::new(Action::Learn([agent.to_string()].into(), a.clone(), a))
    }

    /// Left-nested choice over a non-empty list.
    pub fn choice_all(items: impl IntoIterator<Item = Act>) -> Option<Act> {
        let mut it = items.into_iter();
        let first = it.next()?;
        Some(it.fold(first, Action::choice))
    }

    /// Left-nested composition over a non-empty list.
    pub fn compose_all(items: impl IntoIterator<Item = Act>) -> Option<Act> {
        let mut it = items.into_iter();
        let first = it.next()?;
        Some(it.fold(first, Action::compose))
    }
}

fn collect_atoms(f: &Formula, out: &mut BTreeSet<String>) {
    match f {
        Formula::Top | Formula::Bottom => {}
        Formula::Atom(p) => {
            out.insert(p.clone());
        }
        Formula::Not(g) | Formula::Box(_, g) | Formula::Diamond(_, g) | Formula::RefBox(g) | Formula::RefDiamond(g) => {
            collect_atoms(g, out)
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            collect_atoms(a, out);
            collect_atoms(b, out);
        }
        Formula::Cover(_, g) => g.iter().for_each(|h| collect_atoms(h, out)),
        Formula::DynBox(act, g) | Formula::DynDiamond(act, g) => {
            collect_action_atoms(act, out);
            collect_atoms(g, out);
        }
    }
}

fn collect_action_atoms(a: &Action, out: &mut BTreeSet<String>) {
    match a {
        Action::Test(f) => collect_atoms(f, out),
        Action::Choice(x, y) | Action::Compose(x, y) | Action::Learn(_, x, y) => {
            collect_action_atoms(x, out);
            collect_action_atoms(y, out);
        }
    }
}

fn collect_agents(f: &Formula, out: &mut AgentSet) {
    match f {
        Formula::Top | Formula::Bottom | Formula::Atom(_) => {}
        Formula::Not(g) | Formula::RefBox(g) | Formula::RefDiamond(g) => collect_agents(g, out),
        Formula::Box(a, g) | Formula::Diamond(a, g) => {
            out.insert(a.clone());
            collect_agents(g, out);
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            collect_agents(a, out);
            collect_agents(b, out);
        }
        Formula::Cover(a, g) => {
            out.insert(a.clone());
            g.iter().for_each(|h| collect_agents(h, out));
        }
        Formula::DynBox(act, g) | Formula::DynDiamond(act, g) => {
            collect_action_agents(act, out);
            collect_agents(g, out);
        }
    }
}

fn collect_action_agents(a: &Action, out: &mut AgentSet) {
    match a {
        Action::Test(f) => collect_agents(f, out),
        Action::Choice(x, y) | Action::Compose(x, y) => {
            collect_action_agents(x, out);
            collect_action_agents(y, out);
        }
        Action::Learn(b, x, y) => {
            out.extend(b.iter().cloned());
            collect_action_agents(x, out);
            collect_action_agents(y, out);
        }
    }
}

/// Builders that fold `Top`/`Bottom` constants and nothing else.
pub mod fold {
    use super::{Formula, F};

    pub fn not(f: F) -> F {
        match &*f {
            Formula::Top => Formula::bot(),
            Formula::Bottom => Formula::top(),
            _ => Formula::not(f),
        }
    }

    pub fn and(a: F, b: F) -> F {
        match (&*a, &*b) {
            (Formula::Bottom, _) | (_, Formula::Bottom) => Formula::bot(),
            (Formula::Top, _) => b,
            (_, Formula::Top) => a,
            _ => Formula::and(a, b),
        }
    }

    pub fn or(a: F, b: F) -> F {
        match (&*a, &*b) {
            (Formula::Top, _) | (_, Formula::Top) => Formula::top(),
            (Formula::Bottom, _) => b,
            (_, Formula::Bottom) => a,
            _ => Formula::or(a, b),
        }
    }

    pub fn implies(a: F, b: F) -> F {
        match (&*a, &*b) {
            (Formula::Bottom, _) | (_, Formula::Top) => Formula::top(),
            (Formula::Top, _) => b,
            (_, Formula::Bottom) => not(a),
            _ => Formula::implies(a, b),
        }
    }

    pub fn iff(a: F, b: F) -> F {
        match (&*a, &*b) {
            (Formula::Top, _) => b,
            (_, Formula::Top) => a,
            (Formula::Bottom, _) => not(b),
            (_, Formula::Bottom) => not(a),
            _ => Formula::iff(a, b),
        }
    }

    pub fn boxed(agent: &str, f: F) -> F {
        match &*f {
            Formula::Top => f,
            _ => Formula::boxed(agent, f),
        }
    }

    pub fn diamond(agent: &str, f: F) -> F {
        match &*f {
            Formula::Bottom => f,
            _ => Formula::diamond(agent, f),
        }
    }

    pub fn conj(items: impl IntoIterator<Item = F>) -> F {
        let mut acc = Formula::top();
        for f in items {
            acc = and(acc, f);
            if matches!(*acc, Formula::Bottom) {
                break;
            }
        }
        acc
    }

    pub fn disj(items: impl IntoIterator<Item = F>) -> F {
        let mut acc = Formula::bot();
        for f in items {
            acc = or(acc, f);
            if matches!(*acc, Formula::Top) {
                break;
            }
        }
        acc
    }
}

pub fn modal_depth(f: &Formula) -> Result<usize> {
    Ok(match f {
        Formula::Top | Formula::Bottom | Formula::Atom(_) => 0,
        Formula::Not(g) => modal_depth(g)?,
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            modal_depth(a)?.max(modal_depth(b)?)
        }
        Formula::Box(_, g) | Formula::Diamond(_, g) => 1 + modal_depth(g)?,
        Formula::Cover(_, gs) => {
            let mut d = 0;
            for g in gs {
                d = d.max(modal_depth(g)?);
            }
            1 + d
        }
        _ => return Err(Error::NotBasic(print_formula(f))),
    })
}

/// `□_a ⋁Γ ∧ ⋀_{γ∈Γ} ◇_a γ`; an empty Γ gives `□_a ⊥`.
pub fn expand_cover(agent: &str, gamma: &BTreeSet<F>) -> F {
    let boxed = Formula::boxed(agent, Formula::disj(gamma.iter().cloned()));
    gamma
        .iter()
        .fold(boxed, |acc, g| Formula::and(acc, Formula::diamond(agent, g.clone())))
}

pub fn is_b_restricted(f: &Formula, b: &AgentSet) -> bool {
    match f {
        Formula::Top | Formula::Bottom | Formula::Atom(_) => true,
        Formula::Not(g) => is_b_restricted(g, b),
        Formula::And(x, y) | Formula::Or(x, y) | Formula::Implies(x, y) | Formula::Iff(x, y) => {
            is_b_restricted(x, b) && is_b_restricted(y, b)
        }
        Formula::Box(a, g) | Formula::Diamond(a, g) => b.contains(a) && g.is_basic(),
        Formula::Cover(a, gs) => b.contains(a) && gs.iter().all(|g| g.is_basic()),
        _ => false,
    }
}

pub fn subformulae(f: &F) -> BTreeSet<F> {
    let mut out = BTreeSet::new();
    collect_sub(f, &mut out);
    out
}

fn collect_sub(f: &F, out: &mut BTreeSet<F>) {
    if !out.insert(f.clone()) {
        return;
    }
    match &**f {
        Formula::Top | Formula::Bottom | Formula::Atom(_) => {}
        Formula::Not(g) | Formula::Box(_, g) | Formula::Diamond(_, g) | Formula::RefBox(g) | Formula::RefDiamond(g) => {
            collect_sub(g, out)
        }
        Formula::DynBox(_, g) | Formula::DynDiamond(_, g) => collect_sub(g, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            collect_sub(a, out);
            collect_sub(b, out);
        }
        Formula::Cover(_, gs) => gs.iter().for_each(|g| collect_sub(g, out)),
    }
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Tilde,
    Amp,
    Bar,
    Arrow,
    DArrow,
    LBrack,
    RBrack,
    Lt,
    Gt,
    BoxStar,
    DiaStar,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Quest,
    Semi,
    Plus,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "'{s}'"),
            Tok::Tilde => "'~'",
            Tok::Amp => "'&'",
            Tok::Bar => "'|'",
            Tok::Arrow => "'->'",
            Tok::DArrow => "'<->'",
            Tok::LBrack => "'['",
            Tok::RBrack => "']'",
            Tok::Lt => "'<'",
            Tok::Gt => "'>'",
            Tok::BoxStar => "'[*]'",
            Tok::DiaStar => "'<*>'",
            Tok::LParen => "'('",
            Tok::RParen => "')'",
            Tok::LBrace => "'{'",
            Tok::RBrace => "'}'",
            Tok::Comma => "','",
            Tok::Quest => "'?'",
            Tok::Semi => "';'",
            Tok::Plus => "'+'",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let at = |i: usize| chars.get(i).copied();
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let (tok, len) = if c.is_ascii_alphanumeric() || c == '_' {
            let start = i;
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_' || chars[j] == '\'') {
                j += 1;
            }
            (Tok::Ident(chars[start..j].iter().collect()), j - start)
        } else {
            match c {
                '~' => (Tok::Tilde, 1),
                '&' => (Tok::Amp, 1),
                '|' => (Tok::Bar, 1),
                '-' if at(i + 1) == Some('>') => (Tok::Arrow, 2),
                '<' if at(i + 1) == Some('-') && at(i + 2) == Some('>') => (Tok::DArrow, 3),
                '<' if at(i + 1) == Some('*') && at(i + 2) == Some('>') => (Tok::DiaStar, 3),
                '[' if at(i + 1) == Some('*') && at(i + 2) == Some(']') => (Tok::BoxStar, 3),
                '<' => (Tok::Lt, 1),
                '>' => (Tok::Gt, 1),
                '[' => (Tok::LBrack, 1),
                ']' => (Tok::RBrack, 1),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                '{' => (Tok::LBrace, 1),
                '}' => (Tok::RBrace, 1),
                ',' => (Tok::Comma, 1),
                '?' => (Tok::Quest, 1),
                ';' => (Tok::Semi, 1),
                '+' => (Tok::Plus, 1),
                _ => {
                    return Err(Error::Parse { line, col, msg: format!("unexpected character '{c}'") });
                }
            }
        };
        out.push(Spanned { tok, line: l0, col: c0 });
        i += len;
        col += len;
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    agents: &'a AgentSet,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let s = &self.toks[self.pos];
        Err(Error::Parse { line: s.line, col: s.col, msg: msg.into() })
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {want}, found {}", self.peek()))
        }
    }

    fn agent(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(name) if self.agents.contains(&name) => {
                self.bump();
                Ok(name)
            }
            Tok::Ident(name) => self.err(format!("unknown agent '{name}'")),
            other => self.err(format!("expected agent, found {other}")),
        }
    }

    fn formula(&mut self) -> Result<F> {
        let mut left = self.imp()?;
        while *self.peek() == Tok::DArrow {
            self.bump();
            let right = self.imp()?;
            left = Formula::iff(left, right);
        }
        Ok(left)
    }

    fn imp(&mut self) -> Result<F> {
        let left = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let right = self.imp()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<F> {
        let mut left = self.and()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let right = self.and()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<F> {
        let mut left = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<F> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(name) => {
                if name == "Cov" && *self.peek_at(1) == Tok::LBrace {
                    return self.cover();
                }
                self.bump();
                Ok(match name.as_str() {
                    "true" => Formula::top(),
                    "false" => Formula::bot(),
                    _ => Formula::atom(&name),
                })
            }
            Tok::LBrack => self.modality(Tok::RBrack, true),
            Tok::Lt => self.modality(Tok::Gt, false),
            Tok::BoxStar => {
                self.bump();
                Ok(Formula::ref_box(self.unary()?))
            }
            Tok::DiaStar => {
                self.bump();
                Ok(Formula::ref_diamond(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            other => self.err(format!("expected formula, found {other}")),
        }
    }

    fn modality(&mut self, close: Tok, is_box: bool) -> Result<F> {
        self.bump();
        if let (Tok::Ident(name), next) = (self.peek().clone(), self.peek_at(1).clone()) {
            if next == close {
                if !self.agents.contains(&name) {
                    return self.err(format!("'{name}' is neither a declared agent nor an action"));
                }
                self.bump();
                self.bump();
                let body = self.unary()?;
                return Ok(if is_box { Formula::boxed(&name, body) } else { Formula::diamond(&name, body) });
            }
        }
        let act = self.action()?;
        self.expect(close)?;
        let body = self.unary()?;
        Ok(if is_box { Formula::dyn_box(act, body) } else { Formula::dyn_diamond(act, body) })
    }

    fn cover(&mut self) -> Result<F> {
        self.bump();
        self.expect(Tok::LBrace)?;
        let agent = self.agent()?;
        self.expect(Tok::RBrace)?;
        self.expect(Tok::LParen)?;
        let mut gamma = BTreeSet::new();
        if *self.peek() != Tok::RParen {
            gamma.insert(self.formula()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                gamma.insert(self.formula()?);
            }
        }
        self.expect(Tok::RParen)?;
        Ok(Arc::new(Formula::Cover(agent, gamma)))
    }

    fn action(&mut self) -> Result<Act> {
        let mut left = self.seq()?;
        while *self.peek() == Tok::Plus {
            self.bump();
            let right = self.seq()?;
            left = Action::choice(left, right);
        }
        Ok(left)
    }

    fn seq(&mut self) -> Result<Act> {
        let mut left = self.aatom()?;
        while *self.peek() == Tok::Semi {
            self.bump();
            let right = self.aatom()?;
            left = Action::compose(left, right);
        }
        Ok(left)
    }

    fn aatom(&mut self) -> Result<Act> {
        match self.peek().clone() {
            Tok::Quest => {
                self.bump();
                Ok(Action::test(self.unary()?))
            }
            Tok::Ident(name) if name == "L" && *self.peek_at(1) == Tok::LBrace => {
                self.bump();
                self.bump();
                let mut group = AgentSet::new();
                group.insert(self.agent()?);
                while *self.peek() == Tok::Comma {
                    self.bump();
                    group.insert(self.agent()?);
                }
                self.expect(Tok::RBrace)?;
                self.expect(Tok::LParen)?;
                let first = self.action()?;
                let second = if *self.peek() == Tok::Comma {
                    self.bump();
                    self.action()?
                } else {
                    first.clone()
                };
                self.expect(Tok::RParen)?;
                Ok(Action::learn(group, first, second))
            }
            Tok::LParen => {
                self.bump();
                let a = self.action()?;
                self.expect(Tok::RParen)?;
                Ok(a)
            }
            other => self.err(format!("expected action, found {other}")),
        }
    }

    fn finish(&self) -> Result<()> {
        if *self.peek() != Tok::Eof {
            return self.err(format!("unexpected {}", self.peek()));
        }
        Ok(())
    }
}

pub fn parse_formula(text: &str, agents: &AgentSet) -> Result<F> {
    let mut p = Parser { toks: lex(text)?, pos: 0, agents };
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_action(text: &str, agents: &AgentSet) -> Result<Act> {
    let mut p = Parser { toks: lex(text)?, pos: 0, agents };
    let a = p.action()?;
    p.finish()?;
    Ok(a)
}

// ---------------------------------------------------------------------------
// Printer

const IFF: u8 = 1;
const IMP: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const UNARY: u8 = 5;

pub fn print_formula(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(f, 1, &mut s);
    s
}

pub fn print_action(a: &Action) -> String {
    let mut s = String::new();
    write_action(a, 1, &mut s);
    s
}

fn binary(l: &Formula, r: &Formula, op: &str, own: u8, lp: u8, rp: u8, ctx: u8, out: &mut String) {
    let wrap = ctx > own;
    if wrap {
        out.push('(');
    }
    write_formula(l, lp, out);
    out.push(' ');
    out.push_str(op);
    out.push(' ');
    write_formula(r, rp, out);
    if wrap {
        out.push(')');
    }
}

fn write_formula(f: &Formula, ctx: u8, out: &mut String) {
    match f {
        Formula::Top => out.push_str("true"),
        Formula::Bottom => out.push_str("false"),
        Formula::Atom(p) => out.push_str(p),
        Formula::Not(g) => {
            out.push('~');
            write_formula(g, UNARY, out);
        }
        Formula::And(a, b) => binary(a, b, "&", AND, AND, UNARY, ctx, out),
        Formula::Or(a, b) => binary(a, b, "|", OR, OR, AND, ctx, out),
        Formula::Implies(a, b) => binary(a, b, "->", IMP, OR, IMP, ctx, out),
        Formula::Iff(a, b) => binary(a, b, "<->", IFF, IFF, IMP, ctx, out),
        Formula::Box(a, g) => {
            out.push_str(&format!("[{a}] "));
            write_formula(g, UNARY, out);
        }
        Formula::Diamond(a, g) => {
            out.push_str(&format!("<{a}> "));
            write_formula(g, UNARY, out);
        }
        Formula::Cover(a, gs) => {
            out.push_str(&format!("Cov{{{a}}}("));
            for (i, g) in gs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_formula(g, 1, out);
            }
            out.push(')');
        }
        Formula::DynBox(act, g) => {
            out.push('[');
            write_action(act, 1, out);
            out.push_str("] ");
            write_formula(g, UNARY, out);
        }
        Formula::DynDiamond(act, g) => {
            out.push('<');
            write_action(act, 1, out);
            out.push_str("> ");
            write_formula(g, UNARY, out);
        }
        Formula::RefBox(g) => {
            out.push_str("[*] ");
            write_formula(g, UNARY, out);
        }
        Formula::RefDiamond(g) => {
            out.push_str("<*> ");
            write_formula(g, UNARY, out);
        }
    }
}

fn write_action(a: &Action, ctx: u8, out: &mut String) {
    match a {
        Action::Test(f) => {
            out.push('?');
            write_formula(f, UNARY, out);
        }
        Action::Choice(x, y) => {
            if ctx > 1 {
                out.push('(');
            }
            write_action(x, 1, out);
            out.push_str(" + ");
            write_action(y, 2, out);
            if ctx > 1 {
                out.push(')');
            }
        }
        Action::Compose(x, y) => {
            if ctx > 2 {
                out.push('(');
            }
            write_action(x, 2, out);
            out.push_str(" ; ");
            write_action(y, 3, out);
            if ctx > 2 {
                out.push(')');
            }
        }
        Action::Learn(group, x, y) => {
            let names: Vec<&str> = group.iter().map(String::as_str).collect();
            out.push_str(&format!("L{{{}}}(", names.join(",")));
            write_action(x, 1, out);
            if x != y {
                out.push_str(", ");
                write_action(y, 1, out);
            }
            out.push(')');
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_action(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agents(names: &[&str]) -> AgentSet {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_box_conjunction() {
        let f = parse_formula("p & [a]q", &agents(&["a"])).unwrap();
        assert_eq!(f, Formula::and(Formula::atom("p"), Formula::boxed("a", Formula::atom("q"))));
    }

    #[test]
    fn parses_learning_box() {
        let ag = agents(&["ed", "james", "tim"]);
        let f = parse_formula("[L{ed}(?p)] [ed] p", &ag).unwrap();
        let t = Action::test(Formula::atom("p"));
        let expected = Formula::dyn_box(
            Action::learn(agents(&["ed"]), t.clone(), t),
            Formula::boxed("ed", Formula::atom("p")),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn rejects_unknown_bracket_identifier() {
        let err = parse_formula("[zz] p", &agents(&["a"])).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, col: 2, .. }), "{err:?}");
    }

    #[test]
    fn rejects_unknown_learner() {
        assert!(parse_formula("[L{b}(?p)] p", &agents(&["a"])).is_err());
        assert!(parse_formula("Cov{b}(p)", &agents(&["a"])).is_err());
    }

    #[test]
    fn error_positions_span_lines() {
        let err = parse_formula("p &\n  & q", &agents(&["a"])).unwrap_err();
        assert_eq!(err, Error::Parse { line: 2, col: 3, msg: "expected formula, found '&'".into() });
    }

    #[test]
    fn prints_minimal_parentheses() {
        let ag = agents(&["a"]);
        assert_eq!(print_formula(&Formula::boxed("a", Formula::not(Formula::atom("p")))), "[a] ~p");
        for text in ["p -> q -> r", "(p -> q) -> r", "p & (q | r)", "p <-> q <-> r", "p <-> (q <-> r)", "~(p & q)"] {
            assert_eq!(print_formula(&parse_formula(text, &ag).unwrap()), text);
        }
        let t = Action::test(Formula::atom("p"));
        assert_eq!(print_action(&Action::learn(agents(&["ed"]), t.clone(), t)), "L{ed}(?p)");
    }

    #[test]
    fn action_precedence() {
        let ag = agents(&["a"]);
        let a = parse_action("?p ; ?q + ?r", &ag).unwrap();
        assert!(matches!(&*a, Action::Choice(l, _) if matches!(**l, Action::Compose(..))));
        assert_eq!(print_action(&parse_action("?p ; (?q + ?r)", &ag).unwrap()), "?p ; (?q + ?r)");
        assert_eq!(print_action(&parse_action("L{a}(?p, ?q ; ?r)", &ag).unwrap()), "L{a}(?p, ?q ; ?r)");
    }

    #[test]
    fn depth_and_covers() {
        let ag = agents(&["a", "b"]);
        let f = parse_formula("<a> (p & [b] q)", &ag).unwrap();
        assert_eq!(modal_depth(&f).unwrap(), 2);
        assert_eq!(modal_depth(&Formula::atom("p")).unwrap(), 0);
        assert!(modal_depth(&parse_formula("[?p] q", &ag).unwrap()).is_err());
        let empty = expand_cover("a", &BTreeSet::new());
        assert_eq!(print_formula(&empty), "[a] false");
        let single = expand_cover("a", &[Formula::atom("p")].into());
        assert_eq!(print_formula(&single), "[a] p & <a> p");
        assert_eq!(modal_depth(&Formula::cover("a", [])).unwrap(), 1);
    }

    #[test]
    fn b_restriction() {
        let ag = agents(&["a", "b"]);
        let only_a = agents(&["a"]);
        assert!(is_b_restricted(&parse_formula("[a] p", &ag).unwrap(), &only_a));
        assert!(!is_b_restricted(&parse_formula("[b] p", &ag).unwrap(), &only_a));
        assert!(is_b_restricted(&parse_formula("p & [a] [b] p", &ag).unwrap(), &only_a));
    }

    #[test]
    fn subformula_sets() {
        let ag = agents(&["a"]);
        assert_eq!(subformulae(&Formula::atom("p")).len(), 1);
        assert_eq!(subformulae(&parse_formula("[a] p", &ag).unwrap()).len(), 2);
        assert_eq!(subformulae(&parse_formula("p & q", &ag).unwrap()).len(), 3);
    }

    #[test]
    fn folding_builders() {
        let p = Formula::atom("p");
        assert_eq!(fold::implies(Formula::top(), p.clone()), p);
        assert_eq!(*fold::and(p.clone(), Formula::bot()), Formula::Bottom);
        assert_eq!(*fold::boxed("a", Formula::top()), Formula::Top);
    }
}
