//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::action::{self, execute, PointedActionModel};
use crate::bisim;
use crate::check::Checker;
use crate::correspond::{correspond, correspond_multi};
use crate::error::{Error, Result};
use crate::kripke::{export_dot, frame_class_holds, FrameClass, PointedKripkeModel};
use crate::normform::{explicit_disjunction, to_adnf, to_dnf, to_explicit, ExplicitBudget};
use crate::prover::{Prover, DEFAULT_BUDGET};
use crate::reduce::Reducer;
use crate::synth::{synthesize, verify_synthesis};
use crate::syntax::{parse_action, parse_formula, print_action, print_formula, AgentSet, F};
use crate::tau::tau;

#[derive(Parser, Debug)]
#[command(name = "actform", version, about = "Action formulae for multi-agent epistemic logic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a formula or action and print it in canonical form.
    Parse {
        #[command(flatten)]
        text: Text,
        #[arg(long)]
        action: Option<String>,
    },
    /// Evaluate a formula on a model.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        text: Text,
        /// Designated states; defaults to those in the model file.
        #[arg(long = "point")]
        points: Vec<String>,
        /// Evaluate the reduced formula instead of executing actions.
        #[arg(long)]
        via_reduction: bool,
    },
    /// Rewrite a formula into basic modal logic.
    Reduce {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        text: Text,
    },
    /// Translate an action formula into an action model.
    Tau {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        action: String,
        #[arg(long, value_delimiter = ',')]
        agents: Option<Vec<String>>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Execute an action on a model.
    Exec {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, conflicts_with = "action_model", required_unless_present = "action_model")]
        action: Option<String>,
        #[arg(long)]
        action_model: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Compare two models, or two action models, for bisimilarity.
    Bisim {
        #[arg(long, value_enum)]
        class: Option<Class>,
        /// Two Kripke model files.
        #[arg(long = "model", num_args = 1)]
        models: Vec<PathBuf>,
        /// Two action model files.
        #[arg(long = "action-model", num_args = 1)]
        action_models: Vec<PathBuf>,
        /// Bounded bisimilarity of this depth.
        #[arg(short = 'n', long = "n")]
        depth: Option<usize>,
        /// Group bisimilarity for these comma-separated agents.
        #[arg(long, value_delimiter = ',')]
        agents_b: Option<Vec<String>>,
    },
    /// Decide validity of a formula; non-basic input is reduced first.
    Valid {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        text: Text,
    },
    /// Disjunctive normal form.
    Dnf {
        #[command(flatten)]
        text: Text,
    },
    /// Alternating disjunctive normal form.
    Adnf {
        #[command(flatten)]
        text: Text,
    },
    /// Disjunction of explicit formulae.
    Explicit {
        #[command(flatten)]
        text: Text,
        /// Cap on enumerated disjuncts.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Action formula that agrees with an action model up to a depth.
    Correspond {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        action_model: PathBuf,
        #[arg(long = "point")]
        points: Vec<String>,
        #[arg(long)]
        depth: usize,
    },
    /// Synthesize an action achieving a goal.
    Synth {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        goal: String,
        #[arg(long, value_delimiter = ',')]
        agents: Option<Vec<String>>,
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, value_enum)]
    class: Class,
    /// Work budget for reduction and proof search.
    #[arg(long)]
    budget: Option<usize>,
    /// Write output to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Text {
    #[arg(long, conflicts_with = "formula_file")]
    formula: Option<String>,
    #[arg(long)]
    formula_file: Option<PathBuf>,
    /// Comma-separated agent names; inferred from the input when absent.
    #[arg(long, value_delimiter = ',')]
    agents: Option<Vec<String>>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Class {
    K,
    K45,
    S5,
}

impl From<Class> for FrameClass {
    fn from(c: Class) -> Self {
        match c {
            Class::K => FrameClass::K,
            Class::K45 => FrameClass::K45,
            Class::S5 => FrameClass::S5,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Dot,
}

/// Runs the tool on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let out = match &cli.command {
        Command::Check { common, .. }
        | Command::Reduce { common, .. }
        | Command::Tau { common, .. }
        | Command::Exec { common, .. }
        | Command::Valid { common, .. }
        | Command::Correspond { common, .. }
        | Command::Synth { common, .. } => common.out.clone(),
        _ => None,
    };
    match dispatch(cli.command).and_then(|text| emit(&text, out.as_deref())) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotConverted(_) => 3,
        Error::ResourceExhausted => 4,
        _ => 2,
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<PointedKripkeModel> {
    PointedKripkeModel::from_json(&read(path)?)
}

fn load_action_model(path: &Path) -> Result<PointedActionModel> {
    PointedActionModel::from_json(&read(path)?)
}

/// Agent names mentioned in modal brackets, learning groups and covers.
pub fn infer_agents(text: &str) -> AgentSet {
    let chars: Vec<char> = text.chars().collect();
    let ident = |i: usize| {
        let mut j = i;
        while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
            j += 1;
        }
        (chars[i..j].iter().collect::<String>(), j)
    };
    let mut out = AgentSet::new();
    for i in 0..chars.len() {
        if chars[i] == '[' || chars[i] == '<' {
            let (name, j) = ident(i + 1);
            let close = if chars[i] == '[' { ']' } else { '>' };
            if !name.is_empty() && chars.get(j) == Some(&close) {
                out.insert(name);
            }
        }
        if chars[i] == '{' {
            let mut j = i + 1;
            loop {
                while chars.get(j) == Some(&' ') {
                    j += 1;
                }
                let (name, k) = ident(j);
                if name.is_empty() {
                    break;
                }
                out.insert(name);
                j = k;
                while chars.get(j) == Some(&' ') {
                    j += 1;
                }
                if chars.get(j) != Some(&',') {
                    break;
                }
                j += 1;
            }
        }
    }
    out
}

fn resolve_agents(explicit: &Option<Vec<String>>, from_file: Option<AgentSet>, texts: &[&str]) -> AgentSet {
    if let Some(list) = explicit {
        return list.iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    }
    if let Some(set) = from_file {
        return set;
    }
    let mut set: AgentSet = texts.iter().flat_map(|t| infer_agents(t)).collect();
    if set.is_empty() {
        set.insert("a".to_string());
    }
    set
}

impl Text {
    fn source(&self) -> Result<String> {
        match (&self.formula, &self.formula_file) {
            (Some(t), _) => Ok(t.clone()),
            (None, Some(p)) => read(p),
            (None, None) => Err(Error::Input("one of --formula or --formula-file is required".into())),
        }
    }

    fn formula(&self, file_agents: Option<AgentSet>) -> Result<(F, AgentSet)> {
        let text = self.source()?;
        let agents = resolve_agents(&self.agents, file_agents, &[&text]);
        Ok((parse_formula(&text, &agents)?, agents))
    }
}

fn reducer(common: &Common, agents: &AgentSet) -> Reducer {
    let c = common.class.into();
    match common.budget {
        Some(b) => Reducer::with_budget(c, agents.clone(), b),
        None => Reducer::new(c, agents.clone()),
    }
}

fn select_points(m: &PointedKripkeModel, names: &[String]) -> Result<PointedKripkeModel> {
    if names.is_empty() {
        return Ok(m.clone());
    }
    let points = names
        .iter()
        .map(|n| m.model.state_index(n).ok_or_else(|| Error::Input(format!("unknown state '{n}'"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(m.with_points(points))
}

fn model_output(m: &PointedKripkeModel, format: Format) -> String {
    match format {
        Format::Json => m.to_json(),
        Format::Dot => export_dot(m),
    }
}

fn dispatch(cmd: Command) -> Result<String> {
    match cmd {
        Command::Parse { text, action } => match action {
            Some(a) => {
                let agents = resolve_agents(&text.agents, None, &[&a]);
                Ok(print_action(&*parse_action(&a, &agents)?))
            }
            None => Ok(print_formula(&text.formula(None)?.0)),
        },
        Command::Check { common, model, text, points, via_reduction } => {
            let m = select_points(&load_model(&model)?, &points)?;
            let c: FrameClass = common.class.into();
            let (f, _) = text.formula(Some(m.model.agent_set()))?;
            let agents = m.model.agent_set();
            let value = if via_reduction {
                if !frame_class_holds(&m.model, c) {
                    return Err(Error::ClassViolation(c.to_string()));
                }
                let r = reducer(&common, &agents).reduce(&f)?;
                crate::check::eval_basic(&m, &r)?
            } else {
                let mut checker = match common.budget {
                    Some(b) => Checker::with_budget(c, agents, b),
                    None => Checker::new(c, agents),
                };
                checker.check(&m, &f)?
            };
            Ok(value.to_string())
        }
        Command::Reduce { common, text } => {
            let (f, agents) = text.formula(None)?;
            Ok(print_formula(&*reducer(&common, &agents).reduce(&f)?))
        }
        Command::Tau { common, action, agents, format } => {
            let agents = resolve_agents(&agents, None, &[&action]);
            let am = tau(&*parse_action(&action, &agents)?, common.class.into(), &agents)?;
            Ok(match format {
                Format::Json => am.to_json(),
                Format::Dot => action::export_dot(&am),
            })
        }
        Command::Exec { common, model, action, action_model, format } => {
            let m = load_model(&model)?;
            let c: FrameClass = common.class.into();
            if !frame_class_holds(&m.model, c) {
                return Err(Error::ClassViolation(c.to_string()));
            }
            let agents = m.model.agent_set();
            let am = match (action, action_model) {
                (Some(text), _) => tau(&*parse_action(&text, &agents)?, c, &agents)?,
                (None, Some(path)) => load_action_model(&path)?,
                (None, None) => return Err(Error::Input("one of --action or --action-model is required".into())),
            };
            if am.model.agent_set() != agents {
                return Err(Error::AgentMismatch);
            }
            let mut checker = match common.budget {
                Some(b) => Checker::with_budget(c, agents, b),
                None => Checker::new(c, agents),
            };
            let result = execute(&m, &am, &mut |km, f| checker.values(km, f))?;
            Ok(model_output(&result, format))
        }
        Command::Bisim { class, models, action_models, depth, agents_b } => {
            if !action_models.is_empty() {
                let [a, b] = action_models.as_slice() else {
                    return Err(Error::Input("bisim needs exactly two --action-model files".into()));
                };
                let c: FrameClass = class.ok_or_else(|| Error::Input("--class is required for action models".into()))?.into();
                let (a, b) = (load_action_model(a)?, load_action_model(b)?);
                let v = match depth {
                    Some(n) => bisim::am_n_bisimilar(&a, &b, n, c)?,
                    None => bisim::am_bisimilar(&a, &b, c)?,
                };
                return Ok(v.to_string());
            }
            let [a, b] = models.as_slice() else {
                return Err(Error::Input("bisim needs exactly two --model files".into()));
            };
            let (a, b) = (load_model(a)?, load_model(b)?);
            let v = match (depth, agents_b) {
                (Some(n), _) => bisim::n_bisimilar(&a, &b, n)?,
                (None, Some(group)) => bisim::b_bisimilar(&a, &b, &group.into_iter().collect())?,
                (None, None) => bisim::bisimilar(&a, &b)?,
            };
            Ok(v.to_string())
        }
        Command::Valid { common, text } => {
            let (f, agents) = text.formula(None)?;
            let basic = if f.is_basic() { f } else { reducer(&common, &agents).reduce(&f)? };
            let mut prover = Prover::with_budget(common.class.into(), common.budget.unwrap_or(DEFAULT_BUDGET));
            Ok(prover.valid(&basic)?.to_string())
        }
        Command::Dnf { text } => Ok(print_formula(&to_dnf(&text.formula(None)?.0)?.to_formula())),
        Command::Adnf { text } => Ok(print_formula(&to_adnf(&text.formula(None)?.0)?.to_formula())),
        Command::Explicit { text, budget } => {
            let (f, _) = text.formula(None)?;
            let mut b = ExplicitBudget::default();
            if let Some(n) = budget {
                b.max_disjuncts = n;
            }
            Ok(print_formula(&explicit_disjunction(&to_explicit(&f, b)?)))
        }
        Command::Correspond { common, action_model, points, depth } => {
            let am = load_action_model(&action_model)?;
            let c = common.class.into();
            let alpha = match points.as_slice() {
                [] => correspond_multi(&am, depth, c)?,
                [one] => {
                    let t = am.model.point_index(one).ok_or_else(|| Error::Input(format!("unknown action point '{one}'")))?;
                    correspond(&am.at(t), depth, c)?
                }
                many => {
                    let ts = many
                        .iter()
                        .map(|p| am.model.point_index(p).ok_or_else(|| Error::Input(format!("unknown action point '{p}'"))))
                        .collect::<Result<Vec<_>>>()?;
                    correspond_multi(&PointedActionModel::new(am.model.clone(), ts)?, depth, c)?
                }
            };
            Ok(print_action(&alpha))
        }
        Command::Synth { common, goal, agents, verify, trials, seed } => {
            let agents = resolve_agents(&agents, None, &[&goal]);
            let g = parse_formula(&goal, &agents)?;
            let c = common.class.into();
            let alpha = synthesize(&g, c, &agents)?;
            if !verify {
                return Ok(print_action(&alpha));
            }
            let report = verify_synthesis(&g, &alpha, c, &agents, trials, seed)?;
            let mut text = report.summary(&alpha);
            for cx in &report.counterexamples {
                text.push_str(&format!("\n{}: {}", cx.contract, cx.model));
            }
            Ok(text)
        }
    }
}
