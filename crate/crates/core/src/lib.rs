//! Action formulae for dynamic epistemic logic over the frame classes K, K45 and S5.

pub mod action;
pub mod bisim;
pub mod check;
pub mod cli;
pub mod correspond;
pub mod error;
pub mod kripke;
pub mod normform;
pub mod prover;
pub mod reduce;
pub mod synth;
pub mod syntax;
pub mod tau;

pub use error::{Error, Result};
pub use kripke::FrameClass;
