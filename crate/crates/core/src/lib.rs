pub mod atom;
pub mod error;
pub mod formula;
pub mod theory;
pub mod expr;
pub mod algebra;
pub mod fixtures;
pub mod structure;
pub mod iso;
pub mod cli;

pub use atom::{Atom, AtomMap};
pub use error::{Error, Result};
pub use formula::{Formula, Rel, Term, Var};
pub use theory::{AtomStructure, Backend, Valuation};
pub use expr::{parse, Comp, Expr, Kind};
pub use iso::{decide_definable_iso, eliminate_parameters, find_t_definable_iso, Certificate, Mode, Verdict};
