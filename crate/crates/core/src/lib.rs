//! Revealed-preference tests for choices on nonlinear budget sets.
//!
//! The crate decides whether a subject's choices across menus of
//! `(tasks, wage)` contracts can be rationalized by locally non-satiated,
//! quasilinear, and concave utilities, measures how far they are from
//! rationality (Houtman-Maks and efficiency indices), and calibrates cutoffs
//! for those indices against random choosers.

pub mod error;
pub mod indices;
pub mod io;
pub mod mc;
pub mod model;
pub mod rptests;
pub mod sim;

pub use error::{Error, Result};
pub use indices::{ccei, hmi, index_value, CceiResult, CceiVariant, HmiResult, IndexKind};
pub use model::{
    marginal_price, reflect_budget, Budget, ChoiceTable, Contract, Experiment, FrontierKind,
    LinearizedBudget, Money, Slope, SubjectChoices,
};
pub use rptests::{
    build_ql_graph, check, check_clnu, check_cqlu, check_lnu, check_ql, check_ql_lp,
    recover_ql_utility, revealed_relations, ConsistencyResult, QlGraph, RecoveredUtility,
    RevealedRelations, Theory,
};
