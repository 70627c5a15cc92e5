//! Merging of propositional knowledge bases by model distance and by
//! variable forgetting.
//!
//! The semantics is brute force: every operator is computed by enumerating
//! the interpretations of a small vocabulary, and that enumeration doubles
//! as the oracle the syntactic constructions are checked against.

pub mod forgetting;
pub mod formula;
pub mod merging;
pub mod parser;
pub mod postulates;
pub mod profile_file;
pub mod semantics;

pub use formula::{Formula, Vocabulary};
pub use parser::{parse, ParseError};
pub use forgetting::{dilate, dilate_via_forgetting, forget, switch_models, ForgetSet};
pub use merging::{Diagnostics, ForgettingFamily, MergeError, MergeResult, Operator, Profile};
pub use semantics::{Interpretation, ModelSet};
