//! Finite-level computations around the Bernstein center of mod-p group
//! algebras.
//!
//! Every statement is checked at a finite truncation level with exact
//! arithmetic over `F_p` (or a finite abelian group algebra over `F_p`):
//!
//! * [`coeff`]: prime fields, abelian group algebras, sparse linear algebra.
//! * [`gsets`]: finite groups, finite group actions, partitions.
//! * [`permmod`]: permutation modules, orbit sums, centers of group algebras.
//! * [`towers`]: inverse systems of finite actions and their invariants.
//! * [`twisted`]: twisted conjugation actions on towers of p-groups.
//! * [`mackey`]: double cosets and the endomorphism dimension bookkeeping.
//! * [`zhat`]: truncated completed group rings of abelian groups.
//! * [`experiments`]: report-producing runners shared with the CLI.

pub mod caps;
pub mod coeff;
pub mod error;
pub mod experiments;
pub mod gsets;
pub mod mackey;
pub mod permmod;
pub mod report;
pub mod towers;
pub mod twisted;
pub mod zhat;

pub use caps::Caps;
pub use error::{Error, Result};
