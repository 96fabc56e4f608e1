//! Exact computer algebra and numerical verification for Cartan connections
//! modeled on symmetric spaces, and the gravity actions built on them.
//!
//! The crate is organized bottom-up:
//!
//! * [`algebra`]: the gauge Lie algebras, their symmetric split, internal
//!   Hodge star and invariant bilinear forms.
//! * [`calculus`]: Lie-algebra-valued differential forms on flat tori, with
//!   exact trigonometric-polynomial coefficients.
//! * [`cartan`]: Cartan connections, curvature splitting, Bianchi identities,
//!   Maurer–Cartan charts and holonomy.
//! * [`actions`]: Chern–Simons, Palatini, TMG and MacDowell–Mansouri actions and
//!   the identities relating them.
//! * [`suite`] and [`report`]: configurable verification runs behind the CLI.
//! * [`commands`]: action evaluation and holonomy as exposed by the CLI.

pub mod actions;
pub mod algebra;
pub mod calculus;
pub mod cartan;
pub mod commands;
pub mod error;
pub mod linalg;
pub mod rational;
pub mod report;
pub mod suite;

pub use error::{Error, Result};
pub use rational::{Cq, Q};
