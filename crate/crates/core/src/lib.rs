//! Wolstenholme-type residue sums `Σ_k Π (a_i + k)^{m_i}` over all residues
//! `k` modulo a prime.
//!
//! Every sum can be evaluated by brute force ([`oracle`]) and, where a
//! congruence is known, by closed form ([`closedforms`], [`general`]). The
//! [`verify`] module sweeps parameter grids and compares the two.
//! [`expr`] parses sums written as text and [`strategy`] dispatches them to
//! an evaluation method.

pub mod closedforms;
pub mod error;
pub mod expr;
pub mod general;
pub mod identities;
pub mod modarith;
pub mod oracle;
pub mod polyring;
pub mod strategy;
pub mod verify;

pub use error::{Error, Result};
pub use modarith::{make_prime, Prime, Residue};
