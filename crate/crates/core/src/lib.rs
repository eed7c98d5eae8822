//! Solvers and robustness certification for stochastic parity and
//! multi-discounted games.
//!
//! The crate covers the hierarchy Markov chain → MDP → turn-based →
//! concurrent game:
//!
//! - [`game`] — the structure model, validation, structural equivalence,
//!   the absolute/ratio distance metrics, and strategy restriction;
//! - [`chain`] — exact chain analysis: bottom SCCs, reachability, parity and
//!   multi-discounted values, mean-discounted time, and exit distributions
//!   computed both by absorption equations and by the Freidlin–Wentzell
//!   function-enumeration formula;
//! - [`mdp`] — MDP solving with optimal pure memoryless strategies, maximal
//!   end components, and a strategy-enumeration oracle;
//! - [`solve`] — matrix games, concurrent multi-discounted fixed-point
//!   iteration, exact turn-based parity solving, and the discount-ladder
//!   approximation of concurrent parity values;
//! - [`robust`] — perturbation bounds, β-thresholds, structurally
//!   equivalent perturbations, and certification reports;
//! - [`instances`] — named instance families and seeded random generators.

pub mod chain;
mod error;
pub mod game;
pub mod instances;
pub mod linalg;
pub mod matrix_game;
pub mod mdp;
pub mod rng;
pub mod robust;
pub mod solve;

pub use error::{GameError, Result};
pub use game::{
    DiscountSpec, DistanceReport, GameStructure, MemorylessStrategy, ParityObjective, Player,
    StructureKind,
};
pub use matrix_game::{MatrixGame, MatrixGameSolution};
pub use mdp::{MaximalEndComponent, SolveResult};
pub use robust::{BoundInputs, CertificateReport, Objective, SweepRow};
pub use solve::{ConcurrentSolution, LadderOutcome, LimitSchedule, TbMethod, TbSolveOutcome};
