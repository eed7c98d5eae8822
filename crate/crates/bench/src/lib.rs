//! Shared fixtures for the solver benchmarks.

use sgames_core::chain::MarkovChain;
use sgames_core::instances::{random_chain, random_discount, random_instance, RandomSpec};
use sgames_core::{DiscountSpec, GameStructure, ParityObjective, StructureKind};

pub fn bench_chain(n: usize) -> (MarkovChain, DiscountSpec, ParityObjective) {
    let m = random_chain(n, 4, 0xBE7C);
    let spec = random_discount(n, 0.3, 0.9, 0xBE7D);
    let p = sgames_core::instances::random_parity(n, 3, 0xBE7E);
    (m, spec, p)
}

pub fn bench_mdp(n: usize) -> (GameStructure, DiscountSpec, ParityObjective) {
    let g = random_instance(&RandomSpec {
        kind: StructureKind::MdpPlayer1,
        n_states: n,
        max_moves: 3,
        max_support: 4,
        seed: 0xBE7F,
    })
    .expect("bench instance");
    let spec = random_discount(n, 0.3, 0.9, 0xBE80);
    let p = sgames_core::instances::random_parity(n, 3, 0xBE81);
    (g, spec, p)
}

pub fn bench_concurrent(n: usize) -> (GameStructure, DiscountSpec) {
    let g = random_instance(&RandomSpec {
        kind: StructureKind::Concurrent,
        n_states: n,
        max_moves: 3,
        max_support: 4,
        seed: 0xBE82,
    })
    .expect("bench instance");
    let spec = random_discount(n, 0.3, 0.9, 0xBE83);
    (g, spec)
}

pub fn bench_turn_based(n: usize) -> (GameStructure, ParityObjective) {
    let g = random_instance(&RandomSpec {
        kind: StructureKind::TurnBased,
        n_states: n,
        max_moves: 2,
        max_support: 3,
        seed: 0xBE84,
    })
    .expect("bench instance");
    let p = sgames_core::instances::random_parity(n, 3, 0xBE85);
    (g, p)
}
