//! Constructors for the named instance families used throughout the tests
//! and CLI, plus seeded random generators for property suites.
//!
//! Every constructor is a deterministic function of its parameters and
//! produces structures that pass validation with zero diagnostics.

use crate::chain::MarkovChain;
use crate::error::{GameError, Result};
use crate::game::{DiscountSpec, GameStructure, ParityObjective, StructureKind, MAX_LAMBDA};
use crate::rng::SplitMix64;

/// Two chains on {s0, s1} that stop being structurally equivalent for any
/// ε > 0: the first has two absorbing states, the second leaks from s0 to s1
/// with probability ε. Priorities 1 at s0 and 2 at s1, so the first chain
/// loses from s0 while the second wins — the value gap stays 1 as ε → 0.
pub fn example1_family(eps: f64) -> Result<(MarkovChain, MarkovChain, ParityObjective)> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(GameError::InvalidParameter(format!(
            "example1 needs eps in (0,1), got {eps}"
        )));
    }
    let states = vec!["s0".to_string(), "s1".to_string()];
    let g1 = MarkovChain::new(states.clone(), vec![vec![1.0, 0.0], vec![0.0, 1.0]])?;
    let g2 = MarkovChain::new(states, vec![vec![1.0 - eps, eps], vec![0.0, 1.0]])?;
    Ok((g1, g2, ParityObjective::new(vec![1, 2])))
}

/// Biased line walk on s0..s_{2n} with absorbing endpoints: interior states
/// step left with probability 1/2+ε and right with 1/2−ε. Returns the chain
/// and the index of the absorption target s0. The one-parameter family is
/// structurally equivalent across ε and realizes a value difference of order
/// |S|·ε, which is what makes the quantitative bound asymptotically tight.
pub fn example2_line(n: usize, eps: f64) -> Result<(MarkovChain, usize)> {
    if n == 0 {
        return Err(GameError::InvalidParameter("example2 needs n >= 1".into()));
    }
    if !(0.0..0.5).contains(&eps) {
        return Err(GameError::InvalidParameter(format!(
            "example2 needs eps in [0, 1/2), got {eps}"
        )));
    }
    let len = 2 * n + 1;
    let states: Vec<String> = (0..len).map(|i| format!("s{i}")).collect();
    let mut rows = vec![vec![0.0; len]; len];
    rows[0][0] = 1.0;
    rows[len - 1][len - 1] = 1.0;
    for i in 1..len - 1 {
        rows[i][i - 1] = 0.5 + eps;
        rows[i][i + 1] = 0.5 - eps;
    }
    Ok((MarkovChain::new(states, rows)?, 0))
}

/// Closed-form absorption probability at s0 from the middle state s_n of the
/// line walk: ρ^n/(ρ^n+1) with ρ = (1/2+ε)/(1/2−ε). The first-order
/// expansion is 1/2 + n·ε.
pub fn example2_exact_value(n: usize, eps: f64) -> f64 {
    let rho = (0.5 + eps) / (0.5 - eps);
    let rho_n = rho.powi(n as i32);
    rho_n / (rho_n + 1.0)
}

/// The two-state triple showing the ratio distance violates the triangle
/// inequality: δ_k(t)(s) = k·ε for k ∈ {1, 2, 5} with both rows identical.
pub fn ratio_example_chains(eps: f64) -> Result<(MarkovChain, MarkovChain, MarkovChain)> {
    if !(eps > 0.0 && eps < 1.0 / 7.0) {
        return Err(GameError::InvalidParameter(format!(
            "ratio example needs eps in (0, 1/7), got {eps}"
        )));
    }
    let mk = |k: f64| {
        MarkovChain::new(
            vec!["s".to_string(), "s'".to_string()],
            vec![
                vec![k * eps, 1.0 - k * eps],
                vec![k * eps, 1.0 - k * eps],
            ],
        )
    };
    Ok((mk(1.0)?, mk(2.0)?, mk(5.0)?))
}

/// Parameters for the seeded random structure generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSpec {
    pub kind: StructureKind,
    pub n_states: usize,
    /// Largest per-state move count for players that have a choice.
    pub max_moves: usize,
    /// Largest support size per distribution; capped at 10 so that the
    /// minimum positive probability stays at least 1/19 ≈ 0.05.
    pub max_support: usize,
    pub seed: u64,
}

fn random_distribution(rng: &mut SplitMix64, n: usize, max_support: usize) -> Vec<f64> {
    let size = 1 + rng.below(max_support.min(n));
    let mut targets: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut targets);
    targets.truncate(size);
    targets.sort_unstable();
    // weights in [1, 2] keep every normalized entry at least 1/(2k-1)
    let weights: Vec<f64> = targets.iter().map(|_| rng.range_f64(1.0, 2.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut dist = vec![0.0; n];
    for (t, w) in targets.iter().zip(&weights) {
        dist[*t] = w / total;
    }
    dist
}

/// Seeded random structure of the requested kind. Valid by construction,
/// with η ≥ 0.05 guaranteed by the support cap, and classified exactly as
/// requested (one state per player is forced to have a real choice where the
/// kind demands it).
pub fn random_instance(spec: &RandomSpec) -> Result<GameStructure> {
    let n = spec.n_states;
    if n == 0 {
        return Err(GameError::InvalidParameter("need at least one state".into()));
    }
    if spec.max_support == 0 || spec.max_support > 10 {
        return Err(GameError::InvalidParameter(
            "max_support must lie in 1..=10 to keep eta above 0.05".into(),
        ));
    }
    let needs_moves = !matches!(spec.kind, StructureKind::MarkovChain);
    if needs_moves && spec.max_moves < 2 {
        return Err(GameError::InvalidParameter(format!(
            "kind {} needs max_moves >= 2",
            spec.kind
        )));
    }
    if matches!(spec.kind, StructureKind::TurnBased) && n < 2 {
        return Err(GameError::InvalidParameter(
            "a turn-based game needs at least two states".into(),
        ));
    }
    let mut rng = SplitMix64::new(spec.seed ^ 0x5EED_0F64_0A11);
    let multi = |rng: &mut SplitMix64| 2 + rng.below(spec.max_moves - 1);
    let any = |rng: &mut SplitMix64| 1 + rng.below(spec.max_moves);

    // per-state move counts for both players
    let mut size1 = vec![1usize; n];
    let mut size2 = vec![1usize; n];
    match spec.kind {
        StructureKind::MarkovChain => {}
        StructureKind::MdpPlayer1 => {
            for s in 0..n {
                size1[s] = any(&mut rng);
            }
            size1[0] = multi(&mut rng);
        }
        StructureKind::MdpPlayer2 => {
            for s in 0..n {
                size2[s] = any(&mut rng);
            }
            size2[0] = multi(&mut rng);
        }
        StructureKind::TurnBased => {
            for s in 0..n {
                if rng.below(2) == 0 {
                    size1[s] = any(&mut rng);
                } else {
                    size2[s] = any(&mut rng);
                }
            }
            // both players must control somewhere, on distinct states
            size1[0] = multi(&mut rng);
            size2[0] = 1;
            size2[1] = multi(&mut rng);
            size1[1] = 1;
        }
        StructureKind::Concurrent => {
            for s in 0..n {
                size1[s] = any(&mut rng);
                size2[s] = any(&mut rng);
            }
            size1[0] = multi(&mut rng);
            size2[0] = multi(&mut rng);
        }
    }

    let max_moves = size1.iter().chain(&size2).cloned().max().unwrap_or(1);
    let moves: Vec<String> = (0..max_moves).map(|i| format!("m{i}")).collect();
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let gamma1: Vec<Vec<usize>> = size1.iter().map(|&k| (0..k).collect()).collect();
    let gamma2: Vec<Vec<usize>> = size2.iter().map(|&k| (0..k).collect()).collect();
    let mut delta = Vec::with_capacity(n);
    for s in 0..n {
        let mut rows = Vec::with_capacity(size1[s]);
        for _ in 0..size1[s] {
            let mut cols = Vec::with_capacity(size2[s]);
            for _ in 0..size2[s] {
                cols.push(random_distribution(&mut rng, n, spec.max_support));
            }
            rows.push(cols);
        }
        delta.push(rows);
    }
    let g = GameStructure::new(states, moves, gamma1, gamma2, delta)?;
    debug_assert_eq!(g.classify(), spec.kind);
    debug_assert!(g.validate().is_empty());
    Ok(g)
}

/// Seeded random chain with the same η ≥ 0.05 guarantee.
pub fn random_chain(n_states: usize, max_support: usize, seed: u64) -> MarkovChain {
    let g = random_instance(&RandomSpec {
        kind: StructureKind::MarkovChain,
        n_states,
        max_moves: 1,
        max_support,
        seed,
    })
    .expect("chain parameters are always admissible");
    MarkovChain::from_game(&g).expect("generator produced a chain")
}

/// Seeded random priority map with values in 0..=max_priority.
pub fn random_parity(n_states: usize, max_priority: u32, seed: u64) -> ParityObjective {
    let mut rng = SplitMix64::new(seed ^ 0x009A_117E_5EED);
    ParityObjective::new(
        (0..n_states)
            .map(|_| rng.below(max_priority as usize + 1) as u32)
            .collect(),
    )
}

/// Seeded random discount spec with λ uniform in [lo, hi] and rewards in
/// [0, 1].
pub fn random_discount(n_states: usize, lo: f64, hi: f64, seed: u64) -> DiscountSpec {
    let mut rng = SplitMix64::new(seed ^ 0x000D_15C0_5EED);
    let lambda: Vec<f64> = (0..n_states)
        .map(|_| rng.range_f64(lo, hi).min(MAX_LAMBDA))
        .collect();
    let reward: Vec<f64> = (0..n_states).map(|_| rng.next_f64()).collect();
    DiscountSpec::new(lambda, reward).expect("sampled parameters are admissible")
}
