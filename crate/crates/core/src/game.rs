//! Game-structure data model: validation, classification, the two structural
//! distance metrics, and strategy restriction.
//!
//! A [`GameStructure`] is a two-player concurrent stochastic game: at every
//! state both players pick a move simultaneously and the pair determines a
//! probability distribution over successor states. Turn-based games, MDPs and
//! Markov chains are the special cases where move sets degenerate to
//! singletons; [`GameStructure::classify`] recovers the most specific class.
//!
//! Structures are immutable after construction and all operations here are
//! pure functions, so they can be shared freely across worker threads.

use std::fmt;
use std::str::FromStr;

use crate::error::{GameError, Result};

/// Probabilities below this threshold count as zero when computing transition
/// supports, keeping structural equivalence robust to float noise.
pub const SUPPORT_EPS: f64 = 1e-12;

/// Tolerance for "distribution sums to one" checks.
pub const SUM_TOL: f64 = 1e-9;

/// Discount factors must stay at least this far below one so the discounted
/// linear systems remain well conditioned. Callers that want the limit use
/// the ladder schedule in the game solver instead.
pub const MAX_LAMBDA: f64 = 1.0 - 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::One => write!(f, "player 1"),
            Player::Two => write!(f, "player 2"),
        }
    }
}

/// Most specific structural class of a game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StructureKind {
    MarkovChain,
    MdpPlayer1,
    MdpPlayer2,
    TurnBased,
    Concurrent,
}

impl fmt::Display for StructureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StructureKind::MarkovChain => "markov-chain",
            StructureKind::MdpPlayer1 => "mdp-player1",
            StructureKind::MdpPlayer2 => "mdp-player2",
            StructureKind::TurnBased => "turn-based",
            StructureKind::Concurrent => "concurrent",
        };
        f.write_str(s)
    }
}

impl FromStr for StructureKind {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "markov-chain" => Ok(StructureKind::MarkovChain),
            "mdp-player1" => Ok(StructureKind::MdpPlayer1),
            "mdp-player2" => Ok(StructureKind::MdpPlayer2),
            "turn-based" => Ok(StructureKind::TurnBased),
            "concurrent" => Ok(StructureKind::Concurrent),
            other => Err(GameError::InvalidParameter(format!(
                "unknown structure kind `{other}`"
            ))),
        }
    }
}

/// Two-player concurrent stochastic game structure.
///
/// State and move identifiers are strings; internal indices follow
/// declaration order so iteration is deterministic. `delta[s][i][j]` is the
/// successor distribution when player 1 plays the `i`-th move of `gamma1(s)`
/// and player 2 the `j`-th move of `gamma2(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GameStructure {
    states: Vec<String>,
    moves: Vec<String>,
    gamma1: Vec<Vec<usize>>,
    gamma2: Vec<Vec<usize>>,
    delta: Vec<Vec<Vec<Vec<f64>>>>,
}

impl GameStructure {
    /// Build a structure from index-based tables.
    ///
    /// Shape errors (out-of-range indices, missing or mis-sized distribution
    /// rows, duplicate identifiers) are rejected here; probability-level
    /// invariants are reported by [`GameStructure::validate`] instead so that
    /// malformed inputs can be diagnosed rather than refused.
    pub fn new(
        states: Vec<String>,
        moves: Vec<String>,
        gamma1: Vec<Vec<usize>>,
        gamma2: Vec<Vec<usize>>,
        delta: Vec<Vec<Vec<Vec<f64>>>>,
    ) -> Result<Self> {
        let n = states.len();
        if n == 0 {
            return Err(GameError::InvalidStructure("empty state space".into()));
        }
        for (name, pool, what) in [(&states, n, "state"), (&moves, moves.len(), "move")] {
            let _ = pool;
            let mut seen = std::collections::BTreeSet::new();
            for id in name.iter() {
                if !seen.insert(id) {
                    return Err(GameError::InvalidStructure(format!(
                        "duplicate {what} identifier `{id}`"
                    )));
                }
            }
        }
        if gamma1.len() != n || gamma2.len() != n || delta.len() != n {
            return Err(GameError::InvalidStructure(
                "per-state tables must cover every state".into(),
            ));
        }
        for s in 0..n {
            for g in [&gamma1[s], &gamma2[s]] {
                for &m in g {
                    if m >= moves.len() {
                        return Err(GameError::InvalidStructure(format!(
                            "state `{}` references move index {m} out of range",
                            states[s]
                        )));
                    }
                }
            }
            if delta[s].len() != gamma1[s].len() {
                return Err(GameError::InvalidStructure(format!(
                    "state `{}`: delta rows do not match gamma1",
                    states[s]
                )));
            }
            for row in &delta[s] {
                if row.len() != gamma2[s].len() {
                    return Err(GameError::InvalidStructure(format!(
                        "state `{}`: delta columns do not match gamma2",
                        states[s]
                    )));
                }
                for dist in row {
                    if dist.len() != n {
                        return Err(GameError::InvalidStructure(format!(
                            "state `{}`: distribution has wrong length",
                            states[s]
                        )));
                    }
                }
            }
        }
        Ok(GameStructure {
            states,
            moves,
            gamma1,
            gamma2,
            delta,
        })
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn moves(&self) -> &[String] {
        &self.moves
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn move_name(&self, m: usize) -> &str {
        &self.moves[m]
    }

    pub fn move_index(&self, name: &str) -> Option<usize> {
        self.moves.iter().position(|m| m == name)
    }

    /// Move indices available to `player` at state `s`.
    pub fn gamma(&self, player: Player, s: usize) -> &[usize] {
        match player {
            Player::One => &self.gamma1[s],
            Player::Two => &self.gamma2[s],
        }
    }

    /// Successor distribution for gamma-list positions (i, j) at state `s`.
    pub fn transition(&self, s: usize, i: usize, j: usize) -> &[f64] {
        &self.delta[s][i][j]
    }

    /// Iterate over all (state, i, j) distribution cells.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (0..self.n_states()).flat_map(move |s| {
            (0..self.gamma1[s].len())
                .flat_map(move |i| (0..self.gamma2[s].len()).map(move |j| (s, i, j)))
        })
    }

    /// Support of a distribution cell after the zero clamp.
    pub fn support(&self, s: usize, i: usize, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.delta[s][i][j]
            .iter()
            .enumerate()
            .filter(|(_, &p)| p >= SUPPORT_EPS)
            .map(|(t, _)| t)
    }

    /// Most specific structural class.
    pub fn classify(&self) -> StructureKind {
        let multi1 = self.gamma1.iter().any(|g| g.len() > 1);
        let multi2 = self.gamma2.iter().any(|g| g.len() > 1);
        match (multi1, multi2) {
            (false, false) => StructureKind::MarkovChain,
            (true, false) => StructureKind::MdpPlayer1,
            (false, true) => StructureKind::MdpPlayer2,
            (true, true) => {
                let both_somewhere = (0..self.n_states())
                    .any(|s| self.gamma1[s].len() > 1 && self.gamma2[s].len() > 1);
                if both_somewhere {
                    StructureKind::Concurrent
                } else {
                    StructureKind::TurnBased
                }
            }
        }
    }

    /// Check every invariant and return one diagnostic per violation.
    /// An empty list means the structure is valid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        for s in 0..self.n_states() {
            if self.gamma1[s].is_empty() {
                out.push(Diagnostic::EmptyMoveSet {
                    state: self.states[s].clone(),
                    player: Player::One,
                });
            }
            if self.gamma2[s].is_empty() {
                out.push(Diagnostic::EmptyMoveSet {
                    state: self.states[s].clone(),
                    player: Player::Two,
                });
            }
        }
        for (s, i, j) in self.cells() {
            let dist = &self.delta[s][i][j];
            let cell = || CellRef {
                state: self.states[s].clone(),
                a1: self.moves[self.gamma1[s][i]].clone(),
                a2: self.moves[self.gamma2[s][j]].clone(),
            };
            let mut sum = 0.0;
            let mut support = 0usize;
            for (t, &p) in dist.iter().enumerate() {
                if !p.is_finite() || p < 0.0 {
                    out.push(Diagnostic::InvalidProbability {
                        cell: cell(),
                        target: self.states[t].clone(),
                        value: p,
                    });
                }
                sum += p;
                if p >= SUPPORT_EPS {
                    support += 1;
                }
            }
            if (sum - 1.0).abs() > SUM_TOL {
                out.push(Diagnostic::DistributionSum { cell: cell(), sum });
            }
            if support == 0 {
                out.push(Diagnostic::EmptySupport { cell: cell() });
            }
        }
        out
    }

    pub(crate) fn set_transition(&mut self, s: usize, i: usize, j: usize, dist: Vec<f64>) {
        debug_assert_eq!(dist.len(), self.n_states());
        self.delta[s][i][j] = dist;
    }

    /// Minimum strictly positive transition probability (η).
    pub fn min_positive_probability(&self) -> f64 {
        let mut eta = f64::INFINITY;
        for (s, i, j) in self.cells() {
            for &p in &self.delta[s][i][j] {
                if p >= SUPPORT_EPS && p < eta {
                    eta = p;
                }
            }
        }
        eta
    }
}

/// Identifies a (state, move pair) transition cell in diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellRef {
    pub state: String,
    pub a1: String,
    pub a2: String,
}

impl fmt::Display for CellRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "delta({}, {}, {})", self.state, self.a1, self.a2)
    }
}

/// A violated structure invariant, naming the offending state/move.
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    DistributionSum { cell: CellRef, sum: f64 },
    EmptySupport { cell: CellRef },
    EmptyMoveSet { state: String, player: Player },
    InvalidProbability { cell: CellRef, target: String, value: f64 },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::DistributionSum { cell, sum } => {
                write!(f, "{cell}: distribution sums to {sum} (expected 1)")
            }
            Diagnostic::EmptySupport { cell } => {
                write!(f, "{cell}: distribution has empty support")
            }
            Diagnostic::EmptyMoveSet { state, player } => {
                write!(f, "state {state}: empty move set for {player}")
            }
            Diagnostic::InvalidProbability { cell, target, value } => {
                write!(f, "{cell}: probability of {target} is {value}")
            }
        }
    }
}

/// Priority function of a parity objective, aligned with state indices.
/// Player 1 wins a play iff the minimum priority visited infinitely often is
/// even.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityObjective {
    priorities: Vec<u32>,
}

impl ParityObjective {
    pub fn new(priorities: Vec<u32>) -> Self {
        ParityObjective { priorities }
    }

    pub fn len(&self) -> usize {
        self.priorities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.priorities.is_empty()
    }

    pub fn priority(&self, s: usize) -> u32 {
        self.priorities[s]
    }

    pub fn priorities(&self) -> &[u32] {
        &self.priorities
    }

    /// Reward vector used by the discounted approximation of parity values:
    /// 1 on even-priority states, 0 on odd.
    pub fn indicator_reward(&self) -> Vec<f64> {
        self.priorities
            .iter()
            .map(|&p| if p % 2 == 0 { 1.0 } else { 0.0 })
            .collect()
    }

    /// Priorities shifted by one, which complements the objective.
    pub fn complement(&self) -> ParityObjective {
        ParityObjective::new(self.priorities.iter().map(|&p| p + 1).collect())
    }

    pub fn check_len(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(GameError::InvalidParameter(format!(
                "priority map covers {} states, structure has {n}",
                self.len()
            )));
        }
        Ok(())
    }
}

/// Per-state discount vector λ ∈ (0,1) paired with a reward r ∈ [0,1].
#[derive(Debug, Clone, PartialEq)]
pub struct DiscountSpec {
    lambda: Vec<f64>,
    reward: Vec<f64>,
}

impl DiscountSpec {
    pub fn new(lambda: Vec<f64>, reward: Vec<f64>) -> Result<Self> {
        if lambda.len() != reward.len() {
            return Err(GameError::InvalidParameter(
                "discount and reward vectors differ in length".into(),
            ));
        }
        for &l in &lambda {
            if !(l > 0.0 && l <= MAX_LAMBDA) {
                return Err(GameError::InvalidParameter(format!(
                    "discount factor {l} outside (0, {MAX_LAMBDA}]"
                )));
            }
        }
        for &r in &reward {
            if !(0.0..=1.0).contains(&r) || !r.is_finite() {
                return Err(GameError::InvalidParameter(format!(
                    "reward {r} outside [0, 1]"
                )));
            }
        }
        Ok(DiscountSpec { lambda, reward })
    }

    /// Uniform discount factor at every state.
    pub fn uniform(n: usize, lambda: f64, reward: Vec<f64>) -> Result<Self> {
        Self::new(vec![lambda; n], reward)
    }

    /// Constructor reserved for the ladder schedule, which deliberately
    /// pushes discounts past the public conditioning cap; factors stay below
    /// 1 − 2^{−44} so the exact solvers remain meaningful in f64.
    pub(crate) fn new_beyond_cap(lambda: Vec<f64>, reward: Vec<f64>) -> Result<Self> {
        let cap = 1.0 - 2f64.powi(-44);
        if lambda.len() != reward.len() {
            return Err(GameError::InvalidParameter(
                "discount and reward vectors differ in length".into(),
            ));
        }
        for &l in &lambda {
            if !(l > 0.0 && l <= cap) {
                return Err(GameError::InvalidParameter(format!(
                    "limit discount factor {l} outside (0, {cap}]"
                )));
            }
        }
        Ok(DiscountSpec { lambda, reward })
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    pub fn lambda(&self, s: usize) -> f64 {
        self.lambda[s]
    }

    pub fn reward(&self, s: usize) -> f64 {
        self.reward[s]
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambda
    }

    pub fn rewards(&self) -> &[f64] {
        &self.reward
    }

    pub fn max_lambda(&self) -> f64 {
        self.lambda.iter().cloned().fold(0.0, f64::max)
    }

    pub fn check_len(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(GameError::InvalidParameter(format!(
                "discount spec covers {} states, structure has {n}",
                self.len()
            )));
        }
        Ok(())
    }
}

/// Memoryless strategy: one distribution over the owner's available moves per
/// state. `assignment[s][k]` is the probability of the k-th move in the
/// owner's gamma list at state s, so supports are valid by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MemorylessStrategy {
    owner: Player,
    assignment: Vec<Vec<f64>>,
}

impl MemorylessStrategy {
    pub fn randomized(owner: Player, assignment: Vec<Vec<f64>>) -> Self {
        MemorylessStrategy { owner, assignment }
    }

    /// Pure strategy given as a gamma-list position per state.
    pub fn pure_from_positions(owner: Player, g: &GameStructure, positions: &[usize]) -> Self {
        let assignment = positions
            .iter()
            .enumerate()
            .map(|(s, &k)| {
                let mut row = vec![0.0; g.gamma(owner, s).len()];
                row[k] = 1.0;
                row
            })
            .collect();
        MemorylessStrategy { owner, assignment }
    }

    pub fn owner(&self) -> Player {
        self.owner
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.assignment[s]
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Pure choice per state, if the strategy is pure.
    pub fn as_pure(&self) -> Option<Vec<usize>> {
        let mut out = Vec::with_capacity(self.assignment.len());
        for row in &self.assignment {
            let mut choice = None;
            for (k, &p) in row.iter().enumerate() {
                if p > 1.0 - 1e-9 {
                    choice = Some(k);
                } else if p > 1e-9 {
                    return None;
                }
            }
            out.push(choice?);
        }
        Some(out)
    }

    pub fn validate_for(&self, g: &GameStructure) -> Result<()> {
        if self.assignment.len() != g.n_states() {
            return Err(GameError::InvalidStrategy(format!(
                "strategy covers {} states, structure has {}",
                self.assignment.len(),
                g.n_states()
            )));
        }
        for (s, row) in self.assignment.iter().enumerate() {
            let avail = g.gamma(self.owner, s).len();
            if row.len() != avail {
                return Err(GameError::InvalidStrategy(format!(
                    "state `{}`: strategy row has {} entries, {} moves available",
                    g.state_name(s),
                    row.len(),
                    avail
                )));
            }
            let mut sum = 0.0;
            for &p in row {
                if !p.is_finite() || p < 0.0 {
                    return Err(GameError::InvalidStrategy(format!(
                        "state `{}`: negative or non-finite move probability",
                        g.state_name(s)
                    )));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > SUM_TOL {
                return Err(GameError::InvalidStrategy(format!(
                    "state `{}`: move probabilities sum to {sum}",
                    g.state_name(s)
                )));
            }
        }
        Ok(())
    }
}

/// Distances and support comparison for a pair of structures on one shape.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceReport {
    /// Maximum absolute difference of transition probabilities (ε_A).
    pub absolute: f64,
    /// Ratio distance ε_R; `None` means infinite (not structurally
    /// equivalent).
    pub ratio: Option<f64>,
    pub structurally_equivalent: bool,
    /// Minimum positive transition probability of the first argument.
    pub eta: f64,
}

/// Check that two structures share states, moves and move assignments.
pub fn same_shape(g1: &GameStructure, g2: &GameStructure) -> Result<()> {
    if g1.states != g2.states {
        return Err(GameError::ShapeMismatch("state sets differ".into()));
    }
    if g1.moves != g2.moves {
        return Err(GameError::ShapeMismatch("move sets differ".into()));
    }
    if g1.gamma1 != g2.gamma1 || g1.gamma2 != g2.gamma2 {
        return Err(GameError::ShapeMismatch("move assignments differ".into()));
    }
    Ok(())
}

/// True iff every transition cell has identical support in both structures.
pub fn structurally_equivalent(g1: &GameStructure, g2: &GameStructure) -> Result<bool> {
    same_shape(g1, g2)?;
    for (s, i, j) in g1.cells() {
        let d1 = g1.transition(s, i, j);
        let d2 = g2.transition(s, i, j);
        for t in 0..g1.n_states() {
            if (d1[t] >= SUPPORT_EPS) != (d2[t] >= SUPPORT_EPS) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Maximum absolute difference of transition probabilities.
pub fn absolute_distance(g1: &GameStructure, g2: &GameStructure) -> Result<f64> {
    same_shape(g1, g2)?;
    let mut eps = 0.0f64;
    for (s, i, j) in g1.cells() {
        let d1 = g1.transition(s, i, j);
        let d2 = g2.transition(s, i, j);
        for t in 0..g1.n_states() {
            eps = eps.max((d1[t] - d2[t]).abs());
        }
    }
    Ok(eps)
}

/// Maximum of the two probability ratios over supported entries, minus one.
/// Errors when the pair is not structurally equivalent (the distance would be
/// infinite).
pub fn ratio_distance(g1: &GameStructure, g2: &GameStructure) -> Result<f64> {
    if !structurally_equivalent(g1, g2)? {
        return Err(GameError::NotStructurallyEquivalent(
            "transition supports differ".into(),
        ));
    }
    let mut worst = 1.0f64;
    for (s, i, j) in g1.cells() {
        let d1 = g1.transition(s, i, j);
        let d2 = g2.transition(s, i, j);
        for t in 0..g1.n_states() {
            if d1[t] >= SUPPORT_EPS {
                worst = worst.max(d1[t] / d2[t]).max(d2[t] / d1[t]);
            }
        }
    }
    Ok(worst - 1.0)
}

/// Distances, supports and η in one pass over the pair.
pub fn distance_report(g1: &GameStructure, g2: &GameStructure) -> Result<DistanceReport> {
    let absolute = absolute_distance(g1, g2)?;
    let equivalent = structurally_equivalent(g1, g2)?;
    let ratio = if equivalent {
        Some(ratio_distance(g1, g2)?)
    } else {
        None
    };
    Ok(DistanceReport {
        absolute,
        ratio,
        structurally_equivalent: equivalent,
        eta: g1.min_positive_probability(),
    })
}

fn fresh_move_name(moves: &[String]) -> String {
    let mut name = "⊥".to_string();
    while moves.iter().any(|m| m == &name) {
        name.push('\'');
    }
    name
}

fn restrict(g: &GameStructure, strategy: &MemorylessStrategy) -> Result<GameStructure> {
    strategy.validate_for(g)?;
    let owner = strategy.owner();
    let n = g.n_states();
    let mut moves = g.moves.clone();
    let bot = moves.len();
    moves.push(fresh_move_name(&moves));

    let mut gamma1 = Vec::with_capacity(n);
    let mut gamma2 = Vec::with_capacity(n);
    let mut delta = Vec::with_capacity(n);
    for s in 0..n {
        let own_moves = g.gamma(owner, s).len();
        let other_moves = g.gamma(owner.opponent(), s).len();
        // one mixed row per opponent move
        let mixed: Vec<Vec<f64>> = (0..other_moves)
            .map(|j| {
                let mut dist = vec![0.0; n];
                for k in 0..own_moves {
                    let w = strategy.row(s)[k];
                    if w == 0.0 {
                        continue;
                    }
                    let d = match owner {
                        Player::One => g.transition(s, k, j),
                        Player::Two => g.transition(s, j, k),
                    };
                    for t in 0..n {
                        dist[t] += w * d[t];
                    }
                }
                dist
            })
            .collect();
        match owner {
            Player::One => {
                gamma1.push(vec![bot]);
                gamma2.push(g.gamma2[s].clone());
                delta.push(vec![mixed]);
            }
            Player::Two => {
                gamma1.push(g.gamma1[s].clone());
                gamma2.push(vec![bot]);
                delta.push(mixed.into_iter().map(|d| vec![d]).collect());
            }
        }
    }
    GameStructure::new(g.states.clone(), moves, gamma1, gamma2, delta)
}

/// Fix a randomized memoryless player-1 strategy, yielding a player-2 MDP
/// (or a Markov chain when the input was a player-1 MDP).
pub fn restrict_player1(g: &GameStructure, pi1: &MemorylessStrategy) -> Result<GameStructure> {
    if pi1.owner() != Player::One {
        return Err(GameError::InvalidStrategy(
            "restrict_player1 needs a player-1 strategy".into(),
        ));
    }
    restrict(g, pi1)
}

/// Fix a randomized memoryless player-2 strategy, yielding a player-1 MDP.
pub fn restrict_player2(g: &GameStructure, pi2: &MemorylessStrategy) -> Result<GameStructure> {
    if pi2.owner() != Player::Two {
        return Err(GameError::InvalidStrategy(
            "restrict_player2 needs a player-2 strategy".into(),
        ));
    }
    restrict(g, pi2)
}
