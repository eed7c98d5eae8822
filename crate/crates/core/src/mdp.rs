//! MDP solving: multi-discounted and parity values with optimal pure
//! memoryless strategy extraction, maximal-end-component decomposition, and a
//! brute-force strategy-enumeration oracle.
//!
//! Value iteration provides certified approximations; a policy-improvement
//! pass with exact linear-system evaluation then pins the returned values to
//! the value of the returned strategy, so reported values are achieved
//! values, not iterates.

use std::collections::BTreeSet;

use crate::chain::{multidiscounted_value_mc, parity_value_mc, reachability_values, MarkovChain};
use crate::error::{GameError, Result};
use crate::game::{
    DiscountSpec, GameStructure, MemorylessStrategy, ParityObjective, Player, StructureKind,
    SUPPORT_EPS,
};
use crate::linalg::lu_factor;

/// Step tolerance for the reachability value iteration.
pub const REACH_VI_TOL: f64 = 1e-10;
const MAX_VI_ITERS: usize = 1_000_000;
// near-limit discounts make plain value iteration arbitrarily slow; the
// policy-improvement pass supplies exactness once iteration is cut off
const DISCOUNTED_VI_CAP: usize = 100_000;
const MAX_PI_ROUNDS: usize = 10_000;
/// Cap on the product of per-state move counts for the enumeration oracle.
pub const ENUMERATION_BUDGET: u128 = 1_000_000;

/// One-player view of a game structure: the acting player picks among its
/// gamma list while the opponent is locked to a singleton everywhere.
#[derive(Debug, Clone, Copy)]
pub struct MdpView<'g> {
    g: &'g GameStructure,
    acting: Player,
}

impl<'g> MdpView<'g> {
    pub fn new(g: &'g GameStructure, acting: Player) -> Result<Self> {
        let other = acting.opponent();
        for s in 0..g.n_states() {
            if g.gamma(other, s).len() != 1 {
                return Err(GameError::Precondition(format!(
                    "state `{}`: {other} has {} moves, expected a singleton",
                    g.state_name(s),
                    g.gamma(other, s).len()
                )));
            }
        }
        Ok(MdpView { g, acting })
    }

    /// Pick the acting player from the structure's classification.
    pub fn for_structure(g: &'g GameStructure) -> Result<Self> {
        match g.classify() {
            StructureKind::MarkovChain | StructureKind::MdpPlayer1 => {
                MdpView::new(g, Player::One)
            }
            StructureKind::MdpPlayer2 => MdpView::new(g, Player::Two),
            kind => Err(GameError::Precondition(format!(
                "expected an MDP, found a {kind} structure"
            ))),
        }
    }

    pub fn game(&self) -> &'g GameStructure {
        self.g
    }

    pub fn acting(&self) -> Player {
        self.acting
    }

    pub fn n_states(&self) -> usize {
        self.g.n_states()
    }

    pub fn n_actions(&self, s: usize) -> usize {
        self.g.gamma(self.acting, s).len()
    }

    /// Successor distribution of the k-th available move at s.
    pub fn dist(&self, s: usize, k: usize) -> &[f64] {
        match self.acting {
            Player::One => self.g.transition(s, k, 0),
            Player::Two => self.g.transition(s, 0, k),
        }
    }

    pub fn successors(&self, s: usize, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.dist(s, k)
            .iter()
            .enumerate()
            .filter(|(_, &p)| p >= SUPPORT_EPS)
            .map(|(t, _)| t)
    }

    /// Chain induced by a pure choice (gamma position per state).
    pub fn induced_chain(&self, choice: &[usize]) -> MarkovChain {
        let rows = (0..self.n_states())
            .map(|s| self.dist(s, choice[s]).to_vec())
            .collect();
        MarkovChain::new(self.g.states().to_vec(), rows).expect("induced chain is well shaped")
    }

    pub fn strategy_from_choice(&self, choice: &[usize]) -> MemorylessStrategy {
        MemorylessStrategy::pure_from_positions(self.acting, self.g, choice)
    }
}

/// A maximal end component: states plus, per state, the moves that keep play
/// inside the component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaximalEndComponent {
    pub states: Vec<usize>,
    /// Allowed gamma positions, aligned with `states`.
    pub actions: Vec<Vec<usize>>,
}

fn sccs_restricted(
    n: usize,
    alive: &[bool],
    edges: impl Fn(usize) -> Vec<usize>,
) -> Vec<Vec<usize>> {
    // Kosaraju on the alive-induced subgraph
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|s| if alive[s] { edges(s) } else { Vec::new() })
        .collect();
    let mut order = Vec::new();
    let mut seen = vec![false; n];
    for start in 0..n {
        if !alive[start] || seen[start] {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        seen[start] = true;
        while let Some(&mut (v, ref mut cursor)) = stack.last_mut() {
            if *cursor < succ[v].len() {
                let t = succ[v][*cursor];
                *cursor += 1;
                if alive[t] && !seen[t] {
                    seen[t] = true;
                    stack.push((t, 0));
                }
            } else {
                order.push(v);
                stack.pop();
            }
        }
    }
    let mut rev = vec![Vec::new(); n];
    for (s, ts) in succ.iter().enumerate() {
        for &t in ts {
            if alive[t] {
                rev[t].push(s);
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut comps = Vec::new();
    for &start in order.iter().rev() {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut members = vec![start];
        comp[start] = id;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &t in &rev[v] {
                if comp[t] == usize::MAX {
                    comp[t] = id;
                    members.push(t);
                    stack.push(t);
                }
            }
        }
        members.sort_unstable();
        comps.push(members);
    }
    comps
}

/// Iterated SCC + pruning on a sub-MDP given by an aliveness mask and
/// per-state allowed action sets. Returns the end components that are
/// maximal within the restriction.
fn mec_partition(
    view: &MdpView<'_>,
    mut alive: Vec<bool>,
    mut allowed: Vec<Vec<usize>>,
) -> Vec<MaximalEndComponent> {
    let n = view.n_states();
    // keep only actions whose support stays alive
    let prune_actions = |alive: &[bool], allowed: &mut Vec<Vec<usize>>| {
        for s in 0..n {
            if !alive[s] {
                allowed[s].clear();
                continue;
            }
            allowed[s].retain(|&k| view.successors(s, k).all(|t| alive[t]));
        }
    };
    prune_actions(&alive, &mut allowed);
    loop {
        let comps = sccs_restricted(n, &alive, |s| {
            let mut ts = BTreeSet::new();
            for &k in &allowed[s] {
                ts.extend(view.successors(s, k));
            }
            ts.into_iter().collect()
        });
        let mut comp_of = vec![usize::MAX; n];
        for (id, c) in comps.iter().enumerate() {
            for &s in c {
                comp_of[s] = id;
            }
        }
        let mut changed = false;
        for s in 0..n {
            if !alive[s] {
                continue;
            }
            let before = allowed[s].len();
            allowed[s].retain(|&k| view.successors(s, k).all(|t| comp_of[t] == comp_of[s]));
            if allowed[s].len() != before {
                changed = true;
            }
            if allowed[s].is_empty() {
                alive[s] = false;
                changed = true;
            }
        }
        if changed {
            prune_actions(&alive, &mut allowed);
            continue;
        }
        let mut out = Vec::new();
        for c in comps {
            if c.iter().all(|&s| !allowed[s].is_empty()) {
                let actions = c.iter().map(|&s| allowed[s].clone()).collect();
                out.push(MaximalEndComponent { states: c, actions });
            }
        }
        out.sort_by_key(|m| m.states[0]);
        return out;
    }
}

/// Maximal end components of an MDP.
pub fn mec_decomposition(g: &GameStructure) -> Result<Vec<MaximalEndComponent>> {
    let view = MdpView::for_structure(g)?;
    let n = view.n_states();
    let allowed = (0..n).map(|s| (0..view.n_actions(s)).collect()).collect();
    Ok(mec_partition(&view, vec![true; n], allowed))
}

/// Solver output: per-state values, the optimal pure memoryless strategy for
/// the acting player, and iteration metadata.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub values: Vec<f64>,
    pub strategy: MemorylessStrategy,
    pub iterations: usize,
    pub residual: f64,
}

fn expected(dist: &[f64], v: &[f64]) -> f64 {
    dist.iter().zip(v).map(|(p, x)| p * x).sum()
}

/// Multi-discounted optimal values: max for a player-1 MDP, min for a
/// player-2 MDP. Value iteration runs until the certified stopping rule
/// (step ≤ tol·(1−λmax)/(2·λmax)), then policy improvement with exact
/// evaluation pins the result to the extracted strategy.
pub fn multidiscounted_value_mdp(
    g: &GameStructure,
    spec: &DiscountSpec,
    tol: f64,
) -> Result<SolveResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(GameError::InvalidParameter("tol must be positive".into()));
    }
    let view = MdpView::for_structure(g)?;
    let n = view.n_states();
    spec.check_len(n)?;
    let maximize = view.acting() == Player::One;
    let lmax = spec.max_lambda();
    let target_step = tol * (1.0 - lmax) / (2.0 * lmax);

    let mut v: Vec<f64> = spec.rewards().to_vec();
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    while residual > target_step && iterations < DISCOUNTED_VI_CAP {
        let mut next = vec![0.0; n];
        for s in 0..n {
            let base = (1.0 - spec.lambda(s)) * spec.reward(s);
            let mut best = if maximize { f64::NEG_INFINITY } else { f64::INFINITY };
            for k in 0..view.n_actions(s) {
                let q = base + spec.lambda(s) * expected(view.dist(s, k), &v);
                if (maximize && q > best) || (!maximize && q < best) {
                    best = q;
                }
            }
            next[s] = best;
        }
        residual = v
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = next;
        iterations += 1;
    }

    // Howard improvement to the exact optimum of the extracted strategy
    let start = greedy_discounted(&view, &v, maximize);
    let (values, choice) = howard_discounted(&view, spec, maximize, start)?;
    Ok(SolveResult {
        values,
        strategy: view.strategy_from_choice(&choice),
        iterations,
        residual,
    })
}

/// Policy iteration with exact evaluation for the discounted objective:
/// converges to the unique optimum in finitely many rounds regardless of how
/// close the discounts sit to one.
pub(crate) fn howard_discounted(
    view: &MdpView<'_>,
    spec: &DiscountSpec,
    maximize: bool,
    start: Vec<usize>,
) -> Result<(Vec<f64>, Vec<usize>)> {
    let n = view.n_states();
    let mut choice = start;
    let mut values = evaluate_discounted(view, spec, &choice)?;
    for _ in 0..MAX_PI_ROUNDS {
        let mut improved = false;
        for s in 0..n {
            let base = (1.0 - spec.lambda(s)) * spec.reward(s);
            let mut best = base + spec.lambda(s) * expected(view.dist(s, choice[s]), &values);
            let mut best_k = choice[s];
            for k in 0..view.n_actions(s) {
                let q = base + spec.lambda(s) * expected(view.dist(s, k), &values);
                let better = if maximize { q > best + 1e-12 } else { q < best - 1e-12 };
                if better {
                    best = q;
                    best_k = k;
                }
            }
            if best_k != choice[s] {
                choice[s] = best_k;
                improved = true;
            }
        }
        if !improved {
            break;
        }
        values = evaluate_discounted(view, spec, &choice)?;
    }
    Ok((values, choice))
}

fn greedy_discounted(view: &MdpView<'_>, v: &[f64], maximize: bool) -> Vec<usize> {
    (0..view.n_states())
        .map(|s| {
            let mut best = if maximize { f64::NEG_INFINITY } else { f64::INFINITY };
            let mut best_k = 0;
            for k in 0..view.n_actions(s) {
                let q = expected(view.dist(s, k), v);
                let better = if maximize { q > best + 1e-15 } else { q < best - 1e-15 };
                if better {
                    best = q;
                    best_k = k;
                }
            }
            best_k
        })
        .collect()
}

fn evaluate_discounted(
    view: &MdpView<'_>,
    spec: &DiscountSpec,
    choice: &[usize],
) -> Result<Vec<f64>> {
    let n = view.n_states();
    let mut a = vec![0.0; n * n];
    let mut b = vec![0.0; n];
    for s in 0..n {
        a[s * n + s] += 1.0;
        let l = spec.lambda(s);
        let dist = view.dist(s, choice[s]);
        for t in 0..n {
            a[s * n + t] -= l * dist[t];
        }
        b[s] = (1.0 - l) * spec.reward(s);
    }
    Ok(lu_factor(a, n)?.solve(&b))
}

/// BFS distances to a target set along any-action support edges; `usize::MAX`
/// marks unreachable states.
fn bfs_distance(view: &MdpView<'_>, target: &[bool]) -> Vec<usize> {
    let n = view.n_states();
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for s in 0..n {
        let mut seen = BTreeSet::new();
        for k in 0..view.n_actions(s) {
            seen.extend(view.successors(s, k));
        }
        for t in seen {
            rev[t].push(s);
        }
    }
    let mut dist = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for s in 0..n {
        if target[s] {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &u in &rev[v] {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Greedy action with distance-based tie-breaking: among Q-ties prefer the
/// action whose support comes closest to the target, then the lowest index.
/// This keeps the extracted strategy proper (no value-preserving idling).
fn greedy_reach_choice(
    view: &MdpView<'_>,
    s: usize,
    v: &[f64],
    dist: &[usize],
) -> usize {
    let mut best_q = f64::NEG_INFINITY;
    let mut best_d = usize::MAX;
    let mut best_k = 0;
    for k in 0..view.n_actions(s) {
        let q = expected(view.dist(s, k), v);
        let d = view
            .successors(s, k)
            .map(|t| dist[t])
            .min()
            .unwrap_or(usize::MAX)
            .saturating_add(1);
        if q > best_q + 1e-12 || (q >= best_q - 1e-12 && d < best_d) {
            best_q = q.max(best_q);
            best_d = d;
            best_k = k;
        }
    }
    best_k
}

/// Maximal probability of reaching `target`, with an optimal pure memoryless
/// strategy. Value iteration to the step tolerance, then policy improvement
/// with exact chain evaluation until no state improves.
fn max_reach(view: &MdpView<'_>, target: &[bool]) -> Result<(Vec<f64>, Vec<usize>, usize, f64)> {
    let n = view.n_states();
    let target_states: Vec<usize> = (0..n).filter(|&s| target[s]).collect();
    let dist = bfs_distance(view, target);

    let mut v: Vec<f64> = (0..n).map(|s| if target[s] { 1.0 } else { 0.0 }).collect();
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    while residual > REACH_VI_TOL && iterations < MAX_VI_ITERS {
        let mut next = v.clone();
        for s in 0..n {
            if target[s] || dist[s] == usize::MAX {
                continue;
            }
            let mut best = f64::NEG_INFINITY;
            for k in 0..view.n_actions(s) {
                best = best.max(expected(view.dist(s, k), &v));
            }
            next[s] = best;
        }
        residual = v
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = next;
        iterations += 1;
    }

    let mut choice: Vec<usize> = (0..n).map(|s| greedy_reach_choice(view, s, &v, &dist)).collect();
    let mut values = reachability_values(&view.induced_chain(&choice), &target_states)?;
    // policy improvement switches only on strict gains: value-preserving
    // switches can break properness of the strategy
    for _ in 0..MAX_PI_ROUNDS {
        let mut improved = false;
        for s in 0..n {
            if target[s] || dist[s] == usize::MAX {
                continue;
            }
            let mut best = expected(view.dist(s, choice[s]), &values);
            let mut best_k = choice[s];
            for k in 0..view.n_actions(s) {
                let q = expected(view.dist(s, k), &values);
                if q > best + 1e-12 {
                    best = q;
                    best_k = k;
                }
            }
            if best_k != choice[s] {
                choice[s] = best_k;
                improved = true;
            }
        }
        if !improved {
            break;
        }
        values = reachability_values(&view.induced_chain(&choice), &target_states)?;
    }
    Ok((values, choice, iterations, residual))
}

struct WitnessEc {
    members: Vec<usize>,
    allowed: Vec<Vec<usize>>,
    /// The even-minimum-priority state the strategy revisits forever.
    anchor: usize,
}

/// Decide whether an end component contains a sub-end-component whose
/// minimum priority is even: if the minimum priority is even the component
/// itself is the witness, otherwise delete the minimum-priority states and
/// recurse into the resulting sub-MECs.
fn winning_witness(
    view: &MdpView<'_>,
    members: &[usize],
    allowed: &[Vec<usize>],
    p: &ParityObjective,
) -> Option<WitnessEc> {
    let min_p = members.iter().map(|&s| p.priority(s)).min()?;
    if min_p % 2 == 0 {
        let anchor = *members.iter().find(|&&s| p.priority(s) == min_p)?;
        return Some(WitnessEc {
            members: members.to_vec(),
            allowed: allowed.to_vec(),
            anchor,
        });
    }
    let n = view.n_states();
    let mut alive = vec![false; n];
    let mut sub_allowed = vec![Vec::new(); n];
    for (i, &s) in members.iter().enumerate() {
        if p.priority(s) != min_p {
            alive[s] = true;
            sub_allowed[s] = allowed[i].clone();
        }
    }
    for sub in mec_partition(view, alive, sub_allowed) {
        if let Some(w) = winning_witness(view, &sub.states, &sub.actions, p) {
            return Some(w);
        }
    }
    None
}

/// BFS move assignment inside a component: at every member state pick the
/// allowed move whose support gets closest to `goals`, so the anchor set is
/// reached from everywhere in the component with positive probability.
fn steer_within(
    view: &MdpView<'_>,
    members: &[usize],
    allowed: &[Vec<usize>],
    goals: &[usize],
    choice: &mut [usize],
) {
    let n = view.n_states();
    let mut inside = vec![false; n];
    let mut allowed_of = vec![Vec::new(); n];
    for (i, &s) in members.iter().enumerate() {
        inside[s] = true;
        allowed_of[s] = allowed[i].clone();
    }
    // reverse BFS from the goals over component-internal edges
    let mut dist = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for &g in goals {
        dist[g] = 0;
        queue.push_back(g);
    }
    let mut rev = vec![Vec::new(); n];
    for &s in members {
        let mut ts = BTreeSet::new();
        for &k in &allowed_of[s] {
            ts.extend(view.successors(s, k).filter(|&t| inside[t]));
        }
        for t in ts {
            rev[t].push(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &u in &rev[v] {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    for &s in members {
        let mut best_d = usize::MAX;
        let mut best_k = allowed_of[s][0];
        for &k in &allowed_of[s] {
            let d = view
                .successors(s, k)
                .filter(|&t| inside[t])
                .map(|t| dist[t])
                .min()
                .unwrap_or(usize::MAX);
            if d < best_d {
                best_d = d;
                best_k = k;
            }
        }
        choice[s] = best_k;
    }
}

fn parity_max(view: &MdpView<'_>, p: &ParityObjective) -> Result<SolveResult> {
    let n = view.n_states();
    p.check_len(n)?;
    let allowed: Vec<Vec<usize>> = (0..n).map(|s| (0..view.n_actions(s)).collect()).collect();
    let mecs = mec_partition(view, vec![true; n], allowed);

    let mut target = vec![false; n];
    let mut mec_choice: Vec<Option<usize>> = vec![None; n];
    for mec in &mecs {
        if let Some(witness) = winning_witness(view, &mec.states, &mec.actions, p) {
            for &s in &mec.states {
                target[s] = true;
            }
            let mut local = vec![0usize; n];
            // inside the witness: circle back to the anchor forever
            steer_within(view, &witness.members, &witness.allowed, &[witness.anchor], &mut local);
            for &s in &witness.members {
                mec_choice[s] = Some(local[s]);
            }
            // in the rest of the MEC: steer into the witness
            let outside: Vec<usize> = mec
                .states
                .iter()
                .copied()
                .filter(|s| !witness.members.contains(s))
                .collect();
            if !outside.is_empty() {
                let mut local = vec![0usize; n];
                steer_within(view, &mec.states, &mec.actions, &witness.members, &mut local);
                for &s in &outside {
                    mec_choice[s] = Some(local[s]);
                }
            }
        }
    }

    let (values, reach_choice, iterations, residual) = max_reach(view, &target)?;
    let choice: Vec<usize> = (0..n)
        .map(|s| mec_choice[s].unwrap_or(reach_choice[s]))
        .collect();
    // the final values are the exact values of the assembled strategy
    let target_states: Vec<usize> = (0..n).filter(|&s| target[s]).collect();
    let achieved = reachability_values(&view.induced_chain(&choice), &target_states)?;
    debug_assert!(
        values
            .iter()
            .zip(&achieved)
            .all(|(a, b)| (a - b).abs() < 1e-9),
        "assembled strategy must achieve the optimum"
    );
    Ok(SolveResult {
        values: achieved,
        strategy: view.strategy_from_choice(&choice),
        iterations,
        residual,
    })
}

/// Parity value of an MDP with an optimal pure memoryless strategy.
///
/// Player-1 MDPs (and degenerate chains) maximize directly; player-2 MDPs
/// are solved by duality — the complement objective shifts every priority by
/// one and the minimizer's value is one minus the maximal complement value.
pub fn parity_value_mdp(g: &GameStructure, p: &ParityObjective) -> Result<SolveResult> {
    match g.classify() {
        StructureKind::MarkovChain | StructureKind::MdpPlayer1 => {
            let view = MdpView::new(g, Player::One)?;
            parity_max(&view, p)
        }
        StructureKind::MdpPlayer2 => {
            let view = MdpView::new(g, Player::Two)?;
            let mut res = parity_max(&view, &p.complement())?;
            for v in &mut res.values {
                *v = 1.0 - *v;
            }
            Ok(res)
        }
        kind => Err(GameError::Precondition(format!(
            "expected an MDP, found a {kind} structure"
        ))),
    }
}

/// Objective selector for the enumeration oracle.
#[derive(Debug, Clone, Copy)]
pub enum MdpObjective<'a> {
    Parity(&'a ParityObjective),
    Discounted(&'a DiscountSpec),
}

/// Per-state optimum over all pure memoryless strategies, each evaluated
/// exactly through the chain solver. Exponential, but exact: the oracle the
/// iterative solvers are checked against.
pub fn strategy_enumeration_oracle(
    g: &GameStructure,
    objective: MdpObjective<'_>,
) -> Result<Vec<f64>> {
    let view = MdpView::for_structure(g)?;
    let n = view.n_states();
    let space: u128 = (0..n).map(|s| view.n_actions(s) as u128).product();
    if space > ENUMERATION_BUDGET {
        return Err(GameError::BudgetExceeded(format!(
            "{space} pure strategies exceed the {ENUMERATION_BUDGET} budget"
        )));
    }
    let maximize = view.acting() == Player::One;
    let mut best = vec![if maximize { 0.0f64 } else { 1.0f64 }; n];
    let mut choice = vec![0usize; n];
    loop {
        let chain = view.induced_chain(&choice);
        let vals = match objective {
            MdpObjective::Parity(p) => parity_value_mc(&chain, p)?,
            MdpObjective::Discounted(spec) => multidiscounted_value_mc(&chain, spec)?,
        };
        for s in 0..n {
            if maximize {
                best[s] = best[s].max(vals[s]);
            } else {
                best[s] = best[s].min(vals[s]);
            }
        }
        let mut carry = 0;
        loop {
            choice[carry] += 1;
            if choice[carry] < view.n_actions(carry) {
                break;
            }
            choice[carry] = 0;
            carry += 1;
            if carry == n {
                return Ok(best);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    /// Two-state player-1 MDP: at s0 move `a` self-loops, move `b` goes to
    /// the absorbing s1.
    fn two_state_mdp() -> GameStructure {
        GameStructure::new(
            vec!["s0".into(), "s1".into()],
            vec!["a".into(), "b".into()],
            vec![vec![0, 1], vec![0]],
            vec![vec![0], vec![0]],
            vec![
                vec![vec![vec![1.0, 0.0]], vec![vec![0.0, 1.0]]],
                vec![vec![vec![0.0, 1.0]]],
            ],
        )
        .unwrap()
    }

    #[test]
    fn mec_of_absorbing_self_loop() {
        let g = two_state_mdp();
        let mecs = mec_decomposition(&g).unwrap();
        // {s0} with the self-loop action and {s1} with its only action
        assert_eq!(mecs.len(), 2);
        assert_eq!(mecs[0].states, vec![0]);
        assert_eq!(mecs[0].actions, vec![vec![0]]);
        assert_eq!(mecs[1].states, vec![1]);
    }

    #[test]
    fn mec_of_deterministic_cycle() {
        let g = MarkovChain::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
                vec![1.0, 0.0, 0.0],
            ],
        )
        .unwrap()
        .to_game();
        let mecs = mec_decomposition(&g).unwrap();
        assert_eq!(mecs.len(), 1);
        assert_eq!(mecs[0].states, vec![0, 1, 2]);
    }

    #[test]
    fn mec_matches_subset_enumeration_oracle() {
        let mut rng = crate::rng::SplitMix64::new(0x44EC);
        for _ in 0..30 {
            let n = 2 + rng.below(4);
            let g = instances::random_instance(&instances::RandomSpec {
                kind: StructureKind::MdpPlayer1,
                n_states: n,
                max_moves: 2,
                max_support: 3,
                seed: rng.next_u64(),
            })
            .unwrap();
            let view = MdpView::for_structure(&g).unwrap();
            let mecs = mec_decomposition(&g).unwrap();
            // oracle: a subset X is an end component iff every member keeps
            // an action with support inside X and the induced graph is
            // strongly connected; MECs are the inclusion-maximal ones
            let mut ecs: Vec<u32> = Vec::new();
            for mask in 1u32..(1 << n) {
                let inside = |t: usize| mask & (1 << t) != 0;
                let members: Vec<usize> = (0..n).filter(|&s| inside(s)).collect();
                let acts: Vec<Vec<usize>> = members
                    .iter()
                    .map(|&s| {
                        (0..view.n_actions(s))
                            .filter(|&k| view.successors(s, k).all(inside))
                            .collect()
                    })
                    .collect();
                if acts.iter().any(|a| a.is_empty()) {
                    continue;
                }
                let connected = members.iter().all(|&from| {
                    let mut seen = vec![false; n];
                    seen[from] = true;
                    let mut stack = vec![from];
                    while let Some(v) = stack.pop() {
                        let vi = members.iter().position(|&m| m == v).unwrap();
                        for &k in &acts[vi] {
                            for t in view.successors(v, k) {
                                if !seen[t] {
                                    seen[t] = true;
                                    stack.push(t);
                                }
                            }
                        }
                    }
                    members.iter().all(|&t| seen[t])
                });
                if connected {
                    ecs.push(mask);
                }
            }
            let maximal: Vec<u32> = ecs
                .iter()
                .copied()
                .filter(|&m| !ecs.iter().any(|&other| other != m && other & m == m))
                .collect();
            let mut got: Vec<u32> = mecs
                .iter()
                .map(|mec| mec.states.iter().fold(0u32, |acc, &s| acc | 1 << s))
                .collect();
            got.sort_unstable();
            let mut want = maximal;
            want.sort_unstable();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn discounted_single_action_matches_chain() {
        let (m, _) = instances::example2_line(2, 0.1).unwrap();
        let g = m.to_game();
        let spec = instances::random_discount(g.n_states(), 0.2, 0.8, 99);
        let res = multidiscounted_value_mdp(&g, &spec, 1e-10).unwrap();
        let direct = multidiscounted_value_mc(&m, &spec).unwrap();
        for s in 0..g.n_states() {
            assert!((res.values[s] - direct[s]).abs() < 1e-9);
        }
    }

    #[test]
    fn discounted_constant_reward_is_one() {
        let g = two_state_mdp();
        let spec = DiscountSpec::uniform(2, 0.6, vec![1.0, 1.0]).unwrap();
        let res = multidiscounted_value_mdp(&g, &spec, 1e-9).unwrap();
        for s in 0..2 {
            assert!((res.values[s] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn discounted_matches_enumeration_oracle() {
        let mut rng = crate::rng::SplitMix64::new(0xD15C);
        for _ in 0..25 {
            let n = 2 + rng.below(4);
            let g = instances::random_instance(&instances::RandomSpec {
                kind: StructureKind::MdpPlayer1,
                n_states: n,
                max_moves: 3,
                max_support: 3,
                seed: rng.next_u64(),
            })
            .unwrap();
            let spec = instances::random_discount(n, 0.1, 0.9, rng.next_u64());
            let res = multidiscounted_value_mdp(&g, &spec, 1e-8).unwrap();
            let oracle = strategy_enumeration_oracle(&g, MdpObjective::Discounted(&spec)).unwrap();
            for s in 0..n {
                assert!(
                    (res.values[s] - oracle[s]).abs() < 1e-6,
                    "state {s}: {} vs {}",
                    res.values[s],
                    oracle[s]
                );
            }
        }
    }

    #[test]
    fn parity_chain_degenerate_example() {
        let (_, g2, p) = instances::example1_family(0.05).unwrap();
        let res = parity_value_mdp(&g2.to_game(), &p).unwrap();
        assert_eq!(res.values[0], 1.0);
    }

    #[test]
    fn parity_all_even_is_one() {
        let g = two_state_mdp();
        let p = ParityObjective::new(vec![0, 2]);
        let res = parity_value_mdp(&g, &p).unwrap();
        assert_eq!(res.values, vec![1.0, 1.0]);
    }

    #[test]
    fn parity_dominated_action_hand_enumeration() {
        // at s0: staying forever on the odd self-loop loses, moving to the
        // even absorbing state wins; the dominant move decides the value
        let g = two_state_mdp();
        let p = ParityObjective::new(vec![1, 2]);
        let res = parity_value_mdp(&g, &p).unwrap();
        assert_eq!(res.values, vec![1.0, 1.0]);
        let pure = res.strategy.as_pure().unwrap();
        assert_eq!(pure[0], 1, "optimal strategy must leave the trap");
        let oracle = strategy_enumeration_oracle(&g, MdpObjective::Parity(&p)).unwrap();
        assert_eq!(oracle, vec![1.0, 1.0]);
    }

    #[test]
    fn parity_matches_enumeration_oracle() {
        let mut rng = crate::rng::SplitMix64::new(0x9A17);
        for _ in 0..30 {
            let n = 2 + rng.below(4);
            let g = instances::random_instance(&instances::RandomSpec {
                kind: StructureKind::MdpPlayer1,
                n_states: n,
                max_moves: 2,
                max_support: 3,
                seed: rng.next_u64(),
            })
            .unwrap();
            let p = instances::random_parity(n, 3, rng.next_u64());
            let res = parity_value_mdp(&g, &p).unwrap();
            let oracle = strategy_enumeration_oracle(&g, MdpObjective::Parity(&p)).unwrap();
            for s in 0..n {
                assert!(
                    (res.values[s] - oracle[s]).abs() < 1e-8,
                    "state {s}: {} vs {}",
                    res.values[s],
                    oracle[s]
                );
            }
        }
    }

    #[test]
    fn strategy_consistency_invariant() {
        // the reported strategy, evaluated as a chain, reproduces the values
        let mut rng = crate::rng::SplitMix64::new(0x57A7);
        for _ in 0..10 {
            let n = 2 + rng.below(4);
            let g = instances::random_instance(&instances::RandomSpec {
                kind: StructureKind::MdpPlayer1,
                n_states: n,
                max_moves: 2,
                max_support: 3,
                seed: rng.next_u64(),
            })
            .unwrap();
            let p = instances::random_parity(n, 3, rng.next_u64());
            let res = parity_value_mdp(&g, &p).unwrap();
            let restricted = crate::game::restrict_player1(&g, &res.strategy).unwrap();
            let chain = MarkovChain::from_game(&restricted).unwrap();
            let replay = parity_value_mc(&chain, &p).unwrap();
            for s in 0..n {
                assert!((res.values[s] - replay[s]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn duality_sanity() {
        // a player-2 MDP solved directly equals one minus the complement
        // solved as the maximizer
        let mut rng = crate::rng::SplitMix64::new(0xD0A1);
        for _ in 0..10 {
            let n = 2 + rng.below(4);
            let g = instances::random_instance(&instances::RandomSpec {
                kind: StructureKind::MdpPlayer2,
                n_states: n,
                max_moves: 2,
                max_support: 3,
                seed: rng.next_u64(),
            })
            .unwrap();
            let p = instances::random_parity(n, 3, rng.next_u64());
            let res = parity_value_mdp(&g, &p).unwrap();
            let oracle = strategy_enumeration_oracle(&g, MdpObjective::Parity(&p)).unwrap();
            for s in 0..n {
                assert!((res.values[s] - oracle[s]).abs() < 1e-8);
            }
            // the minimizer's strategy achieves the reported values
            let restricted = crate::game::restrict_player2(&g, &res.strategy).unwrap();
            let chain = MarkovChain::from_game(&restricted).unwrap();
            let replay = parity_value_mc(&chain, &p).unwrap();
            for s in 0..n {
                assert!((res.values[s] - replay[s]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn bellman_operator_monotone() {
        let g = two_state_mdp();
        let view = MdpView::for_structure(&g).unwrap();
        let spec = DiscountSpec::uniform(2, 0.5, vec![0.3, 0.9]).unwrap();
        let mut rng = crate::rng::SplitMix64::new(0xB311);
        let apply = |v: &[f64]| -> Vec<f64> {
            (0..2)
                .map(|s| {
                    (0..view.n_actions(s))
                        .map(|k| {
                            (1.0 - spec.lambda(s)) * spec.reward(s)
                                + spec.lambda(s) * expected(view.dist(s, k), v)
                        })
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .collect()
        };
        for _ in 0..50 {
            let lo: Vec<f64> = (0..2).map(|_| rng.next_f64()).collect();
            let hi: Vec<f64> = lo.iter().map(|&x| x + rng.next_f64()).collect();
            let flo = apply(&lo);
            let fhi = apply(&hi);
            for s in 0..2 {
                assert!(flo[s] <= fhi[s] + 1e-12);
            }
        }
    }

    #[test]
    fn enumeration_budget_enforced() {
        // 2^30 strategies blow the budget
        let n = 30;
        let mut delta = Vec::new();
        for s in 0..n {
            let mut dist = vec![0.0; n];
            dist[(s + 1) % n] = 1.0;
            delta.push(vec![vec![dist.clone()], vec![dist]]);
        }
        let g = GameStructure::new(
            (0..n).map(|i| format!("s{i}")).collect(),
            vec!["a".into(), "b".into()],
            vec![vec![0, 1]; n],
            vec![vec![0]; n],
            delta,
        )
        .unwrap();
        let p = ParityObjective::new(vec![0; n]);
        assert!(matches!(
            strategy_enumeration_oracle(&g, MdpObjective::Parity(&p)),
            Err(GameError::BudgetExceeded(_))
        ));
    }
}
