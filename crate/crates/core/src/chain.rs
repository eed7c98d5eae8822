//! Exact Markov-chain analysis.
//!
//! Parity values via bottom-SCC decomposition, multi-discounted values and
//! mean-discounted times via linear systems, the absorbing-copy augmented
//! chain that turns mean-discounted time into an exit probability, and exit
//! distributions computed two independent ways (absorption equations and the
//! Freidlin–Wentzell function-enumeration formula).

use crate::error::{GameError, Result};
use crate::game::{
    CellRef, Diagnostic, DiscountSpec, GameStructure, ParityObjective, StructureKind,
    SUM_TOL, SUPPORT_EPS,
};
use crate::linalg::lu_factor;

/// Reserved move name used when a bare chain is wrapped as a game structure.
pub const CHAIN_MOVE: &str = "-";

/// A Markov chain: states plus one successor distribution per state.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    states: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl MarkovChain {
    pub fn new(states: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if states.is_empty() {
            return Err(GameError::InvalidStructure("empty state space".into()));
        }
        if rows.len() != states.len() || rows.iter().any(|r| r.len() != states.len()) {
            return Err(GameError::InvalidStructure(
                "transition matrix shape does not match the state set".into(),
            ));
        }
        Ok(MarkovChain { states, rows })
    }

    pub fn n(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.rows[s]
    }

    pub fn prob(&self, s: usize, t: usize) -> f64 {
        self.rows[s][t]
    }

    /// Successors with probability above the support clamp.
    pub fn successors(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        self.rows[s]
            .iter()
            .enumerate()
            .filter(|(_, &p)| p >= SUPPORT_EPS)
            .map(|(t, _)| t)
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        for s in 0..self.n() {
            let cell = || CellRef {
                state: self.states[s].clone(),
                a1: CHAIN_MOVE.into(),
                a2: CHAIN_MOVE.into(),
            };
            let mut sum = 0.0;
            let mut support = 0;
            for (t, &p) in self.rows[s].iter().enumerate() {
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

    pub fn min_positive_probability(&self) -> f64 {
        let mut eta = f64::INFINITY;
        for row in &self.rows {
            for &p in row {
                if p >= SUPPORT_EPS && p < eta {
                    eta = p;
                }
            }
        }
        eta
    }

    /// Wrap the chain as a (degenerate) game structure with a single
    /// reserved move for both players.
    pub fn to_game(&self) -> GameStructure {
        let n = self.n();
        GameStructure::new(
            self.states.clone(),
            vec![CHAIN_MOVE.into()],
            vec![vec![0]; n],
            vec![vec![0]; n],
            self.rows.iter().map(|r| vec![vec![r.clone()]]).collect(),
        )
        .expect("chain wrapping is always well shaped")
    }

    /// Extract the chain from a game structure where both players have
    /// singleton move sets everywhere.
    pub fn from_game(g: &GameStructure) -> Result<Self> {
        if g.classify() != StructureKind::MarkovChain {
            return Err(GameError::Precondition(format!(
                "expected a markov-chain structure, found {}",
                g.classify()
            )));
        }
        let rows = (0..g.n_states())
            .map(|s| g.transition(s, 0, 0).to_vec())
            .collect();
        MarkovChain::new(g.states().to_vec(), rows)
    }
}

/// Result of the bottom-SCC decomposition: the closed recurrent components
/// and the remaining (transient) states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BsccDecomposition {
    pub bottom: Vec<Vec<usize>>,
    pub transient: Vec<usize>,
}

fn strongly_connected_components(n: usize, succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    // Kosaraju: order by finish time, then collect on the reverse graph.
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        // iterative DFS with explicit (node, child cursor) frames
        let mut stack = vec![(start, 0usize)];
        seen[start] = true;
        while let Some(&mut (v, ref mut cursor)) = stack.last_mut() {
            if *cursor < succ[v].len() {
                let t = succ[v][*cursor];
                *cursor += 1;
                if !seen[t] {
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
            rev[t].push(s);
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
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

/// Partition the states into bottom (closed, recurrent) SCCs and transient
/// states. Components are sorted by their smallest state index.
pub fn bscc_decomposition(m: &MarkovChain) -> BsccDecomposition {
    let n = m.n();
    let succ: Vec<Vec<usize>> = (0..n).map(|s| m.successors(s).collect()).collect();
    let comps = strongly_connected_components(n, &succ);
    let mut comp_of = vec![0usize; n];
    for (id, c) in comps.iter().enumerate() {
        for &s in c {
            comp_of[s] = id;
        }
    }
    let mut bottom = Vec::new();
    let mut transient = Vec::new();
    for (id, c) in comps.iter().enumerate() {
        let closed = c
            .iter()
            .all(|&s| succ[s].iter().all(|&t| comp_of[t] == id));
        if closed {
            bottom.push(c.clone());
        } else {
            transient.extend(c.iter().copied());
        }
    }
    bottom.sort_by_key(|c| c[0]);
    transient.sort_unstable();
    BsccDecomposition { bottom, transient }
}

fn reverse_reachable(n: usize, succ: &[Vec<usize>], seeds: &[bool]) -> Vec<bool> {
    let mut rev = vec![Vec::new(); n];
    for (s, ts) in succ.iter().enumerate() {
        for &t in ts {
            rev[t].push(s);
        }
    }
    let mut mark = seeds.to_vec();
    let mut stack: Vec<usize> = (0..n).filter(|&s| seeds[s]).collect();
    while let Some(v) = stack.pop() {
        for &u in &rev[v] {
            if !mark[u] {
                mark[u] = true;
                stack.push(u);
            }
        }
    }
    mark
}

/// Probability of ever entering `target`, per state.
///
/// States that reach the target with probability zero or one are classified
/// graph-theoretically first (the standard absorbing-chain treatment), which
/// both guarantees a nonsingular system for the remainder and keeps the 0/1
/// endpoints exact.
pub fn reachability_values(m: &MarkovChain, target: &[usize]) -> Result<Vec<f64>> {
    let n = m.n();
    let mut in_target = vec![false; n];
    for &t in target {
        if t >= n {
            return Err(GameError::InvalidParameter(format!(
                "target state index {t} out of range"
            )));
        }
        in_target[t] = true;
    }
    let succ: Vec<Vec<usize>> = (0..n).map(|s| m.successors(s).collect()).collect();
    // can the target be reached at all?
    let can_reach = reverse_reachable(n, &succ, &in_target);

    // probability-one states: make the target absorbing, then take all
    // states that cannot reach a bottom SCC disjoint from the target
    let absorbed: Vec<Vec<usize>> = (0..n)
        .map(|s| if in_target[s] { vec![s] } else { succ[s].clone() })
        .collect();
    let absorbed_chain_bsccs = {
        let comps = strongly_connected_components(n, &absorbed);
        let mut comp_of = vec![0usize; n];
        for (id, c) in comps.iter().enumerate() {
            for &s in c {
                comp_of[s] = id;
            }
        }
        comps
            .into_iter()
            .enumerate()
            .filter(|(id, c)| {
                c.iter()
                    .all(|&s| absorbed[s].iter().all(|&t| comp_of[t] == *id))
            })
            .map(|(_, c)| c)
            .collect::<Vec<_>>()
    };
    let mut bad_seed = vec![false; n];
    for c in &absorbed_chain_bsccs {
        if c.iter().all(|&s| !in_target[s]) {
            for &s in c {
                bad_seed[s] = true;
            }
        }
    }
    let can_fail = reverse_reachable(n, &absorbed, &bad_seed);

    let mut values = vec![0.0; n];
    let mut unknown = Vec::new();
    for s in 0..n {
        if in_target[s] || !can_fail[s] {
            values[s] = 1.0;
        } else if !can_reach[s] {
            values[s] = 0.0;
        } else {
            unknown.push(s);
        }
    }
    if unknown.is_empty() {
        return Ok(values);
    }
    let k = unknown.len();
    let mut pos = vec![usize::MAX; n];
    for (i, &s) in unknown.iter().enumerate() {
        pos[s] = i;
    }
    let mut a = vec![0.0; k * k];
    let mut b = vec![0.0; k];
    for (i, &s) in unknown.iter().enumerate() {
        a[i * k + i] = 1.0;
        for t in 0..n {
            let p = m.prob(s, t);
            if p < SUPPORT_EPS {
                continue;
            }
            if pos[t] != usize::MAX {
                a[i * k + pos[t]] -= p;
            } else {
                b[i] += p * values[t];
            }
        }
    }
    let x = lu_factor(a, k)?.solve(&b);
    for (i, &s) in unknown.iter().enumerate() {
        values[s] = x[i].clamp(0.0, 1.0);
    }
    Ok(values)
}

/// Probability that the minimum priority visited infinitely often is even:
/// the reachability value of the union of bottom SCCs whose minimum priority
/// is even.
pub fn parity_value_mc(m: &MarkovChain, p: &ParityObjective) -> Result<Vec<f64>> {
    p.check_len(m.n())?;
    let dec = bscc_decomposition(m);
    let mut target = Vec::new();
    for c in &dec.bottom {
        let min_p = c.iter().map(|&s| p.priority(s)).min().expect("nonempty");
        if min_p % 2 == 0 {
            target.extend(c.iter().copied());
        }
    }
    reachability_values(m, &target)
}

/// Expected mean-discounted occupancy MT(s0, s): entry (row s0, column s)
/// is the expected normalized discounted time spent in s starting from s0.
/// Rows sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanDiscountedTimeMatrix {
    mt: Vec<Vec<f64>>,
}

impl MeanDiscountedTimeMatrix {
    pub fn n(&self) -> usize {
        self.mt.len()
    }

    pub fn value(&self, from: usize, target: usize) -> f64 {
        self.mt[from][target]
    }

    pub fn row(&self, from: usize) -> &[f64] {
        &self.mt[from]
    }

    /// Weighted combination with a reward vector: the multi-discounted value.
    pub fn weighted(&self, reward: &[f64]) -> Vec<f64> {
        self.mt
            .iter()
            .map(|row| row.iter().zip(reward).map(|(m, r)| m * r).sum())
            .collect()
    }
}

fn discounted_system(m: &MarkovChain, spec: &DiscountSpec) -> Vec<f64> {
    let n = m.n();
    let mut a = vec![0.0; n * n];
    for s in 0..n {
        a[s * n + s] += 1.0;
        let l = spec.lambda(s);
        for t in 0..n {
            a[s * n + t] -= l * m.prob(s, t);
        }
    }
    a
}

/// Solve for the full mean-discounted-time matrix with one factorization of
/// (I − Λ·P) reused across all target columns.
pub fn mean_discounted_time(
    m: &MarkovChain,
    spec: &DiscountSpec,
) -> Result<MeanDiscountedTimeMatrix> {
    let n = m.n();
    spec.check_len(n)?;
    let lu = lu_factor(discounted_system(m, spec), n)?;
    let mut mt = vec![vec![0.0; n]; n];
    for target in 0..n {
        let mut b = vec![0.0; n];
        b[target] = 1.0 - spec.lambda(target);
        let col = lu.solve(&b);
        for s0 in 0..n {
            mt[s0][target] = col[s0].clamp(0.0, 1.0);
        }
    }
    Ok(MeanDiscountedTimeMatrix { mt })
}

/// Multi-discounted value of the chain: the unique fixed point of
/// v(s) = (1−λ(s))·r(s) + λ(s)·Σ_t δ(s)(t)·v(t).
///
/// Equivalently MT·r; the two characterizations agree within solver
/// precision and the equality is covered by tests.
pub fn multidiscounted_value_mc(m: &MarkovChain, spec: &DiscountSpec) -> Result<Vec<f64>> {
    let n = m.n();
    spec.check_len(n)?;
    let b: Vec<f64> = (0..n)
        .map(|s| (1.0 - spec.lambda(s)) * spec.reward(s))
        .collect();
    Ok(lu_factor(discounted_system(m, spec), n)?.solve(&b))
}

/// Augmented chain over 2·|S| states: each original state s gains an
/// absorbing copy entered with probability 1−λ(s), while original
/// transitions are scaled by λ(s). Exiting the original block through the
/// copy of s has exactly the mean-discounted-time probability MT(·, s).
#[derive(Debug, Clone)]
pub struct AugmentedChain {
    pub chain: MarkovChain,
    /// Number of original states; the copy of state i sits at index
    /// `base + i`.
    pub base: usize,
}

impl AugmentedChain {
    pub fn copy_of(&self, s: usize) -> usize {
        self.base + s
    }

    /// The original states, i.e. the exit set C of the bridge construction.
    pub fn original_states(&self) -> Vec<usize> {
        (0..self.base).collect()
    }
}

pub fn augmented_chain(m: &MarkovChain, spec: &DiscountSpec) -> Result<AugmentedChain> {
    let n = m.n();
    spec.check_len(n)?;
    let mut names: Vec<String> = m.states().to_vec();
    for s in 0..n {
        let mut copy = format!("{}'", m.state_name(s));
        while names.iter().any(|x| x == &copy) {
            copy.push('\'');
        }
        names.push(copy);
    }
    let mut rows = vec![vec![0.0; 2 * n]; 2 * n];
    for s in 0..n {
        let l = spec.lambda(s);
        rows[s][n + s] = 1.0 - l;
        for t in 0..n {
            rows[s][t] = l * m.prob(s, t);
        }
        rows[n + s][n + s] = 1.0;
    }
    Ok(AugmentedChain {
        chain: MarkovChain::new(names, rows)?,
        base: n,
    })
}

/// Exit query: a proper subset C of states and a start state inside it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExitQuery {
    inside: Vec<usize>,
    start: usize,
}

impl ExitQuery {
    pub fn new(mut inside: Vec<usize>, start: usize) -> Self {
        inside.sort_unstable();
        inside.dedup();
        ExitQuery { inside, start }
    }

    pub fn inside(&self) -> &[usize] {
        &self.inside
    }

    pub fn start(&self) -> usize {
        self.start
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitMethod {
    /// Absorption equations solved by one LU factorization.
    Linear,
    /// Freidlin–Wentzell enumeration of functions C → S: the exit
    /// probability is a ratio of acyclic-function weight sums.
    FreidlinWentzell,
}

/// Largest C for which the function enumeration is allowed.
pub const FW_MAX_EXIT_SET: usize = 8;
const FW_MAX_FUNCTIONS: u128 = 20_000_000;

fn check_exit_query(m: &MarkovChain, q: &ExitQuery) -> Result<Vec<bool>> {
    let n = m.n();
    if q.inside.is_empty() || q.inside.len() >= n {
        return Err(GameError::Precondition(
            "exit set C must be a nonempty proper subset of the states".into(),
        ));
    }
    if q.inside.iter().any(|&s| s >= n) {
        return Err(GameError::Precondition("exit set references unknown state".into()));
    }
    let mut in_c = vec![false; n];
    for &s in &q.inside {
        in_c[s] = true;
    }
    if !in_c[q.start] {
        return Err(GameError::Precondition(
            "start state must lie inside the exit set C".into(),
        ));
    }
    // every state of C must reach the complement with positive probability
    let succ: Vec<Vec<usize>> = (0..n).map(|s| m.successors(s).collect()).collect();
    let outside: Vec<bool> = (0..n).map(|s| !in_c[s]).collect();
    let escapes = reverse_reachable(n, &succ, &outside);
    if let Some(stuck) = q.inside.iter().find(|&&s| !escapes[s]) {
        return Err(GameError::Precondition(format!(
            "state `{}` cannot exit the set C",
            m.state_name(*stuck)
        )));
    }
    Ok(in_c)
}

/// Distribution of the first state hit outside C when starting at
/// `q.start`. Returned as a full vector over states with mass only outside C.
pub fn exit_distribution(
    m: &MarkovChain,
    q: &ExitQuery,
    method: ExitMethod,
) -> Result<Vec<f64>> {
    let in_c = check_exit_query(m, q)?;
    match method {
        ExitMethod::Linear => exit_linear(m, q, &in_c),
        ExitMethod::FreidlinWentzell => exit_freidlin_wentzell(m, q, &in_c),
    }
}

fn exit_linear(m: &MarkovChain, q: &ExitQuery, in_c: &[bool]) -> Result<Vec<f64>> {
    let n = m.n();
    let c = &q.inside;
    let k = c.len();
    let mut pos = vec![usize::MAX; n];
    for (i, &s) in c.iter().enumerate() {
        pos[s] = i;
    }
    let mut a = vec![0.0; k * k];
    for (i, &s) in c.iter().enumerate() {
        a[i * k + i] = 1.0;
        for (j, &z) in c.iter().enumerate() {
            a[i * k + j] -= m.prob(s, z);
        }
    }
    let lu = lu_factor(a, k)?;
    let mut out = vec![0.0; n];
    for t in 0..n {
        if in_c[t] {
            continue;
        }
        let b: Vec<f64> = c.iter().map(|&s| m.prob(s, t)).collect();
        if b.iter().all(|&x| x < SUPPORT_EPS) {
            continue;
        }
        let h = lu.solve(&b);
        out[t] = h[pos[q.start]].clamp(0.0, 1.0);
    }
    Ok(out)
}

/// Evaluate the function-enumeration formula. Functions f: C → S are walked
/// by mixed-radix counting over per-state supports (values outside the
/// support contribute zero weight to both sums). α_f = 1 iff the functional
/// graph of f is acyclic; the numerator for exit state t collects the
/// acyclic functions whose unique path from the start reaches t.
fn exit_freidlin_wentzell(m: &MarkovChain, q: &ExitQuery, _in_c: &[bool]) -> Result<Vec<f64>> {
    let n = m.n();
    let c = &q.inside;
    let k = c.len();
    if k > FW_MAX_EXIT_SET {
        return Err(GameError::Precondition(format!(
            "exit set of size {k} exceeds the brute-force limit {FW_MAX_EXIT_SET}"
        )));
    }
    let choices: Vec<Vec<usize>> = c.iter().map(|&s| m.successors(s).collect()).collect();
    let total: u128 = choices.iter().map(|ch| ch.len() as u128).product();
    if total > FW_MAX_FUNCTIONS {
        return Err(GameError::BudgetExceeded(format!(
            "{total} candidate functions exceed the enumeration limit"
        )));
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &s) in c.iter().enumerate() {
        pos[s] = i;
    }
    let start_pos = pos[q.start];

    let mut idx = vec![0usize; k];
    let mut numerator = vec![0.0; n];
    let mut denominator = 0.0;
    // walk stamps for cycle detection; reset by epoch rather than refill
    let mut stamp = vec![0u32; k];
    let mut epoch = 0u32;
    loop {
        let weight: f64 = (0..k).map(|i| m.prob(c[i], choices[i][idx[i]])).product();
        if weight > 0.0 {
            // acyclicity: each node has out-degree one, so following the
            // walk with stamps detects cycles in O(k) per function
            let mut acyclic = true;
            let mut done = vec![false; k];
            for i in 0..k {
                if done[i] {
                    continue;
                }
                epoch += 1;
                let mut cur = i;
                loop {
                    if done[cur] {
                        break;
                    }
                    if stamp[cur] == epoch {
                        acyclic = false;
                        break;
                    }
                    stamp[cur] = epoch;
                    let next = choices[cur][idx[cur]];
                    if pos[next] == usize::MAX {
                        break; // walked out of C
                    }
                    cur = pos[next];
                }
                if !acyclic {
                    break;
                }
                // mark the walked prefix as settled
                let mut cur = i;
                while !done[cur] {
                    done[cur] = true;
                    let next = choices[cur][idx[cur]];
                    if pos[next] == usize::MAX {
                        break;
                    }
                    cur = pos[next];
                }
            }
            if acyclic {
                denominator += weight;
                // unique path from the start exits C at some t
                let mut cur = start_pos;
                let exit_state = loop {
                    let next = choices[cur][idx[cur]];
                    if pos[next] == usize::MAX {
                        break next;
                    }
                    cur = pos[next];
                };
                numerator[exit_state] += weight;
            }
        }
        // next mixed-radix index
        let mut carry = 0;
        loop {
            idx[carry] += 1;
            if idx[carry] < choices[carry].len() {
                break;
            }
            idx[carry] = 0;
            carry += 1;
            if carry == k {
                let out: Vec<f64> = numerator.iter().map(|&x| x / denominator).collect();
                return Ok(out);
            }
        }
    }
}
