//! On-disk game documents.
//!
//! A document is UTF-8 JSON with fields `kind`, `states`, `moves`, `gamma1`,
//! `gamma2`, `delta` (a list of `{state, a1, a2, dist}` records) and optional
//! `priority`, `discount` and `reward` maps. For `markov-chain` documents the
//! move-related fields are omitted entirely and delta records carry only
//! `{state, dist}`. Unknown fields are rejected. The writer emits a canonical
//! form: maps sorted by key, delta records in declaration order, floats in
//! shortest round-trip notation, so identical inputs always serialize to
//! identical bytes.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use sgames_core::chain::CHAIN_MOVE;
use sgames_core::game::SUPPORT_EPS;
use sgames_core::{DiscountSpec, GameStructure, ParityObjective, Player, StructureKind};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaRecord {
    pub state: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a2: Option<String>,
    pub dist: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameDocument {
    pub kind: String,
    pub states: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moves: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma1: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma2: Option<BTreeMap<String, Vec<String>>>,
    pub delta: Vec<DeltaRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priority: Option<BTreeMap<String, u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discount: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reward: Option<BTreeMap<String, f64>>,
}

impl GameDocument {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| anyhow!("document parse error: {e}"))
    }

    pub fn declared_kind(&self) -> Result<StructureKind> {
        self.kind
            .parse()
            .map_err(|e| anyhow!("bad kind field: {e}"))
    }

    /// Materialize the structure, checking shape completeness and that the
    /// declared kind is consistent with the move assignments.
    pub fn to_structure(&self) -> Result<GameStructure> {
        let kind = self.declared_kind()?;
        let n = self.states.len();
        let state_idx = |name: &str| -> Result<usize> {
            self.states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| anyhow!("unknown state `{name}`"))
        };

        let (moves, gamma1, gamma2): (Vec<String>, Vec<Vec<usize>>, Vec<Vec<usize>>) =
            if kind == StructureKind::MarkovChain {
                if self.moves.is_some() || self.gamma1.is_some() || self.gamma2.is_some() {
                    bail!("markov-chain documents must omit moves/gamma fields");
                }
                (
                    vec![CHAIN_MOVE.to_string()],
                    vec![vec![0]; n],
                    vec![vec![0]; n],
                )
            } else {
                let moves = self
                    .moves
                    .clone()
                    .ok_or_else(|| anyhow!("kind {kind} requires a moves list"))?;
                let move_idx = |name: &str| -> Result<usize> {
                    moves
                        .iter()
                        .position(|m| m == name)
                        .ok_or_else(|| anyhow!("unknown move `{name}`"))
                };
                let read_gamma = |map: &Option<BTreeMap<String, Vec<String>>>,
                                      which: &str|
                 -> Result<Vec<Vec<usize>>> {
                    let map = map
                        .as_ref()
                        .ok_or_else(|| anyhow!("kind {kind} requires {which}"))?;
                    let mut out = vec![Vec::new(); n];
                    for (state, names) in map {
                        let s = state_idx(state)?;
                        out[s] = names
                            .iter()
                            .map(|m| move_idx(m))
                            .collect::<Result<Vec<_>>>()?;
                    }
                    for (s, g) in out.iter().enumerate() {
                        if g.is_empty() {
                            bail!("{which} missing or empty for state `{}`", self.states[s]);
                        }
                    }
                    Ok(out)
                };
                let g1 = read_gamma(&self.gamma1, "gamma1")?;
                let g2 = read_gamma(&self.gamma2, "gamma2")?;
                (moves, g1, g2)
            };

        // fill the dense delta table from the records
        let mut delta: Vec<Vec<Vec<Option<Vec<f64>>>>> = (0..n)
            .map(|s| vec![vec![None; gamma2[s].len()]; gamma1[s].len()])
            .collect();
        for rec in &self.delta {
            let s = state_idx(&rec.state)?;
            let (i, j) = if kind == StructureKind::MarkovChain {
                if rec.a1.is_some() || rec.a2.is_some() {
                    bail!("markov-chain delta records must omit a1/a2");
                }
                (0, 0)
            } else {
                let a1 = rec
                    .a1
                    .as_deref()
                    .ok_or_else(|| anyhow!("delta record for `{}` missing a1", rec.state))?;
                let a2 = rec
                    .a2
                    .as_deref()
                    .ok_or_else(|| anyhow!("delta record for `{}` missing a2", rec.state))?;
                let m1 = moves
                    .iter()
                    .position(|m| m == a1)
                    .ok_or_else(|| anyhow!("unknown move `{a1}`"))?;
                let m2 = moves
                    .iter()
                    .position(|m| m == a2)
                    .ok_or_else(|| anyhow!("unknown move `{a2}`"))?;
                let i = gamma1[s]
                    .iter()
                    .position(|&m| m == m1)
                    .ok_or_else(|| anyhow!("move `{a1}` not in gamma1({})", rec.state))?;
                let j = gamma2[s]
                    .iter()
                    .position(|&m| m == m2)
                    .ok_or_else(|| anyhow!("move `{a2}` not in gamma2({})", rec.state))?;
                (i, j)
            };
            if delta[s][i][j].is_some() {
                bail!("duplicate delta record for ({}, {:?}, {:?})", rec.state, rec.a1, rec.a2);
            }
            let mut dist = vec![0.0; n];
            for (target, p) in &rec.dist {
                dist[state_idx(target)?] = *p;
            }
            delta[s][i][j] = Some(dist);
        }
        let delta: Vec<Vec<Vec<Vec<f64>>>> = delta
            .into_iter()
            .enumerate()
            .map(|(s, rows)| {
                rows.into_iter()
                    .enumerate()
                    .map(|(i, cols)| {
                        cols.into_iter()
                            .enumerate()
                            .map(|(j, d)| {
                                d.ok_or_else(|| {
                                    anyhow!(
                                        "missing delta record for ({}, {}, {})",
                                        self.states[s],
                                        moves[gamma1[s][i]],
                                        moves[gamma2[s][j]]
                                    )
                                })
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;

        let g = GameStructure::new(self.states.clone(), moves, gamma1, gamma2, delta)
            .map_err(|e| anyhow!("{e}"))?;
        check_kind_consistency(&g, kind)?;
        Ok(g)
    }

    /// Priority map as a parity objective; must cover every state.
    pub fn parity(&self, g: &GameStructure) -> Result<Option<ParityObjective>> {
        let Some(map) = &self.priority else {
            return Ok(None);
        };
        let mut priorities = vec![None; g.n_states()];
        for (state, p) in map {
            let s = g
                .state_index(state)
                .ok_or_else(|| anyhow!("priority map names unknown state `{state}`"))?;
            priorities[s] = Some(*p);
        }
        let priorities = priorities
            .into_iter()
            .enumerate()
            .map(|(s, p)| p.ok_or_else(|| anyhow!("priority missing for state `{}`", g.state_name(s))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Some(ParityObjective::new(priorities)))
    }

    /// Discount/reward maps as a DiscountSpec; both or neither must appear.
    pub fn discount_spec(&self, g: &GameStructure) -> Result<Option<DiscountSpec>> {
        match (&self.discount, &self.reward) {
            (None, None) => Ok(None),
            (Some(_), None) | (None, Some(_)) => {
                bail!("discount and reward maps must be given together")
            }
            (Some(d), Some(r)) => {
                let read = |map: &BTreeMap<String, f64>, what: &str| -> Result<Vec<f64>> {
                    let mut out = vec![None; g.n_states()];
                    for (state, v) in map {
                        let s = g
                            .state_index(state)
                            .ok_or_else(|| anyhow!("{what} map names unknown state `{state}`"))?;
                        out[s] = Some(*v);
                    }
                    out.into_iter()
                        .enumerate()
                        .map(|(s, v)| {
                            v.ok_or_else(|| anyhow!("{what} missing for state `{}`", g.state_name(s)))
                        })
                        .collect()
                };
                let spec = DiscountSpec::new(read(d, "discount")?, read(r, "reward")?)
                    .map_err(|e| anyhow!("{e}"))?;
                Ok(Some(spec))
            }
        }
    }

    /// Canonical document for a structure, carrying the given auxiliary maps.
    pub fn from_structure(
        g: &GameStructure,
        kind: StructureKind,
        priority: Option<&ParityObjective>,
        discount: Option<&DiscountSpec>,
    ) -> Result<Self> {
        check_kind_consistency(g, kind).context("cannot serialize under this kind")?;
        let chain = kind == StructureKind::MarkovChain;
        let mut delta = Vec::new();
        for s in 0..g.n_states() {
            for (i, &m1) in g.gamma(Player::One, s).iter().enumerate() {
                for (j, &m2) in g.gamma(Player::Two, s).iter().enumerate() {
                    let mut dist = BTreeMap::new();
                    for (t, &p) in g.transition(s, i, j).iter().enumerate() {
                        if p >= SUPPORT_EPS {
                            dist.insert(g.state_name(t).to_string(), p);
                        }
                    }
                    delta.push(DeltaRecord {
                        state: g.state_name(s).to_string(),
                        a1: (!chain).then(|| g.move_name(m1).to_string()),
                        a2: (!chain).then(|| g.move_name(m2).to_string()),
                        dist,
                    });
                }
            }
        }
        let gamma_map = |player: Player| -> BTreeMap<String, Vec<String>> {
            (0..g.n_states())
                .map(|s| {
                    (
                        g.state_name(s).to_string(),
                        g.gamma(player, s)
                            .iter()
                            .map(|&m| g.move_name(m).to_string())
                            .collect(),
                    )
                })
                .collect()
        };
        Ok(GameDocument {
            kind: kind.to_string(),
            states: g.states().to_vec(),
            moves: (!chain).then(|| g.moves().to_vec()),
            gamma1: (!chain).then(|| gamma_map(Player::One)),
            gamma2: (!chain).then(|| gamma_map(Player::Two)),
            delta,
            priority: priority.map(|p| {
                (0..g.n_states())
                    .map(|s| (g.state_name(s).to_string(), p.priority(s)))
                    .collect()
            }),
            discount: discount.map(|d| {
                (0..g.n_states())
                    .map(|s| (g.state_name(s).to_string(), d.lambda(s)))
                    .collect()
            }),
            reward: discount.map(|d| {
                (0..g.n_states())
                    .map(|s| (g.state_name(s).to_string(), d.reward(s)))
                    .collect()
            }),
        })
    }

    /// Canonical bytes: pretty JSON with a trailing newline.
    pub fn canonical_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("document serialization");
        text.push('\n');
        text
    }
}

fn check_kind_consistency(g: &GameStructure, declared: StructureKind) -> Result<()> {
    let ok = match declared {
        StructureKind::MarkovChain => g.classify() == StructureKind::MarkovChain,
        StructureKind::MdpPlayer1 => {
            (0..g.n_states()).all(|s| g.gamma(Player::Two, s).len() == 1)
        }
        StructureKind::MdpPlayer2 => {
            (0..g.n_states()).all(|s| g.gamma(Player::One, s).len() == 1)
        }
        StructureKind::TurnBased => (0..g.n_states())
            .all(|s| g.gamma(Player::One, s).len() == 1 || g.gamma(Player::Two, s).len() == 1),
        StructureKind::Concurrent => true,
    };
    if !ok {
        bail!(
            "declared kind `{declared}` is inconsistent with the move assignments \
             (actual shape: `{}`)",
            g.classify()
        );
    }
    Ok(())
}
