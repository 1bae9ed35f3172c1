//! JSON files for games, policies, beliefs and fake rewards.
//!
//! All indices are 0-based. A game file looks like
//!
//! ```json
//! {
//!   "horizon": 1, "states": 1, "actions": [2, 2], "mu": [1.0],
//!   "rewards": { "p1": [[[[0, 1], [1, 0]]]], "p2": [[[[5, 0], [0, 0]]]] },
//!   "transitions": [[[[[1.0], [1.0]], [[1.0], [1.0]]]]],
//!   "beliefs": [ { "entries": [[[0.0, 1.0]]] } ]
//! }
//! ```
//!
//! where `rewards.pX[h][s]` is an `n × m` matrix given row by row,
//! `transitions[h][s][a1][a2]` is a distribution over next states and the
//! optional `beliefs` are attacker policies with `entries[h][s]` a
//! distribution over the attacker's actions.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::game::{validate_game, BeliefSet, Issue, MarkovGame, MarkovPolicy, Player, RewardTensor, ValidationReport};

/// Nested `[h][s][row][col]` matrices.
pub type MatrixLayers = Vec<Vec<Vec<Vec<f64>>>>;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid game in {path}:\n{report}")]
    Invalid { path: String, report: ValidationReport },
    #[error("invalid contents of {path}: {source}")]
    Content {
        path: String,
        #[source]
        source: Error,
    },
}

impl FileError {
    /// Whether the file could not be read or parsed at all, as opposed to
    /// parsing fine but describing an invalid object.
    pub fn is_parse_failure(&self) -> bool {
        matches!(self, FileError::Io { .. } | FileError::Parse { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardsFile {
    pub p1: MatrixLayers,
    pub p2: MatrixLayers,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub horizon: usize,
    pub states: usize,
    pub actions: [usize; 2],
    pub mu: Vec<f64>,
    pub rewards: RewardsFile,
    pub transitions: Vec<Vec<Vec<Vec<Vec<f64>>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beliefs: Option<Vec<PolicyFile>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyFile {
    /// 1 (victim) or 2 (attacker); when absent the reader's context decides.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub player: Option<u8>,
    pub entries: Vec<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardFile {
    pub player: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iota: Option<f64>,
    pub rewards: MatrixLayers,
}

fn matrix_to_rows(mat: &DMatrix<f64>) -> Vec<Vec<f64>> {
    mat.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn rows_to_matrix(rows: &[Vec<f64>], n: usize, m: usize, what: &str, report: &mut ValidationReport) -> DMatrix<f64> {
    if rows.len() != n || rows.iter().any(|r| r.len() != m) {
        report.push(Issue::Shape(format!("{what} is not a {n}x{m} matrix")));
        return DMatrix::zeros(n, m);
    }
    DMatrix::from_fn(n, m, |i, j| rows[i][j])
}

fn layers_to_matrices(
    layers: &MatrixLayers,
    n: usize,
    m: usize,
    what: &str,
    report: &mut ValidationReport,
) -> Vec<Vec<DMatrix<f64>>> {
    layers
        .iter()
        .enumerate()
        .map(|(h, layer)| {
            layer
                .iter()
                .enumerate()
                .map(|(s, rows)| rows_to_matrix(rows, n, m, &format!("{what} at (h={h}, s={s})"), report))
                .collect()
        })
        .collect()
}

fn tensor_to_layers(tensor: &RewardTensor) -> MatrixLayers {
    (0..tensor.horizon)
        .map(|h| {
            (0..tensor.num_states)
                .map(|s| matrix_to_rows(tensor.get(h, s)))
                .collect()
        })
        .collect()
}

impl GameFile {
    pub fn from_game(g: &MarkovGame, beliefs: Option<&BeliefSet>) -> Self {
        let (n, m) = g.action_counts();
        let (horizon, states) = (g.horizon(), g.num_states());
        let transitions = (0..horizon)
            .map(|h| {
                (0..states)
                    .map(|s| {
                        (0..n)
                            .map(|a1| (0..m).map(|a2| g.transition(h, s, a1, a2).to_vec()).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self {
            horizon,
            states,
            actions: [n, m],
            mu: g.mu().to_vec(),
            rewards: RewardsFile {
                p1: tensor_to_layers(&g.reward_tensor(Player::Victim)),
                p2: tensor_to_layers(&g.reward_tensor(Player::Attacker)),
            },
            transitions,
            beliefs: beliefs.map(|b| b.base().iter().map(PolicyFile::from_policy).collect()),
        }
    }

    /// Builds and validates the game; the report carries every shape and
    /// numeric problem found.
    pub fn to_game(&self) -> Result<MarkovGame, ValidationReport> {
        let [n, m] = self.actions;
        let mut report = ValidationReport::default();
        let r1 = layers_to_matrices(&self.rewards.p1, n, m, "p1 rewards", &mut report);
        let r2 = layers_to_matrices(&self.rewards.p2, n, m, "p2 rewards", &mut report);
        if !report.is_empty() {
            return Err(report);
        }
        let g = MarkovGame::new(
            self.horizon,
            self.states,
            n,
            m,
            self.mu.clone(),
            r1,
            r2,
            self.transitions.clone(),
        )?;
        let report = validate_game(&g);
        if report.is_empty() {
            Ok(g)
        } else {
            Err(report)
        }
    }

    /// The embedded belief set, if any, checked against `g`.
    pub fn belief_set(&self, g: &MarkovGame) -> Result<Option<BeliefSet>, Error> {
        let Some(files) = &self.beliefs else {
            return Ok(None);
        };
        let base = files
            .iter()
            .map(|p| p.to_policy(Player::Attacker))
            .collect::<Result<Vec<_>, _>>()?;
        let b = BeliefSet::new(base)?;
        b.check_against(g)?;
        Ok(Some(b))
    }
}

impl PolicyFile {
    pub fn from_policy(policy: &MarkovPolicy) -> Self {
        Self {
            player: Some(policy.player().number()),
            entries: policy.entries(),
        }
    }

    /// Reads the entries as a policy for `default_player` unless the file
    /// names a player, in which case the two must agree.
    pub fn to_policy(&self, default_player: Player) -> Result<MarkovPolicy, Error> {
        let player = match self.player {
            None => default_player,
            Some(number) => Player::from_number(number)
                .filter(|p| *p == default_player)
                .ok_or_else(|| {
                    Error::Policy(format!(
                        "expected a player {} policy, file says player {number}",
                        default_player.number()
                    ))
                })?,
        };
        let actions = self.entries.first().and_then(|layer| layer.first()).map_or(0, Vec::len);
        MarkovPolicy::new(player, actions, self.entries.clone())
    }
}

impl RewardFile {
    pub fn from_tensor(player: Player, tensor: &RewardTensor, iota: Option<f64>) -> Self {
        Self {
            player: player.number(),
            iota,
            rewards: tensor_to_layers(tensor),
        }
    }

    /// The rewards as a tensor shaped for `g`.
    pub fn to_tensor(&self, g: &MarkovGame) -> Result<RewardTensor, Error> {
        let (n, m) = g.action_counts();
        let mut report = ValidationReport::default();
        if self.rewards.len() != g.horizon() || self.rewards.iter().any(|l| l.len() != g.num_states()) {
            return Err(Error::Dimension(
                "reward file does not match the game's steps and states".into(),
            ));
        }
        let matrices: Vec<DMatrix<f64>> = layers_to_matrices(&self.rewards, n, m, "rewards", &mut report)
            .into_iter()
            .flatten()
            .collect();
        if !report.is_empty() {
            return Err(Error::InvalidGame(report));
        }
        if matrices.iter().flat_map(|mat| mat.iter()).any(|r| !r.is_finite()) {
            return Err(Error::NonFinite("reward file".into()));
        }
        Ok(RewardTensor {
            horizon: g.horizon(),
            num_states: g.num_states(),
            matrices,
        })
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, FileError> {
    let text = fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| FileError::Parse {
        path: path.display().to_string(),
        source,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FileError> {
    let text = serde_json::to_string_pretty(value).expect("plain data always serializes");
    fs::write(path, text + "\n").map_err(|source| FileError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn content_error(path: &Path) -> impl FnOnce(Error) -> FileError + '_ {
    move |source| FileError::Content {
        path: path.display().to_string(),
        source,
    }
}

/// Reads a game file and its embedded beliefs, if present.
pub fn read_game(path: &Path) -> Result<(MarkovGame, Option<BeliefSet>), FileError> {
    let file: GameFile = read_json(path)?;
    let g = file.to_game().map_err(|report| FileError::Invalid {
        path: path.display().to_string(),
        report,
    })?;
    let beliefs = file.belief_set(&g).map_err(content_error(path))?;
    Ok((g, beliefs))
}

pub fn write_game(path: &Path, g: &MarkovGame, beliefs: Option<&BeliefSet>) -> Result<(), FileError> {
    write_json(path, &GameFile::from_game(g, beliefs))
}

/// Reads a policy for `player` and checks it against `g`.
pub fn read_policy(path: &Path, player: Player, g: &MarkovGame) -> Result<MarkovPolicy, FileError> {
    let file: PolicyFile = read_json(path)?;
    let policy = file.to_policy(player).map_err(content_error(path))?;
    g.check_policy(&policy, player).map_err(content_error(path))?;
    Ok(policy)
}

pub fn write_policy(path: &Path, policy: &MarkovPolicy) -> Result<(), FileError> {
    write_json(path, &PolicyFile::from_policy(policy))
}

/// Reads a belief file: a JSON array of attacker policy objects.
pub fn read_beliefs(path: &Path, g: &MarkovGame) -> Result<BeliefSet, FileError> {
    let files: Vec<PolicyFile> = read_json(path)?;
    let base = files
        .iter()
        .map(|p| p.to_policy(Player::Attacker))
        .collect::<Result<Vec<_>, _>>()
        .map_err(content_error(path))?;
    let b = BeliefSet::new(base).map_err(content_error(path))?;
    b.check_against(g).map_err(content_error(path))?;
    Ok(b)
}

pub fn write_beliefs(path: &Path, b: &BeliefSet) -> Result<(), FileError> {
    let files: Vec<PolicyFile> = b.base().iter().map(PolicyFile::from_policy).collect();
    write_json(path, &files)
}

pub fn read_rewards(path: &Path, g: &MarkovGame) -> Result<(Player, RewardTensor, Option<f64>), FileError> {
    let file: RewardFile = read_json(path)?;
    let player = Player::from_number(file.player)
        .ok_or_else(|| content_error(path)(Error::Policy(format!("unknown player {}", file.player))))?;
    let tensor = file.to_tensor(g).map_err(content_error(path))?;
    Ok((player, tensor, file.iota))
}

pub fn write_rewards(path: &Path, player: Player, tensor: &RewardTensor, iota: Option<f64>) -> Result<(), FileError> {
    write_json(path, &RewardFile::from_tensor(player, tensor, iota))
}
