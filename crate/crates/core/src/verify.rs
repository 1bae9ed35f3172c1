//! Batch cross-checks of the solvers against the brute-force oracles.
//!
//! Solvers are reached through [`Hooks`], so a deliberately broken solver can
//! be plugged in to confirm the checks catch it.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{stage_mix_matrix, BeliefSet, MarkovGame, Player};
use crate::inception::{check_iota_dominance, design_dominant_rewards, exploit_fixed_fake, InceptionConfig};
use crate::inception::{policy_inception, InceptionResult};
use crate::markov::{markov_attacker_best_response, secure_belief, stage_q, BRSolveReport};
use crate::oracle::{
    brute_force_inception, column_range, exact_victim_value, grid_attacker_value, grid_victim_value,
    resolve_stage_exact, row_range, GridSpec,
};
use crate::random::{random_belief, random_game, trial_rng, GameShape};

/// Slack added to every grid bound for solver round-off.
pub const GRID_SLACK: f64 = 1e-6;
pub const ENUM_TOL: f64 = 1e-9;
pub const INCEPTION_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Grid,
    Enum,
    All,
}

impl Mode {
    fn grid(self) -> bool {
        matches!(self, Mode::Grid | Mode::All)
    }

    fn enumeration(self) -> bool {
        matches!(self, Mode::Enum | Mode::All)
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(text: &str) -> std::result::Result<Self, String> {
        match text {
            "grid" => Ok(Mode::Grid),
            "enum" => Ok(Mode::Enum),
            "all" => Ok(Mode::All),
            _ => Err(format!("unknown mode {text:?}, expected grid, enum or all")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub mode: Mode,
    /// Grid step for the grid oracles.
    pub delta: f64,
    /// Dominance gap used for the reward-design check.
    pub iota: f64,
    /// Number of base policies in random beliefs.
    pub belief_size: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            mode: Mode::All,
            delta: 1e-3,
            iota: 1.0,
            belief_size: 2,
        }
    }
}

/// The solvers under test.
#[derive(Clone, Copy)]
pub struct Hooks {
    pub best_response: fn(&MarkovGame, &BeliefSet) -> Result<BRSolveReport>,
    pub inception: fn(&MarkovGame) -> Result<InceptionResult>,
}

impl Default for Hooks {
    fn default() -> Self {
        Self {
            best_response: markov_attacker_best_response,
            inception: policy_inception,
        }
    }
}

/// One comparison. A check that could not run has infinite deviation and the
/// reason in `note`.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub check: &'static str,
    pub location: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub note: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckSummary {
    pub check: &'static str,
    pub runs: usize,
    pub failures: usize,
    pub max_deviation: f64,
    /// Tolerance at the instance with the largest deviation.
    pub tolerance_at_max: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub seed: Option<u64>,
    pub outcomes: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(CheckOutcome::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.outcomes.iter().filter(|o| !o.passed())
    }

    /// One row per check, in first-seen order.
    pub fn summary(&self) -> Vec<CheckSummary> {
        let mut rows: Vec<CheckSummary> = Vec::new();
        for o in &self.outcomes {
            let index = match rows.iter().position(|r| r.check == o.check) {
                Some(i) => i,
                None => {
                    rows.push(CheckSummary {
                        check: o.check,
                        runs: 0,
                        failures: 0,
                        max_deviation: f64::NEG_INFINITY,
                        tolerance_at_max: o.tolerance,
                    });
                    rows.len() - 1
                }
            };
            let row = &mut rows[index];
            row.runs += 1;
            row.failures += usize::from(!o.passed());
            if o.deviation > row.max_deviation || o.deviation.is_nan() {
                row.max_deviation = o.deviation;
                row.tolerance_at_max = o.tolerance;
            }
        }
        rows
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(seed) = self.seed {
            writeln!(f, "seed: {seed}")?;
        }
        writeln!(
            f,
            "{:<28} {:>6} {:>6} {:>16} {:>16}  result",
            "check", "runs", "failed", "max deviation", "tolerance"
        )?;
        for row in self.summary() {
            writeln!(
                f,
                "{:<28} {:>6} {:>6} {:>16} {:>16}  {}",
                row.check,
                row.runs,
                row.failures,
                format!("{:.8e}", row.max_deviation),
                format!("{:.8e}", row.tolerance_at_max),
                if row.failures == 0 { "pass" } else { "FAIL" }
            )?;
        }
        for o in self.failures().take(10) {
            write!(
                f,
                "  failed {} at {}: deviation {:.8e} > {:.8e}",
                o.check, o.location, o.deviation, o.tolerance
            )?;
            match &o.note {
                Some(note) => writeln!(f, " ({note})")?,
                None => writeln!(f)?,
            }
        }
        let hidden = self.failures().count().saturating_sub(10);
        if hidden > 0 {
            writeln!(f, "  ... and {hidden} more failures")?;
        }
        Ok(())
    }
}

struct Recorder<'a> {
    prefix: &'a str,
    outcomes: Vec<CheckOutcome>,
}

impl Recorder<'_> {
    fn location(&self, place: &str) -> String {
        match (self.prefix.is_empty(), place.is_empty()) {
            (true, _) => place.to_string(),
            (false, true) => self.prefix.to_string(),
            (false, false) => format!("{} {place}", self.prefix),
        }
    }

    /// Records `|actual - expected|` against `tolerance`, or a failed run.
    fn compare(&mut self, check: &'static str, place: &str, result: Result<(f64, f64, f64)>) {
        let location = self.location(place);
        self.outcomes.push(match result {
            Ok((actual, expected, tolerance)) => CheckOutcome {
                check,
                location,
                deviation: (actual - expected).abs(),
                tolerance,
                note: None,
            },
            Err(e) => CheckOutcome {
                check,
                location,
                deviation: f64::INFINITY,
                tolerance: 0.0,
                note: Some(e.to_string()),
            },
        });
    }
}

/// Runs the checks selected by `opts.mode` on one game. `belief` defaults to
/// the secure belief.
pub fn verify_game(g: &MarkovGame, belief: Option<&BeliefSet>, opts: &VerifyOptions, hooks: &Hooks) -> VerifyReport {
    VerifyReport {
        seed: None,
        outcomes: run_checks(g, belief, opts, hooks, ""),
    }
}

/// `trials` random games of the given shape, each with a random belief of
/// `opts.belief_size` mixed policies. Trial `t` draws from stream `t` of
/// `seed`, so results do not depend on scheduling.
pub fn verify_random(shape: GameShape, trials: usize, seed: u64, opts: &VerifyOptions, hooks: &Hooks) -> VerifyReport {
    let per_trial: Vec<Vec<CheckOutcome>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = trial_rng(seed, t as u64);
            let g = random_game(&mut r, shape);
            let b = random_belief(&mut r, &g, opts.belief_size.max(1));
            run_checks(&g, Some(&b), opts, hooks, &format!("trial {t}"))
        })
        .collect();
    VerifyReport {
        seed: Some(seed),
        outcomes: per_trial.into_iter().flatten().collect(),
    }
}

fn run_checks(
    g: &MarkovGame,
    belief: Option<&BeliefSet>,
    opts: &VerifyOptions,
    hooks: &Hooks,
    prefix: &str,
) -> Vec<CheckOutcome> {
    let mut rec = Recorder {
        prefix,
        outcomes: Vec::new(),
    };
    let secure;
    let b = match belief {
        Some(b) => b,
        None => {
            secure = secure_belief(g);
            &secure
        }
    };
    match (hooks.best_response)(g, b) {
        Ok(report) => {
            if opts.mode.grid() {
                grid_checks(g, b, &report, opts, &mut rec);
            }
            if opts.mode.enumeration() {
                resolve_checks(g, b, &report, &mut rec);
            }
        }
        Err(e) => rec.compare("best-response-solve", "", Err(e)),
    }
    if opts.mode.enumeration() {
        inception_checks(g, opts, hooks, &mut rec);
    }
    rec.outcomes
}

fn stage_label(h: usize, s: usize) -> String {
    format!("h={h} s={s}")
}

fn grid_checks(g: &MarkovGame, b: &BeliefSet, report: &BRSolveReport, opts: &VerifyOptions, rec: &mut Recorder) {
    let spec = match GridSpec::new(opts.delta) {
        Ok(spec) => spec,
        Err(e) => return rec.compare("grid-setup", "", Err(e)),
    };
    for h in 0..g.horizon() {
        for s in 0..g.num_states() {
            let place = stage_label(h, s);
            let q1 = report.q.get(Player::Victim, h, s);
            let q2 = report.q.get(Player::Attacker, h, s);
            let a_prime = match stage_mix_matrix(b, h, s) {
                Ok(mix) => q1 * mix.transpose(),
                Err(e) => return rec.compare("victim-lp-vs-grid", &place, Err(e)),
            };
            let v1 = report.values.get(Player::Victim, h, s);
            let v2 = report.values.get(Player::Attacker, h, s);
            rec.compare(
                "victim-lp-vs-grid",
                &place,
                grid_victim_value(&a_prime, &spec)
                    .map(|grid| (v1, grid, column_range(&a_prime) * spec.step() + GRID_SLACK)),
            );
            let attacker = exact_victim_value(&a_prime).and_then(|z| grid_attacker_value(&a_prime, q2, z, &spec));
            rec.compare(
                "attacker-lp-vs-grid",
                &place,
                attacker.map(|grid| (v2, grid, row_range(q2) * spec.step() + GRID_SLACK)),
            );
        }
    }
}

fn resolve_checks(g: &MarkovGame, b: &BeliefSet, report: &BRSolveReport, rec: &mut Recorder) {
    for h in 0..g.horizon() {
        for s in 0..g.num_states() {
            let place = stage_label(h, s);
            for player in Player::BOTH {
                let next = report.values.layer(player, h + 1);
                let rebuilt = stage_q(g, player, h, s, next);
                let gap = (&rebuilt - report.q.get(player, h, s)).amax();
                rec.compare("q-from-next-values", &place, Ok((gap, 0.0, ENUM_TOL)));
            }
            let exact = stage_mix_matrix(b, h, s).and_then(|mix| {
                resolve_stage_exact(
                    report.q.get(Player::Victim, h, s),
                    report.q.get(Player::Attacker, h, s),
                    &mix,
                )
            });
            let (v1, v2) = (
                report.values.get(Player::Victim, h, s),
                report.values.get(Player::Attacker, h, s),
            );
            match exact {
                Ok((e1, e2)) => {
                    rec.compare("stage-resolve-victim", &place, Ok((v1, e1, ENUM_TOL)));
                    rec.compare("stage-resolve-attacker", &place, Ok((v2, e2, ENUM_TOL)));
                }
                Err(e) => rec.compare("stage-resolve-victim", &place, Err(e)),
            }
        }
    }
}

fn inception_checks(g: &MarkovGame, opts: &VerifyOptions, hooks: &Hooks, rec: &mut Recorder) {
    let result = match (hooks.inception)(g) {
        Ok(result) => result,
        Err(e) => return rec.compare("inception-solve", "", Err(e)),
    };
    let claimed = result.attacker_value();
    rec.compare(
        "inception-realized",
        "",
        exploit_fixed_fake(g, &result.pi2_dagger).map(|r| (claimed, r.values.root(Player::Attacker), ENUM_TOL)),
    );
    rec.compare(
        "inception-vs-brute-force",
        "",
        brute_force_inception(g).map(|(_, best)| (claimed, best, INCEPTION_TOL)),
    );
    let design = InceptionConfig::new(opts.iota)
        .and_then(|cfg| design_dominant_rewards(&result.pi2_dagger, &cfg, g))
        .and_then(|rewards| g.with_rewards(Player::Attacker, &rewards))
        .and_then(|fake| check_iota_dominance(&fake, &result.pi2_dagger, opts.iota));
    rec.compare(
        "reward-design-dominance",
        "",
        design.and_then(|check| match check.witness {
            None => Ok((0.0, 0.0, 0.0)),
            Some(w) => Err(Error::Inconsistent(format!(
                "designed rewards not dominant at h={} s={} a1={} a2={}",
                w.h, w.s, w.a1, w.a2
            ))),
        }),
    );
}
