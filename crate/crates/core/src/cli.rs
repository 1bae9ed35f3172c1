//! The `mg-inception` command line.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::error::Error;
use crate::game::{evaluate_policy, BeliefSet, MarkovGame, MarkovPolicy, Player};
use crate::inception::{check_iota_dominance, design_dominant_rewards, policy_inception, InceptionConfig};
use crate::io::{read_beliefs, read_game, read_policy, write_policy, write_rewards, FileError};
use crate::markov::{markov_attacker_best_response, secure_belief};
use crate::random::GameShape;
use crate::sim::simulate;
use crate::verify::{verify_game, verify_random, Hooks, Mode, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_IO: i32 = 2;

const FORMAT_HELP: &str = "\
All states, actions and steps are 0-based: step h runs from 0 to H-1, victim
actions (player 1, rows) from 0 to n-1, attacker actions (player 2, columns)
from 0 to m-1.

Game files are JSON:
  {\"horizon\": H, \"states\": S, \"actions\": [n, m], \"mu\": [S reals],
   \"rewards\": {\"p1\": [h][s] n-by-m arrays, \"p2\": [h][s] n-by-m arrays},
   \"transitions\": [h][s][a1][a2] arrays of S reals,
   \"beliefs\": optional list of {\"entries\": [h][s] arrays of m reals}}
Policy files are {\"player\": 1 or 2, \"entries\": [h][s] arrays}; belief files
are JSON lists of attacker policy objects. Reward files written by `incept` are
{\"player\": 2, \"iota\": x, \"rewards\": [h][s] n-by-m arrays}.

Exit codes: 0 success, 1 invalid input or failed check, 2 I/O or parse failure.
Values are printed with 9 significant digits.";

#[derive(Debug, Parser)]
#[command(name = "mg-inception", version, about = "Worst-case best responses and inception attacks in Markov games", after_help = FORMAT_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a game file and report every problem found.
    Validate { game: PathBuf },
    /// Attacker worst-case best response against the victim's belief.
    SolveBr {
        game: PathBuf,
        /// Believe every attacker policy possible.
        #[arg(long, conflicts_with = "beliefs")]
        secure: bool,
        /// Belief file: a JSON list of attacker policies.
        #[arg(long)]
        beliefs: Option<PathBuf>,
        /// Write the attacker policy here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for the best deterministic fake policy and design its rewards.
    Incept {
        game: PathBuf,
        /// Dominance gap of the designed rewards (positive).
        #[arg(long, allow_negative_numbers = true)]
        iota: f64,
        #[arg(long)]
        out_policy: Option<PathBuf>,
        #[arg(long)]
        out_rewards: Option<PathBuf>,
    },
    /// Cross-check the solvers against brute-force oracles.
    Verify {
        /// Game to check; its embedded beliefs are used, else the secure belief.
        #[arg(required_unless_present = "random", conflicts_with = "random")]
        game: Option<PathBuf>,
        #[arg(long, default_value = "all")]
        mode: Mode,
        /// Random games instead of a file: n,m,S,H or n,m,S,H,trials.
        #[arg(long)]
        random: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Overrides the trial count given in --random.
        #[arg(long)]
        trials: Option<usize>,
        /// Grid step of the grid oracles.
        #[arg(long, default_value_t = 1e-3, allow_negative_numbers = true)]
        delta: f64,
        /// Base policies per random belief.
        #[arg(long, default_value_t = 2)]
        belief_size: usize,
    },
    /// Monte Carlo rollouts of a policy pair.
    Simulate {
        game: PathBuf,
        #[arg(long)]
        p1: PathBuf,
        #[arg(long)]
        p2: PathBuf,
        #[arg(long)]
        episodes: usize,
        #[arg(long)]
        seed: u64,
    },
}

/// A command failure: exit code plus message for standard error.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        Self {
            code: if e.is_parse_failure() { EXIT_IO } else { EXIT_DOMAIN },
            message: e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        domain(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self {
            code: EXIT_IO,
            message: e.to_string(),
        }
    }
}

fn domain(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_DOMAIN,
        message: message.into(),
    }
}

/// A value with 9 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.8e}")
}

fn vector(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| num(*v)).collect();
    format!("[{}]", parts.join(", "))
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Validate { game } => validate(&game, out),
        Command::SolveBr {
            game,
            secure,
            beliefs,
            out: policy_out,
        } => solve_br(&game, secure, beliefs.as_deref(), policy_out.as_deref(), out),
        Command::Incept {
            game,
            iota,
            out_policy,
            out_rewards,
        } => incept(&game, iota, out_policy.as_deref(), out_rewards.as_deref(), out),
        Command::Verify {
            game,
            mode,
            random,
            seed,
            trials,
            delta,
            belief_size,
        } => {
            let opts = VerifyOptions {
                mode,
                delta,
                belief_size,
                ..VerifyOptions::default()
            };
            verify(game.as_deref(), random.as_deref(), seed, trials, &opts, out)
        }
        Command::Simulate {
            game,
            p1,
            p2,
            episodes,
            seed,
        } => simulate_cmd(&game, &p1, &p2, episodes, seed, out),
    }
}

fn describe(g: &MarkovGame) -> String {
    let (n, m) = g.action_counts();
    format!("H={} S={} actions=[{n}, {m}]", g.horizon(), g.num_states())
}

fn validate(path: &Path, out: &mut dyn Write) -> Result<i32, Failure> {
    match read_game(path) {
        Ok((g, beliefs)) => {
            writeln!(out, "valid: {}", describe(&g))?;
            if let Some(b) = beliefs {
                writeln!(out, "beliefs: {} base policies", b.len())?;
            }
            Ok(EXIT_OK)
        }
        Err(FileError::Invalid { report, .. }) => {
            writeln!(out, "invalid: {} problems", report.issues.len())?;
            writeln!(out, "{report}")?;
            Ok(EXIT_DOMAIN)
        }
        Err(e) => Err(e.into()),
    }
}

fn print_policy(out: &mut dyn Write, name: &str, policy: &MarkovPolicy) -> std::io::Result<()> {
    writeln!(out, "{name}:")?;
    for h in 0..policy.horizon() {
        for s in 0..policy.num_states() {
            match policy.action(h, s) {
                Some(a) => writeln!(out, "  h={h} s={s}: action {a}")?,
                None => writeln!(out, "  h={h} s={s}: {}", vector(policy.dist(h, s)))?,
            }
        }
    }
    Ok(())
}

fn solve_br(
    path: &Path,
    secure: bool,
    beliefs: Option<&Path>,
    policy_out: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let (g, embedded) = read_game(path)?;
    let (b, source): (BeliefSet, String) = match (secure, beliefs, embedded) {
        (true, _, _) => (secure_belief(&g), "secure".into()),
        (false, Some(file), _) => (read_beliefs(file, &g)?, file.display().to_string()),
        (false, None, Some(b)) => (b, "embedded in game file".into()),
        (false, None, None) => {
            return Err(Failure {
                code: EXIT_IO,
                message: "no belief: pass --secure, --beliefs FILE, or embed \"beliefs\" in the game file".into(),
            })
        }
    };
    let report = markov_attacker_best_response(&g, &b)?;
    writeln!(out, "game: {}", describe(&g))?;
    writeln!(out, "belief: {source} ({} base policies)", b.len())?;
    writeln!(out, "V1* = {}", num(report.values.root(Player::Victim)))?;
    writeln!(out, "V2* = {}", num(report.values.root(Player::Attacker)))?;
    print_policy(out, "pi2*", &report.pi2_star)?;
    if let Some(file) = policy_out {
        write_policy(file, &report.pi2_star)?;
        writeln!(out, "wrote {}", file.display())?;
    }
    Ok(EXIT_OK)
}

fn incept(
    path: &Path,
    iota: f64,
    policy_out: Option<&Path>,
    rewards_out: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let cfg = InceptionConfig::new(iota)?;
    let (g, _) = read_game(path)?;
    let result = policy_inception(&g)?;
    writeln!(out, "game: {}", describe(&g))?;
    print_policy(out, "pi2_dagger", &result.pi2_dagger)?;
    writeln!(out, "V1_hat = {}", num(result.victim_value()))?;
    writeln!(out, "V2_hat = {}", num(result.attacker_value()))?;
    let rewards = design_dominant_rewards(&result.pi2_dagger, &cfg, &g)?;
    let fake = g.with_rewards(Player::Attacker, &rewards)?;
    let check = check_iota_dominance(&fake, &result.pi2_dagger, iota)?;
    if let Some(w) = check.witness {
        return Err(domain(format!(
            "designed rewards fail the dominance check at h={} s={} a1={} a2={}: {} < {}",
            w.h,
            w.s,
            w.a1,
            w.a2,
            num(w.dominant),
            num(w.deviation)
        )));
    }
    writeln!(out, "dominance check (iota = {}): pass", num(iota))?;
    if let Some(file) = policy_out {
        write_policy(file, &result.pi2_dagger)?;
        writeln!(out, "wrote {}", file.display())?;
    }
    if let Some(file) = rewards_out {
        write_rewards(file, Player::Attacker, &rewards, Some(iota))?;
        writeln!(out, "wrote {}", file.display())?;
    }
    Ok(EXIT_OK)
}

fn parse_random(spec: &str) -> Result<(GameShape, Option<usize>), Failure> {
    let usage = |message: String| Failure { code: EXIT_IO, message };
    let parts: Vec<&str> = spec.split(',').collect();
    match parts.len() {
        4 => Ok((spec.parse().map_err(usage)?, None)),
        5 => {
            let shape = parts[..4].join(",").parse().map_err(usage)?;
            let trials = parts[4]
                .trim()
                .parse()
                .map_err(|e| usage(format!("bad trial count {:?}: {e}", parts[4])))?;
            Ok((shape, Some(trials)))
        }
        _ => Err(usage(format!("expected n,m,S,H or n,m,S,H,trials, got {spec:?}"))),
    }
}

fn verify(
    game: Option<&Path>,
    random: Option<&str>,
    seed: u64,
    trials: Option<usize>,
    opts: &VerifyOptions,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let start = Instant::now();
    let report = match (game, random) {
        (_, Some(spec)) => {
            let (shape, spec_trials) = parse_random(spec)?;
            let trials = trials.or(spec_trials).unwrap_or(1);
            writeln!(
                out,
                "random games: n={} m={} S={} H={} trials={trials} seed={seed}",
                shape.n, shape.m, shape.states, shape.horizon
            )?;
            verify_random(shape, trials, seed, opts, &Hooks::default())
        }
        (Some(path), None) => {
            let (g, beliefs) = read_game(path)?;
            writeln!(out, "game: {}", describe(&g))?;
            verify_game(&g, beliefs.as_ref(), opts, &Hooks::default())
        }
        (None, None) => unreachable!("clap requires a game or --random"),
    };
    write!(out, "{report}")?;
    let verdict = if report.passed() { "pass" } else { "FAIL" };
    writeln!(out, "overall: {verdict} ({:.3} s)", start.elapsed().as_secs_f64())?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_DOMAIN })
}

fn simulate_cmd(
    path: &Path,
    p1: &Path,
    p2: &Path,
    episodes: usize,
    seed: u64,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let (g, _) = read_game(path)?;
    let pi1 = read_policy(p1, Player::Victim, &g)?;
    let pi2 = read_policy(p2, Player::Attacker, &g)?;
    let stats = simulate(&g, &pi1, &pi2, episodes, seed)?;
    let exact = evaluate_policy(&g, &pi1, &pi2)?;
    writeln!(out, "seed: {}", stats.seed)?;
    writeln!(out, "episodes: {}", stats.episodes)?;
    for player in Player::BOTH {
        writeln!(
            out,
            "player {}: mean {} std error {} exact {}",
            player.number(),
            num(stats.mean(player)),
            num(stats.std_error(player)),
            num(exact.root(player))
        )?;
    }
    Ok(EXIT_OK)
}
