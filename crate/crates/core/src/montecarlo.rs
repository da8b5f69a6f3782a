//! Seeded simulation of the game, used as a statistical oracle.
//!
//! Trial `k` draws from `ChaCha8Rng::seed_from_u64(seed)` switched to stream `k`,
//! so every trial owns an independent, reproducible sequence. Trials run on the
//! rayon pool and are reduced in trial order, which makes a report bitwise
//! identical for any thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::joint::{MoveModel, StrategyRules};
use crate::spinner::SpinnerFour;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Start {
    Positions {
        cop: usize,
        robber: usize,
    },
    /// Cop on vertex 0, robber on the lowest-numbered vertex at this distance.
    Distance(u32),
}

#[derive(Debug, Clone)]
pub struct SimConfig<'g> {
    pub graph: &'g Graph,
    pub spinner: SpinnerFour,
    pub rules: StrategyRules,
    pub start: Start,
    pub trials: u64,
    pub max_rounds: u32,
    pub seed: u64,
    /// The cop gives up once the distance reaches this value.
    pub call_off: Option<u32>,
}

impl<'g> SimConfig<'g> {
    pub fn new(graph: &'g Graph, spinner: SpinnerFour, start: Start) -> Self {
        Self {
            graph,
            spinner,
            rules: StrategyRules::default(),
            start,
            trials: 100_000,
            max_rounds: 1_000,
            seed: 0,
            call_off: None,
        }
    }

    fn positions(&self) -> Result<(usize, usize)> {
        let g = self.graph;
        let (cop, robber) = match self.start {
            Start::Positions { cop, robber } => (cop, robber),
            Start::Distance(d) => {
                let robber = g
                    .distances_from(0)
                    .iter()
                    .position(|&x| x == d)
                    .ok_or_else(|| {
                        Error::InvalidParameter(format!("no vertex at distance {d} from vertex 0"))
                    })?;
                (0, robber)
            }
        };
        let n = g.vertex_count();
        if cop >= n || robber >= n {
            return Err(Error::InvalidParameter(format!(
                "start ({cop}, {robber}) lies outside a graph with {n} vertices"
            )));
        }
        if cop == robber {
            return Err(Error::InvalidStart(cop));
        }
        if let Some(limit) = self.call_off {
            if g.distance(cop, robber) >= limit {
                return Err(Error::InvalidParameter(format!(
                    "start distance {} is already at the call-off distance {limit}",
                    g.distance(cop, robber)
                )));
            }
        }
        Ok((cop, robber))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    /// Number of standard errors separating the estimate from `value`.
    pub fn z_score(&self, value: f64) -> f64 {
        let diff = (self.mean - value).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_error
        }
    }

    fn proportion(hits: u64, n: u64) -> Self {
        let p = hits as f64 / n as f64;
        Self {
            mean: p,
            std_error: (p * (1.0 - p) / n as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub trials: u64,
    /// `survival[M]` estimates the probability the game lasts beyond round `M`, for `M = 0..=max_rounds`.
    pub survival: Vec<Estimate>,
    /// Mean length of the trials that ended within `max_rounds`.
    pub mean_rounds: Estimate,
    /// Set when some trials were censored, so `mean_rounds` underestimates the expectation.
    pub mean_is_lower_bound: bool,
    pub censored_fraction: f64,
    pub capture_fraction: f64,
    pub escape_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ending {
    Capture(u32),
    Escape(u32),
    Censored,
}

const OUTCOMES: usize = 4;

fn pick_outcome(weights: &[f64; OUTCOMES], u: f64) -> usize {
    let mut cum = 0.0;
    let mut last = 0;
    for (k, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        cum += w;
        last = k;
        if u < cum {
            return k;
        }
    }
    last
}

fn play(cfg: &SimConfig<'_>, model: &MoveModel<'_>, start: (usize, usize), trial: u64) -> Ending {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial);
    let g = cfg.graph;
    let weights = cfg.spinner.weights();
    let (mut cop, mut robber) = start;
    let mut buf = Vec::new();
    for round in 1..=cfg.max_rounds {
        match pick_outcome(&weights, rng.random::<f64>()) {
            0 => {
                model.cop_targets(cop, robber, &mut buf);
                cop = buf[rng.random_range(0..buf.len())];
            }
            1 => {
                model.robber_targets(cop, robber, &mut buf);
                robber = buf[rng.random_range(0..buf.len())];
            }
            2 => {
                let nb = g.neighbors(cop);
                cop = nb[rng.random_range(0..nb.len())];
            }
            _ => {
                let nb = g.neighbors(robber);
                robber = nb[rng.random_range(0..nb.len())];
            }
        }
        if cop == robber {
            return Ending::Capture(round);
        }
        if cfg
            .call_off
            .is_some_and(|limit| g.distance(cop, robber) >= limit)
        {
            return Ending::Escape(round);
        }
    }
    Ending::Censored
}

pub fn run(cfg: &SimConfig<'_>) -> Result<SimReport> {
    if cfg.trials == 0 || cfg.max_rounds == 0 {
        return Err(Error::InvalidParameter(
            "trials and max_rounds must be positive".into(),
        ));
    }
    let start = cfg.positions()?;
    let model = MoveModel::new(cfg.graph, cfg.rules);
    let endings: Vec<Ending> = (0..cfg.trials)
        .into_par_iter()
        .map(|k| play(cfg, &model, start, k))
        .collect();

    let max = cfg.max_rounds as usize;
    let mut ended_at = vec![0u64; max + 1];
    let (mut captures, mut escapes, mut censored) = (0u64, 0u64, 0u64);
    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    for e in &endings {
        let round = match *e {
            Ending::Capture(r) => {
                captures += 1;
                r
            }
            Ending::Escape(r) => {
                escapes += 1;
                r
            }
            Ending::Censored => {
                censored += 1;
                continue;
            }
        };
        ended_at[round as usize] += 1;
        let x = f64::from(round);
        sum += x;
        sum_sq += x * x;
    }

    let n = cfg.trials;
    let mut alive = n;
    let mut survival = Vec::with_capacity(max + 1);
    for ended in &ended_at {
        alive -= ended;
        survival.push(Estimate::proportion(alive, n));
    }

    let finished = n - censored;
    let mean_rounds = if finished == 0 {
        Estimate {
            mean: f64::NAN,
            std_error: f64::NAN,
        }
    } else {
        let k = finished as f64;
        let mean = sum / k;
        let var = if finished > 1 {
            ((sum_sq - k * mean * mean) / (k - 1.0)).max(0.0)
        } else {
            0.0
        };
        Estimate {
            mean,
            std_error: (var / k).sqrt(),
        }
    };

    Ok(SimReport {
        trials: n,
        survival,
        mean_rounds,
        mean_is_lower_bound: censored > 0,
        censored_fraction: censored as f64 / n as f64,
        capture_fraction: captures as f64 / n as f64,
        escape_fraction: escapes as f64 / n as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle, petersen};

    #[test]
    fn sober_cop_takes_exactly_d_rounds() {
        let g = petersen().unwrap();
        let s = SpinnerFour::new(1.0, 0.0, 0.0, 0.0).unwrap();
        let mut cfg = SimConfig::new(&g, s, Start::Distance(2));
        cfg.trials = 200;
        let rep = run(&cfg).unwrap();
        assert_eq!(rep.mean_rounds.mean, 2.0);
        assert_eq!(rep.mean_rounds.std_error, 0.0);
        assert_eq!(rep.survival[1].mean, 1.0);
        assert_eq!(rep.survival[2].mean, 0.0);
        assert_eq!(rep.capture_fraction, 1.0);
    }

    #[test]
    fn same_start_is_rejected() {
        let g = cycle(5).unwrap();
        let s = SpinnerFour::new(0.25, 0.25, 0.25, 0.25).unwrap();
        let cfg = SimConfig::new(&g, s, Start::Positions { cop: 2, robber: 2 });
        assert!(matches!(run(&cfg), Err(Error::InvalidStart(2))));
    }

    #[test]
    fn censoring_is_reported() {
        let g = cycle(6).unwrap();
        let s = SpinnerFour::new(0.0, 1.0, 0.0, 0.0).unwrap();
        let mut cfg = SimConfig::new(&g, s, Start::Distance(1));
        cfg.trials = 50;
        cfg.max_rounds = 10;
        let rep = run(&cfg).unwrap();
        assert_eq!(rep.censored_fraction, 1.0);
        assert_eq!(rep.survival[10].mean, 1.0);
        assert!(rep.mean_is_lower_bound);
    }

    #[test]
    fn outcome_picker_skips_empty_outcomes() {
        let w = [0.5, 0.0, 0.5, 0.0];
        assert_eq!(pick_outcome(&w, 0.2), 0);
        assert_eq!(pick_outcome(&w, 0.7), 2);
        assert_eq!(pick_outcome(&w, 0.999_999_999_999), 2);
    }
}
