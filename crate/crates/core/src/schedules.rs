//! Tipsiness that changes with the round number or with the distance.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chain::{extract_transient, Expectation, MarkovChain};
use crate::error::{Error, Result};
use crate::families::birth_death;
use crate::linalg::Matrix;
use crate::spinner::SpinnerThree;

/// Share of the sober probability mass `1 - t` that goes to the robber.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoberSplit {
    robber_share: f64,
}

impl SoberSplit {
    pub fn new(robber_share: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&robber_share) {
            return Err(Error::InvalidParameter(format!(
                "robber share must lie in [0, 1], got {robber_share}"
            )));
        }
        Ok(Self { robber_share })
    }

    pub fn robber_share(&self) -> f64 {
        self.robber_share
    }

    pub fn spinner(&self, t: f64) -> Result<SpinnerThree> {
        SpinnerThree::from_split(t, self.robber_share)
    }
}

pub type CustomFn = Arc<dyn Fn(u32) -> f64 + Send + Sync>;

/// Tipsiness `f(m)` for round `m >= 1`.
#[derive(Clone)]
pub enum TimeSchedule {
    /// `a / (m + b)`.
    Hyperbolic {
        a: f64,
        b: f64,
    },
    /// `a / (2^m + b)`.
    Exponential {
        a: f64,
        b: f64,
    },
    Constant(f64),
    Custom {
        name: String,
        f: CustomFn,
    },
}

impl TimeSchedule {
    /// `4 / (m + 3)`.
    pub fn hyperbolic() -> Self {
        TimeSchedule::Hyperbolic { a: 4.0, b: 3.0 }
    }

    /// `4 / (2^m + 2)`.
    pub fn exponential() -> Self {
        TimeSchedule::Exponential { a: 4.0, b: 2.0 }
    }

    pub fn custom(name: impl Into<String>, f: impl Fn(u32) -> f64 + Send + Sync + 'static) -> Self {
        TimeSchedule::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn raw(&self, m: u32) -> f64 {
        let mf = f64::from(m);
        match self {
            TimeSchedule::Hyperbolic { a, b } => a / (mf + b),
            TimeSchedule::Exponential { a, b } => a / (2f64.powf(mf) + b),
            TimeSchedule::Constant(t) => *t,
            TimeSchedule::Custom { f, .. } => f(m),
        }
    }

    /// `f(m)`, rejected when outside `[0, 1]`.
    pub fn at(&self, m: u32) -> Result<f64> {
        let t = self.raw(m);
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::ScheduleOutOfRange { index: m, value: t });
        }
        Ok(t)
    }

    /// `lim f(m)`; custom schedules are sampled at `horizon`.
    pub fn limit(&self, horizon: u32) -> f64 {
        match self {
            TimeSchedule::Hyperbolic { .. } | TimeSchedule::Exponential { .. } => 0.0,
            TimeSchedule::Constant(t) => *t,
            TimeSchedule::Custom { f, .. } => f(horizon),
        }
    }

    /// Probes `f` on `1..=horizon`.
    pub fn check(&self, horizon: u32) -> Result<()> {
        (1..=horizon.max(1)).try_for_each(|m| self.at(m).map(drop))
    }

    /// Non-fatal departures from `f(1) = 1` and monotone decrease on `1..=horizon`.
    pub fn warnings(&self, horizon: u32) -> Vec<String> {
        let mut out = Vec::new();
        let first = self.raw(1);
        if (first - 1.0).abs() > 1e-12 {
            out.push(format!("schedule {self} has f(1) = {first}, not 1"));
        }
        if let Some(m) = (1..horizon).find(|&m| self.raw(m + 1) > self.raw(m) + 1e-15) {
            out.push(format!(
                "schedule {self} increases between rounds {m} and {}",
                m + 1
            ));
        }
        out
    }
}

impl fmt::Debug for TimeSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TimeSchedule({self})")
    }
}

impl fmt::Display for TimeSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeSchedule::Hyperbolic { a, b } => write!(f, "hyper:{a},{b}"),
            TimeSchedule::Exponential { a, b } => write!(f, "exp2:{a},{b}"),
            TimeSchedule::Constant(t) => write!(f, "const:{t}"),
            TimeSchedule::Custom { name, .. } => write!(f, "{name}"),
        }
    }
}

/// Tipsiness `δ(d)` at distance `d >= 1`, given the maximum distance `n`.
#[derive(Clone)]
pub enum DistanceSchedule {
    /// `(d - 1) / n`.
    Linear,
    /// `(1 - base^(1-d)) / (1 + base^(1-d))`.
    Logistic {
        base: f64,
    },
    Constant(f64),
    Custom {
        name: String,
        f: Arc<dyn Fn(usize, usize) -> f64 + Send + Sync>,
    },
}

impl DistanceSchedule {
    /// Logistic growth with base 1.2.
    pub fn exponential() -> Self {
        DistanceSchedule::Logistic { base: 1.2 }
    }

    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(usize, usize) -> f64 + Send + Sync + 'static,
    ) -> Self {
        DistanceSchedule::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn raw(&self, d: usize, max_dist: usize) -> f64 {
        match self {
            DistanceSchedule::Linear => (d as f64 - 1.0) / max_dist as f64,
            DistanceSchedule::Logistic { base } => {
                let x = base.powf(1.0 - d as f64);
                (1.0 - x) / (1.0 + x)
            }
            DistanceSchedule::Constant(t) => *t,
            DistanceSchedule::Custom { f, .. } => f(d, max_dist),
        }
    }

    pub fn at(&self, d: usize, max_dist: usize) -> Result<f64> {
        let t = self.raw(d, max_dist);
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::ScheduleOutOfRange {
                index: d as u32,
                value: t,
            });
        }
        Ok(t)
    }

    pub fn warnings(&self, max_dist: usize) -> Vec<String> {
        let mut out = Vec::new();
        let first = self.raw(1, max_dist);
        if first.abs() > 1e-12 {
            out.push(format!("schedule {self} has δ(1) = {first}, not 0"));
        }
        if let Some(d) =
            (1..max_dist).find(|&d| self.raw(d + 1, max_dist) + 1e-15 < self.raw(d, max_dist))
        {
            out.push(format!(
                "schedule {self} decreases between distances {d} and {}",
                d + 1
            ));
        }
        out
    }
}

impl fmt::Debug for DistanceSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DistanceSchedule({self})")
    }
}

impl fmt::Display for DistanceSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceSchedule::Linear => write!(f, "linear"),
            DistanceSchedule::Logistic { base } if *base == 1.2 => write!(f, "exp12"),
            DistanceSchedule::Logistic { base } => write!(f, "expb:{base}"),
            DistanceSchedule::Constant(t) => write!(f, "const:{t}"),
            DistanceSchedule::Custom { name, .. } => write!(f, "{name}"),
        }
    }
}

/// A parsed `--schedule` argument.
#[derive(Debug, Clone)]
pub enum Schedule {
    Time(TimeSchedule),
    Distance(DistanceSchedule),
}

impl FromStr for Schedule {
    type Err = Error;

    /// `linear`, `exp12`, `expb:<base>` (distance); `hyper:a,b`, `exp2:a,b` (time);
    /// `const:t` is a constant time schedule.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("schedule `{s}`: {why}"));
        let nums = |args: &str, n: usize| -> Result<Vec<f64>> {
            let v: Vec<f64> = args
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| bad("expected numbers")))
                .collect::<Result<_>>()?;
            if v.len() != n || v.iter().any(|x| !x.is_finite()) {
                return Err(bad(&format!("expected {n} finite number(s)")));
            }
            Ok(v)
        };
        let (head, args) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
        match head {
            "linear" if args.is_empty() => Ok(Schedule::Distance(DistanceSchedule::Linear)),
            "exp12" if args.is_empty() => Ok(Schedule::Distance(DistanceSchedule::exponential())),
            "expb" => {
                let base = nums(args, 1)?[0];
                if base <= 1.0 {
                    return Err(bad("base must exceed 1"));
                }
                Ok(Schedule::Distance(DistanceSchedule::Logistic { base }))
            }
            "hyper" => {
                let v = nums(args, 2)?;
                Ok(Schedule::Time(TimeSchedule::Hyperbolic {
                    a: v[0],
                    b: v[1],
                }))
            }
            "exp2" => {
                let v = nums(args, 2)?;
                Ok(Schedule::Time(TimeSchedule::Exponential {
                    a: v[0],
                    b: v[1],
                }))
            }
            "const" => Ok(Schedule::Time(TimeSchedule::Constant(nums(args, 1)?[0]))),
            _ => Err(bad("unknown form")),
        }
    }
}

/// A family builder over three-way spinners, e.g. `|s| cycle_chain(6, s)`.
pub type ChainBuilder<'a> = &'a dyn Fn(SpinnerThree) -> Result<MarkovChain>;

fn transient_at(builder: ChainBuilder<'_>, split: SoberSplit, t: f64) -> Result<Matrix> {
    Ok(extract_transient(&builder(split.spinner(t)?)?)?.t().clone())
}

fn check_dim(t: &Matrix, k: usize, d: usize) -> Result<()> {
    if t.rows() != k {
        return Err(Error::InvalidParameter(
            "builder changed the number of transient states".into(),
        ));
    }
    if d >= k {
        return Err(Error::InvalidState { state: d, len: k });
    }
    Ok(())
}

/// `e_d T_1 T_2 … T_M 1` with `T_m` built at `t = f(m)`.
pub fn time_varying_survival(
    builder: ChainBuilder<'_>,
    split: SoberSplit,
    sched: &TimeSchedule,
    d: usize,
    m: u32,
) -> Result<f64> {
    let k = transient_at(builder, split, sched.at(1)?)?.rows();
    if d >= k {
        return Err(Error::InvalidState { state: d, len: k });
    }
    let mut v = vec![0.0; k];
    v[d] = 1.0;
    for step in 1..=m {
        let t = transient_at(builder, split, sched.at(step)?)?;
        check_dim(&t, k, d)?;
        v = t.vec_mul(&v);
    }
    Ok(v.iter().sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesResult {
    pub value: Expectation,
    pub terms_used: u32,
    /// Estimated bound on the omitted tail, when the limiting chain makes one available.
    pub truncation_bound: Option<f64>,
    pub converged: bool,
}

/// Partial sums of `Σ_{n≥1} e_d (Π_{m<n} T_m) 1`.
///
/// The tail after `N` terms is estimated from the limiting spinner's matrix
/// `T_∞` with `k` transient states: when `ρ = ‖T_∞^k‖∞ < 1` the remaining sum
/// is at most `‖v_{N+1}‖₁ · k / (1 - ρ)`. Summation stops once that bound is
/// below `tol`. If `T_∞` is not absorbing from every state and the terms are
/// still at least `tol` after `n_max` of them, the expectation is infinite.
pub fn time_varying_expectation(
    builder: ChainBuilder<'_>,
    split: SoberSplit,
    sched: &TimeSchedule,
    d: usize,
    tol: f64,
    n_max: u32,
) -> Result<SeriesResult> {
    if tol.is_nan() || tol <= 0.0 || n_max < 1 {
        return Err(Error::InvalidParameter(
            "need tol > 0 and n_max >= 1".into(),
        ));
    }
    let t_lim = transient_at(builder, split, sched.limit(n_max).clamp(0.0, 1.0))?;
    let k = t_lim.rows();
    if d >= k {
        return Err(Error::InvalidState { state: d, len: k });
    }
    let rho = t_lim.pow(k as u64).norm_inf();
    let geometric = (rho < 1.0 - 1e-12).then(|| k as f64 / (1.0 - rho));

    let mut v = vec![0.0; k];
    v[d] = 1.0;
    let mut sum = 0.0;
    let mut last_term = 1.0;
    let mut bound = None;
    for n in 1..=n_max {
        last_term = v.iter().sum::<f64>();
        sum += last_term;
        let t = transient_at(builder, split, sched.at(n)?)?;
        check_dim(&t, k, d)?;
        v = t.vec_mul(&v);
        if let Some(g) = geometric {
            let b = v.iter().sum::<f64>() * g;
            bound = Some(b);
            if b < tol {
                return Ok(SeriesResult {
                    value: Expectation::Finite(sum),
                    terms_used: n,
                    truncation_bound: bound,
                    converged: true,
                });
            }
        }
    }
    if geometric.is_none() && last_term >= tol {
        return Ok(SeriesResult {
            value: Expectation::infinite(format!(
                "limiting chain is not absorbing and term {n_max} is still {last_term}"
            )),
            terms_used: n_max,
            truncation_bound: None,
            converged: false,
        });
    }
    Ok(SeriesResult {
        value: Expectation::Finite(sum),
        terms_used: n_max,
        truncation_bound: bound,
        converged: false,
    })
}

/// Which tipsiness the maximum-distance row of an even cycle uses.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryTipsiness {
    /// `δ(n)` for the row at distance `n`, like every other row.
    #[default]
    OwnDistance,
    /// `δ(n - 1)`, the convention under which the published distance tables were computed.
    PreviousDistance,
}

/// Cycle chain whose row `d` uses `t_d = δ(d)` and the sober split of `1 - t_d`.
pub fn distance_cycle_chain(
    n: usize,
    split: SoberSplit,
    sched: &DistanceSchedule,
    boundary: BoundaryTipsiness,
) -> Result<MarkovChain> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "cycle chain needs n >= 3, got {n}"
        )));
    }
    let k = n / 2;
    let mut rows = Vec::with_capacity(k);
    for d in 1..=k {
        let at = if d == k && boundary == BoundaryTipsiness::PreviousDistance && k > 1 {
            k - 1
        } else {
            d
        };
        let s = split.spinner(sched.at(at, k)?)?;
        let (c, r, t) = (s.c(), s.r(), s.t());
        rows.push(if d < k {
            (c + t / 2.0, 0.0, r + t / 2.0)
        } else if n.is_multiple_of(2) {
            (c + t, r, 0.0)
        } else {
            (c + t / 2.0, r + t / 2.0, 0.0)
        });
    }
    birth_death(k, |d| rows[d - 1], false)
}

/// Tree chain with call-off distance `max_dist` whose row `d` uses `t_d = δ(d)`.
pub fn distance_tree_chain(
    degree: usize,
    max_dist: usize,
    split: SoberSplit,
    sched: &DistanceSchedule,
) -> Result<MarkovChain> {
    if degree < 2 || max_dist < 2 {
        return Err(Error::InvalidParameter(format!(
            "tree chain needs degree >= 2 and call-off distance >= 2, got ({degree}, {max_dist})"
        )));
    }
    let delta = degree as f64;
    let mut rows = Vec::with_capacity(max_dist);
    for d in 1..max_dist {
        let s = split.spinner(sched.at(d, max_dist)?)?;
        rows.push((
            s.c() + s.t() / delta,
            0.0,
            s.r() + s.t() * (delta - 1.0) / delta,
        ));
    }
    birth_death(max_dist, |d| rows[d - 1], true)
}
