//! Gambler's-ruin formulas for the game on regular trees.
//!
//! With up-step probability `p` and call-off distance `n`, write `q = 1 - p`
//! and `ρ = q / p`. Then
//!
//! ```text
//! R(d) = (1 - ρ^d) / (1 - ρ^n)        (fair case: d / n)
//! E(d) = (d - n·R(d)) / (1 - 2p)       (fair case: d(n - d))
//! ```
//!
//! Both are evaluated through `x = ln ρ` so that no power over- or underflows.
//! Close to `p = 1/2` the numerator `d - n·R(d)` cancels badly, so while
//! `|n·x|` is small it is expanded as a series with the common factor
//! `(n - d)·x` pulled out.

use serde::{Deserialize, Serialize};

use crate::chain::Expectation;
use crate::error::{Error, Result};
use crate::families::tree_up_probability;
use crate::spinner::SpinnerThree;

/// Below this distance from 1/2 the fair-game formulas are used.
pub const FAIR_BAND: f64 = 1e-9;
/// Below this `|n·ln ρ|` the expected-rounds numerator is summed as a series.
const SERIES_BELOW: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeGameParams {
    pub degree: usize,
    pub spinner: SpinnerThree,
    pub max_dist: usize,
}

impl TreeGameParams {
    pub fn new(degree: usize, spinner: SpinnerThree, max_dist: usize) -> Result<Self> {
        if degree < 2 {
            return Err(Error::InvalidParameter(format!(
                "tree degree must be >= 2, got {degree}"
            )));
        }
        if max_dist < 2 {
            return Err(Error::InvalidParameter(format!(
                "call-off distance must be >= 2, got {max_dist}"
            )));
        }
        Ok(Self {
            degree,
            spinner,
            max_dist,
        })
    }

    pub fn p(&self) -> f64 {
        up_probability(self.degree, self.spinner)
    }
}

/// `p = t(Δ-1)/Δ + r`.
pub fn up_probability(degree: usize, s: SpinnerThree) -> f64 {
    tree_up_probability(degree, s)
}

fn check(d: usize, n: usize, p: f64) -> Result<()> {
    if n < 2 || d < 1 || d >= n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= d <= n-1, got d={d}, n={n}"
        )));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "up probability must lie in (0, 1), got {p}"
        )));
    }
    Ok(())
}

fn is_fair(p: f64) -> bool {
    (p - 0.5).abs() < FAIR_BAND
}

/// `ln(q / p)`, accurate near `p = 1/2`.
fn log_rho(p: f64) -> f64 {
    ((1.0 - 2.0 * p) / p).ln_1p()
}

/// `R(d) = (1 - ρ^d) / (1 - ρ^n)` from `x = ln ρ`, with the dominant power factored out.
fn ruin_ratio(d: usize, n: usize, x: f64) -> f64 {
    let (df, nf) = (d as f64, n as f64);
    if x < 0.0 {
        (df * x).exp_m1() / (nf * x).exp_m1()
    } else {
        ((df - nf) * x).exp() * (-df * x).exp_m1() / (-nf * x).exp_m1()
    }
}

/// `d - n·R(d)`.
///
/// With `f(y) = (e^y - 1)/y`, `a = n·x` and `b = d·x` this is `d·(f(a) - f(b))/f(a)`,
/// and `f(a) - f(b) = (a - b)·Σ_k h_k/(k+1)!` where `h_k = (a^k - b^k)/(a - b)`.
fn ruin_gap(d: usize, n: usize, x: f64) -> f64 {
    let (df, nf) = (d as f64, n as f64);
    let (a, b) = (nf * x, df * x);
    if a.abs() >= SERIES_BELOW {
        return df - nf * ruin_ratio(d, n, x);
    }
    let (mut h, mut b_pow, mut fact) = (1.0, 1.0, 2.0);
    let mut sum = 0.5;
    for k in 2..60 {
        b_pow *= b;
        h = a * h + b_pow;
        fact *= (k + 1) as f64;
        let term = h / fact;
        sum += term;
        if term.abs() <= f64::EPSILON * 1e-3 * sum.abs() {
            break;
        }
    }
    let fa = if a == 0.0 { 1.0 } else { a.exp_m1() / a };
    df * (nf - df) * x * sum / fa
}

/// Expected rounds until the robber is caught or reaches distance `n`.
pub fn expected_rounds_closed(d: usize, n: usize, p: f64) -> Result<Expectation> {
    check(d, n, p)?;
    let (df, nf) = (d as f64, n as f64);
    if is_fair(p) {
        return Ok(Expectation::Finite(df * (nf - df)));
    }
    let e = ruin_gap(d, n, log_rho(p)) / (1.0 - 2.0 * p);
    Ok(Expectation::Finite(e.max(0.0)))
}

/// Expected rounds when the cop never gives up: `d / (1 - 2p)` for `p < 1/2`.
pub fn expected_rounds_unbounded(d: usize, degree: usize, s: SpinnerThree) -> Expectation {
    let p = up_probability(degree, s);
    if p < 0.5 {
        Expectation::Finite(d as f64 / (1.0 - 2.0 * p))
    } else {
        Expectation::infinite(format!("robber drifts away: p = {p} >= 1/2"))
    }
}

/// Limit of [`expected_rounds_unbounded`] as the degree grows: `d / (2c - 1)` for `c > 1/2`.
pub fn expected_rounds_unbounded_limit(d: usize, c: f64) -> Expectation {
    if c > 0.5 {
        Expectation::Finite(d as f64 / (2.0 * c - 1.0))
    } else {
        Expectation::infinite(format!("cop too weak in the limit: c = {c} <= 1/2"))
    }
}

/// Robber escape probability `R(d)` and capture probability `C(d) = 1 - R(d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WinProbabilities {
    pub escape: f64,
    pub capture: f64,
}

pub fn escape_probability(d: usize, n: usize, p: f64) -> Result<WinProbabilities> {
    check(d, n, p)?;
    let escape = if is_fair(p) {
        d as f64 / n as f64
    } else {
        ruin_ratio(d, n, log_rho(p)).clamp(0.0, 1.0)
    };
    Ok(WinProbabilities {
        escape,
        capture: 1.0 - escape,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn up_probability_cases() {
        let s = SpinnerThree::new(0.3, 0.4, 0.3).unwrap();
        assert!((up_probability(4, s) - 0.625).abs() < 1e-15);
        let sober = SpinnerThree::new(0.6, 0.4, 0.0).unwrap();
        assert_eq!(up_probability(7, sober), 0.4);
        let path = SpinnerThree::new(0.2, 0.3, 0.5).unwrap();
        assert!((up_probability(2, path) - (0.25 + 0.3)).abs() < 1e-15);
    }

    #[test]
    fn expected_rounds_examples() {
        let e1 = expected_rounds_closed(1, 10, 0.625).unwrap().value();
        assert!((e1 - 12.10).abs() < 0.01);
        let e9 = expected_rounds_closed(9, 10, 0.625).unwrap().value();
        assert!((e9 - 3.838).abs() < 1e-3);
        assert_eq!(
            expected_rounds_closed(5, 10, 0.5).unwrap(),
            Expectation::Finite(25.0)
        );
        assert!(expected_rounds_closed(0, 10, 0.4).is_err());
        assert!(expected_rounds_closed(10, 10, 0.4).is_err());
        assert!(expected_rounds_closed(3, 10, 1.0).is_err());
    }

    #[test]
    fn unbounded_examples() {
        // p = 0.4 via a sober spinner
        let s = SpinnerThree::new(0.6, 0.4, 0.0).unwrap();
        assert!((expected_rounds_unbounded(2, 3, s).value() - 10.0).abs() < 1e-12);
        let s = SpinnerThree::new(0.3, 0.4, 0.3).unwrap();
        assert!(expected_rounds_unbounded(2, 4, s).is_infinite());
        assert!((expected_rounds_unbounded_limit(3, 0.6).value() - 15.0).abs() < 1e-12);
        assert!(expected_rounds_unbounded_limit(3, 0.5).is_infinite());
    }

    #[test]
    fn escape_examples() {
        let w = escape_probability(1, 10, 0.625).unwrap();
        assert!((w.escape - 0.4024).abs() < 5e-4);
        let w = escape_probability(9, 10, 0.625).unwrap();
        assert!((w.escape - 0.9959).abs() < 5e-4);
        assert!((w.capture - 0.0041).abs() < 5e-4);
        let w = escape_probability(3, 10, 0.5).unwrap();
        assert!((w.escape - 0.3).abs() < 1e-15);
    }

    fn power_form(d: usize, n: usize, p: f64) -> (f64, f64) {
        let q = 1.0 - p;
        let (di, ni) = (d as i32, n as i32);
        let r = p.powi(ni - di) * (p.powi(di) - q.powi(di)) / (p.powi(ni) - q.powi(ni));
        (r, (d as f64 - n as f64 * r) / (1.0 - 2.0 * p))
    }

    #[test]
    fn agrees_with_power_form_away_from_fair() {
        for &p in &[0.1, 0.3, 0.45, 0.55, 0.7, 0.9] {
            for (d, n) in [
                (1usize, 2usize),
                (1, 10),
                (5, 10),
                (9, 10),
                (30, 60),
                (1, 200),
                (199, 200),
            ] {
                let (r, e) = power_form(d, n, p);
                let got_r = escape_probability(d, n, p).unwrap().escape;
                let got_e = expected_rounds_closed(d, n, p).unwrap().value();
                assert!((got_r - r).abs() < 1e-12, "R p={p} d={d} n={n}");
                assert!(
                    (got_e - e).abs() < 1e-9 * e.max(1.0),
                    "E p={p} d={d} n={n}: {got_e} vs {e}"
                );
            }
        }
    }

    #[test]
    fn continuous_across_fair_band() {
        for (d, n) in [
            (1usize, 2usize),
            (5, 10),
            (1, 10),
            (25, 50),
            (250, 499),
            (1000, 2000),
        ] {
            let fair = (d * (n - d)) as f64;
            for eps in [1.0000001e-9, 1e-8, 1e-7, 1e-6] {
                for p in [0.5 + eps, 0.5 - eps] {
                    let e = expected_rounds_closed(d, n, p).unwrap().value();
                    // |dE/dp| is at most about n^3 near p = 1/2
                    let slack = 1e-9 * fair + eps * (n as f64).powi(3);
                    assert!(
                        (e - fair).abs() <= slack,
                        "d={d} n={n} p={p}: {e} vs {fair}"
                    );
                }
            }
        }
    }

    #[test]
    fn huge_call_off_stays_finite() {
        let e = expected_rounds_closed(3, 100_000, 0.3).unwrap().value();
        assert!((e - 3.0 / 0.4).abs() < 1e-9);
        let w = escape_probability(99_990, 100_000, 0.7).unwrap();
        assert!(w.escape.is_finite() && w.escape > 0.999);
    }
}
