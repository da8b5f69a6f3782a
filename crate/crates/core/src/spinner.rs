//! Per-round outcome distributions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SUM_TOLERANCE: f64 = 1e-12;

fn check_probability(name: &str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) || value.is_nan() {
        return Err(Error::InvalidParameter(format!(
            "spinner component {name} = {value} is outside [0, 1]"
        )));
    }
    Ok(())
}

fn check_sum(sum: f64) -> Result<()> {
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::InvalidParameter(format!(
            "spinner components sum to {sum}, not 1"
        )));
    }
    Ok(())
}

/// Spinner for vertex-transitive graphs: sober cop `c`, sober robber `r`,
/// and a tipsy move `t` by either player.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinnerThree {
    c: f64,
    r: f64,
    t: f64,
}

impl SpinnerThree {
    pub fn new(c: f64, r: f64, t: f64) -> Result<Self> {
        check_probability("c", c)?;
        check_probability("r", r)?;
        check_probability("t", t)?;
        check_sum(c + r + t)?;
        Ok(Self { c, r, t })
    }

    /// Splits the sober mass `1 - t` between robber (`robber_share`) and cop.
    pub fn from_split(t: f64, robber_share: f64) -> Result<Self> {
        check_probability("robber_share", robber_share)?;
        check_probability("t", t)?;
        let sober = 1.0 - t;
        Self::new((1.0 - robber_share) * sober, robber_share * sober, t)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Splits tipsy moves evenly between the players.
    pub fn to_four(self) -> SpinnerFour {
        SpinnerFour {
            c: self.c,
            r: self.r,
            t_c: self.t / 2.0,
            t_r: self.t / 2.0,
        }
    }
}

/// Spinner with separate tipsy outcomes for each player, needed on graphs
/// that are not vertex-transitive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinnerFour {
    c: f64,
    r: f64,
    t_c: f64,
    t_r: f64,
}

impl SpinnerFour {
    pub fn new(c: f64, r: f64, t_c: f64, t_r: f64) -> Result<Self> {
        check_probability("c", c)?;
        check_probability("r", r)?;
        check_probability("t_c", t_c)?;
        check_probability("t_r", t_r)?;
        check_sum(c + r + t_c + t_r)?;
        Ok(Self { c, r, t_c, t_r })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn t_c(&self) -> f64 {
        self.t_c
    }

    pub fn t_r(&self) -> f64 {
        self.t_r
    }

    /// Outcome weights in the order sober cop, sober robber, tipsy cop, tipsy robber.
    pub fn weights(&self) -> [f64; 4] {
        [self.c, self.r, self.t_c, self.t_r]
    }
}
