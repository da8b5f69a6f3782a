//! Absorbing Markov chains: validation, M-step probabilities, survival,
//! expected absorption time and the absorption split.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Row sums must equal 1 within this tolerance.
pub const STOCHASTIC_TOLERANCE: f64 = 1e-9;
/// Absorption mass below `1 - DIVERGENCE_TOLERANCE` counts as divergent.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-9;

/// Row access shared by dense chains and the sparse joint-position chain.
pub trait TransitionRows {
    fn state_count(&self) -> usize;
    fn state_label(&self, i: usize) -> String;
    fn is_absorbing(&self, i: usize) -> bool;
    /// Calls `f(j, p)` for each non-zero entry of row `i`.
    fn for_each_transition(&self, i: usize, f: &mut dyn FnMut(usize, f64));
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    labels: Vec<String>,
    p: Matrix,
    absorbing: Vec<usize>,
}

impl MarkovChain {
    /// Builds and validates a chain. `absorbing` may be given in any order.
    pub fn new<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        p: Matrix,
        absorbing: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if !p.is_square() || p.rows() != labels.len() {
            return Err(Error::InvalidParameter(format!(
                "{} labels for a {}x{} matrix",
                labels.len(),
                p.rows(),
                p.cols()
            )));
        }
        let mut absorbing: Vec<usize> = absorbing.into_iter().collect();
        absorbing.sort_unstable();
        absorbing.dedup();
        if let Some(&bad) = absorbing.iter().find(|&&i| i >= labels.len()) {
            return Err(Error::InvalidState {
                state: bad,
                len: labels.len(),
            });
        }
        let chain = Self {
            labels,
            p,
            absorbing,
        };
        chain.validate()?;
        Ok(chain)
    }

    pub fn from_rows<S: Into<String>, R: AsRef<[f64]>>(
        labels: impl IntoIterator<Item = S>,
        rows: &[R],
        absorbing: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        Self::new(labels, Matrix::from_rows(rows), absorbing)
    }

    /// Checks entry ranges, row sums and that declared absorbing rows are unit rows.
    ///
    /// A unit row that is not declared absorbing is allowed: it models a trap in
    /// which the game never ends, and surfaces as an infinite expectation.
    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            let row = self.p.row(i);
            if let Some(&x) = row.iter().find(|x| !(-0.0..=1.0).contains(*x)) {
                return Err(Error::NotStochastic { row: i, sum: x });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOLERANCE {
                return Err(Error::NotStochastic { row: i, sum });
            }
        }
        for &a in &self.absorbing {
            let row = self.p.row(a);
            let unit = row.iter().enumerate().all(|(j, &x)| {
                if j == a {
                    (x - 1.0).abs() <= STOCHASTIC_TOLERANCE
                } else {
                    x == 0.0
                }
            });
            if !unit {
                return Err(Error::InconsistentAbsorbing { state: a });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> &Matrix {
        &self.p
    }

    pub fn absorbing(&self) -> &[usize] {
        &self.absorbing
    }

    pub fn is_absorbing(&self, i: usize) -> bool {
        self.absorbing.binary_search(&i).is_ok()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    fn check_state(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(Error::InvalidState {
                state: i,
                len: self.len(),
            });
        }
        Ok(())
    }
}

impl TransitionRows for MarkovChain {
    fn state_count(&self) -> usize {
        self.len()
    }

    fn state_label(&self, i: usize) -> String {
        self.labels[i].clone()
    }

    fn is_absorbing(&self, i: usize) -> bool {
        MarkovChain::is_absorbing(self, i)
    }

    fn for_each_transition(&self, i: usize, f: &mut dyn FnMut(usize, f64)) {
        for (j, &x) in self.p.row(i).iter().enumerate() {
            if x != 0.0 {
                f(j, x);
            }
        }
    }
}

pub fn validate(chain: &MarkovChain) -> Result<()> {
    chain.validate()
}

/// `e_i P^M e_j`.
pub fn transition_probability(chain: &MarkovChain, i: usize, j: usize, m: u64) -> Result<f64> {
    chain.check_state(i)?;
    chain.check_state(j)?;
    if m > 64 {
        return Ok(chain.p.pow(m)[(i, j)]);
    }
    let mut v = vec![0.0; chain.len()];
    v[i] = 1.0;
    for _ in 0..m {
        v = chain.p.vec_mul(&v);
    }
    Ok(v[j])
}

/// The chain restricted to its transient states.
#[derive(Debug, Clone, PartialEq)]
pub struct TransientSystem {
    labels: Vec<String>,
    t: Matrix,
    r: Matrix,
    absorbing_labels: Vec<String>,
}

impl TransientSystem {
    /// Assembles a system directly from its blocks; rows of `[T | R]` must sum to 1.
    pub fn from_blocks(
        labels: Vec<String>,
        t: Matrix,
        r: Matrix,
        absorbing_labels: Vec<String>,
    ) -> Result<Self> {
        let k = labels.len();
        if !t.is_square() || t.rows() != k || r.rows() != k || r.cols() != absorbing_labels.len() {
            return Err(Error::InvalidParameter(
                "transient blocks have inconsistent shapes".into(),
            ));
        }
        for i in 0..k {
            let sum = t.row_sum(i) + r.row_sum(i);
            if (sum - 1.0).abs() > STOCHASTIC_TOLERANCE {
                return Err(Error::NotStochastic { row: i, sum });
            }
        }
        Ok(Self {
            labels,
            t,
            r,
            absorbing_labels,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn t(&self) -> &Matrix {
        &self.t
    }

    pub fn r(&self) -> &Matrix {
        &self.r
    }

    pub fn absorbing_labels(&self) -> &[String] {
        &self.absorbing_labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Transient index for `label`, or `InvalidParameter` naming the label.
    pub fn state(&self, label: &str) -> Result<usize> {
        self.index_of(label).ok_or_else(|| {
            Error::InvalidParameter(format!("no transient state labelled `{label}`"))
        })
    }

    fn check_state(&self, d: usize) -> Result<()> {
        if d >= self.len() {
            return Err(Error::InvalidState {
                state: d,
                len: self.len(),
            });
        }
        Ok(())
    }

    /// Transient states reachable from `d` (including `d`) along positive entries of `T`.
    fn reachable_from(&self, d: usize) -> Vec<bool> {
        let k = self.len();
        let mut seen = vec![false; k];
        let mut queue = VecDeque::from([d]);
        seen[d] = true;
        while let Some(i) = queue.pop_front() {
            for (j, &x) in self.t.row(i).iter().enumerate() {
                if x > 0.0 && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen
    }

    /// Transient states with a positive-probability path into some absorbing state.
    fn can_absorb(&self) -> Vec<bool> {
        let k = self.len();
        let mut good: Vec<bool> = (0..k)
            .map(|i| self.r.row(i).iter().any(|&x| x > 0.0))
            .collect();
        let mut queue: VecDeque<usize> = (0..k).filter(|&i| good[i]).collect();
        while let Some(j) = queue.pop_front() {
            for (i, g) in good.iter_mut().enumerate() {
                if !*g && self.t[(i, j)] > 0.0 {
                    *g = true;
                    queue.push_back(i);
                }
            }
        }
        good
    }
}

pub fn extract_transient(chain: &MarkovChain) -> Result<TransientSystem> {
    let transient: Vec<usize> = (0..chain.len())
        .filter(|&i| !chain.is_absorbing(i))
        .collect();
    if transient.is_empty() {
        return Err(Error::NoTransientStates);
    }
    let absorbing = chain.absorbing().to_vec();
    Ok(TransientSystem {
        labels: transient.iter().map(|&i| chain.labels[i].clone()).collect(),
        t: chain.p.select(&transient, &transient),
        r: chain.p.select(&transient, &absorbing),
        absorbing_labels: absorbing.iter().map(|&i| chain.labels[i].clone()).collect(),
    })
}

/// `e_d T^M 1`: probability of still being transient after `M` rounds.
pub fn survival_probability(ts: &TransientSystem, d: usize, m: u64) -> Result<f64> {
    ts.check_state(d)?;
    if m > 64 {
        return Ok(ts.t.pow(m).row_sum(d));
    }
    Ok(survival_curve(ts, d, m as usize)?[m as usize])
}

/// Survival probabilities for `M = 0..=max_m`.
pub fn survival_curve(ts: &TransientSystem, d: usize, max_m: usize) -> Result<Vec<f64>> {
    ts.check_state(d)?;
    let mut v = vec![0.0; ts.len()];
    v[d] = 1.0;
    let mut out = Vec::with_capacity(max_m + 1);
    out.push(1.0);
    for _ in 0..max_m {
        v = ts.t.vec_mul(&v);
        out.push(v.iter().sum());
    }
    Ok(out)
}

/// Expected number of rounds, or the reason it is infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Expectation {
    Finite(f64),
    Infinite { note: String },
}

impl Expectation {
    pub fn infinite(note: impl Into<String>) -> Self {
        Expectation::Infinite { note: note.into() }
    }

    /// The value as a float, `f64::INFINITY` when infinite.
    pub fn value(&self) -> f64 {
        match self {
            Expectation::Finite(x) => *x,
            Expectation::Infinite { .. } => f64::INFINITY,
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            Expectation::Finite(x) => Some(*x),
            Expectation::Infinite { .. } => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Expectation::Infinite { .. })
    }

    pub fn note(&self) -> Option<&str> {
        match self {
            Expectation::Finite(_) => None,
            Expectation::Infinite { note } => Some(note),
        }
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expectation::Finite(x) => write!(f, "{x}"),
            Expectation::Infinite { .. } => write!(f, "inf"),
        }
    }
}

/// `e_d (I - T)^{-1} 1`.
///
/// The linear solve is restricted to the states reachable from `d`. If any of
/// them cannot reach an absorbing state, or the total absorption mass from `d`
/// falls short of 1, the expectation is infinite.
pub fn expected_rounds(ts: &TransientSystem, d: usize) -> Result<Expectation> {
    ts.check_state(d)?;
    let reach = ts.reachable_from(d);
    let absorbable = ts.can_absorb();
    if let Some(trap) = (0..ts.len()).find(|&i| reach[i] && !absorbable[i]) {
        return Ok(Expectation::infinite(format!(
            "state {} is reachable but cannot reach an absorbing state",
            ts.labels[trap]
        )));
    }
    let sub: Vec<usize> = (0..ts.len()).filter(|&i| reach[i]).collect();
    let pos = sub.iter().position(|&i| i == d).expect("d reaches itself");
    let a = ts.t.select(&sub, &sub).identity_minus();
    let Some(lu) = a.lu() else {
        return Ok(Expectation::infinite("I - T is numerically singular"));
    };
    let exits: Vec<f64> = sub.iter().map(|&i| ts.r.row_sum(i)).collect();
    let absorbed = lu.solve(&exits)[pos];
    if absorbed < 1.0 - DIVERGENCE_TOLERANCE {
        return Ok(Expectation::infinite(format!(
            "absorption probability is only {absorbed}"
        )));
    }
    let x = lu.solve(&vec![1.0; sub.len()]);
    Ok(Expectation::Finite(x[pos].max(0.0)))
}

/// Absorption probabilities into each retained absorbing state, in label order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionSplit {
    pub entries: Vec<(String, f64)>,
}

impl AbsorptionSplit {
    pub fn get(&self, label: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|(l, _)| l == label)
            .map(|&(_, p)| p)
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }
}

/// Row `d` of `(I - T)^{-1} R`. Returns `Divergent` carrying the partial split
/// when less than `1 - 1e-9` of the mass is absorbed.
pub fn absorption_split(ts: &TransientSystem, d: usize) -> Result<AbsorptionSplit> {
    ts.check_state(d)?;
    if ts.absorbing_labels.is_empty() {
        return Err(Error::InvalidParameter(
            "chain has no absorbing states".into(),
        ));
    }
    let reach = ts.reachable_from(d);
    let absorbable = ts.can_absorb();
    let mut probs = vec![0.0; ts.absorbing_labels.len()];
    if absorbable[d] {
        let sub: Vec<usize> = (0..ts.len())
            .filter(|&i| reach[i] && absorbable[i])
            .collect();
        let pos = sub
            .iter()
            .position(|&i| i == d)
            .expect("d is in its own class");
        let a = ts.t.select(&sub, &sub).identity_minus();
        let lu = a.lu().ok_or_else(|| {
            Error::InvalidParameter("I - T is numerically singular on the absorbable states".into())
        })?;
        let cols: Vec<usize> = (0..ts.absorbing_labels.len()).collect();
        let y = lu.solve_matrix(&ts.r.select(&sub, &cols));
        for (k, p) in probs.iter_mut().enumerate() {
            *p = y[(pos, k)].clamp(0.0, 1.0);
        }
    }
    let split = AbsorptionSplit {
        entries: ts.absorbing_labels.iter().cloned().zip(probs).collect(),
    };
    let total = split.total();
    if total < 1.0 - DIVERGENCE_TOLERANCE {
        return Err(Error::Divergent { split, total });
    }
    Ok(split)
}
