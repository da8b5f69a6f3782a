//! Hand-derived distance-state chains for each graph family.
//!
//! State 0 is capture throughout. Labels match the conventional names:
//! distances `"0".."k"` for cycles, Petersen and trees, `"2" "1cc" "1rc" "1e" "0"`
//! for friendship graphs and component distances `"(a,b)"` for the 7×7 torus.

use crate::chain::MarkovChain;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::spinner::{SpinnerFour, SpinnerThree};

pub const FRIENDSHIP_LABELS: [&str; 5] = ["2", "1cc", "1rc", "1e", "0"];

pub const TORUS7_LABELS: [&str; 10] = [
    "(3,3)", "(3,2)", "(3,1)", "(3,0)", "(2,2)", "(2,1)", "(2,0)", "(1,1)", "(1,0)", "0",
];

fn distance_labels(max: usize) -> Vec<String> {
    (0..=max).map(|d| d.to_string()).collect()
}

/// Birth–death chain over `0..=k` with per-row `(down, stay, up)` weights for rows `1..=k`.
pub(crate) fn birth_death(
    k: usize,
    rows: impl Fn(usize) -> (f64, f64, f64),
    top_absorbing: bool,
) -> Result<MarkovChain> {
    let mut p = Matrix::zeros(k + 1, k + 1);
    p[(0, 0)] = 1.0;
    let last = if top_absorbing { k - 1 } else { k };
    for d in 1..=last {
        let (down, stay, up) = rows(d);
        p[(d, d - 1)] += down;
        p[(d, d)] += stay;
        if up != 0.0 {
            p[(d, d + 1)] += up;
        }
    }
    let mut absorbing = vec![0];
    if top_absorbing {
        p[(k, k)] = 1.0;
        absorbing.push(k);
    }
    MarkovChain::new(distance_labels(k), p, absorbing)
}

/// Cycle `C_n` with states `0..=n/2`.
///
/// Even `n`: at the antipode both robber moves shrink the distance, so a sober
/// robber stays and any tipsy move closes in. Odd `n`: one robber move keeps
/// the maximum distance.
pub fn cycle_chain(n: usize, s: SpinnerThree) -> Result<MarkovChain> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "cycle chain needs n >= 3, got {n}"
        )));
    }
    let (c, r, t) = (s.c(), s.r(), s.t());
    let k = n / 2;
    birth_death(
        k,
        |d| {
            if d < k {
                (c + t / 2.0, 0.0, r + t / 2.0)
            } else if n.is_multiple_of(2) {
                (c + t, r, 0.0)
            } else {
                (c + t / 2.0, r + t / 2.0, 0.0)
            }
        },
        false,
    )
}

pub fn petersen_chain(s: SpinnerThree) -> Result<MarkovChain> {
    let (c, r, t) = (s.c(), s.r(), s.t());
    let stay = r + 2.0 * t / 3.0;
    MarkovChain::from_rows(
        distance_labels(2),
        &[
            [1.0, 0.0, 0.0],
            [c + t / 3.0, 0.0, stay],
            [0.0, c + t / 3.0, stay],
        ],
        [0],
    )
}

/// Friendship graph with `n` triangles; states in [`FRIENDSHIP_LABELS`] order.
///
/// `1cc`: adjacent, cop on the hub. `1rc`: adjacent, robber on the hub.
/// `1e`: both on the same triangle's outer edge.
pub fn friendship_chain(n: usize, s: SpinnerFour) -> Result<MarkovChain> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "friendship chain needs at least 2 triangles, got {n}"
        )));
    }
    let [c, r, tc, tr] = s.weights();
    let nf = n as f64;
    let rows = [
        [r + tc / 2.0 + tr / 2.0, c + tc / 2.0, tr / 2.0, 0.0, 0.0],
        [
            tc * (nf - 1.0) / nf,
            r + tr / 2.0,
            0.0,
            tc / (2.0 * nf),
            c + tc / (2.0 * nf) + tr / 2.0,
        ],
        [
            r + tr * (nf - 1.0) / nf,
            0.0,
            tc / 2.0,
            tr / (2.0 * nf),
            c + tr / (2.0 * nf) + tc / 2.0,
        ],
        [0.0, tc / 2.0, r + tr / 2.0, 0.0, c + tc / 2.0 + tr / 2.0],
        [0.0, 0.0, 0.0, 0.0, 1.0],
    ];
    MarkovChain::from_rows(FRIENDSHIP_LABELS, &rows, [4])
}

/// The 7×7 torus, states are the sorted per-axis distances in [`TORUS7_LABELS`] order.
pub fn toroidal7_chain(s: SpinnerThree) -> Result<MarkovChain> {
    let (c, r, t) = (s.c(), s.r(), s.t());
    let (h, q) = (t / 2.0, t / 4.0);
    let rows = [
        [r + h, c + h, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [r + q, q, q, 0.0, c + q, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, r + q, q, q, 0.0, c + q, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, r + h, q, 0.0, 0.0, c + q, 0.0, 0.0, 0.0],
        [0.0, r + h, 0.0, 0.0, 0.0, c + h, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, r + q, 0.0, q, 0.0, q, c + q, 0.0, 0.0],
        [0.0, 0.0, 0.0, r + q, 0.0, h, 0.0, 0.0, c + q, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, r + h, 0.0, 0.0, c + h, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, r + q, h, 0.0, c + q],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
    ];
    MarkovChain::from_rows(TORUS7_LABELS, &rows, [9])
}

/// Up-step probability on the `degree`-regular tree.
pub fn tree_up_probability(degree: usize, s: SpinnerThree) -> f64 {
    let delta = degree as f64;
    s.t() * (delta - 1.0) / delta + s.r()
}

/// Regular tree with call-off distance `max_dist`: states `0..=max_dist`, both ends absorbing.
pub fn tree_chain(degree: usize, max_dist: usize, s: SpinnerThree) -> Result<MarkovChain> {
    if degree < 2 || max_dist < 2 {
        return Err(Error::InvalidParameter(format!(
            "tree chain needs degree >= 2 and call-off distance >= 2, got ({degree}, {max_dist})"
        )));
    }
    let delta = degree as f64;
    let down = s.c() + s.t() / delta;
    let up = s.r() + s.t() * (delta - 1.0) / delta;
    birth_death(max_dist, |_| (down, 0.0, up), true)
}
