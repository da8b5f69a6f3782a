//! Exact chain over (cop, robber) positions and its lumping to distance states.
//!
//! Joint state `i` is `cop * V + robber`; states with `cop == robber` are capture.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{MarkovChain, TransitionRows, STOCHASTIC_TOLERANCE};
use crate::error::{Error, Result};
use crate::families::FRIENDSHIP_LABELS;
use crate::graph::Graph;
use crate::linalg::Matrix;
use crate::spinner::SpinnerFour;

pub const DEFAULT_STATE_CAP: usize = 1_000_000;
/// Aggregated rows within a class may differ by at most this much.
pub const LUMP_TOLERANCE: f64 = 1e-9;

/// How a sober player chooses among equally good neighbours.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TieBreak {
    /// Cop prefers the neighbours with the most shortest paths to the robber;
    /// robber prefers those with the fewest shortest paths to the cop. Remaining
    /// ties are uniform.
    #[default]
    Geodesic,
    /// Uniform over all distance-optimal neighbours.
    Uniform,
}

/// Sober cop: a neighbour minimising the distance to the robber.
/// Sober robber: stays put if every neighbour is strictly closer to the cop,
/// otherwise a neighbour maximising the distance.
/// Tipsy move: a uniform neighbour.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyRules {
    pub tie_break: TieBreak,
}

/// Move distributions for one graph under fixed strategy rules.
pub struct MoveModel<'g> {
    graph: &'g Graph,
    rules: StrategyRules,
    /// Saturating shortest-path counts, row-major; empty under uniform tie-breaking.
    geodesics: Vec<u64>,
}

impl<'g> MoveModel<'g> {
    pub fn new(graph: &'g Graph, rules: StrategyRules) -> Self {
        let geodesics = match rules.tie_break {
            TieBreak::Geodesic => geodesic_counts(graph),
            TieBreak::Uniform => Vec::new(),
        };
        Self {
            graph,
            rules,
            geodesics,
        }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn rules(&self) -> StrategyRules {
        self.rules
    }

    fn paths(&self, u: usize, v: usize) -> u64 {
        self.geodesics[u * self.graph.vertex_count() + v]
    }

    /// Vertices a sober cop at `cop` picks uniformly from.
    pub fn cop_targets(&self, cop: usize, robber: usize, out: &mut Vec<usize>) {
        out.clear();
        let g = self.graph;
        let to_robber = g.distances_from(robber);
        let best = g
            .neighbors(cop)
            .iter()
            .map(|&x| to_robber[x])
            .min()
            .expect("connected graph");
        out.extend(
            g.neighbors(cop)
                .iter()
                .copied()
                .filter(|&x| to_robber[x] == best),
        );
        if self.rules.tie_break == TieBreak::Geodesic && out.len() > 1 {
            let most = out
                .iter()
                .map(|&x| self.paths(x, robber))
                .max()
                .unwrap_or(0);
            out.retain(|&x| self.paths(x, robber) == most);
        }
    }

    /// Vertices a sober robber at `robber` picks uniformly from; `[robber]` when he stays.
    pub fn robber_targets(&self, cop: usize, robber: usize, out: &mut Vec<usize>) {
        out.clear();
        let g = self.graph;
        let to_cop = g.distances_from(cop);
        let here = to_cop[robber];
        let best = g
            .neighbors(robber)
            .iter()
            .map(|&y| to_cop[y])
            .max()
            .expect("connected graph");
        if best < here {
            out.push(robber);
            return;
        }
        out.extend(
            g.neighbors(robber)
                .iter()
                .copied()
                .filter(|&y| to_cop[y] == best),
        );
        if self.rules.tie_break == TieBreak::Geodesic && out.len() > 1 {
            let fewest = out.iter().map(|&y| self.paths(cop, y)).min().unwrap_or(0);
            out.retain(|&y| self.paths(cop, y) == fewest);
        }
    }
}

/// Number of shortest paths between every ordered pair, saturating at `u64::MAX`.
pub fn geodesic_counts(g: &Graph) -> Vec<u64> {
    let n = g.vertex_count();
    let mut counts = vec![0u64; n * n];
    let mut order: Vec<usize> = Vec::with_capacity(n);
    for s in 0..n {
        let dist = g.distances_from(s);
        order.clear();
        order.extend(0..n);
        order.sort_by_key(|&v| dist[v]);
        let row = &mut counts[s * n..(s + 1) * n];
        row[s] = 1;
        for &v in &order[1..] {
            row[v] = g
                .neighbors(v)
                .iter()
                .filter(|&&u| dist[u] + 1 == dist[v])
                .fold(0u64, |acc, &u| acc.saturating_add(row[u]));
        }
    }
    counts
}

/// Sparse joint-position chain.
#[derive(Debug, Clone, PartialEq)]
pub struct JointChain {
    vertices: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl JointChain {
    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn index(&self, cop: usize, robber: usize) -> usize {
        cop * self.vertices + robber
    }

    /// `(cop, robber)` for joint state `i`.
    pub fn positions(&self, i: usize) -> (usize, usize) {
        (i / self.vertices, i % self.vertices)
    }

    pub fn is_capture(&self, i: usize) -> bool {
        let (c, r) = self.positions(i);
        c == r
    }

    /// Non-zero entries of row `i`, sorted by column.
    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    /// Row sums equal 1, entries in `[0, 1]`, capture rows are unit rows.
    pub fn validate(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            if let Some(&(_, x)) = row.iter().find(|(_, x)| !(0.0..=1.0).contains(x)) {
                return Err(Error::NotStochastic { row: i, sum: x });
            }
            let sum: f64 = row.iter().map(|(_, x)| x).sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOLERANCE {
                return Err(Error::NotStochastic { row: i, sum });
            }
            if self.is_capture(i) && row != &[(i, 1.0)] {
                return Err(Error::InconsistentAbsorbing { state: i });
            }
        }
        Ok(())
    }

    /// Dense copy; only sensible for small graphs.
    pub fn to_markov_chain(&self) -> Result<MarkovChain> {
        let n = self.len();
        let mut p = Matrix::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, x) in row {
                p[(i, j)] = x;
            }
        }
        let labels = (0..n).map(|i| self.state_label(i));
        MarkovChain::new(labels, p, (0..n).filter(|&i| self.is_capture(i)))
    }
}

impl TransitionRows for JointChain {
    fn state_count(&self) -> usize {
        self.len()
    }

    fn state_label(&self, i: usize) -> String {
        let (c, r) = self.positions(i);
        format!("(cop {c}, robber {r})")
    }

    fn is_absorbing(&self, i: usize) -> bool {
        self.is_capture(i)
    }

    fn for_each_transition(&self, i: usize, f: &mut dyn FnMut(usize, f64)) {
        for &(j, x) in &self.rows[i] {
            f(j, x);
        }
    }
}

pub fn build_joint_chain(g: &Graph, s: SpinnerFour, rules: StrategyRules) -> Result<JointChain> {
    build_joint_chain_with_cap(g, s, rules, DEFAULT_STATE_CAP)
}

/// Each non-capture row mixes the four outcomes, each moving exactly one player.
/// Rows are built in parallel and collected in state order.
pub fn build_joint_chain_with_cap(
    g: &Graph,
    s: SpinnerFour,
    rules: StrategyRules,
    cap: usize,
) -> Result<JointChain> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "the game needs at least two vertices".into(),
        ));
    }
    let states = n.saturating_mul(n);
    if states > cap {
        return Err(Error::GraphTooLarge { states, cap });
    }
    let model = MoveModel::new(g, rules);
    let [c, r, tc, tr] = s.weights();
    let rows = (0..states)
        .into_par_iter()
        .map_init(Vec::new, |buf, i| {
            let (cop, robber) = (i / n, i % n);
            if cop == robber {
                return vec![(i, 1.0)];
            }
            let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
            let mut add = |j: usize, x: f64| {
                if x > 0.0 {
                    *acc.entry(j).or_insert(0.0) += x;
                }
            };
            model.cop_targets(cop, robber, buf);
            let w = c / buf.len() as f64;
            for &x in buf.iter() {
                add(x * n + robber, w);
            }
            let nb = g.neighbors(cop);
            for &x in nb {
                add(x * n + robber, tc / nb.len() as f64);
            }
            model.robber_targets(cop, robber, buf);
            let w = r / buf.len() as f64;
            for &y in buf.iter() {
                add(cop * n + y, w);
            }
            let nb = g.neighbors(robber);
            for &y in nb {
                add(cop * n + y, tr / nb.len() as f64);
            }
            acc.into_iter().collect()
        })
        .collect();
    Ok(JointChain { vertices: n, rows })
}

/// A partition of chain states into labelled classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lumping {
    labels: Vec<String>,
    class_of: Vec<usize>,
}

impl Lumping {
    pub fn new(labels: Vec<String>, class_of: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = class_of.iter().find(|&&c| c >= labels.len()) {
            return Err(Error::InvalidParameter(format!(
                "class index {bad} has no label"
            )));
        }
        Ok(Self { labels, class_of })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn class_of(&self, state: usize) -> usize {
        self.class_of[state]
    }

    pub fn class_label(&self, state: usize) -> &str {
        &self.labels[self.class_of[state]]
    }

    pub fn state_count(&self) -> usize {
        self.class_of.len()
    }

    /// The lowest-numbered state in the class called `label`.
    pub fn representative(&self, label: &str) -> Option<usize> {
        let k = self.labels.iter().position(|l| l == label)?;
        self.class_of.iter().position(|&c| c == k)
    }

    /// Classes `"0".."diameter"` by graph distance between the players.
    pub fn by_distance(g: &Graph) -> Self {
        let n = g.vertex_count();
        let labels = (0..=g.diameter()).map(|d| d.to_string()).collect();
        let class_of = (0..n * n)
            .map(|i| g.distance(i / n, i % n) as usize)
            .collect();
        Self { labels, class_of }
    }

    /// Classes `2, 1cc, 1rc, 1e, 0` on a friendship graph with hub `0`.
    pub fn friendship(g: &Graph) -> Self {
        let n = g.vertex_count();
        let class_of = (0..n * n)
            .map(|i| {
                let (c, r) = (i / n, i % n);
                match (c == r, g.distance(c, r), c, r) {
                    (true, ..) => 4,
                    (_, 2, ..) => 0,
                    (_, _, 0, _) => 1,
                    (_, _, _, 0) => 2,
                    _ => 3,
                }
            })
            .collect();
        Self {
            labels: FRIENDSHIP_LABELS.iter().map(|s| s.to_string()).collect(),
            class_of,
        }
    }

    /// Classes `(a,b)` of sorted per-axis distances on the `m × n` torus, largest first,
    /// with capture `"0"` last.
    pub fn torus(m: usize, n: usize) -> Self {
        let axis = |a: usize, b: usize, len: usize| {
            let d = a.abs_diff(b);
            d.min(len - d)
        };
        let v = m * n;
        let keys: Vec<(usize, usize)> = (0..v * v)
            .map(|i| {
                let (c, r) = (i / v, i % v);
                let dx = axis(c / n, r / n, m);
                let dy = axis(c % n, r % n, n);
                (dx.max(dy), dx.min(dy))
            })
            .collect();
        let mut distinct: Vec<(usize, usize)> = keys.clone();
        distinct.sort_unstable_by(|a, b| b.cmp(a));
        distinct.dedup();
        let labels: Vec<String> = distinct
            .iter()
            .map(|&(a, b)| {
                if a == 0 {
                    "0".to_string()
                } else {
                    format!("({a},{b})")
                }
            })
            .collect();
        let class_of = keys
            .iter()
            .map(|k| distinct.iter().position(|d| d == k).expect("key listed"))
            .collect();
        Self { labels, class_of }
    }
}

/// Quotient chain under a strongly lumpable partition.
///
/// Every state of a class must produce the same aggregated row within
/// [`LUMP_TOLERANCE`]; the worst offending pair is reported otherwise.
/// A class is absorbing when all its members are.
pub fn lump<C: TransitionRows + ?Sized>(chain: &C, lumping: &Lumping) -> Result<MarkovChain> {
    let n = chain.state_count();
    if lumping.state_count() != n {
        return Err(Error::InvalidParameter(format!(
            "lumping covers {} states, chain has {n}",
            lumping.state_count()
        )));
    }
    let k = lumping.labels.len();
    let mut first: Vec<Option<(usize, Vec<f64>)>> = vec![None; k];
    let mut all_absorbing = vec![true; k];
    let mut worst: Option<(f64, usize, usize, usize)> = None;
    let mut row = vec![0.0; k];
    for i in 0..n {
        row.iter_mut().for_each(|x| *x = 0.0);
        chain.for_each_transition(i, &mut |j, x| row[lumping.class_of[j]] += x);
        let a = lumping.class_of[i];
        all_absorbing[a] &= chain.is_absorbing(i);
        match &first[a] {
            None => first[a] = Some((i, row.clone())),
            Some((rep, seen)) => {
                let diff = seen
                    .iter()
                    .zip(&row)
                    .fold(0.0, |m, (u, v)| f64::max(m, (u - v).abs()));
                if worst.is_none_or(|w| diff > w.0) {
                    worst = Some((diff, a, *rep, i));
                }
            }
        }
    }
    if let Some((diff, a, rep, i)) = worst {
        if diff > LUMP_TOLERANCE {
            return Err(Error::NotLumpable {
                class: lumping.labels[a].clone(),
                first: chain.state_label(rep),
                second: chain.state_label(i),
                discrepancy: diff,
            });
        }
    }
    let mut p = Matrix::zeros(k, k);
    for (a, entry) in first.iter().enumerate() {
        let (_, seen) = entry.as_ref().ok_or_else(|| {
            Error::InvalidParameter(format!("class {} has no states", lumping.labels[a]))
        })?;
        for (b, &x) in seen.iter().enumerate() {
            p[(a, b)] = x;
        }
    }
    let absorbing = (0..k).filter(|&a| all_absorbing[a]);
    MarkovChain::new(lumping.labels.clone(), p, absorbing)
}

/// Largest entry difference between two chains, matching states by label.
pub fn max_discrepancy(a: &MarkovChain, b: &MarkovChain) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidParameter(format!(
            "chains have {} and {} states",
            a.len(),
            b.len()
        )));
    }
    let map: Vec<usize> = a
        .labels()
        .iter()
        .map(|l| {
            b.index_of(l).ok_or_else(|| {
                Error::InvalidParameter(format!("state {l} missing from second chain"))
            })
        })
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for i in 0..a.len() {
        for j in 0..a.len() {
            worst = worst.max((a.matrix()[(i, j)] - b.matrix()[(map[i], map[j])]).abs());
        }
    }
    Ok(worst)
}
