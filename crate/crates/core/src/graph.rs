//! Finite simple undirected graphs with eagerly computed all-pairs distances.
//!
//! Vertices are dense indices `0..V`. The family generators fix a labeling:
//!
//! * cycle(n): `0..n` in order around the cycle.
//! * petersen: outer 5-cycle `0..5`, inner pentagram `5..10`, spoke `i -- i+5`.
//! * friendship(n): hub `0`, triangle `k` on vertices `2k+1, 2k+2`.
//! * torus(m, n): row-major, `(i, j)` is `i*n + j`.
//! * tree(Δ, depth): root `0`, remaining vertices numbered in breadth-first
//!   generation order (children of a vertex are consecutive).

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const UNREACHED: u32 = u32::MAX;

#[derive(Clone)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
    distances: Vec<u32>,
}

impl Graph {
    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Neighbours of `v` in increasing order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn distance(&self, u: usize, v: usize) -> u32 {
        self.distances[u * self.vertex_count() + v]
    }

    /// Row `u` of the distance table.
    pub fn distances_from(&self, u: usize) -> &[u32] {
        let n = self.vertex_count();
        &self.distances[u * n..(u + 1) * n]
    }

    pub fn eccentricity(&self, v: usize) -> u32 {
        self.distances_from(v).iter().copied().max().unwrap_or(0)
    }

    pub fn diameter(&self) -> u32 {
        (0..self.vertex_count())
            .map(|v| self.eccentricity(v))
            .max()
            .unwrap_or(0)
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Writes the edge-list text format accepted by [`parse_edge_list`].
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.vertex_count(), self.edge_count);
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("vertices", &self.vertex_count())
            .field("edges", &self.edge_count)
            .finish()
    }
}

/// Validates the edge list, then fills the distance table by a BFS from every vertex.
pub fn build_graph(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Graph> {
    let mut adjacency = vec![Vec::new(); vertex_count];
    let mut seen = HashSet::with_capacity(edges.len());
    for &(u, v) in edges {
        if u >= vertex_count || v >= vertex_count {
            return Err(Error::InvalidEdge {
                u,
                v,
                reason: "vertex out of range",
            });
        }
        if u == v {
            return Err(Error::InvalidEdge {
                u,
                v,
                reason: "self-loop",
            });
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(Error::InvalidEdge {
                u,
                v,
                reason: "duplicate edge",
            });
        }
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    for ns in &mut adjacency {
        ns.sort_unstable();
    }

    let n = vertex_count;
    let mut distances = vec![UNREACHED; n * n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        let row = &mut distances[s * n..(s + 1) * n];
        row[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            let du = row[u];
            for &w in &adjacency[u] {
                if row[w] == UNREACHED {
                    row[w] = du + 1;
                    queue.push_back(w);
                }
            }
        }
        if s == 0 {
            if let Some(unreached) = row.iter().position(|&d| d == UNREACHED) {
                return Err(Error::DisconnectedGraph { unreached });
            }
        }
    }

    Ok(Graph {
        adjacency,
        edge_count: seen.len(),
        distances,
    })
}

/// Parses `V E` followed by `E` lines of `u v`. Blank lines and `#` comments are skipped.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty edge list".into()))?;
    let (v, e) = parse_pair(header)?;
    let mut edges = Vec::with_capacity(e);
    for line in lines.by_ref().take(e) {
        edges.push(parse_pair(line)?);
    }
    if edges.len() != e {
        return Err(Error::Parse(format!(
            "header promises {e} edges, found {}",
            edges.len()
        )));
    }
    if let Some(extra) = lines.next() {
        return Err(Error::Parse(format!("unexpected trailing line `{extra}`")));
    }
    build_graph(v, &edges)
}

fn parse_pair(line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let mut next = || -> Result<usize> {
        let tok = it
            .next()
            .ok_or_else(|| Error::Parse(format!("expected two integers in `{line}`")))?;
        tok.parse()
            .map_err(|_| Error::Parse(format!("`{tok}` is not a non-negative integer")))
    };
    let pair = (next()?, next()?);
    if it.next().is_some() {
        return Err(Error::Parse(format!("expected two integers in `{line}`")));
    }
    Ok(pair)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Cycle(usize),
    Petersen,
    Friendship(usize),
    Torus(usize, usize),
    /// Ball of radius `depth` around a vertex of the infinite `degree`-regular tree.
    TreeTruncated {
        degree: usize,
        depth: usize,
    },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Cycle(n) => write!(f, "cycle({n})"),
            Family::Petersen => write!(f, "petersen"),
            Family::Friendship(n) => write!(f, "friendship({n})"),
            Family::Torus(m, n) => write!(f, "torus({m},{n})"),
            Family::TreeTruncated { degree, depth } => write!(f, "tree({degree},{depth})"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// Accepts the `Display` form, e.g. `cycle(6)`, `torus(7,7)`, `petersen`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("unrecognised graph family `{s}`"));
        if s == "petersen" {
            return Ok(Family::Petersen);
        }
        let (name, rest) = s.split_once('(').ok_or_else(bad)?;
        let args: Vec<usize> = rest
            .strip_suffix(')')
            .ok_or_else(bad)?
            .split(',')
            .map(|a| a.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        match (name, args.as_slice()) {
            ("cycle", [n]) => Ok(Family::Cycle(*n)),
            ("friendship", [n]) => Ok(Family::Friendship(*n)),
            ("torus", [m, n]) => Ok(Family::Torus(*m, *n)),
            ("tree", [degree, depth]) => Ok(Family::TreeTruncated {
                degree: *degree,
                depth: *depth,
            }),
            _ => Err(bad()),
        }
    }
}

pub fn generate_family(kind: Family) -> Result<Graph> {
    match kind {
        Family::Cycle(n) => cycle(n),
        Family::Petersen => petersen(),
        Family::Friendship(n) => friendship(n),
        Family::Torus(m, n) => torus(m, n),
        Family::TreeTruncated { degree, depth } => tree_truncated(degree, depth),
    }
}

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "cycle needs n >= 3, got {n}"
        )));
    }
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    build_graph(n, &edges)
}

pub fn petersen() -> Result<Graph> {
    let mut edges = Vec::with_capacity(15);
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
        edges.push((i, i + 5));
    }
    build_graph(10, &edges)
}

pub fn friendship(n: usize) -> Result<Graph> {
    if n < 1 {
        return Err(Error::InvalidParameter(
            "friendship graph needs at least one triangle".into(),
        ));
    }
    let mut edges = Vec::with_capacity(3 * n);
    for k in 0..n {
        let (a, b) = (2 * k + 1, 2 * k + 2);
        edges.extend([(0, a), (0, b), (a, b)]);
    }
    build_graph(2 * n + 1, &edges)
}

pub fn torus(m: usize, n: usize) -> Result<Graph> {
    if m < 3 || n < 3 {
        return Err(Error::InvalidParameter(format!(
            "torus needs m, n >= 3, got {m}x{n}"
        )));
    }
    let mut edges = Vec::with_capacity(2 * m * n);
    for i in 0..m {
        for j in 0..n {
            let v = i * n + j;
            edges.push((v, i * n + (j + 1) % n));
            edges.push((v, ((i + 1) % m) * n + j));
        }
    }
    build_graph(m * n, &edges)
}

pub fn tree_truncated(degree: usize, depth: usize) -> Result<Graph> {
    if degree < 2 || depth < 1 {
        return Err(Error::InvalidParameter(format!(
            "truncated tree needs degree >= 2 and depth >= 1, got ({degree}, {depth})"
        )));
    }
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];
    let mut next_id = 1usize;
    for level in 0..depth {
        let children = if level == 0 { degree } else { degree - 1 };
        let mut next_frontier = Vec::with_capacity(frontier.len() * children);
        for &parent in &frontier {
            for _ in 0..children {
                edges.push((parent, next_id));
                next_frontier.push(next_id);
                next_id += 1;
            }
        }
        frontier = next_frontier;
    }
    build_graph(next_id, &edges)
}
