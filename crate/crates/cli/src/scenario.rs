use std::fs;

use tipsy_core::families::{
    cycle_chain, friendship_chain, petersen_chain, toroidal7_chain, tree_chain,
};
use tipsy_core::graph::{cycle, friendship, petersen, torus, tree_truncated};
use tipsy_core::joint::{StrategyRules, TieBreak};
use tipsy_core::{parse_edge_list, Graph, MarkovChain, SpinnerFour, SpinnerThree};

use crate::{config, CliError, FamilyKind, GraphArgs, SpinnerArgs, TieBreakArg};

/// Largest truncated tree the simulator will build; the distance table is quadratic in size.
const MAX_SIM_TREE_VERTICES: usize = 4_000;

#[derive(Debug, Clone, Copy)]
pub enum Spinner {
    Three(SpinnerThree),
    Four(SpinnerFour),
}

impl Spinner {
    /// `t = t_c + t_r` when four-way; exact on graphs where both tipsy moves act alike.
    pub fn merged(self) -> Result<SpinnerThree, CliError> {
        match self {
            Spinner::Three(s) => Ok(s),
            Spinner::Four(s) => Ok(SpinnerThree::new(s.c(), s.r(), s.t_c() + s.t_r())?),
        }
    }

    pub fn four(self) -> SpinnerFour {
        match self {
            Spinner::Three(s) => s.to_four(),
            Spinner::Four(s) => s,
        }
    }
}

impl SpinnerArgs {
    pub fn is_empty(&self) -> bool {
        self.c.is_none()
            && self.r.is_none()
            && self.t.is_none()
            && self.tc.is_none()
            && self.tr.is_none()
    }

    pub fn resolve(&self) -> Result<Spinner, CliError> {
        let c = self
            .c
            .ok_or_else(|| config("c", "the sober-cop probability is required"))?;
        let r = self
            .r
            .ok_or_else(|| config("r", "the sober-robber probability is required"))?;
        let bad = |field, e: tipsy_core::Error| config(field, e.to_string());
        match (self.t, self.tc, self.tr) {
            (Some(t), None, None) => SpinnerThree::new(c, r, t)
                .map(Spinner::Three)
                .map_err(|e| bad("t", e)),
            (None, Some(tc), Some(tr)) => SpinnerFour::new(c, r, tc, tr)
                .map(Spinner::Four)
                .map_err(|e| bad("tr", e)),
            _ => Err(config("t", "give either --t, or both --tc and --tr")),
        }
    }
}

pub fn rules(tie: TieBreakArg) -> StrategyRules {
    StrategyRules {
        tie_break: match tie {
            TieBreakArg::Geodesic => TieBreak::Geodesic,
            TieBreakArg::Uniform => TieBreak::Uniform,
        },
    }
}

/// A family with its size parameters checked, or a graph read from a file.
#[derive(Debug, Clone)]
pub enum Model {
    Cycle(usize),
    Petersen,
    Friendship(usize),
    Torus7,
    Tree { degree: usize, max_dist: usize },
    File(Graph),
}

impl Model {
    pub fn from_args(g: &GraphArgs) -> Result<Self, CliError> {
        if let Some(path) = &g.graph_file {
            let text = fs::read_to_string(path).map_err(|source| CliError::Read {
                path: path.clone(),
                source,
            })?;
            let graph = parse_edge_list(&text).map_err(|e| config("graph-file", e.to_string()))?;
            return Ok(Model::File(graph));
        }
        let family = g
            .family
            .ok_or_else(|| config("family", "give --family or --graph-file"))?;
        Self::family(family, g.n, g.delta, g.max_dist)
    }

    pub fn family(
        family: FamilyKind,
        n: Option<usize>,
        delta: Option<usize>,
        max_dist: Option<usize>,
    ) -> Result<Self, CliError> {
        let unused = |field: &'static str, present: bool| {
            if present {
                Err(config(
                    field,
                    format!("does not apply to --family {family:?}").to_lowercase(),
                ))
            } else {
                Ok(())
            }
        };
        if family != FamilyKind::Tree {
            unused("delta", delta.is_some())?;
            unused("max-dist", max_dist.is_some())?;
        }
        match family {
            FamilyKind::Cycle | FamilyKind::Friendship => {
                let min = if family == FamilyKind::Cycle { 3 } else { 2 };
                let n = n.ok_or_else(|| config("n", "required for this family"))?;
                if n < min {
                    return Err(config("n", format!("must be at least {min}")));
                }
                Ok(if family == FamilyKind::Cycle {
                    Model::Cycle(n)
                } else {
                    Model::Friendship(n)
                })
            }
            FamilyKind::Petersen | FamilyKind::Torus7 => {
                unused("n", n.is_some())?;
                Ok(if family == FamilyKind::Petersen {
                    Model::Petersen
                } else {
                    Model::Torus7
                })
            }
            FamilyKind::Tree => {
                unused("n", n.is_some())?;
                let degree = delta.ok_or_else(|| config("delta", "required for trees"))?;
                let max_dist = max_dist.ok_or_else(|| config("max-dist", "required for trees"))?;
                if degree < 2 {
                    return Err(config("delta", "must be at least 2"));
                }
                if max_dist < 2 {
                    return Err(config("max-dist", "must be at least 2"));
                }
                Ok(Model::Tree { degree, max_dist })
            }
        }
    }

    pub fn needs_four_way(&self) -> bool {
        matches!(self, Model::Friendship(_))
    }

    /// The hand-built distance chain.
    pub fn chain(&self, s: Spinner) -> Result<MarkovChain, CliError> {
        if self.needs_four_way() && matches!(s, Spinner::Three(_)) {
            return Err(config("t", "friendship graphs need separate --tc and --tr"));
        }
        Ok(match *self {
            Model::Cycle(n) => cycle_chain(n, s.merged()?)?,
            Model::Petersen => petersen_chain(s.merged()?)?,
            Model::Friendship(n) => friendship_chain(n, s.four())?,
            Model::Torus7 => toroidal7_chain(s.merged()?)?,
            Model::Tree { degree, max_dist } => tree_chain(degree, max_dist, s.merged()?)?,
            Model::File(_) => {
                return Err(config("graph-file", "graph files have no hand-built chain"))
            }
        })
    }

    /// Graph to simulate on, with the call-off distance for trees.
    pub fn graph(&self) -> Result<(Graph, Option<u32>), CliError> {
        Ok(match self {
            Model::Cycle(n) => (cycle(*n)?, None),
            Model::Petersen => (petersen()?, None),
            Model::Friendship(n) => (friendship(*n)?, None),
            Model::Torus7 => (torus(7, 7)?, None),
            Model::Tree { degree, max_dist } => {
                let depth = max_dist + 3;
                if tree_size(*degree, depth).is_none_or(|v| v > MAX_SIM_TREE_VERTICES) {
                    return Err(config(
                        "max-dist",
                        format!("a depth-{depth} tree of degree {degree} is too large to simulate"),
                    ));
                }
                (tree_truncated(*degree, depth)?, Some(*max_dist as u32))
            }
            Model::File(g) => (g.clone(), None),
        })
    }
}

fn tree_size(degree: usize, depth: usize) -> Option<usize> {
    let (mut total, mut level) = (1usize, degree);
    for _ in 0..depth {
        total = total.checked_add(level)?;
        level = level.checked_mul(degree - 1)?;
    }
    Some(total)
}
