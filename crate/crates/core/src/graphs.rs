//! Acyclic directed mixed graphs (ADMGs) and d-separation.
//!
//! A bidirected edge `A <-> U` is read as `A <- L -> U` for a fresh latent
//! `L`, so both of its endpoints carry an arrowhead. d-separation is decided
//! by a reachability search over `(node, arrived-with-arrowhead)` states:
//! a node is a collider on a path when both incident edge marks at it are
//! arrowheads. Colliders pass only if they are ancestors of (or in) the
//! conditioning set; non-colliders pass only if they are not conditioned on.
//!
//! Graphs load from a line-oriented text format:
//!
//! ```text
//! # comment
//! A -> X
//! U -> X
//! U -> Yhat
//! A <-> U
//! Z            # a bare identifier declares an isolated node
//! ```

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// Mark of an edge at one of its endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mark {
    Tail,
    Arrow,
}

/// An edge incident to a node, seen from that node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Incidence {
    pub neighbor: usize,
    /// Mark at the node we are standing on.
    pub near: Mark,
    /// Mark at `neighbor`.
    pub far: Mark,
}

/// Immutable ADMG over opaque string node identifiers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Admg {
    nodes: Vec<String>,
    index: BTreeMap<String, usize>,
    directed: Vec<(usize, usize)>,
    bidirected: Vec<(usize, usize)>,
    incidences: Vec<Vec<Incidence>>,
    parents: Vec<Vec<usize>>,
}

impl Admg {
    /// Build a graph, validating endpoints, self-loops and acyclicity of the
    /// directed part. Duplicate edges are collapsed.
    pub fn new<S: AsRef<str>>(
        nodes: &[S],
        directed: &[(S, S)],
        bidirected: &[(S, S)],
    ) -> Result<Self> {
        let mut names: Vec<String> = Vec::with_capacity(nodes.len());
        let mut index = BTreeMap::new();
        for n in nodes {
            let n = n.as_ref().to_string();
            if n.is_empty() {
                return Err(Error::input("empty node identifier"));
            }
            if index.contains_key(&n) {
                return Err(Error::input(format!("duplicate node `{n}`")));
            }
            index.insert(n.clone(), names.len());
            names.push(n);
        }
        let lookup = |s: &S| -> Result<usize> {
            index
                .get(s.as_ref())
                .copied()
                .ok_or_else(|| Error::input(format!("unknown node `{}`", s.as_ref())))
        };

        let mut d = BTreeSet::new();
        for (from, to) in directed {
            let (f, t) = (lookup(from)?, lookup(to)?);
            if f == t {
                return Err(Error::input(format!("self-loop on `{}`", names[f])));
            }
            d.insert((f, t));
        }
        let mut b = BTreeSet::new();
        for (x, y) in bidirected {
            let (x, y) = (lookup(x)?, lookup(y)?);
            if x == y {
                return Err(Error::input(format!("self-loop on `{}`", names[x])));
            }
            b.insert((x.min(y), x.max(y)));
        }

        let n = names.len();
        let mut incidences = vec![Vec::new(); n];
        let mut parents = vec![Vec::new(); n];
        for &(f, t) in &d {
            incidences[f].push(Incidence { neighbor: t, near: Mark::Tail, far: Mark::Arrow });
            incidences[t].push(Incidence { neighbor: f, near: Mark::Arrow, far: Mark::Tail });
            parents[t].push(f);
        }
        for &(x, y) in &b {
            incidences[x].push(Incidence { neighbor: y, near: Mark::Arrow, far: Mark::Arrow });
            incidences[y].push(Incidence { neighbor: x, near: Mark::Arrow, far: Mark::Arrow });
        }

        let g = Self {
            nodes: names,
            index,
            directed: d.into_iter().collect(),
            bidirected: b.into_iter().collect(),
            incidences,
            parents,
        };
        if let Some(node) = g.find_directed_cycle() {
            return Err(Error::model(format!(
                "directed cycle through `{}`",
                g.nodes[node]
            )));
        }
        Ok(g)
    }

    /// Parse the `A -> X` / `A <-> U` text format. Node set is inferred in
    /// order of first appearance.
    pub fn parse(text: &str) -> Result<Self> {
        let mut nodes: Vec<String> = Vec::new();
        let mut seen = HashSet::new();
        let mut directed = Vec::new();
        let mut bidirected = Vec::new();
        let mut declare = |s: &str, nodes: &mut Vec<String>| {
            if seen.insert(s.to_string()) {
                nodes.push(s.to_string());
            }
        };

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::Row {
                line: lineno as u64 + 1,
                message: format!("expected `X -> Y`, `X <-> Y` or a node name, got `{line}`"),
            };
            let (lhs, rhs, bi) = if let Some((l, r)) = line.split_once("<->") {
                (l.trim(), r.trim(), true)
            } else if let Some((l, r)) = line.split_once("->") {
                (l.trim(), r.trim(), false)
            } else if is_identifier(line) {
                declare(line, &mut nodes);
                continue;
            } else {
                return Err(bad());
            };
            if !is_identifier(lhs) || !is_identifier(rhs) {
                return Err(bad());
            }
            declare(lhs, &mut nodes);
            declare(rhs, &mut nodes);
            let pair = (lhs.to_string(), rhs.to_string());
            if bi {
                bidirected.push(pair);
            } else {
                directed.push(pair);
            }
        }
        Admg::new(&nodes, &directed, &bidirected)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Admg::parse(&std::fs::read_to_string(path).map_err(Error::at_path(path))?)
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_index(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::input(format!("unknown node `{name}`")))
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.nodes[idx]
    }

    /// Directed edges as `(from, to)` index pairs.
    pub fn directed_edges(&self) -> &[(usize, usize)] {
        &self.directed
    }

    /// Bidirected edges as ordered `(min, max)` index pairs.
    pub fn bidirected_edges(&self) -> &[(usize, usize)] {
        &self.bidirected
    }

    pub fn incidences(&self, node: usize) -> &[Incidence] {
        &self.incidences[node]
    }

    fn find_directed_cycle(&self) -> Option<usize> {
        // Kahn's algorithm; any node left with positive in-degree sits on or
        // downstream of a cycle.
        let n = self.nodes.len();
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut children = vec![Vec::new(); n];
        for &(f, t) in &self.directed {
            children[f].push(t);
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut removed = 0;
        while let Some(v) = queue.pop_front() {
            removed += 1;
            for &c in &children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    queue.push_back(c);
                }
            }
        }
        (removed < n).then(|| (0..n).find(|&v| indeg[v] > 0).unwrap())
    }

    /// Indicator vector of the ancestors of `set` (each member counts as its
    /// own ancestor), following directed edges only.
    pub fn ancestors_of(&self, set: &[usize]) -> Vec<bool> {
        let mut anc = vec![false; self.nodes.len()];
        let mut stack: Vec<usize> = set.to_vec();
        while let Some(v) = stack.pop() {
            if !anc[v] {
                anc[v] = true;
                stack.extend(self.parents[v].iter().copied());
            }
        }
        anc
    }

    /// Resolve names to indices and check the d-separation preconditions.
    fn resolve_query(
        &self,
        src: &str,
        dst: &str,
        conditioning: &[&str],
    ) -> Result<(usize, usize, Vec<usize>)> {
        let s = self.node_index(src)?;
        let d = self.node_index(dst)?;
        if s == d {
            return Err(Error::input(format!("source and destination are both `{src}`")));
        }
        let z = conditioning
            .iter()
            .map(|c| self.node_index(c))
            .collect::<Result<Vec<_>>>()?;
        if z.contains(&s) || z.contains(&d) {
            return Err(Error::input("source/destination must not be in the conditioning set"));
        }
        Ok((s, d, z))
    }

    /// Is `src` d-separated from `dst` given `conditioning`?
    pub fn d_separated(&self, src: &str, dst: &str, conditioning: &[&str]) -> Result<bool> {
        let (s, d, z) = self.resolve_query(src, dst, conditioning)?;
        Ok(self.d_separated_idx(s, d, &z))
    }

    /// Index-based d-separation; preconditions are the caller's job.
    pub fn d_separated_idx(&self, src: usize, dst: usize, conditioning: &[usize]) -> bool {
        let n = self.nodes.len();
        let mut in_z = vec![false; n];
        for &c in conditioning {
            in_z[c] = true;
        }
        let anc_z = self.ancestors_of(conditioning);

        // visited[v][k]: reached v with arrowhead-at-v == (k == 1)
        let mut visited = vec![[false; 2]; n];
        let mut queue = VecDeque::new();
        for inc in &self.incidences[src] {
            let into = inc.far == Mark::Arrow;
            if !visited[inc.neighbor][into as usize] {
                visited[inc.neighbor][into as usize] = true;
                queue.push_back((inc.neighbor, into));
            }
        }
        while let Some((v, into_v)) = queue.pop_front() {
            if v == dst {
                return false;
            }
            for inc in &self.incidences[v] {
                if inc.neighbor == src {
                    continue;
                }
                let collider = into_v && inc.near == Mark::Arrow;
                let passes = if collider { anc_z[v] } else { !in_z[v] };
                if !passes {
                    continue;
                }
                let into = inc.far == Mark::Arrow;
                if !visited[inc.neighbor][into as usize] {
                    visited[inc.neighbor][into as usize] = true;
                    queue.push_back((inc.neighbor, into));
                }
            }
        }
        true
    }
}

impl fmt::Display for Admg {
    /// Renders the same text format [`Admg::parse`] reads.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut touched = vec![false; self.nodes.len()];
        for &(a, b) in &self.directed {
            writeln!(f, "{} -> {}", self.nodes[a], self.nodes[b])?;
            touched[a] = true;
            touched[b] = true;
        }
        for &(a, b) in &self.bidirected {
            writeln!(f, "{} <-> {}", self.nodes[a], self.nodes[b])?;
            touched[a] = true;
            touched[b] = true;
        }
        for (i, name) in self.nodes.iter().enumerate() {
            if !touched[i] {
                writeln!(f, "{name}")?;
            }
        }
        Ok(())
    }
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '\'' | '.' | '≺'))
        && !s.contains("->")
}

/// Does the graph force `protected ⊥ predictor` in every model Markov to it?
pub fn implies_dp(g: &Admg, protected: &str, predictor: &str) -> Result<bool> {
    g.d_separated(protected, predictor, &[])
}

/// The three predictor-augmented graphs used to contrast structural and
/// statistical demographic parity.
pub mod parity_graphs {
    use super::Admg;

    /// `A -> X <- U -> Yhat`: the predictor only sees the structural error.
    pub const GRAPH_A: &str = "A -> X\nU -> X\nU -> Yhat\n";
    /// As (a) plus latent confounding `A <-> U`.
    pub const GRAPH_B: &str = "A -> X\nU -> X\nU -> Yhat\nA <-> U\n";
    /// Pre-treatment covariates `Xpre` feed the protected attribute, `X` and
    /// the predictor.
    pub const GRAPH_C: &str = "A -> X\nXpre -> X\nXpre -> Yhat\nXpre -> A\n";

    pub fn graph_a() -> Admg {
        Admg::parse(GRAPH_A).expect("static graph")
    }

    pub fn graph_b() -> Admg {
        Admg::parse(GRAPH_B).expect("static graph")
    }

    pub fn graph_c() -> Admg {
        Admg::parse(GRAPH_C).expect("static graph")
    }
}
