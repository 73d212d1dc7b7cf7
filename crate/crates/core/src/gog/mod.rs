//! Finite graphs of finite groups: the data model, validation, reduction and
//! morphisms.
//!
//! Edges carry an intrinsic orientation: `source` is `d0`, `target` is `d1`.
//! Boundary maps are stored as element maps `bd0: G(e) -> G(source)` and
//! `bd1: G(e) -> G(target)`. Construction only checks shape; the group
//! theoretic invariants are reported by [`GraphOfGroups::validate`].

mod format;

use std::collections::VecDeque;
use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

use crate::group::FiniteGroup;

pub use format::{parse, serialize};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GogError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invalid graph of groups: {}", join_violations(.0))]
    InvalidInput(Vec<Violation>),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// A cell of the underlying graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    Vertex(usize),
    Edge(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Source,
    Target,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Source => "into_source",
            Side::Target => "into_target",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.source == self.target
    }

    pub fn end(&self, side: Side) -> usize {
        match side {
            Side::Source => self.source,
            Side::Target => self.target,
        }
    }
}

/// One violated invariant, with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoVertices,
    BoundaryNotHomomorphism { edge: String, side: Side, x: usize, y: usize },
    BoundaryNotInjective { edge: String, side: Side, x: usize, y: usize, image: usize },
    Disconnected { vertex: String },
    TreeNotSpanning { vertex: String },
    TreeHasCycle { edge: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoVertices => write!(f, "graph has no vertices"),
            Violation::BoundaryNotHomomorphism { edge, side, x, y } => write!(
                f,
                "boundary {side} of edge {edge} is not a homomorphism (elements {x}, {y})"
            ),
            Violation::BoundaryNotInjective { edge, side, x, y, image } => write!(
                f,
                "boundary {side} of edge {edge} is not injective: elements {x} and {y} both map to {image}"
            ),
            Violation::Disconnected { vertex } => {
                write!(f, "graph is disconnected: vertex {vertex} unreachable from the base")
            }
            Violation::TreeNotSpanning { vertex } => {
                write!(f, "tree not spanning: vertex {vertex} is not reached by tree edges")
            }
            Violation::TreeHasCycle { edge } => write!(f, "tree has a cycle through edge {edge}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphOfGroups {
    vertex_names: Vec<String>,
    edges: Vec<Edge>,
    vertex_groups: Vec<FiniteGroup>,
    edge_groups: Vec<FiniteGroup>,
    bd0: Vec<Vec<usize>>,
    bd1: Vec<Vec<usize>>,
    tree: Vec<bool>,
    base: usize,
}

/// Plain description of a graph of groups, consumed by [`GraphOfGroups::new`].
#[derive(Clone, Debug)]
pub struct GogParts {
    pub vertices: Vec<(String, FiniteGroup)>,
    pub edges: Vec<EdgeParts>,
    pub base: usize,
    /// Spanning-tree edges by index; computed breadth-first when `None`.
    pub tree: Option<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct EdgeParts {
    pub name: String,
    pub source: usize,
    pub target: usize,
    pub group: FiniteGroup,
    pub into_source: Vec<usize>,
    pub into_target: Vec<usize>,
}

impl GraphOfGroups {
    /// Builds a graph of groups, checking only shapes (indices in range,
    /// boundary lists of the right length, unique names).
    pub fn new(parts: GogParts) -> Result<Self, GogError> {
        let schema = |s: String| Err(GogError::Schema(s));
        let nv = parts.vertices.len();
        if nv == 0 {
            return schema("no vertices".into());
        }
        let mut names: Vec<&str> = parts.vertices.iter().map(|(n, _)| n.as_str()).collect();
        names.extend(parts.edges.iter().map(|e| e.name.as_str()));
        let mut sorted = names.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return schema(format!("duplicate cell name {}", w[0]));
        }
        if parts.base >= nv {
            return schema("basepoint out of range".into());
        }
        for e in &parts.edges {
            if e.source >= nv || e.target >= nv {
                return schema(format!("edge {} references an unknown vertex", e.name));
            }
            for (side, map, vg) in [
                (Side::Source, &e.into_source, &parts.vertices[e.source].1),
                (Side::Target, &e.into_target, &parts.vertices[e.target].1),
            ] {
                if map.len() != e.group.order() {
                    return schema(format!(
                        "boundary {side} of edge {} lists {} images for a group of order {}",
                        e.name,
                        map.len(),
                        e.group.order()
                    ));
                }
                if map.iter().any(|&x| x >= vg.order()) {
                    return schema(format!(
                        "boundary {side} of edge {} has an image outside the vertex group",
                        e.name
                    ));
                }
            }
        }
        let mut g = GraphOfGroups {
            vertex_names: parts.vertices.iter().map(|(n, _)| n.clone()).collect(),
            vertex_groups: parts.vertices.into_iter().map(|(_, g)| g).collect(),
            edges: parts
                .edges
                .iter()
                .map(|e| Edge { name: e.name.clone(), source: e.source, target: e.target })
                .collect(),
            bd0: parts.edges.iter().map(|e| e.into_source.clone()).collect(),
            bd1: parts.edges.iter().map(|e| e.into_target.clone()).collect(),
            edge_groups: parts.edges.into_iter().map(|e| e.group).collect(),
            tree: Vec::new(),
            base: parts.base,
        };
        g.tree = vec![false; g.edges.len()];
        match parts.tree {
            Some(t) => {
                for i in t {
                    if i >= g.edges.len() {
                        return schema("tree lists an unknown edge".into());
                    }
                    g.tree[i] = true;
                }
            }
            None => g.tree = g.spanning_tree(&[]),
        }
        Ok(g)
    }

    /// Breadth-first spanning tree from the base, seeded with `keep` edges
    /// where they do not close a cycle. Edges are tried in index order.
    fn spanning_tree(&self, keep: &[usize]) -> Vec<bool> {
        let nv = self.vertex_count();
        let mut uf = UnionFind::new(nv);
        let mut tree = vec![false; self.edges.len()];
        for &i in keep {
            let e = &self.edges[i];
            if uf.union(e.source, e.target) {
                tree[i] = true;
            }
        }
        let mut seen = vec![false; nv];
        seen[self.base] = true;
        let mut queue = VecDeque::from([self.base]);
        while let Some(v) = queue.pop_front() {
            for (i, e) in self.edges.iter().enumerate() {
                let other = if e.source == v {
                    e.target
                } else if e.target == v {
                    e.source
                } else {
                    continue;
                };
                if !seen[other] {
                    seen[other] = true;
                    queue.push_back(other);
                }
                if uf.union(e.source, e.target) {
                    tree[i] = true;
                }
            }
        }
        tree
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertex_names[v]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn vertex_group(&self, v: usize) -> &FiniteGroup {
        &self.vertex_groups[v]
    }

    pub fn edge_group(&self, e: usize) -> &FiniteGroup {
        &self.edge_groups[e]
    }

    pub fn group(&self, c: Cell) -> &FiniteGroup {
        match c {
            Cell::Vertex(v) => &self.vertex_groups[v],
            Cell::Edge(e) => &self.edge_groups[e],
        }
    }

    pub fn cells(&self) -> Vec<Cell> {
        (0..self.vertex_count())
            .map(Cell::Vertex)
            .chain((0..self.edge_count()).map(Cell::Edge))
            .collect()
    }

    pub fn cell_name(&self, c: Cell) -> &str {
        match c {
            Cell::Vertex(v) => &self.vertex_names[v],
            Cell::Edge(e) => &self.edges[e].name,
        }
    }

    pub fn find_cell(&self, name: &str) -> Option<Cell> {
        if let Some(v) = self.find_vertex(name) {
            return Some(Cell::Vertex(v));
        }
        self.find_edge(name).map(Cell::Edge)
    }

    pub fn find_vertex(&self, name: &str) -> Option<usize> {
        self.vertex_names.iter().position(|n| n == name)
    }

    pub fn find_edge(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.name == name)
    }

    /// `d0` on cells: identity on vertices, source on edges.
    pub fn d0(&self, c: Cell) -> usize {
        match c {
            Cell::Vertex(v) => v,
            Cell::Edge(e) => self.edges[e].source,
        }
    }

    /// `d1` on cells: identity on vertices, target on edges.
    pub fn d1(&self, c: Cell) -> usize {
        match c {
            Cell::Vertex(v) => v,
            Cell::Edge(e) => self.edges[e].target,
        }
    }

    pub fn boundary(&self, e: usize, side: Side) -> &[usize] {
        match side {
            Side::Source => &self.bd0[e],
            Side::Target => &self.bd1[e],
        }
    }

    pub fn bd0(&self, e: usize) -> &[usize] {
        &self.bd0[e]
    }

    pub fn bd1(&self, e: usize) -> &[usize] {
        &self.bd1[e]
    }

    pub fn is_tree_edge(&self, e: usize) -> bool {
        self.tree[e]
    }

    pub fn tree_edges(&self) -> Vec<usize> {
        (0..self.edge_count()).filter(|&e| self.tree[e]).collect()
    }

    pub fn base(&self) -> usize {
        self.base
    }

    /// Same graph of groups with a different base vertex and the same tree.
    pub fn with_base(&self, base: usize) -> Self {
        assert!(base < self.vertex_count());
        GraphOfGroups { base, ..self.clone() }
    }

    /// Every violated invariant, in a fixed order. Empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.vertex_count() == 0 {
            out.push(Violation::NoVertices);
            return out;
        }
        for (i, e) in self.edges.iter().enumerate() {
            let eg = &self.edge_groups[i];
            for side in [Side::Source, Side::Target] {
                let vg = &self.vertex_groups[e.end(side)];
                let map = self.boundary(i, side);
                if let Some((x, y)) = first_hom_failure(eg, vg, map) {
                    out.push(Violation::BoundaryNotHomomorphism { edge: e.name.clone(), side, x, y });
                }
                let mut first = vec![usize::MAX; vg.order()];
                for (x, &img) in map.iter().enumerate() {
                    if first[img] != usize::MAX {
                        out.push(Violation::BoundaryNotInjective {
                            edge: e.name.clone(),
                            side,
                            x: first[img],
                            y: x,
                            image: img,
                        });
                        break;
                    }
                    first[img] = x;
                }
            }
        }
        let reach = self.reachable(|_| true);
        for (v, seen) in reach.iter().enumerate() {
            if !seen {
                out.push(Violation::Disconnected { vertex: self.vertex_names[v].clone() });
            }
        }
        let tree_reach = self.reachable(|e| self.tree[e]);
        for (v, seen) in tree_reach.iter().enumerate() {
            if !seen && reach[v] {
                out.push(Violation::TreeNotSpanning { vertex: self.vertex_names[v].clone() });
            }
        }
        let mut uf = UnionFind::new(self.vertex_count());
        for (i, e) in self.edges.iter().enumerate() {
            if self.tree[i] && !uf.union(e.source, e.target) {
                out.push(Violation::TreeHasCycle { edge: e.name.clone() });
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<(), GogError> {
        let report = self.validate();
        if report.is_empty() {
            Ok(())
        } else {
            Err(GogError::InvalidInput(report))
        }
    }

    fn reachable(&self, allow: impl Fn(usize) -> bool) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        seen[self.base] = true;
        let mut queue = VecDeque::from([self.base]);
        while let Some(v) = queue.pop_front() {
            for (i, e) in self.edges.iter().enumerate() {
                if !allow(i) {
                    continue;
                }
                for (a, b) in [(e.source, e.target), (e.target, e.source)] {
                    if a == v && !seen[b] {
                        seen[b] = true;
                        queue.push_back(b);
                    }
                }
            }
        }
        seen
    }

    /// Sum of `1/|G(v)|` over vertices minus sum of `1/|G(e)|` over edges.
    pub fn euler_characteristic(&self) -> Ratio<i64> {
        let v: Ratio<i64> = self.vertex_groups.iter().map(|g| Ratio::new(1, g.order() as i64)).sum();
        let e: Ratio<i64> = self.edge_groups.iter().map(|g| Ratio::new(1, g.order() as i64)).sum();
        v - e
    }

    /// A non-loop edge one of whose boundary maps is onto its vertex group.
    pub fn is_fictitious(&self, e: usize) -> bool {
        let edge = &self.edges[e];
        let n = self.edge_groups[e].order();
        !edge.is_loop()
            && (n == self.vertex_groups[edge.source].order()
                || n == self.vertex_groups[edge.target].order())
    }

    pub fn is_reduced(&self) -> bool {
        (0..self.edge_count()).all(|e| !self.is_fictitious(e))
    }

    /// Contracts fictitious edges, lexicographically first by name each
    /// pass, until none is left.
    pub fn reduce(&self) -> Result<GraphOfGroups, GogError> {
        self.ensure_valid()?;
        let mut g = self.clone();
        loop {
            let next = (0..g.edge_count())
                .filter(|&e| g.is_fictitious(e))
                .min_by(|&a, &b| g.edges[a].name.cmp(&g.edges[b].name));
            match next {
                Some(e) => g = g.contract(e),
                None => return Ok(g),
            }
        }
    }

    /// Contracts fictitious edge `e`. If `bd1` is onto, the target vertex is
    /// absorbed into the source; otherwise the source into the target.
    fn contract(&self, e: usize) -> GraphOfGroups {
        let edge = &self.edges[e];
        let n = self.edge_groups[e].order();
        let (keep, gone, into_keep, into_gone) = if n == self.vertex_groups[edge.target].order() {
            (edge.source, edge.target, &self.bd0[e], &self.bd1[e])
        } else {
            (edge.target, edge.source, &self.bd1[e], &self.bd0[e])
        };
        // phi: G(gone) -> G(keep), through the edge group.
        let mut phi = vec![0; self.vertex_groups[gone].order()];
        for x in 0..n {
            phi[into_gone[x]] = into_keep[x];
        }
        let renumber = |v: usize| {
            let v = if v == gone { keep } else { v };
            if v > gone {
                v - 1
            } else {
                v
            }
        };
        let mut out = GraphOfGroups {
            vertex_names: Vec::new(),
            edges: Vec::new(),
            vertex_groups: Vec::new(),
            edge_groups: Vec::new(),
            bd0: Vec::new(),
            bd1: Vec::new(),
            tree: Vec::new(),
            base: renumber(self.base),
        };
        for v in (0..self.vertex_count()).filter(|&v| v != gone) {
            out.vertex_names.push(self.vertex_names[v].clone());
            out.vertex_groups.push(self.vertex_groups[v].clone());
        }
        let mut kept_tree = Vec::new();
        for (i, f) in self.edges.iter().enumerate() {
            if i == e {
                continue;
            }
            let through = |map: &[usize], end: usize| -> Vec<usize> {
                if end == gone {
                    map.iter().map(|&x| phi[x]).collect()
                } else {
                    map.to_vec()
                }
            };
            if self.tree[i] {
                kept_tree.push(out.edges.len());
            }
            out.bd0.push(through(&self.bd0[i], f.source));
            out.bd1.push(through(&self.bd1[i], f.target));
            out.edges.push(Edge {
                name: f.name.clone(),
                source: renumber(f.source),
                target: renumber(f.target),
            });
            out.edge_groups.push(self.edge_groups[i].clone());
        }
        out.tree = out.spanning_tree(&kept_tree);
        out
    }

    pub fn identity_morphism(&self) -> GoGMorphism {
        GoGMorphism {
            vertex_map: (0..self.vertex_count()).collect(),
            edge_map: (0..self.edge_count()).collect(),
            vertex_groups: self.vertex_groups.iter().map(|g| (0..g.order()).collect()).collect(),
            edge_groups: self.edge_groups.iter().map(|g| (0..g.order()).collect()).collect(),
        }
    }
}

fn first_hom_failure(src: &FiniteGroup, tgt: &FiniteGroup, map: &[usize]) -> Option<(usize, usize)> {
    for x in 0..src.order() {
        for y in 0..src.order() {
            if map[src.mul(x, y)] != tgt.mul(map[x], map[y]) {
                return Some((x, y));
            }
        }
    }
    None
}

/// A morphism of graphs of groups: a graph map together with a group
/// homomorphism per cell, commuting with incidence and boundary maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoGMorphism {
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<usize>,
    pub vertex_groups: Vec<Vec<usize>>,
    pub edge_groups: Vec<Vec<usize>>,
}

impl GoGMorphism {
    pub fn map_cell(&self, c: Cell) -> Cell {
        match c {
            Cell::Vertex(v) => Cell::Vertex(self.vertex_map[v]),
            Cell::Edge(e) => Cell::Edge(self.edge_map[e]),
        }
    }

    pub fn map_element(&self, c: Cell, x: usize) -> usize {
        match c {
            Cell::Vertex(v) => self.vertex_groups[v][x],
            Cell::Edge(e) => self.edge_groups[e][x],
        }
    }

    /// `other` after `self`.
    pub fn then(&self, other: &GoGMorphism) -> GoGMorphism {
        GoGMorphism {
            vertex_map: self.vertex_map.iter().map(|&v| other.vertex_map[v]).collect(),
            edge_map: self.edge_map.iter().map(|&e| other.edge_map[e]).collect(),
            vertex_groups: self
                .vertex_groups
                .iter()
                .enumerate()
                .map(|(v, m)| m.iter().map(|&x| other.vertex_groups[self.vertex_map[v]][x]).collect())
                .collect(),
            edge_groups: self
                .edge_groups
                .iter()
                .enumerate()
                .map(|(e, m)| m.iter().map(|&x| other.edge_groups[self.edge_map[e]][x]).collect())
                .collect(),
        }
    }

    /// Checks every defining condition, describing the first failure.
    pub fn check(&self, source: &GraphOfGroups, target: &GraphOfGroups) -> Result<(), String> {
        if self.vertex_map.len() != source.vertex_count() || self.edge_map.len() != source.edge_count() {
            return Err("graph map has the wrong shape".into());
        }
        for (i, e) in source.edges().iter().enumerate() {
            let f = target.edge(self.edge_map[i]);
            if f.source != self.vertex_map[e.source] || f.target != self.vertex_map[e.target] {
                return Err(format!("graph map does not commute with incidence at edge {}", e.name));
            }
        }
        for c in source.cells() {
            let (g, h) = (source.group(c), target.group(self.map_cell(c)));
            let map = match c {
                Cell::Vertex(v) => &self.vertex_groups[v],
                Cell::Edge(e) => &self.edge_groups[e],
            };
            if map.len() != g.order() || map.iter().any(|&x| x >= h.order()) {
                return Err(format!("group map at {} has the wrong shape", source.cell_name(c)));
            }
            if let Some((x, y)) = first_hom_failure(g, h, map) {
                return Err(format!(
                    "group map at {} is not a homomorphism ({x}, {y})",
                    source.cell_name(c)
                ));
            }
        }
        for (i, e) in source.edges().iter().enumerate() {
            let j = self.edge_map[i];
            for side in [Side::Source, Side::Target] {
                let v = e.end(side);
                for x in 0..source.edge_group(i).order() {
                    let lhs = self.vertex_groups[v][source.boundary(i, side)[x]];
                    let rhs = target.boundary(j, side)[self.edge_groups[i][x]];
                    if lhs != rhs {
                        return Err(format!(
                            "group maps do not commute with {side} at edge {} (element {x})",
                            e.name
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    /// Returns false if `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}
