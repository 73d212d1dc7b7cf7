//! Lazy exploration of the Bass-Serre tree of a graph of groups.
//!
//! A vertex of the tree is a coset `g G(v)`, where `G(v)` is embedded at the
//! base vertex along the spanning tree, and an edge is a coset
//! `g bd0(G(e))`, embedded at the source of `e`. Cosets are identified by
//! their least normal form (edge length first, then syllables), which is
//! computed by enumerating the finite coset.
//!
//! Incidence: `d0(g e~) = g v~_source` and `d1(g e~) = g t_e v~_target`, with
//! `t_e` the edge letter seen at the base (trivial for tree edges).

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::gog::UnionFind;
use crate::word::{format_word, Dir, FundamentalGroup, NormalForm, PathWord};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("budget exceeded after exploring radius {explored_radius}")]
    BudgetExceeded { explored_radius: usize },
    #[error("subgroup is finite; it fixes a vertex and has no minimal invariant subtree of positive size")]
    FiniteGroupInput,
    #[error("orbit closure did not stabilize within {cells} cells")]
    OrbitBudgetExceeded { cells: usize },
    #[error("word is not closed at the base vertex")]
    NotClosed,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeVertex {
    pub rep: NormalForm,
    pub cell: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeEdge {
    pub rep: NormalForm,
    pub cell: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TreeCell {
    Vertex(TreeVertex),
    Edge(TreeEdge),
}

/// A finite connected window on the tree.
#[derive(Clone, Debug, Default)]
pub struct TreePatch {
    pub vertices: Vec<TreeVertex>,
    /// Edges with the indices of their `d0` and `d1` endpoints.
    pub edges: Vec<(TreeEdge, usize, usize)>,
    /// `frontier[i]` marks vertices whose neighbours were not expanded.
    pub frontier: Vec<bool>,
}

impl TreePatch {
    /// True if the patch is connected and has no cycle.
    pub fn is_tree(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return self.edges.is_empty();
        }
        let mut uf = UnionFind::new(n);
        for &(_, a, b) in &self.edges {
            if !uf.union(a, b) {
                return false;
            }
        }
        self.edges.len() + 1 == n
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// The standard tree of a graph of groups.
pub struct StandardTree<'a> {
    fg: &'a FundamentalGroup,
}

impl<'a> StandardTree<'a> {
    pub fn new(fg: &'a FundamentalGroup) -> Self {
        StandardTree { fg }
    }

    pub fn group(&self) -> &FundamentalGroup {
        self.fg
    }

    fn min_over(&self, words: impl Iterator<Item = PathWord>) -> NormalForm {
        words.map(|w| self.fg.reduce(&w)).min().expect("nonempty coset")
    }

    /// The vertex `w G(v)`.
    pub fn vertex(&self, w: &NormalForm, v: usize) -> TreeVertex {
        let g = self.fg.gog().vertex_group(v);
        let rep = self.min_over((0..g.order()).map(|s| {
            self.fg.multiply(w.word(), &self.fg.vertex_element(v, s)).expect("closed word")
        }));
        TreeVertex { rep, cell: v }
    }

    /// The edge `w bd0(G(e))`.
    pub fn edge(&self, w: &NormalForm, e: usize) -> TreeEdge {
        let gog = self.fg.gog();
        let s = gog.edge(e).source;
        let rep = self.min_over((0..gog.edge_group(e).order()).map(|x| {
            self.fg
                .multiply(w.word(), &self.fg.vertex_element(s, gog.bd0(e)[x]))
                .expect("closed word")
        }));
        TreeEdge { rep, cell: e }
    }

    /// Canonical coset of a closed word for a vertex or edge of the graph.
    pub fn canonical_coset(&self, w: &PathWord, cell: crate::gog::Cell) -> Result<TreeCell, TreeError> {
        self.fg.require_closed(w).map_err(|_| TreeError::NotClosed)?;
        let nf = self.fg.reduce(w);
        Ok(match cell {
            crate::gog::Cell::Vertex(v) => TreeCell::Vertex(self.vertex(&nf, v)),
            crate::gog::Cell::Edge(e) => TreeCell::Edge(self.edge(&nf, e)),
        })
    }

    /// The vertex fixed by `G(base)`.
    pub fn base_vertex(&self) -> TreeVertex {
        TreeVertex { rep: self.fg.identity(), cell: self.fg.base() }
    }

    fn t_e(&self, e: usize) -> NormalForm {
        self.fg.reduce(&self.fg.edge_element(e, Dir::Forward))
    }

    /// `(d0, d1)` of an edge.
    pub fn endpoints(&self, x: &TreeEdge) -> (TreeVertex, TreeVertex) {
        let edge = self.fg.gog().edge(x.cell);
        (
            self.vertex(&x.rep, edge.source),
            self.vertex(&self.fg.mul(&x.rep, &self.t_e(x.cell)), edge.target),
        )
    }

    /// Incident edges with their far endpoints: one per edge end at `x.cell`
    /// and coset of the boundary image in `G(x.cell)`.
    pub fn neighbors(&self, x: &TreeVertex) -> Vec<(TreeEdge, TreeVertex)> {
        let gog = self.fg.gog();
        let mut out = Vec::new();
        for (e, edge) in gog.edges().iter().enumerate() {
            if edge.source == x.cell {
                for h in self.fg.transversal(e, Dir::Forward) {
                    let gh = self.fg.mul(&x.rep, &self.fg.reduce(&self.fg.vertex_element(x.cell, h)));
                    let far = self.vertex(&self.fg.mul(&gh, &self.t_e(e)), edge.target);
                    out.push((self.edge(&gh, e), far));
                }
            }
            if edge.target == x.cell {
                for h in self.fg.transversal(e, Dir::Backward) {
                    let gh = self.fg.mul(&x.rep, &self.fg.reduce(&self.fg.vertex_element(x.cell, h)));
                    let f = self.fg.mul(&gh, &self.fg.inv(&self.t_e(e)));
                    out.push((self.edge(&f, e), self.vertex(&f, edge.source)));
                }
            }
        }
        out
    }

    /// Expected degree of a vertex over `v`: the sum of boundary indices.
    pub fn index_degree(&self, v: usize) -> usize {
        let gog = self.fg.gog();
        let order = gog.vertex_group(v).order();
        gog.edges()
            .iter()
            .enumerate()
            .map(|(e, edge)| {
                let idx = order / gog.edge_group(e).order();
                usize::from(edge.source == v) * idx + usize::from(edge.target == v) * idx
            })
            .sum()
    }

    /// Breadth-first ball; vertices at distance `radius` form the frontier.
    pub fn ball(&self, center: &TreeVertex, radius: usize) -> TreePatch {
        let mut patch = TreePatch::default();
        let mut index: HashMap<TreeVertex, usize> = HashMap::new();
        let mut seen_edges: HashSet<TreeEdge> = HashSet::new();
        index.insert(center.clone(), 0);
        patch.vertices.push(center.clone());
        patch.frontier.push(radius == 0);
        let mut layer = vec![0usize];
        for depth in 0..radius {
            let mut next = Vec::new();
            for &i in &layer {
                let x = patch.vertices[i].clone();
                for (edge, far) in self.neighbors(&x) {
                    if !seen_edges.insert(edge.clone()) {
                        continue;
                    }
                    let j = *index.entry(far.clone()).or_insert_with(|| {
                        patch.vertices.push(far.clone());
                        patch.frontier.push(depth + 1 == radius);
                        next.push(patch.vertices.len() - 1);
                        patch.vertices.len() - 1
                    });
                    let (d0, _) = self.endpoints(&edge);
                    if d0 == x {
                        patch.edges.push((edge, i, j));
                    } else {
                        patch.edges.push((edge, j, i));
                    }
                }
            }
            layer = next;
        }
        patch
    }

    /// The unique reduced path from `x` to `y`, found by expanding balls
    /// around both ends alternately. Fails once both balls reach `budget`.
    pub fn geodesic(&self, x: &TreeVertex, y: &TreeVertex, budget: usize) -> Result<TreePatch, TreeError> {
        // parent links: vertex -> (previous vertex, edge)
        type Parents = HashMap<TreeVertex, Option<(TreeVertex, TreeEdge)>>;
        let mut sides: [(Parents, Vec<TreeVertex>); 2] = [
            (HashMap::from([(x.clone(), None)]), vec![x.clone()]),
            (HashMap::from([(y.clone(), None)]), vec![y.clone()]),
        ];
        let mut meet = if x == y { Some(x.clone()) } else { None };
        let mut radius = [0usize; 2];
        while meet.is_none() {
            let s = if radius[0] <= radius[1] { 0 } else { 1 };
            if radius[s] >= budget {
                return Err(TreeError::BudgetExceeded { explored_radius: radius[0] + radius[1] });
            }
            let mut next = Vec::new();
            for v in std::mem::take(&mut sides[s].1) {
                for (edge, far) in self.neighbors(&v) {
                    if sides[s].0.contains_key(&far) {
                        continue;
                    }
                    sides[s].0.insert(far.clone(), Some((v.clone(), edge)));
                    if meet.is_none() && sides[1 - s].0.contains_key(&far) {
                        meet = Some(far.clone());
                    }
                    next.push(far);
                }
            }
            sides[s].1 = next;
            radius[s] += 1;
        }
        let meet = meet.unwrap();
        let walk = |parents: &Parents| {
            let mut chain = vec![(meet.clone(), None)];
            let mut cur = meet.clone();
            while let Some(Some((prev, edge))) = parents.get(&cur) {
                chain.push((prev.clone(), Some(edge.clone())));
                cur = prev.clone();
            }
            chain
        };
        // from x to meet, then meet to y
        let mut left = walk(&sides[0].0);
        left.reverse();
        let right = walk(&sides[1].0);
        let mut patch = TreePatch::default();
        let mut pending: Option<TreeEdge> = None;
        for (v, edge_to_next) in left.into_iter() {
            patch.vertices.push(v);
            patch.frontier.push(false);
            if let Some(e) = pending.take() {
                self.push_edge(&mut patch, e);
            }
            pending = edge_to_next;
        }
        for (v, edge_from_prev) in right.into_iter().skip(1) {
            patch.vertices.push(v);
            patch.frontier.push(false);
            if let Some(e) = edge_from_prev {
                self.push_edge(&mut patch, e);
            }
        }
        Ok(patch)
    }

    /// Appends an edge between the last two vertices of a path patch.
    fn push_edge(&self, patch: &mut TreePatch, e: TreeEdge) {
        let n = patch.vertices.len();
        let (d0, _) = self.endpoints(&e);
        let (a, b) = if patch.vertices[n - 2] == d0 { (n - 2, n - 1) } else { (n - 1, n - 2) };
        patch.edges.push((e, a, b));
    }

    /// The geodesic from the base vertex to `h` applied to it, read off the
    /// prefixes of the normal form of `h`.
    pub fn geodesic_from_base(&self, h: &NormalForm) -> Vec<TreeVertex> {
        let w = h.word();
        let gog = self.fg.gog();
        let mut out = vec![self.base_vertex()];
        let mut prefix = self.fg.path_word(w.start(), w.head(), Vec::new()).expect("typed");
        for s in w.steps() {
            let to = self.fg.step_target(s.edge, s.dir);
            let letter = self
                .fg
                .path_word(prefix.end(), gog.vertex_group(prefix.end()).identity(), vec![crate::word::Step {
                    edge: s.edge,
                    dir: s.dir,
                    elem: gog.vertex_group(to).identity(),
                }])
                .expect("typed");
            prefix = self.fg.multiply(&prefix, &letter).unwrap();
            let closed = self.fg.multiply(&prefix, &self.fg.invert(&self.fg.tree_path(to))).unwrap();
            let v = self.vertex(&self.fg.reduce(&closed), to);
            // Words crossing a tree edge between equal cosets do not move.
            if out.last() != Some(&v) {
                out.push(v);
            }
            let elem = self.fg.path_word(to, s.elem, Vec::new()).expect("typed");
            prefix = self.fg.multiply(&prefix, &elem).unwrap();
        }
        out
    }

    /// `{g s g^-1 : s in G(v)}` for the vertex `g G(v)`.
    pub fn stabilizer(&self, x: &TreeVertex) -> Vec<NormalForm> {
        let g = self.fg.gog().vertex_group(x.cell);
        let mut out: Vec<NormalForm> = (0..g.order())
            .map(|s| self.fg.conj(&x.rep, &self.fg.reduce(&self.fg.vertex_element(x.cell, s))))
            .collect();
        out.sort();
        out
    }

    pub fn edge_stabilizer(&self, x: &TreeEdge) -> Vec<NormalForm> {
        let gog = self.fg.gog();
        let s = gog.edge(x.cell).source;
        let mut out: Vec<NormalForm> = (0..gog.edge_group(x.cell).order())
            .map(|k| {
                self.fg.conj(&x.rep, &self.fg.reduce(&self.fg.vertex_element(s, gog.bd0(x.cell)[k])))
            })
            .collect();
        out.sort();
        out
    }

    pub fn act_vertex(&self, h: &NormalForm, x: &TreeVertex) -> TreeVertex {
        self.vertex(&self.fg.mul(h, &x.rep), x.cell)
    }

    pub fn act_edge(&self, h: &NormalForm, x: &TreeEdge) -> TreeEdge {
        self.edge(&self.fg.mul(h, &x.rep), x.cell)
    }

    pub fn act(&self, h: &NormalForm, c: &TreeCell) -> TreeCell {
        match c {
            TreeCell::Vertex(v) => TreeCell::Vertex(self.act_vertex(h, v)),
            TreeCell::Edge(e) => TreeCell::Edge(self.act_edge(h, e)),
        }
    }

    pub fn format_vertex(&self, x: &TreeVertex) -> String {
        format!("{}*{}", format_word(self.fg, x.rep.word()), self.fg.gog().vertex_name(x.cell))
    }

    pub fn format_edge(&self, x: &TreeEdge) -> String {
        format!("{}*{}", format_word(self.fg, x.rep.word()), self.fg.gog().edge(x.cell).name)
    }

    /// One line per cell: representative, cell name and incidence.
    pub fn format_patch(&self, patch: &TreePatch) -> String {
        let mut out = String::new();
        for (i, v) in patch.vertices.iter().enumerate() {
            let marker = if patch.frontier[i] { " frontier" } else { "" };
            out.push_str(&format!("vertex {i} {}{marker}\n", self.format_vertex(v)));
        }
        for (e, a, b) in &patch.edges {
            out.push_str(&format!("edge {} {a} -> {b}\n", self.format_edge(e)));
        }
        out
    }

    /// The quotient of the minimal invariant subtree by `H = <gens>`.
    ///
    /// Starts from `L`, the union of the geodesics from the base vertex to
    /// its images under the generators, and identifies cells of `H L` that
    /// lie in one `H`-orbit. Each pass applies every generator and inverse
    /// to the cells found by the previous pass; images already known are merged into one orbit
    /// (or, when they already share an orbit, contribute a stabilizer
    /// element), new images join the orbit of their preimage. The closure
    /// stops after a pass with no merge and no new stabilizer element.
    pub fn minimal_invariant_subtree(
        &self,
        gens: &[NormalForm],
        cell_budget: usize,
    ) -> Result<OrbitQuotient, TreeError> {
        use crate::decision::{classify_subgroup, Finiteness};
        if matches!(classify_subgroup(self.fg, gens).finiteness, Finiteness::Finite(_)) {
            return Err(TreeError::FiniteGroupInput);
        }
        let mut letters: Vec<NormalForm> = Vec::new();
        for g in gens {
            for x in [g.clone(), self.fg.inv(g)] {
                if !x.is_trivial() && !letters.contains(&x) {
                    letters.push(x);
                }
            }
        }
        // L as a set of cells, in a deterministic order
        let mut cells: Vec<TreeCell> = Vec::new();
        let mut index: HashMap<TreeCell, usize> = HashMap::new();
        let base = self.base_vertex();
        let add = |c: TreeCell, cells: &mut Vec<TreeCell>, index: &mut HashMap<TreeCell, usize>| {
            *index.entry(c.clone()).or_insert_with(|| {
                cells.push(c);
                cells.len() - 1
            })
        };
        add(TreeCell::Vertex(base.clone()), &mut cells, &mut index);
        for g in gens {
            let target = self.act_vertex(g, &base);
            let path = self.geodesic(&base, &target, usize::MAX).expect("unbounded budget");
            for v in &path.vertices {
                add(TreeCell::Vertex(v.clone()), &mut cells, &mut index);
            }
            for (e, _, _) in &path.edges {
                add(TreeCell::Edge(e.clone()), &mut cells, &mut index);
            }
        }
        let l_size = cells.len();
        // weighted union-find: cell = transport * parent
        let mut parent: Vec<usize> = (0..cells.len()).collect();
        let mut transport: Vec<NormalForm> = vec![self.fg.identity(); cells.len()];
        let mut stabilizers: HashMap<usize, HashSet<NormalForm>> = HashMap::new();
        fn find(
            fg: &FundamentalGroup,
            parent: &mut [usize],
            transport: &mut [NormalForm],
            x: usize,
        ) -> (usize, NormalForm) {
            if parent[x] == x {
                return (x, fg.identity());
            }
            let p = parent[x];
            let (root, w) = find(fg, parent, transport, p);
            let composed = fg.mul(&transport[x], &w);
            parent[x] = root;
            transport[x] = composed.clone();
            (root, composed)
        }
        let mut processed_upto = 0usize;
        let mut passes = 0;
        loop {
            passes += 1;
            let mut progress = false;
            let snapshot = cells.len();
            for i in processed_upto..snapshot {
                for h in &letters {
                    let image = self.act(h, &cells[i]);
                    match index.get(&image).copied() {
                        Some(j) => {
                            let (ri, wi) = find(self.fg, &mut parent, &mut transport, i);
                            let (rj, wj) = find(self.fg, &mut parent, &mut transport, j);
                            // cells[j] = h cells[i] = h wi root_i, cells[j] = wj root_j
                            let link = self.fg.mul(&self.fg.mul(&self.fg.inv(&wj), h), &wi);
                            if ri == rj {
                                if !link.is_trivial()
                                    && stabilizers.entry(ri).or_default().insert(link)
                                {
                                    progress = true;
                                }
                            } else {
                                // root_j = link root_i; keep the smaller index as root
                                let (child, root, w) = if ri < rj {
                                    (rj, ri, link)
                                } else {
                                    (ri, rj, self.fg.inv(&link))
                                };
                                parent[child] = root;
                                transport[child] = w.clone();
                                if let Some(st) = stabilizers.remove(&child) {
                                    let winv = self.fg.inv(&w);
                                    let entry = stabilizers.entry(root).or_default();
                                    for s in st {
                                        entry.insert(self.fg.mul(&self.fg.mul(&winv, &s), &w));
                                    }
                                }
                                progress = true;
                            }
                        }
                        None => {
                            if cells.len() >= cell_budget {
                                return Err(TreeError::OrbitBudgetExceeded { cells: cell_budget });
                            }
                            let j = cells.len();
                            cells.push(image.clone());
                            index.insert(image, j);
                            // image = h cells[i]
                            parent.push(i);
                            transport.push(h.clone());
                        }
                    }
                }
            }
            processed_upto = snapshot;
            if !progress {
                break;
            }
        }
        // classes of L cells
        let mut root_class: HashMap<usize, usize> = HashMap::new();
        let mut vertex_classes = Vec::new();
        let mut edge_classes: Vec<EdgeOrbit> = Vec::new();
        let mut class_of_cell = vec![usize::MAX; l_size];
        for i in 0..l_size {
            let (r, _) = find(self.fg, &mut parent, &mut transport, i);
            if let TreeCell::Vertex(v) = &cells[r] {
                let k = *root_class.entry(r).or_insert_with(|| {
                    vertex_classes.push(VertexOrbit {
                        rep: v.clone(),
                        cells_in_l: 0,
                        stabilizer: close_finite(self.fg, stabilizers.get(&r)),
                    });
                    vertex_classes.len() - 1
                });
                vertex_classes[k].cells_in_l += 1;
                class_of_cell[i] = k;
            }
        }
        for i in 0..l_size {
            let (r, _) = find(self.fg, &mut parent, &mut transport, i);
            if let TreeCell::Edge(e) = &cells[r] {
                if r != i {
                    if let Some(k) = edge_classes.iter().position(|c| c.rep == *e) {
                        edge_classes[k].cells_in_l += 1;
                    }
                    continue;
                }
                let (d0, d1) = self.endpoints(e);
                let class = |v: TreeVertex| class_of_cell[index[&TreeCell::Vertex(v)]];
                edge_classes.push(EdgeOrbit {
                    rep: e.clone(),
                    source: class(d0),
                    target: class(d1),
                    cells_in_l: 1,
                    stabilizer: close_finite(self.fg, stabilizers.get(&r)),
                });
            }
        }
        Ok(OrbitQuotient { vertices: vertex_classes, edges: edge_classes, passes, cells_explored: cells.len() })
    }
}

/// Closes a set of elements of a finite subgroup under multiplication.
fn close_finite(fg: &FundamentalGroup, seeds: Option<&HashSet<NormalForm>>) -> Vec<NormalForm> {
    let mut out = vec![fg.identity()];
    let seeds: Vec<NormalForm> = seeds.map(|s| s.iter().cloned().collect()).unwrap_or_default();
    let mut i = 0;
    while i < out.len() {
        for s in &seeds {
            let y = fg.mul(&out[i], s);
            if !out.contains(&y) {
                out.push(y);
            }
        }
        i += 1;
    }
    out.sort();
    out
}

#[derive(Clone, Debug)]
pub struct VertexOrbit {
    pub rep: TreeVertex,
    pub cells_in_l: usize,
    pub stabilizer: Vec<NormalForm>,
}

#[derive(Clone, Debug)]
pub struct EdgeOrbit {
    pub rep: TreeEdge,
    pub source: usize,
    pub target: usize,
    pub cells_in_l: usize,
    pub stabilizer: Vec<NormalForm>,
}

/// The finite graph `H \ D` with stabilizer data.
#[derive(Clone, Debug)]
pub struct OrbitQuotient {
    pub vertices: Vec<VertexOrbit>,
    pub edges: Vec<EdgeOrbit>,
    pub passes: usize,
    pub cells_explored: usize,
}

impl OrbitQuotient {
    pub fn format(&self, tree: &StandardTree<'_>) -> String {
        let mut out = format!(
            "quotient vertices={} edges={} passes={} cells={}\n",
            self.vertices.len(),
            self.edges.len(),
            self.passes,
            self.cells_explored
        );
        for (i, v) in self.vertices.iter().enumerate() {
            out.push_str(&format!(
                "vertex {i} {} stabilizer_order={}\n",
                tree.format_vertex(&v.rep),
                v.stabilizer.len()
            ));
        }
        for (i, e) in self.edges.iter().enumerate() {
            out.push_str(&format!(
                "edge {i} {} {} -> {} stabilizer_order={}\n",
                tree.format_edge(&e.rep),
                e.source,
                e.target,
                e.stabilizer.len()
            ));
        }
        out
    }
}

impl fmt::Display for TreeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vertex(cell {}, length {})", self.cell, self.rep.edge_length())
    }
}
