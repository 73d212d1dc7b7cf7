//! Path words over a graph of groups and exact arithmetic in its
//! fundamental group.
//!
//! A [`PathWord`] is `g0 (e1, d1) g1 ... (en, dn) gn` where each `gi` lies in
//! the group of the vertex reached after `i` letters. The defining relation
//! of an edge `e` is `e^-1 bd0(x) e = bd1(x)`, so an element of `bd0(G(e))`
//! can be pushed across `e` from left to right, and an element of
//! `bd1(G(e))` across `e^-1`.
//!
//! Normal forms fix, for every edge end, the transversal of left cosets of
//! the boundary image whose representatives are least element indices, with
//! the identity representing the trivial coset.

mod presentation;
mod syntax;

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::gog::{GogError, GraphOfGroups};

pub use presentation::{Generator, Presentation, Relator};
pub use syntax::{format_word, parse_path, parse_word, parse_word_list};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("endpoint mismatch: word ends at {left} but the next starts at {right}")]
    EndpointMismatch { left: String, right: String },
    #[error("type error: {0}")]
    TypeError(String),
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("word is not closed at the base vertex")]
    NotClosed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    Forward,
    Backward,
}

impl Dir {
    pub fn reverse(self) -> Dir {
        match self {
            Dir::Forward => Dir::Backward,
            Dir::Backward => Dir::Forward,
        }
    }

    pub fn sign(self) -> i32 {
        match self {
            Dir::Forward => 1,
            Dir::Backward => -1,
        }
    }

    fn index(self) -> usize {
        match self {
            Dir::Forward => 0,
            Dir::Backward => 1,
        }
    }
}

/// One edge letter followed by an element of the vertex it leads to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub edge: usize,
    pub dir: Dir,
    pub elem: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PathWord {
    start: usize,
    head: usize,
    steps: Vec<Step>,
    end: usize,
}

impl PathWord {
    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.end
    }

    /// The element before the first edge letter.
    pub fn head(&self) -> usize {
        self.head
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Number of edge letters.
    pub fn edge_length(&self) -> usize {
        self.steps.len()
    }

    pub fn is_loop(&self) -> bool {
        self.start == self.end
    }

    /// Total order used to pick canonical representatives: edge length
    /// first, then the syllables lexicographically.
    pub fn canonical_cmp(&self, other: &PathWord) -> Ordering {
        (self.steps.len(), self.start, self.head, &self.steps).cmp(&(
            other.steps.len(),
            other.start,
            other.head,
            &other.steps,
        ))
    }
}

/// A Britton-reduced word whose syllables are transversal representatives.
/// Two co-terminal words are equal in the fundamental groupoid iff their
/// normal forms are identical.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalForm(PathWord);

impl NormalForm {
    pub fn word(&self) -> &PathWord {
        &self.0
    }

    pub fn into_word(self) -> PathWord {
        self.0
    }

    pub fn edge_length(&self) -> usize {
        self.0.steps.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.steps.is_empty() && self.0.start == self.0.end
    }
}

impl PartialOrd for NormalForm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NormalForm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.canonical_cmp(&other.0)
    }
}

/// Element order in the fundamental group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite => write!(f, "infinite"),
        }
    }
}

/// Data for pushing elements across one edge in one direction.
#[derive(Clone, Debug)]
struct Crossing {
    from: usize,
    to: usize,
    /// Membership in the boundary image inside the `from` group.
    in_image: Vec<bool>,
    /// On the boundary image: the matching element on the far side.
    transport: Vec<usize>,
    /// Transversal representative of the coset `g A`.
    rep: Vec<usize>,
    /// `transport(rep(g)^-1 g)`, the part of `g` that crosses the edge.
    carry: Vec<usize>,
}

/// The fundamental group of a graph of groups at its base vertex, with the
/// precomputed tables that drive normal forms.
#[derive(Clone, Debug)]
pub struct FundamentalGroup {
    gog: GraphOfGroups,
    crossings: Vec<[Crossing; 2]>,
    /// Spanning-tree path from the base to each vertex.
    tree_paths: Vec<Vec<(usize, Dir)>>,
}

impl FundamentalGroup {
    pub fn new(gog: &GraphOfGroups) -> Result<Self, GogError> {
        gog.ensure_valid()?;
        let mut crossings = Vec::new();
        for (e, edge) in gog.edges().iter().enumerate() {
            let make = |from: usize, to: usize, into_from: &[usize], into_to: &[usize]| {
                let g = gog.vertex_group(from);
                let mut in_image = vec![false; g.order()];
                let mut transport = vec![usize::MAX; g.order()];
                for x in 0..into_from.len() {
                    in_image[into_from[x]] = true;
                    transport[into_from[x]] = into_to[x];
                }
                let mut rep = vec![usize::MAX; g.order()];
                for x in 0..g.order() {
                    if rep[x] != usize::MAX {
                        continue;
                    }
                    let coset: Vec<usize> = into_from.iter().map(|&a| g.mul(x, a)).collect();
                    let r = if coset.contains(&g.identity()) {
                        g.identity()
                    } else {
                        *coset.iter().min().unwrap()
                    };
                    for y in coset {
                        rep[y] = r;
                    }
                }
                let carry = (0..g.order()).map(|x| transport[g.mul(g.inv(rep[x]), x)]).collect();
                Crossing { from, to, in_image, transport, rep, carry }
            };
            crossings.push([
                make(edge.source, edge.target, gog.bd0(e), gog.bd1(e)),
                make(edge.target, edge.source, gog.bd1(e), gog.bd0(e)),
            ]);
        }
        let mut tree_paths = vec![None; gog.vertex_count()];
        tree_paths[gog.base()] = Some(Vec::new());
        let mut queue = VecDeque::from([gog.base()]);
        while let Some(v) = queue.pop_front() {
            for e in gog.tree_edges() {
                let edge = gog.edge(e);
                for (a, b, dir) in [(edge.source, edge.target, Dir::Forward), (edge.target, edge.source, Dir::Backward)] {
                    if a == v && tree_paths[b].is_none() {
                        let mut p: Vec<(usize, Dir)> = tree_paths[v].clone().unwrap();
                        p.push((e, dir));
                        tree_paths[b] = Some(p);
                        queue.push_back(b);
                    }
                }
            }
        }
        let tree_paths = tree_paths.into_iter().map(|p| p.expect("tree spans")).collect();
        Ok(FundamentalGroup { gog: gog.clone(), crossings, tree_paths })
    }

    pub fn gog(&self) -> &GraphOfGroups {
        &self.gog
    }

    pub fn base(&self) -> usize {
        self.gog.base()
    }

    fn crossing(&self, edge: usize, dir: Dir) -> &Crossing {
        &self.crossings[edge][dir.index()]
    }

    /// Vertex reached by `(edge, dir)` from its start.
    pub fn step_target(&self, edge: usize, dir: Dir) -> usize {
        self.crossing(edge, dir).to
    }

    pub fn step_source(&self, edge: usize, dir: Dir) -> usize {
        self.crossing(edge, dir).from
    }

    /// Coset representative of `g` for the crossing `(edge, dir)`.
    pub fn transversal_rep(&self, edge: usize, dir: Dir, g: usize) -> usize {
        self.crossing(edge, dir).rep[g]
    }

    /// Distinct transversal representatives of the crossing `(edge, dir)`,
    /// identity first.
    pub fn transversal(&self, edge: usize, dir: Dir) -> Vec<usize> {
        let c = self.crossing(edge, dir);
        let id = self.gog.vertex_group(c.from).identity();
        let mut reps: Vec<usize> = c.rep.iter().copied().filter(|&r| r != id).collect();
        reps.sort_unstable();
        reps.dedup();
        reps.insert(0, id);
        reps
    }

    /// Whether `g` lies in the boundary image crossed by `(edge, dir)`.
    pub fn in_boundary_image(&self, edge: usize, dir: Dir, g: usize) -> bool {
        self.crossing(edge, dir).in_image[g]
    }

    /// Checks the typing of a raw path word.
    pub fn path_word(&self, start: usize, head: usize, steps: Vec<Step>) -> Result<PathWord, WordError> {
        let nv = self.gog.vertex_count();
        if start >= nv {
            return Err(WordError::TypeError(format!("vertex {start} out of range")));
        }
        if head >= self.gog.vertex_group(start).order() {
            return Err(WordError::TypeError(format!(
                "element {head} not in the group of {}",
                self.gog.vertex_name(start)
            )));
        }
        let mut at = start;
        for (i, s) in steps.iter().enumerate() {
            if s.edge >= self.gog.edge_count() {
                return Err(WordError::TypeError(format!("edge {} out of range", s.edge)));
            }
            let c = self.crossing(s.edge, s.dir);
            if c.from != at {
                return Err(WordError::TypeError(format!(
                    "letter {} of the word leaves {} but the path is at {}",
                    i + 1,
                    self.gog.vertex_name(c.from),
                    self.gog.vertex_name(at)
                )));
            }
            at = c.to;
            if s.elem >= self.gog.vertex_group(at).order() {
                return Err(WordError::TypeError(format!(
                    "element {} not in the group of {}",
                    s.elem,
                    self.gog.vertex_name(at)
                )));
            }
        }
        Ok(PathWord { start, head, steps, end: at })
    }

    /// Trusted constructor for words built internally.
    fn raw(&self, start: usize, head: usize, steps: Vec<Step>) -> PathWord {
        let end = steps.last().map_or(start, |s| self.crossing(s.edge, s.dir).to);
        PathWord { start, head, steps, end }
    }

    /// The empty word at `v`.
    pub fn empty_at(&self, v: usize) -> PathWord {
        self.raw(v, self.gog.vertex_group(v).identity(), Vec::new())
    }

    pub fn identity(&self) -> NormalForm {
        NormalForm(self.empty_at(self.base()))
    }

    /// The tree path from the base to `v` as a word.
    pub fn tree_path(&self, v: usize) -> PathWord {
        self.raw(
            self.base(),
            self.gog.vertex_group(self.base()).identity(),
            self.tree_paths[v]
                .iter()
                .map(|&(edge, dir)| Step {
                    edge,
                    dir,
                    elem: self.gog.vertex_group(self.crossing(edge, dir).to).identity(),
                })
                .collect(),
        )
    }

    /// `g` in `G(v)` as an element at the base: `P_v g P_v^-1`.
    pub fn vertex_element(&self, v: usize, g: usize) -> PathWord {
        let p = self.tree_path(v);
        let local = self.raw(v, g, Vec::new());
        self.concat(&self.concat(&p, &local), &self.invert(&p))
    }

    /// The edge letter at the base: `P_source e P_target^-1`.
    pub fn edge_element(&self, e: usize, dir: Dir) -> PathWord {
        let from = self.crossing(e, dir).from;
        let to = self.crossing(e, dir).to;
        let letter = self.raw(
            from,
            self.gog.vertex_group(from).identity(),
            vec![Step { edge: e, dir, elem: self.gog.vertex_group(to).identity() }],
        );
        self.concat(&self.concat(&self.tree_path(from), &letter), &self.invert(&self.tree_path(to)))
    }

    fn concat(&self, a: &PathWord, b: &PathWord) -> PathWord {
        debug_assert_eq!(a.end, b.start);
        let g = self.gog.vertex_group(a.end);
        let mut steps = a.steps.clone();
        let head = match steps.last_mut() {
            Some(last) => {
                last.elem = g.mul(last.elem, b.head);
                a.head
            }
            None => g.mul(a.head, b.head),
        };
        steps.extend_from_slice(&b.steps);
        PathWord { start: a.start, head, steps, end: b.end }
    }

    /// Concatenation, merging the two middle elements.
    pub fn multiply(&self, a: &PathWord, b: &PathWord) -> Result<PathWord, WordError> {
        if a.end != b.start {
            return Err(WordError::EndpointMismatch {
                left: self.gog.vertex_name(a.end).to_string(),
                right: self.gog.vertex_name(b.start).to_string(),
            });
        }
        Ok(self.concat(a, b))
    }

    /// Formal reversal with inverted syllables.
    pub fn invert(&self, w: &PathWord) -> PathWord {
        let group_at = |v: usize| self.gog.vertex_group(v);
        let n = w.steps.len();
        let elem_at = |i: usize| if i == 0 { w.head } else { w.steps[i - 1].elem };
        let vertex_at = |i: usize| if i == 0 { w.start } else { self.crossing(w.steps[i - 1].edge, w.steps[i - 1].dir).to };
        let head = group_at(w.end).inv(elem_at(n));
        let steps = (0..n)
            .rev()
            .map(|i| Step {
                edge: w.steps[i].edge,
                dir: w.steps[i].dir.reverse(),
                elem: group_at(vertex_at(i)).inv(elem_at(i)),
            })
            .collect();
        PathWord { start: w.end, head, steps, end: w.start }
    }

    /// Britton reduction followed by transversal normalization.
    pub fn reduce(&self, w: &PathWord) -> NormalForm {
        let mut head = w.head;
        let mut out: Vec<Step> = Vec::with_capacity(w.steps.len());
        for &s in &w.steps {
            if let Some(&last) = out.last() {
                let c = self.crossing(s.edge, s.dir);
                if last.edge == s.edge && last.dir == s.dir.reverse() && c.in_image[last.elem] {
                    // (e, -d) h (e, d) with h in the image equals transport(h).
                    out.pop();
                    let t = c.transport[last.elem];
                    let g = self.gog.vertex_group(c.to);
                    match out.last_mut() {
                        Some(prev) => prev.elem = g.mul(g.mul(prev.elem, t), s.elem),
                        None => head = g.mul(g.mul(head, t), s.elem),
                    }
                    continue;
                }
            }
            out.push(s);
        }
        // push carries rightwards
        for i in 0..out.len() {
            let c = self.crossing(out[i].edge, out[i].dir);
            let g = if i == 0 { head } else { out[i - 1].elem };
            let (r, carry) = (c.rep[g], c.carry[g]);
            if i == 0 {
                head = r;
            } else {
                out[i - 1].elem = r;
            }
            out[i].elem = self.gog.vertex_group(c.to).mul(carry, out[i].elem);
        }
        NormalForm(self.raw(w.start, head, out))
    }

    /// Normal form of a product.
    pub fn mul(&self, a: &NormalForm, b: &NormalForm) -> NormalForm {
        self.reduce(&self.concat(&a.0, &b.0))
    }

    pub fn inv(&self, a: &NormalForm) -> NormalForm {
        self.reduce(&self.invert(&a.0))
    }

    /// `g h g^-1`
    pub fn conj(&self, g: &NormalForm, h: &NormalForm) -> NormalForm {
        self.mul(&self.mul(g, h), &self.inv(g))
    }

    pub fn commutes(&self, a: &NormalForm, b: &NormalForm) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    pub fn pow(&self, a: &NormalForm, k: i64) -> NormalForm {
        let base = if k < 0 { self.inv(a) } else { a.clone() };
        let mut acc = NormalForm(self.empty_at(a.0.start));
        for _ in 0..k.unsigned_abs() {
            acc = self.mul(&acc, &base);
        }
        acc
    }

    pub fn equal(&self, a: &PathWord, b: &PathWord) -> Result<bool, WordError> {
        if a.start != b.start || a.end != b.end {
            return Err(WordError::EndpointMismatch {
                left: format!("{}..{}", self.gog.vertex_name(a.start), self.gog.vertex_name(a.end)),
                right: format!("{}..{}", self.gog.vertex_name(b.start), self.gog.vertex_name(b.end)),
            });
        }
        Ok(self.reduce(a) == self.reduce(b))
    }

    /// Exact order of a loop: elliptic elements are iterated, words whose
    /// cyclic reduction has edge letters have infinite order.
    pub fn order_of(&self, w: &PathWord) -> Result<Order, WordError> {
        if !w.is_loop() {
            return Err(WordError::EndpointMismatch {
                left: self.gog.vertex_name(w.end).to_string(),
                right: self.gog.vertex_name(w.start).to_string(),
            });
        }
        let mut cur = self.reduce(w).0;
        loop {
            let n = cur.steps.len();
            if n == 0 {
                return Ok(Order::Finite(self.gog.vertex_group(cur.start).element_order(cur.head)));
            }
            let (first, last) = (cur.steps[0], cur.steps[n - 1]);
            let g = self.gog.vertex_group(cur.start);
            let wrap = g.mul(last.elem, cur.head);
            let c = self.crossing(first.edge, first.dir);
            if !(last.edge == first.edge && last.dir == first.dir.reverse() && c.in_image[wrap]) {
                return Ok(Order::Infinite);
            }
            // conjugate by (head, first letter) to rotate the pinch inside
            let u = self.raw(cur.start, cur.head, vec![Step { edge: first.edge, dir: first.dir, elem: self.gog.vertex_group(c.to).identity() }]);
            let rotated = self.concat(&self.concat(&self.invert(&u), &cur), &u);
            let next = self.reduce(&rotated).0;
            debug_assert!(next.steps.len() < n);
            cur = next;
        }
    }

    /// Projection onto the free group of the underlying graph: non-tree edge
    /// letters only, freely reduced.
    pub fn graph_projection(&self, w: &PathWord) -> Vec<(usize, Dir)> {
        let mut out: Vec<(usize, Dir)> = Vec::new();
        for s in &w.steps {
            if self.gog.is_tree_edge(s.edge) {
                continue;
            }
            if out.last() == Some(&(s.edge, s.dir.reverse())) {
                out.pop();
            } else {
                out.push((s.edge, s.dir));
            }
        }
        out
    }

    /// Standard generators at the base: every non-identity vertex element
    /// and every non-tree edge letter.
    pub fn generators(&self) -> Vec<NormalForm> {
        let mut gens = Vec::new();
        for v in 0..self.gog.vertex_count() {
            let g = self.gog.vertex_group(v);
            for x in (0..g.order()).filter(|&x| x != g.identity()) {
                gens.push(self.reduce(&self.vertex_element(v, x)));
            }
        }
        for e in 0..self.gog.edge_count() {
            if !self.gog.is_tree_edge(e) {
                gens.push(self.reduce(&self.edge_element(e, Dir::Forward)));
            }
        }
        gens
    }

    /// Generators together with their inverses, deduplicated, in first
    /// appearance order.
    pub fn symmetric_generators(&self) -> Vec<NormalForm> {
        let mut out: Vec<NormalForm> = Vec::new();
        for g in self.generators() {
            for x in [self.inv(&g), g] {
                if !out.contains(&x) {
                    out.push(x);
                }
            }
        }
        out
    }

    /// All elements of word length at most `radius` over `gens` and their
    /// inverses, by breadth-first search on normal forms.
    pub fn ball(&self, gens: &[NormalForm], radius: usize) -> Vec<NormalForm> {
        let mut letters: Vec<NormalForm> = Vec::new();
        for g in gens {
            for x in [g.clone(), self.inv(g)] {
                if !letters.contains(&x) {
                    letters.push(x);
                }
            }
        }
        let mut seen: HashSet<NormalForm> = HashSet::from([self.identity()]);
        let mut out = vec![self.identity()];
        let mut frontier = vec![self.identity()];
        for _ in 0..radius {
            let mut next = Vec::new();
            for w in &frontier {
                for l in &letters {
                    let y = self.mul(w, l);
                    if seen.insert(y.clone()) {
                        next.push(y.clone());
                        out.push(y);
                    }
                }
            }
            frontier = next;
        }
        out
    }

    /// Closed normal forms at the base with at most `max_edges` edge
    /// letters, ordered by edge length then syllables.
    pub fn enumerate_normal_forms(&self, max_edges: usize) -> Vec<NormalForm> {
        let base = self.base();
        let mut out: Vec<NormalForm> = Vec::new();
        // partial words ending in a step, awaiting the final element
        let mut layer: Vec<PathWord> = vec![self.empty_at(base)];
        for len in 0..=max_edges {
            let mut finished = Vec::new();
            for w in &layer {
                let g = self.gog.vertex_group(w.end);
                if w.end == base {
                    for x in 0..g.order() {
                        let mut done = w.clone();
                        match done.steps.last_mut() {
                            Some(last) => last.elem = x,
                            None => done.head = x,
                        }
                        finished.push(NormalForm(done));
                    }
                }
            }
            finished.sort();
            out.extend(finished);
            if len == max_edges {
                break;
            }
            let mut next = Vec::new();
            for w in &layer {
                for e in 0..self.gog.edge_count() {
                    for dir in [Dir::Forward, Dir::Backward] {
                        let c = self.crossing(e, dir);
                        if c.from != w.end {
                            continue;
                        }
                        let pinch = w.steps.last().is_some_and(|l| l.edge == e && l.dir == dir.reverse());
                        for r in self.transversal(e, dir) {
                            if pinch && c.in_image[r] {
                                continue;
                            }
                            let mut steps = w.steps.clone();
                            let head = match steps.last_mut() {
                                Some(last) => {
                                    last.elem = r;
                                    w.head
                                }
                                None => r,
                            };
                            steps.push(Step { edge: e, dir, elem: self.gog.vertex_group(c.to).identity() });
                            next.push(self.raw(w.start, head, steps));
                        }
                    }
                }
            }
            layer = next;
        }
        out
    }

    /// A random product of `len` symmetric generators.
    pub fn random_word<R: Rng>(&self, rng: &mut R, len: usize) -> PathWord {
        let letters = self.letter_words();
        let mut w = self.empty_at(self.base());
        for _ in 0..len {
            let l = &letters[rng.gen_range(0..letters.len())];
            w = self.concat(&w, l);
        }
        w
    }

    /// Unreduced words for every generator token and its inverse.
    fn letter_words(&self) -> Vec<PathWord> {
        let mut out = Vec::new();
        for v in 0..self.gog.vertex_count() {
            let g = self.gog.vertex_group(v);
            for x in (0..g.order()).filter(|&x| x != g.identity()) {
                out.push(self.vertex_element(v, x));
            }
        }
        for e in 0..self.gog.edge_count() {
            for dir in [Dir::Forward, Dir::Backward] {
                out.push(self.edge_element(e, dir));
            }
        }
        if out.is_empty() {
            out.push(self.empty_at(self.base()));
        }
        out
    }

    pub fn require_closed(&self, w: &PathWord) -> Result<(), WordError> {
        if w.start == self.base() && w.end == self.base() {
            Ok(())
        } else {
            Err(WordError::NotClosed)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn setup(name: &str) -> FundamentalGroup {
        FundamentalGroup::new(&fixtures::by_name(name).unwrap()).unwrap()
    }

    fn w(fg: &FundamentalGroup, text: &str) -> PathWord {
        parse_word(fg, text).unwrap()
    }

    #[test]
    fn dinf_pinch() {
        let fg = setup("dinf");
        let a = fg.gog().vertex_group(0).find_element("a").unwrap();
        let word = fg
            .path_word(0, a, vec![Step { edge: 0, dir: Dir::Forward, elem: 0 }, Step { edge: 0, dir: Dir::Backward, elem: 0 }])
            .unwrap();
        let nf = fg.reduce(&word);
        assert_eq!(nf.edge_length(), 0);
        assert_eq!(nf.word().head(), a);
        assert!(fg.reduce(&fg.empty_at(0)).is_trivial());
    }

    #[test]
    fn inverse_cancels() {
        for (name, _) in fixtures::all() {
            let fg = setup(name);
            let mut rng = rand::rngs::mock::StepRng::new(3, 7);
            for len in 0..6 {
                let x = fg.random_word(&mut rng, len);
                let p = fg.multiply(&x, &fg.invert(&x)).unwrap();
                assert!(fg.reduce(&p).is_trivial(), "{name}");
            }
        }
    }

    #[test]
    fn formal_inverse_shape() {
        let fg = setup("dinf");
        let word = fg.path_word(0, 1, vec![Step { edge: 0, dir: Dir::Forward, elem: 1 }]).unwrap();
        let inv = fg.invert(&word);
        assert_eq!(inv.start(), 1);
        assert_eq!(inv.head(), 1);
        assert_eq!(inv.steps(), &[Step { edge: 0, dir: Dir::Backward, elem: 1 }]);
    }

    #[test]
    fn endpoint_mismatch() {
        let fg = setup("dinf");
        let a = fg.empty_at(0);
        let b = fg.empty_at(1);
        assert!(matches!(fg.multiply(&a, &b), Err(WordError::EndpointMismatch { .. })));
        assert!(fg.equal(&a, &b).is_err());
    }

    #[test]
    fn psl2z_alternating_word() {
        let fg = setup("psl2z");
        let x = w(&fg, "v1.c2 v2.c3");
        let nf = fg.reduce(&fg.multiply(&x, &x).unwrap());
        assert_eq!(nf.edge_length(), 4);
        assert!(!nf.is_trivial());
        assert_eq!(format_word(&fg, nf.word()), "v1.c2 e v2.c3 e^-1 v1.c2 e v2.c3 e^-1");
    }

    #[test]
    fn orders() {
        let fg = setup("dinf");
        assert_eq!(fg.order_of(&fg.empty_at(0)).unwrap(), Order::Finite(1));
        assert_eq!(fg.order_of(&w(&fg, "v1.a")).unwrap(), Order::Finite(2));
        assert_eq!(fg.order_of(&w(&fg, "v2.b")).unwrap(), Order::Finite(2));
        assert_eq!(fg.order_of(&w(&fg, "v1.a v2.b")).unwrap(), Order::Infinite);
        assert_eq!(fg.order_of(&w(&fg, "v2.b v1.a v2.b")).unwrap(), Order::Finite(2));
        let fg = setup("psl2z");
        assert_eq!(fg.order_of(&w(&fg, "v1.c2 v2.c3")).unwrap(), Order::Infinite);
        assert_eq!(fg.order_of(&w(&fg, "v1.c2 v2.c3 v1.c2")).unwrap(), Order::Finite(3));
        let fg = setup("hnn");
        assert_eq!(fg.order_of(&w(&fg, "t")).unwrap(), Order::Infinite);
        assert_eq!(fg.order_of(&w(&fg, "t v.c t^-1")).unwrap(), Order::Finite(2));
    }

    #[test]
    fn projections() {
        let fg = setup("dinf");
        assert!(fg.graph_projection(&w(&fg, "v1.a v2.b v1.a")).is_empty());
        let fg = setup("f2");
        assert_eq!(
            fg.graph_projection(&w(&fg, "x y x^-1")),
            vec![(0, Dir::Forward), (1, Dir::Forward), (0, Dir::Backward)]
        );
        let fg = setup("hnn");
        assert!(fg.graph_projection(&w(&fg, "v.c t v.c t^-1")).is_empty());
    }

    #[test]
    fn hnn_relation() {
        // t^-1 c t = c
        let fg = setup("hnn");
        assert!(fg.equal(&w(&fg, "t^-1 v.c t"), &w(&fg, "v.c")).unwrap());
        assert!(!fg.equal(&w(&fg, "t v.c"), &w(&fg, "t")).unwrap());
    }

    #[test]
    fn enumeration_is_sorted_and_distinct() {
        for (name, _) in fixtures::all() {
            let fg = setup(name);
            let nfs = fg.enumerate_normal_forms(3);
            assert_eq!(nfs[0], fg.identity(), "{name}");
            for pair in nfs.windows(2) {
                assert!(pair[0] < pair[1], "{name}");
            }
            for x in &nfs {
                assert_eq!(&fg.reduce(x.word()), x, "{name}: enumerated word is not normal");
            }
        }
    }

    #[test]
    fn dinf_ball_sizes() {
        let fg = setup("dinf");
        let gens = fg.generators();
        assert_eq!(gens.len(), 2);
        assert_eq!(fg.ball(&gens, 6).len(), 13);
        let fg = setup("f2");
        assert_eq!(fg.ball(&fg.generators(), 3).len(), 1 + 4 + 12 + 36);
    }
}
