//! A finite presentation of the fundamental group, in the generators used
//! by the word syntax.

use std::fmt;

use super::{Dir, FundamentalGroup, PathWord};
use crate::gog::GraphOfGroups;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    /// A non-identity element of a vertex group.
    Vertex { vertex: usize, elem: usize },
    /// An edge letter.
    Edge(usize),
}

/// A relator as `(generator index, exponent)` pairs, exponents `±1`.
pub type Relator = Vec<(usize, i32)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<Generator>,
    pub names: Vec<String>,
    pub relators: Vec<Relator>,
}

impl Presentation {
    /// Vertex multiplication tables, one relation `e^-1 bd0(x) e bd1(x)^-1`
    /// per generator `x` of each edge group, and `e` for each tree edge.
    pub fn of(g: &GraphOfGroups) -> Presentation {
        let mut generators = Vec::new();
        let mut names = Vec::new();
        let mut vertex_index = Vec::new();
        for v in 0..g.vertex_count() {
            let grp = g.vertex_group(v);
            let mut idx = vec![usize::MAX; grp.order()];
            for x in (0..grp.order()).filter(|&x| x != grp.identity()) {
                idx[x] = generators.len();
                generators.push(Generator::Vertex { vertex: v, elem: x });
                let label = grp.label(x);
                names.push(if label.contains(char::is_whitespace) && !label.starts_with('(') {
                    format!("{}.({label})", g.vertex_name(v))
                } else {
                    format!("{}.{label}", g.vertex_name(v))
                });
            }
            vertex_index.push(idx);
        }
        let edge_index: Vec<usize> = (0..g.edge_count())
            .map(|e| {
                generators.push(Generator::Edge(e));
                names.push(g.edge(e).name.clone());
                generators.len() - 1
            })
            .collect();
        let mut relators = Vec::new();
        for v in 0..g.vertex_count() {
            let grp = g.vertex_group(v);
            let id = grp.identity();
            for a in (0..grp.order()).filter(|&x| x != id) {
                for b in (0..grp.order()).filter(|&x| x != id) {
                    let c = grp.mul(a, b);
                    let mut r = vec![(vertex_index[v][a], 1), (vertex_index[v][b], 1)];
                    if c != id {
                        r.push((vertex_index[v][c], -1));
                    }
                    relators.push(r);
                }
            }
        }
        for (e, edge) in g.edges().iter().enumerate() {
            for x in g.edge_group(e).generating_set() {
                let s = vertex_index[edge.source][g.bd0(e)[x]];
                let t = vertex_index[edge.target][g.bd1(e)[x]];
                relators.push(vec![(edge_index[e], -1), (s, 1), (edge_index[e], 1), (t, -1)]);
            }
            if g.is_tree_edge(e) {
                relators.push(vec![(edge_index[e], 1)]);
            }
        }
        Presentation { generators, names, relators }
    }

    pub fn index_of(&self, gen: Generator) -> Option<usize> {
        self.generators.iter().position(|&g| g == gen)
    }

    /// Writes a closed word at the base as a product of generators, by
    /// telescoping tree paths: `g0 e1 g1 ... en gn` becomes
    /// `g0 t_e1 (P g1 P^-1) ... t_en (P gn P^-1)`.
    pub fn express(&self, fg: &FundamentalGroup, w: &PathWord) -> Relator {
        let gog = fg.gog();
        let mut out = Vec::new();
        let push_elem = |v: usize, x: usize, out: &mut Relator| {
            if x != gog.vertex_group(v).identity() {
                let i = self.index_of(Generator::Vertex { vertex: v, elem: x }).expect("generator");
                out.push((i, 1));
            }
        };
        push_elem(w.start(), w.head(), &mut out);
        for s in w.steps() {
            let i = self.index_of(Generator::Edge(s.edge)).expect("generator");
            out.push((i, if s.dir == Dir::Forward { 1 } else { -1 }));
            push_elem(fg.step_target(s.edge, s.dir), s.elem, &mut out);
        }
        out
    }

    /// The element of `fg` named by a generator.
    pub fn generator_word(&self, fg: &FundamentalGroup, i: usize) -> PathWord {
        match self.generators[i] {
            Generator::Vertex { vertex, elem } => fg.vertex_element(vertex, elem),
            Generator::Edge(e) => fg.edge_element(e, Dir::Forward),
        }
    }

    pub fn format_relator(&self, r: &Relator) -> String {
        r.iter()
            .map(|&(g, k)| if k < 0 { format!("{}^-1", self.names[g]) } else { self.names[g].clone() })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self.relators.iter().map(|r| self.format_relator(r)).collect();
        write!(f, "< {} | {} >", self.names.join(", "), rels.join(", "))
    }
}
