//! Finite quotients of the fundamental group and the finite graphs of
//! groups they induce.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::gog::{EdgeParts, GoGMorphism, GogParts, GraphOfGroups};
use crate::group::catalog::{CatalogEntry, GroupClass};
use crate::group::{extend_on_generators, homomorphisms, FiniteGroup, Subgroup};
use crate::par::Exec;
use crate::word::{Dir, FundamentalGroup, Generator, PathWord, Presentation, Step};

mod tower;

pub use tower::{apply_beta, connecting, Connection, SquareCheck, Tower, TowerError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum QuotientError {
    #[error("quotient search exceeded its budget of {budget} assignments for target {target}")]
    BudgetExceeded { budget: usize, target: String },
    #[error("quotient is not injective on every vertex group")]
    NotVertexFaithful,
}

/// A homomorphism from the fundamental group onto (or into) a finite group,
/// given on vertex groups and edge letters. Tree edges map to the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteQuotient {
    /// Catalog name of the target.
    pub name: String,
    pub target: FiniteGroup,
    /// `vertex_maps[v][x]` is the image of `x` in `G(v)`.
    pub vertex_maps: Vec<Vec<usize>>,
    /// Image of each edge letter.
    pub edge_images: Vec<usize>,
    pub vertex_faithful: bool,
    pub surjective: bool,
    /// Order of the image.
    pub image_order: usize,
}

impl FiniteQuotient {
    /// Builds a quotient from its data, checking every relation.
    pub fn new(
        gog: &GraphOfGroups,
        name: impl Into<String>,
        target: FiniteGroup,
        vertex_maps: Vec<Vec<usize>>,
        edge_images: Vec<usize>,
    ) -> Option<FiniteQuotient> {
        let mut q = FiniteQuotient {
            name: name.into(),
            target,
            vertex_maps,
            edge_images,
            vertex_faithful: false,
            surjective: false,
            image_order: 0,
        };
        if !q.satisfies_relators(gog) {
            return None;
        }
        q.fill_flags(gog);
        Some(q)
    }

    fn fill_flags(&mut self, gog: &GraphOfGroups) {
        self.vertex_faithful = self.vertex_maps.iter().all(|m| {
            let mut seen = vec![false; self.target.order()];
            m.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
        });
        let gens: Vec<usize> = self
            .vertex_maps
            .iter()
            .flatten()
            .copied()
            .chain(self.edge_images.iter().copied())
            .collect();
        self.image_order = self.target.closure(&gens).len();
        self.surjective = self.image_order == self.target.order();
        debug_assert_eq!(self.vertex_maps.len(), gog.vertex_count());
    }

    /// Images of the generators of [`Presentation::of`].
    pub fn generator_images(&self, p: &Presentation) -> Vec<usize> {
        p.generators
            .iter()
            .map(|g| match *g {
                Generator::Vertex { vertex, elem } => self.vertex_maps[vertex][elem],
                Generator::Edge(e) => self.edge_images[e],
            })
            .collect()
    }

    /// Checks every relator of the presentation independently of how the
    /// quotient was found.
    pub fn satisfies_relators(&self, gog: &GraphOfGroups) -> bool {
        let t = &self.target;
        let p = Presentation::of(gog);
        if self.vertex_maps.len() != gog.vertex_count()
            || self.edge_images.len() != gog.edge_count()
            || (0..gog.vertex_count()).any(|v| self.vertex_maps[v].len() != gog.vertex_group(v).order())
        {
            return false;
        }
        let img = self.generator_images(&p);
        p.relators.iter().all(|r| {
            let value = r.iter().fold(t.identity(), |acc, &(g, k)| {
                t.mul(acc, if k < 0 { t.inv(img[g]) } else { img[g] })
            });
            value == t.identity()
        })
    }

    /// Image of a path word. Tree edges evaluate to the identity, so the
    /// result is meaningful for any path, not only closed ones.
    pub fn eval(&self, fg: &FundamentalGroup, w: &PathWord) -> usize {
        let t = &self.target;
        let mut acc = self.vertex_maps[w.start()][w.head()];
        for s in w.steps() {
            let e = self.edge_images[s.edge];
            acc = t.mul(acc, if s.dir == Dir::Forward { e } else { t.inv(e) });
            acc = t.mul(acc, self.vertex_maps[fg.step_target(s.edge, s.dir)][s.elem]);
        }
        acc
    }

    /// Rank of the kernel, a free group when the quotient is vertex
    /// faithful: `1 - |image| * chi`.
    pub fn kernel_rank(&self, gog: &GraphOfGroups) -> Result<i64, QuotientError> {
        if !self.vertex_faithful {
            return Err(QuotientError::NotVertexFaithful);
        }
        let r = num_rational::Ratio::from_integer(1) - gog.euler_characteristic() * self.image_order as i64;
        debug_assert!(r.is_integer());
        Ok(r.to_integer())
    }

    /// Whether the two quotients have the same kernel.
    pub fn same_kernel(&self, other: &FiniteQuotient, p: &Presentation) -> bool {
        if self.image_order != other.image_order {
            return false;
        }
        let a = self.generator_images(p);
        let b = other.generator_images(p);
        let Some(map) = extend_on_generators(&self.target, &a, &b, &other.target) else {
            return false;
        };
        let mut seen = vec![false; other.target.order()];
        map.into_iter().flatten().all(|y| !std::mem::replace(&mut seen[y], true))
    }

    /// The subgroup generated by the images of some elements.
    pub fn image_subgroup(&self, elems: &[usize]) -> Subgroup {
        Subgroup::generated(&self.target, elems)
    }

    pub fn format(&self, gog: &GraphOfGroups) -> String {
        let p = Presentation::of(gog);
        let img = self.generator_images(&p);
        let pairs: Vec<String> = p
            .names
            .iter()
            .zip(&img)
            .map(|(n, &y)| format!("{n}->{}", self.target.label(y)))
            .collect();
        format!(
            "target={} order={} image_order={} vertex_faithful={} surjective={} images=[{}]",
            self.name,
            self.target.order(),
            self.image_order,
            self.vertex_faithful,
            self.surjective,
            pairs.join(", ")
        )
    }
}

/// Options for [`enumerate_quotients`].
#[derive(Clone, Debug)]
pub struct QuotientOptions {
    pub max_order: usize,
    pub class: GroupClass,
    pub surjective_only: bool,
    pub vertex_faithful_only: bool,
    /// Keep one quotient per kernel.
    pub dedupe: bool,
    /// Assignments examined per target group before giving up.
    pub budget: usize,
    pub exec: Exec,
}

impl Default for QuotientOptions {
    fn default() -> Self {
        QuotientOptions {
            max_order: crate::group::catalog::SHIPPED_MAX_ORDER,
            class: GroupClass::All,
            surjective_only: true,
            vertex_faithful_only: false,
            dedupe: true,
            budget: 1_000_000,
            exec: Exec::default(),
        }
    }
}

/// Vertices in breadth-first order along the spanning tree, each with the
/// tree edge that reaches it.
fn tree_order(gog: &GraphOfGroups) -> Vec<(usize, Option<usize>)> {
    let mut order = vec![(gog.base(), None)];
    let mut seen = vec![false; gog.vertex_count()];
    seen[gog.base()] = true;
    let mut i = 0;
    while i < order.len() {
        let v = order[i].0;
        for e in gog.tree_edges() {
            let edge = gog.edge(e);
            for (a, b) in [(edge.source, edge.target), (edge.target, edge.source)] {
                if a == v && !seen[b] {
                    seen[b] = true;
                    order.push((b, Some(e)));
                }
            }
        }
        i += 1;
    }
    order
}

/// All quotients into one target group.
pub fn quotients_into(
    gog: &GraphOfGroups,
    entry: &CatalogEntry,
    opts: &QuotientOptions,
) -> Result<Vec<FiniteQuotient>, QuotientError> {
    let t = &entry.group;
    let order = tree_order(gog);
    let mut hom_cache: HashMap<u64, Vec<Vec<usize>>> = HashMap::new();
    let candidates: Vec<Vec<Vec<usize>>> = (0..gog.vertex_count())
        .map(|v| {
            let g = gog.vertex_group(v);
            let homs = hom_cache.entry(g.digest()).or_insert_with(|| homomorphisms(g, t)).clone();
            if opts.vertex_faithful_only {
                homs.into_iter().filter(|m| ElementMapExt::is_injective(m, t.order())).collect()
            } else {
                homs
            }
        })
        .collect();
    let non_tree: Vec<usize> = (0..gog.edge_count()).filter(|&e| !gog.is_tree_edge(e)).collect();
    let mut explored = 0usize;
    let mut out = Vec::new();
    let mut maps: Vec<Option<&Vec<usize>>> = vec![None; gog.vertex_count()];

    struct Search<'a> {
        gog: &'a GraphOfGroups,
        t: &'a FiniteGroup,
        entry: &'a CatalogEntry,
        opts: &'a QuotientOptions,
        order: &'a [(usize, Option<usize>)],
        candidates: &'a [Vec<Vec<usize>>],
        non_tree: &'a [usize],
    }

    impl<'a> Search<'a> {
        fn vertices(
            &self,
            depth: usize,
            maps: &mut Vec<Option<&'a Vec<usize>>>,
            explored: &mut usize,
            out: &mut Vec<FiniteQuotient>,
        ) -> Result<(), QuotientError> {
            if depth == self.order.len() {
                return self.edges(0, maps, &mut vec![self.t.identity(); self.gog.edge_count()], explored, out);
            }
            let (v, via) = self.order[depth];
            for m in &self.candidates[v] {
                *explored += 1;
                if *explored > self.opts.budget {
                    return Err(QuotientError::BudgetExceeded {
                        budget: self.opts.budget,
                        target: self.entry.name.clone(),
                    });
                }
                if let Some(e) = via {
                    let edge = self.gog.edge(e);
                    let (ms, mt) = if edge.source == v {
                        (m, maps[edge.target].unwrap())
                    } else {
                        (maps[edge.source].unwrap(), m)
                    };
                    let ok = (0..self.gog.edge_group(e).order())
                        .all(|x| ms[self.gog.bd0(e)[x]] == mt[self.gog.bd1(e)[x]]);
                    if !ok {
                        continue;
                    }
                }
                maps[v] = Some(m);
                self.vertices(depth + 1, maps, explored, out)?;
                maps[v] = None;
            }
            Ok(())
        }

        fn edges(
            &self,
            depth: usize,
            maps: &[Option<&'a Vec<usize>>],
            letters: &mut Vec<usize>,
            explored: &mut usize,
            out: &mut Vec<FiniteQuotient>,
        ) -> Result<(), QuotientError> {
            let t = self.t;
            if depth == self.non_tree.len() {
                let vertex_maps: Vec<Vec<usize>> = maps.iter().map(|m| m.unwrap().clone()).collect();
                let mut q = FiniteQuotient {
                    name: self.entry.name.clone(),
                    target: t.clone(),
                    vertex_maps,
                    edge_images: letters.clone(),
                    vertex_faithful: false,
                    surjective: false,
                    image_order: 0,
                };
                q.fill_flags(self.gog);
                if (!self.opts.surjective_only || q.surjective)
                    && (!self.opts.vertex_faithful_only || q.vertex_faithful)
                {
                    out.push(q);
                }
                return Ok(());
            }
            let e = self.non_tree[depth];
            let edge = self.gog.edge(e);
            let gens = self.gog.edge_group(e).generating_set();
            let (ms, mt) = (maps[edge.source].unwrap(), maps[edge.target].unwrap());
            for y in 0..t.order() {
                *explored += 1;
                if *explored > self.opts.budget {
                    return Err(QuotientError::BudgetExceeded {
                        budget: self.opts.budget,
                        target: self.entry.name.clone(),
                    });
                }
                // y^-1 phi(bd0 x) y = phi(bd1 x)
                let ok = gens.iter().all(|&x| {
                    t.mul(t.mul(t.inv(y), ms[self.gog.bd0(e)[x]]), y) == mt[self.gog.bd1(e)[x]]
                });
                if ok {
                    letters[e] = y;
                    self.edges(depth + 1, maps, letters, explored, out)?;
                }
            }
            letters[e] = t.identity();
            Ok(())
        }
    }

    let search = Search {
        gog,
        t,
        entry,
        opts,
        order: &order,
        candidates: &candidates,
        non_tree: &non_tree,
    };
    search.vertices(0, &mut maps, &mut explored, &mut out)?;
    if opts.dedupe {
        let p = Presentation::of(gog);
        let mut kept: Vec<FiniteQuotient> = Vec::new();
        for q in out {
            if !kept.iter().any(|k| k.same_kernel(&q, &p)) {
                kept.push(q);
            }
        }
        out = kept;
    }
    Ok(out)
}

trait ElementMapExt {
    fn is_injective(&self, n: usize) -> bool;
}

impl ElementMapExt for Vec<usize> {
    fn is_injective(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        self.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
    }
}

/// Quotients into every catalog group admitted by the options, in catalog
/// order. Targets are searched independently and, with a parallel
/// executor, concurrently.
pub fn enumerate_quotients(
    gog: &GraphOfGroups,
    catalog: &[CatalogEntry],
    opts: &QuotientOptions,
) -> Result<Vec<FiniteQuotient>, QuotientError> {
    let targets: Vec<&CatalogEntry> = catalog
        .iter()
        .filter(|c| c.group.order() <= opts.max_order && opts.class.admits(&c.group))
        .collect();
    let results = opts.exec.map(&targets, |entry| quotients_into(gog, entry, opts));
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    if opts.dedupe && !opts.surjective_only {
        // Distinct targets can share a kernel when images are proper.
        let p = Presentation::of(gog);
        let mut kept: Vec<FiniteQuotient> = Vec::new();
        for q in out {
            if !kept.iter().any(|k| k.same_kernel(&q, &p)) {
                kept.push(q);
            }
        }
        out = kept;
    }
    Ok(out)
}

/// The finite graph of groups induced by a quotient.
///
/// Vertices are identified when their image subgroups coincide. Edges are
/// identified when their endpoint classes agree and, in addition, their
/// image edge groups and the images of their edge letters coincide, so that
/// the boundary maps of the quotient are well defined.
#[derive(Clone, Debug)]
pub struct QuotientGoG {
    pub quotient: FiniteQuotient,
    pub vertex_class: Vec<usize>,
    pub edge_class: Vec<usize>,
    /// Image subgroup of each vertex class.
    pub vertex_images: Vec<Subgroup>,
    /// Image of the edge group at the source, per edge class.
    pub edge_images: Vec<Subgroup>,
    /// Image of the edge letter, per edge class.
    pub edge_letters: Vec<usize>,
    /// Stage vertex group element index -> target element, per class.
    pub vertex_embeddings: Vec<Vec<usize>>,
    pub edge_embeddings: Vec<Vec<usize>>,
    /// The stage graph of groups and its fundamental group.
    pub fg: FundamentalGroup,
    /// Projection from the base graph of groups.
    pub projection: GoGMorphism,
}

fn position_map(emb: &[usize], n: usize) -> Vec<usize> {
    let mut pos = vec![usize::MAX; n];
    for (i, &x) in emb.iter().enumerate() {
        pos[x] = i;
    }
    pos
}

pub fn quotient_gog(gog: &GraphOfGroups, q: &FiniteQuotient) -> QuotientGoG {
    let t = &q.target;
    let n = t.order();
    let mut vertex_images: Vec<Subgroup> = Vec::new();
    let mut vertex_class = Vec::new();
    for v in 0..gog.vertex_count() {
        let img = Subgroup::generated(t, &q.vertex_maps[v]);
        let k = vertex_images.iter().position(|s| *s == img).unwrap_or_else(|| {
            vertex_images.push(img);
            vertex_images.len() - 1
        });
        vertex_class.push(k);
    }
    let mut edge_keys: Vec<(usize, usize, Subgroup, usize)> = Vec::new();
    let mut edge_class = Vec::new();
    for (e, edge) in gog.edges().iter().enumerate() {
        let src_images: Vec<usize> = gog.bd0(e).iter().map(|&x| q.vertex_maps[edge.source][x]).collect();
        let key = (
            vertex_class[edge.source],
            vertex_class[edge.target],
            Subgroup::generated(t, &src_images),
            q.edge_images[e],
        );
        let k = edge_keys.iter().position(|x| *x == key).unwrap_or_else(|| {
            edge_keys.push(key);
            edge_keys.len() - 1
        });
        edge_class.push(k);
    }
    let mut vertices = Vec::new();
    let mut vertex_embeddings = Vec::new();
    for (c, img) in vertex_images.iter().enumerate() {
        let names: Vec<&str> = (0..gog.vertex_count())
            .filter(|&v| vertex_class[v] == c)
            .map(|v| gog.vertex_name(v))
            .collect();
        let (group, emb) = t.restrict(img);
        vertices.push((names.join("+"), group));
        vertex_embeddings.push(emb);
    }
    let vpos: Vec<Vec<usize>> = vertex_embeddings.iter().map(|e| position_map(e, n)).collect();
    let mut edges = Vec::new();
    let mut edge_embeddings = Vec::new();
    for (c, (s, d, img, y)) in edge_keys.iter().enumerate() {
        let names: Vec<&str> = (0..gog.edge_count())
            .filter(|&e| edge_class[e] == c)
            .map(|e| gog.edge(e).name.as_str())
            .collect();
        let (group, emb) = t.restrict(img);
        let into_source = emb.iter().map(|&x| vpos[*s][x]).collect();
        let into_target = emb.iter().map(|&x| vpos[*d][t.mul(t.mul(t.inv(*y), x), *y)]).collect();
        edges.push(EdgeParts { name: names.join("+"), source: *s, target: *d, group, into_source, into_target });
        edge_embeddings.push(emb);
    }
    let epos: Vec<Vec<usize>> = edge_embeddings.iter().map(|e| position_map(e, n)).collect();
    let stage = GraphOfGroups::new(GogParts { vertices, edges, base: vertex_class[gog.base()], tree: None })
        .expect("stage graph of groups is well formed");
    let projection = GoGMorphism {
        vertex_map: vertex_class.clone(),
        edge_map: edge_class.clone(),
        vertex_groups: (0..gog.vertex_count())
            .map(|v| q.vertex_maps[v].iter().map(|&y| vpos[vertex_class[v]][y]).collect())
            .collect(),
        edge_groups: (0..gog.edge_count())
            .map(|e| {
                let s = gog.edge(e).source;
                gog.bd0(e).iter().map(|&x| epos[edge_class[e]][q.vertex_maps[s][x]]).collect()
            })
            .collect(),
    };
    let fg = FundamentalGroup::new(&stage).expect("stage graph of groups is valid");
    QuotientGoG {
        quotient: q.clone(),
        vertex_class,
        edge_class,
        vertex_images,
        edge_images: edge_keys.iter().map(|k| k.2.clone()).collect(),
        edge_letters: edge_keys.iter().map(|k| k.3).collect(),
        vertex_embeddings,
        edge_embeddings,
        fg,
        projection,
    }
}

impl QuotientGoG {
    pub fn gog(&self) -> &GraphOfGroups {
        self.fg.gog()
    }

    /// Whether the stage graph of groups is reduced.
    pub fn is_reduced(&self) -> bool {
        self.gog().is_reduced()
    }
}

/// Maps a path word of `source` along a morphism of graphs of groups.
pub fn map_path(source: &FundamentalGroup, target: &FundamentalGroup, m: &GoGMorphism, w: &PathWord) -> PathWord {
    let steps = w
        .steps()
        .iter()
        .map(|s| {
            let to = source.step_target(s.edge, s.dir);
            Step { edge: m.edge_map[s.edge], dir: s.dir, elem: m.vertex_groups[to][s.elem] }
        })
        .collect();
    target
        .path_word(m.vertex_map[w.start()], m.vertex_groups[w.start()][w.head()], steps)
        .expect("morphisms map paths to paths")
}

impl fmt::Display for QuotientGoG {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.gog();
        write!(f, "stage {} vertices=[{}] edges=[", self.quotient.name, g.vertex_names().join(", "))?;
        let names: Vec<&str> = g.edges().iter().map(|e| e.name.as_str()).collect();
        write!(f, "{}]", names.join(", "))
    }
}
