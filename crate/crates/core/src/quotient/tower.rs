//! Towers of quotient graphs of groups joined by connecting morphisms.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{enumerate_quotients, map_path, quotient_gog, FiniteQuotient, QuotientError, QuotientGoG, QuotientOptions};
use crate::gog::{Cell, GoGMorphism, GraphOfGroups};
use crate::group::{catalog, extend_on_generators};
use crate::par::Exec;
use crate::word::{format_word, FundamentalGroup, NormalForm, Presentation};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TowerError {
    #[error("no connecting morphism from stage {from} to stage {to}")]
    MissingMorphism { from: usize, to: usize },
    #[error("cells to separate must be distinct")]
    SameCell,
    #[error("stage {0} does not exist")]
    NoSuchStage(usize),
}

/// The canonical map from a finer stage to a coarser one.
#[derive(Clone, Debug)]
pub struct Connection {
    pub finer: usize,
    pub coarser: usize,
    /// Homomorphism between the targets, defined on the image of the finer
    /// quotient.
    pub theta: Vec<Option<usize>>,
    pub alpha: GoGMorphism,
    /// Image of each generator of the finer stage presentation in the
    /// fundamental group of the coarser stage.
    pub beta: Vec<NormalForm>,
}

fn position_map(emb: &[usize], n: usize) -> Vec<usize> {
    let mut pos = vec![usize::MAX; n];
    for (i, &x) in emb.iter().enumerate() {
        pos[x] = i;
    }
    pos
}

/// The connecting morphism `V -> U`, which exists exactly when the kernel of
/// `V` lies in the kernel of `U`.
/// The stage indices of the result are left at zero.
pub fn connecting(base: &GraphOfGroups, v: &QuotientGoG, u: &QuotientGoG) -> Option<Connection> {
    let p = Presentation::of(base);
    let (tv, tu) = (&v.quotient.target, &u.quotient.target);
    let theta = extend_on_generators(tv, &v.quotient.generator_images(&p), &u.quotient.generator_images(&p), tu)?;
    let sv = v.gog();
    let vertex_map: Vec<usize> = (0..sv.vertex_count())
        .map(|c| {
            let member = v.vertex_class.iter().position(|&k| k == c).expect("class has a member");
            u.vertex_class[member]
        })
        .collect();
    let edge_map: Vec<usize> = (0..sv.edge_count())
        .map(|c| {
            let member = v.edge_class.iter().position(|&k| k == c).expect("class has a member");
            u.edge_class[member]
        })
        .collect();
    let n = tu.order();
    let upos: Vec<Vec<usize>> = u.vertex_embeddings.iter().map(|e| position_map(e, n)).collect();
    let uepos: Vec<Vec<usize>> = u.edge_embeddings.iter().map(|e| position_map(e, n)).collect();
    let vertex_groups = (0..sv.vertex_count())
        .map(|c| {
            v.vertex_embeddings[c]
                .iter()
                .map(|&x| upos[vertex_map[c]][theta[x].expect("image element")])
                .collect()
        })
        .collect();
    let edge_groups = (0..sv.edge_count())
        .map(|c| {
            v.edge_embeddings[c]
                .iter()
                .map(|&x| uepos[edge_map[c]][theta[x].expect("image element")])
                .collect()
        })
        .collect();
    let alpha = GoGMorphism { vertex_map, edge_map, vertex_groups, edge_groups };
    let pv = Presentation::of(sv);
    let beta = (0..pv.generators.len())
        .map(|i| u.fg.reduce(&map_path(&v.fg, &u.fg, &alpha, &pv.generator_word(&v.fg, i))))
        .collect();
    Some(Connection { finer: 0, coarser: 0, theta, alpha, beta })
}

/// Applies a generator-level map to an element of the finer stage.
pub fn apply_beta(finer: &FundamentalGroup, coarser: &FundamentalGroup, beta: &[NormalForm], x: &NormalForm) -> NormalForm {
    let p = Presentation::of(finer.gog());
    let mut acc = coarser.identity();
    for (g, k) in p.express(finer, x.word()) {
        let y = if k < 0 { coarser.inv(&beta[g]) } else { beta[g].clone() };
        acc = coarser.mul(&acc, &y);
    }
    acc
}

/// Outcome of a commuting-square check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareCheck {
    pub holds: bool,
    /// The first cell, element or generator where the composites differ.
    pub witness: Option<String>,
}

#[derive(Clone, Debug)]
pub struct Tower {
    pub base: FundamentalGroup,
    pub stages: Vec<QuotientGoG>,
    /// Connecting morphisms keyed by `(finer, coarser)`, identities included.
    pub morphisms: BTreeMap<(usize, usize), Connection>,
}

impl Tower {
    /// Builds stages for the quotients, in the given order, and every
    /// connecting morphism between them.
    pub fn from_quotients(base: &GraphOfGroups, quotients: &[FiniteQuotient], exec: Exec) -> Tower {
        let fg = FundamentalGroup::new(base).expect("base graph of groups is valid");
        let stages: Vec<QuotientGoG> = exec.map(quotients, |q| quotient_gog(base, q));
        let pairs: Vec<(usize, usize)> =
            (0..stages.len()).flat_map(|i| (0..stages.len()).map(move |j| (i, j))).collect();
        let found = exec.map(&pairs, |&(i, j)| {
            connecting(base, &stages[i], &stages[j]).map(|c| Connection { finer: i, coarser: j, ..c })
        });
        let morphisms = pairs.into_iter().zip(found).filter_map(|(k, c)| c.map(|c| (k, c))).collect();
        Tower { base: fg, stages, morphisms }
    }

    /// The tower of all vertex-faithful quotients onto shipped catalog
    /// groups of order at most `max_order`, one per kernel.
    pub fn vertex_faithful(base: &GraphOfGroups, max_order: usize, exec: Exec) -> Result<Tower, QuotientError> {
        let opts = QuotientOptions { max_order, vertex_faithful_only: true, exec, ..Default::default() };
        let qs = enumerate_quotients(base, catalog::standard(), &opts)?;
        Ok(Tower::from_quotients(base, &qs, exec))
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn morphism(&self, from: usize, to: usize) -> Result<&Connection, TowerError> {
        self.morphisms.get(&(from, to)).ok_or(TowerError::MissingMorphism { from, to })
    }

    /// Image of an element of stage `from` in stage `to`.
    pub fn project(&self, from: usize, to: usize, x: &NormalForm) -> Result<NormalForm, TowerError> {
        let c = self.morphism(from, to)?;
        Ok(apply_beta(&self.stages[from].fg, &self.stages[to].fg, &c.beta, x))
    }

    /// Checks `U->W after Y->U` against `Z->W after Y->Z` on every cell,
    /// every group element and every generator of the stage `Y`.
    pub fn check_square(&self, y: usize, u: usize, z: usize, w: usize) -> Result<SquareCheck, TowerError> {
        let (yu, uw, yz, zw) = (self.morphism(y, u)?, self.morphism(u, w)?, self.morphism(y, z)?, self.morphism(z, w)?);
        let left = yu.alpha.then(&uw.alpha);
        let right = yz.alpha.then(&zw.alpha);
        let sy = self.stages[y].gog();
        for c in sy.cells() {
            if left.map_cell(c) != right.map_cell(c) {
                return Ok(fail(format!("cell {}", sy.cell_name(c))));
            }
            for x in 0..sy.group(c).order() {
                if left.map_element(c, x) != right.map_element(c, x) {
                    return Ok(fail(format!("element {x} of {}", sy.cell_name(c))));
                }
            }
        }
        let py = Presentation::of(sy);
        let (fu, fz, fw) = (&self.stages[u].fg, &self.stages[z].fg, &self.stages[w].fg);
        for g in 0..py.generators.len() {
            let a = apply_beta(fu, fw, &uw.beta, &yu.beta[g]);
            let b = apply_beta(fz, fw, &zw.beta, &yz.beta[g]);
            if a != b {
                return Ok(fail(format!("generator {}", py.names[g])));
            }
        }
        Ok(SquareCheck { holds: true, witness: None })
    }

    /// Every square `Y -> U -> W`, `Y -> Z -> W` with `U < Z` whose four
    /// morphisms exist, with its check.
    pub fn check_all_squares(&self, exec: Exec) -> Vec<((usize, usize, usize, usize), SquareCheck)> {
        let n = self.stages.len();
        let has = |a: usize, b: usize| self.morphisms.contains_key(&(a, b));
        let mut quads = Vec::new();
        for y in 0..n {
            for w in 0..n {
                if !has(y, w) {
                    continue;
                }
                for u in 0..n {
                    for z in u + 1..n {
                        if has(y, u) && has(u, w) && has(y, z) && has(z, w) {
                            quads.push((y, u, z, w));
                        }
                    }
                }
            }
        }
        let checks = exec.map(&quads, |&(y, u, z, w)| self.check_square(y, u, z, w).expect("morphisms exist"));
        quads.into_iter().zip(checks).collect()
    }

    /// First stage whose classes distinguish two cells of the base.
    pub fn separate_cells(&self, a: Cell, b: Cell) -> Result<Option<usize>, TowerError> {
        if a == b {
            return Err(TowerError::SameCell);
        }
        Ok(self.stages.iter().position(|s| match (a, b) {
            (Cell::Vertex(x), Cell::Vertex(y)) => s.vertex_class[x] != s.vertex_class[y],
            (Cell::Edge(x), Cell::Edge(y)) => s.edge_class[x] != s.edge_class[y],
            _ => true,
        }))
    }

    /// For every pair of distinct cells, the first separating stage.
    pub fn coverage(&self) -> Vec<(Cell, Cell, Option<usize>)> {
        let cells = self.base.gog().cells();
        let mut out = Vec::new();
        for (i, &a) in cells.iter().enumerate() {
            for &b in &cells[i + 1..] {
                out.push((a, b, self.separate_cells(a, b).expect("distinct cells")));
            }
        }
        out
    }

    /// Line-oriented description with stable ordering.
    pub fn to_text(&self) -> String {
        let base = self.base.gog();
        let p = Presentation::of(base);
        let mut out = format!("tower stages={} morphisms={}\n", self.stages.len(), self.morphisms.len());
        for (i, s) in self.stages.iter().enumerate() {
            let q = &s.quotient;
            out.push_str(&format!(
                "stage {i} target={} order={} vertex_faithful={} surjective={} reduced={}\n",
                q.name,
                q.target.order(),
                q.vertex_faithful,
                q.surjective,
                s.is_reduced()
            ));
            for (name, y) in p.names.iter().zip(q.generator_images(&p)) {
                out.push_str(&format!("  image {name} -> {}\n", q.target.label(y)));
            }
            let g = s.gog();
            for c in 0..g.vertex_count() {
                out.push_str(&format!("  vertex_class {} order={}\n", g.vertex_name(c), g.vertex_group(c).order()));
            }
            for c in 0..g.edge_count() {
                let e = g.edge(c);
                out.push_str(&format!(
                    "  edge_class {} {} -> {} order={}\n",
                    e.name,
                    g.vertex_name(e.source),
                    g.vertex_name(e.target),
                    g.edge_group(c).order()
                ));
            }
        }
        for ((a, b), c) in &self.morphisms {
            if a == b {
                continue;
            }
            let theta: Vec<String> = c
                .theta
                .iter()
                .enumerate()
                .filter_map(|(x, y)| y.map(|y| format!("{x}:{y}")))
                .collect();
            out.push_str(&format!("morphism {a} -> {b} theta {}\n", theta.join(" ")));
            let pa = Presentation::of(self.stages[*a].gog());
            for (name, img) in pa.names.iter().zip(&c.beta) {
                out.push_str(&format!("  beta {name} -> {}\n", format_word(&self.stages[*b].fg, img.word())));
            }
        }
        out
    }
}

fn fail(witness: String) -> SquareCheck {
    SquareCheck { holds: false, witness: Some(witness) }
}
