//! Independent oracles for the integration tests. They read the raw graph
//! of groups tables and never call the crate's reduction, presentation or
//! quotient code.

#![allow(dead_code)]

use std::collections::HashMap;

use bass_serre::gog::GraphOfGroups;
use bass_serre::quotient::FiniteQuotient;
use bass_serre::word::{Dir, FundamentalGroup, NormalForm, PathWord};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Letter {
    Elem(usize, usize),
    Edge(usize, bool),
}

fn far_end(g: &GraphOfGroups, e: usize, forward: bool) -> usize {
    if forward {
        g.edge(e).target
    } else {
        g.edge(e).source
    }
}

/// A path word as a flat letter sequence.
pub fn letters(g: &GraphOfGroups, w: &PathWord) -> Vec<Letter> {
    let mut out = vec![Letter::Elem(w.start(), w.head())];
    for s in w.steps() {
        let fwd = s.dir == Dir::Forward;
        out.push(Letter::Edge(s.edge, fwd));
        out.push(Letter::Elem(far_end(g, s.edge, fwd), s.elem));
    }
    out
}

pub fn inverse(g: &GraphOfGroups, w: &[Letter]) -> Vec<Letter> {
    w.iter()
        .rev()
        .map(|&l| match l {
            Letter::Elem(v, x) => Letter::Elem(v, g.vertex_group(v).inv(x)),
            Letter::Edge(e, f) => Letter::Edge(e, !f),
        })
        .collect()
}

/// Crossing `e` forwards turns `bd0(x)` on the near side into `bd1(x)`
/// on the far side, and backwards the other way round.
fn transport(g: &GraphOfGroups, e: usize, forward: bool, h: usize) -> Option<usize> {
    let (near, far) = if forward { (g.bd0(e), g.bd1(e)) } else { (g.bd1(e), g.bd0(e)) };
    near.iter().position(|&y| y == h).map(|x| far[x])
}

/// Applies one rewriting rule somewhere in the word.
fn rewrite_once(g: &GraphOfGroups, w: &mut Vec<Letter>) -> bool {
    for i in 0..w.len() {
        if let Letter::Elem(v, x) = w[i] {
            if x == g.vertex_group(v).identity() {
                w.remove(i);
                return true;
            }
            if let Some(&Letter::Elem(u, y)) = w.get(i + 1) {
                assert_eq!(u, v, "ill-typed word");
                w[i] = Letter::Elem(v, g.vertex_group(v).mul(x, y));
                w.remove(i + 1);
                return true;
            }
        }
        if let (Letter::Edge(e, f), Some(&Letter::Edge(e2, f2))) = (w[i], w.get(i + 1)) {
            if e == e2 && f != f2 {
                w.drain(i..i + 2);
                return true;
            }
        }
        // e^-d h e^d with h in the boundary image collapses
        if let (Letter::Edge(e, f), Some(&Letter::Elem(_, h)), Some(&Letter::Edge(e2, f2))) =
            (w[i], w.get(i + 1), w.get(i + 2))
        {
            if e == e2 && f != f2 {
                if let Some(t) = transport(g, e, f2, h) {
                    w.splice(i..i + 3, [Letter::Elem(far_end(g, e, f2), t)]);
                    return true;
                }
            }
        }
    }
    false
}

/// Rewrites to a fixpoint. By Britton's lemma a closed word is trivial
/// exactly when the fixpoint is empty.
pub fn britton_trivial(g: &GraphOfGroups, w: &[Letter]) -> bool {
    let mut w = w.to_vec();
    while rewrite_once(g, &mut w) {}
    w.is_empty()
}

pub fn britton_equal(g: &GraphOfGroups, a: &PathWord, b: &PathWord) -> bool {
    let mut w = letters(g, a);
    w.extend(inverse(g, &letters(g, b)));
    britton_trivial(g, &w)
}

pub fn britton_commute(g: &GraphOfGroups, a: &PathWord, b: &PathWord) -> bool {
    let (la, lb) = (letters(g, a), letters(g, b));
    let mut w = la.clone();
    w.extend(lb.iter().copied());
    w.extend(inverse(g, &la));
    w.extend(inverse(g, &lb));
    britton_trivial(g, &w)
}

/// Generators of a presentation built straight from the tables: vertex
/// group elements other than the identity, then edge letters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gen {
    Vertex(usize, usize),
    Edge(usize),
}

pub struct OraclePresentation {
    pub gens: Vec<Gen>,
    pub relators: Vec<Vec<(usize, i8)>>,
}

pub fn presentation(g: &GraphOfGroups) -> OraclePresentation {
    let mut gens = Vec::new();
    let mut index = HashMap::new();
    for v in 0..g.vertex_count() {
        let grp = g.vertex_group(v);
        for x in 0..grp.order() {
            if x != grp.identity() {
                index.insert(Gen::Vertex(v, x), gens.len());
                gens.push(Gen::Vertex(v, x));
            }
        }
    }
    for e in 0..g.edge_count() {
        index.insert(Gen::Edge(e), gens.len());
        gens.push(Gen::Edge(e));
    }
    let elem = |v: usize, x: usize, k: i8| index.get(&Gen::Vertex(v, x)).map(|&i| (i, k));
    let mut relators = Vec::new();
    for v in 0..g.vertex_count() {
        let grp = g.vertex_group(v);
        for a in 0..grp.order() {
            for b in 0..grp.order() {
                let r: Vec<(usize, i8)> =
                    [elem(v, a, 1), elem(v, b, 1), elem(v, grp.mul(a, b), -1)].into_iter().flatten().collect();
                if !r.is_empty() {
                    relators.push(r);
                }
            }
        }
    }
    for e in 0..g.edge_count() {
        let edge = g.edge(e);
        let t = index[&Gen::Edge(e)];
        for x in 0..g.edge_group(e).order() {
            let mut r = vec![(t, -1)];
            r.extend(elem(edge.source, g.bd0(e)[x], 1));
            r.push((t, 1));
            r.extend(elem(edge.target, g.bd1(e)[x], -1));
            relators.push(r);
        }
        if g.is_tree_edge(e) {
            relators.push(vec![(t, 1)]);
        }
    }
    OraclePresentation { gens, relators }
}

fn image(q: &FiniteQuotient, gen: Gen) -> usize {
    match gen {
        Gen::Vertex(v, x) => q.vertex_maps[v][x],
        Gen::Edge(e) => q.edge_images[e],
    }
}

/// Whether the quotient data kills every relator of the oracle
/// presentation.
pub fn quotient_respects_relators(g: &GraphOfGroups, q: &FiniteQuotient) -> bool {
    let p = presentation(g);
    let t = &q.target;
    p.relators.iter().all(|r| {
        let v = r.iter().fold(t.identity(), |acc, &(i, k)| {
            let x = image(q, p.gens[i]);
            t.mul(acc, if k < 0 { t.inv(x) } else { x })
        });
        v == t.identity()
    })
}

const P: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn powmod(mut a: u64, mut n: u64) -> u64 {
    let mut r = 1;
    while n > 0 {
        if n & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        n >>= 1;
    }
    r
}

fn rank_mod_p(mut rows: Vec<Vec<u64>>, cols: usize) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else { continue };
        rows.swap(rank, p);
        let inv = powmod(rows[rank][c], P - 2);
        let pivot: Vec<u64> = rows[rank].iter().map(|&x| mulmod(x, inv)).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[c] != 0 {
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + P - mulmod(f, y)) % P;
                }
            }
        }
        rows[rank] = pivot;
        rank += 1;
    }
    rank
}

/// Rank of the kernel of a vertex-faithful quotient by Reidemeister-Schreier.
///
/// Cosets of the kernel are the elements of the image. The Schreier
/// generators off a spanning tree of the coset graph generate the kernel,
/// and the rewritten relators give its abelianization. The kernel is free,
/// so its abelianization is free abelian of the same rank with no torsion,
/// which makes the relation rank over a large prime field exact.
pub fn reidemeister_schreier_rank(g: &GraphOfGroups, q: &FiniteQuotient) -> usize {
    let p = presentation(g);
    let t = &q.target;
    let imgs: Vec<usize> = p.gens.iter().map(|&x| image(q, x)).collect();
    let mut cosets = vec![t.identity()];
    let mut index = HashMap::from([(t.identity(), 0usize)]);
    let mut tree = vec![false; 0];
    let mut i = 0;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    while i < cosets.len() {
        for (j, &x) in imgs.iter().enumerate() {
            let y = t.mul(cosets[i], x);
            if !index.contains_key(&y) {
                index.insert(y, cosets.len());
                cosets.push(y);
                edges.push((i, j));
            }
        }
        i += 1;
    }
    let n = cosets.len();
    let ng = p.gens.len();
    tree.resize(n * ng, false);
    for (c, j) in edges {
        tree[c * ng + j] = true;
    }
    let col = |c: usize, j: usize| c * ng + j;
    let mut rows = Vec::new();
    for r in &p.relators {
        for start in 0..n {
            let mut row = vec![0u64; n * ng];
            let mut c = start;
            for &(j, k) in r {
                if k > 0 {
                    row[col(c, j)] = (row[col(c, j)] + 1) % P;
                    c = index[&t.mul(cosets[c], imgs[j])];
                } else {
                    c = index[&t.mul(cosets[c], t.inv(imgs[j]))];
                    row[col(c, j)] = (row[col(c, j)] + P - 1) % P;
                }
            }
            assert_eq!(c, start, "relator does not close up in the coset graph");
            rows.push(row);
        }
    }
    // Schreier generators on the spanning tree are trivial.
    for (k, &is_tree) in tree.iter().enumerate() {
        if is_tree {
            let mut row = vec![0u64; n * ng];
            row[k] = 1;
            rows.push(row);
        }
    }
    n * ng - rank_mod_p(rows, n * ng)
}

/// Free group words over letters `(generator, exponent)` with exponents
/// `±1`.
pub type FreeWord = Vec<(usize, i8)>;

pub fn free_reduce(w: &[(usize, i8)]) -> FreeWord {
    let mut out: FreeWord = Vec::new();
    for &l in w {
        if out.last().is_some_and(|&(g, k)| g == l.0 && k == -l.1) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

fn free_inverse(w: &[(usize, i8)]) -> FreeWord {
    w.iter().rev().map(|&(g, k)| (g, -k)).collect()
}

/// The primitive root `c p c^-1` of a non-trivial reduced word, where
/// `c z c^-1` is the word with `z` cyclically reduced and `z = p^k`.
pub fn free_root(w: &[(usize, i8)]) -> FreeWord {
    let w = free_reduce(w);
    let mut i = 0;
    while i < w.len() / 2 && w[i].0 == w[w.len() - 1 - i].0 && w[i].1 == -w[w.len() - 1 - i].1 {
        i += 1;
    }
    let (c, z) = (&w[..i], &w[i..w.len() - i]);
    let d = (1..=z.len()).find(|&d| z.len() % d == 0 && (0..z.len()).all(|j| z[j] == z[j % d])).unwrap_or(z.len());
    let mut out = c.to_vec();
    out.extend_from_slice(&z[..d]);
    out.extend(free_inverse(c));
    out
}

/// Two elements of a free group commute exactly when one is trivial or
/// their primitive roots agree up to inversion.
pub fn free_commute(a: &[(usize, i8)], b: &[(usize, i8)]) -> bool {
    let (a, b) = (free_reduce(a), free_reduce(b));
    if a.is_empty() || b.is_empty() {
        return true;
    }
    let (ra, rb) = (free_root(&a), free_root(&b));
    ra == rb || ra == free_inverse(&rb)
}

/// A word in a graph of groups with trivial vertex groups as a free word
/// in the edge letters.
pub fn as_free_word(g: &GraphOfGroups, w: &PathWord) -> FreeWord {
    letters(g, w)
        .into_iter()
        .filter_map(|l| match l {
            Letter::Edge(e, f) => Some((e, if f { 1 } else { -1 })),
            Letter::Elem(..) => None,
        })
        .filter(|&(e, _)| !g.is_tree_edge(e))
        .collect()
}

/// Number of neighbours of a vertex of type `v` in the standard tree: the
/// sum over edge ends at `v` of the index of the edge group.
pub fn index_degree(g: &GraphOfGroups, v: usize) -> usize {
    let order = g.vertex_group(v).order();
    let mut d = 0;
    for e in 0..g.edge_count() {
        let edge = g.edge(e);
        let n = g.edge_group(e).order();
        if edge.source == v {
            d += order / n;
        }
        if edge.target == v {
            d += order / n;
        }
    }
    d
}

pub fn fundamental(name: &str) -> FundamentalGroup {
    FundamentalGroup::new(&bass_serre::fixtures::by_name(name).unwrap()).unwrap()
}

pub fn nf(fg: &FundamentalGroup, text: &str) -> NormalForm {
    fg.reduce(&bass_serre::word::parse_word(fg, text).unwrap())
}
