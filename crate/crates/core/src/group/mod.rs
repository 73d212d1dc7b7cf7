//! Finite groups as dense multiplication tables.
//!
//! Elements are indices `0..order`. All searches (conjugacy of subgroups,
//! normalizers, centralizers, homomorphisms, isomorphisms) are exhaustive,
//! which is the right trade-off for the small vertex groups and quotient
//! targets this crate works with.

pub mod catalog;
mod perm;

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use perm::Permutation;

/// Default cap on the closure size in [`FiniteGroup::from_permutations`].
pub const DEFAULT_CLOSURE_BOUND: usize = 10_000;

/// Tables up to this order get a full associativity check; larger ones are
/// sampled.
const FULL_ASSOCIATIVITY_LIMIT: usize = 64;
const SAMPLED_TRIPLES: usize = 10_000;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("permutation closure exceeded {limit} elements")]
    BoundExceeded { limit: usize },
    #[error("invalid permutation {0}")]
    InvalidPermutation(String),
    #[error("subgroups or elements belong to different parent groups")]
    ParentMismatch,
    #[error("not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("not a homomorphism: {0}")]
    NotAHomomorphism(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    mult: Vec<u32>,
    identity: usize,
    inv: Vec<usize>,
    labels: Option<Vec<String>>,
    digest: u64,
}

impl FiniteGroup {
    /// Validates a Cayley table and derives identity and inverses.
    pub fn from_table(table: &[Vec<usize>]) -> Result<Self, GroupError> {
        Self::from_table_labeled(table, None)
    }

    pub fn from_table_labeled(
        table: &[Vec<usize>],
        labels: Option<Vec<String>>,
    ) -> Result<Self, GroupError> {
        let n = table.len();
        let fail = |s: String| Err(GroupError::NotAGroup(s));
        if n == 0 {
            return fail("empty table".into());
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return fail(format!("row {i} has length {} (expected {n})", row.len()));
            }
            if let Some(&x) = row.iter().find(|&&x| x >= n) {
                return fail(format!("row {i} has out-of-range entry {x}"));
            }
        }
        if let Some(labels) = &labels {
            if labels.len() != n {
                return fail(format!("{} labels for {n} elements", labels.len()));
            }
        }
        for i in 0..n {
            if let Some(dup) = first_repeat(table[i].iter().copied(), n) {
                return fail(format!("row {i} is not a permutation (entry {dup} repeated)"));
            }
            if let Some(dup) = first_repeat((0..n).map(|r| table[r][i]), n) {
                return fail(format!("column {i} is not a permutation (entry {dup} repeated)"));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x));
        let Some(identity) = identity else {
            return fail("no two-sided identity".into());
        };
        let mut inv = vec![0; n];
        for (a, slot) in inv.iter_mut().enumerate() {
            match (0..n).find(|&b| table[a][b] == identity && table[b][a] == identity) {
                Some(b) => *slot = b,
                None => return fail(format!("element {a} has no inverse")),
            }
        }
        let assoc_fail = |a: usize, b: usize, c: usize| {
            Err(GroupError::NotAGroup(format!(
                "associativity fails on ({a}, {b}, {c})"
            )))
        };
        if n <= FULL_ASSOCIATIVITY_LIMIT {
            for a in 0..n {
                for b in 0..n {
                    let ab = table[a][b];
                    for c in 0..n {
                        if table[ab][c] != table[a][table[b][c]] {
                            return assoc_fail(a, b, c);
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            for _ in 0..SAMPLED_TRIPLES {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return assoc_fail(a, b, c);
                }
            }
        }
        let mult = table.iter().flatten().map(|&x| x as u32).collect();
        Ok(Self::assemble(n, mult, identity, inv, labels))
    }

    /// Closure of permutation generators. Element 0 is the identity and the
    /// remaining elements appear in breadth-first order over the generators.
    /// Labels are cycle notation.
    pub fn from_permutations(
        degree: usize,
        generators: &[Permutation],
        bound: usize,
    ) -> Result<Self, GroupError> {
        for g in generators {
            if g.degree() != degree {
                return Err(GroupError::InvalidPermutation(format!(
                    "{g} has degree {} (expected {degree})",
                    g.degree()
                )));
            }
        }
        let mut elements = vec![Permutation::identity(degree)];
        let mut index: HashMap<Permutation, usize> = HashMap::new();
        index.insert(elements[0].clone(), 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in generators {
                let y = elements[i].then(g);
                if !index.contains_key(&y) {
                    if elements.len() >= bound {
                        return Err(GroupError::BoundExceeded { limit: bound });
                    }
                    index.insert(y.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(y);
                }
            }
        }
        let n = elements.len();
        let mut mult = Vec::with_capacity(n * n);
        for a in &elements {
            for b in &elements {
                mult.push(index[&a.then(b)] as u32);
            }
        }
        let inv = elements.iter().map(|p| index[&p.inverse()]).collect();
        let labels = elements.iter().map(|p| p.to_string()).collect();
        Ok(Self::assemble(n, mult, 0, inv, Some(labels)))
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// The cyclic group `Z/n`, element `k` standing for `k mod n`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0);
        let mult = (0..n)
            .flat_map(|a| (0..n).map(move |b| ((a + b) % n) as u32))
            .collect();
        let inv = (0..n).map(|a| (n - a) % n).collect();
        Self::assemble(n, mult, 0, inv, None)
    }

    fn assemble(
        order: usize,
        mult: Vec<u32>,
        identity: usize,
        inv: Vec<usize>,
        labels: Option<Vec<String>>,
    ) -> Self {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        order.hash(&mut h);
        mult.hash(&mut h);
        FiniteGroup { order, mult, identity, inv, labels, digest: h.finish() }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.order);
        self.labels = Some(labels);
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    /// `a b a^-1`
    pub fn conj(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(a, b), self.inv(a))
    }

    pub fn pow(&self, a: usize, k: i64) -> usize {
        let base = if k < 0 { self.inv(a) } else { a };
        let mut acc = self.identity;
        for _ in 0..k.unsigned_abs() {
            acc = self.mul(acc, base);
        }
        acc
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn digest(&self) -> u64 {
        self.digest
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of an element, falling back to its index.
    pub fn label(&self, a: usize) -> String {
        match &self.labels {
            Some(l) => l[a].clone(),
            None => a.to_string(),
        }
    }

    /// Resolves a label, or a decimal index when no label matches.
    pub fn find_element(&self, text: &str) -> Option<usize> {
        if let Some(labels) = &self.labels {
            if let Some(i) = labels.iter().position(|l| l == text) {
                return Some(i);
            }
        }
        text.parse::<usize>().ok().filter(|&i| i < self.order)
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        (0..self.order)
            .map(|a| (0..self.order).map(|b| self.mul(a, b)).collect())
            .collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Sorted elements of the subgroup generated by `gens`.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order];
        seen[self.identity] = true;
        let mut out = vec![self.identity];
        let mut i = 0;
        while i < out.len() {
            let x = out[i];
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                }
            }
            i += 1;
        }
        out.sort_unstable();
        out
    }

    /// A small generating set, chosen greedily by descending element order.
    pub fn generating_set(&self) -> Vec<usize> {
        let mut candidates: Vec<usize> = (0..self.order).collect();
        candidates.sort_by_key(|&a| (std::cmp::Reverse(self.element_order(a)), a));
        let mut gens = Vec::new();
        let mut span = vec![self.identity];
        for a in candidates {
            if span.len() == self.order {
                break;
            }
            if span.binary_search(&a).is_err() {
                gens.push(a);
                span = self.closure(&gens);
            }
        }
        gens
    }

    pub fn derived_subgroup(&self, sub: &[usize]) -> Vec<usize> {
        let mut comms = Vec::new();
        for &a in sub {
            for &b in sub {
                let c = self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)));
                comms.push(c);
            }
        }
        comms.sort_unstable();
        comms.dedup();
        self.closure(&comms)
    }

    pub fn is_solvable(&self) -> bool {
        let mut current: Vec<usize> = (0..self.order).collect();
        loop {
            if current.len() == 1 {
                return true;
            }
            let next = self.derived_subgroup(&current);
            if next.len() == current.len() {
                return false;
            }
            current = next;
        }
    }

    pub fn is_p_group(&self) -> bool {
        let n = self.order;
        if n == 1 {
            return true;
        }
        let p = (2..=n).find(|d| n % d == 0).unwrap();
        let mut m = n;
        while m % p == 0 {
            m /= p;
        }
        m == 1
    }

    /// Counts of elements by order, indexed by order.
    pub fn order_statistics(&self) -> Vec<usize> {
        let mut stats = vec![0; self.order + 1];
        for a in 0..self.order {
            stats[self.element_order(a)] += 1;
        }
        stats
    }

    /// Restricts the table to a subgroup, returning the new group together
    /// with the embedding (new index -> old index). Labels carry over.
    pub fn restrict(&self, sub: &Subgroup) -> (FiniteGroup, Vec<usize>) {
        let elems = sub.elements().to_vec();
        let pos: HashMap<usize, usize> = elems.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let n = elems.len();
        let mut mult = Vec::with_capacity(n * n);
        for &a in &elems {
            for &b in &elems {
                mult.push(pos[&self.mul(a, b)] as u32);
            }
        }
        let inv = elems.iter().map(|&a| pos[&self.inv(a)]).collect();
        let labels = elems.iter().map(|&a| self.label(a)).collect();
        (Self::assemble(n, mult, pos[&self.identity], inv, Some(labels)), elems)
    }
}

fn first_repeat(it: impl Iterator<Item = usize>, n: usize) -> Option<usize> {
    let mut seen = vec![false; n];
    for x in it {
        if seen[x] {
            return Some(x);
        }
        seen[x] = true;
    }
    None
}

/// A subgroup, stored as a sorted element list of its parent.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup {
    parent: u64,
    elements: Vec<usize>,
}

impl Subgroup {
    pub fn generated(g: &FiniteGroup, gens: &[usize]) -> Self {
        Subgroup { parent: g.digest, elements: g.closure(gens) }
    }

    pub fn whole(g: &FiniteGroup) -> Self {
        Subgroup { parent: g.digest, elements: (0..g.order).collect() }
    }

    pub fn trivial(g: &FiniteGroup) -> Self {
        Subgroup { parent: g.digest, elements: vec![g.identity] }
    }

    /// Checks closure and returns the subgroup.
    pub fn from_elements(g: &FiniteGroup, elems: &[usize]) -> Result<Self, GroupError> {
        let mut elements = elems.to_vec();
        elements.sort_unstable();
        elements.dedup();
        if elements.iter().any(|&x| x >= g.order) {
            return Err(GroupError::ParentMismatch);
        }
        if elements.binary_search(&g.identity).is_err() {
            return Err(GroupError::NotASubgroup("missing identity".into()));
        }
        for &a in &elements {
            if elements.binary_search(&g.inv(a)).is_err() {
                return Err(GroupError::NotASubgroup(format!("inverse of {a} missing")));
            }
            for &b in &elements {
                if elements.binary_search(&g.mul(a, b)).is_err() {
                    return Err(GroupError::NotASubgroup(format!("{a}*{b} missing")));
                }
            }
        }
        Ok(Subgroup { parent: g.digest, elements })
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn belongs_to(&self, g: &FiniteGroup) -> bool {
        self.parent == g.digest
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.parent == other.parent && self.elements.iter().all(|&x| other.contains(x))
    }

    /// `x H x^-1`
    pub fn conjugate(&self, g: &FiniteGroup, x: usize) -> Subgroup {
        let mut elements: Vec<usize> = self.elements.iter().map(|&h| g.conj(x, h)).collect();
        elements.sort_unstable();
        Subgroup { parent: self.parent, elements }
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        let elements = self.elements.iter().copied().filter(|&x| other.contains(x)).collect();
        Subgroup { parent: self.parent, elements }
    }
}

fn check_parent(g: &FiniteGroup, subs: &[&Subgroup]) -> Result<(), GroupError> {
    if subs.iter().all(|s| s.belongs_to(g)) {
        Ok(())
    } else {
        Err(GroupError::ParentMismatch)
    }
}

/// Lowest-index `x` with `x H1 x^-1 = H2`, if any.
pub fn are_conjugate_subgroups(
    g: &FiniteGroup,
    h1: &Subgroup,
    h2: &Subgroup,
) -> Result<Option<usize>, GroupError> {
    check_parent(g, &[h1, h2])?;
    if h1.order() != h2.order() {
        return Ok(None);
    }
    Ok((0..g.order()).find(|&x| h1.elements.iter().all(|&h| h2.contains(g.conj(x, h)))))
}

pub fn normalizer(g: &FiniteGroup, h: &Subgroup) -> Result<Subgroup, GroupError> {
    check_parent(g, &[h])?;
    let elements = (0..g.order())
        .filter(|&x| h.elements.iter().all(|&y| h.contains(g.conj(x, y))))
        .collect();
    Ok(Subgroup { parent: g.digest, elements })
}

pub fn centralizer(g: &FiniteGroup, set: &[usize]) -> Result<Subgroup, GroupError> {
    if set.iter().any(|&s| s >= g.order()) {
        return Err(GroupError::ParentMismatch);
    }
    let elements = (0..g.order())
        .filter(|&x| set.iter().all(|&s| g.mul(x, s) == g.mul(s, x)))
        .collect();
    Ok(Subgroup { parent: g.digest, elements })
}

/// A homomorphism between two finite groups, as an element map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementHom {
    source: u64,
    target: u64,
    image: Vec<usize>,
}

impl ElementHom {
    pub fn new(src: &FiniteGroup, tgt: &FiniteGroup, image: Vec<usize>) -> Result<Self, GroupError> {
        if image.len() != src.order() || image.iter().any(|&x| x >= tgt.order()) {
            return Err(GroupError::NotAHomomorphism("image list has wrong shape".into()));
        }
        if image[src.identity()] != tgt.identity() {
            return Err(GroupError::NotAHomomorphism("identity not preserved".into()));
        }
        for a in 0..src.order() {
            for b in 0..src.order() {
                if image[src.mul(a, b)] != tgt.mul(image[a], image[b]) {
                    return Err(GroupError::NotAHomomorphism(format!(
                        "f({a}*{b}) != f({a})*f({b})"
                    )));
                }
            }
        }
        Ok(ElementHom { source: src.digest, target: tgt.digest, image })
    }

    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn is_injective(&self) -> bool {
        let bound = self.image.iter().max().map_or(0, |m| m + 1);
        first_repeat(self.image.iter().copied(), bound).is_none()
    }

    /// `other` after `self`.
    pub fn then(&self, other: &ElementHom) -> Result<ElementHom, GroupError> {
        if self.target != other.source {
            return Err(GroupError::ParentMismatch);
        }
        Ok(ElementHom {
            source: self.source,
            target: other.target,
            image: self.image.iter().map(|&x| other.image[x]).collect(),
        })
    }
}

/// Extends `gens[i] -> images[i]` to a homomorphism on the subgroup generated
/// by `gens`, or `None` if the assignment is inconsistent. Entries outside
/// that subgroup stay `None`.
pub fn extend_on_generators(
    src: &FiniteGroup,
    gens: &[usize],
    images: &[usize],
    tgt: &FiniteGroup,
) -> Option<Vec<Option<usize>>> {
    debug_assert_eq!(gens.len(), images.len());
    let mut map = vec![None; src.order()];
    map[src.identity()] = Some(tgt.identity());
    let mut queue = vec![src.identity()];
    let mut i = 0;
    while i < queue.len() {
        let x = queue[i];
        let fx = map[x].unwrap();
        for (&g, &img) in gens.iter().zip(images) {
            let y = src.mul(x, g);
            let fy = tgt.mul(fx, img);
            match map[y] {
                None => {
                    map[y] = Some(fy);
                    queue.push(y);
                }
                Some(existing) if existing != fy => return None,
                _ => {}
            }
        }
        i += 1;
    }
    Some(map)
}

/// Every homomorphism `src -> tgt`, as full element maps, in lexicographic
/// order of the images of `src.generating_set()`.
pub fn homomorphisms(src: &FiniteGroup, tgt: &FiniteGroup) -> Vec<Vec<usize>> {
    let gens = src.generating_set();
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&g| {
            let k = src.element_order(g);
            (0..tgt.order()).filter(|&y| k % tgt.element_order(y) == 0).collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(gens.len());
    fn rec(
        depth: usize,
        src: &FiniteGroup,
        tgt: &FiniteGroup,
        gens: &[usize],
        candidates: &[Vec<usize>],
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if depth == gens.len() {
            if let Some(map) = extend_on_generators(src, gens, chosen, tgt) {
                out.push(map.into_iter().map(Option::unwrap).collect());
            }
            return;
        }
        for &c in &candidates[depth] {
            chosen.push(c);
            // Prefix consistency prunes most of the tree early.
            if extend_on_generators(src, &gens[..=depth], chosen, tgt).is_some() {
                rec(depth + 1, src, tgt, gens, candidates, chosen, out);
            }
            chosen.pop();
        }
    }
    rec(0, src, tgt, &gens, &candidates, &mut chosen, &mut out);
    out
}

fn is_bijective(map: &[usize]) -> bool {
    first_repeat(map.iter().copied(), map.len()).is_none()
}

/// An isomorphism `a -> b` as an element map, if one exists.
pub fn find_isomorphism(a: &FiniteGroup, b: &FiniteGroup) -> Option<Vec<usize>> {
    if a.order() != b.order()
        || a.order_statistics() != b.order_statistics()
        || a.is_abelian() != b.is_abelian()
    {
        return None;
    }
    let gens = a.generating_set();
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&g| {
            let k = a.element_order(g);
            (0..b.order()).filter(|&y| b.element_order(y) == k).collect()
        })
        .collect();
    let mut chosen = Vec::new();
    fn rec(
        depth: usize,
        a: &FiniteGroup,
        b: &FiniteGroup,
        gens: &[usize],
        candidates: &[Vec<usize>],
        chosen: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        if depth == gens.len() {
            let map = extend_on_generators(a, gens, chosen, b)?;
            let map: Vec<usize> = map.into_iter().map(Option::unwrap).collect();
            return is_bijective(&map).then_some(map);
        }
        for &c in &candidates[depth] {
            chosen.push(c);
            if extend_on_generators(a, &gens[..=depth], chosen, b).is_some() {
                if let Some(m) = rec(depth + 1, a, b, gens, candidates, chosen) {
                    return Some(m);
                }
            }
            chosen.pop();
        }
        None
    }
    rec(0, a, b, &gens, &candidates, &mut chosen)
}

pub fn automorphisms(g: &FiniteGroup) -> Vec<Vec<usize>> {
    homomorphisms(g, g).into_iter().filter(|m| is_bijective(m)).collect()
}

impl fmt::Display for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "group of order {}", self.order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perms(degree: usize, cycles: &[&str]) -> Vec<Permutation> {
        cycles.iter().map(|c| Permutation::parse_cycles(c, degree).unwrap()).collect()
    }

    fn s3() -> FiniteGroup {
        FiniteGroup::from_permutations(3, &perms(3, &["(0 1)", "(0 1 2)"]), DEFAULT_CLOSURE_BOUND)
            .unwrap()
    }

    fn klein() -> FiniteGroup {
        FiniteGroup::from_permutations(4, &perms(4, &["(0 1)(2 3)", "(0 2)(1 3)"]), 100).unwrap()
    }

    /// Independent closure by repeated squaring of the element set.
    fn brute_closure(degree: usize, gens: &[Permutation]) -> usize {
        let mut set: std::collections::BTreeSet<Permutation> =
            std::iter::once(Permutation::identity(degree)).chain(gens.iter().cloned()).collect();
        loop {
            let next: std::collections::BTreeSet<Permutation> = set
                .iter()
                .flat_map(|a| set.iter().map(move |b| a.then(b)))
                .chain(set.iter().cloned())
                .collect();
            if next.len() == set.len() {
                return set.len();
            }
            set = next;
        }
    }

    #[test]
    fn table_examples() {
        let t = FiniteGroup::from_table(&[vec![0]]).unwrap();
        assert_eq!(t.order(), 1);
        let c2 = FiniteGroup::from_table(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(c2.order(), 2);
        assert_eq!(c2.inv(0), 0);
        assert_eq!(c2.inv(1), 1);
        let err = FiniteGroup::from_table(&[vec![0, 1], vec![0, 1]]).unwrap_err();
        assert!(matches!(err, GroupError::NotAGroup(_)), "{err}");
    }

    #[test]
    fn table_rejections_name_the_axiom() {
        // Latin square without associativity (the "rock-paper-scissors" quasigroup
        // padded with an identity is not associative).
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let err = FiniteGroup::from_table(&t).unwrap_err().to_string();
        assert!(err.contains("associativity"), "{err}");
        let err = FiniteGroup::from_table(&[vec![0, 5], vec![1, 0]]).unwrap_err().to_string();
        assert!(err.contains("out-of-range"), "{err}");
    }

    #[test]
    fn identity_need_not_be_index_zero() {
        let g = FiniteGroup::from_table(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(g.identity(), 1);
        assert_eq!(g.element_order(0), 2);
    }

    #[test]
    fn permutation_examples() {
        let gens = perms(3, &["(0 1)", "(0 1 2)"]);
        assert_eq!(brute_closure(3, &gens), 6);
        assert_eq!(s3().order(), 6);
        assert_eq!(FiniteGroup::from_permutations(2, &[], 10).unwrap().order(), 1);
        let v = klein();
        assert_eq!(brute_closure(4, &perms(4, &["(0 1)(2 3)", "(0 2)(1 3)"])), 4);
        assert_eq!(v.order(), 4);
        assert!((0..4).filter(|&x| x != v.identity()).all(|x| v.element_order(x) == 2));
        assert_eq!(s3().label(0), "()");
    }

    #[test]
    fn closure_bound() {
        let gens = perms(5, &["(0 1)", "(0 1 2 3 4)"]);
        assert_eq!(
            FiniteGroup::from_permutations(5, &gens, 100).unwrap_err(),
            GroupError::BoundExceeded { limit: 100 }
        );
        assert_eq!(FiniteGroup::from_permutations(5, &gens, 120).unwrap().order(), 120);
    }

    #[test]
    fn conjugacy_examples() {
        let g = s3();
        let t01 = g.find_element("(0 1)").unwrap();
        let t12 = g.find_element("(1 2)").unwrap();
        let h1 = Subgroup::generated(&g, &[t01]);
        let h2 = Subgroup::generated(&g, &[t12]);
        let w = are_conjugate_subgroups(&g, &h1, &h2).unwrap().unwrap();
        assert_eq!(h1.conjugate(&g, w), h2);
        // symmetric with the inverse witness
        assert_eq!(h2.conjugate(&g, g.inv(w)), h1);
        assert_eq!(are_conjugate_subgroups(&g, &h1, &h1).unwrap(), Some(g.identity()));

        let v = klein();
        let a = Subgroup::generated(&v, &[1]);
        let b = Subgroup::generated(&v, &[2]);
        assert_eq!(are_conjugate_subgroups(&v, &a, &b).unwrap(), None);
        assert_eq!(
            are_conjugate_subgroups(&v, &a, &Subgroup::generated(&g, &[t01])),
            Err(GroupError::ParentMismatch)
        );
    }

    #[test]
    fn normalizer_centralizer_examples() {
        let g = s3();
        let r = g.find_element("(0 1 2)").unwrap();
        let t = g.find_element("(0 1)").unwrap();
        let rot = Subgroup::generated(&g, &[r]);
        assert_eq!(normalizer(&g, &rot).unwrap().order(), 6);
        let refl = Subgroup::generated(&g, &[t]);
        assert_eq!(normalizer(&g, &refl).unwrap(), refl);
        assert_eq!(centralizer(&g, &[g.identity()]).unwrap().order(), 6);
        for h in [&rot, &refl] {
            let n = normalizer(&g, h).unwrap();
            assert!(h.is_subset_of(&n));
            assert!(centralizer(&g, h.elements()).unwrap().is_subset_of(&n));
        }
    }

    #[test]
    fn homomorphism_counts() {
        // Hom(C2, S3): identity plus the three transpositions.
        assert_eq!(homomorphisms(&FiniteGroup::cyclic(2), &s3()).len(), 4);
        // Hom(S3, C2): trivial and sign.
        assert_eq!(homomorphisms(&s3(), &FiniteGroup::cyclic(2)).len(), 2);
        assert_eq!(automorphisms(&s3()).len(), 6);
        assert_eq!(automorphisms(&klein()).len(), 6);
        assert_eq!(automorphisms(&FiniteGroup::cyclic(5)).len(), 4);
    }

    #[test]
    fn isomorphism_search() {
        let c2c2 = klein();
        let z4 = FiniteGroup::cyclic(4);
        assert!(find_isomorphism(&c2c2, &z4).is_none());
        let table_v = FiniteGroup::from_table(&[
            vec![0, 1, 2, 3],
            vec![1, 0, 3, 2],
            vec![2, 3, 0, 1],
            vec![3, 2, 1, 0],
        ])
        .unwrap();
        let iso = find_isomorphism(&c2c2, &table_v).unwrap();
        assert!(ElementHom::new(&c2c2, &table_v, iso).is_ok());
    }

    #[test]
    fn restrict_and_classes() {
        let g = s3();
        let rot = Subgroup::generated(&g, &[g.find_element("(0 1 2)").unwrap()]);
        let (c3, emb) = g.restrict(&rot);
        assert_eq!(c3.order(), 3);
        assert!(c3.is_abelian());
        assert_eq!(emb.len(), 3);
        assert!(g.is_solvable());
        assert!(!g.is_p_group());
        assert!(klein().is_p_group());
        let a5 = FiniteGroup::from_permutations(5, &perms(5, &["(0 1 2)", "(0 1 2 3 4)"]), 100).unwrap();
        assert_eq!(a5.order(), 60);
        assert!(!a5.is_solvable());
    }

    #[test]
    fn element_hom_checks() {
        let c4 = FiniteGroup::cyclic(4);
        let c2 = FiniteGroup::cyclic(2);
        let h = ElementHom::new(&c4, &c2, vec![0, 1, 0, 1]).unwrap();
        assert!(!h.is_injective());
        assert!(ElementHom::new(&c4, &c2, vec![0, 1, 1, 0]).is_err());
        let inc = ElementHom::new(&c2, &c4, vec![0, 2]).unwrap();
        assert!(inc.is_injective());
        assert_eq!(inc.then(&h).unwrap().image(), &[0, 0]);
    }
}
