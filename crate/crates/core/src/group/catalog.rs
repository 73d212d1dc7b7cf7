//! The catalog of small finite groups used as quotient targets.
//!
//! The shipped catalog holds one permutation representative for every
//! isomorphism type of order at most 24. It is produced by [`generate`] from
//! a handful of constructions (metacyclic extensions, direct products and
//! split extensions by cyclic groups), deduplicated up to isomorphism, and
//! stored in `fixtures/catalog.toml`. [`standard`] loads that file.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{
    automorphisms, find_isomorphism, FiniteGroup, GroupError, Permutation, Subgroup,
    DEFAULT_CLOSURE_BOUND,
};

const SHIPPED: &str = include_str!("../../fixtures/catalog.toml");

/// Largest order present in the shipped catalog.
pub const SHIPPED_MAX_ORDER: usize = 24;

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    /// `order.k`, with `k` counting isomorphism types of that order in
    /// generation order.
    pub name: String,
    /// The construction that first produced this type.
    pub structure: String,
    pub degree: usize,
    pub perm_gens: Vec<Permutation>,
    pub group: FiniteGroup,
}

#[derive(Serialize, Deserialize)]
struct CatalogFile {
    group: Vec<EntryRecord>,
}

#[derive(Serialize, Deserialize)]
struct EntryRecord {
    name: String,
    structure: String,
    order: usize,
    degree: usize,
    perm_gens: Vec<String>,
}

/// Restriction of a catalog to a class of groups.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GroupClass {
    #[default]
    All,
    PGroups,
    Solvable,
}

impl GroupClass {
    pub fn admits(self, g: &FiniteGroup) -> bool {
        match self {
            GroupClass::All => true,
            GroupClass::PGroups => g.is_p_group(),
            GroupClass::Solvable => g.is_solvable(),
        }
    }
}

impl std::str::FromStr for GroupClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(GroupClass::All),
            "p" | "p-groups" => Ok(GroupClass::PGroups),
            "solvable" => Ok(GroupClass::Solvable),
            other => Err(format!("unknown group class {other:?} (all, p-groups, solvable)")),
        }
    }
}

/// The shipped catalog, parsed once.
pub fn standard() -> &'static [CatalogEntry] {
    static CATALOG: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    CATALOG.get_or_init(|| from_toml(SHIPPED).expect("shipped catalog is valid"))
}

/// Shipped entries of order at most `max_order` admitted by `class`.
pub fn up_to_order(max_order: usize, class: GroupClass) -> Vec<&'static CatalogEntry> {
    standard()
        .iter()
        .filter(|e| e.group.order() <= max_order && class.admits(&e.group))
        .collect()
}

pub fn from_toml(text: &str) -> Result<Vec<CatalogEntry>, GroupError> {
    let file: CatalogFile = toml::from_str(text)
        .map_err(|e| GroupError::InvalidPermutation(format!("catalog: {e}")))?;
    file.group
        .into_iter()
        .map(|r| {
            let perm_gens = r
                .perm_gens
                .iter()
                .map(|c| Permutation::parse_cycles(c, r.degree))
                .collect::<Result<Vec<_>, _>>()?;
            let group = FiniteGroup::from_permutations(r.degree, &perm_gens, DEFAULT_CLOSURE_BOUND)?;
            if group.order() != r.order {
                return Err(GroupError::NotAGroup(format!(
                    "catalog entry {} has order {} (recorded {})",
                    r.name,
                    group.order(),
                    r.order
                )));
            }
            Ok(CatalogEntry { name: r.name, structure: r.structure, degree: r.degree, perm_gens, group })
        })
        .collect()
}

pub fn to_toml(entries: &[CatalogEntry]) -> String {
    let file = CatalogFile {
        group: entries
            .iter()
            .map(|e| EntryRecord {
                name: e.name.clone(),
                structure: e.structure.clone(),
                order: e.group.order(),
                degree: e.degree,
                perm_gens: e.perm_gens.iter().map(|p| p.to_string()).collect(),
            })
            .collect(),
    };
    toml::to_string(&file).expect("catalog serializes")
}

/// Cyclic group of order `n` acting regularly on `n` points.
pub fn cyclic(n: usize) -> CatalogEntry {
    let degree = n.max(1);
    let rot = Permutation::from_images((0..degree).map(|i| (i + 1) % degree).collect()).unwrap();
    perm_entry(format!("C{n}"), degree, vec![rot])
}

/// Dihedral group of order `2n` acting on the `n`-gon (`n >= 3`), or the
/// Klein four-group for `n = 2`.
pub fn dihedral(n: usize) -> CatalogEntry {
    if n == 2 {
        let a = Permutation::parse_cycles("(0 1)(2 3)", 4).unwrap();
        let b = Permutation::parse_cycles("(0 2)(1 3)", 4).unwrap();
        return perm_entry("D2".into(), 4, vec![a, b]);
    }
    let rot = Permutation::from_images((0..n).map(|i| (i + 1) % n).collect()).unwrap();
    let refl = Permutation::from_images((0..n).map(|i| (n - i) % n).collect()).unwrap();
    perm_entry(format!("D{n}"), n, vec![rot, refl])
}

/// Symmetric group on `n` points.
pub fn symmetric(n: usize) -> CatalogEntry {
    let mut gens = Vec::new();
    if n >= 2 {
        gens.push(Permutation::from_images((0..n).map(|i| (i + 1) % n).collect()).unwrap());
        let mut swap: Vec<usize> = (0..n).collect();
        swap.swap(0, 1);
        gens.push(Permutation::from_images(swap).unwrap());
    }
    perm_entry(format!("S{n}"), n.max(1), gens)
}

fn perm_entry(name: String, degree: usize, perm_gens: Vec<Permutation>) -> CatalogEntry {
    let group = FiniteGroup::from_permutations(degree, &perm_gens, DEFAULT_CLOSURE_BOUND).unwrap();
    CatalogEntry { structure: name.clone(), name, degree, perm_gens, group }
}

/// Cheap isomorphism invariants used to avoid most full isomorphism searches.
fn fingerprint(g: &FiniteGroup) -> (Vec<usize>, bool, usize, usize) {
    let all: Vec<usize> = (0..g.order()).collect();
    let center = (0..g.order())
        .filter(|&z| (0..g.order()).all(|x| g.mul(z, x) == g.mul(x, z)))
        .count();
    (g.order_statistics(), g.is_abelian(), center, g.derived_subgroup(&all).len())
}

struct Found {
    structure: String,
    group: FiniteGroup,
    print: (Vec<usize>, bool, usize, usize),
}

fn table_group(n: usize, mul: impl Fn(usize, usize) -> usize) -> Option<FiniteGroup> {
    let rows: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| mul(a, b)).collect()).collect();
    FiniteGroup::from_table(&rows).ok()
}

fn insert(found: &mut Vec<Found>, structure: String, group: FiniteGroup) {
    let print = fingerprint(&group);
    let duplicate = found.iter().any(|f| {
        f.group.order() == group.order()
            && f.print == print
            && find_isomorphism(&f.group, &group).is_some()
    });
    if !duplicate {
        found.push(Found { structure, group, print });
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn pow_mod(base: usize, exp: usize, n: usize) -> usize {
    (0..exp).fold(1 % n, |acc, _| acc * base % n)
}

/// Generates one representative per isomorphism type up to `max_order`.
pub fn generate(max_order: usize) -> Vec<CatalogEntry> {
    let mut found: Vec<Found> = Vec::new();
    for order in 1..=max_order {
        let start = found.len();
        // Metacyclic <x, y | x^n, y^m = x^s, y x y^-1 = x^r>, elements x^a y^b.
        for n in (1..=order).filter(|n| order % n == 0) {
            let m = order / n;
            for r in 0..n.max(1) {
                if n > 1 && (gcd(r, n) != 1 || pow_mod(r, m, n) != 1) {
                    continue;
                }
                for s in 0..n {
                    if (s * (r + n - 1)) % n != 0 {
                        continue;
                    }
                    let mul = |p: usize, q: usize| {
                        let (a, b, c, d) = (p % n, p / n, q % n, q / n);
                        let x = a + c * pow_mod(r, b, n);
                        if b + d < m {
                            x % n + n * (b + d)
                        } else {
                            (x + s) % n + n * (b + d - m)
                        }
                    };
                    if let Some(g) = table_group(order, mul) {
                        let structure = if m == 1 || n == 1 {
                            format!("C{order}")
                        } else {
                            format!("metacyclic(n={n}, m={m}, r={r}, s={s})")
                        };
                        insert(&mut found, structure, g);
                    }
                }
            }
        }
        // Direct products of smaller types.
        let smaller: Vec<(String, FiniteGroup)> = found[..start]
            .iter()
            .map(|f| (f.structure.clone(), f.group.clone()))
            .collect();
        for (i, (na, a)) in smaller.iter().enumerate() {
            for (nb, b) in smaller.iter().skip(i) {
                if a.order() < 2 || b.order() < 2 || a.order() * b.order() != order {
                    continue;
                }
                let k = b.order();
                let g = table_group(order, |p, q| {
                    a.mul(p / k, q / k) * k + b.mul(p % k, q % k)
                })
                .expect("direct product is a group");
                insert(&mut found, format!("({na}) x ({nb})"), g);
            }
        }
        // Split extensions N : C_m.
        for (nn, base) in &smaller {
            if base.order() < 2 || order % base.order() != 0 || order == base.order() {
                continue;
            }
            let m = order / base.order();
            let k = base.order();
            for alpha in automorphisms(base) {
                // alpha^j for j < m, and require alpha^m = id
                let mut powers = vec![(0..k).collect::<Vec<_>>()];
                for j in 1..=m {
                    let prev = &powers[j - 1];
                    powers.push(prev.iter().map(|&x| alpha[x]).collect());
                }
                if powers[m].iter().enumerate().any(|(i, &x)| i != x) {
                    continue;
                }
                let g = table_group(order, |p, q| {
                    let (k1, j1, k2, j2) = (p % k, p / k, q % k, q / k);
                    base.mul(k1, powers[j1][k2]) + k * ((j1 + j2) % m)
                })
                .expect("split extension is a group");
                insert(&mut found, format!("({nn}) : C{m}"), g);
            }
        }
    }
    let mut entries = Vec::new();
    let mut per_order = std::collections::BTreeMap::<usize, usize>::new();
    for f in found {
        let k = per_order.entry(f.group.order()).or_insert(0);
        *k += 1;
        let name = format!("{}.{}", f.group.order(), k);
        let (degree, perm_gens) = permutation_representation(&f.group);
        let group = FiniteGroup::from_permutations(degree, &perm_gens, DEFAULT_CLOSURE_BOUND)
            .expect("coset action closes");
        debug_assert_eq!(group.order(), f.group.order());
        entries.push(CatalogEntry { name, structure: f.structure, degree, perm_gens, group });
    }
    entries
}

/// All subgroups, by closing the cyclic subgroups under joins.
fn all_subgroups(g: &FiniteGroup) -> Vec<Vec<usize>> {
    let mut subs: BTreeSet<Vec<usize>> = (0..g.order()).map(|x| g.closure(&[x])).collect();
    let cyclic: Vec<Vec<usize>> = subs.iter().cloned().collect();
    loop {
        let mut next = subs.clone();
        for s in &subs {
            for c in &cyclic {
                let mut gens = s.clone();
                gens.extend_from_slice(c);
                next.insert(g.closure(&gens));
            }
        }
        if next.len() == subs.len() {
            return subs.into_iter().collect();
        }
        subs = next;
    }
}

/// A faithful transitive permutation representation of least degree: the
/// left coset action on a largest core-free subgroup.
fn permutation_representation(g: &FiniteGroup) -> (usize, Vec<Permutation>) {
    let whole = Subgroup::whole(g);
    let core_free = |h: &Vec<usize>| {
        let sub = Subgroup::from_elements(g, h).unwrap();
        let mut core = sub.clone();
        for x in whole.elements() {
            core = core.intersection(&sub.conjugate(g, *x));
        }
        core.order() == 1
    };
    let h = all_subgroups(g)
        .into_iter()
        .filter(core_free)
        .max_by(|a, b| a.len().cmp(&b.len()).then_with(|| b.cmp(a)))
        .expect("trivial subgroup is core-free");
    // left cosets x H, keyed by their least element
    let mut coset_of = vec![usize::MAX; g.order()];
    let mut reps = Vec::new();
    for x in 0..g.order() {
        if coset_of[x] == usize::MAX {
            for &y in &h {
                coset_of[g.mul(x, y)] = reps.len();
            }
            reps.push(x);
        }
    }
    let degree = reps.len();
    let gens = g
        .generating_set()
        .into_iter()
        .map(|s| {
            Permutation::from_images(reps.iter().map(|&x| coset_of[g.mul(s, x)]).collect())
                .expect("coset action is a bijection")
        })
        .collect();
    (degree, gens)
}
