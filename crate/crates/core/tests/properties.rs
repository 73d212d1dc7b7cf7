mod common;

use std::collections::HashSet;
use std::sync::OnceLock;

use bass_serre::decision::{classify_subgroup, normalizer_chain};
use bass_serre::fixtures;
use bass_serre::gog::{Cell, GraphOfGroups};
use bass_serre::group::catalog;
use bass_serre::par::Exec;
use bass_serre::quotient::{enumerate_quotients, FiniteQuotient, QuotientOptions, Tower};
use bass_serre::tree::StandardTree;
use bass_serre::word::{format_word, parse_word, FundamentalGroup, NormalForm, PathWord};
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const NAMES: [&str; 5] = ["dinf", "psl2z", "hnn", "f2", "amalgam2"];

struct Fixture {
    gog: GraphOfGroups,
    fg: FundamentalGroup,
    quotients: Vec<FiniteQuotient>,
    tower: Tower,
}

fn fixture(i: usize) -> &'static Fixture {
    static ALL: OnceLock<Vec<Fixture>> = OnceLock::new();
    &ALL.get_or_init(|| {
        NAMES
            .iter()
            .map(|n| {
                let gog = fixtures::by_name(n).unwrap();
                let fg = FundamentalGroup::new(&gog).unwrap();
                let opts = QuotientOptions { max_order: 12, surjective_only: false, dedupe: false, ..Default::default() };
                let quotients = enumerate_quotients(&gog, catalog::standard(), &opts).unwrap();
                let tower = Tower::vertex_faithful(&gog, 12, Exec::default()).unwrap();
                Fixture { gog, fg, quotients, tower }
            })
            .collect::<Vec<_>>()
    })[i]
}

fn word(fg: &FundamentalGroup, seed: u64, len: usize) -> PathWord {
    fg.random_word(&mut ChaCha8Rng::seed_from_u64(seed), len)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn reduction_is_canonical(i in 0..5usize, seed: u64, len in 0..10usize) {
        let f = fixture(i);
        let w = word(&f.fg, seed, len);
        let n = f.fg.reduce(&w);
        prop_assert_eq!(f.fg.reduce(n.word()), n.clone());
        let text = format_word(&f.fg, n.word());
        prop_assert_eq!(f.fg.reduce(&parse_word(&f.fg, &text).unwrap()), n.clone());
        prop_assert!(britton_equal(&f.gog, &w, n.word()));
        prop_assert!(f.fg.mul(&n, &f.fg.inv(&n)).is_trivial());
    }

    #[test]
    fn equality_matches_rewriting_oracle(i in 0..5usize, s1: u64, s2: u64, l1 in 0..7usize, l2 in 0..7usize) {
        let f = fixture(i);
        let (a, b) = (word(&f.fg, s1, l1), word(&f.fg, s2, l2));
        prop_assert_eq!(f.fg.equal(&a, &b).unwrap(), britton_equal(&f.gog, &a, &b));
    }

    #[test]
    fn multiplication_is_associative(i in 0..5usize, s: [u64; 3], l in 0..6usize) {
        let f = fixture(i);
        let [a, b, c] = s.map(|x| f.fg.reduce(&word(&f.fg, x, l)));
        let fg = &f.fg;
        prop_assert_eq!(fg.mul(&fg.mul(&a, &b), &c), fg.mul(&a, &fg.mul(&b, &c)));
    }

    #[test]
    fn quotient_maps_are_homomorphisms(i in 0..5usize, s1: u64, s2: u64, l in 0..7usize) {
        let f = fixture(i);
        let (a, b) = (word(&f.fg, s1, l), word(&f.fg, s2, l));
        let ab = f.fg.multiply(&a, &b).unwrap();
        for q in &f.quotients {
            prop_assert_eq!(q.eval(&f.fg, &ab), q.target.mul(q.eval(&f.fg, &a), q.eval(&f.fg, &b)));
        }
    }

    #[test]
    fn tree_balls_are_trees(i in 0..5usize, seed: u64, len in 0..5usize, radius in 1..4usize) {
        let f = fixture(i);
        let tree = StandardTree::new(&f.fg);
        let h = f.fg.reduce(&word(&f.fg, seed, len));
        let center = tree.act_vertex(&h, &tree.base_vertex());
        let ball = tree.ball(&center, radius);
        prop_assert!(ball.is_tree());
        prop_assert_eq!(ball.edges.len() + 1, ball.vertices.len());
        let distinct: HashSet<_> = ball.vertices.iter().collect();
        prop_assert_eq!(distinct.len(), ball.vertices.len());
        for (k, v) in ball.vertices.iter().enumerate() {
            prop_assert_eq!(tree.neighbors(v).len(), index_degree(&f.gog, v.cell));
            if !ball.frontier[k] {
                let inside = ball.edges.iter().filter(|(_, a, b)| *a == k || *b == k).count();
                prop_assert_eq!(inside, index_degree(&f.gog, v.cell));
            }
        }
    }

    #[test]
    fn stabilizers_are_equivariant(i in 0..5usize, s1: u64, s2: u64, l in 0..5usize) {
        let f = fixture(i);
        let fg = &f.fg;
        let tree = StandardTree::new(fg);
        let (g, h) = (fg.reduce(&word(fg, s1, l)), fg.reduce(&word(fg, s2, l)));
        let x = tree.act_vertex(&g, &tree.base_vertex());
        let hx = tree.act_vertex(&h, &x);
        let mut conjugated: Vec<NormalForm> = tree.stabilizer(&x).iter().map(|s| fg.conj(&h, s)).collect();
        let mut direct = tree.stabilizer(&hx);
        conjugated.sort();
        direct.sort();
        prop_assert_eq!(conjugated, direct);
        // the action is by graph automorphisms
        for (_, y) in tree.neighbors(&x) {
            let hy = tree.act_vertex(&h, &y);
            prop_assert!(tree.neighbors(&hx).iter().any(|(_, z)| *z == hy));
        }
    }

    #[test]
    fn alpha_respects_classes(i in 0..5usize, pick in 0..1000usize) {
        let f = fixture(i);
        let keys: Vec<_> = f.tower.morphisms.keys().copied().collect();
        prop_assume!(!keys.is_empty());
        let (v, u) = keys[pick % keys.len()];
        let c = &f.tower.morphisms[&(v, u)];
        let (sv, su) = (&f.tower.stages[v], &f.tower.stages[u]);
        for cell in f.gog.cells() {
            let (from, to) = match cell {
                Cell::Vertex(x) => (Cell::Vertex(sv.vertex_class[x]), Cell::Vertex(su.vertex_class[x])),
                Cell::Edge(x) => (Cell::Edge(sv.edge_class[x]), Cell::Edge(su.edge_class[x])),
            };
            prop_assert_eq!(c.alpha.map_cell(from), to);
        }
        prop_assert!(c.alpha.check(sv.gog(), su.gog()).is_ok());
    }

    #[test]
    fn projections_commute_with_evaluation(i in 0..5usize, pick in 0..1000usize, seed: u64, l in 0..7usize) {
        let f = fixture(i);
        let keys: Vec<_> = f.tower.morphisms.keys().copied().collect();
        prop_assume!(!keys.is_empty());
        let (v, u) = keys[pick % keys.len()];
        let c = &f.tower.morphisms[&(v, u)];
        let w = word(&f.fg, seed, l);
        let (qv, qu) = (&f.tower.stages[v].quotient, &f.tower.stages[u].quotient);
        prop_assert_eq!(c.theta[qv.eval(&f.fg, &w)], Some(qu.eval(&f.fg, &w)));
    }
}

#[test]
fn enumerated_quotients_satisfy_oracle_relators() {
    for i in 0..NAMES.len() {
        let f = fixture(i);
        for q in &f.quotients {
            assert!(quotient_respects_relators(&f.gog, q), "{} {}", NAMES[i], q.format(&f.gog));
        }
    }
}

#[test]
fn every_tower_square_commutes() {
    for i in 0..NAMES.len() {
        let t = &fixture(i).tower;
        for (quad, c) in t.check_all_squares(Exec::default()) {
            assert!(c.holds, "{} {quad:?} {:?}", NAMES[i], c.witness);
        }
    }
}

#[test]
fn kernel_rank_formula_matches_reidemeister_schreier() {
    for i in 0..NAMES.len() {
        let f = fixture(i);
        for q in f.quotients.iter().filter(|q| q.vertex_faithful && q.surjective).take(40) {
            assert_eq!(q.kernel_rank(&f.gog).unwrap(), reidemeister_schreier_rank(&f.gog, q) as i64, "{}", q.format(&f.gog));
        }
    }
}

#[test]
fn parallel_and_sequential_agree() {
    for (name, g) in fixtures::all() {
        let base = QuotientOptions { max_order: 12, ..Default::default() };
        let seq = enumerate_quotients(&g, catalog::standard(), &QuotientOptions { exec: Exec::Sequential, ..base.clone() });
        let par = enumerate_quotients(&g, catalog::standard(), &QuotientOptions { exec: Exec::Parallel, ..base });
        assert_eq!(seq, par, "{name}");
        let a = Tower::vertex_faithful(&g, 8, Exec::Sequential).unwrap().to_text();
        let b = Tower::vertex_faithful(&g, 8, Exec::Parallel).unwrap().to_text();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn normalizer_chains_descend() {
    let fg = fundamental("dinf");
    let t = Tower::vertex_faithful(fg.gog(), 16, Exec::default()).unwrap();
    for h in ["v1.a", "v2.b", "v1.a v2.b", "v1.a v2.b v1.a v2.b", "v2.b v1.a v2.b"] {
        let spec = classify_subgroup(&fg, &[nf(&fg, h)]);
        for reference in 0..t.len() {
            let r = normalizer_chain(&fg, &spec, &t, reference, 2).unwrap();
            for pair in r.chain.windows(2) {
                assert!(pair[1].cumulative.is_subset_of(&pair[0].cumulative), "{h} ref {reference}");
                assert!(pair[1].cumulative.is_subset_of(&pair[1].projected));
            }
            // every normalizing element found lies in the limit
            if let Some(limit) = r.limit() {
                for (_, img) in &r.discovered {
                    assert!(limit.contains(*img), "{h} ref {reference}");
                }
            }
        }
    }
}

#[test]
fn free_root_oracle_self_check() {
    let x = vec![(0, 1i8)];
    let xy = vec![(0, 1), (1, 1)];
    let xyxy = vec![(0, 1), (1, 1), (0, 1), (1, 1)];
    assert!(free_commute(&xy, &xyxy));
    assert!(!free_commute(&x, &xy));
    let conj = vec![(1, 1), (0, 1), (0, 1), (1, -1)];
    assert_eq!(free_root(&conj), vec![(1, 1), (0, 1), (1, -1)]);
}
