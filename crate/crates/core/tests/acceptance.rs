//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the lines always reach the test output.

mod common;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use bass_serre::corpus::{self, Corpus, VerifyOptions};
use bass_serre::decision::{centralizer_root_check, classify_subgroup, normalizer_chain};
use bass_serre::fixtures;
use bass_serre::group::catalog;
use bass_serre::group::Subgroup;
use bass_serre::par::Exec;
use bass_serre::quotient::{enumerate_quotients, quotient_gog, FiniteQuotient, QuotientOptions, Tower};
use bass_serre::tree::StandardTree;
use bass_serre::word::{parse_word, FundamentalGroup, PathWord};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;
const PAIRS: usize = 10_000;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn within(limit: Duration, t: Duration) -> bool {
    t < limit
}

fn vertex_faithful(g: &bass_serre::gog::GraphOfGroups, max_order: usize) -> Vec<FiniteQuotient> {
    let opts = QuotientOptions { max_order, vertex_faithful_only: true, ..Default::default() };
    enumerate_quotients(g, catalog::standard(), &opts).unwrap()
}

fn tower(g: &bass_serre::gog::GraphOfGroups, max_order: usize) -> Tower {
    Tower::vertex_faithful(g, max_order, Exec::default()).unwrap()
}

fn is_elementary_abelian_2(q: &FiniteQuotient) -> bool {
    let t = &q.target;
    (0..t.order()).all(|x| t.element_order(x) <= 2)
}

/// A pair of words of length at most 8: independent, equal by inserting
/// `r r^-1`, or equal by rewriting the first as its printed normal form.
fn random_pair(fg: &FundamentalGroup, rng: &mut ChaCha8Rng) -> (PathWord, PathWord) {
    match rng.gen_range(0..3) {
        0 => {
            let (la, lb) = (rng.gen_range(0..=8), rng.gen_range(0..=8));
            (fg.random_word(rng, la), fg.random_word(rng, lb))
        }
        1 => {
            let lr = rng.gen_range(1..=4);
            let rest = 8 - 2 * lr;
            let lu = rng.gen_range(0..=rest);
            let lv = rng.gen_range(0..=rest - lu);
            let (u, r, v) = (fg.random_word(rng, lu), fg.random_word(rng, lr), fg.random_word(rng, lv));
            let a = fg.multiply(&u, &v).unwrap();
            let rr = fg.multiply(&r, &fg.invert(&r)).unwrap();
            let b = fg.multiply(&fg.multiply(&u, &rr).unwrap(), &v).unwrap();
            (a, b)
        }
        _ => {
            let l = rng.gen_range(0..=8);
            let a = fg.random_word(rng, l);
            let text = bass_serre::word::format_word(fg, fg.reduce(&a).word());
            let b = parse_word(fg, &text).unwrap();
            (a, b)
        }
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut pairs, mut equal, mut oracle_bad, mut quotient_bad) = (0, 0, 0, 0);
    let mut notes = Vec::new();
    for (name, g) in fixtures::all() {
        let fg = FundamentalGroup::new(&g).unwrap();
        let qs = vertex_faithful(&g, 24);
        for _ in 0..PAIRS {
            let (a, b) = random_pair(&fg, &mut rng);
            let eq = fg.equal(&a, &b).unwrap();
            pairs += 1;
            equal += eq as usize;
            if eq != britton_equal(&g, &a, &b) {
                oracle_bad += 1;
            }
            let images_agree = qs.iter().all(|q| q.eval(&fg, &a) == q.eval(&fg, &b));
            if eq != images_agree {
                quotient_bad += 1;
                if notes.len() < 3 {
                    notes.push(format!("{name}: {}", bass_serre::word::format_word(&fg, fg.reduce(&fg.multiply(&a, &fg.invert(&b)).unwrap()).word())));
                }
            }
        }
    }
    let t = start.elapsed();
    let mut detail = format!(
        "{pairs} pairs ({equal} equal), {oracle_bad} oracle and {quotient_bad} quotient disagreements, {:.1}s (limit 60s)",
        t.as_secs_f64()
    );
    if !notes.is_empty() {
        detail.push_str(&format!("; unseparated: {}", notes.join("; ")));
    }
    outcome(oracle_bad == 0 && quotient_bad == 0 && within(Duration::from_secs(60), t), detail)
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, expected) in [("dinf", vec![2, 2]), ("psl2z", vec![2, 3])] {
        let fg = fundamental(name);
        let g = fg.gog();
        let tree = StandardTree::new(&fg);
        let ball = tree.ball(&tree.base_vertex(), 6);
        let acyclic = ball.is_tree() && ball.edges.len() + 1 == ball.vertices.len();
        let formula: Vec<usize> = (0..g.vertex_count()).map(|v| index_degree(g, v)).collect();
        let mut degrees_ok = formula == expected;
        for (i, v) in ball.vertices.iter().enumerate() {
            let in_ball = ball.edges.iter().filter(|(_, a, b)| *a == i || *b == i).count();
            let around = tree.neighbors(v).len();
            if around != formula[v.cell] || (!ball.frontier[i] && in_ball != around) {
                degrees_ok = false;
            }
        }
        ok &= acyclic && degrees_ok;
        parts.push(format!("{name}: {} vertices, tree={acyclic}, degrees={formula:?} ok={degrees_ok}", ball.vertices.len()));
    }
    let t = start.elapsed();
    let detail = format!("{}, {:.2}s (limit 10s)", parts.join("; "), t.as_secs_f64());
    outcome(ok && within(Duration::from_secs(10), t), detail)
}

fn criterion_3() -> Outcome {
    let g = fixtures::dinf();
    let v4 = vertex_faithful(&g, 4).into_iter().find(|q| q.image_order == 4 && is_elementary_abelian_2(q)).unwrap();
    let s = quotient_gog(&g, &v4);
    let sg = s.gog();
    let iso = sg.vertex_count() == 2
        && sg.edge_count() == 1
        && !sg.edge(0).is_loop()
        && (0..2).all(|v| sg.vertex_group(v).order() == 2)
        && sg.edge_group(0).order() == 1;
    let opts = QuotientOptions { max_order: 1, ..Default::default() };
    let trivial = enumerate_quotients(&g, catalog::standard(), &opts).unwrap();
    let t = quotient_gog(&g, &trivial[0]);
    let one_loop = t.gog().vertex_count() == 1 && t.gog().edge_count() == 1 && t.gog().edge(0).is_loop();
    let (mut squares, mut failed) = (0, 0);
    for (_, g) in fixtures::all() {
        for (_, c) in tower(&g, 24).check_all_squares(Exec::default()) {
            squares += 1;
            failed += !c.holds as usize;
        }
    }
    outcome(
        iso && one_loop && failed == 0,
        format!("Klein four stage isomorphic={iso}, trivial stage one vertex one loop={one_loop}, {squares} squares, {failed} failed"),
    )
}

fn criterion_4() -> Outcome {
    let cases: [(&str, usize, usize, fn(&FiniteQuotient) -> bool); 3] = [
        ("dinf", 4, 1, is_elementary_abelian_2),
        ("psl2z", 6, 2, |q| !q.target.is_abelian()),
        ("f2", 1, 2, |_| true),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, order, expected, pick) in cases {
        let g = fixtures::by_name(name).unwrap();
        let q = vertex_faithful(&g, order).into_iter().find(|q| q.image_order == order && pick(q)).unwrap();
        let formula = q.kernel_rank(&g).unwrap();
        let rs = reidemeister_schreier_rank(&g, &q);
        ok &= formula == expected as i64 && rs == expected;
        parts.push(format!("{name}/{}: formula {formula}, oracle {rs}", q.name));
    }
    outcome(ok, parts.join("; "))
}

fn criterion_5_and_6() -> (Outcome, Outcome) {
    let (mut pairs, mut unseparated, mut stages, mut unreduced) = (0, Vec::new(), 0, 0);
    for (name, g) in fixtures::all() {
        if !g.is_reduced() {
            continue;
        }
        let t = tower(&g, 24);
        for (a, b, s) in t.coverage() {
            pairs += 1;
            if s.is_none() {
                unseparated.push(format!("{name}:{}/{}", g.cell_name(a), g.cell_name(b)));
            }
        }
        stages += t.len();
        unreduced += t.stages.iter().filter(|s| !s.is_reduced()).count();
    }
    let c5 = outcome(
        unseparated.is_empty(),
        format!("{pairs} cell pairs, {} unseparated {}", unseparated.len(), unseparated.join(" ")).trim_end().to_string(),
    );
    let c6 = outcome(unreduced == 0, format!("{stages} vertex-faithful stages, {unreduced} not reduced"));
    (c5, c6)
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let fg = fundamental("dinf");
    let tree = StandardTree::new(&fg);
    let q = tree.minimal_invariant_subtree(&[nf(&fg, "v1.a v2.b")], 100_000);
    let t = start.elapsed();
    match q {
        Ok(q) => outcome(
            q.vertices.len() == 2 && q.edges.len() == 2 && within(Duration::from_secs(5), t),
            format!(
                "<ab>: {} vertices, {} edges after {} passes, {:.3}s (limit 5s)",
                q.vertices.len(),
                q.edges.len(),
                q.passes,
                t.as_secs_f64()
            ),
        ),
        Err(e) => outcome(false, format!("<ab>: {e}")),
    }
}

fn criterion_8() -> Outcome {
    let mut c = Corpus::standard();
    c.fixture.clear();
    c.normal_form.clear();
    c.order.clear();
    c.kernel_rank.clear();
    let has = |h1: &str, h2: &str, v| {
        c.conjugacy.iter().any(|f| f.fixture == "dinf" && f.h1 == [h1] && f.h2 == [h2] && f.verdict == v)
    };
    let required = has("v1.a", "v2.b v1.a v2.b", corpus::ExpectedVerdict::Conjugate)
        && has("v1.a", "v2.b", corpus::ExpectedVerdict::NotConjugate);
    let results = corpus::verify_all(&c, &VerifyOptions::default());
    let slowest = results.iter().map(|r| r.elapsed).max().unwrap_or_default();
    let failed: Vec<String> = results.iter().filter(|r| !r.passed).map(|r| r.line()).collect();
    let ok = required && results.len() >= 10 && failed.is_empty() && within(Duration::from_secs(5), slowest);
    outcome(
        ok,
        format!(
            "{} pairs, {} wrong or unverified, slowest {:.2}s (limit 5s each){}",
            results.len(),
            failed.len(),
            slowest.as_secs_f64(),
            if failed.is_empty() { String::new() } else { format!("; {}", failed.join("; ")) }
        ),
    )
}

fn criterion_9() -> Outcome {
    let fg = fundamental("dinf");
    let t = tower(fg.gog(), 16);
    let reference = (0..t.len()).find(|&i| is_elementary_abelian_2(&t.stages[i].quotient) && t.stages[i].quotient.image_order == 4).unwrap();
    let q = &t.stages[reference].quotient;
    let all_dihedral = t.stages.iter().all(|s| {
        let g = &s.quotient.target;
        // generated by two involutions
        let inv: Vec<usize> = (0..g.order()).filter(|&x| g.element_order(x) == 2).collect();
        inv.iter().any(|&x| inv.iter().any(|&y| g.closure(&[x, y]).len() == g.order()))
    });
    let mut ok = all_dihedral;
    let mut parts = Vec::new();
    // hand-computed normalizers: N(<a>) = <a>, and <(ab)^2> is normal
    for (h, normalizer_gens) in [("v1.a", vec!["v1.a"]), ("v1.a v2.b v1.a v2.b", vec!["v1.a", "v2.b"])] {
        let spec = classify_subgroup(&fg, &[nf(&fg, h)]);
        let report = normalizer_chain(&fg, &spec, &t, reference, 3).unwrap();
        let expected_gens: Vec<usize> = normalizer_gens.iter().map(|w| q.eval(&fg, nf(&fg, w).word())).collect();
        let expected = Subgroup::generated(&q.target, &expected_gens);
        let good = report.stabilized_at.is_some() && report.limit() == Some(&expected);
        ok &= good;
        parts.push(format!(
            "<{h}>: {} entries, stabilized at {:?}, limit order {} (expected {})",
            report.chain.len(),
            report.stabilized_at,
            report.limit().map_or(0, |l| l.order()),
            expected.order()
        ));
    }
    outcome(ok, format!("{} dihedral stages; {}", t.len(), parts.join("; ")))
}

/// Words of length at most `n` in the given tokens, as text.
fn all_words(tokens: &[&str], n: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &layer {
            for t in tokens {
                next.push(if w.is_empty() { t.to_string() } else { format!("{w} {t}") });
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn criterion_10() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, x, n, tokens) in
        [("dinf", "v1.a v2.b", 2u32, vec!["v1.a", "v2.b"]), ("f2", "x y", 3u32, vec!["x", "x^-1", "y", "y^-1"])]
    {
        let fg = fundamental(name);
        let g = fg.gog();
        let t = tower(g, 8);
        let xw = nf(&fg, x);
        let report = centralizer_root_check(&fg, &xw, n, &t, 6).unwrap();
        let xn = fg.pow(&xw, n as i64);
        let commute = |a: &PathWord, b: &PathWord| {
            if name == "f2" {
                free_commute(&as_free_word(g, a), &as_free_word(g, b))
            } else {
                britton_commute(g, a, b)
            }
        };
        let (mut seen, mut oracle_counter, mut mismatch) = (HashSet::new(), 0, 0);
        for text in all_words(&tokens, 6) {
            let w = fg.reduce(&parse_word(&fg, &text).unwrap());
            if !seen.insert(w.clone()) {
                continue;
            }
            let (cp, c1) = (commute(w.word(), xn.word()), commute(w.word(), xw.word()));
            oracle_counter += (cp && !c1) as usize;
            mismatch += (cp != fg.commutes(&w, &xn)) as usize;
        }
        ok &= report.counterexamples.is_empty() && oracle_counter == 0 && mismatch == 0;
        parts.push(format!(
            "{name} x={x} n={n}: {} words, {} commute with x^n, {} counterexamples, oracle {} distinct words, {oracle_counter} counterexamples, {mismatch} mismatches",
            report.checked,
            report.commuting_with_power,
            report.counterexamples.len(),
            seen.len()
        ));
    }
    outcome(ok, parts.join("; "))
}

fn main() {
    let start = Instant::now();
    let (c5, c6) = criterion_5_and_6();
    let results = [
        ("normal-form correctness", criterion_1()),
        ("tree structure", criterion_2()),
        ("quotient construction", criterion_3()),
        ("kernel rank", criterion_4()),
        ("separation", c5),
        ("reducedness of stages", c6),
        ("minimal subtree", criterion_7()),
        ("conjugacy decision", criterion_8()),
        ("normalizer chains", criterion_9()),
        ("centralizer roots", criterion_10()),
    ];
    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        println!("criterion {:>2} {} {name}: {}", i + 1, if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failed += !o.passed as usize;
    }
    println!("acceptance: {} passed, {failed} failed, {:.1}s", results.len() - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
