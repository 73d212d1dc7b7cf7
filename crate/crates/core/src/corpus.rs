//! Hand-derived facts about the shipped fixtures and a checker that
//! recomputes each of them.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use thiserror::Error;

use crate::decision::{classify_subgroup, decide_conjugacy, verify_conjugator, ConjugacyVerdict, Schedule};
use crate::fixtures;
use crate::par::Exec;
use crate::quotient::{enumerate_quotients, QuotientOptions, Tower};
use crate::word::{format_word, parse_word, FundamentalGroup, NormalForm, Order, WordError};

pub const SHIPPED: &str = include_str!("../fixtures/corpus.toml");

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus: {0}")]
    Parse(#[from] toml::de::Error),
}

#[derive(Clone, Debug, Deserialize)]
pub struct FixtureFact {
    pub name: String,
    pub euler: String,
    pub reduced: bool,
    #[serde(default)]
    pub note: String,
}

#[derive(Clone, Debug, Deserialize)]
pub struct NormalFormFact {
    pub fixture: String,
    pub word: String,
    pub expected: String,
    #[serde(default)]
    pub note: String,
}

#[derive(Clone, Debug, Deserialize)]
pub struct OrderFact {
    pub fixture: String,
    pub word: String,
    /// A number or `infinite`.
    pub order: String,
    #[serde(default)]
    pub note: String,
}

#[derive(Clone, Debug, Deserialize)]
pub struct KernelRankFact {
    pub fixture: String,
    pub image_order: usize,
    pub rank: i64,
    #[serde(default)]
    pub note: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedVerdict {
    Conjugate,
    NotConjugate,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ConjugacyFact {
    pub fixture: String,
    pub h1: Vec<String>,
    pub h2: Vec<String>,
    pub verdict: ExpectedVerdict,
    #[serde(default)]
    pub note: String,
}

#[derive(Clone, Debug, Default, Deserialize)]
pub struct Corpus {
    #[serde(default)]
    pub fixture: Vec<FixtureFact>,
    #[serde(default)]
    pub normal_form: Vec<NormalFormFact>,
    #[serde(default)]
    pub order: Vec<OrderFact>,
    #[serde(default)]
    pub kernel_rank: Vec<KernelRankFact>,
    #[serde(default)]
    pub conjugacy: Vec<ConjugacyFact>,
}

impl Corpus {
    pub fn parse(text: &str) -> Result<Corpus, CorpusError> {
        Ok(toml::from_str(text)?)
    }

    pub fn standard() -> Corpus {
        Corpus::parse(SHIPPED).expect("shipped corpus is valid")
    }

    pub fn len(&self) -> usize {
        self.fixture.len() + self.normal_form.len() + self.order.len() + self.kernel_rank.len() + self.conjugacy.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Outcome of recomputing one corpus entry.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub kind: &'static str,
    pub fixture: String,
    pub subject: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl CheckResult {
    pub fn line(&self) -> String {
        format!(
            "{} {} {} [{}] {}",
            if self.passed { "ok" } else { "FAIL" },
            self.kind,
            self.fixture,
            self.subject,
            self.detail
        )
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Largest target order of the towers used for conjugacy.
    pub max_order: usize,
    pub schedule: Schedule,
    pub exec: Exec,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { max_order: crate::group::catalog::SHIPPED_MAX_ORDER, schedule: Schedule::default(), exec: Exec::default() }
    }
}

struct Context {
    fg: FundamentalGroup,
    tower: Option<Tower>,
}

fn context<'a>(contexts: &'a mut HashMap<String, Context>, name: &str) -> Result<&'a mut Context, String> {
    if !contexts.contains_key(name) {
        let g = fixtures::by_name(name).ok_or_else(|| format!("unknown fixture {name:?}"))?;
        let fg = FundamentalGroup::new(&g).map_err(|e| e.to_string())?;
        contexts.insert(name.to_string(), Context { fg, tower: None });
    }
    Ok(contexts.get_mut(name).expect("inserted"))
}

fn parse_nf(fg: &FundamentalGroup, text: &str) -> Result<NormalForm, WordError> {
    Ok(fg.reduce(&parse_word(fg, text)?))
}

fn timed(kind: &'static str, fixture: &str, subject: String, f: impl FnOnce() -> Result<(bool, String), String>) -> CheckResult {
    let start = Instant::now();
    let (passed, detail) = f().unwrap_or_else(|e| (false, e));
    CheckResult { kind, fixture: fixture.to_string(), subject, passed, detail, elapsed: start.elapsed() }
}

/// Recomputes every entry of the corpus, in file order grouped by kind.
pub fn verify_all(corpus: &Corpus, opts: &VerifyOptions) -> Vec<CheckResult> {
    let mut contexts: HashMap<String, Context> = HashMap::new();
    let mut out = Vec::new();

    for f in &corpus.fixture {
        out.push(timed("fixture", &f.name, "euler, reduced".into(), || {
            let fg = &context(&mut contexts, &f.name)?.fg;
            let expected: Ratio<i64> = f.euler.parse().map_err(|e| format!("bad euler {:?}: {e}", f.euler))?;
            let chi = fg.gog().euler_characteristic();
            let reduced = fg.gog().is_reduced();
            Ok((chi == expected && reduced == f.reduced, format!("euler={chi} reduced={reduced}")))
        }));
    }

    for f in &corpus.normal_form {
        out.push(timed("normal_form", &f.fixture, f.word.clone(), || {
            let fg = &context(&mut contexts, &f.fixture)?.fg;
            let nf = parse_nf(fg, &f.word).map_err(|e| e.to_string())?;
            let got = format_word(fg, nf.word());
            Ok((got == f.expected, format!("nf={got}")))
        }));
    }

    for f in &corpus.order {
        out.push(timed("order", &f.fixture, f.word.clone(), || {
            let fg = &context(&mut contexts, &f.fixture)?.fg;
            let w = parse_word(fg, &f.word).map_err(|e| e.to_string())?;
            let got = fg.order_of(&w).map_err(|e| e.to_string())?;
            let expected = match f.order.as_str() {
                "infinite" => Order::Infinite,
                n => Order::Finite(n.parse().map_err(|e| format!("bad order {n:?}: {e}"))?),
            };
            Ok((got == expected, format!("order={got}")))
        }));
    }

    for f in &corpus.kernel_rank {
        out.push(timed("kernel_rank", &f.fixture, format!("image order {}", f.image_order), || {
            let fg = &context(&mut contexts, &f.fixture)?.fg;
            let q_opts = QuotientOptions {
                max_order: f.image_order,
                vertex_faithful_only: true,
                exec: opts.exec,
                ..Default::default()
            };
            let qs = enumerate_quotients(fg.gog(), crate::group::catalog::standard(), &q_opts).map_err(|e| e.to_string())?;
            let q = qs
                .iter()
                .find(|q| q.image_order == f.image_order)
                .ok_or_else(|| format!("no vertex-faithful quotient of order {}", f.image_order))?;
            let rank = q.kernel_rank(fg.gog()).map_err(|e| e.to_string())?;
            Ok((rank == f.rank, format!("rank={rank} via {}", q.name)))
        }));
    }

    for f in &corpus.conjugacy {
        let subject = format!("<{}> ~ <{}>", f.h1.join(", "), f.h2.join(", "));
        out.push(timed("conjugacy", &f.fixture, subject, || {
            let ctx = context(&mut contexts, &f.fixture)?;
            if ctx.tower.is_none() {
                ctx.tower = Some(Tower::vertex_faithful(ctx.fg.gog(), opts.max_order, opts.exec).map_err(|e| e.to_string())?);
            }
            let (fg, tower) = (&ctx.fg, ctx.tower.as_ref().expect("built"));
            let gens = |ws: &[String]| ws.iter().map(|w| parse_nf(fg, w)).collect::<Result<Vec<_>, _>>();
            let h1 = classify_subgroup(fg, &gens(&f.h1).map_err(|e| e.to_string())?);
            let h2 = classify_subgroup(fg, &gens(&f.h2).map_err(|e| e.to_string())?);
            let verdict = decide_conjugacy(fg, &h1, &h2, tower, &opts.schedule, None).map_err(|e| e.to_string())?;
            Ok(match &verdict {
                ConjugacyVerdict::Conjugate { witness } => {
                    let checked = verify_conjugator(fg, &h1, &h2, witness, opts.schedule.max_radius);
                    (
                        f.verdict == ExpectedVerdict::Conjugate && checked,
                        format!("conjugate by {} (rechecked: {checked})", format_word(fg, witness.word())),
                    )
                }
                ConjugacyVerdict::NotConjugate(c) => {
                    let checked = c.verify(fg, &h1, &h2);
                    (
                        f.verdict == ExpectedVerdict::NotConjugate && checked,
                        format!("separated in {} (rechecked: {checked})", c.quotient.name),
                    )
                }
            })
        }));
    }
    out
}

/// Seeded random words on every shipped fixture: reduction is idempotent,
/// `w w^-1` reduces to the identity, printed normal forms parse back, and
/// words that reduce equal have equal images in every vertex-faithful
/// quotient of order at most `max_order`. One result per fixture.
pub fn random_word_checks(seed: u64, samples: usize, max_order: usize, exec: Exec) -> Vec<CheckResult> {
    fixtures::all()
        .into_iter()
        .map(|(name, g)| {
            timed("random_words", name, format!("seed {seed}, {samples} samples"), || {
                let fg = FundamentalGroup::new(&g).map_err(|e| e.to_string())?;
                let q_opts = QuotientOptions { max_order, vertex_faithful_only: true, exec, ..Default::default() };
                let qs = enumerate_quotients(&g, crate::group::catalog::standard(), &q_opts).map_err(|e| e.to_string())?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for i in 0..samples {
                    let (la, lb) = (rng.gen_range(0..=8), rng.gen_range(0..=8));
                    let (a, b) = (fg.random_word(&mut rng, la), fg.random_word(&mut rng, lb));
                    let na = fg.reduce(&a);
                    if fg.reduce(na.word()) != na {
                        return Ok((false, format!("sample {i}: reduction not idempotent")));
                    }
                    if !fg.mul(&na, &fg.inv(&na)).is_trivial() {
                        return Ok((false, format!("sample {i}: w w^-1 is not trivial")));
                    }
                    let text = format_word(&fg, na.word());
                    if parse_nf(&fg, &text).map_err(|e| e.to_string())? != na {
                        return Ok((false, format!("sample {i}: {text} does not parse back")));
                    }
                    if na == fg.reduce(&b) && qs.iter().any(|q| q.eval(&fg, &a) != q.eval(&fg, &b)) {
                        return Ok((false, format!("sample {i}: equal words separated by a quotient")));
                    }
                }
                Ok((true, format!("{} quotients", qs.len())))
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_corpus_parses() {
        let c = Corpus::standard();
        assert_eq!(c.fixture.len(), 5);
        assert!(c.conjugacy.len() >= 10);
        assert!(c.conjugacy.iter().any(|f| f.verdict == ExpectedVerdict::NotConjugate));
    }

    #[test]
    fn cheap_entries_verify() {
        let mut c = Corpus::standard();
        c.conjugacy.clear();
        for r in verify_all(&c, &VerifyOptions::default()) {
            assert!(r.passed, "{}", r.line());
        }
    }

    #[test]
    fn random_words_pass() {
        for r in random_word_checks(7, 50, 8, Exec::Sequential) {
            assert!(r.passed, "{}", r.line());
        }
    }

    #[test]
    fn wrong_facts_fail() {
        let c = Corpus::parse(
            r#"
            [[fixture]]
            name = "dinf"
            euler = "1"
            reduced = true
            [[order]]
            fixture = "nowhere"
            word = "x"
            order = "2"
            "#,
        )
        .unwrap();
        let r = verify_all(&c, &VerifyOptions::default());
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|r| !r.passed));
    }
}
