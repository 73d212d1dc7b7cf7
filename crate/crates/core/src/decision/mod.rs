//! Decision procedures on subgroups of the fundamental group: finiteness,
//! membership, conjugacy, normalizer chains and centralizer checks.

use std::collections::{HashSet, VecDeque};

use thiserror::Error;

use crate::group::catalog::{self, CatalogEntry};
use crate::group::{are_conjugate_subgroups, centralizer, normalizer, Subgroup};
use crate::quotient::{quotients_into, FiniteQuotient, QuotientOptions, Tower, TowerError};
use crate::word::{format_word, FundamentalGroup, NormalForm, Order};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DecisionError {
    #[error("undecided after {} rounds; resume from round {} and quotient {}", .0.round, .0.round, .0.lane_b_position)]
    BudgetExceeded(ConjugacyState),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// What is known about the size of a finitely generated subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Finiteness {
    /// All elements, sorted.
    Finite(Vec<NormalForm>),
    /// An element of infinite order.
    Infinite(NormalForm),
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupSpec {
    pub generators: Vec<NormalForm>,
    pub finiteness: Finiteness,
}

impl SubgroupSpec {
    pub fn is_finite(&self) -> bool {
        matches!(self.finiteness, Finiteness::Finite(_))
    }

    pub fn elements(&self) -> Option<&[NormalForm]> {
        match &self.finiteness {
            Finiteness::Finite(e) => Some(e),
            _ => None,
        }
    }
}

fn has_infinite_order(fg: &FundamentalGroup, x: &NormalForm) -> bool {
    matches!(fg.order_of(x.word()), Ok(Order::Infinite))
}

/// Decides whether `<gens>` is finite.
///
/// A finite subgroup fixes a vertex of the tree, so it embeds in a vertex
/// group and its order is at most the largest vertex group order. Closure
/// beyond that bound proves the subgroup infinite; the element of infinite
/// order reported as a witness is searched among the generators, their
/// pairwise products and the elements met during the closure.
pub fn classify_subgroup(fg: &FundamentalGroup, gens: &[NormalForm]) -> SubgroupSpec {
    let generators = gens.to_vec();
    let spec = |finiteness| SubgroupSpec { generators: generators.clone(), finiteness };
    for g in gens {
        if has_infinite_order(fg, g) {
            return spec(Finiteness::Infinite(g.clone()));
        }
    }
    for a in gens {
        for b in gens {
            let ab = fg.mul(a, b);
            if has_infinite_order(fg, &ab) {
                return spec(Finiteness::Infinite(ab));
            }
        }
    }
    let bound = (0..fg.gog().vertex_count()).map(|v| fg.gog().vertex_group(v).order()).max().unwrap_or(1);
    let mut seen: HashSet<NormalForm> = HashSet::from([fg.identity()]);
    let mut elems = vec![fg.identity()];
    let mut i = 0;
    while i < elems.len() {
        for g in gens {
            let y = fg.mul(&elems[i], g);
            if seen.insert(y.clone()) {
                if has_infinite_order(fg, &y) {
                    return spec(Finiteness::Infinite(y));
                }
                elems.push(y);
                if elems.len() > bound {
                    return spec(Finiteness::Unknown);
                }
            }
        }
        i += 1;
    }
    elems.sort();
    spec(Finiteness::Finite(elems))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Yes,
    Unknown,
}

/// Exact for finite subgroups; otherwise searches products of at most
/// `budget` generators and inverses.
pub fn membership_semitest(fg: &FundamentalGroup, w: &NormalForm, h: &SubgroupSpec, budget: usize) -> Membership {
    let found = match &h.finiteness {
        Finiteness::Finite(elems) => elems.binary_search(w).is_ok(),
        _ => w.is_trivial() || fg.ball(&h.generators, budget).contains(w),
    };
    if found {
        Membership::Yes
    } else {
        Membership::Unknown
    }
}


/// Searches for an element of `candidates` conjugating `h1` onto `h2`.
struct LaneA<'a> {
    fg: &'a FundamentalGroup,
    h1: &'a SubgroupSpec,
    h2: &'a SubgroupSpec,
}

impl LaneA<'_> {
    fn both_finite(&self) -> bool {
        self.h1.is_finite() && self.h2.is_finite()
    }

    /// Finite and infinite subgroups are never conjugate.
    fn hopeless(&self) -> bool {
        self.h1.is_finite() != self.h2.is_finite()
    }

    fn conjugates(&self, r: &NormalForm, balls: &(HashSet<NormalForm>, HashSet<NormalForm>)) -> bool {
        let fg = self.fg;
        if let (Some(a), Some(b)) = (self.h1.elements(), self.h2.elements()) {
            if a.len() != b.len() {
                return false;
            }
            return a.iter().all(|h| b.binary_search(&fg.conj(r, h)).is_ok());
        }
        let rinv = fg.inv(r);
        self.h1.generators.iter().all(|h| balls.1.contains(&fg.conj(r, h)))
            && self.h2.generators.iter().all(|k| balls.0.contains(&fg.conj(&rinv, k)))
    }

    fn balls(&self, radius: usize) -> (HashSet<NormalForm>, HashSet<NormalForm>) {
        if self.both_finite() {
            return Default::default();
        }
        (
            self.fg.ball(&self.h1.generators, radius).into_iter().collect(),
            self.fg.ball(&self.h2.generators, radius).into_iter().collect(),
        )
    }
}

/// Where a non-conjugacy certificate came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuotientSource {
    Stage(usize),
    Extension(String),
}

/// Finite quotients tried by lane B: the tower stages, then quotients onto
/// larger dihedral, cyclic and symmetric groups.
struct LaneB<'a> {
    fg: &'a FundamentalGroup,
    tower: &'a Tower,
    next_stage: usize,
    extensions: Vec<CatalogEntry>,
    next_extension: usize,
    buffer: VecDeque<FiniteQuotient>,
}

/// Targets beyond the shipped catalog, in the order lane B tries them.
pub fn extension_targets(max_dihedral: usize) -> Vec<CatalogEntry> {
    let mut out: Vec<CatalogEntry> = (13..=max_dihedral).map(catalog::dihedral).collect();
    out.push(catalog::symmetric(5));
    out.extend((25..=2 * max_dihedral).map(catalog::cyclic));
    out
}

impl<'a> LaneB<'a> {
    fn new(fg: &'a FundamentalGroup, tower: &'a Tower, max_dihedral: usize) -> Self {
        LaneB { fg, tower, next_stage: 0, extensions: extension_targets(max_dihedral), next_extension: 0, buffer: VecDeque::new() }
    }

    fn next(&mut self) -> Option<(QuotientSource, FiniteQuotient)> {
        if self.next_stage < self.tower.len() {
            self.next_stage += 1;
            let i = self.next_stage - 1;
            return Some((QuotientSource::Stage(i), self.tower.stages[i].quotient.clone()));
        }
        loop {
            if let Some(q) = self.buffer.pop_front() {
                return Some((QuotientSource::Extension(q.name.clone()), q));
            }
            let entry = self.extensions.get(self.next_extension)?;
            self.next_extension += 1;
            let opts = QuotientOptions {
                max_order: usize::MAX,
                dedupe: false,
                exec: crate::par::Exec::Sequential,
                ..Default::default()
            };
            if let Ok(qs) = quotients_into(self.fg.gog(), entry, &opts) {
                self.buffer.extend(qs);
            }
        }
    }
}

/// Images of a subgroup's generators in a finite quotient.
pub fn image_of(fg: &FundamentalGroup, q: &FiniteQuotient, h: &SubgroupSpec) -> Subgroup {
    let gens: Vec<usize> = h.generators.iter().map(|g| q.eval(fg, g.word())).collect();
    Subgroup::generated(&q.target, &gens)
}

/// A finite quotient in which the images of two subgroups are not
/// conjugate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub source: QuotientSource,
    pub quotient: FiniteQuotient,
    pub image1: Subgroup,
    pub image2: Subgroup,
}

impl Certificate {
    /// Recomputes both images and searches the whole target for a
    /// conjugating element.
    pub fn verify(&self, fg: &FundamentalGroup, h1: &SubgroupSpec, h2: &SubgroupSpec) -> bool {
        let (a, b) = (image_of(fg, &self.quotient, h1), image_of(fg, &self.quotient, h2));
        a == self.image1
            && b == self.image2
            && self.quotient.satisfies_relators(fg.gog())
            && matches!(are_conjugate_subgroups(&self.quotient.target, &a, &b), Ok(None))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConjugacyVerdict {
    /// `witness H1 witness^-1 = H2`.
    Conjugate { witness: NormalForm },
    NotConjugate(Box<Certificate>),
}

/// Checks a conjugator: exactly for finite subgroups, otherwise by
/// membership of conjugated generators in balls of the given radius.
pub fn verify_conjugator(fg: &FundamentalGroup, h1: &SubgroupSpec, h2: &SubgroupSpec, r: &NormalForm, radius: usize) -> bool {
    let lane = LaneA { fg, h1, h2 };
    !lane.hopeless() && lane.conjugates(r, &lane.balls(radius))
}

/// Position of a dovetailed search, enough to resume it.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ConjugacyState {
    pub round: usize,
    pub lane_b_position: usize,
}

/// Budgets for [`decide_conjugacy`].
#[derive(Clone, Debug)]
pub struct Schedule {
    /// Rounds before giving up. Round `k` tries conjugators of edge length
    /// at most `k`.
    pub rounds: usize,
    /// Quotients tried by lane B in the first round; doubles every round.
    pub lane_b_start: usize,
    /// Largest membership radius for infinite subgroups.
    pub max_radius: usize,
    /// Largest `n` of the dihedral extension targets.
    pub max_dihedral: usize,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule { rounds: 10, lane_b_start: 4, max_radius: 6, max_dihedral: 40 }
    }
}

/// Decides whether two subgroups are conjugate by running two searches in
/// lock step: conjugators by increasing normal form (lane A) and finite
/// quotients separating the conjugacy classes of the images (lane B).
pub fn decide_conjugacy(
    fg: &FundamentalGroup,
    h1: &SubgroupSpec,
    h2: &SubgroupSpec,
    tower: &Tower,
    schedule: &Schedule,
    resume: Option<ConjugacyState>,
) -> Result<ConjugacyVerdict, DecisionError> {
    let lane_a = LaneA { fg, h1, h2 };
    let mut lane_b = LaneB::new(fg, tower, schedule.max_dihedral);
    let state = resume.unwrap_or_default();
    for _ in 0..state.lane_b_position {
        lane_b.next();
    }
    let mut position = state.lane_b_position;
    for round in state.round..schedule.rounds {
        if !lane_a.hopeless() {
            let radius = (round + 1).min(schedule.max_radius);
            let balls = lane_a.balls(radius);
            for r in fg.enumerate_normal_forms(round) {
                // finite subgroups need each candidate once
                if lane_a.both_finite() && r.edge_length() < round {
                    continue;
                }
                if lane_a.conjugates(&r, &balls) {
                    return Ok(ConjugacyVerdict::Conjugate { witness: r });
                }
            }
        }
        let quota = schedule.lane_b_start.saturating_mul(1usize << round.min(20));
        for _ in 0..quota {
            let Some((source, q)) = lane_b.next() else { break };
            position += 1;
            let (a, b) = (image_of(fg, &q, h1), image_of(fg, &q, h2));
            if matches!(are_conjugate_subgroups(&q.target, &a, &b), Ok(None)) {
                return Ok(ConjugacyVerdict::NotConjugate(Box::new(Certificate { source, quotient: q, image1: a, image2: b })));
            }
        }
    }
    Err(DecisionError::BudgetExceeded(ConjugacyState { round: schedule.rounds, lane_b_position: position }))
}

impl ConjugacyVerdict {
    pub fn format(&self, fg: &FundamentalGroup) -> String {
        match self {
            ConjugacyVerdict::Conjugate { witness } => {
                format!("verdict conjugate\nwitness {}\n", format_word(fg, witness.word()))
            }
            ConjugacyVerdict::NotConjugate(c) => {
                let source = match &c.source {
                    QuotientSource::Stage(i) => format!("stage {i}"),
                    QuotientSource::Extension(n) => format!("extension {n}"),
                };
                let t = &c.quotient.target;
                let labels = |s: &Subgroup| s.elements().iter().map(|&x| t.label(x)).collect::<Vec<_>>().join(", ");
                format!(
                    "verdict not_conjugate\ncertificate {source} {}\nimage1 {{{}}}\nimage2 {{{}}}\n",
                    c.quotient.format(fg.gog()),
                    labels(&c.image1),
                    labels(&c.image2)
                )
            }
        }
    }
}

/// One entry of a normalizer chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainEntry {
    pub stage: usize,
    /// Normalizer of the image of `H` in the stage target, projected to the
    /// reference target.
    pub projected: Subgroup,
    /// Intersection of all projections so far.
    pub cumulative: Subgroup,
}

#[derive(Clone, Debug)]
pub struct NormalizerReport {
    pub reference: usize,
    pub chain: Vec<ChainEntry>,
    /// Index into `chain` of the first entry equal to its predecessor.
    pub stabilized_at: Option<usize>,
    /// Elements found to normalize `H`, with their images in the reference
    /// target.
    pub discovered: Vec<(NormalForm, usize)>,
}

impl NormalizerReport {
    /// The last cumulative entry, if any.
    pub fn limit(&self) -> Option<&Subgroup> {
        self.chain.last().map(|e| &e.cumulative)
    }
}

/// Whether `r H r^-1 = H`, exactly for finite `H`, otherwise tested on
/// generators against a ball of the given radius.
pub fn normalizes(fg: &FundamentalGroup, h: &SubgroupSpec, r: &NormalForm, ball: &HashSet<NormalForm>) -> bool {
    if let Some(elems) = h.elements() {
        return elems.iter().all(|x| elems.binary_search(&fg.conj(r, x)).is_ok());
    }
    let rinv = fg.inv(r);
    h.generators.iter().all(|g| ball.contains(&fg.conj(r, g)) && ball.contains(&fg.conj(&rinv, g)))
}

/// Finite-stage upper bounds for the image of the normalizer of `H` in the
/// reference stage, together with normalizing elements found by search over
/// words of length at most `word_budget` in the standard generators.
pub fn normalizer_chain(
    fg: &FundamentalGroup,
    h: &SubgroupSpec,
    tower: &Tower,
    reference: usize,
    word_budget: usize,
) -> Result<NormalizerReport, DecisionError> {
    if reference >= tower.len() {
        return Err(TowerError::NoSuchStage(reference).into());
    }
    let tu = &tower.stages[reference].quotient.target;
    let mut chain: Vec<ChainEntry> = Vec::new();
    let mut stabilized_at = None;
    for (v, stage) in tower.stages.iter().enumerate() {
        let Ok(conn) = tower.morphism(v, reference) else { continue };
        let q = &stage.quotient;
        let n = normalizer(&q.target, &image_of(fg, q, h)).expect("same parent");
        let projected: Vec<usize> = n.elements().iter().filter_map(|&x| conn.theta[x]).collect();
        let projected = Subgroup::from_elements(tu, &projected).expect("image of a subgroup");
        let cumulative = match chain.last() {
            Some(prev) => prev.cumulative.intersection(&projected),
            None => projected.clone(),
        };
        if stabilized_at.is_none() && chain.last().is_some_and(|p| p.cumulative == cumulative) {
            stabilized_at = Some(chain.len());
        }
        chain.push(ChainEntry { stage: v, projected, cumulative });
    }
    let ball: HashSet<NormalForm> = if h.is_finite() {
        HashSet::new()
    } else {
        fg.ball(&h.generators, word_budget.max(2)).into_iter().collect()
    };
    let qu = &tower.stages[reference].quotient;
    let discovered = fg
        .ball(&fg.generators(), word_budget)
        .into_iter()
        .filter(|r| normalizes(fg, h, r, &ball))
        .map(|r| {
            let img = qu.eval(fg, r.word());
            (r, img)
        })
        .collect();
    Ok(NormalizerReport { reference, chain, stabilized_at, discovered })
}

#[derive(Clone, Debug)]
pub struct CentralizerReport {
    /// A vertex-faithful stage whose kernel, a free group, contains `x`.
    pub kernel_stage: usize,
    pub checked: usize,
    /// Words commuting with `x^n`.
    pub commuting_with_power: usize,
    /// Words commuting with `x^n` but not with `x`.
    pub counterexamples: Vec<NormalForm>,
    /// Per stage: orders of the centralizers of the images of `x^n` and `x`.
    pub stages: Vec<(usize, usize, usize)>,
}

/// Checks on all words of length at most `radius` that commuting with `x^n`
/// implies commuting with `x`, as roots are unique in a free group.
pub fn centralizer_root_check(
    fg: &FundamentalGroup,
    x: &NormalForm,
    n: u32,
    tower: &Tower,
    radius: usize,
) -> Result<CentralizerReport, DecisionError> {
    if n == 0 {
        return Err(DecisionError::PreconditionFailed("n must be positive".into()));
    }
    if let Ok(Order::Finite(k)) = fg.order_of(x.word()) {
        return Err(DecisionError::PreconditionFailed(format!("x is elliptic (order {k})")));
    }
    let kernel_stage = tower
        .stages
        .iter()
        .position(|s| s.quotient.vertex_faithful && s.quotient.eval(fg, x.word()) == s.quotient.target.identity())
        .ok_or_else(|| DecisionError::PreconditionFailed("no vertex-faithful stage maps x to the identity".into()))?;
    let xn = fg.pow(x, n as i64);
    let mut checked = 0;
    let mut commuting_with_power = 0;
    let mut counterexamples = Vec::new();
    for w in fg.ball(&fg.generators(), radius) {
        checked += 1;
        if fg.commutes(&w, &xn) {
            commuting_with_power += 1;
            if !fg.commutes(&w, x) {
                counterexamples.push(w);
            }
        }
    }
    let stages = tower
        .stages
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let q = &s.quotient;
            let (a, b) = (q.eval(fg, xn.word()), q.eval(fg, x.word()));
            let ca = centralizer(&q.target, &[a]).expect("element of target").order();
            let cb = centralizer(&q.target, &[b]).expect("element of target").order();
            (i, ca, cb)
        })
        .collect();
    Ok(CentralizerReport { kernel_stage, checked, commuting_with_power, counterexamples, stages })
}
