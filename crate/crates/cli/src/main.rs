//! `bst`: command-line front end for graphs of groups, their fundamental
//! groups, standard trees, finite quotient towers and decision procedures.

mod report;

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use bass_serre::corpus::{self, Corpus, VerifyOptions};
use bass_serre::decision::{
    centralizer_root_check, classify_subgroup, decide_conjugacy, normalizer_chain, verify_conjugator, ConjugacyState,
    ConjugacyVerdict, DecisionError, Finiteness, Schedule, SubgroupSpec,
};
use bass_serre::fixtures;
use bass_serre::gog::{self, GraphOfGroups};
use bass_serre::group::catalog::{self, GroupClass};
use bass_serre::group::Subgroup;
use bass_serre::par::Exec;
use bass_serre::quotient::{enumerate_quotients, QuotientError, QuotientOptions, Tower};
use bass_serre::tree::{StandardTree, TreeError};
use bass_serre::word::{format_word, parse_word, parse_word_list, FundamentalGroup, NormalForm};
use clap::{Args, Parser, Subcommand};

use report::{Report, Status};

#[derive(Parser, Debug)]
#[command(name = "bst", version, about = "Graphs of groups, standard trees and finite quotient towers")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Graph of groups document. A missing path falls back to the shipped
    /// fixture of the same name (dinf, psl2z, hnn, f2, amalgam2).
    #[arg(long, global = true)]
    input: Option<String>,
    /// Largest order of quotient targets.
    #[arg(long, global = true, default_value_t = catalog::SHIPPED_MAX_ORDER)]
    max_order: usize,
    /// Work budget of the command (rounds, cells, assignments or samples).
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Radius or word length bound of the command.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads; 1 runs sequentially, 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Treat infinite subgroups as closed in the chosen profinite topology.
    #[arg(long, global = true)]
    assume_closed: bool,
    /// Class of finite quotients: all, p-groups or solvable.
    #[arg(long, global = true, default_value = "all")]
    class: GroupClass,
    /// Append wall-clock timings to the report.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the graph of groups invariants.
    Validate,
    /// Contract fictitious edges and print the reduced document.
    Reduce,
    /// Normal form and order of a word.
    Nf {
        #[arg(long)]
        word: String,
    },
    /// Patches of the standard tree: a ball, a geodesic or a minimal
    /// invariant subtree.
    Tree {
        /// Geodesic from the base vertex to its translate by this word.
        #[arg(long)]
        geodesic: Option<String>,
        /// Comma-separated generators of a subgroup whose minimal invariant
        /// subtree is computed.
        #[arg(long)]
        subgroup: Option<String>,
    },
    /// Enumerate finite quotients onto catalog groups.
    Quotients {
        /// Keep only quotients injective on every vertex group.
        #[arg(long)]
        vertex_faithful: bool,
        /// Include homomorphisms that are not onto.
        #[arg(long)]
        all_homs: bool,
    },
    /// Build or check the tower of vertex-faithful quotients.
    Tower {
        #[command(subcommand)]
        action: TowerAction,
    },
    /// Decide whether two subgroups are conjugate.
    Conjsep {
        /// Comma-separated generators.
        #[arg(long)]
        h1: String,
        #[arg(long)]
        h2: String,
        /// Resume a previous search, as printed by an undecided run.
        #[arg(long, value_parser = parse_resume)]
        resume: Option<ConjugacyState>,
    },
    /// Normalizer chain of a subgroup over the tower.
    Normalizer {
        #[arg(long)]
        h: String,
        /// Stage the chain is projected to; the stage of smallest target
        /// order with incoming morphisms from every stage by default.
        #[arg(long)]
        ref_stage: Option<usize>,
    },
    /// Check that commuting with x^n implies commuting with x.
    Centralizer {
        #[arg(long)]
        x: String,
        #[arg(long)]
        n: u32,
    },
    /// Replay the hand-derived fixture facts.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand, Debug)]
enum TowerAction {
    Build,
    Check,
}

#[derive(Subcommand, Debug)]
enum CorpusAction {
    Verify,
    List,
}

fn parse_resume(s: &str) -> Result<ConjugacyState, String> {
    let (r, p) = s.split_once(':').ok_or("expected ROUND:POSITION")?;
    Ok(ConjugacyState {
        round: r.parse().map_err(|e| format!("round: {e}"))?,
        lane_b_position: p.parse().map_err(|e| format!("position: {e}"))?,
    })
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Reduce => "reduce",
            Command::Nf { .. } => "nf",
            Command::Tree { .. } => "tree",
            Command::Quotients { .. } => "quotients",
            Command::Tower { action: TowerAction::Build } => "tower build",
            Command::Tower { action: TowerAction::Check } => "tower check",
            Command::Conjsep { .. } => "conjsep",
            Command::Normalizer { .. } => "normalizer",
            Command::Centralizer { .. } => "centralizer",
            Command::Corpus { action: CorpusAction::Verify } => "corpus verify",
            Command::Corpus { action: CorpusAction::List } => "corpus list",
        }
    }

    fn needs_input(&self) -> bool {
        !matches!(self, Command::Corpus { .. })
    }
}

/// Reads the input document: a file, else a shipped fixture by name.
fn read_input(spec: &str) -> Result<String, String> {
    let path = Path::new(spec);
    if path.exists() {
        return std::fs::read_to_string(path).map_err(|e| format!("cannot read {spec}: {e}"));
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(spec);
    fixtures::DOCUMENTS
        .iter()
        .find(|(name, _)| *name == stem)
        .map(|(_, doc)| doc.to_string())
        .ok_or_else(|| format!("no such file or shipped fixture: {spec}"))
}

/// Why a command stopped early.
enum Stop {
    Input(String),
    Failed(String),
    Budget(String),
}

fn quotient_error(e: QuotientError) -> Stop {
    match e {
        QuotientError::BudgetExceeded { .. } => Stop::Budget(e.to_string()),
        other => Stop::Input(other.to_string()),
    }
}

impl<E: std::fmt::Display> From<E> for Stop {
    fn from(e: E) -> Stop {
        Stop::Input(e.to_string())
    }
}

struct Ctx {
    global: Global,
    exec: Exec,
    document: Option<String>,
}

impl Ctx {
    fn gog(&self) -> Result<GraphOfGroups, Stop> {
        let doc = self.document.as_deref().ok_or_else(|| Stop::Input("--input is required".into()))?;
        let g = gog::parse(doc)?;
        g.ensure_valid()?;
        Ok(g)
    }

    fn fg(&self) -> Result<FundamentalGroup, Stop> {
        Ok(FundamentalGroup::new(&self.gog()?)?)
    }

    fn quotient_options(&self) -> QuotientOptions {
        QuotientOptions { max_order: self.global.max_order, class: self.global.class, exec: self.exec, ..Default::default() }
    }

    fn tower(&self, g: &GraphOfGroups) -> Result<Tower, Stop> {
        let opts = QuotientOptions { vertex_faithful_only: true, ..self.quotient_options() };
        let qs = enumerate_quotients(g, catalog::standard(), &opts).map_err(quotient_error)?;
        Ok(Tower::from_quotients(g, &qs, self.exec))
    }

    /// Parses subgroup generators. Infinite subgroups must be declared
    /// closed unless the quotient class is all finite groups, where every
    /// finitely generated subgroup of these groups is closed.
    fn subgroup(&self, fg: &FundamentalGroup, text: &str) -> Result<SubgroupSpec, Stop> {
        let gens: Vec<NormalForm> = parse_word_list(fg, text)?.iter().map(|w| fg.reduce(w)).collect();
        let spec = classify_subgroup(fg, &gens);
        if !spec.is_finite() && self.global.class != GroupClass::All && !self.global.assume_closed {
            return Err(Stop::Input(format!(
                "<{text}> is infinite and may not be closed in the pro-{} topology; pass --assume-closed",
                match self.global.class {
                    GroupClass::PGroups => "p",
                    GroupClass::Solvable => "solvable",
                    GroupClass::All => "finite",
                }
            )));
        }
        Ok(spec)
    }
}

fn nf(fg: &FundamentalGroup, text: &str) -> Result<NormalForm, Stop> {
    Ok(fg.reduce(&parse_word(fg, text)?))
}

fn labels(s: &Subgroup, t: &bass_serre::group::FiniteGroup) -> String {
    s.elements().iter().map(|&x| t.label(x)).collect::<Vec<_>>().join(", ")
}

fn describe(fg: &FundamentalGroup, s: &SubgroupSpec) -> String {
    match &s.finiteness {
        Finiteness::Finite(e) => format!("finite order={}", e.len()),
        Finiteness::Infinite(w) => format!("infinite witness={}", format_word(fg, w.word())),
        Finiteness::Unknown => "unknown".into(),
    }
}

fn run(cmd: &Command, ctx: &Ctx, r: &mut Report) -> Result<(), Stop> {
    let g = &ctx.global;
    match cmd {
        Command::Validate => {
            let doc = ctx.document.as_deref().ok_or_else(|| Stop::Input("--input is required".into()))?;
            let parsed = match gog::parse(doc) {
                Ok(p) => p,
                Err(e) => {
                    r.line(format!("violation {e}"));
                    r.finish("invalid", Status::Failed);
                    return Ok(());
                }
            };
            let violations = parsed.validate();
            r.line(format!("vertices {}", parsed.vertex_count()));
            r.line(format!("edges {}", parsed.edge_count()));
            r.line(format!("violations {}", violations.len()));
            for v in &violations {
                r.line(format!("violation {v}"));
            }
            if violations.is_empty() {
                r.line(format!("euler {}", parsed.euler_characteristic()));
                r.line(format!("reduced {}", parsed.is_reduced()));
                r.finish("valid", Status::Definite);
            } else {
                r.finish("invalid", Status::Failed);
            }
        }
        Command::Reduce => {
            let gog = ctx.gog()?;
            let fictitious: Vec<&str> =
                (0..gog.edge_count()).filter(|&e| gog.is_fictitious(e)).map(|e| gog.edge(e).name.as_str()).collect();
            r.line(format!("fictitious {}", fictitious.join(" ")).trim_end().to_string());
            let reduced = gog.reduce()?;
            r.line(format!("vertices {} -> {}", gog.vertex_count(), reduced.vertex_count()));
            r.line(format!("edges {} -> {}", gog.edge_count(), reduced.edge_count()));
            r.line("document");
            r.block(&gog::serialize(&reduced));
        }
        Command::Nf { word } => {
            let fg = ctx.fg()?;
            let w = parse_word(&fg, word)?;
            let n = fg.reduce(&w);
            r.line(format!("normal_form {}", format_word(&fg, n.word())));
            r.line(format!("edge_length {}", n.edge_length()));
            r.line(format!("order {}", fg.order_of(&w)?));
        }
        Command::Tree { geodesic, subgroup } => {
            let fg = ctx.fg()?;
            let tree = StandardTree::new(&fg);
            let base = tree.base_vertex();
            if let Some(text) = subgroup {
                let gens: Vec<NormalForm> = parse_word_list(&fg, text)?.iter().map(|w| fg.reduce(w)).collect();
                match tree.minimal_invariant_subtree(&gens, g.budget.unwrap_or(100_000)) {
                    Ok(q) => r.block(&q.format(&tree)),
                    Err(e @ TreeError::OrbitBudgetExceeded { .. }) => {
                        r.line(format!("reason {e}"));
                        r.finish("budget_exceeded", Status::Undecided);
                    }
                    Err(e) => return Err(Stop::Input(e.to_string())),
                }
            } else if let Some(text) = geodesic {
                let h = nf(&fg, text)?;
                let target = tree.act_vertex(&h, &base);
                match tree.geodesic(&base, &target, g.budget.unwrap_or(100_000)) {
                    Ok(p) => {
                        r.line(format!("length {}", p.edges.len()));
                        r.block(&tree.format_patch(&p));
                    }
                    Err(e) => {
                        r.line(format!("reason {e}"));
                        r.finish("budget_exceeded", Status::Undecided);
                    }
                }
            } else {
                let radius = g.depth.unwrap_or(2);
                let p = tree.ball(&base, radius);
                r.line(format!("radius {radius}"));
                r.line(format!("vertices {}", p.vertices.len()));
                r.line(format!("edges {}", p.edges.len()));
                r.line(format!("is_tree {}", p.is_tree()));
                r.block(&tree.format_patch(&p));
            }
        }
        Command::Quotients { vertex_faithful, all_homs } => {
            let gog = ctx.gog()?;
            let mut opts =
                QuotientOptions { vertex_faithful_only: *vertex_faithful, surjective_only: !*all_homs, ..ctx.quotient_options() };
            if let Some(b) = g.budget {
                opts.budget = b;
            }
            let qs = enumerate_quotients(&gog, catalog::standard(), &opts).map_err(quotient_error)?;
            r.line(format!("count {}", qs.len()));
            for q in &qs {
                let rank = q.kernel_rank(&gog).map(|k| k.to_string()).unwrap_or_else(|_| "-".into());
                r.line(format!("quotient {} kernel_rank={rank}", q.format(&gog)));
            }
        }
        Command::Tower { action } => {
            let gog = ctx.gog()?;
            let tower = ctx.tower(&gog)?;
            match action {
                TowerAction::Build => r.block(&tower.to_text()),
                TowerAction::Check => {
                    let mut failures = 0;
                    let squares = tower.check_all_squares(ctx.exec);
                    r.line(format!("squares {}", squares.len()));
                    for ((y, u, z, w), c) in &squares {
                        if !c.holds {
                            failures += 1;
                            r.line(format!("square_fails {y} {u} {z} {w} {}", c.witness.as_deref().unwrap_or("")));
                        }
                    }
                    for (i, s) in tower.stages.iter().enumerate() {
                        if !s.is_reduced() {
                            failures += 1;
                            r.line(format!("stage_not_reduced {i}"));
                        }
                    }
                    let coverage = tower.coverage();
                    r.line(format!("cell_pairs {}", coverage.len()));
                    for (a, b, s) in &coverage {
                        let (a, b) = (gog.cell_name(*a), gog.cell_name(*b));
                        match s {
                            Some(i) => r.line(format!("separated {a} {b} stage {i}")),
                            None => {
                                failures += 1;
                                r.line(format!("unseparated {a} {b}"));
                            }
                        }
                    }
                    r.line(format!("failures {failures}"));
                    if failures > 0 {
                        r.finish("failed", Status::Failed);
                    }
                }
            }
        }
        Command::Conjsep { h1, h2, resume } => {
            let fg = ctx.fg()?;
            let (s1, s2) = (ctx.subgroup(&fg, h1)?, ctx.subgroup(&fg, h2)?);
            r.line(format!("h1 {}", describe(&fg, &s1)));
            r.line(format!("h2 {}", describe(&fg, &s2)));
            let tower = ctx.tower(fg.gog())?;
            let mut schedule = Schedule::default();
            if let Some(b) = g.budget {
                schedule.rounds = b;
            }
            if let Some(d) = g.depth {
                schedule.max_radius = d;
            }
            match decide_conjugacy(&fg, &s1, &s2, &tower, &schedule, resume.clone()) {
                Ok(v) => {
                    let rechecked = match &v {
                        ConjugacyVerdict::Conjugate { witness } => {
                            verify_conjugator(&fg, &s1, &s2, witness, schedule.max_radius)
                        }
                        ConjugacyVerdict::NotConjugate(c) => c.verify(&fg, &s1, &s2),
                    };
                    r.block(&v.format(&fg));
                    r.line(format!("rechecked {rechecked}"));
                    let outcome = match v {
                        ConjugacyVerdict::Conjugate { .. } => "conjugate",
                        ConjugacyVerdict::NotConjugate(_) => "not_conjugate",
                    };
                    r.finish(outcome, if rechecked { Status::Definite } else { Status::Failed });
                }
                Err(DecisionError::BudgetExceeded(s)) => {
                    r.line(format!("resume {}:{}", s.round, s.lane_b_position));
                    r.finish("undecided", Status::Undecided);
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Normalizer { h, ref_stage } => {
            let fg = ctx.fg()?;
            let spec = ctx.subgroup(&fg, h)?;
            let tower = ctx.tower(fg.gog())?;
            if tower.is_empty() {
                return Err(Stop::Failed("the tower has no stages".into()));
            }
            let reference = match ref_stage {
                Some(i) => *i,
                None => (0..tower.len())
                    .filter(|&u| (0..tower.len()).all(|v| tower.morphism(v, u).is_ok()))
                    .min_by_key(|&u| (tower.stages[u].quotient.target.order(), u))
                    .unwrap_or(0),
            };
            let report = normalizer_chain(&fg, &spec, &tower, reference, g.depth.unwrap_or(4))?;
            let t = &tower.stages[reference].quotient.target;
            r.line(format!("h {}", describe(&fg, &spec)));
            r.line(format!("reference {reference} target={}", tower.stages[reference].quotient.name));
            for e in &report.chain {
                r.line(format!(
                    "chain stage={} target={} projected={{{}}} cumulative={{{}}}",
                    e.stage,
                    tower.stages[e.stage].quotient.name,
                    labels(&e.projected, t),
                    labels(&e.cumulative, t)
                ));
            }
            match report.stabilized_at {
                Some(i) => r.line(format!("stabilized_at {i}")),
                None => r.line("stabilized_at none"),
            }
            if let Some(l) = report.limit() {
                r.line(format!("limit {{{}}}", labels(l, t)));
            }
            r.line(format!("discovered {}", report.discovered.len()));
            for (w, img) in &report.discovered {
                r.line(format!("normalizes {} -> {}", format_word(&fg, w.word()), t.label(*img)));
            }
        }
        Command::Centralizer { x, n } => {
            let fg = ctx.fg()?;
            let x = nf(&fg, x)?;
            let tower = ctx.tower(fg.gog())?;
            let c = centralizer_root_check(&fg, &x, *n, &tower, g.depth.unwrap_or(6))?;
            r.line(format!("kernel_stage {} target={}", c.kernel_stage, tower.stages[c.kernel_stage].quotient.name));
            r.line(format!("checked {}", c.checked));
            r.line(format!("commuting_with_power {}", c.commuting_with_power));
            r.line(format!("counterexamples {}", c.counterexamples.len()));
            for w in &c.counterexamples {
                r.line(format!("counterexample {}", format_word(&fg, w.word())));
            }
            for (i, a, b) in &c.stages {
                r.line(format!("stage {i} centralizer_of_power={a} centralizer={b}"));
            }
            if !c.counterexamples.is_empty() {
                r.finish("failed", Status::Failed);
            }
        }
        Command::Corpus { action: CorpusAction::List } => {
            let c = Corpus::standard();
            for f in &c.fixture {
                r.line(format!("fixture {} euler={} reduced={} # {}", f.name, f.euler, f.reduced, f.note));
            }
            for f in &c.normal_form {
                r.line(format!("normal_form {} [{}] = {} # {}", f.fixture, f.word, f.expected, f.note));
            }
            for f in &c.order {
                r.line(format!("order {} [{}] = {} # {}", f.fixture, f.word, f.order, f.note));
            }
            for f in &c.kernel_rank {
                r.line(format!("kernel_rank {} image_order={} rank={} # {}", f.fixture, f.image_order, f.rank, f.note));
            }
            for f in &c.conjugacy {
                r.line(format!("conjugacy {} <{}> <{}> {:?} # {}", f.fixture, f.h1.join(", "), f.h2.join(", "), f.verdict, f.note));
            }
        }
        Command::Corpus { action: CorpusAction::Verify } => {
            let opts = VerifyOptions { max_order: g.max_order, exec: ctx.exec, ..Default::default() };
            let mut results = corpus::verify_all(&Corpus::standard(), &opts);
            results.extend(corpus::random_word_checks(g.seed, g.budget.unwrap_or(200), g.max_order, ctx.exec));
            let failed = results.iter().filter(|c| !c.passed).count();
            for c in &results {
                r.line(c.line());
            }
            r.line(format!("checks {} failed {failed}", results.len()));
            if failed > 0 {
                r.finish("failed", Status::Failed);
            }
        }
    }
    Ok(())
}

fn configure_jobs(jobs: usize) -> Exec {
    match jobs {
        1 => Exec::Sequential,
        0 => Exec::default(),
        _n => {
            #[cfg(feature = "parallel")]
            {
                // a second call fails harmlessly if the pool already exists
                let _ = rayon::ThreadPoolBuilder::new().num_threads(_n).build_global();
            }
            Exec::default()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let exec = configure_jobs(cli.global.jobs);
    let raw: Vec<String> = std::env::args().skip(1).collect();
    let document = match (&cli.global.input, cli.command.needs_input()) {
        (Some(spec), true) => match read_input(spec) {
            Ok(d) => Some(d),
            Err(e) => {
                let mut r = Report::new(cli.command.name(), report::digest(None, &report::normalized_args(&raw)));
                r.error(e);
                print!("{}", r.render());
                return r.status.into();
            }
        },
        _ => None,
    };
    let digest = report::digest(document.as_deref(), &report::normalized_args(&raw));
    let mut r = Report::new(cli.command.name(), digest);
    let ctx = Ctx { global: cli.global.clone(), exec, document };
    match run(&cli.command, &ctx, &mut r) {
        Ok(()) => {}
        Err(Stop::Input(e)) => r.error(e),
        Err(Stop::Failed(e)) => {
            r.line(format!("reason {e}"));
            r.finish("failed", Status::Failed);
        }
        Err(Stop::Budget(e)) => {
            r.line(format!("reason {e}"));
            r.finish("budget_exceeded", Status::Undecided);
        }
    }
    if cli.global.timings {
        r.line(format!("timing total_ms {}", started.elapsed().as_millis()));
    }
    print!("{}", r.render());
    r.status.into()
}
