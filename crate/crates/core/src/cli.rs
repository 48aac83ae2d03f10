//! Command-line surface. Every command prints a human report followed by a
//! flat `key = value` block; the exit status is 0 iff every verdict passes.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::adjunction::{adjunction_bijection_check, counit, cover_system, hom_presheaf, HomPresheaf};
use crate::algebra::{two, EventAlgebra};
use crate::blocks::{find_isomorphism, maximal_boolean_subalgebras};
use crate::classifier::{
    build_omega, classifier_check, omega_classes, subobject, subobjects, truth_sweep, valuate_scenario, Reduction,
};
use crate::colimit::build_colimit;
use crate::corpus;
use crate::dot::{emit_dot, emit_omega_dot};
use crate::format::{parse_document, serialize_algebra, serialize_morphism, Document, ParseError};
use crate::localization::{cocycle_suite, generate_system, is_localization_system};
use crate::morphism::{enumerate_homomorphisms, two_valued_homomorphisms, MorphismKind};
use crate::site::{default_site, single_object_site, site_from_raw, yoneda, BooleanSite, Presheaf};

#[derive(Debug, Parser)]
#[command(name = "qlogic", version, about = "Finite quantum event algebras, sites, colimits and Ω")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// `default`, `saturated`, `single`, or a file with an `@site` section
    #[arg(long, default_value = "default")]
    site: String,
    /// Directory for the report and emitted artifacts
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write a Graphviz diagram here
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Refuse algebras larger than this
    #[arg(long, default_value_t = 64)]
    max_elements: usize,
    /// Algebra to use when the file holds several (default: the first)
    #[arg(long)]
    algebra: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate every algebra, hom and site in a file
    Validate {
        file: String,
        #[command(flatten)]
        common: Common,
    },
    /// Maximal Boolean subalgebras
    Blocks {
        file: String,
        #[command(flatten)]
        common: Common,
    },
    /// Homomorphisms from FILE's algebra into TARGET (`2` for the two-element algebra)
    Homs {
        file: String,
        target: String,
        #[arg(long, default_value = "quantum")]
        kind: MorphismKind,
        #[command(flatten)]
        common: Common,
    },
    /// Objects and arrows of a site
    Site {
        file: String,
        #[command(flatten)]
        common: Common,
    },
    /// Colimit of a presheaf: `covers`, `hom` or `yoneda:OBJECT`
    Colimit {
        file: String,
        #[arg(long, default_value = "covers")]
        presheaf: String,
        #[command(flatten)]
        common: Common,
    },
    /// Counit verdict for the site's covers
    Counit {
        file: String,
        #[command(flatten)]
        common: Common,
    },
    /// Nat(P, R(L)) against Hom(LP, L)
    AdjunctionCheck {
        file: String,
        #[arg(long, default_value = "hom")]
        presheaf: String,
        #[command(flatten)]
        common: Common,
    },
    /// Generate a prelocalization system and test it
    Localize {
        file: String,
        /// `inclusions`, `all`, `none` or an object name; repeatable
        #[arg(long = "generator", default_value = "inclusions")]
        generators: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Cocycle laws on the monic covers of the site
    Cocycle {
        file: String,
        #[command(flatten)]
        common: Common,
    },
    /// Subobjects of the algebra
    Subobjects {
        file: String,
        #[command(flatten)]
        common: Common,
    },
    /// The truth-values object over the site
    Omega {
        file: String,
        #[command(flatten)]
        common: Common,
    },
    /// Subobject classifier check
    Classify {
        file: String,
        #[command(flatten)]
        common: Common,
    },
    /// Truth criterion over every (φ, b) of the site
    Truth {
        file: String,
        #[command(flatten)]
        common: Common,
    },
    /// Valuation of P (and P → Q) under an apparatus subobject of a Boolean context
    Scenario {
        file: String,
        #[arg(long, value_delimiter = ',', required = true)]
        apparatus: Vec<String>,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Two-valued homomorphisms
    KsSearch {
        file: String,
        /// Expected count
        #[arg(long)]
        expect: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub command: String,
    pub lines: Vec<String>,
    pub keys: Vec<(String, String)>,
    pub verdicts: Vec<(String, bool)>,
    pub artifacts: Vec<PathBuf>,
}

impl RunReport {
    fn new(command: &str) -> Self {
        RunReport { command: command.to_string(), ..Default::default() }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn key(&mut self, k: impl Into<String>, v: impl ToString) {
        self.keys.push((k.into(), v.to_string()));
    }

    fn verdict(&mut self, k: impl Into<String>, v: bool) {
        self.verdicts.push((k.into(), v));
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.1)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for l in &self.lines {
            writeln!(s, "{l}").unwrap();
        }
        writeln!(s).unwrap();
        writeln!(s, "command = {}", self.command).unwrap();
        for (k, v) in &self.keys {
            writeln!(s, "{k} = {v}").unwrap();
        }
        for (k, v) in &self.verdicts {
            writeln!(s, "verdict.{k} = {v}").unwrap();
        }
        for a in &self.artifacts {
            writeln!(s, "artifact = {}", a.display()).unwrap();
        }
        s
    }
}

/// Outcome of one invocation: exit status, standard output, standard error.
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(cli.command) {
        Ok(report) => {
            Outcome { code: if report.passed() { 0 } else { 1 }, stdout: report.render(), stderr: String::new() }
        }
        Err(e) => Outcome { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn read_source(file: &str) -> Result<String, CliError> {
    match std::fs::read_to_string(file) {
        Ok(t) => Ok(t),
        Err(e) => {
            let bundled = Path::new(file).file_name().and_then(|n| n.to_str()).and_then(corpus::text);
            match bundled {
                Some(t) if !Path::new(file).exists() => Ok(t.to_string()),
                _ => Err(CliError::Io(format!("{file}: {e}"))),
            }
        }
    }
}

fn load_document(file: &str) -> Result<Document, CliError> {
    parse_document(&read_source(file)?).map_err(|e| CliError::Input(format!("{file}: {e}")))
}

fn pick(doc: &Document, file: &str, c: &Common) -> Result<Arc<EventAlgebra>, CliError> {
    let l = match &c.algebra {
        Some(n) => doc.algebra(n).cloned().ok_or_else(|| CliError::Input(format!("{file}: no algebra `{n}`")))?,
        None => {
            doc.algebras.first().cloned().ok_or_else(|| CliError::Input(format!("{file}: no `@algebra` section")))?
        }
    };
    if l.len() > c.max_elements {
        return Err(CliError::Usage(format!(
            "algebra `{}` has {} elements, above --max-elements {}",
            l.name(),
            l.len(),
            c.max_elements
        )));
    }
    Ok(l)
}

fn load_algebra(file: &str, c: &Common) -> Result<Arc<EventAlgebra>, CliError> {
    pick(&load_document(file)?, file, c)
}

fn site_for(l: &Arc<EventAlgebra>, c: &Common) -> Result<Arc<BooleanSite>, CliError> {
    let site = match c.site.as_str() {
        "default" => default_site(l),
        "saturated" => default_site(l).saturated(),
        "single" => single_object_site(l).map_err(|e| CliError::Input(e.to_string()))?,
        file => {
            let doc = load_document(file)?;
            let raw = doc
                .sites
                .iter()
                .find(|s| s.over == l.name())
                .or(doc.sites.first())
                .ok_or_else(|| CliError::Input(format!("{file}: no `@site` section")))?;
            site_from_raw(raw, l).map_err(|e| CliError::Input(format!("{file}: {e}")))?
        }
    };
    Ok(Arc::new(site))
}

fn names(l: &EventAlgebra, xs: impl IntoIterator<Item = usize>) -> String {
    xs.into_iter().map(|x| l.name_of(x)).collect::<Vec<_>>().join(",")
}

fn element(l: &EventAlgebra, id: &str) -> Result<usize, CliError> {
    l.index_of(id).map_err(|e| CliError::Input(e.to_string()))
}

fn write_artifact(report: &mut RunReport, path: PathBuf, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    report.artifacts.push(path);
    Ok(())
}

fn finish(
    mut report: RunReport,
    c: &Common,
    artifacts: &[(&str, String)],
    dot: Option<String>,
) -> Result<RunReport, CliError> {
    if let (Some(path), Some(d)) = (&c.dot, dot) {
        write_artifact(&mut report, path.clone(), &d)?;
    }
    if let Some(dir) = &c.out {
        for (name, text) in artifacts {
            write_artifact(&mut report, dir.join(name), text)?;
        }
        let path = dir.join("report.txt");
        report.artifacts.push(path.clone());
        std::fs::write(&path, report.render()).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(report)
}

/// `covers`, `hom` or `yoneda:OBJECT`.
fn choose_presheaf(which: &str, site: &Arc<BooleanSite>, l: &Arc<EventAlgebra>) -> Result<Arc<Presheaf>, CliError> {
    match which {
        "covers" => Ok(cover_system(site, l).presheaf().clone()),
        "hom" => Ok(hom_presheaf(site, l).presheaf().clone()),
        _ => {
            let Some(obj) = which.strip_prefix("yoneda:") else {
                return Err(CliError::Usage(format!("unknown presheaf `{which}`; use covers, hom or yoneda:OBJECT")));
            };
            let o = site.object_index(obj).map_err(|e| CliError::Input(e.to_string()))?;
            Ok(Arc::new(yoneda(site, o).map_err(|e| CliError::Input(e.to_string()))?))
        }
    }
}

fn execute(command: Command) -> Result<RunReport, CliError> {
    match command {
        Command::Validate { file, common } => validate(&file, &common),
        Command::Blocks { file, common } => {
            let l = load_algebra(&file, &common)?;
            let mut r = RunReport::new("blocks");
            let blocks = maximal_boolean_subalgebras(&l);
            let mut covered = BTreeSet::new();
            for b in &blocks {
                covered.extend(b.image());
                r.line(format!("{} {{{}}}", b.source().name(), names(&l, b.image())));
            }
            r.key("blocks.count", blocks.len());
            r.verdict("blocks.boolean", blocks.iter().all(|b| b.source().is_boolean()));
            r.verdict("blocks.cover", covered.len() == l.len());
            let text: String = blocks.iter().map(|b| serialize_algebra(b.source())).collect::<Vec<_>>().join("\n");
            finish(r, &common, &[("blocks.qea", text)], None)
        }
        Command::Homs { file, target, kind, common } => {
            let l = load_algebra(&file, &common)?;
            let t = if target == "2" {
                Arc::new(two())
            } else {
                load_algebra(&target, &Common { algebra: None, ..common.clone() })?
            };
            let homs = enumerate_homomorphisms(&l, &t, kind);
            let mut r = RunReport::new("homs");
            for h in &homs {
                let g: Vec<String> = h.graph().iter().map(|(a, b)| format!("{a}↦{b}")).collect();
                r.line(format!("{} {}", h.name(), g.join(" ")));
            }
            r.key("homs.kind", kind);
            r.key("homs.count", homs.len());
            let text = homs.iter().map(serialize_morphism).collect::<Vec<_>>().join("\n");
            finish(r, &common, &[("homs.qea", text)], None)
        }
        Command::Site { file, common } => {
            let l = load_algebra(&file, &common)?;
            let site = site_for(&l, &common)?;
            let mut r = RunReport::new("site");
            for o in site.objects() {
                r.line(format!("object {} ({} elements)", o.name, o.algebra.len()));
            }
            for a in site.arrows() {
                r.line(format!("arrow {}: {} → {}", a.name, site.object(a.source).name, site.object(a.target).name));
            }
            r.key("site.name", site.name());
            r.key("site.objects", site.objects().len());
            r.key("site.arrows", site.arrows().len());
            r.verdict("site.coefficient_functor", site.check_coefficient_functor().is_ok());
            finish(r, &common, &[], None)
        }
        Command::Colimit { file, presheaf, common } => {
            let l = load_algebra(&file, &common)?;
            let site = site_for(&l, &common)?;
            let p = choose_presheaf(&presheaf, &site, &l)?;
            let mut r = RunReport::new("colimit");
            r.key("colimit.presheaf", p.name());
            r.key(
                "colimit.pairs",
                p.site()
                    .objects()
                    .iter()
                    .enumerate()
                    .map(|(o, ob)| p.sections(o).len() * ob.algebra.len())
                    .sum::<usize>(),
            );
            match build_colimit(&p) {
                Ok(c) => {
                    let q = c.quotient();
                    for k in 0..q.class_count() {
                        r.line(format!("{} ({} pairs)", q.labels()[k], q.members(k).count()));
                    }
                    r.key("colimit.classes", q.class_count());
                    r.verdict("colimit.algebra", true);
                    let against = match presheaf.strip_prefix("yoneda:") {
                        Some(obj) => site.algebra(site.object_index(obj).unwrap()).clone(),
                        None => l.clone(),
                    };
                    r.key("colimit.iso_to", against.name());
                    r.verdict("colimit.iso", find_isomorphism(c.algebra(), &against).is_some());
                    let text = serialize_algebra(c.algebra());
                    let dot = emit_dot(c.algebra());
                    finish(r, &common, &[("colimit.qea", text)], Some(dot))
                }
                Err(e) => {
                    r.line(e.to_string());
                    if let Some(ax) = e.axiom() {
                        r.key("colimit.failed_axiom", ax);
                    }
                    r.verdict("colimit.algebra", false);
                    finish(r, &common, &[], None)
                }
            }
        }
        Command::Counit { file, common } => {
            let l = load_algebra(&file, &common)?;
            let site = site_for(&l, &common)?;
            let mut r = RunReport::new("counit");
            let c = counit(&l, &site).map_err(|e| CliError::Input(e.to_string()))?;
            r.line(format!("LR({}) has {} classes; {} has {}", l.name(), c.colimit.algebra().len(), l.name(), l.len()));
            if !c.missed.is_empty() {
                r.line(format!("not in the image: {}", c.missed.join(",")));
                r.key("counit.missed", c.missed.join(","));
            }
            r.verdict("counit.injective", c.injective);
            r.verdict("counit.surjective", c.surjective);
            r.verdict("counit.structure_preserving", c.structure_preserving);
            r.verdict("counit.iso", c.is_iso());
            finish(r, &common, &[], None)
        }
        Command::AdjunctionCheck { file, presheaf, common } => {
            let l = load_algebra(&file, &common)?;
            let site = site_for(&l, &common)?;
            let p = choose_presheaf(&presheaf, &site, &l)?;
            let a = adjunction_bijection_check(&p, &l).map_err(|e| CliError::Input(e.to_string()))?;
            let mut r = RunReport::new("adjunction-check");
            r.line(format!(
                "|Nat({}, R({}))| = {}, |Hom(L{}, {})| = {}",
                p.name(),
                l.name(),
                a.nat_count,
                p.name(),
                l.name(),
                a.hom_count
            ));
            r.key("adjunction.nat", a.nat_count);
            r.key("adjunction.hom", a.hom_count);
            r.key("adjunction.degenerate", a.degenerate);
            r.verdict("adjunction.bijection", a.holds());
            finish(r, &common, &[], None)
        }
        Command::Localize { file, generators, common } => {
            let l = load_algebra(&file, &common)?;
            let site = site_for(&l, &common)?;
            let base = Arc::new(hom_presheaf(&site, &l));
            let mut gens = vec![];
            for g in &generators {
                match g.as_str() {
                    "none" => {}
                    "all" => gens.extend(
                        (0..site.objects().len()).flat_map(|o| (0..base.section_count(o)).map(move |s| (o, s))),
                    ),
                    "inclusions" => gens.extend((0..site.objects().len()).filter_map(|o| {
                        site.object(o).embedding.as_ref().and_then(|e| base.find_section(o, e)).map(|s| (o, s))
                    })),
                    obj => {
                        let o = site.object_index(obj).map_err(|e| CliError::Input(e.to_string()))?;
                        let emb = site.object(o).embedding.clone().unwrap_or_default();
                        let s = base
                            .find_section(o, &emb)
                            .ok_or_else(|| CliError::Input(format!("{obj} has no inclusion cover")))?;
                        gens.push((o, s));
                    }
                }
            }
            let s = generate_system(&base, &gens).map_err(|e| CliError::Input(e.to_string()))?;
            let rep = is_localization_system(&s);
            let mut r = RunReport::new("localize");
            for c in s.covers() {
                r.line(format!("cover {}", s.cover_name(c)));
            }
            for (a, b, ok) in rep.pairwise.iter().filter(|p| !p.2) {
                r.line(format!("incompatible: {a} × {b} ({ok})"));
            }
            r.line(match (&rep.counit, &rep.counit_error) {
                (Some(c), _) if !c.missed.is_empty() => format!("restricted counit misses {}", c.missed.join(",")),
                (_, Some(e)) => format!("restricted counit: {e}"),
                _ => "restricted counit computed".to_string(),
            });
            r.key("localization.covers", s.covers().len());
            r.verdict("localization.ideal", s.is_ideal());
            r.verdict("localization.compatible", rep.compatible());
            r.verdict("localization.cocycles", rep.cocycles.holds());
            r.verdict("localization.counit_iso", rep.counit_iso());
            finish(r, &common, &[], None)
        }
        Command::Cocycle { file, common } => {
            let l = load_algebra(&file, &common)?;
            let site = site_for(&l, &common)?;
            let covers = cover_system(&site, &l);
            let monic = monic_covers(&covers);
            let rep = cocycle_suite(&covers, &monic).map_err(|e| CliError::Input(e.to_string()))?;
            let mut r = RunReport::new("cocycle");
            for f in &rep.failures {
                r.line(f.clone());
            }
            r.key("cocycle.covers", rep.covers);
            r.key("cocycle.triples", rep.triples_checked);
            r.verdict("cocycle.identity", rep.identity);
            r.verdict("cocycle.inverse", rep.inverse);
            r.verdict("cocycle.triple", rep.triple);
            finish(r, &common, &[], None)
        }
        Command::Subobjects { file, common } => {
            let l = load_algebra(&file, &common)?;
            let subs = subobjects(&l);
            let mut r = RunReport::new("subobjects");
            for s in &subs {
                r.line(format!("{} {{{}}}", s.label, names(&l, s.elements.iter().copied())));
            }
            r.key("subobjects.count", subs.len());
            finish(r, &common, &[], None)
        }
        Command::Omega { file, common } => {
            let l = load_algebra(&file, &common)?;
            let site = site_for(&l, &common)?;
            let classes = omega_classes(&site).map_err(|e| CliError::Input(e.to_string()))?;
            let mut r = RunReport::new("omega");
            for k in 0..classes.len() {
                let mark = if k == classes.true_class() {
                    " (true)"
                } else if classes.is_true(k) {
                    " (in truth region)"
                } else {
                    ""
                };
                r.line(format!("{}{mark}", classes.label(k)));
            }
            r.key("omega.site", site.name());
            r.key("omega.classes", classes.len());
            r.key("omega.true", classes.label(classes.true_class()));
            r.verdict("omega.truth_coherent", classes.truth_coherent());
            match classes.structure() {
                Ok(alg) => {
                    r.verdict("omega.algebra", true);
                    let omega = build_omega(&site).map_err(|e| CliError::Input(e.to_string()))?;
                    let text = serialize_algebra(alg);
                    finish(r, &common, &[("omega.qea", text)], Some(emit_omega_dot(&omega)))
                }
                Err(e) => {
                    r.line(e.to_string());
                    r.key("omega.failed_axiom", e.axiom().unwrap_or("none"));
                    r.verdict("omega.algebra", false);
                    finish(r, &common, &[], None)
                }
            }
        }
        Command::Classify { file, common } => {
            let l = load_algebra(&file, &common)?;
            let site = site_for(&l, &common)?;
            let rep = classifier_check(&l, &site).map_err(|e| CliError::Input(e.to_string()))?;
            let mut r = RunReport::new("classify");
            for s in &rep.squares {
                let mut line = format!("{}: pullback {} ({} cones)", s.subobject, s.holds(), s.cones_checked);
                if let Some(w) = &s.witness {
                    write!(line, "; {w}").unwrap();
                }
                r.line(line);
            }
            r.key("classifier.subobjects", rep.subobject_count);
            r.key("classifier.homs", rep.hom_count);
            r.key("classifier.classifying", rep.classifying.len());
            r.verdict(
                "classifier.bijection",
                rep.injective && rep.surjective && rep.subobject_count == rep.classifying.len(),
            );
            r.verdict("classifier.pullbacks", rep.squares.iter().all(|s| s.holds()));
            r.verdict("classifier.round_trip", rep.round_trip);
            finish(r, &common, &[], None)
        }
        Command::Truth { file, common } => {
            let l = load_algebra(&file, &common)?;
            let site = site_for(&l, &common)?;
            let sw = truth_sweep(&l, &site).map_err(|e| CliError::Input(e.to_string()))?;
            let mut r = RunReport::new("truth");
            for m in sw.mismatches.iter().chain(&sw.pasting_mismatches) {
                r.line(format!("mismatch: {m}"));
            }
            r.line(format!("{} truth values and {} pasted values checked", sw.checked, sw.pasting_checked));
            r.key("truth.checked", sw.checked);
            r.key("truth.pasting_checked", sw.pasting_checked);
            r.verdict("truth.criterion", sw.mismatches.is_empty());
            r.verdict("truth.pasting", sw.pasting_mismatches.is_empty());
            finish(r, &common, &[], None)
        }
        Command::Scenario { file, apparatus, p, q, common } => {
            let l = load_algebra(&file, &common)?;
            let app = apparatus.iter().map(|a| element(&l, a)).collect::<Result<Vec<_>, _>>()?;
            let mut app_full = l.subalgebra_closure(&app);
            app_full.sort_unstable();
            let pi = element(&l, &p)?;
            let qi = q.as_deref().map(|q| element(&l, q)).transpose()?;
            let app_sub = subobject(&l, &app_full).map_err(|e| CliError::Input(e.to_string()))?;
            let rep = valuate_scenario(&l, &app_sub.elements, pi, qi).map_err(|e| CliError::Input(e.to_string()))?;
            let mut r = RunReport::new("scenario");
            r.line(format!("apparatus {} {{{}}}", app_sub.label, names(&l, app_sub.elements.iter().copied())));
            r.line(format!("{}⊗{} = {}", app_sub.label, rep.proposition, rep.truth));
            r.key("scenario.proposition", &rep.proposition);
            r.key("scenario.truth", &rep.truth);
            if let Some((imp, top)) = &rep.implication {
                r.line(format!("{p} → {} = {imp}", q.as_deref().unwrap_or("")));
                r.key("scenario.implication", imp);
                r.key("scenario.implication_maximal", top);
            }
            match &rep.reduction {
                Reduction::Ultrafilter { atom, valuation } => {
                    r.line(format!("ultrafilter at {atom}"));
                    for (x, v) in valuation {
                        r.line(format!("  {x} ↦ {}", u8::from(*v)));
                    }
                    r.key("scenario.reduction", format!("ultrafilter:{atom}"));
                    let ones: Vec<&str> = valuation.iter().filter(|v| v.1).map(|v| v.0.as_str()).collect();
                    r.key("scenario.reduction.true", ones.join(","));
                }
                Reduction::NotApplicable(why) => {
                    r.line(format!("no two-valued reduction: {why}"));
                    r.key("scenario.reduction", "not-applicable");
                }
            }
            finish(r, &common, &[], None)
        }
        Command::KsSearch { file, expect, common } => {
            let l = load_algebra(&file, &common)?;
            let homs = two_valued_homomorphisms(&l);
            let mut r = RunReport::new("ks-search");
            for h in &homs {
                let ones = l.elements().filter(|&x| h.apply(x) != h.target().zero());
                r.line(format!("{} true on {{{}}}", h.name(), names(&l, ones)));
            }
            if homs.is_empty() {
                r.line(format!("{} admits no two-valued homomorphism", l.name()));
            }
            r.key("ks.two_valued", homs.len());
            r.key("ks.state_free", homs.is_empty());
            if let Some(n) = expect {
                r.verdict("ks.expected", homs.len() == n);
            }
            finish(r, &common, &[], None)
        }
    }
}

fn monic_covers(covers: &HomPresheaf) -> Vec<(usize, usize)> {
    (0..covers.site().objects().len())
        .flat_map(|o| (0..covers.section_count(o)).map(move |s| (o, s)))
        .filter(|&(o, s)| {
            let m = covers.section_map(o, s);
            m.iter().collect::<BTreeSet<_>>().len() == m.len()
        })
        .collect()
}

fn validate(file: &str, common: &Common) -> Result<RunReport, CliError> {
    let text = read_source(file)?;
    let mut r = RunReport::new("validate");
    match parse_document(&text) {
        Ok(doc) => {
            for l in &doc.algebras {
                let b = if l.is_boolean() { "Boolean" } else { "not Boolean" };
                r.line(format!("algebra {}: valid, {} elements, {b}, {} atoms", l.name(), l.len(), l.atoms().len()));
                r.key(format!("algebra.{}.elements", l.name()), l.len());
                r.key(format!("algebra.{}.boolean", l.name()), l.is_boolean());
                if l.len() > common.max_elements {
                    return Err(CliError::Usage(format!(
                        "algebra `{}` exceeds --max-elements {}",
                        l.name(),
                        common.max_elements
                    )));
                }
            }
            for h in &doc.homs {
                r.line(format!("hom {}: {} → {}, {}", h.name(), h.source().name(), h.target().name(), h.kind()));
            }
            for s in &doc.sites {
                let ok = doc.algebra(&s.over).map(|l| site_from_raw(s, l));
                match ok {
                    Some(Ok(site)) => r.line(format!(
                        "site {}: {} objects, {} arrows",
                        s.name,
                        site.objects().len(),
                        site.arrows().len()
                    )),
                    Some(Err(e)) => {
                        r.line(format!("site {}: {e}", s.name));
                        r.verdict(format!("site.{}", s.name), false);
                    }
                    None => {
                        r.line(format!("site {}: unknown algebra `{}`", s.name, s.over));
                        r.verdict(format!("site.{}", s.name), false);
                    }
                }
            }
            r.verdict("valid", true);
        }
        Err(e) => {
            r.line(format!("{file}: {e}"));
            match &e {
                ParseError::Axiom { violation, .. } => {
                    r.key("violation.axiom", violation.axiom());
                    r.key("violation.witnesses", violation.witnesses().join(","));
                }
                ParseError::Morphism { violation, .. } => {
                    r.key("violation.condition", violation.condition().map_or("total", |c| c.id()));
                }
                ParseError::Syntax { line, col, .. } => r.key("violation.syntax", format!("{line}:{col}")),
            }
            r.verdict("valid", false);
        }
    }
    finish(r, common, &[], None)
}
