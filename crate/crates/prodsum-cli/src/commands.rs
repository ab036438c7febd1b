//! The pipelines behind each subcommand. Every pipeline returns a
//! [`RunReport`] whose content depends only on the inputs, the seed, and the
//! budget, so renders are reproducible byte for byte.

use crate::dsl::{self, Decl, SpecFile, TermAst};
use crate::runreport::{GoalStatus, RunReport};
use prodsum_core::biproduct::{build_biproduct, sum_via_biproduct};
use prodsum_core::chase::{prove_with, ProofStatus, ProveConfig};
use prodsum_core::coring::{
    check_coring, frobenius_search, product_coproduct_verdict, Coring, CoringError, FamilySize,
    FiniteRing, FrobeniusOutcome, FrobeniusSystem, RElem, SearchConfig,
};
use prodsum_core::model::{
    check_enrichment, evaluate, resolve_carrier, CategoryModel, EnrichmentConfig, ModelBinding,
};
use prodsum_core::models::finab::{FinAb, FinAbObj};
use prodsum_core::models::lattice::{
    check_idempotent_addition, completed_family_demo, indexed_biproduct_check, invertible_homs,
    small_catalog, ConeCheckConfig, Lattice, LatticeObj,
};
use prodsum_core::swindle::{
    build_swindle_presentation, check_truncated, derive_key_identities, finiteness_verdict,
    no_invertible_verdict, truncated_swindle, verify_diagrams, Hypothesis, IndexMode, InvertibleF,
    ModelKind, SwindlePresentation,
};
use prodsum_core::term::{MorTerm, ObjectKind, ObjectRef};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{path}: {err}")]
    ParseFile { path: String, err: dsl::ParseError },
    #[error("{0}")]
    Build(#[from] dsl::BuildError),
    #[error("{path}: {err}")]
    JsonFile { path: String, err: serde_json::Error },
    #[error("{0}")]
    Core(String),
    #[error("{0}")]
    Usage(String),
}

fn core_err(e: impl std::fmt::Display) -> CliError {
    CliError::Core(e.to_string())
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Default proof budget when neither flag nor environment provides one.
pub const DEFAULT_PROVE_BUDGET: u64 = 10_000;
/// Default candidate bound for the Frobenius search.
pub const DEFAULT_SEARCH_BOUND: u64 = 4096;
/// Default seed shared by every randomized check.
pub const DEFAULT_SEED: u64 = 24601;

/// The flag wins over the `PRODSUM_BUDGET` environment variable, which wins
/// over the given default.
pub fn resolve_budget(flag: Option<u64>, default: u64) -> u64 {
    flag.or_else(|| std::env::var("PRODSUM_BUDGET").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(default)
}

fn parse_model_kind(s: &str) -> Result<ModelKind, CliError> {
    s.parse::<ModelKind>().map_err(|e| usage(e.to_string()))
}

fn read_spec_file(path: &str) -> Result<SpecFile, CliError> {
    let text = std::fs::read_to_string(path)?;
    dsl::parse_spec(&text).map_err(|err| CliError::ParseFile { path: path.into(), err })
}

fn prove_goal(
    report: &mut RunReport,
    label: &str,
    lhs: &MorTerm,
    rhs: &MorTerm,
    pres: &prodsum_core::chase::Presentation,
    cfg: &ProveConfig,
) {
    let res = match prove_with(lhs, rhs, pres, cfg) {
        Ok(r) => r,
        Err(e) => {
            report.push(label, GoalStatus::Failed, e.to_string(), 0);
            return;
        }
    };
    let steps = res.steps_used as u64;
    match res.status {
        ProofStatus::Proved => report.push(label, GoalStatus::Proved, "", steps),
        ProofStatus::Disproved { witness } => {
            let assignment = witness
                .iter()
                .map(|(k, v)| format!("{k} = {v}"))
                .collect::<Vec<_>>()
                .join(", ");
            report.push(
                label,
                GoalStatus::Failed,
                format!("fails at index assignment {{{assignment}}}"),
                steps,
            );
        }
        ProofStatus::Unknown { reason } => report.push(label, GoalStatus::Failed, reason, steps),
    }
}

// ---------------------------------------------------------------------------
// chase prove
// ---------------------------------------------------------------------------

pub fn chase_prove(path: &str, seed: u64, budget: u64) -> Result<RunReport, CliError> {
    let spec = read_spec_file(path)?;
    let built = dsl::build_spec(&spec)?;
    let cfg = ProveConfig::with_budget(budget as usize);
    let mut report = RunReport::new("chase prove", Some(path.to_string()), seed, budget);

    if let Some(binding) = &built.finab {
        finab_binding_goals(&built.objects, binding, &mut report);
    }
    if let Some(table) = &built.lattice {
        lattice_binding_goals(&built.objects, table, &mut report);
    }

    for goal in &built.goals {
        prove_goal(&mut report, &goal.label, &goal.lhs, &goal.rhs, &built.presentation, &cfg);
    }

    if let Some(binding) = &built.finab {
        for goal in &built.goals {
            let empty = BTreeMap::new();
            let lhs = evaluate(&FinAb, binding, &goal.lhs, &empty);
            let rhs = evaluate(&FinAb, binding, &goal.rhs, &empty);
            if let (Ok(l), Ok(r)) = (lhs, rhs) {
                let same = FinAb.equal(&l, &r);
                report.push(
                    format!("model check: {}", goal.label),
                    if same { GoalStatus::Verified } else { GoalStatus::Failed },
                    if same { "both sides evaluate to the same matrix" } else { "the sides evaluate to different matrices" },
                    1,
                );
            }
        }
    }

    report.finalize();
    Ok(report)
}

/// Each declared composite object with a bound carrier must agree with the
/// biproduct of its bound parts.
fn finab_binding_goals(
    objects: &BTreeMap<String, ObjectRef>,
    binding: &ModelBinding<FinAb>,
    report: &mut RunReport,
) {
    for (name, obj) in objects {
        let parts = match &obj.kind {
            ObjectKind::Product(parts) | ObjectKind::Coproduct(parts) => parts,
            _ => continue,
        };
        let Some(bound) = binding.objects.get(name) else { continue };
        let carriers: Result<Vec<FinAbObj>, _> =
            parts.iter().map(|p| resolve_carrier(&FinAb, binding, p)).collect();
        let Ok(carriers) = carriers else { continue };
        let want = FinAb.biproduct(&carriers).object;
        let same = *bound == want;
        report.push(
            format!("binding: {name} is the biproduct of its parts"),
            if same { GoalStatus::Verified } else { GoalStatus::Failed },
            if same {
                String::new()
            } else {
                format!("bound carrier differs from the biproduct of the parts of {name}")
            },
            1,
        );
    }
}

fn lattice_binding_goals(
    objects: &BTreeMap<String, ObjectRef>,
    table: &BTreeMap<String, LatticeObj>,
    report: &mut RunReport,
) {
    for (name, obj) in objects {
        let parts = match &obj.kind {
            ObjectKind::Product(parts) | ObjectKind::Coproduct(parts) => parts,
            _ => continue,
        };
        let Some(bound) = table.get(name) else { continue };
        let carriers: Option<Vec<LatticeObj>> =
            parts.iter().map(|p| table.get(&p.name).cloned()).collect();
        let Some(carriers) = carriers else { continue };
        let want = Lattice.biproduct(&carriers).object;
        let same = *bound == want;
        report.push(
            format!("binding: {name} is the biproduct of its parts"),
            if same { GoalStatus::Verified } else { GoalStatus::Failed },
            if same {
                String::new()
            } else {
                format!("bound carrier differs from the biproduct of the parts of {name}")
            },
            1,
        );
    }
}

// ---------------------------------------------------------------------------
// swindle run
// ---------------------------------------------------------------------------

fn swindle_object_table(sp: &SwindlePresentation) -> BTreeMap<String, ObjectRef> {
    let o = &sp.objects;
    let mut table = BTreeMap::new();
    for obj in [&o.a, &o.p, &o.c, &o.pp, &o.cc, &o.ap, &o.ac, &o.aa] {
        table.insert(obj.name.clone(), obj.clone());
    }
    if let Some(b) = &o.b {
        table.insert(b.name.clone(), b.clone());
    }
    table
}

pub fn swindle_run(
    path: &str,
    seed: u64,
    budget: u64,
    truncate: Option<&str>,
) -> Result<RunReport, CliError> {
    let spec = read_spec_file(path)?;
    let mut flags = Vec::new();
    let mut goal_asts: Vec<(&TermAst, &TermAst)> = Vec::new();
    for decl in &spec.decls {
        match decl {
            Decl::Hypothesis { flag } => {
                if !dsl::KNOWN_HYPOTHESES.contains(&flag.as_str()) {
                    return Err(usage(format!(
                        "unknown hypothesis `{flag}`; known flags: {}",
                        dsl::KNOWN_HYPOTHESES.join(", ")
                    )));
                }
                flags.push(flag.as_str());
            }
            Decl::Goal { lhs, rhs } => goal_asts.push((lhs, rhs)),
            _ => {
                return Err(usage(
                    "swindle run accepts only hypothesis and goal declarations; \
                     the presentation itself is built in",
                ))
            }
        }
    }

    let hyp = Hypothesis {
        lambda_is_iso: flags.contains(&"lambda_is_iso"),
        invertible_f: flags.contains(&"invertible_f").then(InvertibleF::default),
        idempotent_homs: flags.contains(&"idempotent_homs"),
    };
    let cfg = ProveConfig::with_budget(budget as usize);
    let mut report = RunReport::new("swindle run", Some(path.to_string()), seed, budget);

    let mut sp = build_swindle_presentation(&hyp).map_err(core_err)?;
    let diagrams = verify_diagrams(&mut sp, &cfg).map_err(core_err)?;
    report.absorb(&diagrams, 1);
    if !diagrams.passed {
        report.finalize();
        return Ok(report);
    }

    let keys = derive_key_identities(&mut sp, &cfg).map_err(core_err)?;
    report.absorb(&keys.report, 1);
    if !keys.report.passed {
        report.finalize();
        return Ok(report);
    }

    if hyp.invertible_f.is_some() {
        let out = no_invertible_verdict(&mut sp, &cfg).map_err(core_err)?;
        report.absorb(&out.report, 1);
        let steps: u64 = out.derivations.iter().map(|(_, r)| r.steps_used as u64).sum();
        if out.contradiction {
            report.push(
                "invertible-arrow-hypothesis",
                GoalStatus::Refuted,
                "the declared invertible arrow is forced to vanish, contradicting the sign hypothesis",
                steps,
            );
        } else {
            report.push(
                "invertible-arrow-hypothesis",
                GoalStatus::Failed,
                "no contradiction was derived",
                steps,
            );
        }
    }

    let objects = swindle_object_table(&sp);
    for (lhs, rhs) in goal_asts {
        let label = format!("{} = {}", dsl::print_term(lhs), dsl::print_term(rhs));
        let lt = dsl::resolve_term(lhs, &sp.presentation, &objects)?;
        let rt = dsl::resolve_term(rhs, &sp.presentation, &objects)?;
        prove_goal(&mut report, &label, &lt, &rt, &sp.presentation, &cfg);
    }

    if let Some(stage) = truncate {
        if stage == "symbolic" || stage == "unbounded" {
            report.push(
                "truncation",
                GoalStatus::Verified,
                "the unbounded statement is outside finite replay; see `verdict finiteness`",
                1,
            );
        } else {
            let n: usize = stage
                .parse()
                .map_err(|_| usage(format!("--truncate takes a stage number or `symbolic`, got `{stage}`")))?;
            for modulus in [2u64, 3] {
                let tr = truncated_swindle(n, modulus).map_err(core_err)?;
                let trep = check_truncated(&sp, &tr).map_err(core_err)?;
                report.absorb(&trep, 1);
            }
        }
    }

    report.finalize();
    Ok(report)
}

// ---------------------------------------------------------------------------
// verdict finiteness
// ---------------------------------------------------------------------------

pub fn verdict_finiteness(
    model: &str,
    truncate: Option<&str>,
    seed: u64,
    budget: u64,
) -> Result<RunReport, CliError> {
    let kind = parse_model_kind(model)?;
    let mode = match truncate {
        None => IndexMode::Unbounded,
        Some("symbolic") | Some("unbounded") => IndexMode::Unbounded,
        Some(n) => IndexMode::Finite(
            n.parse()
                .map_err(|_| usage(format!("--truncate takes a stage number or `symbolic`, got `{n}`")))?,
        ),
    };
    let cfg = ProveConfig::with_budget(budget as usize);
    let mut report = RunReport::new("verdict finiteness", None, seed, budget);
    let verdict = finiteness_verdict(kind, mode, &cfg).map_err(core_err)?;
    report.push(
        format!("finiteness[{}]", kind.label()),
        GoalStatus::Verified,
        format!("verdict {}", verdict.label()),
        1,
    );
    report.verdict = Some(verdict);
    report.finalize();
    Ok(report)
}

// ---------------------------------------------------------------------------
// check enrichment
// ---------------------------------------------------------------------------

/// Every abelian group of order at most 8, as a multiset of cyclic moduli,
/// including the trivial group.
pub fn finab_enrichment_catalog() -> Vec<FinAbObj> {
    fn rec(start: u64, cap: u64, cur: &mut Vec<u64>, out: &mut Vec<FinAbObj>) {
        let mut m = start;
        while m <= cap {
            cur.push(m);
            out.push(FinAbObj::from_moduli(cur));
            if cap / m >= m {
                rec(m, cap / m, cur, out);
            }
            cur.pop();
            m += 1;
        }
    }
    let mut out = vec![FinAbObj::from_moduli(&[])];
    let mut cur = Vec::new();
    rec(2, 8, &mut cur, &mut out);
    out
}

pub fn lattice_enrichment_catalog() -> Vec<LatticeObj> {
    small_catalog()
        .into_iter()
        .filter(|o| o.carrier_size().is_some_and(|s| s <= 4))
        .collect()
}

fn selected_models(model: Option<&str>) -> Result<Vec<ModelKind>, CliError> {
    match model {
        None => Ok(vec![ModelKind::FinAb, ModelKind::Lattice]),
        Some(s) => Ok(vec![parse_model_kind(s)?]),
    }
}

pub fn check_enrichment_cmd(model: Option<&str>, seed: u64, budget: u64) -> Result<RunReport, CliError> {
    let mut report = RunReport::new("check enrichment", None, seed, budget);
    let cfg = EnrichmentConfig::default();
    for kind in selected_models(model)? {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match kind {
            ModelKind::FinAb => {
                let objs = finab_enrichment_catalog();
                report.absorb(&check_enrichment(&FinAb, &objs, &cfg, &mut rng), 1);
            }
            ModelKind::Lattice => {
                let objs = lattice_enrichment_catalog();
                report.absorb(&check_enrichment(&Lattice, &objs, &cfg, &mut rng), 1);
            }
        }
    }
    report.finalize();
    Ok(report)
}

// ---------------------------------------------------------------------------
// check biproduct
// ---------------------------------------------------------------------------

fn random_finab_obj(rng: &mut ChaCha8Rng) -> FinAbObj {
    let k = rng.gen_range(1..=3);
    FinAbObj::from_moduli(&(0..k).map(|_| rng.gen_range(2..=6)).collect::<Vec<u64>>())
}

fn finab_pair_binding(a: FinAbObj, b: FinAbObj) -> (ModelBinding<FinAb>, ObjectRef, ObjectRef) {
    let mut binding: ModelBinding<FinAb> = ModelBinding::default();
    binding.objects.insert("X".into(), a);
    binding.objects.insert("Y".into(), b);
    (binding, ObjectRef::atomic("X"), ObjectRef::atomic("Y"))
}

fn lattice_pair_binding(
    a: LatticeObj,
    b: LatticeObj,
) -> (ModelBinding<Lattice>, ObjectRef, ObjectRef) {
    let mut binding: ModelBinding<Lattice> = ModelBinding::default();
    binding.objects.insert("X".into(), a);
    binding.objects.insert("Y".into(), b);
    (binding, ObjectRef::atomic("X"), ObjectRef::atomic("Y"))
}

pub fn check_biproduct_cmd(model: Option<&str>, seed: u64, budget: u64) -> Result<RunReport, CliError> {
    let mut report = RunReport::new("check biproduct", None, seed, budget);
    for kind in selected_models(model)? {
        match kind {
            ModelKind::FinAb => check_biproduct_finab(seed, &mut report),
            ModelKind::Lattice => check_biproduct_lattice(seed, &mut report),
        }
    }
    report.finalize();
    Ok(report)
}

fn check_biproduct_finab(seed: u64, report: &mut RunReport) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut first_failure = String::new();
    let mut failures = 0u32;
    for i in 0..100 {
        let (binding, x, y) = finab_pair_binding(random_finab_obj(&mut rng), random_finab_obj(&mut rng));
        if let Err(e) = build_biproduct(&FinAb, &binding, &x, &y) {
            failures += 1;
            if first_failure.is_empty() {
                first_failure = format!("pair {i}: {e}");
            }
        }
    }
    report.push(
        "finab: projection and injection relations on 100 random pairs",
        if failures == 0 { GoalStatus::Verified } else { GoalStatus::Failed },
        first_failure,
        100,
    );

    let objs = [
        FinAbObj::from_moduli(&[2]),
        FinAbObj::from_moduli(&[3]),
        FinAbObj::from_moduli(&[4]),
        FinAbObj::from_moduli(&[2, 2]),
        FinAbObj::from_moduli(&[2, 4]),
    ];
    let mut count = 0u64;
    let mut sum_failure = String::new();
    for a in &objs {
        for b in &objs {
            let Some(homs) = FinAb.enumerate_hom(a, b, 64) else { continue };
            for f in &homs {
                for g in &homs {
                    let (mut binding, x, y) = finab_pair_binding(a.clone(), b.clone());
                    binding.gens.insert("f".into(), f.clone());
                    binding.gens.insert("g".into(), g.clone());
                    let ft = MorTerm::gen("f", x.clone(), y.clone());
                    let gt = MorTerm::gen("g", x, y);
                    count += 1;
                    if let Err(e) = sum_via_biproduct(&FinAb, &binding, &ft, &gt) {
                        if sum_failure.is_empty() {
                            sum_failure = e.to_string();
                        }
                    }
                }
            }
        }
    }
    report.push(
        format!("finab: diagonal sum route agrees with addition on {count} morphism pairs"),
        if sum_failure.is_empty() { GoalStatus::Verified } else { GoalStatus::Failed },
        sum_failure,
        count,
    );
}

fn check_biproduct_lattice(seed: u64, report: &mut RunReport) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let catalog = small_catalog();
    let mut first_failure = String::new();
    let mut failures = 0u32;
    for i in 0..100 {
        let a = catalog[rng.gen_range(0..catalog.len())].clone();
        let b = catalog[rng.gen_range(0..catalog.len())].clone();
        let (binding, x, y) = lattice_pair_binding(a, b);
        if let Err(e) = build_biproduct(&Lattice, &binding, &x, &y) {
            failures += 1;
            if first_failure.is_empty() {
                first_failure = format!("pair {i}: {e}");
            }
        }
    }
    report.push(
        "lattice: projection and injection relations on 100 random pairs",
        if failures == 0 { GoalStatus::Verified } else { GoalStatus::Failed },
        first_failure,
        100,
    );

    let objs = [LatticeObj::Chain(1), LatticeObj::Chain(2), LatticeObj::Powerset(1)];
    let mut count = 0u64;
    let mut sum_failure = String::new();
    for a in &objs {
        for b in &objs {
            let Some(homs) = Lattice.enumerate_hom(a, b, 64) else { continue };
            for f in &homs {
                for g in &homs {
                    let (mut binding, x, y) = lattice_pair_binding(a.clone(), b.clone());
                    binding.gens.insert("f".into(), f.clone());
                    binding.gens.insert("g".into(), g.clone());
                    let ft = MorTerm::gen("f", x.clone(), y.clone());
                    let gt = MorTerm::gen("g", x, y);
                    count += 1;
                    if let Err(e) = sum_via_biproduct(&Lattice, &binding, &ft, &gt) {
                        if sum_failure.is_empty() {
                            sum_failure = e.to_string();
                        }
                    }
                }
            }
        }
    }
    report.push(
        format!("lattice: diagonal sum route agrees with join on {count} morphism pairs"),
        if sum_failure.is_empty() { GoalStatus::Verified } else { GoalStatus::Failed },
        sum_failure,
        count,
    );
}

// ---------------------------------------------------------------------------
// demos
// ---------------------------------------------------------------------------

pub fn demo_lattice(seed: u64, budget: u64) -> Result<RunReport, CliError> {
    let mut report = RunReport::new("demo lattice", None, seed, budget);
    let catalog = small_catalog();
    report.absorb(&check_idempotent_addition(&catalog), 1);

    let mut pairs = 0u64;
    let mut bad = 0u64;
    for d in &catalog {
        for c in &catalog {
            pairs += 1;
            let inv = invertible_homs(d, c);
            let zero = Lattice.zero_mor(d, c);
            if inv.len() != 1 || !Lattice.equal(&inv[0], &zero) {
                bad += 1;
            }
        }
    }
    report.push(
        format!("only the zero morphism is additively invertible across {pairs} hom-sets"),
        if bad == 0 { GoalStatus::Verified } else { GoalStatus::Failed },
        if bad == 0 { String::new() } else { format!("{bad} hom-sets have extra invertible elements") },
        pairs,
    );

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let factors = [LatticeObj::Chain(2), LatticeObj::Powerset(1), LatticeObj::Chain(1)];
    report.absorb(&indexed_biproduct_check(&factors, &ConeCheckConfig::default(), &mut rng), 1);

    report.finalize();
    Ok(report)
}

pub fn demo_completed_family(seed: u64, budget: u64) -> Result<RunReport, CliError> {
    let mut report = RunReport::new("demo completed-family", None, seed, budget);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = [LatticeObj::Chain(2), LatticeObj::Powerset(1)];
    let demo = completed_family_demo(&base, &[2, 3], &ConeCheckConfig::default(), &mut rng);
    report.absorb(&demo, 1);
    report.finalize();
    Ok(report)
}

// ---------------------------------------------------------------------------
// coring
// ---------------------------------------------------------------------------

fn load_coring(path: &str) -> Result<Coring, CliError> {
    let text = std::fs::read_to_string(path)?;
    let coring: Coring = serde_json::from_str(&text)
        .map_err(|err| CliError::JsonFile { path: path.into(), err })?;
    coring.validate().map_err(core_err)?;
    Ok(coring)
}

pub fn coring_check(path: &str, seed: u64, budget: u64) -> Result<RunReport, CliError> {
    let coring = load_coring(path)?;
    let mut report = RunReport::new("coring check", Some(path.to_string()), seed, budget);
    report.absorb(&check_coring(&coring), 1);
    report.finalize();
    Ok(report)
}

fn fmt_relem(e: &RElem) -> String {
    if e.len() == 1 {
        e[0].to_string()
    } else {
        format!("({})", e.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
    }
}

fn fmt_system(system: &FrobeniusSystem) -> String {
    let e = system
        .e
        .iter()
        .map(fmt_relem)
        .collect::<Vec<_>>()
        .join(", ");
    let mut rows = Vec::new();
    for r in 0..system.pi.rows {
        let row = (0..system.pi.cols)
            .map(|c| fmt_relem(&system.pi.get(r, c)))
            .collect::<Vec<_>>()
            .join(", ");
        rows.push(format!("[{row}]"));
    }
    format!("e = [{e}]; pi = [{}]", rows.join(", "))
}

pub fn coring_frobenius(path: &str, seed: u64, bound: u64) -> Result<RunReport, CliError> {
    let coring = load_coring(path)?;
    let mut report = RunReport::new("coring frobenius", Some(path.to_string()), seed, bound);
    let cfg = SearchConfig { candidate_bound: bound as u128 };
    match frobenius_search(&coring, &cfg).map_err(core_err)? {
        FrobeniusOutcome::Found { system, verification } => {
            report.absorb(&verification, 1);
            report.push("frobenius system", GoalStatus::Verified, fmt_system(&system), 1);
        }
        FrobeniusOutcome::NotFound { certificate } => {
            report.push("frobenius system", GoalStatus::Failed, certificate.join("; "), 1);
        }
    }
    report.finalize();
    Ok(report)
}

pub fn coring_verdict(
    ring: &str,
    size: &str,
    seed: u64,
    bound: u64,
) -> Result<RunReport, CliError> {
    let moduli = ring
        .split(',')
        .map(|p| {
            let m: u64 = p
                .trim()
                .parse()
                .map_err(|_| usage(format!("--ring takes comma-separated moduli, got `{p}`")))?;
            if m < 2 {
                return Err(usage(format!("ring modulus {m} is below 2")));
            }
            Ok(m)
        })
        .collect::<Result<Vec<u64>, CliError>>()?;
    let ring = FiniteRing::new(moduli).map_err(core_err)?;
    let family = match size {
        "symbolic" | "unbounded" => FamilySize::Symbolic,
        n => FamilySize::Finite(
            n.parse()
                .map_err(|_| usage(format!("--size takes a count or `symbolic`, got `{n}`")))?,
        ),
    };
    let mut report = RunReport::new("coring verdict", None, seed, bound);
    let cfg = SearchConfig { candidate_bound: bound as u128 };
    match product_coproduct_verdict(&ring, family, &cfg) {
        Ok(verdict) => {
            report.push(
                "product versus coproduct",
                GoalStatus::Verified,
                format!("verdict {}", verdict.label()),
                1,
            );
            report.verdict = Some(verdict);
        }
        Err(CoringError::VerdictUnavailable(msg)) => {
            report.push("product versus coproduct", GoalStatus::Failed, msg, 1);
        }
        Err(e) => return Err(core_err(e)),
    }
    report.finalize();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enrichment_catalog_covers_orders_up_to_eight() {
        let catalog = finab_enrichment_catalog();
        assert_eq!(catalog.len(), 12);
        assert!(catalog.iter().all(|o| o.order() <= 8));
        assert!(catalog.contains(&FinAbObj::from_moduli(&[2, 2, 2])));
        assert!(catalog.contains(&FinAbObj::from_moduli(&[])));
    }

    #[test]
    fn budget_resolution_prefers_the_flag() {
        assert_eq!(resolve_budget(Some(77), 10), 77);
        assert_eq!(resolve_budget(None, 10), 10);
    }

    #[test]
    fn finiteness_pipeline_delivers_a_verdict() {
        let report = verdict_finiteness("finab", Some("symbolic"), 1, DEFAULT_PROVE_BUDGET).unwrap();
        assert_eq!(report.exit_status, 0);
        let verdict = report.verdict.as_ref().unwrap();
        assert_eq!(verdict.label(), "NOT-ISO");
    }

    #[test]
    fn unknown_model_is_a_usage_error() {
        assert!(matches!(parse_model_kind("setoids"), Err(CliError::Usage(_))));
    }
}
