//! Equational chase engine for presentations with ℕ-schematic indices.
//!
//! A presentation declares generators (plain and indexed families),
//! schematic relations (optionally guarded by a Kronecker delta on two
//! index expressions), and extensionality rules describing which objects
//! admit componentwise reasoning. `prove_equal` decides goals by
//! canonical-form comparison, oriented rewriting, parity and zero/successor
//! case splits, extensionality, two-sided composition with known
//! isomorphisms, and a budgeted bidirectional search; every `proved`
//! answer carries a trace that is replayed before being returned.

pub mod nf;
mod prove;

pub use nf::{
    decide_delta, Binds, Constraint, DeltaDecision, Factor, SumNf, Word,
};
pub use prove::{
    prove_chain, prove_equal, prove_with, ChainResult, ProofResult, ProofStatus, ProofTrace,
    ProveConfig, SplitKind, StepLoc, StepRec,
};

use crate::term::{IndexExpr, MorTerm, ObjectRef, TermError};
use nf::{bind_factors, match_factors};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChaseError {
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("relation `{0}`: {1}")]
    BadRelation(String, String),
    #[error("unknown generator `{0}`")]
    UnknownGen(String),
    #[error("term is not well-typed: {0}")]
    IllTyped(String),
    #[error("goal sides are not parallel: `{0}` vs `{1}`")]
    NotParallel(String, String),
    #[error("extensionality rule on `{0}`: {1}")]
    BadExtensionality(String, String),
    #[error("index variable `{0}` does not occur in the goal")]
    VariableAbsent(String),
    #[error("delta on `{0}` and `{1}` cannot be settled under the given assignment")]
    Undecidable(String, String),
    #[error("rewrite budget of {0} steps exhausted before a normal form was reached")]
    BudgetExhausted(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSig {
    pub dom: ObjectRef,
    pub cod: ObjectRef,
}

/// A schematic equation between two morphism terms. Index variables range
/// over ℕ; a `delta` guard means the equation reads `lhs = δ(i,j)·rhs`,
/// i.e. the right side applies when the two indices agree and the left side
/// is zero when they are provably distinct.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchematicRelation {
    pub name: String,
    pub lhs: MorTerm,
    pub rhs: MorTerm,
    pub index_vars: Vec<String>,
    pub delta: Option<(IndexExpr, IndexExpr)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtSide {
    Product,
    Coproduct,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtMembers {
    /// An ℕ-indexed family of projections or injections; componentwise
    /// goals use a fresh schematic index variable.
    Indexed(String),
    /// Finitely many named projections or injections, one goal each.
    Finite(Vec<String>),
}

/// Declares that equality into (product side) or out of (coproduct side)
/// `target` may be decided componentwise through the given family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionalityRule {
    pub target: ObjectRef,
    pub side: ExtSide,
    pub members: ExtMembers,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Presentation {
    pub name: String,
    pub objects: BTreeMap<String, ObjectRef>,
    pub gens: BTreeMap<String, GenSig>,
    pub families: BTreeMap<String, GenSig>,
    pub relations: Vec<SchematicRelation>,
    pub ext_rules: Vec<ExtensionalityRule>,
    /// When set, formal sums are idempotent: a + a = a.
    pub idempotent: bool,
}

impl Presentation {
    pub fn new(name: impl Into<String>) -> Self {
        Presentation { name: name.into(), ..Default::default() }
    }

    fn note_object(&mut self, o: &ObjectRef) {
        self.objects.entry(o.name.clone()).or_insert_with(|| o.clone());
    }

    pub fn add_gen(&mut self, name: impl Into<String>, dom: ObjectRef, cod: ObjectRef) {
        let name = name.into();
        self.note_object(&dom);
        self.note_object(&cod);
        self.gens.insert(name, GenSig { dom, cod });
    }

    /// Declare an ℕ-indexed generator family; every member shares the same
    /// signature.
    pub fn add_family(&mut self, name: impl Into<String>, dom: ObjectRef, cod: ObjectRef) {
        let name = name.into();
        self.note_object(&dom);
        self.note_object(&cod);
        self.families.insert(name, GenSig { dom, cod });
    }

    /// Build a term for a declared plain generator.
    pub fn gen(&self, name: &str) -> Result<MorTerm, ChaseError> {
        let sig = self.gens.get(name).ok_or_else(|| ChaseError::UnknownGen(name.into()))?;
        Ok(MorTerm::gen(name, sig.dom.clone(), sig.cod.clone()))
    }

    /// Build a term for a member of a declared indexed family.
    pub fn fam(&self, name: &str, index: IndexExpr) -> Result<MorTerm, ChaseError> {
        let sig = self.families.get(name).ok_or_else(|| ChaseError::UnknownGen(name.into()))?;
        Ok(MorTerm::indexed(name, index, sig.dom.clone(), sig.cod.clone()))
    }

    pub fn factor_sig(&self, f: &Factor) -> Option<&GenSig> {
        match f {
            Factor::Gen(n) => self.gens.get(n),
            Factor::Idx(n, _) => self.families.get(n),
        }
    }

    /// Check that a term only uses declared generators with their declared
    /// signatures and that all composition boundaries line up.
    pub fn validate_term(&self, t: &MorTerm) -> Result<(), ChaseError> {
        match t {
            MorTerm::Id(_) | MorTerm::Zero { .. } => Ok(()),
            MorTerm::Gen { name, dom, cod } => {
                let sig =
                    self.gens.get(name).ok_or_else(|| ChaseError::UnknownGen(name.clone()))?;
                if &sig.dom != dom || &sig.cod != cod {
                    return Err(ChaseError::IllTyped(format!(
                        "generator `{name}` declared {} -> {} but used {} -> {}",
                        sig.dom, sig.cod, dom, cod
                    )));
                }
                Ok(())
            }
            MorTerm::IndexedGen { name, dom, cod, .. } => {
                let sig =
                    self.families.get(name).ok_or_else(|| ChaseError::UnknownGen(name.clone()))?;
                if &sig.dom != dom || &sig.cod != cod {
                    return Err(ChaseError::IllTyped(format!(
                        "family `{name}` declared {} -> {} but used {} -> {}",
                        sig.dom, sig.cod, dom, cod
                    )));
                }
                Ok(())
            }
            MorTerm::Comp(outer, inner) => {
                self.validate_term(outer)?;
                self.validate_term(inner)?;
                if outer.dom() != inner.cod() {
                    return Err(ChaseError::IllTyped(format!(
                        "composition boundary mismatch in `{t}`"
                    )));
                }
                Ok(())
            }
            MorTerm::Add(l, r) => {
                self.validate_term(l)?;
                self.validate_term(r)?;
                if l.dom() != r.dom() || l.cod() != r.cod() {
                    return Err(ChaseError::IllTyped(format!("sum of non-parallel terms in `{t}`")));
                }
                Ok(())
            }
        }
    }

    /// Add a schematic relation `lhs = rhs`, validating both sides.
    pub fn add_relation(
        &mut self,
        name: impl Into<String>,
        lhs: MorTerm,
        rhs: MorTerm,
    ) -> Result<(), ChaseError> {
        self.add_relation_full(name, lhs, rhs, None)
    }

    /// Add a delta-guarded relation `lhs = δ(i,j)·rhs`.
    pub fn add_delta_relation(
        &mut self,
        name: impl Into<String>,
        lhs: MorTerm,
        rhs: MorTerm,
        i: IndexExpr,
        j: IndexExpr,
    ) -> Result<(), ChaseError> {
        self.add_relation_full(name, lhs, rhs, Some((i, j)))
    }

    fn add_relation_full(
        &mut self,
        name: impl Into<String>,
        lhs: MorTerm,
        rhs: MorTerm,
        delta: Option<(IndexExpr, IndexExpr)>,
    ) -> Result<(), ChaseError> {
        let name = name.into();
        self.validate_term(&lhs)
            .map_err(|e| ChaseError::BadRelation(name.clone(), e.to_string()))?;
        self.validate_term(&rhs)
            .map_err(|e| ChaseError::BadRelation(name.clone(), e.to_string()))?;
        if lhs.dom() != rhs.dom() || lhs.cod() != rhs.cod() {
            return Err(ChaseError::BadRelation(name, "sides are not parallel".into()));
        }
        let mut index_vars = BTreeSet::new();
        collect_term_vars(&lhs, &mut index_vars);
        collect_term_vars(&rhs, &mut index_vars);
        if let Some((i, j)) = &delta {
            if let Some(v) = i.free_var() {
                index_vars.insert(v.to_string());
            }
            if let Some(v) = j.free_var() {
                index_vars.insert(v.to_string());
            }
        }
        self.relations.push(SchematicRelation {
            name,
            lhs,
            rhs,
            index_vars: index_vars.into_iter().collect(),
            delta,
        });
        Ok(())
    }

    pub fn add_ext_rule(
        &mut self,
        target: ObjectRef,
        side: ExtSide,
        members: ExtMembers,
    ) -> Result<(), ChaseError> {
        match &members {
            ExtMembers::Indexed(fam) => {
                let sig = self.families.get(fam).ok_or_else(|| {
                    ChaseError::BadExtensionality(target.name.clone(), format!("unknown family `{fam}`"))
                })?;
                let end = match side {
                    ExtSide::Product => &sig.dom,
                    ExtSide::Coproduct => &sig.cod,
                };
                if end != &target {
                    return Err(ChaseError::BadExtensionality(
                        target.name.clone(),
                        format!("family `{fam}` does not attach to the target object"),
                    ));
                }
            }
            ExtMembers::Finite(names) => {
                for n in names {
                    let sig = self.gens.get(n).ok_or_else(|| {
                        ChaseError::BadExtensionality(
                            target.name.clone(),
                            format!("unknown generator `{n}`"),
                        )
                    })?;
                    let end = match side {
                        ExtSide::Product => &sig.dom,
                        ExtSide::Coproduct => &sig.cod,
                    };
                    if end != &target {
                        return Err(ChaseError::BadExtensionality(
                            target.name.clone(),
                            format!("generator `{n}` does not attach to the target object"),
                        ));
                    }
                }
            }
        }
        self.ext_rules.push(ExtensionalityRule { target, side, members });
        Ok(())
    }
}

fn collect_term_vars(t: &MorTerm, out: &mut BTreeSet<String>) {
    match t {
        MorTerm::IndexedGen { index, .. } => {
            if let Some(v) = index.free_var() {
                out.insert(v.to_string());
            }
        }
        MorTerm::Comp(a, b) | MorTerm::Add(a, b) => {
            collect_term_vars(a, out);
            collect_term_vars(b, out);
        }
        _ => {}
    }
}

/// Substitute an index variable throughout a term.
pub fn subst_term_var(t: &MorTerm, var: &str, by: &IndexExpr) -> Result<MorTerm, TermError> {
    Ok(match t {
        MorTerm::IndexedGen { name, index, dom, cod } => MorTerm::IndexedGen {
            name: name.clone(),
            index: index.subst(var, by)?,
            dom: dom.clone(),
            cod: cod.clone(),
        },
        MorTerm::Comp(a, b) => MorTerm::Comp(
            Box::new(subst_term_var(a, var, by)?),
            Box::new(subst_term_var(b, var, by)?),
        ),
        MorTerm::Add(a, b) => MorTerm::Add(
            Box::new(subst_term_var(a, var, by)?),
            Box::new(subst_term_var(b, var, by)?),
        ),
        _ => t.clone(),
    })
}

/// Parity case split: substitute `var := 2k` and `var := 2k+1` with a fresh
/// `k` in both sides of a goal. Both subgoals must then be proved.
pub fn case_split_parity(
    lhs: &MorTerm,
    rhs: &MorTerm,
    var: &str,
) -> Result<[(MorTerm, MorTerm); 2], ChaseError> {
    let mut occurring = BTreeSet::new();
    collect_term_vars(lhs, &mut occurring);
    collect_term_vars(rhs, &mut occurring);
    if !occurring.contains(var) {
        return Err(ChaseError::VariableAbsent(var.into()));
    }
    let fresh = fresh_var(&occurring, var);
    let even = IndexExpr::affine(2, fresh.clone(), 0)?;
    let odd = IndexExpr::affine(2, fresh, 1)?;
    Ok([
        (subst_term_var(lhs, var, &even)?, subst_term_var(rhs, var, &even)?),
        (subst_term_var(lhs, var, &odd)?, subst_term_var(rhs, var, &odd)?),
    ])
}

fn fresh_var(taken: &BTreeSet<String>, base: &str) -> String {
    let mut i = 0usize;
    loop {
        let cand = format!("{base}{i}");
        if !taken.contains(&cand) {
            return cand;
        }
        i += 1;
    }
}

/// Resolve a Kronecker delta between two index expressions under a
/// (possibly partial) assignment: the result is the identity of `object`
/// when the sides are provably equal, the zero endomorphism when provably
/// distinct, and an `Undecidable` error otherwise.
pub fn resolve_delta(
    i: &IndexExpr,
    j: &IndexExpr,
    assignment: &BTreeMap<String, u64>,
    object: &ObjectRef,
) -> Result<MorTerm, ChaseError> {
    let inst = |e: &IndexExpr| -> IndexExpr {
        match e {
            IndexExpr::Lit(_) => e.clone(),
            IndexExpr::Affine { var, .. } => match assignment.get(var) {
                Some(v) => IndexExpr::Lit(e.eval(&BTreeMap::from([(var.clone(), *v)])).unwrap_or(0)),
                None => e.clone(),
            },
        }
    };
    let a = inst(i);
    let b = inst(j);
    match decide_delta(&a, &b) {
        DeltaDecision::Equal => Ok(MorTerm::Id(object.clone())),
        DeltaDecision::Distinct => {
            Ok(MorTerm::Zero { dom: object.clone(), cod: object.clone() })
        }
        DeltaDecision::Undecided => Err(ChaseError::Undecidable(a.to_string(), b.to_string())),
    }
}

// ---------------------------------------------------------------------------
// Compiled rewrite rules
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum CompRhs {
    Word(Vec<Factor>),
    Zero,
}

/// Single-addend rewrite rule compiled from a relation.
#[derive(Debug, Clone)]
pub(crate) struct CompRule {
    pub name: String,
    pub lhs: Vec<Factor>,
    pub rhs: CompRhs,
    pub delta: Option<(IndexExpr, IndexExpr)>,
    /// Backward rewriting (rhs -> lhs) allowed: every lhs variable is
    /// recoverable by matching the rhs, and there is no delta guard.
    pub rev_ok: bool,
    /// The rule erases a ground composite equal to an identity; its left
    /// side may be inserted at any boundary of matching type. Such rules
    /// are endomorphism-valued, so `cod` alone types the insertion cut.
    pub insert_ok: bool,
    pub cod: ObjectRef,
}

/// Multi-addend rewrite rule (a sum of composites collapses to a shorter
/// sum, possibly empty).
#[derive(Debug, Clone)]
pub(crate) struct SumRule {
    pub name: String,
    pub lhs: Vec<Vec<Factor>>,
    pub rhs: Vec<Vec<Factor>>,
    /// Reverse application (splitting the single rhs addend back into the
    /// lhs addends) allowed.
    pub rev_ok: bool,
    /// The lhs sums to zero and is ground; it may be inserted wholesale.
    pub insert_ok: bool,
    pub dom: ObjectRef,
    pub cod: ObjectRef,
}

#[derive(Debug, Clone)]
pub(crate) struct Rules {
    pub comp: Vec<CompRule>,
    pub sum: Vec<SumRule>,
    pub sigs: BTreeMap<String, GenSig>,
    /// Pairs (f, g) with both f.g = 1 and g.f = 1 present as rules.
    pub pairs: Vec<(String, String)>,
    pub ext: Vec<ExtensionalityRule>,
    pub idempotent: bool,
}

impl Rules {
    pub fn factor_sig(&self, f: &Factor) -> Option<&GenSig> {
        self.sigs.get(f.name())
    }

    /// Boundary types of a word inside a hom-set `dom -> cod`: position 0
    /// is the outermost boundary (`cod`), position `len` the innermost
    /// (`dom`). Returns None when some factor is undeclared or the chain
    /// does not type-check.
    pub fn cut_types(
        &self,
        w: &[Factor],
        dom: &ObjectRef,
        cod: &ObjectRef,
    ) -> Option<Vec<ObjectRef>> {
        let mut cuts = Vec::with_capacity(w.len() + 1);
        let mut current = cod.clone();
        cuts.push(current.clone());
        for f in w {
            let sig = self.factor_sig(f)?;
            if sig.cod != current {
                return None;
            }
            current = sig.dom.clone();
            cuts.push(current.clone());
        }
        if &current != dom {
            return None;
        }
        Some(cuts)
    }
}

fn word_vars(w: &[Factor]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for f in w {
        if let Some(v) = f.index().and_then(IndexExpr::free_var) {
            out.insert(v.to_string());
        }
    }
    out
}

pub(crate) fn compile(p: &Presentation) -> Result<Rules, ChaseError> {
    let mut comp = Vec::new();
    let mut sum = Vec::new();
    let mut halves: BTreeSet<(String, String)> = BTreeSet::new();

    for rel in &p.relations {
        let lhs_nf = SumNf::from_term(&rel.lhs, false);
        let rhs_nf = SumNf::from_term(&rel.rhs, false);
        let dom = rel.lhs.dom();
        let cod = rel.lhs.cod();
        let bad = |msg: &str| ChaseError::BadRelation(rel.name.clone(), msg.into());
        if lhs_nf.addends.iter().chain(&rhs_nf.addends).any(|w| !w.constraints.is_empty()) {
            return Err(bad("relation sides must not carry pending index equations"));
        }
        if lhs_nf.addends.is_empty() {
            return Err(bad("left side normalizes to zero; state the relation the other way"));
        }
        if lhs_nf.addends.len() == 1 {
            if rhs_nf.addends.len() > 1 {
                return Err(bad(
                    "single composite equal to a longer sum; state the relation the other way",
                ));
            }
            let lhs = lhs_nf.addends[0].factors.clone();
            if lhs.is_empty() {
                return Err(bad("left side must contain at least one generator"));
            }
            if matches!(rhs_nf.addends.first(), Some(w) if w.factors == lhs) {
                continue;
            }
            let lvars = word_vars(&lhs);
            let rhs = match rhs_nf.addends.first() {
                None => CompRhs::Zero,
                Some(w) => CompRhs::Word(w.factors.clone()),
            };
            let mut used = match &rhs {
                CompRhs::Zero => BTreeSet::new(),
                CompRhs::Word(w) => word_vars(w),
            };
            if let Some((i, j)) = &rel.delta {
                if let Some(v) = i.free_var() {
                    used.insert(v.to_string());
                }
                if let Some(v) = j.free_var() {
                    used.insert(v.to_string());
                }
            }
            if !used.is_subset(&lvars) {
                return Err(bad("right side or delta guard uses a variable the left never binds"));
            }
            let ground = lvars.is_empty();
            let rev_ok = rel.delta.is_none()
                && matches!(&rhs, CompRhs::Word(w) if !w.is_empty() && lvars.is_subset(&word_vars(w)));
            let insert_ok = rel.delta.is_none()
                && ground
                && matches!(&rhs, CompRhs::Word(w) if w.is_empty());
            if insert_ok && lhs.len() == 2 {
                halves.insert((lhs[0].name().to_string(), lhs[1].name().to_string()));
            }
            comp.push(CompRule {
                name: rel.name.clone(),
                lhs,
                rhs,
                delta: rel.delta.clone(),
                rev_ok,
                insert_ok,
                cod,
            });
        } else {
            if rel.delta.is_some() {
                return Err(bad("delta guards are only supported on single-composite relations"));
            }
            let lhs: Vec<Vec<Factor>> =
                lhs_nf.addends.iter().map(|w| w.factors.clone()).collect();
            let rhs: Vec<Vec<Factor>> =
                rhs_nf.addends.iter().map(|w| w.factors.clone()).collect();
            if rhs.len() > 1 {
                return Err(bad("sum relations must collapse to at most one composite"));
            }
            if lhs == rhs {
                continue;
            }
            let lvars: BTreeSet<String> =
                lhs.iter().flat_map(|w| word_vars(w)).collect();
            let rvars: BTreeSet<String> =
                rhs.iter().flat_map(|w| word_vars(w)).collect();
            if !rvars.is_subset(&lvars) {
                return Err(bad("right side uses a variable the left never binds"));
            }
            let ground = lvars.is_empty();
            let rev_ok = rhs.len() == 1 && lvars.is_subset(&rvars);
            let insert_ok = rhs.is_empty() && ground;
            sum.push(SumRule {
                name: rel.name.clone(),
                lhs,
                rhs,
                rev_ok,
                insert_ok,
                dom,
                cod,
            });
        }
    }

    let pairs: Vec<(String, String)> = halves
        .iter()
        .filter(|(f, g)| f <= g && halves.contains(&(g.clone(), f.clone())))
        .cloned()
        .collect();

    let mut sigs = p.gens.clone();
    for (name, sig) in &p.families {
        sigs.insert(name.clone(), sig.clone());
    }

    Ok(Rules {
        comp,
        sum,
        sigs,
        pairs,
        ext: p.ext_rules.clone(),
        idempotent: p.idempotent,
    })
}

// ---------------------------------------------------------------------------
// Oriented rewriting to a normal form
// ---------------------------------------------------------------------------

pub(crate) struct RewriteOutcome {
    pub nf: SumNf,
    pub steps: Vec<StepRec>,
    pub budget_hit: bool,
}

/// Apply forward rules (first rule, first position) until fixpoint or
/// budget exhaustion. With `allow_undecided` set, delta-guarded rules fire
/// on undecided indices by attaching a pending equation to the rewritten
/// word; otherwise such rules fire only when the delta is settled.
pub(crate) fn normalize_nf(
    start: &SumNf,
    dom: &ObjectRef,
    cod: &ObjectRef,
    rules: &Rules,
    allow_undecided: bool,
    budget: usize,
    used: &mut usize,
) -> RewriteOutcome {
    let mut state = start.clone();
    let mut steps = Vec::new();
    loop {
        if *used >= budget {
            return RewriteOutcome { nf: state, steps, budget_hit: true };
        }
        match first_forward_move(&state, dom, cod, rules, allow_undecided) {
            None => return RewriteOutcome { nf: state, steps, budget_hit: false },
            Some((rec, next)) => {
                *used += 1;
                steps.push(rec);
                state = next;
            }
        }
    }
}

fn first_forward_move(
    state: &SumNf,
    dom: &ObjectRef,
    cod: &ObjectRef,
    rules: &Rules,
    allow_undecided: bool,
) -> Option<(StepRec, SumNf)> {
    for (ri, rule) in rules.comp.iter().enumerate() {
        for (ai, w) in state.addends.iter().enumerate() {
            if rule.lhs.len() > w.factors.len() {
                continue;
            }
            for pos in 0..=(w.factors.len() - rule.lhs.len()) {
                let rec = StepRec {
                    rule: rule.name.clone(),
                    reversed: false,
                    loc: StepLoc::Comp { addend: ai, pos },
                };
                if let Some(next) =
                    apply_comp(state, rules, ri, false, ai, pos, allow_undecided)
                {
                    return Some((rec, next));
                }
            }
        }
    }
    for (ri, rule) in rules.sum.iter().enumerate() {
        if let Some((rec, next)) = first_sum_forward(state, rules, ri, rule, dom, cod) {
            return Some((rec, next));
        }
    }
    None
}

fn first_sum_forward(
    state: &SumNf,
    rules: &Rules,
    ri: usize,
    rule: &SumRule,
    dom: &ObjectRef,
    cod: &ObjectRef,
) -> Option<(StepRec, SumNf)> {
    let k = rule.lhs.len();
    let n = state.addends.len();
    if n < k {
        return None;
    }
    let mut pick: Vec<usize> = Vec::with_capacity(k);
    sum_tuples(n, k, &mut pick, &mut |tuple| {
        let max_pre = state.addends[tuple[0]].factors.len();
        for pre in 0..=max_pre {
            if let Some(next) = apply_sum_forward(state, rules, ri, tuple, pre, dom, cod) {
                return Some((
                    StepRec {
                        rule: rule.name.clone(),
                        reversed: false,
                        loc: StepLoc::SumFwd { addends: tuple.to_vec(), pre },
                    },
                    next,
                ));
            }
        }
        None
    })
}

/// Enumerate ordered tuples of distinct addend indices in lexicographic
/// order, short-circuiting on the first hit.
fn sum_tuples<T>(
    n: usize,
    k: usize,
    pick: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]) -> Option<T>,
) -> Option<T> {
    if pick.len() == k {
        return f(pick);
    }
    for i in 0..n {
        if pick.contains(&i) {
            continue;
        }
        pick.push(i);
        if let Some(t) = sum_tuples(n, k, pick, f) {
            pick.pop();
            return Some(t);
        }
        pick.pop();
    }
    None
}

// ---------------------------------------------------------------------------
// Single-step application (shared by search, normalization and replay)
// ---------------------------------------------------------------------------

/// Apply a compiled single-addend rule at an explicit location. Returns the
/// canonicalized successor state, or None when the rule does not match.
pub(crate) fn apply_comp(
    state: &SumNf,
    rules: &Rules,
    rule_idx: usize,
    reversed: bool,
    addend: usize,
    pos: usize,
    allow_undecided: bool,
) -> Option<SumNf> {
    let rule = &rules.comp[rule_idx];
    let w = state.addends.get(addend)?;
    let (pattern, replacement): (&[Factor], Option<&[Factor]>) = if reversed {
        if !rule.rev_ok {
            return None;
        }
        match &rule.rhs {
            CompRhs::Word(r) => (r.as_slice(), Some(rule.lhs.as_slice())),
            CompRhs::Zero => return None,
        }
    } else {
        match &rule.rhs {
            CompRhs::Word(r) => (rule.lhs.as_slice(), Some(r.as_slice())),
            CompRhs::Zero => (rule.lhs.as_slice(), None),
        }
    };
    if pos + pattern.len() > w.factors.len() {
        return None;
    }
    let mut binds = Binds::new();
    if !match_factors(pattern, &w.factors[pos..pos + pattern.len()], &mut binds) {
        return None;
    }

    let mut new_constraints = w.constraints.clone();
    if let Some((i, j)) = &rule.delta {
        let a = nf::bind_index(i, &binds).ok()?;
        let b = nf::bind_index(j, &binds).ok()?;
        match decide_delta(&a, &b) {
            DeltaDecision::Equal => {}
            DeltaDecision::Distinct => {
                // The matched composite is zero; drop the addend entirely.
                let mut next = state.clone();
                next.addends.remove(addend);
                next.canonicalize(rules.idempotent);
                return Some(next);
            }
            DeltaDecision::Undecided => {
                if !allow_undecided {
                    return None;
                }
                new_constraints.insert(nf::norm_constraint(a, b));
            }
        }
    }

    let mut next = state.clone();
    match replacement {
        None => {
            next.addends.remove(addend);
        }
        Some(r) => {
            let bound = bind_factors(r, &binds).ok()?;
            let mut factors = w.factors[..pos].to_vec();
            factors.extend(bound);
            factors.extend(w.factors[pos + pattern.len()..].iter().cloned());
            next.addends[addend] = Word { factors, constraints: new_constraints };
        }
    }
    next.canonicalize(rules.idempotent);
    Some(next)
}

/// Insert the ground identity-valued left side of a rule at a boundary.
pub(crate) fn apply_comp_insert(
    state: &SumNf,
    rules: &Rules,
    rule_idx: usize,
    addend: usize,
    pos: usize,
    dom: &ObjectRef,
    cod: &ObjectRef,
) -> Option<SumNf> {
    let rule = &rules.comp[rule_idx];
    if !rule.insert_ok {
        return None;
    }
    let w = state.addends.get(addend)?;
    if pos > w.factors.len() {
        return None;
    }
    let cuts = rules.cut_types(&w.factors, dom, cod)?;
    if cuts[pos] != rule.cod {
        return None;
    }
    let mut factors = w.factors[..pos].to_vec();
    factors.extend(rule.lhs.iter().cloned());
    factors.extend(w.factors[pos..].iter().cloned());
    let mut next = state.clone();
    next.addends[addend] = Word { factors, constraints: w.constraints.clone() };
    next.canonicalize(rules.idempotent);
    Some(next)
}

/// Apply a sum rule forward: the tuple lists which addend realizes each
/// left-side summand; all matched addends must share the common outer
/// prefix (length `pre`), the common inner suffix, bindings and pending
/// equations. Matched addends are replaced by the instantiated right side.
pub(crate) fn apply_sum_forward(
    state: &SumNf,
    rules: &Rules,
    rule_idx: usize,
    tuple: &[usize],
    pre: usize,
    dom: &ObjectRef,
    cod: &ObjectRef,
) -> Option<SumNf> {
    let rule = &rules.sum[rule_idx];
    if tuple.len() != rule.lhs.len() {
        return None;
    }
    let first = state.addends.get(*tuple.first()?)?;
    if pre + rule.lhs[0].len() > first.factors.len() {
        return None;
    }
    let suf = first.factors.len() - pre - rule.lhs[0].len();
    let prefix = &first.factors[..pre];
    let suffix = &first.factors[first.factors.len() - suf..];
    let constraints = &first.constraints;
    // The matched window must occupy a hom-set matching the rule's ends;
    // this matters when a left-side summand is the empty word.
    let cuts = rules.cut_types(&first.factors, dom, cod)?;
    if cuts[pre] != rule.cod || cuts[pre + rule.lhs[0].len()] != rule.dom {
        return None;
    }

    let mut binds = Binds::new();
    for (pat, &ai) in rule.lhs.iter().zip(tuple) {
        let w = state.addends.get(ai)?;
        if w.factors.len() != pre + pat.len() + suf {
            return None;
        }
        if &w.factors[..pre] != prefix || &w.factors[w.factors.len() - suf..] != suffix {
            return None;
        }
        if &w.constraints != constraints {
            return None;
        }
        if !match_factors(pat, &w.factors[pre..pre + pat.len()], &mut binds) {
            return None;
        }
    }

    let mut next_addends = Vec::new();
    for (i, w) in state.addends.iter().enumerate() {
        if !tuple.contains(&i) {
            next_addends.push(w.clone());
        }
    }
    for r in &rule.rhs {
        let bound = bind_factors(r, &binds).ok()?;
        let mut factors = prefix.to_vec();
        factors.extend(bound);
        factors.extend(suffix.iter().cloned());
        next_addends.push(Word { factors, constraints: constraints.clone() });
    }
    let mut next = SumNf { addends: next_addends };
    next.canonicalize(rules.idempotent);
    Some(next)
}

/// Reverse a collapsing sum rule: split one addend containing the right
/// side back into the full left-side sum.
pub(crate) fn apply_sum_rev(
    state: &SumNf,
    rules: &Rules,
    rule_idx: usize,
    addend: usize,
    pre: usize,
    dom: &ObjectRef,
    cod: &ObjectRef,
) -> Option<SumNf> {
    let rule = &rules.sum[rule_idx];
    if !rule.rev_ok {
        return None;
    }
    let pat = &rule.rhs[0];
    let w = state.addends.get(addend)?;
    if pre + pat.len() > w.factors.len() {
        return None;
    }
    let mut binds = Binds::new();
    if !match_factors(pat, &w.factors[pre..pre + pat.len()], &mut binds) {
        return None;
    }
    let cuts = rules.cut_types(&w.factors, dom, cod)?;
    if cuts[pre] != rule.cod || cuts[pre + pat.len()] != rule.dom {
        return None;
    }
    let prefix = &w.factors[..pre];
    let suffix = &w.factors[pre + pat.len()..];
    let mut next_addends: Vec<Word> = state
        .addends
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != addend)
        .map(|(_, x)| x.clone())
        .collect();
    for l in &rule.lhs {
        let bound = bind_factors(l, &binds).ok()?;
        let mut factors = prefix.to_vec();
        factors.extend(bound);
        factors.extend(suffix.iter().cloned());
        next_addends.push(Word { factors, constraints: w.constraints.clone() });
    }
    let mut next = SumNf { addends: next_addends };
    next.canonicalize(rules.idempotent);
    Some(next)
}

/// Insert a ground zero-sum family of addends wholesale.
pub(crate) fn apply_sum_insert(
    state: &SumNf,
    rules: &Rules,
    rule_idx: usize,
    dom: &ObjectRef,
    cod: &ObjectRef,
) -> Option<SumNf> {
    let rule = &rules.sum[rule_idx];
    if !rule.insert_ok || &rule.dom != dom || &rule.cod != cod {
        return None;
    }
    let mut next = state.clone();
    for l in &rule.lhs {
        next.addends.push(Word::from_factors(l.clone()));
    }
    next.canonicalize(rules.idempotent);
    Some(next)
}

// ---------------------------------------------------------------------------
// Public term-level normalize
// ---------------------------------------------------------------------------

/// Rewrite a term with the presentation's oriented rules until no rule
/// applies, then read the normal form back as a term. Deterministic given
/// the declaration order of relations; delta-guarded rules fire only when
/// the index comparison is settled.
pub fn normalize(t: &MorTerm, pres: &Presentation, budget: usize) -> Result<MorTerm, ChaseError> {
    pres.validate_term(t)?;
    let rules = compile(pres)?;
    let dom = t.dom();
    let cod = t.cod();
    let start = SumNf::from_term(t, pres.idempotent);
    let mut used = 0usize;
    let out = normalize_nf(&start, &dom, &cod, &rules, false, budget, &mut used);
    if out.budget_hit {
        return Err(ChaseError::BudgetExhausted(budget));
    }
    nf_to_term(&out.nf, &dom, &cod, &rules)
}

pub(crate) fn nf_to_term(
    nf: &SumNf,
    dom: &ObjectRef,
    cod: &ObjectRef,
    rules: &Rules,
) -> Result<MorTerm, ChaseError> {
    if nf.addends.is_empty() {
        return Ok(MorTerm::Zero { dom: dom.clone(), cod: cod.clone() });
    }
    let mut terms = Vec::with_capacity(nf.addends.len());
    for w in &nf.addends {
        if !w.constraints.is_empty() {
            return Err(ChaseError::IllTyped(format!(
                "normal form retains an unresolved index equation in `{w}`"
            )));
        }
        if w.factors.is_empty() {
            if dom != cod {
                return Err(ChaseError::IllTyped(
                    "identity addend in a hom-set with distinct ends".into(),
                ));
            }
            terms.push(MorTerm::Id(dom.clone()));
            continue;
        }
        let mut factors = Vec::with_capacity(w.factors.len());
        for f in &w.factors {
            let sig = rules
                .factor_sig(f)
                .ok_or_else(|| ChaseError::UnknownGen(f.name().to_string()))?;
            factors.push(match f {
                Factor::Gen(n) => MorTerm::gen(n.clone(), sig.dom.clone(), sig.cod.clone()),
                Factor::Idx(n, e) => {
                    MorTerm::indexed(n.clone(), e.clone(), sig.dom.clone(), sig.cod.clone())
                }
            });
        }
        terms.push(crate::term::compose_chain(factors)?);
    }
    let mut it = terms.into_iter();
    let first = it.next().expect("nonempty");
    it.try_fold(first, |acc, t| crate::term::add_mor(acc, t).map_err(ChaseError::from))
}
