//! Goal-directed proof search over compiled rewrite rules.
//!
//! A goal is an equation between two formal sums of composite words. The
//! prover tries, in order: canonical-form comparison, oriented rewriting
//! to a fixpoint, index case splits (parity and zero/successor),
//! two-sided composition with a known isomorphism, componentwise
//! extensionality, and finally a budgeted bidirectional search for a
//! common rewrite descendant. Every proved result carries a trace that is
//! replayed from the original goal before being reported.

use super::nf::{Factor, SumNf};
use super::{
    apply_comp, apply_comp_insert, apply_sum_forward, apply_sum_insert, apply_sum_rev, compile,
    normalize_nf, sum_tuples, ChaseError, ExtMembers, ExtSide, Presentation, Rules,
};
use crate::term::{IndexExpr, MorTerm, ObjectRef};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProveConfig {
    /// Total rewrite steps and search states a single call may consume.
    pub budget: usize,
    /// Longest composite word a search state may contain.
    pub max_word: usize,
    /// Most addends a search state may contain.
    pub max_addends: usize,
    pub max_split_depth: usize,
    pub max_ext_depth: usize,
    pub max_transport_depth: usize,
    /// Index values swept when comparing pending index equations.
    pub sweep_bound: u64,
}

impl Default for ProveConfig {
    fn default() -> Self {
        ProveConfig {
            budget: 10_000,
            max_word: 12,
            max_addends: 6,
            max_split_depth: 6,
            max_ext_depth: 6,
            max_transport_depth: 4,
            sweep_bound: 8,
        }
    }
}

impl ProveConfig {
    pub fn with_budget(budget: usize) -> Self {
        ProveConfig { budget, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitKind {
    Parity,
    ZeroSucc,
}

/// Where a single rewrite step acted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepLoc {
    /// Single-addend rule at a factor position of one addend.
    Comp { addend: usize, pos: usize },
    /// Identity-valued ground composite inserted at a boundary.
    CompInsert { addend: usize, pos: usize },
    /// Sum rule collapsing the listed addends, sharing a prefix of `pre`
    /// factors.
    SumFwd { addends: Vec<usize>, pre: usize },
    /// Sum rule applied backwards, splitting one addend.
    SumRev { addend: usize, pre: usize },
    /// Ground zero-sum family of addends inserted wholesale.
    SumInsert,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRec {
    pub rule: String,
    pub reversed: bool,
    pub loc: StepLoc,
}

/// Replayable certificate for a proved goal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProofTrace {
    /// Both sides already had the same canonical form.
    CanonicalEq,
    /// Both sides rewrite to a common normal form.
    Rewrite { lhs_steps: Vec<StepRec>, rhs_steps: Vec<StepRec> },
    /// Both sides were rewritten, then the inner derivation closes the
    /// rewritten goal.
    Normalized { lhs_steps: Vec<StepRec>, rhs_steps: Vec<StepRec>, inner: Box<ProofTrace> },
    /// Case split on an index variable; each branch substitutes one of
    /// the listed expressions and carries its own derivation.
    Split {
        var: String,
        kind: SplitKind,
        fresh: String,
        branches: Vec<(IndexExpr, ProofTrace)>,
    },
    /// Componentwise proof through a declared family of projections or
    /// injections.
    Ext { side: ExtSide, components: Vec<(Factor, ProofTrace)> },
    /// Both sides composed with half of an invertible pair; the inner
    /// derivation closes the transported goal.
    Transport { prepend: bool, factor: Factor, inner: Box<ProofTrace> },
    /// Bidirectional search: both sides rewrite (with reversed rules and
    /// identity insertions allowed) to a common descendant.
    Meet { lhs_steps: Vec<StepRec>, rhs_steps: Vec<StepRec> },
}

impl ProofTrace {
    /// Number of terminal comparisons in the derivation tree.
    pub fn leaf_count(&self) -> usize {
        match self {
            ProofTrace::CanonicalEq | ProofTrace::Rewrite { .. } | ProofTrace::Meet { .. } => 1,
            ProofTrace::Normalized { inner, .. } | ProofTrace::Transport { inner, .. } => {
                inner.leaf_count()
            }
            ProofTrace::Split { branches, .. } => {
                branches.iter().map(|(_, t)| t.leaf_count()).sum()
            }
            ProofTrace::Ext { components, .. } => {
                components.iter().map(|(_, t)| t.leaf_count()).sum()
            }
        }
    }

    /// All recorded rewrite steps in derivation order.
    pub fn flat_steps(&self) -> Vec<StepRec> {
        let mut out = Vec::new();
        self.collect_steps(&mut out);
        out
    }

    fn collect_steps(&self, out: &mut Vec<StepRec>) {
        match self {
            ProofTrace::CanonicalEq => {}
            ProofTrace::Rewrite { lhs_steps, rhs_steps }
            | ProofTrace::Meet { lhs_steps, rhs_steps } => {
                out.extend(lhs_steps.iter().cloned());
                out.extend(rhs_steps.iter().cloned());
            }
            ProofTrace::Normalized { lhs_steps, rhs_steps, inner } => {
                out.extend(lhs_steps.iter().cloned());
                out.extend(rhs_steps.iter().cloned());
                inner.collect_steps(out);
            }
            ProofTrace::Split { branches, .. } => {
                for (_, t) in branches {
                    t.collect_steps(out);
                }
            }
            ProofTrace::Ext { components, .. } => {
                for (_, t) in components {
                    t.collect_steps(out);
                }
            }
            ProofTrace::Transport { inner, .. } => inner.collect_steps(out),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProofStatus {
    Proved,
    Disproved { witness: BTreeMap<String, u64> },
    Unknown { reason: String },
}

impl ProofStatus {
    pub fn is_proved(&self) -> bool {
        matches!(self, ProofStatus::Proved)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofResult {
    pub status: ProofStatus,
    pub steps_used: usize,
    pub branch_count: usize,
    pub trace: Option<ProofTrace>,
}

impl ProofResult {
    pub fn is_proved(&self) -> bool {
        self.status.is_proved()
    }
}

/// Outcome of proving a chain of terms pairwise equal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainResult {
    pub links: Vec<ProofResult>,
    pub status: ProofStatus,
    pub steps_used: usize,
}

// ---------------------------------------------------------------------------
// Internal goal and prover state
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct Goal {
    lhs: SumNf,
    rhs: SumNf,
    dom: ObjectRef,
    cod: ObjectRef,
}

impl Goal {
    fn key(&self) -> String {
        let a = self.lhs.key();
        let b = self.rhs.key();
        let (x, y) = if a <= b { (a, b) } else { (b, a) };
        format!("{x} == {y} : {} -> {}", self.dom.name, self.cod.name)
    }

    fn vars(&self) -> BTreeSet<String> {
        let mut v = self.lhs.vars();
        v.extend(self.rhs.vars());
        v
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Depth {
    split: usize,
    ext: usize,
    transport: usize,
}

enum Outcome {
    Proved(ProofTrace),
    Disproved(BTreeMap<String, u64>),
    Unknown,
}

#[derive(Clone)]
enum Memo {
    InProgress,
    Proved(ProofTrace),
    Disproved(BTreeMap<String, u64>),
    Unknown,
}

struct Prover<'a> {
    rules: &'a Rules,
    cfg: &'a ProveConfig,
    used: usize,
    fresh: usize,
    memo: BTreeMap<String, Memo>,
}

fn partner<'r>(rules: &'r Rules, name: &str) -> Option<&'r str> {
    for (a, b) in &rules.pairs {
        if a == name {
            return Some(b);
        }
        if b == name {
            return Some(a);
        }
    }
    None
}

impl<'a> Prover<'a> {
    fn new(rules: &'a Rules, cfg: &'a ProveConfig) -> Self {
        Prover { rules, cfg, used: 0, fresh: 0, memo: BTreeMap::new() }
    }

    fn out_of_budget(&self) -> bool {
        self.used >= self.cfg.budget
    }

    fn fresh_var(&mut self, avoid: &BTreeSet<String>) -> String {
        loop {
            let cand = format!("i{}", self.fresh);
            self.fresh += 1;
            if !avoid.contains(&cand) {
                return cand;
            }
        }
    }

    fn prove(&mut self, goal: &Goal, d: Depth) -> Outcome {
        if self.out_of_budget() {
            return Outcome::Unknown;
        }
        if goal.lhs.equiv(&goal.rhs, self.cfg.sweep_bound) {
            return Outcome::Proved(ProofTrace::CanonicalEq);
        }
        let key = goal.key();
        match self.memo.get(&key) {
            Some(Memo::InProgress) | Some(Memo::Unknown) => return Outcome::Unknown,
            Some(Memo::Proved(t)) => return Outcome::Proved(t.clone()),
            Some(Memo::Disproved(w)) => return Outcome::Disproved(w.clone()),
            None => {}
        }
        self.memo.insert(key.clone(), Memo::InProgress);
        let out = self.prove_inner(goal, d);
        let entry = match &out {
            Outcome::Proved(t) => Memo::Proved(t.clone()),
            Outcome::Disproved(w) => Memo::Disproved(w.clone()),
            Outcome::Unknown => Memo::Unknown,
        };
        self.memo.insert(key, entry);
        out
    }

    fn prove_inner(&mut self, goal: &Goal, d: Depth) -> Outcome {
        let lo = normalize_nf(
            &goal.lhs,
            &goal.dom,
            &goal.cod,
            self.rules,
            true,
            self.cfg.budget,
            &mut self.used,
        );
        let ro = normalize_nf(
            &goal.rhs,
            &goal.dom,
            &goal.cod,
            self.rules,
            true,
            self.cfg.budget,
            &mut self.used,
        );
        if lo.budget_hit || ro.budget_hit {
            return Outcome::Unknown;
        }
        if lo.nf.equiv(&ro.nf, self.cfg.sweep_bound) {
            return Outcome::Proved(ProofTrace::Rewrite {
                lhs_steps: lo.steps,
                rhs_steps: ro.steps,
            });
        }
        if (lo.nf.is_identity() && ro.nf.is_zero())
            || (lo.nf.is_zero() && ro.nf.is_identity())
        {
            // An identity equal to a zero map would collapse the hom-set;
            // this refutes the goal in every nondegenerate model.
            return Outcome::Disproved(BTreeMap::new());
        }

        let progressed = !lo.steps.is_empty() || !ro.steps.is_empty();
        let work = if progressed {
            Goal { lhs: lo.nf, rhs: ro.nf, dom: goal.dom.clone(), cod: goal.cod.clone() }
        } else {
            goal.clone()
        };
        let wrap = |inner: ProofTrace| -> ProofTrace {
            if progressed {
                ProofTrace::Normalized {
                    lhs_steps: lo.steps.clone(),
                    rhs_steps: ro.steps.clone(),
                    inner: Box::new(inner),
                }
            } else {
                inner
            }
        };

        if d.split < self.cfg.max_split_depth {
            match self.try_splits(&work, d) {
                Outcome::Proved(t) => return Outcome::Proved(wrap(t)),
                Outcome::Disproved(w) => return Outcome::Disproved(w),
                Outcome::Unknown => {}
            }
        }
        if d.transport < self.cfg.max_transport_depth {
            match self.try_transports(&work, d) {
                Outcome::Proved(t) => return Outcome::Proved(wrap(t)),
                Outcome::Disproved(w) => return Outcome::Disproved(w),
                Outcome::Unknown => {}
            }
        }
        if d.ext < self.cfg.max_ext_depth {
            match self.try_ext(&work, d) {
                Outcome::Proved(t) => return Outcome::Proved(wrap(t)),
                Outcome::Disproved(w) => return Outcome::Disproved(w),
                Outcome::Unknown => {}
            }
        }
        let raw_searchable = goal.lhs.is_ground()
            && goal.rhs.is_ground()
            && !goal.lhs.has_constraints()
            && !goal.rhs.has_constraints();
        if raw_searchable {
            // Search from the canonical forms as stated: a sum rule window
            // destroyed by normalization can still carry a one-move meet.
            if let Some(t) = self.try_search(goal) {
                return Outcome::Proved(t);
            }
        } else if let Some(t) = self.try_search(&work) {
            return Outcome::Proved(wrap(t));
        }
        Outcome::Unknown
    }

    // -- case splits --------------------------------------------------------

    fn try_splits(&mut self, work: &Goal, d: Depth) -> Outcome {
        let vars = work.vars();
        for var in &vars {
            'kinds: for kind in [SplitKind::Parity, SplitKind::ZeroSucc] {
                let fresh = self.fresh_var(&vars);
                let exprs: [IndexExpr; 2] = match kind {
                    SplitKind::Parity => [
                        IndexExpr::affine(2, fresh.clone(), 0).expect("valid"),
                        IndexExpr::affine(2, fresh.clone(), 1).expect("valid"),
                    ],
                    SplitKind::ZeroSucc => [
                        IndexExpr::Lit(0),
                        IndexExpr::affine(1, fresh.clone(), 1).expect("valid"),
                    ],
                };
                let mut branch_goals = Vec::with_capacity(2);
                for e in &exprs {
                    let l = work.lhs.subst_var(var, e, self.rules.idempotent);
                    let r = work.rhs.subst_var(var, e, self.rules.idempotent);
                    match (l, r) {
                        (Ok(lhs), Ok(rhs)) => branch_goals.push(Goal {
                            lhs,
                            rhs,
                            dom: work.dom.clone(),
                            cod: work.cod.clone(),
                        }),
                        _ => continue 'kinds,
                    }
                }
                let mut proved = Vec::with_capacity(2);
                for (e, bg) in exprs.iter().zip(&branch_goals) {
                    let mut dd = d;
                    dd.split += 1;
                    match self.prove(bg, dd) {
                        Outcome::Proved(t) => proved.push((e.clone(), t)),
                        Outcome::Disproved(mut w) => {
                            let mut env = w.clone();
                            env.entry(fresh.clone()).or_insert(0);
                            if let Ok(v) = e.eval(&env) {
                                w.insert(var.clone(), v);
                            }
                            return Outcome::Disproved(w);
                        }
                        Outcome::Unknown => continue 'kinds,
                    }
                }
                return Outcome::Proved(ProofTrace::Split {
                    var: var.clone(),
                    kind,
                    fresh,
                    branches: proved,
                });
            }
        }
        Outcome::Unknown
    }

    // -- transport along invertible pairs -----------------------------------

    fn try_transports(&mut self, work: &Goal, d: Depth) -> Outcome {
        let mut cands: Vec<(bool, String)> = Vec::new();
        let mut seen = BTreeSet::new();
        for side in [&work.lhs, &work.rhs] {
            for w in &side.addends {
                if let Some(first) = w.factors.first() {
                    if let Some(p) = partner(self.rules, first.name()) {
                        if let Some(sig) = self.rules.sigs.get(p) {
                            if sig.dom == work.cod && seen.insert((true, p.to_string())) {
                                cands.push((true, p.to_string()));
                            }
                        }
                    }
                }
                if let Some(last) = w.factors.last() {
                    if let Some(p) = partner(self.rules, last.name()) {
                        if let Some(sig) = self.rules.sigs.get(p) {
                            if sig.cod == work.dom && seen.insert((false, p.to_string())) {
                                cands.push((false, p.to_string()));
                            }
                        }
                    }
                }
            }
        }
        for (prepend, name) in cands {
            let f = Factor::Gen(name.clone());
            let sig = match self.rules.sigs.get(&name) {
                Some(s) => s.clone(),
                None => continue,
            };
            let idem = self.rules.idempotent;
            let sub = if prepend {
                Goal {
                    lhs: work.lhs.prepend(&f, idem),
                    rhs: work.rhs.prepend(&f, idem),
                    dom: work.dom.clone(),
                    cod: sig.cod.clone(),
                }
            } else {
                Goal {
                    lhs: work.lhs.append(&f, idem),
                    rhs: work.rhs.append(&f, idem),
                    dom: sig.dom.clone(),
                    cod: work.cod.clone(),
                }
            };
            let mut dd = d;
            dd.transport += 1;
            match self.prove(&sub, dd) {
                Outcome::Proved(t) => {
                    return Outcome::Proved(ProofTrace::Transport {
                        prepend,
                        factor: f,
                        inner: Box::new(t),
                    });
                }
                // Composition with an invertible map reflects inequality.
                Outcome::Disproved(w) => return Outcome::Disproved(w),
                Outcome::Unknown => {}
            }
        }
        Outcome::Unknown
    }

    // -- componentwise extensionality ---------------------------------------

    fn try_ext(&mut self, work: &Goal, d: Depth) -> Outcome {
        let ext_rules = self.rules.ext.clone();
        'rules: for rule in &ext_rules {
            let applies = match rule.side {
                ExtSide::Product => rule.target == work.cod,
                ExtSide::Coproduct => rule.target == work.dom,
            };
            if !applies {
                continue;
            }
            let members: Vec<Factor> = match &rule.members {
                ExtMembers::Indexed(fam) => {
                    let avoid = work.vars();
                    let v = self.fresh_var(&avoid);
                    vec![Factor::Idx(fam.clone(), IndexExpr::var(v))]
                }
                ExtMembers::Finite(names) => {
                    names.iter().map(|n| Factor::Gen(n.clone())).collect()
                }
            };
            let mut components = Vec::with_capacity(members.len());
            for f in members {
                let sig = match self.rules.sigs.get(f.name()) {
                    Some(s) => s.clone(),
                    None => continue 'rules,
                };
                let idem = self.rules.idempotent;
                let sub = match rule.side {
                    ExtSide::Product => Goal {
                        lhs: work.lhs.prepend(&f, idem),
                        rhs: work.rhs.prepend(&f, idem),
                        dom: work.dom.clone(),
                        cod: sig.cod.clone(),
                    },
                    ExtSide::Coproduct => Goal {
                        lhs: work.lhs.append(&f, idem),
                        rhs: work.rhs.append(&f, idem),
                        dom: sig.dom.clone(),
                        cod: work.cod.clone(),
                    },
                };
                let mut dd = d;
                dd.ext += 1;
                match self.prove(&sub, dd) {
                    Outcome::Proved(t) => components.push((f, t)),
                    // A differing component refutes the whole equation.
                    Outcome::Disproved(w) => return Outcome::Disproved(w),
                    Outcome::Unknown => continue 'rules,
                }
            }
            return Outcome::Proved(ProofTrace::Ext { side: rule.side, components });
        }
        Outcome::Unknown
    }

    // -- bidirectional search -----------------------------------------------

    fn try_search(&mut self, work: &Goal) -> Option<ProofTrace> {
        if !work.lhs.is_ground() || !work.rhs.is_ground() {
            return None;
        }
        if work.lhs.has_constraints() || work.rhs.has_constraints() {
            return None;
        }
        let remaining = self.cfg.budget.saturating_sub(self.used);
        let slice = (remaining / 4).clamp(400, 2500).min(remaining);
        if slice == 0 {
            return None;
        }
        let mut slice_left = slice;

        let mut a = SearchSide::new();
        let mut b = SearchSide::new();
        a.seed(work.lhs.clone(), Vec::new());
        b.seed(work.rhs.clone(), Vec::new());
        let lo = normalize_nf(
            &work.lhs,
            &work.dom,
            &work.cod,
            self.rules,
            false,
            self.cfg.budget,
            &mut self.used,
        );
        if !lo.budget_hit && !lo.nf.has_constraints() {
            a.seed(lo.nf, lo.steps);
        }
        let ro = normalize_nf(
            &work.rhs,
            &work.dom,
            &work.cod,
            self.rules,
            false,
            self.cfg.budget,
            &mut self.used,
        );
        if !ro.budget_hit && !ro.nf.has_constraints() {
            b.seed(ro.nf, ro.steps);
        }
        // A seed shared by both sides is an immediate meeting point.
        for (key, &ai) in &a.visited {
            if let Some(&bi) = b.visited.get(key) {
                return Some(ProofTrace::Meet {
                    lhs_steps: a.states[ai].1.clone(),
                    rhs_steps: b.states[bi].1.clone(),
                });
            }
        }

        loop {
            if slice_left == 0 || (a.frontier.is_empty() && b.frontier.is_empty()) {
                return None;
            }
            if let Some((own, other)) =
                self.expand_side(&mut a, &b, &work.dom, &work.cod, &mut slice_left)
            {
                return Some(ProofTrace::Meet { lhs_steps: own, rhs_steps: other });
            }
            if let Some((own, other)) =
                self.expand_side(&mut b, &a, &work.dom, &work.cod, &mut slice_left)
            {
                return Some(ProofTrace::Meet { lhs_steps: other, rhs_steps: own });
            }
        }
    }

    /// Expand one generation of `side`. On a meeting point returns the
    /// paths (own side first).
    fn expand_side(
        &mut self,
        side: &mut SearchSide,
        other: &SearchSide,
        dom: &ObjectRef,
        cod: &ObjectRef,
        slice_left: &mut usize,
    ) -> Option<(Vec<StepRec>, Vec<StepRec>)> {
        let frontier = std::mem::take(&mut side.frontier);
        let mut next_frontier = Vec::new();
        for si in frontier {
            if *slice_left == 0 {
                break;
            }
            let (state, path) = side.states[si].clone();
            for (rec, next) in self.search_moves(&state, dom, cod, slice_left) {
                if next.addends.len() > self.cfg.max_addends
                    || next.addends.iter().any(|w| w.factors.len() > self.cfg.max_word)
                    || next.has_constraints()
                {
                    continue;
                }
                let key = next.key();
                if side.visited.contains_key(&key) {
                    continue;
                }
                let mut own_path = path.clone();
                own_path.push(rec);
                if let Some(&oi) = other.visited.get(&key) {
                    return Some((own_path, other.states[oi].1.clone()));
                }
                let idx = side.states.len();
                side.states.push((next, own_path));
                side.visited.insert(key, idx);
                next_frontier.push(idx);
            }
        }
        side.frontier.extend(next_frontier);
        None
    }

    /// All single-step successors of a state: forward rules, reversed
    /// rules, and typed identity insertions. Delta-guarded rules fire only
    /// when the comparison is settled.
    fn search_moves(
        &mut self,
        state: &SumNf,
        dom: &ObjectRef,
        cod: &ObjectRef,
        slice_left: &mut usize,
    ) -> Vec<(StepRec, SumNf)> {
        let mut out = Vec::new();
        let spend = |slice_left: &mut usize, used: &mut usize| -> bool {
            if *slice_left == 0 {
                return false;
            }
            *slice_left -= 1;
            *used += 1;
            true
        };
        for (ri, rule) in self.rules.comp.iter().enumerate() {
            for ai in 0..state.addends.len() {
                let wlen = state.addends[ai].factors.len();
                if rule.lhs.len() <= wlen {
                    for pos in 0..=(wlen - rule.lhs.len()) {
                        if let Some(next) =
                            apply_comp(state, self.rules, ri, false, ai, pos, false)
                        {
                            if !spend(slice_left, &mut self.used) {
                                return out;
                            }
                            out.push((
                                StepRec {
                                    rule: rule.name.clone(),
                                    reversed: false,
                                    loc: StepLoc::Comp { addend: ai, pos },
                                },
                                next,
                            ));
                        }
                    }
                }
                if rule.rev_ok {
                    for pos in 0..=wlen {
                        if let Some(next) =
                            apply_comp(state, self.rules, ri, true, ai, pos, false)
                        {
                            if !spend(slice_left, &mut self.used) {
                                return out;
                            }
                            out.push((
                                StepRec {
                                    rule: rule.name.clone(),
                                    reversed: true,
                                    loc: StepLoc::Comp { addend: ai, pos },
                                },
                                next,
                            ));
                        }
                    }
                }
                if rule.insert_ok {
                    for pos in 0..=wlen {
                        if let Some(next) =
                            apply_comp_insert(state, self.rules, ri, ai, pos, dom, cod)
                        {
                            if !spend(slice_left, &mut self.used) {
                                return out;
                            }
                            out.push((
                                StepRec {
                                    rule: rule.name.clone(),
                                    reversed: true,
                                    loc: StepLoc::CompInsert { addend: ai, pos },
                                },
                                next,
                            ));
                        }
                    }
                }
            }
        }
        for (ri, rule) in self.rules.sum.iter().enumerate() {
            let k = rule.lhs.len();
            let n = state.addends.len();
            if n >= k {
                let mut pick = Vec::with_capacity(k);
                let mut hits: Vec<(Vec<usize>, usize, SumNf)> = Vec::new();
                let _ = sum_tuples(n, k, &mut pick, &mut |tuple| {
                    let max_pre = state.addends[tuple[0]].factors.len();
                    for pre in 0..=max_pre {
                        if let Some(next) =
                            apply_sum_forward(state, self.rules, ri, tuple, pre, dom, cod)
                        {
                            hits.push((tuple.to_vec(), pre, next));
                        }
                    }
                    None::<()>
                });
                for (tuple, pre, next) in hits {
                    if !spend(slice_left, &mut self.used) {
                        return out;
                    }
                    out.push((
                        StepRec {
                            rule: rule.name.clone(),
                            reversed: false,
                            loc: StepLoc::SumFwd { addends: tuple, pre },
                        },
                        next,
                    ));
                }
            }
            if rule.rev_ok {
                for ai in 0..state.addends.len() {
                    for pre in 0..=state.addends[ai].factors.len() {
                        if let Some(next) =
                            apply_sum_rev(state, self.rules, ri, ai, pre, dom, cod)
                        {
                            if !spend(slice_left, &mut self.used) {
                                return out;
                            }
                            out.push((
                                StepRec {
                                    rule: rule.name.clone(),
                                    reversed: true,
                                    loc: StepLoc::SumRev { addend: ai, pre },
                                },
                                next,
                            ));
                        }
                    }
                }
            }
            if rule.insert_ok {
                if let Some(next) = apply_sum_insert(state, self.rules, ri, dom, cod) {
                    if !spend(slice_left, &mut self.used) {
                        return out;
                    }
                    out.push((
                        StepRec {
                            rule: rule.name.clone(),
                            reversed: true,
                            loc: StepLoc::SumInsert,
                        },
                        next,
                    ));
                }
            }
        }
        out
    }
}

struct SearchSide {
    visited: BTreeMap<String, usize>,
    states: Vec<(SumNf, Vec<StepRec>)>,
    frontier: Vec<usize>,
}

impl SearchSide {
    fn new() -> Self {
        SearchSide { visited: BTreeMap::new(), states: Vec::new(), frontier: Vec::new() }
    }

    fn seed(&mut self, state: SumNf, path: Vec<StepRec>) {
        let key = state.key();
        if self.visited.contains_key(&key) {
            return;
        }
        let idx = self.states.len();
        self.states.push((state, path));
        self.visited.insert(key, idx);
        self.frontier.push(idx);
    }
}

// ---------------------------------------------------------------------------
// Replay
// ---------------------------------------------------------------------------

fn apply_step(
    state: &SumNf,
    rules: &Rules,
    rec: &StepRec,
    dom: &ObjectRef,
    cod: &ObjectRef,
) -> Option<SumNf> {
    match &rec.loc {
        StepLoc::Comp { addend, pos } => {
            let ri = rules.comp.iter().position(|r| r.name == rec.rule)?;
            apply_comp(state, rules, ri, rec.reversed, *addend, *pos, true)
        }
        StepLoc::CompInsert { addend, pos } => {
            let ri = rules.comp.iter().position(|r| r.name == rec.rule)?;
            apply_comp_insert(state, rules, ri, *addend, *pos, dom, cod)
        }
        StepLoc::SumFwd { addends, pre } => {
            let si = rules.sum.iter().position(|r| r.name == rec.rule)?;
            apply_sum_forward(state, rules, si, addends, *pre, dom, cod)
        }
        StepLoc::SumRev { addend, pre } => {
            let si = rules.sum.iter().position(|r| r.name == rec.rule)?;
            apply_sum_rev(state, rules, si, *addend, *pre, dom, cod)
        }
        StepLoc::SumInsert => {
            let si = rules.sum.iter().position(|r| r.name == rec.rule)?;
            apply_sum_insert(state, rules, si, dom, cod)
        }
    }
}

fn apply_steps(
    start: &SumNf,
    steps: &[StepRec],
    rules: &Rules,
    dom: &ObjectRef,
    cod: &ObjectRef,
) -> Option<SumNf> {
    let mut state = start.clone();
    for rec in steps {
        state = apply_step(&state, rules, rec, dom, cod)?;
    }
    Some(state)
}

fn replay(rules: &Rules, cfg: &ProveConfig, goal: &Goal, trace: &ProofTrace) -> bool {
    match trace {
        ProofTrace::CanonicalEq => goal.lhs.equiv(&goal.rhs, cfg.sweep_bound),
        ProofTrace::Rewrite { lhs_steps, rhs_steps } => {
            let l = apply_steps(&goal.lhs, lhs_steps, rules, &goal.dom, &goal.cod);
            let r = apply_steps(&goal.rhs, rhs_steps, rules, &goal.dom, &goal.cod);
            matches!((l, r), (Some(l), Some(r)) if l.equiv(&r, cfg.sweep_bound))
        }
        ProofTrace::Meet { lhs_steps, rhs_steps } => {
            let l = apply_steps(&goal.lhs, lhs_steps, rules, &goal.dom, &goal.cod);
            let r = apply_steps(&goal.rhs, rhs_steps, rules, &goal.dom, &goal.cod);
            matches!((l, r), (Some(l), Some(r)) if l.equiv(&r, cfg.sweep_bound))
        }
        ProofTrace::Normalized { lhs_steps, rhs_steps, inner } => {
            let l = apply_steps(&goal.lhs, lhs_steps, rules, &goal.dom, &goal.cod);
            let r = apply_steps(&goal.rhs, rhs_steps, rules, &goal.dom, &goal.cod);
            match (l, r) {
                (Some(lhs), Some(rhs)) => {
                    let g = Goal { lhs, rhs, dom: goal.dom.clone(), cod: goal.cod.clone() };
                    replay(rules, cfg, &g, inner)
                }
                _ => false,
            }
        }
        ProofTrace::Split { var, kind, fresh, branches } => {
            if branches.len() != 2 {
                return false;
            }
            let expect: [IndexExpr; 2] = match kind {
                SplitKind::Parity => [
                    IndexExpr::affine(2, fresh.clone(), 0).expect("valid"),
                    IndexExpr::affine(2, fresh.clone(), 1).expect("valid"),
                ],
                SplitKind::ZeroSucc => [
                    IndexExpr::Lit(0),
                    IndexExpr::affine(1, fresh.clone(), 1).expect("valid"),
                ],
            };
            for (want, (got, sub)) in expect.iter().zip(branches) {
                if want != got {
                    return false;
                }
                let l = goal.lhs.subst_var(var, got, rules.idempotent);
                let r = goal.rhs.subst_var(var, got, rules.idempotent);
                let (lhs, rhs) = match (l, r) {
                    (Ok(a), Ok(b)) => (a, b),
                    _ => return false,
                };
                let g = Goal { lhs, rhs, dom: goal.dom.clone(), cod: goal.cod.clone() };
                if !replay(rules, cfg, &g, sub) {
                    return false;
                }
            }
            true
        }
        ProofTrace::Ext { side, components } => {
            // The components must realize a declared rule in full.
            let rule = rules.ext.iter().find(|r| {
                r.side == *side
                    && match side {
                        ExtSide::Product => r.target == goal.cod,
                        ExtSide::Coproduct => r.target == goal.dom,
                    }
                    && match &r.members {
                        ExtMembers::Indexed(fam) => {
                            components.len() == 1
                                && matches!(
                                    &components[0].0,
                                    Factor::Idx(n, e) if n == fam && e.free_var().is_some()
                                )
                        }
                        ExtMembers::Finite(names) => {
                            components.len() == names.len()
                                && names.iter().zip(components).all(|(n, (f, _))| {
                                    matches!(f, Factor::Gen(g) if g == n)
                                })
                        }
                    }
            });
            if rule.is_none() {
                return false;
            }
            for (f, sub) in components {
                let sig = match rules.sigs.get(f.name()) {
                    Some(s) => s,
                    None => return false,
                };
                let g = match side {
                    ExtSide::Product => Goal {
                        lhs: goal.lhs.prepend(f, rules.idempotent),
                        rhs: goal.rhs.prepend(f, rules.idempotent),
                        dom: goal.dom.clone(),
                        cod: sig.cod.clone(),
                    },
                    ExtSide::Coproduct => Goal {
                        lhs: goal.lhs.append(f, rules.idempotent),
                        rhs: goal.rhs.append(f, rules.idempotent),
                        dom: sig.dom.clone(),
                        cod: goal.cod.clone(),
                    },
                };
                if !replay(rules, cfg, &g, sub) {
                    return false;
                }
            }
            true
        }
        ProofTrace::Transport { prepend, factor, inner } => {
            if partner(rules, factor.name()).is_none() {
                return false;
            }
            let sig = match rules.sigs.get(factor.name()) {
                Some(s) => s,
                None => return false,
            };
            let g = if *prepend {
                if sig.dom != goal.cod {
                    return false;
                }
                Goal {
                    lhs: goal.lhs.prepend(factor, rules.idempotent),
                    rhs: goal.rhs.prepend(factor, rules.idempotent),
                    dom: goal.dom.clone(),
                    cod: sig.cod.clone(),
                }
            } else {
                if sig.cod != goal.dom {
                    return false;
                }
                Goal {
                    lhs: goal.lhs.append(factor, rules.idempotent),
                    rhs: goal.rhs.append(factor, rules.idempotent),
                    dom: sig.dom.clone(),
                    cod: goal.cod.clone(),
                }
            };
            replay(rules, cfg, &g, inner)
        }
    }
}

/// Check a refutation witness: instantiating the goal must rewrite one
/// side to an identity and the other to zero.
fn verify_witness(
    rules: &Rules,
    cfg: &ProveConfig,
    goal: &Goal,
    witness: &BTreeMap<String, u64>,
) -> bool {
    let mut lhs = goal.lhs.clone();
    let mut rhs = goal.rhs.clone();
    for var in goal.vars() {
        let val = witness.get(&var).copied().unwrap_or(0);
        let e = IndexExpr::Lit(val);
        lhs = match lhs.subst_var(&var, &e, rules.idempotent) {
            Ok(x) => x,
            Err(_) => return false,
        };
        rhs = match rhs.subst_var(&var, &e, rules.idempotent) {
            Ok(x) => x,
            Err(_) => return false,
        };
    }
    let mut used = 0usize;
    let lo = normalize_nf(&lhs, &goal.dom, &goal.cod, rules, false, cfg.budget, &mut used);
    let ro = normalize_nf(&rhs, &goal.dom, &goal.cod, rules, false, cfg.budget, &mut used);
    if lo.budget_hit || ro.budget_hit {
        return false;
    }
    (lo.nf.is_identity() && ro.nf.is_zero()) || (lo.nf.is_zero() && ro.nf.is_identity())
}

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

/// Attempt to prove `lhs = rhs` under the presentation's relations with an
/// explicit configuration. Symmetric in its first two arguments.
pub fn prove_with(
    lhs: &MorTerm,
    rhs: &MorTerm,
    pres: &Presentation,
    cfg: &ProveConfig,
) -> Result<ProofResult, ChaseError> {
    pres.validate_term(lhs)?;
    pres.validate_term(rhs)?;
    if lhs.dom() != rhs.dom() || lhs.cod() != rhs.cod() {
        return Err(ChaseError::NotParallel(
            format!("{} -> {}", lhs.dom(), lhs.cod()),
            format!("{} -> {}", rhs.dom(), rhs.cod()),
        ));
    }
    let rules = compile(pres)?;
    let goal = Goal {
        lhs: SumNf::from_term(lhs, pres.idempotent),
        rhs: SumNf::from_term(rhs, pres.idempotent),
        dom: lhs.dom(),
        cod: lhs.cod(),
    };
    let mut prover = Prover::new(&rules, cfg);
    let out = prover.prove(&goal, Depth::default());
    let steps_used = prover.used;
    let result = match out {
        Outcome::Proved(trace) => {
            if replay(&rules, cfg, &goal, &trace) {
                ProofResult {
                    status: ProofStatus::Proved,
                    steps_used,
                    branch_count: trace.leaf_count(),
                    trace: Some(trace),
                }
            } else {
                ProofResult {
                    status: ProofStatus::Unknown {
                        reason: "internal: trace replay failed".into(),
                    },
                    steps_used,
                    branch_count: 0,
                    trace: Some(trace),
                }
            }
        }
        Outcome::Disproved(witness) => {
            if verify_witness(&rules, cfg, &goal, &witness) {
                ProofResult {
                    status: ProofStatus::Disproved { witness },
                    steps_used,
                    branch_count: 1,
                    trace: None,
                }
            } else {
                ProofResult {
                    status: ProofStatus::Unknown {
                        reason: "internal: witness check failed".into(),
                    },
                    steps_used,
                    branch_count: 0,
                    trace: None,
                }
            }
        }
        Outcome::Unknown => {
            let reason = if prover.used >= cfg.budget {
                format!("budget of {} steps exhausted", cfg.budget)
            } else {
                "no strategy closed the goal".into()
            };
            ProofResult {
                status: ProofStatus::Unknown { reason },
                steps_used,
                branch_count: 0,
                trace: None,
            }
        }
    };
    Ok(result)
}

/// Attempt to prove `lhs = rhs` within the given step budget.
pub fn prove_equal(
    lhs: &MorTerm,
    rhs: &MorTerm,
    pres: &Presentation,
    budget: usize,
) -> Result<ProofResult, ChaseError> {
    prove_with(lhs, rhs, pres, &ProveConfig::with_budget(budget))
}

/// Prove a sequence of terms pairwise equal, composing the links into a
/// verdict for `terms[0] = terms[last]`.
pub fn prove_chain(
    terms: &[MorTerm],
    pres: &Presentation,
    cfg: &ProveConfig,
) -> Result<ChainResult, ChaseError> {
    let mut links = Vec::new();
    let mut steps_used = 0usize;
    let mut status = ProofStatus::Proved;
    for (i, pair) in terms.windows(2).enumerate() {
        let r = prove_with(&pair[0], &pair[1], pres, cfg)?;
        steps_used += r.steps_used;
        match (&r.status, &status) {
            (ProofStatus::Disproved { witness }, _) => {
                status = ProofStatus::Disproved { witness: witness.clone() };
            }
            (ProofStatus::Unknown { reason }, ProofStatus::Proved) => {
                status = ProofStatus::Unknown {
                    reason: format!("link {i} unresolved: {reason}"),
                };
            }
            _ => {}
        }
        links.push(r);
    }
    Ok(ChainResult { links, status, steps_used })
}

#[cfg(test)]
mod tests {
    use super::super::{case_split_parity, normalize, resolve_delta, ExtMembers, ExtSide};
    use super::*;
    use crate::term::{add_mor, compose_chain};

    fn obj(name: &str) -> ObjectRef {
        ObjectRef::atomic(name)
    }

    fn g(pres: &Presentation, n: &str) -> MorTerm {
        pres.gen(n).unwrap()
    }

    fn idx(c: u8, v: &str, o: u8) -> IndexExpr {
        IndexExpr::affine(c, v, o).expect("valid index")
    }

    /// Countable product P of copies of A with a halving map v out of the
    /// square P x P.
    fn product_pres() -> Presentation {
        let a = obj("A");
        let p = obj("P");
        let pp = obj("PP");
        let mut pres = Presentation::new("product-square");
        pres.add_family("p", p.clone(), a.clone());
        pres.add_gen("v", pp.clone(), p.clone());
        pres.add_gen("eta", p.clone(), pp.clone());
        pres.add_gen("Pi", a.clone(), p.clone());
        pres.add_gen("r0", pp.clone(), p.clone());
        pres.add_gen("r1", pp.clone(), p.clone());

        let fam = |pres: &Presentation, e: IndexExpr| pres.fam("p", e).unwrap();

        let r0h = compose_chain(vec![g(&pres, "r0"), g(&pres, "eta")]).unwrap();
        pres.add_relation("r0-eta", r0h, MorTerm::Id(p.clone())).unwrap();
        let r1h = compose_chain(vec![g(&pres, "r1"), g(&pres, "eta")]).unwrap();
        pres.add_relation("r1-eta", r1h, MorTerm::Id(p.clone())).unwrap();

        let l = compose_chain(vec![fam(&pres, idx(1, "n", 0)), g(&pres, "Pi")]).unwrap();
        pres.add_relation("p-Pi", l, MorTerm::Id(a.clone())).unwrap();

        let l = compose_chain(vec![fam(&pres, idx(2, "n", 0)), g(&pres, "v")]).unwrap();
        let r = compose_chain(vec![fam(&pres, idx(1, "n", 0)), g(&pres, "r0")]).unwrap();
        pres.add_relation("p-even-v", l, r).unwrap();
        let l = compose_chain(vec![fam(&pres, idx(2, "n", 1)), g(&pres, "v")]).unwrap();
        let r = compose_chain(vec![fam(&pres, idx(1, "n", 0)), g(&pres, "r1")]).unwrap();
        pres.add_relation("p-odd-v", l, r).unwrap();

        pres.add_ext_rule(p, ExtSide::Product, ExtMembers::Indexed("p".into())).unwrap();
        pres
    }

    #[test]
    fn normalize_resolves_even_component() {
        let pres = product_pres();
        let t = compose_chain(vec![
            pres.fam("p", idx(2, "n", 0)).unwrap(),
            pres.gen("v").unwrap(),
            pres.gen("eta").unwrap(),
            pres.gen("Pi").unwrap(),
        ])
        .unwrap();
        let nf = normalize(&t, &pres, 10_000).unwrap();
        assert_eq!(nf, MorTerm::Id(obj("A")));
        let again = normalize(&nf, &pres, 10_000).unwrap();
        assert_eq!(again, nf);
    }

    #[test]
    fn normalize_respects_budget() {
        let pres = product_pres();
        let t = compose_chain(vec![
            pres.fam("p", idx(2, "n", 0)).unwrap(),
            pres.gen("v").unwrap(),
            pres.gen("eta").unwrap(),
            pres.gen("Pi").unwrap(),
        ])
        .unwrap();
        let err = normalize(&t, &pres, 1).unwrap_err();
        assert!(matches!(err, ChaseError::BudgetExhausted(1)));
    }

    #[test]
    fn section_of_diagonal_proved_with_two_branches() {
        let pres = product_pres();
        let lhs = compose_chain(vec![
            pres.gen("v").unwrap(),
            pres.gen("eta").unwrap(),
            pres.gen("Pi").unwrap(),
        ])
        .unwrap();
        let rhs = pres.gen("Pi").unwrap();
        let r = prove_equal(&lhs, &rhs, &pres, 10_000).unwrap();
        assert!(r.is_proved(), "status: {:?}", r.status);
        assert_eq!(r.branch_count, 2);
        let flipped = prove_equal(&rhs, &lhs, &pres, 10_000).unwrap();
        assert!(flipped.is_proved());
    }

    #[test]
    fn interleaving_retracts_to_identity() {
        let mut pres = product_pres();
        let p = obj("P");
        let pp = obj("PP");
        pres.add_gen("vp", p.clone(), pp.clone());
        let l = compose_chain(vec![
            pres.fam("p", idx(1, "n", 0)).unwrap(),
            pres.gen("r0").unwrap(),
            pres.gen("vp").unwrap(),
        ])
        .unwrap();
        pres.add_relation("p-r0-vp", l, pres.fam("p", idx(2, "n", 0)).unwrap()).unwrap();
        let l = compose_chain(vec![
            pres.fam("p", idx(1, "n", 0)).unwrap(),
            pres.gen("r1").unwrap(),
            pres.gen("vp").unwrap(),
        ])
        .unwrap();
        pres.add_relation("p-r1-vp", l, pres.fam("p", idx(2, "n", 1)).unwrap()).unwrap();

        let lhs =
            compose_chain(vec![pres.gen("v").unwrap(), pres.gen("vp").unwrap()]).unwrap();
        let r = prove_equal(&lhs, &MorTerm::Id(p), &pres, 10_000).unwrap();
        assert!(r.is_proved(), "status: {:?}", r.status);
    }

    #[test]
    fn free_generators_stay_unknown_both_ways() {
        let mut pres = Presentation::new("free");
        let a = obj("A");
        pres.add_gen("fgen", a.clone(), a.clone());
        pres.add_gen("ggen", a.clone(), a.clone());
        let f = pres.gen("fgen").unwrap();
        let g = pres.gen("ggen").unwrap();
        let fg = prove_equal(&f, &g, &pres, 2_000).unwrap();
        let gf = prove_equal(&g, &f, &pres, 2_000).unwrap();
        assert!(matches!(fg.status, ProofStatus::Unknown { .. }));
        assert!(matches!(gf.status, ProofStatus::Unknown { .. }));
    }

    #[test]
    fn identity_never_equals_zero() {
        let pres = product_pres();
        let a = obj("A");
        let id = MorTerm::Id(a.clone());
        let zero = MorTerm::Zero { dom: a.clone(), cod: a };
        let r = prove_equal(&id, &zero, &pres, 2_000).unwrap();
        match r.status {
            ProofStatus::Disproved { witness } => assert!(witness.is_empty()),
            other => panic!("expected disproved, got {other:?}"),
        }
    }

    #[test]
    fn delta_goal_disproved_with_concrete_witness() {
        let mut pres = Presentation::new("delta");
        let a = obj("A");
        let p = obj("P");
        let c = obj("C");
        pres.add_family("p", p.clone(), a.clone());
        pres.add_family("sig", a.clone(), c.clone());
        pres.add_gen("Lam", c.clone(), p.clone());
        let l = compose_chain(vec![
            pres.fam("p", idx(1, "n", 0)).unwrap(),
            pres.gen("Lam").unwrap(),
            pres.fam("sig", idx(1, "m", 0)).unwrap(),
        ])
        .unwrap();
        pres.add_delta_relation(
            "p-Lam-sig",
            l,
            MorTerm::Id(a.clone()),
            idx(1, "n", 0),
            idx(1, "m", 0),
        )
        .unwrap();

        let goal = compose_chain(vec![
            pres.fam("p", idx(1, "n", 0)).unwrap(),
            pres.gen("Lam").unwrap(),
            pres.fam("sig", IndexExpr::Lit(0)).unwrap(),
        ])
        .unwrap();
        let zero = MorTerm::Zero { dom: a.clone(), cod: a };
        let r = prove_equal(&goal, &zero, &pres, 10_000).unwrap();
        match r.status {
            ProofStatus::Disproved { witness } => {
                assert_eq!(witness.get("n"), Some(&0));
            }
            other => panic!("expected disproved, got {other:?}"),
        }
    }

    #[test]
    fn sum_rule_applies_under_context() {
        let mut pres = Presentation::new("sums");
        let a = obj("A");
        for name in ["x", "y", "s1g", "s2g", "s3g"] {
            pres.add_gen(name, a.clone(), a.clone());
        }
        pres.add_relation(
            "collapse",
            add_mor(g(&pres, "s1g"), g(&pres, "s2g")).unwrap(),
            g(&pres, "s3g"),
        )
        .unwrap();
        let lhs = add_mor(
            compose_chain(vec![g(&pres, "x"), g(&pres, "s1g"), g(&pres, "y")]).unwrap(),
            compose_chain(vec![g(&pres, "x"), g(&pres, "s2g"), g(&pres, "y")]).unwrap(),
        )
        .unwrap();
        let rhs = compose_chain(vec![g(&pres, "x"), g(&pres, "s3g"), g(&pres, "y")]).unwrap();
        let r = prove_equal(&lhs, &rhs, &pres, 5_000).unwrap();
        assert!(r.is_proved(), "status: {:?}", r.status);
    }

    #[test]
    fn conjugation_transports_through_inverse_pair() {
        let mut pres = Presentation::new("conj");
        let a = obj("A");
        let b = obj("B");
        pres.add_gen("q", a.clone(), b.clone());
        pres.add_gen("qi", b.clone(), a.clone());
        pres.add_gen("s", a.clone(), a.clone());
        pres.add_gen("t", b.clone(), b.clone());
        let qqi = compose_chain(vec![g(&pres, "q"), g(&pres, "qi")]).unwrap();
        pres.add_relation("q-qi", qqi, MorTerm::Id(b.clone())).unwrap();
        let qiq = compose_chain(vec![g(&pres, "qi"), g(&pres, "q")]).unwrap();
        pres.add_relation("qi-q", qiq, MorTerm::Id(a.clone())).unwrap();
        let conj =
            compose_chain(vec![g(&pres, "q"), g(&pres, "s"), g(&pres, "qi")]).unwrap();
        pres.add_relation("conj", conj, g(&pres, "t")).unwrap();

        let rhs =
            compose_chain(vec![g(&pres, "qi"), g(&pres, "t"), g(&pres, "q")]).unwrap();
        let r = prove_equal(&g(&pres, "s"), &rhs, &pres, 10_000).unwrap();
        assert!(r.is_proved(), "status: {:?}", r.status);
        let back = prove_equal(&rhs, &g(&pres, "s"), &pres, 10_000).unwrap();
        assert!(back.is_proved());
    }

    #[test]
    fn additive_inverse_forces_vanishing() {
        let mut pres = Presentation::new("cancel");
        let a = obj("A");
        pres.add_gen("f", a.clone(), a.clone());
        pres.add_gen("fneg", a.clone(), a.clone());
        let zero = MorTerm::Zero { dom: a.clone(), cod: a.clone() };
        pres.add_relation(
            "f-plus-fneg",
            add_mor(g(&pres, "f"), g(&pres, "fneg")).unwrap(),
            zero.clone(),
        )
        .unwrap();
        pres.add_relation(
            "f-doubles",
            add_mor(g(&pres, "f"), g(&pres, "f")).unwrap(),
            g(&pres, "f"),
        )
        .unwrap();

        let r = prove_equal(&g(&pres, "f"), &zero, &pres, 10_000).unwrap();
        assert!(r.is_proved(), "status: {:?}", r.status);
        assert!(matches!(r.trace, Some(ProofTrace::Meet { .. }) | Some(ProofTrace::Normalized { .. })));
    }

    #[test]
    fn finite_componentwise_proof() {
        let mut pres = Presentation::new("pair-swap");
        let a = obj("A");
        let b2 = obj("B2");
        pres.add_gen("pr0", b2.clone(), a.clone());
        pres.add_gen("pr1", b2.clone(), a.clone());
        pres.add_gen("alpha", b2.clone(), b2.clone());
        let l = compose_chain(vec![g(&pres, "pr0"), g(&pres, "alpha")]).unwrap();
        pres.add_relation("pr0-alpha", l, g(&pres, "pr1")).unwrap();
        let l = compose_chain(vec![g(&pres, "pr1"), g(&pres, "alpha")]).unwrap();
        pres.add_relation("pr1-alpha", l, g(&pres, "pr0")).unwrap();
        pres.add_ext_rule(
            b2.clone(),
            ExtSide::Product,
            ExtMembers::Finite(vec!["pr0".into(), "pr1".into()]),
        )
        .unwrap();

        let lhs = compose_chain(vec![g(&pres, "alpha"), g(&pres, "alpha")]).unwrap();
        let r = prove_equal(&lhs, &MorTerm::Id(b2), &pres, 10_000).unwrap();
        assert!(r.is_proved(), "status: {:?}", r.status);
        assert_eq!(r.branch_count, 2);
    }

    #[test]
    fn chains_compose_links() {
        let pres = product_pres();
        let lhs = compose_chain(vec![
            pres.gen("v").unwrap(),
            pres.gen("eta").unwrap(),
            pres.gen("Pi").unwrap(),
        ])
        .unwrap();
        let mid = pres.gen("Pi").unwrap();
        let chain = prove_chain(
            &[lhs, mid.clone(), mid],
            &pres,
            &ProveConfig::default(),
        )
        .unwrap();
        assert!(chain.status.is_proved());
        assert_eq!(chain.links.len(), 2);
    }

    #[test]
    fn parity_split_requires_the_variable() {
        let pres = product_pres();
        let lhs = pres.fam("p", idx(1, "n", 0)).unwrap();
        let rhs = pres.fam("p", idx(1, "n", 0)).unwrap();
        let err = case_split_parity(&lhs, &rhs, "zz").unwrap_err();
        assert!(matches!(err, ChaseError::VariableAbsent(v) if v == "zz"));
        let [(le, _), (lo, _)] = case_split_parity(&lhs, &rhs, "n").unwrap();
        assert_ne!(le, lo);
    }

    #[test]
    fn delta_resolution_matches_direct_evaluation() {
        let a = obj("A");
        let even = idx(2, "n", 0);
        let odd = idx(2, "m", 1);
        for nv in 0..=8u64 {
            for mv in 0..=8u64 {
                let asg = BTreeMap::from([("n".to_string(), nv), ("m".to_string(), mv)]);
                let out = resolve_delta(&even, &odd, &asg, &a).unwrap();
                assert!(matches!(out, MorTerm::Zero { .. }), "2*{nv} vs 2*{mv}+1");
            }
        }
        let n = idx(1, "n", 0);
        let same = resolve_delta(&n, &n, &BTreeMap::new(), &a).unwrap();
        assert_eq!(same, MorTerm::Id(a.clone()));
        let m = idx(1, "m", 0);
        let free = resolve_delta(&n, &m, &BTreeMap::new(), &a);
        assert!(matches!(free, Err(ChaseError::Undecidable(_, _))));
    }
}
