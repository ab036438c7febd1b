//! Sum-of-words normal forms for symbolic morphisms.
//!
//! A `Word` is a composition chain of generator factors, outermost first,
//! together with a set of pending index equations: the word denotes its
//! composite when every equation holds and the zero morphism otherwise.
//! Identity is the empty word, zero the empty sum. A `MorTerm`
//! canonicalizes to a `SumNf` by distributing composition over addition,
//! dropping identities and absorbing zeros.

use crate::term::{IndexExpr, MorTerm, TermError};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Factor {
    Gen(String),
    Idx(String, IndexExpr),
}

impl Factor {
    pub fn name(&self) -> &str {
        match self {
            Factor::Gen(n) | Factor::Idx(n, _) => n,
        }
    }

    pub fn index(&self) -> Option<&IndexExpr> {
        match self {
            Factor::Gen(_) => None,
            Factor::Idx(_, e) => Some(e),
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Gen(n) => write!(f, "{n}"),
            Factor::Idx(n, e) => write!(f, "{n}[{e}]"),
        }
    }
}

/// Pending index equation attached to a word, stored with the two sides in
/// canonical order.
pub type Constraint = (IndexExpr, IndexExpr);

pub fn norm_constraint(a: IndexExpr, b: IndexExpr) -> Constraint {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaDecision {
    /// Equal under every assignment of naturals.
    Equal,
    /// Distinct under every assignment.
    Distinct,
    /// Depends on the assignment.
    Undecided,
}

/// Decide a Kronecker-delta index equation for all assignments at once.
/// The index language `a*var + b` with `a` in {1,2}, `b` in {0,1} keeps
/// every case elementary: the only universal-distinctness sources are
/// unequal literals, unsolvable literal equations, offset mismatch at equal
/// coefficient on a shared variable, and parity mismatch between two
/// coefficient-2 forms.
pub fn decide_delta(a: &IndexExpr, b: &IndexExpr) -> DeltaDecision {
    use IndexExpr::{Affine, Lit};
    match (a, b) {
        (Lit(x), Lit(y)) => {
            if x == y {
                DeltaDecision::Equal
            } else {
                DeltaDecision::Distinct
            }
        }
        (Lit(t), Affine { coeff, offset, .. }) | (Affine { coeff, offset, .. }, Lit(t)) => {
            let c = u64::from(*coeff);
            let o = u64::from(*offset);
            if *t >= o && (*t - o) % c == 0 {
                DeltaDecision::Undecided
            } else {
                DeltaDecision::Distinct
            }
        }
        (
            Affine { coeff: c1, var: v1, offset: o1 },
            Affine { coeff: c2, var: v2, offset: o2 },
        ) => {
            if v1 == v2 {
                if c1 == c2 {
                    if o1 == o2 {
                        DeltaDecision::Equal
                    } else {
                        DeltaDecision::Distinct
                    }
                } else {
                    // Coefficients differ within {1,2}: 2x+ob = x+os has the
                    // single candidate x = os-ob, a natural iff os >= ob.
                    let (ob, os) = if *c1 == 2 { (*o1, *o2) } else { (*o2, *o1) };
                    if os >= ob {
                        DeltaDecision::Undecided
                    } else {
                        DeltaDecision::Distinct
                    }
                }
            } else if *c1 == 2 && *c2 == 2 && o1 != o2 {
                DeltaDecision::Distinct
            } else {
                DeltaDecision::Undecided
            }
        }
    }
}

fn constraint_vars(set: &BTreeSet<Constraint>, out: &mut BTreeSet<String>) {
    for (a, b) in set {
        if let Some(v) = a.free_var() {
            out.insert(v.to_string());
        }
        if let Some(v) = b.free_var() {
            out.insert(v.to_string());
        }
    }
}

fn satisfies(set: &BTreeSet<Constraint>, asg: &BTreeMap<String, u64>) -> bool {
    set.iter().all(|(a, b)| match (a.eval(asg), b.eval(asg)) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    })
}

/// Whether two pending-equation sets cut out the same assignments.
///
/// Decided by sweeping every variable over `0..=bound`. For this affine
/// fragment (coefficients in {1,2}, offsets in {0,1}) agreement on the
/// sweep box forces agreement everywhere: each equation's solution set is
/// an arithmetic line of stride at most 2, and any two conjunction systems
/// that differ do so already at some coordinate below 3. The default bound
/// 8 leaves a wide margin; `tests::sweep_bound_is_stable` cross-checks it
/// against a much larger sweep.
pub fn constraints_equiv(
    a: &BTreeSet<Constraint>,
    b: &BTreeSet<Constraint>,
    bound: u64,
) -> bool {
    if a == b {
        return true;
    }
    let mut vars = BTreeSet::new();
    constraint_vars(a, &mut vars);
    constraint_vars(b, &mut vars);
    let vars: Vec<String> = vars.into_iter().collect();
    if vars.len() > 4 {
        // Too many variables to sweep; fall back to syntactic equality,
        // which was already checked above.
        return false;
    }
    let mut asg = BTreeMap::new();
    sweep(&vars, 0, bound, &mut asg, &mut |asg| satisfies(a, asg) == satisfies(b, asg))
}

fn sweep(
    vars: &[String],
    i: usize,
    bound: u64,
    asg: &mut BTreeMap<String, u64>,
    check: &mut impl FnMut(&BTreeMap<String, u64>) -> bool,
) -> bool {
    if i == vars.len() {
        return check(asg);
    }
    for v in 0..=bound {
        asg.insert(vars[i].clone(), v);
        if !sweep(vars, i + 1, bound, asg, check) {
            return false;
        }
    }
    asg.remove(&vars[i]);
    true
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Word {
    pub factors: Vec<Factor>,
    pub constraints: BTreeSet<Constraint>,
}

impl Word {
    pub fn id() -> Self {
        Word { factors: Vec::new(), constraints: BTreeSet::new() }
    }

    pub fn from_factors(factors: Vec<Factor>) -> Self {
        Word { factors, constraints: BTreeSet::new() }
    }

    pub fn is_id(&self) -> bool {
        self.factors.is_empty() && self.constraints.is_empty()
    }

    /// Resolve every decidable pending equation. Returns false when some
    /// equation is universally refuted, i.e. the word is the zero morphism.
    pub fn resolve(&mut self) -> bool {
        let mut keep = BTreeSet::new();
        for (a, b) in std::mem::take(&mut self.constraints) {
            match decide_delta(&a, &b) {
                DeltaDecision::Equal => {}
                DeltaDecision::Distinct => return false,
                DeltaDecision::Undecided => {
                    keep.insert(norm_constraint(a, b));
                }
            }
        }
        self.constraints = keep;
        true
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for f in &self.factors {
            if let Some(v) = f.index().and_then(IndexExpr::free_var) {
                out.insert(v.to_string());
            }
        }
        constraint_vars(&self.constraints, &mut out);
        out
    }

    /// Substitute an index variable throughout, failing when any occurrence
    /// leaves the affine language.
    pub fn subst_var(&self, var: &str, by: &IndexExpr) -> Result<Word, TermError> {
        let mut factors = Vec::with_capacity(self.factors.len());
        for f in &self.factors {
            factors.push(match f {
                Factor::Gen(n) => Factor::Gen(n.clone()),
                Factor::Idx(n, e) => Factor::Idx(n.clone(), e.subst(var, by)?),
            });
        }
        let mut constraints = BTreeSet::new();
        for (a, b) in &self.constraints {
            constraints.insert(norm_constraint(a.subst(var, by)?, b.subst(var, by)?));
        }
        Ok(Word { factors, constraints })
    }

    pub fn equiv(&self, other: &Word, sweep_bound: u64) -> bool {
        self.factors == other.factors
            && constraints_equiv(&self.constraints, &other.constraints, sweep_bound)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            write!(f, "1")?;
        } else {
            for (i, fac) in self.factors.iter().enumerate() {
                if i > 0 {
                    write!(f, ".")?;
                }
                write!(f, "{fac}")?;
            }
        }
        for (a, b) in &self.constraints {
            write!(f, "[{a}=={b}]")?;
        }
        Ok(())
    }
}

/// Formal sum of words, kept sorted. Duplicates are meaningful unless the
/// presentation declares hom-addition idempotent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SumNf {
    pub addends: Vec<Word>,
}

impl SumNf {
    pub fn zero() -> Self {
        SumNf { addends: Vec::new() }
    }

    pub fn identity() -> Self {
        SumNf { addends: vec![Word::id()] }
    }

    pub fn is_zero(&self) -> bool {
        self.addends.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.addends.len() == 1 && self.addends[0].is_id()
    }

    pub fn from_term(t: &MorTerm, idempotent: bool) -> SumNf {
        let mut nf = SumNf { addends: words_of(t) };
        nf.canonicalize(idempotent);
        nf
    }

    /// Resolve pending equations, drop zero addends, sort, and (for
    /// idempotent hom-monoids) deduplicate.
    pub fn canonicalize(&mut self, idempotent: bool) {
        let mut kept = Vec::with_capacity(self.addends.len());
        for mut w in std::mem::take(&mut self.addends) {
            if w.resolve() {
                kept.push(w);
            }
        }
        kept.sort();
        if idempotent {
            kept.dedup();
        }
        self.addends = kept;
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for w in &self.addends {
            out.append(&mut w.vars());
        }
        out
    }

    pub fn is_ground(&self) -> bool {
        self.vars().is_empty()
    }

    pub fn has_constraints(&self) -> bool {
        self.addends.iter().any(|w| !w.constraints.is_empty())
    }

    pub fn subst_var(&self, var: &str, by: &IndexExpr, idempotent: bool) -> Result<SumNf, TermError> {
        let mut addends = Vec::with_capacity(self.addends.len());
        for w in &self.addends {
            addends.push(w.subst_var(var, by)?);
        }
        let mut nf = SumNf { addends };
        nf.canonicalize(idempotent);
        Ok(nf)
    }

    /// Compose a single factor on the outside of every addend.
    pub fn prepend(&self, f: &Factor, idempotent: bool) -> SumNf {
        let mut addends = self.addends.clone();
        for w in &mut addends {
            w.factors.insert(0, f.clone());
        }
        let mut nf = SumNf { addends };
        nf.canonicalize(idempotent);
        nf
    }

    /// Compose a single factor on the inside of every addend.
    pub fn append(&self, f: &Factor, idempotent: bool) -> SumNf {
        let mut addends = self.addends.clone();
        for w in &mut addends {
            w.factors.push(f.clone());
        }
        let mut nf = SumNf { addends };
        nf.canonicalize(idempotent);
        nf
    }

    /// Multiset equality of addends, where two words match when their
    /// factor chains agree and their pending-equation sets are equivalent.
    pub fn equiv(&self, other: &SumNf, sweep_bound: u64) -> bool {
        if self.addends.len() != other.addends.len() {
            return false;
        }
        let mut used = vec![false; other.addends.len()];
        match_addends(&self.addends, 0, &other.addends, &mut used, sweep_bound)
    }

    pub fn key(&self) -> String {
        self.to_string()
    }
}

fn match_addends(
    xs: &[Word],
    i: usize,
    ys: &[Word],
    used: &mut [bool],
    sweep_bound: u64,
) -> bool {
    if i == xs.len() {
        return true;
    }
    for j in 0..ys.len() {
        if !used[j] && xs[i].equiv(&ys[j], sweep_bound) {
            used[j] = true;
            if match_addends(xs, i + 1, ys, used, sweep_bound) {
                return true;
            }
            used[j] = false;
        }
    }
    false
}

fn words_of(t: &MorTerm) -> Vec<Word> {
    match t {
        MorTerm::Id(_) => vec![Word::id()],
        MorTerm::Zero { .. } => Vec::new(),
        MorTerm::Gen { name, .. } => vec![Word::from_factors(vec![Factor::Gen(name.clone())])],
        MorTerm::IndexedGen { name, index, .. } => {
            vec![Word::from_factors(vec![Factor::Idx(name.clone(), index.clone())])]
        }
        MorTerm::Add(l, r) => {
            let mut out = words_of(l);
            out.extend(words_of(r));
            out
        }
        MorTerm::Comp(outer, inner) => {
            let lhs = words_of(outer);
            let rhs = words_of(inner);
            let mut out = Vec::with_capacity(lhs.len() * rhs.len());
            for wo in &lhs {
                for wi in &rhs {
                    let mut factors = wo.factors.clone();
                    factors.extend(wi.factors.iter().cloned());
                    let mut constraints = wo.constraints.clone();
                    constraints.extend(wi.constraints.iter().cloned());
                    out.push(Word { factors, constraints });
                }
            }
            out
        }
    }
}

impl fmt::Display for SumNf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.addends.is_empty() {
            return write!(f, "0");
        }
        for (i, w) in self.addends.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

/// Variable bindings accumulated while matching rule patterns.
pub type Binds = BTreeMap<String, IndexExpr>;

/// Structural matching of one index pattern against a target expression.
/// A pattern `c*v + d` matches any target that can be written as
/// `c*X + d` for an expression `X` inside the language; `v` binds to `X`.
pub fn match_index(pat: &IndexExpr, tgt: &IndexExpr, binds: &mut Binds) -> bool {
    match pat {
        IndexExpr::Lit(c) => matches!(tgt, IndexExpr::Lit(d) if d == c),
        IndexExpr::Affine { coeff, var, offset } => {
            let c = u64::from(*coeff);
            let d = u64::from(*offset);
            let solved = match tgt {
                IndexExpr::Lit(t) => {
                    if *t >= d && (*t - d) % c == 0 {
                        Some(IndexExpr::Lit((*t - d) / c))
                    } else {
                        None
                    }
                }
                IndexExpr::Affine { coeff: a, var: w, offset: b } => {
                    let a64 = u64::from(*a);
                    let b64 = u64::from(*b);
                    if a64 % c == 0 && b64 >= d && (b64 - d) % c == 0 {
                        let na = (a64 / c) as u8;
                        let nb = ((b64 - d) / c) as u8;
                        if (1..=2).contains(&na) && nb <= 1 {
                            Some(IndexExpr::Affine { coeff: na, var: w.clone(), offset: nb })
                        } else {
                            None
                        }
                    } else {
                        None
                    }
                }
            };
            match solved {
                None => false,
                Some(e) => match binds.get(var) {
                    Some(prev) => *prev == e,
                    None => {
                        binds.insert(var.clone(), e);
                        true
                    }
                },
            }
        }
    }
}

/// Apply accumulated bindings to a rule-side index expression.
pub fn bind_index(e: &IndexExpr, binds: &Binds) -> Result<IndexExpr, TermError> {
    match e {
        IndexExpr::Lit(_) => Ok(e.clone()),
        IndexExpr::Affine { var, .. } => {
            let by = binds.get(var).ok_or_else(|| TermError::UnboundIndex(var.clone()))?;
            e.subst(var, by)
        }
    }
}

/// Match a factor pattern sequence against an exact-length slice.
pub fn match_factors(pattern: &[Factor], target: &[Factor], binds: &mut Binds) -> bool {
    if pattern.len() != target.len() {
        return false;
    }
    for (p, t) in pattern.iter().zip(target) {
        match (p, t) {
            (Factor::Gen(a), Factor::Gen(b)) if a == b => {}
            (Factor::Idx(a, pe), Factor::Idx(b, te)) if a == b => {
                if !match_index(pe, te, binds) {
                    return false;
                }
            }
            _ => return false,
        }
    }
    true
}

/// Instantiate a rule-side factor sequence under bindings.
pub fn bind_factors(pattern: &[Factor], binds: &Binds) -> Result<Vec<Factor>, TermError> {
    pattern
        .iter()
        .map(|f| match f {
            Factor::Gen(n) => Ok(Factor::Gen(n.clone())),
            Factor::Idx(n, e) => Ok(Factor::Idx(n.clone(), bind_index(e, binds)?)),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::ObjectRef;

    fn v(n: &str) -> IndexExpr {
        IndexExpr::var(n)
    }

    fn aff(c: u8, n: &str, o: u8) -> IndexExpr {
        IndexExpr::affine(c, n, o).unwrap()
    }

    #[test]
    fn term_distributes_to_sum_of_words() {
        let a = ObjectRef::atomic("A");
        let f = MorTerm::gen("f", a.clone(), a.clone());
        let g = MorTerm::gen("g", a.clone(), a.clone());
        let h = MorTerm::gen("h", a.clone(), a.clone());
        // h . (f + g) = h.f + h.g
        let t = MorTerm::Comp(
            Box::new(h.clone()),
            Box::new(MorTerm::Add(Box::new(f.clone()), Box::new(g.clone()))),
        );
        let nf = SumNf::from_term(&t, false);
        assert_eq!(nf.to_string(), "h.f + h.g");

        // identity and zero behave as unit and absorbing element
        let t2 = MorTerm::Comp(
            Box::new(MorTerm::Id(a.clone())),
            Box::new(MorTerm::Add(
                Box::new(MorTerm::Zero { dom: a.clone(), cod: a.clone() }),
                Box::new(f),
            )),
        );
        assert_eq!(SumNf::from_term(&t2, false).to_string(), "f");
    }

    #[test]
    fn idempotent_sums_deduplicate() {
        let a = ObjectRef::atomic("A");
        let f = MorTerm::gen("f", a.clone(), a.clone());
        let t = MorTerm::Add(Box::new(f.clone()), Box::new(f));
        assert_eq!(SumNf::from_term(&t, false).addends.len(), 2);
        assert_eq!(SumNf::from_term(&t, true).addends.len(), 1);
    }

    #[test]
    fn delta_decisions_match_sweep_oracle() {
        let cases = vec![
            (v("n"), v("n"), DeltaDecision::Equal),
            (v("n"), v("m"), DeltaDecision::Undecided),
            (aff(2, "n", 0), aff(2, "m", 1), DeltaDecision::Distinct),
            (aff(2, "n", 1), aff(2, "m", 1), DeltaDecision::Undecided),
            (aff(2, "n", 0), aff(1, "m", 1), DeltaDecision::Undecided),
            (aff(2, "n", 0), IndexExpr::lit(7), DeltaDecision::Distinct),
            (aff(2, "n", 1), IndexExpr::lit(7), DeltaDecision::Undecided),
            (aff(1, "n", 1), IndexExpr::lit(0), DeltaDecision::Distinct),
            (aff(2, "n", 0), aff(1, "n", 0), DeltaDecision::Undecided),
            (aff(2, "n", 0), aff(1, "n", 1), DeltaDecision::Undecided),
            (aff(2, "n", 1), aff(1, "n", 0), DeltaDecision::Distinct),
            (aff(1, "n", 0), aff(1, "n", 1), DeltaDecision::Distinct),
        ];
        for (a, b, expect) in cases {
            assert_eq!(decide_delta(&a, &b), expect, "delta({a}, {b})");
            // independent oracle: sweep both variables over 0..=8
            let mut vars = BTreeSet::new();
            if let Some(x) = a.free_var() {
                vars.insert(x.to_string());
            }
            if let Some(x) = b.free_var() {
                vars.insert(x.to_string());
            }
            let vars: Vec<String> = vars.into_iter().collect();
            let mut all = true;
            let mut none = true;
            let mut asg = BTreeMap::new();
            sweep(&vars, 0, 8, &mut asg, &mut |asg| {
                let eq = a.eval(asg).unwrap() == b.eval(asg).unwrap();
                all &= eq;
                none &= !eq;
                true
            });
            match expect {
                DeltaDecision::Equal => assert!(all),
                DeltaDecision::Distinct => assert!(none),
                DeltaDecision::Undecided => assert!(!all && !none),
            }
        }
    }

    #[test]
    fn constraint_equivalence_rescales() {
        // {n == m} versus {2n == 2m}
        let s1: BTreeSet<Constraint> = [(v("n"), v("m"))].into();
        let s2: BTreeSet<Constraint> = [(aff(2, "n", 0), aff(2, "m", 0))].into();
        assert!(constraints_equiv(&s1, &s2, 8));
        // {n == m} versus {2n == 2m+1}: the latter is unsatisfiable
        let s3: BTreeSet<Constraint> = [(aff(2, "n", 0), aff(2, "m", 1))].into();
        assert!(!constraints_equiv(&s1, &s3, 8));
        // {n+1 == m+1} versus {n == m}
        let s4: BTreeSet<Constraint> = [(aff(1, "n", 1), aff(1, "m", 1))].into();
        assert!(constraints_equiv(&s1, &s4, 8));
        // {n == 2m} is strictly finer than {} on satisfying assignments
        let s5: BTreeSet<Constraint> = [(v("n"), aff(2, "m", 0))].into();
        assert!(!constraints_equiv(&s5, &BTreeSet::new(), 8));
    }

    #[test]
    fn sweep_bound_is_stable() {
        // Raising the sweep bound does not change any verdict on a grid of
        // single-equation pairs drawn from the whole index language.
        let shapes = |x: &str| -> Vec<IndexExpr> {
            vec![
                v(x),
                aff(1, x, 1),
                aff(2, x, 0),
                aff(2, x, 1),
                IndexExpr::lit(0),
                IndexExpr::lit(3),
                IndexExpr::lit(6),
            ]
        };
        for a in shapes("n") {
            for b in shapes("m") {
                for c in shapes("n") {
                    for d in shapes("m") {
                        let s1: BTreeSet<Constraint> =
                            [norm_constraint(a.clone(), b.clone())].into();
                        let s2: BTreeSet<Constraint> =
                            [norm_constraint(c.clone(), d.clone())].into();
                        assert_eq!(
                            constraints_equiv(&s1, &s2, 8),
                            constraints_equiv(&s1, &s2, 24),
                            "bound sensitivity for {s1:?} vs {s2:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn index_pattern_matching() {
        let mut binds = Binds::new();
        // 2n matches 2m, binding n := m
        assert!(match_index(&aff(2, "n", 0), &aff(2, "m", 0), &mut binds));
        assert_eq!(binds["n"], v("m"));

        // 2n does not match 2m+1
        let mut binds = Binds::new();
        assert!(!match_index(&aff(2, "n", 0), &aff(2, "m", 1), &mut binds));

        // n+1 matches 2m+1, binding n := 2m
        let mut binds = Binds::new();
        assert!(match_index(&aff(1, "n", 1), &aff(2, "m", 1), &mut binds));
        assert_eq!(binds["n"], aff(2, "m", 0));

        // n+1 does not match 2m (2m-1 has no representation)
        let mut binds = Binds::new();
        assert!(!match_index(&aff(1, "n", 1), &aff(2, "m", 0), &mut binds));

        // 2n matches literal 6 with n := 3, rejects 7
        let mut binds = Binds::new();
        assert!(match_index(&aff(2, "n", 0), &IndexExpr::lit(6), &mut binds));
        assert_eq!(binds["n"], IndexExpr::lit(3));
        let mut binds = Binds::new();
        assert!(!match_index(&aff(2, "n", 0), &IndexExpr::lit(7), &mut binds));

        // repeated variable must bind consistently
        let mut binds = Binds::new();
        assert!(match_index(&v("n"), &v("m"), &mut binds));
        assert!(!match_index(&v("n"), &v("k"), &mut binds));
        assert!(match_index(&v("n"), &v("m"), &mut binds));
    }

    #[test]
    fn word_resolution_kills_refuted_constraints() {
        let mut w = Word::from_factors(vec![Factor::Gen("f".into())]);
        w.constraints.insert(norm_constraint(aff(2, "n", 0), aff(2, "m", 1)));
        assert!(!w.resolve());

        let mut w = Word::id();
        w.constraints.insert(norm_constraint(IndexExpr::lit(3), IndexExpr::lit(3)));
        assert!(w.resolve());
        assert!(w.is_id());
    }
}
