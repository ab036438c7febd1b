//! Object references, affine index expressions and symbolic morphism terms.
//!
//! Terms are the shared currency between the chase engine, the concrete
//! models and the CLI: a term either gets rewritten symbolically or
//! evaluated in a model under a binding.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("domain mismatch: composing `{outer}` after `{inner}` needs dom({outer}) = cod({inner})")]
    DomainMismatch { outer: String, inner: String },
    #[error("parallelism violation: `{left}` and `{right}` do not share domain and codomain")]
    ParallelismViolation { left: String, right: String },
    #[error("index `{0}` leaves the affine language (coeff must stay in {{1,2}}, offset in {{0,1}})")]
    IndexOutOfLanguage(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("unbound index variable `{0}`")]
    UnboundIndex(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ObjectKind {
    Atomic,
    Product(Vec<ObjectRef>),
    Coproduct(Vec<ObjectRef>),
    Zero,
}

/// A named object. Composite kinds carry their parts so models can resolve
/// carriers structurally; the zero object is unique up to name within a
/// presentation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ObjectRef {
    pub name: String,
    pub kind: ObjectKind,
}

impl ObjectRef {
    pub fn atomic(name: impl Into<String>) -> Self {
        ObjectRef { name: name.into(), kind: ObjectKind::Atomic }
    }

    pub fn zero() -> Self {
        ObjectRef { name: "0".into(), kind: ObjectKind::Zero }
    }

    pub fn product(name: impl Into<String>, parts: Vec<ObjectRef>) -> Self {
        ObjectRef { name: name.into(), kind: ObjectKind::Product(parts) }
    }

    pub fn coproduct(name: impl Into<String>, parts: Vec<ObjectRef>) -> Self {
        ObjectRef { name: name.into(), kind: ObjectKind::Coproduct(parts) }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, ObjectKind::Zero)
    }
}

impl fmt::Display for ObjectRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// Index expressions `a*var + b` with `a` in {1,2} and `b` in {0,1}, plus
/// natural literals. This is the whole index language; substitutions that
/// leave it are rejected rather than approximated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IndexExpr {
    Lit(u64),
    Affine { coeff: u8, var: String, offset: u8 },
}

impl IndexExpr {
    pub fn lit(n: u64) -> Self {
        IndexExpr::Lit(n)
    }

    pub fn var(name: impl Into<String>) -> Self {
        IndexExpr::Affine { coeff: 1, var: name.into(), offset: 0 }
    }

    pub fn affine(coeff: u8, var: impl Into<String>, offset: u8) -> Result<Self, TermError> {
        let var = var.into();
        if !(1..=2).contains(&coeff) || offset > 1 {
            return Err(TermError::IndexOutOfLanguage(format!("{coeff}*{var}+{offset}")));
        }
        Ok(IndexExpr::Affine { coeff, var, offset })
    }

    pub fn free_var(&self) -> Option<&str> {
        match self {
            IndexExpr::Lit(_) => None,
            IndexExpr::Affine { var, .. } => Some(var),
        }
    }

    /// Substitute `var := by`, failing when the result has coefficient > 2 or
    /// offset > 1.
    pub fn subst(&self, var: &str, by: &IndexExpr) -> Result<IndexExpr, TermError> {
        match self {
            IndexExpr::Lit(_) => Ok(self.clone()),
            IndexExpr::Affine { coeff, var: v, offset } if v == var => match by {
                IndexExpr::Lit(n) => Ok(IndexExpr::Lit(u64::from(*coeff) * n + u64::from(*offset))),
                IndexExpr::Affine { coeff: c2, var: v2, offset: o2 } => {
                    // a*(c*v + d) + b  =  (a*c)*v + (a*d + b)
                    let new_coeff = coeff.saturating_mul(*c2);
                    let new_offset = coeff.saturating_mul(*o2).saturating_add(*offset);
                    if new_coeff > 2 || new_offset > 1 {
                        return Err(TermError::IndexOutOfLanguage(format!(
                            "{new_coeff}*{v2}+{new_offset}"
                        )));
                    }
                    Ok(IndexExpr::Affine { coeff: new_coeff, var: v2.clone(), offset: new_offset })
                }
            },
            IndexExpr::Affine { .. } => Ok(self.clone()),
        }
    }

    pub fn eval(&self, assignment: &BTreeMap<String, u64>) -> Result<u64, TermError> {
        match self {
            IndexExpr::Lit(n) => Ok(*n),
            IndexExpr::Affine { coeff, var, offset } => assignment
                .get(var)
                .map(|v| u64::from(*coeff) * v + u64::from(*offset))
                .ok_or_else(|| TermError::UnboundIndex(var.clone())),
        }
    }
}

impl fmt::Display for IndexExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexExpr::Lit(n) => write!(f, "{n}"),
            IndexExpr::Affine { coeff, var, offset } => {
                if *coeff == 2 {
                    write!(f, "2{var}")?;
                } else {
                    write!(f, "{var}")?;
                }
                if *offset == 1 {
                    write!(f, "+1")?;
                }
                Ok(())
            }
        }
    }
}

/// Symbolic morphism expression. `Comp(f, g)` is `f` after `g`; `Add` is the
/// hom-monoid sum of two parallel morphisms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MorTerm {
    Gen { name: String, dom: ObjectRef, cod: ObjectRef },
    IndexedGen { name: String, index: IndexExpr, dom: ObjectRef, cod: ObjectRef },
    Id(ObjectRef),
    Zero { dom: ObjectRef, cod: ObjectRef },
    Comp(Box<MorTerm>, Box<MorTerm>),
    Add(Box<MorTerm>, Box<MorTerm>),
}

impl MorTerm {
    pub fn gen(name: impl Into<String>, dom: ObjectRef, cod: ObjectRef) -> Self {
        MorTerm::Gen { name: name.into(), dom, cod }
    }

    pub fn indexed(
        name: impl Into<String>,
        index: IndexExpr,
        dom: ObjectRef,
        cod: ObjectRef,
    ) -> Self {
        MorTerm::IndexedGen { name: name.into(), index, dom, cod }
    }

    pub fn dom(&self) -> ObjectRef {
        match self {
            MorTerm::Gen { dom, .. } | MorTerm::IndexedGen { dom, .. } | MorTerm::Zero { dom, .. } => {
                dom.clone()
            }
            MorTerm::Id(o) => o.clone(),
            MorTerm::Comp(_, inner) => inner.dom(),
            MorTerm::Add(l, _) => l.dom(),
        }
    }

    pub fn cod(&self) -> ObjectRef {
        match self {
            MorTerm::Gen { cod, .. } | MorTerm::IndexedGen { cod, .. } | MorTerm::Zero { cod, .. } => {
                cod.clone()
            }
            MorTerm::Id(o) => o.clone(),
            MorTerm::Comp(outer, _) => outer.cod(),
            MorTerm::Add(l, _) => l.cod(),
        }
    }
}

/// `compose(f, g)` = f after g. Rejects non-matching ends.
pub fn compose(outer: MorTerm, inner: MorTerm) -> Result<MorTerm, TermError> {
    if outer.dom() != inner.cod() {
        return Err(TermError::DomainMismatch {
            outer: outer.to_string(),
            inner: inner.to_string(),
        });
    }
    Ok(MorTerm::Comp(Box::new(outer), Box::new(inner)))
}

/// Left-to-right composition of a non-empty chain, outermost first.
pub fn compose_chain(chain: Vec<MorTerm>) -> Result<MorTerm, TermError> {
    let mut it = chain.into_iter();
    let first = it.next().expect("compose_chain needs at least one factor");
    it.try_fold(first, compose)
}

/// Formal hom-monoid sum of two parallel terms.
pub fn add_mor(left: MorTerm, right: MorTerm) -> Result<MorTerm, TermError> {
    if left.dom() != right.dom() || left.cod() != right.cod() {
        return Err(TermError::ParallelismViolation {
            left: left.to_string(),
            right: right.to_string(),
        });
    }
    Ok(MorTerm::Add(Box::new(left), Box::new(right)))
}

impl fmt::Display for MorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Mirrors the spec-file term grammar: `.` for composition (tighter), `+` for sums.
        match self {
            MorTerm::Gen { name, .. } => write!(f, "{name}"),
            MorTerm::IndexedGen { name, index, .. } => write!(f, "{name}[{index}]"),
            MorTerm::Id(o) => write!(f, "id({o})"),
            MorTerm::Zero { dom, cod } => write!(f, "zero({dom},{cod})"),
            MorTerm::Comp(outer, inner) => {
                let wrap = |t: &MorTerm, f: &mut fmt::Formatter<'_>| match t {
                    MorTerm::Add(..) => write!(f, "({t})"),
                    _ => write!(f, "{t}"),
                };
                wrap(outer, f)?;
                write!(f, ".")?;
                wrap(inner, f)
            }
            MorTerm::Add(l, r) => write!(f, "{l}+{r}"),
        }
    }
}
