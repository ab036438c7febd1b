//! The model interface: a category whose hom-sets are commutative monoids,
//! with finite biproducts, concrete enough to evaluate terms in.

use crate::report::Report;
use crate::term::{MorTerm, ObjectKind, ObjectRef, TermError};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Debug;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("{0}")]
    Term(#[from] TermError),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("object `{0}` is not bound in the model")]
    UnboundObject(String),
    #[error("operation not supported by this model: {0}")]
    ModelUnsupported(String),
    #[error("index variable `{0}` has no value")]
    UnresolvedIndex(String),
    #[error("indexed generator `{name}` has no component {index}")]
    FamilyIndexOutOfRange { name: String, index: u64 },
}

/// Injections and projections of a finite biproduct, in summand order.
pub struct BiproductData<M: CategoryModel + ?Sized> {
    pub object: M::Obj,
    pub injections: Vec<M::Mor>,
    pub projections: Vec<M::Mor>,
}

pub trait CategoryModel {
    type Obj: Clone + Eq + Ord + Debug;
    type Mor: Clone + Eq + Ord + Debug;

    fn name(&self) -> &'static str;
    fn zero_object(&self) -> Self::Obj;
    fn identity(&self, o: &Self::Obj) -> Self::Mor;
    fn zero_mor(&self, dom: &Self::Obj, cod: &Self::Obj) -> Self::Mor;
    fn dom(&self, f: &Self::Mor) -> Self::Obj;
    fn cod(&self, f: &Self::Mor) -> Self::Obj;
    /// `compose(f, g)` is f after g.
    fn compose(&self, outer: &Self::Mor, inner: &Self::Mor) -> Result<Self::Mor, ModelError>;
    fn add(&self, f: &Self::Mor, g: &Self::Mor) -> Result<Self::Mor, ModelError>;
    fn biproduct(&self, parts: &[Self::Obj]) -> BiproductData<Self>;
    fn carrier_size(&self, o: &Self::Obj) -> Option<u128>;
    fn hom_size(&self, dom: &Self::Obj, cod: &Self::Obj) -> Option<u128>;
    /// All morphisms dom -> cod, or None when the hom-set exceeds `cap`.
    fn enumerate_hom(&self, dom: &Self::Obj, cod: &Self::Obj, cap: u128)
        -> Option<Vec<Self::Mor>>;
    fn sample_mor(&self, dom: &Self::Obj, cod: &Self::Obj, rng: &mut dyn RngCore) -> Self::Mor;

    fn equal(&self, f: &Self::Mor, g: &Self::Mor) -> bool {
        f == g
    }
}

/// The hom-set monoid of a fixed pair of objects, as a first-class witness.
pub struct HomMonoidWitness<M: CategoryModel> {
    pub dom: M::Obj,
    pub cod: M::Obj,
    pub zero: M::Mor,
}

pub fn hom_monoid<M: CategoryModel>(model: &M, dom: &M::Obj, cod: &M::Obj) -> HomMonoidWitness<M> {
    HomMonoidWitness { dom: dom.clone(), cod: cod.clone(), zero: model.zero_mor(dom, cod) }
}

/// Names bound to concrete carriers and morphisms for term evaluation.
#[derive(Clone)]
pub struct ModelBinding<M: CategoryModel> {
    pub objects: BTreeMap<String, M::Obj>,
    pub gens: BTreeMap<String, M::Mor>,
    /// Indexed families, one concrete morphism per index starting at 0.
    pub families: BTreeMap<String, Vec<M::Mor>>,
}

impl<M: CategoryModel> Default for ModelBinding<M> {
    fn default() -> Self {
        ModelBinding { objects: BTreeMap::new(), gens: BTreeMap::new(), families: BTreeMap::new() }
    }
}

/// Carrier of an object reference: atoms via the binding, composites via the
/// model's biproduct, which serves as both product and coproduct here.
pub fn resolve_carrier<M: CategoryModel>(
    model: &M,
    binding: &ModelBinding<M>,
    obj: &ObjectRef,
) -> Result<M::Obj, ModelError> {
    match &obj.kind {
        ObjectKind::Zero => Ok(model.zero_object()),
        ObjectKind::Atomic => binding
            .objects
            .get(&obj.name)
            .cloned()
            .ok_or_else(|| ModelError::UnboundObject(obj.name.clone())),
        ObjectKind::Product(parts) | ObjectKind::Coproduct(parts) => {
            let carriers = parts
                .iter()
                .map(|p| resolve_carrier(model, binding, p))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(model.biproduct(&carriers).object)
        }
    }
}

/// Reserved generator names `@inj:k` / `@proj:k` denote the structural
/// morphisms of a composite object and are resolved without a binding entry.
pub fn structural_injection(k: usize, part: &ObjectRef, whole: &ObjectRef) -> MorTerm {
    MorTerm::gen(format!("@inj:{k}"), part.clone(), whole.clone())
}

pub fn structural_projection(k: usize, whole: &ObjectRef, part: &ObjectRef) -> MorTerm {
    MorTerm::gen(format!("@proj:{k}"), whole.clone(), part.clone())
}

fn resolve_structural<M: CategoryModel>(
    model: &M,
    binding: &ModelBinding<M>,
    name: &str,
    dom: &ObjectRef,
    cod: &ObjectRef,
) -> Result<Option<M::Mor>, ModelError> {
    let Some(rest) = name.strip_prefix('@') else { return Ok(None) };
    let (which, k) = rest
        .split_once(':')
        .ok_or_else(|| ModelError::ShapeMismatch(format!("malformed structural name `{name}`")))?;
    let k: usize = k
        .parse()
        .map_err(|_| ModelError::ShapeMismatch(format!("malformed structural index `{name}`")))?;
    let whole = if which == "inj" { cod } else { dom };
    let parts = match &whole.kind {
        ObjectKind::Product(parts) | ObjectKind::Coproduct(parts) => parts,
        _ => {
            return Err(ModelError::ShapeMismatch(format!(
                "structural `{name}` used on non-composite object `{whole}`"
            )))
        }
    };
    let carriers = parts
        .iter()
        .map(|p| resolve_carrier(model, binding, p))
        .collect::<Result<Vec<_>, _>>()?;
    let data = model.biproduct(&carriers);
    let mors = if which == "inj" { &data.injections } else { &data.projections };
    mors.get(k)
        .cloned()
        .map(Some)
        .ok_or_else(|| ModelError::ShapeMismatch(format!("structural index out of range `{name}`")))
}

/// Evaluate a term under a binding and an assignment of index variables.
pub fn evaluate<M: CategoryModel>(
    model: &M,
    binding: &ModelBinding<M>,
    term: &MorTerm,
    indices: &BTreeMap<String, u64>,
) -> Result<M::Mor, ModelError> {
    match term {
        MorTerm::Id(o) => {
            let carrier = resolve_carrier(model, binding, o)?;
            Ok(model.identity(&carrier))
        }
        MorTerm::Zero { dom, cod } => {
            let d = resolve_carrier(model, binding, dom)?;
            let c = resolve_carrier(model, binding, cod)?;
            Ok(model.zero_mor(&d, &c))
        }
        MorTerm::Gen { name, dom, cod } => {
            if let Some(m) = resolve_structural(model, binding, name, dom, cod)? {
                return Ok(m);
            }
            binding
                .gens
                .get(name)
                .cloned()
                .ok_or_else(|| ModelError::Term(TermError::UnknownGenerator(name.clone())))
        }
        MorTerm::IndexedGen { name, index, .. } => {
            let i = index.eval(indices)?;
            let family = binding
                .families
                .get(name)
                .ok_or_else(|| ModelError::Term(TermError::UnknownGenerator(name.clone())))?;
            family
                .get(i as usize)
                .cloned()
                .ok_or(ModelError::FamilyIndexOutOfRange { name: name.clone(), index: i })
        }
        MorTerm::Comp(outer, inner) => {
            let o = evaluate(model, binding, outer, indices)?;
            let i = evaluate(model, binding, inner, indices)?;
            model.compose(&o, &i)
        }
        MorTerm::Add(l, r) => {
            let l = evaluate(model, binding, l, indices)?;
            let r = evaluate(model, binding, r, indices)?;
            model.add(&l, &r)
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnrichmentConfig {
    /// Hom-sets at most this large are checked exhaustively.
    pub exhaustive_cap: u128,
    /// Sample count per law for larger hom-sets.
    pub samples: usize,
}

impl Default for EnrichmentConfig {
    fn default() -> Self {
        EnrichmentConfig { exhaustive_cap: 64, samples: 16 }
    }
}

fn homs_for_law<M: CategoryModel>(
    model: &M,
    dom: &M::Obj,
    cod: &M::Obj,
    cfg: &EnrichmentConfig,
    rng: &mut dyn RngCore,
) -> Vec<M::Mor> {
    if let Some(all) = model.enumerate_hom(dom, cod, cfg.exhaustive_cap) {
        all
    } else {
        (0..cfg.samples).map(|_| model.sample_mor(dom, cod, rng)).collect()
    }
}

/// Check the enrichment laws over every pair and triple drawn from `objects`:
/// hom-sets are commutative monoids, composition is bilinear and absorbs zero.
pub fn check_enrichment<M: CategoryModel>(
    model: &M,
    objects: &[M::Obj],
    cfg: &EnrichmentConfig,
    rng: &mut dyn RngCore,
) -> Report {
    let mut report = Report::new(format!("enrichment[{}]", model.name()));

    for x in objects {
        for y in objects {
            let witness = hom_monoid(model, x, y);
            let homs = homs_for_law(model, x, y, cfg, rng);
            let mut monoid_ok = true;
            let mut detail = String::new();
            'outer: for f in &homs {
                let fz = model.add(f, &witness.zero).unwrap();
                if !model.equal(&fz, f) {
                    monoid_ok = false;
                    detail = format!("zero not neutral at {f:?}");
                    break;
                }
                for g in &homs {
                    let fg = model.add(f, g).unwrap();
                    let gf = model.add(g, f).unwrap();
                    if !model.equal(&fg, &gf) {
                        monoid_ok = false;
                        detail = format!("addition not commutative at {f:?}, {g:?}");
                        break 'outer;
                    }
                    for h in &homs {
                        let l = model.add(&model.add(f, g).unwrap(), h).unwrap();
                        let r = model.add(f, &model.add(g, h).unwrap()).unwrap();
                        if !model.equal(&l, &r) {
                            monoid_ok = false;
                            detail = format!("addition not associative at {f:?}, {g:?}, {h:?}");
                            break 'outer;
                        }
                    }
                }
            }
            report.record(
                format!("hom-monoid {:?} -> {:?}", x, y),
                monoid_ok,
                if monoid_ok { format!("{} morphisms checked", homs.len()) } else { detail },
            );
        }
    }

    for x in objects {
        for y in objects {
            for z in objects {
                let fs = homs_for_law(model, x, y, cfg, rng);
                let gs = homs_for_law(model, y, z, cfg, rng);
                let mut bilinear_ok = true;
                let mut detail = String::new();
                'bil: for f1 in &fs {
                    for f2 in &fs {
                        for g in &gs {
                            let lhs = model.compose(g, &model.add(f1, f2).unwrap()).unwrap();
                            let rhs = model
                                .add(&model.compose(g, f1).unwrap(), &model.compose(g, f2).unwrap())
                                .unwrap();
                            if !model.equal(&lhs, &rhs) {
                                bilinear_ok = false;
                                detail = format!("g.(f1+f2) != g.f1+g.f2 at {f1:?}, {f2:?}, {g:?}");
                                break 'bil;
                            }
                        }
                    }
                }
                'bil2: for g1 in &gs {
                    for g2 in &gs {
                        for f in &fs {
                            let lhs = model.compose(&model.add(g1, g2).unwrap(), f).unwrap();
                            let rhs = model
                                .add(&model.compose(g1, f).unwrap(), &model.compose(g2, f).unwrap())
                                .unwrap();
                            if !model.equal(&lhs, &rhs) {
                                bilinear_ok = false;
                                detail = format!("(g1+g2).f != g1.f+g2.f at {g1:?}, {g2:?}, {f:?}");
                                break 'bil2;
                            }
                        }
                    }
                }
                // zero absorption in both slots
                let zf = model.zero_mor(x, y);
                for g in &gs {
                    let gz = model.compose(g, &zf).unwrap();
                    if !model.equal(&gz, &model.zero_mor(x, z)) {
                        bilinear_ok = false;
                        detail = format!("g.0 != 0 at {g:?}");
                        break;
                    }
                }
                report.record(
                    format!("bilinearity {:?} -> {:?} -> {:?}", x, y, z),
                    bilinear_ok,
                    if bilinear_ok { String::new() } else { detail },
                );
            }
        }
    }

    report
}
