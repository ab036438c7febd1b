//! Finite biproducts as verified structures, diagonal units and counits,
//! and the reduction of a componentwise-diagonal transformation to the
//! canonical comparison morphism.
//!
//! The term-level half builds [`Biproduct`] packages whose structural
//! relations are checked in a model at construction time. The concrete half
//! works directly with model objects and morphisms: component matrices,
//! slot transformations, naturality sampling, and the block-inverse
//! reduction with its certificate.

use crate::model::{
    evaluate, resolve_carrier, structural_injection, structural_projection, CategoryModel,
    ModelBinding, ModelError,
};
use crate::report::Report;
use crate::term::{add_mor, compose, compose_chain, MorTerm, ObjectRef, TermError};
use rand::RngCore;
use std::collections::BTreeMap;
use thiserror::Error;

/// Hom-sets larger than this are not searched for composition inverses.
pub const INVERT_SEARCH_CAP: u128 = 4096;

const ARROW_ENUM_CAP: u128 = 64;

#[derive(Debug, Error)]
pub enum BiproductError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("component at slot {slot} on {object} has no two-sided inverse")]
    NotInvertible { slot: usize, object: String },
    #[error("verified construction failed: {0}")]
    CheckFailed(String),
}

// ---------------------------------------------------------------------------
// Term-level biproducts
// ---------------------------------------------------------------------------

/// A finite biproduct with its structural morphisms, verified in a model on
/// construction: projection-injection deltas and the decomposition sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Biproduct {
    pub summands: Vec<ObjectRef>,
    pub object: ObjectRef,
    pub injections: Vec<MorTerm>,
    pub projections: Vec<MorTerm>,
}

fn biproduct_name(parts: &[ObjectRef]) -> String {
    let inner: Vec<&str> = parts.iter().map(|p| p.name.as_str()).collect();
    format!("({})", inner.join("(+)"))
}

/// Biproduct of a finite family of objects, with every structural relation
/// checked in the model under the given binding.
pub fn build_family_biproduct<M: CategoryModel>(
    model: &M,
    binding: &ModelBinding<M>,
    parts: &[ObjectRef],
) -> Result<Biproduct, BiproductError> {
    let object = ObjectRef::product(biproduct_name(parts), parts.to_vec());
    let injections: Vec<MorTerm> =
        parts.iter().enumerate().map(|(k, p)| structural_injection(k, p, &object)).collect();
    let projections: Vec<MorTerm> =
        parts.iter().enumerate().map(|(k, p)| structural_projection(k, &object, p)).collect();
    let bp = Biproduct { summands: parts.to_vec(), object, injections, projections };
    verify_biproduct(model, binding, &bp)?;
    Ok(bp)
}

/// Binary biproduct of two objects.
pub fn build_biproduct<M: CategoryModel>(
    model: &M,
    binding: &ModelBinding<M>,
    x: &ObjectRef,
    y: &ObjectRef,
) -> Result<Biproduct, BiproductError> {
    build_family_biproduct(model, binding, &[x.clone(), y.clone()])
}

fn eval<M: CategoryModel>(
    model: &M,
    binding: &ModelBinding<M>,
    term: &MorTerm,
) -> Result<M::Mor, BiproductError> {
    Ok(evaluate(model, binding, term, &BTreeMap::new())?)
}

fn verify_biproduct<M: CategoryModel>(
    model: &M,
    binding: &ModelBinding<M>,
    bp: &Biproduct,
) -> Result<(), BiproductError> {
    let carriers: Vec<M::Obj> = bp
        .summands
        .iter()
        .map(|p| resolve_carrier(model, binding, p))
        .collect::<Result<_, _>>()?;
    let whole = resolve_carrier(model, binding, &bp.object)?;
    for (k, inj) in bp.injections.iter().enumerate() {
        for (l, proj) in bp.projections.iter().enumerate() {
            let got = eval(model, binding, &compose(proj.clone(), inj.clone())?)?;
            let want = if k == l {
                model.identity(&carriers[k])
            } else {
                model.zero_mor(&carriers[k], &carriers[l])
            };
            if !model.equal(&got, &want) {
                return Err(BiproductError::CheckFailed(format!(
                    "projection {l} after injection {k} is not {} on {}",
                    if k == l { "the identity" } else { "zero" },
                    bp.object
                )));
            }
        }
    }
    let mut acc = model.zero_mor(&whole, &whole);
    for (inj, proj) in bp.injections.iter().zip(&bp.projections) {
        let step = eval(model, binding, &compose(inj.clone(), proj.clone())?)?;
        acc = model.add(&acc, &step)?;
    }
    if !model.equal(&acc, &model.identity(&whole)) {
        return Err(BiproductError::CheckFailed(format!(
            "injection-projection sum is not the identity on {}",
            bp.object
        )));
    }
    Ok(())
}

/// A left-nested iteration of binary biproducts together with the explicit
/// flattening isomorphism onto the flat family biproduct, verified two-sided.
#[derive(Debug, Clone)]
pub struct IteratedBiproduct {
    /// Binary steps, innermost first; step `i` pairs the prefix with part `i + 1`.
    pub steps: Vec<Biproduct>,
    pub nested: ObjectRef,
    pub flat: Biproduct,
    pub flatten: MorTerm,
    pub unflatten: MorTerm,
}

/// Build the n-ary biproduct by iterating the binary construction on the
/// left and connect it to the flat form with an explicit isomorphism.
pub fn iterated_biproduct<M: CategoryModel>(
    model: &M,
    binding: &ModelBinding<M>,
    parts: &[ObjectRef],
) -> Result<IteratedBiproduct, BiproductError> {
    if parts.is_empty() {
        return Err(BiproductError::CheckFailed(
            "iterated biproduct needs at least one summand".into(),
        ));
    }
    let flat = build_family_biproduct(model, binding, parts)?;
    let mut steps = Vec::new();
    let mut nested = parts[0].clone();
    for part in &parts[1..] {
        let step = build_biproduct(model, binding, &nested, part)?;
        nested = step.object.clone();
        steps.push(step);
    }

    // Leaf projections and injections of the nested object, in summand order.
    let mut leaf_projs = vec![MorTerm::Id(parts[0].clone())];
    let mut leaf_injs = vec![MorTerm::Id(parts[0].clone())];
    for step in &steps {
        let mut next_projs: Vec<MorTerm> = leaf_projs
            .iter()
            .map(|pr| compose(pr.clone(), step.projections[0].clone()))
            .collect::<Result<_, _>>()?;
        next_projs.push(step.projections[1].clone());
        leaf_projs = next_projs;
        let mut next_injs: Vec<MorTerm> = leaf_injs
            .iter()
            .map(|ij| compose(step.injections[0].clone(), ij.clone()))
            .collect::<Result<_, _>>()?;
        next_injs.push(step.injections[1].clone());
        leaf_injs = next_injs;
    }

    let mut flatten: Option<MorTerm> = None;
    let mut unflatten: Option<MorTerm> = None;
    for k in 0..parts.len() {
        let down = compose(flat.injections[k].clone(), leaf_projs[k].clone())?;
        let up = compose(leaf_injs[k].clone(), flat.projections[k].clone())?;
        flatten = Some(match flatten {
            None => down,
            Some(acc) => add_mor(acc, down)?,
        });
        unflatten = Some(match unflatten {
            None => up,
            Some(acc) => add_mor(acc, up)?,
        });
    }
    let flatten = flatten.expect("at least one summand");
    let unflatten = unflatten.expect("at least one summand");

    let flat_carrier = resolve_carrier(model, binding, &flat.object)?;
    let nested_carrier = resolve_carrier(model, binding, &nested)?;
    let round = eval(model, binding, &compose(flatten.clone(), unflatten.clone())?)?;
    if !model.equal(&round, &model.identity(&flat_carrier)) {
        return Err(BiproductError::CheckFailed(
            "flatten after unflatten is not the identity".into(),
        ));
    }
    let round = eval(model, binding, &compose(unflatten.clone(), flatten.clone())?)?;
    if !model.equal(&round, &model.identity(&nested_carrier)) {
        return Err(BiproductError::CheckFailed(
            "unflatten after flatten is not the identity".into(),
        ));
    }

    Ok(IteratedBiproduct { steps, nested, flat, flatten, unflatten })
}

// ---------------------------------------------------------------------------
// Sums through the diagonal
// ---------------------------------------------------------------------------

/// Diagonal unit X -> X(+)X of a biproduct with equal summands.
pub fn diagonal_unit(pair: &Biproduct) -> Result<MorTerm, BiproductError> {
    require_equal_pair(pair)?;
    Ok(add_mor(pair.injections[0].clone(), pair.injections[1].clone())?)
}

/// Codiagonal counit X(+)X -> X of a biproduct with equal summands.
pub fn codiagonal_counit(pair: &Biproduct) -> Result<MorTerm, BiproductError> {
    require_equal_pair(pair)?;
    Ok(add_mor(pair.projections[0].clone(), pair.projections[1].clone())?)
}

fn require_equal_pair(pair: &Biproduct) -> Result<(), BiproductError> {
    if pair.summands.len() != 2 || pair.summands[0] != pair.summands[1] {
        return Err(BiproductError::CheckFailed(format!(
            "diagonal needs a binary biproduct with equal summands, got {}",
            pair.object
        )));
    }
    Ok(())
}

/// Componentwise map f(+)g between two binary biproducts.
pub fn pairwise_map(
    f: &MorTerm,
    g: &MorTerm,
    dom_pair: &Biproduct,
    cod_pair: &Biproduct,
) -> Result<MorTerm, BiproductError> {
    let left = compose_chain(vec![
        cod_pair.injections[0].clone(),
        f.clone(),
        dom_pair.projections[0].clone(),
    ])?;
    let right = compose_chain(vec![
        cod_pair.injections[1].clone(),
        g.clone(),
        dom_pair.projections[1].clone(),
    ])?;
    Ok(add_mor(left, right)?)
}

/// Compute f + g as counit . (f(+)g) . unit and check that it agrees with
/// the hom-monoid addition of the model.
pub fn sum_via_biproduct<M: CategoryModel>(
    model: &M,
    binding: &ModelBinding<M>,
    f: &MorTerm,
    g: &MorTerm,
) -> Result<M::Mor, BiproductError> {
    let dom_pair = build_biproduct(model, binding, &f.dom(), &f.dom())?;
    let cod_pair = build_biproduct(model, binding, &f.cod(), &f.cod())?;
    let unit = diagonal_unit(&dom_pair)?;
    let counit = codiagonal_counit(&cod_pair)?;
    let spread = pairwise_map(f, g, &dom_pair, &cod_pair)?;
    let term = compose_chain(vec![counit, spread, unit])?;
    let via = eval(model, binding, &term)?;
    let direct = model.add(&eval(model, binding, f)?, &eval(model, binding, g)?)?;
    if !model.equal(&via, &direct) {
        return Err(BiproductError::CheckFailed(format!(
            "diagonal sum disagrees with hom-monoid addition for {f} and {g}"
        )));
    }
    Ok(via)
}

/// Check counit.(i f p).unit + counit.(j g q).unit = counit.(f(+)g).unit,
/// the splitting of the diagonal sum into its two routed halves.
pub fn intro_sum_identity<M: CategoryModel>(
    model: &M,
    binding: &ModelBinding<M>,
    f: &MorTerm,
    g: &MorTerm,
) -> Result<bool, BiproductError> {
    let dom_pair = build_biproduct(model, binding, &f.dom(), &f.dom())?;
    let cod_pair = build_biproduct(model, binding, &f.cod(), &f.cod())?;
    let unit = diagonal_unit(&dom_pair)?;
    let counit = codiagonal_counit(&cod_pair)?;
    let route = |arrow: &MorTerm, slot: usize| -> Result<M::Mor, BiproductError> {
        let term = compose_chain(vec![
            counit.clone(),
            cod_pair.injections[slot].clone(),
            arrow.clone(),
            dom_pair.projections[slot].clone(),
            unit.clone(),
        ])?;
        eval(model, binding, &term)
    };
    let lhs = model.add(&route(f, 0)?, &route(g, 1)?)?;
    let spread = pairwise_map(f, g, &dom_pair, &cod_pair)?;
    let rhs = eval(model, binding, &compose_chain(vec![counit, spread, unit])?)?;
    Ok(model.equal(&lhs, &rhs))
}

// ---------------------------------------------------------------------------
// Concrete diagonal adjunction data
// ---------------------------------------------------------------------------

/// Injections and projections of a concrete family biproduct, playing the
/// unit and counit of the diagonal against the two indexed functors.
pub struct DiagonalAdjunction<M: CategoryModel> {
    pub family: Vec<M::Obj>,
    pub object: M::Obj,
    pub unit: Vec<M::Mor>,
    pub counit: Vec<M::Mor>,
}

pub fn diagonal_adjunction<M: CategoryModel>(
    model: &M,
    family: &[M::Obj],
) -> DiagonalAdjunction<M> {
    let data = model.biproduct(family);
    DiagonalAdjunction {
        family: family.to_vec(),
        object: data.object,
        unit: data.injections,
        counit: data.projections,
    }
}

/// Sum of routed components sigma_k . f_k . p_k between two adjunctions of
/// the same arity.
pub fn block_diagonal<M: CategoryModel>(
    model: &M,
    dom: &DiagonalAdjunction<M>,
    cod: &DiagonalAdjunction<M>,
    components: &[M::Mor],
) -> Result<M::Mor, BiproductError> {
    if components.len() != dom.family.len() || components.len() != cod.family.len() {
        return Err(ModelError::ShapeMismatch(format!(
            "{} components for a {} -> {} block map",
            components.len(),
            dom.family.len(),
            cod.family.len()
        ))
        .into());
    }
    let mut acc = model.zero_mor(&dom.object, &cod.object);
    for (k, comp) in components.iter().enumerate() {
        if model.dom(comp) != dom.family[k] || model.cod(comp) != cod.family[k] {
            return Err(ModelError::ShapeMismatch(format!(
                "component {k} does not map summand {k} to summand {k}"
            ))
            .into());
        }
        let routed = model.compose(&cod.unit[k], &model.compose(comp, &dom.counit[k])?)?;
        acc = model.add(&acc, &routed)?;
    }
    Ok(acc)
}

/// Check the unit and counit naturality squares for a family of component
/// morphisms between two adjunctions.
pub fn adjunction_naturality<M: CategoryModel>(
    model: &M,
    dom: &DiagonalAdjunction<M>,
    cod: &DiagonalAdjunction<M>,
    components: &[M::Mor],
) -> Result<Report, BiproductError> {
    let block = block_diagonal(model, dom, cod, components)?;
    let mut report = Report::new("diagonal adjunction naturality");
    for (k, comp) in components.iter().enumerate() {
        let lhs = model.compose(&block, &dom.unit[k])?;
        let rhs = model.compose(&cod.unit[k], comp)?;
        report.record(
            format!("unit square at slot {k}"),
            model.equal(&lhs, &rhs),
            format!("block map after injection {k} versus injection {k} after component"),
        );
        let lhs = model.compose(comp, &dom.counit[k])?;
        let rhs = model.compose(&cod.counit[k], &block)?;
        report.record(
            format!("counit square at slot {k}"),
            model.equal(&lhs, &rhs),
            format!("component after projection {k} versus projection {k} after block map"),
        );
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Component matrices and the canonical comparison
// ---------------------------------------------------------------------------

/// Matrix of components of a morphism between a family coproduct and the
/// matching product: entry (k, l) is p_l . theta . sigma_k.
pub struct ThetaMatrix<M: CategoryModel> {
    pub entries: Vec<Vec<M::Mor>>,
}

impl<M: CategoryModel> ThetaMatrix<M> {
    pub fn arity(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, k: usize, l: usize) -> &M::Mor {
        &self.entries[k][l]
    }

    /// Identity on the diagonal, zero off it.
    pub fn is_diagonal_identity(&self, model: &M, family: &[M::Obj]) -> bool {
        self.entries.iter().enumerate().all(|(k, row)| {
            row.iter().enumerate().all(|(l, entry)| {
                let want = if k == l {
                    model.identity(&family[k])
                } else {
                    model.zero_mor(&family[k], &family[l])
                };
                model.equal(entry, &want)
            })
        })
    }
}

/// Read the component matrix of a concrete morphism off an adjunction.
pub fn theta_components<M: CategoryModel>(
    model: &M,
    theta: &M::Mor,
    adj: &DiagonalAdjunction<M>,
) -> Result<ThetaMatrix<M>, BiproductError> {
    if model.dom(theta) != adj.object || model.cod(theta) != adj.object {
        return Err(ModelError::ShapeMismatch(
            "component matrix needs a morphism between the family coproduct and product".into(),
        )
        .into());
    }
    let n = adj.family.len();
    let mut entries = Vec::with_capacity(n);
    for k in 0..n {
        let mut row = Vec::with_capacity(n);
        for l in 0..n {
            let through = model.compose(theta, &adj.unit[k])?;
            row.push(model.compose(&adj.counit[l], &through)?);
        }
        entries.push(row);
    }
    Ok(ThetaMatrix { entries })
}

/// The canonical comparison from the family coproduct to the product, with
/// its verified inverse and its component matrix.
pub struct CanonicalMorphism<M: CategoryModel> {
    pub forward: M::Mor,
    pub inverse: M::Mor,
    pub matrix: ThetaMatrix<M>,
}

pub fn canonical_morphism<M: CategoryModel>(
    model: &M,
    family: &[M::Obj],
) -> Result<CanonicalMorphism<M>, BiproductError> {
    let adj = diagonal_adjunction(model, family);
    let ids: Vec<M::Mor> = family.iter().map(|o| model.identity(o)).collect();
    let forward = block_diagonal(model, &adj, &adj, &ids)?;
    let inverse = block_diagonal(model, &adj, &adj, &ids)?;
    let id_obj = model.identity(&adj.object);
    if !model.equal(&model.compose(&forward, &inverse)?, &id_obj)
        || !model.equal(&model.compose(&inverse, &forward)?, &id_obj)
    {
        return Err(BiproductError::CheckFailed(
            "canonical comparison is not invertible in this model".into(),
        ));
    }
    let matrix = theta_components(model, &forward, &adj)?;
    if !matrix.is_diagonal_identity(model, family) {
        return Err(BiproductError::CheckFailed(
            "canonical comparison does not have the diagonal identity matrix".into(),
        ));
    }
    Ok(CanonicalMorphism { forward, inverse, matrix })
}

// ---------------------------------------------------------------------------
// Slot families and naturality
// ---------------------------------------------------------------------------

/// The family with one object placed at a single slot and the zero object
/// everywhere else.
pub struct GammaK<M: CategoryModel> {
    pub slot: usize,
    pub object: M::Obj,
    pub family: Vec<M::Obj>,
}

pub fn gamma_k<M: CategoryModel>(
    model: &M,
    slot: usize,
    object: &M::Obj,
    arity: usize,
) -> Result<GammaK<M>, BiproductError> {
    if slot >= arity {
        return Err(ModelError::ShapeMismatch(format!(
            "slot {slot} does not exist in a family of arity {arity}"
        ))
        .into());
    }
    let family = (0..arity)
        .map(|i| if i == slot { object.clone() } else { model.zero_object() })
        .collect();
    Ok(GammaK { slot, object: object.clone(), family })
}

/// The slot transformation of a family transformation: the (k, k) component
/// of theta on the family that is X at slot k and zero elsewhere.
pub fn slot_component<M, F>(
    model: &M,
    theta: &F,
    slot: usize,
    object: &M::Obj,
    arity: usize,
) -> Result<M::Mor, BiproductError>
where
    M: CategoryModel,
    F: Fn(&[M::Obj]) -> Result<M::Mor, BiproductError>,
{
    let gk = gamma_k(model, slot, object, arity)?;
    let adj = diagonal_adjunction(model, &gk.family);
    let th = theta(&gk.family)?;
    if model.dom(&th) != adj.object || model.cod(&th) != adj.object {
        return Err(ModelError::ShapeMismatch(format!(
            "transformation component on the slot-{slot} family has the wrong ends"
        ))
        .into());
    }
    let through = model.compose(&th, &adj.unit[slot])?;
    Ok(model.compose(&adj.counit[slot], &through)?)
}

/// Sampling plan for [`verify_gen1`].
pub struct Gen1Samples<M: CategoryModel> {
    /// Families on which the transformation is read off entrywise.
    pub families: Vec<Vec<M::Obj>>,
    /// Objects between which naturality of the slot transformation is tested.
    pub objects: Vec<M::Obj>,
    /// Arrows drawn per object pair when the hom-set is too big to enumerate.
    pub arrows_per_pair: usize,
}

/// Verify that a family transformation is componentwise diagonal: all
/// off-diagonal components vanish, the diagonal restricts to the slot
/// transformation, and the slot transformation is natural.
pub fn verify_gen1<M, F>(
    model: &M,
    theta: &F,
    samples: &Gen1Samples<M>,
    rng: &mut dyn RngCore,
) -> Result<Report, BiproductError>
where
    M: CategoryModel,
    F: Fn(&[M::Obj]) -> Result<M::Mor, BiproductError>,
{
    let mut report = Report::new("componentwise diagonal transformation");
    let mut arities: Vec<usize> = Vec::new();
    for (fi, family) in samples.families.iter().enumerate() {
        let n = family.len();
        if !arities.contains(&n) {
            arities.push(n);
        }
        let adj = diagonal_adjunction(model, family);
        let th = theta(family)?;
        if model.dom(&th) != adj.object || model.cod(&th) != adj.object {
            report.fail(
                format!("family {fi}: transformation shape"),
                "component does not run between the family coproduct and product".to_string(),
            );
            continue;
        }
        let matrix = theta_components(model, &th, &adj)?;
        let mut off_diag = None;
        for k in 0..n {
            for l in 0..n {
                if k != l
                    && !model.equal(matrix.entry(k, l), &model.zero_mor(&family[k], &family[l]))
                {
                    off_diag.get_or_insert((k, l));
                }
            }
        }
        report.record(
            format!("family {fi}: off-diagonal components vanish"),
            off_diag.is_none(),
            match off_diag {
                None => format!("{} off-diagonal entries are zero", n * n - n),
                Some((k, l)) => format!("entry ({k}, {l}) is nonzero"),
            },
        );
        let mut bad_slot = None;
        for k in 0..n {
            let slot = slot_component(model, theta, k, &family[k], n)?;
            if !model.equal(matrix.entry(k, k), &slot) {
                bad_slot.get_or_insert(k);
            }
        }
        report.record(
            format!("family {fi}: diagonal equals the slot transformation"),
            bad_slot.is_none(),
            match bad_slot {
                None => format!("{n} diagonal entries match"),
                Some(k) => format!("entry ({k}, {k}) differs from the slot component"),
            },
        );
    }

    for &n in &arities {
        for k in 0..n {
            let mut violation = None;
            'pairs: for x in &samples.objects {
                for y in &samples.objects {
                    let at_x = slot_component(model, theta, k, x, n)?;
                    let at_y = slot_component(model, theta, k, y, n)?;
                    let arrows = match model.enumerate_hom(x, y, ARROW_ENUM_CAP) {
                        Some(all) => all,
                        None => (0..samples.arrows_per_pair)
                            .map(|_| model.sample_mor(x, y, rng))
                            .collect(),
                    };
                    for f in arrows {
                        let lhs = model.compose(&f, &at_x)?;
                        let rhs = model.compose(&at_y, &f)?;
                        if !model.equal(&lhs, &rhs) {
                            violation = Some(format!("arrow {f:?} breaks the square"));
                            break 'pairs;
                        }
                    }
                }
            }
            report.record(
                format!("arity {n}, slot {k}: slot transformation is natural"),
                violation.is_none(),
                violation.unwrap_or_else(|| "all sampled squares commute".into()),
            );
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Inversion and reduction
// ---------------------------------------------------------------------------

/// Search the hom-set for a two-sided composition inverse.
pub fn invert_in_hom<M: CategoryModel>(
    model: &M,
    f: &M::Mor,
    cap: u128,
) -> Result<Option<M::Mor>, BiproductError> {
    let dom = model.dom(f);
    let cod = model.cod(f);
    let candidates = model.enumerate_hom(&cod, &dom, cap).ok_or_else(|| {
        ModelError::ModelUnsupported("inverse search needs an enumerable hom-set".into())
    })?;
    let id_dom = model.identity(&dom);
    let id_cod = model.identity(&cod);
    for g in candidates {
        if model.equal(&model.compose(f, &g)?, &id_cod)
            && model.equal(&model.compose(&g, f)?, &id_dom)
        {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

/// A componentwise-diagonal transformation reduced to the canonical
/// comparison: theta composed with the block inverse equals the canonical
/// morphism, certified in-model.
pub struct CanonicalReduction<M: CategoryModel> {
    pub block_inverse: M::Mor,
    pub inverse_components: Vec<M::Mor>,
    pub composite: M::Mor,
    pub canonical: M::Mor,
}

pub fn reduce_to_canonical<M, F>(
    model: &M,
    theta: &F,
    family: &[M::Obj],
) -> Result<CanonicalReduction<M>, BiproductError>
where
    M: CategoryModel,
    F: Fn(&[M::Obj]) -> Result<M::Mor, BiproductError>,
{
    let adj = diagonal_adjunction(model, family);
    let th = theta(family)?;
    if model.dom(&th) != adj.object || model.cod(&th) != adj.object {
        return Err(ModelError::ShapeMismatch(
            "reduction needs a transformation component on the family itself".into(),
        )
        .into());
    }
    let n = family.len();
    let mut inverse_components = Vec::with_capacity(n);
    for k in 0..n {
        let slot = slot_component(model, theta, k, &family[k], n)?;
        let inv = invert_in_hom(model, &slot, INVERT_SEARCH_CAP)?.ok_or_else(|| {
            BiproductError::NotInvertible { slot: k, object: format!("{:?}", family[k]) }
        })?;
        inverse_components.push(inv);
    }
    let block_inverse = block_diagonal(model, &adj, &adj, &inverse_components)?;
    let composite = model.compose(&th, &block_inverse)?;
    let canonical = canonical_morphism(model, family)?.forward;
    if !model.equal(&composite, &canonical) {
        return Err(BiproductError::CheckFailed(
            "block inverse does not reduce the transformation to the canonical comparison".into(),
        ));
    }
    Ok(CanonicalReduction { block_inverse, inverse_components, composite, canonical })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::finab::{FinAb, FinAbMor, FinAbObj};
    use crate::models::lattice::{Lattice, LatticeMor, LatticeObj};
    use crate::term::ObjectKind;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn finab_binding(pairs: &[(&str, FinAbObj)]) -> ModelBinding<FinAb> {
        let mut binding = ModelBinding::default();
        for (name, obj) in pairs {
            binding.objects.insert((*name).into(), obj.clone());
        }
        binding
    }

    fn lattice_binding(pairs: &[(&str, LatticeObj)]) -> ModelBinding<Lattice> {
        let mut binding = ModelBinding::default();
        for (name, obj) in pairs {
            binding.objects.insert((*name).into(), obj.clone());
        }
        binding
    }

    fn mat(dom: u64, cod: u64, a: u64) -> FinAbMor {
        FinAbMor::new(FinAbObj::cyclic(dom), FinAbObj::cyclic(cod), vec![vec![a]]).unwrap()
    }

    #[test]
    fn binary_biproduct_verifies_and_has_the_right_order() {
        let model = FinAb;
        let binding =
            finab_binding(&[("X", FinAbObj::cyclic(2)), ("Y", FinAbObj::cyclic(3))]);
        let x = ObjectRef::atomic("X");
        let y = ObjectRef::atomic("Y");
        let bp = build_biproduct(&model, &binding, &x, &y).unwrap();
        assert_eq!(bp.summands.len(), 2);
        let carrier = resolve_carrier(&model, &binding, &bp.object).unwrap();
        assert_eq!(model.carrier_size(&carrier), Some(6));
        let through =
            compose(bp.projections[0].clone(), bp.injections[0].clone()).unwrap();
        let roundtrip = eval(&model, &binding, &through).unwrap();
        assert!(model.equal(&roundtrip, &model.identity(&FinAbObj::cyclic(2))));
    }

    #[test]
    fn zero_summand_biproduct_collapses_to_the_partner() {
        let model = FinAb;
        let binding = finab_binding(&[("Y", FinAbObj::cyclic(4))]);
        let bp =
            build_biproduct(&model, &binding, &ObjectRef::zero(), &ObjectRef::atomic("Y")).unwrap();
        let whole = resolve_carrier(&model, &binding, &bp.object).unwrap();
        let through =
            compose(bp.injections[1].clone(), bp.projections[1].clone()).unwrap();
        let back = eval(&model, &binding, &through).unwrap();
        assert!(model.equal(&back, &model.identity(&whole)));
    }

    #[test]
    fn lattice_binary_biproduct_verifies() {
        let model = Lattice;
        let binding =
            lattice_binding(&[("L", LatticeObj::chain(2)), ("M", LatticeObj::chain(3))]);
        let bp = build_biproduct(
            &model,
            &binding,
            &ObjectRef::atomic("L"),
            &ObjectRef::atomic("M"),
        )
        .unwrap();
        let carrier = resolve_carrier(&model, &binding, &bp.object).unwrap();
        assert_eq!(model.carrier_size(&carrier), Some(6));
    }

    #[test]
    fn iterated_biproduct_matches_the_flat_family() {
        let model = FinAb;
        let binding = finab_binding(&[
            ("X", FinAbObj::cyclic(2)),
            ("Y", FinAbObj::cyclic(3)),
            ("Z", FinAbObj::cyclic(4)),
        ]);
        let parts =
            vec![ObjectRef::atomic("X"), ObjectRef::atomic("Y"), ObjectRef::atomic("Z")];
        let it = iterated_biproduct(&model, &binding, &parts).unwrap();
        assert_eq!(it.steps.len(), 2);
        assert!(matches!(&it.flat.object.kind, ObjectKind::Product(p) if p.len() == 3));
        let nested_carrier = resolve_carrier(&model, &binding, &it.nested).unwrap();
        assert_eq!(model.carrier_size(&nested_carrier), Some(24));

        let single = iterated_biproduct(&model, &binding, &parts[..1]).unwrap();
        assert!(single.steps.is_empty());
        assert_eq!(single.nested, parts[0]);
    }

    #[test]
    fn iterated_biproduct_matches_on_lattices() {
        let model = Lattice;
        let binding = lattice_binding(&[("L", LatticeObj::chain(2))]);
        let parts = vec![ObjectRef::atomic("L"); 3];
        let it = iterated_biproduct(&model, &binding, &parts).unwrap();
        let carrier = resolve_carrier(&model, &binding, &it.flat.object).unwrap();
        assert_eq!(model.carrier_size(&carrier), Some(8));
    }

    #[test]
    fn diagonal_sum_matches_direct_addition_exhaustively() {
        let model = FinAb;
        let z4 = FinAbObj::cyclic(4);
        let homs = model.enumerate_hom(&z4, &z4, 64).unwrap();
        assert_eq!(homs.len(), 4);
        for f in &homs {
            for g in &homs {
                let mut binding = finab_binding(&[("X", z4.clone())]);
                binding.gens.insert("f".into(), f.clone());
                binding.gens.insert("g".into(), g.clone());
                let x = ObjectRef::atomic("X");
                let ft = MorTerm::gen("f", x.clone(), x.clone());
                let gt = MorTerm::gen("g", x.clone(), x.clone());
                let via = sum_via_biproduct(&model, &binding, &ft, &gt).unwrap();
                assert!(model.equal(&via, &model.add(f, g).unwrap()));
                assert!(intro_sum_identity(&model, &binding, &ft, &gt).unwrap());
            }
        }
    }

    #[test]
    fn diagonal_sum_matches_on_lattice_chains() {
        let model = Lattice;
        let l3 = LatticeObj::chain(3);
        let homs = model.enumerate_hom(&l3, &l3, 64).unwrap();
        assert!(homs.len() > 1);
        for f in &homs {
            for g in &homs {
                let mut binding = lattice_binding(&[("L", l3.clone())]);
                binding.gens.insert("f".into(), f.clone());
                binding.gens.insert("g".into(), g.clone());
                let l = ObjectRef::atomic("L");
                let ft = MorTerm::gen("f", l.clone(), l.clone());
                let gt = MorTerm::gen("g", l.clone(), l.clone());
                let via = sum_via_biproduct(&model, &binding, &ft, &gt).unwrap();
                assert!(model.equal(&via, &model.add(f, g).unwrap()));
                assert!(intro_sum_identity(&model, &binding, &ft, &gt).unwrap());
            }
        }
    }

    #[test]
    fn canonical_morphism_has_diagonal_identity_matrix() {
        let model = FinAb;
        let family = [FinAbObj::cyclic(2), FinAbObj::cyclic(3)];
        let canon = canonical_morphism(&model, &family).unwrap();
        assert!(canon.matrix.is_diagonal_identity(&model, &family));
        assert!(model.equal(canon.matrix.entry(0, 0), &model.identity(&family[0])));

        let single = canonical_morphism(&model, &[FinAbObj::cyclic(5)]).unwrap();
        let adj = diagonal_adjunction(&model, &[FinAbObj::cyclic(5)]);
        assert!(model.equal(&single.forward, &model.identity(&adj.object)));
    }

    #[test]
    fn canonical_morphism_on_a_lattice_family() {
        let model = Lattice;
        let family = vec![LatticeObj::chain(2); 4];
        let canon = canonical_morphism(&model, &family).unwrap();
        let id = model.identity(&diagonal_adjunction(&model, &family).object);
        assert!(model.equal(&model.compose(&canon.forward, &canon.inverse).unwrap(), &id));
    }

    #[test]
    fn component_matrix_reads_off_a_swap() {
        let model = FinAb;
        let z2 = FinAbObj::cyclic(2);
        let family = [z2.clone(), z2.clone()];
        let adj = diagonal_adjunction(&model, &family);
        let cross = model
            .compose(&adj.unit[1], &adj.counit[0])
            .and_then(|a| {
                let b = model.compose(&adj.unit[0], &adj.counit[1])?;
                model.add(&a, &b)
            })
            .unwrap();
        let matrix = theta_components(&model, &cross, &adj).unwrap();
        assert!(model.equal(matrix.entry(0, 1), &model.identity(&z2)));
        assert!(model.equal(matrix.entry(0, 0), &model.zero_mor(&z2, &z2)));
        assert!(model.equal(matrix.entry(1, 0), &model.identity(&z2)));

        let zero = model.zero_mor(&adj.object, &adj.object);
        let matrix = theta_components(&model, &zero, &adj).unwrap();
        assert!(!matrix.is_diagonal_identity(&model, &family));
        assert!(model.equal(matrix.entry(0, 0), &model.zero_mor(&z2, &z2)));

        let wrong = model.identity(&z2);
        assert!(matches!(
            theta_components(&model, &wrong, &adj),
            Err(BiproductError::Model(ModelError::ShapeMismatch(_)))
        ));
    }

    #[test]
    fn gamma_places_the_object_in_one_slot() {
        let model = FinAb;
        let gk = gamma_k(&model, 1, &FinAbObj::cyclic(4), 3).unwrap();
        assert_eq!(gk.family.len(), 3);
        assert_eq!(gk.family[1], FinAbObj::cyclic(4));
        assert_eq!(gk.family[0], model.zero_object());
        assert_eq!(gk.family[2], model.zero_object());
        assert!(gamma_k(&model, 3, &FinAbObj::cyclic(4), 3).is_err());
    }

    #[test]
    fn adjunction_naturality_squares_commute() {
        let model = FinAb;
        let fam_a = [FinAbObj::cyclic(2), FinAbObj::cyclic(4)];
        let fam_b = [FinAbObj::cyclic(2), FinAbObj::cyclic(2)];
        let adj_a = diagonal_adjunction(&model, &fam_a);
        let adj_b = diagonal_adjunction(&model, &fam_b);
        let comps = [mat(2, 2, 1), mat(4, 2, 1)];
        let report = adjunction_naturality(&model, &adj_a, &adj_b, &comps).unwrap();
        assert!(report.passed, "{:?}", report.first_failure());

        let short = [mat(2, 2, 1)];
        assert!(block_diagonal(&model, &adj_a, &adj_b, &short).is_err());
    }

    fn canonical_theta(
        model: &FinAb,
    ) -> impl Fn(&[FinAbObj]) -> Result<FinAbMor, BiproductError> + '_ {
        |family| Ok(canonical_morphism(model, family)?.forward)
    }

    #[test]
    fn gen1_accepts_the_canonical_transformation() {
        let model = FinAb;
        let theta = canonical_theta(&model);
        let samples = Gen1Samples {
            families: vec![
                vec![FinAbObj::cyclic(2), FinAbObj::cyclic(3)],
                vec![FinAbObj::cyclic(4), FinAbObj::cyclic(2)],
                vec![FinAbObj::cyclic(2); 3],
            ],
            objects: vec![FinAbObj::cyclic(2), FinAbObj::cyclic(4)],
            arrows_per_pair: 8,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let report = verify_gen1(&model, &theta, &samples, &mut rng).unwrap();
        assert!(report.passed, "{:?}", report.first_failure());
    }

    #[test]
    fn gen1_accepts_a_negated_diagonal() {
        let model = FinAb;
        let theta = |family: &[FinAbObj]| {
            let adj = diagonal_adjunction(&FinAb, family);
            let comps: Vec<FinAbMor> =
                family.iter().map(|o| FinAb.neg(&FinAb.identity(o))).collect();
            block_diagonal(&FinAb, &adj, &adj, &comps)
        };
        let samples = Gen1Samples {
            families: vec![vec![FinAbObj::cyclic(3), FinAbObj::cyclic(4)]],
            objects: vec![FinAbObj::cyclic(3), FinAbObj::cyclic(4)],
            arrows_per_pair: 8,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let report = verify_gen1(&model, &theta, &samples, &mut rng).unwrap();
        assert!(report.passed, "{:?}", report.first_failure());
    }

    #[test]
    fn gen1_flags_a_non_natural_slot() {
        let model = FinAb;
        let z4 = FinAbObj::cyclic(4);
        let doubler = |family: &[FinAbObj]| {
            let adj = diagonal_adjunction(&FinAb, family);
            let comps: Vec<FinAbMor> = family
                .iter()
                .map(|o| {
                    if *o == FinAbObj::cyclic(4) {
                        mat(4, 4, 2)
                    } else {
                        FinAb.identity(o)
                    }
                })
                .collect();
            block_diagonal(&FinAb, &adj, &adj, &comps)
        };
        let samples = Gen1Samples {
            families: vec![vec![z4.clone(), FinAbObj::cyclic(2)]],
            objects: vec![FinAbObj::cyclic(2), z4],
            arrows_per_pair: 8,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let report = verify_gen1(&model, &doubler, &samples, &mut rng).unwrap();
        assert!(!report.passed);
        let failing = report.first_failure().unwrap();
        assert!(failing.name.contains("natural"), "unexpected failure: {failing:?}");
    }

    #[test]
    fn reduction_inverts_slotwise() {
        let model = FinAb;
        let doubler = |family: &[FinAbObj]| {
            let adj = diagonal_adjunction(&FinAb, family);
            let comps: Vec<FinAbMor> = family
                .iter()
                .map(|o| FinAb.add(&FinAb.identity(o), &FinAb.identity(o)).unwrap())
                .collect();
            block_diagonal(&FinAb, &adj, &adj, &comps)
        };
        let family = [FinAbObj::cyclic(5), FinAbObj::cyclic(5)];
        let red = reduce_to_canonical(&model, &doubler, &family).unwrap();
        for inv in &red.inverse_components {
            assert!(model.equal(inv, &mat(5, 5, 3)));
        }
        assert!(model.equal(&red.composite, &red.canonical));
    }

    #[test]
    fn reduction_reports_a_noninvertible_slot() {
        let model = Lattice;
        let collapse = |family: &[LatticeObj]| {
            let adj = diagonal_adjunction(&Lattice, family);
            let comps: Vec<LatticeMor> = family
                .iter()
                .enumerate()
                .map(|(k, o)| {
                    if k == 0 {
                        Lattice.zero_mor(o, o)
                    } else {
                        Lattice.identity(o)
                    }
                })
                .collect();
            block_diagonal(&Lattice, &adj, &adj, &comps)
        };
        let samples = Gen1Samples {
            families: vec![vec![LatticeObj::chain(3), LatticeObj::chain(2)]],
            objects: vec![LatticeObj::chain(2), LatticeObj::chain(3)],
            arrows_per_pair: 8,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let report = verify_gen1(&model, &collapse, &samples, &mut rng).unwrap();
        assert!(report.passed, "{:?}", report.first_failure());

        let family = [LatticeObj::chain(3), LatticeObj::chain(2)];
        let err = reduce_to_canonical(&model, &collapse, &family).map(|_| ()).unwrap_err();
        match err {
            BiproductError::NotInvertible { slot: 0, .. } => {}
            other => panic!("expected a noninvertible slot, got {other}"),
        }
    }

    #[test]
    fn inverse_search_finds_two_sided_inverses() {
        let model = FinAb;
        let three = mat(4, 4, 3);
        let inv = invert_in_hom(&model, &three, 64).unwrap().unwrap();
        assert!(model.equal(&inv, &mat(4, 4, 3)));
        assert!(invert_in_hom(&model, &mat(4, 4, 2), 64).unwrap().is_none());

        let lattice = Lattice;
        let id = lattice.identity(&LatticeObj::chain(3));
        assert!(invert_in_hom(&lattice, &id, 64).unwrap().is_some());
        let zero = lattice.zero_mor(&LatticeObj::chain(3), &LatticeObj::chain(3));
        assert!(invert_in_hom(&lattice, &zero, 64).unwrap().is_none());
    }
}
