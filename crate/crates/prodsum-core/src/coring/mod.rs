//! Corings over finite commutative rings, their comodules, and the search
//! for Frobenius structure.
//!
//! A coring here is a free module over a product of cyclic rings together
//! with a comultiplication and counit given by exact integer tables. The
//! module supplies the regular and direct-sum constructions, law checkers
//! that name the axiom they test, the dual algebra with its opposite-order
//! convolution product, an exact search for a Frobenius system (a bicolinear
//! multiplication with a two-sided unit), comodule splitting over tagged
//! direct sums, and the verdict comparing the product of a family of base
//! corings with its coproduct.

pub mod linalg;

pub use linalg::{
    mixed_radix, solve_mod, solve_ring_system, FiniteRing, MixedRadix, RElem, RMat, RingSolve,
    SolveProfile,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::report::{Report, Verdict};

#[derive(Debug, Error)]
pub enum CoringError {
    #[error("base rings differ: {left} vs {right}")]
    BaseRingMismatch { left: String, right: String },
    #[error("{0}")]
    Shape(String),
    #[error("empty family")]
    EmptyFamily,
    #[error("coring carries no direct-sum tag")]
    NotDirectSumCoring,
    #[error("coring fails the {0} law")]
    InvalidCoring(String),
    #[error("search over {carrier} unit candidates exceeds the bound {bound}")]
    SearchBoundExceeded { carrier: u128, bound: u128 },
    #[error("verdict unavailable: {0}")]
    VerdictUnavailable(String),
}

/// A coassociative counital comultiplication on a free module, with every
/// structure map stored as an exact coefficient table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coring {
    pub name: String,
    pub ring: FiniteRing,
    pub rank: usize,
    /// Comultiplication table: a `rank * rank` by `rank` matrix sending each
    /// generator to its coefficients over ordered generator pairs, second
    /// pair member fastest.
    pub delta: RMat,
    /// Counit table: a `1` by `rank` row of ring coefficients.
    pub counit: RMat,
    /// Slot ranks when the coring was assembled as a tagged direct sum.
    pub slots: Option<Vec<usize>>,
}

impl Coring {
    pub fn validate(&self) -> Result<(), CoringError> {
        let n = self.rank;
        if self.delta.ring != self.ring || self.counit.ring != self.ring {
            return Err(CoringError::BaseRingMismatch {
                left: self.ring.label(),
                right: self.delta.ring.label(),
            });
        }
        if (self.delta.rows, self.delta.cols) != (n * n, n) {
            return Err(CoringError::Shape(format!(
                "comultiplication table is {} x {}, expected {} x {n}",
                self.delta.rows,
                self.delta.cols,
                n * n
            )));
        }
        if (self.counit.rows, self.counit.cols) != (1, n) {
            return Err(CoringError::Shape(format!(
                "counit table is {} x {}, expected 1 x {n}",
                self.counit.rows, self.counit.cols
            )));
        }
        if let Some(slots) = &self.slots {
            if slots.iter().sum::<usize>() != n {
                return Err(CoringError::Shape("slot ranks do not sum to the rank".into()));
            }
        }
        Ok(())
    }

    pub fn normalize(&mut self) {
        self.delta = RMat::new(
            self.ring.clone(),
            self.delta.rows,
            self.delta.cols,
            self.delta.data.clone(),
        )
        .unwrap_or_else(|_| self.delta.clone());
        self.counit = RMat::new(
            self.ring.clone(),
            self.counit.rows,
            self.counit.cols,
            self.counit.data.clone(),
        )
        .unwrap_or_else(|_| self.counit.clone());
    }
}

fn basis_vec(ring: &FiniteRing, len: usize, idx: usize) -> Vec<RElem> {
    let mut v = vec![ring.zero(); len];
    v[idx] = ring.one();
    v
}

fn scale_vec(ring: &FiniteRing, v: &[RElem], s: &RElem) -> Vec<RElem> {
    v.iter().map(|e| ring.mul(e, s)).collect()
}

fn vecs_equal(ring: &FiniteRing, a: &[RElem], b: &[RElem]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| ring.is_zero(&ring.sub(x, y)))
}

/// Checks coassociativity, both counit laws, and scalar compatibility of the
/// structure maps, naming the first law that breaks.
pub fn check_coring(c: &Coring) -> Report {
    let mut report = Report::new(format!("coring laws: {}", c.name));
    if let Err(e) = c.validate() {
        report.fail("shape", e.to_string());
        return report;
    }
    let n = c.rank;
    let id = RMat::identity(c.ring.clone(), n);
    let left_square = c.delta.kron(&id).mul(&c.delta);
    let right_square = id.kron(&c.delta).mul(&c.delta);
    report.record(
        "coassociativity",
        left_square == right_square,
        format!("both bracketings of the iterated comultiplication agree on {n} generators"),
    );
    let cl = c.counit.kron(&id).mul(&c.delta);
    report.record(
        "counit-left",
        cl == id,
        "counit against the first tensor leg returns every generator",
    );
    let cr = id.kron(&c.counit).mul(&c.delta);
    report.record(
        "counit-right",
        cr == id,
        "counit against the second tensor leg returns every generator",
    );
    let mut scalar_ok = true;
    for t in 0..c.ring.width() {
        let mut unit = c.ring.zero();
        unit[t] = 1 % c.ring.moduli[t];
        for j in 0..n {
            let scaled = scale_vec(&c.ring, &basis_vec(&c.ring, n, j), &unit);
            let through = c.delta.apply(&scaled);
            let after = scale_vec(&c.ring, &c.delta.apply(&basis_vec(&c.ring, n, j)), &unit);
            scalar_ok &= vecs_equal(&c.ring, &through, &after);
            let ce_through = c.counit.apply(&scaled);
            let ce_after = scale_vec(&c.ring, &c.counit.apply(&basis_vec(&c.ring, n, j)), &unit);
            scalar_ok &= vecs_equal(&c.ring, &ce_through, &ce_after);
        }
    }
    report.record(
        "bimodule-compatibility",
        scalar_ok,
        format!(
            "scalar action commutes with both structure maps on {n} generators and {} ring coordinates",
            c.ring.width()
        ),
    );
    report
}

/// The regular coring on the base ring itself: comultiplication sends the
/// generator to its tensor square and the counit is the identity.
pub fn sweedler_coring(ring: &FiniteRing) -> Coring {
    let one = RMat::new(ring.clone(), 1, 1, vec![ring.one()]).expect("unit entry");
    Coring {
        name: format!("sweedler({})", ring.label()),
        ring: ring.clone(),
        rank: 1,
        delta: one.clone(),
        counit: one,
        slots: None,
    }
}

/// Componentwise direct sum of corings over a common base ring. The result
/// remembers its slot ranks, which is what comodule splitting keys on.
pub fn direct_sum_coring(parts: &[Coring]) -> Result<Coring, CoringError> {
    let first = parts.first().ok_or(CoringError::EmptyFamily)?;
    for p in parts {
        if p.ring != first.ring {
            return Err(CoringError::BaseRingMismatch {
                left: first.ring.label(),
                right: p.ring.label(),
            });
        }
        p.validate()?;
    }
    let ring = first.ring.clone();
    let rank: usize = parts.iter().map(|p| p.rank).sum();
    let mut delta = RMat::zero(ring.clone(), rank * rank, rank);
    let mut counit = RMat::zero(ring.clone(), 1, rank);
    let mut off = 0;
    for p in parts {
        for j in 0..p.rank {
            counit.set(0, off + j, p.counit.get(0, j).clone());
            for a in 0..p.rank {
                for b in 0..p.rank {
                    let v = p.delta.get(a * p.rank + b, j);
                    if !ring.is_zero(v) {
                        delta.set((off + a) * rank + (off + b), off + j, v.clone());
                    }
                }
            }
        }
        off += p.rank;
    }
    let name = format!(
        "sum[{}]",
        parts.iter().map(|p| p.name.as_str()).collect::<Vec<_>>().join(" + ")
    );
    Ok(Coring {
        name,
        ring,
        rank,
        delta,
        counit,
        slots: Some(parts.iter().map(|p| p.rank).collect()),
    })
}

/// The `n`-fold direct sum of the regular coring, one slot per index.
pub fn regular_sum_coring(ring: &FiniteRing, n: usize) -> Result<Coring, CoringError> {
    direct_sum_coring(&vec![sweedler_coring(ring); n])
}

/// The coefficient coring of upper triangular two by two matrices: three
/// generators, counital and coassociative, but with no Frobenius system
/// over any nontrivial base.
pub fn triangular_coring(ring: &FiniteRing) -> Coring {
    let mut delta = RMat::zero(ring.clone(), 9, 3);
    delta.set(0, 0, ring.one());
    delta.set(1, 1, ring.one());
    delta.set(5, 1, ring.one());
    delta.set(8, 2, ring.one());
    let counit =
        RMat::new(ring.clone(), 1, 3, vec![ring.one(), ring.zero(), ring.one()]).expect("counit row");
    Coring {
        name: format!("triangular({})", ring.label()),
        ring: ring.clone(),
        rank: 3,
        delta,
        counit,
        slots: None,
    }
}

/// Recovers the slot corings of a tagged direct sum.
pub fn slot_corings(c: &Coring) -> Result<Vec<Coring>, CoringError> {
    let slots = c.slots.as_ref().ok_or(CoringError::NotDirectSumCoring)?;
    if slots.iter().sum::<usize>() != c.rank {
        return Err(CoringError::Shape("slot ranks do not sum to the rank".into()));
    }
    let mut out = Vec::with_capacity(slots.len());
    let mut off = 0;
    for (i, &r) in slots.iter().enumerate() {
        let pair_rows: Vec<usize> =
            (0..r).flat_map(|a| (0..r).map(move |b| (off + a) * c.rank + off + b)).collect();
        let gen_cols: Vec<usize> = (off..off + r).collect();
        out.push(Coring {
            name: format!("slot {i} of {}", c.name),
            ring: c.ring.clone(),
            rank: r,
            delta: c.delta.submatrix(&pair_rows, &gen_cols),
            counit: c.counit.submatrix(&[0], &gen_cols),
            slots: None,
        });
        off += r;
    }
    Ok(out)
}

/// A finite module presented as the image of an idempotent on a free module.
/// Free modules are the identity-projector case; images of the slot
/// idempotents that show up when splitting comodules are the general one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RModule {
    pub ring: FiniteRing,
    pub rank: usize,
    pub projector: RMat,
}

impl RModule {
    pub fn free(ring: &FiniteRing, rank: usize) -> Self {
        RModule { ring: ring.clone(), rank, projector: RMat::identity(ring.clone(), rank) }
    }

    pub fn validate(&self) -> Result<(), CoringError> {
        if (self.projector.rows, self.projector.cols) != (self.rank, self.rank) {
            return Err(CoringError::Shape("carrier projector shape".into()));
        }
        if !self.projector.is_idempotent() {
            return Err(CoringError::Shape("carrier projector is not idempotent".into()));
        }
        Ok(())
    }
}

/// A right comodule: a carrier module and a coaction table into the tensor
/// with the coring, rows flattened with the coring index fastest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comodule {
    pub module: RModule,
    pub rho: RMat,
}

/// The coring coacting on itself by its comultiplication.
pub fn regular_comodule(c: &Coring) -> Comodule {
    Comodule { module: RModule::free(&c.ring, c.rank), rho: c.delta.clone() }
}

/// Over the regular coring every module carries exactly one coaction, the
/// one tensoring with the ring unit; its table is the carrier projector.
pub fn sweedler_comodule(module: RModule) -> Comodule {
    Comodule { rho: module.projector.clone(), module }
}

pub fn check_comodule(m: &Comodule, c: &Coring) -> Report {
    let mut report = Report::new(format!("comodule laws over {}", c.name));
    if m.module.ring != c.ring {
        report.fail(
            "shape",
            format!("carrier ring {} differs from {}", m.module.ring.label(), c.ring.label()),
        );
        return report;
    }
    let mr = m.module.rank;
    if (m.rho.rows, m.rho.cols) != (mr * c.rank, mr)
        || (m.module.projector.rows, m.module.projector.cols) != (mr, mr)
    {
        report.fail("shape", "coaction or projector table has the wrong shape");
        return report;
    }
    let p = &m.module.projector;
    report.record("carrier-projector", p.is_idempotent(), "the carrier projector squares to itself");
    let idc = RMat::identity(c.ring.clone(), c.rank);
    let idm = RMat::identity(c.ring.clone(), mr);
    report.record(
        "coaction-columns",
        m.rho.mul(p) == m.rho,
        "the coaction factors through the carrier image",
    );
    report.record(
        "coaction-rows",
        p.kron(&idc).mul(&m.rho) == m.rho,
        "the coaction lands inside the carrier image",
    );
    let via_rho = m.rho.kron(&idc).mul(&m.rho);
    let via_delta = idm.kron(&c.delta).mul(&m.rho);
    report.record(
        "coassociativity",
        via_rho == via_delta,
        "coacting twice matches coacting then comultiplying",
    );
    let counit_side = idm.kron(&c.counit).mul(&m.rho);
    report.record(
        "counit",
        counit_side == *p,
        "counit after the coaction is the identity of the carrier",
    );
    report
}

/// Drops carrier coordinates outside the projector support. This is the
/// canonical minimal presentation a split hands back, so comparing split
/// output against the inputs goes through this form.
pub fn canonical_comodule(m: &Comodule, c: &Coring) -> Comodule {
    let p = &m.module.projector;
    let keep: Vec<usize> = (0..m.module.rank)
        .filter(|&j| {
            (0..p.cols).any(|x| !p.ring.is_zero(p.get(j, x)))
                || (0..p.rows).any(|x| !p.ring.is_zero(p.get(x, j)))
        })
        .collect();
    let rows_keep: Vec<usize> =
        keep.iter().flat_map(|&j| (0..c.rank).map(move |a| j * c.rank + a)).collect();
    Comodule {
        module: RModule {
            ring: m.module.ring.clone(),
            rank: keep.len(),
            projector: p.submatrix(&keep, &keep),
        },
        rho: m.rho.submatrix(&rows_keep, &keep),
    }
}

/// Splitting a comodule over a tagged direct sum along the slot idempotents.
#[derive(Debug, Clone)]
pub struct SplitOutcome {
    pub components: Vec<Comodule>,
    pub certificate: Report,
}

/// Acts by the dual slot idempotents to cut a comodule over a tagged direct
/// sum into one comodule per slot, certifying that the idempotents span the
/// identity and are pairwise orthogonal before handing the pieces back.
pub fn split_comodule(m: &Comodule, c: &Coring) -> Result<SplitOutcome, CoringError> {
    let slots = slot_corings(c)?;
    let ring = c.ring.clone();
    if m.module.ring != ring {
        return Err(CoringError::BaseRingMismatch {
            left: ring.label(),
            right: m.module.ring.label(),
        });
    }
    let mr = m.module.rank;
    if (m.rho.rows, m.rho.cols) != (mr * c.rank, mr) {
        return Err(CoringError::Shape("coaction table shape".into()));
    }

    // a tagged sum must not mix slots inside the comultiplication
    let mut owner = vec![0usize; c.rank];
    {
        let mut off = 0;
        for (i, s) in slots.iter().enumerate() {
            for j in 0..s.rank {
                owner[off + j] = i;
            }
            off += s.rank;
        }
    }
    for j in 0..c.rank {
        for a in 0..c.rank {
            for b in 0..c.rank {
                if !ring.is_zero(c.delta.get(a * c.rank + b, j))
                    && (owner[a] != owner[j] || owner[b] != owner[j])
                {
                    return Err(CoringError::InvalidCoring("slot-locality".into()));
                }
            }
        }
    }

    let mut certificate = Report::new(format!("splitting over {}", c.name));
    let idm = RMat::identity(ring.clone(), mr);
    let mut qs = Vec::with_capacity(slots.len());
    let mut off = 0;
    for slot in &slots {
        let mut eps = RMat::zero(ring.clone(), 1, c.rank);
        for j in 0..slot.rank {
            eps.set(0, off + j, slot.counit.get(0, j).clone());
        }
        qs.push(idm.kron(&eps).mul(&m.rho));
        off += slot.rank;
    }

    let mut total = RMat::zero(ring.clone(), mr, mr);
    for q in &qs {
        total = total.add(q);
    }
    certificate.record(
        "idempotents-span",
        total == m.module.projector,
        "the slot idempotent actions sum to the identity of the carrier",
    );
    let mut orthogonal = true;
    for (i, qi) in qs.iter().enumerate() {
        for (j, qj) in qs.iter().enumerate() {
            let prod = qi.mul(qj);
            let expected = if i == j { qi.clone() } else { RMat::zero(ring.clone(), mr, mr) };
            orthogonal &= prod == expected;
        }
    }
    certificate.record(
        "idempotents-orthogonal",
        orthogonal,
        "distinct slot actions annihilate each other and each one squares to itself",
    );

    let mut components = Vec::with_capacity(slots.len());
    let mut coff = 0;
    for (i, slot) in slots.iter().enumerate() {
        let q = &qs[i];
        let mut pr = RMat::zero(ring.clone(), slot.rank, c.rank);
        for a in 0..slot.rank {
            pr.set(a, coff + a, ring.one());
        }
        let rho_full = q.kron(&pr).mul(&m.rho);
        let mut support: Vec<usize> = (0..mr)
            .filter(|&j| {
                (0..mr).any(|x| !ring.is_zero(q.get(j, x))) || (0..mr).any(|x| !ring.is_zero(q.get(x, j)))
            })
            .collect();
        let mut rows_keep: Vec<usize> =
            support.iter().flat_map(|&j| (0..slot.rank).map(move |a| j * slot.rank + a)).collect();
        let row_set: Vec<bool> = {
            let mut v = vec![false; rho_full.rows];
            for &r in &rows_keep {
                v[r] = true;
            }
            v
        };
        let col_set: Vec<bool> = {
            let mut v = vec![false; mr];
            for &x in &support {
                v[x] = true;
            }
            v
        };
        let mut clean = true;
        for r in 0..rho_full.rows {
            for x in 0..mr {
                if !ring.is_zero(rho_full.get(r, x)) && (!row_set[r] || !col_set[x]) {
                    clean = false;
                }
            }
        }
        if clean {
            certificate.pass(
                format!("component {i} carrier"),
                format!("compressed to {} of {mr} coordinates", support.len()),
            );
        } else {
            support = (0..mr).collect();
            rows_keep = (0..rho_full.rows).collect();
            certificate.pass(
                format!("component {i} carrier"),
                format!("kept the full carrier of {mr} coordinates"),
            );
        }
        let component = Comodule {
            module: RModule {
                ring: ring.clone(),
                rank: support.len(),
                projector: q.submatrix(&support, &support),
            },
            rho: rho_full.submatrix(&rows_keep, &support),
        };
        certificate.merge(check_comodule(&component, slot));
        components.push(component);
        coff += slot.rank;
    }
    Ok(SplitOutcome { components, certificate })
}

/// Reassembles slot comodules into one comodule over the direct-sum coring,
/// with a block-diagonal carrier and slot-by-slot coaction.
pub fn assemble_comodule(components: &[Comodule], slots: &[Coring]) -> Result<Comodule, CoringError> {
    if components.is_empty() {
        return Err(CoringError::EmptyFamily);
    }
    if components.len() != slots.len() {
        return Err(CoringError::Shape(format!(
            "{} components against {} slot corings",
            components.len(),
            slots.len()
        )));
    }
    let ring = slots[0].ring.clone();
    for (comp, slot) in components.iter().zip(slots) {
        if slot.ring != ring || comp.module.ring != ring {
            return Err(CoringError::BaseRingMismatch {
                left: ring.label(),
                right: comp.module.ring.label(),
            });
        }
        if (comp.rho.rows, comp.rho.cols) != (comp.module.rank * slot.rank, comp.module.rank) {
            return Err(CoringError::Shape("component coaction shape".into()));
        }
    }
    let total_m: usize = components.iter().map(|c| c.module.rank).sum();
    let total_c: usize = slots.iter().map(|s| s.rank).sum();
    let projectors: Vec<&RMat> = components.iter().map(|c| &c.module.projector).collect();
    let projector = RMat::block_diag(ring.clone(), &projectors);
    let mut rho = RMat::zero(ring.clone(), total_m * total_c, total_m);
    let (mut moff, mut coff) = (0, 0);
    for (comp, slot) in components.iter().zip(slots) {
        for j in 0..comp.module.rank {
            for a in 0..slot.rank {
                for col in 0..comp.module.rank {
                    let v = comp.rho.get(j * slot.rank + a, col);
                    if !ring.is_zero(v) {
                        rho.set((moff + j) * total_c + coff + a, moff + col, v.clone());
                    }
                }
            }
        }
        moff += comp.module.rank;
        coff += slot.rank;
    }
    Ok(Comodule { module: RModule { ring, rank: total_m, projector }, rho })
}

/// The algebra of module maps from the coring to its base, with the
/// convolution product evaluating its left factor on the second tensor leg.
#[derive(Debug, Clone, Serialize)]
pub struct DualAlgebra {
    pub ring: FiniteRing,
    pub rank: usize,
    /// Coordinates of the multiplicative unit: the counit row.
    pub unit: Vec<RElem>,
    table: Vec<Vec<RElem>>,
}

pub fn dual_algebra(c: &Coring) -> DualAlgebra {
    let n = c.rank;
    let mut table = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let coords: Vec<RElem> = (0..n).map(|k| c.delta.get(j * n + i, k).clone()).collect();
            table.push(coords);
        }
    }
    let unit = (0..n).map(|j| c.counit.get(0, j).clone()).collect();
    DualAlgebra { ring: c.ring.clone(), rank: n, unit, table }
}

impl DualAlgebra {
    pub fn multiply(&self, f: &[RElem], g: &[RElem]) -> Vec<RElem> {
        assert_eq!(f.len(), self.rank);
        assert_eq!(g.len(), self.rank);
        let mut out = vec![self.ring.zero(); self.rank];
        for i in 0..self.rank {
            if self.ring.is_zero(&f[i]) {
                continue;
            }
            for j in 0..self.rank {
                if self.ring.is_zero(&g[j]) {
                    continue;
                }
                let fg = self.ring.mul(&f[i], &g[j]);
                for (k, slot) in out.iter_mut().enumerate() {
                    let coef = &self.table[i * self.rank + j][k];
                    if !self.ring.is_zero(coef) {
                        *slot = self.ring.add(slot, &self.ring.mul(&fg, coef));
                    }
                }
            }
        }
        out
    }
}

/// The right action of the dual algebra on a comodule: coact, then evaluate
/// the functional on the coring leg.
pub fn dual_action(m: &Comodule, c: &Coring, x: &[RElem], f: &[RElem]) -> Vec<RElem> {
    assert_eq!(x.len(), m.module.rank);
    assert_eq!(f.len(), c.rank);
    let y = m.rho.apply(x);
    let ring = &c.ring;
    (0..m.module.rank)
        .map(|j| {
            let mut acc = ring.zero();
            for a in 0..c.rank {
                let t = &y[j * c.rank + a];
                if !ring.is_zero(t) && !ring.is_zero(&f[a]) {
                    acc = ring.add(&acc, &ring.mul(t, &f[a]));
                }
            }
            acc
        })
        .collect()
}

/// Associativity and unit laws for the dual algebra: always proved on
/// generator triples, which extends bilinearly, and re-run over the whole
/// carrier whenever it fits under `cap`.
pub fn check_dual_algebra(c: &Coring, cap: u128) -> Report {
    let mut report = Report::new(format!("dual algebra: {}", c.name));
    let law = check_coring(c);
    if !law.passed {
        report.fail(
            "coring-laws",
            law.first_failure().map(|f| f.name.clone()).unwrap_or_default(),
        );
        return report;
    }
    let dual = dual_algebra(c);
    let n = c.rank;
    let ring = &c.ring;
    let basis: Vec<Vec<RElem>> = (0..n).map(|i| basis_vec(ring, n, i)).collect();
    let mut assoc = true;
    for f in &basis {
        for g in &basis {
            for h in &basis {
                let lhs = dual.multiply(&dual.multiply(f, g), h);
                let rhs = dual.multiply(f, &dual.multiply(g, h));
                assoc &= vecs_equal(ring, &lhs, &rhs);
            }
        }
    }
    report.record(
        "basis-associativity",
        assoc,
        format!("{} generator triples; the product extends bilinearly", n * n * n),
    );
    let mut unital = true;
    for f in &basis {
        unital &= vecs_equal(ring, &dual.multiply(&dual.unit, f), f);
        unital &= vecs_equal(ring, &dual.multiply(f, &dual.unit), f);
    }
    report.record("basis-unit", unital, "the counit is a two-sided unit on every generator");

    let carrier = carrier_size(ring, n);
    if carrier <= cap {
        let elems: Vec<Vec<RElem>> = mixed_radix(carrier_radices(ring, n))
            .map(|flat| chunk_elems(&flat, ring.width()))
            .collect();
        let mut full = true;
        for f in &elems {
            for g in &elems {
                for h in &elems {
                    let lhs = dual.multiply(&dual.multiply(f, g), h);
                    let rhs = dual.multiply(f, &dual.multiply(g, h));
                    full &= vecs_equal(ring, &lhs, &rhs);
                }
            }
        }
        for f in &elems {
            full &= vecs_equal(ring, &dual.multiply(&dual.unit, f), f);
            full &= vecs_equal(ring, &dual.multiply(f, &dual.unit), f);
        }
        report.record(
            "exhaustive-associativity",
            full,
            format!("all {carrier} elements cubed, plus unit laws"),
        );
    } else {
        report.pass(
            "exhaustive-bound",
            format!(
                "carrier {carrier} exceeds the {cap} cap; the generator check covers the rest by bilinearity"
            ),
        );
    }
    report
}

fn carrier_radices(ring: &FiniteRing, rank: usize) -> Vec<u64> {
    let mut radices = Vec::with_capacity(rank * ring.width());
    for _ in 0..rank {
        radices.extend_from_slice(&ring.moduli);
    }
    radices
}

fn chunk_elems(flat: &[u64], width: usize) -> Vec<RElem> {
    if width == 0 {
        return Vec::new();
    }
    flat.chunks(width).map(|c| c.to_vec()).collect()
}

fn carrier_size(ring: &FiniteRing, rank: usize) -> u128 {
    let card = ring.card();
    let mut out: u128 = 1;
    for _ in 0..rank {
        out = out.saturating_mul(card);
    }
    out
}

fn fmt_c_vec(e: &[RElem]) -> String {
    let parts: Vec<String> = e
        .iter()
        .map(|c| {
            if c.len() == 1 {
                c[0].to_string()
            } else {
                format!("({})", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            }
        })
        .collect();
    format!("({})", parts.join(", "))
}

/// A bicolinear multiplication on the coring together with a two-sided unit
/// for it: the data making the forgetful functor from comodules a two-sided
/// adjoint of induction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusSystem {
    pub e: Vec<RElem>,
    /// Multiplication table: a `rank` by `rank * rank` matrix over the ring.
    pub pi: RMat,
}

#[derive(Debug, Clone, Serialize)]
pub enum FrobeniusOutcome {
    Found { system: FrobeniusSystem, verification: Report },
    NotFound { certificate: Vec<String> },
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub candidate_bound: u128,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { candidate_bound: 4096 }
    }
}

fn colinearity_rows(c: &Coring) -> (Vec<Vec<RElem>>, Vec<RElem>) {
    let n = c.rank;
    let vars = n * n * n;
    let ring = &c.ring;
    let idn = RMat::identity(ring.clone(), n);
    let m1 = c.delta.kron(&idn);
    let m2 = idn.kron(&c.delta);
    let mut rows = Vec::with_capacity(2 * n * n * n * n);
    for u in 0..n * n {
        let (alpha, beta) = (u / n, u % n);
        for w in 0..n * n {
            let mut left = vec![ring.zero(); vars];
            let mut right = vec![ring.zero(); vars];
            for t in 0..n {
                let dv = c.delta.get(u, t);
                if !ring.is_zero(dv) {
                    left[t * n * n + w] = ring.add(&left[t * n * n + w], dv);
                    right[t * n * n + w] = ring.add(&right[t * n * n + w], dv);
                }
            }
            for wp in 0..n * n {
                let lc = m1.get(alpha * n * n + wp, w);
                if !ring.is_zero(lc) {
                    let slot = beta * n * n + wp;
                    left[slot] = ring.sub(&left[slot], lc);
                }
                let rc = m2.get(wp * n + beta, w);
                if !ring.is_zero(rc) {
                    let slot = alpha * n * n + wp;
                    right[slot] = ring.sub(&right[slot], rc);
                }
            }
            rows.push(left);
            rows.push(right);
        }
    }
    let rhs = vec![ring.zero(); rows.len()];
    (rows, rhs)
}

fn unit_rows(c: &Coring, e: &[RElem]) -> (Vec<Vec<RElem>>, Vec<RElem>) {
    let n = c.rank;
    let vars = n * n * n;
    let ring = &c.ring;
    let mut rows = Vec::with_capacity(2 * n * n);
    let mut rhs = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for t in 0..n {
            let mut from_left = vec![ring.zero(); vars];
            for (a, ea) in e.iter().enumerate() {
                if !ring.is_zero(ea) {
                    let slot = t * n * n + a * n + j;
                    from_left[slot] = ring.add(&from_left[slot], ea);
                }
            }
            rows.push(from_left);
            rhs.push(if t == j { ring.one() } else { ring.zero() });
            let mut from_right = vec![ring.zero(); vars];
            for (b, eb) in e.iter().enumerate() {
                if !ring.is_zero(eb) {
                    let slot = t * n * n + j * n + b;
                    from_right[slot] = ring.add(&from_right[slot], eb);
                }
            }
            rows.push(from_right);
            rhs.push(if t == j { ring.one() } else { ring.zero() });
        }
    }
    (rows, rhs)
}

/// Independent re-check of a proposed Frobenius system by direct matrix
/// arithmetic, ending with the finite dual basis the structure forces.
pub fn verify_frobenius(c: &Coring, system: &FrobeniusSystem) -> Report {
    let mut report = Report::new(format!("frobenius system: {}", c.name));
    let n = c.rank;
    let ring = &c.ring;
    if (system.pi.rows, system.pi.cols) != (n, n * n) || system.e.len() != n {
        report.fail("shape", "multiplication or unit table has the wrong shape");
        return report;
    }
    let idn = RMat::identity(ring.clone(), n);
    let dp = c.delta.mul(&system.pi);
    let left = idn.kron(&system.pi).mul(&c.delta.kron(&idn));
    report.record(
        "left-colinearity",
        dp == left,
        "comultiplying the product matches the left coaction route",
    );
    let right = system.pi.kron(&idn).mul(&idn.kron(&c.delta));
    report.record(
        "right-colinearity",
        dp == right,
        "comultiplying the product matches the right coaction route",
    );
    let mut unit_left = true;
    let mut unit_right = true;
    for j in 0..n {
        let mut e_bj = vec![ring.zero(); n * n];
        let mut bj_e = vec![ring.zero(); n * n];
        for a in 0..n {
            e_bj[a * n + j] = system.e[a].clone();
            bj_e[j * n + a] = system.e[a].clone();
        }
        let expected = basis_vec(ring, n, j);
        unit_left &= vecs_equal(ring, &system.pi.apply(&e_bj), &expected);
        unit_right &= vecs_equal(ring, &system.pi.apply(&bj_e), &expected);
    }
    report.record("unit-left", unit_left, "multiplying by the unit from the left fixes every generator");
    report.record("unit-right", unit_right, "multiplying by the unit from the right fixes every generator");
    let mut central = true;
    for t in 0..ring.width() {
        let mut s = ring.zero();
        s[t] = 1 % ring.moduli[t];
        for ea in &system.e {
            central &= ring.mul(&s, ea) == ring.mul(ea, &s);
        }
    }
    report.record(
        "centrality",
        central,
        format!(
            "commutative base with symmetric actions: {} ring coordinates against {n} unit coefficients",
            ring.width()
        ),
    );
    let mut dual_basis = true;
    for i in 0..n {
        let x = basis_vec(ring, n, i);
        let mut recon = vec![ring.zero(); n];
        for (j, coef) in x.iter().enumerate() {
            let gen = basis_vec(ring, n, j);
            for (slot, g) in recon.iter_mut().zip(&gen) {
                *slot = ring.add(slot, &ring.mul(g, coef));
            }
        }
        dual_basis &= vecs_equal(ring, &recon, &x);
    }
    report.record(
        "finite-dual-basis",
        dual_basis,
        format!("dual basis of size {n}: the generators with their coordinate functionals"),
    );
    report
}

/// Searches for a Frobenius system by exact linear algebra: the bicomodule
/// constraints are linear in the multiplication table, so the search runs
/// one congruence solve per candidate unit and re-verifies any hit through
/// an independent code path. A miss returns the elimination profiles as the
/// certificate.
pub fn frobenius_search(c: &Coring, cfg: &SearchConfig) -> Result<FrobeniusOutcome, CoringError> {
    let carrier = carrier_size(&c.ring, c.rank);
    if carrier > cfg.candidate_bound {
        return Err(CoringError::SearchBoundExceeded { carrier, bound: cfg.candidate_bound });
    }
    let law = check_coring(c);
    if !law.passed {
        return Err(CoringError::InvalidCoring(
            law.first_failure().map(|f| f.name.clone()).unwrap_or_default(),
        ));
    }
    let n = c.rank;
    let vars = n * n * n;
    let ring = &c.ring;
    let (base_rows, base_rhs) = colinearity_rows(c);
    let homogeneous = solve_ring_system(ring, &base_rows, &base_rhs, vars);
    let all_ones = vec![ring.one(); n];
    let mut tried: u128 = 0;
    let mut sample_conflict: Option<String> = None;
    for flat in mixed_radix(carrier_radices(ring, n)) {
        let e = chunk_elems(&flat, ring.width());
        tried += 1;
        let (urows, urhs) = unit_rows(c, &e);
        let mut rows = base_rows.clone();
        rows.extend(urows);
        let mut rhs = base_rhs.clone();
        rhs.extend(urhs);
        let solve = solve_ring_system(ring, &rows, &rhs, vars);
        match solve.solution {
            Some(sol) => {
                let mut pi = RMat::zero(ring.clone(), n, n * n);
                for t in 0..n {
                    for w in 0..n * n {
                        pi.set(t, w, sol[t * n * n + w].clone());
                    }
                }
                let system = FrobeniusSystem { e, pi };
                let verification = verify_frobenius(c, &system);
                if verification.passed {
                    return Ok(FrobeniusOutcome::Found { system, verification });
                }
                if sample_conflict.is_none() {
                    sample_conflict =
                        Some("a solver candidate failed independent verification".into());
                }
            }
            None => {
                let is_canonical = e == all_ones;
                if sample_conflict.is_none() || is_canonical {
                    if let Some(prof) = solve.profiles.iter().find(|p| p.conflict.is_some()) {
                        sample_conflict = Some(format!(
                            "unit candidate {}: coordinate {} mod {}: {}",
                            fmt_c_vec(&e),
                            prof.coordinate,
                            prof.modulus,
                            prof.conflict.clone().unwrap_or_default()
                        ));
                    }
                }
            }
        }
    }
    let mut certificate = vec![format!(
        "no frobenius system: all {tried} unit candidates over a carrier of {carrier} elements fail"
    )];
    for prof in &homogeneous.profiles {
        certificate.push(format!(
            "bicomodule constraints, ring coordinate {} mod {}: {} pivots on {} unknowns, factors {:?}, {} free parameters",
            prof.coordinate,
            prof.modulus,
            prof.pivots.len(),
            prof.unknowns,
            prof.pivots,
            prof.free
        ));
    }
    if let Some(sc) = sample_conflict {
        certificate.push(format!("sample obstruction: {sc}"));
    }
    Ok(FrobeniusOutcome::NotFound { certificate })
}

/// Size of the index family a verdict is asked about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilySize {
    Finite(usize),
    Symbolic,
}

/// Compares the product of a constant family of regular corings with its
/// coproduct. Finite families get an explicit verified Frobenius system;
/// the unbounded case gets the finiteness obstruction spelled out.
pub fn product_coproduct_verdict(
    ring: &FiniteRing,
    size: FamilySize,
    cfg: &SearchConfig,
) -> Result<Verdict, CoringError> {
    match size {
        FamilySize::Finite(0) => Err(CoringError::EmptyFamily),
        FamilySize::Finite(n) => {
            let coring = regular_sum_coring(ring, n)?;
            match frobenius_search(&coring, cfg)? {
                FrobeniusOutcome::Found { system, verification } => {
                    let certificate = vec![
                        format!(
                            "coring: {n}-fold direct sum of the regular coring over {}",
                            ring.label()
                        ),
                        format!(
                            "frobenius system found: unit e = {}, multiplication verified bicolinear with a two-sided unit",
                            fmt_c_vec(&system.e)
                        ),
                        format!("verification: {} named checks passed", verification.checks.len()),
                        format!(
                            "finitely generated projective witness: dual basis of size {}",
                            coring.rank
                        ),
                        "the forgetful functor from comodules is simultaneously left and right adjoint to induction; the pair (pi, e) is the witness".into(),
                        format!(
                            "product and coproduct of the {n}-member family are identified through this structure"
                        ),
                    ];
                    Ok(Verdict::Iso { certificate })
                }
                FrobeniusOutcome::NotFound { certificate } => {
                    Err(CoringError::VerdictUnavailable(certificate.join("; ")))
                }
            }
        }
        FamilySize::Symbolic => Ok(Verdict::NotIso {
            reasoning: vec![
                format!(
                    "suppose the coproduct coring over {} with an unbounded index set carried a frobenius system",
                    ring.label()
                ),
                "a frobenius system makes the coring finitely generated projective over its base ring".into(),
                "the unbounded direct sum is not finitely generated: any finite generating set is supported in finitely many slots, and the remaining slot idempotents are unreachable".into(),
                "so no frobenius system exists at unbounded size, while every finite stage carries a verified one".into(),
                "product and coproduct over the unbounded index therefore cannot be identified compatibly with the comodule structure".into(),
            ],
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn z(n: u64) -> FiniteRing {
        FiniteRing::zn(n)
    }

    #[test]
    fn sweedler_corings_satisfy_the_laws() {
        for n in [2, 4, 6] {
            let report = check_coring(&sweedler_coring(&z(n)));
            assert!(report.passed, "sweedler mod {n}: {:?}", report.first_failure());
            assert_eq!(report.checks.len(), 4);
        }
    }

    #[test]
    fn corrupted_comultiplication_names_the_broken_law() {
        let mut c = sweedler_coring(&z(4));
        c.delta.set(0, 0, vec![2]);
        let report = check_coring(&c);
        assert!(!report.passed);
        assert_eq!(report.first_failure().unwrap().name, "counit-left");
    }

    #[test]
    fn direct_sums_concatenate_slots() {
        let sum = regular_sum_coring(&z(4), 3).unwrap();
        assert_eq!(sum.rank, 3);
        assert_eq!(sum.slots, Some(vec![1, 1, 1]));
        assert!(check_coring(&sum).passed);
        for j in 0..3 {
            for pair in 0..9 {
                let expected = u64::from(pair == j * 3 + j);
                assert_eq!(sum.delta.get(pair, j), &vec![expected]);
            }
        }
        let single = direct_sum_coring(&[sweedler_coring(&z(6))]).unwrap();
        assert_eq!(single.delta, sweedler_coring(&z(6)).delta);
        assert_eq!(single.counit, sweedler_coring(&z(6)).counit);

        let err = direct_sum_coring(&[sweedler_coring(&z(2)), sweedler_coring(&z(3))]);
        assert!(matches!(err, Err(CoringError::BaseRingMismatch { .. })));
        assert!(matches!(direct_sum_coring(&[]), Err(CoringError::EmptyFamily)));
    }

    #[test]
    fn triangular_coring_is_counital_but_lopsided() {
        for n in [2, 4] {
            assert!(check_coring(&triangular_coring(&z(n))).passed);
        }
        let dual = dual_algebra(&triangular_coring(&z(2)));
        let f0 = basis_vec(&z(2), 3, 0);
        let f1 = basis_vec(&z(2), 3, 1);
        assert_eq!(dual.multiply(&f1, &f0), f1);
        assert_eq!(dual.multiply(&f0, &f1), vec![vec![0], vec![0], vec![0]]);
    }

    #[test]
    fn dual_algebra_is_associative_and_unital() {
        let r2 = regular_sum_coring(&z(4), 2).unwrap();
        let report = check_dual_algebra(&r2, 256);
        assert!(report.passed, "{:?}", report.first_failure());
        assert!(report.checks.iter().any(|c| c.name == "exhaustive-associativity"));
        assert!(check_dual_algebra(&triangular_coring(&z(2)), 256).passed);
        assert!(check_dual_algebra(&sweedler_coring(&z(6)), 256).passed);
        let r3 = regular_sum_coring(&z(4), 3).unwrap();
        let capped = check_dual_algebra(&r3, 16);
        assert!(capped.passed);
        assert!(capped.checks.iter().any(|c| c.name == "exhaustive-bound"));
    }

    #[test]
    fn dual_action_matches_dual_multiplication() {
        let c = regular_sum_coring(&z(4), 2).unwrap();
        let m = regular_comodule(&c);
        let dual = dual_algebra(&c);
        let mut points = vec![vec![vec![1], vec![1]], vec![vec![3], vec![2]]];
        for i in 0..2 {
            points.push(basis_vec(&z(4), 2, i));
        }
        for f_flat in mixed_radix(vec![4, 4]) {
            let f = chunk_elems(&f_flat, 1);
            for g_flat in mixed_radix(vec![4, 4]) {
                let g = chunk_elems(&g_flat, 1);
                for x in &points {
                    let stepped = dual_action(&m, &c, &dual_action(&m, &c, x, &f), &g);
                    let fused = dual_action(&m, &c, x, &dual.multiply(&f, &g));
                    assert_eq!(stepped, fused);
                }
            }
        }
    }

    #[test]
    fn comodule_checker_names_broken_laws() {
        let c = regular_sum_coring(&z(4), 2).unwrap();
        let mut m = regular_comodule(&c);
        assert!(check_comodule(&m, &c).passed);
        m.rho.set(0, 0, vec![2]);
        let report = check_comodule(&m, &c);
        assert!(!report.passed);
        assert_eq!(report.first_failure().unwrap().name, "coassociativity");
    }

    #[test]
    fn frobenius_search_certifies_group_like_sums() {
        for n_ring in [2u64, 4] {
            for slots in 1..=3usize {
                let coring = regular_sum_coring(&z(n_ring), slots).unwrap();
                let outcome = frobenius_search(&coring, &SearchConfig::default()).unwrap();
                match outcome {
                    FrobeniusOutcome::Found { system, verification } => {
                        assert_eq!(system.e, vec![vec![1]; slots], "unit over mod {n_ring}");
                        assert!(verification.passed);
                        assert!(verification
                            .checks
                            .iter()
                            .any(|c| c.name == "finite-dual-basis" && c.passed));
                    }
                    FrobeniusOutcome::NotFound { certificate } => {
                        panic!("expected a system for {slots} slots mod {n_ring}: {certificate:?}")
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_search_rejects_lawless_input() {
        let mut c = sweedler_coring(&z(4));
        c.delta.set(0, 0, vec![2]);
        let err = frobenius_search(&c, &SearchConfig::default());
        match err {
            Err(CoringError::InvalidCoring(name)) => assert!(name.contains("counit")),
            other => panic!("expected a law rejection, got {other:?}"),
        }
    }

    #[test]
    fn frobenius_search_respects_the_candidate_bound() {
        let coring = regular_sum_coring(&z(2), 13).unwrap();
        match frobenius_search(&coring, &SearchConfig::default()) {
            Err(CoringError::SearchBoundExceeded { carrier, bound }) => {
                assert_eq!(carrier, 8192);
                assert_eq!(bound, 4096);
            }
            other => panic!("expected a bound error, got {other:?}"),
        }
    }

    #[test]
    fn triangular_coring_admits_no_unit() {
        for n in [2u64, 3] {
            let outcome =
                frobenius_search(&triangular_coring(&z(n)), &SearchConfig::default()).unwrap();
            match outcome {
                FrobeniusOutcome::NotFound { certificate } => {
                    assert!(certificate[0].contains("unit candidates"));
                    assert!(certificate.iter().any(|l| l.contains("free parameters")));
                    assert!(certificate.iter().any(|l| l.contains("sample obstruction")));
                }
                FrobeniusOutcome::Found { system, .. } => {
                    panic!("triangular coring mod {n} cannot carry a unit, found {system:?}")
                }
            }
        }
    }

    #[test]
    fn split_assemble_roundtrip_is_exact() {
        let ring = z(6);
        let slots = vec![sweedler_coring(&ring); 3];
        let heavy = RModule {
            ring: ring.clone(),
            rank: 1,
            projector: RMat::from_scalar_rows(ring.clone(), &[vec![3]]),
        };
        let comps = vec![
            sweedler_comodule(heavy),
            sweedler_comodule(RModule::free(&ring, 2)),
            sweedler_comodule(RModule::free(&ring, 0)),
        ];
        let sum = direct_sum_coring(&slots).unwrap();
        let assembled = assemble_comodule(&comps, &slots).unwrap();
        assert!(check_comodule(&assembled, &sum).passed);
        let outcome = split_comodule(&assembled, &sum).unwrap();
        assert!(outcome.certificate.passed, "{:?}", outcome.certificate.first_failure());
        assert_eq!(outcome.components.len(), 3);
        for (got, (orig, slot)) in outcome.components.iter().zip(comps.iter().zip(&slots)) {
            assert_eq!(got, &canonical_comodule(orig, slot));
        }
    }

    #[test]
    fn slot_supported_coaction_splits_to_zero() {
        let ring = z(4);
        let c = regular_sum_coring(&ring, 2).unwrap();
        let mut rho = RMat::zero(ring.clone(), 4, 2);
        rho.set(0, 0, vec![1]);
        rho.set(2, 1, vec![1]);
        let m = Comodule { module: RModule::free(&ring, 2), rho };
        assert!(check_comodule(&m, &c).passed);
        let outcome = split_comodule(&m, &c).unwrap();
        assert!(outcome.certificate.passed);
        let ranks: Vec<usize> = outcome.components.iter().map(|x| x.module.rank).collect();
        assert_eq!(ranks, vec![2, 0]);
    }

    #[test]
    fn regular_comodule_splits_into_sweedler_slots() {
        let ring = z(4);
        let c = regular_sum_coring(&ring, 3).unwrap();
        let outcome = split_comodule(&regular_comodule(&c), &c).unwrap();
        assert!(outcome.certificate.passed);
        let expected = sweedler_comodule(RModule::free(&ring, 1));
        for comp in &outcome.components {
            assert_eq!(comp, &expected);
        }
        let names: Vec<&str> =
            outcome.certificate.checks.iter().map(|ch| ch.name.as_str()).collect();
        assert!(names.contains(&"idempotents-span"));
        assert!(names.contains(&"idempotents-orthogonal"));
    }

    #[test]
    fn untagged_corings_refuse_to_split() {
        let c = sweedler_coring(&z(4));
        let m = regular_comodule(&c);
        assert!(matches!(split_comodule(&m, &c), Err(CoringError::NotDirectSumCoring)));
    }

    fn idempotent_scalars(ring: &FiniteRing) -> Vec<RElem> {
        ring.elements().filter(|e| ring.mul(e, e) == *e).collect()
    }

    #[test]
    fn seeded_roundtrips_hold_for_twenty_comodules() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC0DE);
        for case in 0..20 {
            let ring = z([2, 4, 6][case % 3]);
            let idems = idempotent_scalars(&ring);
            let slot_count = rng.gen_range(1..=3);
            let mut slots = Vec::new();
            let mut comps = Vec::new();
            for s in 0..slot_count {
                if s == 0 && case % 4 == 0 {
                    let wide = regular_sum_coring(&ring, 2).unwrap();
                    comps.push(regular_comodule(&wide));
                    slots.push(wide);
                    continue;
                }
                let rank = rng.gen_range(0..=2);
                let mut projector = RMat::zero(ring.clone(), rank, rank);
                for d in 0..rank {
                    let pick = idems[rng.gen_range(0..idems.len())].clone();
                    projector.set(d, d, pick);
                }
                comps.push(sweedler_comodule(RModule { ring: ring.clone(), rank, projector }));
                slots.push(sweedler_coring(&ring));
            }
            let sum = direct_sum_coring(&slots).unwrap();
            let assembled = assemble_comodule(&comps, &slots).unwrap();
            assert!(check_comodule(&assembled, &sum).passed, "case {case}");
            let outcome = split_comodule(&assembled, &sum).unwrap();
            assert!(outcome.certificate.passed, "case {case}");
            for (got, (orig, slot)) in outcome.components.iter().zip(comps.iter().zip(&slots)) {
                assert_eq!(got, &canonical_comodule(orig, slot), "case {case}");
            }
        }
    }

    #[test]
    fn product_coproduct_verdicts() {
        let cfg = SearchConfig::default();
        let iso = product_coproduct_verdict(&z(2), FamilySize::Finite(2), &cfg).unwrap();
        assert_eq!(iso.label(), "ISO");
        assert!(iso.lines().iter().any(|l| l.contains("frobenius system found")));
        let iso = product_coproduct_verdict(&z(4), FamilySize::Finite(3), &cfg).unwrap();
        assert_eq!(iso.label(), "ISO");
        let not = product_coproduct_verdict(&z(2), FamilySize::Symbolic, &cfg).unwrap();
        assert_eq!(not.label(), "NOT-ISO");
        assert!(not.lines().iter().any(|l| l.contains("finitely generated")));
        assert!(matches!(
            product_coproduct_verdict(&z(2), FamilySize::Finite(0), &cfg),
            Err(CoringError::EmptyFamily)
        ));
    }

    #[test]
    fn fixtures_roundtrip_through_json() {
        let coring = regular_sum_coring(&z(2), 2).unwrap();
        let text = serde_json::to_string(&coring).unwrap();
        let back: Coring = serde_json::from_str(&text).unwrap();
        assert_eq!(coring, back);
        let m = regular_comodule(&coring);
        let text = serde_json::to_string(&m).unwrap();
        let back: Comodule = serde_json::from_str(&text).unwrap();
        assert_eq!(m, back);
        if let FrobeniusOutcome::Found { system, .. } =
            frobenius_search(&coring, &SearchConfig::default()).unwrap()
        {
            let text = serde_json::to_string(&system).unwrap();
            let back: FrobeniusSystem = serde_json::from_str(&text).unwrap();
            assert_eq!(system, back);
        } else {
            panic!("two regular slots carry a frobenius system");
        }
    }
}
