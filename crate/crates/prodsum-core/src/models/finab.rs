//! Finite abelian groups presented as products of cyclic groups.
//!
//! An object is a list of moduli; the carrier is the product of the ℤ/nᵢ.
//! A morphism is a residue matrix whose entry (j, i) sends generator i of the
//! domain into component j of the codomain, subject to the order condition
//! nᵢ·a ≡ 0 (mod mⱼ). Hom-sets are abelian groups under entrywise addition,
//! so every morphism is invertible in its hom-monoid.

use crate::model::{BiproductData, CategoryModel, ModelError};
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use std::fmt;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FinAbObj(pub Vec<u64>);

impl FinAbObj {
    pub fn cyclic(n: u64) -> Self {
        assert!(n >= 1, "modulus must be positive");
        FinAbObj(vec![n])
    }

    pub fn from_moduli(moduli: &[u64]) -> Self {
        assert!(moduli.iter().all(|&n| n >= 1), "moduli must be positive");
        FinAbObj(moduli.to_vec())
    }

    pub fn order(&self) -> u128 {
        self.0.iter().map(|&n| n as u128).product()
    }

    /// Every element as a residue vector, in mixed-radix order.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for &n in &self.0 {
            let mut next = Vec::with_capacity(out.len() * n as usize);
            for prefix in &out {
                for r in 0..n {
                    let mut e = prefix.clone();
                    e.push(r);
                    next.push(e);
                }
            }
            out = next;
        }
        out
    }
}

impl fmt::Display for FinAbObj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(|n| format!("Z/{n}")).collect();
        write!(f, "{}", parts.join("(+)"))
    }
}

impl fmt::Debug for FinAbObj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FinAbMor {
    dom: FinAbObj,
    cod: FinAbObj,
    /// Row j, column i: coefficient on generator i in codomain component j,
    /// reduced mod the codomain modulus mⱼ.
    entries: Vec<Vec<u64>>,
}

impl FinAbMor {
    pub fn new(dom: FinAbObj, cod: FinAbObj, entries: Vec<Vec<u64>>) -> Result<Self, ModelError> {
        if entries.len() != cod.0.len() || entries.iter().any(|row| row.len() != dom.0.len()) {
            return Err(ModelError::ShapeMismatch(format!(
                "matrix shape {}x{} does not fit {} -> {}",
                entries.len(),
                entries.first().map_or(0, |r| r.len()),
                dom,
                cod
            )));
        }
        let entries: Vec<Vec<u64>> = entries
            .iter()
            .enumerate()
            .map(|(j, row)| row.iter().map(|&a| a % cod.0[j]).collect())
            .collect();
        for (j, row) in entries.iter().enumerate() {
            for (i, &a) in row.iter().enumerate() {
                if (a as u128 * dom.0[i] as u128) % cod.0[j] as u128 != 0 {
                    return Err(ModelError::ShapeMismatch(format!(
                        "entry {a} at ({j},{i}) violates the order condition for {} -> {}",
                        dom, cod
                    )));
                }
            }
        }
        Ok(FinAbMor { dom, cod, entries })
    }

    pub fn dom(&self) -> &FinAbObj {
        &self.dom
    }

    pub fn cod(&self) -> &FinAbObj {
        &self.cod
    }

    pub fn entries(&self) -> &[Vec<u64>] {
        &self.entries
    }

    /// Image of a residue vector of the domain.
    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        assert_eq!(x.len(), self.dom.0.len());
        self.entries
            .iter()
            .enumerate()
            .map(|(j, row)| {
                let m = self.cod.0[j] as u128;
                let s: u128 = row.iter().zip(x).map(|(&a, &xi)| a as u128 * xi as u128 % m).sum();
                (s % m) as u64
            })
            .collect()
    }
}

impl fmt::Display for FinAbMor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|row| row.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "[{}]: {} -> {}", rows.join("; "), self.dom, self.cod)
    }
}

impl fmt::Debug for FinAbMor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Per-entry shape of a hom-set: entry (j, i) ranges over the multiples of
/// mⱼ/gcd(mⱼ, nᵢ), so it has gcd(mⱼ, nᵢ) admissible values.
fn entry_shape(dom: &FinAbObj, cod: &FinAbObj) -> Vec<(u64, u64)> {
    let mut shape = Vec::new();
    for &m in &cod.0 {
        for &n in &dom.0 {
            let g = gcd(m, n);
            shape.push((m / g, g));
        }
    }
    shape
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FinAb;

impl FinAb {
    /// Entrywise additive inverse, the invertibility witness of the hom-group.
    pub fn neg(&self, f: &FinAbMor) -> FinAbMor {
        let entries = f
            .entries
            .iter()
            .enumerate()
            .map(|(j, row)| {
                let m = f.cod.0[j];
                row.iter().map(|&a| if a == 0 { 0 } else { m - a }).collect()
            })
            .collect();
        FinAbMor { dom: f.dom.clone(), cod: f.cod.clone(), entries }
    }
}

impl CategoryModel for FinAb {
    type Obj = FinAbObj;
    type Mor = FinAbMor;

    fn name(&self) -> &'static str {
        "finab"
    }

    fn zero_object(&self) -> FinAbObj {
        FinAbObj(vec![])
    }

    fn identity(&self, o: &FinAbObj) -> FinAbMor {
        let k = o.0.len();
        let entries = (0..k).map(|j| (0..k).map(|i| u64::from(i == j)).collect()).collect();
        FinAbMor { dom: o.clone(), cod: o.clone(), entries }
    }

    fn zero_mor(&self, dom: &FinAbObj, cod: &FinAbObj) -> FinAbMor {
        FinAbMor {
            dom: dom.clone(),
            cod: cod.clone(),
            entries: vec![vec![0; dom.0.len()]; cod.0.len()],
        }
    }

    fn dom(&self, f: &FinAbMor) -> FinAbObj {
        f.dom.clone()
    }

    fn cod(&self, f: &FinAbMor) -> FinAbObj {
        f.cod.clone()
    }

    fn compose(&self, outer: &FinAbMor, inner: &FinAbMor) -> Result<FinAbMor, ModelError> {
        if outer.dom != inner.cod {
            return Err(ModelError::ShapeMismatch(format!(
                "cannot compose {} -> {} after {} -> {}",
                outer.dom, outer.cod, inner.dom, inner.cod
            )));
        }
        let entries = outer
            .entries
            .iter()
            .enumerate()
            .map(|(k, orow)| {
                let m = outer.cod.0[k] as u128;
                (0..inner.dom.0.len())
                    .map(|i| {
                        let s: u128 = orow
                            .iter()
                            .zip(&inner.entries)
                            .map(|(&a, irow)| a as u128 * irow[i] as u128 % m)
                            .sum();
                        (s % m) as u64
                    })
                    .collect()
            })
            .collect();
        Ok(FinAbMor { dom: inner.dom.clone(), cod: outer.cod.clone(), entries })
    }

    fn add(&self, f: &FinAbMor, g: &FinAbMor) -> Result<FinAbMor, ModelError> {
        if f.dom != g.dom || f.cod != g.cod {
            return Err(ModelError::ShapeMismatch(format!(
                "cannot add {} -> {} and {} -> {}",
                f.dom, f.cod, g.dom, g.cod
            )));
        }
        let entries = f
            .entries
            .iter()
            .zip(&g.entries)
            .enumerate()
            .map(|(j, (fr, gr))| {
                let m = f.cod.0[j];
                fr.iter().zip(gr).map(|(&a, &b)| (a + b) % m).collect()
            })
            .collect();
        Ok(FinAbMor { dom: f.dom.clone(), cod: f.cod.clone(), entries })
    }

    fn biproduct(&self, parts: &[FinAbObj]) -> BiproductData<Self> {
        let whole = FinAbObj(parts.iter().flat_map(|p| p.0.iter().copied()).collect());
        let mut injections = Vec::with_capacity(parts.len());
        let mut projections = Vec::with_capacity(parts.len());
        let mut offset = 0usize;
        for part in parts {
            let k = part.0.len();
            let inj_entries = (0..whole.0.len())
                .map(|j| {
                    (0..k).map(|i| u64::from(j >= offset && j - offset == i)).collect()
                })
                .collect();
            injections.push(FinAbMor {
                dom: part.clone(),
                cod: whole.clone(),
                entries: inj_entries,
            });
            let proj_entries = (0..k)
                .map(|j| {
                    (0..whole.0.len()).map(|i| u64::from(i >= offset && i - offset == j)).collect()
                })
                .collect();
            projections.push(FinAbMor {
                dom: whole.clone(),
                cod: part.clone(),
                entries: proj_entries,
            });
            offset += k;
        }
        BiproductData { object: whole, injections, projections }
    }

    fn carrier_size(&self, o: &FinAbObj) -> Option<u128> {
        Some(o.order())
    }

    fn hom_size(&self, dom: &FinAbObj, cod: &FinAbObj) -> Option<u128> {
        let mut total: u128 = 1;
        for (_, count) in entry_shape(dom, cod) {
            total = total.checked_mul(count as u128)?;
        }
        Some(total)
    }

    fn enumerate_hom(&self, dom: &FinAbObj, cod: &FinAbObj, cap: u128) -> Option<Vec<FinAbMor>> {
        let shape = entry_shape(dom, cod);
        let total = self.hom_size(dom, cod)?;
        if total > cap {
            return None;
        }
        let cols = dom.0.len();
        let mut out = Vec::with_capacity(total as usize);
        let mut counter = vec![0u64; shape.len()];
        loop {
            let flat: Vec<u64> =
                counter.iter().zip(&shape).map(|(&k, &(step, _))| k * step).collect();
            let entries: Vec<Vec<u64>> = if cols == 0 {
                vec![vec![]; cod.0.len()]
            } else {
                flat.chunks(cols).map(|c| c.to_vec()).collect()
            };
            out.push(FinAbMor { dom: dom.clone(), cod: cod.clone(), entries });
            let mut pos = shape.len();
            loop {
                if pos == 0 {
                    return Some(out);
                }
                pos -= 1;
                counter[pos] += 1;
                if counter[pos] < shape[pos].1 {
                    break;
                }
                counter[pos] = 0;
            }
        }
    }

    fn sample_mor(&self, dom: &FinAbObj, cod: &FinAbObj, rng: &mut dyn RngCore) -> FinAbMor {
        let shape = entry_shape(dom, cod);
        let cols = dom.0.len();
        let flat: Vec<u64> =
            shape.iter().map(|&(step, count)| rng.gen_range(0..count) * step).collect();
        let entries = if cols == 0 {
            vec![vec![]; cod.0.len()]
        } else {
            flat.chunks(cols).map(|c| c.to_vec()).collect()
        };
        FinAbMor { dom: dom.clone(), cod: cod.clone(), entries }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{check_enrichment, EnrichmentConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Independent counting oracle: filter raw matrices by the order condition
    /// directly, without the gcd shortcut.
    fn brute_force_hom_count(dom: &FinAbObj, cod: &FinAbObj) -> u128 {
        let mut count: u128 = 1;
        for &m in &cod.0 {
            for &n in &dom.0 {
                let valid = (0..m).filter(|&a| (a * n) % m == 0).count();
                count *= valid as u128;
            }
        }
        count
    }

    fn z(n: u64) -> FinAbObj {
        FinAbObj::cyclic(n)
    }

    #[test]
    fn hom_sizes_match_brute_force() {
        let model = FinAb;
        let objs = [z(2), z(3), z(4), z(6), FinAbObj::from_moduli(&[2, 2])];
        for dom in &objs {
            for cod in &objs {
                let expected = brute_force_hom_count(dom, cod);
                assert_eq!(model.hom_size(dom, cod), Some(expected), "{dom} -> {cod}");
                let all = model.enumerate_hom(dom, cod, 1 << 20).unwrap();
                assert_eq!(all.len() as u128, expected, "{dom} -> {cod}");
                let dedup: std::collections::BTreeSet<_> = all.iter().collect();
                assert_eq!(dedup.len(), all.len(), "duplicates in {dom} -> {cod}");
            }
        }
    }

    #[test]
    fn frozen_hom_counts() {
        let model = FinAb;
        assert_eq!(model.hom_size(&z(2), &z(4)), Some(2));
        assert_eq!(model.hom_size(&z(2), &z(3)), Some(1));
        assert_eq!(model.hom_size(&z(6), &z(4)), Some(2));
        assert_eq!(model.hom_size(&z(4), &z(4)), Some(4));
        let only_zero = model.enumerate_hom(&z(2), &z(3), 10).unwrap();
        assert_eq!(only_zero, vec![model.zero_mor(&z(2), &z(3))]);
    }

    #[test]
    fn composition_is_function_composition() {
        let model = FinAb;
        let a = z(4);
        let b = FinAbObj::from_moduli(&[2, 4]);
        let c = z(6);
        for f in model.enumerate_hom(&a, &b, 1 << 12).unwrap() {
            for g in model.enumerate_hom(&b, &c, 1 << 12).unwrap() {
                let gf = model.compose(&g, &f).unwrap();
                for x in a.elements() {
                    assert_eq!(gf.apply(&x), g.apply(&f.apply(&x)));
                }
            }
        }
    }

    #[test]
    fn addition_is_pointwise() {
        let model = FinAb;
        let a = z(4);
        let b = FinAbObj::from_moduli(&[2, 4]);
        let homs = model.enumerate_hom(&a, &b, 1 << 12).unwrap();
        for f in &homs {
            for g in &homs {
                let sum = model.add(f, g).unwrap();
                for x in a.elements() {
                    let fx = f.apply(&x);
                    let gx = g.apply(&x);
                    let expect: Vec<u64> =
                        fx.iter().zip(&gx).zip(&b.0).map(|((&p, &q), &m)| (p + q) % m).collect();
                    assert_eq!(sum.apply(&x), expect);
                }
            }
        }
    }

    #[test]
    fn doubling_on_z4_squares_to_zero() {
        let model = FinAb;
        let double = FinAbMor::new(z(4), z(4), vec![vec![2]]).unwrap();
        let sq = model.compose(&double, &double).unwrap();
        assert_eq!(sq, model.zero_mor(&z(4), &z(4)));
    }

    #[test]
    fn identity_plus_identity_vanishes_on_z2() {
        let model = FinAb;
        let id = model.identity(&z(2));
        assert_eq!(model.add(&id, &id).unwrap(), model.zero_mor(&z(2), &z(2)));
    }

    #[test]
    fn order_condition_enforced_at_construction() {
        assert!(FinAbMor::new(z(2), z(4), vec![vec![1]]).is_err());
        assert!(FinAbMor::new(z(2), z(4), vec![vec![2]]).is_ok());
        assert!(FinAbMor::new(z(2), z(4), vec![vec![1], vec![0]]).is_err());
    }

    #[test]
    fn biproduct_relations() {
        let model = FinAb;
        let parts = [z(2), z(3), z(4)];
        let data = model.biproduct(&parts);
        assert_eq!(data.object, FinAbObj::from_moduli(&[2, 3, 4]));
        for (i, inj) in data.injections.iter().enumerate() {
            for (j, proj) in data.projections.iter().enumerate() {
                let comp = model.compose(proj, inj).unwrap();
                if i == j {
                    assert_eq!(comp, model.identity(&parts[i]));
                } else {
                    assert_eq!(comp, model.zero_mor(&parts[i], &parts[j]));
                }
            }
        }
        let mut acc = model.zero_mor(&data.object, &data.object);
        for (inj, proj) in data.injections.iter().zip(&data.projections) {
            acc = model.add(&acc, &model.compose(inj, proj).unwrap()).unwrap();
        }
        assert_eq!(acc, model.identity(&data.object));
    }

    #[test]
    fn every_morphism_has_additive_inverse() {
        let model = FinAb;
        let dom = z(4);
        let cod = FinAbObj::from_moduli(&[2, 4]);
        for f in model.enumerate_hom(&dom, &cod, 1 << 12).unwrap() {
            let n = model.neg(&f);
            assert_eq!(model.add(&f, &n).unwrap(), model.zero_mor(&dom, &cod));
        }
    }

    #[test]
    fn enrichment_exhaustive_on_small_objects() {
        let model = FinAb;
        let objs = vec![z(2), z(4), FinAbObj::from_moduli(&[2, 3])];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let report = check_enrichment(&model, &objs, &EnrichmentConfig::default(), &mut rng);
        assert!(report.passed, "{:?}", report.first_failure());
    }

    #[test]
    fn sampled_morphisms_are_valid() {
        let model = FinAb;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let dom = FinAbObj::from_moduli(&[2, 6]);
        let cod = FinAbObj::from_moduli(&[4, 3]);
        for _ in 0..50 {
            let f = model.sample_mor(&dom, &cod, &mut rng);
            let rebuilt = FinAbMor::new(dom.clone(), cod.clone(), f.entries.clone()).unwrap();
            assert_eq!(rebuilt, f);
        }
    }
}
