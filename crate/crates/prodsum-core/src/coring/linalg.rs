//! Exact linear algebra over finite commutative rings presented as products
//! of cyclic factors.
//!
//! Ring elements are coordinate vectors, one coordinate per cyclic factor;
//! matrices are dense and row-major. The solver reduces a ring-linear system
//! to one congruence system per ring coordinate, splits each modulus into
//! prime powers, and eliminates with valuation pivoting, so every answer is
//! exact and the elimination profile (pivot factors, free parameters, first
//! conflict) can be handed back to the caller.

use serde::{Deserialize, Serialize};

use super::CoringError;

/// One ring element: a coordinate per cyclic factor of the ring.
pub type RElem = Vec<u64>;

/// A finite commutative ring given as a product of cyclic rings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteRing {
    pub moduli: Vec<u64>,
}

impl FiniteRing {
    pub fn new(moduli: Vec<u64>) -> Result<Self, CoringError> {
        for &m in &moduli {
            if m == 0 {
                return Err(CoringError::Shape("ring modulus 0".into()));
            }
            if m > (1 << 31) {
                return Err(CoringError::Shape(format!("ring modulus {m} too large")));
            }
        }
        Ok(FiniteRing { moduli })
    }

    /// The cyclic ring of integers mod `n`.
    pub fn zn(n: u64) -> Self {
        FiniteRing::new(vec![n]).expect("cyclic modulus")
    }

    pub fn width(&self) -> usize {
        self.moduli.len()
    }

    pub fn card(&self) -> u128 {
        self.moduli.iter().fold(1u128, |acc, &m| acc.saturating_mul(m as u128))
    }

    pub fn label(&self) -> String {
        if self.moduli.is_empty() {
            return "0".into();
        }
        self.moduli.iter().map(|m| format!("Z/{m}")).collect::<Vec<_>>().join(" x ")
    }

    pub fn zero(&self) -> RElem {
        vec![0; self.moduli.len()]
    }

    pub fn one(&self) -> RElem {
        self.moduli.iter().map(|&m| 1 % m).collect()
    }

    /// Image of an integer under the diagonal map into the product.
    pub fn scalar(&self, s: u64) -> RElem {
        self.moduli.iter().map(|&m| s % m).collect()
    }

    pub fn reduce(&self, e: &RElem) -> RElem {
        debug_assert_eq!(e.len(), self.moduli.len());
        e.iter().zip(&self.moduli).map(|(&x, &m)| x % m).collect()
    }

    pub fn add(&self, a: &RElem, b: &RElem) -> RElem {
        debug_assert_eq!(a.len(), b.len());
        a.iter()
            .zip(b)
            .zip(&self.moduli)
            .map(|((&x, &y), &m)| (x + y) % m)
            .collect()
    }

    pub fn sub(&self, a: &RElem, b: &RElem) -> RElem {
        a.iter()
            .zip(b)
            .zip(&self.moduli)
            .map(|((&x, &y), &m)| (x + m - y % m) % m)
            .collect()
    }

    pub fn mul(&self, a: &RElem, b: &RElem) -> RElem {
        a.iter()
            .zip(b)
            .zip(&self.moduli)
            .map(|((&x, &y), &m)| ((x as u128 * y as u128) % m as u128) as u64)
            .collect()
    }

    pub fn neg(&self, a: &RElem) -> RElem {
        a.iter().zip(&self.moduli).map(|(&x, &m)| (m - x % m) % m).collect()
    }

    pub fn is_zero(&self, a: &RElem) -> bool {
        a.iter().zip(&self.moduli).all(|(&x, &m)| x % m == 0)
    }

    /// Every ring element, counted in little-endian coordinate order.
    pub fn elements(&self) -> MixedRadix {
        mixed_radix(self.moduli.clone())
    }
}

/// Counter over tuples with per-position radices, position zero fastest.
pub struct MixedRadix {
    radices: Vec<u64>,
    next: Option<Vec<u64>>,
}

pub fn mixed_radix(radices: Vec<u64>) -> MixedRadix {
    let start = if radices.iter().all(|&r| r > 0) { Some(vec![0; radices.len()]) } else { None };
    MixedRadix { radices, next: start }
}

impl Iterator for MixedRadix {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let current = self.next.take()?;
        let mut bumped = current.clone();
        let mut i = 0;
        loop {
            if i == bumped.len() {
                break;
            }
            bumped[i] += 1;
            if bumped[i] < self.radices[i] {
                self.next = Some(bumped);
                break;
            }
            bumped[i] = 0;
            i += 1;
        }
        Some(current)
    }
}

/// Dense row-major matrix with entries in a finite commutative ring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RMat {
    pub ring: FiniteRing,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<RElem>,
}

impl RMat {
    pub fn new(ring: FiniteRing, rows: usize, cols: usize, data: Vec<RElem>) -> Result<Self, CoringError> {
        if data.len() != rows * cols {
            return Err(CoringError::Shape(format!(
                "matrix data holds {} entries for a {rows} x {cols} shape",
                data.len()
            )));
        }
        for e in &data {
            if e.len() != ring.width() {
                return Err(CoringError::Shape(format!(
                    "entry width {} differs from ring width {}",
                    e.len(),
                    ring.width()
                )));
            }
        }
        let data = data.iter().map(|e| ring.reduce(e)).collect();
        Ok(RMat { ring, rows, cols, data })
    }

    pub fn zero(ring: FiniteRing, rows: usize, cols: usize) -> Self {
        let z = ring.zero();
        RMat { rows, cols, data: vec![z; rows * cols], ring }
    }

    pub fn identity(ring: FiniteRing, n: usize) -> Self {
        let mut m = RMat::zero(ring, n, n);
        for i in 0..n {
            let one = m.ring.one();
            m.set(i, i, one);
        }
        m
    }

    /// Builds a matrix from integer rows through the diagonal scalar map.
    pub fn from_scalar_rows(ring: FiniteRing, rows: &[Vec<u64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), cols, "ragged scalar rows");
                r.iter().map(|&s| ring.scalar(s)).collect::<Vec<_>>()
            })
            .collect();
        RMat { rows: rows.len(), cols, data, ring }
    }

    pub fn get(&self, r: usize, c: usize) -> &RElem {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: RElem) {
        self.data[r * self.cols + c] = self.ring.reduce(&v);
    }

    pub fn add(&self, other: &RMat) -> RMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| self.ring.add(a, b)).collect();
        RMat { ring: self.ring.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn mul(&self, other: &RMat) -> RMat {
        assert_eq!(self.cols, other.rows, "inner dimensions");
        let mut out = RMat::zero(self.ring.clone(), self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if self.ring.is_zero(a) {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if self.ring.is_zero(b) {
                        continue;
                    }
                    let prod = self.ring.mul(a, b);
                    let cur = self.ring.add(out.get(r, c), &prod);
                    out.set(r, c, cur);
                }
            }
        }
        out
    }

    /// Kronecker product; pair indices flatten with the second factor fastest.
    pub fn kron(&self, other: &RMat) -> RMat {
        let mut out = RMat::zero(self.ring.clone(), self.rows * other.rows, self.cols * other.cols);
        for ra in 0..self.rows {
            for ca in 0..self.cols {
                let a = self.get(ra, ca);
                if self.ring.is_zero(a) {
                    continue;
                }
                for rb in 0..other.rows {
                    for cb in 0..other.cols {
                        let b = other.get(rb, cb);
                        if self.ring.is_zero(b) {
                            continue;
                        }
                        out.set(ra * other.rows + rb, ca * other.cols + cb, self.ring.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[RElem]) -> Vec<RElem> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = self.ring.zero();
                for c in 0..self.cols {
                    let e = self.get(r, c);
                    if self.ring.is_zero(e) || self.ring.is_zero(&v[c]) {
                        continue;
                    }
                    acc = self.ring.add(&acc, &self.ring.mul(e, &v[c]));
                }
                acc
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| self.ring.is_zero(e))
    }

    pub fn is_idempotent(&self) -> bool {
        self.rows == self.cols && self.mul(self) == *self
    }

    pub fn block_diag(ring: FiniteRing, parts: &[&RMat]) -> RMat {
        let rows = parts.iter().map(|p| p.rows).sum();
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = RMat::zero(ring, rows, cols);
        let (mut ro, mut co) = (0, 0);
        for p in parts {
            for r in 0..p.rows {
                for c in 0..p.cols {
                    let v = p.get(r, c);
                    if !out.ring.is_zero(v) {
                        out.set(ro + r, co + c, v.clone());
                    }
                }
            }
            ro += p.rows;
            co += p.cols;
        }
        out
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> RMat {
        let data = rows
            .iter()
            .flat_map(|&r| cols.iter().map(move |&c| self.get(r, c).clone()))
            .collect();
        RMat { ring: self.ring.clone(), rows: rows.len(), cols: cols.len(), data }
    }
}

/// Elimination summary for one prime-power stage of a congruence solve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveProfile {
    pub coordinate: usize,
    pub modulus: u64,
    pub unknowns: usize,
    /// Pivot values `p^v` in elimination order; valuations never decrease.
    pub pivots: Vec<u64>,
    pub free: usize,
    pub conflict: Option<String>,
}

/// Outcome of a ring-linear solve: one particular solution when the system
/// is consistent, plus the per-coordinate elimination profiles either way.
#[derive(Debug, Clone)]
pub struct RingSolve {
    pub solution: Option<Vec<RElem>>,
    pub profiles: Vec<SolveProfile>,
}

/// Solves `A x = b` where the coefficients are ring elements; the product
/// ring splits the problem into one congruence system per coordinate.
pub fn solve_ring_system(
    ring: &FiniteRing,
    rows: &[Vec<RElem>],
    rhs: &[RElem],
    cols: usize,
) -> RingSolve {
    assert_eq!(rows.len(), rhs.len());
    let mut per_coord: Vec<Option<Vec<u64>>> = Vec::new();
    let mut profiles = Vec::new();
    for (t, &modulus) in ring.moduli.iter().enumerate() {
        let a: Vec<Vec<u64>> = rows.iter().map(|row| row.iter().map(|e| e[t]).collect()).collect();
        let b: Vec<u64> = rhs.iter().map(|e| e[t]).collect();
        let (sol, mut profs) = solve_mod(&a, &b, cols, modulus);
        for p in &mut profs {
            p.coordinate = t;
        }
        profiles.extend(profs);
        per_coord.push(sol);
    }
    if per_coord.iter().any(|s| s.is_none()) {
        return RingSolve { solution: None, profiles };
    }
    let solution = (0..cols)
        .map(|j| per_coord.iter().map(|s| s.as_ref().unwrap()[j]).collect())
        .collect();
    RingSolve { solution: Some(solution), profiles }
}

/// Solves `A x = b (mod n)` by CRT over the prime-power factors of `n`.
pub fn solve_mod(
    a: &[Vec<u64>],
    b: &[u64],
    cols: usize,
    n: u64,
) -> (Option<Vec<u64>>, Vec<SolveProfile>) {
    if n == 1 {
        return (Some(vec![0; cols]), Vec::new());
    }
    let mut stages = Vec::new();
    let mut profiles = Vec::new();
    let mut consistent = true;
    for (p, k) in factor(n) {
        let (sol, profile) = local_solve(a, b, cols, p, k);
        consistent &= sol.is_some();
        stages.push((p.pow(k), sol));
        profiles.push(profile);
    }
    if !consistent {
        return (None, profiles);
    }
    let mut x = vec![0u64; cols];
    for (j, slot) in x.iter_mut().enumerate() {
        let mut acc: u128 = 0;
        for (q, sol) in &stages {
            let rest = n / q;
            let inv = inv_mod(rest % q, *q);
            let term = (sol.as_ref().unwrap()[j] as u128) * (rest as u128) % (n as u128)
                * (inv as u128)
                % (n as u128);
            acc = (acc + term) % n as u128;
        }
        *slot = acc as u64;
    }
    (Some(x), profiles)
}

fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn val(mut x: u64, p: u64) -> u32 {
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn submod(a: u64, b: u64, m: u64) -> u64 {
    (a % m + m - b % m) % m
}

fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1, "inverse of a non-unit");
    s0.rem_euclid(m as i128) as u64
}

/// Gaussian elimination over `Z/p^k` with valuation pivoting: the pivot is
/// always an entry of minimal p-valuation among the untouched rows and
/// columns, which keeps back-substitution exact over the local ring.
fn local_solve(
    a: &[Vec<u64>],
    b: &[u64],
    cols: usize,
    p: u64,
    k: u32,
) -> (Option<Vec<u64>>, SolveProfile) {
    let q = p.pow(k);
    let m = a.len();
    let mut w: Vec<Vec<u64>> = a.iter().map(|row| row.iter().map(|&x| x % q).collect()).collect();
    let mut rhs: Vec<u64> = b.iter().map(|&x| x % q).collect();
    let mut used = vec![false; m];
    let mut col_done = vec![false; cols];
    let mut pivot_seq: Vec<(usize, usize, u32)> = Vec::new();

    loop {
        let mut best: Option<(u32, usize, usize)> = None;
        'scan: for r in 0..m {
            if used[r] {
                continue;
            }
            for c in 0..cols {
                if col_done[c] || w[r][c] == 0 {
                    continue;
                }
                let v = val(w[r][c], p);
                if best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, r, c));
                    if v == 0 {
                        break 'scan;
                    }
                }
            }
        }
        let Some((v, r, c)) = best else { break };
        let pv = p.pow(v);
        let unit = w[r][c] / pv;
        let winv = inv_mod(unit % q, q);
        for j in 0..cols {
            w[r][j] = mulmod(w[r][j], winv, q);
        }
        rhs[r] = mulmod(rhs[r], winv, q);
        for r2 in 0..m {
            if r2 == r || used[r2] || w[r2][c] == 0 {
                continue;
            }
            let f = w[r2][c] / pv;
            for j in 0..cols {
                let t = mulmod(f, w[r][j], q);
                w[r2][j] = submod(w[r2][j], t, q);
            }
            rhs[r2] = submod(rhs[r2], mulmod(f, rhs[r], q), q);
        }
        used[r] = true;
        col_done[c] = true;
        pivot_seq.push((r, c, v));
    }

    let mut x = vec![0u64; cols];
    let mut conflict: Option<String> = None;
    for &(r, c, v) in pivot_seq.iter().rev() {
        let pv = p.pow(v);
        let mut resid = rhs[r] as i128;
        for j in 0..cols {
            if j != c && w[r][j] != 0 && x[j] != 0 {
                resid -= w[r][j] as i128 * x[j] as i128;
            }
        }
        let resid = resid.rem_euclid(q as i128) as u64;
        if resid % pv != 0 {
            conflict = Some(format!("pivot {pv} cannot divide residue {resid} (mod {q})"));
            break;
        }
        x[c] = (resid / pv) % (q / pv);
    }
    if conflict.is_none() {
        for r in 0..m {
            if !used[r] && rhs[r] % q != 0 {
                conflict = Some(format!("eliminated row still demands {} (mod {q})", rhs[r]));
                break;
            }
        }
    }
    if conflict.is_none() {
        // replay the original system against the candidate before trusting it
        for r in 0..m {
            let mut acc: u128 = 0;
            for j in 0..cols {
                acc += (a[r][j] % q) as u128 * x[j] as u128;
            }
            if (acc % q as u128) as u64 != b[r] % q {
                conflict = Some(format!("candidate fails replay on row {r} (mod {q})"));
                break;
            }
        }
    }

    let profile = SolveProfile {
        coordinate: 0,
        modulus: q,
        unknowns: cols,
        pivots: pivot_seq.iter().map(|&(_, _, v)| p.pow(v)).collect(),
        free: cols - pivot_seq.len(),
        conflict: conflict.clone(),
    };
    (if conflict.is_none() { Some(x) } else { None }, profile)
}
