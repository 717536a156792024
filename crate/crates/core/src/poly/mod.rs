//! Polynomial logical zonotopes.
//!
//! A point of the set is `c ⊕ ⊕_i m_i(α) g_i` where `m_i` is the conjunction
//! of the factors selected by column `i` of the exponent matrix, and `α`
//! ranges over all assignments of the factors named in `ids`. Factors shared
//! between two zonotopes stay correlated, which is what makes the exact
//! operations exact.

mod ids;

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::binvec::{BinaryMatrix, BinaryVector, Gate};
use crate::error::{check_enumeration, Error, Result};
use crate::explicit::ExplicitSet;
use crate::logical::LogicalZonotope;

pub use ids::{unique_id, FactorId, IdAllocator, FIRST_ALLOCATED_ID};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyLogicalZonotope {
    center: BinaryVector,
    generators: BinaryMatrix,
    exponents: BinaryMatrix,
    ids: Vec<FactorId>,
}

impl PolyLogicalZonotope {
    pub fn new(
        center: BinaryVector,
        generators: BinaryMatrix,
        exponents: BinaryMatrix,
        ids: Vec<FactorId>,
    ) -> Result<Self> {
        if generators.rows() != center.dim() {
            return Err(Error::dim(center.dim(), generators.rows()));
        }
        if exponents.cols() != generators.cols() {
            return Err(Error::Invalid(format!(
                "{} generators but {} exponent columns",
                generators.cols(),
                exponents.cols()
            )));
        }
        if exponents.rows() != ids.len() {
            return Err(Error::Invalid(format!(
                "{} exponent rows but {} ids",
                exponents.rows(),
                ids.len()
            )));
        }
        let mut seen = HashSet::with_capacity(ids.len());
        if let Some(dup) = ids.iter().find(|id| !seen.insert(**id)) {
            return Err(Error::Invalid(format!("repeated id {dup}")));
        }
        if let Some(max) = ids.iter().max() {
            ids::reserve_through(*max);
        }
        Ok(PolyLogicalZonotope {
            center,
            generators,
            exponents,
            ids,
        })
    }

    fn from_parts(
        center: BinaryVector,
        gens: Vec<BinaryVector>,
        exps: Vec<BinaryVector>,
        ids: Vec<FactorId>,
    ) -> Self {
        debug_assert_eq!(gens.len(), exps.len());
        PolyLogicalZonotope {
            generators: BinaryMatrix::from_columns_unchecked(center.dim(), gens),
            exponents: BinaryMatrix::from_columns_unchecked(ids.len(), exps),
            center,
            ids,
        }
    }

    /// The single point `v`.
    pub fn point(v: BinaryVector) -> Self {
        Self::from_parts(v, Vec::new(), Vec::new(), Vec::new())
    }

    /// Gives every generator of `z` its own fresh factor.
    pub fn from_logical(z: &LogicalZonotope) -> Self {
        let h = z.num_generators();
        PolyLogicalZonotope {
            center: z.center().clone(),
            generators: z.generators().clone(),
            exponents: BinaryMatrix::identity(h),
            ids: unique_id(h),
        }
    }

    /// Enclosure with `c = s_1` and generators `s_i ⊕ s_1`, one fresh
    /// factor per generator. Every input point is contained.
    pub fn enclose_points(points: &[BinaryVector]) -> Result<Self> {
        Ok(Self::from_logical(&LogicalZonotope::enclose_points(points)?))
    }

    /// Encodes exactly the given points with `ceil(log2 m)` fresh factors.
    ///
    /// Point `j` is assigned to the factor pattern with binary value `j`;
    /// unused patterns repeat the first point. The coefficients come from
    /// the algebraic normal form of that table.
    pub fn from_points_exact(points: &[BinaryVector]) -> Result<Self> {
        let first = points
            .first()
            .ok_or(Error::EmptyInput("cannot encode an empty point list"))?;
        let dim = first.dim();
        let mut uniq: Vec<BinaryVector> = Vec::with_capacity(points.len());
        let mut seen = HashSet::with_capacity(points.len());
        for p in points {
            if p.dim() != dim {
                return Err(Error::dim(dim, p.dim()));
            }
            if seen.insert(p) {
                uniq.push(p.clone());
            }
        }
        let m = uniq.len();
        let q = if m <= 1 {
            0
        } else {
            (usize::BITS - (m - 1).leading_zeros()) as usize
        };
        check_enumeration("factors", q, 62)?;
        let w = first.words().len();
        let size = 1usize << q;
        let mut table = vec![0u64; size * w];
        for s in 0..size {
            let src = if s < m { &uniq[s] } else { &uniq[0] };
            table[s * w..(s + 1) * w].copy_from_slice(src.words());
        }
        subset_transform(&mut table, w, q);
        let center = BinaryVector::from_words(dim, &table[..w]);
        let mut gens = Vec::new();
        let mut exps = Vec::new();
        for s in 1..size {
            let coef = &table[s * w..(s + 1) * w];
            if coef.iter().any(|&x| x != 0) {
                gens.push(BinaryVector::from_words(dim, coef));
                exps.push(BinaryVector::from_u64(q, s as u64));
            }
        }
        Ok(Self::from_parts(center, gens, exps, unique_id(q)))
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn center(&self) -> &BinaryVector {
        &self.center
    }

    pub fn generators(&self) -> &BinaryMatrix {
        &self.generators
    }

    pub fn exponents(&self) -> &BinaryMatrix {
        &self.exponents
    }

    pub fn ids(&self) -> &[FactorId] {
        &self.ids
    }

    pub fn num_generators(&self) -> usize {
        self.generators.cols()
    }

    pub fn num_factors(&self) -> usize {
        self.ids.len()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::dim(self.dim(), other.dim()));
        }
        Ok(())
    }

    /// Same structure with every id replaced by a fresh one.
    pub fn rename_fresh(&self) -> Self {
        PolyLogicalZonotope {
            ids: unique_id(self.ids.len()),
            ..self.clone()
        }
    }

    pub fn not(&self) -> Self {
        PolyLogicalZonotope {
            center: self.center.not(),
            ..self.clone()
        }
    }

    /// Treats the operands as independent: generators are concatenated and
    /// the exponent matrices placed block-diagonally over fresh ids.
    pub fn minkowski_xor(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let (p1, p2) = (self.num_factors(), other.num_factors());
        let p = p1 + p2;
        let mut gens = Vec::with_capacity(self.num_generators() + other.num_generators());
        let mut exps = Vec::with_capacity(gens.capacity());
        for (g, e) in self.columns() {
            gens.push(g.clone());
            exps.push(e.extend_to(p));
        }
        for (g, e) in other.columns() {
            gens.push(g.clone());
            exps.push(BinaryVector::zeros(p1).concat(e));
        }
        Ok(Self::from_parts(
            self.center.xor(&other.center),
            gens,
            exps,
            unique_id(p),
        ))
    }

    /// Exact Minkowski AND over fresh ids. Column order: `c_1 g2_j` blocks,
    /// then `c_2 g1_i`, then `g1_i g2_j` with i outer.
    pub fn minkowski_and(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let (p1, p2) = (self.num_factors(), other.num_factors());
        let z1 = BinaryVector::zeros(p1);
        let z2 = BinaryVector::zeros(p2);
        Ok(self.and_layout(
            other,
            |e2| z1.concat(e2),
            |e1| e1.concat(&z2),
            |e1, e2| e1.concat(e2),
            unique_id(p1 + p2),
        ))
    }

    fn and_layout(
        &self,
        other: &Self,
        b_block: impl Fn(&BinaryVector) -> BinaryVector,
        a_block: impl Fn(&BinaryVector) -> BinaryVector,
        cross: impl Fn(&BinaryVector, &BinaryVector) -> BinaryVector,
        ids: Vec<FactorId>,
    ) -> Self {
        let (h1, h2) = (self.num_generators(), other.num_generators());
        let n = h1 + h2 + h1 * h2;
        let mut gens = Vec::with_capacity(n);
        let mut exps = Vec::with_capacity(n);
        for (g, e) in other.columns() {
            gens.push(self.center.and(g));
            exps.push(b_block(e));
        }
        for (g, e) in self.columns() {
            gens.push(other.center.and(g));
            exps.push(a_block(e));
        }
        for (g1, e1) in self.columns() {
            for (g2, e2) in other.columns() {
                gens.push(g1.and(g2));
                exps.push(cross(e1, e2));
            }
        }
        Self::from_parts(self.center.and(&other.center), gens, exps, ids)
    }

    pub fn minkowski_xnor(&self, other: &Self) -> Result<Self> {
        Ok(self.minkowski_xor(other)?.not())
    }

    pub fn minkowski_nand(&self, other: &Self) -> Result<Self> {
        Ok(self.minkowski_and(other)?.not())
    }

    pub fn minkowski_or(&self, other: &Self) -> Result<Self> {
        self.not().minkowski_nand(&other.not())
    }

    pub fn minkowski_nor(&self, other: &Self) -> Result<Self> {
        Ok(self.minkowski_or(other)?.not())
    }

    pub fn minkowski_gate(&self, other: &Self, gate: Gate) -> Result<Self> {
        match gate {
            Gate::Xor => self.minkowski_xor(other),
            Gate::And => self.minkowski_and(other),
            Gate::Or => self.minkowski_or(other),
            Gate::Xnor => self.minkowski_xnor(other),
            Gate::Nand => self.minkowski_nand(other),
            Gate::Nor => self.minkowski_nor(other),
        }
    }

    /// Rewrites both operands over the id vector `[a.ids, ids of b not in a]`.
    /// Factors that an operand does not use get zero exponent rows.
    pub fn merge_ids(a: &Self, b: &Self) -> (Self, Self) {
        if a.ids == b.ids {
            return (a.clone(), b.clone());
        }
        let mut pos: HashMap<FactorId, usize> =
            a.ids.iter().enumerate().map(|(k, id)| (*id, k)).collect();
        let mut ids = a.ids.clone();
        let b_rows: Vec<usize> = b
            .ids
            .iter()
            .map(|id| {
                *pos.entry(*id).or_insert_with(|| {
                    ids.push(*id);
                    ids.len() - 1
                })
            })
            .collect();
        let p = ids.len();
        let a_exps = a.exponents.columns().iter().map(|e| e.extend_to(p)).collect();
        let b_exps = b
            .exponents
            .columns()
            .iter()
            .map(|e| {
                let mut out = BinaryVector::zeros(p);
                for (row, bit) in e.bits().enumerate() {
                    if bit {
                        out.set(b_rows[row], true);
                    }
                }
                out
            })
            .collect();
        let a2 = PolyLogicalZonotope {
            center: a.center.clone(),
            generators: a.generators.clone(),
            exponents: BinaryMatrix::from_columns_unchecked(p, a_exps),
            ids: ids.clone(),
        };
        let b2 = PolyLogicalZonotope {
            center: b.center.clone(),
            generators: b.generators.clone(),
            exponents: BinaryMatrix::from_columns_unchecked(p, b_exps),
            ids,
        };
        (a2, b2)
    }

    /// XOR that respects shared factors: for every assignment of the merged
    /// ids the result is the XOR of the operands' values.
    pub fn exact_xor(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let (a, b) = Self::merge_ids(self, other);
        let gens = a.generators.hconcat(&b.generators)?;
        let exps = a.exponents.hconcat(&b.exponents)?;
        Ok(PolyLogicalZonotope {
            center: a.center.xor(&b.center),
            generators: gens,
            exponents: exps,
            ids: a.ids,
        })
    }

    /// AND that respects shared factors. Cross terms take the row-wise max
    /// of the two exponent columns since `α ∧ α = α`.
    pub fn exact_and(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let (a, b) = Self::merge_ids(self, other);
        let ids = a.ids.clone();
        Ok(a.and_layout(&b, Clone::clone, Clone::clone, |e1, e2| e1.or(e2), ids))
    }

    pub fn exact_xnor(&self, other: &Self) -> Result<Self> {
        Ok(self.exact_xor(other)?.not())
    }

    pub fn exact_nand(&self, other: &Self) -> Result<Self> {
        Ok(self.exact_and(other)?.not())
    }

    pub fn exact_or(&self, other: &Self) -> Result<Self> {
        self.not().exact_nand(&other.not())
    }

    pub fn exact_nor(&self, other: &Self) -> Result<Self> {
        Ok(self.exact_or(other)?.not())
    }

    pub fn exact_gate(&self, other: &Self, gate: Gate) -> Result<Self> {
        match gate {
            Gate::Xor => self.exact_xor(other),
            Gate::And => self.exact_and(other),
            Gate::Or => self.exact_or(other),
            Gate::Xnor => self.exact_xnor(other),
            Gate::Nand => self.exact_nand(other),
            Gate::Nor => self.exact_nor(other),
        }
    }

    fn columns(&self) -> impl Iterator<Item = (&BinaryVector, &BinaryVector)> {
        self.generators
            .columns()
            .iter()
            .zip(self.exponents.columns())
    }

    /// Value of the zonotope for one assignment; `alpha[k]` belongs to `ids()[k]`.
    pub fn eval_at(&self, alpha: &[bool]) -> Result<BinaryVector> {
        if alpha.len() != self.ids.len() {
            return Err(Error::dim(self.ids.len(), alpha.len()));
        }
        let mut out = self.center.clone();
        for (g, e) in self.columns() {
            if e.bits().zip(alpha).all(|(used, &a)| !used || a) {
                out.xor_assign(g);
            }
        }
        Ok(out)
    }

    /// Like [`eval_at`](Self::eval_at) with the assignment given by id.
    /// Ids the closure does not know should map to `false`.
    pub fn eval_with(&self, alpha: impl Fn(FactorId) -> bool) -> BinaryVector {
        let values: Vec<bool> = self.ids.iter().map(|id| alpha(*id)).collect();
        self.eval_at(&values).expect("assignment built from own ids")
    }

    /// Values for all `2^p` assignments, `w` words each; assignment `s` sets
    /// `α_k = (s >> k) & 1`.
    pub(crate) fn truth_table(&self, cap: usize) -> Result<Vec<u64>> {
        let p = self.num_factors();
        check_enumeration("factors", p, cap)?;
        let w = self.center.words().len();
        let size = 1usize << p;
        let mut table = vec![0u64; size * w];
        table[..w].copy_from_slice(self.center.words());
        for (g, e) in self.columns() {
            let s = e.as_u64() as usize;
            for (t, x) in table[s * w..(s + 1) * w].iter_mut().zip(g.words()) {
                *t ^= x;
            }
        }
        subset_transform(&mut table, w, p);
        Ok(table)
    }

    /// Enumerates the set over all assignments of the factors.
    pub fn evaluate(&self, cap: usize) -> Result<ExplicitSet> {
        let table = self.truth_table(cap)?;
        let w = self.center.words().len().max(1);
        let dim = self.dim();
        let points: HashSet<BinaryVector> = if self.center.words().is_empty() {
            HashSet::from([BinaryVector::zeros(0)])
        } else {
            table
                .chunks_exact(w)
                .map(|c| BinaryVector::from_words(dim, c))
                .collect()
        };
        Ok(ExplicitSet::from_hash_set(dim, points))
    }

    /// Number of distinct points, without materialising the set.
    pub fn count(&self, cap: usize) -> Result<usize> {
        let table = self.truth_table(cap)?;
        Ok(count_distinct(table, self.center.words().len()))
    }

    pub fn contains(&self, point: &BinaryVector, cap: usize) -> Result<bool> {
        if point.dim() != self.dim() {
            return Err(Error::dim(self.dim(), point.dim()));
        }
        let table = self.truth_table(cap)?;
        let w = point.words().len();
        if w == 0 {
            return Ok(true);
        }
        Ok(table.chunks_exact(w).any(|c| c == point.words()))
    }

    /// Greedily drops generators whose removal leaves the set unchanged,
    /// then drops factors no generator uses anymore.
    pub fn simplify(&self, cap: usize) -> Result<Self> {
        let target = self.evaluate(cap)?;
        let mut cur = self.clone();
        let mut i = 0;
        while i < cur.num_generators() {
            let candidate = cur.without_generator(i);
            if candidate.evaluate(cap)? == target {
                cur = candidate;
            } else {
                i += 1;
            }
        }
        Ok(cur.drop_unused_factors())
    }

    fn without_generator(&self, i: usize) -> Self {
        let mut gens = self.generators.columns().to_vec();
        let mut exps = self.exponents.columns().to_vec();
        gens.remove(i);
        exps.remove(i);
        Self::from_parts(self.center.clone(), gens, exps, self.ids.clone())
    }

    fn drop_unused_factors(self) -> Self {
        let p = self.num_factors();
        let mut used = BinaryVector::zeros(p);
        for e in self.exponents.columns() {
            used = used.or(e);
        }
        if used.count_ones() == p {
            return self;
        }
        let keep: Vec<usize> = (0..p).filter(|&k| used.get(k)).collect();
        let exps = self
            .exponents
            .columns()
            .iter()
            .map(|e| BinaryVector::from_bits(&keep.iter().map(|&k| e.get(k)).collect::<Vec<_>>()))
            .collect();
        let ids = keep.iter().map(|&k| self.ids[k]).collect();
        let gens = self.generators.into_columns();
        Self::from_parts(self.center, gens, exps, ids)
    }

    /// Cheap reduction that keeps the value for every assignment: generators
    /// with equal exponent columns are XOR-merged, unconditional generators
    /// fold into the center, zero generators and unused factors are dropped.
    pub fn compact(&self) -> Self {
        let mut center = self.center.clone();
        let mut slot: HashMap<&BinaryVector, usize> = HashMap::new();
        let mut gens: Vec<BinaryVector> = Vec::new();
        let mut exps: Vec<BinaryVector> = Vec::new();
        for (g, e) in self.columns() {
            if g.is_zero() {
                continue;
            }
            if e.is_zero() {
                center.xor_assign(g);
                continue;
            }
            match slot.get(e) {
                Some(&k) => gens[k].xor_assign(g),
                None => {
                    slot.insert(e, gens.len());
                    gens.push(g.clone());
                    exps.push(e.clone());
                }
            }
        }
        let (gens, exps): (Vec<_>, Vec<_>) = gens
            .into_iter()
            .zip(exps)
            .filter(|(g, _)| !g.is_zero())
            .unzip();
        Self::from_parts(center, gens, exps, self.ids.clone()).drop_unused_factors()
    }

    /// Concatenates several zonotopes into one over the union of their ids,
    /// so shared factors stay shared across the parts.
    pub fn stack(parts: &[&Self]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::EmptyInput("nothing to stack"));
        }
        let mut ids: Vec<FactorId> = Vec::new();
        let mut pos: HashMap<FactorId, usize> = HashMap::new();
        for part in parts {
            for id in &part.ids {
                pos.entry(*id).or_insert_with(|| {
                    ids.push(*id);
                    ids.len() - 1
                });
            }
        }
        let dim: usize = parts.iter().map(|z| z.dim()).sum();
        let p = ids.len();
        let mut center = BinaryVector::zeros(dim);
        let mut gens = Vec::new();
        let mut exps = Vec::new();
        let mut off = 0;
        for part in parts {
            center.write_at(off, &part.center);
            for (g, e) in part.columns() {
                let mut col = BinaryVector::zeros(dim);
                col.write_at(off, g);
                gens.push(col);
                let mut ex = BinaryVector::zeros(p);
                for (row, bit) in e.bits().enumerate() {
                    if bit {
                        ex.set(pos[&part.ids[row]], true);
                    }
                }
                exps.push(ex);
            }
            off += part.dim();
        }
        Ok(Self::from_parts(center, gens, exps, ids))
    }

    /// Bits `start..start+len`, keeping the factors.
    pub fn slice(&self, start: usize, len: usize) -> Self {
        let gens = self
            .generators
            .columns()
            .iter()
            .map(|g| g.slice(start, len))
            .collect();
        Self::from_parts(
            self.center.slice(start, len),
            gens,
            self.exponents.columns().to_vec(),
            self.ids.clone(),
        )
    }
}

/// In-place subset-sum transform over GF(2): afterwards entry `S` is the XOR
/// of the original entries at every subset of `S`. The transform is its own
/// inverse, so it maps coefficients to values and values to coefficients.
fn subset_transform(table: &mut [u64], w: usize, bits: usize) {
    if w == 0 {
        return;
    }
    let size = 1usize << bits;
    for b in 0..bits {
        let bit = 1usize << b;
        for s in 0..size {
            if s & bit != 0 {
                let (lo, hi) = table.split_at_mut(s * w);
                let src = &lo[(s ^ bit) * w..(s ^ bit) * w + w];
                for (t, x) in hi[..w].iter_mut().zip(src) {
                    *t ^= x;
                }
            }
        }
    }
}

pub(crate) fn count_distinct(mut table: Vec<u64>, w: usize) -> usize {
    match w {
        0 => 1,
        1 => {
            table.sort_unstable();
            table.dedup();
            table.len()
        }
        _ => {
            let mut rows: Vec<&[u64]> = table.chunks_exact(w).collect();
            rows.sort_unstable();
            rows.dedup();
            rows.len()
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PolyDoc {
    c: BinaryVector,
    #[serde(rename = "G", default)]
    g: Vec<BinaryVector>,
    #[serde(rename = "E")]
    e: Vec<String>,
    id: Vec<FactorId>,
}

impl Serialize for PolyLogicalZonotope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyDoc {
            c: self.center.clone(),
            g: self.generators.columns().to_vec(),
            e: self.exponents.columns().iter().map(|e| e.to_string()).collect(),
            id: self.ids.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyLogicalZonotope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = PolyDoc::deserialize(d)?;
        let p = doc.id.len();
        let exps = doc
            .e
            .iter()
            .map(|s| {
                if s.is_empty() {
                    Ok(BinaryVector::zeros(0))
                } else {
                    s.parse()
                }
            })
            .collect::<Result<Vec<BinaryVector>>>()
            .map_err(D::Error::custom)?;
        let n = doc.c.dim();
        let g = BinaryMatrix::from_columns(n, doc.g).map_err(D::Error::custom)?;
        let e = BinaryMatrix::from_columns(p, exps).map_err(D::Error::custom)?;
        PolyLogicalZonotope::new(doc.c, g, e, doc.id).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_EVAL_CAP as CAP;

    fn bv(s: &str) -> BinaryVector {
        s.parse().unwrap()
    }

    fn pz(c: &str, gens: &[&str], e_rows: &[&[u8]], ids: &[u64]) -> PolyLogicalZonotope {
        let c = bv(c);
        let g = BinaryMatrix::from_columns(c.dim(), gens.iter().map(|s| bv(s)).collect()).unwrap();
        let e = if e_rows.is_empty() {
            BinaryMatrix::from_columns(0, vec![BinaryVector::zeros(0); gens.len()]).unwrap()
        } else {
            BinaryMatrix::from_rows(e_rows).unwrap()
        };
        PolyLogicalZonotope::new(c, g, e, ids.iter().map(|&i| FactorId(i)).collect()).unwrap()
    }

    fn set(points: &[&str]) -> ExplicitSet {
        ExplicitSet::from_strs(points).unwrap()
    }

    fn three_points() -> PolyLogicalZonotope {
        pz("010", &["011", "111"], &[&[1, 1], &[0, 1]], &[1, 2])
    }

    fn single_factor() -> PolyLogicalZonotope {
        pz("0", &["1"], &[&[1]], &[1])
    }

    #[test]
    fn three_point_set() {
        let z = three_points();
        assert_eq!(z.evaluate(CAP).unwrap(), set(&["001", "010", "110"]));
        assert_eq!(z.eval_at(&[true, false]).unwrap(), bv("001"));
        assert!(z.contains(&bv("110"), CAP).unwrap());
        assert!(!z.contains(&bv("111"), CAP).unwrap());
        assert_eq!(z.count(CAP).unwrap(), 3);
    }

    #[test]
    fn merge_aligns_ids() {
        let a = three_points();
        let b = pz("100", &["101", "010"], &[&[0, 1], &[1, 1]], &[1, 3]);
        let (a2, b2) = PolyLogicalZonotope::merge_ids(&a, &b);
        let ids = [FactorId(1), FactorId(2), FactorId(3)];
        assert_eq!(a2.ids(), ids);
        assert_eq!(b2.ids(), ids);
        assert_eq!(
            a2.exponents(),
            &BinaryMatrix::from_rows(&[&[1, 1], &[0, 1], &[0, 0]]).unwrap()
        );
        assert_eq!(
            b2.exponents(),
            &BinaryMatrix::from_rows(&[&[0, 1], &[0, 0], &[1, 1]]).unwrap()
        );
        let (a3, b3) = PolyLogicalZonotope::merge_ids(&a2, &b2);
        assert_eq!((a3, b3), (a2, b2));
    }

    #[test]
    fn self_xor_dependency() {
        let x = single_factor();
        let mink = x.minkowski_xor(&x).unwrap();
        assert_eq!(mink.num_generators(), 2);
        assert_eq!(mink.exponents(), &BinaryMatrix::identity(2));
        assert!(mink.ids().iter().all(|id| *id != FactorId(1)));
        assert_eq!(mink.evaluate(CAP).unwrap(), set(&["0", "1"]));

        let exact = x.exact_xor(&x).unwrap();
        assert_eq!(exact.exponents().columns(), &[bv("1"), bv("1")]);
        let compact = exact.compact();
        assert_eq!(compact, PolyLogicalZonotope::point(bv("0")));
        assert_eq!(compact.evaluate(CAP).unwrap(), set(&["0"]));
    }

    #[test]
    fn minkowski_and_examples() {
        let a = single_factor();
        let b = pz("0", &["1"], &[&[1]], &[2]);
        let r = a.minkowski_and(&b).unwrap();
        assert_eq!(r.num_generators(), 3);
        assert_eq!(r.num_factors(), 2);
        assert_eq!(r.evaluate(CAP).unwrap(), set(&["0", "1"]));
        let one = PolyLogicalZonotope::point(bv("11"));
        let c = three_points().slice(1, 2);
        assert_eq!(
            one.minkowski_and(&c).unwrap().evaluate(CAP).unwrap(),
            c.evaluate(CAP).unwrap()
        );
    }

    #[test]
    fn exact_and_idempotent() {
        let a = single_factor();
        let r = a.exact_and(&a).unwrap();
        for alpha in [false, true] {
            assert_eq!(r.eval_at(&[alpha]).unwrap(), a.eval_at(&[alpha]).unwrap());
        }
        let one = PolyLogicalZonotope::point(bv("1"));
        let r = one.exact_and(&a).unwrap();
        for alpha in [false, true] {
            assert_eq!(r.eval_at(&[alpha]).unwrap(), a.eval_at(&[alpha]).unwrap());
        }
    }

    #[test]
    fn not_and_enclosure() {
        let n = three_points().not();
        assert_eq!(n.center(), &bv("101"));
        assert_eq!(n.generators(), three_points().generators());
        assert_eq!(n.not(), three_points());

        let z = PolyLogicalZonotope::enclose_points(&[bv("01"), bv("10")]).unwrap();
        assert_eq!(z.center(), &bv("01"));
        assert_eq!(z.generators().columns(), &[bv("11")]);
        assert_eq!(z.exponents(), &BinaryMatrix::identity(1));
        assert_eq!(z.evaluate(CAP).unwrap(), set(&["01", "10"]));
        assert_eq!(z.simplify(CAP).unwrap(), z);

        let pts = [bv("00"), bv("01"), bv("10")];
        let z = PolyLogicalZonotope::enclose_points(&pts).unwrap();
        let e = z.evaluate(CAP).unwrap();
        assert!(pts.iter().all(|p| e.contains(p)));
        assert_eq!(
            PolyLogicalZonotope::enclose_points(&[bv("1")]).unwrap(),
            PolyLogicalZonotope::point(bv("1"))
        );
    }

    #[test]
    fn simplify_examples() {
        let mink = single_factor().minkowski_xor(&single_factor()).unwrap();
        let s = mink.simplify(CAP).unwrap();
        assert_eq!(s.num_generators(), 1);
        assert_eq!(s.num_factors(), 1);
        assert_eq!(s.evaluate(CAP).unwrap(), set(&["0", "1"]));

        let with_zero = pz("01", &["00", "11"], &[&[1, 0], &[0, 1]], &[1, 2]);
        let s = with_zero.simplify(CAP).unwrap();
        assert_eq!(s.generators().columns(), &[bv("11")]);
        assert_eq!(s.ids(), &[FactorId(2)]);
    }

    #[test]
    fn exact_encoding_round_trip() {
        let pts = [bv("000"), bv("011"), bv("110"), bv("101"), bv("111")];
        let z = PolyLogicalZonotope::from_points_exact(&pts).unwrap();
        assert_eq!(z.num_factors(), 3);
        assert_eq!(z.evaluate(CAP).unwrap(), ExplicitSet::new(3, pts.to_vec()).unwrap());
        let single = PolyLogicalZonotope::from_points_exact(&[bv("10"), bv("10")]).unwrap();
        assert_eq!(single, PolyLogicalZonotope::point(bv("10")));
    }

    #[test]
    fn stack_keeps_shared_factors() {
        let a = single_factor();
        let joint = PolyLogicalZonotope::stack(&[&a, &a]).unwrap();
        assert_eq!(joint.evaluate(CAP).unwrap(), set(&["00", "11"]));
        let b = pz("0", &["1"], &[&[1]], &[2]);
        let joint = PolyLogicalZonotope::stack(&[&a, &b]).unwrap();
        assert_eq!(joint.count(CAP).unwrap(), 4);
        assert_eq!(joint.slice(1, 1).compact().evaluate(CAP).unwrap(), set(&["0", "1"]));
    }

    #[test]
    fn cap_is_enforced() {
        let p = 25;
        let z = PolyLogicalZonotope::from_logical(
            &LogicalZonotope::new(
                bv("0"),
                BinaryMatrix::from_columns(1, vec![bv("1"); p]).unwrap(),
            )
            .unwrap(),
        );
        assert!(z.evaluate(CAP).unwrap_err().is_capacity());
        assert!(z.contains(&bv("1"), CAP).unwrap_err().is_capacity());
    }

    #[test]
    fn invalid_structures_rejected() {
        let c = bv("01");
        let g = BinaryMatrix::from_columns(2, vec![bv("11")]).unwrap();
        let e = BinaryMatrix::identity(1);
        assert!(PolyLogicalZonotope::new(c.clone(), g.clone(), e.clone(), vec![]).is_err());
        assert!(PolyLogicalZonotope::new(c.clone(), g.clone(), BinaryMatrix::empty(1), vec![FactorId(1)]).is_err());
        let e2 = BinaryMatrix::from_rows(&[&[1], &[0]]).unwrap();
        assert!(PolyLogicalZonotope::new(c, g, e2, vec![FactorId(4), FactorId(4)]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let z = three_points();
        let text = serde_json::to_string(&z).unwrap();
        assert_eq!(text, r#"{"c":"010","G":["011","111"],"E":["10","11"],"id":[1,2]}"#);
        let back: PolyLogicalZonotope = serde_json::from_str(&text).unwrap();
        assert_eq!(back, z);
        let point = PolyLogicalZonotope::point(bv("1"));
        let text = serde_json::to_string(&point).unwrap();
        assert_eq!(serde_json::from_str::<PolyLogicalZonotope>(&text).unwrap(), point);
    }

    #[test]
    fn allocated_ids_skip_loaded_ids() {
        let big = pz("0", &["1"], &[&[1]], &[FIRST_ALLOCATED_ID + 5_000_000]);
        let fresh = unique_id(1)[0];
        assert!(fresh > big.ids()[0]);
    }
}
