//! Logical zonotopes: `{ c ⊕ g_1 b_1 ⊕ … ⊕ g_h b_h : b ∈ {0,1}^h }`.
//!
//! XOR and NOT are exact in generator space. AND and the gates derived from
//! it return a superset of the true image because every generator of the
//! result gets its own independent coefficient.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::binvec::{BinaryMatrix, BinaryVector, Gate};
use crate::error::{check_enumeration, Error, Result};
use crate::explicit::ExplicitSet;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LogicalZonotope {
    center: BinaryVector,
    generators: BinaryMatrix,
}

impl LogicalZonotope {
    pub fn new(center: BinaryVector, generators: BinaryMatrix) -> Result<Self> {
        if generators.rows() != center.dim() {
            return Err(Error::dim(center.dim(), generators.rows()));
        }
        Ok(LogicalZonotope { center, generators })
    }

    pub fn point(center: BinaryVector) -> Self {
        let generators = BinaryMatrix::empty(center.dim());
        LogicalZonotope { center, generators }
    }

    /// `c = s_1`, `g_{i-1} = s_i ⊕ s_1`. The result contains every input point.
    pub fn enclose_points(points: &[BinaryVector]) -> Result<Self> {
        let (first, rest) = points
            .split_first()
            .ok_or(Error::EmptyInput("cannot enclose an empty point list"))?;
        let mut generators = BinaryMatrix::empty(first.dim());
        for p in rest {
            generators.push(p.op(first, Gate::Xor)?)?;
        }
        Ok(LogicalZonotope {
            center: first.clone(),
            generators,
        })
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

    pub fn num_generators(&self) -> usize {
        self.generators.cols()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::dim(self.dim(), other.dim()));
        }
        Ok(())
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(LogicalZonotope {
            center: self.center.xor(&other.center),
            generators: self.generators.hconcat(&other.generators)?,
        })
    }

    pub fn not(&self) -> Self {
        LogicalZonotope {
            center: self.center.not(),
            generators: self.generators.clone(),
        }
    }

    pub fn xnor(&self, other: &Self) -> Result<Self> {
        Ok(self.xor(other)?.not())
    }

    /// Generators are `c_1 g2_j` for each j, then `c_2 g1_i` for each i, then
    /// `g1_i g2_j` with i outer.
    pub fn and(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let g1 = self.generators.columns();
        let g2 = other.generators.columns();
        let mut cols = Vec::with_capacity(g1.len() + g2.len() + g1.len() * g2.len());
        cols.extend(g2.iter().map(|g| self.center.and(g)));
        cols.extend(g1.iter().map(|g| other.center.and(g)));
        for a in g1 {
            for b in g2 {
                cols.push(a.and(b));
            }
        }
        Ok(LogicalZonotope {
            center: self.center.and(&other.center),
            generators: BinaryMatrix::from_columns_unchecked(self.dim(), cols),
        })
    }

    pub fn nand(&self, other: &Self) -> Result<Self> {
        Ok(self.and(other)?.not())
    }

    pub fn or(&self, other: &Self) -> Result<Self> {
        self.not().nand(&other.not())
    }

    pub fn nor(&self, other: &Self) -> Result<Self> {
        Ok(self.or(other)?.not())
    }

    pub fn gate(&self, other: &Self, gate: Gate) -> Result<Self> {
        match gate {
            Gate::Xor => self.xor(other),
            Gate::And => self.and(other),
            Gate::Or => self.or(other),
            Gate::Xnor => self.xnor(other),
            Gate::Nand => self.nand(other),
            Gate::Nor => self.nor(other),
        }
    }

    /// Drops zero generators and repeated generators. The set is unchanged.
    pub fn compact(&self) -> Self {
        let mut seen = HashSet::new();
        let cols = self
            .generators
            .columns()
            .iter()
            .filter(|g| !g.is_zero() && seen.insert((*g).clone()))
            .cloned()
            .collect();
        LogicalZonotope {
            center: self.center.clone(),
            generators: BinaryMatrix::from_columns_unchecked(self.dim(), cols),
        }
    }

    /// Replaces the generators by a basis of their span. The represented set
    /// is the affine subspace `c + span(G)`, so this keeps it unchanged while
    /// bounding the generator count by the dimension.
    pub fn reduce(&self) -> Self {
        let basis = Basis::from_columns(self.generators.columns());
        LogicalZonotope {
            center: self.center.clone(),
            generators: BinaryMatrix::from_columns_unchecked(self.dim(), basis.vectors),
        }
    }

    /// Dimension of the generator span; the set has `2^rank` points.
    pub fn rank(&self) -> usize {
        Basis::from_columns(self.generators.columns()).vectors.len()
    }

    /// Enumerates the set. Fails when there are more than `cap` generators.
    pub fn evaluate(&self, cap: usize) -> Result<ExplicitSet> {
        check_enumeration("generators", self.num_generators(), cap)?;
        let basis = Basis::from_columns(self.generators.columns()).vectors;
        let mut points = HashSet::with_capacity(1 << basis.len());
        let mut x = self.center.clone();
        points.insert(x.clone());
        // Gray code walk: flip one basis vector per step.
        for k in 1u64..(1u64 << basis.len()) {
            x.xor_assign(&basis[k.trailing_zeros() as usize]);
            points.insert(x.clone());
        }
        Ok(ExplicitSet::from_hash_set(self.dim(), points))
    }

    /// Membership by solving `G b = point ⊕ c` over GF(2); no enumeration.
    pub fn contains(&self, point: &BinaryVector) -> Result<bool> {
        if point.dim() != self.dim() {
            return Err(Error::dim(self.dim(), point.dim()));
        }
        let basis = Basis::from_columns(self.generators.columns());
        Ok(basis.reduce(point.xor(&self.center)).is_zero())
    }
}

/// Row-echelon basis of a set of vectors over GF(2).
struct Basis {
    vectors: Vec<BinaryVector>,
    pivots: Vec<usize>,
}

impl Basis {
    fn from_columns(columns: &[BinaryVector]) -> Self {
        let mut basis = Basis {
            vectors: Vec::new(),
            pivots: Vec::new(),
        };
        for c in columns {
            let r = basis.reduce(c.clone());
            let pivot = r.bits().position(|b| b);
            if let Some(pivot) = pivot {
                basis.vectors.push(r);
                basis.pivots.push(pivot);
            }
        }
        basis
    }

    fn reduce(&self, mut v: BinaryVector) -> BinaryVector {
        for (b, &p) in self.vectors.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(b);
            }
        }
        v
    }
}

#[derive(Serialize, Deserialize)]
struct LogicalDoc {
    c: BinaryVector,
    #[serde(rename = "G", default)]
    g: Vec<BinaryVector>,
}

impl Serialize for LogicalZonotope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LogicalDoc {
            c: self.center.clone(),
            g: self.generators.columns().to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LogicalZonotope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = LogicalDoc::deserialize(d)?;
        let rows = doc.c.dim();
        let g = BinaryMatrix::from_columns(rows, doc.g).map_err(serde::de::Error::custom)?;
        LogicalZonotope::new(doc.c, g).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_EVAL_CAP as CAP;

    fn bv(s: &str) -> BinaryVector {
        s.parse().unwrap()
    }

    fn lz(c: &str, gens: &[&str]) -> LogicalZonotope {
        let c = bv(c);
        let g = BinaryMatrix::from_columns(c.dim(), gens.iter().map(|s| bv(s)).collect()).unwrap();
        LogicalZonotope::new(c, g).unwrap()
    }

    fn set(points: &[&str]) -> ExplicitSet {
        ExplicitSet::from_strs(points).unwrap()
    }

    #[test]
    fn xor_concatenates_generators() {
        let a = lz("0", &["1"]);
        let r = a.xor(&a).unwrap();
        assert_eq!(r, lz("0", &["1", "1"]));
        assert_eq!(r.evaluate(CAP).unwrap(), set(&["0", "1"]));
        let zero = LogicalZonotope::point(bv("0"));
        assert_eq!(a.xor(&zero).unwrap().evaluate(CAP).unwrap(), a.evaluate(CAP).unwrap());
    }

    #[test]
    fn not_flips_center() {
        let a = lz("01", &["11"]);
        assert_eq!(a.not(), lz("10", &["11"]));
        assert_eq!(a.not().not(), a);
    }

    #[test]
    fn and_layout_and_soundness() {
        let a = lz("0", &["1"]);
        let r = a.and(&a).unwrap();
        assert_eq!(r, lz("0", &["0", "0", "1"]));
        assert_eq!(r.evaluate(CAP).unwrap(), set(&["0", "1"]));

        let one = LogicalZonotope::point(bv("11"));
        let b = lz("01", &["11"]);
        assert_eq!(
            one.and(&b).unwrap().evaluate(CAP).unwrap(),
            b.evaluate(CAP).unwrap()
        );
    }

    #[test]
    fn enclose_points_examples() {
        let z = LogicalZonotope::enclose_points(&[bv("01"), bv("10")]).unwrap();
        assert_eq!(z, lz("01", &["11"]));
        assert_eq!(z.evaluate(CAP).unwrap(), set(&["01", "10"]));
        assert_eq!(
            LogicalZonotope::enclose_points(&[bv("101")]).unwrap(),
            LogicalZonotope::point(bv("101"))
        );
        let pts = [bv("000"), bv("011"), bv("110")];
        let z = LogicalZonotope::enclose_points(&pts).unwrap();
        let e = z.evaluate(CAP).unwrap();
        assert!(pts.iter().all(|p| e.contains(p)));
        assert!(LogicalZonotope::enclose_points(&[]).is_err());
    }

    #[test]
    fn contains_examples() {
        assert!(lz("0", &["1"]).contains(&bv("1")).unwrap());
        assert!(!LogicalZonotope::point(bv("00")).contains(&bv("11")).unwrap());
        assert!(lz("0", &["1"]).contains(&bv("11")).is_err());
    }

    #[test]
    fn compact_examples() {
        assert_eq!(lz("0", &["0", "1"]).compact(), lz("0", &["1"]));
        let dup = lz("0", &["1", "1"]);
        assert_eq!(dup.compact(), lz("0", &["1"]));
        assert_eq!(dup.compact().evaluate(CAP).unwrap(), dup.evaluate(CAP).unwrap());
        let done = lz("01", &["10", "11"]);
        assert_eq!(done.compact(), done);
    }

    #[test]
    fn evaluate_respects_cap() {
        let gens: Vec<String> = (0..5).map(|_| "1".to_string()).collect();
        let refs: Vec<&str> = gens.iter().map(String::as_str).collect();
        let z = lz("0", &refs);
        assert!(z.evaluate(4).unwrap_err().is_capacity());
        assert_eq!(z.evaluate(5).unwrap(), set(&["0", "1"]));
    }

    #[test]
    fn json_round_trip() {
        let z = lz("010", &["011", "111"]);
        let text = serde_json::to_string(&z).unwrap();
        assert_eq!(text, r#"{"c":"010","G":["011","111"]}"#);
        let back: LogicalZonotope = serde_json::from_str(&text).unwrap();
        assert_eq!(back, z);
        assert!(serde_json::from_str::<LogicalZonotope>(r#"{"c":"01","G":["1"]}"#).is_err());
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        pub(crate) fn zonotope(dim: usize) -> impl Strategy<Value = LogicalZonotope> {
            (
                0u64..(1 << dim),
                proptest::collection::vec(0u64..(1 << dim), 0..4),
            )
                .prop_map(move |(c, gens)| {
                    let cols = gens.into_iter().map(|g| BinaryVector::from_u64(dim, g)).collect();
                    LogicalZonotope::new(
                        BinaryVector::from_u64(dim, c),
                        BinaryMatrix::from_columns(dim, cols).unwrap(),
                    )
                    .unwrap()
                })
        }

        proptest! {
            #[test]
            fn gates_against_oracle(
                (a, b) in (1usize..5).prop_flat_map(|d| (zonotope(d), zonotope(d))),
            ) {
                let ea = a.evaluate(24).unwrap();
                let eb = b.evaluate(24).unwrap();
                for g in Gate::ALL {
                    let got = a.gate(&b, g).unwrap().evaluate(24).unwrap();
                    let want = ea.minkowski(&eb, g).unwrap();
                    match g {
                        Gate::Xor | Gate::Xnor => prop_assert_eq!(got, want),
                        _ => prop_assert!(want.is_subset(&got)),
                    }
                }
                prop_assert_eq!(a.not().evaluate(24).unwrap(), ea.not());
                prop_assert_eq!(
                    a.nand(&b).unwrap().evaluate(24).unwrap(),
                    a.and(&b).unwrap().evaluate(24).unwrap().not()
                );
            }

            #[test]
            fn reductions_keep_the_set(a in (1usize..5).prop_flat_map(zonotope)) {
                let e = a.evaluate(24).unwrap();
                prop_assert!(a.compact().num_generators() <= a.num_generators());
                prop_assert_eq!(a.compact().evaluate(24).unwrap(), e.clone());
                prop_assert_eq!(a.reduce().evaluate(24).unwrap(), e.clone());
                prop_assert_eq!(e.len(), 1usize << a.rank());
                for p in 0..(1u64 << a.dim()) {
                    let p = BinaryVector::from_u64(a.dim(), p);
                    prop_assert_eq!(a.contains(&p).unwrap(), e.contains(&p));
                }
            }
        }
    }
}
