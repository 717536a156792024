use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{compile, Expr, Node};
use crate::binvec::{BinaryVector, Gate};
use crate::error::{Error, Result};
use crate::explicit::{eval_point, ExplicitSet, DEFAULT_POINT_CAP};
use crate::logical::LogicalZonotope;
use crate::poly::PolyLogicalZonotope;
use crate::DEFAULT_EVAL_CAP;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algebra {
    Explicit,
    Logical,
    Poly,
}

/// How gates treat operands that share factors. Only meaningful for
/// [`Algebra::Poly`]; `Minkowski` treats every operand as independent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Minkowski,
    Exact,
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algebra::Explicit => "explicit",
            Algebra::Logical => "logical",
            Algebra::Poly => "poly",
        })
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Minkowski => "minkowski",
            Mode::Exact => "exact",
        })
    }
}

impl FromStr for Algebra {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "explicit" => Ok(Algebra::Explicit),
            "logical" => Ok(Algebra::Logical),
            "poly" => Ok(Algebra::Poly),
            _ => Err(Error::Mode(format!("unknown algebra {s:?}"))),
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minkowski" => Ok(Mode::Minkowski),
            "exact" => Ok(Mode::Exact),
            _ => Err(Error::Mode(format!("unknown mode {s:?}"))),
        }
    }
}

pub(crate) fn check_mode(algebra: Algebra, mode: Mode) -> Result<()> {
    if mode == Mode::Exact && algebra != Algebra::Poly {
        return Err(Error::Mode(format!(
            "exact mode needs the poly algebra, got {algebra}"
        )));
    }
    Ok(())
}

/// A set in one of the three representations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetValue {
    Poly(PolyLogicalZonotope),
    Logical(LogicalZonotope),
    Explicit(Vec<BinaryVector>),
}

impl SetValue {
    pub fn algebra(&self) -> Algebra {
        match self {
            SetValue::Explicit(_) => Algebra::Explicit,
            SetValue::Logical(_) => Algebra::Logical,
            SetValue::Poly(_) => Algebra::Poly,
        }
    }

    pub fn explicit(set: &ExplicitSet) -> Self {
        SetValue::Explicit(set.sorted())
    }

    /// Enumerated points. `cap` bounds the free binary choices.
    pub fn evaluate(&self, cap: usize) -> Result<ExplicitSet> {
        match self {
            SetValue::Explicit(points) => {
                let dim = points.first().map_or(0, BinaryVector::dim);
                ExplicitSet::new(dim, points.iter().cloned())
            }
            SetValue::Logical(z) => z.evaluate(cap),
            SetValue::Poly(z) => z.evaluate(cap),
        }
    }
}

/// Variable bindings for [`eval_expr`]; next-state references look up the
/// name with a trailing `'`.
pub type Env = HashMap<String, SetValue>;

/// Applies `expr` to the sets bound in `env`.
///
/// In the explicit algebra each distinct variable is sampled once per
/// evaluation, so `x ^ x` is `{0}`. Logical and poly-Minkowski evaluation
/// treat every occurrence independently; poly-exact keeps shared factors
/// shared.
pub fn eval_expr(expr: &Expr, env: &Env, algebra: Algebra, mode: Mode) -> Result<SetValue> {
    check_mode(algebra, mode)?;
    let mut keys: Vec<String> = Vec::new();
    for (name, next) in expr.references() {
        let key = if next { format!("{name}'") } else { name.to_string() };
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let node = compile(expr, &|name, next| {
        let key = if next { format!("{name}'") } else { name.to_string() };
        Ok(Node::Cur(keys.iter().position(|k| *k == key).expect("collected above")))
    })?;
    let bound = keys
        .iter()
        .map(|k| {
            let v = env
                .get(k)
                .ok_or_else(|| Error::Model(format!("unbound identifier '{k}'")))?;
            if v.algebra() != algebra {
                return Err(Error::Mode(format!(
                    "'{k}' is a {} set, expected {algebra}",
                    v.algebra()
                )));
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;

    match algebra {
        Algebra::Explicit => {
            let sets: Vec<&[BinaryVector]> = bound
                .iter()
                .map(|v| match v {
                    SetValue::Explicit(p) => p.as_slice(),
                    _ => unreachable!("checked above"),
                })
                .collect();
            eval_samples(&node, &sets).map(|s| SetValue::explicit(&s))
        }
        Algebra::Logical => {
            let sets: Vec<LogicalZonotope> = bound
                .iter()
                .map(|v| match v {
                    SetValue::Logical(z) => z.clone(),
                    _ => unreachable!("checked above"),
                })
                .collect();
            eval_node(&node, &LogicalOps, &sets, &[]).map(SetValue::Logical)
        }
        Algebra::Poly => {
            let sets: Vec<PolyLogicalZonotope> = bound
                .iter()
                .map(|v| match v {
                    SetValue::Poly(z) => z.clone(),
                    _ => unreachable!("checked above"),
                })
                .collect();
            eval_node(&node, &PolyOps(mode), &sets, &[]).map(SetValue::Poly)
        }
    }
}

/// Evaluates `node` on every combination of one point per slot.
fn eval_samples(node: &Node, sets: &[&[BinaryVector]]) -> Result<ExplicitSet> {
    let total = sets
        .iter()
        .try_fold(1usize, |acc, s| acc.checked_mul(s.len()))
        .filter(|&n| n <= DEFAULT_POINT_CAP)
        .ok_or(Error::Capacity {
            what: "operand samples",
            required: usize::MAX,
            cap: DEFAULT_POINT_CAP,
        })?;
    if sets.iter().any(|s| s.is_empty()) {
        return Err(Error::EmptyInput("operand set is empty"));
    }
    let mut idx = vec![0usize; sets.len()];
    let mut out = HashSet::new();
    let mut dim = 0;
    for _ in 0..total {
        let sample: Vec<BinaryVector> = idx.iter().zip(sets).map(|(&i, s)| s[i].clone()).collect();
        let v = eval_point(node, &sample, &[])?;
        dim = v.dim();
        out.insert(v);
        for (i, s) in idx.iter_mut().zip(sets) {
            *i += 1;
            if *i < s.len() {
                break;
            }
            *i = 0;
        }
    }
    Ok(ExplicitSet::from_hash_set(dim, out))
}

/// Gate operations of one generator-space representation.
pub(crate) trait GateOps {
    type Set: Clone;
    fn constant(&self, v: &BinaryVector) -> Self::Set;
    fn not(&self, a: &Self::Set) -> Self::Set;
    fn gate(&self, gate: Gate, a: &Self::Set, b: &Self::Set) -> Result<Self::Set>;

    /// Hook applied to every next-state read.
    fn next_ref(&self, a: &Self::Set) -> Self::Set {
        a.clone()
    }
}

pub(crate) struct LogicalOps;

impl GateOps for LogicalOps {
    type Set = LogicalZonotope;

    fn constant(&self, v: &BinaryVector) -> LogicalZonotope {
        LogicalZonotope::point(v.clone())
    }

    fn not(&self, a: &LogicalZonotope) -> LogicalZonotope {
        a.not()
    }

    fn gate(&self, gate: Gate, a: &LogicalZonotope, b: &LogicalZonotope) -> Result<LogicalZonotope> {
        a.gate(b, gate)
    }
}

pub(crate) struct PolyOps(pub Mode);

impl GateOps for PolyOps {
    type Set = PolyLogicalZonotope;

    fn constant(&self, v: &BinaryVector) -> PolyLogicalZonotope {
        PolyLogicalZonotope::point(v.clone())
    }

    fn not(&self, a: &PolyLogicalZonotope) -> PolyLogicalZonotope {
        a.not()
    }

    fn gate(
        &self,
        gate: Gate,
        a: &PolyLogicalZonotope,
        b: &PolyLogicalZonotope,
    ) -> Result<PolyLogicalZonotope> {
        match self.0 {
            Mode::Minkowski => {
                let z = a.minkowski_gate(b, gate)?.compact();
                // The result shares no factors with anything else, so its
                // points can be re-encoded without losing information; that
                // needs at most one factor per bit.
                if z.num_factors() > z.dim() {
                    PolyLogicalZonotope::from_points_exact(&z.evaluate(DEFAULT_EVAL_CAP)?.sorted())
                } else {
                    Ok(z)
                }
            }
            Mode::Exact => Ok(a.exact_gate(b, gate)?.compact()),
        }
    }
}

/// Structural evaluation: `cur[v]` and `next[v]` hold the operand sets.
pub(crate) fn eval_node<O: GateOps>(
    node: &Node,
    ops: &O,
    cur: &[O::Set],
    next: &[Option<O::Set>],
) -> Result<O::Set> {
    Ok(match node {
        Node::Cur(v) => cur[*v].clone(),
        Node::Next(v) => ops.next_ref(
            next.get(*v)
                .and_then(Option::as_ref)
                .ok_or_else(|| Error::Model("next-state value used before it is computed".into()))?,
        ),
        Node::Const(c) => ops.constant(c),
        Node::Not(e) => ops.not(&eval_node(e, ops, cur, next)?),
        Node::Gate(g, l, r) => {
            let a = eval_node(l, ops, cur, next)?;
            let b = eval_node(r, ops, cur, next)?;
            ops.gate(*g, &a, &b)?
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binvec::BinaryMatrix;
    use crate::model::parse_expr;
    use crate::poly::FactorId;

    fn p3() -> PolyLogicalZonotope {
        PolyLogicalZonotope::new(
            "0".parse().unwrap(),
            BinaryMatrix::from_columns(1, vec!["1".parse().unwrap()]).unwrap(),
            BinaryMatrix::identity(1),
            vec![FactorId(1)],
        )
        .unwrap()
    }

    fn set(points: &[&str]) -> ExplicitSet {
        ExplicitSet::from_strs(points).unwrap()
    }

    #[test]
    fn dependency_in_each_algebra() {
        let e = parse_expr("x ^ x").unwrap();
        let env = Env::from([("x".to_string(), SetValue::Poly(p3()))]);
        let exact = eval_expr(&e, &env, Algebra::Poly, Mode::Exact).unwrap();
        assert_eq!(exact.evaluate(24).unwrap(), set(&["0"]));
        let mink = eval_expr(&e, &env, Algebra::Poly, Mode::Minkowski).unwrap();
        assert_eq!(mink.evaluate(24).unwrap(), set(&["0", "1"]));

        let env = Env::from([("x".to_string(), SetValue::explicit(&set(&["0", "1"])))]);
        let got = eval_expr(&e, &env, Algebra::Explicit, Mode::Minkowski).unwrap();
        assert_eq!(got.evaluate(24).unwrap(), set(&["0"]));
        let got = eval_expr(&parse_expr("!x").unwrap(), &env, Algebra::Explicit, Mode::Minkowski)
            .unwrap();
        assert_eq!(got.evaluate(24).unwrap(), set(&["0", "1"]));
    }

    #[test]
    fn mode_and_binding_errors() {
        let e = parse_expr("x & y'").unwrap();
        let z = LogicalZonotope::point("1".parse().unwrap());
        let env = Env::from([
            ("x".to_string(), SetValue::Logical(z.clone())),
            ("y'".to_string(), SetValue::Logical(z)),
        ]);
        assert!(matches!(
            eval_expr(&e, &env, Algebra::Logical, Mode::Exact),
            Err(Error::Mode(_))
        ));
        assert!(matches!(
            eval_expr(&e, &env, Algebra::Poly, Mode::Exact),
            Err(Error::Mode(_))
        ));
        let got = eval_expr(&e, &env, Algebra::Logical, Mode::Minkowski).unwrap();
        assert_eq!(got.evaluate(24).unwrap(), set(&["1"]));
        let missing = Env::new();
        assert!(eval_expr(&e, &missing, Algebra::Logical, Mode::Minkowski)
            .unwrap_err()
            .to_string()
            .contains("'x'"));
    }
}
