//! Enumerated sets of binary vectors and brute-force reachability.
//!
//! Everything here works point by point, so it doubles as the reference
//! that the generator-space representations are checked against.

use std::collections::HashSet;
use std::fmt;

use crate::binvec::{BinaryVector, Gate};
use crate::error::{Error, Result};
use crate::model::{Model, Node};

/// Default bound on the number of points a brute-force set may hold.
pub const DEFAULT_POINT_CAP: usize = 1 << 20;

#[derive(Clone)]
pub struct ExplicitSet {
    dim: usize,
    points: HashSet<BinaryVector>,
}

impl ExplicitSet {
    pub fn new(dim: usize, points: impl IntoIterator<Item = BinaryVector>) -> Result<Self> {
        let mut set = HashSet::new();
        for p in points {
            if p.dim() != dim {
                return Err(Error::dim(dim, p.dim()));
            }
            set.insert(p);
        }
        if set.is_empty() {
            return Err(Error::EmptyInput("explicit set needs at least one point"));
        }
        Ok(ExplicitSet { dim, points: set })
    }

    pub fn singleton(point: BinaryVector) -> Self {
        ExplicitSet {
            dim: point.dim(),
            points: HashSet::from([point]),
        }
    }

    /// Parses a list of bit strings, e.g. `&["01", "10"]`.
    pub fn from_strs(points: &[&str]) -> Result<Self> {
        let parsed = points
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<BinaryVector>>>()?;
        let dim = parsed
            .first()
            .map(BinaryVector::dim)
            .ok_or(Error::EmptyInput("explicit set needs at least one point"))?;
        Self::new(dim, parsed)
    }

    pub(crate) fn from_hash_set(dim: usize, points: HashSet<BinaryVector>) -> Self {
        debug_assert!(!points.is_empty());
        ExplicitSet { dim, points }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, point: &BinaryVector) -> bool {
        self.points.contains(point)
    }

    pub fn iter(&self) -> impl Iterator<Item = &BinaryVector> {
        self.points.iter()
    }

    /// Points in lexicographic bit-string order.
    pub fn sorted(&self) -> Vec<BinaryVector> {
        let mut v: Vec<_> = self.points.iter().cloned().collect();
        v.sort();
        v
    }

    pub fn is_subset(&self, other: &ExplicitSet) -> bool {
        self.dim == other.dim && self.points.is_subset(&other.points)
    }

    /// `{ gate(z1, z2) : z1 in self, z2 in other }`.
    pub fn minkowski(&self, other: &ExplicitSet, gate: Gate) -> Result<ExplicitSet> {
        if self.dim != other.dim {
            return Err(Error::dim(self.dim, other.dim));
        }
        let mut out = HashSet::with_capacity(self.len().max(other.len()));
        for a in &self.points {
            for b in &other.points {
                out.insert(a.op_unchecked(b, gate));
            }
        }
        Ok(ExplicitSet::from_hash_set(self.dim, out))
    }

    pub fn not(&self) -> ExplicitSet {
        ExplicitSet {
            dim: self.dim,
            points: self.points.iter().map(BinaryVector::not).collect(),
        }
    }

    /// Bits `start..start+len` of every point.
    pub fn project(&self, start: usize, len: usize) -> ExplicitSet {
        ExplicitSet {
            dim: len,
            points: self.points.iter().map(|p| p.slice(start, len)).collect(),
        }
    }

    /// Cartesian product with concatenated points.
    pub fn product(&self, other: &ExplicitSet) -> ExplicitSet {
        let mut out = HashSet::with_capacity(self.len() * other.len());
        for a in &self.points {
            for b in &other.points {
                out.insert(a.concat(b));
            }
        }
        ExplicitSet::from_hash_set(self.dim + other.dim, out)
    }

    pub fn union(&self, other: &ExplicitSet) -> Result<ExplicitSet> {
        if self.dim != other.dim {
            return Err(Error::dim(self.dim, other.dim));
        }
        let mut points = self.points.clone();
        points.extend(other.points.iter().cloned());
        Ok(ExplicitSet {
            dim: self.dim,
            points,
        })
    }
}

impl PartialEq for ExplicitSet {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.points == other.points
    }
}

impl Eq for ExplicitSet {}

impl fmt::Debug for ExplicitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.sorted()).finish()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ExplicitOptions {
    pub point_cap: usize,
    /// Let every next-state reference range over the whole set of next
    /// values instead of the value computed from the same sample.
    pub break_next_state_deps: bool,
}

impl Default for ExplicitOptions {
    fn default() -> Self {
        ExplicitOptions {
            point_cap: DEFAULT_POINT_CAP,
            break_next_state_deps: false,
        }
    }
}

/// Joint initial set: product of every state variable's initial points,
/// in declaration order of the state variables.
pub fn initial_joint(model: &Model) -> Result<ExplicitSet> {
    product_of(model.state_indices().iter().map(|&v| model.initial_points(v)))
}

fn product_of<'a>(lists: impl Iterator<Item = &'a [BinaryVector]>) -> Result<ExplicitSet> {
    let mut acc: Option<ExplicitSet> = None;
    for list in lists {
        let dim = list.first().map(BinaryVector::dim).unwrap_or(0);
        let set = ExplicitSet::new(dim, list.iter().cloned())?;
        acc = Some(match acc {
            None => set,
            Some(prev) => prev.product(&set),
        });
    }
    acc.ok_or(Error::EmptyInput("no variables to combine"))
}

/// `R_0 ..= R_steps` of the joint state, each `R_{k+1} = { f(x, u) }` over
/// all `x in R_k` and `u in U_k`.
pub fn reach_explicit(model: &Model, steps: usize) -> Result<Vec<ExplicitSet>> {
    reach_explicit_with(model, steps, &ExplicitOptions::default())
}

pub fn reach_explicit_with(
    model: &Model,
    steps: usize,
    opts: &ExplicitOptions,
) -> Result<Vec<ExplicitSet>> {
    let mut sets = Vec::with_capacity(steps + 1);
    let mut current = initial_joint(model)?;
    check_points(current.len(), opts.point_cap).map_err(|e| e.at_step(0))?;
    sets.push(current.clone());
    for k in 0..steps {
        current = explicit_step(model, &current, k, opts).map_err(|e| e.at_step(k + 1))?;
        sets.push(current.clone());
    }
    Ok(sets)
}

fn check_points(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::Capacity {
            what: "explicit points",
            required: n,
            cap,
        });
    }
    Ok(())
}

/// Splits a joint state vector into one vector per model variable, with
/// inputs appended from `input`.
struct Layout {
    /// (variable index, offset within the joint state vector)
    state: Vec<(usize, usize)>,
    input: Vec<(usize, usize)>,
    nvars: usize,
}

impl Layout {
    fn new(model: &Model) -> Self {
        let mut off = 0;
        let state = model
            .state_indices()
            .iter()
            .map(|&v| {
                let o = off;
                off += model.var(v).dim;
                (v, o)
            })
            .collect();
        let mut off = 0;
        let input = model
            .input_indices()
            .iter()
            .map(|&v| {
                let o = off;
                off += model.var(v).dim;
                (v, o)
            })
            .collect();
        Layout {
            state,
            input,
            nvars: model.vars().len(),
        }
    }

    fn split(&self, model: &Model, x: &BinaryVector, u: &BinaryVector) -> Vec<BinaryVector> {
        let mut env = vec![BinaryVector::zeros(0); self.nvars];
        for &(v, off) in &self.state {
            env[v] = x.slice(off, model.var(v).dim);
        }
        for &(v, off) in &self.input {
            env[v] = u.slice(off, model.var(v).dim);
        }
        env
    }
}

/// One application of the update map to a whole joint state set.
pub(crate) fn explicit_step(
    model: &Model,
    current: &ExplicitSet,
    step: usize,
    opts: &ExplicitOptions,
) -> Result<ExplicitSet> {
    let layout = Layout::new(model);
    let inputs = input_joint(model, step)?;
    let samples = current.len().saturating_mul(inputs.as_ref().map_or(1, |s| s.len()));
    let empty = BinaryVector::zeros(0);
    let input_points: Vec<&BinaryVector> = match &inputs {
        Some(s) => s.iter().collect(),
        None => vec![&empty],
    };

    let mut out = HashSet::new();
    if !opts.break_next_state_deps {
        for x in current.iter() {
            for &u in &input_points {
                let cur = layout.split(model, x, u);
                let mut next: Vec<Option<BinaryVector>> = vec![None; layout.nvars];
                for upd in model.updates() {
                    let value = eval_point(&upd.compiled, &cur, &next)?;
                    next[upd.target] = Some(value);
                }
                out.insert(join_state(model, &next));
                check_points(out.len(), opts.point_cap)?;
            }
        }
        return Ok(ExplicitSet::from_hash_set(current.dim(), out));
    }

    // Dependency-free variant: resolve updates in order, each primed reference
    // standing for the full set of next values of that variable.
    let nvars = layout.nvars;
    let mut per_sample: Vec<Vec<Option<ExplicitSet>>> = Vec::with_capacity(samples);
    let mut envs = Vec::with_capacity(samples);
    for x in current.iter() {
        for &u in &input_points {
            envs.push(layout.split(model, x, u));
            per_sample.push(vec![None; nvars]);
        }
    }
    let mut marginals: Vec<Option<ExplicitSet>> = vec![None; nvars];
    for upd in model.updates() {
        let mut marginal: Option<ExplicitSet> = None;
        for (env, slot) in envs.iter().zip(per_sample.iter_mut()) {
            let values = eval_set(&upd.compiled, env, &marginals, opts.point_cap)?;
            marginal = Some(match marginal {
                None => values.clone(),
                Some(m) => m.union(&values)?,
            });
            slot[upd.target] = Some(values);
        }
        marginals[upd.target] = marginal;
    }
    for slot in &per_sample {
        let joint = product_of_sets(model, slot)?;
        out.extend(joint.points);
        check_points(out.len(), opts.point_cap)?;
    }
    Ok(ExplicitSet::from_hash_set(current.dim(), out))
}

fn product_of_sets(model: &Model, slot: &[Option<ExplicitSet>]) -> Result<ExplicitSet> {
    let mut acc: Option<ExplicitSet> = None;
    for &v in model.state_indices() {
        let set = slot[v]
            .as_ref()
            .ok_or_else(|| Error::Model(format!("no update for {}", model.var(v).name)))?;
        acc = Some(match acc {
            None => set.clone(),
            Some(prev) => prev.product(set),
        });
    }
    acc.ok_or(Error::EmptyInput("model has no state variables"))
}

fn join_state(model: &Model, next: &[Option<BinaryVector>]) -> BinaryVector {
    let total = model.state_bits();
    let mut out = BinaryVector::zeros(total);
    let mut off = 0;
    for &v in model.state_indices() {
        let value = next[v].as_ref().expect("validated model updates every state variable");
        out.write_at(off, value);
        off += value.dim();
    }
    out
}

/// Joint input set for `step`, or `None` when the model has no inputs.
fn input_joint(model: &Model, step: usize) -> Result<Option<ExplicitSet>> {
    if model.input_indices().is_empty() {
        return Ok(None);
    }
    let lists = model
        .input_indices()
        .iter()
        .map(|&v| model.input_points(v, step))
        .collect::<Result<Vec<_>>>()?;
    product_of(lists.into_iter()).map(Some)
}

/// Evaluates a compiled expression on one concrete sample.
pub(crate) fn eval_point(
    node: &Node,
    cur: &[BinaryVector],
    next: &[Option<BinaryVector>],
) -> Result<BinaryVector> {
    Ok(match node {
        Node::Cur(v) => cur[*v].clone(),
        Node::Next(v) => next[*v]
            .clone()
            .ok_or_else(|| Error::Model("next-state value used before it is computed".into()))?,
        Node::Const(c) => c.clone(),
        Node::Not(inner) => eval_point(inner, cur, next)?.not(),
        Node::Gate(g, l, r) => {
            let a = eval_point(l, cur, next)?;
            let b = eval_point(r, cur, next)?;
            a.op(&b, *g)?
        }
    })
}

/// Like [`eval_point`] but primed references are whole sets, combined
/// pointwise with every other operand.
fn eval_set(
    node: &Node,
    cur: &[BinaryVector],
    next: &[Option<ExplicitSet>],
    cap: usize,
) -> Result<ExplicitSet> {
    let out = match node {
        Node::Cur(v) => ExplicitSet::singleton(cur[*v].clone()),
        Node::Next(v) => next[*v]
            .clone()
            .ok_or_else(|| Error::Model("next-state value used before it is computed".into()))?,
        Node::Const(c) => ExplicitSet::singleton(c.clone()),
        Node::Not(inner) => eval_set(inner, cur, next, cap)?.not(),
        Node::Gate(g, l, r) => {
            let a = eval_set(l, cur, next, cap)?;
            let b = eval_set(r, cur, next, cap)?;
            a.minkowski(&b, *g)?
        }
    };
    check_points(out.len(), cap)?;
    Ok(out)
}
