//! N-step reachability over any of the three set representations.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::binvec::BinaryVector;
use crate::error::{Error, Result};
use crate::explicit::{explicit_step, initial_joint, ExplicitOptions, ExplicitSet, DEFAULT_POINT_CAP};
use crate::logical::LogicalZonotope;
use crate::model::{check_mode, eval_node, Algebra, GateOps, LogicalOps, Mode, Model, PolyOps, SetValue};
use crate::poly::{FactorId, PolyLogicalZonotope};
use crate::DEFAULT_EVAL_CAP;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachOptions {
    /// Bound on free binary choices when enumerating a set.
    pub eval_cap: usize,
    /// Bound on the number of points the explicit algebra may hold.
    pub point_cap: usize,
    /// Re-encode a group of state variables that share factors once it uses
    /// more than this many factors. `None` keeps the symbolic form forever.
    pub rebase_threshold: Option<usize>,
    /// Same, triggered by the number of generators in the group.
    pub rebase_generator_threshold: Option<usize>,
    /// Run the greedy generator removal on a poly variable with more than
    /// this many factors, if no other variable shares them.
    pub simplify_threshold: Option<usize>,
    /// Every `x'` reference sees an independent copy of the next-state set.
    pub break_next_state_deps: bool,
    /// Steps to report; `None` reports every step.
    pub record: Option<Vec<usize>>,
    /// Attach the per-variable sets to each record.
    pub keep_sets: bool,
    /// Echoed in reports.
    pub seed: Option<u64>,
}

impl Default for ReachOptions {
    fn default() -> Self {
        ReachOptions {
            eval_cap: DEFAULT_EVAL_CAP,
            point_cap: DEFAULT_POINT_CAP,
            rebase_threshold: Some(12),
            rebase_generator_threshold: Some(256),
            simplify_threshold: None,
            break_next_state_deps: false,
            record: None,
            keep_sets: false,
            seed: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedSet {
    pub name: String,
    pub set: SetValue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub steps: usize,
    /// Seconds spent stepping from 0 to `steps`, size computation excluded.
    pub time_seconds: f64,
    /// Distinct joint state vectors.
    pub size: u64,
    /// Sum over state variables of the distinct values each takes.
    pub marginal_size: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sets: Option<Vec<NamedSet>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReachResult {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    pub algebra: Algebra,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub records: Vec<StepRecord>,
}

impl ReachResult {
    pub fn record(&self, steps: usize) -> Option<&StepRecord> {
        self.records.iter().find(|r| r.steps == steps)
    }

    /// `steps,time_seconds,size` with a leading `#` metadata line.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        writeln!(
            out,
            "# model={} algebra={} mode={} seed={}",
            self.model.as_deref().unwrap_or("-"),
            self.algebra,
            self.mode,
            self.seed.map_or("-".to_string(), |s| s.to_string())
        )
        .expect("writing to a string");
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["steps", "time_seconds", "size"])?;
        for r in &self.records {
            w.write_record([
                r.steps.to_string(),
                format!("{:.6}", r.time_seconds),
                r.size.to_string(),
            ])?;
        }
        let body = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// State sets after some number of steps.
#[derive(Clone, Debug)]
pub enum StateSets {
    /// Joint set of concatenated state vectors.
    Explicit(ExplicitSet),
    /// One zonotope per state variable, in declaration order.
    Logical(Vec<LogicalZonotope>),
    /// One zonotope per state variable, in declaration order.
    Poly(Vec<PolyLogicalZonotope>),
}

impl StateSets {
    /// Number of distinct joint state vectors.
    pub fn joint_size(&self, cap: usize) -> Result<u64> {
        match self {
            StateSets::Explicit(s) => Ok(s.len() as u64),
            StateSets::Logical(vars) => Ok(vars
                .iter()
                .map(|z| 1u64 << z.rank().min(63))
                .fold(1u64, u64::saturating_mul)),
            StateSets::Poly(vars) => {
                let mut total = 1u64;
                for group in id_groups(vars) {
                    let parts: Vec<&PolyLogicalZonotope> = group.iter().map(|&i| &vars[i]).collect();
                    let joint = PolyLogicalZonotope::stack(&parts)?;
                    total = total.saturating_mul(joint.count(cap)? as u64);
                }
                Ok(total)
            }
        }
    }

    /// Sum of per-variable set sizes.
    pub fn marginal_size(&self, model: &Model, cap: usize) -> Result<u64> {
        match self {
            StateSets::Explicit(s) => {
                let mut off = 0;
                let mut total = 0;
                for &v in model.state_indices() {
                    let d = model.var(v).dim;
                    total += s.project(off, d).len() as u64;
                    off += d;
                }
                Ok(total)
            }
            StateSets::Logical(vars) => Ok(vars.iter().map(|z| 1u64 << z.rank().min(63)).sum()),
            StateSets::Poly(vars) => {
                let mut total = 0;
                for z in vars {
                    total += z.count(cap)? as u64;
                }
                Ok(total)
            }
        }
    }

    /// The joint set itself, state variables concatenated in declaration order.
    pub fn joint_points(&self, cap: usize) -> Result<ExplicitSet> {
        match self {
            StateSets::Explicit(s) => Ok(s.clone()),
            StateSets::Logical(vars) => {
                let mut acc: Option<ExplicitSet> = None;
                for z in vars {
                    let e = z.evaluate(cap)?;
                    acc = Some(match acc {
                        None => e,
                        Some(a) => a.product(&e),
                    });
                }
                acc.ok_or(Error::EmptyInput("no state variables"))
            }
            StateSets::Poly(vars) => {
                let mut offsets = Vec::with_capacity(vars.len());
                let mut dim = 0;
                for z in vars {
                    offsets.push(dim);
                    dim += z.dim();
                }
                let mut acc = vec![BinaryVector::zeros(dim)];
                for group in id_groups(vars) {
                    let parts: Vec<&PolyLogicalZonotope> = group.iter().map(|&i| &vars[i]).collect();
                    let points = PolyLogicalZonotope::stack(&parts)?.evaluate(cap)?;
                    let mut next = Vec::with_capacity(acc.len() * points.len());
                    for base in &acc {
                        for p in points.iter() {
                            let mut v = base.clone();
                            let mut at = 0;
                            for &i in &group {
                                let d = vars[i].dim();
                                v.write_at(offsets[i], &p.slice(at, d));
                                at += d;
                            }
                            next.push(v);
                        }
                    }
                    acc = next;
                }
                ExplicitSet::new(dim, acc)
            }
        }
    }

    pub fn per_variable(&self, model: &Model) -> Vec<NamedSet> {
        let names = model.state_indices().iter().map(|&v| model.var(v).name.clone());
        match self {
            StateSets::Explicit(s) => {
                let mut off = 0;
                names
                    .zip(model.state_indices())
                    .map(|(name, &v)| {
                        let d = model.var(v).dim;
                        let set = SetValue::explicit(&s.project(off, d));
                        off += d;
                        NamedSet { name, set }
                    })
                    .collect()
            }
            StateSets::Logical(vars) => names
                .zip(vars)
                .map(|(name, z)| NamedSet {
                    name,
                    set: SetValue::Logical(z.clone()),
                })
                .collect(),
            StateSets::Poly(vars) => names
                .zip(vars)
                .map(|(name, z)| NamedSet {
                    name,
                    set: SetValue::Poly(z.clone()),
                })
                .collect(),
        }
    }
}

/// Indices of variables grouped so that variables sharing a factor land in
/// the same group. Groups and their members are in ascending order.
fn id_groups(vars: &[PolyLogicalZonotope]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..vars.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut owner: HashMap<FactorId, usize> = HashMap::new();
    for (i, z) in vars.iter().enumerate() {
        for id in z.ids() {
            if let Some(&j) = owner.get(id) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            } else {
                owner.insert(*id, i);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for i in 0..vars.len() {
        let root = find(&mut parent, i);
        let k = *slot.entry(root).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[k].push(i);
    }
    groups
}

/// Steps a model forward one step at a time.
pub struct Reacher<'m> {
    model: &'m Model,
    mode: Mode,
    opts: ReachOptions,
    step: usize,
    state: StateSets,
}

impl<'m> Reacher<'m> {
    pub fn new(model: &'m Model, algebra: Algebra, mode: Mode, opts: ReachOptions) -> Result<Self> {
        check_mode(algebra, mode)?;
        let init = |v: usize| model.initial_points(v);
        let state = match algebra {
            Algebra::Explicit => {
                let joint = initial_joint(model)?;
                if joint.len() > opts.point_cap {
                    return Err(Error::Capacity {
                        what: "explicit points",
                        required: joint.len(),
                        cap: opts.point_cap,
                    }
                    .at_step(0));
                }
                StateSets::Explicit(joint)
            }
            Algebra::Logical => StateSets::Logical(
                model
                    .state_indices()
                    .iter()
                    .map(|&v| Ok(LogicalZonotope::enclose_points(init(v))?.reduce()))
                    .collect::<Result<_>>()?,
            ),
            Algebra::Poly => StateSets::Poly(
                model
                    .state_indices()
                    .iter()
                    .map(|&v| PolyLogicalZonotope::from_points_exact(init(v)))
                    .collect::<Result<_>>()?,
            ),
        };
        Ok(Reacher {
            model,
            mode,
            opts,
            step: 0,
            state,
        })
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    pub fn state(&self) -> &StateSets {
        &self.state
    }

    pub fn advance(&mut self) -> Result<()> {
        let k = self.step;
        let next = match &self.state {
            StateSets::Explicit(current) => {
                let eo = ExplicitOptions {
                    point_cap: self.opts.point_cap,
                    break_next_state_deps: self.opts.break_next_state_deps,
                };
                StateSets::Explicit(explicit_step(self.model, current, k, &eo)?)
            }
            StateSets::Logical(vars) => {
                let next = self.generator_step(vars, &LogicalOps, LogicalZonotope::enclose_points)?;
                StateSets::Logical(next.into_iter().map(|z| z.reduce()).collect())
            }
            StateSets::Poly(vars) => {
                let ops = PolyOps(self.mode);
                let next = self.generator_step(vars, &ops, PolyLogicalZonotope::from_points_exact)?;
                let next: Vec<_> = next.into_iter().map(|z| z.compact()).collect();
                StateSets::Poly(self.manage_growth(next)?)
            }
        };
        self.state = next;
        self.step += 1;
        Ok(())
    }

    fn generator_step<O: GateOps>(
        &self,
        vars: &[O::Set],
        ops: &O,
        enclose: impl Fn(&[BinaryVector]) -> Result<O::Set>,
    ) -> Result<Vec<O::Set>>
    where
        O::Set: Renamable,
    {
        let model = self.model;
        let n = model.vars().len();
        let mut cur: Vec<Option<O::Set>> = vec![None; n];
        for (&v, z) in model.state_indices().iter().zip(vars) {
            cur[v] = Some(z.clone());
        }
        for &v in model.input_indices() {
            cur[v] = Some(enclose(model.input_points(v, self.step)?)?);
        }
        let cur: Vec<O::Set> = cur.into_iter().map(|z| z.expect("every variable bound")).collect();
        let mut next: Vec<Option<O::Set>> = vec![None; n];
        for upd in model.updates() {
            let value = if self.opts.break_next_state_deps {
                eval_node(&upd.compiled, &FreshNext(ops), &cur, &next)?
            } else {
                eval_node(&upd.compiled, ops, &cur, &next)?
            };
            next[upd.target] = Some(value);
        }
        Ok(model
            .state_indices()
            .iter()
            .map(|&v| next[v].take().expect("validated model updates every state variable"))
            .collect())
    }

    fn manage_growth(&self, mut vars: Vec<PolyLogicalZonotope>) -> Result<Vec<PolyLogicalZonotope>> {
        let cap = self.opts.eval_cap;
        let groups = id_groups(&vars);
        if let Some(limit) = self.opts.simplify_threshold {
            for g in &groups {
                if let [i] = g.as_slice() {
                    if vars[*i].num_factors() > limit {
                        vars[*i] = vars[*i].simplify(cap)?;
                    }
                }
            }
        }
        let factor_limit = self.opts.rebase_threshold.unwrap_or(usize::MAX);
        let generator_limit = self.opts.rebase_generator_threshold.unwrap_or(usize::MAX);
        if factor_limit < usize::MAX || generator_limit < usize::MAX {
            for g in &groups {
                let parts: Vec<&PolyLogicalZonotope> = g.iter().map(|&i| &vars[i]).collect();
                let joint = PolyLogicalZonotope::stack(&parts)?;
                if joint.num_factors() <= factor_limit && joint.num_generators() <= generator_limit {
                    continue;
                }
                let points = joint.evaluate(cap)?.sorted();
                let encoded = PolyLogicalZonotope::from_points_exact(&points)?;
                let mut off = 0;
                for &i in g {
                    let d = vars[i].dim();
                    vars[i] = encoded.slice(off, d).compact();
                    off += d;
                }
            }
        }
        Ok(vars)
    }
}

/// Sets whose factors can be replaced by fresh ones.
pub(crate) trait Renamable {
    fn renamed(&self) -> Self;
}

impl Renamable for LogicalZonotope {
    fn renamed(&self) -> Self {
        self.clone()
    }
}

impl Renamable for PolyLogicalZonotope {
    /// A copy with more factors than bits is re-encoded from its points,
    /// which needs at most one factor per bit.
    fn renamed(&self) -> Self {
        if self.num_factors() > self.dim() {
            if let Ok(points) = self.evaluate(DEFAULT_EVAL_CAP) {
                if let Ok(z) = PolyLogicalZonotope::from_points_exact(&points.sorted()) {
                    return z;
                }
            }
        }
        self.rename_fresh()
    }
}

/// Wraps gate ops so that next-state reads come back with fresh factors.
struct FreshNext<'a, O>(&'a O);

impl<O: GateOps> GateOps for FreshNext<'_, O>
where
    O::Set: Renamable,
{
    type Set = O::Set;

    fn constant(&self, v: &BinaryVector) -> O::Set {
        self.0.constant(v)
    }

    fn not(&self, a: &O::Set) -> O::Set {
        self.0.not(a)
    }

    fn gate(&self, gate: crate::binvec::Gate, a: &O::Set, b: &O::Set) -> Result<O::Set> {
        self.0.gate(gate, a, b)
    }

    fn next_ref(&self, a: &O::Set) -> O::Set {
        a.renamed()
    }
}

/// Runs `steps` steps and reports sizes at the recorded steps.
pub fn reach(
    model: &Model,
    steps: usize,
    algebra: Algebra,
    mode: Mode,
    opts: &ReachOptions,
) -> Result<ReachResult> {
    let record: Vec<usize> = match &opts.record {
        Some(list) => {
            if let Some(&bad) = list.iter().find(|&&s| s > steps) {
                return Err(Error::Invalid(format!("record step {bad} is past the horizon {steps}")));
            }
            list.clone()
        }
        None => (0..=steps).collect(),
    };
    let cap = opts.eval_cap;
    let mut r = Reacher::new(model, algebra, mode, opts.clone())?;
    let mut records = Vec::with_capacity(record.len());
    let mut elapsed = 0.0;
    let snapshot = |r: &Reacher, elapsed: f64, records: &mut Vec<StepRecord>| -> Result<()> {
        let k = r.steps_taken();
        let times = record.iter().filter(|&&s| s == k).count();
        if times == 0 {
            return Ok(());
        }
        let size = r.state.joint_size(cap).map_err(|e| e.at_step(k))?;
        let marginal_size = r.state.marginal_size(model, cap).map_err(|e| e.at_step(k))?;
        let sets = opts.keep_sets.then(|| r.state.per_variable(model));
        for _ in 0..times {
            records.push(StepRecord {
                steps: k,
                time_seconds: elapsed,
                size,
                marginal_size,
                sets: sets.clone(),
            });
        }
        Ok(())
    };
    snapshot(&r, elapsed, &mut records)?;
    for k in 0..steps {
        let t = Instant::now();
        r.advance().map_err(|e| e.at_step(k + 1))?;
        elapsed += t.elapsed().as_secs_f64();
        snapshot(&r, elapsed, &mut records)?;
    }
    records.sort_by_key(|r| r.steps);
    Ok(ReachResult {
        model: model.name().map(str::to_string),
        algebra,
        mode,
        seed: opts.seed,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(json: &str) -> Model {
        Model::from_json(json).unwrap()
    }

    #[test]
    fn identity_keeps_size() {
        let m = model(r#"{"vars":[{"name":"x","role":"state","init":["001","010","111"]}],"updates":{"x":"x"}}"#);
        for (algebra, mode) in [
            (Algebra::Explicit, Mode::Minkowski),
            (Algebra::Poly, Mode::Exact),
            (Algebra::Poly, Mode::Minkowski),
        ] {
            let r = reach(&m, 10, algebra, mode, &ReachOptions::default()).unwrap();
            assert_eq!(r.records.len(), 11);
            assert!(r.records.iter().all(|s| s.size == 3), "{algebra}");
        }
        let r = reach(&m, 10, Algebra::Logical, Mode::Minkowski, &ReachOptions::default()).unwrap();
        assert!(r.records.iter().all(|s| s.size == 4));
    }

    #[test]
    fn flip_model_alternates() {
        let m = model(r#"{"vars":[{"name":"x","role":"state","init":["00"]}],"updates":{"x":"!x"}}"#);
        let r = Reacher::new(&m, Algebra::Explicit, Mode::Minkowski, ReachOptions::default());
        let mut r = r.unwrap();
        r.advance().unwrap();
        assert_eq!(r.state().joint_points(24).unwrap(), ExplicitSet::from_strs(&["11"]).unwrap());
        r.advance().unwrap();
        assert_eq!(r.state().joint_points(24).unwrap(), ExplicitSet::from_strs(&["00"]).unwrap());
    }

    #[test]
    fn shared_factor_joint_size() {
        let m = model(
            r#"{"vars":[{"name":"a","role":"state","init":["0"]},{"name":"b","role":"state","init":["0"]},
                        {"name":"u","role":"input","inputs":["0","1"]}],
                "updates":{"a":"u","b":"u"}}"#,
        );
        let r = reach(&m, 1, Algebra::Poly, Mode::Exact, &ReachOptions::default()).unwrap();
        assert_eq!(r.record(1).unwrap().size, 2);
        let r = reach(&m, 1, Algebra::Logical, Mode::Minkowski, &ReachOptions::default()).unwrap();
        assert_eq!(r.record(1).unwrap().size, 4);
        assert_eq!(r.record(1).unwrap().marginal_size, 4);
    }

    #[test]
    fn exact_mode_needs_poly() {
        let m = model(r#"{"vars":[{"name":"x","role":"state","init":["0"]}],"updates":{"x":"x"}}"#);
        assert!(matches!(
            reach(&m, 1, Algebra::Logical, Mode::Exact, &ReachOptions::default()),
            Err(Error::Mode(_))
        ));
    }

    #[test]
    fn short_schedule_reports_step() {
        let m = model(
            r#"{"vars":[{"name":"x","role":"state","init":["0"]},{"name":"u","role":"input","inputs":[["1"]]}],
                "updates":{"x":"x ^ u"}}"#,
        );
        let err = reach(&m, 3, Algebra::Poly, Mode::Exact, &ReachOptions::default()).unwrap_err();
        assert!(matches!(err, Error::AtStep { step: 2, .. }), "{err}");
    }

    #[test]
    fn report_formats() {
        let m = model(r#"{"name":"id","vars":[{"name":"x","role":"state","init":["0","1"]}],"updates":{"x":"x"}}"#);
        let opts = ReachOptions {
            record: Some(vec![0]),
            keep_sets: true,
            seed: Some(9),
            ..ReachOptions::default()
        };
        let r = reach(&m, 0, Algebra::Poly, Mode::Exact, &opts).unwrap();
        let csv = r.to_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# model=id algebra=poly mode=exact seed=9");
        assert_eq!(lines[1], "steps,time_seconds,size");
        assert!(lines[2].starts_with("0,") && lines[2].ends_with(",2"));
        assert_eq!(lines.len(), 3);
        let back = ReachResult::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
