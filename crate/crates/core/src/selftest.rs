//! Randomised comparisons of the generator-space algebras against point
//! enumeration. Used by the `selftest` command and the acceptance tests.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::binvec::{BinaryMatrix, BinaryVector, Gate};
use crate::error::Result;
use crate::explicit::{reach_explicit, ExplicitSet};
use crate::logical::LogicalZonotope;
use crate::model::{Algebra, InputSchedule, Mode, Model, ModelDoc, Role, VarDoc};
use crate::poly::{FactorId, PolyLogicalZonotope};
use crate::reach::{ReachOptions, Reacher};
use crate::DEFAULT_EVAL_CAP;

/// Outcome of one randomised check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub name: &'static str,
    pub cases: usize,
    pub comparisons: usize,
    pub mismatches: usize,
    pub first_mismatch: Option<String>,
}

impl CheckReport {
    fn new(name: &'static str) -> Self {
        CheckReport {
            name,
            cases: 0,
            comparisons: 0,
            mismatches: 0,
            first_mismatch: None,
        }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.comparisons += 1;
        if !ok {
            self.mismatches += 1;
            if self.first_mismatch.is_none() {
                self.first_mismatch = Some(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.mismatches == 0 && self.comparisons > 0
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} cases, {} comparisons, {} mismatches",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.cases,
            self.comparisons,
            self.mismatches
        )?;
        if let Some(m) = &self.first_mismatch {
            write!(f, " (first: {m})")?;
        }
        Ok(())
    }
}

pub fn random_vector(rng: &mut impl Rng, dim: usize) -> BinaryVector {
    BinaryVector::from_bits(&(0..dim).map(|_| rng.gen::<bool>()).collect::<Vec<_>>())
}

pub fn random_logical(rng: &mut impl Rng, dim: usize, max_generators: usize) -> LogicalZonotope {
    let h = rng.gen_range(0..=max_generators);
    let cols = (0..h).map(|_| random_vector(rng, dim)).collect();
    LogicalZonotope::new(
        random_vector(rng, dim),
        BinaryMatrix::from_columns(dim, cols).expect("columns match dim"),
    )
    .expect("shapes match")
}

/// A poly zonotope whose factor ids are drawn from `pool`, so two draws from
/// the same pool usually share some factors.
pub fn random_poly(
    rng: &mut impl Rng,
    dim: usize,
    max_generators: usize,
    max_factors: usize,
    pool: &[FactorId],
) -> PolyLogicalZonotope {
    let h = rng.gen_range(0..=max_generators);
    let p = rng.gen_range(0..=max_factors.min(pool.len()));
    let ids: Vec<FactorId> = pool.choose_multiple(rng, p).copied().collect();
    let gens = (0..h).map(|_| random_vector(rng, dim)).collect();
    let exps = (0..h).map(|_| random_vector(rng, p)).collect();
    PolyLogicalZonotope::new(
        random_vector(rng, dim),
        BinaryMatrix::from_columns(dim, gens).expect("columns match dim"),
        BinaryMatrix::from_columns(p, exps).expect("columns match factor count"),
        ids,
    )
    .expect("shapes match")
}

fn small_pool() -> Vec<FactorId> {
    (1..=5).map(FactorId).collect()
}

fn show<T: fmt::Debug>(v: T) -> String {
    format!("{v:?}")
}

/// Minkowski gates on random operands compared with the pointwise image of
/// the enumerated operands. Poly results must be equal; logical XOR and NOT
/// equal, logical AND-type gates supersets.
pub fn check_minkowski(seed: u64, cases: usize) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = CheckReport::new("minkowski operations vs point images");
    let pool = small_pool();
    for _ in 0..cases {
        rep.cases += 1;
        let n = rng.gen_range(1..=4);
        let a = random_poly(&mut rng, n, 3, 3, &pool);
        let b = random_poly(&mut rng, n, 3, 3, &pool);
        let (sa, sb) = (a.evaluate(DEFAULT_EVAL_CAP)?, b.evaluate(DEFAULT_EVAL_CAP)?);
        rep.check(a.not().evaluate(DEFAULT_EVAL_CAP)? == sa.not(), || {
            format!("poly NOT of {}", show(&a))
        });
        for gate in Gate::ALL {
            let got = a.minkowski_gate(&b, gate)?.evaluate(DEFAULT_EVAL_CAP)?;
            let want = sa.minkowski(&sb, gate)?;
            rep.check(got == want, || format!("poly {gate} of {} and {}", show(&a), show(&b)));
        }

        let la = random_logical(&mut rng, n, 3);
        let lb = random_logical(&mut rng, n, 3);
        let (ea, eb) = (la.evaluate(DEFAULT_EVAL_CAP)?, lb.evaluate(DEFAULT_EVAL_CAP)?);
        rep.check(la.not().evaluate(DEFAULT_EVAL_CAP)? == ea.not(), || {
            format!("logical NOT of {}", show(&la))
        });
        for gate in Gate::ALL {
            let got = la.gate(&lb, gate)?.evaluate(DEFAULT_EVAL_CAP)?;
            let want = ea.minkowski(&eb, gate)?;
            let ok = match gate {
                Gate::Xor | Gate::Xnor => got == want,
                _ => want.is_subset(&got),
            };
            rep.check(ok, || format!("logical {gate} of {} and {}", show(&la), show(&lb)));
        }
    }
    Ok(rep)
}

/// Exact gates on operands sharing factors, checked at every assignment of
/// the merged factors against the scalar gate of the operand values.
pub fn check_exact(seed: u64, cases: usize) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = CheckReport::new("exact operations vs assignments");
    let pool = small_pool();
    for _ in 0..cases {
        rep.cases += 1;
        let n = rng.gen_range(1..=4);
        let a = random_poly(&mut rng, n, 3, 3, &pool);
        let b = random_poly(&mut rng, n, 3, 3, &pool);
        let mut all_ids = a.ids().to_vec();
        all_ids.extend(b.ids().iter().filter(|id| !a.ids().contains(id)));
        for gate in Gate::ALL {
            let z = a.exact_gate(&b, gate)?;
            for mask in 0u64..1 << all_ids.len() {
                let value = |id: FactorId| {
                    let k = all_ids.iter().position(|&x| x == id).expect("merged id");
                    mask >> k & 1 == 1
                };
                let want = a.eval_with(value).op(&b.eval_with(value), gate)?;
                let got = z.eval_with(value);
                rep.check(got == want, || {
                    format!("{gate} of {} and {} at mask {mask:b}", show(&a), show(&b))
                });
            }
        }
    }
    Ok(rep)
}

/// `compact` and `simplify` keep the set, `compact` keeps every assignment,
/// and neither grows the representation.
pub fn check_simplification(seed: u64, cases: usize) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = CheckReport::new("compact and simplify preserve sets");
    let pool: Vec<FactorId> = (1..=6).map(FactorId).collect();
    for _ in 0..cases {
        rep.cases += 1;
        let n = rng.gen_range(1..=4);
        let mut z = random_poly(&mut rng, n, 6, 5, &pool);
        if rng.gen_bool(0.3) && z.num_generators() > 0 {
            // duplicated generators exercise the merge path
            let w = random_poly(&mut rng, n, 2, 2, &pool);
            z = z.exact_xor(&w)?.exact_xor(&w)?;
        }
        let set = z.evaluate(DEFAULT_EVAL_CAP)?;
        let c = z.compact();
        let s = z.simplify(DEFAULT_EVAL_CAP)?;
        rep.check(c.evaluate(DEFAULT_EVAL_CAP)? == set, || format!("compact of {}", show(&z)));
        rep.check(s.evaluate(DEFAULT_EVAL_CAP)? == set, || format!("simplify of {}", show(&z)));
        rep.check(
            c.num_generators() <= z.num_generators() && c.num_factors() <= z.num_factors(),
            || format!("compact grew {}", show(&z)),
        );
        rep.check(
            s.num_generators() <= z.num_generators() && s.num_factors() <= z.num_factors(),
            || format!("simplify grew {}", show(&z)),
        );
        for mask in 0u64..1 << z.num_factors() {
            let value = |id: FactorId| {
                let k = z.ids().iter().position(|&x| x == id);
                k.is_some_and(|k| mask >> k & 1 == 1)
            };
            rep.check(c.eval_with(value) == z.eval_with(value), || {
                format!("compact changed {} at mask {mask:b}", show(&z))
            });
        }
    }
    Ok(rep)
}

fn random_expr(rng: &mut impl Rng, leaves: &[String], depth: usize) -> String {
    if depth == 0 || rng.gen_bool(0.3) {
        let leaf = leaves.choose(rng).expect("at least one leaf").clone();
        return if rng.gen_bool(0.25) { format!("!{leaf}") } else { leaf };
    }
    let l = random_expr(rng, leaves, depth - 1);
    let r = random_expr(rng, leaves, depth - 1);
    match rng.gen_range(0..6) {
        0 => format!("({l} ^ {r})"),
        1 => format!("({l} & {r})"),
        2 => format!("({l} | {r})"),
        3 => format!("XNOR({l}, {r})"),
        4 => format!("NAND({l}, {r})"),
        _ => format!("NOR({l}, {r})"),
    }
}

fn random_bit_set(rng: &mut impl Rng) -> Vec<BinaryVector> {
    match rng.gen_range(0..3) {
        0 => vec![BinaryVector::zeros(1)],
        1 => vec![BinaryVector::ones(1)],
        _ => vec![BinaryVector::zeros(1), BinaryVector::ones(1)],
    }
}

/// A model with one-bit variables: 1 to 4 states, up to 2 inputs re-drawn per
/// step, and occasional references to states already updated this step.
pub fn random_model(rng: &mut impl Rng, horizon: usize) -> Model {
    let states = rng.gen_range(1..=4);
    let inputs = rng.gen_range(0..=2);
    let mut vars = Vec::new();
    for i in 0..states {
        vars.push(VarDoc {
            name: format!("x{i}"),
            role: Role::State,
            dim: None,
            init: Some(random_bit_set(rng)),
            inputs: None,
        });
    }
    for i in 0..inputs {
        vars.push(VarDoc {
            name: format!("u{i}"),
            role: Role::Input,
            dim: None,
            init: None,
            inputs: Some(InputSchedule::PerStep(
                (0..horizon).map(|_| random_bit_set(rng)).collect(),
            )),
        });
    }
    let mut updates = BTreeMap::new();
    for i in 0..states {
        let mut leaves: Vec<String> = (0..states).map(|j| format!("x{j}")).collect();
        leaves.extend((0..inputs).map(|j| format!("u{j}")));
        if i > 0 && rng.gen_bool(0.4) {
            leaves.push(format!("x{}'", rng.gen_range(0..i)));
        }
        updates.insert(format!("x{i}"), random_expr(rng, &leaves, 3));
    }
    Model::from_document(ModelDoc {
        name: None,
        vars,
        updates,
        order: Some((0..states).map(|i| format!("x{i}")).collect()),
    })
    .expect("generated model is well formed")
}

/// Reachable joint sets of random models: poly exact must equal the
/// enumeration at every step, logical and poly Minkowski must contain it.
pub fn check_reachability(seed: u64, models: usize, horizon: usize) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = CheckReport::new("reachable sets vs enumeration");
    for _ in 0..models {
        rep.cases += 1;
        let model = random_model(&mut rng, horizon);
        let oracle: Vec<ExplicitSet> = reach_explicit(&model, horizon)?;
        let runs = [
            (Algebra::Poly, Mode::Exact, true),
            (Algebra::Poly, Mode::Minkowski, false),
            (Algebra::Logical, Mode::Minkowski, false),
        ];
        for (algebra, mode, exact) in runs {
            let mut r = Reacher::new(&model, algebra, mode, ReachOptions::default())?;
            for (k, want) in oracle.iter().enumerate() {
                if k > 0 {
                    r.advance()?;
                }
                let got = r.state().joint_points(DEFAULT_EVAL_CAP)?;
                let ok = if exact { got == *want } else { want.is_subset(&got) };
                rep.check(ok, || {
                    format!("{algebra} {mode} at step {k} on {}", model.to_json())
                });
            }
        }
    }
    Ok(rep)
}

/// Runs every check with the given case counts scaled by `scale` (1.0 is the
/// full suite).
pub fn run_all(seed: u64, scale: f64) -> Result<Vec<CheckReport>> {
    let n = |full: usize| ((full as f64 * scale).ceil() as usize).max(1);
    Ok(vec![
        check_minkowski(seed, n(500))?,
        check_exact(seed.wrapping_add(1), n(500))?,
        check_reachability(seed.wrapping_add(2), n(100), 4)?,
        check_simplification(seed.wrapping_add(3), n(200))?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        for rep in run_all(11, 0.05).unwrap() {
            assert!(rep.passed(), "{rep}");
        }
    }

    #[test]
    fn random_models_are_deterministic() {
        let a = random_model(&mut ChaCha8Rng::seed_from_u64(4), 3);
        let b = random_model(&mut ChaCha8Rng::seed_from_u64(4), 3);
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn report_records_first_mismatch() {
        let mut r = CheckReport::new("t");
        r.check(true, || unreachable!());
        r.check(false, || "x".into());
        r.check(false, || "y".into());
        assert!(!r.passed());
        assert_eq!(r.first_mismatch.as_deref(), Some("x"));
        assert!(r.to_string().starts_with("FAIL t"));
    }
}
