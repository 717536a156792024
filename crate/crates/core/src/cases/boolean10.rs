use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::binvec::BinaryVector;
use crate::model::{InputSchedule, Model, ModelDoc, Role, VarDoc};

const DIM: usize = 10;

fn two_values(rng: &mut ChaCha8Rng) -> Vec<BinaryVector> {
    let a = rng.gen_range(0..1u64 << DIM);
    let mut b = rng.gen_range(0..1u64 << DIM);
    while b == a {
        b = rng.gen_range(0..1u64 << DIM);
    }
    vec![BinaryVector::from_u64(DIM, a), BinaryVector::from_u64(DIM, b)]
}

/// Three 10-bit states driven by three 10-bit inputs:
///
/// ```text
/// B1' = U1 | XNOR(B2, B1)
/// B2' = XNOR(B2, B1 & U2)
/// B3' = NAND(B3, XNOR(U2, U3))
/// ```
///
/// Each initial set and each per-step input set holds two distinct values
/// drawn from `seed`. Inputs are scheduled for `horizon` steps.
pub fn boolean10_model(seed: u64, horizon: usize) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vars = Vec::new();
    for i in 1..=3 {
        vars.push(VarDoc {
            name: format!("B{i}"),
            role: Role::State,
            dim: Some(DIM),
            init: Some(two_values(&mut rng)),
            inputs: None,
        });
    }
    let mut schedules: Vec<Vec<Vec<BinaryVector>>> = vec![Vec::new(); 3];
    for _ in 0..horizon.max(1) {
        for s in schedules.iter_mut() {
            s.push(two_values(&mut rng));
        }
    }
    for (i, s) in schedules.into_iter().enumerate() {
        vars.push(VarDoc {
            name: format!("U{}", i + 1),
            role: Role::Input,
            dim: Some(DIM),
            init: None,
            inputs: Some(InputSchedule::PerStep(s)),
        });
    }
    let updates = BTreeMap::from([
        ("B1".to_string(), "U1 | XNOR(B2, B1)".to_string()),
        ("B2".to_string(), "XNOR(B2, B1 & U2)".to_string()),
        ("B3".to_string(), "NAND(B3, XNOR(U2, U3))".to_string()),
    ]);
    Model::from_document(ModelDoc {
        name: Some(format!("boolean10-seed{seed}")),
        vars,
        updates,
        order: None,
    })
    .expect("generated model is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(boolean10_model(3, 4), boolean10_model(3, 4));
        assert_ne!(boolean10_model(3, 4), boolean10_model(4, 4));
    }

    #[test]
    fn bundled_fixture_matches_seed_one() {
        let fixture = Model::from_json(include_str!("../../fixtures/boolean10.json")).unwrap();
        assert_eq!(fixture, boolean10_model(1, 5));
    }

    #[test]
    fn shape() {
        let m = boolean10_model(0, 3);
        assert_eq!(m.state_bits(), 30);
        assert_eq!(m.input_indices().len(), 3);
        assert_eq!(m.input_points(m.input_indices()[0], 2).unwrap().len(), 2);
        assert!(m.input_points(m.input_indices()[0], 3).is_err());
    }
}

