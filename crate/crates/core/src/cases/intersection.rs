use crate::model::Model;

const DOCUMENT: &str = include_str!("../../fixtures/intersection.json");

/// Four vehicles approaching an intersection. `p_i` says vehicle `i` is
/// passing, `c_i` that it came first; `c_i` reads `p_i'`.
pub fn intersection_model() -> Model {
    Model::from_json(DOCUMENT).expect("bundled intersection model is valid")
}
