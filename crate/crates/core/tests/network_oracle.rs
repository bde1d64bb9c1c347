//! Small constant-parameter networks: the MILP annual cost against the best
//! of all existence patterns, each solved as an LP by the dense reference
//! simplex.

mod common;

#[test]
fn milp_cost_equals_best_enumerated_pattern() {
    let worst = common::oracles::network_mismatch(4, 5).unwrap();
    assert!(worst <= 1e-6);
}
