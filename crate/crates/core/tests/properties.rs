mod common;

use common::*;

#[test]
fn hellmann_feynman_dipoles() {
    run(hf_strategy(), hellmann_feynman).unwrap();
}

#[test]
fn modefunctions_orthonormal() {
    run(orthonormal_strategy(), orthonormal).unwrap();
}

#[test]
fn hopping_sum_rule() {
    run(sum_rule_strategy(), sum_rule).unwrap();
}

#[test]
fn coupling_vanishes_at_zone_center() {
    run(coupling_strategy(), coupling_vanishes).unwrap();
}

#[test]
fn sign_flip_invariance() {
    run(sign_flip_strategy(), sign_flip).unwrap();
}
