mod common;

use common::props;

fn check(r: Result<(), String>) {
    if let Err(e) = r {
        panic!("{e}");
    }
}

#[test]
fn chain_identity() {
    check(props::chain_identity());
}

#[test]
fn chain_function_reconstruction() {
    check(props::psi_reconstruction());
}

#[test]
fn dual_number_matches_finite_difference() {
    check(props::dual_vs_fd());
}

#[test]
fn rk4_is_fourth_order() {
    check(props::rk4_order());
}

#[test]
fn nullspace_vectors_are_annihilated() {
    check(props::nullspace_membership());
}

#[test]
fn render_parse_round_trip() {
    check(props::render_parse_roundtrip());
}

#[test]
fn non_integrals_have_large_residuals() {
    check(props::negative_controls());
}
