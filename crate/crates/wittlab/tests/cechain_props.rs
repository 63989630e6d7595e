//! Chevalley–Eilenberg chains: nilpotency, closed chains and homology.

use rand::Rng;
use wittlab::cechain::{
    homology_dim_scaling, lemma_identities, omega12_dual_homology, sym_p_vanishing, total_boundary, x_chain,
    x_tilde_chain, VanishingOutcome, WittChain,
};
use wittlab::exactalg::qi;
use wittlab::sample;
use wittlab::wittlie::{Algebra, VFLetter};

#[test]
fn total_differential_squares_to_zero() {
    let mut rng = sample::rng(11);
    for _ in 0..150 {
        let len = rng.gen_range(1..=4);
        let w: Vec<VFLetter> = (0..len).map(|_| sample::any_letter(&mut rng, 0.4)).collect();
        let c = WittChain::word(&w, qi(1));
        assert!(total_boundary(&total_boundary(&c)).is_zero(), "{w:?}");
    }
}

#[test]
fn displayed_chains_are_closed() {
    assert!(!x_chain().is_zero());
    assert!(total_boundary(&x_chain()).is_zero());
    assert!(total_boundary(&x_tilde_chain()).is_zero());
}

#[test]
fn bracket_lemma_identities_hold() {
    let ids = lemma_identities();
    assert_eq!(ids.len(), 10);
    for (id, ok) in ids {
        assert!(ok, "{id}");
    }
}

#[test]
fn l1_homology_dimensions() {
    assert_eq!(homology_dim_scaling(Algebra::L(1), 1, 1), 6);
    assert_eq!(homology_dim_scaling(Algebra::L(1), 2, 2), 7);
    assert_eq!(homology_dim_scaling(Algebra::L(1), 3, 2), 18);
    assert_eq!(homology_dim_scaling(Algebra::L(1), 4, 2), 0);
}

#[test]
fn gelfand_fuks_low_degrees_at_weight_zero() {
    assert_eq!(homology_dim_scaling(Algebra::W2, 0, 0), 1);
    for j in 1..=3 {
        assert_eq!(homology_dim_scaling(Algebra::W2, 0, j), 0, "j = {j}");
    }
}

#[test]
fn forms_coefficient_homology_is_two_dimensional() {
    assert_eq!(omega12_dual_homology(2), 2);
}

#[test]
fn symmetric_square_sweep_is_not_vacuous() {
    match sym_p_vanishing(2, 7, 8) {
        VanishingOutcome::Pass { cycles } => assert!(cycles > 0),
        other => panic!("unexpected outcome {other:?}"),
    }
}
