//! Differential operators and the Weyl symbol on random inputs.

use rand::Rng;
use wittlab::diffweyl::{diffops_identity_suite, symbol, unsymbol, vf_symbol, DiffOp};
use wittlab::sample::{self, ChaCha8Rng};

fn random_op(rng: &mut ChaCha8Rng) -> DiffOp {
    let mut d = DiffOp::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let n = [rng.gen_range(0..=2), rng.gen_range(0..=1)];
        d = d.add(&DiffOp::term(sample::element(rng, 0.3), n));
    }
    d
}

#[test]
fn composition_acts_as_composite_on_functions() {
    let mut rng = sample::rng(21);
    for _ in 0..60 {
        let (a, b) = (random_op(&mut rng), random_op(&mut rng));
        let g = sample::element(&mut rng, 0.3);
        assert_eq!(a.compose(&b).apply(&g), a.apply(&b.apply(&g)));
    }
}

#[test]
fn symbol_is_multiplicative_and_invertible() {
    let mut rng = sample::rng(22);
    for _ in 0..100 {
        let (a, b) = (random_op(&mut rng), random_op(&mut rng));
        assert_eq!(symbol(&a.compose(&b)), symbol(&a).moyal(&symbol(&b)));
        assert_eq!(unsymbol(&symbol(&a)), a);
    }
}

#[test]
fn vector_field_symbol_subtracts_half_divergence() {
    let mut rng = sample::rng(23);
    for _ in 0..100 {
        let p = rng.gen_bool(0.4);
        let t = sample::field(&mut rng, p);
        assert_eq!(symbol(&DiffOp::from_vf(&t)), vf_symbol(&t));
    }
}

#[test]
fn even_field_commutators_are_brackets() {
    let mut rng = sample::rng(24);
    for _ in 0..60 {
        let (t, s) = (sample::field(&mut rng, false), sample::field(&mut rng, false));
        assert_eq!(DiffOp::from_vf(&t).commutator(&DiffOp::from_vf(&s)), DiffOp::from_vf(&t.bracket(&s)));
    }
}

#[test]
fn displayed_operator_identities_hold() {
    for c in diffops_identity_suite(4) {
        assert!(c.pass, "{}: {}", c.id, c.detail);
    }
}
