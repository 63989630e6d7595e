//! The Jouanolou algebra, exact linear algebra and the dg Witt bracket on
//! random inputs.

use num_traits::Zero;
use rand::Rng;
use wittlab::exactalg::{fmt_q, kernel_basis, parse_q, q, qi, rank, SparseMat};
use wittlab::jouanolou::JElement;
use wittlab::sample;
use wittlab::wittlie::VectorField;

#[test]
fn jouanolou_product_is_associative_and_graded_commutative() {
    let mut rng = sample::rng(41);
    for _ in 0..100 {
        let (a, b, c) = (sample::element(&mut rng, 0.3), sample::element(&mut rng, 0.3), sample::element(&mut rng, 0.3));
        assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        // P is the only odd generator and squares to zero, so odd·odd = 0.
        let (a0, a1) = (a.parity_component(0), a.parity_component(1));
        assert_eq!(a0.mul(&b), b.mul(&a0));
        assert!(a1.mul(&b.parity_component(1)).is_zero());
    }
}

#[test]
fn dbar_is_a_square_zero_derivation() {
    let mut rng = sample::rng(42);
    for _ in 0..100 {
        let a = sample::element(&mut rng, 0.0);
        let b = sample::element(&mut rng, 0.3);
        assert!(a.dbar().dbar().is_zero());
        assert_eq!(a.mul(&b).dbar(), a.dbar().mul(&b).add(&a.mul(&b.dbar())));
    }
}

#[test]
fn defining_relation_holds() {
    let one = JElement::one(2);
    let rel = JElement::z(2, 0).mul(&JElement::x(2, 0)).add(&JElement::z(2, 1).mul(&JElement::x(2, 1)));
    assert_eq!(rel, one);
}

#[test]
fn residue_of_z1x1_volume_splits_evenly() {
    // Res(P dz1 dz2) = 1, and z1x1 + z2x2 = 1 with the swap symmetry forces
    // each summand to contribute one half.
    let vol = JElement::p(2).mul(&JElement::dz(2, 0)).mul(&JElement::dz(2, 1));
    let a = JElement::z(2, 0).mul(&JElement::x(2, 0)).mul(&vol).residue();
    let b = JElement::z(2, 1).mul(&JElement::x(2, 1)).mul(&vol).residue();
    assert_eq!(&a + &b, vol.residue());
    assert_eq!(a, b);
    assert_eq!(a, q(1, 2));
}

#[test]
fn rank_and_kernel_agree() {
    let mut rng = sample::rng(43);
    for _ in 0..50 {
        let (r, c) = (rng.gen_range(1..6), rng.gen_range(1..6));
        let rows: Vec<Vec<_>> = (0..r).map(|_| (0..c).map(|_| qi(rng.gen_range(-2..=2))).collect()).collect();
        let m = SparseMat::from_dense(&rows);
        let ker = kernel_basis(&m);
        assert_eq!(rank(&m) + ker.len(), c);
        for v in &ker {
            assert!(m.apply(v).iter().all(Zero::is_zero));
        }
    }
}

#[test]
fn rationals_round_trip_through_text() {
    for x in [q(-7, 12), qi(0), qi(-96), q(691, 1307674368000)] {
        assert_eq!(parse_q(&fmt_q(&x)), Some(x));
    }
}

#[test]
fn witt_bracket_is_graded_antisymmetric() {
    let mut rng = sample::rng(44);
    for _ in 0..100 {
        let (p, r) = (rng.gen_bool(0.4), rng.gen_bool(0.4));
        let (t, s): (VectorField, VectorField) = (sample::field(&mut rng, p), sample::field(&mut rng, r));
        let sign = if p && r { qi(1) } else { qi(-1) };
        assert_eq!(t.bracket(&s), s.bracket(&t).scale(&sign));
    }
}
