//! Cyclic complex operators, the residue cocycle and the Chern cocycles.

use num_traits::Zero;
use rand::Rng;
use wittlab::cechain::{family_chain, x_chain, x_tilde_chain, WittChain};
use wittlab::cyclic::{
    atiyah_cocycle_defect, chern_cocycle, index_form_pair, index_form_word, rho, rho_invariance_check, IndexForm,
};
use wittlab::exactalg::{qi, Rational};
use wittlab::report::{calibrated_chern_pair, virasoro_oracle, virasoro_pair};
use wittlab::sample;
use wittlab::wittlie::{VFLetter, VectorField};

#[test]
fn hochschild_and_connes_operators_square_to_zero() {
    let mut rng = sample::rng(31);
    for _ in 0..80 {
        let n = rng.gen_range(1..=4);
        let c = sample::cyclic_word(&mut rng, n, 0.3);
        assert!(c.b().b().is_zero());
        assert!(c.connes_b().connes_b().is_zero());
        assert!(c.b().connes_b().add(&c.connes_b().b()).is_zero());
        assert!(c.b().dbar().add(&c.dbar().b()).is_zero());
    }
}

#[test]
fn residue_cocycle_is_cyclic_and_invariant() {
    let mut rng = sample::rng(32);
    for _ in 0..80 {
        let c = sample::cyclic_word(&mut rng, 3, 0.3);
        assert!(rho(&c.sub(&c.t())).is_zero());
        let p = rng.gen_bool(0.5);
        let t = VectorField::from_letter(2, &sample::letter(&mut rng, p));
        assert!(rho_invariance_check(&t, &c).is_zero());
    }
}

#[test]
fn atiyah_cochain_satisfies_total_cocycle_identity() {
    let mut rng = sample::rng(33);
    for _ in 0..60 {
        let n = rng.gen_range(1..=4);
        let w: Vec<VFLetter> = (0..n).map(|_| sample::any_letter(&mut rng, 0.4)).collect();
        assert!(atiyah_cocycle_defect(2, &WittChain::word(&w, qi(1))).is_zero(), "{w:?}");
    }
}

#[test]
fn raw_cocycles_are_multiples_of_index_forms() {
    let c13 = chern_cocycle(2, &[3]).unwrap();
    let c12 = chern_cocycle(2, &[1, 1]).unwrap();
    for i in 0..4 {
        let f = family_chain(i);
        assert_eq!(c13.pair(&f), qi(12) * index_form_pair(IndexForm::Ch1Cubed, &f));
        assert_eq!(c12.pair(&f), qi(-3) * index_form_pair(IndexForm::Ch1Ch2, &f));
    }
    let mut rng = sample::rng(34);
    let mut n = 0;
    while n < 40 {
        let w: Vec<VFLetter> = (0..3).map(|i| sample::letter(&mut rng, i == 0)).collect();
        if w.iter().fold([0, 0], |a, l| [a[0] + l.weight(2)[0], a[1] + l.weight(2)[1]]) != [0, 0] {
            continue;
        }
        n += 1;
        assert_eq!(c13.eval_word(&w), qi(12) * index_form_word(IndexForm::Ch1Cubed, &w));
    }
}

#[test]
fn calibrated_pairings_on_x_and_x_tilde() {
    let (c13, c12) = calibrated_chern_pair();
    assert_eq!(c13.pair(&x_chain()), qi(-12));
    assert_eq!(c12.pair(&x_chain()), qi(12));
    assert_eq!(c13.pair(&x_tilde_chain()), qi(-4));
    assert_eq!(c12.pair(&x_tilde_chain()), qi(12));
    let det = c13.pair(&x_chain()) * c12.pair(&x_tilde_chain()) - c12.pair(&x_chain()) * c13.pair(&x_tilde_chain());
    assert_eq!(det, qi(-96));
}

#[test]
fn chern_cocycles_vanish_on_boundaries() {
    let (c13, c12) = calibrated_chern_pair();
    let mut rng = sample::rng(35);
    for b in sample::boundary_probes(&mut rng, 30) {
        assert!(c13.pair(&b).is_zero());
        assert!(c12.pair(&b).is_zero());
    }
}

#[test]
fn dimension_one_cocycle_is_m_cubed_minus_m() {
    assert_eq!(virasoro_oracle(2), qi(6));
    let d1 = chern_cocycle(1, &[2]).unwrap();
    let raw = |m: u32| d1.eval_raw(&virasoro_pair(m)).unwrap();
    let scale: Rational = virasoro_oracle(2) / raw(2);
    for m in 1..=5i64 {
        assert_eq!(&scale * raw(m as u32), qi(m * m * m - m), "m = {m}");
    }
    assert!(raw(1).is_zero());
}
