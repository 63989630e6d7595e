//! Deterministic random generators for the property suites: monomials,
//! vector-field letters, cyclic words and boundary-probing chains of the dg
//! Witt algebra in dimension two.
//!
//! Every generator takes an explicit `ChaCha8Rng`, so a suite seeded with a
//! fixed value draws the same samples on every platform and run.

use rand::{Rng, SeedableRng};
pub use rand_chacha::ChaCha8Rng;

use crate::cechain::{total_boundary, WittChain};
use crate::cyclic::CyclicChain;
use crate::exactalg::qi;
use crate::jouanolou::{JElement, JMonomial, ODD_P};
use crate::wittlie::{VFLetter, VectorField};

/// The generator used by every suite, seeded deterministically.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A normal monomial of `𝒥₂` with small exponents, carrying `P` with
/// probability `p_prob`; the unit is excluded when `allow_one` is false.
pub fn monomial(rng: &mut ChaCha8Rng, p_prob: f64, allow_one: bool) -> JMonomial {
    loop {
        let z = [rng.gen_range(0..3), rng.gen_range(0..3)];
        let x = [rng.gen_range(0..2), rng.gen_range(0..2)];
        let m = JMonomial::new(z, x, if rng.gen_bool(p_prob) { ODD_P } else { 0 });
        if m.is_normal(2) && (allow_one || m != JMonomial::ONE) {
            return m;
        }
    }
}

/// A basis letter `m ∂ᵢ` of the dg Witt algebra, odd iff `with_p`.
pub fn letter(rng: &mut ChaCha8Rng, with_p: bool) -> VFLetter {
    loop {
        let z = [rng.gen_range(0..4), rng.gen_range(0..4)];
        let x = [rng.gen_range(0..3), rng.gen_range(0..3)];
        let m = JMonomial::new(z, x, if with_p { ODD_P } else { 0 });
        if m.is_normal(2) {
            return VFLetter { mono: m, axis: rng.gen_range(0..2) };
        }
    }
}

/// A letter of random parity (odd with probability `p_prob`).
pub fn any_letter(rng: &mut ChaCha8Rng, p_prob: f64) -> VFLetter {
    let p = rng.gen_bool(p_prob);
    letter(rng, p)
}

/// A homogeneous vector field with up to three letters of one parity.
pub fn field(rng: &mut ChaCha8Rng, with_p: bool) -> VectorField {
    let mut v = VectorField::zero(2);
    for _ in 0..rng.gen_range(1..=3) {
        let l = letter(rng, with_p);
        let c = qi(rng.gen_range(-2..=2));
        v = v.add(&VectorField::from_letter(2, &l).scale(&c));
    }
    v
}

/// A random element of `𝒥₂` with up to three terms.
pub fn element(rng: &mut ChaCha8Rng, p_prob: f64) -> JElement {
    let mut e = JElement::zero(2);
    for _ in 0..rng.gen_range(1..=3) {
        let m = monomial(rng, p_prob, true);
        e = e.add(&JElement::monomial(2, m, qi(rng.gen_range(1..=3))));
    }
    e
}

/// A single cyclic word with `n` slots and a small integer coefficient.
pub fn cyclic_word(rng: &mut ChaCha8Rng, n: usize, p_prob: f64) -> CyclicChain {
    let w: Vec<JMonomial> = (0..n).map(|_| monomial(rng, p_prob, false)).collect();
    CyclicChain::word(2, &w, qi(rng.gen_range(1..4)))
}

/// Total bi-weight of a list of monomials.
pub fn weight_sum(ms: &[JMonomial]) -> [i64; 2] {
    ms.iter().fold([0, 0], |acc, m| {
        let w = m.weight(2);
        [acc[0] + w[0], acc[1] + w[1]]
    })
}

/// Nonzero total boundaries `∂c` of single words `c` in total degree `−1`
/// whose boundary can meet the support of a degree-zero cochain on three
/// fields: four-letter words with one odd letter in bi-weight `(0,0)`, and
/// three-letter even words in bi-weight `(1,1)`, alternately.
pub fn boundary_probes(rng: &mut ChaCha8Rng, count: usize) -> Vec<WittChain> {
    let mut out = Vec::with_capacity(count);
    let mut kind = 0;
    while out.len() < count {
        let (w, target): (Vec<VFLetter>, [i64; 2]) = if kind == 0 {
            ((0..4).map(|i| letter(rng, i == 0)).collect(), [0, 0])
        } else {
            ((0..3).map(|_| letter(rng, false)).collect(), [1, 1])
        };
        let tw = w.iter().fold([0, 0], |acc, l| {
            let lw = l.weight(2);
            [acc[0] + lw[0], acc[1] + lw[1]]
        });
        if tw != target {
            continue;
        }
        let b = total_boundary(&WittChain::word(&w, qi(1)));
        if b.is_zero() {
            continue;
        }
        out.push(b);
        kind = 1 - kind;
    }
    out
}
