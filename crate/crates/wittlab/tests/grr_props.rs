//! Circle integrals, kernels and the Todd class against independent oracles.

use num_traits::{One, Zero};
use wittlab::exactalg::{factorial, q, qi, Rational};
use wittlab::grr::{
    ch_from_roots, cycle_integral, cycle_integral_closed_form, cycle_integral_kernel, restr_generator,
    todd_d2_chern_root_form, todd_from_roots, todd_truncation, PeriodicKernel, KERNEL_CONVOLUTION_FACTOR,
};
use wittlab::sample;
use rand::Rng;

/// Bernoulli numbers (B₁ = +½ convention irrelevant here) by the
/// Akiyama–Tanigawa algorithm, independent of the library's recurrence.
fn bernoulli_oracle(n: usize) -> Rational {
    let mut a: Vec<Rational> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        a.push(Rational::one() / qi(m as i64 + 1));
        for j in (1..=m).rev() {
            a[j - 1] = qi(j as i64) * (&a[j - 1] - &a[j]);
        }
    }
    a[0].clone()
}

#[test]
fn even_cycle_integrals_match_bernoulli_oracle() {
    for r in 1..=6usize {
        let n = 2 * r;
        let expected = -bernoulli_oracle(n) / Rational::from_integer(factorial(n as u64));
        assert_eq!(cycle_integral(n).unwrap(), expected, "n = {n}");
        assert_eq!(cycle_integral_kernel(n).unwrap(), expected, "n = {n}");
        assert_eq!(cycle_integral_closed_form(n).unwrap(), expected, "n = {n}");
    }
    assert_eq!(cycle_integral(2).unwrap(), q(-1, 12));
    assert_eq!(cycle_integral(4).unwrap(), q(1, 720));
}

#[test]
fn odd_cycle_integrals_vanish() {
    for n in [3usize, 5, 7, 9, 11] {
        assert!(cycle_integral(n).unwrap().is_zero());
        assert!(cycle_integral_kernel(n).unwrap().is_zero());
    }
}

#[test]
fn cycle_integrals_reject_short_cycles() {
    assert!(cycle_integral(0).is_err());
    assert!(cycle_integral(1).is_err());
}

#[test]
fn bernoulli_kernels_convolve_to_bernoulli_kernels() {
    for m in 1..6u32 {
        for k in 1..6u32 {
            let lhs = PeriodicKernel::bernoulli_kernel(m).convolve(&PeriodicKernel::bernoulli_kernel(k));
            let rhs = PeriodicKernel::bernoulli_kernel(m + k).scale(&qi(KERNEL_CONVOLUTION_FACTOR));
            assert_eq!(lhs, rhs, "m = {m}, k = {k}");
        }
    }
}

#[test]
fn todd_degree_three_is_c1c2_over_24_on_random_roots() {
    let td = todd_truncation(2).unwrap();
    assert_eq!(td, todd_d2_chern_root_form());
    assert_eq!(td.coeff(&[3, 0, 0]), q(1, 48));
    assert_eq!(td.coeff(&[1, 1, 0]), q(-1, 24));
    let mut rng = sample::rng(7);
    for _ in 0..30 {
        let (x, y) = (q(rng.gen_range(-9..=9), rng.gen_range(1..=4)), q(rng.gen_range(-9..=9), rng.gen_range(1..=4)));
        let roots = [x.clone(), y.clone()];
        // ch_k = (x^k + y^k)/k!, computed here directly.
        let ch: Vec<Rational> =
            (1..=3u32).map(|k| (num_traits::pow(x.clone(), k as usize) + num_traits::pow(y.clone(), k as usize))
                / Rational::from_integer(factorial(u64::from(k)))).collect();
        for (k, c) in ch.iter().enumerate() {
            assert_eq!(&ch_from_roots(&roots, k + 1), c);
        }
        let c1c2 = (&x + &y) * &x * &y / qi(24);
        assert_eq!(td.eval(&ch), c1c2);
        assert_eq!(todd_from_roots(&roots, 3), c1c2);
    }
}

#[test]
fn generator_trace_is_normalized() {
    assert_eq!(restr_generator(), Rational::one());
}
