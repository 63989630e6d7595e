//! The one-loop residue trace and the local Grothendieck–Riemann–Roch
//! comparison.
//!
//! * Periodic Bernoulli kernels on the circle and their exact convolution
//!   calculus, giving the cycle integrals `∫ ℙ(θ₁−θ₂)⋯ℙ(θₙ−θ₁)`.
//! * The Todd class truncated to a fixed weight, written in Chern
//!   characters, with an independent Chern-root oracle.
//! * The residue trace on Moyal symbols, both from its definitional
//!   configuration-space integrand `∫ Mult(e^{Π+D}(O₀dθ₀ ⊗ O₁ ⊗ ⋯))|_{p=0}`
//!   and from its one-loop graph expansion on symbols of first order.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::cechain::WittChain;
use crate::cyclic::{hol_d_left, koszul_odd, permutations};
use crate::exactalg::{bernoulli, factorial, fmt_q, q, qi, Rational};
use crate::jouanolou::JElement;
use crate::wittlie::{VFLetter, VectorField};

/// Errors from the residue-trace and Todd-class routines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrrError {
    #[error("cycle length {0} is below 2")]
    CycleTooShort(usize),
    #[error("Todd truncation is implemented for d = 1, 2 only (got {0})")]
    UnsupportedDimension(usize),
    #[error("expected {expected} operators, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("operators of mixed dimension")]
    Dimension,
    #[error("the graph expansion needs symbols of degree at most one in p")]
    NotFirstOrder,
    #[error("inhomogeneous operator")]
    Inhomogeneous,
}

fn fact(n: u32) -> Rational {
    Rational::from_integer(factorial(u64::from(n)))
}

// ---------------------------------------------------------------------------
// Periodic kernels.

/// A function on the circle `ℝ/ℤ` given on `[0, 1)` by a polynomial in `u`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PeriodicKernel {
    coeffs: Vec<Rational>,
}

/// The factor `c` in `K_m * K_n = c · K_{m+n}` for the normalised Bernoulli
/// kernels `K_m(u) = B_m(u)/m!` (`m, n ≥ 1`).  Derived from the direct
/// piecewise integration in [`PeriodicKernel::convolve`] and frozen here;
/// the test suite re-derives it for `m + n ≤ 8`.
pub const KERNEL_CONVOLUTION_FACTOR: i64 = -1;

impl PeriodicKernel {
    /// The kernel with the given coefficients of `1, u, u², …`.
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        PeriodicKernel { coeffs }
    }

    /// The propagator `ℙ(u) = u − ½`.
    pub fn propagator() -> Self {
        Self::new(vec![q(-1, 2), qi(1)])
    }

    /// The normalised Bernoulli kernel `B_m(u)/m!`.
    pub fn bernoulli_kernel(m: u32) -> Self {
        // B_m(u) = Σ_k C(m, k) B_k u^{m−k} with B₁ = −½.
        let mut c = vec![Rational::zero(); m as usize + 1];
        for k in 0..=m {
            let binom = fact(m) / (fact(k) * fact(m - k));
            c[(m - k) as usize] = binom * bernoulli(k as usize) / fact(m);
        }
        Self::new(c)
    }

    /// Polynomial coefficients.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Value at `u ∈ [0, 1)`.
    pub fn eval(&self, u: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * u + c)
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// `(f * g)(x) = ∫₀¹ f({x − y}) g(y) dy`, computed exactly by splitting
    /// the integral at `y = x`.
    pub fn convolve(&self, g: &PeriodicKernel) -> PeriodicKernel {
        // Bivariate polynomials in (x, y) as maps (i, j) ↦ coefficient.
        type Bi = BTreeMap<(u32, u32), Rational>;
        let shifted = |shift: i64| -> Bi {
            // f(x − y + shift) · g(y)
            let mut fxy: Bi = BTreeMap::new();
            for (k, a) in self.coeffs.iter().enumerate() {
                // (x − y + s)^k = Σ multinomial x^i (−y)^j s^{k−i−j}
                let k = k as u32;
                for i in 0..=k {
                    for j in 0..=k - i {
                        let m = fact(k) / (fact(i) * fact(j) * fact(k - i - j));
                        let sgn = if j % 2 == 1 { qi(-1) } else { qi(1) };
                        let s = num_traits::pow::pow(qi(shift), (k - i - j) as usize);
                        *fxy.entry((i, j)).or_insert_with(Rational::zero) += a * m * sgn * s;
                    }
                }
            }
            let mut out: Bi = BTreeMap::new();
            for ((i, j), c) in &fxy {
                for (l, b) in g.coeffs.iter().enumerate() {
                    *out.entry((*i, j + l as u32)).or_insert_with(Rational::zero) += c * b;
                }
            }
            out
        };
        let mut h = vec![Rational::zero(); self.coeffs.len() + g.coeffs.len() + 1];
        // ∫₀ˣ f(x − y) g(y) dy: antiderivative in y evaluated at y = x.
        for ((i, j), c) in shifted(0) {
            h[(i + j + 1) as usize] += c / qi(i64::from(j) + 1);
        }
        // ∫ₓ¹ f(x − y + 1) g(y) dy = F(1) − F(x).
        for ((i, j), c) in shifted(1) {
            let a = c / qi(i64::from(j) + 1);
            h[i as usize] += &a;
            h[(i + j + 1) as usize] -= a;
        }
        Self::new(h)
    }
}

impl fmt::Display for PeriodicKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => fmt_q(c),
                1 => format!("{} u", fmt_q(c)),
                _ => format!("{} u^{k}", fmt_q(c)),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `∫_{(S¹)ⁿ} ℙ(θ₁−θ₂)ℙ(θ₂−θ₃)⋯ℙ(θₙ−θ₁)`, by iterated direct convolution of
/// the propagator and evaluation at `0`.
pub fn cycle_integral(n: usize) -> Result<Rational, GrrError> {
    if n < 2 {
        return Err(GrrError::CycleTooShort(n));
    }
    let p = PeriodicKernel::propagator();
    let mut k = p.clone();
    for _ in 1..n {
        k = k.convolve(&p);
    }
    Ok(k.eval(&Rational::zero()))
}

/// The same integral from the kernel algebra: `ℙ = K₁` and
/// `K₁^{*n} = c^{n−1} Kₙ` with the frozen factor `c`, so the value is
/// `c^{n−1} Bₙ/n!`.
pub fn cycle_integral_kernel(n: usize) -> Result<Rational, GrrError> {
    if n < 2 {
        return Err(GrrError::CycleTooShort(n));
    }
    let c = num_traits::pow::pow(qi(KERNEL_CONVOLUTION_FACTOR), n - 1);
    Ok(c * PeriodicKernel::bernoulli_kernel(n as u32).eval(&Rational::zero()))
}

/// The closed form `−Bₙ/n!` for even `n` and `0` for odd `n`.
pub fn cycle_integral_closed_form(n: usize) -> Result<Rational, GrrError> {
    if n < 2 {
        return Err(GrrError::CycleTooShort(n));
    }
    if n % 2 == 1 {
        return Ok(Rational::zero());
    }
    Ok(-bernoulli(n) / fact(n as u32))
}

// ---------------------------------------------------------------------------
// Characteristic polynomials.

/// A polynomial in `ch₁, …, ch_n` with `deg chᵢ = 2i`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CharPolynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl CharPolynomial {
    /// The zero polynomial in `n` variables.
    pub fn zero(nvars: usize) -> Self {
        CharPolynomial { nvars, terms: BTreeMap::new() }
    }

    /// A constant.
    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// `c · ch₁^{e₁} ⋯ ch_n^{e_n}`.
    pub fn monomial(exps: &[u32], c: Rational) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps.to_vec(), c);
        p
    }

    /// The variable `ch_i` (1-based).
    pub fn ch(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i - 1] = 1;
        Self::monomial(&e, Rational::one())
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    /// Number of variables.
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Terms keyed by exponent vectors.
    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Rational> {
        &self.terms
    }

    /// Coefficient of a monomial.
    pub fn coeff(&self, e: &[u32]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    /// Sum.
    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &Rational) -> Self {
        let mut r = Self::zero(self.nvars);
        for (e, x) in &self.terms {
            r.add_term(e.clone(), x * c);
        }
        r
    }

    /// Product.
    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero(self.nvars);
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                r.add_term(a.iter().zip(b).map(|(i, j)| i + j).collect(), x * y);
            }
        }
        r
    }

    /// Weight `Σ i·eᵢ` of a monomial (half the real degree).
    pub fn weight(e: &[u32]) -> u32 {
        e.iter().enumerate().map(|(i, &k)| (i as u32 + 1) * k).sum()
    }

    /// Component of a fixed weight.
    pub fn weight_component(&self, w: u32) -> Self {
        let mut r = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if Self::weight(e) == w {
                r.add_term(e.clone(), c.clone());
            }
        }
        r
    }

    /// Truncated exponential `Σ_{k ≤ w} Xᵏ/k!` keeping weights `≤ w`; the
    /// argument must have no constant term.
    fn exp_truncated(&self, w: u32) -> Self {
        let mut r = Self::constant(self.nvars, Rational::one());
        let mut pw = Self::constant(self.nvars, Rational::one());
        for k in 1..=w {
            pw = pw.mul(self).truncate(w);
            r = r.add(&pw.scale(&(Rational::one() / fact(k))));
        }
        r
    }

    fn truncate(&self, w: u32) -> Self {
        let mut r = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if Self::weight(e) <= w {
                r.add_term(e.clone(), c.clone());
            }
        }
        r
    }

    /// Substitute polynomials for the variables.
    pub fn substitute(&self, vals: &[CharPolynomial]) -> CharPolynomial {
        let n = vals.first().map_or(0, |v| v.nvars);
        let mut r = Self::zero(n);
        for (e, c) in &self.terms {
            let mut t = Self::constant(n, c.clone());
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t = t.mul(&vals[i]);
                }
            }
            r = r.add(&t);
        }
        r
    }

    /// Numerical value at given `ch` values.
    pub fn eval(&self, vals: &[Rational]) -> Rational {
        let mut r = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                t *= num_traits::pow::pow(vals[i].clone(), k as usize);
            }
            r += t;
        }
        r
    }
}

impl fmt::Display for CharPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| {
                let vars: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| if k == 1 { format!("ch{}", i + 1) } else { format!("ch{}^{k}", i + 1) })
                    .collect();
                if vars.is_empty() {
                    fmt_q(c)
                } else {
                    format!("{} {}", fmt_q(c), vars.join(" "))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Elementary symmetric polynomials `e₁, …, e_n` of the Chern roots written
/// in power sums `p_k = k!·ch_k` (Newton's identities), as polynomials in
/// `ch₁, …, ch_nvars`.
fn elementary_in_ch(n: usize, nvars: usize) -> Vec<CharPolynomial> {
    let p = |k: usize| CharPolynomial::ch(nvars, k).scale(&fact(k as u32));
    let mut e = vec![CharPolynomial::constant(nvars, Rational::one())];
    for k in 1..=n {
        let mut s = CharPolynomial::zero(nvars);
        for i in 1..=k {
            let sign = if i % 2 == 1 { qi(1) } else { qi(-1) };
            s = s.add(&e[k - i].mul(&p(i)).scale(&sign));
        }
        e.push(s.scale(&(Rational::one() / qi(k as i64))));
    }
    e
}

/// The weight-`(d+1)` component of the Todd class of a rank-`d` bundle, in
/// the variables `ch₁, …, ch_{d+1}`.
///
/// Computed from `log Td = ch₁/2 − Σ_{m≥1} (B_{2m}/2m) ch_{2m}` (each Chern
/// root contributes `x/2 − Σ B_{2m} x^{2m}/(2m·(2m)!)`), then reduced with
/// the rank-`d` relation expressing `ch_{d+1}` through lower characters.
pub fn todd_truncation(d: usize) -> Result<CharPolynomial, GrrError> {
    if !(1..=2).contains(&d) {
        return Err(GrrError::UnsupportedDimension(d));
    }
    let n = d + 1;
    let w = n as u32;
    let mut log = CharPolynomial::ch(n, 1).scale(&q(1, 2));
    for m in 1..=n / 2 {
        let c = -bernoulli(2 * m) / qi(2 * m as i64);
        log = log.add(&CharPolynomial::ch(n, 2 * m).scale(&c));
    }
    let td = log.exp_truncated(w).weight_component(w);
    Ok(reduce_rank(&td, d))
}

/// Eliminate `ch_{d+1}` using `e_{d+1} = 0` (rank `d`).
fn reduce_rank(p: &CharPolynomial, d: usize) -> CharPolynomial {
    let n = p.nvars();
    if n <= d {
        return p.clone();
    }
    // p_{d+1} = Σ_{i=1}^{d} (−1)^{i−1} e_i p_{d+1−i} when e_{d+1} = 0.
    let e = elementary_in_ch(d, n);
    let mut pd1 = CharPolynomial::zero(n);
    for i in 1..=d {
        let sign = if i % 2 == 1 { qi(1) } else { qi(-1) };
        let pk = CharPolynomial::ch(n, d + 1 - i).scale(&fact((d + 1 - i) as u32));
        pd1 = pd1.add(&e[i].mul(&pk).scale(&sign));
    }
    let chd1 = pd1.scale(&(Rational::one() / fact(d as u32 + 1)));
    let vals: Vec<CharPolynomial> =
        (1..=n).map(|k| if k == d + 1 { chd1.clone() } else { CharPolynomial::ch(n, k) }).collect();
    p.substitute(&vals)
}

/// `ch_k = Σᵢ xᵢᵏ/k!` for given Chern roots.
pub fn ch_from_roots(roots: &[Rational], k: usize) -> Rational {
    roots.iter().map(|x| num_traits::pow::pow(x.clone(), k)).sum::<Rational>() / fact(k as u32)
}

/// Oracle: the degree-`w` part of `∏ᵢ xᵢ/(1 − e^{−xᵢ})` evaluated at the
/// given roots, from the series `x/(1 − e^{−x}) = Σ_k (−1)^k B_k x^k/k!`.
pub fn todd_from_roots(roots: &[Rational], w: usize) -> Rational {
    // Coefficients b_k of x/(1 − e^{−x}); B₁ = −½ so (−1)^k B_k gives +½.
    let b: Vec<Rational> =
        (0..=w).map(|k| if k == 1 { -bernoulli(1) } else { bernoulli(k) } / fact(k as u32)).collect();
    // Product of the truncated series in a formal scaling parameter.
    let mut acc = vec![Rational::zero(); w + 1];
    acc[0] = Rational::one();
    for x in roots {
        let mut next = vec![Rational::zero(); w + 1];
        for (i, a) in acc.iter().enumerate() {
            for (k, bk) in b.iter().enumerate().take(w + 1 - i) {
                next[i + k] += a * bk * num_traits::pow::pow(x.clone(), k);
            }
        }
        acc = next;
    }
    acc[w].clone()
}

/// `c₁c₂/24` with `c₁ = ch₁` and `c₂ = (ch₁² − 2ch₂)/2`.
pub fn todd_d2_chern_root_form() -> CharPolynomial {
    let c1 = CharPolynomial::ch(3, 1);
    let c2 = c1.mul(&c1).add(&CharPolynomial::ch(3, 2).scale(&qi(-2))).scale(&q(1, 2));
    c1.mul(&c2).scale(&q(1, 24))
}

// ---------------------------------------------------------------------------
// Moyal symbols and the residue trace.

/// A symbol `Σ_n f_n(q) pⁿ` with Jouanolou coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    d: usize,
    terms: BTreeMap<Vec<u32>, JElement>,
}

impl Symbol {
    /// Multiplication by a Jouanolou element.
    pub fn of_function(f: &JElement) -> Self {
        let mut terms = BTreeMap::new();
        if !f.is_zero() {
            terms.insert(vec![0; f.dim()], f.clone());
        }
        Symbol { d: f.dim(), terms }
    }

    /// The symbol `T − ½ div T` of a vector field.
    pub fn of_vector_field(t: &VectorField) -> Self {
        let d = t.dim();
        let mut s = Self::of_function(&t.divergence().scale(&q(-1, 2)));
        for i in 0..d {
            if t.comp(i).is_zero() {
                continue;
            }
            let mut e = vec![0; d];
            e[i] = 1;
            s.terms.insert(e, t.comp(i).clone());
        }
        s
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Coefficient of `pⁿ`.
    pub fn coeff(&self, n: &[u32]) -> Option<&JElement> {
        self.terms.get(n)
    }

    /// Total degree in `p`.
    pub fn p_degree(&self) -> u32 {
        self.terms.keys().map(|n| n.iter().sum()).max().unwrap_or(0)
    }

    /// Parity of the Jouanolou degree, if homogeneous.
    pub fn parity(&self) -> Option<u32> {
        let mut par = None;
        for f in self.terms.values() {
            for m in f.terms().keys() {
                match par {
                    None => par = Some(m.parity()),
                    Some(x) if x != m.parity() => return None,
                    _ => {}
                }
            }
        }
        Some(par.unwrap_or(0))
    }
}

/// Polynomials in the simplex coordinates `θ_{l,l+1}`, `l = 0..k−1`.
type SimplexPoly = BTreeMap<Vec<u32>, Rational>;

fn sp_mul(a: &SimplexPoly, b: &SimplexPoly) -> SimplexPoly {
    let mut r = SimplexPoly::new();
    for (ea, x) in a {
        for (eb, y) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(i, j)| i + j).collect();
            *r.entry(e).or_insert_with(Rational::zero) += x * y;
        }
    }
    r.retain(|_, v| !v.is_zero());
    r
}

/// `∫_{S¹×Δ_k}` of a polynomial times `dθ₀ ⋯ dθ_k`: the Dirichlet integral
/// `∏ mᵢ! / (Σ mᵢ + k)!` per monomial (the circle factor has length one).
fn simplex_integral(p: &SimplexPoly, k: usize) -> Rational {
    let mut t = Rational::zero();
    for (e, c) in p {
        let num: Rational = e.iter().map(|&m| fact(m)).product();
        let s: u32 = e.iter().sum();
        t += c * num / fact(s + k as u32);
    }
    t
}

/// The pulled-back propagator `ℙ(θᵢ, θⱼ) = u_{ij} − ½` for `i < j`, where
/// `u_{ij} = θ_{i,i+1} + ⋯ + θ_{j−1,j}` is the arc from `θᵢ` to `θⱼ`.
fn propagator_ij(i: usize, j: usize, k: usize) -> SimplexPoly {
    let mut r = SimplexPoly::new();
    for l in i..j {
        let mut e = vec![0; k];
        e[l] = 1;
        r.insert(e, Rational::one());
    }
    r.insert(vec![0; k], q(-1, 2));
    r
}

/// All vectors of non-negative counts of length `n` with sum `≤ max`.
fn bounded_counts(n: usize, max: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for m in 0..=left {
            cur[i] = m;
            rec(i + 1, left - m, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(0, max, &mut vec![0; n], &mut out);
    out
}

/// The edge factor in `Π = h Σ_{i<j} ℙ(θᵢ,θⱼ)·Π_{ij}`; the displayed
/// definition uses `h = ½`.
pub fn default_edge_factor() -> Rational {
    q(1, 2)
}

/// The cyclic residue-trace cochain on an ordered tuple of symbols,
/// `Res_q ∫_{S¹_cyc[k+1]} Mult(e^{Π+D}(O₀dθ₀ ⊗ O₁ ⊗ ⋯ ⊗ O_k))|_{p=0}`, with the
/// edge factor `h` in `Π`.
///
/// `Π_{ij} = Σ_s (∂_{q^s})ᵢ(∂_{p^s})ⱼ − (∂_{p^s})ᵢ(∂_{q^s})ⱼ` and, after
/// dropping `dp`, `Dᵢ = Σ_s dq^s dθᵢ (∂_{q^s})ᵢ`.  Only `k = d` survives (one
/// `dθᵢ` per slot `i ≥ 1` and `d` holomorphic forms for the residue).  The
/// forms are written to the right of each slot; collecting `dθ₀⋯dθ_k` to
/// the far right costs `(−1)^{i(|Oᵢ'|+1)}` for the slot-`i` factor `Oᵢ' dq`.
pub fn restr_lambda_with(ops: &[Symbol], h: &Rational) -> Result<Rational, GrrError> {
    let d = ops.first().map_or(0, Symbol::dim);
    if ops.iter().any(|o| o.dim() != d) {
        return Err(GrrError::Dimension);
    }
    let k = ops.len().saturating_sub(1);
    if ops.is_empty() || k != d {
        return Ok(Rational::zero());
    }
    let max_p: u32 = ops.iter().map(Symbol::p_degree).sum();
    let mut elementary = Vec::new();
    for i in 0..=k {
        for j in i + 1..=k {
            for s in 0..d {
                elementary.push((i, j, s, true));
                elementary.push((i, j, s, false));
            }
        }
    }
    let mut total = Rational::zero();
    for counts in bounded_counts(elementary.len(), max_p as usize) {
        let mut alpha = vec![vec![0u32; d]; k + 1];
        let mut beta = vec![vec![0u32; d]; k + 1];
        let mut theta: SimplexPoly = [(vec![0; k], Rational::one())].into_iter().collect();
        for (&(i, j, s, qp), &m) in elementary.iter().zip(&counts) {
            if m == 0 {
                continue;
            }
            let c = if qp { h.clone() } else { -h.clone() };
            let mut f = propagator_ij(i, j, k);
            f.values_mut().for_each(|v| *v *= &c);
            for _ in 0..m {
                theta = sp_mul(&theta, &f);
            }
            let inv = Rational::one() / fact(m as u32);
            theta.values_mut().for_each(|v| *v *= &inv);
            let (qv, pv) = if qp { (i, j) } else { (j, i) };
            alpha[qv][s] += m as u32;
            beta[pv][s] += m as u32;
        }
        let mut slots = Vec::with_capacity(k + 1);
        for i in 0..=k {
            let Some(f) = ops[i].coeff(&beta[i]) else { break };
            let c: Rational = beta[i].iter().map(|&b| fact(b)).product();
            let mut g = f.scale(&c);
            for (s, &a) in alpha[i].iter().enumerate() {
                for _ in 0..a {
                    g = g.partial(s);
                }
            }
            slots.push(g);
        }
        if slots.len() != k + 1 {
            continue;
        }
        let integral = simplex_integral(&theta, k);
        if integral.is_zero() {
            continue;
        }
        let mut parts = vec![(slots[0].clone(), 0u32)];
        for (i, w) in slots.iter().enumerate().skip(1) {
            let mut next = Vec::new();
            for (e, sg) in &parts {
                for par in 0..2u32 {
                    let wi = w.parity_component(par);
                    if wi.is_zero() {
                        continue;
                    }
                    next.push((e.mul(&wi.hol_d()), sg + i as u32 * (par + 1)));
                }
            }
            parts = next;
        }
        for (e, sg) in parts {
            let v = e.residue();
            total += if sg % 2 == 1 { -(&integral * v) } else { &integral * v };
        }
    }
    Ok(total)
}

/// [`restr_lambda_with`] at the displayed edge factor `½`.
pub fn restr_lambda(ops: &[Symbol]) -> Result<Rational, GrrError> {
    restr_lambda_with(ops, &default_edge_factor())
}

/// The Lie cochain `Σ_τ ε(τ) ResTr_λ(O_{τ(0)}, …)` with `ε` the Koszul sign in
/// the shifted degrees `|O| − 1`.
pub fn restr_lie_with(ops: &[Symbol], h: &Rational) -> Result<Rational, GrrError> {
    let degs: Vec<i64> =
        ops.iter().map(|o| o.parity().map(|p| i64::from(p) - 1).ok_or(GrrError::Inhomogeneous)).collect::<Result<_, _>>()?;
    let mut r = Rational::zero();
    for perm in permutations(ops.len()) {
        let o: Vec<Symbol> = perm.iter().map(|&i| ops[i].clone()).collect();
        let v = restr_lambda_with(&o, h)?;
        r += if koszul_odd(&degs, &perm) { -v } else { v };
    }
    Ok(r)
}

/// The generator chain `z¹ ∧ ⋯ ∧ z^d ∧ P` of multiplication operators.
pub fn generator_symbols(d: usize) -> Vec<Symbol> {
    let mut ops: Vec<Symbol> = (0..d).map(|i| Symbol::of_function(&JElement::z(d, i))).collect();
    ops.push(Symbol::of_function(&JElement::p(d)));
    ops
}

/// The definitional Lie value on the generator, before calibration.
pub fn restr_generator_raw() -> Rational {
    restr_lie_with(&generator_symbols(2), &default_edge_factor()).expect("generator symbols are homogeneous")
}

/// The definitional residue trace on a word of vector fields, normalised by
/// the single calibration that sends the generator to `1`.
pub fn restr_definitional(fields: &[VectorField]) -> Result<Rational, GrrError> {
    let ops: Vec<Symbol> = fields.iter().map(Symbol::of_vector_field).collect();
    Ok(restr_lie_with(&ops, &default_edge_factor())? / restr_generator_raw())
}

// ---------------------------------------------------------------------------
// One-loop graph expansion.

/// A configuration of disjoint directed cycles (each written from its least
/// vertex) on `{0, …, n−1}`; the remaining vertices carry first-Chern-class
/// insertions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct OneLoopGraph {
    pub cycles: Vec<Vec<usize>>,
    pub insertions: Vec<usize>,
}

impl OneLoopGraph {
    /// The automorphism count `∏ 2|Γ|` (dihedral symmetry of each cycle).
    pub fn automorphisms(&self) -> u64 {
        self.cycles.iter().map(|c| 2 * c.len() as u64).product()
    }

    /// `∏ I_{|Γ|} / #Aut`.
    pub fn weight(&self) -> Rational {
        let mut w = Rational::one();
        for c in &self.cycles {
            w *= cycle_integral(c.len()).expect("cycles have length ≥ 2");
        }
        w / Rational::from_integer(self.automorphisms().into())
    }
}

/// All one-loop configurations on `n` vertices.
pub fn one_loop_graphs(n: usize) -> Vec<OneLoopGraph> {
    fn cycles_from(first: usize, rest: &[usize], len: usize) -> Vec<Vec<usize>> {
        // Directed cycles through `first` using `len − 1` vertices of `rest`
        // (all greater than `first`), in every order.
        let mut out = Vec::new();
        fn rec(cur: &mut Vec<usize>, rest: &[usize], len: usize, out: &mut Vec<Vec<usize>>) {
            if cur.len() == len {
                out.push(cur.clone());
                return;
            }
            for &v in rest {
                if !cur.contains(&v) {
                    cur.push(v);
                    rec(cur, rest, len, out);
                    cur.pop();
                }
            }
        }
        rec(&mut vec![first], rest, len, &mut out);
        out
    }
    fn rec(free: Vec<usize>, cycles: &mut Vec<Vec<usize>>, ins: &mut Vec<usize>, out: &mut Vec<OneLoopGraph>) {
        let Some((&v, rest)) = free.split_first() else {
            let mut c = cycles.clone();
            c.sort();
            let mut i = ins.clone();
            i.sort_unstable();
            out.push(OneLoopGraph { cycles: c, insertions: i });
            return;
        };
        // v as an insertion.
        ins.push(v);
        rec(rest.to_vec(), cycles, ins, out);
        ins.pop();
        // v as the least vertex of a cycle.
        for len in 2..=free.len() {
            for cyc in cycles_from(v, rest, len) {
                let remaining: Vec<usize> = rest.iter().copied().filter(|x| !cyc.contains(x)).collect();
                cycles.push(cyc);
                rec(remaining, cycles, ins, out);
                cycles.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec((0..n).collect(), &mut Vec::new(), &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// `ρ(f₀, …, f_d) = Res(f₀ Df₁ ⋯ Df_d)` on one pure tensor of functions.
fn rho_tensor(slots: &[JElement]) -> Rational {
    let mut e = slots[0].clone();
    for f in &slots[1..] {
        e = e.mul(&hol_d_left(f));
    }
    e.residue()
}

/// `ρ(tr_{Γ₁⋯Γ_k}(…))` for one configuration: vertices on a cycle carry the
/// matrix `∂_{q^a}∂_{p^b} O` with the matrix indices contracted around the
/// cycle, the others carry `O|_{p=0}`.
fn graph_term(ops: &[Symbol], g: &OneLoopGraph) -> Rational {
    let d = ops[0].dim();
    let zero = JElement::zero(d);
    let p0 = vec![0; d];
    let entry = |v: usize, a: usize, b: usize| -> JElement {
        let mut e = vec![0; d];
        e[b] = 1;
        ops[v].coeff(&e).map_or_else(|| zero.clone(), |f| f.partial(a))
    };
    let mut slots: Vec<Vec<JElement>> = vec![Vec::new()];
    let mut base = vec![zero.clone(); ops.len()];
    for &v in &g.insertions {
        base[v] = ops[v].coeff(&p0).cloned().unwrap_or_else(|| zero.clone());
    }
    slots[0] = base;
    for cyc in &g.cycles {
        let r = cyc.len();
        let mut next = Vec::new();
        let total = d.pow(r as u32);
        for code in 0..total {
            let idx: Vec<usize> = (0..r).map(|i| (code / d.pow(i as u32)) % d).collect();
            let vals: Vec<JElement> = (0..r).map(|i| entry(cyc[i], idx[i], idx[(i + 1) % r])).collect();
            if vals.iter().any(JElement::is_zero) {
                continue;
            }
            for s in &slots {
                let mut t = s.clone();
                for (i, f) in vals.iter().enumerate() {
                    t[cyc[i]] = f.clone();
                }
                next.push(t);
            }
        }
        slots = next;
    }
    slots.iter().filter(|s| s.iter().all(|f| !f.is_zero())).map(|s| rho_tensor(s)).sum()
}

/// The graph expansion `Σ_Γ (∏ I_{|Γᵢ|}/#Aut) ρ(tr_Γ(O₀ ⊗ ⋯ ⊗ O_d))` on first
/// order symbols; on the generator it gives `ρ(z¹, …, z^d, P) = 1`, so no
/// further calibration is needed.
pub fn one_loop_symbols(ops: &[Symbol]) -> Result<Rational, GrrError> {
    let d = ops.first().map_or(0, Symbol::dim);
    if ops.len() != d + 1 {
        return Err(GrrError::Arity { expected: d + 1, got: ops.len() });
    }
    if ops.iter().any(|o| o.dim() != d) {
        return Err(GrrError::Dimension);
    }
    if ops.iter().any(|o| o.p_degree() > 1) {
        return Err(GrrError::NotFirstOrder);
    }
    let mut r = Rational::zero();
    for g in one_loop_graphs(ops.len()) {
        let w = g.weight();
        if w.is_zero() {
            continue;
        }
        r += w * graph_term(ops, &g);
    }
    Ok(r)
}

/// The one-loop residue trace on an ordered tuple of `d + 1` vector fields.
pub fn one_loop_restr(fields: &[VectorField]) -> Result<Rational, GrrError> {
    let ops: Vec<Symbol> = fields.iter().map(Symbol::of_vector_field).collect();
    one_loop_symbols(&ops)
}

/// The residue trace on the generator `z¹ ∧ z² ∧ P`, via the graph
/// expansion.
pub fn restr_generator() -> Rational {
    one_loop_symbols(&generator_symbols(2)).expect("generator symbols are of order zero")
}

/// The one-loop residue trace on a canonical chain word (zero off arity 3).
pub fn one_loop_word(word: &[VFLetter]) -> Rational {
    if word.len() != 3 {
        return Rational::zero();
    }
    let fs: Vec<VectorField> = word.iter().map(|l| VectorField::from_letter(2, l)).collect();
    one_loop_restr(&fs).expect("letters are first order")
}

/// Pairing of the one-loop residue trace with a chain.
pub fn one_loop_pair(c: &WittChain) -> Rational {
    c.terms.iter().map(|(w, x)| x * one_loop_word(w)).sum()
}

/// One comparison row of the local GRR report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrrRow {
    pub chain: String,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl GrrRow {
    /// Whether both sides agree.
    pub fn verdict(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Rows `(chain, ResTr, Td|₆)` for the given chains, with the Todd side
/// evaluated from the Chern pairings `(ch₁³, ch₁ch₂)` supplied by the caller.
pub fn grr_rows(chains: &[(String, WittChain, Rational, Rational)]) -> Vec<GrrRow> {
    let td = todd_truncation(2).expect("d = 2 is supported");
    chains
        .iter()
        .map(|(name, c, ch13, ch12)| {
            let vals = [ch13.clone(), ch12.clone()];
            // Td|₆ is linear in the two monomials ch₁³ and ch₁ch₂.
            let rhs = td.coeff(&[3, 0, 0]) * &vals[0] + td.coeff(&[1, 1, 0]) * &vals[1];
            GrrRow { chain: name.clone(), lhs: one_loop_pair(c), rhs }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn propagator_convolution() {
        let p = PeriodicKernel::propagator();
        assert_eq!(p.convolve(&p), PeriodicKernel::bernoulli_kernel(2).scale(&qi(-1)));
        assert_eq!(cycle_integral(2).unwrap(), q(-1, 12));
        assert_eq!(cycle_integral(3).unwrap(), qi(0));
        assert_eq!(cycle_integral(4).unwrap(), q(1, 720));
        assert!(cycle_integral(1).is_err());
    }

    #[test]
    fn todd_d2() {
        let td = todd_truncation(2).unwrap();
        let expect = CharPolynomial::monomial(&[3, 0, 0], q(1, 48)).add(&CharPolynomial::monomial(&[1, 1, 0], q(-1, 24)));
        assert_eq!(td, expect);
        assert_eq!(td, todd_d2_chern_root_form());
        assert_eq!(todd_truncation(1).unwrap(), CharPolynomial::monomial(&[2, 0], q(1, 12)));
        assert!(todd_truncation(3).is_err());
    }

    #[test]
    fn graphs_on_three_vertices() {
        let g = one_loop_graphs(3);
        // No cycle; three 2-cycles; two directed 3-cycles.
        assert_eq!(g.len(), 1 + 3 + 2);
        assert_eq!(restr_generator(), qi(1));
    }
}
