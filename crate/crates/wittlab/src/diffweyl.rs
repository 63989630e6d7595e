//! Differential operators with Jouanolou coefficients (normal ordered,
//! coefficients to the left), the Weyl algebra of symbols with the Moyal
//! product, the symbol isomorphism between them, the action of polynomial
//! vector fields on the first ∂̄-cohomology `𝒫̃` of the operator algebra, and
//! the battery of commutator identities used to reduce Lie homology of the
//! operator algebra.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactalg::{add_term, binomial, factorial, q, qi, Rational};
use crate::jouanolou::{JElement, JMonomial, ODD_P};
use crate::wittlie::{h1_classes, PTildeBasis, PolyLetter, VectorField};

/// Errors from parsing operator text.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OpParseError {
    #[error("unrecognised factor `{0}` in operator text")]
    BadFactor(String),
    #[error("bad exponent in `{0}`")]
    BadExponent(String),
}

/// Multi-index binomial `C(n, a)`.
fn binom2(n: [u32; 2], a: [u32; 2]) -> Rational {
    Rational::from_integer(binomial(u64::from(n[0]), u64::from(a[0])) * binomial(u64::from(n[1]), u64::from(a[1])))
}

/// Multi-index factorial `a!`.
fn fact2(a: [u32; 2]) -> Rational {
    Rational::from_integer(factorial(u64::from(a[0])) * factorial(u64::from(a[1])))
}

/// Falling factorial `n!/(n−a)!` for multi-indices.
fn falling2(n: [u32; 2], a: [u32; 2]) -> Rational {
    binom2(n, a) * fact2(a)
}

/// Apply `∂^α` (coordinate derivatives) to a Jouanolou element.
pub fn partial_multi(f: &JElement, alpha: [u32; 2]) -> JElement {
    let mut g = f.clone();
    for (i, &n) in alpha.iter().enumerate() {
        for _ in 0..n {
            g = g.partial(i);
        }
    }
    g
}

/// All multi-indices `α ≤ n`.
fn below(n: [u32; 2]) -> impl Iterator<Item = [u32; 2]> {
    (0..=n[0]).flat_map(move |a| (0..=n[1]).map(move |b| [a, b]))
}

fn sub2(a: [u32; 2], b: [u32; 2]) -> [u32; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn add2(a: [u32; 2], b: [u32; 2]) -> [u32; 2] {
    [a[0] + b[0], a[1] + b[1]]
}

fn add_coef(map: &mut BTreeMap<[u32; 2], JElement>, k: [u32; 2], f: &JElement, c: &Rational) {
    if f.is_zero() || c.is_zero() {
        return;
    }
    let e = map.entry(k).or_insert_with(|| JElement::zero(2));
    e.add_assign_scaled(f, c);
    if e.is_zero() {
        map.remove(&k);
    }
}

/// A differential operator `Σ_n f_n ∂^n` on the two-dimensional Jouanolou
/// algebra, coefficients to the left.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DiffOp {
    terms: BTreeMap<[u32; 2], JElement>,
}

/// An element `Σ_n f_n(q) p^n` of the Weyl algebra of symbols.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WeylOp {
    terms: BTreeMap<[u32; 2], JElement>,
}

macro_rules! linear_ops {
    ($t:ty) => {
        impl $t {
            /// The zero element.
            pub fn zero() -> Self {
                Self::default()
            }

            /// `f · ∂^n` (resp. `f · p^n`).
            pub fn term(f: JElement, n: [u32; 2]) -> Self {
                let mut r = Self::default();
                add_coef(&mut r.terms, n, &f, &Rational::one());
                r
            }

            /// Multiplication by a Jouanolou element.
            pub fn mult(f: JElement) -> Self {
                Self::term(f, [0, 0])
            }

            /// Coefficient map.
            pub fn terms(&self) -> &BTreeMap<[u32; 2], JElement> {
                &self.terms
            }

            /// Whether zero.
            pub fn is_zero(&self) -> bool {
                self.terms.is_empty()
            }

            /// Sum.
            pub fn add(&self, o: &Self) -> Self {
                let mut r = self.clone();
                for (k, f) in &o.terms {
                    add_coef(&mut r.terms, *k, f, &Rational::one());
                }
                r
            }

            /// Difference.
            pub fn sub(&self, o: &Self) -> Self {
                self.add(&o.scale(&qi(-1)))
            }

            /// Scalar multiple.
            pub fn scale(&self, c: &Rational) -> Self {
                let mut r = Self::default();
                for (k, f) in &self.terms {
                    add_coef(&mut r.terms, *k, f, c);
                }
                r
            }

            /// Coefficientwise ∂̄.
            pub fn dbar(&self) -> Self {
                let mut r = Self::default();
                for (k, f) in &self.terms {
                    add_coef(&mut r.terms, *k, &f.dbar(), &Rational::one());
                }
                r
            }

            /// Component of a fixed cohomological degree.
            pub fn degree_component(&self, deg: u32) -> Self {
                let mut r = Self::default();
                for (k, f) in &self.terms {
                    add_coef(&mut r.terms, *k, &f.degree_component(deg), &Rational::one());
                }
                r
            }
        }
    };
}

linear_ops!(DiffOp);
linear_ops!(WeylOp);

impl DiffOp {
    /// `∂^n`.
    pub fn del(n: [u32; 2]) -> Self {
        Self::term(JElement::one(2), n)
    }

    /// `(z¹)^a (z²)^b ∂^n`.
    pub fn zdel(z: [u32; 2], n: [u32; 2]) -> Self {
        Self::term(JElement::monomial(2, JMonomial::new(z, [0, 0], 0), Rational::one()), n)
    }

    /// First-order operator of a vector field.
    pub fn from_vf(v: &VectorField) -> Self {
        let mut r = Self::default();
        for (i, c) in v.comps().iter().enumerate() {
            let mut n = [0, 0];
            n[i] = 1;
            add_coef(&mut r.terms, n, c, &Rational::one());
        }
        r
    }

    /// Composition, re-normal-ordered via `∂^n ∘ g = Σ_α C(n,α) ∂^α(g) ∂^{n−α}`.
    pub fn compose(&self, o: &DiffOp) -> DiffOp {
        let mut r = DiffOp::default();
        for (n, f) in &self.terms {
            for (m, g) in &o.terms {
                for a in below(*n) {
                    let dg = partial_multi(g, a);
                    if dg.is_zero() {
                        continue;
                    }
                    add_coef(&mut r.terms, add2(sub2(*n, a), *m), &f.mul(&dg), &binom2(*n, a));
                }
            }
        }
        r
    }

    /// Graded commutator `[A,B] = AB − (−1)^{|A||B|} BA`.
    pub fn commutator(&self, o: &DiffOp) -> DiffOp {
        let mut r = DiffOp::default();
        for da in 0..2 {
            let a = self.degree_component(da);
            for db in 0..2 {
                let b = o.degree_component(db);
                let sign = if da * db == 1 { qi(1) } else { qi(-1) };
                r = r.add(&a.compose(&b)).add(&b.compose(&a).scale(&sign));
            }
        }
        r
    }

    /// Apply to a Jouanolou element.
    pub fn apply(&self, g: &JElement) -> JElement {
        let mut r = JElement::zero(2);
        for (n, f) in &self.terms {
            r.add_assign_scaled(&f.mul(&partial_multi(g, *n)), &Rational::one());
        }
        r
    }

    /// Parse a single term `z1^a z2^b x1^c x2^e [P] d1^m d2^n`, optionally
    /// preceded by an integer or rational coefficient.
    pub fn parse_term(s: &str) -> Result<DiffOp, OpParseError> {
        let mut z = [0u32; 2];
        let mut x = [0u32; 2];
        let mut n = [0u32; 2];
        let mut odd = 0u8;
        let mut coef = Rational::one();
        for tok in s.split(|c: char| c.is_whitespace() || c == '*').filter(|t| !t.is_empty()) {
            if tok == "P" {
                odd = ODD_P;
                continue;
            }
            if let Some(c) = crate::exactalg::parse_q(tok) {
                coef *= c;
                continue;
            }
            let (base, exp) = match tok.split_once('^') {
                Some((b, e)) => (b, e.parse::<u32>().map_err(|_| OpParseError::BadExponent(tok.into()))?),
                None => (tok, 1),
            };
            let slot = match base {
                "z1" => &mut z[0],
                "z2" => &mut z[1],
                "x1" => &mut x[0],
                "x2" => &mut x[1],
                "d1" => &mut n[0],
                "d2" => &mut n[1],
                _ => return Err(OpParseError::BadFactor(tok.into())),
            };
            *slot += exp;
        }
        let mut f = JElement::zero(2);
        f.add_raw(JMonomial::new(z, x, odd), coef);
        Ok(DiffOp::term(f, n))
    }
}

fn fmt_terms(terms: &BTreeMap<[u32; 2], JElement>, f: &mut fmt::Formatter<'_>, zname: &str, dname: &str) -> fmt::Result {
    if terms.is_empty() {
        return write!(f, "0");
    }
    let parts: Vec<String> = terms
        .iter()
        .map(|(n, c)| {
            let mut ds = String::new();
            for (i, &e) in n.iter().enumerate() {
                if e == 1 {
                    ds.push_str(&format!("*{dname}{}", i + 1));
                } else if e > 1 {
                    ds.push_str(&format!("*{dname}{}^{e}", i + 1));
                }
            }
            format!("({}){ds}", c.to_string_with(zname))
        })
        .collect();
    write!(f, "{}", parts.join(" + "))
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(&self.terms, f, "z", "d")
    }
}

impl fmt::Display for WeylOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(&self.terms, f, "q", "p")
    }
}

impl WeylOp {
    /// `p^n`.
    pub fn p(n: [u32; 2]) -> Self {
        Self::term(JElement::one(2), n)
    }

    /// Moyal product `m ∘ exp(½(∂_p⊗∂_q − ∂_q⊗∂_p))`.
    pub fn moyal(&self, o: &WeylOp) -> WeylOp {
        let mut r = WeylOp::default();
        let half = q(1, 2);
        for (n, f) in &self.terms {
            for (m, g) in &o.terms {
                // α: p-derivatives on the left factor, β: p-derivatives on the right.
                for a in below(*n) {
                    let dg = partial_multi(g, a);
                    if dg.is_zero() {
                        continue;
                    }
                    for b in below(*m) {
                        let df = partial_multi(f, b);
                        if df.is_zero() {
                            continue;
                        }
                        let order = a[0] + a[1] + b[0] + b[1];
                        let mut c = falling2(*n, a) * falling2(*m, b) / (fact2(a) * fact2(b));
                        c *= num_traits::pow::pow(half.clone(), order as usize);
                        if (b[0] + b[1]) % 2 == 1 {
                            c = -c;
                        }
                        add_coef(&mut r.terms, add2(sub2(*n, a), sub2(*m, b)), &df.mul(&dg), &c);
                    }
                }
            }
        }
        r
    }

    /// Graded Moyal commutator.
    pub fn commutator(&self, o: &WeylOp) -> WeylOp {
        let mut r = WeylOp::default();
        for da in 0..2 {
            let a = self.degree_component(da);
            for db in 0..2 {
                let b = o.degree_component(db);
                let sign = if da * db == 1 { qi(1) } else { qi(-1) };
                r = r.add(&a.moyal(&b)).add(&b.moyal(&a).scale(&sign));
            }
        }
        r
    }
}

/// The symbol map `σ(f ∂^n) = exp(−½ Σ ∂_{p_s}∂_{q_s})(f p^n)`.
pub fn symbol(d: &DiffOp) -> WeylOp {
    let mut r = WeylOp::default();
    let mhalf = q(-1, 2);
    for (n, f) in d.terms() {
        for g in below(*n) {
            let df = partial_multi(f, g);
            if df.is_zero() {
                continue;
            }
            let k = (g[0] + g[1]) as usize;
            let c = falling2(*n, g) / fact2(g) * num_traits::pow::pow(mhalf.clone(), k);
            add_coef(&mut r.terms, sub2(*n, g), &df, &c);
        }
    }
    r
}

/// Inverse of the symbol map.
pub fn unsymbol(w: &WeylOp) -> DiffOp {
    let mut r = DiffOp::default();
    let half = q(1, 2);
    for (n, f) in w.terms() {
        for g in below(*n) {
            let df = partial_multi(f, g);
            if df.is_zero() {
                continue;
            }
            let k = (g[0] + g[1]) as usize;
            let c = falling2(*n, g) / fact2(g) * num_traits::pow::pow(half.clone(), k);
            add_coef(&mut r.terms, sub2(*n, g), &df, &c);
        }
    }
    r
}

/// The symbol `T − ½ div T` of a vector field, written directly.
pub fn vf_symbol(v: &VectorField) -> WeylOp {
    let mut r = WeylOp::mult(v.divergence().scale(&q(-1, 2)));
    for (i, c) in v.comps().iter().enumerate() {
        let mut n = [0, 0];
        n[i] = 1;
        r = r.add(&WeylOp::term(c.clone(), n));
    }
    r
}

// ---------------------------------------------------------------------------
// The module 𝒫̃ = H¹_∂̄ of the operator algebra.
// ---------------------------------------------------------------------------

impl PTildeBasis {
    /// Representative `((|p|+1)!/p!) x^p P ∂^n`.
    pub fn lift(&self) -> DiffOp {
        let c = Rational::new(
            factorial(u64::from(self.p[0] + self.p[1] + 1)),
            factorial(u64::from(self.p[0])) * factorial(u64::from(self.p[1])),
        );
        DiffOp::term(JElement::monomial(2, JMonomial::new([0, 0], self.p, ODD_P), c), self.n)
    }
}

/// Project the degree-1 part of an operator onto `𝒫̃`.
pub fn ptilde_project(d: &DiffOp) -> BTreeMap<PTildeBasis, Rational> {
    let mut out = BTreeMap::new();
    for (n, f) in d.terms() {
        for (p, c) in h1_classes(f) {
            add_term(&mut out, PTildeBasis { p, n: *n }, c);
        }
    }
    out
}

/// Action of a polynomial vector field on a `𝒫̃` symbol: commutator with
/// the representative, then projection to cohomology.
pub fn ptilde_action(t: &PolyLetter, b: &PTildeBasis) -> Vec<(PTildeBasis, Rational)> {
    let x = DiffOp::from_vf(&t.to_vf());
    ptilde_project(&x.commutator(&b.lift())).into_iter().collect()
}

// ---------------------------------------------------------------------------
// The reduction identities.
// ---------------------------------------------------------------------------

/// One line of the identity battery.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub id: String,
    pub pass: bool,
    pub detail: String,
}

fn z1() -> DiffOp {
    DiffOp::zdel([1, 0], [0, 0])
}

fn z2() -> DiffOp {
    DiffOp::zdel([0, 1], [0, 0])
}

fn p_op() -> DiffOp {
    DiffOp::mult(JElement::p(2))
}

/// Run the commutator identities for all exponents up to `max_exp`, plus
/// the cycle property of `P ∧ z¹ ∧ z²`.
///
/// * `z^M ∂^{(l₁,l₂)} = 1/(l₁+1) [z^M ∂^{(l₁+1,l₂)}, z¹]` (exact);
/// * `P ∂^{(m₁−1,m₂−1)} ≡ (1/m₁)[P, z¹∂^{(m₁,m₂−1)}]` in ∂̄-cohomology,
///   modulo classes `∂^{(p)}P ·∂^n` with `p ≠ 0`;
/// * `z^l ∂^{(r₁,r₂)} = −1/(r₁+1) [z¹, z^l ∂^{(r₁+1,r₂)}]` (exact; this
///   normalization differs from the printed one by the scalar `−(r₁+1)`,
///   which is reported separately);
/// * `(z²)^k ∂₂^{k−1} = −(1/k)[z², (z²)^k ∂₂^k]` (exact).
pub fn diffops_identity_suite(max_exp: u32) -> Vec<IdentityCheck> {
    let mut out = Vec::new();
    let rng = |lo: u32| lo..=max_exp;
    // raising identity with z¹ on the right
    let mut ok = true;
    let mut count = 0;
    for m1 in rng(0) {
        for m2 in rng(0) {
            for l1 in rng(0) {
                for l2 in rng(0) {
                    let lhs = DiffOp::zdel([m1, m2], [l1, l2]);
                    let rhs = DiffOp::zdel([m1, m2], [l1 + 1, l2]).commutator(&z1()).scale(&q(1, i64::from(l1) + 1));
                    ok &= lhs == rhs;
                    count += 1;
                }
            }
        }
    }
    out.push(IdentityCheck {
        id: "raise-by-z1".into(),
        pass: ok,
        detail: format!("{count} exponent tuples"),
    });

    // P-reduction, checked on the P-class component
    let mut ok = true;
    let mut extra = 0usize;
    let mut count = 0;
    for m1 in rng(1) {
        for m2 in rng(1) {
            let rhs = p_op()
                .commutator(&DiffOp::zdel([1, 0], [m1, m2 - 1]))
                .scale(&q(1, i64::from(m1)));
            let proj = ptilde_project(&rhs);
            let key = PTildeBasis {
                p: [0, 0],
                n: [m1 - 1, m2 - 1],
            };
            ok &= proj.get(&key).cloned().unwrap_or_else(Rational::zero) == Rational::one();
            extra += proj.keys().filter(|k| k.p != [0, 0]).count();
            count += 1;
        }
    }
    out.push(IdentityCheck {
        id: "P-reduction".into(),
        pass: ok,
        detail: format!("{count} exponent pairs; {extra} higher ∂^(p)P classes appear alongside"),
    });

    // lowering with z¹ on the left, normalized
    let mut ok = true;
    let mut printed_ok = true;
    let mut count = 0;
    for l1 in rng(0) {
        for l2 in rng(0) {
            for r1 in rng(0) {
                for r2 in rng(0) {
                    let lhs = DiffOp::zdel([l1, l2], [r1, r2]);
                    let br = z1().commutator(&DiffOp::zdel([l1, l2], [r1 + 1, r2]));
                    ok &= lhs == br.scale(&q(-1, i64::from(r1) + 1));
                    printed_ok &= lhs == br;
                    count += 1;
                }
            }
        }
    }
    out.push(IdentityCheck {
        id: "lower-by-z1".into(),
        pass: ok,
        detail: format!("{count} exponent tuples; unnormalized form holds: {printed_ok}"),
    });

    // z² identity
    let mut ok = true;
    for k in rng(1) {
        let lhs = DiffOp::zdel([0, k], [0, k - 1]);
        let rhs = z2().commutator(&DiffOp::zdel([0, k], [0, k])).scale(&q(-1, i64::from(k)));
        ok &= lhs == rhs;
    }
    out.push(IdentityCheck {
        id: "z2-reduction".into(),
        pass: ok,
        detail: format!("k = 1..{max_exp}"),
    });

    // cycle property: all pairwise brackets and ∂̄ of the letters vanish
    let letters = [p_op(), z1(), z2()];
    let mut ok = letters.iter().all(|l| l.dbar().is_zero());
    for i in 0..3 {
        for j in i + 1..3 {
            ok &= letters[i].commutator(&letters[j]).is_zero();
        }
    }
    out.push(IdentityCheck {
        id: "P^z1^z2-cycle".into(),
        pass: ok,
        detail: "∂̄ and all brackets of P, z¹, z² vanish".into(),
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_commutation() {
        let r = DiffOp::del([1, 0]).compose(&z1());
        assert_eq!(r, DiffOp::zdel([1, 0], [1, 0]).add(&DiffOp::del([0, 0])));
        assert_eq!(DiffOp::zdel([1, 0], [1, 0]).commutator(&z1()), z1());
        assert_eq!(p_op().compose(&z1()), DiffOp::mult(JElement::z(2, 0).mul(&JElement::p(2))));
    }

    #[test]
    fn moyal_examples() {
        let q1 = WeylOp::mult(JElement::z(2, 0));
        let p1 = WeylOp::p([1, 0]);
        let q1p1 = WeylOp::term(JElement::z(2, 0), [1, 0]);
        assert_eq!(q1.moyal(&p1), q1p1.sub(&WeylOp::mult(JElement::constant(2, q(1, 2)))));
        assert_eq!(p1.moyal(&q1), q1p1.add(&WeylOp::mult(JElement::constant(2, q(1, 2)))));
    }

    #[test]
    fn symbol_examples() {
        let e = DiffOp::zdel([1, 0], [1, 0]);
        let s = symbol(&e);
        let expect = WeylOp::term(JElement::z(2, 0), [1, 0]).sub(&WeylOp::mult(JElement::constant(2, q(1, 2))));
        assert_eq!(s, expect);
        assert_eq!(symbol(&e.compose(&e)), s.moyal(&s));
        assert_eq!(unsymbol(&s), e);
    }

    #[test]
    fn parse_terms() {
        let d = DiffOp::parse_term("z1^2 z2 P d1^3").unwrap();
        let f = JElement::monomial(2, JMonomial::new([2, 1], [0, 0], ODD_P), Rational::one());
        assert_eq!(d, DiffOp::term(f, [3, 0]));
        assert!(DiffOp::parse_term("y1").is_err());
    }

    #[test]
    fn identity_suite_passes() {
        assert!(diffops_identity_suite(3).iter().all(|c| c.pass));
    }
}
