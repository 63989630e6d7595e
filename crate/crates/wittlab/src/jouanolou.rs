//! The Jouanolou dg algebra of punctured affine space (dimensions 1 and 2).
//!
//! For `d = 2` the algebra is generated by even `z¹, z², x¹, x²` subject to
//! `z¹x¹ + z²x² = 1`, together with the odd Bochner–Martinelli class `P`
//! (cohomological degree 1), and is tensored with holomorphic forms
//! `dz¹, dz²`.  For `d = 1` it is `ℚ[z, x]/(zx − 1)` with forms `dz`.
//!
//! Elements are kept in a canonical normal form: the relation is oriented as
//! `z^d x^d → 1 − Σ_{i<d} zⁱxⁱ` and applied until no monomial contains both
//! `z^d` and `x^d`; odd generators are ordered `P < dz¹ < dz²` with the
//! sorting sign folded into the coefficient.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactalg::{add_term, binomial, factorial, qi, Rational};

/// Bit of the odd generator `P` in [`JMonomial::odd`].
pub const ODD_P: u8 = 1;
/// Bit of the form `dzⁱ` (axis `i` counted from 0) in [`JMonomial::odd`].
pub const fn odd_dz(i: usize) -> u8 {
    2 << i
}

/// Errors for Jouanolou-algebra operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JError {
    #[error("unsupported dimension {0} (only d = 1 and d = 2 are modelled)")]
    UnsupportedDimension(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("axis {axis} out of range for d = {d}")]
    AxisOutOfRange { axis: usize, d: usize },
}

/// Bi-weight with respect to the Euler fields `z¹∂₁, z²∂₂` (second entry
/// unused when `d = 1`).
pub type BiWeight = [i64; 2];

/// A monomial `z^a x^b · (odd part)`; the odd part is a bitmask over
/// `P, dz¹, dz²` (see [`ODD_P`], [`odd_dz`]).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct JMonomial {
    pub z: [u32; 2],
    pub x: [u32; 2],
    pub odd: u8,
}

impl JMonomial {
    /// The unit monomial.
    pub const ONE: JMonomial = JMonomial {
        z: [0, 0],
        x: [0, 0],
        odd: 0,
    };

    /// Build a monomial from exponents and an odd mask.
    pub fn new(z: [u32; 2], x: [u32; 2], odd: u8) -> Self {
        JMonomial { z, x, odd }
    }

    /// Whether `P` is present.
    pub fn has_p(&self) -> bool {
        self.odd & ODD_P != 0
    }

    /// Cohomological degree (number of `P` factors).
    pub fn degree(&self) -> u32 {
        u32::from(self.has_p())
    }

    /// Holomorphic form degree.
    pub fn form_degree(&self) -> u32 {
        (self.odd >> 1).count_ones()
    }

    /// Parity used for Koszul signs (`P` and every `dzⁱ` are odd).
    pub fn parity(&self) -> u32 {
        self.odd.count_ones() % 2
    }

    /// Bi-weight: `wt(zⁱ) = eᵢ`, `wt(xⁱ) = −eᵢ`, `wt(P) = −(1,…,1)`,
    /// `wt(dzⁱ) = eᵢ`.
    pub fn weight(&self, d: usize) -> BiWeight {
        let mut w = [0i64; 2];
        for (i, wi) in w.iter_mut().enumerate().take(d) {
            *wi = i64::from(self.z[i]) - i64::from(self.x[i]);
            if self.has_p() {
                *wi -= 1;
            }
            if self.odd & odd_dz(i) != 0 {
                *wi += 1;
            }
        }
        w
    }

    /// Total x-degree (used for truncations).
    pub fn x_degree(&self) -> u32 {
        self.x[0] + self.x[1]
    }

    /// Whether the monomial is in normal form for dimension `d`.
    pub fn is_normal(&self, d: usize) -> bool {
        let k = d - 1;
        self.z[k] == 0 || self.x[k] == 0
    }
}

/// Sign and mask of the product of two odd parts, `None` if they overlap.
pub fn odd_product(a: u8, b: u8) -> Option<(u8, bool)> {
    if a & b != 0 {
        return None;
    }
    // Count pairs (i in a, j in b) with j < i: each is one transposition.
    let mut inversions = 0u32;
    for j in 0..8 {
        if b & (1 << j) != 0 {
            inversions += (a >> (j + 1)).count_ones();
        }
    }
    Some((a | b, inversions % 2 == 1))
}

impl fmt::Display for JMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (name, e) in [("z1", self.z[0]), ("z2", self.z[1]), ("x1", self.x[0]), ("x2", self.x[1])] {
            match e {
                0 => {}
                1 => parts.push(name.to_string()),
                _ => parts.push(format!("{name}^{e}")),
            }
        }
        if self.has_p() {
            parts.push("P".into());
        }
        for i in 0..2 {
            if self.odd & odd_dz(i) != 0 {
                parts.push(format!("dz{}", i + 1));
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// An element of the Jouanolou algebra (optionally with form factors), in
/// normal form with no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JElement {
    d: usize,
    terms: BTreeMap<JMonomial, Rational>,
}

fn check_d(d: usize) -> Result<(), JError> {
    if d == 1 || d == 2 {
        Ok(())
    } else {
        Err(JError::UnsupportedDimension(d))
    }
}

impl JElement {
    /// The zero element.
    pub fn zero(d: usize) -> Self {
        check_d(d).expect("dimension");
        JElement {
            d,
            terms: BTreeMap::new(),
        }
    }

    /// Checked constructor of the zero element.
    pub fn try_zero(d: usize) -> Result<Self, JError> {
        check_d(d)?;
        Ok(JElement {
            d,
            terms: BTreeMap::new(),
        })
    }

    /// The unit.
    pub fn one(d: usize) -> Self {
        Self::monomial(d, JMonomial::ONE, Rational::one())
    }

    /// A rational constant.
    pub fn constant(d: usize, c: Rational) -> Self {
        Self::monomial(d, JMonomial::ONE, c)
    }

    /// `c · m`, normalized.
    pub fn monomial(d: usize, m: JMonomial, c: Rational) -> Self {
        let mut e = Self::zero(d);
        e.add_raw(m, c);
        e
    }

    /// The coordinate `zⁱ` (axis counted from 0).
    pub fn z(d: usize, i: usize) -> Self {
        let mut m = JMonomial::ONE;
        m.z[i] = 1;
        Self::monomial(d, m, Rational::one())
    }

    /// The generator `xⁱ`.
    pub fn x(d: usize, i: usize) -> Self {
        let mut m = JMonomial::ONE;
        m.x[i] = 1;
        Self::monomial(d, m, Rational::one())
    }

    /// The odd generator `P` (requires `d = 2`).
    pub fn p(d: usize) -> Self {
        assert_eq!(d, 2, "P exists only for d = 2");
        Self::monomial(d, JMonomial::new([0, 0], [0, 0], ODD_P), Rational::one())
    }

    /// The form `dzⁱ`.
    pub fn dz(d: usize, i: usize) -> Self {
        Self::monomial(d, JMonomial::new([0, 0], [0, 0], odd_dz(i)), Rational::one())
    }

    /// Normalize a formal combination of (possibly non-normal) monomials.
    pub fn normalize<I: IntoIterator<Item = (JMonomial, Rational)>>(d: usize, raw: I) -> Self {
        let mut e = Self::zero(d);
        for (m, c) in raw {
            e.add_raw(m, c);
        }
        e
    }

    /// Add `c · m` where `m` need not be in normal form.
    pub fn add_raw(&mut self, m: JMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        if self.d == 1 && (m.odd & ODD_P != 0 || m.odd & odd_dz(1) != 0) {
            return;
        }
        let k = self.d - 1;
        let t = m.z[k].min(m.x[k]);
        if t == 0 {
            add_term(&mut self.terms, m, c);
            return;
        }
        let mut base = m;
        base.z[k] -= t;
        base.x[k] -= t;
        if self.d == 1 {
            add_term(&mut self.terms, base, c);
            return;
        }
        // (z²x²)^t = (1 − z¹x¹)^t
        for j in 0..=t {
            let mut mm = base;
            mm.z[0] += j;
            mm.x[0] += j;
            let mut coef = Rational::from_integer(binomial(u64::from(t), u64::from(j)));
            if j % 2 == 1 {
                coef = -coef;
            }
            add_term(&mut self.terms, mm, &c * coef);
        }
    }

    /// Dimension `d`.
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Terms in canonical monomial order.
    pub fn terms(&self) -> &BTreeMap<JMonomial, Rational> {
        &self.terms
    }

    /// Coefficient of a normal-form monomial.
    pub fn coeff(&self, m: &JMonomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Whether the element is zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum.
    pub fn add(&self, other: &JElement) -> JElement {
        let mut out = self.clone();
        out.add_assign_scaled(other, &Rational::one());
        out
    }

    /// Difference.
    pub fn sub(&self, other: &JElement) -> JElement {
        let mut out = self.clone();
        out.add_assign_scaled(other, &-Rational::one());
        out
    }

    /// `self += c · other`.
    pub fn add_assign_scaled(&mut self, other: &JElement, c: &Rational) {
        assert_eq!(self.d, other.d, "dimension mismatch");
        if c.is_zero() {
            return;
        }
        for (m, x) in &other.terms {
            add_term(&mut self.terms, *m, c * x);
        }
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &Rational) -> JElement {
        if c.is_zero() {
            return Self::zero(self.d);
        }
        JElement {
            d: self.d,
            terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
        }
    }

    /// Negation.
    pub fn neg(&self) -> JElement {
        self.scale(&-Rational::one())
    }

    /// Graded-commutative product with Koszul signs, then normal form.
    pub fn mul(&self, other: &JElement) -> JElement {
        assert_eq!(self.d, other.d, "dimension mismatch");
        let mut out = Self::zero(self.d);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, c)) = mul_monomials(ma, mb) {
                    let c = if c { -(ca * cb) } else { ca * cb };
                    out.add_raw(m, c);
                }
            }
        }
        out
    }

    /// Checked product.
    pub fn try_mul(&self, other: &JElement) -> Result<JElement, JError> {
        if self.d != other.d {
            return Err(JError::DimensionMismatch(self.d, other.d));
        }
        Ok(self.mul(other))
    }

    /// Integer power.
    pub fn pow(&self, n: u32) -> JElement {
        let mut out = Self::one(self.d);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// The Dolbeault-type differential: `∂̄x¹ = −z²P`, `∂̄x² = z¹P`, zero on
    /// `z`, `P` and forms; a degree +1 derivation.  Zero for `d = 1`.
    pub fn dbar(&self) -> JElement {
        let mut out = Self::zero(self.d);
        if self.d == 1 {
            return out;
        }
        for (m, c) in &self.terms {
            if m.has_p() {
                continue;
            }
            let odd = match odd_product(ODD_P, m.odd) {
                Some((o, false)) => o,
                _ => unreachable!("P is first in the odd ordering"),
            };
            if m.x[0] > 0 {
                let mut mm = *m;
                mm.x[0] -= 1;
                mm.z[1] += 1;
                mm.odd = odd;
                out.add_raw(mm, -(c * qi(i64::from(m.x[0]))));
            }
            if m.x[1] > 0 {
                let mut mm = *m;
                mm.x[1] -= 1;
                mm.z[0] += 1;
                mm.odd = odd;
                out.add_raw(mm, c * qi(i64::from(m.x[1])));
            }
        }
        out
    }

    /// The even derivation `∂ᵢ` (axis `i` from 0): `∂ᵢzʲ = δᵢʲ`,
    /// `∂ᵢxʲ = −xⁱxʲ`, `∂ᵢP = −d·xⁱP`, zero on forms.
    pub fn partial(&self, i: usize) -> JElement {
        assert!(i < self.d, "axis out of range");
        let mut out = Self::zero(self.d);
        let dd = self.d as i64;
        for (m, c) in &self.terms {
            if m.z[i] > 0 {
                let mut mm = *m;
                mm.z[i] -= 1;
                out.add_raw(mm, c * qi(i64::from(m.z[i])));
            }
            let k = i64::from(m.x[0] + m.x[1]) + if m.has_p() { dd } else { 0 };
            if k != 0 {
                let mut mm = *m;
                mm.x[i] += 1;
                out.add_raw(mm, -(c * qi(k)));
            }
        }
        out
    }

    /// Checked version of [`JElement::partial`].
    pub fn try_partial(&self, i: usize) -> Result<JElement, JError> {
        if i >= self.d {
            return Err(JError::AxisOutOfRange { axis: i, d: self.d });
        }
        Ok(self.partial(i))
    }

    /// Holomorphic de Rham differential `Σᵢ ∂ᵢ(a)·dzⁱ` (forms appended on
    /// the right); terms already of top form degree map to zero.
    pub fn hol_d(&self) -> JElement {
        let mut out = Self::zero(self.d);
        for i in 0..self.d {
            out.add_assign_scaled(&self.partial(i).mul(&Self::dz(self.d, i)), &Rational::one());
        }
        out
    }

    /// Projection onto a bi-weight component.
    pub fn weight_component(&self, w: BiWeight) -> JElement {
        JElement {
            d: self.d,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.weight(self.d) == w)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// All bi-weights occurring.
    pub fn weights(&self) -> Vec<BiWeight> {
        let mut ws: Vec<BiWeight> = self.terms.keys().map(|m| m.weight(self.d)).collect();
        ws.sort();
        ws.dedup();
        ws
    }

    /// Component of a fixed cohomological degree.
    pub fn degree_component(&self, deg: u32) -> JElement {
        JElement {
            d: self.d,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == deg)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Component of a fixed parity (for splitting into homogeneous parts).
    pub fn parity_component(&self, parity: u32) -> JElement {
        JElement {
            d: self.d,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.parity() == parity)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// The residue functional.
    ///
    /// For `d = 2` it reads the `P dz¹dz²` part of bi-weight `(0,0)`:
    /// `Res((z¹)^a (z²)^b (x¹)^k (x²)^ℓ P dz¹dz²) = δ_{a,k} δ_{b,ℓ} k! ℓ!/(k+ℓ+1)!`.
    /// For `d = 1` it is the coefficient of `x·dz`.
    pub fn residue(&self) -> Rational {
        let mut r = Rational::zero();
        for (m, c) in &self.terms {
            r += c * residue_monomial(self.d, m);
        }
        r
    }

    /// Rewrite every variable name for display in the Weyl picture (`q` for `z`).
    pub fn to_string_with(&self, zname: &str) -> String {
        self.to_string().replace('z', zname)
    }
}

/// Residue of a single normal-form monomial.
pub fn residue_monomial(d: usize, m: &JMonomial) -> Rational {
    if d == 1 {
        if m.odd == odd_dz(0) && m.z == [0, 0] && m.x == [1, 0] {
            return Rational::one();
        }
        return Rational::zero();
    }
    if m.odd != ODD_P | odd_dz(0) | odd_dz(1) || m.z != m.x {
        return Rational::zero();
    }
    let (k, l) = (u64::from(m.x[0]), u64::from(m.x[1]));
    Rational::new(factorial(k) * factorial(l), factorial(k + l + 1))
}

/// Product of monomials before normalization: the merged monomial and
/// whether a Koszul sign arises, or `None` if odd parts overlap.
pub fn mul_monomials(a: &JMonomial, b: &JMonomial) -> Option<(JMonomial, bool)> {
    let (odd, sign) = odd_product(a.odd, b.odd)?;
    Some((
        JMonomial {
            z: [a.z[0] + b.z[0], a.z[1] + b.z[1]],
            x: [a.x[0] + b.x[0], a.x[1] + b.x[1]],
            odd,
        },
        sign,
    ))
}

impl fmt::Display for JElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let cs = crate::exactalg::fmt_q(c);
                if *m == JMonomial::ONE {
                    cs
                } else if c.is_one() {
                    m.to_string()
                } else if *c == -Rational::one() {
                    format!("-{m}")
                } else {
                    format!("{cs}*{m}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
    }
}

/// Enumerate normal-form monomials of dimension 2 with a given bi-weight,
/// odd mask and x-degree at most `max_x`, in canonical order.
pub fn monomials_of_weight(w: BiWeight, odd: u8, max_x: u32) -> Vec<JMonomial> {
    let probe = JMonomial::new([0, 0], [0, 0], odd);
    let shift = probe.weight(2);
    // z_i − x_i = w_i − shift_i
    let target = [w[0] - shift[0], w[1] - shift[1]];
    let mut out = Vec::new();
    for x1 in 0..=max_x {
        for x2 in 0..=(max_x - x1) {
            let z1 = target[0] + i64::from(x1);
            let z2 = target[1] + i64::from(x2);
            if z1 < 0 || z2 < 0 {
                continue;
            }
            let m = JMonomial::new([z1 as u32, z2 as u32], [x1, x2], odd);
            if m.is_normal(2) {
                out.push(m);
            }
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::q;

    fn z(i: usize) -> JElement {
        JElement::z(2, i)
    }
    fn x(i: usize) -> JElement {
        JElement::x(2, i)
    }

    #[test]
    fn relation_rewrites() {
        let one = JElement::one(2);
        let z1x1 = z(0).mul(&x(0));
        assert_eq!(z(1).mul(&x(1)), one.sub(&z1x1));
        assert_eq!(z1x1.add(&z(1).mul(&x(1))), one);
        let expect = one.sub(&z1x1.scale(&qi(2))).add(&z1x1.mul(&z1x1));
        assert_eq!(z(1).mul(&x(1)).pow(2), expect);
    }

    #[test]
    fn products() {
        let p = JElement::p(2);
        assert!(p.mul(&p).is_zero());
        assert_eq!(x(0).mul(&p).mul(&x(1)), x(0).mul(&x(1)).mul(&p));
        assert_eq!(x(0).mul(&z(0)).to_string(), "z1*x1");
    }

    #[test]
    fn dbar_examples() {
        let p = JElement::p(2);
        assert_eq!(x(0).dbar(), z(1).mul(&p).neg());
        assert_eq!(z(0).mul(&x(1)).dbar(), z(0).mul(&z(0)).mul(&p));
        let expect = z(0).mul(&x(0)).scale(&qi(2)).sub(&JElement::one(2)).mul(&p);
        assert_eq!(x(0).mul(&x(1)).dbar(), expect);
    }

    #[test]
    fn partial_examples() {
        let p = JElement::p(2);
        assert_eq!(z(0).partial(0), JElement::one(2));
        assert_eq!(x(1).partial(0), x(0).mul(&x(1)).neg());
        assert_eq!(p.partial(0), x(0).mul(&p).scale(&qi(-2)));
    }

    #[test]
    fn hol_d_examples() {
        let dz1 = JElement::dz(2, 0);
        let dz2 = JElement::dz(2, 1);
        assert_eq!(z(0).hol_d(), dz1);
        assert_eq!(z(0).mul(&z(1)).hol_d(), z(1).mul(&dz1).add(&z(0).mul(&dz2)));
        let p = JElement::p(2);
        let expect = x(0)
            .mul(&x(0))
            .mul(&p)
            .mul(&dz1)
            .scale(&qi(-3))
            .add(&x(0).mul(&x(1)).mul(&p).mul(&dz2).scale(&qi(-3)));
        assert_eq!(x(0).mul(&p).hol_d(), expect);
    }

    #[test]
    fn residue_examples() {
        let vol = JElement::p(2).mul(&JElement::dz(2, 0)).mul(&JElement::dz(2, 1));
        assert_eq!(vol.residue(), qi(1));
        assert_eq!(z(0).mul(&vol).residue(), qi(0));
        assert_eq!(z(0).mul(&x(0)).mul(&vol).residue(), q(1, 2));
        assert_eq!(z(1).mul(&x(1)).mul(&vol).residue(), q(1, 2));
        let d1 = JElement::x(1, 0).mul(&JElement::dz(1, 0));
        assert_eq!(d1.residue(), qi(1));
    }

    #[test]
    fn weight_components() {
        let e = z(0).add(&x(0));
        assert_eq!(e.weight_component([1, 0]), z(0));
        assert_eq!(JElement::p(2).weight_component([-1, -1]), JElement::p(2));
        let zx = z(0).mul(&x(0));
        assert_eq!(zx.weight_component([0, 0]), zx);
    }

    #[test]
    fn freeness_consistency() {
        let p = JElement::p(2);
        let lhs = z(0).mul(&z(1).mul(&p).neg()).add(&z(1).mul(&z(0).mul(&p)));
        assert!(lhs.is_zero());
    }
}
