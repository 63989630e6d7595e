//! Connes' normalized Hochschild and cyclic complexes of the Jouanolou
//! algebra `𝒥_d` and of `gl_d(𝒥_d)`: the operators `b`, `B`, `t`, the
//! shuffle and star products, the matrix trace, the residue cocycle `ρ`, the
//! universal Atiyah cochain `c̃`, and the Chern monomial cocycles of the dg
//! Witt algebra, together with independent index formulas for `d = 2`.
//!
//! A chain `(a₀, a₁, …, aₙ)` is read as `a₀ ⊗ sa₁ ⊗ ⋯ ⊗ saₙ` with `s` of
//! degree `−1`, so its total degree is `|a₀| + Σᵢ (|aᵢ| − 1)`.  Every sign
//! below is the Koszul sign of that reading: with `εᵢ = |a₀| + Σ_{1≤j≤i}
//! (|aⱼ| − 1)`,
//!
//! * `b = Σ_{i<n} (−1)^{εᵢ} (…, aᵢaᵢ₊₁, …) − (−1)^{(|aₙ|−1)ε_{n−1}} (aₙa₀, a₁, …)`;
//! * `t(a₀, …, aₙ) = (−1)^{(|aₙ|−1)Σ_{i<n}(|aᵢ|−1)} (aₙ, a₀, …, aₙ₋₁)`;
//! * `B = s ∘ N` with `N = Σⱼ tʲ` and `s(a₀, …) = (1, a₀, …)`;
//! * the internal differential `∂̄` acts slotwise with `s∂̄ = −∂̄s`.
//!
//! Slots `≥ 1` live in `A/ℚ·1`: constants there are discarded (for matrices
//! the identity is eliminated through `E₁₁ ↦ −Σ_{i≥2} Eᵢᵢ`).  Cyclic classes
//! are stored as the lexicographically least rotation, with slot 0 reduced
//! too, because chains with the unit in slot 0 are rotations of chains with
//! the unit in slot 1.
//!
//! The residue cocycle is `ρ(f₀, …, f_d) = Res(f₀ Df₁ ⋯ Df_d)` with the odd
//! derivation `Df = Σᵢ dzⁱ ∂ᵢf` (forms on the left).

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::cechain::WittChain;
use crate::exactalg::{add_term, qi, Rational};
use crate::jouanolou::{JElement, JMonomial};
use crate::wittlie::{VFLetter, VectorField};

/// Errors raised by the cyclic layer.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CyclicError {
    #[error("exponents {exps:?} do not satisfy Σ p·i_p = {target}")]
    BadExponents { exps: Vec<usize>, target: usize },
    #[error("expected {expected} vector fields, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("vector field is not homogeneous in degree")]
    Inhomogeneous,
    #[error("index formulas are implemented for d = 2 only")]
    Dimension,
}

/// Basis elements of an algebra whose chains we build.
pub trait SlotBasis: Ord + Clone + fmt::Display {
    /// Cohomological degree.
    fn degree(&self) -> u32;
    /// The unit as a combination of basis elements.
    fn unit(d: usize) -> Vec<(Self, Rational)>;
    /// Product of two basis elements.
    fn mul(&self, o: &Self, d: usize) -> Vec<(Self, Rational)>;
    /// The internal differential.
    fn dbar(&self, d: usize) -> Vec<(Self, Rational)>;
    /// Rewrite into the fixed complement of the scalars.
    fn reduced(&self) -> Vec<(Self, Rational)>;
    /// Derivation by a vector field, `T(f) = Σₖ Tᵏ ∂ₖ f` (entrywise for matrices).
    fn act(&self, t: &VectorField) -> Vec<(Self, Rational)>;
}

fn terms_of(e: &JElement) -> Vec<(JMonomial, Rational)> {
    e.terms().iter().map(|(m, c)| (*m, c.clone())).collect()
}

impl SlotBasis for JMonomial {
    fn degree(&self) -> u32 {
        JMonomial::degree(self)
    }
    fn unit(_d: usize) -> Vec<(Self, Rational)> {
        vec![(JMonomial::ONE, Rational::one())]
    }
    fn mul(&self, o: &Self, d: usize) -> Vec<(Self, Rational)> {
        terms_of(&JElement::monomial(d, *self, Rational::one()).mul(&JElement::monomial(d, *o, Rational::one())))
    }
    fn dbar(&self, d: usize) -> Vec<(Self, Rational)> {
        terms_of(&JElement::monomial(d, *self, Rational::one()).dbar())
    }
    fn reduced(&self) -> Vec<(Self, Rational)> {
        if *self == JMonomial::ONE {
            Vec::new()
        } else {
            vec![(*self, Rational::one())]
        }
    }
    fn act(&self, t: &VectorField) -> Vec<(Self, Rational)> {
        terms_of(&t.act(&JElement::monomial(t.dim(), *self, Rational::one())))
    }
}

/// `E_{row,col} ⊗ m`, a basis element of `gl_d(𝒥_d)` (indices from 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatUnit {
    pub row: u8,
    pub col: u8,
    pub mono: JMonomial,
}

impl fmt::Display for MatUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E{}{}⊗{}", self.row + 1, self.col + 1, self.mono)
    }
}

impl MatUnit {
    fn lift(&self, v: Vec<(JMonomial, Rational)>) -> Vec<(MatUnit, Rational)> {
        v.into_iter()
            .map(|(m, c)| (MatUnit { row: self.row, col: self.col, mono: m }, c))
            .collect()
    }
}

impl SlotBasis for MatUnit {
    fn degree(&self) -> u32 {
        self.mono.degree()
    }
    fn unit(d: usize) -> Vec<(Self, Rational)> {
        (0..d as u8)
            .map(|i| (MatUnit { row: i, col: i, mono: JMonomial::ONE }, Rational::one()))
            .collect()
    }
    fn mul(&self, o: &Self, d: usize) -> Vec<(Self, Rational)> {
        if self.col != o.row {
            return Vec::new();
        }
        let m = MatUnit { row: self.row, col: o.col, mono: JMonomial::ONE };
        m.lift(self.mono.mul(&o.mono, d))
    }
    fn dbar(&self, d: usize) -> Vec<(Self, Rational)> {
        self.lift(self.mono.dbar(d))
    }
    fn reduced(&self) -> Vec<(Self, Rational)> {
        if self.row == 0 && self.col == 0 && self.mono == JMonomial::ONE {
            // E₁₁ ≡ −Σ_{i≥2} Eᵢᵢ modulo the identity; the dimension is not
            // stored here, so the diagonal partner is produced by
            // `Chain::reduce_slot`, which knows `d`.
            Vec::new()
        } else {
            vec![(*self, Rational::one())]
        }
    }
    fn act(&self, t: &VectorField) -> Vec<(Self, Rational)> {
        self.lift(self.mono.act(t))
    }
}

/// A Hochschild chain (slot 0 in `A`, slots `≥ 1` in `A/ℚ·1`), or — after
/// [`Chain::cyclic`] — the canonical representative of a cyclic class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain<S: SlotBasis> {
    pub d: usize,
    pub terms: BTreeMap<Vec<S>, Rational>,
}

/// Chains over `𝒥_d`.
pub type CyclicChain = Chain<JMonomial>;
/// Chains over `gl_d(𝒥_d)`.
pub type MatrixChain = Chain<MatUnit>;

fn sgn(odd: bool) -> Rational {
    if odd {
        qi(-1)
    } else {
        Rational::one()
    }
}

/// Slot degrees after suspension (slot 0 unshifted).
fn shifted(word: &[impl SlotBasis]) -> Vec<i64> {
    word.iter()
        .enumerate()
        .map(|(i, s)| i64::from(s.degree()) - i64::from(i > 0))
        .collect()
}

fn odd(x: i64) -> bool {
    x.rem_euclid(2) == 1
}

impl<S: SlotBasis> Chain<S> {
    /// The zero chain.
    pub fn zero(d: usize) -> Self {
        Chain { d, terms: BTreeMap::new() }
    }

    /// A single word (slots `≥ 1` are reduced).
    pub fn word(d: usize, slots: &[S], c: Rational) -> Self {
        let mut r = Self::zero(d);
        r.add_slots(slots.iter().map(|s| vec![(s.clone(), Rational::one())]).collect(), c);
        r
    }

    /// Add `c · (v₀, v₁, …)` for slot-wise linear combinations, reducing
    /// slots `≥ 1`.
    pub fn add_slots(&mut self, slots: Vec<Vec<(S, Rational)>>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let mut partial: Vec<(Vec<S>, Rational)> = vec![(Vec::new(), c)];
        for (i, v) in slots.into_iter().enumerate() {
            let v = if i == 0 { v } else { self.reduce_slot(v) };
            let mut next = Vec::new();
            for (w, x) in &partial {
                for (s, y) in &v {
                    let mut w2 = w.clone();
                    w2.push(s.clone());
                    next.push((w2, x * y));
                }
            }
            partial = next;
            if partial.is_empty() {
                return;
            }
        }
        for (w, x) in partial {
            add_term(&mut self.terms, w, x);
        }
    }

    /// Rewrite a slot combination into the complement of the scalars.
    pub fn reduce_slot(&self, v: Vec<(S, Rational)>) -> Vec<(S, Rational)> {
        let unit = S::unit(self.d);
        let mut out: BTreeMap<S, Rational> = BTreeMap::new();
        for (s, c) in v {
            let r = s.reduced();
            if r.is_empty() && unit.len() > 1 && unit[0].0 == s {
                for (u, y) in unit.iter().skip(1) {
                    add_term(&mut out, u.clone(), -(&c * y));
                }
            }
            for (t, y) in r {
                add_term(&mut out, t, &c * &y);
            }
        }
        out.into_iter().collect()
    }

    /// Whether the chain vanishes.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum.
    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (w, c) in &o.terms {
            add_term(&mut r.terms, w.clone(), c.clone());
        }
        r
    }

    /// Difference.
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&qi(-1)))
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &Rational) -> Self {
        let mut r = Self::zero(self.d);
        for (w, x) in &self.terms {
            add_term(&mut r.terms, w.clone(), x * c);
        }
        r
    }

    /// Restriction to words with `n` slots.
    pub fn slot_component(&self, n: usize) -> Self {
        Chain {
            d: self.d,
            terms: self.terms.iter().filter(|(w, _)| w.len() == n).map(|(w, c)| (w.clone(), c.clone())).collect(),
        }
    }

    fn map_words(&self, f: impl Fn(&[S], &Rational, &mut Self)) -> Self {
        let mut r = Self::zero(self.d);
        for (w, c) in &self.terms {
            f(w, c, &mut r);
        }
        r
    }

    fn singleton(s: &S) -> Vec<(S, Rational)> {
        vec![(s.clone(), Rational::one())]
    }

    /// The Hochschild boundary `b`.
    pub fn b(&self) -> Self {
        let d = self.d;
        self.map_words(|w, c, r| {
            let n = w.len().saturating_sub(1);
            if n == 0 {
                return;
            }
            let sd = shifted(w);
            let mut eps = 0i64;
            for i in 0..n {
                eps += sd[i];
                let mut slots: Vec<Vec<(S, Rational)>> = Vec::with_capacity(n);
                for (j, s) in w.iter().enumerate() {
                    if j == i {
                        slots.push(s.mul(&w[i + 1], d));
                    } else if j != i + 1 {
                        slots.push(Self::singleton(s));
                    }
                }
                r.add_slots(slots, c * sgn(odd(eps)));
            }
            let eps_last: i64 = sd[..n].iter().sum();
            let deg_n = i64::from(w[n].degree());
            let mut slots = vec![w[n].mul(&w[0], d)];
            slots.extend(w[1..n].iter().map(Self::singleton));
            r.add_slots(slots, -(c * sgn(odd((deg_n - 1) * eps_last))));
        })
    }

    /// `b′`: the boundary without the wrap-around face.
    pub fn b_prime(&self) -> Self {
        let d = self.d;
        self.map_words(|w, c, r| {
            let n = w.len().saturating_sub(1);
            let sd = shifted(w);
            let mut eps = 0i64;
            for i in 0..n {
                eps += sd[i];
                let mut slots: Vec<Vec<(S, Rational)>> = Vec::with_capacity(n);
                for (j, s) in w.iter().enumerate() {
                    if j == i {
                        slots.push(s.mul(&w[i + 1], d));
                    } else if j != i + 1 {
                        slots.push(Self::singleton(s));
                    }
                }
                r.add_slots(slots, c * sgn(odd(eps)));
            }
        })
    }

    /// The internal differential `∂̄`, slotwise.
    pub fn dbar(&self) -> Self {
        let d = self.d;
        self.map_words(|w, c, r| {
            let sd = shifted(w);
            let mut eps = 0i64;
            for i in 0..w.len() {
                let sign = if i == 0 { Rational::one() } else { -sgn(odd(eps)) };
                eps += sd[i];
                let slots: Vec<Vec<(S, Rational)>> = w
                    .iter()
                    .enumerate()
                    .map(|(j, s)| if j == i { s.dbar(d) } else { Self::singleton(s) })
                    .collect();
                r.add_slots(slots, c * sign);
            }
        })
    }

    /// The cyclic operator `t`.
    pub fn t(&self) -> Self {
        self.map_words(|w, c, r| {
            let (word, sign) = rotate(w);
            r.add_slots(word.iter().map(Self::singleton).collect(), c * sign);
        })
    }

    /// Connes' `B`.
    pub fn connes_b(&self) -> Self {
        let d = self.d;
        self.map_words(|w, c, r| {
            let mut cur = w.to_vec();
            let mut sign = Rational::one();
            for _ in 0..w.len() {
                let mut slots = vec![S::unit(d)];
                slots.extend(cur.iter().map(Self::singleton));
                r.add_slots(slots, c * &sign);
                let (next, s) = rotate(&cur);
                cur = next;
                sign *= s;
            }
        })
    }

    /// The shuffle product `(a₀, a₁…a_p) × (b₀, b₁…b_q)
    /// = (−1)^{|b₀|·Σᵢ(|aᵢ|−1)} (a₀b₀, sh(a₁…a_p; b₁…b_q))` with the Koszul
    /// sign of each shuffle in the shifted degrees.
    pub fn shuffle(&self, o: &Self) -> Self {
        let d = self.d;
        let mut r = Self::zero(d);
        for (x, cx) in &self.terms {
            for (y, cy) in &o.terms {
                let sx: Vec<i64> = shifted(x);
                let sy: Vec<i64> = shifted(y);
                let pre = odd(i64::from(y[0].degree()) * sx[1..].iter().sum::<i64>());
                let head = x[0].mul(&y[0], d);
                let (p, q) = (x.len() - 1, y.len() - 1);
                for (mask, shuffle_odd) in shuffles(&sx[1..], &sy[1..]) {
                    let mut slots = vec![head.clone()];
                    let (mut i, mut j) = (1, 1);
                    for &from_x in &mask {
                        if from_x {
                            slots.push(Self::singleton(&x[i]));
                            i += 1;
                        } else {
                            slots.push(Self::singleton(&y[j]));
                            j += 1;
                        }
                    }
                    debug_assert!(i == p + 1 && j == q + 1);
                    r.add_slots(slots, cx * cy * sgn(pre ^ shuffle_odd));
                }
            }
        }
        r
    }

    /// The canonical representative of the cyclic class.
    pub fn cyclic(&self) -> Self {
        let mut r = Self::zero(self.d);
        for (w, c) in &self.terms {
            // reduce slot 0 as well (unit in slot 0 is a rotation of a
            // chain with the unit in slot 1)
            let mut tmp = Self::zero(self.d);
            if w.len() > 1 {
                let mut slots = vec![tmp.reduce_slot(Self::singleton(&w[0]))];
                slots.extend(w[1..].iter().map(Self::singleton));
                tmp.add_slots(slots, c.clone());
            } else {
                add_term(&mut tmp.terms, w.clone(), c.clone());
            }
            for (w2, c2) in tmp.terms {
                if let Some((rep, s)) = canonical_rotation(&w2) {
                    add_term(&mut r.terms, rep, c2 * s);
                }
            }
        }
        r
    }

    /// The star product of cyclic classes, `x * y = x × B(y)`.
    pub fn star(&self, o: &Self) -> Self {
        self.shuffle(&o.connes_b()).cyclic()
    }

    /// Action of a homogeneous vector field by derivation across slots.
    pub fn act(&self, t: &VectorField) -> Self {
        let deg_t = i64::from(field_degree(t).unwrap_or(0));
        self.map_words(|w, c, r| {
            let sd = shifted(w);
            let mut eps = 0i64;
            for i in 0..w.len() {
                let slots: Vec<Vec<(S, Rational)>> = w
                    .iter()
                    .enumerate()
                    .map(|(j, s)| if j == i { s.act(t) } else { Self::singleton(s) })
                    .collect();
                r.add_slots(slots, c * sgn(odd(deg_t * (eps + i64::from(i > 0)))));
                eps += sd[i];
            }
        })
    }
}

/// `t` on a single word: the rotated word and its sign.
fn rotate<S: SlotBasis>(w: &[S]) -> (Vec<S>, Rational) {
    let n = w.len() - 1;
    // all slots suspended: the last one moves past the others
    let passed: i64 = w[..n].iter().map(|s| i64::from(s.degree()) - 1).sum();
    let deg_n = i64::from(w[n].degree());
    let mut out = Vec::with_capacity(w.len());
    out.push(w[n].clone());
    out.extend_from_slice(&w[..n]);
    (out, sgn(odd((deg_n - 1) * passed)))
}

/// Least rotation with its sign, or `None` if the orbit forces zero.
fn canonical_rotation<S: SlotBasis>(w: &[S]) -> Option<(Vec<S>, Rational)> {
    let mut best = (w.to_vec(), Rational::one());
    let mut cur = w.to_vec();
    let mut sign = Rational::one();
    for _ in 1..w.len() {
        let (next, s) = rotate(&cur);
        cur = next;
        sign *= s;
        if cur == w && sign != Rational::one() {
            return None;
        }
        if cur < best.0 {
            best = (cur.clone(), sign.clone());
        }
    }
    // the class of w equals sign⁻¹ · rotation; sign is ±1
    Some(best)
}

/// All `(p,q)`-shuffles as masks (`true` = from the first word) with the
/// parity of their Koszul sign for the given shifted degrees.
fn shuffles(a: &[i64], b: &[i64]) -> Vec<(Vec<bool>, bool)> {
    let (p, q) = (a.len(), b.len());
    let mut out = Vec::new();
    let mut mask = Vec::with_capacity(p + q);
    fn rec(a: &[i64], b: &[i64], i: usize, j: usize, mask: &mut Vec<bool>, sign: bool, out: &mut Vec<(Vec<bool>, bool)>) {
        if i == a.len() && j == b.len() {
            out.push((mask.clone(), sign));
            return;
        }
        if i < a.len() {
            mask.push(true);
            rec(a, b, i + 1, j, mask, sign, out);
            mask.pop();
        }
        if j < b.len() {
            // b[j] jumps over the remaining a[i..]
            let rest: i64 = a[i..].iter().sum();
            mask.push(false);
            rec(a, b, i, j + 1, mask, sign ^ odd(b[j] * rest), out);
            mask.pop();
        }
    }
    rec(a, b, 0, 0, &mut mask, false, &mut out);
    debug_assert_eq!(out.len(), binom(p + q, p));
    out
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// The matrix trace `Tr((M₀⊗a₀), …, (Mₙ⊗aₙ)) = Tr(M₀⋯Mₙ)·(a₀, …, aₙ)`.
pub fn trace_map(c: &MatrixChain) -> CyclicChain {
    let mut r = CyclicChain::zero(c.d);
    for (w, x) in &c.terms {
        let n = w.len();
        let closes = (0..n).all(|i| w[i].col == w[(i + 1) % n].row);
        if !closes {
            continue;
        }
        let slots: Vec<Vec<(JMonomial, Rational)>> =
            w.iter().map(|m| vec![(m.mono, Rational::one())]).collect();
        r.add_slots(slots, x.clone());
    }
    r
}

/// The odd derivation `Df = Σᵢ dzⁱ ∂ᵢ f`.
pub fn hol_d_left(f: &JElement) -> JElement {
    let d = f.dim();
    let mut o = JElement::zero(d);
    for i in 0..d {
        o.add_assign_scaled(&JElement::dz(d, i).mul(&f.partial(i)), &Rational::one());
    }
    o
}

/// `ρ(f₀, …, f_d) = Res(f₀ Df₁ ⋯ Df_d)`, extended linearly; words with a
/// slot count other than `d + 1` contribute zero.
pub fn rho(c: &CyclicChain) -> Rational {
    let d = c.d;
    let mut r = Rational::zero();
    for (w, x) in &c.terms {
        if w.len() != d + 1 {
            continue;
        }
        let mut e = JElement::monomial(d, w[0], Rational::one());
        for m in &w[1..] {
            e = e.mul(&hol_d_left(&JElement::monomial(d, *m, Rational::one())));
        }
        r += x * e.residue();
    }
    r
}

/// `ρ(T · c)`; vanishes by the invariance of the residue cocycle.
pub fn rho_invariance_check(t: &VectorField, c: &CyclicChain) -> Rational {
    rho(&c.act(t))
}

/// Cohomological degree of a homogeneous field.
pub fn field_degree(t: &VectorField) -> Option<u32> {
    let mut deg = None;
    for c in t.comps() {
        for m in c.terms().keys() {
            match deg {
                None => deg = Some(m.degree()),
                Some(g) if g != m.degree() => return None,
                _ => {}
            }
        }
    }
    Some(deg.unwrap_or(0))
}

/// The Jacobian `JT = Σ_{j,k} E_{jk} ⊗ ∂ⱼTᵏ` as a slot combination.
pub fn jacobian_slot(t: &VectorField) -> Vec<(MatUnit, Rational)> {
    let jac = t.jacobian();
    let mut out = Vec::new();
    for (j, row) in jac.iter().enumerate() {
        for (k, e) in row.iter().enumerate() {
            for (m, c) in e.terms() {
                out.push((MatUnit { row: j as u8, col: k as u8, mono: *m }, c.clone()));
            }
        }
    }
    out
}

/// Shifted parity `|T| − 1` of homogeneous fields.
fn shifted_degrees(fields: &[VectorField]) -> Result<Vec<i64>, CyclicError> {
    fields
        .iter()
        .map(|t| field_degree(t).map(|g| i64::from(g) - 1).ok_or(CyclicError::Inhomogeneous))
        .collect()
}

/// Koszul parity of reordering items with the given degrees by `perm`
/// (the new sequence is `perm[0], perm[1], …`).
pub fn koszul_odd(degs: &[i64], perm: &[usize]) -> bool {
    let mut s = false;
    for a in 0..perm.len() {
        for b in a + 1..perm.len() {
            if perm[a] > perm[b] && odd(degs[perm[a]] * degs[perm[b]]) {
                s = !s;
            }
        }
    }
    s
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    fn rec(n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !cur.contains(&i) {
                cur.push(i);
                rec(n, cur, out);
                cur.pop();
            }
        }
    }
    rec(n, &mut cur, &mut out);
    out
}

/// The universal Atiyah cochain
/// `c̃_{k+1}(T₀, …, T_k) = ((−1)^k/2^k) Σ_{τ∈S_k} ε(τ) (JT₀, JT_{τ(1)}, …, JT_{τ(k)})`
/// with `ε` the Koszul sign in the shifted degrees `|Tᵢ| − 1`.
pub fn atiyah_cochain(fields: &[VectorField]) -> Result<MatrixChain, CyclicError> {
    let k = fields.len().checked_sub(1).ok_or(CyclicError::Arity { expected: 1, got: 0 })?;
    let d = fields[0].dim();
    let degs = shifted_degrees(fields)?;
    let jac: Vec<Vec<(MatUnit, Rational)>> = fields.iter().map(jacobian_slot).collect();
    let norm = sgn(k % 2 == 1) / Rational::from_integer(num_bigint::BigInt::from(1u64 << k));
    let mut r = MatrixChain::zero(d);
    for perm in permutations(k) {
        let full: Vec<usize> = std::iter::once(0).chain(perm.iter().map(|&i| i + 1)).collect();
        let s = sgn(koszul_odd(&degs, &full));
        let slots = full.iter().map(|&i| jac[i].clone()).collect();
        r.add_slots(slots, &norm * s);
    }
    Ok(r)
}

/// The second displayed form, `((−1)^k/(2^k (k+1))) Σ_{τ∈S_{k+1}} ε(τ) (JT_{τ(0)}, …)`;
/// it agrees with [`atiyah_cochain`] on cyclic classes.
pub fn atiyah_cochain_symmetric(fields: &[VectorField]) -> Result<MatrixChain, CyclicError> {
    let k = fields.len().checked_sub(1).ok_or(CyclicError::Arity { expected: 1, got: 0 })?;
    let d = fields[0].dim();
    let degs = shifted_degrees(fields)?;
    let jac: Vec<Vec<(MatUnit, Rational)>> = fields.iter().map(jacobian_slot).collect();
    let norm = sgn(k % 2 == 1) / Rational::from_integer(num_bigint::BigInt::from((1u64 << k) * (k as u64 + 1)));
    let mut r = MatrixChain::zero(d);
    for perm in permutations(k + 1) {
        let s = sgn(koszul_odd(&degs, &perm));
        let slots = perm.iter().map(|&i| jac[i].clone()).collect();
        r.add_slots(slots, &norm * s);
    }
    Ok(r)
}

/// `𝔠_{k+1} = Tr c̃_{k+1}` as a cyclic class.
pub fn traced_atiyah(fields: &[VectorField]) -> Result<CyclicChain, CyclicError> {
    Ok(trace_map(&atiyah_cochain(fields)?).cyclic())
}

fn word_fields(d: usize, word: &[VFLetter]) -> Vec<VectorField> {
    word.iter().map(|l| VectorField::from_letter(d, l)).collect()
}

/// `c̃` extended linearly to chains of the dg Witt algebra.
pub fn atiyah_on_chain(d: usize, c: &WittChain) -> MatrixChain {
    let mut r = MatrixChain::zero(d);
    for (w, x) in &c.terms {
        let img = atiyah_cochain(&word_fields(d, w)).expect("letters are homogeneous");
        r = r.add(&img.scale(x));
    }
    r
}

/// The coefficient-action part of the Lie differential of `c̃`:
/// `Σᵢ (−1)^{κᵢ + |Tᵢ|} Tᵢ · c̃(T₀, …, T̂ᵢ, …, T_k)`, where `κᵢ` is the
/// Koszul sign of moving `Tᵢ` to the front in the shifted degrees.
pub fn atiyah_action_term(d: usize, c: &WittChain) -> MatrixChain {
    let mut r = MatrixChain::zero(d);
    for (w, x) in &c.terms {
        if w.len() < 2 {
            continue;
        }
        let fields = word_fields(d, w);
        let sd: Vec<i64> = w.iter().map(|l| i64::from(l.degree()) - 1).collect();
        for i in 0..w.len() {
            let before: i64 = sd[..i].iter().sum();
            let s = sgn(odd(sd[i] * before + i64::from(w[i].degree())));
            let rest: Vec<VectorField> =
                fields.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, t)| t.clone()).collect();
            let img = atiyah_cochain(&rest).expect("letters are homogeneous").act(&fields[i]);
            r = r.add(&img.scale(&(x * &s)));
        }
    }
    r
}

/// Defect of the total cocycle identity for `c̃` on a chain `C`, after the
/// trace and in cyclic classes:
/// `Tr[(∂̄ + 2b) c̃(C) + c̃(∂C) − A(C)]` with `∂ = ∂̄ + d^Lie` the total
/// boundary of chains and `A` the action term.  The weight 2 on `b` is the
/// one matching the `1/2^k` normalization of `c̃_{k+1}`; it vanishes
/// identically.
pub fn atiyah_cocycle_defect(d: usize, c: &WittChain) -> CyclicChain {
    let img = atiyah_on_chain(d, c);
    let lhs = img
        .dbar()
        .add(&img.b().scale(&qi(2)))
        .add(&atiyah_on_chain(d, &crate::cechain::total_boundary(c)))
        .sub(&atiyah_action_term(d, c));
    trace_map(&lhs).cyclic()
}

/// A Chern monomial `ch₁^{i₁} ch₂^{i₂} ⋯` as a cochain on the dg Witt
/// algebra, with an overall scale fixed by calibration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChernCocycle {
    pub d: usize,
    pub exponents: Vec<usize>,
    pub scale: Rational,
}

/// The cochain `ρ(Tr(𝔠₁)^{*i₁} * Tr(𝔠₂)^{*i₂} * ⋯)` (unit scale).
pub fn chern_cocycle(d: usize, exponents: &[usize]) -> Result<ChernCocycle, CyclicError> {
    let total: usize = exponents.iter().enumerate().map(|(p, i)| (p + 1) * i).sum();
    if total != d + 1 || exponents.len() > d + 1 {
        return Err(CyclicError::BadExponents { exps: exponents.to_vec(), target: d + 1 });
    }
    Ok(ChernCocycle { d, exponents: exponents.to_vec(), scale: Rational::one() })
}

impl ChernCocycle {
    /// Arities of the star factors, in order.
    pub fn factors(&self) -> Vec<usize> {
        let mut f = Vec::new();
        for (p, &i) in self.exponents.iter().enumerate() {
            f.extend(std::iter::repeat_n(p + 1, i));
        }
        f
    }

    /// Value on an ordered tuple of homogeneous fields (before scaling).
    ///
    /// The convolution sums over unshuffles of the inputs into consecutive
    /// blocks for the factors, weighted by the Koszul sign of the unshuffle.
    /// No further sign arises from moving a later factor past earlier
    /// inputs: in `x * y = x × B(y)` the factor moved is `B ∘ 𝔠ₖ`, of
    /// degree zero.
    pub fn eval_raw(&self, fields: &[VectorField]) -> Result<Rational, CyclicError> {
        if fields.len() != self.d + 1 {
            return Err(CyclicError::Arity { expected: self.d + 1, got: fields.len() });
        }
        let degs = shifted_degrees(fields)?;
        let factors = self.factors();
        let mut total = Rational::zero();
        for assign in block_assignments(fields.len(), &factors) {
            let order: Vec<usize> = assign.iter().flatten().copied().collect();
            let sign = koszul_odd(&degs, &order);
            let mut acc: Option<CyclicChain> = None;
            for block in &assign {
                let fs: Vec<VectorField> = block.iter().map(|&i| fields[i].clone()).collect();
                let c = traced_atiyah(&fs)?;
                acc = Some(match acc {
                    None => c,
                    Some(a) => a.star(&c),
                });
            }
            if let Some(a) = acc {
                total += sgn(sign) * rho(&a);
            }
        }
        Ok(total)
    }

    /// Scaled value on an ordered tuple.
    pub fn eval(&self, fields: &[VectorField]) -> Result<Rational, CyclicError> {
        Ok(&self.scale * self.eval_raw(fields)?)
    }

    /// Value on a canonical chain word.
    pub fn eval_word(&self, word: &[VFLetter]) -> Rational {
        if word.len() != self.d + 1 {
            return Rational::zero();
        }
        let fs: Vec<VectorField> = word.iter().map(|l| VectorField::from_letter(self.d, l)).collect();
        self.eval(&fs).expect("letters are homogeneous")
    }

    /// Pairing with a chain of the dg Witt algebra.
    pub fn pair(&self, c: &WittChain) -> Rational {
        let mut r = Rational::zero();
        for (w, x) in &c.terms {
            r += x * self.eval_word(w);
        }
        r
    }

    /// Fix the scale so that the pairing with `c` equals `value`; returns
    /// `None` if the raw pairing vanishes.
    pub fn calibrated(&self, c: &WittChain, value: &Rational) -> Option<ChernCocycle> {
        let raw = ChernCocycle { scale: Rational::one(), ..self.clone() }.pair(c);
        if raw.is_zero() {
            return None;
        }
        Some(ChernCocycle { scale: value / raw, ..self.clone() })
    }
}

/// Ordered assignments of `0..n` to blocks of the given sizes, each block
/// increasing (unshuffles).
fn block_assignments(n: usize, sizes: &[usize]) -> Vec<Vec<Vec<usize>>> {
    fn rec(rest: &[usize], sizes: &[usize], out: &mut Vec<Vec<Vec<usize>>>, cur: &mut Vec<Vec<usize>>) {
        if sizes.is_empty() {
            if rest.is_empty() {
                out.push(cur.clone());
            }
            return;
        }
        let k = sizes[0];
        for pick in combinations(rest.len(), k) {
            let block: Vec<usize> = pick.iter().map(|&i| rest[i]).collect();
            let remaining: Vec<usize> = rest.iter().enumerate().filter(|(i, _)| !pick.contains(i)).map(|(_, &x)| x).collect();
            cur.push(block);
            rec(&remaining, &sizes[1..], out, cur);
            cur.pop();
        }
    }
    let all: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    rec(&all, sizes, &mut out, &mut Vec::new());
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Which index formula to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexForm {
    /// `Res(Tr JT₁ · D Tr JT₂ · D Tr JT₃)`.
    Ch1Cubed,
    /// `(1/6) Σ_τ ε(τ) Res(Tr JT_{τ(1)} · Tr(D JT_{τ(2)} · D JT_{τ(3)}))`.
    Ch1Ch2,
}

/// Direct evaluation of the `d = 2` index formulas on an ordered triple of
/// homogeneous fields; `ε` is the Koszul sign in the shifted degrees.
pub fn chern_index_form_d2(which: IndexForm, fields: &[VectorField]) -> Result<Rational, CyclicError> {
    if fields.len() != 3 {
        return Err(CyclicError::Arity { expected: 3, got: fields.len() });
    }
    if fields.iter().any(|t| t.dim() != 2) {
        return Err(CyclicError::Dimension);
    }
    let degs = shifted_degrees(fields)?;
    match which {
        IndexForm::Ch1Cubed => {
            let div: Vec<JElement> = fields.iter().map(VectorField::divergence).collect();
            Ok(div[0].mul(&hol_d_left(&div[1])).mul(&hol_d_left(&div[2])).residue())
        }
        IndexForm::Ch1Ch2 => {
            let mut r = Rational::zero();
            for p in permutations(3) {
                let j2 = fields[p[1]].jacobian();
                let j3 = fields[p[2]].jacobian();
                let mut tr = JElement::zero(2);
                for (j, row) in j2.iter().enumerate() {
                    for (k, e) in row.iter().enumerate() {
                        tr.add_assign_scaled(&hol_d_left(e).mul(&hol_d_left(&j3[k][j])), &Rational::one());
                    }
                }
                let v = fields[p[0]].divergence().mul(&tr).residue();
                r += sgn(koszul_odd(&degs, &p)) * v;
            }
            Ok(r / qi(6))
        }
    }
}

/// Index formula evaluated on a canonical chain word (zero off arity 3).
pub fn index_form_word(which: IndexForm, word: &[VFLetter]) -> Rational {
    if word.len() != 3 {
        return Rational::zero();
    }
    let fs: Vec<VectorField> = word.iter().map(|l| VectorField::from_letter(2, l)).collect();
    chern_index_form_d2(which, &fs).expect("letters are homogeneous")
}

/// Pairing of an index formula with a chain.
pub fn index_form_pair(which: IndexForm, c: &WittChain) -> Rational {
    let mut r = Rational::zero();
    for (w, x) in &c.terms {
        r += x * index_form_word(which, w);
    }
    r
}

impl<S: SlotBasis> fmt::Display for Chain<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| {
                let slots: Vec<String> = w.iter().map(|s| s.to_string()).collect();
                format!("{}·({})", crate::exactalg::fmt_q(c), slots.join(", "))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jouanolou::ODD_P;

    fn jm(z: [u32; 2], x: [u32; 2], p: bool) -> JMonomial {
        JMonomial::new(z, x, if p { ODD_P } else { 0 })
    }

    #[test]
    fn rho_examples() {
        let c = CyclicChain::word(2, &[jm([0, 0], [0, 0], true), jm([1, 0], [0, 0], false), jm([0, 1], [0, 0], false)], qi(1));
        assert_eq!(rho(&c), qi(1));
        let c = CyclicChain::word(2, &[jm([1, 0], [1, 0], true), jm([1, 0], [0, 0], false), jm([0, 1], [0, 0], false)], qi(1));
        assert_eq!(rho(&c), crate::exactalg::q(1, 2));
    }

    #[test]
    fn b_squared_vanishes() {
        let c = CyclicChain::word(
            2,
            &[jm([1, 0], [0, 0], false), jm([0, 0], [1, 0], true), jm([0, 0], [1, 0], false), jm([0, 1], [0, 0], false)],
            qi(1),
        );
        assert!(c.b().b().is_zero());
    }
}
