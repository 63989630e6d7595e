//! The dg Witt Lie algebra of vector fields with Jouanolou coefficients, the
//! plain weight-graded algebras of polynomial vector fields (`𝔴₂` and its
//! ideals `L_k`), Jacobians and divergence, and the tensor modules used as
//! coefficients in homology: `Ω¹⊗Ω²`, symmetric powers of the module `𝒫` of
//! first ∂̄-cohomology classes, and symmetric powers of its
//! differential-operator analogue `𝒫̃`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactalg::{add_term, factorial, kernel_basis, qi, Rational, SparseMat};
use crate::jouanolou::{monomials_of_weight, BiWeight, JElement, JMonomial, ODD_P};

/// Errors raised by the Lie-algebra layer.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("incompatible module tag: expected {expected}, found {found}")]
    IncompatibleModule { expected: String, found: String },
    #[error("the Witt algebra basis needs deg in {{0,1}}, got {0}")]
    BadDegree(u32),
    #[error("no 𝒫-class solves the quotient problem within x-degree {0}")]
    QuotientUnresolved(u32),
}

/// A vector field `Σᵢ Tⁱ ∂ᵢ` with Jouanolou coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VectorField {
    comps: Vec<JElement>,
}

/// A basis letter of the Witt algebra: a normal-form monomial times `∂_axis`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VFLetter {
    pub mono: JMonomial,
    pub axis: usize,
}

impl VFLetter {
    /// Cohomological degree of the letter.
    pub fn degree(&self) -> u32 {
        self.mono.degree()
    }

    /// Bi-weight `wt(monomial) − e_axis`.
    pub fn weight(&self, d: usize) -> BiWeight {
        let mut w = self.mono.weight(d);
        w[self.axis] -= 1;
        w
    }
}

impl fmt::Display for VFLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mono == JMonomial::ONE {
            write!(f, "d{}", self.axis + 1)
        } else {
            write!(f, "{}*d{}", self.mono, self.axis + 1)
        }
    }
}

impl VectorField {
    /// The zero field in dimension `d`.
    pub fn zero(d: usize) -> Self {
        VectorField {
            comps: (0..d).map(|_| JElement::zero(d)).collect(),
        }
    }

    /// Build from coefficient components (length = d).
    pub fn new(comps: Vec<JElement>) -> Self {
        let d = comps.len();
        assert!(comps.iter().all(|c| c.dim() == d), "component dimension mismatch");
        VectorField { comps }
    }

    /// `f ∂_axis`.
    pub fn along(axis: usize, f: JElement) -> Self {
        let d = f.dim();
        let mut v = Self::zero(d);
        v.comps[axis] = f;
        v
    }

    /// A single letter as a field.
    pub fn from_letter(d: usize, l: &VFLetter) -> Self {
        Self::along(l.axis, JElement::monomial(d, l.mono, Rational::one()))
    }

    /// Polynomial field `c · z^a ∂_axis`.
    pub fn zmono(d: usize, a: [u32; 2], axis: usize, c: i64) -> Self {
        Self::along(axis, JElement::monomial(d, JMonomial::new(a, [0, 0], 0), qi(c)))
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    /// Component `Tⁱ`.
    pub fn comp(&self, i: usize) -> &JElement {
        &self.comps[i]
    }

    /// All components.
    pub fn comps(&self) -> &[JElement] {
        &self.comps
    }

    /// Whether the field vanishes.
    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(JElement::is_zero)
    }

    /// Sum.
    pub fn add(&self, o: &VectorField) -> VectorField {
        VectorField {
            comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.add(b)).collect(),
        }
    }

    /// Difference.
    pub fn sub(&self, o: &VectorField) -> VectorField {
        VectorField {
            comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &Rational) -> VectorField {
        VectorField {
            comps: self.comps.iter().map(|a| a.scale(c)).collect(),
        }
    }

    /// Multiply every component on the left by a Jouanolou element.
    pub fn lmul(&self, f: &JElement) -> VectorField {
        VectorField {
            comps: self.comps.iter().map(|a| f.mul(a)).collect(),
        }
    }

    /// Component of fixed cohomological degree.
    pub fn degree_component(&self, deg: u32) -> VectorField {
        VectorField {
            comps: self.comps.iter().map(|a| a.degree_component(deg)).collect(),
        }
    }

    /// Degree of a homogeneous field (`None` if zero or mixed).
    pub fn degree(&self) -> Option<u32> {
        let mut deg = None;
        for c in &self.comps {
            for m in c.terms().keys() {
                match deg {
                    None => deg = Some(m.degree()),
                    Some(d) if d != m.degree() => return None,
                    _ => {}
                }
            }
        }
        deg
    }

    /// Expansion into basis letters.
    pub fn letters(&self) -> BTreeMap<VFLetter, Rational> {
        let mut out = BTreeMap::new();
        for (axis, c) in self.comps.iter().enumerate() {
            for (m, x) in c.terms() {
                out.insert(VFLetter { mono: *m, axis }, x.clone());
            }
        }
        out
    }

    /// Rebuild from letters.
    pub fn from_letters(d: usize, ls: &BTreeMap<VFLetter, Rational>) -> Self {
        let mut v = Self::zero(d);
        for (l, c) in ls {
            v.comps[l.axis].add_raw(l.mono, c.clone());
        }
        v
    }

    /// The super Lie bracket
    /// `[T,S]ⁱ = Tʲ ∂ⱼSⁱ − (−1)^{|T||S|} Sʲ ∂ⱼTⁱ`, extended bilinearly over
    /// the homogeneous components.
    pub fn bracket(&self, s: &VectorField) -> VectorField {
        let d = self.dim();
        let mut out = VectorField::zero(d);
        for dt in 0..2 {
            let t = self.degree_component(dt);
            if t.is_zero() {
                continue;
            }
            for ds in 0..2 {
                let sv = s.degree_component(ds);
                if sv.is_zero() {
                    continue;
                }
                let sign = if dt * ds % 2 == 1 { qi(1) } else { qi(-1) };
                for i in 0..d {
                    let mut acc = JElement::zero(d);
                    for j in 0..d {
                        acc.add_assign_scaled(&t.comps[j].mul(&sv.comps[i].partial(j)), &Rational::one());
                        acc.add_assign_scaled(&sv.comps[j].mul(&t.comps[i].partial(j)), &sign);
                    }
                    out.comps[i].add_assign_scaled(&acc, &Rational::one());
                }
            }
        }
        out
    }

    /// Componentwise ∂̄.
    pub fn dbar(&self) -> VectorField {
        VectorField {
            comps: self.comps.iter().map(JElement::dbar).collect(),
        }
    }

    /// Action on a Jouanolou element by derivation: `T·f = Σᵢ Tⁱ ∂ᵢf`.
    pub fn act(&self, f: &JElement) -> JElement {
        let mut out = JElement::zero(self.dim());
        for (i, c) in self.comps.iter().enumerate() {
            out.add_assign_scaled(&c.mul(&f.partial(i)), &Rational::one());
        }
        out
    }

    /// Jacobian matrix, entry `(j,k) = ∂ⱼ Tᵏ`.
    pub fn jacobian(&self) -> Vec<Vec<JElement>> {
        let d = self.dim();
        (0..d)
            .map(|j| (0..d).map(|k| self.comps[k].partial(j)).collect())
            .collect()
    }

    /// Divergence `Σᵢ ∂ᵢTⁱ`.
    pub fn divergence(&self) -> JElement {
        let mut out = JElement::zero(self.dim());
        for (i, c) in self.comps.iter().enumerate() {
            out.add_assign_scaled(&c.partial(i), &Rational::one());
        }
        out
    }

    /// Bi-weights occurring.
    pub fn weights(&self) -> Vec<BiWeight> {
        let d = self.dim();
        let mut ws: Vec<BiWeight> = self.letters().keys().map(|l| l.weight(d)).collect();
        ws.sort();
        ws.dedup();
        ws
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ls = self.letters();
        if ls.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = ls
            .iter()
            .map(|(l, c)| {
                if c.is_one() {
                    l.to_string()
                } else if *c == -Rational::one() {
                    format!("-{l}")
                } else {
                    format!("{}*{l}", crate::exactalg::fmt_q(c))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
    }
}

/// Matrix commutator entrywise helper: `(AB)_{jk} = Σ_t A_{jt} B_{tk}`.
pub fn mat_mul(a: &[Vec<JElement>], b: &[Vec<JElement>]) -> Vec<Vec<JElement>> {
    let d = a.len();
    (0..d)
        .map(|j| {
            (0..d)
                .map(|k| {
                    let mut acc = JElement::zero(d);
                    for t in 0..d {
                        acc.add_assign_scaled(&a[j][t].mul(&b[t][k]), &Rational::one());
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// A polynomial vector field `Σ c · z^a ∂ᵢ` (element of `𝔴₂^{poly}`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FormalVF {
    pub terms: BTreeMap<PolyLetter, Rational>,
}

/// Basis letter `z^a ∂_axis` of `𝔴₂^{poly}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolyLetter {
    pub a: [u32; 2],
    pub axis: usize,
}

impl PolyLetter {
    /// Bi-weight `a − e_axis`.
    pub fn weight(&self) -> BiWeight {
        let mut w = [i64::from(self.a[0]), i64::from(self.a[1])];
        w[self.axis] -= 1;
        w
    }

    /// Scaling weight `|a| − 1`.
    pub fn scaling(&self) -> i64 {
        i64::from(self.a[0] + self.a[1]) - 1
    }

    /// Bracket of two letters.
    pub fn bracket(&self, o: &PolyLetter) -> Vec<(PolyLetter, Rational)> {
        // [z^a ∂_i, z^b ∂_j] = b_i z^{a+b-e_i} ∂_j − a_j z^{a+b-e_j} ∂_i
        let mut out: BTreeMap<PolyLetter, Rational> = BTreeMap::new();
        let s = [self.a[0] + o.a[0], self.a[1] + o.a[1]];
        if o.a[self.axis] > 0 {
            let mut e = s;
            e[self.axis] -= 1;
            add_term(&mut out, PolyLetter { a: e, axis: o.axis }, qi(i64::from(o.a[self.axis])));
        }
        if self.a[o.axis] > 0 {
            let mut e = s;
            e[o.axis] -= 1;
            add_term(&mut out, PolyLetter { a: e, axis: self.axis }, qi(-i64::from(self.a[o.axis])));
        }
        out.into_iter().collect()
    }

    /// Embed into the Witt algebra.
    pub fn to_vf(&self) -> VectorField {
        VectorField::zmono(2, self.a, self.axis, 1)
    }
}

impl fmt::Display for PolyLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = JMonomial::new(self.a, [0, 0], 0);
        VFLetter { mono: m, axis: self.axis }.fmt(f)
    }
}

impl FormalVF {
    /// Single letter with coefficient.
    pub fn letter(a: [u32; 2], axis: usize, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        add_term(&mut terms, PolyLetter { a, axis }, c);
        FormalVF { terms }
    }

    /// Euler field `z¹∂₁ + z²∂₂`.
    pub fn euler() -> Self {
        let mut v = Self::letter([1, 0], 0, qi(1));
        v.add_assign(&Self::letter([0, 1], 1, qi(1)));
        v
    }

    /// `self += o`.
    pub fn add_assign(&mut self, o: &FormalVF) {
        for (l, c) in &o.terms {
            add_term(&mut self.terms, *l, c.clone());
        }
    }

    /// Sum.
    pub fn add(&self, o: &FormalVF) -> FormalVF {
        let mut r = self.clone();
        r.add_assign(o);
        r
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &Rational) -> FormalVF {
        let mut r = FormalVF::default();
        for (l, x) in &self.terms {
            add_term(&mut r.terms, *l, x * c);
        }
        r
    }

    /// Multiply by a monomial `z^b`.
    pub fn zmul(&self, b: [u32; 2]) -> FormalVF {
        FormalVF {
            terms: self
                .terms
                .iter()
                .map(|(l, c)| {
                    (
                        PolyLetter {
                            a: [l.a[0] + b[0], l.a[1] + b[1]],
                            axis: l.axis,
                        },
                        c.clone(),
                    )
                })
                .collect(),
        }
    }

    /// Lie bracket.
    pub fn bracket(&self, o: &FormalVF) -> FormalVF {
        let mut r = FormalVF::default();
        for (l1, c1) in &self.terms {
            for (l2, c2) in &o.terms {
                for (l, c) in l1.bracket(l2) {
                    add_term(&mut r.terms, l, c * c1 * c2);
                }
            }
        }
        r
    }

    /// Whether every term has vanishing `k`-jet (`|a| ≥ k+1`).
    pub fn in_l(&self, k: u32) -> bool {
        self.terms.keys().all(|l| l.a[0] + l.a[1] > k)
    }

    /// Embed into the Witt algebra.
    pub fn to_vf(&self) -> VectorField {
        let mut v = VectorField::zero(2);
        for (l, c) in &self.terms {
            v = v.add(&l.to_vf().scale(c));
        }
        v
    }

    /// Whether zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for FormalVF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_vf().fmt(f)
    }
}

/// Which Lie algebra a basis enumeration refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algebra {
    /// The dg Witt algebra, truncated to monomials of x-degree at most `max_x`.
    Witt2 { max_x: u32 },
    /// Polynomial vector fields `𝔴₂^{poly}`.
    W2,
    /// The ideal `L_k` of fields with vanishing `k`-jet.
    L(u32),
}

/// Deterministic basis of a fixed bi-weight and degree.
pub fn basis_of_weight(alg: Algebra, w: BiWeight, deg: u32) -> Result<Vec<VFLetter>, LieError> {
    match alg {
        Algebra::Witt2 { max_x } => {
            if deg > 1 {
                return Err(LieError::BadDegree(deg));
            }
            let odd = if deg == 1 { ODD_P } else { 0 };
            let mut out = Vec::new();
            for axis in 0..2 {
                let mut mw = w;
                mw[axis] += 1;
                for m in monomials_of_weight(mw, odd, max_x) {
                    out.push(VFLetter { mono: m, axis });
                }
            }
            out.sort_by_key(|l| (l.mono.z, l.mono.x, l.mono.odd, l.axis));
            Ok(out)
        }
        Algebra::W2 | Algebra::L(_) => {
            if deg != 0 {
                return Err(LieError::BadDegree(deg));
            }
            Ok(poly_basis_of_weight(alg, w)
                .into_iter()
                .map(|l| VFLetter {
                    mono: JMonomial::new(l.a, [0, 0], 0),
                    axis: l.axis,
                })
                .collect())
        }
    }
}

/// Basis of `𝔴₂` or `L_k` at a bi-weight, as polynomial letters.
pub fn poly_basis_of_weight(alg: Algebra, w: BiWeight) -> Vec<PolyLetter> {
    let kmin = match alg {
        Algebra::L(k) => i64::from(k) + 1,
        _ => 0,
    };
    let mut out = Vec::new();
    for axis in 0..2 {
        let mut a = w;
        a[axis] += 1;
        if a[0] < 0 || a[1] < 0 || a[0] + a[1] < kmin {
            continue;
        }
        out.push(PolyLetter {
            a: [a[0] as u32, a[1] as u32],
            axis,
        });
    }
    out.sort_by_key(|l| (l.a, l.axis));
    out
}

// ---------------------------------------------------------------------------
// The module 𝒫 of first ∂̄-cohomology classes of the Witt algebra.
// ---------------------------------------------------------------------------

/// Basis symbol `∂₁^{(k)} ∂₂^{(ℓ)} P · ∂_axis` of `𝒫`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PBasis {
    pub k: u32,
    pub l: u32,
    pub axis: usize,
}

impl PBasis {
    /// Bi-weight `(−1−k−δ_{axis,1}, −1−ℓ−δ_{axis,2})`.
    pub fn weight(&self) -> BiWeight {
        let mut w = [-1 - i64::from(self.k), -1 - i64::from(self.l)];
        w[self.axis] -= 1;
        w
    }

    /// The representative `((k+ℓ+1)!/(k!ℓ!)) (x¹)^k (x²)^ℓ P ∂_axis`.
    pub fn lift(&self) -> VectorField {
        let c = Rational::new(
            factorial(u64::from(self.k + self.l + 1)),
            factorial(u64::from(self.k)) * factorial(u64::from(self.l)),
        );
        VectorField::along(
            self.axis,
            JElement::monomial(2, JMonomial::new([0, 0], [self.k, self.l], ODD_P), c),
        )
    }

    /// All basis symbols at a bi-weight.
    pub fn of_weight(w: BiWeight) -> Vec<PBasis> {
        let mut out = Vec::new();
        for axis in 0..2 {
            let mut kl = [-1 - w[0], -1 - w[1]];
            kl[axis] -= 1;
            if kl[0] >= 0 && kl[1] >= 0 {
                out.push(PBasis {
                    k: kl[0] as u32,
                    l: kl[1] as u32,
                    axis,
                });
            }
        }
        out.sort();
        out
    }
}

impl fmt::Display for PBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d1^({})d2^({})P*d{}", self.k, self.l, self.axis + 1)
    }
}

/// Decompose the degree-1 part of a Jouanolou element into first
/// ∂̄-cohomology classes `∂₁^{(k)}∂₂^{(ℓ)}P`, keyed by `[k, ℓ]`.  The
/// coefficient is read off from the residue pairing with `(z¹)^k(z²)^ℓ`,
/// which is perfect on classes and kills ∂̄-exact terms.
pub fn h1_classes(f: &JElement) -> BTreeMap<[u32; 2], Rational> {
    let mut out = BTreeMap::new();
    let vol = JElement::dz(2, 0).mul(&JElement::dz(2, 1));
    for (m, x) in f.degree_component(1).terms() {
        let w = m.weight(2);
        let (k, l) = (-1 - w[0], -1 - w[1]);
        if k < 0 || l < 0 {
            continue;
        }
        let kl = [k as u32, l as u32];
        let zk = JElement::monomial(2, JMonomial::new(kl, [0, 0], 0), Rational::one());
        let r = zk.mul(&JElement::monomial(2, *m, x.clone())).mul(&vol).residue();
        add_term(&mut out, kl, r);
    }
    out
}

/// Project a degree-1 field onto `𝒫`.
pub fn p_project(v: &VectorField) -> BTreeMap<PBasis, Rational> {
    let mut out = BTreeMap::new();
    for (axis, c) in v.comps().iter().enumerate() {
        for (kl, r) in h1_classes(c) {
            add_term(&mut out, PBasis { k: kl[0], l: kl[1], axis }, r);
        }
    }
    out
}

/// Action of a polynomial vector field on a `𝒫` basis symbol, computed from
/// the bracket with the lifted representative and the residue projection.
pub fn p_action(t: &FormalVF, b: &PBasis) -> BTreeMap<PBasis, Rational> {
    let mut out = BTreeMap::new();
    for (l, c) in &t.terms {
        for (p, x) in p_action_letter(l, b) {
            add_term(&mut out, p, x * c);
        }
    }
    out
}

/// [`p_action`] on a single letter, memoized.
pub fn p_action_letter(l: &PolyLetter, b: &PBasis) -> Vec<(PBasis, Rational)> {
    type Cache = Mutex<HashMap<(PolyLetter, PBasis), Vec<(PBasis, Rational)>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("cache lock").get(&(*l, *b)) {
        return v.clone();
    }
    let v: Vec<(PBasis, Rational)> = p_project(&l.to_vf().bracket(&b.lift())).into_iter().collect();
    cache.lock().expect("cache lock").insert((*l, *b), v.clone());
    v
}

/// The four printed action formulas for `𝒫`, for monomial fields
/// `(z¹)^{a+1}(z²)^b ∂₁` and `(z¹)^a(z²)^{b+1} ∂₂`.  With `corrected =
/// true`, the two superscripts that carry `k` where `ℓ` is dimensionally
/// forced are replaced by `ℓ`.  Returns `None` for letters not of these
/// shapes.
pub fn p_action_printed(t: &PolyLetter, b: &PBasis, corrected: bool) -> Option<BTreeMap<PBasis, Rational>> {
    let (k, l) = (i64::from(b.k), i64::from(b.l));
    let mut out = BTreeMap::new();
    let mut put = |m: i64, n: i64, axis: usize, c: i64| {
        if m >= 0 && n >= 0 && c != 0 {
            add_term(
                &mut out,
                PBasis {
                    k: m as u32,
                    l: n as u32,
                    axis,
                },
                qi(c),
            );
        }
    };
    match t.axis {
        0 => {
            if t.a[0] == 0 {
                return None;
            }
            let (a, bb) = (i64::from(t.a[0]) - 1, i64::from(t.a[1]));
            if b.axis == 0 {
                put(k - a, l - bb, 0, -(k + a + 2));
            } else {
                put(k - a, l - bb, 1, -(k + 1));
                let second = if corrected { l } else { k };
                put(k - a - 1, second - bb + 1, 0, -bb);
            }
        }
        _ => {
            if t.a[1] == 0 {
                return None;
            }
            let (a, bb) = (i64::from(t.a[0]), i64::from(t.a[1]) - 1);
            if b.axis == 0 {
                put(k - a, l - bb, 0, -(l + 1));
                let second = if corrected { l } else { k };
                put(k - a + 1, second - bb - 1, 1, -a);
            } else {
                put(k - a, l - bb, 1, -(l + bb + 2));
            }
        }
    }
    Some(out)
}

/// Independent validation path: act on the representative in the Witt
/// algebra, then solve `[T, lift] − Σ c_j lift_j ∈ ∂̄(degree-0 fields)` at
/// the target weight by exact linear algebra, raising the x-degree bound
/// until the system is solvable.
pub fn h1_action_check(t: &FormalVF, b: &PBasis) -> Result<BTreeMap<PBasis, Rational>, LieError> {
    let r = t.to_vf().bracket(&b.lift());
    if r.is_zero() {
        return Ok(BTreeMap::new());
    }
    let ws = r.weights();
    let mut out = BTreeMap::new();
    for w in ws {
        let rw = VectorField::from_letters(
            2,
            &r.letters().into_iter().filter(|(l, _)| l.weight(2) == w).collect(),
        );
        let targets = PBasis::of_weight(w);
        let max_r = rw.letters().keys().map(|l| l.mono.x_degree()).max().unwrap_or(0);
        let mut solved = None;
        for extra in 1..=6u32 {
            let n = max_r + extra;
            let pre = basis_of_weight(Algebra::Witt2 { max_x: n }, w, 0)?;
            let images: Vec<VectorField> = pre.iter().map(|l| VectorField::from_letter(2, l).dbar()).collect();
            let mut cols: Vec<BTreeMap<VFLetter, Rational>> = vec![rw.letters()];
            cols.extend(targets.iter().map(|p| p.lift().letters()));
            cols.extend(images.iter().map(VectorField::letters));
            let mut index: BTreeMap<VFLetter, usize> = BTreeMap::new();
            for c in &cols {
                for l in c.keys() {
                    let len = index.len();
                    index.entry(*l).or_insert(len);
                }
            }
            let mut m = SparseMat::zeros(index.len(), cols.len());
            for (j, c) in cols.iter().enumerate() {
                for (l, x) in c {
                    m.set(index[l], j, x.clone()).expect("in range");
                }
            }
            let ker = kernel_basis(&m);
            if let Some(v) = ker.iter().find(|v| !v[0].is_zero()) {
                let s = v[0].clone();
                let coeffs: Vec<Rational> = (0..targets.len()).map(|j| -(&v[1 + j] / &s)).collect();
                solved = Some(coeffs);
                break;
            }
        }
        let coeffs = solved.ok_or(LieError::QuotientUnresolved(max_r + 6))?;
        for (p, c) in targets.iter().zip(coeffs) {
            add_term(&mut out, *p, c);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Tensor modules.
// ---------------------------------------------------------------------------

/// Tags of the implemented tensor modules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModuleTag {
    /// `Ω¹ ⊗ Ω²` (one-forms tensored with the volume form).
    OmegaOneTwo,
    /// `S^j(𝒫)`.
    SymP(usize),
    /// `S^j(𝒫̃)` (differential-operator coefficients).
    SymPTilde(usize),
}

impl fmt::Display for ModuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuleTag::OmegaOneTwo => write!(f, "Omega1(x)Omega2"),
            ModuleTag::SymP(j) => write!(f, "S^{j}(P)"),
            ModuleTag::SymPTilde(j) => write!(f, "S^{j}(P~)"),
        }
    }
}

/// Basis symbol of `𝒫̃`: `(∂₁^{(p₁)}∂₂^{(p₂)}P) ∂₁^{n₁}∂₂^{n₂}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PTildeBasis {
    pub p: [u32; 2],
    pub n: [u32; 2],
}

/// Basis keys of tensor-module elements.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModKey {
    /// `z^a dz^axis ⊗ dz¹∧dz²`.
    Omega { a: [u32; 2], axis: usize },
    /// Sorted multiset of `𝒫` symbols.
    PSym(Vec<PBasis>),
    /// Sorted multiset of `𝒫̃` symbols.
    PTildeSym(Vec<PTildeBasis>),
}

/// Element of one of the tensor modules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorModuleElement {
    pub tag: ModuleTag,
    pub terms: BTreeMap<ModKey, Rational>,
}

impl TensorModuleElement {
    /// Zero element with a tag.
    pub fn zero(tag: ModuleTag) -> Self {
        TensorModuleElement {
            tag,
            terms: BTreeMap::new(),
        }
    }

    /// Single basis element.
    pub fn basis(tag: ModuleTag, key: ModKey) -> Self {
        let mut e = Self::zero(tag);
        e.terms.insert(key, Rational::one());
        e
    }

    /// `z^a dz^axis ⊗ vol`.
    pub fn omega(a: [u32; 2], axis: usize) -> Self {
        Self::basis(ModuleTag::OmegaOneTwo, ModKey::Omega { a, axis })
    }

    /// Symmetric product of `𝒫` symbols.
    pub fn psym(mut ps: Vec<PBasis>) -> Self {
        ps.sort();
        Self::basis(ModuleTag::SymP(ps.len()), ModKey::PSym(ps))
    }
}

/// Lie derivative of `z^a dz^i ⊗ vol` along a polynomial letter.
fn omega_action(t: &PolyLetter, a: [u32; 2], i: usize) -> BTreeMap<ModKey, Rational> {
    let mut out = BTreeMap::new();
    let b = t.a;
    let j = t.axis;
    // ξ(f): ξ = z^b ∂_j, f = z^a → a_j z^{a+b−e_j}
    if a[j] > 0 {
        let mut e = [a[0] + b[0], a[1] + b[1]];
        e[j] -= 1;
        add_term(&mut out, ModKey::Omega { a: e, axis: i }, qi(i64::from(a[j])));
    }
    // f · d(ξ^i) = f Σ_k ∂_k ξ^i dz^k ; ξ^i = δ_{ij} z^b
    if i == j {
        for k in 0..2 {
            if b[k] > 0 {
                let mut e = [a[0] + b[0], a[1] + b[1]];
                e[k] -= 1;
                add_term(&mut out, ModKey::Omega { a: e, axis: k }, qi(i64::from(b[k])));
            }
        }
    }
    // f · div(ξ) dz^i ⊗ vol ; div(z^b ∂_j) = b_j z^{b−e_j}
    if b[j] > 0 {
        let mut e = [a[0] + b[0], a[1] + b[1]];
        e[j] -= 1;
        add_term(&mut out, ModKey::Omega { a: e, axis: i }, qi(i64::from(b[j])));
    }
    out
}

/// Action of a polynomial vector field on a tensor-module element: Lie
/// derivative on `Ω¹⊗Ω²`, the computed `𝒫` action extended as a derivation
/// on `S^j(𝒫)`, and the computed `𝒫̃` action (see
/// [`crate::diffweyl::ptilde_action`]) extended as a derivation on `S^j(𝒫̃)`.
pub fn module_action(t: &FormalVF, m: &TensorModuleElement) -> Result<TensorModuleElement, LieError> {
    let mut out = TensorModuleElement::zero(m.tag);
    for (key, c) in &m.terms {
        for (l, x) in &t.terms {
            let cx = c * x;
            match (m.tag, key) {
                (ModuleTag::OmegaOneTwo, ModKey::Omega { a, axis }) => {
                    for (k, y) in omega_action(l, *a, *axis) {
                        add_term(&mut out.terms, k, y * &cx);
                    }
                }
                (ModuleTag::SymP(_), ModKey::PSym(ps)) => {
                    let lt = FormalVF::letter(l.a, l.axis, qi(1));
                    for idx in 0..ps.len() {
                        for (pb, y) in p_action(&lt, &ps[idx]) {
                            let mut nps = ps.clone();
                            nps[idx] = pb;
                            nps.sort();
                            add_term(&mut out.terms, ModKey::PSym(nps), y * &cx);
                        }
                    }
                }
                (ModuleTag::SymPTilde(_), ModKey::PTildeSym(ps)) => {
                    for idx in 0..ps.len() {
                        for (pb, y) in crate::diffweyl::ptilde_action(l, &ps[idx]) {
                            let mut nps = ps.clone();
                            nps[idx] = pb;
                            nps.sort();
                            add_term(&mut out.terms, ModKey::PTildeSym(nps), y * &cx);
                        }
                    }
                }
                _ => {
                    return Err(LieError::IncompatibleModule {
                        expected: m.tag.to_string(),
                        found: format!("{key:?}"),
                    })
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zvf(a: [u32; 2], axis: usize) -> VectorField {
        VectorField::zmono(2, a, axis, 1)
    }

    #[test]
    fn bracket_examples() {
        assert!(zvf([1, 0], 0).bracket(&zvf([0, 1], 1)).is_zero());
        assert_eq!(zvf([2, 0], 0).bracket(&zvf([1, 2], 1)), zvf([2, 2], 1));
        let expect = VectorField::zmono(2, [2, 2], 1, 2).sub(&zvf([3, 1], 0));
        assert_eq!(zvf([1, 1], 0).bracket(&zvf([2, 1], 1)), expect);
    }

    #[test]
    fn dbar_examples() {
        let x1 = VectorField::along(0, JElement::x(2, 0));
        let expect = VectorField::along(0, JElement::z(2, 1).mul(&JElement::p(2)).neg());
        assert_eq!(x1.dbar(), expect);
        assert!(VectorField::along(0, JElement::p(2)).dbar().is_zero());
    }

    #[test]
    fn act_and_jacobian() {
        let z1 = JElement::z(2, 0);
        assert_eq!(zvf([1, 0], 0).act(&z1), z1);
        let x1 = JElement::x(2, 0);
        assert_eq!(zvf([0, 0], 0).act(&x1), x1.mul(&x1).neg());
        let p = JElement::p(2);
        assert_eq!(VectorField::along(0, p.clone()).act(&z1), p);
        let j = VectorField::along(0, JElement::p(2)).jacobian();
        assert_eq!(j[0][0], JElement::x(2, 0).mul(&p).scale(&qi(-2)));
        assert_eq!(j[1][0], JElement::x(2, 1).mul(&p).scale(&qi(-2)));
        assert!(j[0][1].is_zero());
        assert_eq!(VectorField::zmono(2, [3, 0], 0, 1).divergence(), z1.pow(2).scale(&qi(3)));
    }

    #[test]
    fn bases() {
        let b = poly_basis_of_weight(Algebra::W2, [-1, 0]);
        assert_eq!(b, vec![PolyLetter { a: [0, 0], axis: 0 }]);
        let b = poly_basis_of_weight(Algebra::W2, [1, 0]);
        assert_eq!(
            b,
            vec![PolyLetter { a: [1, 1], axis: 1 }, PolyLetter { a: [2, 0], axis: 0 }]
        );
        assert_eq!(poly_basis_of_weight(Algebra::L(1), [1, 0]).len(), 2);
    }

    #[test]
    fn p_action_base_case() {
        let b = PBasis { k: 0, l: 0, axis: 0 };
        let r = p_action(&FormalVF::letter([1, 0], 0, qi(1)), &b);
        assert_eq!(r, [(b, qi(-2))].into_iter().collect());
        let r = p_action(&FormalVF::letter([2, 0], 0, qi(1)), &b);
        assert!(r.is_empty());
    }

    #[test]
    fn omega_lie_derivative() {
        let m = TensorModuleElement::omega([0, 0], 0);
        let r = module_action(&FormalVF::letter([1, 0], 0, qi(1)), &m).unwrap();
        assert_eq!(r.terms, [(ModKey::Omega { a: [0, 0], axis: 0 }, qi(2))].into_iter().collect());
    }
}
