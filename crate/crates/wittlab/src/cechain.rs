//! Chevalley–Eilenberg chains for the dg Witt algebra and for the
//! weight-graded algebras of polynomial vector fields, with optional
//! coefficient modules; the total differential `∂̄ + d^Lie`; weight-block
//! homology dimensions; and the explicit chains used to detect second
//! cohomology classes.
//!
//! Chains live in the graded symmetric algebra on `𝔤[1]`: a letter of
//! internal degree `|x|` has shifted parity `|x| − 1`, adjacent letters swap
//! with the sign `(−1)^{(|x|−1)(|y|−1)}`, and shifted-odd letters cannot
//! repeat.  The differentials are the coderivations generated by
//! `ℓ₁(sa) = −s∂̄a` and `ℓ₂(sa, sb) = (−1)^{|a|} s[a, b]`; on words of
//! degree-zero letters this is `Σ_{i<j} (−1)^{i+j+1} [xᵢ, xⱼ] ∧ …`, so that
//! `d(a ∧ b) = [a, b]`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactalg::{add_term, q, qi, rank_of_vectors, reduce_modp, Echelon, ModpEchelon, Rational, SparseVec};
use crate::jouanolou::{BiWeight, JElement, JMonomial, ODD_P};
use crate::wittlie::{
    module_action, p_action_letter, Algebra, FormalVF, ModKey, ModuleTag, PBasis, PolyLetter, TensorModuleElement,
    VFLetter, VectorField,
};

/// Errors raised by the chain layer.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("homology block is not finite: {0}")]
    InfiniteBlock(String),
}

/// A basis letter that can appear in a chain word.
pub trait Letter: Ord + Clone + fmt::Display {
    /// Internal cohomological degree.
    fn degree(&self) -> u32;

    /// Parity after the shift by one.
    fn shifted_odd(&self) -> bool {
        self.degree().is_multiple_of(2)
    }
}

impl Letter for VFLetter {
    fn degree(&self) -> u32 {
        VFLetter::degree(self)
    }
}

impl Letter for PolyLetter {
    fn degree(&self) -> u32 {
        0
    }
}

/// Sort a word into canonical order, returning the Koszul sign, or `None`
/// if a shifted-odd letter repeats.
pub fn canonical_word<L: Letter>(word: &[L]) -> Option<(Vec<L>, bool)> {
    let mut w = word.to_vec();
    let mut neg = false;
    // insertion sort tracking swaps of shifted-odd pairs
    for i in 1..w.len() {
        let mut j = i;
        while j > 0 && w[j - 1] > w[j] {
            if w[j - 1].shifted_odd() && w[j].shifted_odd() {
                neg = !neg;
            }
            w.swap(j - 1, j);
            j -= 1;
        }
    }
    for k in 1..w.len() {
        if w[k - 1] == w[k] && w[k].shifted_odd() {
            return None;
        }
    }
    Some((w, neg))
}

/// A chain: linear combination of canonical words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CEChain<L: Letter> {
    pub terms: BTreeMap<Vec<L>, Rational>,
}

impl<L: Letter> Default for CEChain<L> {
    fn default() -> Self {
        CEChain { terms: BTreeMap::new() }
    }
}

impl<L: Letter> CEChain<L> {
    /// Zero chain.
    pub fn zero() -> Self {
        Self::default()
    }

    /// `c · (x₁ ∧ … ∧ x_n)` after canonical sorting.
    pub fn word(letters: &[L], c: Rational) -> Self {
        let mut r = Self::zero();
        r.add_word(letters, c);
        r
    }

    /// Add `c · word` (any order).
    pub fn add_word(&mut self, letters: &[L], c: Rational) {
        if let Some((w, neg)) = canonical_word(letters) {
            add_term(&mut self.terms, w, if neg { -c } else { c });
        }
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
        let mut r = Self::zero();
        for (w, x) in &self.terms {
            add_term(&mut r.terms, w.clone(), x * c);
        }
        r
    }

    /// Wedge product (concatenation then canonical sort).
    pub fn wedge(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &o.terms {
                let mut w = w1.clone();
                w.extend(w2.iter().cloned());
                r.add_word(&w, c1 * c2);
            }
        }
        r
    }

    /// Whether zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Part with exactly `n` letters.
    pub fn arity_component(&self, n: usize) -> Self {
        CEChain {
            terms: self.terms.iter().filter(|(w, _)| w.len() == n).map(|(w, c)| (w.clone(), c.clone())).collect(),
        }
    }

    /// Total degree `Σ(|xᵢ| − 1)` of a word.
    pub fn word_degree(w: &[L]) -> i64 {
        w.iter().map(|l| i64::from(l.degree()) - 1).sum()
    }

    /// Apply a coderivation generated by a unary and a binary operation.
    fn coderivation(
        &self,
        unary: &dyn Fn(&L) -> Vec<(L, Rational)>,
        binary: &dyn Fn(&L, &L) -> Vec<(L, Rational)>,
    ) -> Self {
        let mut r = Self::zero();
        for (w, c) in &self.terms {
            let n = w.len();
            for i in 0..n {
                // move letter i to the front
                let before_i = w[..i].iter().filter(|l| l.shifted_odd()).count();
                let neg_i = w[i].shifted_odd() && before_i % 2 == 1;
                let rest: Vec<L> = w.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, l)| l.clone()).collect();
                for (y, x) in unary(&w[i]) {
                    let mut nw = vec![y];
                    nw.extend(rest.iter().cloned());
                    let coef = if neg_i { -(c * x) } else { c * x };
                    r.add_word(&nw, coef);
                }
                for j in i + 1..n {
                    // then letter j to second place
                    let before_j = w[..j]
                        .iter()
                        .enumerate()
                        .filter(|&(k, l)| k != i && l.shifted_odd())
                        .count();
                    let neg_j = w[j].shifted_odd() && before_j % 2 == 1;
                    let rest2: Vec<L> = w
                        .iter()
                        .enumerate()
                        .filter(|&(k, _)| k != i && k != j)
                        .map(|(_, l)| l.clone())
                        .collect();
                    for (y, x) in binary(&w[i], &w[j]) {
                        let mut nw = vec![y];
                        nw.extend(rest2.iter().cloned());
                        let coef = if neg_i ^ neg_j { -(c * x) } else { c * x };
                        r.add_word(&nw, coef);
                    }
                }
            }
        }
        r
    }
}

impl<L: Letter> fmt::Display for CEChain<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| {
                let ws: Vec<String> = w.iter().map(ToString::to_string).collect();
                format!("{}*({})", crate::exactalg::fmt_q(c), ws.join(" ^ "))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Chains of the dg Witt algebra.
pub type WittChain = CEChain<VFLetter>;
/// Chains of polynomial vector fields (trivial coefficients).
pub type PolyChain = CEChain<PolyLetter>;

/// Wedge of vector fields, expanded multilinearly.
pub fn wedge_fields(fields: &[VectorField]) -> WittChain {
    let mut r = WittChain::word(&[], Rational::one());
    for v in fields {
        let mut c = WittChain::zero();
        for (l, x) in v.letters() {
            add_term(&mut c.terms, vec![l], x);
        }
        r = r.wedge(&c);
    }
    r
}

/// Wedge of polynomial vector fields.
pub fn wedge_poly(fields: &[FormalVF]) -> PolyChain {
    let mut r = PolyChain::word(&[], Rational::one());
    for v in fields {
        let mut c = PolyChain::zero();
        for (l, x) in &v.terms {
            add_term(&mut c.terms, vec![*l], x.clone());
        }
        r = r.wedge(&c);
    }
    r
}

fn vf_bracket_letters(a: &VFLetter, b: &VFLetter) -> Vec<(VFLetter, Rational)> {
    let br = VectorField::from_letter(2, a).bracket(&VectorField::from_letter(2, b));
    let sign = if a.degree().is_multiple_of(2) { qi(1) } else { qi(-1) };
    br.letters().into_iter().map(|(l, c)| (l, c * &sign)).collect()
}

fn vf_dbar_letter(a: &VFLetter) -> Vec<(VFLetter, Rational)> {
    VectorField::from_letter(2, a).dbar().letters().into_iter().map(|(l, c)| (l, -c)).collect()
}

/// The Lie part `d^Lie` of the boundary on dg Witt chains.
pub fn ce_boundary(c: &WittChain) -> WittChain {
    c.coderivation(&|_| Vec::new(), &vf_bracket_letters)
}

/// The internal part: `∂̄` extended as a coderivation.
pub fn dbar_chain(c: &WittChain) -> WittChain {
    c.coderivation(&vf_dbar_letter, &|_, _| Vec::new())
}

/// The total boundary `∂̄ + d^Lie`.
pub fn total_boundary(c: &WittChain) -> WittChain {
    c.coderivation(&vf_dbar_letter, &vf_bracket_letters)
}

fn poly_bracket_letters(a: &PolyLetter, b: &PolyLetter) -> Vec<(PolyLetter, Rational)> {
    a.bracket(b)
}

/// Boundary on polynomial chains with trivial coefficients.
pub fn poly_boundary(c: &PolyChain) -> PolyChain {
    c.coderivation(&|_| Vec::new(), &poly_bracket_letters)
}

/// Pair a cochain, given as a function on ordered words, with a chain.
pub fn evaluate<L: Letter>(phi: &dyn Fn(&[L]) -> Rational, c: &CEChain<L>) -> Rational {
    let mut r = Rational::zero();
    for (w, x) in &c.terms {
        r += x * phi(w);
    }
    r
}

// ---------------------------------------------------------------------------
// Chains with coefficients in a module (degree-zero algebras).
// ---------------------------------------------------------------------------

/// A module over polynomial vector fields with a weight-graded basis.
pub trait LieModule {
    /// Basis element type.
    type M: Ord + Clone + fmt::Debug;

    /// Action of a letter on a basis element.
    fn act(&self, x: &PolyLetter, m: &Self::M) -> Vec<(Self::M, Rational)>;

    /// Basis elements of a bi-weight.
    fn basis_of_weight(&self, w: BiWeight) -> Vec<Self::M>;
}

/// The trivial one-dimensional module of weight zero.
#[derive(Clone, Copy, Debug, Default)]
pub struct Trivial;

impl LieModule for Trivial {
    type M = ();
    fn act(&self, _: &PolyLetter, _: &()) -> Vec<((), Rational)> {
        Vec::new()
    }
    fn basis_of_weight(&self, w: BiWeight) -> Vec<()> {
        if w == [0, 0] {
            vec![()]
        } else {
            Vec::new()
        }
    }
}

/// The fibre `V ⊗ Λ²V` of the dual tensor module, viewed as a module over
/// fields with vanishing 0-jet through their linear part; basis `v_k ⊗ w`.
#[derive(Clone, Copy, Debug, Default)]
pub struct TangentFibre;

impl LieModule for TangentFibre {
    type M = usize;
    fn act(&self, x: &PolyLetter, &k: &usize) -> Vec<(usize, Rational)> {
        if x.a[0] + x.a[1] != 1 {
            return Vec::new();
        }
        let i = if x.a[0] == 1 { 0 } else { 1 };
        let j = x.axis;
        let mut out = BTreeMap::new();
        if i == k {
            add_term(&mut out, j, qi(-1));
        }
        if i == j {
            add_term(&mut out, k, qi(-1));
        }
        out.into_iter().collect()
    }
    fn basis_of_weight(&self, w: BiWeight) -> Vec<usize> {
        (0..2)
            .filter(|&k| {
                let mut e = [-1i64, -1];
                e[k] -= 1;
                e == w
            })
            .collect()
    }
}

/// Symmetric powers `S^j(𝒫)` with the computed action.
#[derive(Clone, Copy, Debug)]
pub struct SymP(pub usize);

fn sym_p_of_weight(j: usize, w: BiWeight, min: PBasis) -> Vec<Vec<PBasis>> {
    if j == 0 {
        return if w == [0, 0] { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    // each factor has weight ≤ (−1,−1) componentwise with sum ≤ −3
    let kmax = -w[0];
    let lmax = -w[1];
    for k in 0..=kmax.max(0) {
        for l in 0..=lmax.max(0) {
            for axis in 0..2 {
                let p = PBasis {
                    k: k as u32,
                    l: l as u32,
                    axis,
                };
                if p < min {
                    continue;
                }
                let pw = p.weight();
                let rest = [w[0] - pw[0], w[1] - pw[1]];
                for mut tail in sym_p_of_weight(j - 1, rest, p) {
                    tail.insert(0, p);
                    out.push(tail);
                }
            }
        }
    }
    out
}

impl LieModule for SymP {
    type M = Vec<PBasis>;
    fn act(&self, x: &PolyLetter, m: &Vec<PBasis>) -> Vec<(Vec<PBasis>, Rational)> {
        let mut out = BTreeMap::new();
        for idx in 0..m.len() {
            for (pb, y) in p_action_letter(x, &m[idx]) {
                let mut nm = m.clone();
                nm[idx] = pb;
                nm.sort();
                add_term(&mut out, nm, y);
            }
        }
        out.into_iter().collect()
    }
    fn basis_of_weight(&self, w: BiWeight) -> Vec<Vec<PBasis>> {
        sym_p_of_weight(self.0, w, PBasis { k: 0, l: 0, axis: 0 })
    }
}

/// Chains with module coefficients: `m ⊗ x₁ ∧ … ∧ x_q`.
pub type ModChain<M> = BTreeMap<(M, Vec<PolyLetter>), Rational>;

/// Boundary `d(m⊗x₁…x_q) = Σ_{i<j}(−1)^{i+j+1} m⊗[xᵢ,xⱼ]∧… + Σᵢ(−1)^{i+1} (xᵢ·m)⊗…`
/// (indices from 1; the overall sign matches [`poly_boundary`]).
pub fn mod_boundary<Mod: LieModule>(module: &Mod, c: &ModChain<Mod::M>) -> ModChain<Mod::M> {
    let mut out = ModChain::new();
    for ((m, w), x) in c {
        let n = w.len();
        for i in 0..n {
            let rest: Vec<PolyLetter> = w.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, l)| *l).collect();
            let sign = if (i + 1) % 2 == 0 { qi(-1) } else { qi(1) };
            for (nm, y) in module.act(&w[i], m) {
                if let Some((cw, neg)) = canonical_word(&rest) {
                    let v = &sign * &y * x;
                    add_term(&mut out, (nm, cw), if neg { -v } else { v });
                }
            }
            for j in i + 1..n {
                let sign = if (i + j) % 2 == 0 { qi(-1) } else { qi(1) };
                for (l, y) in w[i].bracket(&w[j]) {
                    let mut nw = vec![l];
                    nw.extend(w.iter().enumerate().filter(|&(k, _)| k != i && k != j).map(|(_, l)| *l));
                    if let Some((cw, neg)) = canonical_word(&nw) {
                        let v = &sign * &y * x;
                        add_term(&mut out, (m.clone(), cw), if neg { -v } else { v });
                    }
                }
            }
        }
    }
    out
}

fn letters_of_scaling(alg: Algebra, s: i64) -> Vec<PolyLetter> {
    let kmin = match alg {
        Algebra::L(k) => i64::from(k) + 1,
        _ => 0,
    };
    let deg = s + 1;
    if deg < kmin || deg < 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for a0 in 0..=deg {
        for axis in 0..2 {
            out.push(PolyLetter {
                a: [a0 as u32, (deg - a0) as u32],
                axis,
            });
        }
    }
    out
}

fn min_scaling(alg: Algebra) -> i64 {
    match alg {
        Algebra::L(k) => i64::from(k),
        _ => -1,
    }
}

/// Strictly increasing words of `q` letters of a polynomial algebra with a
/// given total bi-weight.
pub fn words_of_weight(alg: Algebra, w: BiWeight, q: usize) -> Vec<Vec<PolyLetter>> {
    let total = w[0] + w[1];
    let smin = min_scaling(alg);
    if q == 0 {
        return if w == [0, 0] { vec![Vec::new()] } else { Vec::new() };
    }
    let smax = total - (q as i64 - 1) * smin;
    let mut pool: Vec<PolyLetter> = (smin..=smax).flat_map(|s| letters_of_scaling(alg, s)).collect();
    pool.sort();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(
        pool: &[PolyLetter],
        start: usize,
        q: usize,
        rem: BiWeight,
        smin: i64,
        cur: &mut Vec<PolyLetter>,
        out: &mut Vec<Vec<PolyLetter>>,
    ) {
        if q == 0 {
            if rem == [0, 0] {
                out.push(cur.clone());
            }
            return;
        }
        let rem_s = rem[0] + rem[1];
        for idx in start..pool.len() {
            let l = pool[idx];
            let s = l.scaling();
            if s > rem_s - (q as i64 - 1) * smin {
                continue;
            }
            let lw = l.weight();
            cur.push(l);
            rec(pool, idx + 1, q - 1, [rem[0] - lw[0], rem[1] - lw[1]], smin, cur, out);
            cur.pop();
        }
    }
    rec(&pool, 0, q, w, smin, &mut cur, &mut out);
    out
}

/// Basis of the degree-`q` chains at total bi-weight `w`, with module
/// weights restricted to the supplied list.
pub fn mod_chain_basis<Mod: LieModule>(
    module: &Mod,
    alg: Algebra,
    w: BiWeight,
    q: usize,
    module_weights: &[BiWeight],
) -> Vec<(Mod::M, Vec<PolyLetter>)> {
    let mut out = Vec::new();
    for mw in module_weights {
        let ms = module.basis_of_weight(*mw);
        if ms.is_empty() {
            continue;
        }
        let words = words_of_weight(alg, [w[0] - mw[0], w[1] - mw[1]], q);
        for m in &ms {
            for word in &words {
                out.push((m.clone(), word.clone()));
            }
        }
    }
    out
}

fn index_of<K: Ord + Clone>(index: &mut BTreeMap<K, usize>, k: &K) -> usize {
    let n = index.len();
    *index.entry(k.clone()).or_insert(n)
}

/// Images of basis chains under the boundary as sparse vectors in a shared
/// coordinate index.
fn boundary_images<Mod: LieModule>(
    module: &Mod,
    basis: &[(Mod::M, Vec<PolyLetter>)],
    index: &mut BTreeMap<(Mod::M, Vec<PolyLetter>), usize>,
) -> Vec<SparseVec> {
    basis
        .iter()
        .map(|b| {
            let mut c = ModChain::new();
            c.insert(b.clone(), Rational::one());
            let d = mod_boundary(module, &c);
            d.iter().map(|(k, x)| (index_of(index, k), x.clone())).collect()
        })
        .collect()
}

/// Dimension of `H_q` at total bi-weight `w` for a module whose weights in
/// the block form the finite list `module_weights` (the block is then
/// finite and closed under the boundary).
pub fn homology_dim_block<Mod: LieModule>(
    module: &Mod,
    alg: Algebra,
    w: BiWeight,
    q: usize,
    module_weights: &[BiWeight],
) -> usize {
    let cq = mod_chain_basis(module, alg, w, q, module_weights);
    if cq.is_empty() {
        return 0;
    }
    let mut idx_lo = BTreeMap::new();
    let dq = if q == 0 {
        Vec::new()
    } else {
        boundary_images(module, &cq, &mut idx_lo)
    };
    let rank_dq = rank_of_vectors(&dq);
    let cq1 = mod_chain_basis(module, alg, w, q + 1, module_weights);
    let mut idx_q: BTreeMap<(Mod::M, Vec<PolyLetter>), usize> = BTreeMap::new();
    for b in &cq {
        index_of(&mut idx_q, b);
    }
    let dq1 = boundary_images(module, &cq1, &mut idx_q);
    let rank_dq1 = rank_of_vectors(&dq1);
    cq.len() - rank_dq - rank_dq1
}

/// Bi-weights `(w₀, w₁)` with `w₀ + w₁ = s` that can carry chains of the
/// given algebra and degree.
fn biweights_of_scaling(s: i64, q: usize, alg: Algebra) -> Vec<BiWeight> {
    let span = s + 2 * (q as i64 + 1);
    (-span..=span).map(|a| [a, s - a]).filter(|w| !words_of_weight(alg, *w, q).is_empty()).collect()
}

/// `dim H_q(alg; ℚ)` at a scaling weight, summed over bi-weight blocks.
pub fn homology_dim_scaling(alg: Algebra, s: i64, q: usize) -> usize {
    let mut ws = biweights_of_scaling(s, q, alg);
    ws.extend(biweights_of_scaling(s, q + 1, alg));
    ws.extend(biweights_of_scaling(s, q.saturating_sub(1), alg));
    ws.sort();
    ws.dedup();
    ws.into_iter()
        .map(|w| homology_dim_block(&Trivial, alg, w, q, &[[0, 0]]))
        .sum()
}

/// `dim H_q` of fields with vanishing 0-jet with coefficients in
/// `V ⊗ Λ²V`, at total bi-weight `(0,0)`; by Shapiro's lemma this is the
/// dual of the second cohomology of formal vector fields with coefficients
/// in `Ω¹ ⊗ Ω²` when `q = 2`.
pub fn omega12_dual_homology(q: usize) -> usize {
    homology_dim_block(&TangentFibre, Algebra::L(0), [0, 0], q, &[[-2, -1], [-1, -2]])
}

/// Outcome of a truncated vanishing test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VanishingOutcome {
    /// Every cycle in the window bounds within the search bound.
    Pass { cycles: usize },
    /// Some cycles were not reached by the boundaries searched.
    Inconclusive { cycles: usize, unresolved: usize },
}

/// Truncated test of `H₂(𝔴₂; S^j𝒫) = 0` in total bi-weight `(0,0)`: cycles
/// supported on module weights `−(m¹,m²)` with `m¹+m² ≤ max_m` must be
/// boundaries of 3-chains with module weight sum at most `bound`.
///
/// With `V` the window of 2-chains, `Z = ker(d|V)` and `I` the span of the
/// boundaries searched, `I ∩ V ⊆ Z` always, so vanishing is the inequality
/// `dim(I ∩ V) ≥ dim Z`.  `dim(I ∩ V)` is counted exactly as the number of
/// echelon rows leading inside the window when coordinates outside it are
/// eliminated first.
pub fn sym_p_vanishing(j: usize, max_m: i64, bound: i64) -> VanishingOutcome {
    let module = SymP(j);
    let weights = |lo: i64, hi: i64| -> Vec<BiWeight> {
        let mut v = Vec::new();
        for s in lo..=hi {
            for a in 0..=s {
                v.push([-a, -(s - a)]);
            }
        }
        v
    };
    let c2 = mod_chain_basis(&module, Algebra::W2, [0, 0], 2, &weights(0, max_m));
    let mut idx1 = BTreeMap::new();
    let d2 = boundary_images(&module, &c2, &mut idx1);
    let dim_z = c2.len() - rank_of_vectors(&d2);
    let c3 = mod_chain_basis(&module, Algebra::W2, [0, 0], 3, &weights(0, bound));
    let mut idx2: BTreeMap<(Vec<PBasis>, Vec<PolyLetter>), usize> = BTreeMap::new();
    for b in &c2 {
        index_of(&mut idx2, b);
    }
    let window = c2.len();
    let d3 = boundary_images(&module, &c3, &mut idx2);
    // Order coordinates so that those outside the window lead.
    let reorder = |k: usize| if k >= window { k - window } else { usize::MAX / 2 + k };
    let mut d3: Vec<SparseVec> = d3
        .into_iter()
        .map(|v| v.into_iter().map(|(k, x)| (reorder(k), x)).collect())
        .collect();
    d3.sort_by_key(|v| v.len());
    // Keep a subfamily independent over 𝔽_p (hence over ℚ); dropping
    // vectors can only shrink `I ∩ V`, so the exact count below stays a
    // lower bound.
    let mut fp = ModpEchelon::new();
    let chosen: Vec<&SparseVec> = d3
        .iter()
        .filter(|v| reduce_modp(v).is_some_and(|r| fp.insert(r)))
        .collect();
    let mut ex = Echelon::new();
    for v in &chosen {
        ex.insert(v);
    }
    let dim_iv = ex.leads().filter(|&l| l >= usize::MAX / 2).count();
    if dim_iv >= dim_z {
        VanishingOutcome::Pass { cycles: dim_z }
    } else {
        VanishingOutcome::Inconclusive {
            cycles: dim_z,
            unresolved: dim_z - dim_iv,
        }
    }
}

// ---------------------------------------------------------------------------
// Tensor-module chains through the wittlie action.
// ---------------------------------------------------------------------------

/// Act on a tensor-module basis element through [`module_action`].
pub fn tensor_act(tag: ModuleTag, x: &PolyLetter, key: &ModKey) -> Vec<(ModKey, Rational)> {
    let m = TensorModuleElement::basis(tag, key.clone());
    module_action(&FormalVF::letter(x.a, x.axis, qi(1)), &m)
        .map(|r| r.terms.into_iter().collect())
        .unwrap_or_default()
}

// ---------------------------------------------------------------------------
// The explicit chains.
// ---------------------------------------------------------------------------

fn zf(a: [u32; 2], axis: usize) -> VectorField {
    VectorField::zmono(2, a, axis, 1)
}

fn jm(z: [u32; 2], x: [u32; 2], c: i64) -> JElement {
    let mut e = JElement::zero(2);
    e.add_raw(JMonomial::new(z, x, 0), qi(c));
    e
}

fn pfield(axis: usize) -> VectorField {
    VectorField::along(axis, JElement::monomial(2, JMonomial::new([0, 0], [0, 0], ODD_P), Rational::one()))
}

/// The four families `(X₁, X₂, X₃)` of degree-one/zero fields.
pub fn families() -> [[VectorField; 3]; 4] {
    [
        [pfield(0), zf([3, 0], 0), zf([0, 2], 1)],
        [pfield(0), zf([2, 0], 0), zf([1, 2], 1)],
        [pfield(0), zf([1, 1], 0), zf([2, 1], 1)],
        [pfield(0), zf([2, 1], 0), zf([1, 1], 1)],
    ]
}

/// The correctors `(Y₁₂, Y₁₃)` with `[X₁, Xᵢ] = ∂̄ Y₁ᵢ` for each family.
pub fn correctors() -> [[VectorField; 2]; 4] {
    let a = |axis: usize, terms: &[([u32; 2], [u32; 2], i64)]| {
        let mut e = JElement::zero(2);
        for (z, x, c) in terms {
            e = e.add(&jm(*z, *x, *c));
        }
        VectorField::along(axis, e)
    };
    [
        [
            a(0, &[([1, 0], [0, 1], 4), ([2, 0], [1, 1], 1)]),
            a(0, &[([0, 1], [1, 1], -1), ([0, 0], [1, 0], -1)]),
        ],
        [
            a(0, &[([0, 0], [0, 1], 3), ([1, 0], [1, 1], 1)]),
            a(1, &[([0, 1], [1, 0], -1)]).add(&a(0, &[([0, 2], [0, 2], 1)])),
        ],
        [
            a(0, &[([0, 0], [1, 0], -1), ([1, 0], [2, 0], -1)]),
            a(1, &[([0, 1], [0, 1], 2)]).add(&a(0, &[([1, 1], [0, 2], 1)])),
        ],
        [
            a(0, &[([0, 1], [0, 1], 2), ([2, 0], [2, 0], -1)]),
            a(1, &[([0, 0], [1, 0], -1)]).add(&a(0, &[([0, 1], [0, 2], 1)])),
        ],
    ]
}

/// `X₁ ∧ X₂ ∧ X₃` of a family.
pub fn family_chain(i: usize) -> WittChain {
    wedge_fields(&families()[i])
}

/// Corrector part `Y₁₂ ∧ X₃ − Y₁₃ ∧ X₂` of a family.
pub fn corrector_chain(i: usize) -> WittChain {
    let f = &families()[i];
    let y = &correctors()[i];
    wedge_fields(&[y[0].clone(), f[2].clone()]).sub(&wedge_fields(&[y[1].clone(), f[1].clone()]))
}

/// The extended cycle `X` built on the first family.
pub fn x_chain() -> WittChain {
    family_chain(0)
        .sub(&corrector_chain(0))
        .add(&wedge_fields(&[zf([0, 0], 0), zf([2, 0], 0)]).scale(&qi(2)))
}

/// `𝕏̃` plus its corrector part, followed by the polynomial tail
/// `c₁ ∂₁∧(z¹)²∂₁ + c₂ ∂₂∧(z²)²∂₂`.
pub fn x_tilde_with_tail(c1: Rational, c2: Rational) -> WittChain {
    family_chain(1)
        .sub(&family_chain(2))
        .add(&family_chain(3))
        .sub(&corrector_chain(1))
        .add(&corrector_chain(2))
        .sub(&corrector_chain(3))
        .add(&wedge_fields(&[zf([0, 0], 0), zf([2, 0], 0)]).scale(&c1))
        .add(&wedge_fields(&[zf([0, 0], 1), zf([0, 2], 1)]).scale(&c2))
}

/// `X̃` with the tail as displayed, `2 ∂₁∧(z¹)²∂₁ − 4 ∂₂∧(z²)²∂₂`.
pub fn x_tilde_as_displayed() -> WittChain {
    x_tilde_with_tail(qi(2), qi(-4))
}

/// The extended cycle `X̃`: the tail is the unique one of the displayed
/// shape that closes the chain, `½ ∂₁∧(z¹)²∂₁ + 5/2 ∂₂∧(z²)²∂₂`.
pub fn x_tilde_chain() -> WittChain {
    x_tilde_with_tail(q(1, 2), q(5, 2))
}

/// Outcome of the bracket and exactness identities for the four families.
pub fn lemma_identities() -> Vec<(String, bool)> {
    let f = families();
    let y = correctors();
    let mut out = Vec::new();
    out.push(("[X2,X3] family I".to_string(), f[0][1].bracket(&f[0][2]).is_zero()));
    let comb = f[1][1]
        .bracket(&f[1][2])
        .sub(&f[2][1].bracket(&f[2][2]))
        .add(&f[3][1].bracket(&f[3][2]));
    out.push(("[X2,X3] II - III + IV".to_string(), comb.is_zero()));
    let names = ["I", "II", "III", "IV"];
    for (i, name) in names.iter().enumerate() {
        for (k, target) in [(1usize, 0usize), (2, 1)] {
            let lhs = f[i][0].bracket(&f[i][k]);
            let ok = lhs == y[i][target].dbar();
            out.push((format!("[X1,X{}] = dbar Y1{} family {name}", k + 1, k + 1), ok));
        }
    }
    out
}

fn poly(terms: &[([u32; 2], usize, i64)]) -> FormalVF {
    let mut v = FormalVF::default();
    for (a, axis, c) in terms {
        v.add_assign(&FormalVF::letter(*a, *axis, qi(*c)));
    }
    v
}

fn eu_times(b: [u32; 2]) -> FormalVF {
    FormalVF::euler().zmul(b)
}

/// `α = z¹Eu ∧ z¹z²Eu − z²Eu ∧ (z¹)²Eu`.
pub fn alpha() -> PolyChain {
    wedge_poly(&[eu_times([1, 0]), eu_times([1, 1])]).sub(&wedge_poly(&[eu_times([0, 1]), eu_times([2, 0])]))
}

/// The chain `β`.
pub fn beta() -> PolyChain {
    let t1 = wedge_poly(&[poly(&[([2, 0], 1, 3)]), eu_times([0, 2])]);
    let t2 = wedge_poly(&[poly(&[([2, 0], 0, 2), ([1, 1], 1, -4)]), eu_times([1, 1])]);
    let t3 = wedge_poly(&[poly(&[([1, 1], 0, 2), ([0, 2], 1, -1)]), eu_times([2, 0])]);
    t1.add(&t2).sub(&t3)
}

fn quadratic_string() -> [FormalVF; 4] {
    [
        poly(&[([2, 0], 1, 1)]),
        poly(&[([2, 0], 0, 1), ([1, 1], 1, -2)]),
        poly(&[([1, 1], 0, 2), ([0, 2], 1, -1)]),
        poly(&[([0, 2], 0, 1)]),
    ]
}

fn cubic_string() -> [FormalVF; 4] {
    [
        poly(&[([3, 0], 1, 1)]),
        poly(&[([3, 0], 0, 1), ([2, 1], 1, -3)]),
        poly(&[([2, 1], 0, 1), ([1, 2], 1, -1)]),
        poly(&[([1, 2], 0, 3), ([0, 3], 1, -1)]),
    ]
}

fn pairing_chain(coeffs: [i64; 4], last: FormalVF) -> PolyChain {
    let v = quadratic_string();
    let u = cubic_string();
    let mut r = wedge_poly(&[v[0].clone(), u[3].clone()]).scale(&qi(coeffs[0]));
    r = r.add(&wedge_poly(&[v[1].clone(), u[2].clone()]).scale(&qi(coeffs[1])));
    r = r.add(&wedge_poly(&[v[2].clone(), u[1].clone()]).scale(&qi(coeffs[2])));
    r.add(&wedge_poly(&[v[3].clone(), last]).scale(&qi(coeffs[3])))
}

/// `γ`: the highest-weight vector of the `S` summand in `S³ ∧ S⁴`,
/// `v₀∧u₃ + 2 v₁∧u₂ − v₂∧u₁ − 4 v₃∧u₀` with `v` the quadratic string
/// `(z¹)²∂₂, (z¹)²∂₁−2z¹z²∂₂, 2z¹z²∂₁−(z²)²∂₂, (z²)²∂₁` and `u` the cubic
/// string `(z¹)³∂₂, (z¹)³∂₁−3(z¹)²z²∂₂, (z¹)²z²∂₁−z¹(z²)²∂₂,
/// 3z¹(z²)²∂₁−(z²)³∂₂`.
pub fn gamma() -> PolyChain {
    pairing_chain([1, 2, -1, -4], cubic_string()[0].clone())
}

/// `γ` exactly as displayed (coefficients `3, 3, −1, −4`, last factor
/// `(z¹)³∂₁`); it is neither bi-weight homogeneous nor closed.
pub fn gamma_as_displayed() -> PolyChain {
    pairing_chain([3, 3, -1, -4], poly(&[([3, 0], 0, 1)]))
}

/// `η`, with the dropped `∂₁` restored on `(z²)²` and the dropped `∂₁` on
/// `(z¹)²` in the second term (the only readings of bi-weight `(2,1)` inside
/// fields with vanishing 1-jet).
pub fn eta() -> PolyChain {
    let t1 = wedge_poly(&[eu_times([1, 0]), poly(&[([2, 0], 1, 1)]), poly(&[([0, 2], 0, 1)])]);
    let t2 = wedge_poly(&[
        eu_times([1, 0]),
        poly(&[([2, 0], 0, 1), ([1, 1], 1, -2)]),
        poly(&[([1, 1], 0, 2), ([0, 2], 1, -1)]),
    ]);
    t1.add(&t2.scale(&q(1, 3)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_example() {
        let c = wedge_poly(&[poly(&[([0, 0], 0, 1)]), poly(&[([2, 0], 0, 1)])]);
        assert_eq!(poly_boundary(&c), wedge_poly(&[poly(&[([1, 0], 0, 2)])]));
        let single = wedge_poly(&[poly(&[([1, 0], 0, 1)])]);
        assert!(poly_boundary(&single).is_zero());
    }

    #[test]
    fn lemma_identities_hold() {
        for (name, ok) in lemma_identities() {
            assert!(ok, "{name}");
        }
    }
}
