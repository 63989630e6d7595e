//! Exact rational arithmetic and deterministic sparse linear algebra.
//!
//! Every homology dimension and every identity check in the crate bottoms out
//! here.  Vectors are sparse maps from coordinate index to coefficient;
//! elimination is fraction-free (rows are kept as primitive integer vectors)
//! and pivots are chosen deterministically (rows in insertion order, pivot at
//! the lowest nonzero column), so repeated runs produce identical output.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// The ground field: arbitrary-precision rationals, always in lowest terms.
pub type Rational = BigRational;

/// Sparse rational vector keyed by coordinate index.
pub type SparseVec = BTreeMap<usize, Rational>;

/// Sparse integer vector keyed by coordinate index.
pub type SparseVecZ = BTreeMap<usize, BigInt>;

/// Errors raised by the linear-algebra layer.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgError {
    /// A boundary vector is not contained in the span of the cycles.
    #[error("boundary not a cycle")]
    BoundaryNotCycle,
    /// An entry was addressed outside the declared shape.
    #[error("index ({row}, {col}) out of range for {rows}x{cols} matrix")]
    OutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
}

/// Build the rational `n / d`.
pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Build the integer rational `n`.
pub fn qi(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Canonical text form of a rational: `p` or `p/q`.
pub fn fmt_q(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse the canonical text form produced by [`fmt_q`].
pub fn parse_q(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Add `c * v` into `acc`, dropping entries that cancel.
pub fn axpy<K: Ord + Clone>(acc: &mut BTreeMap<K, Rational>, c: &Rational, v: &BTreeMap<K, Rational>) {
    if c.is_zero() {
        return;
    }
    for (k, x) in v {
        add_term(acc, k.clone(), c * x);
    }
}

/// Add a single term into a sparse map, removing the key if it cancels.
pub fn add_term<K: Ord>(acc: &mut BTreeMap<K, Rational>, k: K, c: Rational) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match acc.entry(k) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// Sparse rational matrix with explicit shape and no stored zeros.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SparseMat {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Rational>,
}

impl SparseMat {
    /// The zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMat {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    /// The `n x n` identity.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries.insert((i, i), Rational::one());
        }
        m
    }

    /// Build from dense rows of rationals.
    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    m.entries.insert((i, j), x.clone());
                }
            }
        }
        m
    }

    /// Build from dense rows of small integers.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let dense: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect();
        Self::from_dense(&dense)
    }

    /// Build a matrix whose columns are the given sparse vectors.
    pub fn from_columns(rows: usize, columns: &[SparseVec]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (&i, x) in col {
                if !x.is_zero() {
                    m.entries.insert((i, j), x.clone());
                }
            }
        }
        m.rows = m.rows.max(m.entries.keys().map(|&(i, _)| i + 1).max().unwrap_or(0));
        m
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Read an entry (zero if absent).
    pub fn get(&self, row: usize, col: usize) -> Rational {
        self.entries.get(&(row, col)).cloned().unwrap_or_else(Rational::zero)
    }

    /// Write an entry; writing zero removes it.
    pub fn set(&mut self, row: usize, col: usize, value: Rational) -> Result<(), AlgError> {
        if row >= self.rows || col >= self.cols {
            return Err(AlgError::OutOfRange {
                row,
                col,
                rows: self.rows,
                cols: self.cols,
            });
        }
        if value.is_zero() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), value);
        }
        Ok(())
    }

    /// Iterate over stored (nonzero) entries in (row, col) order.
    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Rational)> {
        self.entries.iter()
    }

    /// Rows as sparse vectors.
    pub fn row_vectors(&self) -> Vec<SparseVec> {
        let mut out = vec![SparseVec::new(); self.rows];
        for (&(i, j), x) in &self.entries {
            out[i].insert(j, x.clone());
        }
        out
    }

    /// Columns as sparse vectors.
    pub fn column_vectors(&self) -> Vec<SparseVec> {
        let mut out = vec![SparseVec::new(); self.cols];
        for (&(i, j), x) in &self.entries {
            out[j].insert(i, x.clone());
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.rows];
        for (&(i, j), x) in &self.entries {
            out[i] += x * &v[j];
        }
        out
    }
}

/// Clear denominators and divide out the content: returns a primitive integer
/// vector spanning the same line, with positive leading coefficient.
pub fn primitive(v: &SparseVec) -> SparseVecZ {
    let mut lcm = BigInt::one();
    for x in v.values() {
        lcm = lcm.lcm(x.denom());
    }
    let mut out: SparseVecZ = v
        .iter()
        .filter(|(_, x)| !x.is_zero())
        .map(|(&k, x)| (k, x.numer() * (&lcm / x.denom())))
        .collect();
    normalize_z(&mut out);
    out
}

fn normalize_z(v: &mut SparseVecZ) {
    let mut g = BigInt::zero();
    for x in v.values() {
        g = g.gcd(x);
        if g.is_one() {
            break;
        }
    }
    let neg = v.values().next().is_some_and(|x| x.is_negative());
    if !g.is_zero() && !g.is_one() {
        for x in v.values_mut() {
            *x = &*x / &g;
        }
    }
    if neg {
        for x in v.values_mut() {
            *x = -&*x;
        }
    }
}

/// Incrementally maintained echelon basis of a subspace of ℚ^N, stored as
/// primitive integer rows keyed by their (distinct) leading index.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, SparseVecZ>,
}

impl Echelon {
    /// The zero subspace.
    pub fn new() -> Self {
        Self::default()
    }

    /// Dimension of the spanned subspace.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Leading indices of the basis rows, in increasing order.
    pub fn leads(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Top-reduce an integer vector against the basis.  The result is zero
    /// iff the input lies in the span.
    pub fn reduce(&self, mut v: SparseVecZ) -> SparseVecZ {
        loop {
            let Some((&lead, a)) = v.iter().next() else {
                return v;
            };
            let Some(row) = self.rows.get(&lead) else {
                return v;
            };
            let a = a.clone();
            let c = row[&lead].clone();
            let g = a.gcd(&c);
            let (fa, fc) = (&a / &g, &c / &g);
            // v <- fc * v - fa * row
            let mut next = SparseVecZ::new();
            let mut it_v = v.into_iter().peekable();
            let mut it_r = row.iter().peekable();
            loop {
                match (it_v.peek(), it_r.peek()) {
                    (None, None) => break,
                    (Some(_), None) => {
                        let (k, x) = it_v.next().unwrap();
                        next.insert(k, x * &fc);
                    }
                    (None, Some(_)) => {
                        let (&k, y) = it_r.next().unwrap();
                        next.insert(k, -(y * &fa));
                    }
                    (Some((kv, _)), Some((kr, _))) => {
                        let (kv, kr) = (*kv, **kr);
                        if kv < kr {
                            let (k, x) = it_v.next().unwrap();
                            next.insert(k, x * &fc);
                        } else if kr < kv {
                            let (&k, y) = it_r.next().unwrap();
                            next.insert(k, -(y * &fa));
                        } else {
                            let (k, x) = it_v.next().unwrap();
                            let (_, y) = it_r.next().unwrap();
                            let z = x * &fc - y * &fa;
                            if !z.is_zero() {
                                next.insert(k, z);
                            }
                        }
                    }
                }
            }
            normalize_z(&mut next);
            v = next;
        }
    }

    /// Insert a rational vector; returns `true` if it enlarged the span.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        self.insert_z(primitive(v))
    }

    /// Insert an integer vector; returns `true` if it enlarged the span.
    pub fn insert_z(&mut self, v: SparseVecZ) -> bool {
        let r = self.reduce(v);
        match r.keys().next() {
            None => false,
            Some(&lead) => {
                self.rows.insert(lead, r);
                true
            }
        }
    }

    /// Membership test for a rational vector.
    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(primitive(v)).is_empty()
    }
}

/// Rank over ℚ of a sparse matrix (rows processed in order, pivot at the
/// lowest column).
pub fn rank(m: &SparseMat) -> usize {
    rank_of_vectors(&m.row_vectors())
}

/// Rank of the span of a family of sparse vectors.
pub fn rank_of_vectors(vs: &[SparseVec]) -> usize {
    let mut e = Echelon::new();
    for v in vs {
        e.insert(v);
    }
    e.rank()
}

/// Reduced row echelon form over ℚ (dense); returns the pivot columns.
fn rref(m: &SparseMat) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut a: Vec<Vec<Rational>> = vec![vec![Rational::zero(); m.cols()]; m.rows()];
    for (&(i, j), x) in m.entries() {
        a[i][j] = x.clone();
    }
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols() {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..m.cols() {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    a.truncate(r);
    (a, pivots)
}

/// Basis of the null space `{v : M v = 0}` in reduced echelon form: one
/// vector per free column (in increasing order), with that free coordinate
/// equal to 1 and the other free coordinates 0.
pub fn kernel_basis(m: &SparseMat) -> Vec<Vec<Rational>> {
    let (a, pivots) = rref(m);
    let free: Vec<usize> = (0..m.cols()).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); m.cols()];
            v[f] = Rational::one();
            for (row, &p) in a.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Null space of the linear map sending the `j`-th standard basis vector to
/// `images[j]` (each a sparse vector with indices `< dim`), computed by
/// sparse elimination on the augmented vectors `(image, e_j)`.  Returns
/// sparse vectors in the source coordinates spanning the kernel.
pub fn sparse_kernel(images: &[SparseVec], dim: usize) -> Vec<SparseVec> {
    let mut e = Echelon::new();
    for (j, v) in images.iter().enumerate() {
        let mut aug = v.clone();
        aug.insert(dim + j, Rational::one());
        e.insert(&aug);
    }
    e.rows
        .iter()
        .filter(|(&lead, _)| lead >= dim)
        .map(|(_, row)| row.iter().map(|(&k, x)| (k - dim, Rational::from_integer(x.clone()))).collect())
        .collect()
}

/// Dimension of `span(columns of cycles) / span(columns of boundaries)`.
///
/// Fails with [`AlgError::BoundaryNotCycle`] if some boundary column is not
/// in the span of the cycle columns.
pub fn quotient_dim(cycles: &SparseMat, boundaries: &SparseMat) -> Result<usize, AlgError> {
    quotient_dim_vectors(&cycles.column_vectors(), &boundaries.column_vectors())
}

/// [`quotient_dim`] on explicit families of spanning vectors.
pub fn quotient_dim_vectors(cycles: &[SparseVec], boundaries: &[SparseVec]) -> Result<usize, AlgError> {
    let mut zc = Echelon::new();
    for v in cycles {
        zc.insert(v);
    }
    let mut bc = Echelon::new();
    for v in boundaries {
        if !zc.contains(v) {
            return Err(AlgError::BoundaryNotCycle);
        }
        bc.insert(v);
    }
    Ok(zc.rank() - bc.rank())
}

/// Bernoulli number `B_n` with the convention `B_1 = -1/2`, computed by the
/// Akiyama–Tanigawa transform.
pub fn bernoulli(n: usize) -> Rational {
    let mut a: Vec<Rational> = (0..=n).map(|m| q(1, m as i64 + 1)).collect();
    // Akiyama–Tanigawa: a[j] <- (j+1) (a[j] - a[j+1]) repeated n times.
    for m in 0..n {
        for j in 0..(n - m) {
            a[j] = qi(j as i64 + 1) * (&a[j] - &a[j + 1]);
        }
    }
    let b = a[0].clone();
    // The transform yields B_1 = +1/2.
    if n == 1 {
        -b
    } else {
        b
    }
}

/// Binomial coefficient as a big integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// Factorial as a big integer.
pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&SparseMat::identity(2)), 2);
        assert_eq!(rank(&SparseMat::zeros(2, 2)), 0);
        assert_eq!(rank(&SparseMat::from_i64(&[&[1, 2], &[2, 4]])), 1);
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&SparseMat::identity(3)).is_empty());
        let k = kernel_basis(&SparseMat::zeros(3, 3));
        assert_eq!(k.len(), 3);
        assert_eq!(k[1], vec![qi(0), qi(1), qi(0)]);
        let k = kernel_basis(&SparseMat::from_i64(&[&[1, 1]]));
        assert_eq!(k, vec![vec![qi(-1), qi(1)]]);
    }

    #[test]
    fn quotient_examples() {
        let z = SparseMat::identity(2);
        assert_eq!(quotient_dim(&z, &SparseMat::zeros(2, 0)), Ok(2));
        assert_eq!(quotient_dim(&z, &z), Ok(0));
        let b = SparseMat::from_i64(&[&[1], &[1]]);
        assert_eq!(quotient_dim(&z, &b), Ok(1));
        let z1 = SparseMat::from_i64(&[&[1], &[0]]);
        let b1 = SparseMat::from_i64(&[&[0], &[1]]);
        assert_eq!(quotient_dim(&z1, &b1), Err(AlgError::BoundaryNotCycle));
    }

    #[test]
    fn bernoulli_small() {
        assert_eq!(bernoulli(0), qi(1));
        assert_eq!(bernoulli(1), q(-1, 2));
        assert_eq!(bernoulli(2), q(1, 6));
        assert_eq!(bernoulli(4), q(-1, 30));
        assert_eq!(bernoulli(3), qi(0));
    }

    #[test]
    fn text_round_trip() {
        for x in [q(-3, 4), qi(7), qi(0)] {
            assert_eq!(parse_q(&fmt_q(&x)), Some(x));
        }
    }
}

/// Prime used by [`ModpEchelon`].
pub const MODP: u64 = 2_147_483_647;

fn modp_pow(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1u64;
    b %= MODP;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % MODP;
        }
        b = b * b % MODP;
        e >>= 1;
    }
    r
}

fn modp_inv(a: u64) -> u64 {
    modp_pow(a, MODP - 2)
}

/// Reduction of a rational vector modulo [`MODP`]; `None` if a denominator
/// is divisible by the prime.
pub fn reduce_modp(v: &SparseVec) -> Option<Vec<(usize, u64)>> {
    let p = BigInt::from(MODP);
    let mut out = Vec::with_capacity(v.len());
    for (&k, x) in v {
        let n = x.numer().mod_floor(&p);
        let d = x.denom().mod_floor(&p);
        let d: u64 = d.try_into().ok()?;
        if d == 0 {
            return None;
        }
        let n: u64 = n.try_into().ok()?;
        let r = n * modp_inv(d) % MODP;
        if r != 0 {
            out.push((k, r));
        }
    }
    Some(out)
}

/// Row echelon basis over the prime field `𝔽_p`, `p =` [`MODP`]; a fast
/// heuristic companion to the exact [`Echelon`].  Vectors are sorted sparse
/// lists, rows are monic and keyed by leading index.
#[derive(Debug, Clone, Default)]
pub struct ModpEchelon {
    rows: std::collections::HashMap<usize, Vec<(usize, u64)>>,
}

impl ModpEchelon {
    /// The zero subspace.
    pub fn new() -> Self {
        Self::default()
    }

    /// Dimension of the spanned subspace.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Top-reduce a vector against the basis.
    pub fn reduce(&self, mut v: Vec<(usize, u64)>) -> Vec<(usize, u64)> {
        let mut buf = Vec::new();
        loop {
            let Some(&(lead, a)) = v.first() else {
                return v;
            };
            let Some(row) = self.rows.get(&lead) else {
                return v;
            };
            // v <- v - a * row (row is monic)
            let f = MODP - a;
            buf.clear();
            let (mut i, mut j) = (0, 0);
            while i < v.len() || j < row.len() {
                if j == row.len() || (i < v.len() && v[i].0 < row[j].0) {
                    buf.push(v[i]);
                    i += 1;
                } else if i == v.len() || row[j].0 < v[i].0 {
                    buf.push((row[j].0, row[j].1 * f % MODP));
                    j += 1;
                } else {
                    let z = (v[i].1 + row[j].1 * f) % MODP;
                    if z != 0 {
                        buf.push((v[i].0, z));
                    }
                    i += 1;
                    j += 1;
                }
            }
            std::mem::swap(&mut v, &mut buf);
        }
    }

    /// Insert a vector; returns `true` if it enlarged the span.
    pub fn insert(&mut self, v: Vec<(usize, u64)>) -> bool {
        let mut r = self.reduce(v);
        let Some(&(lead, a)) = r.first() else {
            return false;
        };
        let inv = modp_inv(a);
        for e in r.iter_mut() {
            e.1 = e.1 * inv % MODP;
        }
        self.rows.insert(lead, r);
        true
    }
}
