//! Named verification suites, their results and the report formats.
//!
//! A suite is a fixed battery of exact checks.  Each check records the value
//! found, the value expected and a short anchor naming the statement it
//! tests; its status is `PASS` when they agree, `FAIL` when they do not, and
//! `INCONCLUSIVE` only when a homology computation was truncated or skipped
//! by the configuration.  Random samples come from fixed seeds, so reports
//! are byte-identical across runs with the same configuration.
//!
//! Homology dimensions can be cached on disk; the cache is keyed by the
//! computation and the crate version and never changes a reported value.

use std::fmt::{self, Display};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cechain::{
    alpha, beta, eta, family_chain, gamma, homology_dim_scaling, lemma_identities, omega12_dual_homology,
    poly_boundary, sym_p_vanishing, total_boundary, x_chain, x_tilde_chain, VanishingOutcome, WittChain,
};
use crate::cyclic::{
    atiyah_cocycle_defect, chern_cocycle, field_degree, index_form_pair, index_form_word, rho, rho_invariance_check,
    trace_map, ChernCocycle, CyclicChain, IndexForm, MatUnit, MatrixChain,
};
use crate::diffweyl::{diffops_identity_suite, symbol, unsymbol, vf_symbol, DiffOp};
use crate::exactalg::{bernoulli, factorial, fmt_q, q, qi, Rational};
use crate::grr::{
    cycle_integral, cycle_integral_closed_form, cycle_integral_kernel, grr_rows, restr_generator,
    todd_d2_chern_root_form, todd_from_roots, todd_truncation, CharPolynomial, PeriodicKernel,
    KERNEL_CONVOLUTION_FACTOR,
};
use crate::jouanolou::{JElement, JMonomial};
use crate::sample::{self, ChaCha8Rng};
use crate::wittlie::{Algebra, VFLetter, VectorField};

/// Errors raised while running suites or writing reports.
#[derive(Debug, Error)]
pub enum ReportError {
    #[error("unknown suite `{0}`; known suites: {known}", known = SUITES.join(", "))]
    UnknownSuite(String),
    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed report: {0}")]
    Json(String),
}

impl ReportError {
    fn io(path: &Path, e: impl Display) -> Self {
        ReportError::Io { path: path.display().to_string(), message: e.to_string() }
    }
}

/// Outcome of one check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// One line of a suite report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub status: Status,
    pub value: String,
    pub expected: String,
    pub anchor: String,
}

impl Check {
    /// Exact comparison of rendered values.
    pub fn equal(id: impl Into<String>, value: impl Display, expected: impl Display, anchor: &str) -> Self {
        let (value, expected) = (value.to_string(), expected.to_string());
        let status = if value == expected { Status::Pass } else { Status::Fail };
        Check { id: id.into(), status, value, expected, anchor: anchor.into() }
    }

    /// Exact comparison of rationals, rendered as `p/q`.
    pub fn rational(id: impl Into<String>, value: &Rational, expected: &Rational, anchor: &str) -> Self {
        Check::equal(id, fmt_q(value), fmt_q(expected), anchor)
    }

    /// A property sampled `samples` times, of which `failures` failed.
    pub fn sampled(id: impl Into<String>, failures: usize, samples: usize, anchor: &str) -> Self {
        Check::equal(id, format!("{failures}/{samples} failing"), format!("0/{samples} failing"), anchor)
    }

    /// A single identity, with a detail line carried in both fields.
    pub fn holds(id: impl Into<String>, ok: bool, detail: &str, anchor: &str) -> Self {
        let verdict = |s: &str| if detail.is_empty() { s.to_string() } else { format!("{s}: {detail}") };
        Check::equal(id, verdict(if ok { "holds" } else { "fails" }), verdict("holds"), anchor)
    }

    /// A check the configuration did not allow to finish.
    pub fn inconclusive(id: impl Into<String>, value: impl Display, expected: impl Display, anchor: &str) -> Self {
        Check {
            id: id.into(),
            status: Status::Inconclusive,
            value: value.to_string(),
            expected: expected.to_string(),
            anchor: anchor.into(),
        }
    }
}

/// The checks of one suite.  `elapsed_ms` is kept out of the JSON report
/// so that reports stay byte-identical between runs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub id: String,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub elapsed_ms: u128,
}

impl SuiteResult {
    /// Whether any check failed.
    pub fn has_fail(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }
}

/// The versioned JSON document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub suites: Vec<SuiteResult>,
}

/// Version of the JSON layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Identifiers of all suites, in their canonical order.
pub const SUITES: [&str; 10] = [
    "algebra-axioms",
    "witt-identities",
    "chern-pairings",
    "cocycle-closedness",
    "l1-homology",
    "w2-coeff-cohomology",
    "gf-vanishing",
    "diffops-identities",
    "weyl-symbol",
    "grr",
];

/// On-disk cache of homology dimensions, one small JSON file per key.
#[derive(Clone, Debug)]
pub struct HomologyCache {
    dir: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    key: String,
    version: String,
    dim: usize,
}

const CACHE_VERSION: &str = env!("CARGO_PKG_VERSION");

impl HomologyCache {
    /// Open (and create) a cache directory.
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self, ReportError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| ReportError::io(&dir, e))?;
        Ok(HomologyCache { dir })
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// A cached dimension, if present and written by this version.
    /// Unreadable or stale entries are ignored.
    pub fn get(&self, key: &str) -> Option<usize> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        let e: CacheEntry = serde_json::from_str(&text).ok()?;
        (e.key == key && e.version == CACHE_VERSION).then_some(e.dim)
    }

    /// Store a dimension.
    pub fn put(&self, key: &str, dim: usize) -> Result<(), ReportError> {
        let path = self.path(key);
        let e = CacheEntry { key: key.into(), version: CACHE_VERSION.into(), dim };
        let text = serde_json::to_string(&e).map_err(|e| ReportError::Json(e.to_string()))?;
        fs::write(&path, text).map_err(|e| ReportError::io(&path, e))
    }
}

/// Truncations and options shared by all suites.
#[derive(Clone, Debug)]
pub struct Config {
    /// Largest scaling weight for the truncated homology computations.
    pub max_weight: i64,
    /// Run the expensive optional checks.
    pub stretch: bool,
    /// Optional cache for homology dimensions.
    pub cache: Option<HomologyCache>,
}

impl Default for Config {
    fn default() -> Self {
        Config { max_weight: 5, stretch: false, cache: None }
    }
}

impl Config {
    fn dim(&self, key: &str, compute: impl FnOnce() -> usize) -> Result<usize, ReportError> {
        if let Some(c) = &self.cache {
            if let Some(d) = c.get(key) {
                return Ok(d);
            }
            let d = compute();
            c.put(key, d)?;
            return Ok(d);
        }
        Ok(compute())
    }
}

/// Run one suite.
pub fn run(id: &str, cfg: &Config) -> Result<SuiteResult, ReportError> {
    let start = Instant::now();
    let checks = match id {
        "algebra-axioms" => algebra_axioms(),
        "witt-identities" => witt_identities(),
        "chern-pairings" => chern_pairings(),
        "cocycle-closedness" => cocycle_closedness(),
        "l1-homology" => l1_homology(cfg)?,
        "w2-coeff-cohomology" => w2_coeff_cohomology(cfg)?,
        "gf-vanishing" => gf_vanishing(cfg)?,
        "diffops-identities" => diffops_identities(),
        "weyl-symbol" => weyl_symbol(),
        "grr" => grr_suite(),
        other => return Err(ReportError::UnknownSuite(other.to_string())),
    };
    Ok(SuiteResult { id: id.to_string(), checks, elapsed_ms: start.elapsed().as_millis() })
}

/// Run several suites in order; an unknown id fails before anything runs.
pub fn run_all(ids: &[String], cfg: &Config) -> Result<Vec<SuiteResult>, ReportError> {
    if let Some(bad) = ids.iter().find(|s| !SUITES.contains(&s.as_str())) {
        return Err(ReportError::UnknownSuite(bad.clone()));
    }
    ids.iter().map(|s| run(s, cfg)).collect()
}

/// The JSON report.
pub fn report_json(results: &[SuiteResult]) -> String {
    let r = Report { schema: SCHEMA_VERSION, suites: results.to_vec() };
    serde_json::to_string(&r).expect("reports serialize")
}

/// Parse a JSON report.
pub fn parse_report(text: &str) -> Result<Report, ReportError> {
    serde_json::from_str(text).map_err(|e| ReportError::Json(e.to_string()))
}

/// Write the JSON report to a file.
pub fn write_json(path: &Path, results: &[SuiteResult]) -> Result<(), ReportError> {
    fs::write(path, report_json(results) + "\n").map_err(|e| ReportError::io(path, e))
}

/// Human-readable report.
pub fn render_text(results: &[SuiteResult]) -> String {
    let mut out = String::new();
    let (mut pass, mut fail, mut inc) = (0, 0, 0);
    for s in results {
        out.push_str(&format!("== {}\n", s.id));
        for c in &s.checks {
            match c.status {
                Status::Pass => pass += 1,
                Status::Fail => fail += 1,
                Status::Inconclusive => inc += 1,
            }
            out.push_str(&format!("  [{}] {}: value {}", c.status, c.id, c.value));
            if c.status != Status::Pass || c.value != c.expected {
                out.push_str(&format!(", expected {}", c.expected));
            }
            out.push_str(&format!("  ({})\n", c.anchor));
        }
    }
    out.push_str(&format!("{pass} passed, {fail} failed, {inc} inconclusive\n"));
    out
}

// ---------------------------------------------------------------------------
// Suites.
// ---------------------------------------------------------------------------

fn sign(odd: bool) -> Rational {
    if odd {
        qi(-1)
    } else {
        Rational::one()
    }
}

fn degree(v: &VectorField) -> u32 {
    field_degree(v).unwrap_or(0)
}

fn random_matrix_word(rng: &mut ChaCha8Rng, n: usize) -> MatrixChain {
    let w: Vec<MatUnit> = (0..n)
        .map(|_| MatUnit {
            row: rng.gen_range(0..2),
            col: rng.gen_range(0..2),
            mono: if rng.gen_bool(0.2) { JMonomial::ONE } else { sample::monomial(rng, 0.3, false) },
        })
        .collect();
    MatrixChain::word(2, &w, qi(rng.gen_range(1..4)))
}

const DG_LIE: &str = "dg Lie structure";
const CYCLIC_OPS: &str = "cyclic complex operators";

fn algebra_axioms() -> Vec<Check> {
    let mut rng = sample::rng(0xA1);
    let n = 100;
    let (mut jacobi, mut dbar_der, mut dbar_sq, mut leibniz, mut commut, mut ce_sq) = (0, 0, 0, 0, 0, 0);
    for _ in 0..n {
        let p: Vec<bool> = (0..3).map(|_| rng.gen_bool(0.4)).collect();
        let t = sample::field(&mut rng, p[0]);
        let s = sample::field(&mut rng, p[1]);
        let u = sample::field(&mut rng, p[2]);
        let (dt, ds) = (degree(&t), degree(&s));
        let lhs = t.bracket(&s.bracket(&u));
        let rhs = t.bracket(&s).bracket(&u).add(&s.bracket(&t.bracket(&u)).scale(&sign(dt * ds % 2 == 1)));
        jacobi += usize::from(lhs != rhs);
        let lhs = t.bracket(&s).dbar();
        let rhs = t.dbar().bracket(&s).add(&t.bracket(&s.dbar()).scale(&sign(dt % 2 == 1)));
        dbar_der += usize::from(lhs != rhs);
        dbar_sq += usize::from(!t.dbar().dbar().is_zero());

        let f = sample::element(&mut rng, 0.4).parity_component(u32::from(rng.gen_bool(0.5)));
        let g = sample::element(&mut rng, 0.4);
        let df = f.dbar();
        let fodd = f.terms().keys().any(|m| m.parity() % 2 == 1);
        let rhs = df.mul(&g).add(&f.mul(&g.dbar()).scale(&sign(fodd)));
        leibniz += usize::from(f.mul(&g).dbar() != rhs);
        let g1 = g.parity_component(1);
        let g0 = g.parity_component(0);
        let swapped = g0.mul(&f).add(&g1.mul(&f).scale(&sign(fodd)));
        commut += usize::from(f.mul(&g) != swapped);

        let len = rng.gen_range(1..=4);
        let w: Vec<VFLetter> = (0..len).map(|_| sample::any_letter(&mut rng, 0.4)).collect();
        let c = WittChain::word(&w, qi(1));
        ce_sq += usize::from(!total_boundary(&total_boundary(&c)).is_zero());
    }
    let mut out = vec![
        Check::sampled("graded Jacobi identity", jacobi, n, DG_LIE),
        Check::sampled("dbar is a derivation of the bracket", dbar_der, n, DG_LIE),
        Check::sampled("dbar^2 = 0 on fields", dbar_sq, n, DG_LIE),
        Check::sampled("dbar Leibniz rule on the Jouanolou algebra", leibniz, n, "Jouanolou model"),
        Check::sampled("graded commutativity of the Jouanolou algebra", commut, n, "Jouanolou model"),
        Check::sampled("(dbar + d^Lie)^2 = 0 on chains", ce_sq, n, DG_LIE),
    ];

    let (mut b2, mut bb2, mut bbb, mut bd, mut act_b, mut tr_b) = (0, 0, 0, 0, 0, 0);
    for _ in 0..n {
        let len = rng.gen_range(1..=4);
        let c = sample::cyclic_word(&mut rng, len, 0.3);
        b2 += usize::from(!c.b().b().is_zero());
        bb2 += usize::from(!c.connes_b().connes_b().is_zero());
        bbb += usize::from(!c.connes_b().b().add(&c.b().connes_b()).is_zero());
        bd += usize::from(!c.b().dbar().add(&c.dbar().b()).is_zero());
        let p = rng.gen_bool(0.5);
        let t = VectorField::from_letter(2, &sample::letter(&mut rng, p));
        let lhs = c.act(&t).b();
        let rhs = c.b().act(&t).scale(&sign(p));
        act_b += usize::from(lhs != rhs);
        let m = random_matrix_word(&mut rng, 3);
        tr_b += usize::from(trace_map(&m.b()) != trace_map(&m).b());
    }
    out.extend([
        Check::sampled("b^2 = 0", b2, n, CYCLIC_OPS),
        Check::sampled("B^2 = 0", bb2, n, CYCLIC_OPS),
        Check::sampled("bB + Bb = 0", bbb, n, CYCLIC_OPS),
        Check::sampled("b dbar + dbar b = 0", bd, n, CYCLIC_OPS),
        Check::sampled("field action is compatible with b", act_b, n, CYCLIC_OPS),
        Check::sampled("matrix trace is a chain map", tr_b, n, CYCLIC_OPS),
    ]);
    out
}

fn witt_identities() -> Vec<Check> {
    let mut out: Vec<Check> =
        lemma_identities().into_iter().map(|(id, ok)| Check::holds(id, ok, "", "bracket lemma")).collect();
    out.push(Check::holds("(dbar + d^Lie) X = 0", total_boundary(&x_chain()).is_zero(), "", "closed chains X, X~"));
    out.push(Check::holds(
        "(dbar + d^Lie) X~ = 0",
        total_boundary(&x_tilde_chain()).is_zero(),
        "",
        "closed chains X, X~",
    ));
    out
}

/// The two Chern monomials in dimension two, calibrated on `X`.
pub fn calibrated_chern_pair() -> (ChernCocycle, ChernCocycle) {
    let x = x_chain();
    let c13 = chern_cocycle(2, &[3]).expect("valid exponents").calibrated(&x, &qi(-12)).expect("nonzero on X");
    let c12 = chern_cocycle(2, &[1, 1]).expect("valid exponents").calibrated(&x, &qi(12)).expect("nonzero on X");
    (c13, c12)
}

/// `L_m` and `L_{−m}` in dimension one.
pub fn virasoro_pair(m: u32) -> [VectorField; 2] {
    let z = JElement::z(1, 0);
    let x = JElement::x(1, 0);
    let lm = VectorField::along(0, z.pow(m + 1));
    let lminus = if m <= 1 { VectorField::along(0, z.pow(1 - m)) } else { VectorField::along(0, x.pow(m - 1)) };
    [lm, lminus]
}

/// Hand oracle for the dimension-one cocycle: `Res(div L_m · D div L_{−m})`.
pub fn virasoro_oracle(m: u32) -> Rational {
    let [a, b] = virasoro_pair(m);
    let db = b.divergence();
    let d_db = JElement::dz(1, 0).mul(&db.partial(0));
    a.divergence().mul(&d_db).residue()
}

const PAIRING: &str = "pairing values";
const INDEX: &str = "index formula";

fn chern_pairings() -> Vec<Check> {
    let (c13, c12) = calibrated_chern_pair();
    let mut out = Vec::new();
    let x = x_chain();
    let xt = x_tilde_chain();
    let v13x = c13.pair(&x);
    let v12x = c12.pair(&x);
    let v13t = c13.pair(&xt);
    let v12t = c12.pair(&xt);
    out.push(Check::rational("ch1^3(X) (calibration)", &v13x, &qi(-12), PAIRING));
    out.push(Check::rational("ch1ch2(X) (calibration)", &v12x, &qi(12), PAIRING));
    out.push(Check::rational("ch1^3(X~)", &v13t, &qi(-4), PAIRING));
    out.push(Check::rational("ch1ch2(X~)", &v12t, &qi(12), PAIRING));
    for (i, name, e13, e12) in [(1, "II", -4, 8), (2, "III", 2, -6), (3, "IV", 2, -2)] {
        let f = family_chain(i);
        out.push(Check::rational(format!("ch1^3(family {name})"), &c13.pair(&f), &qi(e13), PAIRING));
        out.push(Check::rational(format!("ch1ch2(family {name})"), &c12.pair(&f), &qi(e12), PAIRING));
    }
    let det = &v13x * &v12t - &v12x * &v13t;
    out.push(Check {
        id: "det-pairing-matrix".into(),
        status: if det.is_zero() { Status::Fail } else { Status::Pass },
        value: fmt_q(&det),
        expected: "nonzero".into(),
        anchor: PAIRING.into(),
    });

    // Independent index formulas: ch1^3 = idx13 and ch1ch2 = −3·idx12
    // after the calibration above.
    let agree = |w: &[VFLetter]| {
        c13.eval_word(w) == index_form_word(IndexForm::Ch1Cubed, w)
            && c12.eval_word(w) == qi(-3) * index_form_word(IndexForm::Ch1Ch2, w)
    };
    let mut fam_bad = 0;
    for i in 0..4 {
        let f = family_chain(i);
        fam_bad += usize::from(c13.pair(&f) != index_form_pair(IndexForm::Ch1Cubed, &f));
        fam_bad += usize::from(c12.pair(&f) != qi(-3) * index_form_pair(IndexForm::Ch1Ch2, &f));
    }
    out.push(Check::sampled("cyclic cocycles = index formulas on families I-IV", fam_bad, 8, INDEX));
    let mut rng = sample::rng(0xC4);
    let (mut n, mut bad) = (0, 0);
    while n < 60 {
        let w: Vec<VFLetter> = (0..3).map(|i| sample::letter(&mut rng, i == 0)).collect();
        let tw = w.iter().fold([0, 0], |a, l| [a[0] + l.weight(2)[0], a[1] + l.weight(2)[1]]);
        if tw != [0, 0] {
            continue;
        }
        n += 1;
        bad += usize::from(!agree(&w));
    }
    out.push(Check::sampled("cyclic cocycles = index formulas on random triples", bad, n, INDEX));

    // Dimension one: ch1^2 on (L_m, L_{−m}), calibrated on m = 2 against
    // the residue oracle, reproduces m³ − m.
    let d1 = chern_cocycle(1, &[2]).expect("valid exponents");
    let raw = |m: u32| d1.eval_raw(&virasoro_pair(m)).expect("homogeneous fields");
    let oracle2 = virasoro_oracle(2);
    out.push(Check::rational("d=1 residue oracle at m=2", &oracle2, &qi(6), "Virasoro cocycle"));
    let scale = &oracle2 / raw(2);
    for m in 1..=4u32 {
        let mm = i64::from(m);
        let v = &scale * raw(m);
        out.push(Check::rational(format!("d=1 ch1^2(L_{m}, L_-{m})"), &v, &qi(mm * mm * mm - mm), "Virasoro cocycle"));
    }
    out
}

const COCYCLE: &str = "cocycle property";
const RHO: &str = "residue cocycle";

fn cocycle_closedness() -> Vec<Check> {
    let (c13, c12) = calibrated_chern_pair();
    let mut rng = sample::rng(0xC5);
    let probes = sample::boundary_probes(&mut rng, 60);
    let bad13 = probes.iter().filter(|b| !c13.pair(b).is_zero()).count();
    let bad12 = probes.iter().filter(|b| !c12.pair(b).is_zero()).count();
    let mut out = vec![
        Check::sampled("ch1^3 vanishes on total boundaries", bad13, probes.len(), COCYCLE),
        Check::sampled("ch1ch2 vanishes on total boundaries", bad12, probes.len(), COCYCLE),
    ];
    let n = 100;
    let mut bad = 0;
    for _ in 0..n {
        let len = rng.gen_range(1..=4);
        let w: Vec<VFLetter> = (0..len).map(|_| sample::any_letter(&mut rng, 0.4)).collect();
        bad += usize::from(!atiyah_cocycle_defect(2, &WittChain::word(&w, qi(1))).is_zero());
    }
    out.push(Check::sampled("total cocycle identity for the Atiyah cochain (k <= 3)", bad, n, COCYCLE));

    let (mut cyc, mut inv) = (0, 0);
    for _ in 0..n {
        let c = sample::cyclic_word(&mut rng, 3, 0.3);
        cyc += usize::from(!rho(&c.sub(&c.t())).is_zero());
        let p = rng.gen_bool(0.5);
        let t = VectorField::from_letter(2, &sample::letter(&mut rng, p));
        inv += usize::from(!rho_invariance_check(&t, &c).is_zero());
    }
    out.push(Check::sampled("rho(1 - t) = 0", cyc, n, RHO));
    out.push(Check::sampled("rho is invariant under vector fields", inv, n, RHO));

    let (mut tried, mut bad) = (0, 0);
    while tried < n {
        let nv = rng.gen_range(2..=3);
        let vm: Vec<JMonomial> = (0..nv).map(|_| sample::monomial(&mut rng, 0.3, false)).collect();
        let wm: Vec<JMonomial> = (0..4 - nv).map(|_| sample::monomial(&mut rng, 0.3, false)).collect();
        let all: Vec<JMonomial> = vm.iter().chain(&wm).copied().collect();
        if sample::weight_sum(&all) != [0, 0] {
            continue;
        }
        tried += 1;
        let v = CyclicChain::word(2, &vm, qi(1));
        let w = CyclicChain::word(2, &wm, qi(1));
        bad += usize::from(!rho(&v.b().star(&w)).is_zero());
    }
    out.push(Check::sampled("rho(b(v) * w) = 0", bad, tried, RHO));
    out
}

const L1: &str = "homology of vector fields vanishing at the origin";

fn l1_homology(cfg: &Config) -> Result<Vec<Check>, ReportError> {
    let mut out = Vec::new();
    for (q, w, expected) in [(1usize, 1i64, 6usize), (2, 2, 7), (2, 3, 18), (2, 4, 0), (2, 5, 0)] {
        let id = format!("dim H{q}(L1) at weight {w}");
        if w > cfg.max_weight {
            out.push(Check::inconclusive(id, "not computed (weight above --max-weight)", expected, L1));
            continue;
        }
        let d = cfg.dim(&format!("l1-q{q}-w{w}"), || homology_dim_scaling(Algebra::L(1), w, q))?;
        out.push(Check::equal(id, d, expected, L1));
    }
    Ok(out)
}

const COEFF: &str = "cohomology with coefficients in forms";

fn w2_coeff_cohomology(cfg: &Config) -> Result<Vec<Check>, ReportError> {
    let d = cfg.dim("omega12-q2", || omega12_dual_homology(2))?;
    let eta_ok = poly_boundary(&eta()) == gamma().sub(&beta()).scale(&q(1, 4));
    Ok(vec![
        Check::equal("dim H2(w2; Omega1 (x) Omega2) at weight 0", d, 2, COEFF),
        Check::holds("alpha is a cycle", poly_boundary(&alpha()).is_zero(), "", COEFF),
        Check::holds("beta is a cycle", poly_boundary(&beta()).is_zero(), "", COEFF),
        Check::holds("gamma is a cycle", poly_boundary(&gamma()).is_zero(), "", COEFF),
        Check::holds("d eta = (gamma - beta)/4", eta_ok, "", COEFF),
    ])
}

const GF: &str = "Gelfand-Fuks vanishing";

/// Bound on `m1 + m2` for the symmetric-square sweep, and its stretch value.
pub const S2_SWEEP: i64 = 8;
pub const S2_SWEEP_STRETCH: i64 = 10;
const S2: &str = "symmetric-square coefficient vanishing";

fn gf_vanishing(cfg: &Config) -> Result<Vec<Check>, ReportError> {
    let mut out = Vec::new();
    for j in 0..=4usize {
        let expected = usize::from(j == 0);
        let id = format!("dim H{j}(w2) at weight 0");
        if j == 4 && !cfg.stretch {
            out.push(Check::inconclusive(id, "not computed (requires --stretch)", expected, GF));
            continue;
        }
        let d = cfg.dim(&format!("w2-q{j}-w0"), || homology_dim_scaling(Algebra::W2, 0, j))?;
        out.push(Check::equal(id, d, expected, GF));
    }
    let max_m = if cfg.stretch { S2_SWEEP_STRETCH } else { S2_SWEEP };
    let id = format!("H2(w2; S^2 P) = 0 for m1 + m2 <= {max_m}");
    out.push(match sym_p_vanishing(2, max_m, max_m + 1) {
        VanishingOutcome::Pass { cycles } => {
            Check::equal(id, format!("0 of {cycles} cycles unresolved"), format!("0 of {cycles} cycles unresolved"), S2)
        }
        VanishingOutcome::Inconclusive { cycles, unresolved } => Check::inconclusive(
            id,
            format!("{unresolved} of {cycles} cycles unresolved"),
            format!("0 of {cycles} cycles unresolved"),
            S2,
        ),
    });
    Ok(out)
}

fn diffops_identities() -> Vec<Check> {
    diffops_identity_suite(5)
        .into_iter()
        .map(|c| Check::holds(c.id, c.pass, &c.detail, "differential operator identities"))
        .collect()
}

fn random_diffop(rng: &mut ChaCha8Rng) -> DiffOp {
    let mut d = DiffOp::zero();
    for _ in 0..rng.gen_range(1..=2) {
        let n = [rng.gen_range(0..=2), rng.gen_range(0..=2)];
        d = d.add(&DiffOp::term(sample::element(rng, 0.3), n));
    }
    d
}

const WEYL: &str = "Weyl symbol";

fn weyl_symbol() -> Vec<Check> {
    let mut rng = sample::rng(0x5E);
    let n = 100;
    let (mut mult, mut vf, mut inv) = (0, 0, 0);
    for _ in 0..n {
        let a = random_diffop(&mut rng);
        let b = random_diffop(&mut rng);
        mult += usize::from(symbol(&a.compose(&b)) != symbol(&a).moyal(&symbol(&b)));
        inv += usize::from(unsymbol(&symbol(&a)) != a);
        let p = rng.gen_bool(0.4);
        let t = sample::field(&mut rng, p);
        vf += usize::from(symbol(&DiffOp::from_vf(&t)) != vf_symbol(&t));
    }
    vec![
        Check::sampled("symbol is multiplicative (composition to Moyal product)", mult, n, WEYL),
        Check::sampled("symbol(T) = T - div(T)/2", vf, n, WEYL),
        Check::sampled("unsymbol inverts symbol", inv, n, WEYL),
    ]
}

const CIRCLE: &str = "circle integrals";
const TODD: &str = "Todd class";
const GRR: &str = "local GRR";

fn grr_suite() -> Vec<Check> {
    let mut out = Vec::new();
    for n in 2..=12usize {
        let expected = if n % 2 == 0 {
            -bernoulli(n) / Rational::from_integer(factorial(n as u64))
        } else {
            Rational::zero()
        };
        let conv = cycle_integral(n).expect("n >= 2");
        out.push(Check::rational(format!("cycle integral I_{n} (convolution)"), &conv, &expected, CIRCLE));
        let kern = cycle_integral_kernel(n).expect("n >= 2");
        let closed = cycle_integral_closed_form(n).expect("n >= 2");
        out.push(Check::holds(
            format!("cycle integral I_{n} (kernel and closed form agree)"),
            kern == conv && closed == conv,
            "",
            CIRCLE,
        ));
    }
    let (mut pairs, mut bad) = (0, 0);
    for m in 1..8u32 {
        for k in 1..=8 - m {
            pairs += 1;
            let lhs = PeriodicKernel::bernoulli_kernel(m).convolve(&PeriodicKernel::bernoulli_kernel(k));
            let rhs = PeriodicKernel::bernoulli_kernel(m + k).scale(&qi(KERNEL_CONVOLUTION_FACTOR));
            bad += usize::from(lhs != rhs);
        }
    }
    out.push(Check::sampled("Bernoulli kernel convolution law (m + n <= 8)", bad, pairs, CIRCLE));

    let td = todd_truncation(2).expect("d = 2 is supported");
    let expected = CharPolynomial::monomial(&[3, 0, 0], q(1, 48)).add(&CharPolynomial::monomial(&[1, 1, 0], q(-1, 24)));
    out.push(Check::equal("Todd class in degree 3 (rank 2)", &td, &expected, TODD));
    out.push(Check::holds("Todd class equals c1c2/24", td == todd_d2_chern_root_form(), "", TODD));
    let mut rng = sample::rng(0x7D);
    let mut bad = 0;
    for _ in 0..20 {
        let roots: Vec<Rational> = (0..2).map(|_| q(rng.gen_range(-9..=9), rng.gen_range(1..=5))).collect();
        let chs: Vec<Rational> = (1..=3).map(|k| crate::grr::ch_from_roots(&roots, k)).collect();
        bad += usize::from(td.eval(&chs) != todd_from_roots(&roots, 3));
    }
    out.push(Check::sampled("Todd class against the Chern-root series", bad, 20, TODD));

    out.push(Check::rational("residue trace on z1 ^ z2 ^ P", &restr_generator(), &Rational::one(), GRR));
    let (c13, c12) = calibrated_chern_pair();
    let chains: Vec<(String, WittChain, Rational, Rational)> = [("X", x_chain()), ("X~", x_tilde_chain())]
        .into_iter()
        .map(|(name, c)| {
            let (a, b) = (c13.pair(&c), c12.pair(&c));
            (name.to_string(), c, a, b)
        })
        .collect();
    for row in grr_rows(&chains) {
        out.push(Check::rational(format!("one-loop trace on {} = Todd pairing", row.chain), &row.lhs, &row.rhs, GRR));
    }
    out
}
