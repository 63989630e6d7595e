//! Acceptance suite: one line per criterion, each an exact comparison.
//!
//! Criteria are evaluated through the same checks the CLI reports, grouped
//! by the statement they establish.  A criterion passes when every check in
//! its group passes.  Criteria whose computed values disagree with the
//! published ones are listed in `KNOWN_FAILURES`; they are printed as FAIL
//! with the offending values, and the target exits nonzero if the set of
//! failing criteria ever differs from that list in either direction.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use wittlab::report::{self, Check, Config, Status, SuiteResult};

/// Criteria whose values currently disagree with the published values.
const KNOWN_FAILURES: [usize; 2] = [3, 13];

struct Criterion {
    number: usize,
    title: &'static str,
    budget: Duration,
    suite: &'static str,
    select: fn(&Check) -> bool,
    /// Minimum number of checks the selection must contain.
    min_checks: usize,
}

fn starts(c: &Check, prefixes: &[&str]) -> bool {
    prefixes.iter().any(|p| c.id.starts_with(p))
}

fn criteria() -> Vec<Criterion> {
    let s = Duration::from_secs;
    vec![
        Criterion {
            number: 1,
            title: "bracket and dbar lemma: 10 identities",
            budget: s(1),
            suite: "witt-identities",
            select: |c| c.id.starts_with('['),
            min_checks: 10,
        },
        Criterion {
            number: 2,
            title: "closedness of X and X~",
            budget: s(1),
            suite: "witt-identities",
            select: |c| c.id.starts_with("(dbar + d^Lie)"),
            min_checks: 2,
        },
        Criterion {
            number: 3,
            title: "pairing matrix and family values, det = -96",
            budget: s(5),
            suite: "chern-pairings",
            select: |c| c.anchor == "pairing values",
            min_checks: 11,
        },
        Criterion {
            number: 4,
            title: "cyclic Chern cocycles = index formulas",
            budget: s(30),
            suite: "chern-pairings",
            select: |c| c.anchor == "index formula",
            min_checks: 2,
        },
        Criterion {
            number: 5,
            title: "cocycle property on boundaries; Atiyah total cocycle identity",
            budget: s(60),
            suite: "cocycle-closedness",
            select: |c| c.anchor == "cocycle property",
            min_checks: 3,
        },
        Criterion {
            number: 6,
            title: "rho: cyclic, invariant, kills b(v) * w",
            budget: s(30),
            suite: "cocycle-closedness",
            select: |c| c.anchor == "residue cocycle",
            min_checks: 3,
        },
        Criterion {
            number: 7,
            title: "L1 homology dimensions 6, 7, 18, 0, 0",
            budget: s(120),
            suite: "l1-homology",
            select: |_| true,
            min_checks: 5,
        },
        Criterion {
            number: 8,
            title: "H2 with form coefficients = 2; alpha, beta, gamma, eta",
            budget: s(120),
            suite: "w2-coeff-cohomology",
            select: |_| true,
            min_checks: 5,
        },
        Criterion {
            number: 9,
            title: "Gelfand-Fuks vanishing at weight 0, j = 1..4",
            budget: s(1800),
            suite: "gf-vanishing",
            select: |c| c.anchor == "Gelfand-Fuks vanishing",
            min_checks: 5,
        },
        Criterion {
            number: 10,
            title: "symmetric-square coefficient vanishing, m1 + m2 <= 8",
            budget: s(300),
            suite: "gf-vanishing",
            select: |c| c.anchor == "symmetric-square coefficient vanishing",
            min_checks: 1,
        },
        Criterion {
            number: 11,
            title: "Weyl symbol and differential operator identities",
            budget: s(30),
            suite: "weyl-symbol+diffops-identities",
            select: |_| true,
            min_checks: 8,
        },
        Criterion {
            number: 12,
            title: "circle integrals I_n = -B_n/n!, odd ones vanish",
            budget: s(5),
            suite: "grr",
            select: |c| c.anchor == "circle integrals",
            min_checks: 22,
        },
        Criterion {
            number: 13,
            title: "local GRR: Todd class, generator, one-loop traces",
            budget: s(120),
            suite: "grr",
            select: |c| c.anchor == "Todd class" || c.anchor == "local GRR",
            min_checks: 6,
        },
        Criterion {
            number: 14,
            title: "d=1 regression: m^3 - m pattern",
            budget: s(1),
            suite: "chern-pairings",
            select: |c| starts(c, &["d=1"]),
            min_checks: 5,
        },
    ]
}

fn main() -> ExitCode {
    // Stretch mode runs the j = 4 Gelfand-Fuks check and a wider sweep.
    let cfg = Config { stretch: true, ..Config::default() };
    let mut results: Vec<SuiteResult> = Vec::new();
    let mut timings = Vec::new();
    for id in report::SUITES {
        let start = Instant::now();
        results.push(report::run(id, &cfg).expect("known suite"));
        timings.push((id, start.elapsed()));
    }
    let suite_time = |ids: &str| -> Duration {
        ids.split('+').map(|id| timings.iter().find(|(s, _)| *s == id).map(|t| t.1).unwrap_or_default()).sum()
    };

    let mut failing = Vec::new();
    let mut summary_ok = true;
    for cr in criteria() {
        let checks: Vec<&Check> = cr
            .suite
            .split('+')
            .flat_map(|id| results.iter().filter(move |r| r.id == id))
            .flat_map(|r| r.checks.iter())
            .filter(|c| (cr.select)(c))
            .collect();
        let bad: Vec<&&Check> = checks.iter().filter(|c| c.status != Status::Pass).collect();
        let enough = checks.len() >= cr.min_checks;
        let pass = enough && bad.is_empty();
        let elapsed = suite_time(cr.suite);
        println!(
            "criterion {:>2}: {} - {} ({} checks, suite time {} ms, budget {} s)",
            cr.number,
            if pass { "PASS" } else { "FAIL" },
            cr.title,
            checks.len(),
            elapsed.as_millis(),
            cr.budget.as_secs()
        );
        if !enough {
            println!("    only {} checks selected, need {}", checks.len(), cr.min_checks);
        }
        for c in bad {
            println!("    [{}] {}: value {}, expected {}", c.status, c.id, c.value, c.expected);
        }
        if !pass {
            failing.push(cr.number);
        }
    }
    if failing != KNOWN_FAILURES {
        summary_ok = false;
        println!("failing criteria {failing:?} differ from the recorded list {KNOWN_FAILURES:?}");
    }
    println!(
        "acceptance: {} of 14 criteria pass; failing: {:?}",
        14 - failing.len(),
        failing
    );
    if summary_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
