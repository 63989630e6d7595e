"""Smoke test for the wittlab Python extension.

Build and install first, from the repository root:

    pip install --no-build-isolation -e crates/wittlab-py

then run ``python python/smoke_test.py``.
"""

import json
from fractions import Fraction

import wittlab


def main() -> None:
    # Jouanolou algebra: the defining relation and a residue.
    z1, z2 = wittlab.JElement.z(2, 0), wittlab.JElement.z(2, 1)
    x1, x2 = wittlab.JElement.x(2, 0), wittlab.JElement.x(2, 1)
    one = wittlab.JElement.one(2)
    assert z1 * x1 + z2 * x2 == one
    vol = wittlab.JElement.p() * wittlab.JElement.dz(2, 0) * wittlab.JElement.dz(2, 1)
    assert Fraction(vol.residue()) == 1
    assert Fraction((z1 * x1 * vol).residue()) == Fraction(1, 2)

    # Vector fields: [z1 d1, z1^2 d1] = z1^2 d1.
    t = wittlab.VectorField.along(0, z1)
    s = wittlab.VectorField.along(0, z1 * z1)
    assert t.bracket(s) == s

    # Closed chains and the calibrated Chern pairings.
    X, Xt = wittlab.WittChain.x(), wittlab.WittChain.x_tilde()
    assert X.total_boundary().is_zero() and Xt.total_boundary().is_zero()
    c13, c12 = wittlab.calibrated_chern_pair()
    m = [[Fraction(c.pair(ch)) for c in (c13, c12)] for ch in (X, Xt)]
    assert m == [[-12, 12], [-4, 12]], m
    assert m[0][0] * m[1][1] - m[0][1] * m[1][0] == -96

    # Circle integrals and the Todd class.
    assert Fraction(wittlab.cycle_integral(2)) == Fraction(-1, 12)
    assert Fraction(wittlab.cycle_integral(3)) == 0
    print("todd:", wittlab.todd_truncation(2))

    # Homology and a full suite through the JSON report.
    assert wittlab.homology_dim("L1", 2, 2) == 7
    report = json.loads(wittlab.run_suites(["witt-identities"]))
    assert report["schema"] == 1
    statuses = {c["status"] for c in report["suites"][0]["checks"]}
    assert statuses == {"PASS"}, statuses
    print("suites:", ", ".join(wittlab.suites()))
    print("smoke test passed")


if __name__ == "__main__":
    main()
