"""Acceptance gate: one test per exit criterion, printing a pass/fail line each.

Criterion 8's divergence-at-0.9x clause is asserted exactly as stated even
though the constructive mechanism only diverges above the sharp threshold
(the 1.0x boundedness clause and the unit-energy normalization do hold); see
the analysis in the repository notes.  The criterion is expected to fail
honestly rather than be weakened.
"""

from cone_sobolev import acceptance as acc


def _report(res):
    state = "PASS" if res.passed else "FAIL"
    line = f"[{state}] {res.name}: measured {res.measured:.3e} vs tolerance {res.tolerance:.0e}"
    if res.note:
        line += f"  ({res.note})"
    print(line)
    return res


def test_criterion_01_gns1_constant_reproduction():
    res = _report(acc.criterion_gns1_constants())
    assert res.passed, res.details


def test_criterion_02_nash_constant_reproduction():
    res = _report(acc.criterion_nash_constants())
    assert res.passed, res.details


def test_criterion_03_bessel_inequality_and_interlacing():
    res = _report(acc.criterion_bessel_inequality())
    assert res.passed, res.details


def test_criterion_04_log_sobolev_equality():
    res = _report(acc.criterion_log_sobolev())
    assert res.passed, res.details


def test_criterion_05_faber_krahn_2_eigenvalue():
    res = _report(acc.criterion_faber_krahn_2())
    assert res.passed, res.details


def test_criterion_06_polya_szego_suite():
    res = _report(acc.criterion_polya_szego())
    assert res.passed, res.details


def test_criterion_07_blowdown_self_consistency():
    res = _report(acc.criterion_blowdown_self_consistency())
    assert res.passed, [c for c in res.details if not c["ok"]]


def test_criterion_08_mt_divergence_threshold():
    res = _report(acc.criterion_mt_threshold())
    assert res.passed, [c for c in res.details if not c["ok"]]


def test_criterion_09_change_of_variables_equivalence():
    res = _report(acc.criterion_change_of_variables())
    assert res.passed, [c for c in res.details if not c["ok"]]


def test_criterion_10_ckn_degenerate_arithmetic():
    res = _report(acc.criterion_degenerate_arithmetic())
    assert res.passed, res.details


def test_criterion_11_space_sanity():
    res = _report(acc.criterion_space_sanity())
    assert res.passed, res.details
