"""
Tests for the weight-1 sandwich: vanishing, candidate spaces, certification and mod-p scans
"""

from concurrent.futures import ThreadPoolExecutor
import json
from math import gcd

import pytest

from config.settings import (CHARACTER_LIFT, NON_LIFTABLE, STATUS_CERTIFIED_EXOTIC, STATUS_MATCHED_DIHEDRAL,
                             STATUS_UNRESOLVED)
from src.auxforms import eta_product, multiplier_pool
from src.cyclotomic import ResidueElement
from src.dihedral import dihedral_qexp
from src.dirichlet import DirichletChar, from_local_label, lcm, quadratic_character
from src.qseries import PrecisionError, QLattice, QSeries
from src.weightone import (CandidateSpace, InsufficientMultipliersError, WeightOneEngine, WeightTwoDimensionError,
                           candidate_space, certification_precision, certify_holomorphic, extend_precision, geometry,
                           modp_scan, newform_dimension, suspect_primes, trivial_vanishing, weight_two_lattice)


@pytest.fixture
def chi23():
    return quadratic_character(-23, 23)


@pytest.fixture
def eta23():
    return eta_product([(1, 1), (23, 1)], certification_precision(23), order=2)


@pytest.mark.parametrize("N", list(range(1, 23)) + [24, 25, 26, 27, 28, 30, 36])
def test_small_levels_vanish_from_degrees(N):
    certificate = trivial_vanishing(N)
    assert certificate is not None
    assert certificate.deg_cusp_twist < 0


def test_levels_that_need_the_sandwich():
    assert trivial_vanishing(23) is None
    assert trivial_vanishing(29) is None
    assert geometry(23).deg_cusp_twist == 0
    assert geometry(29).deg_cusp_twist > 0


def test_certification_precision():
    assert geometry(23).deg_omega == 22
    assert certification_precision(23) == 89
    assert geometry(47).deg_omega == 92


def test_level_23(chi23):
    engine = WeightOneEngine()
    report = engine.compute(23, chi23)
    assert report.certified_dim == 1
    assert report.status == STATUS_MATCHED_DIHEDRAL
    assert report.lower_bound == report.upper_bound == 1
    assert report.new_dim == 1
    assert report.to_row() == {"N": 23, "character": "23_2", "dimension": 1}
    assert len(report.eigenforms) == 1
    assert report.eigenforms[0].degree == 1


def test_level_23_space_is_spanned_by_the_eta_product(chi23, eta23):
    engine = WeightOneEngine()
    lattice = engine.certified_space(23, chi23)
    assert lattice.rank == 1
    assert lattice.echelon_basis()[0].coefficients(1, 10) == eta23.coefficients(1, 10)


def test_even_characters_are_rejected():
    with pytest.raises(ValueError):
        WeightOneEngine().compute(23, DirichletChar.trivial(23))


def test_candidate_space_preconditions(chi23):
    pool = multiplier_pool(23, 2, 100)
    with pytest.raises(PrecisionError):
        candidate_space(23, chi23, pool, 40)
    with pytest.raises(InsufficientMultipliersError):
        candidate_space(23, chi23, pool[:1], certification_precision(23))


def test_certify_holomorphic(chi23, eta23):
    assert certify_holomorphic(eta23, 23, chi23)
    corrupted = eta23 + QSeries.from_dict(eta23.ring, {40: 1})
    assert not certify_holomorphic(corrupted, 23, chi23)
    with pytest.raises(PrecisionError):
        certify_holomorphic(eta23.truncate(60), 23, chi23)


def test_extend_precision(chi23, eta23):
    extended = extend_precision(eta23, 23, chi23, 120)
    assert extended.prec == 120
    assert extended == eta_product([(1, 1), (23, 1)], 120, order=2)


def test_newform_dimension_subtracts_oldforms(chi23):
    chi46 = chi23.extend(46)
    dimensions = {23: 1, 46: 3}
    assert newform_dimension(46, chi46, lambda M, chi: dimensions[M]) == 1


def test_suspect_primes():
    candidate = CandidateSpace(QLattice.zero(2, 1, 10), 1,
                               [("a", 3 * 199), ("b", 5 * 199), ("c", 3 * 7)], ["a", "b", "c"])
    assert suspect_primes(candidate, 82) == [3, 199]
    assert suspect_primes(candidate, 82, (5, 2)) == [3, 5, 199]
    assert suspect_primes(candidate, 15) == [199]
    candidate.torsion_gcd = 11
    assert 11 in suspect_primes(candidate, 82)


def test_suspect_primes_include_primes_skipped_by_multipliers():
    candidate = CandidateSpace(QLattice.zero(2, 1, 10), 1, [], ["a", "b"], frozenset({2, 7, 41}))
    assert suspect_primes(candidate, 82) == [7]
    assert suspect_primes(candidate, 21) == [41]


def test_suspect_primes_factor_large_torsion_orders():
    big = 10007      # prime above the trial-division bound
    candidate = CandidateSpace(QLattice.zero(2, 1, 10), 3 * big, [("a", big), ("b", big)], ["a", "b", "c"])
    assert suspect_primes(candidate, 23) == [3, big]


def test_candidate_torsion_comes_from_each_intersection(chi23):
    precision = certification_precision(23) + 2
    candidate = candidate_space(23, chi23, multiplier_pool(23, 2, 2 * precision), precision, lower_bound=1)
    assert len(candidate.torsion_orders) == len(candidate.multipliers_used) - 1
    assert all(order >= 1 for _, order in candidate.torsion_orders)
    expected = 0
    for _, order in candidate.torsion_orders:
        expected = gcd(expected, order)
    assert candidate.torsion_gcd == (expected or 1)


def test_modp_scan_runs_after_a_plain_compute(chi23, monkeypatch):
    calls = []

    def recording_scan(N, chi, suspects, certified_space, precision=None, **kwargs):
        calls.append((N, list(suspects)))
        return []

    monkeypatch.setattr("src.weightone.modp_scan", recording_scan)
    engine = WeightOneEngine(suspect_primes=[5])
    engine.certified_space(23, chi23)
    assert not calls
    engine.modp = True
    report = engine.compute(23, chi23)
    assert len(calls) == 1
    assert calls[0][0] == 23 and 5 in calls[0][1]
    assert report.modp_scanned
    engine.compute(23, chi23)
    assert len(calls) == 1


def test_weight_two_rank_must_match_the_dimension_formula(monkeypatch):
    monkeypatch.setattr("src.weightone._WEIGHT_TWO_CACHE", {})
    monkeypatch.setattr("src.weightone.cusp_form_dimension", lambda N, chi: 0)
    with pytest.raises(WeightTwoDimensionError):
        weight_two_lattice(11, DirichletChar.trivial(11), 2, 20)


def test_dimension_mismatch_leaves_the_job_unresolved(chi23, monkeypatch):
    monkeypatch.setattr("src.weightone._WEIGHT_TWO_CACHE", {})
    monkeypatch.setattr("src.weightone.cusp_form_dimension", lambda N, chi: -1)
    report = WeightOneEngine().compute(23, chi23)
    assert report.status == STATUS_UNRESOLVED
    assert report.certified_dim is None
    assert any("dimension formula" in note for note in report.notes)


def test_threads_share_one_report(chi23):
    engine = WeightOneEngine(eigenforms=False)
    with ThreadPoolExecutor(max_workers=2) as pool:
        reports = list(pool.map(lambda _: engine.compute(23, chi23), range(2)))
    assert reports[0] is reports[1]
    assert reports[0].certified_dim == 1


@pytest.mark.parametrize("N", [31,
                               pytest.param(39, marks=pytest.mark.slow),
                               pytest.param(47, marks=pytest.mark.slow),
                               pytest.param(59, marks=pytest.mark.slow)])
def test_dihedral_forms_lie_in_the_certified_lattice(N):
    chi = quadratic_character(-N, N)
    engine = WeightOneEngine(eigenforms=False)
    report = engine.compute(N, chi)
    assert report.dihedral
    V = engine.certified_space(N, chi)
    for rep in report.dihedral:
        order = lcm(V.order, rep.order)
        assert dihedral_qexp(rep, V.prec) in V.lift(order)


def test_report_json_is_serializable(chi23):
    report = WeightOneEngine().compute(23, chi23)
    payload = json.loads(json.dumps(report.to_json()))
    assert payload["status"] == STATUS_MATCHED_DIHEDRAL
    assert payload["certified_dim"] == 1


@pytest.mark.slow
def test_level_47_has_two_conjugate_forms():
    report = WeightOneEngine().compute(47, quadratic_character(-47, 47))
    assert report.certified_dim == 2
    assert report.new_dim == 2
    assert len(report.eigenforms) == 1
    assert report.eigenforms[0].degree == 2


@pytest.mark.slow
def test_level_52_full_dimension():
    reports = WeightOneEngine().run_weight_one_pipeline([52])
    assert sum(r.full_level_dimension for r in reports) == 2


@pytest.mark.slow
def test_level_52_mod_3_lifts_to_another_character():
    chi = quadratic_character(-4, 52)
    report = WeightOneEngine(modp=True, suspect_primes=[3]).compute(52, chi)
    lifts = [e for e in report.modp_exceptions if e.p == 3]
    assert lifts
    assert all(e.classification == CHARACTER_LIFT for e in lifts)


@pytest.mark.slow
def test_level_124_exotic_forms():
    chi = sorted((c for c in from_local_label("2_2 31_3", 124) if c.is_odd()), key=lambda c: c.key)[0]
    report = WeightOneEngine().compute(124, chi)
    assert report.lower_bound == 0
    assert report.certified_dim == 2
    assert report.status == STATUS_CERTIFIED_EXOTIC


def _roots_of(ideal, polynomial):
    c0, c1, c2 = polynomial
    p = ideal.p
    roots = []
    for a in range(p):
        for b in range(p):
            tau = ResidueElement(ideal, [a, b])
            if c2 * tau * tau + c1 * tau + c0 == 0:
                roots.append(tau)
    return roots


@pytest.mark.slow
def test_level_82_mod_199(fixtures_dir):
    golden = json.loads((fixtures_dir / "level82_mod199.json").read_text())
    chi = sorted((c for c in from_local_label(golden["character"], 82) if c.is_odd()), key=lambda c: c.key)[0]
    engine = WeightOneEngine()
    report = engine.compute(82, chi, scan=False)
    exceptions = modp_scan(82, chi, [golden["p"]], engine.certified_space, report.precision,
                           check_double_level=False)
    assert exceptions
    assert all(e.extra_dimension == 1 and e.classification == NON_LIFTABLE and e.certified for e in exceptions)

    def matches(form, tau):
        return all(form[int(n)] == c0 + c1 * tau for n, (c0, c1) in golden["coefficients"].items())

    assert any(matches(form, tau)
               for e in exceptions
               for form in e.normalized_forms()
               for tau in _roots_of(e.ideal, golden["minimal_polynomial"]))
