import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from chainlab.complex import full_skeleton
from chainlab.expectation import (
    SWEEP_COLUMNS,
    clique_exponents,
    closed_form_mean,
    log_expected_CH,
    log_expected_clique_embeddings,
    log_pattern_probability,
    mc_estimate,
    report_row,
    sweep,
    sweep_params,
    taylor_tail,
)
from chainlab.model import ModelParams, sandwich_probability
from chainlab.pattern import build_pattern

# mpmath at 60 digits, alpha = (a0, a1, 0, ...), clique size 4g+2
GOLDEN = {
    # (g, n): (alpha0, alpha1, clique printed, clique faces, pattern)
    (2, 32): ("0.74", "0.125", "7.681826138007604884107696", "-3.478173861992395115892304", "-9.604689013082242962473977"),
    (2, 64): ("0.74", "0.125", "7.956888810215769208539654", "-3.203111189784230791460346", "-9.097594666201174113893983"),
    (3, 32): ("0.87", "0.05", "11.51114706795700596145948", "-3.698852932042994038540522", "-14.34313880582497284982"),
    (3, 64): ("0.87", "0.05", "12.11116764635564512083076", "-3.098832353644354879169244", "-13.31751146823132064290453"),
    (4, 32): ("0.92", "0.03", "14.8340027556172400215566", "-4.885997244382759978443401", "-19.07016440031755132539096"),
    (4, 64): ("0.92", "0.03", "15.93418721073709953153894", "-3.785812789262900468461056", "-17.54293655656842462326157"),
}


def golden_params(g, n):
    a0, a1 = GOLDEN[(g, n)][:2]
    return ModelParams.from_alpha(g, [float(a0), float(a1), 0.0], n=n, N=n)


class TestCliqueTerm:
    def test_all_ones(self):
        prm = ModelParams.from_p([1.0, 1.0, 1.0], N=12)
        expect = math.log(math.comb(12, 5) * math.factorial(5)) / math.log(12)
        assert log_expected_clique_embeddings(prm, 5) == pytest.approx(expect, rel=1e-13)

    def test_single_vertex(self):
        prm = ModelParams.from_p([0.3, 0.5], N=10)
        assert log_expected_clique_embeddings(prm, 1) == pytest.approx(math.log(10 * 0.3) / math.log(10))
        assert log_expected_clique_embeddings(prm, 1, "faces") == pytest.approx(math.log(3) / math.log(10))

    def test_size_checks(self):
        prm = ModelParams.from_p([0.3, 0.5], N=10)
        with pytest.raises(ValueError):
            log_expected_clique_embeddings(prm, 11)
        with pytest.raises(ValueError):
            log_expected_clique_embeddings(prm, 0)
        with pytest.raises(ValueError):
            log_expected_clique_embeddings(prm, 3, "other")

    def test_exponent_modes(self):
        assert clique_exponents(10, 3) == [1, 9, 36, 84]
        assert clique_exponents(10, 3, "faces") == [10, 45, 120, 210]

    def test_scale_smaller_than_clique(self):
        prm = ModelParams.from_alpha(2, [0.5, 0.1], n=4.0, N=12)
        assert log_expected_clique_embeddings(prm, 10) == -math.inf

    @pytest.mark.parametrize("key", sorted(GOLDEN))
    def test_golden(self, key):
        g, n = key
        prm = golden_params(g, n)
        gold = GOLDEN[key]
        m = 4 * g + 2
        assert log_expected_clique_embeddings(prm, m) == pytest.approx(float(gold[2]), rel=1e-12)
        assert log_expected_clique_embeddings(prm, m, "faces") == pytest.approx(float(gold[3]), rel=1e-12)

    def test_golden_values_reproduce(self):
        # the frozen constants still come out of the oracle
        with mpmath.workdps(60):
            for (g, n), (a0, a1, cp, cf, pt) in GOLDEN.items():
                alphas = (a0, a1, "0")
                assert mpmath.almosteq(oracles.mp_log_clique(n, alphas, 4 * g + 2), mpmath.mpf(cp), 1e-22)
                assert mpmath.almosteq(oracles.mp_log_clique(n, alphas, 4 * g + 2, "faces"), mpmath.mpf(cf), 1e-22)
                assert mpmath.almosteq(oracles.mp_log_pattern(n, alphas, g), mpmath.mpf(pt), 1e-22)


class TestPatternTerm:
    def test_degenerate(self):
        assert log_pattern_probability(ModelParams.from_p([1.0, 1.0], N=6)) == -math.inf

    def test_half(self):
        prm = ModelParams.from_p([0.5, 0.5], N=6, n=2.0)
        assert log_pattern_probability(prm, 1) == pytest.approx(-16.0, rel=1e-15)

    def test_no_edges_in_model(self):
        assert log_pattern_probability(ModelParams.from_p([0.5], N=6)) == -math.inf

    @pytest.mark.parametrize("g", range(1, 7))
    def test_matches_sandwich(self, g):
        P = build_pattern(g)
        prm = ModelParams.from_p([0.83, 0.41], N=P.N, g=g)
        lhs = log_pattern_probability(prm) * prm.log_n
        assert lhs == pytest.approx(sandwich_probability(P.A, P.B, prm), rel=1e-14)

    @pytest.mark.parametrize("key", sorted(GOLDEN))
    def test_golden(self, key):
        g, n = key
        assert log_pattern_probability(golden_params(g, n)) == pytest.approx(float(GOLDEN[key][4]), rel=1e-12)


class TestTaylorTail:
    def test_half(self):
        t = taylor_tail(1.0, 1, 2.0)
        assert t.closed == -4.0
        assert t.series == pytest.approx(-4.0, abs=1e-12)

    def test_vanishes_for_large_alpha(self):
        assert abs(taylor_tail(60.0, 2, 8.0).closed) < 1e-40

    def test_domain(self):
        with pytest.raises(ValueError):
            taylor_tail(0.0, 1, 8.0)
        with pytest.raises(ValueError):
            taylor_tail(-1.0, 1, 8.0)

    def test_geometric_form_is_positive(self):
        t = taylor_tail(0.5, 2, 16.0)
        assert t.geometric == pytest.approx(6 / (1 - 0.25))
        assert t.closed < 0

    @given(st.floats(0.5, 40.0), st.integers(1, 30), st.floats(2.0, 1e9))
    def test_series_matches_closed_form(self, x, g, n):
        alpha1 = x / math.log(n)
        t = taylor_tail(alpha1, g, n)
        assert t.converged
        assert abs(t.difference) <= 1e-12 * max(1.0, abs(t.closed))

    def test_small_exponent_still_converges(self):
        t = taylor_tail(1e-3, 1, 2.0)
        assert t.converged
        assert t.series == pytest.approx(t.closed, rel=1e-10)


class TestReport:
    def test_identity(self):
        rep = log_expected_CH(ModelParams.from_alpha(3, [0.85, 0.1, 0.0], n=32, N=32))
        assert rep.log_n_E_CH == rep.log_n_clique_term + rep.log_n_pattern_term
        assert all(math.isfinite(v) for v in rep.lower_bound_terms)
        assert rep.lower_bound == pytest.approx(sum(rep.lower_bound_terms))
        assert rep.feasible and "infeasible:4g+2>n" not in rep.flags

    def test_genus_three_scale_eight(self):
        # 4g+2 = 14 > n = 8: the clique factor C(8, 14) vanishes
        rep = log_expected_CH(ModelParams.from_alpha(3, [0.85, 0.1, 0.0]))
        assert rep.log_n_clique_term == -math.inf
        assert math.isfinite(rep.log_n_pattern_term)
        assert math.isfinite(rep.lower_bound)
        assert not rep.feasible and "infeasible:4g+2>n" in rep.flags
        assert rep.conditions.technical

    def test_tail_inside_pattern_term(self):
        prm = ModelParams.from_alpha(2, [0.5, 0.1], n=40, N=40)
        rep = log_expected_CH(prm)
        assert rep.log_n_tail_term == pytest.approx(taylor_tail(0.1, 2, 40).closed, rel=1e-14)
        no_tail = (8 * -0.5) + (15 * -0.1)
        assert rep.log_n_pattern_term == pytest.approx(no_tail + rep.log_n_tail_term, rel=1e-13)

    def test_simplified_chains(self):
        for g in (2, 5, 9):
            rep = log_expected_CH(sweep_params(g))
            assert rep.simplified_bound_printed == pytest.approx(1 / g + 1 / g**2 + rep.log_n_tail_term)
            # the technical condition makes each summand exceed its bound, so the consistent chain is below
            assert rep.simplified_bound_consistent <= rep.lower_bound

    def test_product_form_in_exact_arithmetic(self):
        for g in (2, 3):
            for n in (32, 64):
                prm = golden_params(g, n)
                rep = log_expected_CH(prm)
                a = (GOLDEN[(g, n)][0], GOLDEN[(g, n)][1], "0")
                exact = oracles.mp_log_clique(n, a, 4 * g + 2) + oracles.mp_log_pattern(n, a, g)
                assert abs(rep.log_n_E_CH - float(exact)) <= 1e-9 * abs(float(exact))

    def test_as_dict(self):
        d = log_expected_CH(sweep_params(3)).as_dict()
        assert d["g"] == 3 and isinstance(d["flags"], list)


class TestSweep:
    def test_row_count(self):
        reps = sweep(range(2, 11))
        assert len(reps) == 9
        assert all(len(report_row(r)) == len(SWEEP_COLUMNS) for r in reps)

    def test_parameters_are_technical(self):
        for g in range(2, 31):
            prm = sweep_params(g)
            assert prm.alpha[1] == 1 / (2 * g * g)
            assert prm.alpha[0] == pytest.approx((g * g - 1) / (g * g) - 0.01)
            assert prm.r == 3 * g - 3 and prm.N == int(prm.n)

    def test_power_rule_flags_small_genus(self):
        reps = sweep(range(2, 7), n_rule="power")
        assert [r.feasible for r in reps] == [False, False, False, True, True]
        assert all("infeasible:4g+2>n" in r.flags for r in reps[:3])

    def test_unknown_rule(self):
        with pytest.raises(ValueError):
            sweep_params(3, n_rule="other")

    def test_lower_bound_holds_across_sweep(self):
        for rep in sweep(range(2, 31)):
            if rep.conditions.chain_domain:
                assert rep.lower_bound_holds
            assert rep.lower_bound <= rep.log_n_E_CH


class TestMonteCarlo:
    def test_clique_all_ones(self):
        prm = ModelParams.from_p([1.0, 1.0, 1.0], N=5)
        est = mc_estimate("clique_count", prm, 50, 3)
        assert est.mean == 1.0 and est.variance == 0.0 and est.stderr == 0.0
        assert closed_form_mean("clique_count", prm) == 1.0

    def test_stderr_identity(self):
        est = mc_estimate("clique_count", ModelParams.from_p([0.9, 0.5, 0.5], N=6), 400, 9, m=3)
        assert est.stderr == pytest.approx(math.sqrt(est.variance / est.trials))

    def test_single_trial(self):
        est = mc_estimate("clique_count", ModelParams.from_p([0.9, 0.5], N=6), 1, 9, m=2)
        assert est.trials == 1 and est.variance == 0.0

    def test_deterministic_and_worker_independent(self):
        prm = ModelParams.from_p([0.9, 0.6, 0.5], N=8)
        a = mc_estimate("clique_count", prm, 600, 5, m=3)
        b = mc_estimate("clique_count", prm, 600, 5, m=3)
        c = mc_estimate("clique_count", prm, 600, 5, m=3, workers=2)
        assert a == b == c

    def test_sandwich_small(self):
        prm = ModelParams.from_p([0.95, 0.6], N=6)
        est = mc_estimate("sandwich", prm, 50000, 17)
        target = closed_form_mean("sandwich", prm)
        assert target == pytest.approx(0.95**6 * 0.6**6 * 0.4**4)
        assert est.within(target)

    def test_sandwich_needs_matching_vertex_set(self):
        with pytest.raises(ValueError):
            mc_estimate("sandwich", ModelParams.from_p([0.9, 0.5], N=7), 10, 1)

    def test_pattern_count_labeled(self):
        prm = ModelParams.from_p([0.95, 0.6], N=8)
        est = mc_estimate("pattern_count", prm, 3000, 21)
        target = closed_form_mean("pattern_count", prm)
        assert target == pytest.approx(math.comb(8, 6) * math.factorial(6) * 0.95**6 * 0.6**6 * 0.4**4)
        assert est.within(target)
        assert closed_form_mean("pattern_count", prm, count="raw") is None

    def test_clique_count_above_cap(self):
        # 4-cliques when only edges are sampled: every 4-set whose 6 edges are present
        prm = ModelParams.from_p([0.9, 0.7], N=8)
        est = mc_estimate("clique_count", prm, 4000, 2, m=4)
        target = closed_form_mean("clique_count", prm, m=4)
        assert target == pytest.approx(math.comb(8, 4) * 0.9**4 * 0.7**6)
        assert est.within(target)

    def test_consistency_over_seeds(self):
        prm = ModelParams.from_p([0.9, 0.6, 0.7], N=6)
        target = closed_form_mean("clique_count", prm, m=3)
        hits = sum(mc_estimate("clique_count", prm, 2000, s, m=3).within(target) for s in range(20))
        assert hits >= 19

    def test_relative_variance_decreases_with_n(self):
        rel = []
        for N in (5, 8, 11, 14):
            est = mc_estimate("clique_count", ModelParams.from_p([1.0, 0.5, 0.5], N=N), 3000, 1, m=3)
            rel.append(est.variance / est.mean**2)
        assert all(a > b for a, b in zip(rel, rel[1:]))

    def test_unknown_event(self):
        with pytest.raises(ValueError):
            mc_estimate("other", ModelParams.from_p([0.5], N=3), 10, 1)
        with pytest.raises(ValueError):
            mc_estimate("clique_count", ModelParams.from_p([0.5], N=3), 0, 1)

    def test_full_skeleton_clique_count(self):
        prm = ModelParams.from_p([1.0, 1.0, 1.0], N=7)
        est = mc_estimate("clique_count", prm, 5, 1, m=3)
        assert est.mean == len(full_skeleton(7, 2).faces(2))
