"""Lasso traces: evaluation, projection, Z extraction, serialization."""

import pytest

from ltlsplit import (
    TRUE,
    LassoTrace,
    compute_z,
    eval_formula,
    format_trace,
    lasso,
    parse_formula,
    parse_trace,
    project_trace,
    state,
    strip_primes,
)

PHI_EX1 = parse_formula("G(p -> (a | (b & c))) & F(p -> (d | e)) & F(!p -> !e)")


class TestLassoTrace:
    def test_position_access_is_total(self):
        t = lasso([state("a")], [state("b"), state("c")])
        assert t.state_at(0) == state("a")
        assert t.state_at(1) == state("b")
        assert t.state_at(2) == state("c")
        assert t.state_at(3) == state("b")
        assert t.state_at(101) == state("b")

    def test_loop_nonempty(self):
        with pytest.raises(ValueError):
            LassoTrace((), ())

    def test_unroll_same_word(self):
        t = lasso([state("a")], [state("b"), state("c")])
        u = t.unroll(3, 4)
        assert all(t.state_at(i) == u.state_at(i) for i in range(20))

    def test_unroll_rejects_incompatible(self):
        t = lasso([], [state("a"), state("b")])
        with pytest.raises(ValueError):
            t.unroll(0, 3)


class TestEval:
    def test_reference_model(self):
        tau = lasso([], [state("p", "a", "d")])
        assert eval_formula(tau, PHI_EX1, 0)

    def test_reference_countermodel(self):
        tau = lasso([state("p", "a"), state("p", "c")], [state("p")])
        phi = parse_formula("F ((p -> ((a | b) & c)) & (!p -> !c))")
        assert not eval_formula(tau, phi, 0)

    def test_true_everywhere(self):
        tau = lasso([], [state()])
        assert eval_formula(tau, TRUE, 0)
        assert eval_formula(tau, TRUE, 7)

    def test_absent_atom_is_false(self):
        tau = lasso([], [state("a")])
        assert not eval_formula(tau, parse_formula("zeta"), 0)

    def test_periodicity(self):
        tau = lasso([state("a")], [state("b"), state()])
        f = parse_formula("b U a | X b")
        for i in range(1, 6):
            assert eval_formula(tau, f, i) == eval_formula(tau, f, i + 2)

    def test_until_expansion_law(self):
        tau = lasso([state("a"), state()], [state("b"), state("a")])
        f = parse_formula("a U b")
        for i in range(8):
            expanded = eval_formula(tau, parse_formula("b"), i) or (
                eval_formula(tau, parse_formula("a"), i)
                and eval_formula(tau, f, i + 1))
            assert eval_formula(tau, f, i) == expanded

    def test_release_dual_of_until(self):
        tau = lasso([state("a")], [state("a", "b"), state()])
        lhs = parse_formula("a R b")
        rhs = parse_formula("!(!a U !b)")
        for i in range(6):
            assert eval_formula(tau, lhs, i) == eval_formula(tau, rhs, i)

    def test_always_eventually_duality(self):
        tau = lasso([], [state("a"), state()])
        assert eval_formula(tau, parse_formula("G F a"), 0)
        assert not eval_formula(tau, parse_formula("F G a"), 0)

    def test_negative_position_rejected(self):
        with pytest.raises(ValueError):
            eval_formula(lasso([], [state()]), TRUE, -1)


class TestProjection:
    def test_keep_one(self):
        tau = lasso([], [state("p", "a", "d")])
        got = project_trace(tau, {"a"}, {"a", "b", "c", "d", "e"})
        assert got == lasso([], [state("p", "a")])

    def test_keep_pair(self):
        tau = lasso([], [state("p", "a", "c")])
        got = project_trace(tau, {"b", "c"}, {"a", "b", "c"})
        assert got == lasso([], [state("p", "c")])

    def test_full_set_identity(self):
        tau = lasso([state("p", "a")], [state("b")])
        assert project_trace(tau, {"a", "b"}, {"a", "b"}) == tau

    def test_primes_dropped(self):
        tau = lasso([], [state("p", "a", "a'")])
        got = project_trace(tau, {"a"}, {"a"})
        assert got == lasso([], [state("p", "a")])

    def test_idempotent(self):
        tau = lasso([state("p", "a", "b")], [state("b", "c")])
        once = project_trace(tau, {"a"}, {"a", "b", "c"})
        assert project_trace(once, {"a"}, {"a", "b", "c"}) == once


class TestStripPrimes:
    def test_reference_trace(self):
        tau = lasso([state("p", "a", "c'"), state("p", "a'", "c")],
                    [state("p", "c")])
        assert strip_primes(tau) == lasso(
            [state("p", "a"), state("p", "c")], [state("p", "c")])

    def test_no_primes_unchanged(self):
        tau = lasso([], [state("a", "b")])
        assert strip_primes(tau) == tau

    def test_mixed_single_state(self):
        tau = lasso([], [state("t", "t'", "z", "z'")])
        assert strip_primes(tau) == lasso([], [state("t", "z")])


class TestComputeZ:
    def test_intro_mu(self):
        mu = lasso([state("p", "v'", "t'"), state("v", "v'", "w'", "z'"),
                    state("t", "t'", "z", "z'")],
                   [state("t", "t'", "w", "w'")])
        assert compute_z(mu, ["t", "v", "z"]) == ("t", "v", "z")

    def test_intro_nu(self):
        nu = lasso([state("v"), state("t", "t'", "w'", "z'")],
                   [state("t", "t'", "w", "w'")])
        assert compute_z(nu, ["t", "z"]) == ("z",)

    def test_all_agree(self):
        tau = lasso([], [state("t", "t'"), state()])
        assert compute_z(tau, ["t", "z"]) == ()

    def test_candidate_order_preserved(self):
        tau = lasso([], [state("a", "b'")])
        assert compute_z(tau, ["b", "a"]) == ("b", "a")

    def test_subset_of_candidates(self):
        tau = lasso([], [state("a")])
        assert set(compute_z(tau, ["a", "b"])) <= {"a", "b"}


class TestSerialization:
    def test_format(self):
        tau = lasso([state("p", "a")], [state("p", "t'", "t")])
        assert format_trace(tau) == "{a, p} | {p, t, t'}"

    def test_format_empty_prefix(self):
        tau = lasso([], [state(), state("a")])
        assert format_trace(tau) == "| {} ; {a}"

    def test_var_order(self):
        tau = lasso([], [state("p", "t", "v'")])
        assert format_trace(tau, ["v", "t", "p"]) == "| {v', t, p}"

    def test_round_trip(self):
        tau = lasso([state("p"), state("a", "a'")], [state(), state("b'")])
        assert parse_trace(format_trace(tau)) == tau

    @pytest.mark.parametrize("text", ["", "{a}", "{a ; |", "| a}", "{a} |"])
    def test_malformed(self, text):
        with pytest.raises(ValueError):
            parse_trace(text)
