import random
from fractions import Fraction as F

import pytest

from kinplap.exponents import (
    ProblemParams,
    Reason,
    compute_exponents,
    compute_transfer,
    degiorgi_exponents,
    p_admissible_window,
    scaling_identities_hold,
)


def tbl(d, p, mu):
    return compute_exponents(ProblemParams(d, F(p), F(mu)))


class TestComputeExponents:
    def test_reference_case_d1_p2_mu2(self):
        t = tbl(1, 2, 2)
        assert t.q == F(3)
        assert t.a == 0
        assert t.beta == F(3, 2)
        assert t.Qdim == F(3)
        assert t.theta0 == F(6, 5)
        assert t.theta1 == F(3, 2)
        assert t.thetav == F(6, 5)
        assert t.admissible and t.reason is Reason.OK

    def test_skew_case_d1_p3_mu_three_halves(self):
        t = tbl(1, 3, F(3, 2))
        assert t.a == F(-1, 3)
        assert t.beta == F(9, 8)
        assert t.Qdim == F(9, 4)
        assert t.q == F(18, 5)
        assert t.qbar == F(18, 5)
        assert t.r_source == F(18, 13)
        assert t.admissible
        # consistency identity 1/q = 1/p + (1-beta)/Q
        assert 1 / t.q == 1 / t.p + (1 - t.beta) / t.Qdim == F(5, 18)

    def test_inadmissible_large_mu(self):
        t = tbl(1, 2, 10)
        assert not t.admissible
        assert t.a == F(2, 5) > F(1, 4)
        assert t.reason is Reason.WINDOW_A

    def test_q_below_two_rejected(self):
        t = tbl(1, F(4, 3), F(4, 3))
        assert t.beta == F(3, 2)  # inside the a-window
        assert t.q == F(12, 7) < 2
        assert not t.admissible and t.reason is Reason.WINDOW_Q2

    def test_da_singular(self):
        # d a = 1 at d = 2 via a = 1/2: p = 3/2, mu = 6
        t = tbl(2, F(3, 2), 6)
        assert t.a == F(1, 2)
        assert not t.admissible and t.reason is Reason.DA_SINGULAR
        assert t.beta is None and t.q is not None

    def test_validation(self):
        with pytest.raises(ValueError):
            ProblemParams(0, F(2), F(2))
        with pytest.raises(ValueError):
            ProblemParams(1, F(1), F(2))
        with pytest.raises(ValueError):
            ProblemParams(1, F(2), F(1, 2))


class TestWindow:
    @pytest.mark.parametrize(
        "d,lo,hi", [(1, F(8, 5), F(4)), (2, F(7, 4), F(3)), (3, F(20, 11), F(8, 3))]
    )
    def test_window_values(self, d, lo, hi):
        assert p_admissible_window(d) == (lo, hi)


class TestTransfer:
    def test_reference_transfer(self):
        tt = compute_transfer(ProblemParams(1, F(2), F(2)), F(5, 2))
        assert tt.s == F(2, 15)
        assert tt.alpha_s == F(2, 3)
        assert tt.valid
        assert tt.beta == F(3, 2)
        assert tt.theta0_s == F(10, 9)
        assert tt.theta1_s == F(15, 11)
        assert tt.thetav_s == F(10, 9)

    def test_qbar_boundary_invalid(self):
        tt = compute_transfer(ProblemParams(1, F(2), F(2)), F(3))
        assert tt.s == 0
        assert not tt.valid

    def test_q_to_2_limit_s_one_third(self):
        # s is monotone decreasing in q; its limiting value at q = max{p,p'} = 2
        tt = compute_transfer(ProblemParams(1, F(2), F(2)), F(2))
        assert tt.s == F(1, 3)
        assert not tt.valid  # boundary excluded

    def test_two_alpha_forms_agree_random(self):
        rng = random.Random(4)
        for _ in range(300):
            d = rng.randint(1, 4)
            lo, hi = p_admissible_window(d)
            p = lo + (hi - lo) * F(rng.randint(1, 99), 100)
            params = ProblemParams(d, p, p / (p - 1))
            q = F(rng.randint(150, 500), 100)
            tt = compute_transfer(params, q)
            # the assert inside compute_transfer checks the two closed forms;
            # here check s in (0, 1/3) whenever the window flags valid
            if tt.valid:
                assert 0 < tt.s < F(1, 3)

    def test_requires_dual_mu(self):
        with pytest.raises(ValueError):
            compute_transfer(ProblemParams(1, F(2), F(3)), F(5, 2))


class TestDeGiorgiExponents:
    def test_delta_p2(self):
        delta, _ = degiorgi_exponents(ProblemParams(1, F(2), F(2)))
        assert delta == F(1, 3)

    def test_singular_margin(self):
        _, s = degiorgi_exponents(ProblemParams(1, F(9, 5), F(9, 4)))
        assert s - 1 == F(5, 27)

    def test_boundary_rejected(self):
        with pytest.raises(ValueError):
            degiorgi_exponents(ProblemParams(1, F(8, 5), F(8, 3)))


def random_params(rng, admissible_only=True, n=1000):
    out = []
    while len(out) < n:
        d = rng.randint(1, 4)
        p = F(rng.randint(101, 600), 100)
        mu = F(rng.randint(101, 600), 100)
        t = compute_exponents(ProblemParams(d, p, mu))
        if not admissible_only or t.admissible:
            out.append(t)
    return out


class TestProperties:
    def test_three_q_formulas_agree_exactly_1000(self):
        rng = random.Random(0)
        for t in random_params(rng, n=1000):
            sym = F(1, 4 * t.d + 2) * (F(3 * t.d + 1) / t.p + F(t.d + 1) / t.mu - 1)
            assert 1 / t.q == sym
            assert 1 / t.q == 1 / t.p + (1 - t.beta) / t.Qdim
            assert 1 / t.q == 1 / t.mu + (t.beta - 2) / t.Qdim

    def test_admissibility_booleans_coincide(self):
        rng = random.Random(1)
        for t in random_params(rng, admissible_only=False, n=1500):
            if t.reason is Reason.DA_SINGULAR:
                continue
            inv_q = 1 / t.p + (1 - t.beta) / t.Qdim
            in_beta = 1 < t.beta < 2
            # beta-window iff 1/q sits below both 1/p and 1/mu (exact, signed)
            assert in_beta == (inv_q < 1 / t.p and inv_q < 1 / t.mu)
            b_admissible = in_beta and 0 < inv_q < F(1, 2)
            assert t.admissible == b_admissible

    def test_dual_mu_gives_qbar_and_source_relation(self):
        rng = random.Random(2)
        for _ in range(300):
            d = rng.randint(1, 4)
            lo, hi = p_admissible_window(d)
            p = lo + (hi - lo) * F(rng.randint(1, 199), 200)
            t = compute_exponents(ProblemParams(d, p, p / (p - 1)))
            assert t.q == t.qbar
            # source exponent pairs with theta_1 in the Young relation
            assert 1 / t.qbar + 1 == 1 / t.theta1 + 1 / t.r_source

    def test_scaling_identities_exact(self):
        rng = random.Random(3)
        for t in random_params(rng, n=300):
            assert scaling_identities_hold(t)

    def test_theta_young_relations_exact(self):
        # 1/q + 1 = 1/theta_v + 1/p and = 1/theta_0 + 1/mu
        rng = random.Random(5)
        for t in random_params(rng, n=300):
            assert 1 / t.q + 1 == 1 / t.thetav + 1 / t.p
            assert 1 / t.q + 1 == 1 / t.theta0 + 1 / t.mu
