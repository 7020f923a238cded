import numpy as np
import pytest

from kinplap.fields import Field, lp_norm
from kinplap.manufactured import Bump1D, TransportedProfile
from kinplap.solver import (
    CFLError,
    Nonlinearity,
    SolverConfig,
    cfl_dt,
    residual,
    solve,
    step,
    transport_decomposition,
    weak_subsolution_defect,
)


def cfg_(nx=32, nv=48, t_end=0.25, **kw):
    return SolverConfig(x_box=(-3, 3), v_box=(-3, 3), nx=nx, nv=nv, t_end=t_end, **kw)


def bump_ic(cfg, amp=2.0, wx=1.0, wv=1.0):
    X, V = np.meshgrid(cfg.x, cfg.v, indexing="ij")
    return amp * np.maximum(0.0, 1.0 - (X / wx) ** 2 - (V / wv) ** 2) ** 2


class TestNonlinearity:
    def test_p_laplace_bounds_sampled(self):
        for p in (1.8, 2.0, 3.0):
            nl = Nonlinearity.p_laplace(p, eps_reg=0.0)
            rep = nl.check_growth_bounds(np.random.default_rng(0))
            assert rep["min_coercivity"] >= 1.0 - 1e-9
            assert rep["max_growth"] <= 1.0 + 1e-9

    def test_custom_flux_bounds(self):
        # an anisotropic-in-z admissible flux with lambda=1/2, Lambda=2
        def flux(t, x, v, eta, xi):
            w = 0.5 + 0.25 * (1 + np.sin(3 * np.asarray(x)))
            return 2.0 * w * np.abs(xi) ** 0.5 * np.sign(xi) * np.abs(xi) ** 0.5

        nl = Nonlinearity(p=2.0, lam=0.5, Lam=2.0, flux=flux)
        rep = nl.check_growth_bounds(np.random.default_rng(1))
        assert rep["min_coercivity"] >= nl.lam - 1e-9
        assert rep["max_growth"] <= nl.Lam + 1e-9

    def test_regularized_default_for_singular(self):
        assert Nonlinearity.p_laplace(1.8).eps_reg == 1e-6
        assert Nonlinearity.p_laplace(2.5).eps_reg == 0.0


class TestStep:
    def test_constant_unchanged(self):
        cfg = cfg_()
        nl = Nonlinearity.p_laplace(2.0)
        f = np.full((cfg.nx, cfg.nv), 0.7)
        out = step(f, nl, cfg, dt=1e-3)
        assert np.max(np.abs(out - 0.7)) == 0.0

    def test_cfl_violation_detected(self):
        cfg = cfg_()
        nl = Nonlinearity.p_laplace(3.0)
        f = bump_ic(cfg)
        with pytest.raises(CFLError):
            step(f, nl, cfg, dt=100.0)

    def test_nan_guard(self):
        cfg = cfg_()
        f = np.full((cfg.nx, cfg.nv), np.nan)
        with pytest.raises(FloatingPointError):
            step(f, Nonlinearity.p_laplace(2.0), cfg, dt=1e-4)


class TestSolve:
    @pytest.mark.parametrize("p", [1.8, 2.0, 3.0])
    def test_mass_conservation(self, p):
        cfg = cfg_(t_end=0.05 if p < 2 else 0.25)
        res = solve(bump_ic(cfg), Nonlinearity.p_laplace(p), cfg)
        masses = [d["mass"] for d in res.diagnostics]
        assert abs(masses[-1] - masses[0]) < 1e-10

    @pytest.mark.parametrize("p", [1.8, 2.0, 3.0])
    def test_nonnegativity_under_cfl(self, p):
        cfg = cfg_(t_end=0.05 if p < 2 else 0.25)
        rng = np.random.default_rng(2)
        f0 = bump_ic(cfg) * (1.0 + 0.3 * rng.uniform(-1, 1, (cfg.nx, cfg.nv)))
        f0 = np.maximum(f0, 0.0)
        res = solve(f0, Nonlinearity.p_laplace(p), cfg)
        assert res.field.data.min() >= 0.0

    def test_l2_monotone_decay(self):
        cfg = cfg_(t_end=0.3)
        res = solve(bump_ic(cfg), Nonlinearity.p_laplace(2.0), cfg)
        l2 = [d["l2"] for d in res.diagnostics]
        assert all(l2[i + 1] <= l2[i] + 1e-13 for i in range(len(l2) - 1))

    def test_heat_kernel_sup_decay_p2(self):
        cfg = cfg_(nx=16, nv=64, t_end=0.25)
        sig0 = 0.4
        f0 = np.ones((cfg.nx, 1)) * np.exp(-cfg.v[None, :] ** 2 / (2 * sig0**2))
        res = solve(f0, Nonlinearity.p_laplace(2.0), cfg)
        measured = res.diagnostics[-1]["max"]
        predicted = sig0 / np.sqrt(sig0**2 + 2 * cfg.t_end)
        assert abs(measured - predicted) / predicted < 0.05

    def test_transport_only_translation(self):
        # flux = 0: profile translates at speed v per v-slice
        cfg = cfg_(nx=64, nv=16, t_end=0.2)
        nlz = Nonlinearity(p=2.0, flux=lambda t, x, v, eta, xi: np.zeros_like(np.asarray(xi)))
        prof = TransportedProfile(Lx=6.0, a1=0.0, c=Bump1D(0.8, 1.2))
        X, V = np.meshgrid(cfg.x, cfg.v, indexing="ij")
        res = solve(prof.value(0.0, X, V), nlz, cfg)
        F = res.field
        T3, X3, V3 = F.meshgrid()
        err = np.max(np.abs(F.data - prof.value(T3, X3, V3)))
        assert err < 0.1  # upwind dissipation O(dx)
        l2 = [d["l2"] for d in res.diagnostics]
        assert l2[-1] <= l2[0] + 1e-13

    def test_instability_guard(self):
        cfg = cfg_(dt=1e-3)

        def explosive(t, x, v):
            return np.ones((cfg.nx, cfg.nv)) * 1e3

        with pytest.raises(RuntimeError):
            solve(bump_ic(cfg, amp=0.1), Nonlinearity.p_laplace(2.0), cfg,
                  source=explosive)


class TestManufactured:
    def test_first_order_convergence(self):
        prof = TransportedProfile(Lx=6.0, k=2, c=Bump1D(0.8, 1.8))
        errs = []
        for n in (24, 48, 96):
            cfg = cfg_(nx=n, nv=n, t_end=0.3)
            nl = Nonlinearity.p_laplace(2.0)
            X, V = np.meshgrid(cfg.x, cfg.v, indexing="ij")
            res = solve(prof.value(0.0, X, V), nl, cfg,
                        source=lambda t, x, v: prof.source(t, x, v, p=2.0, eps=0.0))
            T3, X3, V3 = res.field.meshgrid()
            errs.append(np.max(np.abs(res.field.data - prof.value(T3, X3, V3))))
        slopes = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(slopes > 0.7) and np.all(slopes < 1.3)

    def test_p3_forced_run_tracks_solution(self):
        prof = TransportedProfile(Lx=6.0, k=1, c=Bump1D(0.0, 1.8))
        cfg = cfg_(nx=48, nv=48, t_end=0.2)
        nl = Nonlinearity.p_laplace(3.0)
        X, V = np.meshgrid(cfg.x, cfg.v, indexing="ij")
        res = solve(prof.value(0.0, X, V), nl, cfg,
                    source=lambda t, x, v: prof.source(t, x, v, p=3.0, eps=0.0))
        T3, X3, V3 = res.field.meshgrid()
        err = np.max(np.abs(res.field.data - prof.value(T3, X3, V3)))
        assert err < 0.08


class TestResidual:
    def test_constants_zero(self):
        box = ((0.0, 1.0), (-3.0, 3.0), (-3.0, 3.0))
        f = Field(box, np.full((10, 16, 16), 1.3))
        res = residual(f, Nonlinearity.p_laplace(2.0))
        assert np.max(np.abs(res.data)) == 0.0

    def test_solution_residual_decreases_under_refinement(self):
        vals = []
        for n in (24, 48):
            cfg = cfg_(nx=n, nv=n, t_end=0.1)
            nl = Nonlinearity.p_laplace(2.0)
            res = solve(bump_ic(cfg, wx=1.5, wv=1.5), nl, cfg)
            r = residual(res.field, nl)
            vals.append(lp_norm(r, 2))
        assert vals[1] < vals[0]

    def test_dilation_covariance_exact(self):
        # residual(f ∘ delta_r) = r^p residual(f) ∘ delta_r, cell by cell
        p, r = 3.0, 2.0
        nl = Nonlinearity.p_laplace(p, eps_reg=0.0)
        rng = np.random.default_rng(3)
        box = ((0.0, 1.0), (-2.0, 2.0), (-1.0, 1.0))
        data = rng.uniform(0.2, 1.0, (8, 12, 10))
        f = Field(box, data)
        fd = Field(
            ((0.0, 1.0 / r**p), (-2.0 / r ** (1 + p), 2.0 / r ** (1 + p)),
             (-1.0 / r, 1.0 / r)),
            data,
        )
        res = residual(f, nl)
        resd = residual(fd, nl)
        assert np.max(np.abs(resd.data - r**p * res.data)) < 1e-9 * np.max(np.abs(res.data))


class TestTransportDecomposition:
    def test_solution_has_small_s1(self):
        cfg = cfg_(nx=40, nv=40, t_end=0.15)
        nl = Nonlinearity.p_laplace(2.0)
        res = solve(bump_ic(cfg, wx=1.5, wv=1.5), nl, cfg)
        src = transport_decomposition(res.field, nl)
        n_s0 = lp_norm(src.S0, 2)
        n_s1 = lp_norm(src.S1, 2)
        assert n_s1 < 0.2 * n_s0

    def test_zero_field(self):
        box = ((0.0, 1.0), (-1.0, 1.0), (-1.0, 1.0))
        f = Field(box, np.zeros((8, 10, 10)))
        src = transport_decomposition(f, Nonlinearity.p_laplace(2.0))
        assert lp_norm(src.S0, 2) == 0.0 and lp_norm(src.S1, 2) == 0.0

    def test_dual_norm_growth_bound(self):
        # ||S0||_{p'} <= Lambda ||grad_v f||_p^{p-1}, exact pointwise bound
        from kinplap.fields import grad_v

        cfg = cfg_(nx=24, nv=32, t_end=0.1)
        for p in (2.0, 3.0):
            nl = Nonlinearity.p_laplace(p)
            res = solve(bump_ic(cfg), nl, cfg)
            src = transport_decomposition(res.field, nl)
            pp = p / (p - 1.0)
            lhs = lp_norm(src.S0, pp)
            rhs = nl.Lam * lp_norm(grad_v(res.field), p) ** (p - 1.0)
            assert lhs <= rhs * (1 + 1e-9)


class TestSubsolution:
    def test_truncation_weak_defect_nonpositive(self):
        cfg = cfg_(nx=32, nv=32, t_end=0.2)
        nl = Nonlinearity.p_laplace(2.0)
        res = solve(bump_ic(cfg), nl, cfg)
        from kinplap.fields import truncate

        w = truncate(res.field, 0.4)
        # smooth nonnegative test bumps well inside the domain
        phis = [
            Field.from_function(res.field.box, (res.field.shape[0], 24, 24),
                                lambda T, X, V, c=c: np.exp(-((X - c) ** 2 + V**2)))
            for c in (-0.5, 0.0, 0.5)
        ]
        phis = [Field(w.box, p.sample(*w.meshgrid())) for p in phis]
        defect = weak_subsolution_defect(w, nl, phis)
        dt, dx, dv = w.spacing
        assert defect <= 2.0 * (dt + dx + dv)

    def test_galilean_covariance(self):
        # solving from composed data reproduces the composed solution
        cfg = cfg_(nx=64, nv=64, t_end=0.15)
        nl = Nonlinearity.p_laplace(2.0)
        w_shift = 0.5
        f0 = bump_ic(cfg, wx=1.2, wv=1.0)
        res = solve(f0, nl, cfg)
        X, V = np.meshgrid(cfg.x, cfg.v, indexing="ij")
        g0 = bump_ic(cfg, wx=1.2, wv=1.0) * 0.0
        base = lambda x, v: 2.0 * np.maximum(0.0, 1.0 - (x / 1.2) ** 2 - v**2) ** 2
        g0 = base(X, V - w_shift)  # data shifted by the group element (0,0,w)
        resg = solve(g0, nl, cfg)
        T3, X3, V3 = resg.field.meshgrid()
        # g(t,x,v) should equal f(t, x - t w, v - w) up to scheme error
        ref = res.field.sample(T3, X3 - T3 * w_shift, V3 - w_shift)
        interior = (np.abs(X3) < 1.5) & (np.abs(V3 - w_shift) < 1.5)
        err = np.max(np.abs(np.where(interior, resg.field.data - ref, 0.0)))
        assert err < 0.12
