"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; every tolerance is pinned here and nowhere else.
"""

import random
from fractions import Fraction as F

import numpy as np
import pytest

from kinplap.exponents import ProblemParams, compute_exponents
from kinplap.fields import Field, intrinsic_rescale, lp_norm, weak_lp_norm
from kinplap.geometry import PhasePoint
from kinplap.manufactured import Bump1D, TransportedProfile, gn_pair_gaussian
from kinplap.mollify import (
    KernelFamily,
    SourceDecomposition,
    apply_TJ_kernel,
    apply_TK_mspace,
    fd_compensated_sup,
    integrated_kernel_field,
    kernel_lp_norm,
    kernel_mass,
    young_check,
)
from kinplap.solver import Nonlinearity, SolverConfig, solve
from kinplap.trajectories import TrajectoryParams, check_M1, det_w
from kinplap.verify import (
    degiorgi_run,
    energy_experiment,
    fast_convergence_lemma,
    gn_experiment,
    transfer_experiment,
)

from test_mollify import residual_suite

BETA = 1.5
QDIM = 3.0


def report(num, name, ok, detail=""):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {name} {detail}")
    assert ok, f"criterion {num} failed: {name} {detail}"


def test_criterion_1_exponent_identities():
    rng = random.Random(42)
    count = 0
    while count < 1000:
        d = rng.randint(1, 4)
        p = F(rng.randint(101, 600), 100)
        mu = F(rng.randint(101, 600), 100)
        t = compute_exponents(ProblemParams(d, p, mu))
        if not t.admissible:
            continue
        sym = F(1, 4 * d + 2) * (F(3 * d + 1) / p + F(d + 1) / mu - 1)
        assert 1 / t.q == sym
        assert 1 / t.q == 1 / t.p + (1 - t.beta) / t.Qdim
        assert 1 / t.q == 1 / t.mu + (t.beta - 2) / t.Qdim
        count += 1
    ref = compute_exponents(ProblemParams(1, F(2), F(2)))
    ok = ref.q == F(3) and ref.beta == F(3, 2)
    report(1, "exponent identities (1000 exact, reference q=3 beta=3/2)", ok)


def test_criterion_2_trajectory_determinant_and_M1():
    r = np.logspace(-3, 3, 121)
    det_ok = all(
        np.max(np.abs(det_w(r, b) / (-(r ** (2 * b - 1))) - 1.0)) < 1e-10
        for b in (9 / 8, 3 / 2, 15 / 8)
    )
    tp = TrajectoryParams.of(1.5, -1.3, 0.4, -0.7)
    z = PhasePoint.of(0.1, -0.2, 0.3)
    hs = np.array([2e-3, 1e-3, 5e-4, 2.5e-4])
    res = np.array([check_M1(tp, 0.9, z, h) for h in hs])
    slope = float(np.polyfit(np.log(hs), np.log(res), 1)[0])
    ok = det_ok and abs(slope - 2.0) < 0.1
    report(2, "trajectory determinant + M1 order", ok, f"M1 slope={slope:.3f}")


def test_criterion_3_change_of_variables():
    def gauss(t, x, v):
        return np.exp(-(np.asarray(t) ** 2 + 0.5 * np.asarray(x) ** 2 + np.asarray(v) ** 2))

    box = ((-3.0, 3.0), (-3.0, 3.0), (-3.0, 3.0))
    grid = Field.from_function(box, (64, 64, 64), gauss)
    worst = 0.0
    for tau in (0.3, 0.6, 1.2):
        fam = KernelFamily.of(BETA, tau)
        JK, kbox = fam.kernel_fn("K")
        for f in (gauss, grid):
            for z in (PhasePoint.of(0.1, -0.2, 0.3), PhasePoint.of(0.3, 0.4, -0.1)):
                a = apply_TJ_kernel(JK, kbox, f, z, n=24)
                b = apply_TK_mspace(fam, f, z, n=24)
                worst = max(worst, abs(a - b) / abs(b))
    mass_err = max(abs(kernel_mass(KernelFamily.of(BETA, t), n=96) - 1.0)
                   for t in (0.3, 0.6, 1.2))
    ok = worst < 1e-3 and mass_err < 1e-6
    report(3, "m-space vs kernel-space + unit mass", ok,
           f"rel={worst:.2e} mass_err={mass_err:.2e}")


def test_criterion_4_representation_identity():
    fam = KernelFamily.of(BETA, 0.5)
    base = residual_suite(fam, n_r=64, n=16)
    fine = residual_suite(fam, n_r=96, n=24)
    ok = base <= 1e-2 and fine < base
    report(4, "representation identity residual", ok,
           f"base={base:.2e} refined={fine:.2e}")


def test_criterion_5_kernel_norm_scaling():
    rs = np.logspace(-1, 1, 7)
    slope_ok = True
    details = []
    for theta in (1.0, 1.2, 2.0, np.inf):
        norms = [kernel_lp_norm(KernelFamily.of(BETA, r), theta, n=40) for r in rs]
        pred = QDIM * (1.0 / theta - 1.0) if np.isfinite(theta) else -QDIM
        slope = float(np.polyfit(np.log(rs), np.log(norms), 1)[0])
        slope_ok &= abs(slope - pred) < 0.05
        details.append(f"{theta}:{slope - pred:+.3f}")

    weak_ok = True
    th = {"G0": QDIM / (QDIM + BETA - 2), "G1": QDIM / (QDIM - 1),
          "Gv": QDIM / (QDIM + 1 - BETA)}
    for kind, theta in th.items():
        vals = [
            weak_lp_norm(
                integrated_kernel_field(KernelFamily.of(BETA, tau), kind,
                                        shape=(128, 48, 48), n_r=24),
                theta,
            )
            for tau in (0.25, 1.0, 4.0)
        ]
        weak_ok &= max(vals) / min(vals) < 1.2

    s, theta = 2.0 / 15.0, 1.2
    fam = KernelFamily.of(BETA, 1.0)
    hs = np.array([0.5 * 2.0**-j for j in range(5)])
    vals = np.array([fd_compensated_sup(fam, h, theta, s) for h in hs])
    fd_slope = float(np.polyfit(np.log(hs), np.log(vals), 1)[0])
    fd_ok = abs(fd_slope - s) < 0.05

    ok = slope_ok and weak_ok and fd_ok
    report(5, "kernel norm scaling + weak-norm uniformity + fd slopes", ok,
           f"slope_errs={details} fd_slope={fd_slope:.4f} (s={s:.4f})")


def test_criterion_6_gn_scaling_invariance():
    pair = gn_pair_gaussian(0.5, 0.5, 0.5)
    box = ((-3.0, 3.0), (-3.0, 3.0), (-3.0, 3.0))
    src = SourceDecomposition(pair.S0, pair.S1)
    params = ProblemParams(1, F(2), F(2))
    base = gn_experiment(Field.from_function(box, (112, 112, 112), pair.f), src, params)
    fine = gn_experiment(Field.from_function(box, (144, 144, 144), pair.f), src, params)
    ok = (base.scaling_spread <= 1.02 and fine.scaling_spread <= 1.02
          and abs(base.ratio - fine.ratio) / fine.ratio <= 0.10)
    report(6, "GN scaling invariance", ok,
           f"spread={base.scaling_spread:.4f}/{fine.scaling_spread:.4f} "
           f"C drift={abs(base.ratio - fine.ratio) / fine.ratio:.3%}")


def test_criterion_7_young_inequality():
    box = ((-1.5, 1.5), (-2.0, 2.0), (-1.5, 1.5))
    f = Field.from_function(box, (32, 32, 32),
                            lambda T, X, V: np.exp(-(T**2 + X**2 + V**2) / 0.5))
    fam = KernelFamily.of(BETA, 0.4)
    J, kbox = fam.kernel_fn("K")
    ok = True
    ratios = []
    for theta, p_in in ((1.0, 3.0), (1.2, 2.0), (1.5, 1.5)):
        lhs, rhs = young_check(J, kbox, theta, f, p_in, out_shape=(24, 24, 24), n=10)
        ok &= lhs <= 1.05 * rhs
        ratios.append(lhs / rhs)
    report(7, "Young inequality", ok, f"lhs/rhs={[f'{r:.3f}' for r in ratios]}")


def _energy_run(p, theta, R2, nx, nv):
    depth = theta * R2**p
    # the box must contain the outer cylinder: transport shear only involves
    # velocities up to |v0| + R2, not the whole v-box
    x_need = (theta * R2 ** (1 + p) + depth * (R2 + 0.2)) * 1.15
    nl = Nonlinearity.p_laplace(p)
    cfg = SolverConfig(x_box=(-x_need, x_need), v_box=(-1.8, 1.8),
                       nx=nx, nv=nv, t_end=depth * 1.05)
    X, V = np.meshgrid(cfg.x, cfg.v, indexing="ij")
    f0 = 2.0 * np.maximum(0.0, 1.0 - X**2 - V**2) ** 2
    res = solve(f0, nl, cfg)
    center = PhasePoint.of(cfg.t_end, 0.0, 0.0)
    return energy_experiment(res.field, nl, theta, 0.75 * R2, R2, center)["C_meas"]


def test_criterion_8_energy_estimate():
    ok = True
    details = []
    for p in (9 / 5, 2.0, 3.0):
        base = _energy_run(p, 1.0, 1.0, 64, 48)
        fine = _energy_run(p, 1.0, 1.0, 96, 72)
        stable = np.isfinite(base) and abs(base - fine) / fine <= 0.20
        sweep = [_energy_run(p, 0.25, 1.0, 64, 48), _energy_run(p, 4.0, 0.6, 64, 48)]
        bounded = all(np.isfinite(c) and c >= 0 for c in sweep)
        bounded &= max(sweep + [base]) <= 100 * max(min(sweep + [base]), 1e-9)
        ok &= stable and bounded
        details.append(f"p={p:.2f}: C={base:.3g}/{fine:.3g} theta-sweep={sweep}")
    report(8, "Caccioppoli energy constant", ok, "; ".join(details))


def test_criterion_9_degiorgi_machinery():
    # (a) fast-convergence matrix
    matrix_ok = True
    for C1 in (1.0, 10.0, 100.0):
        for b in (2.0, 4.0, 8.0):
            for delta in (0.2, 1 / 3, 1.0):
                d0 = C1 ** (-1.0 / delta) * b ** (-1.0 / delta**2)
                _, trace, _ = fast_convergence_lemma(C1, b, delta, d0)
                below = [m for m, y in enumerate(trace) if y < 1e-12]
                matrix_ok &= bool(below) and below[0] <= 60

    # (b) end-to-end runs, both modes; counting checks are inside the trace
    def end_to_end(p, K, amp, nx, nv):
        theta = K ** (2.0 - p)
        depth = theta * 2.0**p
        x_need = (theta * 2.0 ** (1 + p) + depth * 2.0) * 1.05
        nl = Nonlinearity.p_laplace(p)
        cfg = SolverConfig(x_box=(-x_need, x_need), v_box=(-2.5, 2.5),
                           nx=nx, nv=nv, t_end=depth)
        X, V = np.meshgrid(cfg.x, cfg.v, indexing="ij")
        f0 = amp * np.maximum(0.0, 1.0 - (X / 2.0) ** 2 - V**2) ** 2
        res = solve(f0, nl, cfg)
        u = intrinsic_rescale(res.field, K, p)
        center = PhasePoint.of(cfg.t_end / theta, 0.0, 0.0)
        mode = "p_ge_2" if p >= 2 else "singular"
        return degiorgi_run(u, center, p, mode=mode)

    tr3 = end_to_end(3.0, 2.0, 2.5, 64, 48)
    tr95 = end_to_end(1.8, 1.2, 1.6, 56, 40)
    counting_ok = all(l["level_set_ok"] for l in tr3.levels) and all(
        l.get("l2_interp_ok", True) for l in tr3.levels
    ) and all(l.get("chebyshev_ok", True) for l in tr95.levels)
    e2e_ok = (tr3.energies[0] > 0 and tr3.sup_bound_ok
              and tr95.energies[0] > 0 and tr95.sup_bound_ok)
    ok = matrix_ok and counting_ok and e2e_ok
    report(9, "De Giorgi machinery", ok,
           f"sup(p=3)={tr3.sup_inner:.3f} sup(p=9/5)={tr95.sup_inner:.3f}")


def test_criterion_10_solver_sanity():
    cfg = SolverConfig(x_box=(-3, 3), v_box=(-3, 3), nx=32, nv=48, t_end=0.25)
    X, V = np.meshgrid(cfg.x, cfg.v, indexing="ij")
    f0 = 2.0 * np.maximum(0.0, 1.0 - X**2 - V**2) ** 2
    res = solve(f0, Nonlinearity.p_laplace(2.0), cfg)
    masses = [d["mass"] for d in res.diagnostics]
    mass_ok = abs(masses[-1] - masses[0]) < 1e-10
    l2 = [d["l2"] for d in res.diagnostics]
    l2_ok = all(l2[i + 1] <= l2[i] + 1e-13 for i in range(len(l2) - 1))

    prof = TransportedProfile(Lx=6.0, k=2, c=Bump1D(0.8, 1.8))
    errs = []
    for n in (24, 48, 96):
        c = SolverConfig(x_box=(-3, 3), v_box=(-3, 3), nx=n, nv=n, t_end=0.3)
        Xm, Vm = np.meshgrid(c.x, c.v, indexing="ij")
        r = solve(prof.value(0.0, Xm, Vm), Nonlinearity.p_laplace(2.0), c,
                  source=lambda t, x, v: prof.source(t, x, v, p=2.0, eps=0.0))
        T3, X3, V3 = r.field.meshgrid()
        errs.append(np.max(np.abs(r.field.data - prof.value(T3, X3, V3))))
    slopes = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    mms_ok = np.all(np.abs(slopes - 1.0) <= 0.3)

    sig0 = 0.4
    ch = SolverConfig(x_box=(-3, 3), v_box=(-3, 3), nx=16, nv=64, t_end=0.25)
    h0 = np.ones((16, 1)) * np.exp(-ch.v[None, :] ** 2 / (2 * sig0**2))
    rh = solve(h0, Nonlinearity.p_laplace(2.0), ch)
    pred = sig0 / np.sqrt(sig0**2 + 2 * ch.t_end)
    heat_ok = abs(rh.diagnostics[-1]["max"] - pred) / pred < 0.05

    ok = mass_ok and l2_ok and mms_ok and heat_ok
    report(10, "solver sanity", ok,
           f"mass_drift={abs(masses[-1] - masses[0]):.1e} "
           f"mms_slopes={[f'{s:.2f}' for s in slopes]} heat_rel="
           f"{abs(rh.diagnostics[-1]['max'] - pred) / pred:.3f}")


def test_criterion_11_transfer_of_regularity():
    pair = gn_pair_gaussian(0.5, 0.5, 0.5)
    box = ((-3.0, 3.0), (-3.0, 3.0), (-3.0, 3.0))
    src = SourceDecomposition(pair.S0, pair.S1)
    params = ProblemParams(1, F(2), F(2))
    h_set = [1.6 * 2.0**-j for j in range(8)]  # > 2 decades
    reps = [
        transfer_experiment(Field.from_function(box, (n, n, n), pair.f), src,
                            params, F(5, 2), h_set)
        for n in (96, 144)
    ]
    quots = [list(r["per_h"].values()) for r in reps]
    bounded = all(max(q) / max(min(q), 1e-30) < 100 for q in quots)
    drift = abs(reps[0]["C_meas"] - reps[1]["C_meas"]) / reps[1]["C_meas"]
    ok = bounded and drift <= 0.20 and reps[0]["s"] == pytest.approx(2 / 15)
    report(11, "Besov transfer of regularity", ok,
           f"C={reps[0]['C_meas']:.4f}/{reps[1]['C_meas']:.4f} drift={drift:.2%}")
