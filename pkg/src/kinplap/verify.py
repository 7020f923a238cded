"""Experiment harness: interpolation-ratio scaling, subsolution gain,
localized gain, Caccioppoli energy, Besov transfer, and the two truncation
iterations with their fast-convergence backbone.

Constants in the underlying estimates are never explicit, so every
experiment MEASURES the constant it sees and the callers assert stability
(under refinement, parameter sweeps) rather than specific values.  The
counting steps of the iteration (level-set, Chebyshev, discrete Hoelder)
hold exactly on cell-centered grids and are checked exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exponents import ProblemParams, compute_exponents, compute_transfer
from .fields import (
    Field,
    besov_seminorm,
    grad_v,
    level_set_measure,
    linf_l2_slice_norm,
    lp_norm,
    truncate,
)
from .geometry import Cylinder, PhasePoint
from .mollify import SourceDecomposition, sample_any
from .solver import Nonlinearity


@dataclass(frozen=True)
class GNReport:
    q: float
    p: float
    mu: float
    norm_f_q: float
    norm_grad_p: float
    norm_S0_mu: float
    ratio: Optional[float]
    scaling_spread: Optional[float]
    degenerate: bool
    rescaled_ratios: dict


def _resample(f: Field, coord_map) -> Field:
    """Field of f(coord_map(t,x,v)) on f's own grid (zero-extension beyond)."""
    T, X, V = f.meshgrid()
    tt, xx, vv = coord_map(T, X, V)
    return f.with_data(f.sample(tt, xx, vv))


def _norms(f: Field, src_S0, q: float, p: float, mu: float):
    nf = lp_norm(f, q)
    ng = lp_norm(grad_v(f), p)
    T, X, V = f.meshgrid()
    s0 = f.with_data(np.asarray(sample_any(src_S0, T, X, V), dtype=float) + 0.0 * f.data)
    ns = lp_norm(s0, mu)
    return nf, ng, ns


def gn_experiment(f: Field, src: SourceDecomposition, params: ProblemParams) -> GNReport:
    """Interpolation ratio ||f||_q / (||d_v f||_p^a ||S0||_mu^{1-a}) and its
    spread over the two admissible-scaling families."""
    table = compute_exponents(params)
    if not table.admissible:
        raise ValueError(f"params not admissible: {table.reason}")
    q, p, mu = float(table.q), float(params.p), float(params.mu)
    alpha = float(table.alpha)

    def ratio_of(ff: Field, s0_fn) -> tuple[Optional[float], tuple]:
        nf, ng, ns = _norms(ff, s0_fn, q, p, mu)
        if ng == 0.0 and ns == 0.0:
            return None, (nf, ng, ns)
        denom = ng**alpha * ns ** (1.0 - alpha)
        return (nf / denom if denom > 0 else None), (nf, ng, ns)

    base_ratio, (nf, ng, ns) = ratio_of(f, src.S0)
    if base_ratio is None:
        return GNReport(q, p, mu, nf, ng, ns, None, None, True, {})

    ratios = {"base": base_ratio}
    for lam in (0.5, 2.0):
        flam = _resample(f, lambda T, X, V: (T, lam * X, lam * V))

        def s0_lam(t, x, v, _l=lam):
            return np.asarray(sample_any(src.S0, t, _l * x, _l * v)) / _l

        ratios[f"lambda={lam}"] = ratio_of(flam, s0_lam)[0]
    for nu in (0.5, 2.0):
        fnu = _resample(f, lambda T, X, V: (nu * T, nu * X, V))

        def s0_nu(t, x, v, _n=nu):
            return _n * np.asarray(sample_any(src.S0, _n * t, _n * x, v))

        ratios[f"nu={nu}"] = ratio_of(fnu, s0_nu)[0]

    vals = [r for r in ratios.values() if r is not None]
    spread = max(vals) / min(vals)
    return GNReport(q, p, mu, nf, ng, ns, base_ratio, spread, False, ratios)


def subsolution_gain_experiment(
    f: Field, src: SourceDecomposition, params: ProblemParams
) -> dict:
    """Measured constant in ||f||_q <= C (||d_v f||_p + ||S0||_{p'} + ||S1||_r)."""
    if float(np.min(f.data)) < -1e-12 * max(float(np.max(np.abs(f.data))), 1.0):
        raise ValueError("subsolution input must be nonnegative")
    table = compute_exponents(params)
    p = float(params.p)
    q = float(table.qbar)
    r = float(table.r_source)
    pprime = p / (p - 1.0)
    T, X, V = f.meshgrid()
    s0 = f.with_data(np.asarray(sample_any(src.S0, T, X, V), dtype=float) + 0.0 * f.data)
    s1 = f.with_data(np.asarray(sample_any(src.S1, T, X, V), dtype=float) + 0.0 * f.data)
    lhs = lp_norm(f, q)
    terms = {
        "grad": lp_norm(grad_v(f), p),
        "S0": lp_norm(s0, pprime),
        "S1": lp_norm(s1, r),
    }
    rhs = sum(terms.values())
    return {
        "q": q,
        "r": r,
        "lhs": lhs,
        "terms": terms,
        "rhs": rhs,
        "C_meas": lhs / rhs if rhs > 0 else 0.0,
    }


def gamma_constants(theta: float, R1: float, R2: float, p: float) -> tuple[float, float]:
    gt = 1.0 / (theta * (R2**p - R1**p))
    gv = R2**p / (R2 ** (1 + p) - R1 ** (1 + p)) + 1.0 / (R2 - R1)
    return gt, gv


def localized_gain_experiment(
    f: Field,
    nl: Nonlinearity,
    theta: float,
    R1: float,
    R2: float,
    center: PhasePoint,
) -> dict:
    """Both variants of the localized gain estimate with measured constants."""
    p = nl.p
    d = 1
    q = p * (4 * d + 2) / (d * (p + 2))
    r = p * (4 * d + 2) / (p * (3 * d + 2) - 2 * d)
    Q1 = Cylinder(center, theta, R1, p)
    Q2 = Cylinder(center, theta, R2, p)
    gt, gv = gamma_constants(theta, R1, R2, p)
    vol = Q2.volume

    lhs = lp_norm(f, q, region=Q1)
    ngrad = lp_norm(grad_v(f), p, region=Q2)
    nf_p = lp_norm(f, p, region=Q2)
    nf_2 = lp_norm(f, 2, region=Q2)
    terms = {
        "grad": ngrad,
        "grad_pm1": (1.0 + gv * vol ** (1.0 / r - (p - 1.0) / p)) * ngrad ** (p - 1.0),
        "gv_f": gv * nf_p,
        "gt_f_p": gt * vol ** (1.0 / r - 1.0 / p) * nf_p,
    }
    rhs = sum(terms.values())
    out = {
        "q": q, "r": r, "Gamma_t": gt, "Gamma_v": gv, "volume": vol,
        "lhs": lhs, "terms": terms, "rhs": rhs,
        "C_meas": lhs / rhs if rhs > 0 else 0.0,
    }
    if p >= 2:
        terms2 = dict(terms)
        terms2.pop("gt_f_p")
        terms2["gt_f_2"] = gt * vol ** (1.0 / r - 0.5) * nf_2
        rhs2 = sum(terms2.values())
        out["rhs_p2"] = rhs2
        out["C_meas_p2"] = lhs / rhs2 if rhs2 > 0 else 0.0
    return out


def energy_experiment(
    f: Field,
    nl: Nonlinearity,
    theta: float,
    R1: float,
    R2: float,
    center: PhasePoint,
) -> dict:
    """Caccioppoli constant: LHS (inner slice-sup + gradient) over the
    cutoff-cost RHS on the outer cylinder."""
    p = nl.p
    Q1 = Cylinder(center, theta, R1, p)
    Q2 = Cylinder(center, theta, R2, p)
    slice_sq = linf_l2_slice_norm(f, Q1) ** 2
    grad_p = lp_norm(grad_v(f), p, region=Q1) ** p
    lhs = slice_sq + grad_p
    rhs = (
        lp_norm(f, 2, region=Q2) ** 2 / (theta * (R2 - R1) ** p)
        + lp_norm(f, p, region=Q2) ** p / (R2 - R1) ** p
    )
    return {
        "lhs_slice_sq": slice_sq,
        "lhs_grad_p": grad_p,
        "lhs": lhs,
        "rhs": rhs,
        "C_meas": lhs / rhs if rhs > 0 else 0.0,
    }


def transfer_experiment(
    f: Field, src: SourceDecomposition, params: ProblemParams, q, h_set
) -> dict:
    """Besov seminorm against the interpolation product, with per-h profile."""
    tt = compute_transfer(params, q)
    if not tt.valid:
        raise ValueError(f"invalid transfer exponent q={q}: {tt.reason}")
    p = float(params.p)
    s, qf, alpha = float(tt.s), float(tt.q), float(tt.alpha_s)
    bes = besov_seminorm(f, s, qf, h_set)
    ngrad = lp_norm(grad_v(f), p)
    T, X, V = f.meshgrid()
    s0 = f.with_data(np.asarray(sample_any(src.S0, T, X, V), dtype=float) + 0.0 * f.data)
    ns0 = lp_norm(s0, p / (p - 1.0))
    rhs = ngrad**alpha * ns0 ** (1.0 - alpha)
    hs = [abs(h) for h in bes.h_set]
    return {
        "s": s, "q": qf, "alpha": alpha,
        "besov": bes.value, "per_h": dict(zip(bes.h_set, bes.per_h)),
        "h_decades": float(np.log10(max(hs) / min(hs))) if hs else 0.0,
        "rhs": rhs, "C_meas": bes.value / rhs if rhs > 0 else 0.0,
    }


# --------------------------------------------------------------------------
# the truncation iteration
# --------------------------------------------------------------------------


@dataclass
class DeGiorgiTrace:
    mode: str
    p: float
    levels: list = field(default_factory=list)
    sup_inner: float = 0.0
    sup_bound_ok: bool = False
    energies: list = field(default_factory=list)
    recursion_slope: Optional[float] = None
    mean_normalized: float = 0.0


def degiorgi_run(
    u: Field,
    center: PhasePoint,
    p: float,
    mode: str = "auto",
    n_max: int = 12,
) -> DeGiorgiTrace:
    """Truncation cascade on nested unit-theta cylinders Q_{1,R_n}(center):
    energies M_n = ∫ w_n^p (p >= 2) or Y_n = ∫ w_n^2 (singular range), with
    the exact counting inequalities recorded per level."""
    if float(np.min(u.data)) < -1e-12 * max(float(np.max(np.abs(u.data))), 1.0):
        raise ValueError("iteration input must be nonnegative")
    if mode == "auto":
        mode = "p_ge_2" if p >= 2 else "singular"
    power = p if mode == "p_ge_2" else 2.0

    Q = [Cylinder(center, 1.0, 1.0 + 2.0**-n, p) for n in range(n_max + 2)]
    w = [truncate(u, 1.0 - 2.0**-n) for n in range(n_max + 2)]
    energies = [
        lp_norm(w[n], power, region=Q[n]) ** power for n in range(n_max + 1)
    ]

    trace = DeGiorgiTrace(mode=mode, p=p, energies=energies)
    trace.mean_normalized = lp_norm(u, power, region=Q[0]) ** power / Q[0].volume
    for n in range(n_max):
        lev = {"n": n, "R_n": 1.0 + 2.0**-n, "k_n": 1.0 - 2.0**-n, "M_n": energies[n]}
        # level-set: |{u > k_{n+1}} ∩ Q_{1,R_{n+1}}| <= 2^{power (n+1)} M_n
        e_next = level_set_measure(u, 1.0 - 2.0 ** -(n + 1), region=Q[n + 1])
        lev["E_next"] = e_next
        lev["level_set_ok"] = e_next <= 2.0 ** (power * (n + 1)) * energies[n] + 1e-300
        if mode == "p_ge_2" and n >= 1:
            # L2-vs-energy: ∫ w_n^2 <= (∫ w_n^p)^{2/p} |{w_n>0}|^{1-2/p}
            #              <= 2^{n(p-2)} M_{n-1}, all on Q_{1,R_{n-1}}
            l2 = lp_norm(w[n], 2, region=Q[n - 1]) ** 2
            lp_ = lp_norm(w[n], p, region=Q[n - 1]) ** p
            supp = level_set_measure(w[n], 0.0, region=Q[n - 1])
            hold1 = l2 <= lp_ ** (2.0 / p) * supp ** (1.0 - 2.0 / p) + 1e-12 * max(l2, 1.0)
            hold2 = lp_ ** (2.0 / p) * supp ** (1.0 - 2.0 / p) <= 2.0 ** (
                n * (p - 2.0)
            ) * energies[n - 1] + 1e-12 * max(energies[n - 1], 1.0)
            lev["l2_interp_ok"] = bool(hold1 and hold2)
        if mode == "singular" and n >= 0:
            delta_n = 2.0 ** -(n + 1)
            meas = level_set_measure(w[n], delta_n, region=Q[n + 1], strict=False)
            lev["chebyshev_ok"] = meas <= delta_n**-2 * energies[n] + 1e-300
        trace.levels.append(lev)

    core = Cylinder(center, 1.0, 1.0, p)
    core_mask = core.contains_grid(*u.meshgrid())
    trace.sup_inner = float(np.max(u.data[core_mask])) if core_mask.any() else 0.0
    trace.sup_bound_ok = trace.sup_inner <= 1.0 + 1e-12

    logs = [
        (np.log(energies[n - 1]), np.log(energies[n + 1]))
        for n in range(1, n_max)
        if energies[n - 1] > 1e-290 and energies[n + 1] > 1e-290
        and energies[n - 1] < 0.5
    ]
    if len(logs) >= 2:
        xs = np.array([a for a, _ in logs])
        ys = np.array([b for _, b in logs])
        trace.recursion_slope = float(np.polyfit(xs, ys, 1)[0])
    return trace


def fast_convergence_lemma(
    C1: float,
    b: float,
    delta: float,
    Y0: float,
    threshold: float = 1e-300,
    max_iter: int = 2000,
) -> tuple[float, list, bool]:
    """delta0 = C1^{-1/delta} b^{-1/delta^2}; iterate Y_{m+1} = C1 b^m Y_m^{1+delta}.

    converged means the trace dropped below the threshold within max_iter.
    At Y0 = delta0 exactly the decay is geometric with rate b^{-1/delta}, so
    the default budget is sized for that boundary case.
    """
    if C1 <= 0 or b <= 1 or delta <= 0 or Y0 < 0:
        raise ValueError("require C1 > 0, b > 1, delta > 0, Y0 >= 0")
    import math

    delta0 = C1 ** (-1.0 / delta) * b ** (-1.0 / delta**2)
    trace = [Y0]
    y = Y0
    converged = y < threshold
    for m in range(max_iter):
        if y > 1e250 or (1.0 + delta) * math.log(max(y, 1e-320)) + m * math.log(
            b
        ) + math.log(C1) > 700.0:
            trace.append(float("inf"))  # hopeless divergence
            break
        yp = y ** (1.0 + delta)  # may underflow to exactly zero
        if yp == 0.0:
            trace.append(0.0)
            converged = True
            break
        y = C1 * b**m * yp
        trace.append(y)
        if y < threshold:
            converged = True
            break
        if not np.isfinite(y):
            break
    return delta0, trace, converged


def interleaved_traces(C1: float, b: float, delta: float, Y0: float, n: int = 24):
    """M-sequence from the two-step recursion M_{n+1} = C1 b^n M_{n-1}^{1+delta}
    (with M_1 = M_0), plus its even/odd subsequences; the subsequences satisfy
    the one-step form with the doubled rate b^2."""
    M = [Y0, Y0]
    for k in range(1, n):
        M.append(C1 * b**k * M[k - 1] ** (1.0 + delta))
    even = M[0::2]
    odd = M[1::2]
    return M, even, odd
