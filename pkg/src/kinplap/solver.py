"""Desk-scale explicit solver for kinetic diffusion with p-growth.

One forward-Euler step is upwind transport in x (periodic) composed with a
conservative flux-difference diffusion step in v (zero-flux faces), using
face-centered gradients.  Both substeps are monotone under the CFL bound, so
constants are preserved, mass telescopes exactly, and nonnegativity survives.
For p < 2 the singular mobility is regularized as (xi^2 + eps^2)^{(p-2)/2} xi.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .fields import Field, grad_v
from .mollify import SourceDecomposition


class CFLError(RuntimeError):
    pass


@dataclass(frozen=True)
class Nonlinearity:
    """Carathéodory flux with p-growth; default is the p-Laplace flux."""

    p: float
    lam: float = 1.0
    Lam: float = 1.0
    eps_reg: float = 0.0
    flux: Optional[Callable] = None  # (t, x, v, eta, xi) -> flux value

    @classmethod
    def p_laplace(cls, p: float, eps_reg: Optional[float] = None) -> "Nonlinearity":
        if eps_reg is None:
            eps_reg = 0.0 if p >= 2 else 1e-6
        return cls(p=p, lam=1.0, Lam=1.0, eps_reg=eps_reg)

    def face_flux(self, t, x, v, eta, xi):
        if self.flux is not None:
            return self.flux(t, x, v, eta, xi)
        xi = np.asarray(xi, dtype=float)
        e2 = self.eps_reg**2
        return (xi * xi + e2) ** ((self.p - 2.0) / 2.0) * xi

    def diffusivity(self, xi):
        """d(flux)/d(xi) for the built-in regularized p-Laplace flux."""
        xi = np.asarray(xi, dtype=float)
        e2 = self.eps_reg**2
        if e2 == 0.0:
            # unregularized: (p-1)|xi|^{p-2}, infinite at 0 when p < 2
            axi = np.abs(xi)
            with np.errstate(divide="ignore"):
                out = (self.p - 1.0) * axi ** (self.p - 2.0)
            return out
        return (xi * xi + e2) ** ((self.p - 4.0) / 2.0) * ((self.p - 1.0) * xi * xi + e2)

    def check_growth_bounds(self, rng=None, n: int = 10_000) -> dict:
        """Sample A(z, eta, xi)·xi >= lam |xi|^p and |A| <= Lam |xi|^{p-1}."""
        rng = rng or np.random.default_rng(0)
        t = rng.uniform(-1, 1, n)
        x = rng.uniform(-1, 1, n)
        v = rng.uniform(-1, 1, n)
        eta = rng.uniform(-2, 2, n)
        xi = rng.uniform(-3, 3, n)
        xi[np.abs(xi) < 1e-8] = 1e-8
        A = self.face_flux(t, x, v, eta, xi)
        lower = np.min(A * xi / np.abs(xi) ** self.p)
        upper = np.max(np.abs(A) / np.abs(xi) ** (self.p - 1.0))
        return {"min_coercivity": float(lower), "max_growth": float(upper)}


@dataclass(frozen=True)
class SolverConfig:
    """Grid and stepping; bc are fixed (periodic x, zero-flux v)."""

    x_box: tuple[float, float]
    v_box: tuple[float, float]
    nx: int
    nv: int
    t_end: float
    dt: Optional[float] = None
    cfl_transport: float = 0.4
    cfl_diffusion: float = 0.4
    growth_guard: float = 10.0
    max_slices: int = 257  # stored time slices; steps are subsampled uniformly

    def __post_init__(self):
        if self.nx < 8 or self.nv < 8:
            raise ValueError("grid must be at least 8 x 8")

    @property
    def dx(self) -> float:
        return (self.x_box[1] - self.x_box[0]) / self.nx

    @property
    def dv(self) -> float:
        return (self.v_box[1] - self.v_box[0]) / self.nv

    @property
    def x(self) -> np.ndarray:
        return self.x_box[0] + self.dx * (np.arange(self.nx) + 0.5)

    @property
    def v(self) -> np.ndarray:
        return self.v_box[0] + self.dv * (np.arange(self.nv) + 0.5)


def cfl_dt(f: np.ndarray, nl: Nonlinearity, cfg: SolverConfig) -> float:
    """Stable step: transport dx/max|v| and the parabolic dv^2/(2 max a(xi));
    for p >= 2 the max is at the largest face gradient, for p < 2 the
    eps-regularized diffusivity at xi = 0 is the binding bound."""
    vmax = max(abs(cfg.v_box[0]), abs(cfg.v_box[1]))
    dt_t = cfg.cfl_transport * cfg.dx / max(vmax, 1e-30)
    xi = np.diff(f, axis=1) / cfg.dv
    if nl.flux is None:
        dmax = float(np.max(nl.diffusivity(xi))) if xi.size else 0.0
        if nl.p < 2:
            dmax = max(dmax, float(nl.diffusivity(np.array(0.0))))
    else:
        # generic flux: probe the realized face gradients by differencing
        a = nl.face_flux(0.0, 0.0, 0.0, 0.0, xi)
        num = np.abs(np.diff(a, axis=1))
        den = np.maximum(np.abs(np.diff(xi, axis=1)), 1e-30)
        dmax = float(np.max(num / den)) if num.size else 0.0
    dt_d = cfg.cfl_diffusion * cfg.dv**2 / max(2.0 * dmax, 1e-30)
    return min(dt_t, dt_d)


def _transport_substep(f: np.ndarray, cfg: SolverConfig, dt: float) -> np.ndarray:
    v = cfg.v[None, :]
    vp = np.maximum(v, 0.0)
    vm = np.minimum(v, 0.0)
    dfm = f - np.roll(f, 1, axis=0)
    dfp = np.roll(f, -1, axis=0) - f
    return f - dt / cfg.dx * (vp * dfm + vm * dfp)


def _diffusion_substep(
    f: np.ndarray, nl: Nonlinearity, cfg: SolverConfig, dt: float, t: float
) -> np.ndarray:
    xi = np.diff(f, axis=1) / cfg.dv
    v_face = 0.5 * (cfg.v[:-1] + cfg.v[1:])[None, :]
    eta_face = 0.5 * (f[:, :-1] + f[:, 1:])
    flux = nl.face_flux(t, cfg.x[:, None], v_face, eta_face, xi)
    full = np.zeros((f.shape[0], f.shape[1] + 1))
    full[:, 1:-1] = flux  # zero-flux at the v-boundary faces
    return f + dt / cfg.dv * (full[:, 1:] - full[:, :-1])


def step(
    f: np.ndarray,
    nl: Nonlinearity,
    cfg: SolverConfig,
    dt: float,
    t: float = 0.0,
    source: Optional[Callable] = None,
) -> np.ndarray:
    """One split step: transport, diffusion, then the optional forcing."""
    if not np.all(np.isfinite(f)):
        raise FloatingPointError("non-finite state")
    allowed = cfl_dt(f, nl, cfg)
    if dt > allowed * (1.0 + 1e-9):
        raise CFLError(f"dt={dt:.3e} exceeds stable step {allowed:.3e}")
    out = _transport_substep(f, cfg, dt)
    out = _diffusion_substep(out, nl, cfg, dt, t)
    if source is not None:
        out = out + dt * source(t, cfg.x[:, None], cfg.v[None, :])
    return out


@dataclass
class SolveResult:
    field: Field
    diagnostics: list = field(default_factory=list)
    dt: float = 0.0
    eps_reg: float = 0.0


def solve(
    f0: np.ndarray,
    nl: Nonlinearity,
    cfg: SolverConfig,
    source: Optional[Callable] = None,
) -> SolveResult:
    """March to t_end with a fixed dt (auto from the initial CFL if unset);
    stacks the states at times k*dt into a (t,x,v) Field whose cell centers
    coincide with the step times."""
    f = np.asarray(f0, dtype=float).copy()
    if f.shape != (cfg.nx, cfg.nv):
        raise ValueError(f"initial data must have shape {(cfg.nx, cfg.nv)}")
    dt = cfg.dt if cfg.dt is not None else 0.5 * cfl_dt(f, nl, cfg)
    n_steps = max(int(np.ceil(cfg.t_end / dt)), 1)
    stride = max(int(np.ceil(n_steps / (cfg.max_slices - 1))), 1)
    n_steps = stride * int(np.ceil(n_steps / stride))
    dt = cfg.t_end / n_steps

    states = [f.copy()]
    diags = [
        {
            "step": 0,
            "t": 0.0,
            "mass": float(f.sum()) * cfg.dx * cfg.dv,
            "l2": float(np.sqrt(np.sum(f * f) * cfg.dx * cfg.dv)),
            "max": float(np.max(np.abs(f))),
            "cfl_dt": cfl_dt(f, nl, cfg),
        }
    ]
    prev_mx = float(np.max(np.abs(f)))
    for k in range(n_steps):
        t = k * dt
        f = step(f, nl, cfg, dt, t, source=source)
        mx = float(np.max(np.abs(f)))
        diags.append(
            {
                "step": k + 1,
                "t": (k + 1) * dt,
                "mass": float(f.sum()) * cfg.dx * cfg.dv,
                "l2": float(np.sqrt(np.sum(f * f) * cfg.dx * cfg.dv)),
                "max": mx,
                "cfl_dt": cfl_dt(f, nl, cfg),
            }
        )
        if prev_mx > 0 and mx > cfg.growth_guard * prev_mx and mx > 1e-10:
            raise RuntimeError(f"instability detected at step {k + 1}")
        prev_mx = max(prev_mx, mx)
        if (k + 1) % stride == 0:
            states.append(f.copy())

    data = np.stack(states, axis=0)
    nt = data.shape[0]
    dt_store = stride * dt
    box = (
        (-0.5 * dt_store, (nt - 0.5) * dt_store),
        cfg.x_box,
        cfg.v_box,
    )
    return SolveResult(field=Field(box, data), diagnostics=diags, dt=dt,
                       eps_reg=nl.eps_reg)


def residual(f: Field, nl: Nonlinearity, source: Optional[Callable] = None) -> Field:
    """Discrete residual (d_t + v d_x) f - d_v flux(d_v f) - source with the
    solver's own stencils; one fewer time slice (forward time difference)."""
    dt, dx, dv = f.spacing
    data = f.data
    nt = data.shape[0]
    v = f.v[None, :]
    x = f.x[:, None]
    out = np.zeros((nt - 1,) + data.shape[1:])
    for k in range(nt - 1):
        g = data[k]
        vp = np.maximum(v, 0.0)
        vm = np.minimum(v, 0.0)
        adv = vp * (g - np.roll(g, 1, axis=0)) / dx + vm * (np.roll(g, -1, axis=0) - g) / dx
        xi = np.diff(g, axis=1) / dv
        v_face = 0.5 * (f.v[:-1] + f.v[1:])[None, :]
        eta_face = 0.5 * (g[:, :-1] + g[:, 1:])
        t_k = f.t[k]
        flux = nl.face_flux(t_k, x, v_face, eta_face, xi)
        full = np.zeros((g.shape[0], g.shape[1] + 1))
        full[:, 1:-1] = flux
        diff = (full[:, 1:] - full[:, :-1]) / dv
        out[k] = (data[k + 1] - g) / dt + adv - diff
        if source is not None:
            out[k] -= source(t_k, x, v)
    t0 = f.box[0][0]
    box = ((t0, t0 + (nt - 1) * dt), f.box[1], f.box[2])
    return Field(box, out)


def transport_decomposition(f: Field, nl: Nonlinearity) -> SourceDecomposition:
    """S0 := flux(., f, d_v f) and S1 := discrete residual, trimmed to the
    common time grid."""
    gv = grad_v(f)
    T, X, V = f.meshgrid()
    s0_data = nl.face_flux(T, X, V, f.data, gv.data)
    res = residual(f, nl)
    nt = res.data.shape[0]
    s0 = Field(res.box, s0_data[:nt])
    return SourceDecomposition(S0=s0, S1=res)


def weak_subsolution_defect(w: Field, nl: Nonlinearity, phis) -> float:
    """max over nonnegative test fields of <discrete residual of w, phi> /
    (||phi||_1 + 1); nonpositive up to O(grid) for truncated solutions."""
    res = residual(w, nl)
    worst = -np.inf
    for phi in phis:
        pdata = phi.data[: res.data.shape[0]]
        if np.any(pdata < 0):
            raise ValueError("test fields must be nonnegative")
        pairing = float(np.sum(res.data * pdata) * res.cell_volume)
        worst = max(worst, pairing / (float(np.sum(np.abs(pdata))) * res.cell_volume + 1.0))
    return worst
