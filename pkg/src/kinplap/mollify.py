"""Kinetic mollification: the group-convolution operator T_J, the mollifier,
the kernel family K_tau / G0_r / G1_r / Gv_r, the representation identity,
and the norm checks (Young, weak Lebesgue, finite-difference commutation).

All kernel evaluations are closed-form compositions of the trajectory
matrices with the mollifier; the only numerics are tensor midpoint quadrature
over support boxes and a graded mesh in the artificial-time integral (the
Gv kernel carries an integrable r^{beta-2} singularity at r = 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .fields import Field, grad_v, lp_norm, weak_lp_norm
from .geometry import PhasePoint, bump, bump_prime
from .trajectories import g12, g12_dot, g12_ddot

FieldLike = Union[Field, Callable]


class DomainError(ValueError):
    """Raised in strict mode when a kernel support box leaves the field box."""


def sample_any(f: FieldLike, t, x, v, track_outside: bool = False):
    if isinstance(f, Field):
        return f.sample(t, x, v, track_outside=track_outside)
    vals = f(t, x, v)
    return (vals, False) if track_outside else vals


@lru_cache(maxsize=1)
def _bump_integral() -> float:
    """integral of exp(-1/(1-u^2)) over (-1,1) by high-order Gauss-Legendre."""
    nodes, weights = np.polynomial.legendre.leggauss(200)
    return float(np.sum(weights * bump(nodes)))


@dataclass(frozen=True)
class MollifierSpec:
    """Normalized tensor bump psi on (-2,-1) x (-1,1) x (-1,1), unit mass."""

    norm_const: float

    def psi(self, m0, m1, m2):
        return bump(2.0 * np.asarray(m0) + 3.0) * bump(m1) * bump(m2) / self.norm_const

    def psi_grad(self, m0, m1, m2):
        """(d/dm1, d/dm2) of psi."""
        b0 = bump(2.0 * np.asarray(m0) + 3.0) / self.norm_const
        return b0 * bump_prime(m1) * bump(m2), b0 * bump(m1) * bump_prime(m2)

    def mass(self, n: int = 120) -> float:
        """Midpoint quadrature of the total mass (should be 1)."""
        m0 = -2.0 + (np.arange(n) + 0.5) / n
        m1 = -1.0 + 2.0 * (np.arange(n) + 0.5) / n
        grid = self.psi(m0[:, None, None], m1[None, :, None], m1[None, None, :])
        return float(grid.sum() * (1.0 / n) * (2.0 / n) ** 2)


def standard_mollifier() -> MollifierSpec:
    I1 = _bump_integral()
    return MollifierSpec(norm_const=0.5 * I1 * I1 * I1)


@dataclass(frozen=True)
class SourceDecomposition:
    """S0 (drift flux) and S1 (zeroth-order source) with
    (d_t + v d_x) f = d_v S0 + S1 for the paired field."""

    S0: FieldLike
    S1: FieldLike


@dataclass(frozen=True)
class KernelFamily:
    """Kernels built from trajectories at scaling beta with artificial time tau."""

    beta: float
    tau: float
    moll: MollifierSpec

    @classmethod
    def of(cls, beta: float, tau: float, moll: Optional[MollifierSpec] = None):
        return cls(beta=float(beta), tau=float(tau), moll=moll or standard_mollifier())

    @property
    def d(self) -> int:
        return 1

    @property
    def Qdim(self) -> float:
        return 2.0 * self.beta  # (2 beta - 1) d + 1 at d = 1

    @property
    def c0(self) -> float:
        return -1.0  # (-1)^d

    def support_bounds(self, r: float) -> tuple[float, float]:
        """(ybound, wbound): the image of B1 x B1 under A_{m0}(r), |m0|>=1."""
        g1, g2 = g12(r, self.beta)
        d1, d2 = g12_dot(r, self.beta)
        return float(abs(g1) + abs(g2)), float(abs(d1) + abs(d2))

    def support_box(self, r: float):
        yb, wb = self.support_bounds(r)
        return ((-2.0 * r, -1.0 * r), (-yb, yb), (-wb, wb))

    def _ainv_args(self, r: float, s, y, w):
        """(m1, m2) = A_{s/r}(r)^{-1} (y, w), closed form."""
        b = self.beta
        g1, g2 = g12(r, b)
        d1, d2 = g12_dot(r, b)
        m0 = np.asarray(s) / r
        scale = -1.0 / r ** (2.0 * b - 1.0)
        m1 = scale * (d2 * np.asarray(y) - m0 * g2 * np.asarray(w))
        m2 = scale * (-d1 * np.asarray(y) + m0 * g1 * np.asarray(w))
        return m0, m1, m2

    def K(self, s, y, w):
        """Mollification kernel at artificial time tau (unit mass)."""
        m0, m1, m2 = self._ainv_args(self.tau, s, y, w)
        pref = self.c0 ** -1 * self.tau ** (-self.Qdim) * m0**self.d
        return pref * self.moll.psi(m0, m1, m2)

    def K_at(self, r: float, s, y, w):
        """The same kernel with artificial time r instead of tau."""
        m0, m1, m2 = self._ainv_args(r, s, y, w)
        pref = self.c0 ** -1 * r ** (-self.Qdim) * m0**self.d
        return pref * self.moll.psi(m0, m1, m2)

    def G0(self, r: float, s, y, w):
        """Drift kernel: pairs with S0 in the representation identity."""
        b = self.beta
        m0, m1, m2 = self._ainv_args(r, s, y, w)
        g1, g2 = g12(r, b)
        dp1, dp2 = self.moll.psi_grad(m0, m1, m2)
        # second block-column of A^{-1}: (m0 g2, -m0 g1)/r^{2b-1}
        col2_1 = m0 * g2 / r ** (2.0 * b - 1.0)
        col2_2 = -m0 * g1 / r ** (2.0 * b - 1.0)
        pref = self.c0 ** -1 * m0 ** (self.d + 1) * r ** (-self.Qdim)
        return pref * (dp1 * col2_1 + dp2 * col2_2)

    def G1(self, r: float, s, y, w):
        """Zeroth-order source kernel."""
        m0, m1, m2 = self._ainv_args(r, s, y, w)
        pref = -(self.c0**-1) * m0 ** (self.d + 1) * r ** (-self.Qdim)
        return pref * self.moll.psi(m0, m1, m2)

    def Gv(self, r: float, s, y, w):
        """Velocity-gradient kernel; carries the r^{beta-2} forcing factor."""
        b = self.beta
        m0, m1, m2 = self._ainv_args(r, s, y, w)
        dd1, dd2 = g12_ddot(r, b)
        force = (dd1 * m1 + dd2 * m2) / m0
        pref = -(self.c0**-1) * m0**self.d * r ** (-self.Qdim)
        return pref * self.moll.psi(m0, m1, m2) * force

    def kernel_fn(self, kind: str, r: Optional[float] = None):
        """(J, support_box) for kind in {'K','G0','G1','Gv'}."""
        if kind == "K":
            rr = self.tau if r is None else r
            return (lambda s, y, w: self.K_at(rr, s, y, w)), self.support_box(rr)
        if r is None:
            raise ValueError("G kernels need the artificial-time parameter r")
        fn = {"G0": self.G0, "G1": self.G1, "Gv": self.Gv}[kind]
        return (lambda s, y, w: fn(r, s, y, w)), self.support_box(r)


# --------------------------------------------------------------------------
# quadrature helpers
# --------------------------------------------------------------------------


def midpoint_nodes(lo: float, hi: float, n: int) -> np.ndarray:
    return lo + (hi - lo) * (np.arange(n) + 0.5) / n


def box_nodes(box, n) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    if isinstance(n, int):
        n = (n, n, n)
    (s0, s1), (y0, y1), (w0, w1) = box
    S = midpoint_nodes(s0, s1, n[0])
    Y = midpoint_nodes(y0, y1, n[1])
    W = midpoint_nodes(w0, w1, n[2])
    wt = (s1 - s0) * (y1 - y0) * (w1 - w0) / (n[0] * n[1] * n[2])
    return S[:, None, None], Y[None, :, None], W[None, None, :], wt


def graded_r_nodes(tau: float, n: int = 64, kappa: float = 3.0):
    """Graded mesh r_j = tau * u_j^kappa resolving the r -> 0 singularity."""
    u = (np.arange(n) + 0.5) / n
    r = tau * u**kappa
    w = tau * kappa * u ** (kappa - 1.0) / n
    return r, w


# --------------------------------------------------------------------------
# the integral operator T_J
# --------------------------------------------------------------------------


def required_region(box, z: PhasePoint):
    """Bounding box of {z ∘ u : u in box} for d = 1."""
    (s0, s1), (y0, y1), (w0, w1) = box
    t, x, v = z.t, float(z.x[0]), float(z.v[0])
    xs = [x + y0 + s0 * v, x + y0 + s1 * v, x + y1 + s0 * v, x + y1 + s1 * v]
    return ((t + s0, t + s1), (min(xs), max(xs)), (v + w0, v + w1))


def apply_TJ_kernel(
    J: Callable,
    box,
    f: FieldLike,
    z: PhasePoint,
    n: Union[int, tuple] = 16,
    strict: bool = False,
    diagnostics: Optional[dict] = None,
) -> float:
    """[T_J f](z) = ∫ f(z ∘ u) J(u) du by midpoint quadrature over J's box."""
    if strict and isinstance(f, Field):
        need = required_region(box, z)
        missing = [
            (ax, need[ax], f.box[ax])
            for ax in range(3)
            if need[ax][0] < f.box[ax][0] - 1e-12 or need[ax][1] > f.box[ax][1] + 1e-12
        ]
        if missing:
            raise DomainError(f"kernel support needs region outside field box: {missing}")
    S, Y, W, wt = box_nodes(box, n)
    t, x, v = z.t, float(z.x[0]), float(z.v[0])
    vals, touched = sample_any(f, t + S, x + Y + S * v, v + W, track_outside=True)
    out = float(np.sum(J(S, Y, W) * vals) * wt)
    if diagnostics is not None:
        diagnostics["zero_extension_touched"] = touched
    return out


def apply_TK_mspace(
    family: KernelFamily,
    f: FieldLike,
    z: PhasePoint,
    n: Union[int, tuple] = 16,
    diagnostics: Optional[dict] = None,
) -> float:
    """[T_{K_tau} f](z) = ∫ f(gamma^m(tau; z)) psi(m) dm over supp psi."""
    if isinstance(n, int):
        n = (n, n, n)
    tau, b = family.tau, family.beta
    M0 = midpoint_nodes(-2.0, -1.0, n[0])[:, None, None]
    M1 = midpoint_nodes(-1.0, 1.0, n[1])[None, :, None]
    M2 = midpoint_nodes(-1.0, 1.0, n[2])[None, None, :]
    wt = (1.0 * 2.0 * 2.0) / (n[0] * n[1] * n[2])
    g1, g2 = g12(tau, b)
    d1, d2 = g12_dot(tau, b)
    t, x, v = z.t, float(z.x[0]), float(z.v[0])
    gt = t + M0 * tau
    gx = x + M0 * tau * v + M1 * g1 + M2 * g2
    gv = v + (M1 * d1 + M2 * d2) / M0
    vals, touched = sample_any(f, gt + 0 * gx, gx, gv + 0 * gx, track_outside=True)
    if diagnostics is not None:
        diagnostics["zero_extension_touched"] = touched
    return float(np.sum(vals * family.moll.psi(M0, M1, M2)) * wt)


def tk_mspace_on_grid(family: KernelFamily, f: FieldLike, out: Field,
                      n: int = 14) -> Field:
    """T_{K_tau} f evaluated on every cell center of `out` via m-space
    quadrature (vectorized over the grid, looped over quadrature nodes)."""
    tau, b = family.tau, family.beta
    M0 = midpoint_nodes(-2.0, -1.0, n)
    M1 = midpoint_nodes(-1.0, 1.0, n)
    g1, g2 = g12(tau, b)
    d1, d2 = g12_dot(tau, b)
    T, X, V = out.meshgrid()
    data = np.zeros(out.shape)
    wt = 4.0 / n**3
    for m0 in M0:
        gt = T + m0 * tau
        for m1 in M1:
            psi_row = family.moll.psi(m0, m1, M1)
            for k, m2 in enumerate(M1):
                if psi_row[k] == 0.0:
                    continue
                gx = X + m0 * tau * V + m1 * g1 + m2 * g2
                gv = V + (m1 * d1 + m2 * d2) / m0
                data += psi_row[k] * np.asarray(sample_any(f, gt, gx, gv))
    return out.with_data(data * wt)


def _mspace_weighted(family, r, f, z, weight_fn, n):
    """∫ weight(m) f(gamma^m(r; z)) psi(m) dm: the pre-change-of-variables
    forms of the G kernels, used as independent oracles."""
    if isinstance(n, int):
        n = (n, n, n)
    b = family.beta
    M0 = midpoint_nodes(-2.0, -1.0, n[0])[:, None, None]
    M1 = midpoint_nodes(-1.0, 1.0, n[1])[None, :, None]
    M2 = midpoint_nodes(-1.0, 1.0, n[2])[None, None, :]
    wt = 4.0 / (n[0] * n[1] * n[2])
    g1, g2 = g12(r, b)
    d1, d2 = g12_dot(r, b)
    t, x, v = z.t, float(z.x[0]), float(z.v[0])
    gt = t + M0 * r
    gx = x + M0 * r * v + M1 * g1 + M2 * g2
    gv = v + (M1 * d1 + M2 * d2) / M0
    vals = sample_any(f, gt + 0 * gx, gx, gv + 0 * gx)
    return float(np.sum(weight_fn(M0, M1, M2) * vals * family.moll.psi(M0, M1, M2)) * wt)


def apply_TG1_mspace(family, r, g, z, n=16) -> float:
    """Oracle for T_{G1_r}(g): -∫ m0 g(gamma^m(r;z)) psi dm."""
    return _mspace_weighted(family, r, g, z, lambda M0, M1, M2: -M0, n)


def apply_TGv_mspace(family, r, g, z, n=16) -> float:
    """Oracle for T_{Gv_r}(g): -∫ (m1 g1'' + m2 g2'')/m0 g(gamma) psi dm."""
    dd1, dd2 = g12_ddot(r, family.beta)
    return _mspace_weighted(
        family, r, g, z, lambda M0, M1, M2: -(M1 * dd1 + M2 * dd2) / M0, n
    )


def apply_TG0_mspace(family, r, div_S0, z, n=16) -> float:
    """Oracle for T_{G0_r}(S0): -∫ m0 [d_v S0](gamma^m(r;z)) psi dm."""
    return _mspace_weighted(family, r, div_S0, z, lambda M0, M1, M2: -M0, n)


def integrated_TG(
    family: KernelFamily,
    kind: str,
    g: FieldLike,
    z: PhasePoint,
    n_r: int = 64,
    kappa: float = 3.0,
    n: Union[int, tuple] = 16,
    diagnostics: Optional[dict] = None,
) -> float:
    """∫_0^tau [T_{G^kind_r}(g)](z) dr on the graded r-mesh."""
    rs, ws = graded_r_nodes(family.tau, n_r, kappa)
    total = 0.0
    touched = False
    for r, wr in zip(rs, ws):
        J, box = family.kernel_fn(kind, r)
        diag = {} if diagnostics is not None else None
        total += wr * apply_TJ_kernel(J, box, g, z, n=n, diagnostics=diag)
        if diag is not None:
            touched |= diag["zero_extension_touched"]
    if diagnostics is not None:
        diagnostics["zero_extension_touched"] = touched
    return total


def transport_residual(f: Field, src: SourceDecomposition) -> float:
    """Discrete check of (d_t + v d_x) f = d_v S0 + S1, relative to scale."""
    dt, dx, _ = f.spacing
    ft = np.gradient(f.data, dt, axis=0, edge_order=2)
    fx = np.gradient(f.data, dx, axis=1, edge_order=2)
    T, X, V = f.meshgrid()
    s0 = sample_any(src.S0, T, X, V)
    s1 = sample_any(src.S1, T, X, V)
    s0_field = f.with_data(np.asarray(s0, dtype=float) + np.zeros_like(f.data))
    dv_s0 = grad_v(s0_field).data
    res = ft + V * fx - dv_s0 - s1
    scale = max(float(np.max(np.abs(f.data))), 1e-300)
    return float(np.max(np.abs(res))) / scale


def representation_residual(
    family: KernelFamily,
    f: FieldLike,
    src: SourceDecomposition,
    z_samples: Sequence[PhasePoint],
    grad_f: Optional[FieldLike] = None,
    n_r: int = 64,
    kappa: float = 3.0,
    n: Union[int, tuple] = 16,
    check_pre: Optional[float] = None,
) -> dict:
    """Max over samples of |(f - T_K f)(z) - ∫_0^tau (T_G0 S0 + T_G1 S1 +
    T_Gv d_v f) dr (z)|; exact analytically, so the residual is quadrature
    error."""
    if check_pre is not None:
        if not isinstance(f, Field):
            raise ValueError("precondition check needs a grid Field")
        rel = transport_residual(f, src)
        if rel > check_pre:
            raise ValueError(
                f"source decomposition inconsistent with f: rel residual {rel:.3e}"
            )
    if grad_f is None:
        grad_f = grad_v(f) if isinstance(f, Field) else None
    if grad_f is None:
        raise ValueError("grad_f required for non-grid fields")

    per_z = []
    for z in z_samples:
        JK, boxK = family.kernel_fn("K")
        lhs = float(sample_any(f, z.t, float(z.x[0]), float(z.v[0]))) - apply_TJ_kernel(
            JK, boxK, f, z, n=n
        )
        rhs = (
            integrated_TG(family, "G0", src.S0, z, n_r, kappa, n)
            + integrated_TG(family, "G1", src.S1, z, n_r, kappa, n)
            + integrated_TG(family, "Gv", grad_f, z, n_r, kappa, n)
        )
        per_z.append(abs(lhs - rhs))
    return {"max_residual": max(per_z), "per_z": per_z}


# --------------------------------------------------------------------------
# kernel norms and inequality checks
# --------------------------------------------------------------------------


def kernel_lp_norm(
    family: KernelFamily, theta: float, kind: str = "K",
    r: Optional[float] = None, n: Union[int, tuple] = 48,
) -> float:
    """Grid L^theta norm of a kernel over its support box (sup for theta=inf)."""
    if theta < 1:
        raise ValueError("theta must be >= 1")
    J, box = family.kernel_fn(kind, r)
    S, Y, W, wt = box_nodes(box, n)
    vals = np.abs(J(S, Y, W))
    if np.isinf(theta):
        return float(vals.max())
    return float((np.sum(vals**theta) * wt) ** (1.0 / theta))


def kernel_mass(family: KernelFamily, r: Optional[float] = None,
                n: Union[int, tuple] = 96) -> float:
    J, box = family.kernel_fn("K", r)
    S, Y, W, wt = box_nodes(box, n)
    return float(np.sum(J(S, Y, W)) * wt)


def integrated_kernel_field(
    family: KernelFamily, kind: str, shape=(192, 64, 64), n_r: int = 48,
) -> Field:
    """∫_0^tau G^kind_r dr sampled on a grid over the union support box.

    Per cell center (s,y,w) the kernel vanishes unless r in (-s/2, -s), so the
    r-integral is a plain midpoint rule on that interval (no singularity)."""
    tau, b = family.tau, family.beta
    rs = np.linspace(1e-9, tau, 256)
    yb = max(family.support_bounds(float(r))[0] for r in rs)
    wb = max(family.support_bounds(float(r))[1] for r in rs)
    box = ((-2.0 * tau, 0.0), (-yb, yb), (-wb, wb))
    out = Field(box, np.zeros(shape))
    S, Y, W = out.meshgrid()
    data = np.zeros(shape)
    r_lo = np.maximum(-S / 2.0, 0.0)
    r_hi = np.minimum(-S + 0.0 * S, tau)
    width = np.maximum(r_hi - r_lo, 0.0)
    mask = width > 0
    Sm, Ym, Wm = (np.broadcast_to(A, data.shape)[mask] for A in (S, Y, W))
    for k in range(n_r):
        frac = (k + 0.5) / n_r
        rr = r_lo[mask] + frac * width[mask]
        data[mask] += _kernel_array_r(family, kind, rr, Sm, Ym, Wm) * (
            width[mask] / n_r
        )
    return out.with_data(data)


def _kernel_array_r(family: KernelFamily, kind: str, r, s, y, w):
    """Evaluate a G kernel with elementwise (array) r; mirrors the scalar path."""
    b = family.beta
    g1, g2 = g12(r, b)
    d1, d2 = g12_dot(r, b)
    m0 = s / r
    scale = -1.0 / r ** (2.0 * b - 1.0)
    m1 = scale * (d2 * y - m0 * g2 * w)
    m2 = scale * (-d1 * y + m0 * g1 * w)
    Q = family.Qdim
    psi = family.moll.psi(m0, m1, m2)
    if kind == "G1":
        return -(family.c0**-1) * m0**2 * r**-Q * psi
    if kind == "Gv":
        dd1, dd2 = g12_ddot(r, b)
        force = (dd1 * m1 + dd2 * m2) / m0
        return -(family.c0**-1) * m0 * r**-Q * psi * force
    dp1, dp2 = family.moll.psi_grad(m0, m1, m2)
    col2_1 = m0 * g2 / r ** (2.0 * b - 1.0)
    col2_2 = -m0 * g1 / r ** (2.0 * b - 1.0)
    return family.c0**-1 * m0**2 * r**-Q * (dp1 * col2_1 + dp2 * col2_2)


def young_check(
    J: Callable, box, theta: float, f: Field, p_in: float,
    out_shape=(28, 28, 28), n: Union[int, tuple] = 12,
) -> tuple[float, float]:
    """(||T_J f||_q, ||J||_theta ||f||_{p_in}) with 1/q + 1 = 1/theta + 1/p."""
    inv_q = 1.0 / theta + 1.0 / p_in - 1.0
    if inv_q <= 0 or inv_q > 1:
        raise ValueError("exponent relation 1/q + 1 = 1/theta + 1/p violated")
    q = 1.0 / inv_q
    (s0, s1), (y0, y1), (w0, w1) = box
    (ft0, ft1), (fx0, fx1), (fv0, fv1) = f.box
    vmax = max(abs(fv0 - w1), abs(fv1 - w0))
    out_box = (
        (ft0 - s1, ft1 - s0),
        (fx0 - y1 - max(abs(s0), abs(s1)) * vmax, fx1 - y0 + max(abs(s0), abs(s1)) * vmax),
        (fv0 - w1, fv1 - w0),
    )
    out = Field(out_box, np.zeros(out_shape))
    T, X, V = out.meshgrid()
    S, Y, W, wt = box_nodes(box, n)
    data = np.zeros(out_shape)
    vals_J = J(S, Y, W)
    flatJ = vals_J.ravel()
    Sf, Yf, Wf = (np.broadcast_to(A, vals_J.shape).ravel() for A in (S, Y, W))
    for k in range(flatJ.size):
        if flatJ[k] == 0.0:
            continue
        data += flatJ[k] * f.sample(T + Sf[k], X + Yf[k] + Sf[k] * V, V + Wf[k])
    out = out.with_data(data * wt)
    lhs = lp_norm(out, q)
    S2, Y2, W2, wt2 = box_nodes(box, 48)
    vals = np.abs(J(S2, Y2, W2))
    normJ = float((np.sum(vals**theta) * wt2) ** (1.0 / theta))
    rhs = normJ * lp_norm(f, p_in)
    return lhs, rhs


def difference_commutation_check(
    J: Callable, box, g: FieldLike, h: float,
    z_samples: Sequence[PhasePoint], n: Union[int, tuple] = 16,
) -> float:
    """Max over samples of |Delta_x^h [T_J g](z) - [T_{Delta_y^{-h} J} g](z)|."""
    (s0, s1), (y0, y1), (w0, w1) = box
    wide = ((s0, s1), (y0 - abs(h), y1 + abs(h)), (w0, w1))

    def J_diff(s, y, w):
        return J(s, y - h, w) - J(s, y, w)

    worst = 0.0
    for z in z_samples:
        zh = PhasePoint(z.t, z.x + h, z.v)
        lhs = apply_TJ_kernel(J, box, g, zh, n=n) - apply_TJ_kernel(J, box, g, z, n=n)
        rhs = apply_TJ_kernel(J_diff, wide, g, z, n=n)
        worst = max(worst, abs(lhs - rhs))
    return worst


def fd_kernel_norm(family: KernelFamily, r: float, h: float, theta: float,
                   n: Union[int, tuple] = 40) -> float:
    """||Delta_y^{-h} K_r||_theta over the widened support box."""
    J, box = family.kernel_fn("K", r)
    (s0, s1), (y0, y1), (w0, w1) = box
    wide = ((s0, s1), (y0 - abs(h), y1 + abs(h)), (w0, w1))
    S, Y, W, wt = box_nodes(wide, n)
    vals = np.abs(J(S, Y - h, W) - J(S, Y, W))
    if np.isinf(theta):
        return float(vals.max())
    return float((np.sum(vals**theta) * wt) ** (1.0 / theta))


def fd_compensated_sup(family: KernelFamily, h: float, theta: float, s: float,
                       n_r: int = 9) -> float:
    """sup_r ||Delta_y^{-h} K_r||_theta r^{beta s - Q(1/theta - 1)}: the
    quantity whose envelope in |h| is exactly |h|^s."""
    b, Q = family.beta, family.Qdim
    r_star = abs(h) ** (1.0 / b)
    rs = r_star * np.logspace(-1.2, 1.2, n_r)
    best = 0.0
    for r in rs:
        val = fd_kernel_norm(family, float(r), h, theta) * float(r) ** (
            b * s - Q * (1.0 / theta - 1.0)
        )
        best = max(best, val)
    return best
