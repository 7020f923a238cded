"""Critical kinetic trajectories and their 2x2 block matrices.

The paths g1(r) = r^beta sin(log r), g2(r) = r^beta cos(log r) span the
velocity directions along the flow; all matrices are stored as 2x2 blocks of
scalars acting on R^{2d} blockwise (tensor with the identity), with closed
forms for first and second derivatives so that the r -> 0 regime is free of
cancellation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import PhasePoint, group_compose


def g12(r, beta: float):
    """(g1, g2) = r^beta (sin log r, cos log r); r > 0 elementwise."""
    r = np.asarray(r, dtype=float)
    L = np.log(r)
    rb = r**beta
    return rb * np.sin(L), rb * np.cos(L)


def g12_dot(r, beta: float):
    r = np.asarray(r, dtype=float)
    L = np.log(r)
    rb1 = r ** (beta - 1.0)
    return rb1 * (beta * np.sin(L) + np.cos(L)), rb1 * (beta * np.cos(L) - np.sin(L))


def g12_ddot(r, beta: float):
    r = np.asarray(r, dtype=float)
    L = np.log(r)
    rb2 = r ** (beta - 2.0)
    c = beta * beta - beta - 1.0
    s = 2.0 * beta - 1.0
    return rb2 * (c * np.sin(L) + s * np.cos(L)), rb2 * (c * np.cos(L) - s * np.sin(L))


def wronskian_block(r, beta: float):
    """W(r) = [[g1,g2],[g1',g2']]; its 2x2 determinant is -r^{2 beta - 1}."""
    g1, g2 = g12(r, beta)
    d1, d2 = g12_dot(r, beta)
    return np.array([[g1, g2], [d1, d2]])


def det_w(r, beta: float):
    g1, g2 = g12(r, beta)
    d1, d2 = g12_dot(r, beta)
    return g1 * d2 - g2 * d1


def c0_constant(d: int) -> float:
    """det over R^{2d} of W(r)/r^{2 beta -1} is c0 = (-1)^d."""
    return (-1.0) ** d


def a_block(m0: float, r: float, beta: float) -> np.ndarray:
    """A_{m0}(r) = D_{m0}^{-1} W(r): second row divided by m0 (scalar args)."""
    g1, g2 = g12(r, beta)
    d1, d2 = g12_dot(r, beta)
    return np.array([[g1, g2], [d1 / m0, d2 / m0]], dtype=float)


def a_block_inv(m0, r, beta: float):
    """Closed-form inverse: A^{-1} = (-1/r^{2b-1}) [[g2', -m0 g2], [-g1', m0 g1]]."""
    g1, g2 = g12(r, beta)
    d1, d2 = g12_dot(r, beta)
    m0 = np.asarray(m0, dtype=float)
    s = -1.0 / np.asarray(r, dtype=float) ** (2.0 * beta - 1.0)
    a11 = s * d2 + 0 * m0
    a12 = s * (-m0 * g2)
    a21 = s * (-d1) + 0 * m0
    a22 = s * (m0 * g1)
    return np.array([[a11, a12], [a21, a22]])


def f_row(m0, r, beta: float):
    """Forcing row F_{m0}(r) = (g1''/m0, g2''/m0)."""
    dd1, dd2 = g12_ddot(r, beta)
    m0 = np.asarray(m0, dtype=float)
    return dd1 / m0, dd2 / m0


@dataclass(frozen=True)
class TrajectoryParams:
    """Scaling beta, trajectory speed m0 != 0, direction weights m1, m2."""

    beta: float
    m0: float
    m1: np.ndarray
    m2: np.ndarray

    @classmethod
    def of(cls, beta, m0, m1, m2) -> "TrajectoryParams":
        if m0 == 0:
            raise ValueError("m0 must be nonzero")
        m1 = np.atleast_1d(np.asarray(m1, dtype=float))
        m2 = np.atleast_1d(np.asarray(m2, dtype=float))
        return cls(float(beta), float(m0), m1, m2)


def eval_trajectory(params: TrajectoryParams, r: float, z: PhasePoint) -> PhasePoint:
    """gamma^m(r; z) componentwise: the drift plus g1/g2 displacements."""
    if r <= 0:
        raise ValueError("trajectory time r must be positive")
    b, m0, m1, m2 = params.beta, params.m0, params.m1, params.m2
    g1, g2 = g12(r, b)
    d1, d2 = g12_dot(r, b)
    return PhasePoint(
        z.t + m0 * r,
        z.x + m0 * r * z.v + m1 * g1 + m2 * g2,
        z.v + (m1 * d1 + m2 * d2) / m0,
    )


def eval_trajectory_matrix(params: TrajectoryParams, r: float, z: PhasePoint) -> PhasePoint:
    """Same map in matrix form: (x,v) -> E_{m0}(r)(x,v) + A_{m0}(r)(m1,m2)."""
    if r <= 0:
        raise ValueError("trajectory time r must be positive")
    b, m0 = params.beta, params.m0
    E = np.array([[1.0, m0 * r], [0.0, 1.0]])
    A = a_block(m0, r, b)
    xv = np.array([z.x, z.v])
    mm = np.array([params.m1, params.m2])
    out = E @ xv + A @ mm
    return PhasePoint(z.t + m0 * r, out[0], out[1])


def trajectory_group_point(params: TrajectoryParams, r: float) -> PhasePoint:
    """u with gamma^m(r; z) = z ∘ u: u = (m0 r, A_{m0}(r)(m1, m2))."""
    b, m0 = params.beta, params.m0
    A = a_block(m0, r, b)
    mm = np.array([params.m1, params.m2])
    u = A @ mm
    return PhasePoint(m0 * r, u[0], u[1])


def check_M1(params: TrajectoryParams, r: float, z: PhasePoint, h: float) -> float:
    """Residual of gamma_x' = gamma_t' * gamma_v by central differences."""
    if not (r > h > 0):
        raise ValueError("require r > h > 0")
    zp = eval_trajectory(params, r + h, z)
    zm = eval_trajectory(params, r - h, z)
    z0 = eval_trajectory(params, r, z)
    dx = (zp.x - zm.x) / (2 * h)
    dt = (zp.t - zm.t) / (2 * h)
    return float(np.linalg.norm(dx - dt * z0.v))


def check_M2_M3_M4(params: TrajectoryParams, r_grid) -> dict:
    """Measured constants for the determinant identity and the M3/M4 bounds.

    Returns per-r determinant ratios det W / (-r^{2b-1}) (must be 1), the
    inverse-block ratios |A^{-1}_{:,1}| r^beta and |A^{-1}_{:,2}| r^{beta-1}/|m0|,
    and the three M4 ratios; all normalized so boundedness is the claim.
    """
    b, m0, m1, m2 = params.beta, params.m0, params.m1, params.m2
    r = np.asarray(r_grid, dtype=float)
    if np.any(r <= 0):
        raise ValueError("r_grid must be positive")
    det_ratio = det_w(r, b) / (-(r ** (2 * b - 1)))

    Ainv = a_block_inv(m0, r, b)
    m3_col1 = np.maximum(np.abs(Ainv[0, 0]), np.abs(Ainv[1, 0])) * r**b
    m3_col2 = np.maximum(np.abs(Ainv[0, 1]), np.abs(Ainv[1, 1])) * r ** (b - 1) / abs(m0)

    msum = float(np.sum(np.abs(m1)) + np.sum(np.abs(m2)))
    d1, d2 = g12_dot(r, b)
    dd1, dd2 = g12_ddot(r, b)
    g1, g2 = g12(r, b)
    vdot = np.abs(m1[0] * dd1 + m2[0] * dd2) / abs(m0)
    vdisp = np.abs(m1[0] * d1 + m2[0] * d2) / abs(m0)
    xdisp = np.abs(m1[0] * g1 + m2[0] * g2)
    m4_1 = vdot * abs(m0) / (msum * r ** (b - 2))
    m4_2 = vdisp * abs(m0) / (msum * r ** (b - 1))
    m4_3 = xdisp / (msum * r**b)

    return {
        "r": r,
        "det_ratio": det_ratio,
        "m3_col1": m3_col1,
        "m3_col2": m3_col2,
        "m4_vdot": m4_1,
        "m4_vdisp": m4_2,
        "m4_xdisp": m4_3,
        "max_det_error": float(np.max(np.abs(det_ratio - 1.0))),
        "c_m3": float(np.max(np.maximum(m3_col1, m3_col2))),
        "c_m4": float(np.max(np.maximum(np.maximum(m4_1, m4_2), m4_3))),
    }


def group_form_residual(params: TrajectoryParams, r: float, z: PhasePoint) -> float:
    """|gamma^m(r;z) - z ∘ u| with u = (m0 r, A(r)(m1,m2)); zero analytically."""
    lhs = eval_trajectory(params, r, z)
    rhs = group_compose(z, trajectory_group_point(params, r))
    return float(
        abs(lhs.t - rhs.t) + np.linalg.norm(lhs.x - rhs.x) + np.linalg.norm(lhs.v - rhs.v)
    )
