"""Galilean kinetic group, p-dilations, backward kinetic p-cylinders, and
transport-aligned cutoffs.

The group law (t,x,v)∘(s,y,w) = (t+s, x+y+sv, v+w) is the symmetry of the
transport operator; cylinders and cutoffs are aligned with it so the
transport derivative of a cutoff reduces to its pure time part.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _vec(x, d: int) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.shape != (d,):
        raise ValueError(f"expected vector of length {d}, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class PhasePoint:
    """A point z = (t, x, v) with x, v in R^d."""

    t: float
    x: np.ndarray
    v: np.ndarray

    @classmethod
    def of(cls, t, x, v) -> "PhasePoint":
        x = np.atleast_1d(np.asarray(x, dtype=float))
        v = np.atleast_1d(np.asarray(v, dtype=float))
        if x.shape != v.shape:
            raise ValueError("x and v must have the same dimension")
        return cls(float(t), x, v)

    @property
    def d(self) -> int:
        return self.x.shape[0]

    def allclose(self, other: "PhasePoint", tol: float = 1e-12) -> bool:
        return (
            abs(self.t - other.t) <= tol
            and np.allclose(self.x, other.x, atol=tol, rtol=0)
            and np.allclose(self.v, other.v, atol=tol, rtol=0)
        )


def group_compose(a: PhasePoint, b: PhasePoint) -> PhasePoint:
    """(t,x,v)∘(s,y,w) = (t+s, x+y+sv, v+w)."""
    if a.d != b.d:
        raise ValueError(f"dimension mismatch: {a.d} vs {b.d}")
    return PhasePoint(a.t + b.t, a.x + b.x + b.t * a.v, a.v + b.v)


def group_inverse(a: PhasePoint) -> PhasePoint:
    """(t,x,v)^{-1} = (-t, -x+tv, -v)."""
    return PhasePoint(-a.t, -a.x + a.t * a.v, -a.v)


def dilate(z: PhasePoint, r: float, p: float) -> PhasePoint:
    """p-dilation (t,x,v) -> (r^p t, r^{1+p} x, r v)."""
    if r <= 0:
        raise ValueError("dilation factor must be positive")
    return PhasePoint(r**p * z.t, r ** (1 + p) * z.x, r * z.v)


@dataclass(frozen=True)
class Cylinder:
    """Backward kinetic p-cylinder Q_{theta,R}(z0):
    t-t0 in [-theta R^p, 0), x-x0-(t-t0)v in B_{theta R^{1+p}}, v-v0 in B_R."""

    center: PhasePoint
    theta: float
    R: float
    p: float

    def __post_init__(self):
        if self.theta <= 0 or self.R <= 0:
            raise ValueError("theta and R must be positive")

    @property
    def t_depth(self) -> float:
        return self.theta * self.R**self.p

    @property
    def x_radius(self) -> float:
        return self.theta * self.R ** (1 + self.p)

    @property
    def volume(self) -> float:
        d = self.center.d
        unit_ball = {1: 2.0, 2: np.pi, 3: 4 * np.pi / 3}[d]
        return (
            self.theta ** (d + 1)
            * self.R ** (self.p + d * (1 + self.p) + d)
            * unit_ball**2
        )

    def contains(self, z: PhasePoint) -> bool:
        c = self.center
        s = z.t - c.t
        if not (-self.t_depth <= s < 0):
            return False
        if np.linalg.norm(z.x - c.x - s * z.v) >= self.x_radius:
            return False
        return bool(np.linalg.norm(z.v - c.v) < self.R)

    def contains_grid(self, t, x, v):
        """Vectorized membership for broadcastable t, x, v arrays (d=1)."""
        c = self.center
        s = np.asarray(t) - c.t
        in_t = (-self.t_depth <= s) & (s < 0)
        in_x = np.abs(np.asarray(x) - c.x[0] - s * np.asarray(v)) < self.x_radius
        in_v = np.abs(np.asarray(v) - c.v[0]) < self.R
        return in_t & in_x & in_v


def cylinder_contains(c: Cylinder, z: PhasePoint) -> bool:
    return c.contains(z)


def phase_point_to_json(z: PhasePoint) -> dict:
    return {"t": z.t, "x": z.x.tolist(), "v": z.v.tolist()}


def phase_point_from_json(obj: dict) -> PhasePoint:
    return PhasePoint.of(obj["t"], obj["x"], obj["v"])


def cylinder_to_json(c: Cylinder) -> dict:
    return {"center": phase_point_to_json(c.center), "theta": c.theta,
            "R": c.R, "p": c.p}


def cylinder_from_json(obj: dict) -> Cylinder:
    return Cylinder(phase_point_from_json(obj["center"]), obj["theta"],
                    obj["R"], obj["p"])


def _sigma(u):
    """exp(-1/u) for u > 0, else 0; the C^inf one-sided mollifier seed."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos])
    return out


def _sigma_prime(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > 0
    up = u[pos]
    out[pos] = np.exp(-1.0 / up) / (up * up)
    return out


def smooth_transition(u):
    """C^inf monotone ramp: exactly 0 for u<=0, exactly 1 for u>=1."""
    u = np.asarray(u, dtype=float)
    a = _sigma(u)
    b = _sigma(1.0 - u)
    return a / (a + b)


def smooth_transition_prime(u):
    """Closed-form derivative of the ramp (max value 2 at u=1/2)."""
    u = np.asarray(u, dtype=float)
    a = _sigma(u)
    b = _sigma(1.0 - u)
    return (_sigma_prime(u) * b + a * _sigma_prime(1.0 - u)) / (a + b) ** 2


def bump(u):
    """exp(-1/(1-u^2)) on |u|<1, else 0 (unnormalized)."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1
    ui = u[inside]
    out[inside] = np.exp(-1.0 / (1.0 - ui * ui))
    return out


def bump_prime(u):
    """d/du of the bump: bump(u) * (-2u/(1-u^2)^2) on |u|<1."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1
    ui = u[inside]
    g = 1.0 - ui * ui
    out[inside] = np.exp(-1.0 / g) * (-2.0 * ui / (g * g))
    return out


@dataclass
class CutoffSet:
    """chi(t,x,v) = eta(t) zeta(x-tv) phi(v): 1 on Q_{theta,R1},
    supported (for t<0) in Q_{theta,R2}; transport kills zeta."""

    theta: float
    R1: float
    R2: float
    p: float
    Gamma_t: float = field(init=False)
    Gamma_v: float = field(init=False)

    def __post_init__(self):
        if not 0 < self.R1 < self.R2:
            raise ValueError("require 0 < R1 < R2")
        th, R1, R2, p = self.theta, self.R1, self.R2, self.p
        self.Gamma_t = 1.0 / (th * (R2**p - R1**p))
        self.Gamma_v = R2**p / (R2 ** (1 + p) - R1 ** (1 + p)) + 1.0 / (R2 - R1)
        self._t_lo = -th * R2**p
        self._t_hi = -th * R1**p
        self._x1 = th * R1 ** (1 + p)
        self._x2 = th * R2 ** (1 + p)

    def eta(self, t):
        return smooth_transition((np.asarray(t) - self._t_lo) / (self._t_hi - self._t_lo))

    def eta_prime(self, t):
        scale = self._t_hi - self._t_lo
        return smooth_transition_prime((np.asarray(t) - self._t_lo) / scale) / scale

    def zeta(self, y):
        r = np.abs(np.asarray(y))
        return smooth_transition((self._x2 - r) / (self._x2 - self._x1))

    def phi(self, v):
        r = np.abs(np.asarray(v))
        return smooth_transition((self.R2 - r) / (self.R2 - self.R1))

    def chi(self, t, x, v):
        t, x, v = (np.asarray(a, dtype=float) for a in (t, x, v))
        return self.eta(t) * self.zeta(x - t * v) * self.phi(v)

    def transport_chi(self, t, x, v):
        """(∂_t + v ∂_x)chi = eta'(t) zeta(x-tv) phi(v), exactly."""
        t, x, v = (np.asarray(a, dtype=float) for a in (t, x, v))
        return self.eta_prime(t) * self.zeta(x - t * v) * self.phi(v)

    def grad_v_chi(self, t, x, v, h: float | None = None):
        t, x, v = (np.asarray(a, dtype=float) for a in (t, x, v))
        if h is None:
            h = 1e-5 * (self.R2 - self.R1)
        return (self.chi(t, x, v + h) - self.chi(t, x, v - h)) / (2 * h)

    def measure_constants(self, rng=None, n: int = 4000) -> dict:
        """Sample sup|transport chi|/Gamma_t and sup|grad_v chi|/Gamma_v."""
        rng = rng or np.random.default_rng(0)
        t = rng.uniform(self._t_lo, 0.0, n)
        xi = rng.uniform(-self._x2, self._x2, n)
        v = rng.uniform(-self.R2, self.R2, n)
        x = xi + t * v  # cover the sheared slab where zeta varies
        ct = float(np.max(np.abs(self.transport_chi(t, x, v)))) / self.Gamma_t
        cv = float(np.max(np.abs(self.grad_v_chi(t, x, v)))) / self.Gamma_v
        return {"c_transport": ct, "c_gradv": cv}


def build_cutoffs(theta: float, R1: float, R2: float, p: float) -> CutoffSet:
    if R1 >= R2:
        raise ValueError("require R1 < R2")
    return CutoffSet(theta=theta, R1=R1, R2=R2, p=p)
