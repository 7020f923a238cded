"""Scalar fields on uniform cell-centered (t, x, v) grids, d = 1.

All quadrature is the composite midpoint rule on cell centers and region
membership is decided at cell centers, so discrete Hoelder, additivity over
partitions, and the truncation/level-set identities hold exactly.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .geometry import Cylinder

Box = tuple[tuple[float, float], tuple[float, float], tuple[float, float]]


@dataclass(frozen=True)
class Field:
    """Grid samples of f(t, x, v) at cell centers of a box."""

    box: Box
    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 3:
            raise ValueError("Field data must be a 3D (t, x, v) array (d = 1)")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("Field data must be finite")

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.data.shape

    @property
    def components(self) -> int:
        return 1

    @property
    def spacing(self) -> tuple[float, float, float]:
        return tuple(
            (hi - lo) / n for (lo, hi), n in zip(self.box, self.data.shape)
        )

    @property
    def cell_volume(self) -> float:
        dt, dx, dv = self.spacing
        return dt * dx * dv

    def axis_centers(self, i: int) -> np.ndarray:
        (lo, hi), n = self.box[i], self.data.shape[i]
        h = (hi - lo) / n
        return lo + h * (np.arange(n) + 0.5)

    @property
    def t(self) -> np.ndarray:
        return self.axis_centers(0)

    @property
    def x(self) -> np.ndarray:
        return self.axis_centers(1)

    @property
    def v(self) -> np.ndarray:
        return self.axis_centers(2)

    def meshgrid(self):
        return np.meshgrid(self.t, self.x, self.v, indexing="ij")

    @classmethod
    def from_function(cls, box: Box, shape: tuple[int, int, int],
                      func: Callable) -> "Field":
        f = cls(box, np.zeros(shape))
        T, X, V = f.meshgrid()
        return cls(box, np.asarray(func(T, X, V), dtype=float))

    def with_data(self, data: np.ndarray) -> "Field":
        return Field(self.box, data)

    def sample(self, t, x, v, track_outside: bool = False):
        """Trilinear interpolation at arbitrary points; zero outside the box.

        With track_outside=True returns (values, touched) where touched flags
        whether any requested point fell outside the box.
        """
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        vals = np.zeros(np.broadcast(t, x, v).shape)
        idx = []
        wts = []
        inside = np.ones_like(vals, dtype=bool)
        for coord, ax in zip((t, x, v), range(3)):
            (lo, hi), n = self.box[ax], self.data.shape[ax]
            h = (hi - lo) / n
            pos = (coord - lo) / h - 0.5
            inside &= (coord >= lo) & (coord <= hi)
            i0 = np.floor(pos).astype(int)
            frac = pos - i0
            i0c = np.clip(i0, 0, n - 1)
            i1c = np.clip(i0 + 1, 0, n - 1)
            # zero beyond the outermost cell centers by half-cell margin:
            # clamp weights so the constant extension only spans half a cell
            idx.append((i0c, i1c))
            wts.append((1.0 - frac, frac))
        acc = np.zeros_like(vals)
        for bt in range(2):
            for bx in range(2):
                for bv in range(2):
                    w = wts[0][bt] * wts[1][bx] * wts[2][bv]
                    acc += w * self.data[idx[0][bt], idx[1][bx], idx[2][bv]]
        vals = np.where(inside, acc, 0.0)
        if track_outside:
            return vals, bool(np.any(~inside))
        return vals

    # ---- file format: header (int64 dims, float64 box+spacing), payload ----

    MAGIC = b"KPF1"

    def save(self, path: str) -> None:
        dims = self.data.shape
        with open(path, "wb") as fh:
            fh.write(self.MAGIC)
            fh.write(struct.pack("<4q", *dims, self.components))
            flat_box = [b for pair in self.box for b in pair]
            fh.write(struct.pack("<6d", *flat_box))
            fh.write(struct.pack("<3d", *self.spacing))
            fh.write(self.data.astype("<f8").tobytes(order="C"))

    @classmethod
    def load(cls, path: str) -> "Field":
        with open(path, "rb") as fh:
            if fh.read(4) != cls.MAGIC:
                raise ValueError("not a field file")
            nt, nx, nv, ncomp = struct.unpack("<4q", fh.read(32))
            if ncomp != 1:
                raise ValueError("only scalar fields supported (d = 1)")
            b = struct.unpack("<6d", fh.read(48))
            box = ((b[0], b[1]), (b[2], b[3]), (b[4], b[5]))
            fh.read(24)  # spacing is derivable; stored for external readers
            data = np.frombuffer(fh.read(8 * nt * nx * nv), dtype="<f8")
        return cls(box, data.reshape(nt, nx, nv).copy())

    def export_slice_csv(self, path: str, t_index: int) -> None:
        """One (x, v, value) row per cell of the chosen time slice."""
        xs, vs = self.x, self.v
        with open(path, "w", newline="") as fh:
            fh.write("x,v,value\n")
            for i, xi in enumerate(xs):
                for j, vj in enumerate(vs):
                    fh.write(f"{xi!r},{vj!r},{self.data[t_index, i, j]!r}\n")


def region_mask(f: Field, region: Optional[Cylinder]) -> np.ndarray:
    if region is None:
        return np.ones(f.shape, dtype=bool)
    T, X, V = f.meshgrid()
    return region.contains_grid(T, X, V)


def lp_norm(f: Field, p: float, region: Optional[Cylinder] = None) -> float:
    """Midpoint-rule L^p norm over box ∩ region (sup norm for p = inf)."""
    if p < 1:
        raise ValueError("p must be >= 1")
    mask = region_mask(f, region)
    if region is not None and not mask.any():
        raise ValueError("region does not intersect the field box")
    vals = np.abs(f.data[mask])
    if np.isinf(p):
        return float(vals.max()) if vals.size else 0.0
    return float((np.sum(vals**p) * f.cell_volume) ** (1.0 / p))


def linf_l2_slice_norm(f: Field, c: Cylinder) -> float:
    """max over time slices of the L^2(x,v) norm over the slice D(t)."""
    _, dx, dv = f.spacing
    T, X, V = f.meshgrid()
    mask = c.contains_grid(T, X, V)
    if not mask.any():
        raise ValueError("cylinder does not intersect the field box")
    sq = np.where(mask, f.data**2, 0.0)
    slice_l2 = np.sqrt(np.sum(sq, axis=(1, 2)) * dx * dv)
    return float(slice_l2.max())


def diff_x(f: Field, h: float) -> Field:
    """Finite difference f(t, x+h, v) - f(t, x, v); off-grid h interpolates,
    outside the box the shifted field is extended by zero."""
    if h == 0.0:
        return f.with_data(np.zeros_like(f.data))
    T, X, V = f.meshgrid()
    shifted = f.sample(T, X + h, V)
    return f.with_data(shifted - f.data)


def grad_v(f: Field) -> Field:
    """d/dv by central differences, one-sided at the v-boundary."""
    if f.shape[2] < 3:
        raise ValueError("need at least 3 velocity cells")
    _, _, dv = f.spacing
    out = np.gradient(f.data, dv, axis=2, edge_order=1)
    return f.with_data(out)


@dataclass(frozen=True)
class BesovEstimate:
    s: float
    q: float
    h_set: tuple[float, ...]
    per_h: tuple[float, ...]
    value: float


def besov_seminorm(f: Field, s: float, q: float, h_set) -> BesovEstimate:
    """Finite-h_set sup of ||Delta_x^h f||_q / |h|^s (a certified lower bound
    of the true seminorm).  The difference norm is restricted to the x-window
    where both x and x+h lie in the box, so fields that do not vanish at the
    x-boundary are not polluted by the zero extension."""
    if not (0 < s < 1):
        raise ValueError("s must be in (0, 1)")
    if q < 1:
        raise ValueError("q must be >= 1")
    h_set = tuple(float(h) for h in h_set)
    (x0, x1) = f.box[1]
    xc = f.x
    per_h = []
    for h in h_set:
        d = diff_x(f, h)
        keep = (xc + min(h, 0.0) >= x0) & (xc + max(h, 0.0) <= x1)
        masked = d.with_data(np.where(keep[None, :, None], d.data, 0.0))
        per_h.append(lp_norm(masked, q) / abs(h) ** s)
    per_h = tuple(per_h)
    return BesovEstimate(s=s, q=q, h_set=h_set, per_h=per_h,
                         value=max(per_h) if per_h else 0.0)


def truncate(f: Field, k: float) -> Field:
    """Positive part (f - k)_+."""
    return f.with_data(np.maximum(f.data - k, 0.0))


def level_set_measure(f: Field, k: float, region: Optional[Cylinder] = None,
                      strict: bool = True) -> float:
    """Cell-counting measure of {f > k} (or {f >= k}) within the region."""
    mask = region_mask(f, region)
    sel = (f.data > k) if strict else (f.data >= k)
    return float(np.count_nonzero(sel & mask)) * f.cell_volume


def intrinsic_rescale(f: Field, K: float, p: float) -> Field:
    """u(t,x,v) = f(Theta t, Theta x, v)/K with Theta = K^{2-p}, realized as
    an exact relabeling of the t and x axes (no resampling)."""
    if K <= 0:
        raise ValueError("K must be positive")
    theta = K ** (2.0 - p)
    (t0, t1), (x0, x1), vb = f.box
    new_box = ((t0 / theta, t1 / theta), (x0 / theta, x1 / theta), vb)
    return Field(new_box, f.data / K)


def weak_lp_norm(f: Field, theta: float, region: Optional[Cylinder] = None) -> float:
    """Weak L^{theta} norm sup_k |g_k| * |{|g| >= |g_k|}|^{1/theta}, the exact
    sup over attained levels for a piecewise-constant grid function."""
    if theta <= 1:
        raise ValueError("theta must be > 1")
    mask = region_mask(f, region)
    vals = np.abs(f.data[mask])
    vals = vals[vals > 0]
    if vals.size == 0:
        return 0.0
    vals = np.sort(vals)[::-1]
    counts = np.arange(1, vals.size + 1)
    return float(np.max(vals * (counts * f.cell_volume) ** (1.0 / theta)))
