"""Exact exponent algebra for the kinetic interpolation/iteration machinery.

Every derived exponent (q, beta, homogeneous dimension Q, the kernel
integrabilities theta_*, the source exponent r, the Besov smoothness s and
weight alpha, the iteration gap delta) is computed in exact rational
arithmetic.  Floats appear only at the boundary to the grid modules.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

RationalLike = Union[Fraction, int, str]


def as_fraction(x: RationalLike) -> Fraction:
    """Parse 'num/den' strings, ints, or Fractions into an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(str(x))


class Reason(str, Enum):
    OK = "ok"
    WINDOW_P = "WINDOW_P"
    WINDOW_Q2 = "WINDOW_Q2"
    WINDOW_A = "WINDOW_A"
    DA_SINGULAR = "DA_SINGULAR"


@dataclass(frozen=True)
class ProblemParams:
    """Dimension d, growth exponent p > 1, source integrability mu > 1."""

    d: int
    p: Fraction
    mu: Fraction

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d}")
        object.__setattr__(self, "p", as_fraction(self.p))
        object.__setattr__(self, "mu", as_fraction(self.mu))
        if self.p <= 1:
            raise ValueError(f"p must be > 1, got {self.p}")
        if self.mu <= 1:
            raise ValueError(f"mu must be > 1, got {self.mu}")

    @property
    def p_dual(self) -> Fraction:
        return self.p / (self.p - 1)


@dataclass(frozen=True)
class ExponentTable:
    """All derived exponents for (d, p, mu); q is None if 1/q <= 0."""

    d: int
    p: Fraction
    mu: Fraction
    a: Fraction
    beta: Optional[Fraction]
    Qdim: Optional[Fraction]
    q: Optional[Fraction]
    theta0: Optional[Fraction]
    theta1: Optional[Fraction]
    thetav: Optional[Fraction]
    r_source: Fraction
    qbar: Fraction
    alpha: Fraction
    delta_dg: Optional[Fraction]
    admissible: bool
    reason: Reason


@dataclass(frozen=True)
class TransferTable:
    """Besov smoothness s(q), weight alpha(q), and shifted integrabilities."""

    d: int
    p: Fraction
    q: Fraction
    s: Fraction
    alpha_s: Fraction
    beta: Fraction
    Qdim: Fraction
    theta0_s: Optional[Fraction]
    theta1_s: Optional[Fraction]
    thetav_s: Optional[Fraction]
    valid: bool
    reason: Reason


def p_admissible_window(d: int) -> tuple[Fraction, Fraction]:
    """Open p-interval in which the dual-exponent machinery admits, exactly."""
    if d < 1:
        raise ValueError("d must be a positive integer")
    return (2 - Fraction(2, 3 * d + 2), 2 + Fraction(2, d))


def _inv_q(d: int, p: Fraction, mu: Fraction) -> Fraction:
    return Fraction(1, 4 * d + 2) * (Fraction(3 * d + 1) / p + Fraction(d + 1) / mu - 1)


def compute_exponents(params: ProblemParams) -> ExponentTable:
    """Fill the full exponent table; inadmissible inputs get a reason code.

    The trajectory scaling beta balances the gradient and drift estimates,
    1/q = 1/p + (1-beta)/Q = 1/mu + (beta-2)/Q with Q = (2*beta-1)*d + 1;
    the table is admissible iff beta in (1,2) and q > 2.
    """
    d, p, mu = params.d, params.p, params.mu
    a = 1 / p - 1 / mu
    inv_q = _inv_q(d, p, mu)
    q = 1 / inv_q if inv_q > 0 else None
    r_source = p * (4 * d + 2) / (p * (3 * d + 2) - 2 * d)
    qbar = p * (4 * d + 2) / (d * (p + 2))
    alpha = Fraction(3 * d + 1, 4 * d + 2)

    if d * a == 1:
        return ExponentTable(
            d=d, p=p, mu=mu, a=a, beta=None, Qdim=None, q=q,
            theta0=None, theta1=None, thetav=None,
            r_source=r_source, qbar=qbar, alpha=alpha, delta_dg=None,
            admissible=False, reason=Reason.DA_SINGULAR,
        )

    beta = (3 + (1 - d) * a) / (2 * (1 - d * a))
    Qdim = Fraction(2 * d + 1) / (1 - d * a)
    assert Qdim == (2 * beta - 1) * d + 1

    in_a_window = 1 < beta < 2
    if not in_a_window:
        admissible, reason = False, Reason.WINDOW_A
    elif not (0 < inv_q < Fraction(1, 2)):
        admissible, reason = False, Reason.WINDOW_Q2
    else:
        admissible, reason = True, Reason.OK

    theta0 = theta1 = thetav = None
    if in_a_window:
        theta0 = Qdim / (Qdim + beta - 2)
        theta1 = Qdim / (Qdim - 1)
        thetav = Qdim / (Qdim + 1 - beta)
    delta_dg = 1 - p / q if q is not None else None

    return ExponentTable(
        d=d, p=p, mu=mu, a=a, beta=beta, Qdim=Qdim, q=q,
        theta0=theta0, theta1=theta1, thetav=thetav,
        r_source=r_source, qbar=qbar, alpha=alpha, delta_dg=delta_dg,
        admissible=admissible, reason=reason,
    )


def compute_transfer(params: ProblemParams, q: RationalLike) -> TransferTable:
    """Besov transfer table at dual source exponent (mu = p')."""
    d, p = params.d, params.p
    if params.mu != params.p_dual:
        raise ValueError("transfer table is defined for mu = p' only")
    q = as_fraction(q)

    denom = d * (p - 2) + 2 * p + 2
    s = (p * (4 * d + 2) - q * d * (p + 2)) / (q * denom)
    alpha_s = Fraction(3 * d + 1, 4 * d + 2) - Fraction(d - 1, 4 * d + 2) * s
    alpha_s_alt = (q * (p * (1 + d) - d + 1) - (d - 1) * p) / (q * denom)
    assert alpha_s == alpha_s_alt

    # beta for a = 2/p - 1 (the dual-exponent choice)
    beta = denom / (2 * (d * (p - 2) + p))
    Qdim = (2 * beta - 1) * d + 1

    lo, hi = p_admissible_window(d)
    qbar = p * (4 * d + 2) / (d * (p + 2))
    if not (lo < p < hi):
        valid, reason = False, Reason.WINDOW_P
    elif not (max(p, params.p_dual) < q < qbar):
        valid, reason = False, Reason.WINDOW_Q2
    else:
        valid, reason = True, Reason.OK

    theta0_s = theta1_s = thetav_s = None
    if valid:
        assert 0 < s < Fraction(1, 3)
        assert Fraction(1) / (1 - s) < beta < Fraction(2) / (1 + s)
        theta0_s = Qdim / (Qdim + beta - 2 + beta * s)
        theta1_s = Qdim / (Qdim - 1 + beta * s)
        thetav_s = Qdim / (Qdim + 1 - beta + beta * s)

    return TransferTable(
        d=d, p=p, q=q, s=s, alpha_s=alpha_s, beta=beta, Qdim=Qdim,
        theta0_s=theta0_s, theta1_s=theta1_s, thetav_s=thetav_s,
        valid=valid, reason=reason,
    )


def degiorgi_exponents(params: ProblemParams) -> tuple[Fraction, Fraction]:
    """Iteration gap delta = 1 - p/q for p >= 2 and the singular-range
    recursion exponent s = 2(p-1)/p + 1 - 2/q; both at q = qbar (mu = p')."""
    d, p = params.d, params.p
    lo, hi = p_admissible_window(d)
    if not (lo < p < hi):
        raise ValueError(f"p={p} outside the admissible window ({lo}, {hi}): {Reason.WINDOW_P}")
    q = p * (4 * d + 2) / (d * (p + 2))
    delta = 1 - p / q
    assert delta == (2 * (d + 1) - d * p) / Fraction(4 * d + 2)
    s_sing = 2 * (p - 1) / p + 1 - 2 / q
    assert (s_sing > 1) == (p > 2 - Fraction(2, 3 * d + 2))
    return delta, s_sing


def scaling_identities_hold(table: ExponentTable) -> bool:
    """Check both power-balance identities of the two rescalings exactly.

    f_lambda(t,x,v) = f(t, l x, l v) and f_nu(t,x,v) = f(n t, n x, v) force
    -2d/q = (1 - 2d/p) a + (-1 - 2d/mu)(1-a) and
    -(d+1)/q = -((d+1)/p) a + (1 - (d+1)/mu)(1-a) for a = alpha.
    """
    if table.q is None:
        return False
    d, p, mu, q, al = table.d, table.p, table.mu, table.q, table.alpha
    lhs1 = Fraction(-2 * d) / q
    rhs1 = (1 - Fraction(2 * d) / p) * al + (-1 - Fraction(2 * d) / mu) * (1 - al)
    lhs2 = Fraction(-(d + 1)) / q
    rhs2 = -(Fraction(d + 1) / p) * al + (1 - Fraction(d + 1) / mu) * (1 - al)
    return lhs1 == rhs1 and lhs2 == rhs2
