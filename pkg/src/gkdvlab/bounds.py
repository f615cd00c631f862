"""Timescales, lifespans and proximity scales attached to experiment metadata.

The unknown constants of the estimates (c_{s,k} and the proximity prefactors)
default to 1, so every number here is an order-of-magnitude scale.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .models import PolynomialNonlinearity


@dataclass(frozen=True)
class TheoremConstants:
    A_full: float  # max j|a_j| over 1 <= j <= k (proximity timescale)
    A_lower: float  # max j|a_j| over 1 <= j <= k-1 (size-estimate lifespan)
    B: float  # max |a_j| over 1 <= j <= k-1


def theorem_constants(nl: PolynomialNonlinearity) -> TheoremConstants:
    a = nl.coeffs
    k = len(a)
    weighted = [j * abs(a[j - 1]) for j in range(1, k + 1)]
    lower = weighted[: k - 1]
    return TheoremConstants(
        A_full=max(weighted),
        A_lower=max(lower, default=0.0),
        B=max((abs(x) for x in a[: k - 1]), default=0.0),
    )


def proximity_timescale(
    u0_norm: float,
    U0_norm: float,
    nl: PolynomialNonlinearity,
    s: int = 1,
    c_const: float = 1.0,
    power_form: bool = False,
) -> float:
    """c * min{(A_k sum_j ||U0||^j)^-1, ||u0||^-1} with norms in H^{s+1}.

    ``power_form`` uses c * min{||U0||^-k, ||u0||^-1} instead. Zero norms
    make the corresponding term infinite.
    """
    k = nl.degree
    if power_form:
        first = math.inf if U0_norm == 0 else U0_norm ** (-k)
    else:
        denom = theorem_constants(nl).A_full * sum(U0_norm**j for j in range(1, k + 1))
        first = math.inf if denom == 0 else 1.0 / denom
    second = math.inf if u0_norm == 0 else 1.0 / u0_norm
    return c_const * min(first, second)


def size_lifespan(U0_norm: float, nl: PolynomialNonlinearity, s: int = 2, c_const: float = 1.0) -> float:
    """c / (||U0||^k + A_k sum_{j<k} ||U0||^j) with A_k over 1 <= j <= k-1."""
    if not U0_norm > 0:
        raise ValueError("lifespan needs a positive data norm")
    k = nl.degree
    A = theorem_constants(nl).A_lower
    return c_const / (U0_norm**k + A * sum(U0_norm**j for j in range(1, k)))


def proximity_scale(epsilon: float, k: int) -> float:
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    return max(epsilon**2, epsilon ** (k + 1))


@dataclass(frozen=True)
class BoundReport:
    k: int
    A_k: float
    A_k_lower: float
    B_k: float
    epsilon: float
    T_s: float
    T_tilde_s: float
    T_window_inverse_square: float
    lifespan_T: float
    proximity_scale: float
    c_sk: float = 1.0
    s: int = 1

    def to_dict(self) -> dict:
        return {key: (None if isinstance(v, float) and math.isinf(v) else v) for key, v in asdict(self).items()}


def bound_report(
    nl: PolynomialNonlinearity,
    u0_norm: float,
    U0_norm: float,
    epsilon: float | None = None,
    s: int = 1,
    c_const: float = 1.0,
) -> BoundReport:
    """Collect every scale for one experiment.

    ``u0_norm``/``U0_norm`` are H^{s+1} norms of the reference and gKdV data.
    ``T_window_inverse_square`` is ||U0||^-2, the window used in the text for
    the critical k=4 example; it is reported next to ``T_tilde_s``, not
    substituted for it.
    """
    consts = theorem_constants(nl)
    eps = max(u0_norm, U0_norm) if epsilon is None else epsilon
    return BoundReport(
        k=nl.degree,
        A_k=consts.A_full,
        A_k_lower=consts.A_lower,
        B_k=consts.B,
        epsilon=eps,
        T_s=proximity_timescale(u0_norm, U0_norm, nl, s, c_const),
        T_tilde_s=proximity_timescale(u0_norm, U0_norm, nl, s, c_const, power_form=True),
        T_window_inverse_square=(math.inf if U0_norm == 0 else U0_norm**-2),
        lifespan_T=size_lifespan(U0_norm, nl, s, c_const) if U0_norm > 0 else math.inf,
        proximity_scale=proximity_scale(eps, nl.degree),
        c_sk=c_const,
        s=s,
    )
