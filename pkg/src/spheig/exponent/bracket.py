"""Inner and outer domain approximations of the exponent.

Exponents are monotone in the domain: shrinking a domain raises |beta| and
enlarging it lowers |beta| on both branches.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from loguru import logger

from spheig.errors import MonotonicityViolation, NegativeGap
from spheig.fem_sphere import mesh_for, solve_nonlinear
from spheig.geometry import (
    DomainFamily,
    FamilyDirection,
    PParams,
    SphericalDomain,
    expansion_room,
    inradius,
)
from spheig.models import Branch, Eigenpair
from spheig.ode_axisym import first_zero, solve_beta
from spheig.utils import map_concurrent

from .models import BracketResult, Extrapolation, MaximalityProbe

MAX_STEP = 0.2


def bracket_steps(
    domain: SphericalDomain, levels: int = 5, largest: float = MAX_STEP
) -> tuple[float, ...]:
    """Dyadic margins ``top / 2^k`` with ``top`` at most half the inradius and half the expansion room."""
    top = min(largest, 0.5 * inradius(domain), 0.5 * expansion_room(domain))
    return tuple(top / 2**k for k in range(levels))


def solve_member(
    domain: SphericalDomain, params: PParams, branch: Branch, tol: float, level: int = 0
) -> Eigenpair:
    """Shooting for arcs and caps, surface finite elements for polygons."""
    if domain.is_axisymmetric:
        return solve_beta(params, domain, branch, tol)
    return solve_nonlinear(mesh_for(domain, level), params, domain, branch, tol)


def _member_slack(pair: Eigenpair, tol: float) -> float:
    if pair.domain.is_axisymmetric:
        return 10.0 * tol * max(1.0, abs(pair.beta)) + 1e-12
    return max(tol, 1e-6 * abs(pair.beta))


def richardson(deltas: Sequence[float], betas: Sequence[float]) -> Extrapolation:
    """Limit as delta -> 0 from the last three terms with a fitted convergence order.

    Falls back to the last value with the last increment as error bar when the
    terms do not contract geometrically.
    """
    b = np.asarray(betas, dtype=float)
    d = np.asarray(deltas, dtype=float)
    if b.size < 3:
        err = abs(b[-1] - b[-2]) if b.size == 2 else 0.0
        return Extrapolation(limit=float(b[-1]), error=float(err), fallback=True)
    d1, d2 = b[-2] - b[-3], b[-1] - b[-2]
    s1, s2 = d[-3] / d[-2], d[-2] / d[-1]
    if d2 == 0.0:
        return Extrapolation(limit=float(b[-1]), error=0.0, order=None)
    ratio = d1 / d2
    if not np.isclose(s1, s2, rtol=1e-6) or ratio <= 1.0:
        logger.warning("[bracket] Richardson fit rejected (ratio {:.3g}), using last value", ratio)
        return Extrapolation(limit=float(b[-1]), error=float(abs(d2)), fallback=True)
    order = float(np.log(ratio) / np.log(s2))
    if not 0.25 <= order <= 6.0:
        logger.warning("[bracket] implausible order {:.3g}, using last value", order)
        return Extrapolation(limit=float(b[-1]), error=float(abs(d2)), fallback=True)
    correction = d2 / (ratio - 1.0)
    return Extrapolation(
        limit=float(b[-1] + correction), error=float(abs(correction)), order=order
    )


def _approximate(
    domain: SphericalDomain,
    params: PParams,
    branch: Branch,
    steps: Sequence[float],
    tol: float,
    direction: FamilyDirection,
    level: int,
) -> tuple[list[Eigenpair], Extrapolation]:
    family = DomainFamily(base=domain, direction=direction, steps=tuple(steps))
    members = family.members()
    pairs = map_concurrent(lambda m: solve_member(m, params, branch, tol, level), members)
    mags = [abs(pr.beta) for pr in pairs]
    for k in range(len(pairs) - 1):
        slack = _member_slack(pairs[k], tol) + _member_slack(pairs[k + 1], tol)
        step = mags[k + 1] - mags[k]
        bad = step > slack if direction is FamilyDirection.INNER else step < -slack
        if bad:
            raise MonotonicityViolation(
                f"{direction} family exponents are not monotone at k={k}",
                k=k,
                betas=[pairs[k].beta, pairs[k + 1].beta],
                slack=slack,
                tol=tol,
            )
    extrap = richardson(list(steps), [pr.beta for pr in pairs])
    logger.info(
        "[bracket] {} family of {}: {} -> {:.10g} (+/- {:.1e})",
        direction,
        domain.label(),
        [round(pr.beta, 10) for pr in pairs],
        extrap.limit,
        extrap.error,
    )
    return pairs, extrap


def approximate_from_inside(
    domain: SphericalDomain,
    params: PParams,
    branch: Branch,
    steps: Sequence[float],
    tol: float = 1e-10,
    *,
    level: int = 0,
) -> BracketResult:
    pairs, extrap = _approximate(
        domain, params, branch, steps, tol, FamilyDirection.INNER, level
    )
    return BracketResult(
        branch=branch,
        steps=list(steps),
        beta_inner=[pr.beta for pr in pairs],
        residual_inner=[pr.residual_norm for pr in pairs],
        beta_in_limit=extrap.limit,
        in_error=extrap.error,
        tol=tol,
    )


def approximate_from_outside(
    domain: SphericalDomain,
    params: PParams,
    branch: Branch,
    steps: Sequence[float],
    tol: float = 1e-10,
    *,
    level: int = 0,
) -> BracketResult:
    pairs, extrap = _approximate(
        domain, params, branch, steps, tol, FamilyDirection.OUTER, level
    )
    return BracketResult(
        branch=branch,
        steps=list(steps),
        beta_outer=[pr.beta for pr in pairs],
        residual_outer=[pr.residual_norm for pr in pairs],
        beta_out_limit=extrap.limit,
        out_error=extrap.error,
        tol=tol,
    )


def exponent_bracket(
    domain: SphericalDomain,
    params: PParams,
    branch: Branch,
    steps: Sequence[float],
    tol: float = 1e-10,
    *,
    level: int = 0,
    gap_tol: float | None = None,
) -> BracketResult:
    """Both approximations and the gap ``|beta_in| - |beta_out|`` of their limits.

    When the outer limit exceeds the inner one by more than ``gap_tol`` (default:
    tolerance plus both extrapolation error bars), or an outer exponent exceeds an
    inner one, the result comes back with ``consistent=False``. Use
    ``negative_gap_error`` to turn it into a ``NegativeGap``.
    """
    inner = approximate_from_inside(domain, params, branch, steps, tol, level=level)
    outer = approximate_from_outside(domain, params, branch, steps, tol, level=level)
    result = inner.merge(outer)
    gap = abs(result.beta_in_limit) - abs(result.beta_out_limit)
    allowed = gap_tol if gap_tol is not None else tol + result.in_error + result.out_error
    sandwich = max(abs(b) for b in result.beta_outer) <= min(abs(b) for b in result.beta_inner) + allowed
    consistent = gap >= -allowed and sandwich
    result = result.model_copy(
        update={"gap": gap, "gap_allowed": allowed, "consistent": consistent}
    )
    if not consistent:
        logger.warning(
            "[bracket] inconsistent bracket on {}: gap {:.3e} below -{:.1e}",
            domain.label(),
            gap,
            allowed,
        )
    return result


def negative_gap_error(result: BracketResult, domain: SphericalDomain) -> NegativeGap:
    return NegativeGap(
        f"outer exponents exceed inner ones on {domain.label()}",
        gap=result.gap,
        allowed=result.gap_allowed,
        beta_in_limit=result.beta_in_limit,
        beta_out_limit=result.beta_out_limit,
    )


def maximality_probe(
    result: BracketResult,
    params: PParams,
    domain: SphericalDomain,
    rel: float = 1e-2,
) -> MaximalityProbe:
    """First zeros just beyond the inner limit and just short of the outer limit."""
    if not domain.is_axisymmetric:
        raise ValueError("maximality probe needs an arc or a cap")
    if result.beta_in_limit is None or result.beta_out_limit is None:
        raise ValueError("maximality probe needs both limits")
    plus = result.beta_in_limit * (1.0 + rel)
    minus = result.beta_out_limit * (1.0 - rel)
    return MaximalityProbe(
        beta_plus=plus,
        first_zero_plus=first_zero(params, plus, domain.alpha),
        beta_minus=minus,
        first_zero_minus=first_zero(params, minus, domain.alpha),
        alpha=domain.alpha,
    )
