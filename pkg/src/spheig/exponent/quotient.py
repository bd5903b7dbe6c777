from __future__ import annotations

import numpy as np

from spheig.errors import PositivityError
from spheig.fem_sphere import DiscreteField
from spheig.ode_axisym import ColatGrid

from .models import QuotientDiagnostic

Profile = ColatGrid | DiscreteField


def sample_points(field: Profile) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Interior values and ambient positions of a profile."""
    match field:
        case ColatGrid():
            mask = field.interior()
            theta = field.nodes[mask]
            if field.is_arc:
                phi = theta - field.alpha / 2.0
                pos = np.column_stack([np.cos(phi), np.sin(phi)])
            else:
                pos = np.column_stack([np.sin(theta), np.cos(theta)])
            return field.values[mask], pos, mask
        case DiscreteField():
            mask = field.mesh.interior
            return field.values[mask], field.mesh.points[mask], mask


def proportionality_diagnostic(
    omega: Profile,
    omega_prime: Profile,
    *,
    n_pairs: int = 4000,
    seed: int = 0,
) -> QuotientDiagnostic:
    """Oscillation and Hoelder regularity of ``ln(omega / omega_prime)``.

    ``omega_prime`` is first rescaled so that ``sup omega_prime / omega = 1``; the
    Hoelder exponent is the regression slope of ``ln|dL|`` on ``ln|d sigma|`` over
    random interior pairs and the constant is the smallest one that covers them.
    """
    a, pos, _ = sample_points(omega)
    b, _, _ = sample_points(omega_prime)
    if a.shape != b.shape:
        raise ValueError("profiles must live on the same grid or mesh")
    if np.any(a <= 0.0) or np.any(b <= 0.0):
        raise PositivityError(
            "proportionality diagnostic needs positive interior values",
            nonpositive=int(np.sum(a <= 0.0) + np.sum(b <= 0.0)),
        )
    b = b / np.max(b / a)
    log_ratio = np.log(a) - np.log(b)
    osc = float(log_ratio.max() - log_ratio.min())

    rng = np.random.default_rng(seed)
    i = rng.integers(0, len(a), n_pairs)
    j = rng.integers(0, len(a), n_pairs)
    keep = i != j
    dist = np.linalg.norm(pos[i[keep]] - pos[j[keep]], axis=1)
    diff = np.abs(log_ratio[i[keep]] - log_ratio[j[keep]])
    usable = (dist > 0.0) & (diff > 1e-14 * max(1.0, osc))
    if usable.sum() < 2:
        exponent, constant = 1.0, 0.0
    else:
        slope = np.polyfit(np.log(dist[usable]), np.log(diff[usable]), 1)[0]
        exponent = float(np.clip(slope, 1e-3, 1.0))
        constant = float(np.max(diff[usable] / dist[usable] ** exponent))
    return QuotientDiagnostic(
        osc_log_ratio=max(osc, 0.0),
        holder_constant=constant,
        holder_exponent=exponent,
        comparability_constant=float(np.exp(osc)),
        n_points=len(a),
        n_pairs=int(keep.sum()),
    )
