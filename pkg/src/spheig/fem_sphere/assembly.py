"""Weighted P1 assembly for the spherical eigenvalue problem and the p-Laplacian.

Weights are evaluated with one-point quadrature from cell averages; mass matrices
use the exact P1 element mass ``|T| (1 + delta_ij) / (k (k + 1))``.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse

from spheig.geometry import PParams

from .mesh import DiscreteField, SurfaceMesh


def element_weights(
    mesh: SurfaceMesh, params: PParams, beta: float, values: np.ndarray, eps: float
) -> np.ndarray:
    """``(beta^2 w^2 + |grad w|^2 + eps^2)^((p-2)/2)`` per cell from cell averages."""
    mean, grad = mesh.mean_and_gradient(values)
    base = beta * beta * mean * mean + np.einsum("ed,ed->e", grad, grad) + eps * eps
    return _power(base, (params.p - 2.0) / 2.0)


def _power(base: np.ndarray, exponent: float) -> np.ndarray:
    if exponent >= 0.0:
        return base**exponent
    out = np.zeros_like(base)
    positive = base > 0.0
    out[positive] = base[positive] ** exponent
    return out


def _scatter(mesh: SurfaceMesh, local: np.ndarray) -> sparse.csr_matrix:
    k = mesh.cells.shape[1]
    rows = np.repeat(mesh.cells, k, axis=1).ravel()
    cols = np.tile(mesh.cells, (1, k)).ravel()
    n = mesh.n_vertices
    return sparse.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def stiffness_matrix(mesh: SurfaceMesh, cell_weights: np.ndarray | None = None) -> sparse.csr_matrix:
    w = mesh.weighted_measures if cell_weights is None else mesh.weighted_measures * cell_weights
    local = w[:, None, None] * np.einsum("eid,ejd->eij", mesh.grads, mesh.grads)
    return _scatter(mesh, local)


def mass_matrix(mesh: SurfaceMesh, cell_weights: np.ndarray | None = None) -> sparse.csr_matrix:
    k = mesh.cells.shape[1]
    ref = (np.ones((k, k)) + np.eye(k)) / (k * (k + 1))
    w = mesh.weighted_measures if cell_weights is None else mesh.weighted_measures * cell_weights
    return _scatter(mesh, w[:, None, None] * ref[None, :, :])


def assemble_weighted(
    mesh: SurfaceMesh,
    params: PParams,
    beta: float,
    omega_frozen: DiscreteField,
    eps: float,
) -> tuple[sparse.csr_matrix, sparse.csr_matrix]:
    """Stiffness and mass matrices with the frozen eigenproblem weight."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    mesh.check_cells()
    w = element_weights(mesh, params, beta, omega_frozen.values, eps)
    return stiffness_matrix(mesh, w), mass_matrix(mesh, w)


def linearized_coefficients(
    mesh: SurfaceMesh, params: PParams, values: np.ndarray, eps: np.ndarray | float = 0.0
) -> np.ndarray:
    """Cellwise ``b = s^((p-4)/2) ((p-2) g g^T + s I)`` with ``s = |g|^2 + eps^2``."""
    _, g = mesh.mean_and_gradient(values)
    s = np.einsum("ed,ed->e", g, g) + np.asarray(eps) ** 2
    d = g.shape[1]
    b = (params.p - 2.0) * np.einsum("ei,ej->eij", g, g) + s[:, None, None] * np.eye(d)[None]
    return _power(s, (params.p - 4.0) / 2.0)[:, None, None] * b


def assemble_linearized(
    mesh: SurfaceMesh, params: PParams, field: DiscreteField, eps: np.ndarray | float = 0.0
) -> sparse.csr_matrix:
    """Divergence-form operator with the linearized p-Laplacian coefficients.

    This is the Jacobian of ``p_laplacian_residual`` with respect to nodal values.
    """
    mesh.check_cells()
    b = linearized_coefficients(mesh, params, field.values, eps)
    local = mesh.weighted_measures[:, None, None] * np.einsum(
        "eid,edf,ejf->eij", mesh.grads, b, mesh.grads
    )
    return _scatter(mesh, local)


def p_laplacian_residual(
    mesh: SurfaceMesh, params: PParams, values: np.ndarray, eps: np.ndarray | float = 0.0
) -> np.ndarray:
    """Weak form of ``-div(s^((p-2)/2) grad u)`` tested with every nodal hat function."""
    _, g = mesh.mean_and_gradient(values)
    s = np.einsum("ed,ed->e", g, g) + np.asarray(eps) ** 2
    flux = (mesh.weighted_measures * _power(s, (params.p - 2.0) / 2.0))[:, None] * g
    local = np.einsum("ekd,ed->ek", mesh.grads, flux)
    out = np.zeros(mesh.n_vertices)
    np.add.at(out, mesh.cells.ravel(), local.ravel())
    return out


def eigen_residual(
    mesh: SurfaceMesh, params: PParams, beta: float, values: np.ndarray
) -> np.ndarray:
    """Nodal weak residual ``<T_beta(w), phi_i>`` of the spherical problem (no regularization)."""
    w = element_weights(mesh, params, beta, values, 0.0)
    k_mat, m_mat = stiffness_matrix(mesh, w), mass_matrix(mesh, w)
    return k_mat @ values - params.eigen_factor(beta) * (m_mat @ values)
