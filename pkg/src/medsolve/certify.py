"""Optimality certification for candidate measurements.

A rank-one projective measurement {Pi_i} is stationary for the average
success probability iff

    Pi_j (p_j rho_j - p_i rho_i) Pi_i = 0   for all i, j,

and a stationary measurement is the global optimum iff the dual operator
Z = sum_k p_k rho_k Pi_k dominates every weighted state:

    Z - p_i rho_i >= 0   for all i.

There is no duality gap, so at the optimum Tr(Z) equals the success
probability.  At the Gram level the same stationarity reads, with
W = G^{1/2} U,

    W_jj W_jk^* = W_kj W_kk^*   for all j, k,

and the optimum is the unique stationary point whose hermitian factor
F = D W (D the diagonal of the phase-fixed W) is positive definite --
equivalently, F is the positive square root of D G D.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NotStationary, ResidualTooLarge
from .gram import GramMatrix, Ensemble, ensemble_from_gram
from .linalg import anti_hermitian_norm, hermitize, hs_norm, polar_unitary
from .measurement import Povm, povm_from_unitary

#: default stationarity tolerance: one order above the observed integration
#: error floor (~1e-15), with margin for dimensions up to ~8
TOL_STAT = 1e-9
#: default global-optimality tolerance on the minimum eigenvalue
TOL_GLB = 1e-9

#: admissible deviation of F^2 from DGD for a state offered as a solution
RESIDUAL_GATE = 1e-8

_STATUS_OPTIMAL = "optimal"
_STATUS_STATIONARY = "stationary"
_STATUS_NONSTATIONARY = "nonstationary"

_EXIT_CODES = {_STATUS_OPTIMAL: 0, _STATUS_STATIONARY: 2, _STATUS_NONSTATIONARY: 3}


@dataclass(frozen=True)
class Certificate:
    """Machine-readable optimality certificate for one measurement.

    Fields: the stationarity residual, the minimum eigenvalue of
    Z - p_i rho_i over i (>= -tol_glb certifies global optimality), the
    minimum eigenvalue and positivity flag of the hermitian factor F, the
    success probability and the dual value Tr(Z).
    """

    stationarity_residual: float
    global_min_eig: float
    f_min_eig: float
    f_positive: bool
    p_success: float
    tr_z: float
    tol_stat: float = TOL_STAT
    tol_glb: float = TOL_GLB

    @property
    def is_stationary(self) -> bool:
        return self.stationarity_residual <= self.tol_stat

    @property
    def is_optimal(self) -> bool:
        return self.is_stationary and self.global_min_eig >= -self.tol_glb

    @property
    def status(self) -> str:
        if not self.is_stationary:
            return _STATUS_NONSTATIONARY
        return _STATUS_OPTIMAL if self.is_optimal else _STATUS_STATIONARY

    @property
    def exit_code(self) -> int:
        """CLI contract: 0 optimal, 2 stationary-not-global, 3 not stationary."""
        return _EXIT_CODES[self.status]


def _overlaps(ensemble: Ensemble, povm: Povm) -> np.ndarray:
    """Overlap matrix O_ij = <psi~_i | v_j>."""
    if ensemble.m != povm.m:
        raise ValueError("ensemble and measurement dimensions differ")
    return ensemble.scaled_states.conj().T @ povm.vectors


def z_operator(ensemble: Ensemble, povm: Povm) -> tuple[np.ndarray, float]:
    """Dual operator Z = sum_i p_i rho_i Pi_i, hermitized.

    Returns the hermitian part and the HS norm of the discarded
    anti-hermitian part; the latter vanishes (to tolerance) exactly at
    stationary measurements, where the two operator orderings coincide.
    """
    scaled = ensemble.scaled_states
    z = np.zeros((ensemble.m, ensemble.m), dtype=complex)
    for i in range(ensemble.m):
        rho_w = np.outer(scaled[:, i], scaled[:, i].conj())
        z += rho_w @ povm.projector(i)
    return hermitize(z), anti_hermitian_norm(z)


def stationarity_check(ensemble: Ensemble, povm: Povm) -> float:
    """Maximum stationarity violation over all outcome pairs.

    Computed two ways -- as the norm of Pi_j (p_j rho_j - p_i rho_i) Pi_i
    from the explicit operators, and as the Gram-level residual
    |O_jj O_jk^* - O_kj O_kk^*| from the overlap matrix -- which must agree
    to 1e-10; the operator-level value is returned.
    """
    m = ensemble.m
    scaled = ensemble.scaled_states
    projs = [povm.projector(i) for i in range(m)]
    weighted = [np.outer(scaled[:, i], scaled[:, i].conj()) for i in range(m)]
    op_resid = 0.0
    for j in range(m):
        for i in range(m):
            block = projs[j] @ (weighted[j] - weighted[i]) @ projs[i]
            op_resid = max(op_resid, hs_norm(block))

    o = _overlaps(ensemble, povm)
    d = np.diagonal(o)
    gram_resid = float(np.max(np.abs(d[:, None] * o.conj() - o.T * d.conj()[None, :])))

    if abs(op_resid - gram_resid) > 1e-10:
        raise ResidualTooLarge(
            "operator-level and Gram-level stationarity residuals disagree "
            f"by {abs(op_resid - gram_resid):.3e}"
        )
    return op_resid


def global_check(
    ensemble: Ensemble, povm: Povm, tol_stat: float = TOL_STAT
) -> float:
    """Minimum eigenvalue of Z - p_i rho_i over all i.

    A value >= -tol certifies the stationary measurement as the global
    optimum.  Z is only well defined (hermitian) at stationary points, so a
    large anti-hermitian part is rejected.
    """
    z, anti = z_operator(ensemble, povm)
    if anti > 10.0 * tol_stat:
        raise NotStationary(
            f"Z has anti-hermitian part {anti:.3e}; measurement is not stationary"
        )
    return _global_min_eig(ensemble, z)


def _global_min_eig(ensemble: Ensemble, z: np.ndarray) -> float:
    scaled = ensemble.scaled_states
    worst = np.inf
    for i in range(ensemble.m):
        gap = z - np.outer(scaled[:, i], scaled[:, i].conj())
        worst = min(worst, float(np.linalg.eigvalsh(hermitize(gap))[0]))
    return worst


def _hermitian_factor(overlaps: np.ndarray) -> np.ndarray:
    """Candidate factor F = D W from the overlap matrix, with per-outcome
    phases fixed so the diagonal of W is real non-negative."""
    diag = np.diagonal(overlaps).copy()
    diag[np.abs(diag) < 1e-15] = 1.0
    phases = diag / np.abs(diag)
    w = overlaps * phases.conj()[None, :]
    d = np.diagonal(w).real
    return hermitize(np.diag(d) @ w)


def certify_povm(
    ensemble: Ensemble,
    povm: Povm,
    tol_stat: float = TOL_STAT,
    tol_glb: float = TOL_GLB,
) -> Certificate:
    """Full certificate for an explicit (ensemble, measurement) pair."""
    resid = stationarity_check(ensemble, povm)
    z, _anti = z_operator(ensemble, povm)
    global_min = _global_min_eig(ensemble, z)
    o = _overlaps(ensemble, povm)
    f = _hermitian_factor(o)
    f_eigs = np.linalg.eigvalsh(f)
    return Certificate(
        stationarity_residual=float(resid),
        global_min_eig=float(global_min),
        f_min_eig=float(f_eigs[0]),
        f_positive=bool(f_eigs[0] > 0.0),
        p_success=float(np.sum(np.abs(np.diagonal(o)) ** 2)),
        tr_z=float(np.trace(z).real),
        tol_stat=tol_stat,
        tol_glb=tol_glb,
    )


def certify_gram(
    gram: GramMatrix,
    f: np.ndarray,
    tol_stat: float = TOL_STAT,
    tol_glb: float = TOL_GLB,
) -> Certificate:
    """Certificate for a hermitian factor F offered as a solution at G.

    Checks that F^2 = D G D holds with D = diag(sqrt(F_ii)) (rejecting if
    the residual exceeds RESIDUAL_GATE), reconstructs the measurement via
    U = G^{-1/2} D^{-1} F, and certifies it against the canonical
    realization of the ensemble.  The success probability is Tr(F).
    """
    f = np.asarray(f, dtype=complex)
    if np.max(np.abs(f - f.conj().T)) > 1e-10:
        raise ValueError("factor F must be hermitian")
    a_sq = np.diagonal(f).real
    if np.any(a_sq <= 0.0):
        raise ValueError("factor F must have positive diagonal")
    d = np.diag(np.sqrt(a_sq))
    resid = hs_norm(f @ f - d @ gram.entries @ d)
    if resid > RESIDUAL_GATE:
        raise ResidualTooLarge(
            f"F^2 - DGD has HS norm {resid:.3e} (gate {RESIDUAL_GATE:.1e})"
        )
    u = gram.inv_sqrt() @ np.linalg.solve(d, f)
    # The factorization residual leaks into unitarity at the same order;
    # snap to the nearest unitary before building the measurement.
    u = polar_unitary(u)
    realization = ensemble_from_gram(gram)
    povm = povm_from_unitary(gram, u)
    cert = certify_povm(realization, povm, tol_stat=tol_stat, tol_glb=tol_glb)
    f_eigs = np.linalg.eigvalsh(hermitize(f))
    return Certificate(
        stationarity_residual=cert.stationarity_residual,
        global_min_eig=cert.global_min_eig,
        f_min_eig=float(f_eigs[0]),
        f_positive=bool(f_eigs[0] > 0.0),
        p_success=float(np.sum(a_sq)),
        tr_z=cert.tr_z,
        tol_stat=tol_stat,
        tol_glb=tol_glb,
    )
