"""Independent ground-truth solvers used to cross-check the main pipeline.

Two routes that share no code with the continuation solver: the closed-form
two-state optimum, and direct maximization of the success probability over
the unitary group by Riemannian gradient ascent (restricted to small
dimensions, where exhaustive restarts are cheap).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NoConvergence
from .gram import GramMatrix
from .linalg import polar_unitary
from .measurement import Povm, povm_from_unitary

_GTOL = 1e-7


@dataclass(frozen=True)
class SearchStats:
    iterations: int
    grad_norm: float


@dataclass(frozen=True)
class OracleResult:
    """Ground-truth optimum: value, measurement and how it was obtained."""

    p_success: float
    povm: Povm
    method: str
    convergence: SearchStats | None = None


def helstrom(p1: float, p2: float, overlap: complex) -> OracleResult:
    """Closed-form two-state optimum.

    For priors (p1, p2) and state overlap c the optimal success probability
    is (1 + sqrt(1 - 4 p1 p2 |c|^2))/2, attained by measuring in the
    eigenbasis of p1 rho_1 - p2 rho_2.  The measurement is returned in an
    explicit two-dimensional realization of the pair.
    """
    if abs(p1 + p2 - 1.0) > 1e-12 or p1 <= 0.0 or p2 <= 0.0:
        raise ValueError("priors must be positive and sum to 1")
    c = complex(overlap)
    if abs(c) >= 1.0:
        raise ValueError("|overlap| must be < 1 for distinct states")
    p_success = 0.5 * (1.0 + np.sqrt(1.0 - 4.0 * p1 * p2 * abs(c) ** 2))

    psi1 = np.array([1.0, 0.0], dtype=complex)
    psi2 = np.array([c, np.sqrt(1.0 - abs(c) ** 2)], dtype=complex)
    gap = p1 * np.outer(psi1, psi1.conj()) - p2 * np.outer(psi2, psi2.conj())
    eigvals, eigvecs = np.linalg.eigh(gap)
    # outcome 1 <-> positive eigenvector, outcome 2 <-> negative one
    basis = eigvecs[:, ::-1] if eigvals[1] > 0 else eigvecs
    povm = Povm(basis, frame="ambient")
    return OracleResult(p_success=float(p_success), povm=povm, method="closed_form")


def helstrom_angle_scan(
    p1: float, p2: float, overlap: complex, n_points: int = 1_000_000
) -> float:
    """Brute-force two-state optimum by scanning rank-one projective
    measurements in the real span of the pair.

    The overlap phase can be absorbed into one state, and for a real pair
    the optimal basis is real, so a dense scan of the rotation angle is an
    exhaustive and entirely independent check of the closed form.
    """
    c = abs(complex(overlap))
    s = np.sqrt(1.0 - c * c)
    theta = np.linspace(0.0, 2.0 * np.pi, n_points, endpoint=False)
    # basis v1 = (cos, sin), v2 = (-sin, cos); states (1,0) and (c, s)
    ps = p1 * np.cos(theta) ** 2 + p2 * (s * np.cos(theta) - c * np.sin(theta)) ** 2
    return float(np.max(ps))


def search_optimum(
    gram: GramMatrix,
    seed: int,
    restarts: int = 20,
    max_iter: int = 500,
    gtol: float = _GTOL,
) -> OracleResult:
    """Maximize sum_i |(G^{1/2} U)_{ii}|^2 over unitary U directly.

    Riemannian gradient ascent: the euclidean gradient R^dag diag(w) (with
    R = G^{1/2}, w the diagonal of RU) is projected onto the tangent space
    of the unitary group and the iterate is retracted by polar
    decomposition; the step grows after success and backtracks otherwise.
    Random restarts guard against the non-global stationary points.
    Deterministic in ``seed``; restricted to m <= 4 where restarts are
    cheap.  Raises NoConvergence if the best run keeps a gradient norm
    above ``gtol``.
    """
    m = gram.m
    if m > 4:
        raise ValueError("direct search is cost-guarded to m <= 4")
    r = gram.sqrt()
    rng = np.random.default_rng(seed)

    def value(u: np.ndarray) -> float:
        return float(np.sum(np.abs(np.diagonal(r @ u)) ** 2))

    best_val = -np.inf
    best_u: np.ndarray | None = None
    best_stats = SearchStats(iterations=0, grad_norm=np.inf)
    for _ in range(restarts):
        z = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
        u = polar_unitary(z)
        step = 1.0
        grad_norm = np.inf
        iters = 0
        prev_u = prev_grad = None
        for iters in range(1, max_iter + 1):
            w = np.diagonal(r @ u)
            egrad = r.conj().T @ np.diag(w)
            lam = u.conj().T @ egrad
            rgrad = u @ (0.5 * (lam - lam.conj().T))
            grad_norm = float(np.linalg.norm(rgrad))
            if grad_norm < gtol:
                break
            # spectral (Barzilai-Borwein) step adapts to weakly curved
            # directions where any fixed step crawls
            if prev_grad is not None:
                s_vec = (u - prev_u).ravel()
                y_vec = (rgrad - prev_grad).ravel()
                denom = np.vdot(s_vec, y_vec).real
                if abs(denom) > 1e-300:
                    step = abs(np.vdot(s_vec, s_vec).real / denom)
                step = float(min(max(step, 1e-3), 1e8))
            current = value(u)
            trial_step = step
            for _ in range(60):
                candidate = polar_unitary(u + trial_step * rgrad)
                if value(candidate) > current + 1e-15:
                    break
                trial_step *= 0.5
            else:
                break
            prev_u, prev_grad = u, rgrad
            u = candidate
        val = value(u)
        if val > best_val:
            best_val = val
            best_u = u
            best_stats = SearchStats(iterations=iters, grad_norm=grad_norm)

    if best_stats.grad_norm > gtol:
        raise NoConvergence(
            f"best ascent stalled with gradient norm {best_stats.grad_norm:.3e}"
        )
    povm = povm_from_unitary(gram, best_u)
    return OracleResult(
        p_success=best_val, povm=povm, method="search", convergence=best_stats
    )
