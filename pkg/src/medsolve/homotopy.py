"""Continuation solver: drag a known optimum along a line of Gram matrices.

The optimal measurement at G is encoded by the positive hermitian factor
F = D G^{1/2} U (D = diag(a_i), F_ii = a_i^2) satisfying

    F^2 - D G D = 0.

Along the linear trajectory G(t) = (1-t) G_start + t G_end this constraint
defines the implicit variables (a_i, f_ij) as analytic functions of t, and
total differentiation gives a square linear system for their derivatives:

    F' F + F F' - D' G D - D G D' = D G' D,

with F'_ii = 2 a_i a_i', F'_ij = f_ij', D' = diag(a_i').  Starting from the
equiprobable orthogonal ensemble (G = I/m, a_i = 1/sqrt(m), f = 0), where
the solution is trivial, a classical fixed-step RK4 integration of this
system carries the optimum to any linearly independent target.  The
Hilbert-Schmidt norm of F^2 - DGD measures the accumulated error at every
step without reference to any other solver.

Hermiticity is preserved structurally: the state stores a_i and the strict
upper triangle of F, so a_i stays real and f_ji = conj(f_ij) exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .certify import TOL_GLB, TOL_STAT, Certificate, certify_gram
from .exceptions import (
    NearLinearDependence,
    NotCertified,
    PositivityLost,
    ResidualTooLarge,
    SingularJacobian,
)
from .gram import EPS_LI, GramMatrix
from .linalg import hs_norm, polar_unitary, read_only
from .measurement import Povm, povm_from_unitary

#: condition-number ceiling for the tangent linear system; beyond this the
#: implicit function theorem no longer vouches for the step (bifurcation or
#: near-dependence) and the run aborts
COND_MAX = 1e12

#: floor on the diagonal scales a_i; one of them tending to zero signals the
#: boundary of the admissible Gram region
EPS_A = 1e-6


def _triu(m: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(m, 1)


@dataclass(frozen=True)
class SolverState:
    """Point on the solution manifold: scales a_i and strict upper triangle
    of the hermitian factor F (row-major, f_ji = conj(f_ij) implied)."""

    t: float
    a: np.ndarray
    f: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        f = np.array(self.f, dtype=complex)
        m = a.shape[0]
        if f.shape != (m * (m - 1) // 2,):
            raise ValueError("f must hold the strict upper triangle of F")
        if not np.all(np.isfinite(a)) or np.any(a <= 0.0):
            raise ValueError("all scales a_i must be positive and finite")
        object.__setattr__(self, "a", read_only(a))
        object.__setattr__(self, "f", read_only(f))

    @property
    def m(self) -> int:
        return self.a.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        """The hermitian factor F with F_ii = a_i^2."""
        m = self.m
        out = np.zeros((m, m), dtype=complex)
        out[np.arange(m), np.arange(m)] = self.a**2
        iu, ju = _triu(m)
        out[iu, ju] = self.f
        out[ju, iu] = self.f.conj()
        return out

    @property
    def p_success(self) -> float:
        """Tr(F) = sum a_i^2, the running optimal success probability."""
        return float(np.sum(self.a**2))

    def residual(self, gram: GramMatrix | np.ndarray) -> float:
        """HS norm of F^2 - D G D at this state."""
        g = gram.entries if isinstance(gram, GramMatrix) else np.asarray(gram)
        f = self.matrix
        d = np.diag(self.a)
        return hs_norm(f @ f - d @ g @ d)


@dataclass(frozen=True)
class Trajectory:
    """Linear path G(t) = (1-t) g_start + t g_end, t in [0, 1].

    Convexity of the trace-one positive definite set keeps every
    intermediate matrix admissible when the endpoints are.
    """

    g_start: GramMatrix
    g_end: GramMatrix

    def __post_init__(self):
        if self.g_start.m != self.g_end.m:
            raise ValueError("trajectory endpoints must have equal dimension")

    @property
    def m(self) -> int:
        return self.g_start.m

    def __call__(self, t: float) -> np.ndarray:
        return (1.0 - t) * self.g_start.entries + t * self.g_end.entries

    def tangent(self) -> np.ndarray:
        """dG/dt, constant along a linear path."""
        return self.g_end.entries - self.g_start.entries


@dataclass(frozen=True)
class RunReport:
    """Everything a continuation run produced.

    ``trace`` has one row per iteration with columns
    (iteration, t, hs_residual, min_eig_F, p_success_partial).
    """

    steps: int
    h: float
    polish: bool
    polish_every: int
    trace: np.ndarray = field(repr=False)
    final_state: SolverState
    final_povm: Povm
    certificate: Certificate

    @property
    def residual_trace(self) -> list[tuple[int, float]]:
        return [(int(row[0]), float(row[2])) for row in self.trace]


def initial_state(m: int) -> SolverState:
    """Exact solution at the equiprobable orthogonal ensemble G = I/m:
    a_i = 1/sqrt(m), F = I/m, residual identically zero."""
    if m < 2:
        raise ValueError("need at least two states")
    return SolverState(
        t=0.0, a=np.full(m, 1.0 / np.sqrt(m)), f=np.zeros(m * (m - 1) // 2, dtype=complex)
    )


def _tangent_system(
    a: np.ndarray,
    f: np.ndarray,
    g: np.ndarray,
    rhs_mat: np.ndarray,
    iu: np.ndarray,
    ju: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Assemble the m^2 x m^2 real system A x = b for the unknowns
    x = (a_i', Re f_ij', Im f_ij') from the hermitian matrix equation

        F' F + F F' - D' G D - D G D' = rhs_mat.

    Both sides are hermitian, so the independent real components are the
    diagonal plus real and imaginary parts of the strict upper triangle.
    """
    m = a.shape[0]
    ar = np.arange(m)
    fmat = np.zeros((m, m), dtype=complex)
    fmat[ar, ar] = a**2
    fmat[iu, ju] = f
    fmat[ju, iu] = f.conj()
    d = np.diag(a).astype(complex)
    gd = g @ d
    dg = d @ g
    eye = np.eye(m)

    # image of the unit direction E_pq in F: T[p, q] = E_pq F + F E_pq
    t_full = np.einsum("rp,qs->pqrs", eye, fmat) + np.einsum("rp,qs->pqrs", fmat, eye)
    t_diag = t_full[ar, ar]
    # image of the unit direction E_kk in D: E_kk G D + D G E_kk
    p1 = np.zeros((m, m, m), dtype=complex)
    p1[ar, ar, :] = gd
    p2 = np.zeros((m, m, m), dtype=complex)
    p2[ar, :, ar] = dg.T
    cols_a = 2.0 * a[:, None, None] * t_diag - (p1 + p2)
    t_ij = t_full[iu, ju]
    t_ji = t_full[ju, iu]
    cols_re = t_ij + t_ji
    cols_im = 1j * (t_ij - t_ji)

    images = np.concatenate([cols_a, cols_re, cols_im], axis=0)
    a_mat = np.concatenate(
        [images[:, ar, ar].real, images[:, iu, ju].real, images[:, iu, ju].imag], axis=1
    ).T
    b = np.concatenate([rhs_mat[ar, ar].real, rhs_mat[iu, ju].real, rhs_mat[iu, ju].imag])
    return a_mat, b


def _solve_tangent(a_mat: np.ndarray, b: np.ndarray, t: float) -> np.ndarray:
    """LU solve with a LAPACK condition estimate; abort above COND_MAX."""
    lu, piv = scipy.linalg.lu_factor(a_mat)
    gecon = scipy.linalg.get_lapack_funcs("gecon", (a_mat,))
    rcond, _info = gecon(lu, np.linalg.norm(a_mat, 1))
    if rcond < 1.0 / COND_MAX:
        cond = np.inf if rcond == 0.0 else 1.0 / rcond
        raise SingularJacobian(
            f"tangent system condition estimate {cond:.3e} at t={t:.6f} "
            "(bifurcation or near-dependence)"
        )
    return scipy.linalg.lu_solve((lu, piv), b)


def _rate(
    a: np.ndarray,
    f: np.ndarray,
    g: np.ndarray,
    gdot: np.ndarray,
    t: float,
    iu: np.ndarray,
    ju: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    m = a.shape[0]
    d = np.diag(a)
    a_mat, b = _tangent_system(a, f, g, d @ gdot @ d, iu, ju)
    x = _solve_tangent(a_mat, b, t)
    n_off = m * (m - 1) // 2
    return x[:m], x[m : m + n_off] + 1j * x[m + n_off :]


def derivative(
    state: SolverState, trajectory: Trajectory, t: float | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Time derivative (da/dt, df/dt) of the implicit variables at ``state``.

    Solves the tangent linear system at G(t); raises SingularJacobian if its
    condition estimate exceeds COND_MAX.  The returned direction preserves
    hermiticity exactly (a' real, upper triangle only).
    """
    tt = state.t if t is None else t
    return _rate(state.a, state.f, trajectory(tt), trajectory.tangent(), tt, *_triu(state.m))


def _newton_correction(
    a: np.ndarray, f: np.ndarray, g: np.ndarray, t: float, iu: np.ndarray, ju: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """One Newton step back onto the constraint F^2 - DGD = 0 at fixed t."""
    m = a.shape[0]
    ar = np.arange(m)
    fmat = np.zeros((m, m), dtype=complex)
    fmat[ar, ar] = a**2
    fmat[iu, ju] = f
    fmat[ju, iu] = f.conj()
    d = np.diag(a)
    y = fmat @ fmat - d @ g @ d
    a_mat, b = _tangent_system(a, f, g, -y, iu, ju)
    x = _solve_tangent(a_mat, b, t)
    n_off = m * (m - 1) // 2
    return a + x[:m], f + (x[m : m + n_off] + 1j * x[m + n_off :])


def rk4_drag(
    trajectory: Trajectory,
    steps: int = 1000,
    h: float = 1e-3,
    polish: bool = False,
    polish_every: int = 10,
    initial: SolverState | None = None,
    tol_stat: float = TOL_STAT,
    tol_glb: float = TOL_GLB,
) -> RunReport:
    """Integrate the implicit system from t=0 to t=1 with fixed-step RK4.

    ``steps * h`` must equal 1 so the run covers the whole trajectory.  The
    four stage derivatives use the exact trajectory values G(t), G(t+h/2),
    G(t+h).  After every step the run records the HS residual of
    F^2 - D G(t) D, the minimum eigenvalue of F and the partial success
    probability.  ``polish`` applies one Newton re-projection onto the
    constraint every ``polish_every`` steps (off by default, leaving the raw
    integrator behavior observable).

    The final measurement is assembled via U = G(1)^{-1/2} D^{-1} F and
    certified; the certificate is attached to the report.  A run that
    drifted too far off the constraint to certify (targets close to the
    near-dependence floor) raises ResidualTooLarge instead of returning.
    """
    if steps < 1:
        raise ValueError("need at least one step")
    if abs(steps * h - 1.0) > 1e-9:
        raise ValueError(f"steps*h must equal 1, got {steps} * {h} = {steps * h}")
    m = trajectory.m
    iu, ju = _triu(m)
    if initial is None:
        initial = initial_state(m)
    if initial.m != m:
        raise ValueError("initial state dimension does not match trajectory")
    a = initial.a.copy()
    f = initial.f.copy()
    gdot = trajectory.tangent()

    trace = np.empty((steps, 5))
    t = 0.0
    for it in range(1, steps + 1):
        k1 = _rate(a, f, trajectory(t), gdot, t, iu, ju)
        k2 = _rate(a + 0.5 * h * k1[0], f + 0.5 * h * k1[1], trajectory(t + 0.5 * h), gdot, t, iu, ju)
        k3 = _rate(a + 0.5 * h * k2[0], f + 0.5 * h * k2[1], trajectory(t + 0.5 * h), gdot, t, iu, ju)
        k4 = _rate(a + h * k3[0], f + h * k3[1], trajectory(t + h), gdot, t, iu, ju)
        a = a + (h / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        f = f + (h / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        t = it * h

        g_now = trajectory(t)
        if polish and it % polish_every == 0:
            a, f = _newton_correction(a, f, g_now, t, iu, ju)

        if float(np.linalg.eigvalsh(g_now)[0]) <= EPS_LI:
            raise NearLinearDependence(
                f"trajectory left the admissible region at t={t:.6f}"
            )
        if np.min(a) <= EPS_A:
            raise NearLinearDependence(
                f"scale a_{int(np.argmin(a))} fell to {np.min(a):.3e} at t={t:.6f}; "
                "target is too close to linear dependence"
            )
        fmat = np.zeros((m, m), dtype=complex)
        ar = np.arange(m)
        fmat[ar, ar] = a**2
        fmat[iu, ju] = f
        fmat[ju, iu] = f.conj()
        f_min = float(np.linalg.eigvalsh(fmat)[0])
        if f_min < 0.0:
            raise PositivityLost(
                f"factor F lost positive definiteness at t={t:.6f} (min eig {f_min:.3e})"
            )
        d = np.diag(a)
        resid = hs_norm(fmat @ fmat - d @ g_now @ d)
        trace[it - 1] = (it, t, resid, f_min, float(np.sum(a**2)))

    final = SolverState(t=1.0, a=a, f=f)
    certificate = certify_gram(trajectory.g_end, final.matrix, tol_stat=tol_stat, tol_glb=tol_glb)
    u = trajectory.g_end.inv_sqrt() @ np.linalg.solve(np.diag(a), final.matrix)
    # residual drift leaks into unitarity amplified by the conditioning of
    # G and D; snap to the nearest unitary, exactly as certification does
    final_povm = povm_from_unitary(trajectory.g_end, polar_unitary(u))
    return RunReport(
        steps=steps,
        h=h,
        polish=polish,
        polish_every=polish_every,
        trace=read_only(trace),
        final_state=final,
        final_povm=final_povm,
        certificate=certificate,
    )


def drag_between(
    g_from: GramMatrix,
    state_from: SolverState,
    g_to: GramMatrix,
    steps: int = 1000,
    h: float = 1e-3,
    polish: bool = False,
    polish_every: int = 10,
    tol_stat: float = TOL_STAT,
    tol_glb: float = TOL_GLB,
) -> RunReport:
    """Continue an already-solved state at ``g_from`` to the target ``g_to``.

    The starting state must actually solve its Gram matrix (factorization
    residual below the certification gate), otherwise NotCertified is
    raised.  Segments may be chained; by uniqueness of the optimum the
    result is independent of the path taken through admissible matrices.
    """
    try:
        certify_gram(g_from, state_from.matrix, tol_stat=tol_stat, tol_glb=tol_glb)
    except (ResidualTooLarge, ValueError) as exc:
        raise NotCertified(f"starting state is not a solution at g_from: {exc}") from exc
    start = SolverState(t=0.0, a=state_from.a, f=state_from.f)
    return rk4_drag(
        Trajectory(g_from, g_to),
        steps=steps,
        h=h,
        polish=polish,
        polish_every=polish_every,
        initial=start,
        tol_stat=tol_stat,
        tol_glb=tol_glb,
    )
