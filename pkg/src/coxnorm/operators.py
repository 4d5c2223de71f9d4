"""Finite compressions of convolution operators and certified bounds.

Compressing the convolution operator of a symbol f onto the span of the
point masses over a ball B_N gives the matrix M[z, x] = f(z x^-1).  Its
largest singular value is a certified lower bound for the operator norm
(it only climbs as N grows), while the l1 norm of the symbol caps the
operator norm from above; the pair brackets the norm in an interval.

The numeric routes are deliberately separated.  The compression norm runs
on a hand-rolled power iteration with a deterministic start vector, and
the definiteness certificates run on a hand-rolled cyclic Jacobi
eigensolver; the only LAPACK-backed call in this module is the oracle for
finite groups, which builds the full regular representation and takes its
exact norm.  That keeps every bound checkable against an independent
route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coxeter import DEFAULT_BALL_CAP, Ball, CoxeterGroup, GroupElement
from .errors import BallCapExceeded, ConvergenceError, GroupNotFiniteError, InvariantViolation
from .functions import GroupFunction, exp_length

PSD_REL_TOL = 1e-8           # relative slack for definiteness verdicts
POWER_REL_TOL = 1e-12        # residual tolerance of the power iteration
POWER_MAX_ITER = 10_000
SCHUR_SLACK = 1e-9           # additive slack for contraction verdicts


@dataclass(frozen=True)
class CompressionMatrix:
    """Matrix of the compressed operator in the point-mass basis of B_N."""

    radius: int
    basis: tuple[GroupElement, ...]
    matrix: np.ndarray

    @property
    def dimension(self) -> int:
        return len(self.basis)


def compression(f: GroupFunction, radius: int, cap: int = DEFAULT_BALL_CAP) -> CompressionMatrix:
    """Entries M[z, x] = f(z x^-1) over the ShortLex-ordered ball."""
    group = f.group
    ball = group.ball(radius, cap)
    index = {g: i for i, g in enumerate(ball.elements)}
    n = len(ball)
    m = np.zeros((n, n), dtype=complex)
    for g, c in f.items():
        for j, x in enumerate(ball.elements):
            z = group.multiply(g, x)
            i = index.get(z)
            if i is not None:
                m[i, j] = c
    return CompressionMatrix(radius, ball.elements, m)


def largest_singular_value(
    m: np.ndarray,
    rel_tol: float = POWER_REL_TOL,
    max_iter: int = POWER_MAX_ITER,
) -> tuple[float, int]:
    """Power iteration for the top singular value, with iteration count.

    Iterates on the Gram matrix of ``m`` from the deterministic start
    vector (all ones plus an index-weighted perturbation, normalized) and
    stops when the eigen-residual drops below ``rel_tol`` relative to the
    current Rayleigh quotient.  The returned value is a Rayleigh quotient
    of a positive semidefinite matrix, hence never overshoots the true
    singular value beyond roundoff.  Running out of iterations raises,
    carrying the last iterate.
    """
    m = np.asarray(m)
    n = m.shape[1] if m.ndim == 2 else 0
    if n == 0 or not m.any():
        return 0.0, 0
    gram = m.conj().T @ m
    v = 1.0 + np.arange(1, n + 1) / (2.0 * n)
    v = v.astype(complex)
    v /= np.linalg.norm(v)
    restarted = False
    lam = 0.0
    for iteration in range(1, max_iter + 1):
        w = gram @ v
        lam = float((v.conj() @ w).real)
        residual = float(np.linalg.norm(w - lam * v))
        if residual <= rel_tol * max(lam, 1e-300):
            return math.sqrt(max(lam, 0.0)), iteration
        norm_w = float(np.linalg.norm(w))
        if norm_w == 0.0:
            if restarted:
                return 0.0, iteration
            # start vector fell in the kernel; restart on the heaviest column
            restarted = True
            col = int(np.argmax(np.linalg.norm(m, axis=0)))
            v = np.zeros(n, dtype=complex)
            v[col] = 1.0
            continue
        v = w / norm_w
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} iterations; "
        f"last iterate {math.sqrt(max(lam, 0.0)):.17g}",
        last_value=math.sqrt(max(lam, 0.0)),
    )


def compressed_norm(cm: CompressionMatrix) -> float:
    """Largest singular value of the compression matrix."""
    value, _ = largest_singular_value(cm.matrix)
    return value


@dataclass(frozen=True)
class NormInterval:
    """Certified bracket on a convolution-operator norm.

    lower comes from the compressed norm and the l2 norm of the symbol,
    upper from its l1 norm.
    """

    lower: float
    upper: float
    radius: int
    iterations: int

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper):
            raise InvariantViolation(
                f"norm interval out of order: [{self.lower}, {self.upper}]"
            )


def norm_interval(f: GroupFunction, radius: int, cap: int = DEFAULT_BALL_CAP) -> NormInterval:
    """Bracket the operator norm of the symbol between the compressed
    lower bound (floored by the l2 norm) and the l1 upper bound."""
    upper = f.l1()
    value, iterations = largest_singular_value(compression(f, radius, cap).matrix)
    lower = max(f.l2(), value)
    if lower > upper + 1e-9 * max(1.0, upper):
        raise InvariantViolation(
            f"certified lower bound {lower} exceeds l1 upper bound {upper}"
        )
    return NormInterval(min(lower, upper), upper, radius, iterations)


def _enumerate_finite(group: CoxeterGroup, cap: int) -> Ball:
    """Ball enumeration until a sphere comes out empty; raises when the
    group keeps growing past the cap."""
    radius = 1
    while True:
        try:
            ball = group.ball(radius, cap)
        except BallCapExceeded as exc:
            raise GroupNotFiniteError(
                f"group not finite: balls still growing past cap {cap}"
            ) from exc
        if ball.sphere_sizes[-1] == 0:
            return ball
        radius += 1


def exact_norm_finite_group(f: GroupFunction, cap: int = DEFAULT_BALL_CAP) -> float:
    """Oracle norm for finite groups: the full regular representation.

    Enumerates balls until they stabilize, forms the full convolution
    matrix, and returns its exact operator norm (LAPACK singular values,
    accurate to about 1e-10 here).
    """
    group = f.group
    ball = _enumerate_finite(group, cap)
    index = {g: i for i, g in enumerate(ball.elements)}
    n = len(ball)
    m = np.zeros((n, n), dtype=complex)
    for g, c in f.items():
        for j, x in enumerate(ball.elements):
            z = group.multiply(g, x)
            m[index[z], j] = c
    return float(np.linalg.norm(m, 2))


def jacobi_eigenvalues(a: np.ndarray, rel_tol: float = 1e-13, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.

    Sweeps until the off-diagonal Frobenius mass falls below ``rel_tol``
    times the matrix Frobenius norm; returns the eigenvalues ascending.
    Error scales with the matrix norm, which is why definiteness verdicts
    use a relative threshold.
    """
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    if n == 0:
        return np.zeros(0)
    fro = float(np.linalg.norm(a))
    if fro == 0.0:
        return np.zeros(n)
    # summing the actual off-diagonal squares avoids the cancellation floor
    # of ||a||_F^2 - ||diag||_F^2
    off_mask = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum(a[off_mask] ** 2)))
        if off <= rel_tol * fro:
            return np.sort(np.diag(a).copy())
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 1.0 / (2.0 * theta)
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                akp = a[:, p].copy()
                akq = a[:, q].copy()
                a[:, p] = c * akp - s * akq
                a[:, q] = s * akp + c * akq
                apk = a[p, :].copy()
                aqk = a[q, :].copy()
                a[p, :] = c * apk - s * aqk
                a[q, :] = s * apk + c * aqk
                a[p, q] = a[q, p] = 0.0
    raise ConvergenceError(f"Jacobi eigensolve did not converge in {max_sweeps} sweeps")


def _length_matrix(group: CoxeterGroup, radius: int, cap: int) -> np.ndarray:
    """Pairwise word-metric distances l(g^-1 h) over the ball."""
    ball = group.ball(radius, cap)
    elements = ball.elements
    n = len(elements)
    lengths = np.zeros((n, n), dtype=float)
    for i, g in enumerate(elements):
        ginv = group.inverse(g)
        for j in range(i + 1, n):
            d = group.multiply(ginv, elements[j]).length
            lengths[i, j] = lengths[j, i] = d
    return lengths


def gram_psd(group: CoxeterGroup, t: float, radius: int, cap: int = DEFAULT_BALL_CAP) -> tuple[float, bool]:
    """Certify positive semidefiniteness of the kernel exp(-t * distance).

    Builds the Gram matrix G[g, h] = exp(-t l(g^-1 h)) over B_N and
    Jacobi-eigensolves it; the verdict allows -1e-8 times the largest
    entry as roundoff slack.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    lengths = _length_matrix(group, radius, cap)
    gram = np.exp(-t * lengths)
    eigs = jacobi_eigenvalues(gram)
    min_eig = float(eigs[0])
    gmax = float(np.max(np.abs(gram)))
    return min_eig, min_eig >= -PSD_REL_TOL * gmax


def _helmert_basis(n: int) -> np.ndarray:
    """Orthonormal basis of the mean-zero subspace, columns of an n x (n-1)
    matrix: column k has k leading entries 1 and then -k, normalized."""
    q = np.zeros((n, n - 1))
    for k in range(1, n):
        scale = 1.0 / math.sqrt(k * (k + 1.0))
        q[:k, k - 1] = scale
        q[k, k - 1] = -k * scale
    return q


def negdef_check(group: CoxeterGroup, radius: int, cap: int = DEFAULT_BALL_CAP) -> tuple[float, bool]:
    """Certify that word length is a negative definite kernel on B_N.

    Projects the distance matrix L[g, h] = l(g^-1 h) onto the mean-zero
    subspace and requires every eigenvalue there to be <= 1e-8 times the
    largest entry of L.  A one-point ball has nothing to project; that
    case reports -inf and passes.
    """
    lengths = _length_matrix(group, radius, cap)
    n = lengths.shape[0]
    if n == 1:
        return float("-inf"), True
    q = _helmert_basis(n)
    projected = q.T @ lengths @ q
    eigs = jacobi_eigenvalues(projected)
    max_eig = float(eigs[-1])
    lmax = float(np.max(np.abs(lengths)))
    return max_eig, max_eig <= PSD_REL_TOL * lmax


def schur_contraction_check(
    t: float,
    f: GroupFunction,
    radius: int,
    cap: int = DEFAULT_BALL_CAP,
) -> tuple[float, float, bool]:
    """Check that heat damping never raises a compressed norm.

    The compression of the damped symbol is the entrywise product of a
    positive semidefinite unit-diagonal kernel with the compression of f,
    so the inequality is exact at every finite level; the verdict allows
    1e-9 of additive roundoff.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    damped = f.pointwise(exp_length(t))
    lhs = compressed_norm(compression(damped, radius, cap))
    rhs = compressed_norm(compression(f, radius, cap))
    return lhs, rhs, lhs <= rhs + SCHUR_SLACK
