"""Small dense complex linear algebra.

Vectors are 1-D complex numpy arrays, operators are 2-D square complex
arrays.  Dimensions in this package are tiny (a party rarely exceeds 16
levels), so clarity wins over blocking or vectorised tricks.

The inner product is conjugate-linear in its *first* argument.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-9


class DimensionError(ValueError):
    """Raised when vector or matrix shapes do not agree."""


class NotHermitianError(ValueError):
    """Raised when an operator is not conjugate-symmetric within tolerance."""


def as_vector(entries) -> np.ndarray:
    v = np.asarray(entries, dtype=complex).reshape(-1)
    if v.size == 0:
        raise DimensionError("vector must have at least one entry")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def local_vector(entries, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Build a normalized local state vector, rejecting the zero vector."""
    v = as_vector(entries)
    norm = np.linalg.norm(v)
    if norm < tol:
        raise ValueError("local vector is zero")
    v = v / norm
    v.flags.writeable = False
    return v


def inner(u, v) -> complex:
    """<u|v>, conjugating the first argument."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise DimensionError(f"length mismatch: {u.shape} vs {v.shape}")
    return complex(np.vdot(u, v))


def _stack(vectors, d: int | None = None) -> np.ndarray:
    rows = [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
    if d is None:
        if not rows:
            raise DimensionError("cannot infer dimension of an empty list")
        d = rows[0].size
    for r in rows:
        if r.size != d:
            raise DimensionError(f"expected length {d}, got {r.size}")
    if not rows:
        return np.zeros((0, d), dtype=complex)
    return np.vstack(rows)


def _pivoted_orthonormalize(rows: np.ndarray, start: np.ndarray,
                            tol: float, limit: int) -> np.ndarray:
    """Greedy pivoted Gram-Schmidt of ``rows`` against the basis ``start``.

    At each step the candidate with the largest residual norm is accepted
    (ties go to the lowest index), until no residual exceeds ``tol`` or
    ``limit`` new vectors have been found.  Rows must be pre-normalized so
    that ``tol`` acts as a relative pivot threshold.
    """
    basis = [b for b in start]
    found = []
    residual = rows.copy()
    for b in basis:
        residual -= np.outer(residual @ b.conj(), b)
    while len(found) < limit and residual.shape[0]:
        norms = np.linalg.norm(residual, axis=1)
        k = int(np.argmax(norms))
        if norms[k] < tol:
            break
        q = residual[k].copy()
        # second pass keeps the new direction orthogonal to working precision
        for b in basis:
            q -= np.vdot(b, q) * b
        q /= np.linalg.norm(q)
        basis.append(q)
        found.append(q)
        residual -= np.outer(residual @ q.conj(), q)
        residual[k] = 0.0
    if not found:
        return np.zeros((0, rows.shape[1]), dtype=complex)
    return np.vstack(found)


def span_basis(vectors, tol: float = DEFAULT_TOL, d: int | None = None) -> np.ndarray:
    """Orthonormal basis (as rows) of the span of ``vectors``."""
    rows = _stack(vectors, d)
    if rows.shape[0] == 0:
        return rows
    norms = np.linalg.norm(rows, axis=1)
    keep = norms >= tol
    rows = rows[keep] / norms[keep, None]
    if rows.shape[0] == 0:
        return np.zeros((0, _stack(vectors, d).shape[1]), dtype=complex)
    empty = np.zeros((0, rows.shape[1]), dtype=complex)
    return _pivoted_orthonormalize(rows, empty, tol, rows.shape[1])


def rank(vectors, tol: float = DEFAULT_TOL) -> int:
    """Dimension of the span of ``vectors``.

    Each vector is scaled to unit norm first, so the answer does not depend
    on how the inputs are scaled; ``tol`` is then the pivot threshold.
    """
    return span_basis(vectors, tol).shape[0]


def orthogonal_complement(vectors, d: int, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Orthonormal basis of the orthocomplement of span(vectors) in C^d.

    Candidates are the standard basis vectors, taken in pivoted order, so the
    output is deterministic for a given input.
    """
    q = span_basis(vectors, tol, d)
    eye = np.eye(d, dtype=complex)
    comp = _pivoted_orthonormalize(eye, q, tol, d - q.shape[0])
    return [c for c in comp]


def is_hermitian(h, tol: float = DEFAULT_TOL) -> bool:
    h = np.asarray(h, dtype=complex)
    return h.ndim == 2 and h.shape[0] == h.shape[1] and \
        bool(np.max(np.abs(h - h.conj().T), initial=0.0) <= tol)


def _check_square(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def eig_hermitian(h, tol: float = DEFAULT_TOL, max_sweeps: int = 100):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(values, vectors)`` with eigenvalues ascending and the
    eigenvectors as the *columns* of ``vectors``, so that
    ``vectors @ diag(values) @ vectors.conj().T`` reproduces ``h``.
    """
    a = _check_square(h)
    if not is_hermitian(a, tol):
        raise NotHermitianError("matrix is not Hermitian within tolerance")
    n = a.shape[0]
    # symmetrize to remove the sub-tolerance skew part
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    scale = max(np.linalg.norm(a), 1e-300)
    offdiag = ~np.eye(n, dtype=bool)

    for _ in range(max_sweeps):
        if np.linalg.norm(a[offdiag]) <= 1e-15 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= 1e-300 * scale:
                    continue
                phase = apq / r
                app, aqq = a[p, p].real, a[q, q].real
                theta = (aqq - app) / (2.0 * r)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # J = D(phase) G(c, s) on the (p, q) plane
                j = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ j
                a[idx, :] = j.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ j

    values = np.real(np.diag(a))
    order = np.argsort(values, kind="stable")
    return values[order], v[:, order]


def is_positive(m, tol: float = DEFAULT_TOL) -> bool:
    m = _check_square(m)
    if not is_hermitian(m, tol):
        return False
    values, _ = eig_hermitian(m, tol)
    return bool(values[0] >= -tol) if values.size else True


@dataclass(frozen=True)
class PolarResult:
    unitary: np.ndarray
    positive: np.ndarray
    non_unique: bool


def _positive_sqrt_and_unitary(s: np.ndarray, tol: float):
    values, vecs = eig_hermitian(s.conj().T @ s, tol=max(tol, 1e-12 * np.abs(s).max(initial=1.0) ** 2))
    sing = np.sqrt(np.clip(values, 0.0, None))
    e = (vecs * sing) @ vecs.conj().T
    e = 0.5 * (e + e.conj().T)

    cutoff = tol * max(sing.max(initial=0.0), 1.0)
    live = sing > cutoff
    n = s.shape[0]
    left = np.zeros((n, n), dtype=complex)
    for k in np.flatnonzero(live):
        left[:, k] = s @ vecs[:, k] / sing[k]
    dead = np.flatnonzero(~live)
    if dead.size:
        fill = orthogonal_complement([left[:, k] for k in np.flatnonzero(live)], n, tol)
        for k, col in zip(dead, fill):
            left[:, k] = col
    u = left @ vecs.conj().T
    return u, e, bool(dead.size)


def polar_left(s, tol: float = DEFAULT_TOL) -> PolarResult:
    """Factor ``s = U @ E`` with U unitary and E = sqrt(S^dagger S) positive.

    For singular ``s`` the unitary is only fixed on the range; it is
    completed deterministically on the kernel and ``non_unique`` is set.
    """
    s = _check_square(s)
    u, e, flag = _positive_sqrt_and_unitary(s, tol)
    return PolarResult(u, e, flag)


def polar_right(s, tol: float = DEFAULT_TOL) -> PolarResult:
    """Factor ``s = E @ U`` with E = sqrt(S S^dagger) positive."""
    s = _check_square(s)
    u, e, flag = _positive_sqrt_and_unitary(s, tol)
    e_right = u @ e @ u.conj().T
    return PolarResult(u, 0.5 * (e_right + e_right.conj().T), flag)
