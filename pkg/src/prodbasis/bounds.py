"""Information bounds for nearly-orthogonality-preserving LOCC rounds.

Each round applies, at every party, an element close to a multiple of the
identity, ``lambda (I + d' A)`` with ``A`` Hermitian and ``d'`` small.  To
first order in ``d'`` the whole sequence behaves like the single operator

    O(N) = sum_rounds sum_parties  I (x) ... (x) A_round,party (x) ... (x) I

and the information gained about the state (the posterior advantage
``epsilon``) is tied to the overlap ``delta`` the rounds create by
``epsilon <= delta * M_N / c_N``.  The overall scale ``lambda`` cancels in
posteriors and normalized overlaps and is not modelled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .basis import ProductBasis, ProductState, product_inner, require_orthogonal
from .linalg import DEFAULT_TOL, DimensionError, NotHermitianError, is_hermitian


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary entropy needs 0 <= x <= 1, got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def max_overlap(states: Sequence[ProductState]) -> float:
    """Largest |<psi_i|psi_j>| over distinct pairs, on normalized states."""
    if len(states) < 2:
        raise ValueError("need at least two states")
    norms = [s.norm() for s in states]
    best = 0.0
    for i in range(len(states)):
        for j in range(i + 1, len(states)):
            best = max(best, abs(product_inner(states[i], states[j])) / (norms[i] * norms[j]))
    return float(best)


def deficit_bound(n: int, eps: float, delta: float) -> float:
    """Lower bound on H(W|m) - I(W; M_II|m) after a stage with overlap ``delta``.

    2 (1/n - (n-1) eps) h(1/2 - sqrt(1 - delta^2) / 2).  Becomes negative,
    hence vacuous, once eps exceeds 1/(n(n-1)).
    """
    if not (isinstance(n, (int, np.integer)) and n >= 2):
        raise ValueError(f"n must be an integer >= 2, got {n}")
    if not eps >= 0.0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    # same as 1/2 - sqrt(1 - delta^2)/2, without cancellation at small delta
    x = delta * delta / (2.0 * (1.0 + math.sqrt(1.0 - delta * delta)))
    return 2.0 * (1.0 / n - (n - 1) * eps) * binary_entropy(x)


def info_ceiling(n: int, outcome_probs: Sequence[float], deficits: Sequence[float],
                 tol: float = DEFAULT_TOL) -> float:
    """log2(n) - sum_m p(m) deficit_m: mutual information cap for the protocol."""
    if len(outcome_probs) != len(deficits):
        raise ValueError("outcome_probs and deficits differ in length")
    if n < 1:
        raise ValueError("n must be positive")
    if any(p < 0 for p in outcome_probs) or abs(sum(outcome_probs) - 1.0) > tol:
        raise ValueError("outcome probabilities must be nonnegative and sum to 1")
    if any(d < 0 for d in deficits):
        raise ValueError("deficits must be nonnegative")
    return math.log2(n) - float(sum(p * d for p, d in zip(outcome_probs, deficits)))


@dataclass(frozen=True, eq=False)
class RoundOperators:
    """Perturbations per round and party; ``None`` stands for the zero operator."""

    rounds: tuple[tuple[np.ndarray | None, ...], ...]
    delta_prime: float

    def __post_init__(self):
        if not self.delta_prime > 0:
            raise ValueError("delta_prime must be positive")
        rounds = []
        for r in self.rounds:
            row = []
            for a in r:
                if a is None:
                    row.append(None)
                    continue
                a = np.array(a, dtype=complex)
                if not is_hermitian(a):
                    raise NotHermitianError("round perturbation is not Hermitian")
                row.append(a)
            rounds.append(tuple(row))
        object.__setattr__(self, "rounds", tuple(rounds))

    def check(self, dims: Sequence[int]):
        for k, r in enumerate(self.rounds):
            if len(r) != len(dims):
                raise DimensionError(f"round {k} has {len(r)} operators for {len(dims)} parties")
            for p, a in enumerate(r):
                if a is not None and a.shape != (dims[p], dims[p]):
                    raise DimensionError(f"round {k}, party {p}: shape {a.shape}, "
                                         f"dimension is {dims[p]}")

    def summed(self, dims: Sequence[int]) -> list[np.ndarray]:
        """sum over rounds of the per-party perturbations."""
        tot = [np.zeros((d, d), dtype=complex) for d in dims]
        for r in self.rounds:
            for p, a in enumerate(r):
                if a is not None:
                    tot[p] += a
        return tot

    def local_products(self, dims: Sequence[int]) -> list[np.ndarray]:
        """Per-party E_N ... E_1 with E_i = I + d' A_i (later rounds on the left)."""
        out = [np.eye(d, dtype=complex) for d in dims]
        for r in self.rounds:
            for p, a in enumerate(r):
                if a is not None:
                    out[p] = (np.eye(dims[p]) + self.delta_prime * a) @ out[p]
        return out


def accumulated_elements(basis: ProductBasis, per_party: Sequence[np.ndarray]) -> np.ndarray:
    """Matrix of <psi_j| sum_p (I..A_p..I) |psi_k> over the basis states."""
    n, m = len(basis), basis.n_parties
    local_gram = []
    local_op = []
    for p in range(m):
        f = np.array(basis.locals(p))
        local_gram.append(f.conj() @ f.T)
        local_op.append(f.conj() @ per_party[p] @ f.T)
    out = np.zeros((n, n), dtype=complex)
    for p in range(m):
        term = local_op[p].copy()
        for q in range(m):
            if q != p:
                term *= local_gram[q]
        out += term
    return out


def _m_and_c(g: np.ndarray) -> tuple[float, float]:
    n = g.shape[0]
    a = np.real(np.diag(g))
    m_n = float(np.max(a.sum() / n ** 2 + a / n))
    off = np.abs(g - np.diag(np.diag(g)))
    return m_n, float(off.max(initial=0.0))


@dataclass(frozen=True)
class BoundReport:
    status: str                   # "ok" or "no_bound"
    delta: float
    epsilon_observed: float
    epsilon_bound: float | None
    epsilon_first_order: float
    M_N: float
    c_N: float
    deficit: float
    info_ceiling: float
    posteriors: tuple[float, ...]
    positive_gauge: bool          # every <psi_j|O(N)|psi_j> >= 0


def weak_round_bound(rounds: RoundOperators, basis: ProductBasis,
                     tol: float | None = None) -> BoundReport:
    """Compare the exact effect of weak rounds with the first-order bounds.

    ``M_N`` and ``c_N`` are computed after dividing O(N) by its largest
    matrix element on the basis, so their ratio does not depend on the
    perturbation scale.  ``epsilon_first_order`` is the overlap-free form
    d' * max_i(sum_j a_j / n^2 + a_i / n) with a_j = 2 <psi_j|O(N)|psi_j>,
    still available when the overlap bound is not.

    Both bounds assume the diagonal elements a_j are nonnegative.  Adding a
    multiple of I to a perturbation only rescales E_i, which lambda absorbs,
    so that gauge can always be reached; ``positive_gauge`` reports whether
    the given operators are in it.
    """
    require_orthogonal(basis)
    tol = basis.tolerance if tol is None else tol
    rounds.check(basis.dims)
    n = len(basis)
    states = [s.normalized(tol) for s in basis.states]
    basis = ProductBasis(basis.dims, tuple(states), basis.tolerance)

    g = accumulated_elements(basis, rounds.summed(basis.dims))
    raw_m, _ = _m_and_c(2.0 * g)
    gauge = bool(np.min(np.real(np.diag(g))) >= -tol * max(float(np.abs(g).max()), 1.0))
    eps_first = rounds.delta_prime * raw_m

    scale = float(np.abs(g).max(initial=0.0))
    if scale > 0.0:
        m_n, c_n = _m_and_c(g / scale)
    else:
        m_n, c_n = 0.0, 0.0

    ops = rounds.local_products(basis.dims)
    after = [ProductState(tuple(ops[p] @ s.factors[p] for p in range(basis.n_parties)), s.name)
             for s in states]
    weights = np.array([s.norm() ** 2 for s in after])
    post = weights / weights.sum()
    eps_obs = max(float(post.max() - 1.0 / n), 0.0)
    delta = min(max_overlap(after), 1.0) if n >= 2 else 0.0

    if c_n < tol:
        status, eps_bound = "no_bound", None
    else:
        status, eps_bound = "ok", delta * m_n / c_n

    # the bound is vacuous (negative) for large eps; no residual uncertainty is then guaranteed
    deficit = max(deficit_bound(n, eps_obs, delta), 0.0) if n >= 2 else 0.0
    return BoundReport(status, delta, eps_obs, eps_bound, eps_first, m_n, c_n, deficit,
                       info_ceiling(n, [1.0], [deficit]), tuple(float(p) for p in post), gauge)
