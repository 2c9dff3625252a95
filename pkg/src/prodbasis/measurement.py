"""Local measurement operators acting on product bases.

A measurement element is a positive operator ``E`` on one party; outcome
probabilities come from ``E^dagger E`` and the post-measurement state of
``psi_i`` is ``(E (x) I) psi_i``.  General local operation elements reduce
to this form through the polar decomposition, see :mod:`prodbasis.linalg`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .basis import BasisFormatError, ProductBasis, ProductState, product_inner, require_orthogonal
from .linalg import DEFAULT_TOL, DimensionError, eig_hermitian, is_hermitian, span_basis


class NotPositiveError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LocalOperator:
    party: int
    matrix: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"operator must be square, got shape {m.shape}")
        if not is_hermitian(m, self.tol):
            raise NotPositiveError("operator is not Hermitian")
        values, _ = eig_hermitian(m, self.tol)
        if values[0] < -self.tol:
            raise NotPositiveError(f"operator has eigenvalue {values[0]:.3g} < 0")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "eigenvalues", values)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, party: int, dim: int) -> "LocalOperator":
        return cls(party, np.eye(dim))


def _check_fits(op: LocalOperator, basis: ProductBasis):
    if not 0 <= op.party < basis.n_parties:
        raise IndexError(f"party {op.party} out of range")
    if op.dim != basis.dims[op.party]:
        raise DimensionError(
            f"operator is {op.dim}x{op.dim}, party {op.party} has dimension "
            f"{basis.dims[op.party]}")


def apply_local(op: LocalOperator, basis: ProductBasis,
                tol: float | None = None) -> list[tuple[ProductState, bool]]:
    """``(E (x) I) psi`` for each state, with a survival flag."""
    _check_fits(op, basis)
    tol = basis.tolerance if tol is None else tol
    out = []
    for s in basis.states:
        factors = list(s.factors)
        factors[op.party] = op.matrix @ factors[op.party]
        norm = np.linalg.norm(factors[op.party]) / np.linalg.norm(s.factors[op.party])
        out.append((ProductState(tuple(factors), s.name), bool(norm >= tol)))
    return out


@dataclass(frozen=True)
class Proportional:
    scale: float


@dataclass(frozen=True)
class Eliminates:
    killed: tuple[int, ...]
    rest_proportional: bool


@dataclass(frozen=True)
class PreservesOrthogonality:
    """Nothing annihilated, not proportional to I, yet all states stay orthogonal.

    Impossible on an unextendible set; routine on reducible ones.
    """


@dataclass(frozen=True)
class CreatesOverlap:
    delta: float
    pair: tuple[int, int]


Action = Union[Proportional, Eliminates, PreservesOrthogonality, CreatesOverlap]


def proportionality(matrix: np.ndarray, vectors, tol: float) -> tuple[bool, float]:
    """Is ``matrix`` a multiple of the identity on span(vectors)?

    Returns the verdict and the best-fit multiple.  The test is
    ``max |M q - lambda q| <= tol * ||M||`` over an orthonormal basis q of
    the span, so it is invariant under rescaling M.
    """
    q = span_basis(vectors, tol)
    if q.shape[0] == 0:
        return True, 0.0
    mq = q @ matrix.T                     # rows are M q_k
    lam = float(np.real(np.sum(q.conj() * mq)) / q.shape[0])
    values, _ = eig_hermitian(matrix, tol)
    scale = float(np.max(np.abs(values)))
    err = float(np.max(np.abs(mq - lam * q)))
    return err <= tol * max(scale, tol), lam


def _normalized_overlaps(states: Sequence[ProductState], idx: Sequence[int]):
    best, pair = 0.0, None
    norms = {i: states[i].norm() for i in idx}
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            i, j = idx[a], idx[b]
            ov = abs(product_inner(states[i], states[j])) / (norms[i] * norms[j])
            if pair is None or ov > best:
                best, pair = ov, (i, j)
    return best, pair


def classify_action(op: LocalOperator, basis: ProductBasis, tol: float | None = None) -> Action:
    """Sort a local element into the four possible effects on the basis."""
    _check_fits(op, basis)
    require_orthogonal(basis)
    tol = basis.tolerance if tol is None else tol
    results = apply_local(op, basis, tol)
    killed = tuple(i for i, (_, alive) in enumerate(results) if not alive)
    alive = [i for i, (_, ok) in enumerate(results) if ok]
    states = [s for s, _ in results]

    delta, pair = _normalized_overlaps(states, alive)
    if pair is not None and delta >= tol:
        return CreatesOverlap(float(delta), pair)
    locals_alive = basis.locals(op.party, alive)
    prop, lam = proportionality(op.matrix, locals_alive, tol)
    if killed:
        return Eliminates(killed, prop)
    if prop:
        return Proportional(lam)
    return PreservesOrthogonality()


def check_povm(ops: Sequence[LocalOperator], tol: float = DEFAULT_TOL) -> bool:
    """True when the elements sum (as E^dagger E) to the identity."""
    if not ops:
        raise ValueError("empty operator list")
    parties = {o.party for o in ops}
    if len(parties) != 1:
        raise ValueError(f"operators act on different parties: {sorted(parties)}")
    dims = {o.dim for o in ops}
    if len(dims) != 1:
        raise DimensionError("operators have different dimensions")
    total = sum(o.matrix.conj().T @ o.matrix for o in ops)
    return bool(np.max(np.abs(total - np.eye(dims.pop()))) <= tol)


def posterior(op: LocalOperator, basis: ProductBasis, tol: float | None = None) -> list[float]:
    """Posterior over basis states given outcome ``op``, from a uniform prior."""
    _check_fits(op, basis)
    tol = basis.tolerance if tol is None else tol
    weights = []
    for s in basis.states:
        f = s.factors[op.party]
        w = np.linalg.norm(op.matrix @ f) ** 2 / np.linalg.norm(f) ** 2
        weights.append(float(w))
    total = sum(weights)
    if max(weights) < tol:
        raise ValueError("measurement outcome annihilates every state")
    return [w / total for w in weights]


def epsilon(posteriors: Sequence[float]) -> float:
    """Largest gain of a posterior over the uniform prior."""
    if len(posteriors) == 0:
        raise ValueError("no posteriors")
    return float(max(posteriors) - 1.0 / len(posteriors))


# -- operator file format -----------------------------------------------------

def matrix_from_list(raw) -> np.ndarray:
    if not isinstance(raw, list) or not raw:
        raise BasisFormatError("'matrix' must be a non-empty list of rows")
    rows = []
    for r in raw:
        if not isinstance(r, list) or len(r) != len(raw):
            raise BasisFormatError("'matrix' must be square")
        row = []
        for e in r:
            if not isinstance(e, list) or len(e) != 2:
                raise BasisFormatError(f"matrix entry {e!r} is not an [re, im] pair")
            row.append(complex(float(e[0]), float(e[1])))
        rows.append(row)
    return np.array(rows, dtype=complex)


def matrix_to_list(m) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def operator_from_dict(doc, party: int | None = None) -> LocalOperator:
    if not isinstance(doc, dict) or "matrix" not in doc:
        raise BasisFormatError("operator must be an object with 'matrix'")
    p = doc.get("party", 0) if party is None else party
    if not isinstance(p, int) or isinstance(p, bool) or p < 0:
        raise BasisFormatError("'party' must be a non-negative integer")
    return LocalOperator(p, matrix_from_list(doc["matrix"]))


def operator_to_dict(op: LocalOperator) -> dict:
    return {"party": op.party, "matrix": matrix_to_list(op.matrix)}


def parse_operator(document: str, party: int | None = None) -> LocalOperator:
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise BasisFormatError(f"not valid JSON: {exc}") from None
    return operator_from_dict(doc, party)
