"""Searching for a product vector orthogonal to a whole product basis.

A product vector is orthogonal to a product state exactly when it is
orthogonal in at least one factor.  So an extension exists iff the states
can be shared out among the parties, each party taking a set of local
vectors that does not span its whole space; the witness then takes, at
every party, a vector orthogonal to that party's share.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .basis import ProductBasis, ProductState, product_inner, product_state, validate
from .linalg import orthogonal_complement, span_basis

DEFAULT_BUDGET = 2 ** 20


class Status(enum.Enum):
    EXTENDIBLE = "extendible"
    UNEXTENDIBLE = "unextendible"
    BUDGET_EXCEEDED = "budget_exceeded"


@dataclass(frozen=True)
class ExtensionResult:
    status: Status
    assignments_tried: int
    witness: ProductState | None = None
    assignment: tuple[int, ...] | None = None


class _BudgetExceeded(Exception):
    pass


def witness_is_valid(basis: ProductBasis, witness: ProductState, tol: float | None = None) -> bool:
    tol = basis.tolerance if tol is None else tol
    w = witness.normalized(tol)
    return all(abs(product_inner(w, s)) < tol for s in basis.states)


def find_extension(basis: ProductBasis, budget: int = DEFAULT_BUDGET,
                   tol: float | None = None) -> ExtensionResult:
    """Depth-first search over state-to-party assignments.

    ``assignments_tried`` counts the leaves of the explored search tree:
    complete assignments that were checked plus partial assignments cut off
    because a party's share reached full rank.  Leaves are disjoint sets of
    full assignments, so the count never exceeds ``parties ** states``.
    """
    tol = basis.tolerance if tol is None else tol
    report = validate(basis, tol)
    if report.complete:
        return ExtensionResult(Status.UNEXTENDIBLE, 0)

    m, n = basis.n_parties, len(basis)
    shares: list[list] = [[] for _ in range(m)]
    choice = [0] * n
    tried = 0

    def leaf():
        nonlocal tried
        tried += 1
        if tried > budget:
            raise _BudgetExceeded

    def dfs(k: int):
        if k == n:
            leaf()
            return True
        state = basis.states[k]
        for p in range(m):
            shares[p].append(state.factors[p])
            r = span_basis(shares[p], tol).shape[0]
            if r < basis.dims[p]:
                choice[k] = p
                if dfs(k + 1):
                    return True
            else:
                leaf()
            shares[p].pop()
        return False

    try:
        found = dfs(0)
    except _BudgetExceeded:
        return ExtensionResult(Status.BUDGET_EXCEEDED, tried - 1)
    if not found:
        return ExtensionResult(Status.UNEXTENDIBLE, tried)

    factors = [orthogonal_complement(shares[p], basis.dims[p], tol)[0] for p in range(m)]
    witness = product_state(*factors, name="witness", tol=tol)
    if not witness_is_valid(basis, witness, tol):
        raise AssertionError("extension witness failed re-verification")
    return ExtensionResult(Status.EXTENDIBLE, tried, witness, tuple(choice))


@dataclass(frozen=True)
class Classification:
    orthogonal: bool
    complete: bool
    extendible: bool | None
    proper_upb: bool | None
    extension: ExtensionResult | None = None


def classify(basis: ProductBasis, budget: int = DEFAULT_BUDGET,
             tol: float | None = None) -> Classification:
    report = validate(basis, tol)
    if not report.orthogonal:
        return Classification(False, False, None, False)
    result = find_extension(basis, budget, tol)
    if result.status is Status.BUDGET_EXCEEDED:
        return Classification(True, report.complete, None, None, result)
    extendible = result.status is Status.EXTENDIBLE
    return Classification(True, report.complete, extendible,
                          not report.complete and not extendible, result)
