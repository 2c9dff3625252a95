"""Product states, product bases, validation and the basis file format.

A basis file is UTF-8 JSON::

    {
      "parties": [3, 3],
      "tolerance": 1e-9,
      "states": [
        {"name": "psi0", "factors": [[[1, 0], [0, 0], [0, 0]],
                                      [[1, 0], [-1, 0], [0, 0]]]},
        ...
      ]
    }

Each factor is a list of ``[re, im]`` pairs.  Factors are normalized on
load, so integer entries such as ``[1, -1]`` are fine.  Global phases are
kept as given.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

from .linalg import DEFAULT_TOL, DimensionError, as_vector, inner, local_vector


class BasisFormatError(ValueError):
    """Raised for malformed basis documents."""


class NotOrthogonalError(ValueError):
    """Raised when an operation needs an orthogonal set and did not get one."""


@dataclass(frozen=True)
class ProductState:
    """One vector per party.  Factors are not required to be normalized."""

    factors: tuple[np.ndarray, ...]
    name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(as_vector(f) for f in self.factors))

    @property
    def local_dims(self) -> tuple[int, ...]:
        return tuple(f.size for f in self.factors)

    def norm(self) -> float:
        return float(reduce(lambda acc, f: acc * np.linalg.norm(f), self.factors, 1.0))

    def normalized(self, tol: float = DEFAULT_TOL) -> "ProductState":
        return ProductState(tuple(local_vector(f, tol) for f in self.factors), self.name)

    def expand(self) -> np.ndarray:
        """Full tensor-product vector (party 0 is the most significant index)."""
        return reduce(np.kron, self.factors)


def product_state(*factors, name: str | None = None, tol: float = DEFAULT_TOL) -> ProductState:
    """Normalized product state; raises on any zero factor."""
    return ProductState(tuple(local_vector(f, tol) for f in factors), name)


def product_inner(a: ProductState, b: ProductState) -> complex:
    if a.local_dims != b.local_dims:
        raise DimensionError(f"party dimensions differ: {a.local_dims} vs {b.local_dims}")
    out = 1.0 + 0.0j
    for fa, fb in zip(a.factors, b.factors):
        out *= inner(fa, fb)
    return out


@dataclass(frozen=True)
class ProductBasis:
    dims: tuple[int, ...]
    states: tuple[ProductState, ...]
    tolerance: float = DEFAULT_TOL

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise DimensionError(f"party dimensions must be positive, got {dims}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "states", tuple(self.states))
        for k, s in enumerate(self.states):
            if s.local_dims != dims:
                raise DimensionError(
                    f"state {k} has local dimensions {s.local_dims}, expected {dims}")

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def __len__(self) -> int:
        return len(self.states)

    def locals(self, party: int, subset: Sequence[int] | None = None) -> list[np.ndarray]:
        idx = range(len(self.states)) if subset is None else subset
        return [self.states[i].factors[party] for i in idx]

    def with_tolerance(self, tol: float) -> "ProductBasis":
        return ProductBasis(self.dims, self.states, tol)


def make_basis(dims, states, tolerance: float = DEFAULT_TOL) -> ProductBasis:
    """Build a basis from raw factor lists, normalizing every factor."""
    built = []
    for s in states:
        if isinstance(s, ProductState):
            built.append(s.normalized(tolerance))
        else:
            built.append(product_state(*s, tol=tolerance))
    return ProductBasis(tuple(dims), tuple(built), tolerance)


@dataclass(frozen=True)
class ValidationReport:
    orthogonal: bool
    complete: bool
    offending_pairs: list[tuple[int, int]] = field(default_factory=list)


def validate(basis: ProductBasis, tol: float | None = None) -> ValidationReport:
    tol = basis.tolerance if tol is None else tol
    for k, s in enumerate(basis.states):
        for p, f in enumerate(s.factors):
            if np.linalg.norm(f) < tol:
                raise ValueError(f"state {k} has a zero factor at party {p}")
    states = [s.normalized(tol) for s in basis.states]
    bad = []
    for i in range(len(states)):
        for j in range(i + 1, len(states)):
            if abs(product_inner(states[i], states[j])) >= tol:
                bad.append((i, j))
    orthogonal = not bad
    return ValidationReport(orthogonal, orthogonal and len(states) == basis.total_dim, bad)


def require_orthogonal(basis: ProductBasis) -> ValidationReport:
    report = validate(basis)
    if not report.orthogonal:
        i, j = report.offending_pairs[0]
        raise NotOrthogonalError(
            f"states {i} and {j} are not orthogonal "
            f"({len(report.offending_pairs)} offending pair(s))")
    return report


# -- file format ------------------------------------------------------------

def _parse_factor(raw, where: str) -> np.ndarray:
    if not isinstance(raw, list) or not raw:
        raise BasisFormatError(f"{where}: factor must be a non-empty list of [re, im] pairs")
    entries = []
    for e in raw:
        if (not isinstance(e, list) or len(e) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in e)):
            raise BasisFormatError(f"{where}: entry {e!r} is not an [re, im] pair")
        entries.append(complex(e[0], e[1]))
    return np.array(entries, dtype=complex)


def basis_from_dict(doc, strict: bool = False) -> ProductBasis:
    if not isinstance(doc, dict):
        raise BasisFormatError("top level must be an object")
    try:
        parties = doc["parties"]
        raw_states = doc["states"]
    except KeyError as exc:
        raise BasisFormatError(f"missing key {exc.args[0]!r}") from None
    if (not isinstance(parties, list) or not parties
            or not all(isinstance(d, int) and not isinstance(d, bool) and d >= 1 for d in parties)):
        raise BasisFormatError("'parties' must be a non-empty list of positive integers")
    tol = doc.get("tolerance", DEFAULT_TOL)
    if not isinstance(tol, (int, float)) or isinstance(tol, bool) or not tol > 0:
        raise BasisFormatError("'tolerance' must be a positive number")
    if not isinstance(raw_states, list):
        raise BasisFormatError("'states' must be a list")

    states = []
    for k, raw in enumerate(raw_states):
        if not isinstance(raw, dict) or "factors" not in raw:
            raise BasisFormatError(f"state {k}: expected an object with 'factors'")
        name = raw.get("name")
        if name is not None and not isinstance(name, str):
            raise BasisFormatError(f"state {k}: 'name' must be text")
        factors = raw["factors"]
        if not isinstance(factors, list) or len(factors) != len(parties):
            raise DimensionError(f"state {k}: expected {len(parties)} factors")
        vecs = []
        for p, raw_f in enumerate(factors):
            f = _parse_factor(raw_f, f"state {k}, party {p}")
            if f.size != parties[p]:
                raise DimensionError(
                    f"state {k}, party {p}: {f.size} entries, dimension is {parties[p]}")
            if np.linalg.norm(f) < tol:
                raise ValueError(f"state {k}, party {p}: zero vector")
            vecs.append(f)
        states.append(product_state(*vecs, name=name, tol=tol))

    basis = ProductBasis(tuple(parties), tuple(states), float(tol))
    if strict:
        require_orthogonal(basis)
    return basis


def parse_basis(document: str, strict: bool = False) -> ProductBasis:
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise BasisFormatError(f"not valid JSON: {exc}") from None
    return basis_from_dict(doc, strict=strict)


def load_basis(path, strict: bool = False) -> ProductBasis:
    with open(path, encoding="utf-8") as fh:
        return parse_basis(fh.read(), strict=strict)


def factor_to_list(v) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex)]


def state_to_dict(state: ProductState) -> dict:
    out = {}
    if state.name is not None:
        out["name"] = state.name
    out["factors"] = [factor_to_list(f) for f in state.factors]
    return out


def basis_to_dict(basis: ProductBasis) -> dict:
    return {
        "parties": list(basis.dims),
        "tolerance": basis.tolerance,
        "states": [state_to_dict(s) for s in basis.states],
    }


def serialize(basis: ProductBasis, indent: int | None = 2) -> str:
    # json writes floats with repr(), which round-trips doubles exactly
    return json.dumps(basis_to_dict(basis), indent=indent) + "\n"
