"""Reference bases and a seeded generator of distinguishable complete bases.

The random generator uses numpy's ``default_rng`` (PCG64 bit generator),
so output is reproducible for a given seed and numpy version.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import ProductBasis, make_basis

S2 = 1 / math.sqrt(2)
S3 = 1 / math.sqrt(3)

_K0, _K1, _K2 = [1, 0, 0], [0, 1, 0], [0, 0, 1]


def _plus(a, b, sign=1):
    return [x + sign * y for x, y in zip(a, b)]


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    basis: ProductBasis
    complete: bool
    proper_upb: bool
    locc_distinguishable: bool


def _std_2x2():
    e0, e1 = [1, 0], [0, 1]
    return make_basis([2, 2], [(e0, e0), (e0, e1), (e1, e0), (e1, e1)])


def _domino():
    states = [
        (_K1, _K1),
        (_K0, _plus(_K0, _K1)), (_K0, _plus(_K0, _K1, -1)),
        (_K2, _plus(_K1, _K2)), (_K2, _plus(_K1, _K2, -1)),
        (_plus(_K1, _K2), _K0), (_plus(_K1, _K2, -1), _K0),
        (_plus(_K0, _K1), _K2), (_plus(_K0, _K1, -1), _K2),
    ]
    return make_basis([3, 3], states)


def _tiles():
    stopper = [1, 1, 1]
    states = [
        (_K0, _plus(_K0, _K1, -1)),
        (_plus(_K0, _K1, -1), _K2),
        (_K2, _plus(_K1, _K2, -1)),
        (_plus(_K1, _K2, -1), _K0),
        (stopper, stopper),
    ]
    return make_basis([3, 3], states)


def _shifts():
    zero, one, plus, minus = [1, 0], [0, 1], [1, 1], [1, -1]
    states = [(zero, one, plus), (one, plus, zero), (plus, zero, one), (minus, minus, minus)]
    return make_basis([2, 2, 2], states)


_BUILTINS = {
    "std-2x2": (_std_2x2, True, False, True),
    "domino-3x3": (_domino, True, False, False),
    "tiles-3x3": (_tiles, False, True, False),
    "shifts-2x2x2": (_shifts, False, True, False),
}

NAMES = tuple(_BUILTINS)


def builtin(name: str) -> CatalogEntry:
    try:
        build, complete, upb, dist = _BUILTINS[name]
    except KeyError:
        raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(NAMES)}") from None
    return CatalogEntry(name, build(), complete, upb, dist)


MAX_RANDOM_DIM = 4096


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_distinguishable(dims, seed: int) -> ProductBasis:
    """Complete product basis built by recursive random orthogonal splits.

    Starting from the full space, pick a party whose current subspace has
    dimension > 1, rotate that subspace by a random unitary, cut its basis
    into two or more blocks and recurse into each block.  Once every party
    is down to one dimension the remaining vectors form one product state.
    """
    dims = [int(d) for d in dims]
    if not dims or any(d < 1 for d in dims):
        raise ValueError(f"dimensions must be positive, got {dims}")
    if math.prod(dims) > MAX_RANDOM_DIM:
        raise ValueError(f"total dimension {math.prod(dims)} exceeds {MAX_RANDOM_DIM}")
    rng = np.random.default_rng(seed)
    states = []

    def grow(subspaces):
        open_parties = [p for p, q in enumerate(subspaces) if q.shape[1] > 1]
        if not open_parties:
            states.append(tuple(q[:, 0] for q in subspaces))
            return
        p = open_parties[rng.integers(len(open_parties))]
        q = subspaces[p]
        k = q.shape[1]
        rotated = q @ random_unitary(k, rng)
        n_blocks = int(rng.integers(2, k + 1))
        cuts = np.sort(rng.choice(np.arange(1, k), size=n_blocks - 1, replace=False))
        for block in np.split(np.arange(k), cuts):
            child = list(subspaces)
            child[p] = rotated[:, block]
            grow(child)

    grow([np.eye(d, dtype=complex) for d in dims])
    return make_basis(dims, states)
