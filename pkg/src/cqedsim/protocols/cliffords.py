"""Single-qubit Clifford group with pulse-level decompositions.

The 24 group elements are generated from quarter rotations, decomposed
into minimal sequences over the physical gate alphabet {I, +-X/2, +-Y/2,
X, Y} by breadth-first search, and indexed deterministically.  Ties
between equal-length decompositions are broken by gate-alphabet order
with X rotations preferred, so builds are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = ["CliffordGate", "CliffordGroup", "clifford_sequence", "GATE_UNITARIES"]

_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)


def _rot(axis: np.ndarray, angle: float) -> np.ndarray:
    return np.cos(angle / 2) * np.eye(2) - 1j * np.sin(angle / 2) * axis


GATE_UNITARIES: dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=complex),
    "X": _rot(_SX, np.pi),
    "X/2": _rot(_SX, np.pi / 2),
    "-X/2": _rot(_SX, -np.pi / 2),
    "Y": _rot(_SY, np.pi),
    "Y/2": _rot(_SY, np.pi / 2),
    "-Y/2": _rot(_SY, -np.pi / 2),
}

# BFS expansion order; earlier gates win ties (X rotations preferred).
_ALPHABET = ("X", "X/2", "-X/2", "Y", "Y/2", "-Y/2")


def _canonical_key(u: np.ndarray) -> bytes:
    """Phase-fixed, rounded byte key identifying a U(2) element up to global phase."""
    flat = u.ravel()
    k = np.argmax(np.abs(flat) > 1e-6)
    v = flat[k]
    u = u * (v.conjugate() / abs(v))
    # +0.0 normalizes negative zeros, which would change the byte key.
    return (np.round(u, 9) + (0.0 + 0.0j)).tobytes()


@dataclass(frozen=True)
class CliffordGate:
    """One Clifford group element and its physical-pulse decomposition."""

    index: int
    decomposition: tuple[str, ...]

    def matrix(self) -> np.ndarray:
        u = np.eye(2, dtype=complex)
        for name in self.decomposition:
            u = GATE_UNITARIES[name] @ u
        return u


class CliffordGroup:
    """The 24-element single-qubit Clifford group.

    Exposes matrices, minimal decompositions, the multiplication table,
    and the inverse table.  Element 0 is the identity.
    """

    def __init__(self):
        elements: list[np.ndarray] = [np.eye(2, dtype=complex)]
        decomps: list[tuple[str, ...]] = [("I",)]
        seen = {_canonical_key(elements[0]): 0}
        frontier = [0]
        while frontier:
            new_frontier = []
            for idx in frontier:
                for name in _ALPHABET:
                    u = GATE_UNITARIES[name] @ elements[idx]
                    key = _canonical_key(u)
                    if key not in seen:
                        seen[key] = len(elements)
                        elements.append(u)
                        base = decomps[idx] if decomps[idx] != ("I",) else ()
                        decomps.append(base + (name,))
                        new_frontier.append(seen[key])
            frontier = new_frontier
        if len(elements) != 24:
            raise RuntimeError(f"Clifford generation produced {len(elements)} elements, expected 24")
        self.matrices = elements
        self.gates = [CliffordGate(i, d) for i, d in enumerate(decomps)]
        self._key_to_index = seen
        n = len(elements)
        self.multiplication_table = np.empty((n, n), dtype=int)
        for i in range(n):
            for j in range(n):
                self.multiplication_table[i, j] = seen[_canonical_key(elements[i] @ elements[j])]
        self.inverse_table = np.empty(n, dtype=int)
        for i in range(n):
            self.inverse_table[i] = seen[_canonical_key(elements[i].conj().T)]

    def __len__(self) -> int:
        return len(self.matrices)

    def index_of(self, u: np.ndarray) -> int:
        return self._key_to_index[_canonical_key(u)]

    def compose(self, indices) -> int:
        """Index of the product (applied left to right: first gate acts first)."""
        acc = 0
        for i in indices:
            acc = self.multiplication_table[i, acc]
        return int(acc)

    def average_pulses_per_gate(self) -> float:
        return float(np.mean([len(g.decomposition) for g in self.gates]))


@lru_cache(maxsize=1)
def get_group() -> CliffordGroup:
    return CliffordGroup()


def clifford_sequence(m: int, rng: np.random.Generator) -> tuple[list[CliffordGate], CliffordGate]:
    """Draw m uniform Cliffords plus the recovery gate inverting their product."""
    if m < 1:
        raise ValueError("sequence length must be >= 1")
    group = get_group()
    draws = rng.integers(0, len(group), size=m)
    gates = [group.gates[i] for i in draws]
    recovery_idx = int(group.inverse_table[group.compose(draws)])
    return gates, group.gates[recovery_idx]
