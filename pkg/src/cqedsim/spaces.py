"""Operator algebra on a truncated composite Hilbert space.

The composite space is one truncated bosonic mode tensored with one or two
two-level qubits.  Subsystem ordering is fixed: the mode is subsystem 0,
qubit 1 is subsystem 1, qubit 2 (if present) is subsystem 2.  All matrices
are dense; the largest space handled here is 24-dimensional.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SpaceDescriptor",
    "Operator",
    "DensityMatrix",
    "build_space",
    "embed_operator",
    "expectation",
    "ground_state",
    "basis_state",
]

# Local single-subsystem matrices, keyed by operator kind.
_QUBIT_KINDS = {
    "sigma_x": np.array([[0, 1], [1, 0]], dtype=complex),
    "sigma_y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "sigma_z": np.array([[1, 0], [0, -1]], dtype=complex),
    # Qubit basis ordering is (ground, excited); sigma_minus maps e -> g.
    "sigma_minus": np.array([[0, 1], [0, 0]], dtype=complex),
    "sigma_plus": np.array([[0, 0], [1, 0]], dtype=complex),
}
_BOSON_KINDS = ("annihilate", "create", "number")
_ALL_KINDS = tuple(_QUBIT_KINDS) + _BOSON_KINDS + ("identity",)


@dataclass(frozen=True)
class SpaceDescriptor:
    """Composite Hilbert space: bosonic mode (dim n_fock) x n_qubits qubits."""

    n_fock: int
    n_qubits: int

    @property
    def dim(self) -> int:
        return self.n_fock * 2**self.n_qubits

    @property
    def subsystem_dims(self) -> tuple[int, ...]:
        return (self.n_fock,) + (2,) * self.n_qubits


@dataclass(frozen=True)
class Operator:
    """Dense operator on a composite space."""

    space: SpaceDescriptor
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise ValueError(
                f"matrix shape {m.shape} does not match space dim {self.space.dim}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def dagger(self) -> "Operator":
        return Operator(self.space, self.matrix.conj().T)

    def __matmul__(self, other: "Operator") -> "Operator":
        _check_same_space(self.space, other.space)
        return Operator(self.space, self.matrix @ other.matrix)

    def __add__(self, other: "Operator") -> "Operator":
        _check_same_space(self.space, other.space)
        return Operator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        _check_same_space(self.space, other.space)
        return Operator(self.space, self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.space, scalar * self.matrix)

    __rmul__ = __mul__


@dataclass(frozen=True)
class DensityMatrix:
    """Validated density matrix on a composite space.

    Validation tolerances: Hermiticity 1e-10, unit trace 1e-9, minimum
    eigenvalue above -1e-8.
    """

    space: SpaceDescriptor
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise ValueError(
                f"matrix shape {m.shape} does not match space dim {self.space.dim}"
            )
        herm_err = np.max(np.abs(m - m.conj().T))
        if herm_err > 1e-10:
            raise ValueError(f"density matrix not Hermitian (max deviation {herm_err:.2e})")
        tr = np.trace(m).real
        if abs(tr - 1.0) > 1e-9:
            raise ValueError(f"density matrix trace {tr!r} deviates from 1")
        min_eig = np.linalg.eigvalsh((m + m.conj().T) / 2).min()
        if min_eig < -1e-8:
            raise ValueError(f"density matrix not positive (min eigenvalue {min_eig:.2e})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def _check_same_space(a: SpaceDescriptor, b: SpaceDescriptor) -> None:
    if a != b:
        raise ValueError(f"space mismatch: {a} vs {b}")


def build_space(n_fock: int, n_qubits: int) -> SpaceDescriptor:
    """Create a space descriptor, validating the truncation and qubit count."""
    if not isinstance(n_fock, (int, np.integer)) or n_fock < 2:
        raise ValueError(f"n_fock must be an integer >= 2, got {n_fock!r}")
    if n_qubits not in (1, 2):
        raise ValueError(f"n_qubits must be 1 or 2, got {n_qubits!r}")
    return SpaceDescriptor(int(n_fock), int(n_qubits))


def _boson_matrix(kind: str, n_fock: int) -> np.ndarray:
    n = np.arange(n_fock)
    if kind == "annihilate":
        return np.diag(np.sqrt(n[1:]), k=1).astype(complex)
    if kind == "create":
        return np.diag(np.sqrt(n[1:]), k=-1).astype(complex)
    if kind == "number":
        return np.diag(n).astype(complex)
    raise ValueError(kind)


def embed_operator(kind: str, target: int, space: SpaceDescriptor) -> Operator:
    """Embed a single-subsystem operator into the composite space.

    ``target`` indexes subsystems in the fixed order: 0 is the bosonic
    mode, 1 and 2 are the qubits.  Bosonic kinds must target the mode;
    Pauli/ladder kinds must target a qubit.  ``identity`` accepts any
    valid subsystem index.
    """
    if kind not in _ALL_KINDS:
        raise ValueError(f"unknown operator kind {kind!r}")
    dims = space.subsystem_dims
    if not 0 <= target < len(dims):
        raise ValueError(f"target {target} out of range for {len(dims)} subsystems")
    if kind in _BOSON_KINDS and target != 0:
        raise ValueError(f"bosonic kind {kind!r} must target the mode (subsystem 0)")
    if kind in _QUBIT_KINDS and target == 0:
        raise ValueError(f"qubit kind {kind!r} cannot target the bosonic mode")

    factors = []
    for i, d in enumerate(dims):
        if i != target or kind == "identity":
            factors.append(np.eye(d, dtype=complex))
        elif kind in _BOSON_KINDS:
            factors.append(_boson_matrix(kind, d))
        else:
            factors.append(_QUBIT_KINDS[kind])
    m = factors[0]
    for f in factors[1:]:
        m = np.kron(m, f)
    return Operator(space, m)


def expectation(state: DensityMatrix, op: Operator) -> complex:
    """Return trace(op @ state)."""
    _check_same_space(state.space, op.space)
    return complex(np.trace(op.matrix @ state.matrix))


def basis_state(space: SpaceDescriptor, n_photon: int, qubit_levels: tuple[int, ...] = ()) -> DensityMatrix:
    """Pure product basis state |n_photon> x |q1> x |q2| as a density matrix."""
    levels = (n_photon,) + tuple(qubit_levels) + (0,) * (space.n_qubits - len(qubit_levels))
    dims = space.subsystem_dims
    if len(levels) != len(dims):
        raise ValueError("too many qubit levels for this space")
    idx = 0
    for lvl, d in zip(levels, dims):
        if not 0 <= lvl < d:
            raise ValueError(f"level {lvl} out of range for subsystem dim {d}")
        idx = idx * d + lvl
    m = np.zeros((space.dim, space.dim), dtype=complex)
    m[idx, idx] = 1.0
    return DensityMatrix(space, m)


def ground_state(space: SpaceDescriptor) -> DensityMatrix:
    """Vacuum photon state with all qubits in the ground state."""
    return basis_state(space, 0)
