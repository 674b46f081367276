"""State families: Dicke states, the symmetric projector, noisy W/GHZ mixtures
and a locally/globally isospectral pair of two-qubit states."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import comb, sqrt

import numpy as np

from .errors import BadExcitationNumber
from .qlinalg import DensityMatrix


class Family(str, Enum):
    W = "w"
    GHZ = "ghz"

    @classmethod
    def parse(cls, text: str) -> "Family":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown family {text!r}; expected one of: w, ghz") from None

    @property
    def label(self) -> str:
        return self.name


@dataclass(frozen=True)
class FamilySpec:
    family: Family
    n_qubits: int
    x: float

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family) if isinstance(self.family, str) else self.family)
        if self.n_qubits < 2:
            raise ValueError(f"family states need at least 2 qubits, got {self.n_qubits}")
        if not 0.0 <= self.x <= 1.0:
            raise ValueError(f"mixing parameter x={self.x} outside [0, 1]")


def dicke_state(n: int, k: int) -> np.ndarray:
    """Equal superposition of the ``n``-qubit basis states of Hamming weight ``k``."""
    if n < 1 or not 0 <= k <= n:
        raise BadExcitationNumber(f"need 0 <= k <= n with n >= 1, got n={n}, k={k}")
    weights = np.array([bin(b).count("1") for b in range(2**n)])
    v = np.where(weights == k, 1.0, 0.0).astype(complex)
    return v / sqrt(comb(n, k))


def w_state(n: int) -> np.ndarray:
    return dicke_state(n, 1)


def ghz_state(n: int) -> np.ndarray:
    v = np.zeros(2**n, dtype=complex)
    v[0] = v[-1] = 1 / sqrt(2)
    return v


def symmetric_projector(n: int) -> np.ndarray:
    """Projector onto the ``n + 1`` dimensional permutation-symmetric subspace."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    p = np.zeros((2**n, 2**n), dtype=complex)
    for k in range(n + 1):
        d = dicke_state(n, k)
        p += np.outer(d, d.conj())
    return p


def family_matrix(family: Family | str, n: int, x: float) -> np.ndarray:
    """Raw matrix of ``(1 - x)/(n + 1) P_n + x |psi><psi|`` without validation."""
    family = Family.parse(family) if isinstance(family, str) else family
    psi = w_state(n) if family is Family.W else ghz_state(n)
    return (1 - x) / (n + 1) * symmetric_projector(n) + x * np.outer(psi, psi.conj())


def noisy_family(spec: FamilySpec) -> DensityMatrix:
    """Noisy W or GHZ state: the symmetric-subspace mixture with weight ``x`` on the pure state."""
    return DensityMatrix(family_matrix(spec.family, spec.n_qubits, spec.x), spec.n_qubits)


def isospectral_pair() -> tuple[DensityMatrix, DensityMatrix]:
    """Entangled and separable two-qubit states sharing global and local spectra.

    Both have global spectrum {2/3, 1/3, 0, 0} and single-qubit marginal
    spectra {2/3, 1/3}.  The first is entangled and does not commute with
    ``I (x) rho_B``; the second is diagonal (hence separable).
    """
    entangled = np.array(
        [[1, 0, 0, 0],
         [0, 1, 1, 0],
         [0, 1, 1, 0],
         [0, 0, 0, 0]], dtype=complex) / 3
    separable = np.diag([1, 0, 0, 2]).astype(complex) / 3
    return DensityMatrix(entangled, 2), DensityMatrix(separable, 2)
