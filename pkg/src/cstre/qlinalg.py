"""Dense linear algebra for multi-qubit operators.

Index convention used throughout the package: qubit 0 is the most
significant tensor factor, so in a ``2**n`` basis index ``b`` the state of
qubit ``k`` is bit ``n - 1 - k``.  Reshaping a ``(2**n, 2**n)`` matrix to
``[2] * 2n`` therefore puts the row index of qubit ``k`` on axis ``k`` and
its column index on axis ``n + k``.
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass
from typing import Iterable, Sequence

import numba
import numpy as np

from .errors import BadIndexSet, NotHermitian, NotPSD, TraceNotOne

SUPPORT_CUTOFF = 1e-12
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10

JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues and the unitary whose columns are the eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated density matrix of an ``n_qubits`` register.

    Construction checks hermiticity, unit trace and positivity; eigenvalues
    in ``[-PSD_TOL, 0)`` are clamped to zero.  The stored array is read-only.
    """

    matrix: np.ndarray
    n_qubits: int

    def __post_init__(self):
        m = _checked(self.matrix, self.n_qubits)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def _trusted(cls, matrix: np.ndarray, n_qubits: int) -> "DensityMatrix":
        # Skips validation; only for outputs of operations that preserve it.
        obj = object.__new__(cls)
        matrix = np.array(matrix, dtype=complex)
        matrix.setflags(write=False)
        object.__setattr__(obj, "matrix", matrix)
        object.__setattr__(obj, "n_qubits", n_qubits)
        return obj

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.matrix.copy()
        return self.matrix.astype(dtype)


@dataclass(frozen=True)
class Partition:
    """Bipartition ``X:Y`` of a register; ``Y`` is the conditioning side.

    ``X:Y`` reads as "X given Y": conditional entropies compare the full
    state with ``I_X (x) rho_Y``.
    """

    n_qubits: int
    conditioning: tuple[int, ...]

    def __post_init__(self):
        cond = tuple(sorted(set(int(i) for i in self.conditioning)))
        if self.n_qubits < 2:
            raise BadIndexSet("a bipartition needs at least 2 qubits")
        if not cond or len(cond) >= self.n_qubits:
            raise BadIndexSet(f"conditioning set {cond} must be a nonempty proper subset")
        if cond[0] < 0 or cond[-1] >= self.n_qubits:
            raise BadIndexSet(f"conditioning set {cond} out of range for {self.n_qubits} qubits")
        object.__setattr__(self, "conditioning", cond)

    @property
    def remainder(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n_qubits) if i not in self.conditioning)

    @property
    def label(self) -> str:
        """Letter form, e.g. ``A:BC`` (letters beyond Z fall back to indices)."""
        if self.n_qubits > 26:
            return ",".join(map(str, self.remainder)) + ":" + ",".join(map(str, self.conditioning))
        letters = string.ascii_uppercase
        return "".join(letters[i] for i in self.remainder) + ":" + "".join(letters[i] for i in self.conditioning)

    def __str__(self):
        return self.label

    @classmethod
    def parse(cls, text: str, n_qubits: int) -> "Partition":
        """Parse ``A:BC`` (letters by alphabet position) or ``0:1,2``."""
        parts = text.strip().split(":")
        if len(parts) != 2:
            raise BadIndexSet(f"partition {text!r} must have exactly one ':'")
        left, right = (_parse_side(p, text) for p in parts)
        if set(left) & set(right):
            raise BadIndexSet(f"partition {text!r} has overlapping sides")
        if sorted(left + right) != list(range(n_qubits)):
            raise BadIndexSet(f"partition {text!r} does not cover a {n_qubits}-qubit register exactly")
        return cls(n_qubits, tuple(right))

    @classmethod
    def all_cuts(cls, n_qubits: int) -> list["Partition"]:
        """Contiguous cuts ``A:B..``, ``AB:C..``, ... in register order."""
        return [cls(n_qubits, tuple(range(k, n_qubits))) for k in range(1, n_qubits)]


def _parse_side(side: str, text: str) -> list[int]:
    side = side.strip()
    if not side:
        raise BadIndexSet(f"partition {text!r} has an empty side")
    if side.isalpha():
        if not side.isupper():
            side = side.upper()
        return [ord(c) - ord("A") for c in side]
    try:
        return [int(tok) for tok in side.split(",")]
    except ValueError:
        raise BadIndexSet(f"cannot parse partition side {side!r} in {text!r}") from None


def as_array(m) -> np.ndarray:
    if isinstance(m, DensityMatrix):
        return m.matrix
    return np.asarray(m, dtype=complex)


def n_qubits_for(dim: int) -> int:
    n = int(round(math.log2(dim))) if dim > 0 else -1
    if n < 1 or 2**n != dim:
        raise BadIndexSet(f"dimension {dim} is not a power of two >= 2")
    return n


def kron(a, b) -> np.ndarray:
    """Kronecker product; ``a`` is the more significant factor."""
    return np.kron(as_array(a), as_array(b))


def kron_all(factors: Iterable) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, as_array(f))
    return out


def hermitian_defect(h) -> float:
    h = as_array(h)
    return float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0


def _check_square(h: np.ndarray):
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")


@numba.njit(cache=True)
def _jacobi(a, tol, max_sweeps):
    # Cyclic complex Jacobi.  Each rotation G = diag(1, conj(phase)) @ R(c, s)
    # first makes a[p, q] real and then annihilates it; A <- G^dagger A G.
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n, dtype=np.complex128)
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += abs(a[i, j]) ** 2
    scale = math.sqrt(scale)
    w = np.zeros(n)
    if scale == 0.0:
        return w, v
    threshold = tol * scale
    for _ in range(max_sweeps):
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += abs(a[i, j]) ** 2
        if math.sqrt(off) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                mag = abs(a[p, q])
                if mag < 1e-3 * threshold / n:
                    continue
                phc = np.conj(a[p, q] / mag)
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * phc * akq
                    a[k, q] = s * akp + c * phc * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * np.conj(phc) * aqk
                    a[q, k] = s * apk + c * np.conj(phc) * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * phc * vkq
                    v[k, q] = s * vkp + c * phc * vkq
    for i in range(n):
        w[i] = a[i, i].real
    return w, v


def eig_hermitian(h, tol: float = HERMITIAN_TOL) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Raises:
        NotHermitian: if ``max|h - h^dagger| > tol``.
    """
    h = as_array(h)
    _check_square(h)
    defect = hermitian_defect(h)
    if defect > tol:
        raise NotHermitian(f"matrix is not Hermitian (max |H - H^dagger| = {defect:.3e})")
    h = 0.5 * (h + h.conj().T)
    w, v = _jacobi(np.ascontiguousarray(h, dtype=np.complex128), JACOBI_TOL, JACOBI_MAX_SWEEPS)
    order = np.argsort(w, kind="stable")
    w = w[order]
    v = v[:, order]
    w.setflags(write=False)
    v.setflags(write=False)
    return Spectrum(w, v)


def power_from_spectrum(spectrum: Spectrum, exponent: float, cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    """``V diag(f(lambda)) V^dagger`` with ``f = lambda**exponent`` on the support, 0 elsewhere."""
    lam = spectrum.eigenvalues
    on = lam > cutoff
    f = np.zeros_like(lam)
    f[on] = lam[on] ** exponent
    v = spectrum.eigenvectors
    return (v * f) @ v.conj().T


def power_on_support(h, exponent: float, cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    """Matrix power of a PSD operator restricted to its support.

    Eigenvalues at or below ``cutoff`` map to 0, so negative exponents stay
    finite on rank-deficient input.
    """
    spec = eig_hermitian(h)
    if spec.eigenvalues[0] < -PSD_TOL:
        raise NotPSD(f"matrix has negative eigenvalue {spec.eigenvalues[0]:.3e}", spec.eigenvalues[0])
    return power_from_spectrum(spec, exponent, cutoff)


def support_projector(spectrum: Spectrum, cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    v = spectrum.eigenvectors[:, spectrum.eigenvalues > cutoff]
    return v @ v.conj().T


def _checked(m, n_qubits: int, tol: float = TRACE_TOL) -> np.ndarray:
    m = np.array(as_array(m), dtype=complex)
    _check_square(m)
    if n_qubits < 1 or m.shape[0] != 2**n_qubits:
        raise BadIndexSet(f"dimension {m.shape[0]} does not match {n_qubits} qubits")
    defect = hermitian_defect(m)
    if defect > HERMITIAN_TOL:
        raise NotHermitian(f"matrix is not Hermitian (max |M - M^dagger| = {defect:.3e})")
    m = 0.5 * (m + m.conj().T)
    tr = np.trace(m).real
    if abs(tr - 1.0) > tol:
        raise TraceNotOne(f"trace is {tr:.12g}, expected 1")
    spec = eig_hermitian(m)
    lam_min = spec.eigenvalues[0]
    if lam_min < -PSD_TOL:
        raise NotPSD(f"matrix has negative eigenvalue {lam_min:.6g}", lam_min)
    if lam_min < 0.0:
        v = spec.eigenvectors
        m = (v * np.clip(spec.eigenvalues, 0.0, None)) @ v.conj().T
        m = 0.5 * (m + m.conj().T)
    m.setflags(write=False)
    return m


def validate_density(m, n_qubits: int | None = None, tol: float = TRACE_TOL) -> DensityMatrix:
    """Check ``m`` is a density matrix of ``n_qubits`` qubits and wrap it.

    ``n_qubits`` is inferred from the dimension when omitted.
    """
    arr = as_array(m)
    if n_qubits is None:
        n_qubits = n_qubits_for(arr.shape[0])
    return DensityMatrix._trusted(_checked(arr, n_qubits, tol), n_qubits)


def _check_subset(indices: Iterable[int], n_qubits: int, what: str) -> list[int]:
    idx = sorted(set(int(i) for i in indices))
    if not idx or len(idx) >= n_qubits or idx[0] < 0 or idx[-1] >= n_qubits:
        raise BadIndexSet(f"{what} {idx} must be a nonempty proper subset of range({n_qubits})")
    return idx


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on the qubits in ``keep`` (kept in ascending order)."""
    n = rho.n_qubits
    keep = _check_subset(keep, n, "keep set")
    t = rho.matrix.reshape([2] * (2 * n))
    letters = string.ascii_letters
    rows = list(letters[:n])
    cols = list(letters[n : 2 * n])
    for i in range(n):
        if i not in keep:
            cols[i] = rows[i]
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    reduced = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    d = 2 ** len(keep)
    reduced = reduced.reshape(d, d)
    return DensityMatrix._trusted(0.5 * (reduced + reduced.conj().T), len(keep))


def partial_transpose(rho, transpose_set: Iterable[int], n_qubits: int | None = None) -> np.ndarray:
    """Transpose the row/column indices of the qubits in ``transpose_set``."""
    m = as_array(rho)
    if n_qubits is None:
        n_qubits = rho.n_qubits if isinstance(rho, DensityMatrix) else n_qubits_for(m.shape[0])
    idx = _check_subset(transpose_set, n_qubits, "transpose set")
    axes = list(range(2 * n_qubits))
    for i in idx:
        axes[i], axes[n_qubits + i] = axes[n_qubits + i], axes[i]
    d = 2**n_qubits
    return m.reshape([2] * (2 * n_qubits)).transpose(axes).reshape(d, d)


def embed_operator(op, targets: Sequence[int], n_qubits: int) -> np.ndarray:
    """``I_rest (x) op`` with ``op`` acting on ``targets`` (ascending order)."""
    targets = sorted(targets)
    rest = [i for i in range(n_qubits) if i not in targets]
    full = np.kron(np.eye(2 ** len(rest)), as_array(op))
    order = rest + targets
    perm = [order.index(i) for i in range(n_qubits)]
    d = 2**n_qubits
    return full.reshape([2] * (2 * n_qubits)).transpose(perm + [p + n_qubits for p in perm]).reshape(d, d)


def permute_qubits(m, perm: Sequence[int]) -> np.ndarray:
    """Conjugate by the qubit permutation sending qubit ``perm[k]`` to slot ``k``."""
    m = as_array(m)
    n = len(perm)
    d = 2**n
    return m.reshape([2] * (2 * n)).transpose(list(perm) + [p + n for p in perm]).reshape(d, d)
