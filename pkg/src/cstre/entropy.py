"""Entropy functionals: Renyi/Tsallis entropies, traditional and sandwiched
relative entropies, and the conditional forms used as entanglement witnesses.

All logarithms are natural.  Eigenvalues at or below ``SUPPORT_CUTOFF``
contribute nothing to any trace sum.  Traces of ``q``-th powers are
accumulated in the log domain so that large ``q`` neither overflows nor
underflows the comparison against 1.

Sign convention: relative entropies divide by ``1 - q`` exactly as in the
Tsallis entropy, so the conditional form
``(Q - 1) / (1 - q)`` with ``sigma = I_X (x) rho_Y`` tends to
``S(XY) - S(Y)`` as ``q -> 1`` and is negative on entangled states it
detects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSupport, SupportViolation
from .qlinalg import (
    SUPPORT_CUTOFF,
    DensityMatrix,
    Partition,
    Spectrum,
    as_array,
    eig_hermitian,
    embed_operator,
    partial_trace,
    power_from_spectrum,
    support_projector,
)

WITNESS_TOL = 1e-9
SUPPORT_LEAK_TOL = 1e-10


@dataclass(frozen=True)
class EntropyResult:
    """Entropy value with the sandwiched-operator eigenvalues when they exist.

    ``gammas`` are the ascending eigenvalues of
    ``Gamma = sigma^a rho sigma^a`` (``a = (1 - q) / 2q``) and
    ``q_tilde = sum(gamma**q)`` over gammas above the support cutoff.
    ``log_q_tilde`` is the same sum in log form and stays finite where
    ``q_tilde`` overflows.
    """

    value: float
    q: float
    gammas: tuple[float, ...] | None = None
    q_tilde: float | None = None
    log_q_tilde: float | None = None

    @property
    def is_negative(self) -> bool:
        return self.value < -WITNESS_TOL


def _check_q(q: float):
    if not q > 0:
        raise ValueError(f"entropic index q must be positive, got {q}")


def log_power_sum(values, q: float, cutoff: float = SUPPORT_CUTOFF) -> float:
    """``log(sum(v**q))`` over ``v > cutoff``; ``-inf`` when nothing survives."""
    v = np.asarray(values, dtype=float)
    v = v[v > cutoff]
    if v.size == 0:
        return -math.inf
    logs = q * np.log(v)
    top = float(np.max(logs))
    return top + math.log(float(np.sum(np.exp(logs - top))))


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def eigenvalues(rho) -> np.ndarray:
    return eig_hermitian(as_array(rho)).eigenvalues


def log_trace_power(rho, q: float) -> float:
    """``log Tr rho**q`` computed from the spectrum."""
    return log_power_sum(eigenvalues(rho), q)


def von_neumann_entropy(rho) -> float:
    lam = eigenvalues(rho)
    lam = lam[lam > SUPPORT_CUTOFF]
    return float(-np.sum(lam * np.log(lam)))


def tsallis_entropy(rho, q: float) -> float:
    _check_q(q)
    if q == 1:
        return von_neumann_entropy(rho)
    return (_exp(log_trace_power(rho, q)) - 1.0) / (1.0 - q)


def renyi_entropy(rho, q: float) -> float:
    _check_q(q)
    if q == 1:
        return von_neumann_entropy(rho)
    return log_trace_power(rho, q) / (1.0 - q)


def _log_on_support(spec: Spectrum) -> np.ndarray:
    lam = spec.eigenvalues
    on = lam > SUPPORT_CUTOFF
    f = np.zeros_like(lam)
    f[on] = np.log(lam[on])
    v = spec.eigenvectors
    return (v * f) @ v.conj().T


def _support_leak(rho: np.ndarray, sigma_spec: Spectrum) -> float:
    kernel = np.eye(rho.shape[0]) - support_projector(sigma_spec)
    return float(np.trace(rho @ kernel).real)


def umegaki_relative_entropy(rho, sigma) -> float:
    """``Tr rho (log rho - log sigma)``; infinite if ``rho`` leaves the support of ``sigma``."""
    r = as_array(rho)
    s_spec = eig_hermitian(as_array(sigma))
    if _support_leak(r, s_spec) > SUPPORT_LEAK_TOL:
        return math.inf
    r_spec = eig_hermitian(r)
    return float(np.trace(r @ (_log_on_support(r_spec) - _log_on_support(s_spec))).real)


def _traditional_trace(rho, sigma, q: float) -> float:
    r = as_array(rho)
    s_spec = eig_hermitian(as_array(sigma))
    if q > 1 and _support_leak(r, s_spec) > SUPPORT_LEAK_TOL:
        raise SupportViolation(f"rho has weight outside the support of sigma (q={q} > 1)")
    r_pow = power_from_spectrum(eig_hermitian(r), q)
    s_pow = power_from_spectrum(s_spec, 1.0 - q)
    return float(np.trace(r_pow @ s_pow).real)


def traditional_relative_tsallis(rho, sigma, q: float) -> float:
    """``(Tr(rho**q sigma**(1-q)) - 1) / (1 - q)`` with each power taken separately.

    Raises:
        SupportViolation: for ``q > 1`` when ``rho`` has weight on the kernel of ``sigma``.
    """
    _check_q(q)
    if q == 1:
        return -umegaki_relative_entropy(rho, sigma)
    return (_traditional_trace(rho, sigma, q) - 1.0) / (1.0 - q)


def traditional_relative_renyi(rho, sigma, q: float) -> float:
    _check_q(q)
    if q == 1:
        return umegaki_relative_entropy(rho, sigma)
    tr = _traditional_trace(rho, sigma, q)
    if tr <= 0:
        raise DegenerateSupport("Tr(rho^q sigma^(1-q)) vanishes")
    return math.log(tr) / (q - 1.0)


def _gamma_result(rho: np.ndarray, sandwich: np.ndarray, q: float) -> EntropyResult:
    gamma = sandwich @ rho @ sandwich
    gamma = 0.5 * (gamma + gamma.conj().T)
    gammas = eig_hermitian(gamma).eigenvalues
    log_q = log_power_sum(gammas, q)
    q_t = _exp(log_q)
    return EntropyResult(q_t, q, tuple(float(g) for g in gammas), q_t, log_q)


def q_tilde(rho, sigma, q: float, sigma_spectrum: Spectrum | None = None) -> EntropyResult:
    """Sandwiched trace ``Tr (sigma^a rho sigma^a)^q`` with ``a = (1 - q) / 2q``.

    The powers of ``sigma`` act on its support only.  ``sigma`` need not be
    normalized (``sigma = I`` gives back ``Tr rho^q``).  A precomputed
    ``sigma_spectrum`` may be passed to fix the eigenbasis used.
    """
    _check_q(q)
    if q == 1:
        raise ValueError("the sandwiched trace is defined for q != 1")
    if sigma_spectrum is None:
        sigma_spectrum = eig_hermitian(as_array(sigma))
    sandwich = power_from_spectrum(sigma_spectrum, (1.0 - q) / (2.0 * q))
    return _gamma_result(as_array(rho), sandwich, q)


def sandwiched_relative_tsallis(rho, sigma, q: float) -> float:
    """``(Q_tilde - 1) / (1 - q)``; at ``q = 1`` the limit ``-Tr rho (log rho - log sigma)``."""
    _check_q(q)
    if q == 1:
        return -umegaki_relative_entropy(rho, sigma)
    res = q_tilde(rho, sigma, q)
    return (res.q_tilde - 1.0) / (1.0 - q)


def sandwiched_relative_renyi(rho, sigma, q: float) -> float:
    _check_q(q)
    if q == 1:
        return umegaki_relative_entropy(rho, sigma)
    res = q_tilde(rho, sigma, q)
    if res.log_q_tilde == -math.inf:
        raise DegenerateSupport("sandwiched operator has no support above the cutoff")
    return res.log_q_tilde / (q - 1.0)


def _partition_for(rho: DensityMatrix, partition: Partition):
    if partition.n_qubits != rho.n_qubits:
        raise ValueError(f"partition is for {partition.n_qubits} qubits, state has {rho.n_qubits}")


def conditioning_marginal(rho: DensityMatrix, partition: Partition) -> DensityMatrix:
    _partition_for(rho, partition)
    return partial_trace(rho, partition.conditioning)


def vn_conditional(rho: DensityMatrix, partition: Partition) -> float:
    """``S(XY) - S(Y)`` for the partition ``X:Y``."""
    return von_neumann_entropy(rho) - von_neumann_entropy(conditioning_marginal(rho, partition))


def cstre(rho: DensityMatrix, partition: Partition, q: float,
          marginal_spectrum: Spectrum | None = None) -> EntropyResult:
    """Conditional sandwiched Tsallis relative entropy of ``X`` given ``Y``.

    Uses ``sigma = I_X (x) rho_Y``.  The sandwich ``sigma^a`` is built as
    ``I_X (x) rho_Y^a`` from the spectrum of the marginal (which may be
    supplied to pin the eigenbasis).  At ``q = 1`` returns the von Neumann
    conditional entropy.  For the alternative reference ``rho_X (x) I_Y``
    pass the partition with the sides swapped.
    """
    _check_q(q)
    if q == 1:
        return EntropyResult(vn_conditional(rho, partition), 1.0)
    if marginal_spectrum is None:
        marginal_spectrum = eig_hermitian(conditioning_marginal(rho, partition).matrix)
    small = power_from_spectrum(marginal_spectrum, (1.0 - q) / (2.0 * q))
    sandwich = embed_operator(small, partition.conditioning, rho.n_qubits)
    res = _gamma_result(rho.matrix, sandwich, q)
    value = (res.q_tilde - 1.0) / (1.0 - q)
    return EntropyResult(value, q, res.gammas, res.q_tilde, res.log_q_tilde)


def ar_q_conditional(rho: DensityMatrix, partition: Partition, q: float) -> float:
    """Abe-Rajagopal q-conditional entropy ``(1 - Tr rho^q / Tr rho_Y^q) / (q - 1)``."""
    _check_q(q)
    if q == 1:
        return vn_conditional(rho, partition)
    log_ratio = log_trace_power(rho, q) - log_trace_power(conditioning_marginal(rho, partition), q)
    return (1.0 - _exp(log_ratio)) / (q - 1.0)


def cstre_sign_value(rho: DensityMatrix, partition: Partition, q: float) -> float:
    """Same sign as :func:`cstre` but O(1) in magnitude at large ``q``.

    Returns ``log(Q_tilde) / (1 - q)``; at ``q = 1`` the von Neumann
    conditional entropy.
    """
    if q == 1:
        return vn_conditional(rho, partition)
    return cstre(rho, partition, q).log_q_tilde / (1.0 - q)


def ar_sign_value(rho: DensityMatrix, partition: Partition, q: float) -> float:
    """Same sign as :func:`ar_q_conditional`: ``(log Tr rho_Y^q - log Tr rho^q) / (q - 1)``."""
    _check_q(q)
    if q == 1:
        return vn_conditional(rho, partition)
    log_joint = log_trace_power(rho, q)
    log_marg = log_trace_power(conditioning_marginal(rho, partition), q)
    return (log_marg - log_joint) / (q - 1.0)
