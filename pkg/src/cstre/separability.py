"""Separability thresholds of the noisy W/GHZ families.

For a criterion and a bipartition, the threshold ``x*`` is the largest
mixing parameter at which the criterion still fails to flag entanglement.
Entropic criteria are evaluated through sign-equivalent log forms so the
root search stays well conditioned at large ``q``.

The ``q -> infinity`` limit is read off a schedule of increasing ``q``.
Zero crossings approach their limit like ``c / q``, so each pair of
consecutive samples is extrapolated to ``1/q = 0`` and the sequence of
extrapolants is tested for convergence.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Sequence

from . import entropy
from .errors import CstreError, NoSignChange
from .qlinalg import DensityMatrix, Partition, eig_hermitian, partial_transpose
from .states import Family, family_matrix, isospectral_pair

WITNESS_TOL = entropy.WITNESS_TOL


class Criterion(str, Enum):
    CSTRE = "cstre"
    AR = "ar"
    VN = "vn"
    PPT = "ppt"

    @classmethod
    def parse(cls, text: str) -> "Criterion":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown criterion {text!r}; expected one of: cstre, ar, vn, ppt") from None


DEFAULT_Q_SCHEDULE = (1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 400.0, 800.0)


@dataclass(frozen=True)
class SweepConfig:
    q_schedule: tuple[float, ...] = DEFAULT_Q_SCHEDULE
    x_bracket: tuple[float, float] = (0.0, 1.0)
    bisection_tol: float = 1e-5
    limit_tol: float = 5e-4
    max_bisections: int = 60
    extrapolate: bool = True

    def __post_init__(self):
        qs = tuple(float(q) for q in self.q_schedule)
        if not qs or any(b <= a for a, b in zip(qs, qs[1:])) or qs[0] <= 0:
            raise ValueError(f"q_schedule must be non-empty, positive and strictly increasing: {qs}")
        lo, hi = self.x_bracket
        if not 0.0 <= lo < hi <= 1.0:
            raise ValueError(f"x_bracket must satisfy 0 <= lo < hi <= 1, got {self.x_bracket}")
        if self.bisection_tol <= 0 or self.limit_tol <= 0 or self.max_bisections < 1:
            raise ValueError("tolerances must be positive and max_bisections >= 1")
        object.__setattr__(self, "q_schedule", qs)


@dataclass
class ThresholdReport:
    family: Family
    n_qubits: int
    partition: Partition
    criterion: Criterion
    x_star: float | None
    converged: bool
    q_at_convergence: float | None = None
    samples: list[tuple[float, float]] = field(default_factory=list)
    x_last: float | None = None
    message: str | None = None

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "n_qubits": self.n_qubits,
            "partition": self.partition.label,
            "criterion": self.criterion.value,
            "x_star": self.x_star,
            "converged": self.converged,
            "q_at_convergence": self.q_at_convergence,
            "x_last": self.x_last,
            "message": self.message,
            "samples": [{"q": q, "x_star": x} for q, x in self.samples],
        }


def ppt_min_eigenvalue(rho: DensityMatrix, partition: Partition) -> float:
    """Smallest eigenvalue of the partial transpose over the smaller side.

    On a tie the conditioning side is transposed.
    """
    side = partition.conditioning
    if len(partition.remainder) < len(side):
        side = partition.remainder
    pt = partial_transpose(rho, side)
    return float(eig_hermitian(pt).eigenvalues[0])


def _state(family: Family, n: int, x: float) -> DensityMatrix:
    # Analytic family members are valid by construction; skip the eigen check.
    return DensityMatrix._trusted(family_matrix(family, n, x), n)


def criterion_value(rho: DensityMatrix, partition: Partition, criterion: Criterion, q: float = 1.0) -> float:
    """Value of the criterion itself (CSTRE, AR, VN entropies or the PPT minimum eigenvalue)."""
    if criterion is Criterion.CSTRE:
        return entropy.cstre(rho, partition, q).value
    if criterion is Criterion.AR:
        return entropy.ar_q_conditional(rho, partition, q)
    if criterion is Criterion.VN:
        return entropy.vn_conditional(rho, partition)
    return ppt_min_eigenvalue(rho, partition)


def criterion_sign_value(rho: DensityMatrix, partition: Partition, criterion: Criterion, q: float = 1.0) -> float:
    """A quantity with the same sign as :func:`criterion_value`, safe at large ``q``."""
    if criterion is Criterion.CSTRE:
        return entropy.cstre_sign_value(rho, partition, q)
    if criterion is Criterion.AR:
        return entropy.ar_sign_value(rho, partition, q)
    return criterion_value(rho, partition, criterion, q)


def _bisect(f: Callable[[float], float], cfg: SweepConfig) -> float:
    lo, hi = cfg.x_bracket
    f_lo, f_hi = f(lo), f(hi)
    if f_lo < -WITNESS_TOL or not f_hi < -WITNESS_TOL:
        raise NoSignChange(
            f"criterion does not go from non-negative at x={lo} to negative at x={hi} "
            f"(values {f_lo:.6g}, {f_hi:.6g})", f_lo, f_hi)
    for _ in range(cfg.max_bisections):
        if hi - lo <= cfg.bisection_tol:
            break
        mid = 0.5 * (lo + hi)
        if f(mid) < -WITNESS_TOL:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def zero_crossing_x(family: Family, n_qubits: int, partition: Partition, criterion: Criterion,
                    q: float = 1.0, cfg: SweepConfig | None = None) -> float:
    """Bisect ``x`` in the bracket for the sign change of the criterion at fixed ``q``.

    Raises:
        NoSignChange: the criterion is not non-negative at the lower end and
            negative at the upper end of the bracket.
    """
    cfg = cfg or SweepConfig()
    criterion = Criterion(criterion)
    return _bisect(lambda x: criterion_sign_value(_state(family, n_qubits, x), partition, criterion, q), cfg)


def _extrapolants(samples: Sequence[tuple[float, float]]) -> list[tuple[float, float]]:
    # Two-point extrapolation to 1/q = 0 assuming x(q) = x_inf + c/q.
    out = []
    for (q0, x0), (q1, x1) in zip(samples, samples[1:]):
        out.append((q1, (q1 * x1 - q0 * x0) / (q1 - q0)))
    return out


def _limit_of(samples: list[tuple[float, float]], cfg: SweepConfig):
    seq = _extrapolants(samples) if cfg.extrapolate else list(samples)
    if not seq:
        return None, False, None
    x_star = min(max(seq[-1][1], 0.0), 1.0)
    if len(seq) < 2:
        return x_star, False, None
    q_conv = None
    for (_, a), (q_b, b) in zip(seq, seq[1:]):
        if abs(b - a) < cfg.limit_tol:
            if q_conv is None:
                q_conv = q_b
        else:
            q_conv = None
    return x_star, q_conv is not None, q_conv


def ppt_threshold(family: Family, n_qubits: int, partition: Partition,
                  cfg: SweepConfig | None = None) -> ThresholdReport:
    cfg = cfg or SweepConfig()
    family = Family(family)
    try:
        x = _bisect(lambda x: ppt_min_eigenvalue(_state(family, n_qubits, x), partition), cfg)
    except NoSignChange as exc:
        return ThresholdReport(family, n_qubits, partition, Criterion.PPT, None, False, message=str(exc))
    return ThresholdReport(family, n_qubits, partition, Criterion.PPT, x, True, x_last=x)


def limit_threshold(family: Family, n_qubits: int, partition: Partition, criterion: Criterion,
                    cfg: SweepConfig | None = None) -> ThresholdReport:
    """Threshold in the ``q -> infinity`` limit (VN: the single q=1 crossing; PPT: q-free)."""
    cfg = cfg or SweepConfig()
    family = Family(family)
    criterion = Criterion(criterion)
    if criterion is Criterion.PPT:
        return ppt_threshold(family, n_qubits, partition, cfg)
    if criterion is Criterion.VN:
        try:
            x = zero_crossing_x(family, n_qubits, partition, criterion, 1.0, cfg)
        except NoSignChange as exc:
            return ThresholdReport(family, n_qubits, partition, criterion, None, False, message=str(exc))
        return ThresholdReport(family, n_qubits, partition, criterion, x, True, 1.0, [(1.0, x)], x)

    samples = []
    message = None
    for q in cfg.q_schedule:
        try:
            samples.append((q, zero_crossing_x(family, n_qubits, partition, criterion, q, cfg)))
        except NoSignChange as exc:
            message = f"q={q:g}: {exc}"
            break
    x_star, converged, q_conv = _limit_of(samples, cfg)
    if message is not None:
        converged = False
    elif not converged:
        message = f"limit not converged to {cfg.limit_tol:g} along the q schedule"
    x_last = samples[-1][1] if samples else None
    return ThresholdReport(family, n_qubits, partition, criterion, x_star, converged, q_conv,
                           samples, x_last, message)


TABLE1_ROWS: tuple[tuple[Family, int, str], ...] = (
    (Family.W, 3, "A:BC"), (Family.W, 3, "AB:C"),
    (Family.GHZ, 3, "A:BC"), (Family.GHZ, 3, "AB:C"),
    (Family.W, 4, "A:BCD"), (Family.W, 4, "AB:CD"), (Family.W, 4, "ABC:D"),
    (Family.GHZ, 4, "A:BCD"), (Family.GHZ, 4, "AB:CD"), (Family.GHZ, 4, "ABC:D"),
)
ALL_CRITERIA = (Criterion.VN, Criterion.AR, Criterion.CSTRE, Criterion.PPT)


def _table_job(args):
    family, n, partition, criterion, cfg = args
    return limit_threshold(family, n, partition, criterion, cfg)


def criteria_table(families: Sequence[tuple[Family, int]] | None = None,
                   partitions: Sequence[str] | None = None,
                   criteria: Sequence[Criterion] = ALL_CRITERIA,
                   cfg: SweepConfig | None = None,
                   workers: int | None = None) -> list[ThresholdReport]:
    """Threshold reports for every (family, partition, criterion) combination.

    ``families`` are ``(family, n_qubits)`` pairs; ``partitions`` are
    partition strings applied to each family whose register they fit, or
    all contiguous cuts when omitted.  With both omitted the rows are the
    ten (family, partition) rows of the standard W/GHZ comparison.
    Output order is (family, partition, criterion) in request order and
    does not depend on ``workers``.
    """
    cfg = cfg or SweepConfig()
    criteria = [Criterion(c) for c in criteria]
    rows: list[tuple[Family, int, Partition]] = []
    if families is None and partitions is None:
        rows = [(f, n, Partition.parse(p, n)) for f, n, p in TABLE1_ROWS]
    else:
        if families is None:
            families = sorted({(f, n) for f, n, _ in TABLE1_ROWS}, key=lambda t: (t[1], t[0] != Family.W))
        for fam, n in families:
            fam = Family(fam)
            if partitions is None:
                cuts = Partition.all_cuts(n)
            else:
                cuts = [Partition.parse(p, n) for p in partitions]
            rows.extend((fam, n, p) for p in cuts)
    jobs = [(f, n, p, c, cfg) for f, n, p in rows for c in criteria]
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_table_job, jobs))
    return [_table_job(j) for j in jobs]


def curve_data(family: Family, n_qubits: int, partition: Partition, criterion: Criterion,
               q: float, x_grid: Sequence[float]) -> list[tuple[float, float | None]]:
    """Criterion value at each grid point; points that fail to evaluate give ``None``."""
    criterion = Criterion(criterion)
    out = []
    for x in x_grid:
        try:
            v = criterion_value(_state(Family(family), n_qubits, float(x)), partition, criterion, q)
        except (CstreError, ArithmeticError):
            v = None
        if v is not None and not math.isfinite(v):
            v = None
        out.append((float(x), v))
    return out


@dataclass
class NestingReport:
    family: Family
    n_qubits: int
    partition: Partition
    x_ppt: float | None
    x_cstre: float | None
    x_ar: float | None
    per_q: list[tuple[float, float, float]]
    passed: bool

    def to_dict(self) -> dict:
        return {
            "family": self.family.value, "n_qubits": self.n_qubits, "partition": self.partition.label,
            "x_ppt": self.x_ppt, "x_cstre": self.x_cstre, "x_ar": self.x_ar,
            "per_q": [{"q": q, "cstre": c, "ar": a} for q, c, a in self.per_q],
            "passed": self.passed,
        }


def nesting_check(family: Family, n_qubits: int, partition: Partition, q_list: Sequence[float],
                  cfg: SweepConfig | None = None, slack: float = 1e-3) -> NestingReport:
    """Check ``x*_PPT <= x*_CSTRE <= x*_AR`` on the limits taken along ``q_list``.

    ``per_q`` lists the (q, x*_CSTRE, x*_AR) samples for inspection only;
    at finite q the AR crossing can lie below the CSTRE one.
    """
    cfg = replace(cfg or SweepConfig(), q_schedule=tuple(q_list))
    family = Family(family)
    ppt = ppt_threshold(family, n_qubits, partition, cfg)
    cs = limit_threshold(family, n_qubits, partition, Criterion.CSTRE, cfg)
    ar = limit_threshold(family, n_qubits, partition, Criterion.AR, cfg)
    ar_by_q = dict(ar.samples)
    per_q = [(q, x, ar_by_q[q]) for q, x in cs.samples if q in ar_by_q]
    passed = None not in (ppt.x_star, cs.x_star, ar.x_star)
    if passed:
        passed = ppt.x_star <= cs.x_star + slack and cs.x_star <= ar.x_star + slack
    return NestingReport(family, n_qubits, partition, ppt.x_star, cs.x_star, ar.x_star, per_q, bool(passed))


ISOSPECTRAL_QS = (1.1, 1.5, 2.0, 3.0, 5.0, 10.0)


@dataclass
class IsospectralReport:
    qs: tuple[float, ...]
    entangled_values: list[float]
    separable_values: list[float]
    entangled_q1: float
    separable_q1: float
    entangled_detected: bool
    separable_consistent: bool

    def to_dict(self) -> dict:
        return {
            "rows": [{"q": q, "entangled": e, "separable": s}
                     for q, e, s in zip(self.qs, self.entangled_values, self.separable_values)],
            "q1": {"entangled": self.entangled_q1, "separable": self.separable_q1},
            "entangled_detected": self.entangled_detected,
            "separable_consistent": self.separable_consistent,
        }


def isospectral_verdict(qs: Sequence[float] = ISOSPECTRAL_QS, zero_tol: float = 1e-10) -> IsospectralReport:
    """CSTRE of the isospectral pair (conditioning on qubit 1) over ``qs``.

    The entangled member is detected when every value is below
    ``-WITNESS_TOL``; the separable member is consistent when every value
    is within ``zero_tol`` of 0.
    """
    ent, sep = isospectral_pair()
    part = Partition(2, (1,))
    ev = [entropy.cstre(ent, part, q).value for q in qs]
    sv = [entropy.cstre(sep, part, q).value for q in qs]
    return IsospectralReport(
        tuple(qs), ev, sv,
        entropy.vn_conditional(ent, part), entropy.vn_conditional(sep, part),
        all(v < -WITNESS_TOL for v in ev),
        all(abs(v) < zero_tol for v in sv),
    )


def monotone_violations(samples: Sequence[tuple[float, float]], slack: float) -> list[tuple[float, float]]:
    """Pairs of consecutive ``q`` where ``x*(q)`` increases by more than ``slack``."""
    return [(q1, x1 - x0) for (_, x0), (q1, x1) in zip(samples, samples[1:]) if x1 > x0 + slack]

