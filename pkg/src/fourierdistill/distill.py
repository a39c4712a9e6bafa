"""Postselected distillation of Fourier states and the multi-round protocol.

One distillation step adds one register into another and keeps the output
only when the first register verifies as the index-0 Fourier state.  In the
Fourier basis the step multiplies the coefficient spectra of its two inputs
pointwise, so for identical ("symmetric") inputs every weight is squared and
renormalized; sidebands of the dominant harmonic are suppressed
super-exponentially in the round number.

Two engines run the full protocol tree:

* an exact engine on dense amplitude vectors (ground truth, small n), and
* a sparse spectral engine holding log-weights of a truncated harmonic set,
  which reproduces the exact engine at small n and scales past n = 100.

Register growth between rounds appends |+> qubits on the least significant
side.  In the frequency domain this is a zero-order hold: each coarse
harmonic spreads over a fixed aliasing class of the fine register with
weights given by :func:`extension_kernel_weight`.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DegenerateInputError, PrecisionWarning
from .fourier import (
    FourierAmplitudes,
    FourierSpectrum,
    StateVector,
    approx_initial_state,
    fidelity_threshold,
    from_fourier_basis,
    log_fidelity_threshold,
    log_initial_state_weight,
    require_register_size,
    sin_pi_frac,
    to_fourier_basis,
)

NEG_INF = float("-inf")

#: Default harmonic budget of the sparse engine.
DEFAULT_MAX_HARMONICS = 4096

#: Default starting register size: one round of distillation is accurate to
#: about five bits, so five-qubit inputs make full use of the first round.
DEFAULT_S0 = 5

#: Default padding of the final register beyond the target precision,
#: compensating for truncated intermediate registers.
DEFAULT_PAD = 2

_P_FLOOR = 1e-300


def _logsumexp(values) -> float:
    vals = [v for v in values if v != NEG_INF]
    if not vals:
        return NEG_INF
    m = max(vals)
    return m + math.log(sum(math.exp(v - m) for v in vals))


def _signed_index(j: int, N: int) -> int:
    """Canonical signed harmonic index in (-N/2, N/2]."""
    m = j % N
    return m - N if m > N // 2 else m


@dataclass(frozen=True)
class DistillationOutcome:
    """Result of one postselected distillation step."""

    p_success: float
    output: object  # FourierSpectrum, FourierAmplitudes, or SparseSpectrum
    fidelity: float
    error: float
    log_error: float = NEG_INF  # natural log; resolves errors below float eps

    def __post_init__(self):
        if not 0.0 < self.p_success <= 1.0 + 1e-12:
            raise ValueError(f"success probability out of range: {self.p_success}")


@dataclass(frozen=True)
class ProtocolSchedule:
    """Per-round register sizes for the multi-round distillation tree."""

    n_target: int
    s0: int
    pad: int
    sizes: tuple[int, ...]
    note: str | None = None

    def __post_init__(self):
        if not self.sizes:
            raise ValueError("schedule needs at least one round")
        if any(b < a for a, b in zip(self.sizes, self.sizes[1:])):
            raise ValueError("round sizes must be non-decreasing")
        if max(self.sizes) > self.n_target + self.pad:
            raise ValueError("round sizes exceed the padded target")

    @property
    def rounds(self) -> int:
        return len(self.sizes)

    @property
    def width_qubits(self) -> int:
        """Logical circuit width: two registers at the largest round size."""
        return 2 * max(self.sizes)


class SparseSpectrum:
    """Truncated harmonic spectrum in log space, for registers of any size.

    ``log_weights`` maps signed harmonic index (arbitrary-precision int) to
    the natural log of its weight.  ``log_tail`` bounds the total mass of
    everything truncated away; it is transported through every operation and
    never silently dropped.
    """

    __slots__ = ("n", "log_weights", "log_tail")

    def __init__(self, n: int, log_weights: dict[int, float], log_tail: float = NEG_INF):
        if n < 1:
            raise ValueError("register size must be positive")
        if not log_weights:
            raise ValueError("sparse spectrum needs at least one harmonic")
        total = math.exp(_logsumexp(list(log_weights.values()) + [log_tail]))
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"sparse spectrum mass must be 1, got {total!r}")
        self.n = n
        self.log_weights = dict(log_weights)
        self.log_tail = log_tail

    @property
    def dim(self):
        return 1 << self.n

    @property
    def tail_mass(self) -> float:
        return math.exp(self.log_tail) if self.log_tail != NEG_INF else 0.0

    def weight(self, j: int) -> float:
        lw = self.log_weights.get(_signed_index(j, self.dim), NEG_INF)
        return math.exp(lw) if lw != NEG_INF else 0.0

    def weights(self) -> dict[int, float]:
        return {j: math.exp(lw) for j, lw in self.log_weights.items()}

    def dominant_index(self) -> int:
        return max(self.log_weights, key=self.log_weights.get)

    def __len__(self):
        return len(self.log_weights)

    def __repr__(self):
        return (f"SparseSpectrum(n={self.n}, harmonics={len(self)}, "
                f"tail_mass={self.tail_mass:.3e})")


def initial_sparse_spectrum(n: int, max_harmonics: int = DEFAULT_MAX_HARMONICS) -> SparseSpectrum:
    """Sparse form of the approximate initial state's exact Fourier weights.

    Harmonics live at signed j = 1 (mod 4); they are kept in order of
    decreasing weight (increasing |j|) up to ``max_harmonics``, remainder in
    the tail.  With max_harmonics >= 2**n / 4 the spectrum is exact.
    """
    if n < 2:
        raise ValueError("initial spectrum needs n >= 2")
    count = min((1 << n) // 4, max_harmonics)
    log_weights: dict[int, float] = {}
    kept = 0.0
    t = 0
    while len(log_weights) < count:
        for j in (4 * t + 1, -(4 * t + 3)):
            if len(log_weights) >= count:
                break
            lw = log_initial_state_weight(n, j)
            log_weights[j] = lw
            kept += math.exp(lw)
        t += 1
    tail = max(0.0, 1.0 - kept) if count < (1 << n) // 4 else 0.0
    return SparseSpectrum(n, log_weights, math.log(tail) if tail > 0 else NEG_INF)


def distill_pair(a, a2, target_k: int = 1) -> DistillationOutcome:
    """One distillation step for two input spectra (or coefficient vectors).

    Success probability is the overlap sum of the two weight spectra; the
    output spectrum is their pointwise product renormalized.  Amplitude-level
    inputs keep complex phases (coefficients multiply, scaled by sqrt of the
    success probability).
    """
    if type(a) is not type(a2):
        raise TypeError("inputs must both be spectra or both be amplitude vectors")
    if a.n != a2.n:
        raise ValueError(f"register sizes differ: {a.n} vs {a2.n}")
    k = target_k % a.dim
    if isinstance(a, FourierAmplitudes):
        product = a.coeffs * a2.coeffs
        p = float(np.sum(np.abs(product) ** 2))
        if p < _P_FLOOR:
            raise DegenerateInputError("input spectra are disjoint: success probability is zero")
        out = FourierAmplitudes(product / math.sqrt(p))
        fid = float(abs(out.coeffs[k]) ** 2)
    elif isinstance(a, FourierSpectrum):
        product = a.weights * a2.weights
        p = float(product.sum())
        if p < _P_FLOOR:
            raise DegenerateInputError("input spectra are disjoint: success probability is zero")
        out = FourierSpectrum(product / p)
        fid = float(out.weights[k])
    else:
        raise TypeError(f"unsupported input type {type(a).__name__}")
    err = 1.0 - fid
    return DistillationOutcome(p, out, fid, err, math.log(err) if err > 0 else NEG_INF)


def symmetric_round(a, target_k: int = 1) -> DistillationOutcome:
    """Distillation step with two identical inputs."""
    return distill_pair(a, a, target_k)


def repeated_symmetric(a: FourierSpectrum, r: int, target_k: int = 1) -> FourierSpectrum:
    """Spectrum after r successful symmetric rounds at fixed register size.

    Each weight is raised to the power 2**r and the result renormalized;
    computed in log space so large r cannot underflow intermediate values.
    """
    if r < 1:
        raise ValueError("round count must be positive")
    with np.errstate(divide="ignore"):
        lw = np.log(a.weights) * (2.0 ** r)
    lw -= lw.max()
    w = np.exp(lw)
    return FourierSpectrum(w / w.sum())


def extend_register(s: StateVector, n_new: int) -> StateVector:
    """Append |+> qubits on the least significant side up to n_new qubits."""
    if n_new < s.n:
        raise ValueError(f"cannot shrink register from {s.n} to {n_new}")
    require_register_size(n_new)
    if n_new == s.n:
        return s
    pad = 1 << (n_new - s.n)
    return StateVector(np.kron(s.amps, np.full(pad, 1.0 / math.sqrt(pad))))


def extension_kernel_weight(n_coarse: int, n_fine: int, j_fine: int) -> float:
    """Weight the |+>-append step sends to fine harmonic j_fine.

    Appending qubits turns each coarse harmonic j into a staircase signal on
    the fine register, whose spectrum occupies the aliasing class
    j_fine = j (mod 2**n_coarse) with zero-order-hold weights

        sin^2(pi j_fine / 2**n_coarse) / (4**d * sin^2(pi j_fine / 2**n_fine))

    for d appended qubits.  Classes of distinct coarse harmonics are
    disjoint, so weights map independently of coefficient phases.
    """
    if n_fine < n_coarse:
        raise ValueError("fine register must be at least as large as the coarse one")
    Ns = 1 << n_coarse
    if j_fine % Ns == 0:
        # DC member of the class of j = 0: all mass stays at multiples of Nf
        return 1.0 if j_fine % (1 << n_fine) == 0 else 0.0
    num = sin_pi_frac(j_fine, Ns)
    den = (1 << (n_fine - n_coarse)) * sin_pi_frac(j_fine, 1 << n_fine)
    return (num / den) ** 2


def log_extension_kernel_weight(n_coarse: int, n_fine: int, j_fine: int) -> float:
    """Natural log of :func:`extension_kernel_weight` (-inf where it is zero)."""
    Ns = 1 << n_coarse
    if j_fine % Ns == 0:
        return 0.0 if j_fine % (1 << n_fine) == 0 else NEG_INF
    d = n_fine - n_coarse
    return 2.0 * (
        math.log(sin_pi_frac(j_fine, Ns))
        - d * math.log(2.0)
        - math.log(sin_pi_frac(j_fine, 1 << n_fine))
    )


def sparse_extend(sp: SparseSpectrum, n_new: int,
                  max_harmonics: int = DEFAULT_MAX_HARMONICS) -> SparseSpectrum:
    """Frequency-domain form of the |+>-append step on a sparse spectrum.

    Each harmonic spreads over its aliasing class with the zero-order-hold
    kernel.  Classes small enough to enumerate completely are mapped exactly;
    otherwise the members nearest the class maximum are kept and the
    remainder is bounded into the tail (kernel lobes decay as 1/m^2).  The
    result is then pruned to the ``max_harmonics`` heaviest entries, pruned
    mass joining the tail.
    """
    if n_new < sp.n:
        raise ValueError(f"cannot shrink register from {sp.n} to {n_new}")
    if n_new == sp.n:
        return sp
    delta = n_new - sp.n
    Ns, Nf = 1 << sp.n, 1 << n_new
    members = 1 << delta
    budget = max(16, (4 * max_harmonics) // len(sp.log_weights))
    tail_parts = [sp.log_tail]
    candidates: list[tuple[float, int]] = []
    for j, lw in sp.log_weights.items():
        if members <= budget:
            span, complete = members, True
        else:
            span, complete = budget, False
        half = span // 2
        kept_kernel = 0.0
        edge_kernels = []
        for m in range(-half, span - half):
            jf = _signed_index(j + Ns * m, Nf)
            lk = log_extension_kernel_weight(sp.n, n_new, jf)
            if lk == NEG_INF:
                continue
            kept_kernel += math.exp(lk)
            candidates.append((lw + lk, jf))
            if m in (-half, span - half - 1):
                edge_kernels.append(math.exp(lk))
        if not complete:
            # Unenumerated class remainder: the kernel sums to 1 over the
            # whole class, so the deficit is exact when float-resolvable;
            # below resolution, fall back to the 1/m^2 lobe-decay bound.
            deficit = 1.0 - kept_kernel
            rem = deficit if deficit > 1e-13 else sum(edge_kernels) * half
            if rem > 0.0:
                tail_parts.append(lw + math.log(rem))
    candidates.sort(key=lambda item: item[0], reverse=True)
    kept = dict()
    for lw, jf in candidates[:max_harmonics]:
        kept[jf] = lw
    for lw, _ in candidates[max_harmonics:]:
        tail_parts.append(lw)
    return SparseSpectrum(n_new, kept, _logsumexp(tail_parts))


def sparse_symmetric_round(sp: SparseSpectrum, target_k: int = 1) -> DistillationOutcome:
    """Symmetric distillation step on a sparse spectrum, fully in log space.

    The unknown tail squares through the step as well (sum of squares of the
    truncated weights is at most the square of their sum), so the tail bound
    remains valid after postselection.
    """
    doubled = {j: 2.0 * lw for j, lw in sp.log_weights.items()}
    tail2 = 2.0 * sp.log_tail if sp.log_tail != NEG_INF else NEG_INF
    log_p = _logsumexp(list(doubled.values()) + [tail2])
    if log_p == NEG_INF:
        raise DegenerateInputError("spectrum mass vanished; cannot postselect")
    out_lw = {j: lw - log_p for j, lw in doubled.items()}
    out_tail = tail2 - log_p if tail2 != NEG_INF else NEG_INF
    k = _signed_index(target_k, sp.dim)
    if k not in out_lw:
        raise DegenerateInputError(f"target harmonic {k} carries no weight")
    fid = math.exp(out_lw[k])
    log_error = _logsumexp([lw for j, lw in out_lw.items() if j != k] + [out_tail])
    error = math.exp(log_error) if log_error != NEG_INF else 0.0
    return DistillationOutcome(
        p_success=math.exp(log_p),
        output=SparseSpectrum(sp.n, out_lw, out_tail),
        fidelity=fid,
        error=error,
        log_error=log_error,
    )


def rounds_required(n: int) -> int:
    """Rounds of symmetric distillation to push error below sin^2(pi/2**n).

    Each round squares the error and the dominant sideband sits a factor of
    9 below the fundamental, giving

        R = ceil(log2((2n - 2*log2(pi)) / log2(9))).

    Below n = 5 the formula loses meaning; one round (about five accurate
    bits) is returned and schedules flag the case.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n < 5:
        return 1
    arg = (2.0 * n - 2.0 * math.log2(math.pi)) / math.log2(9.0)
    return max(1, math.ceil(math.log2(arg)))


def rounds_required_simplified(n: int) -> int:
    """Constant-folded version ceil(log2(0.63 n - 1.04)) of the round count.

    Agrees with :func:`rounds_required` except where the argument lands on a
    power of two (n = 8 in [6, 100]).
    """
    if n < 4:
        raise ValueError("simplified round count needs 0.63*n - 1.04 > 1")
    return math.ceil(math.log2(0.63 * n - 1.04))


def plan_schedule(n: int, s0: int = DEFAULT_S0, pad: int = DEFAULT_PAD) -> ProtocolSchedule:
    """Round sizes for target precision n: doubling capped at n + pad.

    Sizes double from s0 because each round roughly doubles the number of
    accurate bits.  For n <= s0 the first round already reaches target
    precision, so the schedule is a single flagged round.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if s0 < 2:
        raise ValueError("starting size must be at least 2")
    if pad < 0:
        raise ValueError("pad must be non-negative")
    if n <= s0:
        return ProtocolSchedule(
            n_target=n, s0=s0, pad=pad, sizes=(min(s0, n + pad),),
            note="single round: first round is already accurate to about five bits",
        )
    sizes = [s0]
    for _ in range(rounds_required(n) - 1):
        sizes.append(min(2 * sizes[-1], n + pad))
    return ProtocolSchedule(n_target=n, s0=s0, pad=pad, sizes=tuple(sizes))


@dataclass(frozen=True)
class RoundRecord:
    """Per-round trace entry of a protocol run."""

    size: int
    p_success: float
    fidelity: float
    error: float
    log_error: float = NEG_INF


@dataclass(frozen=True)
class ProtocolResult:
    """Full multi-round protocol outcome with per-round trace."""

    n_target: int
    engine: str
    schedule: ProtocolSchedule
    rounds: tuple[RoundRecord, ...]
    final: DistillationOutcome
    threshold: float
    log_threshold: float
    meets_threshold: bool
    output_state: StateVector | None = field(default=None, repr=False)

    @property
    def final_error(self) -> float:
        return self.final.error

    @property
    def final_log_error(self) -> float:
        return self.final.log_error


def run_protocol_exact(n: int, schedule: ProtocolSchedule | None = None, *,
                       s0: int = DEFAULT_S0, pad: int = DEFAULT_PAD) -> ProtocolResult:
    """Run the full distillation tree on dense amplitude vectors.

    All sibling branches of the tree are identical under analytic
    postselection, so a single path is simulated: initial approximate state,
    then per round a symmetric distillation (coefficients squared, success
    probability recorded) with register extension between rounds.
    """
    if schedule is None:
        schedule = plan_schedule(n, s0, pad)
    biggest = max(schedule.sizes)
    try:
        require_register_size(biggest)
    except CapacityError:
        raise CapacityError(
            f"schedule for n={n} needs {biggest}-qubit amplitude vectors; "
            f"use run_protocol_sparse"
        ) from None
    state = approx_initial_state(schedule.sizes[0])
    records = []
    outcome = None
    for r, size in enumerate(schedule.sizes):
        if r > 0 and size > schedule.sizes[r - 1]:
            state = extend_register(state, size)
        coeffs = to_fourier_basis(state)
        outcome = symmetric_round(coeffs, target_k=1)
        records.append(RoundRecord(size, outcome.p_success, outcome.fidelity,
                                   outcome.error, outcome.log_error))
        state = from_fourier_basis(outcome.output)
    threshold = fidelity_threshold(n)
    return ProtocolResult(
        n_target=n, engine="exact", schedule=schedule, rounds=tuple(records),
        final=outcome, threshold=threshold, log_threshold=log_fidelity_threshold(n),
        meets_threshold=outcome.error <= threshold, output_state=state,
    )


def run_protocol_sparse(n: int, schedule: ProtocolSchedule | None = None, *,
                        s0: int = DEFAULT_S0, pad: int = DEFAULT_PAD,
                        max_harmonics: int = DEFAULT_MAX_HARMONICS) -> ProtocolResult:
    """Run the protocol on the sparse spectral engine (any n, log-space).

    Matches :func:`run_protocol_exact` wherever both run; scales to n = 100
    and beyond because only the heaviest harmonics are tracked, with the
    truncated mass carried as a tail bound.  A precision warning is raised
    if the final tail bound is not negligible against the error target.
    """
    if schedule is None:
        schedule = plan_schedule(n, s0, pad)
    sp = initial_sparse_spectrum(schedule.sizes[0], max_harmonics)
    records = []
    outcome = None
    for r, size in enumerate(schedule.sizes):
        if r > 0 and size > schedule.sizes[r - 1]:
            sp = sparse_extend(sp, size, max_harmonics)
        outcome = sparse_symmetric_round(sp, target_k=1)
        records.append(RoundRecord(size, outcome.p_success, outcome.fidelity,
                                   outcome.error, outcome.log_error))
        sp = outcome.output
    log_threshold = log_fidelity_threshold(n)
    if sp.log_tail > log_threshold + math.log(1e-3):
        warnings.warn(
            f"truncation tail bound exp({sp.log_tail:.2f}) is not negligible "
            f"against the error target for n={n}; raise max_harmonics",
            PrecisionWarning,
            stacklevel=2,
        )
    return ProtocolResult(
        n_target=n, engine="sparse", schedule=schedule, rounds=tuple(records),
        final=outcome, threshold=fidelity_threshold(n), log_threshold=log_threshold,
        meets_threshold=outcome.log_error <= log_threshold,
    )


def trace_json_obj(result: ProtocolResult) -> dict:
    """Trace in the stable JSON schema used by the command-line tools."""
    return {
        "n": result.n_target,
        "engine": result.engine,
        "sizes": list(result.schedule.sizes),
        "note": result.schedule.note,
        "rounds": [
            {
                "round": i + 1,
                "size": rec.size,
                "p_success": rec.p_success,
                "fidelity": rec.fidelity,
                "error": rec.error,
            }
            for i, rec in enumerate(result.rounds)
        ],
        "final_error": result.final_error,
        "final_log2_error": (result.final_log_error / math.log(2.0)
                             if result.final_log_error != NEG_INF else None),
        "threshold": result.threshold,
        "meets_threshold": result.meets_threshold,
    }


TRACE_CSV_HEADER = "round,size,p_success,fidelity,error"


def trace_csv_rows(result: ProtocolResult) -> list[str]:
    """Trace as CSV rows (header first), floats at 12 significant digits."""
    rows = [TRACE_CSV_HEADER]
    for i, rec in enumerate(result.rounds):
        rows.append(f"{i + 1},{rec.size},{rec.p_success:.12g},"
                    f"{rec.fidelity:.12g},{rec.error:.12g}")
    return rows
