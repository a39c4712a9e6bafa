"""Fourier states of qubit registers: construction, basis conversion, spectra.

An n-qubit Fourier state with index k is the register state whose amplitude
on computational basis state |y> is exp(2*pi*i*k*y/N)/sqrt(N), N = 2**n.
Qubit 0 is the most significant bit of y throughout the package, and the
transform sign convention is fixed by that definition (positive exponent in
the state, so the analysis transform carries the negative exponent).

The module also provides the Clifford-reachable approximation of the k=1
state (phase staircase with two bits of phase resolution), its Fourier-series
coefficients, and the aliasing fold that connects series coefficients to the
discrete spectrum.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import CapacityError

#: Default cap on dense amplitude vectors (2**22 complex values, ~64 MB).
AMPLITUDE_CAP_DEFAULT = 22
#: Environment variable overriding the amplitude cap.
AMPLITUDE_CAP_ENV = "FOURIERDISTILL_AMP_CAP"

NORM_TOL = 1e-10


def amplitude_cap() -> int:
    """Current cap on n for dense amplitude vectors."""
    raw = os.environ.get(AMPLITUDE_CAP_ENV)
    return int(raw) if raw else AMPLITUDE_CAP_DEFAULT


def require_register_size(n: int, *, cap: int | None = None) -> None:
    """Validate 1 <= n <= amplitude cap for dense-vector use."""
    if n < 1:
        raise ValueError(f"register size must be positive, got {n}")
    limit = amplitude_cap() if cap is None else cap
    if n > limit:
        raise CapacityError(
            f"n={n} exceeds the amplitude-vector cap {limit}; "
            f"use the sparse spectral engine or raise {AMPLITUDE_CAP_ENV}"
        )


def _register_bits(length: int) -> int:
    n = length.bit_length() - 1
    if length != 1 << n or n < 1:
        raise ValueError(f"array length {length} is not 2**n for n >= 1")
    return n


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class StateVector:
    """Complex amplitudes over the computational basis of an n-qubit register."""

    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        _register_bits(len(amps))
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: sum |amps|^2 = {norm!r}")
        object.__setattr__(self, "amps", _frozen(amps))

    @property
    def n(self) -> int:
        return len(self.amps).bit_length() - 1

    @property
    def dim(self) -> int:
        return len(self.amps)

    def to_json_obj(self) -> dict:
        """JSON form: amplitudes as [re, im] pairs in index order y = 0..N-1."""
        return {
            "n": self.n,
            "amps": [[float(a.real), float(a.imag)] for a in self.amps],
        }


@dataclass(frozen=True)
class FourierAmplitudes:
    """Complex coefficients of a state expanded over Fourier states j = 0..N-1."""

    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        _register_bits(len(coeffs))
        norm = float(np.sum(np.abs(coeffs) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"coefficients not normalized: sum = {norm!r}")
        object.__setattr__(self, "coeffs", _frozen(coeffs))

    @property
    def n(self) -> int:
        return len(self.coeffs).bit_length() - 1

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def spectrum(self) -> "FourierSpectrum":
        return FourierSpectrum(np.abs(self.coeffs) ** 2)


@dataclass(frozen=True)
class FourierSpectrum:
    """Non-negative weights |coefficient|^2 over Fourier indices j = 0..N-1."""

    weights: np.ndarray

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float)
        _register_bits(len(weights))
        if np.any(weights < -1e-12):
            raise ValueError("spectrum weights must be non-negative")
        weights = np.clip(weights, 0.0, None)
        total = float(weights.sum())
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"spectrum weights must sum to 1, got {total!r}")
        object.__setattr__(self, "weights", _frozen(weights))

    @property
    def n(self) -> int:
        return len(self.weights).bit_length() - 1

    @property
    def dim(self) -> int:
        return len(self.weights)

    def weight(self, j: int) -> float:
        return float(self.weights[j % self.dim])

    def dominant_index(self) -> int:
        return int(np.argmax(self.weights))

    def to_json_obj(self) -> dict:
        return {"n": self.n, "weights": [float(w) for w in self.weights]}


def pure_fourier_state(n: int, k: int) -> StateVector:
    """The n-qubit Fourier state with index k (k taken mod 2**n)."""
    require_register_size(n)
    N = 1 << n
    if not 0 <= k < N:
        k %= N
    y = np.arange(N)
    return StateVector(np.exp(2j * np.pi * k * y / N) / math.sqrt(N))


def rotation_angles(n: int, k: int) -> np.ndarray:
    """Per-qubit rotation arguments phi[m] = k / 2**m for the product form.

    Written as a product of single-qubit states, Fourier state k applies the
    rotation diag(1, exp(i*pi*phi[m])) to qubit m on top of |+>, with qubit 0
    the most significant.  phi[0] = k gives the Z-like rotation on the top
    qubit, phi[1] = k/2 the S-like rotation, and so on.
    """
    if n < 1:
        raise ValueError("n must be positive")
    return k / np.exp2(np.arange(n))


def approx_initial_state(n: int) -> StateVector:
    """Clifford-only approximation of the fundamental (k=1) Fourier state.

    Qubit 0 carries a Z rotation, qubit 1 an S rotation, all remaining qubits
    stay in |+>.  Equivalently the amplitudes sample a piecewise-constant
    phase function with four steps: i**q / sqrt(N) with q the top two bits.
    """
    if n < 2:
        raise ValueError("approximate initial state needs n >= 2")
    require_register_size(n)
    N = 1 << n
    quarter_phases = np.array([1, 1j, -1, -1j])
    return StateVector(np.repeat(quarter_phases, N // 4) / math.sqrt(N))


@dataclass(frozen=True)
class PhaseFunctionSpec:
    """Staircase phase model: resolution_bits samples, phase_bits of phase.

    phase_bits = 2 reproduces the Z,S-only approximate initial state.
    """

    resolution_bits: int
    phase_bits: int

    def __post_init__(self):
        if self.resolution_bits < 1 or self.phase_bits < 1:
            raise ValueError("resolution_bits and phase_bits must be positive")
        if self.phase_bits > self.resolution_bits:
            raise ValueError("phase_bits cannot exceed resolution_bits")


def phase_staircase_state(spec: PhaseFunctionSpec) -> StateVector:
    """State whose amplitude at |y> is exp(2*pi*i * floor(2**b * y/N) / 2**b)."""
    n, b = spec.resolution_bits, spec.phase_bits
    require_register_size(n)
    N = 1 << n
    q = (np.arange(N) << b) >> n
    return StateVector(np.exp(2j * np.pi * q / (1 << b)) / math.sqrt(N))


def to_fourier_basis(s: StateVector) -> FourierAmplitudes:
    """Expand a state over the orthonormal Fourier-state basis.

    coeffs[j] = <fourier_j | s>, i.e. the forward transform with negative
    exponent, computed by FFT.
    """
    return FourierAmplitudes(np.fft.fft(s.amps) / math.sqrt(s.dim))


def from_fourier_basis(a: FourierAmplitudes) -> StateVector:
    """Exact inverse of :func:`to_fourier_basis`."""
    return StateVector(np.fft.ifft(a.coeffs) * math.sqrt(a.dim))


def dft_direct(s: StateVector) -> FourierAmplitudes:
    """O(N^2) transform kept as an independent cross-check for the FFT path.

    Capped at n = 10; use :func:`to_fourier_basis` for real work.
    """
    require_register_size(s.n, cap=10)
    N = s.dim
    jy = np.outer(np.arange(N), np.arange(N))
    w = np.exp(-2j * np.pi * jy / N) / math.sqrt(N)
    return FourierAmplitudes(w @ s.amps)


def spectrum_of(s: StateVector) -> FourierSpectrum:
    """Fourier-basis weights of a state."""
    return to_fourier_basis(s).spectrum()


def series_coefficient(j: int) -> complex:
    """Fourier-series coefficient of the two-bit staircase phase function.

    Nonzero only for harmonics j = 1 (mod 4), including negative j, where it
    equals (2 - 2i)/(pi*j).  The j = 0 coefficient vanishes.
    """
    if j % 4 != 1:
        return 0j
    return (2 - 2j) / (math.pi * j)


def series_weight(j: int) -> float:
    """Squared magnitude of :func:`series_coefficient`: 8/(pi*j)^2 on support."""
    if j % 4 != 1:
        return 0.0
    return 8.0 / (math.pi * j) ** 2


def sin_pi_frac(j: int, N: int) -> float:
    """|sin(pi * j / N)| for integer j, exact under the mod-N fold.

    Reduces j mod N to the half-period first so that huge or negative j
    (arbitrary-precision ints) lose no precision in the float division.
    """
    m = j % N
    m = min(m, N - m)
    return math.sin(math.pi * (m / N))


def initial_state_weight(n: int, j: int) -> float:
    """Exact Fourier weight of the approximate initial state at index j.

    Closed form of the fully aliased series sum: 8 / (N*sin(pi*j/N))**2 for
    j = 1 (mod 4) and zero elsewhere.  Valid for signed j and for n beyond
    the amplitude cap; approaches series_weight(j) as n grows.
    """
    if n < 2:
        raise ValueError("initial state weights need n >= 2")
    if j % 4 != 1:
        return 0.0
    N = 1 << n
    return 8.0 / (N * sin_pi_frac(j, N)) ** 2


def log_initial_state_weight(n: int, j: int) -> float:
    """Natural log of :func:`initial_state_weight` on its support."""
    if n < 2:
        raise ValueError("initial state weights need n >= 2")
    if j % 4 != 1:
        raise ValueError("initial state has no weight at j != 1 (mod 4)")
    N = 1 << n
    return math.log(8.0) - 2.0 * (n * math.log(2.0) + math.log(sin_pi_frac(j, N)))


def alias_fold(n: int, series: Callable[[int], complex], j_max: int) -> tuple[FourierAmplitudes, float]:
    """Fold a Fourier series onto the N-point discrete spectrum.

    Discrete sampling aliases harmonic N*x + j onto index j, so the discrete
    coefficient is the sum of the series over the aliasing class, truncated
    to |N*x + j| <= j_max and then renormalized.  Returns the folded
    amplitudes together with the truncated tail mass (series weight outside
    the truncation window, assuming the full series has unit mass).

    Note on conventions: a Fourier series converges to jump midpoints, so
    for a discontinuous phase staircase sampled exactly at its jumps the
    fold reproduces the midpoint-sampled transform.  Against the state's
    right-limit samples (``approx_initial_state``) the folded weights agree
    only to O(1/N); per-harmonic ratios match the closed form
    (2-2i)/N * cot(pi*j/N) to truncation accuracy.
    """
    N = 1 << n
    if j_max < N:
        raise ValueError(f"j_max must be at least N = {N}")
    coeffs = np.zeros(N, dtype=complex)
    kept_mass = 0.0
    for j in range(N):
        x_lo = -((j_max + j) // N)
        x_hi = (j_max - j) // N
        total = 0j
        for x in range(x_lo, x_hi + 1):
            c = complex(series(N * x + j))
            total += c
            kept_mass += abs(c) ** 2
        coeffs[j] = total
    tail_mass = max(0.0, 1.0 - kept_mass)
    norm = math.sqrt(float(np.sum(np.abs(coeffs) ** 2)))
    if norm < 1e-150:
        raise ValueError("series is zero on the truncation window")
    return FourierAmplitudes(coeffs / norm), tail_mass


def fidelity(s: StateVector, n: int, k: int) -> float:
    """Squared overlap of a state with the pure Fourier state of index k."""
    if s.n != n:
        raise ValueError(f"dimension mismatch: state has n={s.n}, expected {n}")
    N = s.dim
    y = np.arange(N)
    overlap = np.sum(np.exp(-2j * np.pi * (k % N) * y / N) * s.amps) / math.sqrt(N)
    return float(abs(overlap) ** 2)


def fidelity_threshold(n: int) -> float:
    """Error target sin^2(pi/2**n) for an n-qubit Fourier-state resource.

    A register meeting this bound leaves rotation errors dominated by the
    n-bit angle truncation rather than by state impurity.
    """
    if n < 1:
        raise ValueError("n must be positive")
    return math.sin(math.pi / (1 << n)) ** 2


def log_fidelity_threshold(n: int) -> float:
    """Natural log of :func:`fidelity_threshold`, stable for very large n."""
    if n < 1:
        raise ValueError("n must be positive")
    if n <= 50:
        return math.log(fidelity_threshold(n))
    # sin(x) = x to double precision once x < 2**-26
    return 2.0 * (math.log(math.pi) - n * math.log(2.0))
