"""Configurable machine model: quantized coupling matrix, SHIL source, sync gate.

The coupling hardware is emulated as a plane of digital-potentiometer codes
(magnitude) plus a sign plane; the two-summer chain's implicit sign reversal
and its re-inversion cancel, so the net drive seen by oscillator i is
``+sum_j w_ij * out_j + SHIL`` with ``w = global_scale * sign * dequantized``.
Both dynamics backends read that net weight matrix from here.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .problems import Graph

DEFAULT_F0_HZ = 3800.0
DEFAULT_GLOBAL_SCALE = 0.2
DEFAULT_QUANTIZER_BITS = 10

# SHIL injection strength used when ShilConfig.amplitude is left unset:
# a fixed dimensionless strength, capped at a fraction of the largest
# coupling row sum.  The cap keeps a sparsely coupled machine (in the
# limit, a single pair) far from the regime where SHIL stabilizes the
# spurious in-phase state, which is locally stable whenever the SHIL
# strength exceeds the pair's coupling weight.
DEFAULT_SHIL_STRENGTH = 0.1
SHIL_ROWSUM_FRACTION = 0.15


@dataclass(frozen=True)
class Quantizer:
    """Uniform quantizer emulating a digital potentiometer."""

    bits: int = DEFAULT_QUANTIZER_BITS
    full_scale: float = 1.0

    def __post_init__(self):
        if not 1 <= self.bits <= 16:
            raise ValueError(f"bits must be in 1..16, got {self.bits}")
        if not self.full_scale > 0:
            raise ValueError("full_scale must be positive")

    @property
    def max_code(self) -> int:
        return (1 << self.bits) - 1

    def quantize(self, w: float) -> int:
        """Weight in [0, full_scale] -> integer code, ties rounded half-up."""
        if not 0.0 <= w <= self.full_scale:
            raise ValueError(f"weight {w} outside [0, {self.full_scale}]")
        return int(np.floor(w / self.full_scale * self.max_code + 0.5))

    def dequantize(self, code: int) -> float:
        if not 0 <= code <= self.max_code:
            raise ValueError(f"code {code} outside [0, {self.max_code}]")
        return code / self.max_code * self.full_scale


@dataclass(frozen=True)
class CouplingMatrix:
    """Potentiometer codes (magnitude plane) plus a sign plane."""

    n: int
    codes: np.ndarray
    signs: np.ndarray
    quantizer: Quantizer = field(default_factory=Quantizer)
    symmetric: bool = True

    def __post_init__(self):
        codes = np.array(self.codes, dtype=int)
        signs = np.array(self.signs, dtype=int)
        if codes.shape != (self.n, self.n) or signs.shape != (self.n, self.n):
            raise ValueError("codes and signs must be n x n")
        if codes.min() < 0 or codes.max() > self.quantizer.max_code:
            raise ValueError(f"codes must lie in [0, {self.quantizer.max_code}]")
        if not np.isin(signs, (-1, 0, 1)).all():
            raise ValueError("signs must be -1, 0 or +1")
        if np.any(np.diag(codes) != 0) or np.any(np.diag(signs) != 0):
            raise ValueError("no self-coupling: diagonal must be zero")
        if self.symmetric and not (
            np.array_equal(codes, codes.T) and np.array_equal(signs, signs.T)
        ):
            raise ValueError("symmetric flag set but planes are not symmetric")
        codes.setflags(write=False)
        signs.setflags(write=False)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "signs", signs)

    @classmethod
    def zeros(cls, n: int, quantizer: Quantizer | None = None) -> "CouplingMatrix":
        q = quantizer or Quantizer()
        return cls(n=n, codes=np.zeros((n, n), int), signs=np.zeros((n, n), int), quantizer=q)


@dataclass(frozen=True)
class ShilConfig:
    """Second-harmonic injection source.

    ``amplitude`` is the dimensionless injection strength; leave it None to
    use the per-problem default rule (see ``resolve_shil_strength``).
    """

    frequency_ratio: float = 2.0
    amplitude: float | None = None
    enabled: bool = True

    def __post_init__(self):
        if self.frequency_ratio != 2.0:
            raise ValueError("frequency_ratio is fixed at 2.0")
        if self.amplitude is not None and self.amplitude < 0:
            raise ValueError("amplitude must be >= 0")


@dataclass(frozen=True)
class MachineConfig:
    """Complete machine state shared by both dynamics backends."""

    n: int
    coupling: CouplingMatrix
    global_scale: float = DEFAULT_GLOBAL_SCALE
    shil: ShilConfig = field(default_factory=ShilConfig)
    sync_enabled: bool = False
    f0: float = DEFAULT_F0_HZ
    detuning: tuple[float, ...] = ()
    noise_sigma: float = 0.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two oscillators")
        if self.coupling.n != self.n:
            raise ValueError("coupling matrix size does not match oscillator count")
        if self.f0 <= 0:
            raise ValueError("f0 must be positive")
        if self.global_scale < 0:
            raise ValueError("global_scale must be >= 0")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        det = tuple(float(d) for d in (self.detuning or (0.0,) * self.n))
        if len(det) != self.n:
            raise ValueError("detuning must list one offset per oscillator")
        object.__setattr__(self, "detuning", det)


def build_coupling(g: Graph, quantizer: Quantizer | None = None) -> CouplingMatrix:
    """Quantize a graph's weights into code/sign planes.

    Magnitudes are normalized so the largest |weight| uses the full code
    range; negative weights go through the sign plane.
    """
    q = quantizer or Quantizer()
    n = g.n
    codes = np.zeros((n, n), dtype=int)
    signs = np.zeros((n, n), dtype=int)
    if g.edges:
        wmax = max(abs(w) for _, _, w in g.edges)
        for u, v, w in g.edges:
            if w == 0.0:
                continue
            code = q.quantize(abs(w) / wmax * q.full_scale)
            sign = 1 if w > 0 else -1
            codes[u - 1, v - 1] = codes[v - 1, u - 1] = code
            signs[u - 1, v - 1] = signs[v - 1, u - 1] = sign
    return CouplingMatrix(n=n, codes=codes, signs=signs, quantizer=q)


def build_machine(
    g: Graph,
    global_scale: float = DEFAULT_GLOBAL_SCALE,
    quantizer: Quantizer | None = None,
    shil: ShilConfig | None = None,
    f0: float = DEFAULT_F0_HZ,
    detuning: tuple[float, ...] = (),
    noise_sigma: float = 0.0,
) -> MachineConfig:
    """Machine sized for the given graph, sync initially off (protocol step 1)."""
    coupling = build_coupling(g, quantizer)
    return MachineConfig(
        n=g.n,
        coupling=coupling,
        global_scale=global_scale,
        shil=shil or ShilConfig(),
        sync_enabled=False,
        f0=f0,
        detuning=detuning,
        noise_sigma=noise_sigma,
    )


def effective_weights(m: MachineConfig) -> np.ndarray:
    """Net coupling weights w_ij = global_scale * sign * dequantized code.

    This already includes the summer chain's double inversion (net positive
    sum); it does not apply the sync gate, which the dynamics handle.
    """
    q = m.coupling.quantizer
    mags = m.coupling.codes / q.max_code * q.full_scale
    return m.global_scale * m.coupling.signs * mags


def resolve_shil_strength(m: MachineConfig) -> float:
    """Dimensionless SHIL injection strength for the phase model.

    Explicit amplitudes pass through; the default is DEFAULT_SHIL_STRENGTH
    capped at SHIL_ROWSUM_FRACTION times the largest coupling row sum.  An
    unprogrammed machine (all weights zero) keeps the full default so SHIL
    alone still binarizes the phases.
    """
    if not m.shil.enabled:
        return 0.0
    if m.shil.amplitude is not None:
        return float(m.shil.amplitude)
    rowsum = float(np.abs(effective_weights(m)).sum(axis=1).max())
    if rowsum == 0.0:
        return DEFAULT_SHIL_STRENGTH
    return min(DEFAULT_SHIL_STRENGTH, SHIL_ROWSUM_FRACTION * rowsum)


def set_sync(m: MachineConfig, on: bool) -> MachineConfig:
    """Gate every sync input at once; off means zero coupling and zero SHIL."""
    return dataclasses.replace(m, sync_enabled=bool(on))


def set_global_scale(m: MachineConfig, scale: float) -> MachineConfig:
    return dataclasses.replace(m, global_scale=float(scale))
