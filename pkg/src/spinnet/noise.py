"""Coupling-noise generators: quasi-static Gaussian draws and 1/f^alpha traces.

Quasi-static noise draws one exchange strength per edge from
N(J0, sigma^2) and holds it for the whole realization.  Dynamic noise
builds a per-edge time trace with a 1/f^alpha spectrum, alpha in [1, 3],
synthesised as fractional Brownian motion by spectral shaping: white
Gaussian noise is fractionally integrated in the Fourier domain with the
discrete-integrator amplitude (2 sin(pi f))^(-alpha/2), then normalised
to sample mean 0 and sample standard deviation exactly sigma.  The
averaged periodogram follows 1/f^alpha across the band (the fBm identity
alpha = 2H + 1 with Hurst exponent H = (alpha-1)/2), and alpha = 2 is
exactly a random walk: its increments are white.

Randomness is consumed through explicit streams: an RngStream is the value
(master seed, realization index), and every function draws a fixed,
size-dependent number of variates, so realizations are reproducible and
independent of evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO

import numpy as np

from .hamiltonian import CouplingAssignment
from .topology import QubitGraph

QUASI_STATIC = "quasi_static"
DYNAMIC = "dynamic"


@dataclass(frozen=True)
class NoiseSpec:
    """Noise model parameters; J0 and sigma in 1/t0, dt_noise in t0."""

    kind: str
    j0: float
    sigma: float
    alpha: float | None = None
    dt_noise: float | None = None

    def __post_init__(self):
        if self.kind not in (QUASI_STATIC, DYNAMIC):
            raise ValueError(f"noise kind must be {QUASI_STATIC!r} or {DYNAMIC!r}, "
                             f"got {self.kind!r}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if self.kind == DYNAMIC:
            if self.alpha is None or not 1.0 <= self.alpha <= 3.0:
                raise ValueError(f"dynamic noise needs alpha in [1, 3], got {self.alpha}")
            if self.dt_noise is None or self.dt_noise <= 0:
                raise ValueError("dynamic noise needs a positive trace resolution dt_noise")


@dataclass(frozen=True)
class RngStream:
    """Deterministic stream identity: (master seed, realization index).

    ``generator()`` returns a fresh numpy Generator seeded from the pair,
    so the same stream value always reproduces the same sample sequence.
    """

    master_seed: int
    index: int

    def __post_init__(self):
        if self.master_seed < 0 or self.index < 0:
            raise ValueError("master_seed and index must be non-negative")

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence((self.master_seed, self.index)))


def sample_quasi_static(graph: QubitGraph, spec: NoiseSpec,
                        rng: RngStream | np.random.Generator) -> CouplingAssignment:
    """One independent N(J0, sigma^2) draw per edge, in edge order.

    Internal and link edges are treated identically.
    """
    if spec.kind != QUASI_STATIC:
        raise ValueError(f"expected a {QUASI_STATIC} spec, got {spec.kind}")
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    values = gen.normal(spec.j0, spec.sigma, size=graph.n_edges)
    return CouplingAssignment(graph=graph, values=values)


def hurst_exponent(alpha: float) -> float:
    """Hurst exponent of a 1/f^alpha fBm path: alpha = 2H + 1."""
    if not 1.0 <= alpha <= 3.0:
        raise ValueError(f"alpha must be in [1, 3], got {alpha}")
    return (alpha - 1.0) / 2.0


def _spectral_fbm(n: int, alpha: float, gen: np.random.Generator) -> np.ndarray:
    """Fractional integration of white noise in the Fourier domain.

    Spectral amplitudes (2 sin(pi f))^(-alpha/2) with Hermitian-symmetric
    Gaussian coefficients; the zero mode is dropped.  alpha = 2 is the
    exact discrete random walk.  Always draws 2*(n//2 + 1) standard
    normals, so consumers of a shared generator stay aligned for any
    alpha.
    """
    freqs = np.fft.rfftfreq(n)
    m = len(freqs)
    z = gen.standard_normal(2 * m)
    amp = np.zeros(m)
    amp[1:] = (2.0 * np.sin(np.pi * freqs[1:])) ** (-alpha / 2.0)
    spec = amp * (z[:m] + 1j * z[m:]) / np.sqrt(2.0)
    spec[0] = 0.0
    if n % 2 == 0:
        spec[-1] = amp[-1] * z[m - 1]  # Nyquist coefficient must be real
    return np.fft.irfft(spec, n)


def gen_fbm_trace(alpha: float, n_steps: int, sigma: float,
                  rng: RngStream | np.random.Generator) -> np.ndarray:
    """A 1/f^alpha fluctuation series of length n_steps.

    A fractional-Brownian-motion path (Hurst exponent (alpha-1)/2) with
    exactly 1/f^alpha averaged periodogram, rescaled to sample mean 0 and
    sample standard deviation exactly sigma.  The rescaling is linear, so
    doubling sigma doubles every sample.  Add J0 to obtain a coupling
    trace.
    """
    if n_steps < 2:
        raise ValueError(f"n_steps must be >= 2, got {n_steps}")
    hurst_exponent(alpha)  # range check
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    path = _spectral_fbm(n_steps, alpha, gen)
    path -= path.mean()
    sd = path.std()
    if sd == 0.0:
        return np.zeros(n_steps)
    return sigma * (path / sd)


def sample_dynamic(graph: QubitGraph, spec: NoiseSpec,
                   rng: RngStream | np.random.Generator,
                   t_max: float) -> CouplingAssignment:
    """Independent per-edge coupling traces J0 + fBm covering [0, t_max].

    Traces are sampled every spec.dt_noise; edges consume the stream in
    edge order.
    """
    if spec.kind != DYNAMIC:
        raise ValueError(f"expected a {DYNAMIC} spec, got {spec.kind}")
    if t_max <= 0:
        raise ValueError(f"t_max must be positive, got {t_max}")
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    n_steps = int(np.ceil(t_max / spec.dt_noise - 1e-9)) + 1
    n_steps = max(n_steps, 2)
    traces = np.empty((graph.n_edges, n_steps))
    for e in range(graph.n_edges):
        traces[e] = spec.j0 + gen_fbm_trace(spec.alpha, n_steps, spec.sigma, gen)
    return CouplingAssignment(graph=graph, values=traces, dt=spec.dt_noise)


def dump_trace_csv(trace: np.ndarray, out: IO[str]) -> None:
    """Audit dump of one trace as ``step,value`` lines."""
    out.write("step,value\n")
    for step, value in enumerate(np.asarray(trace, dtype=float)):
        out.write(f"{step},{value:.12g}\n")
