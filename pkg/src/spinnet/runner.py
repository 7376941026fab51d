"""Monte-Carlo experiment orchestration: seeding, aggregation, sweeps.

A realization k of an experiment draws its noise from the deterministic
stream (master_seed, k), builds the Hamiltonian, evolves the initial
state, and records the return probability P(t) (and, if requested, the
half-cut entanglement entropy S(t)).  Realizations are aggregated in
fixed-size chunks reduced in index order, so results are bit-identical
for a given config regardless of how many worker processes are used
(override the worker count with the SPINNET_WORKERS environment
variable).

When no t_max is given the grid extends adaptively: a deterministic pilot
(the first realizations of the same streams) grows the window in 0.5 t0
steps until the pilot's own envelope fit certifies that the decay
completed inside it and agrees with the previous window's fit, capped at
5 t0.  For dynamic noise the pilot uses quasi-static draws of the same
(J0, sigma) as a cheap window proxy.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from typing import IO, Mapping, Sequence

import numpy as np

from .dynamics import (DEFAULT_DT, DEFAULT_DT_STEP, TimeGrid, propagate_dynamic,
                       propagate_static, return_probability_from_weights,
                       spectral_weights)
from .fitting import (EnvelopeFit, EnvelopePoints, extract_envelope,
                      fit_envelope)
from .hamiltonian import build_hamiltonian, embed_state, n_down, sector_restrict
from .noise import (DYNAMIC, QUASI_STATIC, NoiseSpec, RngStream,
                    sample_dynamic, sample_quasi_static)
from .observables import check_partition, entropy_series, return_probability_series
from .topology import (LinkRule, QubitGraph, TriangleRule, UnitKind,
                       build_graph, neel_basis_index)

WORKERS_ENV = "SPINNET_WORKERS"
CHUNK_SIZE = 50  # realizations per reduction chunk; fixed so sums are worker-count independent
ADAPTIVE_T_CAP = 5.0  # t0
ADAPTIVE_T_STEP = 0.5  # t0
PILOT_REALIZATIONS = 200

NEEL = "neel"
GHZ = "ghz"


@dataclass(frozen=True)
class ExperimentConfig:
    """Full parameter set of one Monte-Carlo decoherence experiment.

    Couplings and E_z are in 1/t0, times in t0.  ``t_max = None`` selects
    the adaptive grid.  ``partition = None`` selects the first ceil(L/2)
    qubits.  JSON serialisation uses exactly these field names.
    """

    unit: str = "node"
    config: str = "chain"
    n_units: int = 4
    triangle_rule: str = "linked"
    link_rule: str = "consecutive"
    j0: float = 100.0
    sigma: float = 0.5
    e_z: float = 0.0
    noise_kind: str = QUASI_STATIC
    alpha_noise: float | None = None
    initial_state: str = NEEL
    n_realizations: int = 1000
    master_seed: int = 1234
    dt: float = DEFAULT_DT
    t_max: float | None = None
    dt_step: float = DEFAULT_DT_STEP
    dt_noise: float = 0.00025
    partition: tuple[int, ...] | None = None
    outputs: tuple[str, ...] = ("P",)

    def __post_init__(self):
        if self.partition is not None:
            object.__setattr__(self, "partition", tuple(int(q) for q in self.partition))
        object.__setattr__(self, "outputs", tuple(self.outputs))

    def validate(self) -> QubitGraph:
        """Check every field and return the (feasible) topology."""
        graph = build_graph(self.unit, self.config, self.n_units,
                            self.triangle_rule, self.link_rule)
        for name in ("j0", "sigma", "e_z", "dt", "dt_step", "dt_noise"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if self.n_realizations < 1:
            raise ValueError(f"n_realizations must be >= 1, got {self.n_realizations}")
        if self.master_seed < 0:
            raise ValueError(f"master_seed must be >= 0, got {self.master_seed}")
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.j0 > 0 and self.dt > math.pi / (40.0 * self.j0) * (1 + 1e-9):
            raise ValueError(
                f"dt={self.dt} undersamples the return-probability oscillation; "
                f"need dt <= pi/(40 J0) = {math.pi / (40.0 * self.j0):.3g}")
        if self.t_max is not None and self.t_max <= 0:
            raise ValueError(f"t_max must be positive, got {self.t_max}")
        if self.noise_kind == DYNAMIC:
            NoiseSpec(DYNAMIC, self.j0, self.sigma, self.alpha_noise, self.dt_noise)
        elif self.noise_kind != QUASI_STATIC:
            raise ValueError(f"unknown noise_kind {self.noise_kind!r}")
        if self.initial_state not in (NEEL, GHZ):
            raise ValueError(f"initial_state must be '{NEEL}' or '{GHZ}', "
                             f"got {self.initial_state!r}")
        if not self.outputs or set(self.outputs) - {"P", "S"} or "P" not in self.outputs:
            raise ValueError(f"outputs must contain 'P' and only 'P'/'S', "
                             f"got {self.outputs}")
        if self.partition is not None:
            check_partition(self.partition, graph.L)
        return graph

    def to_json_dict(self) -> dict:
        d = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = list(v)
            d[f.name] = v
        return d

    @classmethod
    def from_json_dict(cls, d: Mapping) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        cfg = cls(**d)
        cfg.validate()
        return cfg


@dataclass(frozen=True)
class AveragedSeries:
    """Per-time Monte-Carlo mean and standard error of the observables."""

    times: np.ndarray
    p_mean: np.ndarray
    p_stderr: np.ndarray
    n_realizations: int
    s_mean: np.ndarray | None = None
    s_stderr: np.ndarray | None = None

    @property
    def has_entropy(self) -> bool:
        return self.s_mean is not None

    def to_csv(self, out: IO[str]) -> None:
        cols = ["t", "P_mean", "P_stderr"]
        arrays = [self.times, self.p_mean, self.p_stderr]
        if self.has_entropy:
            cols += ["S_mean", "S_stderr"]
            arrays += [self.s_mean, self.s_stderr]
        out.write(",".join(cols) + "\n")
        for row in zip(*arrays):
            out.write(",".join(f"{v:.11e}" for v in row) + "\n")

    @classmethod
    def from_csv(cls, inp: IO[str], n_realizations: int = 0) -> "AveragedSeries":
        header = inp.readline().strip().split(",")
        base = ["t", "P_mean", "P_stderr"]
        if header[:3] != base or header[3:] not in ([], ["S_mean", "S_stderr"]):
            raise ValueError(f"unrecognised series CSV header: {header}")
        data = np.loadtxt(inp, delimiter=",", ndmin=2)
        if data.shape[1] != len(header):
            raise ValueError("series CSV row width does not match its header")
        s_mean = data[:, 3] if len(header) == 5 else None
        s_stderr = data[:, 4] if len(header) == 5 else None
        return cls(times=data[:, 0], p_mean=data[:, 1], p_stderr=data[:, 2],
                   n_realizations=n_realizations, s_mean=s_mean, s_stderr=s_stderr)


@dataclass
class _Runtime:
    """Config resolved into simulation-ready objects."""

    graph: QubitGraph
    basis: np.ndarray | None  # None = full space
    psi0: np.ndarray  # in the active basis
    partition: tuple[int, ...]
    nspec: NoiseSpec
    with_entropy: bool


def _prepare(cfg: ExperimentConfig, use_sector: bool = True) -> _Runtime:
    graph = cfg.validate()
    L = graph.L
    if cfg.initial_state == NEEL:
        idx = neel_basis_index(graph)
        if use_sector:
            basis = sector_restrict(graph, L - n_down(idx, L))
            psi0 = np.zeros(len(basis), dtype=complex)
            psi0[int(np.searchsorted(basis, idx))] = 1.0
        else:
            basis = None
            psi0 = np.zeros(2 ** L, dtype=complex)
            psi0[idx] = 1.0
    else:  # GHZ spans two magnetization sectors: always full space
        basis = None
        psi0 = np.zeros(2 ** L, dtype=complex)
        psi0[0] = psi0[-1] = 1.0 / math.sqrt(2.0)
    partition = cfg.partition or tuple(range((L + 1) // 2))
    if cfg.noise_kind == DYNAMIC:
        nspec = NoiseSpec(DYNAMIC, cfg.j0, cfg.sigma, cfg.alpha_noise, cfg.dt_noise)
    else:
        nspec = NoiseSpec(QUASI_STATIC, cfg.j0, cfg.sigma)
    return _Runtime(graph=graph, basis=basis, psi0=psi0, partition=partition,
                    nspec=nspec, with_entropy="S" in cfg.outputs)


def _realization(cfg: ExperimentConfig, rt: _Runtime, k: int, grid: TimeGrid,
                 times: np.ndarray) -> tuple[np.ndarray, np.ndarray | None]:
    stream = RngStream(cfg.master_seed, k)
    if cfg.noise_kind == QUASI_STATIC:
        coup = sample_quasi_static(rt.graph, rt.nspec, stream)
        H = build_hamiltonian(rt.graph, coup, e_z=cfg.e_z, basis=rt.basis)
        if not rt.with_entropy:
            evals, weights = spectral_weights(H, rt.psi0)
            return return_probability_from_weights(evals, weights, times), None
        states = propagate_static(H, rt.psi0, grid)
    else:
        coup = sample_dynamic(rt.graph, rt.nspec, stream, float(times[-1]))
        states = propagate_dynamic(rt.graph, coup, cfg.e_z, rt.psi0, grid,
                                   dt_step=cfg.dt_step, basis=rt.basis)
    p = return_probability_series(rt.psi0, states)
    s = None
    if rt.with_entropy:
        full = states if rt.basis is None else embed_state(states, rt.basis, rt.graph.L)
        s = entropy_series(full, rt.partition)
    return p, s


def _chunk_partials(cfg: ExperimentConfig, rt: _Runtime, t_end: float,
                    k_start: int, k_stop: int):
    grid = TimeGrid(t_end, cfg.dt)
    times = grid.times()
    n_t = len(times)
    sum_p = np.zeros(n_t)
    sum_p2 = np.zeros(n_t)
    sum_s = np.zeros(n_t) if rt.with_entropy else None
    sum_s2 = np.zeros(n_t) if rt.with_entropy else None
    for k in range(k_start, k_stop):
        p, s = _realization(cfg, rt, k, grid, times)
        sum_p += p
        sum_p2 += p * p
        if s is not None:
            sum_s += s
            sum_s2 += s * s
    return sum_p, sum_p2, sum_s, sum_s2


def _chunk_worker(args):
    cfg_dict, use_sector, t_end, k_start, k_stop = args
    cfg = ExperimentConfig.from_json_dict(cfg_dict)
    rt = _prepare(cfg, use_sector=use_sector)
    return _chunk_partials(cfg, rt, t_end, k_start, k_stop)


def _resolve_workers(workers: int | None) -> int:
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        workers = int(env) if env else (os.cpu_count() or 1)
    if workers < 1:
        raise ValueError(f"worker count must be >= 1, got {workers}")
    return workers


def _adaptive_t_max(cfg: ExperimentConfig, rt: _Runtime) -> float:
    """Window growth driven by a deterministic pilot of the same streams."""
    n_pilot = min(cfg.n_realizations, PILOT_REALIZATIONS)
    pilot_spec = NoiseSpec(QUASI_STATIC, cfg.j0, cfg.sigma)
    spectra = []
    for k in range(n_pilot):
        coup = sample_quasi_static(rt.graph, pilot_spec, RngStream(cfg.master_seed, k))
        H = build_hamiltonian(rt.graph, coup, e_z=cfg.e_z, basis=rt.basis)
        spectra.append(spectral_weights(H, rt.psi0))

    n_cap = int(round(ADAPTIVE_T_CAP / cfg.dt))
    times_all = np.arange(n_cap + 1) * cfg.dt
    p_sum = np.zeros(0)
    n_windows = int(round(ADAPTIVE_T_CAP / ADAPTIVE_T_STEP))
    # Grow the window until the pilot's own envelope fit certifies that
    # the decay completed inside it, exp(-(W/T2)^alpha) <= 5%, AND the
    # fit agrees with the previous window's (a free P_inf can make a
    # half-decayed curve look finished on a short window; demanding
    # window-stable parameters closes that hole).  One extra step is
    # added so the final fit sees a resolved plateau.  Signals whose
    # envelope never decays (or never fits) grow to the cap.
    decay_depth = math.log(20.0)
    prev_fit = None
    for m in range(1, n_windows + 1):
        hi = min(int(round(m * ADAPTIVE_T_STEP / cfg.dt)) + 1, len(times_all))
        seg = times_all[len(p_sum):hi]
        seg_sum = np.zeros(len(seg))
        for evals, weights in spectra:
            seg_sum += return_probability_from_weights(evals, weights, seg)
        p_sum = np.concatenate([p_sum, seg_sum])
        w_now = float(times_all[len(p_sum) - 1])
        try:
            points = extract_envelope(times_all[:len(p_sum)], p_sum / n_pilot)
            fit = fit_envelope(points)
        except ValueError:
            continue
        if not fit.converged:
            prev_fit = None
            continue
        deep_enough = w_now >= fit.t2 * decay_depth ** (1.0 / fit.alpha)
        stable = (prev_fit is not None
                  and abs(fit.t2 - prev_fit.t2) <= 0.1 * fit.t2
                  and abs(fit.p_inf - prev_fit.p_inf) <= 0.03)
        if deep_enough and stable:
            return min(w_now + ADAPTIVE_T_STEP, float(times_all[-1]))
        prev_fit = fit
    return float(times_all[-1])


def run_experiment(cfg: ExperimentConfig, workers: int | None = None,
                   use_sector: bool = True) -> AveragedSeries:
    """Average P(t) (and S(t) if requested) over cfg.n_realizations.

    The result depends only on cfg; scheduling and worker count do not
    affect it.  ``use_sector=False`` disables the magnetization-sector
    optimisation (full-space evolution), for cross-checking.
    """
    rt = _prepare(cfg, use_sector=use_sector)
    t_end = cfg.t_max if cfg.t_max is not None else _adaptive_t_max(cfg, rt)
    grid = TimeGrid(t_end, cfg.dt)
    times = grid.times()

    n = cfg.n_realizations
    chunks = [(a, min(a + CHUNK_SIZE, n)) for a in range(0, n, CHUNK_SIZE)]
    workers = _resolve_workers(workers)
    if workers > 1 and len(chunks) > 1:
        args = [(cfg.to_json_dict(), use_sector, t_end, a, b) for a, b in chunks]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_chunk_worker, args))
    else:
        partials = [_chunk_partials(cfg, rt, t_end, a, b) for a, b in chunks]

    n_t = len(times)
    sum_p = np.zeros(n_t)
    sum_p2 = np.zeros(n_t)
    sum_s = np.zeros(n_t) if rt.with_entropy else None
    sum_s2 = np.zeros(n_t) if rt.with_entropy else None
    for part in partials:  # fixed chunk order: deterministic reduction
        sum_p += part[0]
        sum_p2 += part[1]
        if rt.with_entropy:
            sum_s += part[2]
            sum_s2 += part[3]

    p_mean, p_stderr = _mean_stderr(sum_p, sum_p2, n)
    s_mean = s_stderr = None
    if rt.with_entropy:
        s_mean, s_stderr = _mean_stderr(sum_s, sum_s2, n)
    return AveragedSeries(times=times, p_mean=p_mean, p_stderr=p_stderr,
                          n_realizations=n, s_mean=s_mean, s_stderr=s_stderr)


def _mean_stderr(total: np.ndarray, total_sq: np.ndarray, n: int):
    mean = total / n
    if n < 2:
        return mean, np.zeros_like(mean)
    var = np.clip((total_sq - total * total / n) / (n - 1), 0.0, None)
    return mean, np.sqrt(var / n)


def envelope_from_series(series: AveragedSeries, side: str = "upper",
                         observable: str = "P") -> EnvelopePoints:
    """Envelope points of an averaged observable, with MC standard errors."""
    if observable == "P":
        values, stderr = series.p_mean, series.p_stderr
    elif observable == "S":
        if not series.has_entropy:
            raise ValueError("series has no entropy columns")
        values, stderr = series.s_mean, series.s_stderr
    else:
        raise ValueError(f"unknown observable {observable!r}")
    return extract_envelope(series.times, values, side=side, stderr=stderr)


def units_for_qubits(unit: UnitKind | str, L: int,
                     triangle_rule: TriangleRule | str = TriangleRule.LINKED) -> int:
    """Number of units that realises exactly L qubits, or ValueError."""
    unit = UnitKind(unit)
    triangle_rule = TriangleRule(triangle_rule)
    if unit is UnitKind.TRIANGLE and triangle_rule is TriangleRule.SHARED:
        return L  # strip qubits are the units
    size = unit.n_qubits
    if L % size != 0:
        raise ValueError(f"L={L} is not a multiple of the {unit.value} unit size {size}")
    return L // size


@dataclass(frozen=True)
class SweepRow:
    """One sweep cell: either a completed fit or a skip reason."""

    unit: str
    config: str
    L: int
    sigma: float
    alpha_noise: float | None
    fit: EnvelopeFit | None
    reason: str | None = None

    @property
    def completed(self) -> bool:
        return self.fit is not None


SWEEP_COLUMNS = ["unit", "config", "L", "sigma", "alpha_noise",
                 "T2", "T2_stderr", "alpha_stretch", "P_inf", "converged"]


def run_sweep(template: ExperimentConfig, axes: Mapping[str, Sequence],
              workers: int | None = None, side: str = "upper",
              branch: str = "+") -> list[SweepRow]:
    """Run one experiment per grid cell and fit its decay envelope.

    ``axes`` maps any of "L" (qubit count), "sigma", "alpha" to value
    lists; omitted axes keep the template value.  Infeasible cells (e.g. a
    two-unit ring) are recorded with a reason and skipped.  Rows come back
    in deterministic axis order (L, then sigma, then alpha).
    """
    unknown = sorted(set(axes) - {"L", "sigma", "alpha"})
    if unknown:
        raise ValueError(f"unknown sweep axes: {', '.join(unknown)}")
    unit = UnitKind(template.unit)
    default_L = None
    if "L" not in axes:
        default_L = template.validate().L
    l_axis = [int(v) for v in axes.get("L", [default_L])]
    sigma_axis = [float(v) for v in axes.get("sigma", [template.sigma])]
    alpha_axis = list(axes.get("alpha", [template.alpha_noise]))

    rows: list[SweepRow] = []
    for L, sigma, alpha in itertools.product(l_axis, sigma_axis, alpha_axis):
        alpha_val = None if alpha is None else float(alpha)
        try:
            n_units = units_for_qubits(unit, L, template.triangle_rule)
            cfg = replace(template, n_units=n_units, sigma=sigma,
                          alpha_noise=alpha_val)
            cfg.validate()
        except ValueError as exc:
            rows.append(SweepRow(unit.value, template.config, L, sigma,
                                 alpha_val, fit=None, reason=str(exc)))
            continue
        series = run_experiment(cfg, workers=workers)
        try:
            points = envelope_from_series(series, side=side)
            fit = fit_envelope(points, branch=branch)
        except ValueError as exc:
            rows.append(SweepRow(unit.value, template.config, L, sigma,
                                 alpha_val, fit=None,
                                 reason=f"envelope fit failed: {exc}"))
            continue
        rows.append(SweepRow(unit.value, template.config, L, sigma,
                             alpha_val, fit=fit))
    if not any(r.completed for r in rows):
        detail = "; ".join(f"L={r.L}: {r.reason}" for r in rows)
        raise ValueError(f"all sweep cells were invalid ({detail})")
    return rows


def sweep_to_csv(rows: Sequence[SweepRow], out: IO[str]) -> None:
    """Write completed sweep rows (skips are reported via SweepRow.reason)."""
    out.write(",".join(SWEEP_COLUMNS) + "\n")
    for r in rows:
        if not r.completed:
            continue
        alpha = "" if r.alpha_noise is None else f"{r.alpha_noise:.11e}"
        out.write(",".join([
            r.unit, r.config, str(r.L), f"{r.sigma:.11e}", alpha,
            f"{r.fit.t2:.11e}", f"{r.fit.stderr.get('T2', float('nan')):.11e}",
            f"{r.fit.alpha:.11e}", f"{r.fit.p_inf:.11e}",
            "true" if r.fit.converged else "false",
        ]) + "\n")


def read_sweep_csv(inp: IO[str]) -> list[dict]:
    """Parse a sweep table back into one dict per row."""
    header = inp.readline().strip().split(",")
    if header != SWEEP_COLUMNS:
        raise ValueError(f"unrecognised sweep CSV header: {header}")
    rows = []
    for line in inp:
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != len(SWEEP_COLUMNS):
            raise ValueError(f"malformed sweep CSV row: {line!r}")
        rows.append({
            "unit": parts[0],
            "config": parts[1],
            "L": int(parts[2]),
            "sigma": float(parts[3]),
            "alpha_noise": None if parts[4] == "" else float(parts[4]),
            "T2": float(parts[5]),
            "T2_stderr": float(parts[6]),
            "alpha_stretch": float(parts[7]),
            "P_inf": float(parts[8]),
            "converged": parts[9] == "true",
        })
    return rows
