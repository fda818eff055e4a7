"""Protocol drivers: entangled-state preparation, quenches, and sweeps.

The central experiment prepares an entangled initial state by evolving a
random half-filling product state for a time ``T`` under a weakly
disordered XXZ chain, then hands it to one of six dynamical protocols and
compares the initial half-chain entropy with the protocol's saturation
value:

* ``thermal``         -- XXZ, weak disorder (W = 0.5)
* ``hamiltonian_mbl`` -- XXZ, strong disorder (W = 5.0)
* ``free_fermion``    -- XX chain, no interaction, no disorder
* ``floquet_mbl``     -- kicked map exp(-i T0 H0) exp(-i T1 Hxy) with a
                         strongly disordered diagonal H0
* ``anderson``        -- XX chain, strong disorder
* ``rqc``             -- random two-site gate circuits, including SWAP

Saturation rules: Hamiltonian protocols read the half-chain entropy at
t = 1e12 (free fermions instead average t = 201..300, since they never
dephase into a flat plateau); the Floquet map is raised to 3e11 periods;
generic circuits average the last hundred of 2000 layers over several
gate-sequence realizations; pure-SWAP circuits need no simulation at all,
because site permutations only shuffle bipartitions, making the exact
steady value the bipartition-averaged entropy of the initial state.

Per-run randomness is split into independent, stably tagged streams
(initial product word, preparation disorder, quench disorder, circuit
sequences), so any protocol can be recomputed in isolation and sweeps
over T reuse one disorder draw per run, as the reference experiments do.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field, replace

import numpy as np

from .basis import SectorBasis, enumerate_sector
from .entanglement import baee, hcee
from .errors import NumericError, ParameterError
from .evolution import (
    SpectralDecomposition,
    Trajectory,
    build_floquet,
    floquet_power,
    hybrid_schedule,
    propagate,
    run_rqc,
    spectral_decompose,
    spectrum,
)
from .operators import (
    DisorderFields,
    OperatorMatrix,
    build_ising_z,
    build_local_cut,
    build_xxz,
    gate_class,
    sample_fields,
)
from .spectral_stats import RatioSample, middle_third, pool_ratios, spacing_ratios
from .state import SectorState

KINDS = ("thermal", "hamiltonian_mbl", "free_fermion", "floquet_mbl", "anderson", "rqc")

THERMAL_W = 0.5
MBL_W = 5.0
DEFAULT_JZ = 0.5
DEFAULT_PREP_T = 4.5

SAT_TIME = 1.0e12
SAT_PERIODS = 300_000_000_000
FF_WINDOW = np.arange(201.0, 301.0)
RQC_DEPTH = 2000
CIRCUIT_SAMPLES = 5

DESK_L = 12
DESK_RUNS = 50
HEAVY_L = 16
HEAVY_RUNS = 72

# Preparation times swept in the reference experiments: dense early steps,
# then stretching increments, and one deep-saturation point.
DEFAULT_T_LIST = (
    0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75,
    3.0, 3.3, 3.6, 3.9, 4.2, 4.5, 5.0, 5.5, 6.0, 6.5, 7.0, 7.5, 8.0,
    8.5, 9.0, 9.5, 10.0, 11.0, 12.2, 13.7, 15.7, 19.0, 24.0, 32.0, 500.0,
)

# Eigenstate ranks spanning the full spectrum at dimension 12870; other
# dimensions use the proportionally rescaled, deduplicated list.
RANKS_DIM_12870 = (
    1, 2, 4, 8, 15, 29, 52, 87, 142, 222, 337, 494, 704, 978, 1324,
    1750, 2259, 2855, 3533, 4283, 5095, 5950, 6826, 7700, 8548, 9348,
    10079, 10727, 11280, 11737, 12098, 12371, 12568, 12701, 12785,
    12833, 12857, 12867, 12870,
)


def scaled_rank_list(dim: int) -> tuple[int, ...]:
    """Rescale the reference rank ladder to a spectrum of size ``dim``."""
    if dim < 1:
        raise ParameterError(f"dim must be positive, got {dim}")
    top = RANKS_DIM_12870[-1]
    out = []
    for r in RANKS_DIM_12870:
        s = 1 + round((r - 1) * (dim - 1) / (top - 1))
        s = min(max(s, 1), dim)
        if not out or s != out[-1]:
            out.append(s)
    return tuple(out)


def derive_rng(master_seed: int, run: int, tag: str) -> np.random.Generator:
    """Independent, reproducible stream for (seed, run, purpose).

    The purpose tag is folded in through a CRC so streams stay stable
    across releases and are uncorrelated between purposes.
    """
    if master_seed < 0 or run < 0:
        raise ParameterError("master_seed and run must be nonnegative")
    key = zlib.crc32(tag.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence((master_seed, run, key)))


@dataclass(frozen=True)
class ProtocolSpec:
    """One dynamical protocol with its couplings.

    Unset numeric fields are filled by :meth:`normalized` with the
    protocol's canonical values; ``rqc`` requires explicit gate angles.
    """

    kind: str
    W: float | None = None
    jz: float | None = None
    alpha: float | None = None
    beta: float | None = None
    T0: float = 1.0
    T1: float = 0.4

    def normalized(self) -> "ProtocolSpec":
        if self.kind not in KINDS:
            raise ParameterError(f"kind must be one of {KINDS}, got {self.kind!r}")
        W, jz = self.W, self.jz
        if self.kind == "thermal":
            W = THERMAL_W if W is None else W
            jz = DEFAULT_JZ if jz is None else jz
        elif self.kind == "hamiltonian_mbl":
            W = MBL_W if W is None else W
            jz = DEFAULT_JZ if jz is None else jz
        elif self.kind == "free_fermion":
            W = 0.0 if W is None else W
            jz = 0.0 if jz is None else jz
        elif self.kind == "anderson":
            W = MBL_W if W is None else W
            jz = 0.0 if jz is None else jz
        elif self.kind == "floquet_mbl":
            W = MBL_W if W is None else W
            jz = 0.0 if jz is None else jz
        else:  # rqc
            if self.alpha is None or self.beta is None:
                raise ParameterError("rqc protocol needs explicit alpha and beta")
            W = 0.0 if W is None else W
            jz = 0.0 if jz is None else jz
        if W < 0:
            raise ParameterError(f"W must be nonnegative, got {W}")
        return replace(self, W=float(W), jz=float(jz))

    @property
    def is_swap(self) -> bool:
        return (
            self.kind == "rqc"
            and self.alpha is not None
            and self.beta is not None
            and gate_class(self.alpha, self.beta) == "SWAP"
        )


# ---------------------------------------------------------------------------
# state preparation
# ---------------------------------------------------------------------------


def sample_initial_product(basis: SectorBasis, rng: np.random.Generator) -> SectorState:
    """A uniformly random product state of the sector (one basis word)."""
    word = int(basis.states[int(rng.integers(0, basis.dim))])
    return SectorState.from_word(basis, word)


def prepare_thermalized(
    psi0: SectorState, fields: DisorderFields, T: float, jz: float = DEFAULT_JZ
) -> SectorState:
    """Evolve a product state for time ``T`` under the weak-disorder chain."""
    H = build_xxz(psi0.basis, jz, fields)
    return propagate(spectral_decompose(H), psi0, T)


def prepare_locally_entangled(
    psi0: SectorState, fields: DisorderFields, T: float, jz: float = DEFAULT_JZ
) -> SectorState:
    """Evolve under the centrally severed chain.

    The halves never couple, so the half-chain entropy of the result stays
    exactly zero while entanglement builds inside each half.
    """
    H = build_local_cut(psi0.basis, jz, fields)
    return propagate(spectral_decompose(H), psi0, T)


def select_eigenstate(H: OperatorMatrix, rank: int) -> SectorState:
    """Eigenvector of ``H`` by ascending-energy rank (1-based), verified."""
    decomp = spectral_decompose(H)
    state = decomp.eigenstate(rank)
    e = decomp.values[rank - 1]
    residual = float(
        np.linalg.norm(H.elements @ state.amplitudes - e * state.amplitudes)
    )
    if residual > 1e-9:
        raise NumericError(f"eigenpair residual {residual} exceeds 1e-9")
    return state


# ---------------------------------------------------------------------------
# quench engines and saturation
# ---------------------------------------------------------------------------


def _rqc_window(depth: int) -> range:
    """The last hundred circuit layers (the saturation window)."""
    return range(max(1, depth - 99), depth + 1)


@dataclass(eq=False)
class _QuenchEngine:
    """Per-run quench machinery reused across every preparation time."""

    spec: ProtocolSpec
    basis: SectorBasis
    decomp: SpectralDecomposition | None = None
    bond_seqs: list[np.ndarray] = field(default_factory=list)
    depth: int = RQC_DEPTH

    def saturation(self, state: SectorState) -> float:
        kind = self.spec.kind
        if kind in ("thermal", "hamiltonian_mbl", "anderson"):
            return hcee(propagate(self.decomp, state, SAT_TIME))
        if kind == "free_fermion":
            vals = [hcee(propagate(self.decomp, state, t)) for t in FF_WINDOW]
            return float(np.mean(vals))
        if kind == "floquet_mbl":
            return hcee(floquet_power(self.decomp, state, SAT_PERIODS))
        if self.spec.is_swap:
            return baee(state)
        window = _rqc_window(self.depth)
        means = []
        for bonds in self.bond_seqs:
            traj = run_rqc(
                state,
                self.spec.alpha,
                self.spec.beta,
                self.depth,
                record=window,
                bonds=bonds,
            )
            means.append(float(traj.hcee.mean()))
        return float(np.mean(means))


def _make_engine(
    basis: SectorBasis,
    spec: ProtocolSpec,
    master_seed: int,
    run: int,
    circuit_samples: int = CIRCUIT_SAMPLES,
    depth: int = RQC_DEPTH,
) -> _QuenchEngine:
    spec = spec.normalized()
    kind = spec.kind
    if kind in ("thermal", "hamiltonian_mbl", "anderson", "free_fermion"):
        fields = sample_fields(
            basis.L, spec.W, derive_rng(master_seed, run, f"quench:{kind}")
        )
        decomp = spectral_decompose(build_xxz(basis, spec.jz, fields))
        return _QuenchEngine(spec=spec, basis=basis, decomp=decomp)
    if kind == "floquet_mbl":
        fields = sample_fields(
            basis.L, spec.W, derive_rng(master_seed, run, f"quench:{kind}")
        )
        H0 = build_ising_z(basis, fields)
        Hxy = build_xxz(basis, 0.0, DisorderFields.zeros(basis.L))
        decomp = build_floquet(H0, Hxy, spec.T0, spec.T1)
        return _QuenchEngine(spec=spec, basis=basis, decomp=decomp)
    if spec.is_swap:
        return _QuenchEngine(spec=spec, basis=basis, depth=depth)
    seqs = [
        derive_rng(master_seed, run, f"circuit:{m}").integers(1, basis.L, size=depth)
        for m in range(circuit_samples)
    ]
    return _QuenchEngine(spec=spec, basis=basis, bond_seqs=seqs, depth=depth)


def saturation_value(
    initial: SectorState,
    spec: ProtocolSpec,
    rng: np.random.Generator,
    circuit_samples: int = CIRCUIT_SAMPLES,
    depth: int = RQC_DEPTH,
) -> float:
    """Protocol saturation entropy for one prepared state.

    Disorder and circuit randomness are drawn from ``rng``; pure-SWAP
    circuits consume no randomness (their steady value is exact).
    """
    spec = spec.normalized()
    basis = initial.basis
    engine = _QuenchEngine(spec=spec, basis=basis, depth=depth)
    if spec.kind in ("thermal", "hamiltonian_mbl", "anderson", "free_fermion"):
        fields = sample_fields(basis.L, spec.W, rng)
        engine.decomp = spectral_decompose(build_xxz(basis, spec.jz, fields))
    elif spec.kind == "floquet_mbl":
        fields = sample_fields(basis.L, spec.W, rng)
        H0 = build_ising_z(basis, fields)
        Hxy = build_xxz(basis, 0.0, DisorderFields.zeros(basis.L))
        engine.decomp = build_floquet(H0, Hxy, spec.T0, spec.T1)
    elif not spec.is_swap:
        engine.bond_seqs = [
            rng.integers(1, basis.L, size=depth) for _ in range(circuit_samples)
        ]
    return engine.saturation(initial)


def run_protocol(
    initial: SectorState,
    spec: ProtocolSpec,
    rng: np.random.Generator,
    schedule: np.ndarray | None = None,
    record_baee: bool = False,
) -> Trajectory:
    """One realization of a protocol's entropy trajectory.

    ``schedule`` lists continuous times for Hamiltonian kinds and whole
    periods/layers for the Floquet map and circuits (defaults: a hybrid
    linear-then-log grid out to the protocol's saturation scale).
    """
    spec = spec.normalized()
    basis = initial.basis
    kind = spec.kind
    if kind == "rqc":
        if schedule is None:
            schedule = hybrid_schedule(t_max=RQC_DEPTH, integer=True)
        marks = np.asarray(schedule, dtype=np.int64)
        traj = run_rqc(
            initial,
            spec.alpha,
            spec.beta,
            int(marks.max()),
            rng=rng,
            record=marks,
            record_baee=record_baee,
        )
        traj.meta.update(kind=kind)
        return traj
    fields = sample_fields(basis.L, spec.W, rng)
    if kind == "floquet_mbl":
        H0 = build_ising_z(basis, fields)
        Hxy = build_xxz(basis, 0.0, DisorderFields.zeros(basis.L))
        decomp = build_floquet(H0, Hxy, spec.T0, spec.T1)
        if schedule is None:
            schedule = hybrid_schedule(t_max=SAT_PERIODS, integer=True)
        times = np.asarray(schedule, dtype=np.int64)
        states = (floquet_power(decomp, initial, int(n)) for n in times)
    else:
        decomp = spectral_decompose(build_xxz(basis, spec.jz, fields))
        if schedule is None:
            schedule = hybrid_schedule(t_max=SAT_TIME)
        times = np.asarray(schedule, dtype=np.float64)
        states = (propagate(decomp, initial, float(t)) for t in times)
    s_h, s_b = [], []
    for st in states:
        s_h.append(hcee(st))
        if record_baee:
            s_b.append(baee(st))
    return Trajectory(
        times=times.astype(np.float64),
        hcee=np.array(s_h),
        baee=np.array(s_b) if record_baee else None,
        meta={"kind": kind, "W": spec.W, "jz": spec.jz},
    )


def mean_trajectory(
    L: int,
    spec: ProtocolSpec,
    runs: int = DESK_RUNS,
    master_seed: int = 0,
    schedule=None,
    prep_T: float = DEFAULT_PREP_T,
    prep_W: float = THERMAL_W,
    prep_jz: float = DEFAULT_JZ,
    prep_local: bool = False,
    record_baee: bool = False,
    circuit_samples: int = 1,
    depth: int = RQC_DEPTH,
) -> Trajectory:
    """Disorder/realization-averaged entropy trajectory of one protocol.

    Each run prepares |psi(prep_T)> from its own product state and
    preparation disorder, then evolves it with the run's quench draw;
    circuits additionally average ``circuit_samples`` gate sequences.
    """
    if runs < 1:
        raise ParameterError(f"runs must be positive, got {runs}")
    spec = spec.normalized()
    kind = spec.kind
    basis = enumerate_sector(L, 0)
    if schedule is None:
        if kind == "rqc":
            schedule = hybrid_schedule(t_max=depth, integer=True)
        elif kind == "floquet_mbl":
            schedule = hybrid_schedule(t_max=SAT_PERIODS, integer=True)
        else:
            schedule = hybrid_schedule(t_max=SAT_TIME)
    times = np.asarray(schedule, dtype=np.float64)
    build_prep = build_local_cut if prep_local else build_xxz
    rows_h: list[np.ndarray] = []
    rows_b: list[np.ndarray] = []

    def collect(states):
        s_h, s_b = [], []
        for st in states:
            s_h.append(hcee(st))
            if record_baee:
                s_b.append(baee(st))
        rows_h.append(np.array(s_h))
        if record_baee:
            rows_b.append(np.array(s_b))

    for run in range(runs):
        psi0 = sample_initial_product(basis, derive_rng(master_seed, run, "psi0"))
        prep_fields = sample_fields(
            basis.L, prep_W, derive_rng(master_seed, run, "prep")
        )
        prep = spectral_decompose(build_prep(basis, prep_jz, prep_fields))
        init = propagate(prep, psi0, prep_T)
        if kind == "rqc":
            marks = times.astype(np.int64)
            top = int(marks.max())
            for m in range(circuit_samples):
                bonds = derive_rng(master_seed, run, f"circuit:{m}").integers(
                    1, basis.L, size=top
                )
                traj = run_rqc(
                    init,
                    spec.alpha,
                    spec.beta,
                    top,
                    record=marks,
                    record_baee=record_baee,
                    bonds=bonds,
                )
                rows_h.append(traj.hcee)
                if record_baee:
                    rows_b.append(traj.baee)
        elif kind == "floquet_mbl":
            fields = sample_fields(
                basis.L, spec.W, derive_rng(master_seed, run, f"quench:{kind}")
            )
            H0 = build_ising_z(basis, fields)
            Hxy = build_xxz(basis, 0.0, DisorderFields.zeros(basis.L))
            decomp = build_floquet(H0, Hxy, spec.T0, spec.T1)
            collect(
                floquet_power(decomp, init, int(n)) for n in times.astype(np.int64)
            )
        else:
            fields = sample_fields(
                basis.L, spec.W, derive_rng(master_seed, run, f"quench:{kind}")
            )
            decomp = spectral_decompose(build_xxz(basis, spec.jz, fields))
            collect(propagate(decomp, init, float(t)) for t in times)
    return Trajectory(
        times=times,
        hcee=np.mean(rows_h, axis=0),
        baee=np.mean(rows_b, axis=0) if record_baee else None,
        meta={
            "kind": kind,
            "L": L,
            "runs": runs,
            "master_seed": master_seed,
            "prep_T": prep_T,
            "prep_W": prep_W,
            "prep_jz": prep_jz,
            "prep_local": prep_local,
            "realizations": len(rows_h),
        },
    )


# ---------------------------------------------------------------------------
# sweeps over the preparation time
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class SweepTable:
    """Disorder-averaged initial and saturation entropies per prep time."""

    T: np.ndarray
    s_initial: np.ndarray
    s_sat: np.ndarray
    stderr_initial: np.ndarray
    stderr_sat: np.ndarray
    runs: int
    meta: dict = field(default_factory=dict)

    @property
    def delta_s(self) -> np.ndarray:
        return self.s_sat - self.s_initial


def _mean_stderr(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = values.mean(axis=0)
    if values.shape[0] > 1:
        err = values.std(axis=0, ddof=1) / np.sqrt(values.shape[0])
    else:
        err = np.zeros_like(mean)
    return mean, err


def delta_s_sweep(
    L: int,
    spec: ProtocolSpec,
    T_list=None,
    runs: int = DESK_RUNS,
    master_seed: int = 0,
    circuit_samples: int = CIRCUIT_SAMPLES,
    depth: int = RQC_DEPTH,
    prep_W: float = THERMAL_W,
    prep_jz: float = DEFAULT_JZ,
    prep_local: bool = False,
) -> SweepTable:
    """Initial vs saturation entropy across preparation times.

    Per run: one random product state, one preparation disorder, and one
    quench setup (disorder or circuit sequences) shared by every ``T``.
    """
    if runs < 1:
        raise ParameterError(f"runs must be positive, got {runs}")
    spec = spec.normalized()
    T_arr = np.asarray(
        DEFAULT_T_LIST if T_list is None else list(T_list), dtype=np.float64
    )
    if T_arr.size == 0 or (T_arr < 0).any():
        raise ParameterError("T_list must be nonempty and nonnegative")
    basis = enumerate_sector(L, 0)
    build_prep = build_local_cut if prep_local else build_xxz
    s_i = np.empty((runs, T_arr.size))
    s_s = np.empty((runs, T_arr.size))
    for run in range(runs):
        psi0 = sample_initial_product(basis, derive_rng(master_seed, run, "psi0"))
        prep_fields = sample_fields(
            basis.L, prep_W, derive_rng(master_seed, run, "prep")
        )
        prep = spectral_decompose(build_prep(basis, prep_jz, prep_fields))
        engine = _make_engine(basis, spec, master_seed, run, circuit_samples, depth)
        for j, T in enumerate(T_arr):
            psi_t = propagate(prep, psi0, float(T))
            s_i[run, j] = hcee(psi_t)
            s_s[run, j] = engine.saturation(psi_t)
    mi, ei = _mean_stderr(s_i)
    ms, es = _mean_stderr(s_s)
    return SweepTable(
        T=T_arr,
        s_initial=mi,
        s_sat=ms,
        stderr_initial=ei,
        stderr_sat=es,
        runs=runs,
        meta={
            "kind": spec.kind,
            "W": spec.W,
            "jz": spec.jz,
            "alpha": spec.alpha,
            "beta": spec.beta,
            "L": L,
            "master_seed": master_seed,
            "circuit_samples": circuit_samples,
            "depth": depth,
            "prep_W": prep_W,
            "prep_jz": prep_jz,
            "prep_local": prep_local,
        },
    )


@dataclass(eq=False)
class EigensweepTable:
    """Initial vs saturation entropy for eigenstate initial conditions."""

    rank: np.ndarray
    energy: np.ndarray
    s_initial: np.ndarray
    s_sat: np.ndarray
    stderr_initial: np.ndarray
    stderr_sat: np.ndarray
    runs: int
    meta: dict = field(default_factory=dict)

    @property
    def delta_s(self) -> np.ndarray:
        return self.s_sat - self.s_initial


def eigenstate_sweep(
    L: int,
    spec: ProtocolSpec,
    ranks=None,
    runs: int = DESK_RUNS,
    master_seed: int = 0,
    circuit_samples: int = CIRCUIT_SAMPLES,
    depth: int = RQC_DEPTH,
    prep_W: float = THERMAL_W,
    prep_jz: float = DEFAULT_JZ,
) -> EigensweepTable:
    """Sweep initial entropy using eigenstates of the weak-disorder chain.

    Eigenstates taken across the whole spectrum of the preparation
    Hamiltonian span initial entropies from area-law edges to volume-law
    bulk; each is quenched exactly like a prepared state.
    """
    if runs < 1:
        raise ParameterError(f"runs must be positive, got {runs}")
    spec = spec.normalized()
    basis = enumerate_sector(L, 0)
    rank_arr = np.asarray(
        scaled_rank_list(basis.dim) if ranks is None else list(ranks), dtype=np.int64
    )
    if rank_arr.size == 0 or rank_arr.min() < 1 or rank_arr.max() > basis.dim:
        raise ParameterError(f"ranks must lie in 1..{basis.dim}")
    s_i = np.empty((runs, rank_arr.size))
    s_s = np.empty((runs, rank_arr.size))
    en = np.empty((runs, rank_arr.size))
    for run in range(runs):
        prep_fields = sample_fields(
            basis.L, prep_W, derive_rng(master_seed, run, "prep")
        )
        decomp = spectral_decompose(build_xxz(basis, prep_jz, prep_fields))
        engine = _make_engine(basis, spec, master_seed, run, circuit_samples, depth)
        for j, rank in enumerate(rank_arr):
            state = decomp.eigenstate(int(rank))
            en[run, j] = decomp.values[int(rank) - 1]
            s_i[run, j] = hcee(state)
            s_s[run, j] = engine.saturation(state)
    mi, ei = _mean_stderr(s_i)
    ms, es = _mean_stderr(s_s)
    return EigensweepTable(
        rank=rank_arr,
        energy=en.mean(axis=0),
        s_initial=mi,
        s_sat=ms,
        stderr_initial=ei,
        stderr_sat=es,
        runs=runs,
        meta={
            "kind": spec.kind,
            "L": L,
            "master_seed": master_seed,
            "prep_W": prep_W,
            "prep_jz": prep_jz,
        },
    )


# ---------------------------------------------------------------------------
# reservoir curve
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class ReservoirCurve:
    """Run-averaged HCEE and BAEE along the preparation evolution."""

    T: np.ndarray
    hcee: np.ndarray
    baee: np.ndarray
    runs: int
    meta: dict = field(default_factory=dict)

    @property
    def excess(self) -> np.ndarray:
        return self.baee - self.hcee

    @property
    def argmax_T(self) -> float:
        return float(self.T[int(np.argmax(self.excess))])


def reservoir_curve(
    L: int,
    T_list=None,
    runs: int = DESK_RUNS,
    master_seed: int = 0,
    prep_W: float = THERMAL_W,
    prep_jz: float = DEFAULT_JZ,
) -> ReservoirCurve:
    """Average BAEE and HCEE of |psi(T)> over disorder and product states.

    The excess BAEE - HCEE measures entanglement held away from the
    central cut; it starts at zero, peaks at intermediate T, and decays
    as the state scrambles.
    """
    if runs < 1:
        raise ParameterError(f"runs must be positive, got {runs}")
    T_arr = np.asarray(
        DEFAULT_T_LIST if T_list is None else list(T_list), dtype=np.float64
    )
    basis = enumerate_sector(L, 0)
    h = np.empty((runs, T_arr.size))
    b = np.empty((runs, T_arr.size))
    for run in range(runs):
        psi0 = sample_initial_product(basis, derive_rng(master_seed, run, "psi0"))
        fields = sample_fields(basis.L, prep_W, derive_rng(master_seed, run, "prep"))
        prep = spectral_decompose(build_xxz(basis, prep_jz, fields))
        for j, T in enumerate(T_arr):
            psi_t = propagate(prep, psi0, float(T))
            h[run, j] = hcee(psi_t)
            b[run, j] = baee(psi_t)
    return ReservoirCurve(
        T=T_arr,
        hcee=h.mean(axis=0),
        baee=b.mean(axis=0),
        runs=runs,
        meta={"L": L, "master_seed": master_seed, "prep_W": prep_W, "prep_jz": prep_jz},
    )


# ---------------------------------------------------------------------------
# classification of sweep shapes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassLabel:
    """Shape class of a delta-S sweep with its decision diagnostics."""

    label: str
    diagnostics: dict


def _isotonic_decreasing(y: np.ndarray) -> np.ndarray:
    """Least-squares nonincreasing fit by pooling adjacent violators."""
    z = y[::-1]
    levels: list[float] = []
    weights: list[int] = []
    for v in z:
        levels.append(float(v))
        weights.append(1)
        while len(levels) > 1 and levels[-2] > levels[-1]:
            w = weights[-1] + weights[-2]
            lv = (levels[-1] * weights[-1] + levels[-2] * weights[-2]) / w
            levels.pop()
            weights.pop()
            levels[-1] = lv
            weights[-1] = w
    fit = np.concatenate([np.full(w, lv) for lv, w in zip(levels, weights)])
    return fit[::-1]


def classify_dynamics(
    table: SweepTable,
    eps_inert: float = 0.05,
    eps_peak: float = 0.1,
    eps_fit: float = 0.05,
) -> ClassLabel:
    """Assign a sweep to one of three dynamical shape classes.

    Rows are ordered by mean initial entropy; then, in order of
    precedence: every |delta S| below ``eps_inert`` is ``inert``; an
    interior maximum exceeding both endpoints by ``eps_peak`` is
    ``rise_then_fall``; a curve within ``eps_fit`` RMS of its best
    nonincreasing fit is ``monotone_decreasing``; anything else is
    ``unclassified``.
    """
    order = np.argsort(table.s_initial, kind="stable")
    y = table.delta_s[order]
    diag: dict = {"max_abs_delta": float(np.abs(y).max())}
    if diag["max_abs_delta"] < eps_inert:
        return ClassLabel("inert", diag)
    if y.size >= 3:
        interior = y[1:-1]
        k = int(np.argmax(interior)) + 1
        peak = float(y[k])
        diag.update(
            peak_value=peak,
            peak_minus_first=float(peak - y[0]),
            peak_minus_last=float(peak - y[-1]),
        )
        if peak - y[0] >= eps_peak and peak - y[-1] >= eps_peak:
            return ClassLabel("rise_then_fall", diag)
    fit = _isotonic_decreasing(y)
    rms = float(np.sqrt(np.mean((y - fit) ** 2)))
    diag["monotone_fit_rms"] = rms
    if rms <= eps_fit:
        return ClassLabel("monotone_decreasing", diag)
    return ClassLabel("unclassified", diag)


# ---------------------------------------------------------------------------
# disorder-pooled level statistics
# ---------------------------------------------------------------------------


def pooled_disorder_ratios(
    L: int,
    W: float,
    jz: float = DEFAULT_JZ,
    realizations: int = 100,
    master_seed: int = 0,
) -> RatioSample:
    """Middle-third gap ratios pooled over disorder realizations."""
    if realizations < 1:
        raise ParameterError(f"realizations must be positive, got {realizations}")
    basis = enumerate_sector(L, 0)
    samples = []
    for i in range(realizations):
        fields = sample_fields(L, W, derive_rng(master_seed, i, "levelstats"))
        H = build_xxz(basis, jz, fields)
        samples.append(spacing_ratios(middle_third(spectrum(H))))
    return pool_ratios(samples)
