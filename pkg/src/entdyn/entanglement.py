"""Subsystem entropies of sector states and bipartition averages.

Entropies are von Neumann entropies in bits.  For a state in a fixed
magnetization sector, the reduced density matrix of a site subset A is
block diagonal over the A-side up count, so its spectrum is assembled
block by block; each block's nonzero spectrum is obtained from the Gram
matrix of the smaller side of the coefficient block.

Two aggregate quantities drive the experiments:

* ``hcee``  -- entropy of the left half chain, sites 1..L/2.
* ``baee``  -- entropy averaged over every equal bipartition of the chain,
               one representative per complementary pair (the one
               containing site 1), enumerated exhaustively.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from .basis import SectorBasis, _split_geometry, _subset_positions, subsystem_split
from .errors import NumericError, ParameterError
from .state import SectorState

_EIG_TOL = 1e-12
_TRACE_TOL = 1e-8


def _entropy_from_eigs(w: np.ndarray, axis: int | None = None) -> np.ndarray | float:
    """Shannon entropy (bits) of eigenvalue arrays with the clip policy.

    Eigenvalues in (-1e-12, 0) are rounding debris and clip to zero; more
    negative values indicate a real defect and raise ``NumericError``.
    """
    w = np.asarray(w, dtype=np.float64)
    if w.size and float(w.min()) < -_EIG_TOL:
        raise NumericError(
            f"density matrix eigenvalue {float(w.min())} below -{_EIG_TOL}"
        )
    p = np.clip(w, 0.0, None)
    logs = np.log2(p, where=p > 0, out=np.zeros_like(p))
    if axis is None:
        return float(-(p * logs).sum())
    return -(p * logs).sum(axis=axis)


@dataclass(frozen=True)
class Bipartition:
    """An equal split of the chain; the stored half contains site 1."""

    L: int
    sites: tuple[int, ...]

    def __post_init__(self):
        if len(self.sites) != self.L // 2 or self.sites[0] != 1:
            raise ParameterError(
                f"canonical bipartition of L={self.L} must hold L/2 sites "
                f"including site 1, got {self.sites}"
            )

    @property
    def mask(self) -> int:
        return sum(1 << (s - 1) for s in self.sites)

    @property
    def complement(self) -> tuple[int, ...]:
        inside = set(self.sites)
        return tuple(s for s in range(1, self.L + 1) if s not in inside)

    @classmethod
    def from_sites(cls, L: int, sites) -> "Bipartition":
        """Canonicalize an arbitrary half-subset (or its complement)."""
        if L < 2 or L % 2 != 0:
            raise ParameterError(f"L must be even and at least 2, got {L}")
        half = tuple(sorted(int(s) for s in sites))
        if len(half) != L // 2 or len(set(half)) != len(half):
            raise ParameterError(f"need L/2 distinct sites, got {half}")
        if half and (half[0] < 1 or half[-1] > L):
            raise ParameterError(f"sites must lie in 1..{L}, got {half}")
        if 1 not in half:
            inside = set(half)
            half = tuple(s for s in range(1, L + 1) if s not in inside)
        return cls(L=L, sites=half)

    @classmethod
    def from_mask(cls, L: int, mask: int) -> "Bipartition":
        sites = [s for s in range(1, L + 1) if (mask >> (s - 1)) & 1]
        return cls.from_sites(L, sites)

    @classmethod
    def half_chain(cls, L: int) -> "Bipartition":
        return cls.from_sites(L, range(1, L // 2 + 1))


@lru_cache(maxsize=None)
def enumerate_bipartitions(L: int) -> tuple[Bipartition, ...]:
    """All canonical equal bipartitions, ascending by site mask."""
    if L < 2 or L % 2 != 0:
        raise ParameterError(f"L must be even and at least 2, got {L}")
    bips = [
        Bipartition(L=L, sites=(1,) + rest)
        for rest in combinations(range(2, L + 1), L // 2 - 1)
    ]
    bips.sort(key=lambda b: b.mask)
    return tuple(bips)


@dataclass(eq=False)
class DensityMatrix:
    """Reduced density matrix of a subset, stored block by block."""

    subset: tuple[int, ...]
    block_nup: np.ndarray
    blocks: list[np.ndarray] = field(repr=False)

    def trace(self) -> float:
        return float(sum(np.trace(b).real for b in self.blocks))

    def block_eigenvalues(self) -> list[np.ndarray]:
        return [np.linalg.eigvalsh(b) for b in self.blocks]


def reduced_density(state: SectorState, subset) -> DensityMatrix:
    """Trace out the complement of ``subset`` (1-based sites)."""
    split = subsystem_split(state.basis, subset)
    blocks = [Z @ Z.conj().T for Z in split.blocks(state.amplitudes)]
    return DensityMatrix(
        subset=split.subset, block_nup=split.block_nup.copy(), blocks=blocks
    )


def von_neumann_entropy(dm: DensityMatrix) -> float:
    """Entropy in bits of a block-diagonal reduced density matrix."""
    tr = dm.trace()
    if abs(tr - 1.0) > _TRACE_TOL:
        raise NumericError(f"density matrix trace {tr} deviates from 1")
    w = np.concatenate([np.linalg.eigvalsh(b) for b in dm.blocks])
    return float(_entropy_from_eigs(w))


def subset_entropy(state: SectorState, subset) -> float:
    """Entropy of a subset without forming the full reduced matrix.

    Each coefficient block contributes the spectrum of the Gram matrix of
    its smaller side; rank-one blocks contribute their squared norm
    directly.
    """
    split = subsystem_split(state.basis, subset)
    parts = []
    for Z in split.blocks(state.amplitudes):
        r, c = Z.shape
        if r == 1 or c == 1:
            parts.append(np.array([float(np.vdot(Z, Z).real)]))
        elif r <= c:
            parts.append(np.linalg.eigvalsh(Z @ Z.conj().T))
        else:
            parts.append(np.linalg.eigvalsh(Z.conj().T @ Z))
    w = np.concatenate(parts)
    tr = float(np.clip(w, 0.0, None).sum())
    if abs(tr - 1.0) > _TRACE_TOL:
        raise NumericError(f"subset spectral weight {tr} deviates from 1")
    return float(_entropy_from_eigs(w))


def hcee(state: SectorState) -> float:
    """Half-chain entanglement entropy, subset = sites 1..L/2."""
    return subset_entropy(state, tuple(range(1, state.basis.L // 2 + 1)))


# ---------------------------------------------------------------------------
# batched half-size entropies (bipartition averaging, Haar sampling)
# ---------------------------------------------------------------------------


def _half_blocks(basis: SectorBasis):
    """(shapes, offsets) shared by every half-size subset of the sector."""
    ks, shapes, offsets, _, _ = _split_geometry(basis, basis.L // 2)
    return ks, shapes, offsets


def _entropies_of_scattered(basis: SectorBasis, buf: np.ndarray) -> np.ndarray:
    """Entropies of rows already laid out in half-split block order."""
    _, shapes, offsets = _half_blocks(basis)
    m = buf.shape[0]
    s = np.zeros(m, dtype=np.float64)
    tr = np.zeros(m, dtype=np.float64)
    for (r, c), o in zip(shapes, offsets):
        r, c, o = int(r), int(c), int(o)
        Z = buf[:, o : o + r * c].reshape(m, r, c)
        if r == 1 or c == 1:
            w = np.sum((Z.real**2 + Z.imag**2), axis=(1, 2))[:, None]
        elif r <= c:
            w = np.linalg.eigvalsh(Z @ Z.conj().transpose(0, 2, 1))
        else:
            w = np.linalg.eigvalsh(Z.conj().transpose(0, 2, 1) @ Z)
        s += _entropy_from_eigs(w, axis=-1)
        tr += np.clip(w, 0.0, None).sum(axis=-1)
    if tr.size and np.abs(tr - 1.0).max() > _TRACE_TOL:
        raise NumericError("spectral weight of a batched row deviates from 1")
    return s


_POSITIONS_CACHE_MAX_L = 14


def _bipartition_positions(basis: SectorBasis, start: int, stop: int) -> np.ndarray:
    """Positions rows for bipartitions[start:stop] (int32, cached when small)."""
    key = "baee_positions"
    if basis.L <= _POSITIONS_CACHE_MAX_L:
        if key not in basis._cache:
            bips = enumerate_bipartitions(basis.L)
            mat = np.empty((len(bips), basis.dim), dtype=np.int32)
            for i, bp in enumerate(bips):
                mat[i] = _subset_positions(basis, bp.sites)
            basis._cache[key] = mat
        return basis._cache[key][start:stop]
    bips = enumerate_bipartitions(basis.L)[start:stop]
    mat = np.empty((len(bips), basis.dim), dtype=np.int32)
    for i, bp in enumerate(bips):
        mat[i] = _subset_positions(basis, bp.sites)
    return mat


def bipartition_entropies(state: SectorState, chunk_size: int = 256) -> np.ndarray:
    """Entropy of every canonical bipartition, in enumeration order."""
    basis = state.basis
    n = len(enumerate_bipartitions(basis.L))
    out = np.empty(n, dtype=np.float64)
    amps = state.amplitudes
    rows = np.arange(chunk_size)[:, None]
    for start in range(0, n, chunk_size):
        stop = min(start + chunk_size, n)
        pos = _bipartition_positions(basis, start, stop)
        m = stop - start
        buf = np.zeros((m, basis.dim), dtype=np.complex128)
        buf[rows[:m], pos] = amps
        out[start:stop] = _entropies_of_scattered(basis, buf)
    return out


def baee(state: SectorState, chunk_size: int = 256) -> float:
    """Bipartition-averaged entanglement entropy (exhaustive mean)."""
    return float(bipartition_entropies(state, chunk_size=chunk_size).mean())


@dataclass(frozen=True)
class HaarEstimate:
    """Monte Carlo estimate of the sector-mean half-chain entropy."""

    L: int
    mean: float
    stderr: float
    samples: int


def haar_sector_average(
    L: int, samples: int, rng: np.random.Generator, batch: int = 1024
) -> HaarEstimate:
    """Sample Haar sector states and average their half-chain entropy."""
    from .basis import enumerate_sector

    if samples < 2:
        raise ParameterError(f"need at least 2 samples, got {samples}")
    basis = enumerate_sector(L, 0)
    pos = _subset_positions(basis, tuple(range(1, L // 2 + 1)))
    values = np.empty(samples, dtype=np.float64)
    done = 0
    while done < samples:
        m = min(batch, samples - done)
        z = rng.standard_normal((m, basis.dim)) + 1j * rng.standard_normal(
            (m, basis.dim)
        )
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        buf = np.zeros((m, basis.dim), dtype=np.complex128)
        buf[np.arange(m)[:, None], pos[None, :]] = z
        values[done : done + m] = _entropies_of_scattered(basis, buf)
        done += m
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / np.sqrt(samples))
    return HaarEstimate(L=L, mean=mean, stderr=stderr, samples=samples)
