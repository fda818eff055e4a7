"""The Markov chain that SWAP circuits induce on equal bipartitions.

A SWAP gate on bond (i, i+1) relabels two sites, so it maps one equal
bipartition to another: the partition changes exactly when the bond
straddles it.  With bonds drawn uniformly from the L-1 chain bonds, the
partition performs a random walk whose transition probabilities are
``P[x, y] = k(x, y) / (L - 1)`` with ``k`` the number of bonds sending x
to y.  The matrix is symmetric and doubly stochastic, so the uniform
distribution over all ``C(L-1, L/2-1)`` canonical bipartitions is
stationary; the walk is irreducible, and self-loops (bonds interior to
either side) make it aperiodic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

import numpy as np

from . import _kernels
from .entanglement import Bipartition, enumerate_bipartitions
from .errors import CapacityError, NumericError, ParameterError

_MAX_DENSE_L = 14


def swap_action(bp: Bipartition, bond: int) -> Bipartition:
    """Image of a bipartition under the SWAP on sites (bond, bond + 1)."""
    if not 1 <= bond <= bp.L - 1:
        raise ParameterError(f"bond must be in 1..{bp.L - 1}, got {bond}")
    i, j = bond, bond + 1
    inside = set(bp.sites)
    if (i in inside) == (j in inside):
        return bp
    swapped = (inside - {i, j}) | ({i, j} - inside)
    return Bipartition.from_sites(bp.L, sorted(swapped))


@dataclass(eq=False)
class TransitionMatrix:
    """Dense bond-average transition matrix over canonical bipartitions."""

    L: int
    states: tuple[Bipartition, ...]
    P: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.states)

    def index_of(self, bp: Bipartition) -> int:
        masks = [s.mask for s in self.states]
        pos = int(np.searchsorted(masks, bp.mask))
        if pos >= len(masks) or masks[pos] != bp.mask:
            raise ParameterError(f"bipartition {bp.sites} not in state list")
        return pos


def _successor_table(L: int) -> tuple[tuple[Bipartition, ...], np.ndarray]:
    states = enumerate_bipartitions(L)
    index = {bp.mask: i for i, bp in enumerate(states)}
    table = np.empty((len(states), L - 1), dtype=np.int64)
    for i, bp in enumerate(states):
        for b in range(1, L):
            table[i, b - 1] = index[swap_action(bp, b).mask]
    return states, table


def transition_matrix(L: int) -> TransitionMatrix:
    """Exact transition matrix; dense storage supports L up to 14.

    ``L = 2`` is rejected: its single bipartition makes the chain a
    degenerate one-state walk.
    """
    if L < 4 or L % 2 != 0:
        raise ParameterError(f"L must be even and at least 4, got {L}")
    if L > _MAX_DENSE_L:
        raise CapacityError(f"dense transition matrix supports L <= {_MAX_DENSE_L}")
    states, table = _successor_table(L)
    n = len(states)
    counts = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for b in range(L - 1):
            counts[i, table[i, b]] += 1
    return TransitionMatrix(L=L, states=states, P=counts / float(L - 1))


def stationary_distribution(P: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Stationary row vector of a stochastic matrix, solved directly.

    Solves ``pi (P - I) = 0`` with the normalization ``sum(pi) = 1`` as a
    replacement equation; power iteration stalls around 1e-12 once the
    spectral gap is small, which is not good enough for the exactness
    checks this chain supports.  Raises ``NumericError`` when the residual
    ``max|pi P - pi|`` exceeds ``tol``.
    """
    P = np.asarray(P, dtype=np.float64)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ParameterError(f"P must be square, got shape {P.shape}")
    n = P.shape[0]
    A = P.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"stationary solve failed: {exc}")
    residual = float(np.abs(pi @ P - pi).max())
    if residual > tol:
        raise NumericError(f"stationary residual {residual:.3e} exceeds {tol:.3e}")
    return pi / pi.sum()


@dataclass(frozen=True)
class ErgodicityReport:
    irreducible: bool
    aperiodic: bool
    period: int
    has_self_loop: bool


def verify_ergodicity(tm: TransitionMatrix) -> ErgodicityReport:
    """Breadth-first reachability and cycle-length gcd of the walk graph."""
    P = tm.P
    n = P.shape[0]
    if n < 2:
        raise ParameterError("ergodicity analysis needs at least two states")
    adj = [np.flatnonzero(P[i] > 0) for i in range(n)]
    level = np.full(n, -1, dtype=np.int64)
    level[0] = 0
    queue = [0]
    while queue:
        u = queue.pop()
        for v in adj[u]:
            if level[v] < 0:
                level[v] = level[u] + 1
                queue.append(int(v))
    irreducible = bool((level >= 0).all())
    g = 0
    if irreducible:
        for u in range(n):
            for v in adj[u]:
                g = gcd(g, int(level[u] + 1 - level[v]))
    period = abs(g) if irreducible else 0
    return ErgodicityReport(
        irreducible=irreducible,
        aperiodic=irreducible and period == 1,
        period=period,
        has_self_loop=bool(np.diag(P).max() > 0),
    )


def second_eigenvalue_modulus(P: np.ndarray) -> float:
    """Modulus of the subdominant eigenvalue (convergence rate)."""
    vals = np.linalg.eigvals(np.asarray(P, dtype=np.float64))
    mods = np.sort(np.abs(vals))
    return float(mods[-2]) if mods.size > 1 else 0.0


@dataclass(frozen=True)
class OccupationResult:
    """Visit statistics of a simulated bipartition walk."""

    L: int
    counts: np.ndarray
    frequencies: np.ndarray
    tv_distance: float
    steps: int
    burn_in: int
    start_index: int


def monte_carlo_occupation(
    L: int,
    steps: int,
    burn_in: int,
    rng: np.random.Generator,
    start: Bipartition | None = None,
) -> OccupationResult:
    """Simulate the walk and compare occupation to the uniform law.

    ``burn_in`` transitions are discarded, the remaining ``steps - burn_in``
    visited states are tallied, and ``tv_distance`` is the total-variation
    gap to uniform.  The walk starts from the half-chain bipartition unless
    ``start`` is given.
    """
    if burn_in < 0 or steps <= burn_in:
        raise ParameterError("need steps > burn_in >= 0")
    states, table = _successor_table(L)
    if start is None:
        start = Bipartition.half_chain(L)
    index = {bp.mask: i for i, bp in enumerate(states)}
    if start.mask not in index:
        raise ParameterError(f"start bipartition {start.sites} not canonical for L={L}")
    s0 = index[start.mask]
    bonds = rng.integers(0, L - 1, size=steps)
    _, counts = _kernels.swap_walk(table, s0, bonds, burn_in)
    kept = steps - burn_in
    freq = counts / float(kept)
    n = len(states)
    tv = 0.5 * float(np.abs(freq - 1.0 / n).sum())
    return OccupationResult(
        L=L,
        counts=counts,
        frequencies=freq,
        tv_distance=tv,
        steps=steps,
        burn_in=burn_in,
        start_index=s0,
    )


def markov_report(
    L: int, steps: int, burn_in: int, rng: np.random.Generator
) -> dict:
    """Exact-chain checks plus a Monte Carlo occupation comparison."""
    tm = transition_matrix(L)
    P = tm.P
    n = tm.n
    symmetric = bool(np.abs(P - P.T).max() <= 1e-15)
    rows = np.abs(P.sum(axis=1) - 1.0).max()
    cols = np.abs(P.sum(axis=0) - 1.0).max()
    erg = verify_ergodicity(tm)
    occ = monte_carlo_occupation(L, steps, burn_in, rng)
    return {
        "L": L,
        "N": n,
        "symmetric": symmetric,
        "doubly_stochastic": bool(max(rows, cols) <= 1e-14),
        "irreducible": erg.irreducible,
        "aperiodic": erg.aperiodic,
        "slem": second_eigenvalue_modulus(P),
        "tv_distance": occ.tv_distance,
        "stationary": [float(x) for x in stationary_distribution(P)],
    }
