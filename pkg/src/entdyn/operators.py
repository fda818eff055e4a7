"""Dense sector Hamiltonians, disorder fields, and two-site gates.

All Hamiltonians act on an open spin-1/2 chain restricted to one
magnetization sector:

* ``build_xxz``       -- nearest-neighbour flip-flop with strength-``jz``
                         Ising term plus on-site random fields,
                         ``sum_i (SxSx + SySy + jz SzSz) + sum_i h_i Sz_i``.
* ``build_ising_z``   -- the diagonal part only, with unit Ising coupling,
                         ``sum_i SzSz + sum_i h_i Sz_i``.
* ``build_local_cut`` -- the XXZ chain with every term on the central bond
                         removed, so the two halves evolve independently
                         while all on-site fields stay active.

Two-site gates conserve magnetization and are parameterized by a flip-flop
angle ``alpha`` and an Ising angle ``beta``; in the two-site basis
(up-up, up-down, down-up, down-down) the gate is diagonal phase
``exp(-i beta/4)`` on the aligned states and mixes the anti-aligned pair
through ``exp(i beta/4) [cos(alpha/2) I - i sin(alpha/2) X]``.
``alpha = beta = pi`` gives SWAP up to the global phase ``exp(-i pi/4)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .basis import SectorBasis, bond_groups
from .errors import CapacityError, ParameterError
from .state import SectorState

_MAX_DENSE_DIM = 12870  # half filling at L = 16
_ANGLE_TOL = 1e-12


@dataclass(eq=False)
class OperatorMatrix:
    """A dense operator on one sector basis."""

    basis: SectorBasis
    elements: np.ndarray = field(repr=False)

    def __post_init__(self):
        d = self.basis.dim
        el = np.ascontiguousarray(self.elements, dtype=np.complex128)
        if el.shape != (d, d):
            raise ParameterError(f"elements must be ({d}, {d}), got {el.shape}")
        self.elements = el

    @property
    def dim(self) -> int:
        return self.basis.dim

    def hermiticity_defect(self) -> float:
        return float(np.abs(self.elements - self.elements.conj().T).max())


@dataclass(frozen=True)
class DisorderFields:
    """On-site longitudinal fields drawn uniformly from [-W, W]."""

    h: np.ndarray
    W: float

    @classmethod
    def zeros(cls, L: int) -> "DisorderFields":
        return cls(h=np.zeros(L, dtype=np.float64), W=0.0)


def sample_fields(L: int, W: float, rng: np.random.Generator) -> DisorderFields:
    """Draw one disorder realization of ``L`` fields uniform on [-W, W]."""
    if L < 1:
        raise ParameterError(f"L must be positive, got {L}")
    W = float(W)
    if W < 0:
        raise ParameterError(f"W must be nonnegative, got {W}")
    h = rng.uniform(-W, W, size=L) if W > 0 else np.zeros(L, dtype=np.float64)
    return DisorderFields(h=np.asarray(h, dtype=np.float64), W=W)


def _check_fields(basis: SectorBasis, fields: DisorderFields) -> np.ndarray:
    h = np.asarray(fields.h, dtype=np.float64)
    if h.shape != (basis.L,):
        raise ParameterError(f"fields.h must have length {basis.L}, got {h.shape}")
    return h


def _sz_table(basis: SectorBasis) -> np.ndarray:
    """sz value (+-1/2) of each site for every sector word, shape (dim, L)."""
    key = "sz_table"
    if key not in basis._cache:
        bits = (basis.states[:, None] >> np.arange(basis.L, dtype=np.int64)) & 1
        basis._cache[key] = bits.astype(np.float64) - 0.5
    return basis._cache[key]


def _build_chain(
    basis: SectorBasis,
    flip_bonds: dict[int, float],
    zz_bonds: dict[int, float],
    h: np.ndarray,
) -> OperatorMatrix:
    if basis.dim > _MAX_DENSE_DIM:
        raise CapacityError(
            f"dense operators support dim <= {_MAX_DENSE_DIM}, got {basis.dim}"
        )
    sz = _sz_table(basis)
    diag = sz @ h
    for bond, c in zz_bonds.items():
        diag = diag + c * sz[:, bond - 1] * sz[:, bond]
    H = np.zeros((basis.dim, basis.dim), dtype=np.complex128)
    np.fill_diagonal(H, diag)
    for bond, c in flip_bonds.items():
        _, _, ud, du = bond_groups(basis, bond)
        H[ud, du] += c
        H[du, ud] += c
    return OperatorMatrix(basis=basis, elements=H)


def build_xxz(basis: SectorBasis, jz: float, fields: DisorderFields) -> OperatorMatrix:
    """Open-chain XXZ Hamiltonian with on-site fields."""
    h = _check_fields(basis, fields)
    bonds = range(1, basis.L)
    return _build_chain(
        basis,
        flip_bonds={b: 0.5 for b in bonds},
        zz_bonds={b: float(jz) for b in bonds},
        h=h,
    )


def build_ising_z(basis: SectorBasis, fields: DisorderFields) -> OperatorMatrix:
    """Diagonal Hamiltonian: unit nearest-neighbour Ising term plus fields."""
    h = _check_fields(basis, fields)
    return _build_chain(
        basis,
        flip_bonds={},
        zz_bonds={b: 1.0 for b in range(1, basis.L)},
        h=h,
    )


def build_local_cut(basis: SectorBasis, jz: float, fields: DisorderFields) -> OperatorMatrix:
    """XXZ chain with the central bond fully severed.

    Every bond term (flip-flop and Ising alike) on the bond between sites
    L/2 and L/2 + 1 is dropped; on-site fields act on all sites.  Evolution
    then factorizes across the half-chain cut.
    """
    h = _check_fields(basis, fields)
    cut = basis.L // 2
    bonds = [b for b in range(1, basis.L) if b != cut]
    return _build_chain(
        basis,
        flip_bonds={b: 0.5 for b in bonds},
        zz_bonds={b: float(jz) for b in bonds},
        h=h,
    )


@dataclass(frozen=True)
class TwoQubitGate:
    """Magnetization-conserving two-site gate with angles in [0, 2 pi]."""

    alpha: float
    beta: float
    u: np.ndarray = field(repr=False, compare=False)

    @property
    def label(self) -> str:
        return gate_class(self.alpha, self.beta)


def _check_angle(name: str, value: float) -> float:
    v = float(value)
    if not (-_ANGLE_TOL <= v <= 2 * np.pi + _ANGLE_TOL):
        raise ParameterError(f"{name} must lie in [0, 2 pi], got {v}")
    return min(max(v, 0.0), 2 * np.pi)


def build_two_qubit_gate(alpha: float, beta: float) -> TwoQubitGate:
    """Construct the gate matrix in the (uu, ud, du, dd) two-site basis."""
    alpha = _check_angle("alpha", alpha)
    beta = _check_angle("beta", beta)
    u = np.zeros((4, 4), dtype=np.complex128)
    diag_phase = np.exp(-1j * beta / 4)
    mix_phase = np.exp(1j * beta / 4)
    c = np.cos(alpha / 2)
    s = np.sin(alpha / 2)
    u[0, 0] = diag_phase
    u[3, 3] = diag_phase
    u[1, 1] = mix_phase * c
    u[2, 2] = mix_phase * c
    u[1, 2] = -1j * mix_phase * s
    u[2, 1] = -1j * mix_phase * s
    return TwoQubitGate(alpha=alpha, beta=beta, u=u)


def _near(x: float, target: float) -> bool:
    return abs(x - target) < _ANGLE_TOL


def gate_class(alpha: float, beta: float) -> str:
    """Dynamical class of the gate family.

    ``A``: diagonal gates (alpha in {0, 2 pi}), inert at the amplitude
    level.  ``SWAP``: (pi, pi), pure transport.  ``C``: alpha = pi with
    trivial Ising angle.  ``D``: alpha = pi with any other Ising angle.
    ``B``: partial flip-flop with trivial Ising angle.  Everything else is
    ``generic``.
    """
    a = _check_angle("alpha", alpha)
    b = _check_angle("beta", beta)
    beta_trivial = _near(b, 0.0) or _near(b, 2 * np.pi)
    if _near(a, 0.0) or _near(a, 2 * np.pi):
        return "A"
    if _near(a, np.pi):
        if _near(b, np.pi):
            return "SWAP"
        return "C" if beta_trivial else "D"
    return "B" if beta_trivial else "generic"


def apply_gate(state: SectorState, bond: int, gate: TwoQubitGate) -> SectorState:
    """Apply a two-site gate on sites (bond, bond + 1); returns a new state."""
    uu, dd, ud, du = bond_groups(state.basis, bond)
    amps = state.amplitudes.copy()
    _kernels.gate_mix(amps, uu, dd, ud, du, gate.u)
    return SectorState(state.basis, amps)
