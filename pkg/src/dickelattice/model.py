"""Parameters and the rescaled per-site mean-field state.

All frequencies are in units of a reference omega and times in 1/omega.
Photon amplitudes carry a 1/sqrt(N_a) rescaling and spin expectation
values a 1/N_a rescaling, so the atom number per site never appears
anywhere in the package.  Physical spin states live on the sphere
|s_j|^2 + z_j^2 = 1/4.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ShapeError

# Spin-sphere tolerance: well above double-precision drift over the
# longest integrations used here, well below any physical feature size.
EPS_SPIN = 1e-9


class BoundaryCondition(enum.Enum):
    Periodic = "periodic"
    Open = "open"


@dataclass(frozen=True)
class LatticeParams:
    """Physical parameters of the lattice.

    The boundary hop lam is derived, never stored: lam = xi when the
    chain is closed into a ring, 0 when the ends are open.  xi may be
    negative.  Construction performs no checking; call validate().
    """

    n_sites: int
    omega_c: float = 1.0
    omega_a: float = 1.0
    g: float = 0.0
    xi: float = 0.0
    kappa: float = 0.0
    bc: BoundaryCondition = BoundaryCondition.Periodic

    @property
    def lam(self) -> float:
        return self.xi if self.bc is BoundaryCondition.Periodic else 0.0


def validate(params: LatticeParams) -> None:
    """Raise DomainError naming the violated invariant; return None if ok."""
    n = params.n_sites
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise DomainError(f"n_sites must be an integer, got {n!r}")
    if n < 2:
        raise DomainError(f"n_sites must be >= 2, got {n}")
    for name in ("omega_c", "omega_a", "g", "xi", "kappa"):
        val = getattr(params, name)
        if not np.isfinite(val):
            raise DomainError(f"{name} must be finite, got {val!r}")
    if params.omega_c <= 0:
        raise DomainError(f"omega_c must be > 0, got {params.omega_c}")
    if params.omega_a <= 0:
        raise DomainError(f"omega_a must be > 0, got {params.omega_a}")
    if params.kappa < 0:
        raise DomainError(f"kappa must be >= 0, got {params.kappa}")
    if params.g < 0:
        raise DomainError(f"g must be >= 0, got {params.g}")
    if not isinstance(params.bc, BoundaryCondition):
        raise DomainError(f"bc must be a BoundaryCondition, got {params.bc!r}")


@dataclass(frozen=True, eq=False)
class MeanFieldState:
    """Per-site order parameters (a_j, s_j, z_j).

    a_j is the photon amplitude, s_j the spin coherence, z_j the real
    inversion.  Arrays are read-only after construction.  The spin
    constraint is not enforced here; measure it with spin_defect().
    """

    a: np.ndarray
    s: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=complex)
        s = np.array(self.s, dtype=complex)
        z = np.array(self.z, dtype=float)
        if not (a.ndim == s.ndim == z.ndim == 1):
            raise ShapeError("a, s, z must be one-dimensional arrays")
        if not (a.size == s.size == z.size):
            raise ShapeError(
                f"site counts differ: a has {a.size}, s has {s.size}, z has {z.size}")
        for arr, name in ((a, "a"), (s, "s"), (z, "z")):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.a.size

    def pack(self) -> np.ndarray:
        """Real coordinate vector [Re a, Im a, Re s, Im s, z], length 5N."""
        return np.concatenate(
            [self.a.real, self.a.imag, self.s.real, self.s.imag, self.z])

    @classmethod
    def from_packed(cls, y) -> "MeanFieldState":
        y = np.asarray(y, dtype=float)
        if y.ndim != 1 or y.size % 5 != 0:
            raise ShapeError(f"packed vector must have length 5N, got shape {y.shape}")
        u, v, p, q, z = np.split(y, 5)
        return cls(a=u + 1j * v, s=p + 1j * q, z=z)

    def spin_defect(self) -> float:
        """max_j | |s_j|^2 + z_j^2 - 1/4 |, zero for exact spin states."""
        return float(np.max(np.abs(np.abs(self.s) ** 2 + self.z ** 2 - 0.25)))


def normal_state(n_sites: int) -> MeanFieldState:
    """Dark state: a = s = 0, z = -1/2 on every site."""
    if isinstance(n_sites, bool) or not isinstance(n_sites, (int, np.integer)):
        raise DomainError(f"n_sites must be an integer, got {n_sites!r}")
    if n_sites < 1:
        raise DomainError(f"n_sites must be >= 1, got {n_sites}")
    n = int(n_sites)
    return MeanFieldState(
        a=np.zeros(n, complex), s=np.zeros(n, complex), z=np.full(n, -0.5))


def inverted_normal_state(n_sites: int) -> MeanFieldState:
    """Fully inverted dark state: a = s = 0, z = +1/2 on every site."""
    base = normal_state(n_sites)
    return MeanFieldState(a=base.a, s=base.s, z=-base.z)


# ---------------------------------------------------------------------------
# symmetry operations

def z2_flip(state: MeanFieldState) -> MeanFieldState:
    """(a, s, z) -> (-a, -s, z), the broken symmetry of the superradiant onset."""
    return MeanFieldState(a=-state.a, s=-state.s, z=state.z)


def cyclic_shift(state: MeanFieldState, r: int = 1) -> MeanFieldState:
    """Shift site j to site j+r (ring geometry)."""
    return MeanFieldState(
        a=np.roll(state.a, r), s=np.roll(state.s, r), z=np.roll(state.z, r))


def reflect(state: MeanFieldState) -> MeanFieldState:
    """Reverse the site order, j -> N+1-j."""
    return MeanFieldState(a=state.a[::-1], s=state.s[::-1], z=state.z[::-1])


def symmetry_orbit(state: MeanFieldState, bc: BoundaryCondition):
    """All images of state under the sign flip times the lattice symmetry group.

    Ring: flip x cyclic shifts, 2N images.  Open chain: flip x reflection,
    4 images.  The identity image comes first; duplicates are not removed
    (symmetric states produce coinciding images).
    """
    if bc is BoundaryCondition.Periodic:
        spatial = [cyclic_shift(state, r) for r in range(state.n)]
    else:
        spatial = [state, reflect(state)]
    return spatial + [z2_flip(x) for x in spatial]


# ---------------------------------------------------------------------------
# plain-data serialization helpers (JSON-friendly dicts)

def params_to_jsonable(params: LatticeParams) -> dict:
    return {
        "n_sites": int(params.n_sites),
        "omega_c": float(params.omega_c),
        "omega_a": float(params.omega_a),
        "g": float(params.g),
        "xi": float(params.xi),
        "kappa": float(params.kappa),
        "bc": params.bc.value,
    }


def params_from_jsonable(d: dict) -> LatticeParams:
    return LatticeParams(
        n_sites=int(d["n_sites"]),
        omega_c=float(d.get("omega_c", 1.0)),
        omega_a=float(d.get("omega_a", 1.0)),
        g=float(d.get("g", 0.0)),
        xi=float(d.get("xi", 0.0)),
        kappa=float(d.get("kappa", 0.0)),
        bc=BoundaryCondition(d.get("bc", "periodic")),
    )


def state_to_jsonable(state: MeanFieldState) -> dict:
    return {
        "re_a": state.a.real.tolist(),
        "im_a": state.a.imag.tolist(),
        "re_s": state.s.real.tolist(),
        "im_s": state.s.imag.tolist(),
        "z": state.z.tolist(),
    }


def state_from_jsonable(d: dict) -> MeanFieldState:
    a = np.asarray(d["re_a"], float) + 1j * np.asarray(d["im_a"], float)
    s = np.asarray(d["re_s"], float) + 1j * np.asarray(d["im_s"], float)
    return MeanFieldState(a=a, s=s, z=np.asarray(d["z"], float))
