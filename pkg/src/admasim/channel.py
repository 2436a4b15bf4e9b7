"""Angular multipath channel generation for a ULA base station serving a fan sector.

Users live in a circular sector served by an N-element uniform linear array.
Each user channel is a sum of a line-of-sight path and L reflected paths;
every path contributes complex_gain * steering_vector(spatial_frequency).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

# Shadow fading standard deviations in dB (variances 10**0.72 and 10**1.94).
LOS_SHADOW_STD_DB = 10.0 ** 0.36
NLOS_SHADOW_STD_DB = 10.0 ** 0.97


@dataclass(frozen=True)
class SimParams:
    """Static system parameters: array geometry, carrier, cell layout, power.

    The served sector is [pi/2 - sector_halfwidth, pi/2 + sector_halfwidth],
    measured from the array axis, so the default covers the front 2*pi/3.
    """

    n_antennas: int = 128
    antenna_spacing_ratio: float = 0.5  # d / lambda
    carrier_freq_mhz: float = 28000.0
    cell_radius_m: float = 300.0
    sector_halfwidth: float = math.pi / 3.0
    n_nlos_paths: int = 2
    tx_power_dbm: float = 50.0
    noise_power_dbm: float = -104.0

    def __post_init__(self):
        if self.n_antennas < 2:
            raise ValueError("n_antennas must be >= 2")
        if not 0.0 < self.antenna_spacing_ratio <= 0.5:
            raise ValueError("antenna_spacing_ratio must be in (0, 0.5]")
        if not 0.0 < self.sector_halfwidth <= math.pi / 2.0:
            raise ValueError("sector_halfwidth must be in (0, pi/2]")
        if self.cell_radius_m <= 0.0:
            raise ValueError("cell_radius_m must be positive")
        if self.n_nlos_paths < 0:
            raise ValueError("n_nlos_paths must be nonnegative")

    @property
    def sector(self) -> tuple[float, float]:
        half_pi = math.pi / 2.0
        return (half_pi - self.sector_halfwidth, half_pi + self.sector_halfwidth)


@dataclass(frozen=True)
class UserGeometry:
    """Polar position of a user: distance from the array and LOS azimuth."""

    distance_m: float
    theta: float

    def __post_init__(self):
        if self.distance_m <= 0.0:
            raise ValueError("distance_m must be positive")
        if not 0.0 < self.theta < math.pi:
            raise ValueError("theta must lie in (0, pi)")


@dataclass(frozen=True)
class PathComponent:
    """One propagation path: direction of arrival and complex amplitude."""

    doa: float
    gain: complex

    def __post_init__(self):
        if not 0.0 < self.doa < math.pi:
            raise ValueError("doa must lie in (0, pi)")
        if abs(self.gain) <= 0.0:
            raise ValueError("gain must be nonzero")


def steering_vector(xi: float, n: int) -> np.ndarray:
    """Phase ramp of a plane wave with spatial frequency ``xi`` across n elements.

    Element m equals exp(i * 2*pi * m * xi); all entries have unit modulus.
    """
    if n < 1:
        raise ValueError("antenna count must be >= 1")
    return np.exp(2j * np.pi * xi * np.arange(n))


def spatial_frequency(doa: float, spacing_ratio: float = 0.5) -> float:
    """Map a physical direction of arrival to the array's spatial frequency."""
    return spacing_ratio * math.cos(doa)


def assemble_vector(
    paths: tuple[PathComponent, ...] | list[PathComponent],
    n: int,
    spacing_ratio: float = 0.5,
) -> np.ndarray:
    """Sum of gain-weighted steering vectors over all paths."""
    vec = np.zeros(n, dtype=complex)
    for p in paths:
        vec += p.gain * steering_vector(spatial_frequency(p.doa, spacing_ratio), n)
    return vec


@dataclass(frozen=True, eq=False)
class UserChannel:
    """One user's multipath description and its length-N channel vector."""

    los: PathComponent
    nlos: tuple[PathComponent, ...]
    vector: np.ndarray
    spacing_ratio: float = 0.5
    geometry: UserGeometry | None = None

    @classmethod
    def from_paths(
        cls,
        los: PathComponent,
        nlos: tuple[PathComponent, ...] | list[PathComponent],
        n: int,
        spacing_ratio: float = 0.5,
        geometry: UserGeometry | None = None,
    ) -> "UserChannel":
        nlos = tuple(nlos)
        vec = assemble_vector((los, *nlos), n, spacing_ratio)
        return cls(los=los, nlos=nlos, vector=vec,
                   spacing_ratio=spacing_ratio, geometry=geometry)

    @property
    def paths(self) -> tuple[PathComponent, ...]:
        return (self.los, *self.nlos)

    @property
    def n_antennas(self) -> int:
        return self.vector.shape[0]


@dataclass(frozen=True, eq=False)
class ChannelMatrix:
    """K x N downlink channel of a user set; row k is user k's vector."""

    matrix: np.ndarray
    users: tuple[UserChannel, ...] | None = None

    def __post_init__(self):
        if self.matrix.ndim != 2 or self.matrix.shape[0] < 1:
            raise ValueError("channel matrix must be 2-D with at least one row")

    @property
    def k(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.matrix.shape[1]

    @property
    def angles(self) -> np.ndarray | None:
        """LOS azimuths of the users, when the multipath description is known."""
        if self.users is None:
            return None
        return np.array([u.los.doa for u in self.users])

    def row(self, k: int) -> np.ndarray:
        return self.matrix[k]

    def submatrix(self, indices) -> "ChannelMatrix":
        idx = list(indices)
        users = None if self.users is None else tuple(self.users[i] for i in idx)
        return ChannelMatrix(matrix=self.matrix[idx], users=users)


def place_users(params: SimParams, k: int, rng: np.random.Generator) -> list[UserGeometry]:
    """Drop k users uniformly over the area of the served sector.

    Azimuth is uniform over the sector; distance is radius * sqrt(u) with
    u ~ uniform(0, 1], which makes the radial density proportional to r.
    """
    if k < 1:
        raise ValueError("user count must be >= 1")
    lo, hi = params.sector
    geoms = []
    for _ in range(k):
        theta = rng.uniform(lo, hi)
        u = 1.0 - rng.random()  # (0, 1] so the distance is never zero
        geoms.append(UserGeometry(distance_m=params.cell_radius_m * math.sqrt(u),
                                  theta=theta))
    return geoms


def path_loss_db(kind: str, distance_m, carrier_freq_mhz, shadow_db=0.0):
    """Distance/frequency attenuation in dB for a LOS or NLOS path.

    LOS:  -30.18 + 21*log10(d) + 20*log10(f_MHz) + shadow
    NLOS: -34.53 + 34*log10(d) + 20*log10(f_MHz) + shadow

    The linear amplitude factor is 10**(-PL/20).  Accepts scalars or arrays.
    """
    d = np.asarray(distance_m, dtype=float)
    if np.any(d <= 0.0):
        raise ValueError("distance must be positive")
    if kind == "LOS":
        base, slope = -30.18, 21.0
    elif kind == "NLOS":
        base, slope = -34.53, 34.0
    else:
        raise ValueError(f"unknown path kind: {kind!r}")
    pl = base + slope * np.log10(d) + 20.0 * np.log10(carrier_freq_mhz) + shadow_db
    return float(pl) if np.isscalar(distance_m) else pl


def draw_user_channel(
    params: SimParams, geom: UserGeometry, rng: np.random.Generator
) -> UserChannel:
    """Draw one user's multipath channel.

    The LOS amplitude comes from the LOS path loss with a zero-mean Gaussian
    shadow term in dB and a uniform random phase.  Each of the L reflected
    paths gets an independent DOA uniform over the sector, an amplitude from
    the NLOS path loss, and a uniform phase.  Draw order is fixed (LOS shadow,
    LOS phase, then per path: doa, shadow, phase) so equal seeds reproduce
    bit-identical channels.
    """
    lo, hi = params.sector
    shadow = rng.normal(0.0, LOS_SHADOW_STD_DB)
    phase = rng.uniform(0.0, TWO_PI)
    pl = path_loss_db("LOS", geom.distance_m, params.carrier_freq_mhz, shadow)
    los = PathComponent(doa=geom.theta,
                        gain=10.0 ** (-pl / 20.0) * np.exp(1j * phase))
    nlos = []
    for _ in range(params.n_nlos_paths):
        doa = rng.uniform(lo, hi)
        shadow = rng.normal(0.0, NLOS_SHADOW_STD_DB)
        phase = rng.uniform(0.0, TWO_PI)
        pl = path_loss_db("NLOS", geom.distance_m, params.carrier_freq_mhz, shadow)
        nlos.append(PathComponent(doa=doa,
                                  gain=10.0 ** (-pl / 20.0) * np.exp(1j * phase)))
    return UserChannel.from_paths(los, nlos, params.n_antennas,
                                  params.antenna_spacing_ratio, geometry=geom)


def channel_matrix(users: list[UserChannel] | tuple[UserChannel, ...]) -> ChannelMatrix:
    """Stack user vectors into the K x N downlink channel matrix."""
    if len(users) < 1:
        raise ValueError("need at least one user")
    n = users[0].n_antennas
    for u in users:
        if u.n_antennas != n:
            raise ValueError("mixed channel vector lengths")
    return ChannelMatrix(matrix=np.vstack([u.vector for u in users]),
                         users=tuple(users))


def channel_debug_dump(users) -> list[dict]:
    """JSON-serializable per-user dump: geometry plus per-path doa/gain."""
    out = []
    for u in users:
        entry = {
            "distance_m": None if u.geometry is None else u.geometry.distance_m,
            "theta": None if u.geometry is None else u.geometry.theta,
            "paths": [
                {"doa": p.doa, "gain_re": p.gain.real, "gain_im": p.gain.imag}
                for p in u.paths
            ],
        }
        out.append(entry)
    return out
