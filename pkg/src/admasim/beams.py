"""Analytic beam-domain quantities and spatial radiation-intensity maps.

Central object is the interference cost omega(t) between two beam directions
separated by t = cos(theta_j) - cos(theta_k): the squared magnitude of the
N-term phase-ramp sum.  It peaks at N^2 as t -> 0 and has zeros at t = 2m/N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import SimParams, path_loss_db
from .precoding import PrecodingMatrix


@dataclass(frozen=True)
class AngularSpacing:
    """Beam-domain separation t = cos(theta_j) - cos(theta_k)."""

    t: float

    def __post_init__(self):
        if abs(self.t) > 2.0:
            raise ValueError("|t| cannot exceed 2")

    @classmethod
    def between(cls, theta_j: float, theta_k: float) -> "AngularSpacing":
        return cls(t=math.cos(theta_j) - math.cos(theta_k))


def phi_relative(theta_j: float, theta_k: float, n: int) -> complex:
    """Relative amplitude at direction theta_j of an aligned beam for theta_k.

    Returns sqrt(N) when the directions coincide, otherwise
    (1/sqrt(N)) * (1 - e^{i pi N t}) / (1 - e^{i pi t}).
    """
    for th in (theta_j, theta_k):
        if not 0.0 < th < math.pi:
            raise ValueError("angles must lie in (0, pi)")
    if theta_j == theta_k:
        return complex(math.sqrt(n))
    t = math.cos(theta_j) - math.cos(theta_k)
    if t == 0.0:
        return complex(math.sqrt(n))
    num = 1.0 - np.exp(1j * math.pi * n * t)
    den = 1.0 - np.exp(1j * math.pi * t)
    return complex(num / den / math.sqrt(n))


def omega(t: float, n: int) -> float:
    """Interference cost (1 - cos(N pi t)) / (1 - cos(pi t)).

    Evaluated as sin^2(N pi t / 2) / sin^2(pi t / 2); removable singularities
    at even integer t (including t = 0) return the series limit N^2.
    Symmetric in t.
    """
    if math.fmod(t, 2.0) == 0.0:
        return float(n * n)
    s = math.sin(0.5 * math.pi * t)
    sn = math.sin(0.5 * math.pi * n * t)
    r = sn / s
    return r * r


def omega_prime(t: float, n: int) -> float:
    """Analytic derivative of omega on the validated interval (0, 2/N].

    Negative throughout (0, 2/N): widening the spacing always lowers the cost.
    """
    if not 0.0 < t <= 2.0 / n:
        raise ValueError("t must lie in (0, 2/N]")
    one_minus_cos = 2.0 * math.sin(0.5 * math.pi * t) ** 2
    one_minus_cos_n = 2.0 * math.sin(0.5 * math.pi * n * t) ** 2
    num = (n * math.pi * math.sin(n * math.pi * t) * one_minus_cos
           - math.pi * math.sin(math.pi * t) * one_minus_cos_n)
    return num / (one_minus_cos * one_minus_cos)


def omega_second_numeric(t: float, n: int, h: float) -> float:
    """Central second difference of omega, for t in (1/N + h, 2/N - h).

    Positive on (1/N, 2/N): the cost is convex near its first zero.
    """
    interval = 1.0 / n
    if h <= 0.0 or h > interval / 4.0:
        raise ValueError("step must be positive and at most (1/N)/4")
    if not (1.0 / n + h < t < 2.0 / n - h):
        raise ValueError("t must lie in (1/N + h, 2/N - h)")
    return (omega(t + h, n) - 2.0 * omega(t, n) + omega(t - h, n)) / (h * h)


def beam_pattern(
    p: np.ndarray,
    theta_samples,
    gain: complex = 1.0 + 0.0j,
    spacing_ratio: float = 0.5,
) -> np.ndarray:
    """Amplitude |gain * a(theta) . p| of a precoding column over directions."""
    thetas = np.asarray(theta_samples, dtype=float)
    if thetas.size == 0:
        raise ValueError("need at least one direction sample")
    n = p.shape[0]
    xi = spacing_ratio * np.cos(thetas)
    rows = np.exp(2j * np.pi * np.outer(xi, np.arange(n)))
    return np.abs(gain * (rows @ p))


@dataclass(frozen=True)
class GridSpec:
    """Rectangular lattice of cell centers for radiation maps."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int = 256
    ny: int = 256

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError("grid must have at least one cell per axis")
        if self.x_max <= self.x_min or self.y_max <= self.y_min:
            raise ValueError("grid bounds must be increasing")

    @classmethod
    def sector_box(cls, params: SimParams, n_cells: int = 256) -> "GridSpec":
        # Bounding box of the served sector; resolves a main lobe of width
        # 2/N in cos(theta) at the default antenna count.
        r = params.cell_radius_m
        half = math.sin(params.sector_halfwidth) * r
        return cls(x_min=-half, x_max=half, y_min=0.0, y_max=r,
                   nx=n_cells, ny=n_cells)

    @property
    def x_centers(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def y_centers(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.ny)


@dataclass(frozen=True, eq=False)
class RadiationMap:
    """Free-space received intensity per grid cell, summed over all beams."""

    x_centers: np.ndarray
    y_centers: np.ndarray
    intensity: np.ndarray  # shape (ny, nx); NaN marks skipped cells
    skipped: tuple[tuple[int, int], ...]

    def iter_rows(self):
        """(x, y, intensity) triples, skipping flagged cells."""
        for iy, y in enumerate(self.y_centers):
            for ix, x in enumerate(self.x_centers):
                v = self.intensity[iy, ix]
                if not math.isnan(v):
                    yield float(x), float(y), float(v)


def radiation_map(
    precoder: PrecodingMatrix, grid: GridSpec, params: SimParams
) -> RadiationMap:
    """Total received signal intensity over a spatial grid.

    Ideal transmission: only LOS path loss and array steering enter, no shadow
    fading and no reflections.  Cells at the array origin are skipped and
    flagged (their direction is undefined).
    """
    xs = grid.x_centers
    ys = grid.y_centers
    xx, yy = np.meshgrid(xs, ys)
    r = np.hypot(xx, yy)
    # flag every cell whose area contains the array origin; the free-space
    # model (and the cell's direction) is undefined there
    half_dx = 0.5 * (grid.x_max - grid.x_min) / max(grid.nx - 1, 1)
    half_dy = 0.5 * (grid.y_max - grid.y_min) / max(grid.ny - 1, 1)
    origin = (np.abs(xx) <= half_dx) & (np.abs(yy) <= half_dy)
    skipped = tuple((int(iy), int(ix)) for iy, ix in zip(*np.nonzero(origin)))
    r_safe = np.where(origin, 1.0, r)
    theta = np.arctan2(yy, xx)
    amp = 10.0 ** (-path_loss_db("LOS", r_safe, params.carrier_freq_mhz) / 20.0)
    xi = params.antenna_spacing_ratio * np.cos(theta)
    n = precoder.matrix.shape[0]
    rows = np.exp(2j * np.pi * xi.reshape(-1, 1) * np.arange(n))
    received = rows @ precoder.matrix  # (cells, K)
    intensity = (amp.reshape(-1) ** 2) * np.sum(np.abs(received) ** 2, axis=1)
    intensity = intensity.reshape(grid.ny, grid.nx)
    intensity[origin] = np.nan
    return RadiationMap(x_centers=xs, y_centers=ys, intensity=intensity,
                        skipped=skipped)
