"""Pullback measures on the boundary: windows, rho profiles, level sets.

The pullback measure of a symbol phi is estimated from Q equispaced
boundary samples of the radial-limit proxy.  A window S(xi, h) collects
the samples with |phi* - xi| <= h; rho(h) is the maximum window mass over
a grid of centers at spacing h/4, and the level quantity is the mass of
{|phi*| >= 1 - h}.  Equispaced sampling makes every estimate a
deterministic Riemann sum.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass

import numpy as np

from .symbols import DEFAULT_BOUNDARY_RADIUS, Symbol, boundary_eval

__all__ = [
    "DEFAULT_SAMPLES",
    "default_h_grid",
    "CarlesonProfile",
    "CarlesonOrderFit",
    "window_measure",
    "rho_profile",
    "carleson_order_fit",
    "write_profile_csv",
]

DEFAULT_SAMPLES = 1 << 20


def default_h_grid() -> np.ndarray:
    """Geometric grid 2^-1 down to 2^-10."""
    return 2.0 ** -np.arange(1, 11, dtype=float)


@dataclass(frozen=True)
class CarlesonProfile:
    """Sampled h -> rho(h) together with level-set masses.

    rho_upper is the same maximum taken with windows of size 1.5h; the
    unobservable true sup over all centers is bracketed between rho_hat
    and rho_upper.
    """

    h_grid: np.ndarray
    rho_hat: np.ndarray
    level_hat: np.ndarray
    samples: int
    xi_grid_size: int
    r_b: float
    rho_upper: np.ndarray | None = None

    def __post_init__(self):
        h = np.asarray(self.h_grid, dtype=float)
        rho = np.asarray(self.rho_hat, dtype=float)
        lev = np.asarray(self.level_hat, dtype=float)
        if not (h.shape == rho.shape == lev.shape):
            raise ValueError("h_grid, rho_hat and level_hat must have equal shapes")
        if np.any(h <= 0) or np.any(np.diff(h) >= 0):
            raise ValueError("h_grid must be positive and strictly decreasing")
        for name, arr in (("rho_hat", rho), ("level_hat", lev)):
            if np.any(arr < 0) or np.any(arr > 1):
                raise ValueError(f"{name} must take values in [0, 1]")
        # both quantities are monotone masses: non-decreasing in h
        if np.any(np.diff(rho) > 1e-15) or np.any(np.diff(lev) > 1e-15):
            raise ValueError("rho_hat and level_hat must be non-decreasing in h")
        object.__setattr__(self, "h_grid", h)
        object.__setattr__(self, "rho_hat", rho)
        object.__setattr__(self, "level_hat", lev)

    @classmethod
    def synthetic(cls, h_grid, rho_fn, level_fn=None) -> "CarlesonProfile":
        """Profile built from closed-form rho (and optionally level) laws."""
        h = np.asarray(h_grid, dtype=float)
        rho = np.clip(np.asarray([rho_fn(x) for x in h], dtype=float), 0.0, 1.0)
        if level_fn is None:
            lev = np.zeros_like(h)
        else:
            lev = np.clip(np.asarray([level_fn(x) for x in h], dtype=float), 0.0, 1.0)
        return cls(h, rho, lev, samples=0, xi_grid_size=0, r_b=1.0)


def _boundary_values(spec: Symbol, samples: int, r_b: float) -> np.ndarray:
    t = 2.0 * np.pi * np.arange(samples) / samples
    return np.asarray(boundary_eval(spec, t, r_b))


def window_measure(
    spec: Symbol,
    xi: complex,
    h: float,
    samples: int = DEFAULT_SAMPLES,
    r_b: float = DEFAULT_BOUNDARY_RADIUS,
) -> float:
    """Mass of the window S(xi, h) under Q equispaced boundary samples."""
    if abs(abs(xi) - 1.0) > 1e-9:
        raise ValueError("window center must be unimodular")
    if not 0.0 < h < 2.0:
        raise ValueError(f"window size must lie in (0, 2), got {h}")
    w = _boundary_values(spec, samples, r_b)
    return float(np.count_nonzero(np.abs(w - xi) <= h)) / samples


def _max_window_mass(w: np.ndarray, h: float, centers: int) -> int:
    """Maximum number of samples in a window of size h over equispaced centers.

    A sample w is in S(e^{i b}, h) iff b lies in an arc around arg(w) of
    half-width arccos((|w|^2 + 1 - h^2)/(2|w|)); the max coverage over
    centers is found by a sorted sweep, O(Q log Q + G log G) total.
    """
    m = np.abs(w)
    eligible = m >= max(1.0 - h, 1e-12)
    if not np.any(eligible):
        return 0
    m = m[eligible]
    q = (m * m + 1.0 - h * h) / (2.0 * m)
    always = q < -1.0
    base = int(np.count_nonzero(always))
    arcs = (~always) & (q <= 1.0)
    if not np.any(arcs):
        return base
    psi = np.angle(w[eligible][arcs])
    alpha = np.arccos(np.clip(q[arcs], -1.0, 1.0))
    lo = np.mod(psi - alpha, 2.0 * np.pi)
    hi = np.mod(psi + alpha, 2.0 * np.pi)
    wraps = lo > hi
    starts = np.concatenate([lo[~wraps], lo[wraps], np.zeros(np.count_nonzero(wraps))])
    ends = np.concatenate([hi[~wraps], np.full(np.count_nonzero(wraps), 2.0 * np.pi), hi[wraps]])
    starts.sort()
    ends.sort()
    beta = 2.0 * np.pi * np.arange(centers) / centers
    coverage = np.searchsorted(starts, beta, side="right") - np.searchsorted(
        ends, beta, side="left"
    )
    return base + int(coverage.max())


def rho_profile(
    spec: Symbol,
    h_grid=None,
    samples: int = DEFAULT_SAMPLES,
    xi_grid_size: int | None = None,
    r_b: float = DEFAULT_BOUNDARY_RADIUS,
    bracket: bool = True,
) -> CarlesonProfile:
    """Estimate rho(h) and the level mass m({|phi*| >= 1-h}) on a grid of h.

    Window centers default to spacing h/4.  A user-pinned xi_grid_size
    coarser than h triggers a warning because the sup may then be
    underestimated.
    """
    h_grid = default_h_grid() if h_grid is None else np.sort(np.asarray(h_grid, dtype=float))[::-1]
    w = _boundary_values(spec, samples, r_b)
    moduli_sorted = np.sort(np.abs(w))

    rho = np.empty_like(h_grid)
    lev = np.empty_like(h_grid)
    upper = np.empty_like(h_grid) if bracket else None
    max_centers = 0
    for i, h in enumerate(h_grid):
        if xi_grid_size is None:
            centers = max(int(np.ceil(8.0 * np.pi / h)), 8)
        else:
            centers = int(xi_grid_size)
            if 2.0 * np.pi / centers > h:
                warnings.warn(
                    f"window-center spacing {2 * np.pi / centers:.3g} is coarser than "
                    f"h={h:.3g}; the sup over centers may be underestimated",
                    stacklevel=2,
                )
        max_centers = max(max_centers, centers)
        rho[i] = _max_window_mass(w, h, centers) / samples
        if bracket:
            upper[i] = _max_window_mass(w, min(1.5 * h, 2.0), centers) / samples
        lev[i] = (samples - np.searchsorted(moduli_sorted, 1.0 - h, side="left")) / samples

    # enforce exact monotonicity against sweep rounding at repeated masses
    rho = np.maximum.accumulate(rho[::-1])[::-1]
    lev = np.maximum.accumulate(lev[::-1])[::-1]
    if bracket:
        upper = np.maximum.accumulate(upper[::-1])[::-1]
        upper = np.maximum(upper, rho)
    return CarlesonProfile(
        h_grid, rho, lev, samples=samples, xi_grid_size=max_centers, r_b=r_b, rho_upper=upper
    )


@dataclass(frozen=True)
class CarlesonOrderFit:
    """Least-squares exponent of rho(h) ~ h^alpha; degenerate when rho has
    fewer than four positive grid values."""

    alpha: float | None
    r_squared: float | None
    points_used: int
    degenerate: bool


def carleson_order_fit(profile: CarlesonProfile) -> CarlesonOrderFit:
    mask = profile.rho_hat > 0.0
    n = int(np.count_nonzero(mask))
    if n < 4:
        return CarlesonOrderFit(alpha=None, r_squared=None, points_used=n, degenerate=True)
    x = np.log(profile.h_grid[mask])
    y = np.log(profile.rho_hat[mask])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return CarlesonOrderFit(alpha=float(slope), r_squared=r2, points_used=n, degenerate=False)


def write_profile_csv(profile: CarlesonProfile, path, meta: dict | None = None) -> None:
    """CSV with columns h, rho_hat, level_hat, Q, xi_grid_size, r_b."""
    with open(path, "w", newline="") as fh:
        if meta is not None:
            fh.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["h", "rho_hat", "level_hat", "Q", "xi_grid_size", "r_b"])
        for h, rho, lev in zip(profile.h_grid, profile.rho_hat, profile.level_hat):
            writer.writerow(
                [
                    repr(float(h)),
                    repr(float(rho)),
                    repr(float(lev)),
                    profile.samples,
                    profile.xi_grid_size,
                    repr(float(profile.r_b)),
                ]
            )
