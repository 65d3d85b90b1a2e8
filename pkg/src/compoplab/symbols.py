"""Analytic self-maps of the unit disk and coordinate-wise polydisk maps.

Every symbol evaluates vectorized on complex arrays, maps the open disk
into the closed disk, and reports singular evaluations instead of
returning NaN.  Boundary values are proxied by evaluation on the circle
of radius 1 - 1e-8 with a cross-check radius of 1 - 1e-6.
"""

from __future__ import annotations

import abc
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .series import PowerSeries

__all__ = [
    "DEFAULT_BOUNDARY_RADIUS",
    "CROSSCHECK_BOUNDARY_RADIUS",
    "SingularEvaluationError",
    "BranchCutWarning",
    "Symbol",
    "Identity",
    "Scalar",
    "Rotation",
    "Lens",
    "Cusp",
    "BlaschkeSquare",
    "ShapiroTaylor",
    "Compose",
    "ExplicitSeries",
    "PolydiskMap",
    "KernelPoint",
    "boundary_eval",
    "lens_semigroup_check",
    "blaschke_contraction_ratio",
    "symbol_to_dict",
    "symbol_from_dict",
    "polydisk_map_to_dict",
    "polydisk_map_from_dict",
    "shipped_symbols",
]

DEFAULT_BOUNDARY_RADIUS = 1.0 - 1e-8
CROSSCHECK_BOUNDARY_RADIUS = 1.0 - 1e-6

_CUT_NUDGE = 1e-30j


class SingularEvaluationError(ArithmeticError):
    """A symbol was evaluated at or too close to one of its singularities."""


class BranchCutWarning(UserWarning):
    """An input sat exactly on a principal branch cut and was nudged off it."""


def _nudge_off_cut(w: np.ndarray) -> np.ndarray:
    on_cut = (w.imag == 0.0) & (w.real < 0.0)
    if np.any(on_cut):
        warnings.warn(
            "input on the negative real axis nudged by +1e-30i before a "
            "principal power/log",
            BranchCutWarning,
            stacklevel=3,
        )
        w = np.where(on_cut, w + _CUT_NUDGE, w)
    return w


def _principal_power(w: np.ndarray, exponent: float) -> np.ndarray:
    return _nudge_off_cut(np.asarray(w, dtype=complex)) ** exponent


def _principal_log(w: np.ndarray) -> np.ndarray:
    return np.log(_nudge_off_cut(np.asarray(w, dtype=complex)))


class Symbol(abc.ABC):
    """Base class: an analytic map of the open disk into the closed disk."""

    @abc.abstractmethod
    def _raw(self, z: np.ndarray) -> np.ndarray:
        """Evaluate without domain or finiteness checks."""

    def evaluate(self, z):
        """Evaluate at points of the open disk (scalar or array)."""
        arr = np.asarray(z, dtype=complex)
        if np.any(np.abs(arr) >= 1.0):
            raise ValueError("evaluation point outside the open unit disk")
        out = self._raw(arr)
        if not np.all(np.isfinite(out)):
            raise SingularEvaluationError(
                f"{type(self).__name__} produced a non-finite value inside the disk"
            )
        if arr.ndim == 0:
            return complex(out)
        return out

    __call__ = evaluate

    def boundary(self, t, r_b: float = DEFAULT_BOUNDARY_RADIUS):
        """Radial-limit proxy: evaluate at r_b * e^{it}."""
        if not 0.0 < r_b < 1.0:
            raise ValueError(f"boundary radius must lie in (0, 1), got {r_b}")
        t = np.asarray(t, dtype=float)
        return self.evaluate(r_b * np.exp(1j * t))

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Identity(Symbol):
    def _raw(self, z):
        return z

    def to_dict(self):
        return {"kind": "identity"}


@dataclass(frozen=True)
class Scalar(Symbol):
    """Constant map z -> c with |c| <= 1; induces a rank-one operator."""

    c: complex

    def __post_init__(self):
        if abs(self.c) > 1.0 + 1e-12:
            raise ValueError(f"constant must satisfy |c| <= 1, got |c|={abs(self.c)}")

    def _raw(self, z):
        return np.full_like(z, complex(self.c))

    def to_dict(self):
        return {"kind": "scalar", "re": self.c.real, "im": self.c.imag}


@dataclass(frozen=True)
class Rotation(Symbol):
    alpha: float

    def _raw(self, z):
        return np.exp(1j * self.alpha) * z

    def to_dict(self):
        return {"kind": "rotation", "alpha": self.alpha}


@dataclass(frozen=True)
class Lens(Symbol):
    """Lens map with contact exponent theta in (0, 1].

    lambda_theta(z) = ((1+z)^theta - (1-z)^theta) / ((1+z)^theta + (1-z)^theta)

    with principal powers.  It fixes +-1, pinches boundary contact like
    |t|^theta, and satisfies the semigroup law
    lambda_theta o lambda_theta' = lambda_{theta*theta'}; theta = 1 is the
    identity.
    """

    theta: float

    def __post_init__(self):
        if not 0.0 < self.theta <= 1.0:
            raise ValueError(f"lens exponent must lie in (0, 1], got {self.theta}")

    def _raw(self, z):
        if self.theta == 1.0:  # by convention the exponent-one lens is the identity
            return z
        a = _principal_power(1.0 + z, self.theta)
        b = _principal_power(1.0 - z, self.theta)
        return (a - b) / (a + b)

    def one_minus(self, z):
        """1 - lambda_theta(z) = 2(1-z)^theta / ((1+z)^theta + (1-z)^theta).

        Cancellation-free form for points near the fixed point z = 1.
        """
        arr = np.asarray(z, dtype=complex)
        a = _principal_power(1.0 + arr, self.theta)
        b = _principal_power(1.0 - arr, self.theta)
        return 2.0 * b / (a + b)

    def to_dict(self):
        return {"kind": "lens", "theta": self.theta}


@dataclass(frozen=True)
class Cusp(Symbol):
    """Cusp map chi(z) = (w - b)/(w + b) with w = -Log((1-z)/4).

    |(1-z)/4| <= 1/2 on the closed disk, so Re w >= log 2 > 0 everywhere
    and the only boundary contact is at z = 1, where
    1 - chi = 2b/(w + b) gives the contact law
    |1 - chi*(e^{it})| ~ 2b / log(1/|t|).  That single logarithmic contact
    makes the pullback mass of a boundary window of size h exponentially
    small (~ e^{-2b/h}).  (A denominator of 2 instead of 4 would create a
    second, polynomial contact at z = -1 and destroy this smallness.)
    """

    b: float = 1.0

    def __post_init__(self):
        if not self.b > 0.0:
            raise ValueError(f"cusp parameter must be positive, got {self.b}")

    def _w(self, z):
        return -_principal_log((1.0 - z) / 4.0)

    def _raw(self, z):
        w = self._w(z)
        return (w - self.b) / (w + self.b)

    def one_minus(self, z):
        """1 - chi(z) = 2b/(w + b), stable near z = 1."""
        arr = np.asarray(z, dtype=complex)
        return 2.0 * self.b / (self._w(arr) + self.b)

    def to_dict(self):
        return {"kind": "cusp", "b": self.b}


@dataclass(frozen=True)
class BlaschkeSquare(Symbol):
    """B(z) = ((z-a)/(1-az))^2, 0 < a < 1: two-valent, B(D \\ {0}) = D."""

    a: float

    def __post_init__(self):
        if not 0.0 < self.a < 1.0:
            raise ValueError(f"Blaschke parameter must lie in (0, 1), got {self.a}")

    def _raw(self, z):
        return ((z - self.a) / (1.0 - self.a * z)) ** 2

    def to_dict(self):
        return {"kind": "blaschke_square", "a": self.a}


def _half_disk_map(z: np.ndarray) -> np.ndarray:
    """Conformal map of the disk onto {Re > 0, |.| < 1}, sending 1 to 0.

    Built from the Moebius map m(z) = (z-i)/(iz-1) (disk onto the upper
    half-plane), a principal square root (onto the first quadrant), and
    the inverse Moebius map.
    """
    m = (z - 1j) / (1j * z - 1.0)
    s = np.sqrt(_nudge_off_cut(m))
    return (s - 1j) / (-1j * s + 1.0)


def default_shapiro_taylor_eps(theta: float) -> float:
    """min(1/2, e^{-2 theta}): keeps z(-log z)^theta a self-map factory on V_eps."""
    return min(0.5, math.exp(-2.0 * theta))


@dataclass(frozen=True)
class ShapiroTaylor(Symbol):
    """Shapiro-Taylor map exp(-f_theta o g_theta), f_theta(z) = z(-log z)^theta.

    g_theta maps the disk onto the half-disk sector V_eps = {Re > 0, |.| < eps};
    the induced composition operator is compact for every theta > 0 and
    Hilbert-Schmidt exactly for theta > 2.
    """

    theta: float
    eps: float | None = None

    def __post_init__(self):
        if not self.theta > 0.0:
            raise ValueError(f"exponent must be positive, got {self.theta}")
        if self.eps is None:
            object.__setattr__(self, "eps", default_shapiro_taylor_eps(self.theta))
        if not 0.0 < self.eps < 1.0:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")

    def _raw(self, z):
        g = self.eps * _half_disk_map(z)
        if np.any(g == 0.0):
            raise SingularEvaluationError("inner map hit the logarithmic singularity at 0")
        f = g * _principal_power(-np.log(g), self.theta)
        return np.exp(-f)

    def to_dict(self):
        return {"kind": "shapiro_taylor", "theta": self.theta, "eps": self.eps}


@dataclass(frozen=True)
class Compose(Symbol):
    outer: Symbol
    inner: Symbol

    def _raw(self, z):
        return self.outer._raw(self.inner._raw(z))

    def to_dict(self):
        return {"kind": "compose", "outer": self.outer.to_dict(), "inner": self.inner.to_dict()}


@dataclass(frozen=True)
class ExplicitSeries(Symbol):
    """Symbol given by a truncated Taylor polynomial (caller guarantees self-map)."""

    series: PowerSeries

    def _raw(self, z):
        return self.series(z)

    def to_dict(self):
        return {
            "kind": "explicit",
            "coeffs_re": [float(c.real) for c in self.series.coeffs],
            "coeffs_im": [float(c.imag) for c in self.series.coeffs],
            "alias_error": self.series.alias_error,
        }


_KINDS = {}


def _register(kind, builder):
    _KINDS[kind] = builder


_register("identity", lambda d: Identity())
_register("scalar", lambda d: Scalar(complex(d["re"], d["im"])))
_register("rotation", lambda d: Rotation(float(d["alpha"])))
_register("lens", lambda d: Lens(float(d["theta"])))
_register("cusp", lambda d: Cusp(float(d["b"])))
_register("blaschke_square", lambda d: BlaschkeSquare(float(d["a"])))
_register(
    "shapiro_taylor",
    lambda d: ShapiroTaylor(float(d["theta"]), float(d["eps"])),
)
_register(
    "compose",
    lambda d: Compose(symbol_from_dict(d["outer"]), symbol_from_dict(d["inner"])),
)
_register(
    "explicit",
    lambda d: ExplicitSeries(
        PowerSeries(
            np.asarray(d["coeffs_re"], dtype=float) + 1j * np.asarray(d["coeffs_im"], dtype=float),
            alias_error=float(d.get("alias_error", 0.0)),
        )
    ),
)


def symbol_to_dict(spec: Symbol) -> dict:
    return spec.to_dict()


def symbol_from_dict(d: dict) -> Symbol:
    try:
        builder = _KINDS[d["kind"]]
    except KeyError as exc:
        raise ValueError(f"unknown symbol kind {d.get('kind')!r}") from exc
    return builder(d)


def symbol_to_json(spec: Symbol) -> str:
    return json.dumps(symbol_to_dict(spec), sort_keys=True)


def symbol_from_json(text: str) -> Symbol:
    return symbol_from_dict(json.loads(text))


@dataclass(frozen=True)
class PolydiskMap:
    """Coordinate-wise self-map of D^N: output j is map_j(z_{source_j}).

    Sources are 1-based coordinate indices; the diagonal map repeats the
    first coordinate through a single 1-d symbol.
    """

    dimension: int
    coords: tuple

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        coords = tuple((int(src), spec) for src, spec in self.coords)
        if len(coords) != self.dimension:
            raise ValueError(
                f"need exactly {self.dimension} coordinate maps, got {len(coords)}"
            )
        for src, spec in coords:
            if not 1 <= src <= self.dimension:
                raise ValueError(f"source index {src} out of range 1..{self.dimension}")
            if not isinstance(spec, Symbol):
                raise TypeError("coordinate maps must be Symbol instances")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def diagonal(cls, spec: Symbol, dimension: int) -> "PolydiskMap":
        return cls(dimension, tuple((1, spec) for _ in range(dimension)))

    @property
    def is_diagonal(self) -> bool:
        first = self.coords[0]
        return all(c == first for c in self.coords)

    def evaluate(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != self.dimension:
            raise ValueError(f"expected points of D^{self.dimension}")
        out = np.empty_like(z)
        for j, (src, spec) in enumerate(self.coords):
            out[..., j] = spec.evaluate(z[..., src - 1])
        return out


def polydisk_map_to_dict(poly: PolydiskMap) -> dict:
    return {
        "dimension": poly.dimension,
        "coords": [{"source": src, "map": spec.to_dict()} for src, spec in poly.coords],
    }


def polydisk_map_from_dict(d: dict) -> PolydiskMap:
    coords = tuple(
        (int(entry["source"]), symbol_from_dict(entry["map"])) for entry in d["coords"]
    )
    return PolydiskMap(int(d["dimension"]), coords)


@dataclass(frozen=True)
class KernelPoint:
    """Node (a_1, ..., a_N) of a polydisk reproducing kernel, all |a_j| < 1."""

    values: tuple

    def __post_init__(self):
        vals = tuple(complex(v) for v in self.values)
        if not vals:
            raise ValueError("kernel point needs at least one coordinate")
        if any(abs(v) >= 1.0 for v in vals):
            raise ValueError("kernel point coordinates must lie strictly inside the disk")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)


def boundary_eval(spec: Symbol, t, r_b: float = DEFAULT_BOUNDARY_RADIUS):
    """Radial-limit proxy phi*(e^{it}) ~ phi(r_b e^{it})."""
    return spec.boundary(t, r_b)


def lens_semigroup_check(theta: float, theta_prime: float, grid) -> float:
    """max_z |lambda_theta(lambda_theta'(z)) - lambda_{theta theta'}(z)| over the grid."""
    prod = theta * theta_prime
    if not (0.0 < theta <= 1.0 and 0.0 < theta_prime <= 1.0 and 0.0 < prod <= 1.0):
        raise ValueError("lens exponents and their product must lie in (0, 1]")
    grid = np.asarray(grid, dtype=complex)
    outer, inner, direct = Lens(theta), Lens(theta_prime), Lens(prod)
    composed = outer.evaluate(inner.evaluate(grid))
    return float(np.max(np.abs(composed - direct.evaluate(grid))))


def blaschke_contraction_ratio(a: float, z: complex) -> float:
    """(1 - |B(z)|)/(1 - |z|) for B = BlaschkeSquare(a); always >= (1-a^2)/4."""
    if not 0.0 < a < 1.0:
        raise ValueError("Blaschke parameter must lie in (0, 1)")
    if abs(z) >= 1.0:
        raise ValueError("point must lie inside the disk")
    value = BlaschkeSquare(a).evaluate(z)
    return (1.0 - abs(value)) / (1.0 - abs(z))


def shipped_symbols() -> dict:
    """The roster of evaluable symbols exercised by the test and experiment suite."""
    half = ExplicitSeries(PowerSeries([0.0, 0.5]))
    return {
        "identity": Identity(),
        "rotation": Rotation(math.pi / math.sqrt(2.0)),
        "scalar-half": Scalar(0.5),
        "half-map": half,
        "lens-half": Lens(0.5),
        "lens-quarter": Lens(0.25),
        "cusp": Cusp(),
        "blaschke-square": BlaschkeSquare(0.5),
        "blaschke-lens": Compose(BlaschkeSquare(0.5), Lens(0.5)),
        "blaschke-half-map": Compose(BlaschkeSquare(0.5), half),
        "shapiro-taylor-2": ShapiroTaylor(2.0),
    }
