"""Matrices of composition operators in orthonormal monomial bases.

Column k of the matrix of C_phi is the coefficient vector of phi^k.  For a
weighted-Bergman domain the orthonormal basis is (k+1)^((gamma+1)/2) z^k,
which puts the scalar (k+1)^((gamma+1)/2) on column k.  The diagonal
polydisk map Phi(z) = (phi(z_1), ..., phi(z_1)) on H^2(D^N) reduces
exactly to a one-variable matrix with multiplicity weights
sqrt(C(k+N-1, N-1)); see `build_diagonal_polydisk_matrix`.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .series import MAX_ORDER, SpaceParam, default_radius, default_sample_count
from .symbols import KernelPoint, PolydiskMap, SingularEvaluationError, Symbol

__all__ = [
    "OperatorMatrix",
    "SizeGuardError",
    "HsReport",
    "WitnessNorms",
    "build_matrix",
    "build_diagonal_polydisk_matrix",
    "multi_index_oracle",
    "hs_norm_sq",
    "kernel_ratio",
    "unboundedness_witness",
    "save_matrix",
    "load_matrix",
]

ORACLE_SIZE_CAP = 3000


class SizeGuardError(ValueError):
    """A brute-force construction would exceed its size envelope."""


@dataclass(frozen=True)
class OperatorMatrix:
    """Finite section of a composition operator in orthonormal bases.

    column_weights records the scalar applied to column k (Bergman and/or
    multiplicity factors); entries[:, k] equals weight_k times the
    coefficients of phi^k.
    """

    entries: np.ndarray
    domain: SpaceParam
    codomain: SpaceParam
    column_weights: np.ndarray
    symbol: object
    truncation: int

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2:
            raise ValueError("entries must be a 2-d matrix")
        if not np.all(np.isfinite(m)):
            raise ValueError("matrix entries must be finite")
        object.__setattr__(self, "entries", m)
        object.__setattr__(
            self, "column_weights", np.asarray(self.column_weights, dtype=float)
        )

    @property
    def shape(self):
        return self.entries.shape


def _grid_power_columns(spec: Symbol, truncation: int):
    """Yield (k, coeffs of phi^k truncated below `truncation`) for k = 0..K-1.

    One evaluation of phi on the sampling circle, then pointwise powers and
    one FFT per column.  Requires sup |phi| <= 1 so the alias bound holds
    uniformly in k.
    """
    order = truncation - 1
    r = default_radius(order)
    m = default_sample_count(order)
    nodes = r * np.exp(2j * np.pi * np.arange(m) / m)
    values = np.asarray(spec.evaluate(nodes), dtype=complex)
    top = float(np.max(np.abs(values)))
    if top > 1.0 + 1e-9:
        raise SingularEvaluationError(
            f"symbol is not a self-map on the sampling circle (max modulus {top:.6g})"
        )
    unscale = 1.0 / (m * r ** np.arange(truncation))
    running = np.ones(m, dtype=complex)
    for k in range(truncation):
        if k:
            running = running * values
        yield k, np.fft.fft(running)[:truncation] * unscale


def build_matrix(
    spec: Symbol, truncation: int, domain: SpaceParam = SpaceParam.hardy()
) -> OperatorMatrix:
    """K x K matrix of C_phi from the domain space into H^2(D).

    Column k is the coefficient vector of phi^k scaled by
    (k+1)^((gamma+1)/2); for the Hardy domain (gamma = -1) the scaling is 1.
    """
    if not 1 <= truncation <= MAX_ORDER:
        raise ValueError(f"truncation must lie in [1, {MAX_ORDER}]")
    weights = (np.arange(truncation) + 1.0) ** ((domain.gamma + 1.0) / 2.0)
    entries = np.empty((truncation, truncation), dtype=complex)
    for k, col in _grid_power_columns(spec, truncation):
        entries[:, k] = col * weights[k]
    return OperatorMatrix(
        entries,
        domain=domain,
        codomain=SpaceParam.hardy(),
        column_weights=weights,
        symbol=spec,
        truncation=truncation,
    )


def _multiplicity_weights(truncation: int, dimension: int) -> np.ndarray:
    """sqrt(C(k+N-1, N-1)) in log space; safe up to K=4096, N large."""
    k = np.arange(truncation, dtype=float)
    n = float(dimension)
    return np.exp(0.5 * (gammaln(k + n) - gammaln(k + 1.0) - gammaln(n)))


def build_diagonal_polydisk_matrix(
    spec: Symbol, dimension: int, truncation: int
) -> OperatorMatrix:
    """Exact one-variable reduction of C_Phi for Phi = (phi(z_1), ..., phi(z_1)).

    With J h (z) = h(z_1) and (M f)(z) = f(z, ..., z) one has
    C_Phi = J C_phi M.  J is an isometry, and on the monomial basis of
    H^2(D^N) the operator M M* is diagonal with eigenvalue C(n+N-1, N-1)
    (the number of monomials of total degree n), so the singular values of
    C_Phi coincide with those of C_phi (M M*)^(1/2), whose matrix has
    column k equal to sqrt(C(k+N-1, N-1)) times the coefficients of phi^k.
    Finite sections increase monotonically to the approximation numbers.
    """
    if dimension < 1:
        raise ValueError("dimension must be >= 1")
    if not 1 <= truncation <= MAX_ORDER:
        raise ValueError(f"truncation must lie in [1, {MAX_ORDER}]")
    weights = _multiplicity_weights(truncation, dimension)
    entries = np.empty((truncation, truncation), dtype=complex)
    for k, col in _grid_power_columns(spec, truncation):
        entries[:, k] = col * weights[k]
    return OperatorMatrix(
        entries,
        domain=SpaceParam.hardy(),
        codomain=SpaceParam.hardy(),
        column_weights=weights,
        symbol=PolydiskMap.diagonal(spec, dimension),
        truncation=truncation,
    )


def reweight_diagonal_matrix(matrix: OperatorMatrix, dimension: int) -> OperatorMatrix:
    """Reuse the coefficient columns of a Hardy matrix under new multiplicity
    weights; avoids re-extracting phi^k when sweeping N."""
    base = matrix.entries / matrix.column_weights[np.newaxis, :]
    weights = _multiplicity_weights(matrix.truncation, dimension)
    sym = matrix.symbol
    if isinstance(sym, PolydiskMap):
        sym = sym.coords[0][1]
    return OperatorMatrix(
        base * weights[np.newaxis, :],
        domain=SpaceParam.hardy(),
        codomain=SpaceParam.hardy(),
        column_weights=weights,
        symbol=PolydiskMap.diagonal(sym, dimension),
        truncation=matrix.truncation,
    )


def multi_indices(dimension: int, degree_cap: int):
    """All alpha in N^dimension with |alpha| <= degree_cap, graded lexicographic."""
    out = []
    for total in range(degree_cap + 1):
        for cuts in itertools.combinations(range(total + dimension - 1), dimension - 1):
            alpha = []
            prev = -1
            for c in cuts:
                alpha.append(c - prev - 1)
                prev = c
            alpha.append(total + dimension - 1 - prev - 1)
            out.append(tuple(alpha))
    return out


def multi_index_oracle(poly: PolydiskMap, degree_cap: int) -> OperatorMatrix:
    """Brute-force section of C_Phi on the monomial basis {z^alpha : |alpha| <= D}.

    Entry (beta, alpha) is the coefficient of z^beta in
    prod_j map_j(z_{source_j})^{alpha_j}.  Independent of the diagonal
    reduction; used as a test oracle only.
    """
    n = poly.dimension
    basis = multi_indices(n, degree_cap)
    side = len(basis)
    if side > ORACLE_SIZE_CAP:
        raise SizeGuardError(
            f"oracle basis has {side} monomials; cap is {ORACLE_SIZE_CAP}"
        )
    # 1-d coefficient table: powers[j][k] = coefficients of map_j^k, degree <= D
    from .series import PowerSeries, extract_coefficients, series_pow

    powers = []
    for _, spec in poly.coords:
        base = extract_coefficients(spec.evaluate, degree_cap)
        powers.append([series_pow(base, k, degree_cap).coeffs for k in range(degree_cap + 1)])

    beta_mat = np.asarray(basis, dtype=int)  # (side, n)
    entries = np.empty((side, side), dtype=complex)
    for col, alpha in enumerate(basis):
        # group output coordinates by their source variable
        per_source = {}
        for j, (src, _) in enumerate(poly.coords):
            coeffs = powers[j][alpha[j]]
            if src in per_source:
                per_source[src] = np.convolve(per_source[src], coeffs)[: degree_cap + 1]
            else:
                per_source[src] = coeffs
        column = np.ones(side, dtype=complex)
        for src in range(1, n + 1):
            factor = per_source.get(src)
            if factor is None:
                # unused source variable: factor is the constant series 1
                factor = np.zeros(degree_cap + 1, dtype=complex)
                factor[0] = 1.0
            column = column * factor[beta_mat[:, src - 1]]
        entries[:, col] = column
    return OperatorMatrix(
        entries,
        domain=SpaceParam.hardy(),
        codomain=SpaceParam.hardy(),
        column_weights=np.ones(side),
        symbol=poly,
        truncation=degree_cap,
    )


@dataclass(frozen=True)
class HsReport:
    """Partial Hilbert-Schmidt sum sum_{k<K} ||phi^k||^2 and its dyadic trend."""

    partial: float
    trend: str  # "converging" | "diverging" | "inconclusive"
    column_norms_sq: np.ndarray


def hs_norm_sq(spec: Symbol, truncation: int) -> HsReport:
    """||C_phi||_HS^2 partial sums via sum_k ||phi^k||_{H^2}^2.

    Column norms use coefficients of degree < K; for the boundary-contact
    symbols in scope the discarded coefficient tail of phi^k (k < K) is
    dominated by exp(-2k(1 - |phi|_{1-1/K})) and is negligible.  The trend
    compares dyadic blocks of k: block sums decaying faster than 1/j are
    summable, flat or growing blocks are not.
    """
    if truncation < 64:
        raise ValueError("Hilbert-Schmidt trend needs truncation >= 64")
    norms = np.empty(truncation)
    for k, col in _grid_power_columns(spec, truncation):
        norms[k] = float(np.sum(np.abs(col) ** 2))
    from .spectra import classify_series_convergence

    verdict = classify_series_convergence(norms)
    trend = {"summable": "converging", "not_summable": "diverging"}.get(verdict, "inconclusive")
    return HsReport(partial=float(norms.sum()), trend=trend, column_norms_sq=norms)


def kernel_ratio(poly: PolydiskMap, point: KernelPoint) -> float:
    """||C_Phi* K_a|| / ||K_a|| for a polydisk reproducing kernel at a.

    C_Phi* K_a = K_{Phi(a)} and ||K_b||^2 = prod_j 1/(1-|b_j|^2), so the
    ratio is sqrt(prod_j (1-|a_j|^2) / prod_j (1-|m_j(a_{src_j})|^2)).
    """
    if len(point) != poly.dimension:
        raise ValueError("kernel point dimension does not match the map")
    if any(abs(v) >= 1.0 - 1e-12 for v in point.values):
        raise ValueError("kernel point too close to the boundary for float safety")
    log_num = sum(math.log1p(-abs(v) ** 2) for v in point.values)
    log_den = 0.0
    for src, spec in poly.coords:
        w = spec.evaluate(point.values[src - 1])
        gap = 1.0 - abs(w) ** 2
        if gap <= 0.0:
            raise SingularEvaluationError("image point reached the boundary")
        log_den += math.log(gap)
    return math.exp(0.5 * (log_num - log_den))


@dataclass(frozen=True)
class WitnessNorms:
    norm_f: float
    norm_cf: float

    @property
    def ratio(self) -> float:
        return self.norm_cf / self.norm_f


def unboundedness_witness(n: int) -> WitnessNorms:
    """Norms of f_n = ((z_1+z_2)/2)^n and of its pullback by (z_1, ..., z_1).

    ||f_n||^2 = 4^-n C(2n, n) ~ 1/sqrt(pi n) while the pullback is z_1^n of
    norm one, so the ratio grows like n^(1/4); computed in log space.
    """
    if n < 1:
        raise ValueError("witness degree must be >= 1")
    if n > 10**6:
        raise ValueError("witness degree capped at 1e6")
    log_norm_sq = math.lgamma(2 * n + 1) - 2 * math.lgamma(n + 1) - n * math.log(4.0)
    return WitnessNorms(norm_f=math.exp(0.5 * log_norm_sq), norm_cf=1.0)


def save_matrix(matrix: OperatorMatrix, path) -> None:
    """Binary column-major payload preceded by one JSON header line."""
    from .symbols import polydisk_map_to_dict, symbol_to_dict

    sym = matrix.symbol
    if isinstance(sym, PolydiskMap):
        sym_doc = {"polydisk": polydisk_map_to_dict(sym)}
    else:
        sym_doc = {"symbol": symbol_to_dict(sym)}
    header = {
        "truncation": matrix.truncation,
        "shape": list(matrix.shape),
        "domain_gamma": matrix.domain.gamma,
        "codomain_gamma": matrix.codomain.gamma,
        "column_weights": [float(w) for w in matrix.column_weights],
        "dtype": "complex128",
        "order": "F",
        **sym_doc,
    }
    with open(path, "wb") as fh:
        fh.write((json.dumps(header, sort_keys=True) + "\n").encode())
        fh.write(np.asfortranarray(matrix.entries).tobytes(order="F"))


def load_matrix(path) -> OperatorMatrix:
    from .symbols import polydisk_map_from_dict, symbol_from_dict

    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode())
        rows, cols = header["shape"]
        data = np.frombuffer(fh.read(), dtype=np.complex128)
    entries = data.reshape((rows, cols), order="F")
    if "polydisk" in header:
        sym = polydisk_map_from_dict(header["polydisk"])
    else:
        sym = symbol_from_dict(header["symbol"])
    return OperatorMatrix(
        entries,
        domain=SpaceParam(header["domain_gamma"]),
        codomain=SpaceParam(header["codomain_gamma"]),
        column_weights=np.asarray(header["column_weights"]),
        symbol=sym,
        truncation=int(header["truncation"]),
    )
