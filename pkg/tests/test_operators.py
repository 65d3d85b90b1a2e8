import math

import numpy as np
import pytest

import compoplab as C
from compoplab.operators import (
    SizeGuardError,
    build_diagonal_polydisk_matrix,
    build_matrix,
    hs_norm_sq,
    kernel_ratio,
    load_matrix,
    multi_index_oracle,
    reweight_diagonal_matrix,
    save_matrix,
    unboundedness_witness,
)
from compoplab.series import PowerSeries, SpaceParam
from compoplab.symbols import (
    Compose,
    Cusp,
    ExplicitSeries,
    Identity,
    KernelPoint,
    Lens,
    PolydiskMap,
    Rotation,
    Scalar,
    ShapiroTaylor,
)
from compoplab.spectra import singular_values, tensor_merge
from conftest import fit_slope

HALF = ExplicitSeries(PowerSeries([0, 0.5]))


def test_identity_matrix():
    m = build_matrix(Identity(), 16)
    assert np.max(np.abs(m.entries - np.eye(16))) < 1e-12


def test_half_map_matrix_is_geometric_diagonal():
    m = build_matrix(HALF, 24)
    expected = np.diag(2.0 ** -np.arange(24))
    assert np.max(np.abs(m.entries - expected)) < 1e-12


def test_rotation_matrix_is_unitary_diagonal():
    alpha = 0.73
    m = build_matrix(Rotation(alpha), 16)
    expected = np.diag(np.exp(1j * alpha * np.arange(16)))
    assert np.max(np.abs(m.entries - expected)) < 1e-12


def test_bergman_domain_column_scaling():
    m = build_matrix(HALF, 8, domain=SpaceParam.bergman(0.0))
    k = np.arange(8)
    expected = np.diag(2.0**-k * np.sqrt(k + 1.0))
    assert np.max(np.abs(m.entries - expected)) < 1e-12


def test_diagonal_polydisk_dimension_one_is_plain_matrix():
    a = build_matrix(Lens(0.25), 32)
    b = build_diagonal_polydisk_matrix(Lens(0.25), 1, 32)
    assert np.max(np.abs(a.entries - b.entries)) < 1e-14


def test_diagonal_polydisk_half_map_closed_form():
    m = build_diagonal_polydisk_matrix(HALF, 2, 16)
    k = np.arange(16)
    expected = np.diag(2.0**-k * np.sqrt(k + 1.0))
    assert np.max(np.abs(m.entries - expected)) < 1e-12
    s = singular_values(m)
    assert s.a(1) == pytest.approx(1.0, abs=1e-12)
    assert s.a(2) == pytest.approx(math.sqrt(2.0) / 2.0, abs=1e-12)
    assert s.a(3) == pytest.approx(math.sqrt(3.0) / 4.0, abs=1e-12)


def test_multi_index_oracle_identity_map():
    poly = PolydiskMap(2, ((1, Identity()), (2, Identity())))
    m = multi_index_oracle(poly, 3)
    assert np.max(np.abs(m.entries - np.eye(m.shape[0]))) < 1e-10


def test_oracle_matches_diagonal_reduction_half_map():
    poly = PolydiskMap.diagonal(HALF, 2)
    oracle = singular_values(multi_index_oracle(poly, 6))
    direct = singular_values(build_diagonal_polydisk_matrix(HALF, 2, 7))
    assert np.max(np.abs(oracle.values[:7] - direct.values)) < 1e-10
    assert np.max(oracle.values[7:]) < 1e-10


@pytest.mark.parametrize("spec", [HALF, Lens(0.25), Compose(C.BlaschkeSquare(0.5), HALF)])
@pytest.mark.parametrize("dim", [2, 3])
def test_oracle_equivalence_across_symbols(spec, dim):
    poly = PolydiskMap.diagonal(spec, dim)
    oracle = singular_values(multi_index_oracle(poly, 6))
    direct = singular_values(build_diagonal_polydisk_matrix(spec, dim, 7))
    assert np.max(np.abs(oracle.values[:7] - direct.values)) < 1e-8
    assert np.max(oracle.values[7:]) < 1e-8


def test_oracle_cross_validates_tensor_merge():
    # mixed map (lens(z1), lens(z1), z3/2): a product of a 2-d diagonal
    # block and a 1-d contraction.  The simplex-truncated oracle is
    # dominated by the merge of box-truncated factors, and the leading
    # values agree.
    lens = Lens(0.2)
    poly = PolydiskMap(3, ((1, lens), (1, lens), (3, HALF)))
    oracle = singular_values(multi_index_oracle(poly, 6))
    factor_a = singular_values(build_diagonal_polydisk_matrix(lens, 2, 7))
    factor_b = singular_values(build_matrix(HALF, 7))
    merged = tensor_merge([factor_a, factor_b], len(oracle))
    k = min(len(merged), len(oracle))
    assert np.all(oracle.values[:k] <= merged.values[:k] + 1e-10)
    assert np.max(np.abs(oracle.values[:5] - merged.values[:5])) < 0.05 * merged.a(1)


def test_oracle_size_guard():
    poly = PolydiskMap.diagonal(Identity(), 3)
    with pytest.raises(SizeGuardError):
        multi_index_oracle(poly, 26)


def test_hs_partial_sum_half_map():
    rep = hs_norm_sq(HALF, 64)
    assert abs(rep.partial - 4.0 / 3.0) < 1e-6
    assert rep.trend == "converging"


def test_hs_trend_shapiro_taylor_dichotomy():
    assert hs_norm_sq(ShapiroTaylor(3.0), 2048).trend == "converging"
    assert hs_norm_sq(ShapiroTaylor(1.5), 2048).trend == "diverging"


def test_hs_trend_rotation_diverges():
    assert hs_norm_sq(Rotation(0.3), 256).trend == "diverging"
    with pytest.raises(ValueError):
        hs_norm_sq(HALF, 32)


def test_kernel_ratio_at_origin():
    poly = PolydiskMap.diagonal(Lens(0.5), 3)
    assert kernel_ratio(poly, KernelPoint((0.0, 0.0, 0.0))) == pytest.approx(1.0)


def test_kernel_ratio_identity_map_closed_form():
    poly = PolydiskMap(2, ((1, Identity()), (2, Identity())))
    r = 0.9
    assert kernel_ratio(poly, KernelPoint((r, 0.0))) == pytest.approx(1.0, abs=1e-12)


def test_kernel_ratio_rejects_near_boundary():
    poly = PolydiskMap.diagonal(Identity(), 2)
    with pytest.raises(ValueError):
        kernel_ratio(poly, KernelPoint((1 - 1e-13, 0.0)))


def test_kernel_ratio_critical_band_and_supercritical_slope():
    for dim in (2, 3):
        critical = PolydiskMap.diagonal(Lens(1.0 / dim), dim)
        js = np.arange(1, 31)
        band = np.array(
            [kernel_ratio(critical, KernelPoint((1 - 2.0**-j,) + (0,) * (dim - 1))) for j in js]
        )
        assert band.min() >= 0.5 * np.median(band)
        sup = PolydiskMap.diagonal(Lens(2.0 / dim) if dim > 2 else Lens(1.0), dim)
        ratios = np.array(
            [kernel_ratio(sup, KernelPoint((1 - 2.0**-j,) + (0,) * (dim - 1))) for j in js]
        )
        mask = js >= 10
        slope = fit_slope(js[mask] * math.log(2.0), np.log(ratios[mask]))
        assert abs(slope - 0.5) <= 0.05


def test_witness_exact_values():
    w1 = unboundedness_witness(1)
    assert w1.norm_f == pytest.approx(math.sqrt(0.5), abs=1e-14)
    assert w1.norm_cf == 1.0
    w2 = unboundedness_witness(2)
    assert w2.norm_f == pytest.approx(math.sqrt(6.0 / 16.0), abs=1e-14)


def test_witness_growth_exponent():
    ns = np.unique(np.geomspace(10, 10**4, 25).astype(int))
    ratios = [unboundedness_witness(int(n)).ratio for n in ns]
    slope = fit_slope(np.log(ns), np.log(ratios))
    assert abs(slope - 0.25) <= 0.03


def test_witness_rejects_out_of_range():
    with pytest.raises(ValueError):
        unboundedness_witness(0)
    with pytest.raises(ValueError):
        unboundedness_witness(10**6 + 1)


def test_finite_section_monotone_in_truncation(roster):
    for name in ("lens-half", "cusp", "blaschke-lens", "half-map"):
        spec = roster[name]
        small = singular_values(build_matrix(spec, 64))
        large = singular_values(build_matrix(spec, 128))
        assert np.all(small.values <= large.values[:64] + 1e-12), name


def test_norm_bounded_by_classical_envelope(roster):
    for name, spec in roster.items():
        top = singular_values(build_matrix(spec, 128)).a(1)
        phi0 = abs(spec.evaluate(0.0))
        bound = math.sqrt((1 + phi0) / (1 - phi0))
        assert top <= bound + 1e-6, name


def test_matrix_round_trip(tmp_path):
    m = build_diagonal_polydisk_matrix(Lens(0.25), 2, 12)
    path = tmp_path / "matrix.bin"
    save_matrix(m, path)
    loaded = load_matrix(path)
    assert np.max(np.abs(loaded.entries - m.entries)) < 1e-15
    assert loaded.truncation == 12
    assert np.allclose(loaded.column_weights, m.column_weights)
    assert isinstance(loaded.symbol, PolydiskMap)

    plain = build_matrix(Scalar(0.3), 8)
    save_matrix(plain, path)
    again = load_matrix(path)
    assert np.max(np.abs(again.entries - plain.entries)) < 1e-15


def test_reweight_matches_direct_build():
    base = build_matrix(Cusp(), 48)
    for dim in (2, 3, 5):
        fast = reweight_diagonal_matrix(base, dim)
        direct = build_diagonal_polydisk_matrix(Cusp(), dim, 48)
        assert np.max(np.abs(fast.entries - direct.entries)) < 1e-10


def test_build_rejects_non_self_map():
    too_big = ExplicitSeries(PowerSeries([1.2]))
    with pytest.raises(ArithmeticError):
        build_matrix(too_big, 16)
