import math

import pytest
from hypothesis import given, settings, strategies as st

from gtheory.classical import TrueScoreDecomposition
from gtheory.dstudy import (GRID_COLUMNS, attenuate, dependability, dstudy_grid, format_table,
                            g_coefficient, grid_csv)
from gtheory.errors import DegenerateMeasurementError, DesignError
from gtheory.gstudy import EFFECTS, VarianceComponents
from gtheory.published import PRINTED

WHITE = PRINTED["white"]
LATINO = PRINTED["latino"]

variance = st.one_of(st.just(0.0), st.floats(1e-3, 5))
positive_p = st.fixed_dictionaries(
    {e: (st.floats(0.01, 5) if e == "p" else variance) for e in EFFECTS}).map(
    VarianceComponents.from_values)
sizes = st.integers(1, 50)


def vc(**kw):
    base = dict.fromkeys(EFFECTS, 0.0)
    base.update(kw)
    return VarianceComponents.from_values(base)


def test_white_single_item_single_occasion():
    assert g_coefficient(WHITE, 1, 1) == pytest.approx(0.450 / (0.450 + 0.275 + 1.563))
    assert g_coefficient(WHITE, 1, 1) == pytest.approx(0.200, abs=0.005)


def test_white_two_by_two():
    assert g_coefficient(WHITE, 2, 2) == pytest.approx(0.45 / (0.45 + 0.1375 + 0.39075))
    assert round(g_coefficient(WHITE, 2, 2), 3) == 0.460


def test_perfect_reliability():
    assert g_coefficient(vc(p=0.7, i=3, o=2, io=1), 1, 1) == 1.0


def test_latino_five_occasions_eight_items():
    assert g_coefficient(LATINO, 5, 8) == pytest.approx(0.108 / (0.108 + 0.753 / 8 + 1.292 / 40))
    assert g_coefficient(LATINO, 5, 8) == pytest.approx(0.460, abs=0.005)


def test_degenerate_measurement():
    with pytest.raises(DegenerateMeasurementError):
        g_coefficient(vc(i=1.0), 2, 2)
    with pytest.raises(DegenerateMeasurementError):
        dependability(vc(), 1, 1)


@pytest.mark.parametrize("n_o, n_i", [(0, 1), (1, 0), (-2, 3)])
def test_bad_sizes(n_o, n_i):
    with pytest.raises(DesignError):
        g_coefficient(WHITE, n_o, n_i)


def test_negative_component_rejected():
    bad = {e: 0.1 for e in EFFECTS}
    bad["pi"] = -0.2
    with pytest.raises(DesignError, match="nonnegative"):
        g_coefficient(bad, 1, 1)


def test_dependability_white():
    denom = 0.450 + 0.328 + 0.057 + 0.275 + 0.0 + 1.139 + 1.563
    assert dependability(WHITE, 1, 1) == pytest.approx(0.450 / denom)
    assert round(dependability(WHITE, 1, 1), 3) == 0.118
    assert dependability(WHITE, 5, 8) > dependability(WHITE, 1, 1)
    assert dependability(vc(p=2.0), 3, 3) == 1.0


def test_attenuation_bookkeeping():
    a = attenuate(WHITE, 2, 2)
    assert a["io"] == pytest.approx(1.139 / 4)
    assert round(a["io"], 3) == 0.285
    a = attenuate(WHITE, 5, 8)
    assert a["o"] == pytest.approx(0.057 / 5) and a["i"] == pytest.approx(0.328 / 8)
    assert a["po"] == 0 and a["pi"] == pytest.approx(0.275 / 8)


def test_grid_cross_product_and_paired():
    cells = dstudy_grid(WHITE, [1, 2, 3], [4, 8])
    assert [(c.n_occasions, c.n_items) for c in cells] == [(1, 4), (1, 8), (2, 4), (2, 8),
                                                           (3, 4), (3, 8)]
    diag = dstudy_grid(WHITE, [2, 3, 4, 5], [2, 3, 4, 5], paired=True)
    assert [round(c.g_coefficient, 3) for c in diag] == [0.460, 0.629, 0.730, 0.793]
    with pytest.raises(DesignError):
        dstudy_grid(WHITE, [], [1])
    with pytest.raises(DesignError):
        dstudy_grid(WHITE, [1, 2], [1], paired=True)


def test_grid_csv_and_table():
    cells = dstudy_grid(WHITE, [2, 5], [2, 8], paired=True)
    lines = grid_csv(cells).splitlines()
    assert lines[0].split(",") == list(GRID_COLUMNS)
    assert len(lines) == 3
    text = format_table(WHITE, cells)
    assert "0.460" in text and "Occasion Item" in text and "Reliability" in text


@given(positive_p, sizes, sizes)
@settings(max_examples=200)
def test_monotone_in_facets(v, n_o, n_i):
    g = g_coefficient(v, n_o, n_i)
    assert 0 <= g <= 1
    assert g_coefficient(v, n_o + 1, n_i) >= g - 1e-12
    assert g_coefficient(v, n_o, n_i + 1) >= g - 1e-12
    if v["pi"] > 0:
        assert g_coefficient(v, n_o, n_i + 1) > g or g == 1.0
    assert dependability(v, n_o, n_i) <= g + 1e-12


@given(positive_p)
def test_limit_is_one(v):
    assert g_coefficient(v, 10**9, 10**9) == pytest.approx(1.0, abs=1e-6)


@given(positive_p, sizes, sizes, sizes)
def test_item_independent_without_item_terms(v, n_o, n_i, n_i2):
    d = dict(v.estimate, pi=0.0, pio=0.0)
    assert g_coefficient(d, n_o, n_i) == pytest.approx(g_coefficient(d, n_o, n_i2))


@given(positive_p, st.floats(0.01, 100), sizes, sizes)
def test_ratio_homogeneity(v, c, n_o, n_i):
    scaled = {e: c * x for e, x in v.estimate.items()}
    assert g_coefficient(scaled, n_o, n_i) == pytest.approx(g_coefficient(v, n_o, n_i))


@given(st.floats(0.01, 5), st.floats(0.01, 5), sizes)
def test_reduces_to_classical_averaging(t, err, n):
    # a single error source averaged over items, one occasion
    assert g_coefficient(vc(p=t, pio=err), 1, n) == pytest.approx(
        TrueScoreDecomposition(t, err).reliability(n))
    assert g_coefficient(vc(p=t, pi=err), 1, n) == pytest.approx(t / (t + err / n))


def test_nan_free_for_published_sets():
    for v in PRINTED.values():
        for c in dstudy_grid(v, range(1, 6), range(1, 9)):
            assert math.isfinite(c.g_coefficient) and math.isfinite(c.dependability)
