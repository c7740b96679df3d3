from fractions import Fraction as F

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from hessteg.errors import KernelError
from hessteg.kernels import (
    CLASSIC_NAMES,
    Kernel,
    RationalMatrix,
    classic_gradient,
    classic_second_order,
    compose_second_order,
    ko_x2,
    ko_xy,
    ky_x2,
    ky_xy,
    lagrange_d1,
    rotate_90,
    second_order_kernel,
)


def rows(k):
    return [list(r) for r in k.coeffs.entries]


def window(n, f):
    """Samples f(x, y) with x = column offset, y = row offset."""
    return [[f(x, y) for x in range(-n, n + 1)] for y in range(-n, n + 1)]


def sympy_stencil(n, order):
    """Derivative-at-0 weights of the interpolating polynomial, via sympy."""
    x = sympy.Symbol("x")
    nodes = list(range(-n, n + 1))
    weights = []
    for i in nodes:
        ys = [1 if j == i else 0 for j in nodes]
        poly = sympy.interpolate(list(zip(nodes, ys)), x)
        weights.append(F(str(sympy.diff(poly, x, order).subs(x, 0))))
    return weights


def test_classic_gradients():
    assert rows(classic_gradient("Sobel")) == [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]]
    assert rows(classic_gradient("CentralDifference")) == [[0, 0, 0], [F(-1, 2), 0, F(1, 2)], [0, 0, 0]]
    assert rows(classic_gradient("IntermediateDifference")) == [[0, 0, 0], [0, -1, 1], [0, 0, 0]]
    assert classic_gradient("Prewitt").kind == "first_x"


def test_classic_second_order_entries():
    assert rows(classic_second_order("Sobel", "x2")) == [
        [1, 0, -2, 0, 1],
        [4, 0, -8, 0, 4],
        [6, 0, -12, 0, 6],
        [4, 0, -8, 0, 4],
        [1, 0, -2, 0, 1],
    ]
    kc = classic_second_order("CentralDifference", "x2")
    assert list(kc.middle_row()) == [F(1, 4), 0, F(-1, 2), 0, F(1, 4)]
    assert sum(abs(v) for r in rows(kc) for v in r) == 1
    assert rows(classic_second_order("CentralDifference", "xy")) == [
        [F(-1, 4), 0, F(1, 4)],
        [0, 0, 0],
        [F(1, 4), 0, F(-1, 4)],
    ]


@pytest.mark.parametrize("name", CLASSIC_NAMES)
@pytest.mark.parametrize("kind", ["x2", "xy"])
def test_composition_matches_table(name, kind):
    assert compose_second_order(name, kind) == classic_second_order(name, kind)


def test_composition_shapes():
    assert list(compose_second_order("Prewitt", "x2").middle_row()) == [3, 0, -6, 0, 3]
    assert list(compose_second_order("IntermediateDifference", "x2").middle_row()) == [0, 0, 1, -2, 1]
    assert compose_second_order("IntermediateDifference", "xy").size == 3


def test_unknown_operator():
    with pytest.raises(KernelError):
        classic_gradient("Roberts")
    with pytest.raises(KernelError):
        classic_second_order("Sobel", "y2")


def test_ky_x2_examples():
    assert list(ky_x2(1).middle_row()) == [F(1, 2), -1, F(1, 2)]
    assert ky_x2(2) == classic_second_order("CentralDifference", "x2")
    assert list(ky_x2(3).middle_row()) == [F(1, 6), 0, 0, F(-1, 3), 0, 0, F(1, 6)]


def test_ky_xy_examples():
    assert rows(ky_xy(1)) == [[F(1, 4), 0, F(-1, 4)], [0, 0, 0], [F(-1, 4), 0, F(1, 4)]]
    assert rows(ky_xy(2)) == [
        [F(1, 16), F(1, 8), 0, F(-1, 8), F(-1, 16)],
        [F(1, 8), 0, 0, 0, F(-1, 8)],
        [0, 0, 0, 0, 0],
        [F(-1, 8), 0, 0, 0, F(1, 8)],
        [F(-1, 16), F(-1, 8), 0, F(1, 8), F(1, 16)],
    ]


@pytest.mark.parametrize("n", range(1, 9))
def test_ky_xy_structure(n):
    k = ky_xy(n)
    assert k.entry(-n, -n) == F(1, 4 * n * n)
    for i in range(-n, n + 1):
        for j in range(-n, n + 1):
            on_ring = i != 0 and j != 0 and (abs(i) == n or abs(j) == n)
            expected = F(1 if i * j > 0 else -1, 4 * abs(i) * abs(j)) if on_ring else 0
            assert k.entry(i, j) == expected
    # second row from the top holds the (n-1)n coefficients
    if n > 1:
        assert k.entry(-(n - 1), -n) == F(1, 4 * (n - 1) * n)


@pytest.mark.parametrize("n", [0, -1])
@pytest.mark.parametrize("ctor", [ky_x2, ky_xy, ko_x2, ko_xy, lagrange_d1])
def test_scale_must_be_positive(ctor, n):
    with pytest.raises(KernelError):
        ctor(n)


def test_rotate_90():
    assert rows(rotate_90(classic_gradient("Sobel"))) == [[-1, -2, -1], [0, 0, 0], [1, 2, 1]]
    assert rotate_90(classic_gradient("Sobel")).kind == "first_y"
    r = rotate_90(ky_x2(3))
    assert r.kind == "y2"
    assert all(v == 0 for i, j, v in [(i, j, r.entry(i, j)) for i in range(-3, 4) for j in range(-3, 4)] if j != 0)
    assert any(r.entry(i, 0) for i in range(-3, 4))


@given(st.sampled_from(["x2", "xy"]), st.sampled_from(["Ky", "Ko"]), st.integers(1, 6))
def test_rotate_four_times_is_identity(kind, family, n):
    k = second_order_kernel(family, kind, n)
    assert rotate_90(rotate_90(rotate_90(rotate_90(k)))) == k


def test_lagrange_d1_examples():
    assert list(lagrange_d1(1).entries[0]) == [F(-1, 2), 0, F(1, 2)]
    assert list(lagrange_d1(2).entries[0]) == [F(1, 12), F(-2, 3), 0, F(2, 3), F(-1, 12)]
    # x^2 is even: its derivative at 0 vanishes
    for n in range(1, 6):
        assert sum(w * i * i for w, i in zip(lagrange_d1(n).entries[0], range(-n, n + 1))) == 0


@pytest.mark.parametrize("n", range(1, 6))
def test_stencils_match_symbolic_interpolation(n):
    assert list(lagrange_d1(n).entries[0]) == sympy_stencil(n, 1)
    assert list(ko_x2(n).middle_row()) == sympy_stencil(n, 2)


def test_ko_x2_table():
    assert list(ko_x2(2).middle_row()) == [F(-1, 12), F(4, 3), F(-5, 2), F(4, 3), F(-1, 12)]
    assert list(ko_x2(3).middle_row()) == [F(1, 90), F(-3, 20), F(3, 2), F(-49, 18), F(3, 2), F(-3, 20), F(1, 90)]
    assert list(ko_x2(4).middle_row()) == [
        F(-1, 560), F(8, 315), F(-1, 5), F(8, 5), F(-205, 72), F(8, 5), F(-1, 5), F(8, 315), F(-1, 560)
    ]


def test_ko_xy_table():
    assert rows(ko_xy(1)) == [[F(1, 4), 0, F(-1, 4)], [0, 0, 0], [F(-1, 4), 0, F(1, 4)]]
    assert rows(ko_xy(2)) == [
        [F(1, 144), F(-1, 18), 0, F(1, 18), F(-1, 144)],
        [F(-1, 18), F(4, 9), 0, F(-4, 9), F(1, 18)],
        [0, 0, 0, 0, 0],
        [F(1, 18), F(-4, 9), 0, F(4, 9), F(-1, 18)],
        [F(-1, 144), F(1, 18), 0, F(-1, 18), F(1, 144)],
    ]


@pytest.mark.parametrize("n", range(1, 9))
def test_ko_xy_is_outer_product(n):
    d = lagrange_d1(n).entries[0]
    k = ko_xy(n)
    for i in range(-n, n + 1):
        for j in range(-n, n + 1):
            assert k.entry(i, j) == d[i + n] * d[j + n]


@pytest.mark.parametrize("family", ["Ky", "Ko"])
@pytest.mark.parametrize("kind", ["x2", "y2", "xy"])
@pytest.mark.parametrize("n", range(1, 9))
def test_annihilates_constants_and_ramps(family, kind, n):
    k = second_order_kernel(family, kind, n)
    assert k.coeffs.total() == 0
    for f in (lambda x, y: 1, lambda x, y: x, lambda x, y: y, lambda x, y: 3 * x - 7 * y + 11):
        assert k.response(window(n, f)) == 0


@pytest.mark.parametrize("n", range(1, 9))
def test_polynomial_exactness(n):
    assert ko_x2(n).response(window(n, lambda x, y: x * x)) == 2
    assert rotate_90(ko_x2(n)).response(window(n, lambda x, y: y * y)) == 2
    assert ko_xy(n).response(window(n, lambda x, y: x * y)) == 1
    assert ky_x2(n).response(window(n, lambda x, y: x * x)) == n


@pytest.mark.parametrize("family", ["Ky", "Ko"])
@pytest.mark.parametrize("n", range(1, 9))
def test_xy_kernels_symmetric_under_half_turn(family, n):
    k = second_order_kernel(family, "xy", n)
    assert rotate_90(rotate_90(k)) == k


@pytest.mark.parametrize("name", CLASSIC_NAMES)
def test_classic_second_order_annihilates_linears(name):
    for kind in ("x2", "xy"):
        k = classic_second_order(name, kind)
        assert k.coeffs.total() == 0
        assert k.response(window(k.n, lambda x, y: 2 * x + 5 * y)) == 0


def test_dump_and_parse():
    k = ko_x2(2)
    text = k.dump()
    assert text.splitlines()[0] == "x2 2 5"
    assert "-1/12 4/3 -5/2 4/3 -1/12" in text.splitlines()
    assert Kernel.parse(text) == k


def test_kernel_validation():
    with pytest.raises(KernelError):
        Kernel(RationalMatrix.zeros(3, 3), 2, "x2")
    with pytest.raises(KernelError):
        Kernel(RationalMatrix.zeros(3, 3), 1, "diagonal")
