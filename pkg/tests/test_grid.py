import pytest
from hypothesis import given
from hypothesis import strategies as st

from qprep.grid import bit_decompose, index_to_x, new_grid, random_zeta


def test_single_qubit_grid():
    g = new_grid(1, 4.0, 0.0, 0.0)
    assert (g.delta_x, g.x_o, g.f_nyquist) == (2.0, -2.0, 0.25)


def test_three_qubit_grid():
    g = new_grid(3, 12.0, 0.0, 0.0)
    assert g.delta_x == 1.5 and g.x_o == -6.0


def test_shifted_grid_is_mode_symmetric():
    g = new_grid(1, 4.0, 0.5, 0.0)
    assert g.x_o == -1.0
    assert [index_to_x(g, i) for i in range(2)] == [-1.0, 1.0]


@pytest.mark.parametrize("i,x", [(0, -6.0), (4, 0.0), (7, 4.5)])
def test_index_to_x(i, x):
    assert index_to_x(new_grid(3, 12.0), i) == x


def test_index_out_of_range():
    with pytest.raises(IndexError):
        index_to_x(new_grid(3, 12.0), 8)


@pytest.mark.parametrize("args", [(0, 1.0, 0.0), (2, -1.0, 0.0), (2, 1.0, 0.5), (2, 1.0, -0.1),
                                  (25, 1.0, 0.0)])
def test_invalid_grids(args):
    with pytest.raises(ValueError):
        new_grid(*args)


@pytest.mark.parametrize("i,n,bits", [(6, 3, [0, 1, 1]), (0, 4, [0, 0, 0, 0]), (5, 3, [1, 0, 1])])
def test_bit_decompose(i, n, bits):
    assert bit_decompose(i, n) == bits


def test_bit_decompose_range():
    with pytest.raises(ValueError):
        bit_decompose(8, 3)


@given(st.integers(1, 20).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, 2**n - 1))))
def test_bit_round_trip(ni):
    n, i = ni
    assert sum(b << m for m, b in enumerate(bit_decompose(i, n))) == i


@given(st.integers(1, 12), st.floats(0.1, 100), st.floats(0, 1, exclude_max=True),
       st.floats(0, 1, exclude_max=True), st.floats(-5, 5))
def test_shift_and_coverage(n, w, a, b, xb):
    z1, z2 = a / 2 ** (n - 1), b / 2 ** (n - 1)
    g1, g2 = new_grid(n, w, z1, xb), new_grid(n, w, z2, xb)
    xs1, xs2 = g1.xs(), g2.xs()
    assert abs((xs2 - xs1).max() - w * (z2 - z1) / 2) <= 1e-12 * (w + abs(xb))
    assert abs((xs1.max() - xs1.min()) - (w - g1.delta_x)) <= 1e-12 * w
    assert all(xs1[1:] > xs1[:-1])
    assert g1.delta_x == w / 2**n


def test_random_zeta():
    assert random_zeta(4, 0) == 0.0
    z = random_zeta(4, 11)
    assert 0 <= z < 1 / 8 and z == random_zeta(4, 11)
