import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from delaylwr.core import (
    ConfigError,
    Dirichlet,
    HistoryError,
    Periodic,
    grid_new,
    history_delayed,
    history_init,
    pad_ghosts,
)


@pytest.mark.parametrize("a, b, nx, dx", [(0, 1, 50, 0.02), (0, 1, 1000, 0.001), (0, 2, 100, 0.02)])
def test_grid_dx(a, b, nx, dx):
    g = grid_new(a, b, nx)
    assert g.dx == pytest.approx(dx, rel=1e-15)
    assert g.nx == nx


def test_grid_centers():
    g = grid_new(0, 1, 50)
    assert g.centers[0] == pytest.approx(0.01)
    assert g.centers[-1] == pytest.approx(0.99)
    assert len(g.centers) == 50


@pytest.mark.parametrize("a, b, nx", [(0, 1, 2), (1, 1, 10), (1, 0, 10), (0, 1, 0)])
def test_grid_rejects(a, b, nx):
    with pytest.raises(ConfigError):
        grid_new(a, b, nx)


def test_dirichlet_range():
    with pytest.raises(ConfigError):
        Dirichlet(-0.1, 0.2)
    with pytest.raises(ConfigError):
        Dirichlet(0.2, 1.5)


def test_pad_ghosts():
    f = np.array([1.0, 2.0, 3.0])
    assert pad_ghosts(f, Periodic()).tolist() == [3, 1, 2, 3, 1]
    assert pad_ghosts(f, Dirichlet(0.2, 0.4)).tolist() == [0.2, 1, 2, 3, 0.4]


def fields(k, nx=4):
    return [np.full(nx, float(i)) for i in range(1, k + 1)]


def test_history_negative_query_is_initial():
    rho0 = np.linspace(0, 1, 5)
    buf = history_init(rho0, 15)
    assert np.array_equal(buf.get(-12), rho0)
    assert len(buf) == 16


def test_history_zero_delay():
    rho0 = np.ones(4) * 0.3
    buf = history_init(rho0, 0)
    assert np.array_equal(history_delayed(buf, 0, 0), rho0)
    buf.push(np.ones(4))
    assert np.array_equal(history_delayed(buf, 1, 0), np.ones(4))


def test_history_ten_pushes_then_query_zero():
    rho0 = np.zeros(4)
    buf = history_init(rho0, 10)
    pushed = fields(10)
    for f in pushed:
        buf.push(f)
    # replay by hand: step m holds pushed[m - 1], step 0 the initial field
    assert np.array_equal(buf.get(0), rho0)
    assert np.array_equal(buf.get(5), pushed[4])
    assert np.array_equal(history_delayed(buf, 10, 10), rho0)


@pytest.mark.parametrize("n, expected_step", [(20, 5), (3, 0), (15, 0)])
def test_history_delayed_index(n, expected_step):
    rho0 = np.full(3, -1.0)
    buf = history_init(rho0, 15)
    for m in range(1, n + 1):
        buf.push(np.full(3, float(m)))
    got = history_delayed(buf, n, 15)
    want = rho0 if expected_step == 0 else np.full(3, float(expected_step))
    assert np.array_equal(got, want)


def test_history_out_of_window_errors():
    buf = history_init(np.zeros(3), 2)
    for m in range(1, 6):
        buf.push(np.full(3, float(m)))
    with pytest.raises(HistoryError):
        buf.get(2)
    with pytest.raises(HistoryError):
        buf.get(6)
    with pytest.raises(HistoryError):
        buf.get(-1)
    with pytest.raises(HistoryError):
        history_delayed(buf, 4, 2)
    with pytest.raises(HistoryError):
        history_delayed(buf, 5, 3)


def test_history_push_copies_and_freezes():
    buf = history_init(np.zeros(3), 1)
    f = np.ones(3)
    buf.push(f)
    f[0] = 9.0
    assert buf.current[0] == 1.0
    with pytest.raises(ValueError):
        buf.current[0] = 2.0


@given(delay=st.integers(0, 20), k=st.integers(0, 60))
def test_history_round_trip_and_memory(delay, k):
    rng = np.random.default_rng(delay * 100 + k)
    rho0 = rng.uniform(size=6)
    buf = history_init(rho0, delay)
    pushed = [rho0]
    for _ in range(k):
        f = rng.uniform(size=6)
        buf.push(f)
        pushed.append(f)
        assert len(buf) <= delay + 1
    got = history_delayed(buf, k, delay)
    want = pushed[k - delay] if k >= delay else rho0
    assert np.array_equal(got, want)
