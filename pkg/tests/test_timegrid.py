from fractions import Fraction as F

import pytest

from maintflow.core import Schedule
from maintflow.timegrid import (Discretization, GridError, check_grid, conformal_closure, grid_from_selector,
                                induced_grid, is_conformal, release_deadline_grid, unit_grid)

from conftest import single_arc


def test_discretization_basics():
    g = Discretization((0, F(1, 2), 2))
    assert g.n == 2 and g.horizon == 2
    assert g.length(2) == F(3, 2)
    assert g.containing(F(1, 2)) == 2
    assert g.containing(0) == 1
    assert g.index_of(2) == 2
    with pytest.raises(KeyError):
        g.index_of(1)
    with pytest.raises(GridError):
        g.containing(2)
    assert Discretization.from_json(g.to_json()) == g


@pytest.mark.parametrize("points", [(0,), (1, 2), (0, 2, 1), (0, 1, 1)])
def test_bad_discretizations(points):
    with pytest.raises(GridError):
        Discretization(points)


def test_rd_and_unit_grids(example1):
    assert release_deadline_grid(example1).points == (0, 3, 5, 6, 7)
    assert unit_grid(example1).n == 7
    with pytest.raises(GridError):
        check_grid(example1, Discretization((0, 1)))


def test_induced_grid_merges_coincident_points(fig1):
    grid, outages = induced_grid(fig1, Schedule({"a": 0, "b": 0}))
    assert grid.points == (0, 1, 2, 3)
    assert outages == {"a": (1, 2), "b": (1,)}


def test_unit_grid_is_conformal_for_integer_data(example1):
    assert is_conformal(example1, unit_grid(example1))
    assert not is_conformal(example1, release_deadline_grid(example1))


def test_conformal_closure_is_conformal_and_minimal():
    inst = single_arc(r=0, d=F(7, 2), p=F(3, 2), T=4)
    g = conformal_closure(inst)
    assert is_conformal(inst, g)
    # 0 -> 3/2 -> 3; 7/2 -> 2 -> 1/2; nothing else is forced
    assert g.points == (0, F(1, 2), F(3, 2), 2, 3, F(7, 2), 4)


def test_conformal_closure_budget():
    inst = single_arc(r=0, d=F(7, 2), p=F(3, 2), T=4)
    with pytest.raises(GridError):
        conformal_closure(inst, max_points=2)


def test_grid_selector(tmp_path, fig1):
    assert grid_from_selector(fig1, "rd").points == (0, 1, 3)
    path = tmp_path / "g.json"
    path.write_text('["0", "1/2", "3"]')
    assert grid_from_selector(fig1, "file", path).points == (0, F(1, 2), 3)
    with pytest.raises(GridError):
        grid_from_selector(fig1, "weird")
