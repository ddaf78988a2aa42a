from fractions import Fraction as F
from pathlib import Path

import pytest

from maintflow.milp import MilpModel, export_model, solve_milp, to_lp, to_mps
from maintflow.milp.export import decimal_string
from maintflow.models import build_tdip
from maintflow.timegrid import release_deadline_grid

GOLDEN = Path(__file__).parent / "golden"


def golden_model():
    m = MilpModel("golden")
    m.add_binary("open[a]")
    m.add_var("x 1", lb=0, ub=F(7, 2))
    m.add_var("y", lb=None, ub=None)
    m.add_var("z", lb=-1, ub=None)
    m.add_var("w", lb=None, ub=4)
    m.add_constraint({"x 1": 1, "y": F(1, 3), "open[a]": -2}, "<=", 5, name="cap[a,1]")
    m.add_constraint({"y": 1, "z": 1}, ">=", F(-3, 4), name="low")
    m.add_constraint({"x 1": 1, "w": 1, "z": -1}, "=", 2, name="bal")
    m.set_objective({"x 1": 3, "open[a]": F(-1, 10), "y": -1, "w": 1}, "max", constant=F(1, 2))
    return m


@pytest.mark.parametrize("x, text", [
    (F(3), "3"), (F(-3, 4), "-0.75"), (F(1, 10), "0.1"), (F(0), "0"),
    (F(1, 3), "0.33333333333333333"), (F(10**20), "100000000000000000000"),
])
def test_decimal_string(x, text):
    assert decimal_string(x) == text


def test_lp_matches_golden():
    assert to_lp(golden_model()) == (GOLDEN / "model.lp").read_text()


def test_mps_matches_golden():
    assert to_mps(golden_model()) == (GOLDEN / "model.mps").read_text()


def test_export_model_writes_file(tmp_path):
    path = export_model(golden_model(), "mps", tmp_path / "m.mps")
    assert path.read_text() == (GOLDEN / "model.mps").read_text()
    with pytest.raises(ValueError):
        export_model(golden_model(), "xml", tmp_path / "m.xml")


@pytest.mark.parametrize("suffix", ["lp", "mps"])
def test_external_solver_reads_exports(tmp_path, suffix, example1):
    highspy = pytest.importorskip("highspy")
    for model in (golden_model(), build_tdip(example1, release_deadline_grid(example1))):
        path = export_model(model, suffix, tmp_path / f"m.{suffix}")
        h = highspy.Highs()
        h.setOptionValue("output_flag", False)
        assert h.readModel(str(path)) == highspy.HighsStatus.kOk
        h.run()
        ours = solve_milp(model).objective
        assert abs(h.getInfo().objective_function_value - float(ours)) < 1e-6
