import csv
import json
import math

import numpy as np
import pytest

from hausdorff_h1 import cli
from hausdorff_h1.experiments import (
    CSV_COLUMNS,
    ConvergenceRecord,
    ExperimentConfig,
    battery,
    commutation_error,
    duality_error,
    duality_pairs,
    emit,
    mean_zero_bump,
    read_records,
    run_equivalence_suite,
    run_lower_bound_sweep,
    run_upper_bound_suite,
)
from hausdorff_h1.extremal import AtomSpec, converse_pair, make_atom
from hausdorff_h1.kernels import bump, indicator, powerlaw
from hausdorff_h1.core import integrate

SMALL = dict(grid_half_width=50.0, grid_points=1 << 12)


def small(**kw):
    return ExperimentConfig(**{**SMALL, **kw})


# ---------------------------------------------------------------- config


def test_defaults():
    c = ExperimentConfig()
    assert c.epsilons == (0.8, 0.4, 0.2, 0.1, 0.05)
    assert c.delta == 0.25 and c.grid.num_points == 1 << 16


@pytest.mark.parametrize(
    "kw",
    [dict(epsilons=(0.1, 0.4)), dict(epsilons=(3.0,)), dict(delta=1.0), dict(m_values=(0.0,)), dict(norm="bmo"),
     dict(scales=(1e-6, 1.0, 8))],
)
def test_config_rejects(kw):
    with pytest.raises(ValueError):
        small(**kw)


def test_config_text_round_trip():
    c = small(kernel=powerlaw(-2, 1), epsilons=(0.5, 0.25), m_values=(2.0, 4.0), norm="smooth", seed=3)
    again = ExperimentConfig.from_text(c.to_text())
    assert again == c


def test_config_text_aliases_and_errors():
    c = ExperimentConfig.from_text("kernel = bump(0.1, 2)\ngrid_l = 50\ngrid_n = 4096\nepsilon = 1, 0.5  # comment\n")
    assert c.epsilons == (1.0, 0.5) and c.grid.half_width == 50.0
    with pytest.raises(ValueError, match="line 1"):
        ExperimentConfig.from_text("colour = blue")
    with pytest.raises(ValueError, match="line 2"):
        ExperimentConfig.from_text("delta = 0.5\nno equals sign")


# ---------------------------------------------------------------- battery and runs


def test_battery_composition(grid):
    labels = [label for label, _ in battery(grid)]
    assert len(labels) == 20
    assert sum(label.startswith("atom") for label in labels) == 10
    assert {"converse_f", "converse_hf", "f_eps_1", "f_eps_0.5", "f_eps_0.2"} <= set(labels)
    assert sum(label.startswith("bump") for label in labels) == 5
    for label, f in battery(grid):
        if label.startswith("bump"):
            assert abs(integrate(f)) < 1e-10


def test_battery_deterministic(small_grid):
    a, b = battery(small_grid, 5), battery(small_grid, 5)
    assert all(np.array_equal(x.values, y.values) for (_, x), (_, y) in zip(a, b))


def test_mean_zero_bump_even():
    from hausdorff_h1.core import UniformGrid

    g = UniformGrid(50.0, 1 << 12)
    assert abs(integrate(mean_zero_bump(g, 1.0, 2.0, "even"))) < 1e-12


def test_empty_battery():
    assert run_upper_bound_suite(small(), functions=[]) == []


def test_narrow_kernel_upper_suite():
    cfg = small(kernel=bump(0.02, 1.0))
    g = cfg.grid
    funcs = [("atom", make_atom(AtomSpec(1.0, 2.0, "random", seed=1), g)), ("pair", converse_pair(g)[0])]
    recs = run_upper_bound_suite(cfg, funcs)
    assert all(0.98 <= r.ratio <= 1.02 for r in recs)
    assert not any(r.flagged for r in recs)


def test_lower_sweep_truncation_targets():
    targets = []
    for delta in (0.5, 0.25, 0.1):
        recs = run_lower_bound_sweep(small(kernel=indicator(0.05, 1.0), epsilons=(1.0,), delta=delta))
        targets.append(recs[0].moment_target)
    assert targets == pytest.approx([0.5, 0.75, 0.9])
    assert all(t < 0.95 for t in targets)


def test_lower_sweep_dilation_targets():
    recs = run_lower_bound_sweep(small(kernel=powerlaw(-2, 1), epsilons=(1.0,), delta=0.1, m_values=(2.0, 4.0, 8.0)))
    assert [r.moment_target for r in recs] == pytest.approx([0.5, 0.75, 0.875])
    assert [r.m for r in recs] == [2.0, 4.0, 8.0]


def test_lower_sweep_never_exceeds_cap():
    recs = run_lower_bound_sweep(small(epsilons=(1.0, 0.5)))
    assert max(r.ratio for r in recs) <= 0.75 * 1.02


def test_commutation_on_converse_pair(grid):
    k = indicator(0.25, 1.0)
    f, hf = converse_pair(grid)
    assert commutation_error(k, f) < 1e-3
    assert commutation_error(k, hf) < 1e-3


def test_duality_haar_and_bump(grid):
    k = indicator(0.25, 1.0)
    for label, a, b in duality_pairs(grid, count=4):
        assert duality_error(k, a, b) < 1e-3, label


def test_equivalence_suite_with_narrow_kernel():
    cfg = small(kernel=bump(0.02, 0.6), epsilons=(1.0,))
    g = cfg.grid
    funcs = [("atom", make_atom(AtomSpec(-1.0, 2.0, "random", seed=2), g))]
    rep = run_equivalence_suite(cfg, funcs)
    for name, recs in rep.upper.items():
        assert all(0.97 * 0.6 <= r.ratio <= 1.03 * 0.6 for r in recs), name
    assert set(rep.lower) == {"hilbert", "smooth", "poisson", "nontangential"}
    d = rep.to_dict()
    assert set(d) == {"commutation", "duality", "flagged"}


# ---------------------------------------------------------------- output


def _record(**kw):
    base = dict(epsilon=0.1, delta=0.25, m=1.0, moment_target=0.75, ratio=math.pi / 4, residual=1 / 3, runtime_ms=12)
    return ConvergenceRecord(**{**base, **kw})


def test_emit_one_record(tmp_path):
    path = tmp_path / "out.csv"
    emit([_record()], path, small())
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS) and len(lines) == 2
    meta = json.loads(path.with_suffix(".json").read_text())
    assert meta["config"]["kernel"] == "indicator(0.25,1.0)"


def test_emit_no_records(tmp_path):
    path = tmp_path / "out.csv"
    emit([], path)
    assert path.read_text().splitlines() == [",".join(CSV_COLUMNS)]


def test_emit_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    recs = [_record(epsilon=float(e), ratio=float(r), residual=float(s)) for e, r, s in rng.random((5, 3))]
    path = tmp_path / "out.csv"
    emit(recs, path)
    for rec, row in zip(recs, read_records(path)):
        for col in CSV_COLUMNS:
            assert row[col] == float(f"{getattr(rec, col):.12g}")


def test_emit_reports_path(tmp_path):
    bad = tmp_path / "missing" / "out.csv"
    with pytest.raises(OSError, match="missing"):
        emit([], bad)


def test_record_validation():
    with pytest.raises(ValueError):
        _record(ratio=-1.0)


def test_determinism(tmp_path):
    cfg = small(epsilons=(1.0, 0.5))
    rows = []
    for name in ("a.csv", "b.csv"):
        emit(run_lower_bound_sweep(cfg), tmp_path / name, cfg)
        with open(tmp_path / name) as fh:
            rows.append([{k: v for k, v in r.items() if k != "runtime_ms"} for r in csv.DictReader(fh)])
    assert rows[0] == rows[1]


# ---------------------------------------------------------------- command line


def _write_config(tmp_path, **extra):
    text = "grid_l = 50\ngrid_n = 4096\nepsilon = 1, 0.5\n"
    text += "".join(f"{k} = {v}\n" for k, v in extra.items())
    path = tmp_path / "run.cfg"
    path.write_text(text)
    return path


def test_cli_ratio(tmp_path):
    out = tmp_path / "ratio.csv"
    code = cli.main(["ratio", "--config", str(_write_config(tmp_path)), "--out", str(out)])
    assert code == 0
    rows = read_records(out)
    assert len(rows) == 2 and all(r["ratio"] <= 0.765 for r in rows)


def test_cli_lower_with_overrides(tmp_path):
    out = tmp_path / "lower.csv"
    code = cli.main(["lower", "--grid-l", "50", "--grid-n", "4096", "--epsilon", "1,0.5", "--out", str(out)])
    assert code == 0
    assert [r["epsilon"] for r in read_records(out)] == [1.0, 0.5]


def test_cli_apply(tmp_path):
    out = tmp_path / "apply.csv"
    assert cli.main(["apply", "--config", str(_write_config(tmp_path)), "--out", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "re", "im"] and len(rows) == 4097


def test_cli_exit_code_when_flagged(tmp_path, monkeypatch, capsys):
    # a negative budget puts the cap below every ratio, so every record is flagged
    from hausdorff_h1 import experiments

    monkeypatch.setattr(experiments, "BUDGET", -0.5)
    out = tmp_path / "ratio.csv"
    assert cli.main(["ratio", "--config", str(_write_config(tmp_path)), "--out", str(out)]) == 1
    assert "flagged" in capsys.readouterr().err
    assert len(read_records(out)) == 2


def test_cli_norms(tmp_path):
    out = tmp_path / "norms.csv"
    assert cli.main(["norms", "--grid-l", "50", "--grid-n", "4096", "--out", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 20 and rows[0]["label"] == "atom_haar_0_1"


def test_cli_bad_config(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text("delta = 2\n")
    assert cli.main(["ratio", "--config", str(path)]) == 2
    assert "error" in capsys.readouterr().err


def test_cli_missing_config(tmp_path):
    assert cli.main(["ratio", "--config", str(tmp_path / "nope.cfg")]) == 2


def test_cli_unknown_kernel():
    with pytest.raises(SystemExit):
        cli.main(["ratio", "--kernel", "gauss(1)"])
