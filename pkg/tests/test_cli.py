import io
import json

import numpy as np
import pytest

from ptdirac import cli
from ptdirac.kernel import PotentialSpec


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def rows(text):
    return [line.split(",") for line in text.splitlines() if line and not line.startswith("#")][1:]


def comments(text):
    return [line[2:] for line in text.splitlines() if line.startswith("# ")]


# --- sweep -------------------------------------------------------------------

def test_zero_coupling_sweep_is_transparent(capsys):
    code, out, _ = run(capsys, "sweep", "--points", "21")
    assert code == 0
    table = np.array(rows(out), dtype=float)
    assert np.allclose(table[:, 1], 1.0, atol=1e-15)
    assert np.allclose(table[:, 2:4], 0.0, atol=1e-15)


def test_sweep_reports_excluded_band(capsys):
    _, out, _ = run(capsys, "sweep", "--points", "11", "--cs", "5", "--cv", "5")
    assert "skipped 3 energies in the band |E| < (1 + 1e-06) m" in comments(out)
    assert len(rows(out)) == 8


def test_sweep_rejects_grid_inside_gap(capsys):
    code, _, err = run(capsys, "sweep", "--points", "11", "--exclude-gap", "false")
    assert code == 2 and "exclude_gap" in err


def test_sweep_is_deterministic(tmp_path):
    paths = [tmp_path / f"out{i}.csv" for i in range(2)]
    for p in paths:
        assert cli.main(["sweep", "--cs", "-5", "--cv", "5", "--a", "2", "--b", "1",
                         "--points", "30", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert b"\r" not in paths[0].read_bytes()


def test_sweep_mass_invariance(capsys):
    base = ["sweep", "--cs", "-2", "--cv", "2", "--a", "-2", "--b", "1", "--points", "24"]
    _, one, _ = run(capsys, *base, "--mass", "1")
    _, other, _ = run(capsys, *base, "--mass", "2.5")
    assert np.allclose(np.array(rows(one), dtype=float), np.array(rows(other), dtype=float),
                       rtol=1e-10, atol=1e-13)


@pytest.mark.parametrize("mode, cs", [("nr-spin", "3"), ("nr-pseudospin", "-3")])
def test_sweep_nonrelativistic_modes(capsys, mode, cs):
    code, out, _ = run(capsys, "sweep", "--mode", mode, "--cs", cs, "--cv", "3",
                       "--points", "20", "--a", "1")
    assert code == 0
    table = np.array(rows(out), dtype=float)
    assert np.all(table[:, 0] > 1)
    assert "skipped 8 energies below -m: no non-relativistic limit there" in comments(out)


def test_sweep_nonrelativistic_mode_needs_matching_couplings(capsys):
    code, _, err = run(capsys, "sweep", "--mode", "nr-spin", "--cs", "1", "--cv", "2")
    assert code == 2 and "cv == cs" in err


def test_sweep_json(capsys):
    _, out, _ = run(capsys, "sweep", "--points", "5", "--format", "json")
    doc = json.loads(out)
    assert doc["command"] == "sweep"
    assert doc["columns"][0] == "E_over_m" and len(doc["rows"]) == 4


# --- configuration -----------------------------------------------------------

def test_config_round_trip_from_header(capsys):
    _, out, _ = run(capsys, "sweep", "--cs", "-1.5", "--cv", "0.25", "--a", "0.3",
                    "--points", "7", "--gap-delta", "1e-4")
    file_values = cli.load_config(io.StringIO(out.split("E_over_m")[0]))
    settings = cli.resolve_settings("sweep", {}, file_values)
    reparsed = cli.SweepConfig.from_settings(settings)
    assert reparsed.to_settings() == settings
    assert settings["cs"] == -1.5 and settings["gap_delta"] == 1e-4 and settings["points"] == 7


def test_bound_output_reads_back_as_config(tmp_path, capsys):
    out = tmp_path / "bound.csv"
    cli.main(["bound", "--cs", "-5", "--cv", "5", "--a", "2", "--b", "1", "--out", str(out)])
    _, again, _ = run(capsys, "bound", "--config", str(out))
    assert again == out.read_text(encoding="utf-8")


def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("cs = -5\ncv = 5\na = 2\nb = 1\n", encoding="utf-8")
    _, from_file, _ = run(capsys, "bound", "--config", str(cfg))
    assert comments(from_file)[-1] == "1 state: E=0.383849m"
    _, overridden, _ = run(capsys, "bound", "--config", str(cfg), "--cs", "5")
    assert comments(overridden)[-1] == "0 states"


@pytest.mark.parametrize("content, fragment", [("bogus = 1\n", "unknown config key"),
                                               ("points = many\n", "cannot parse"),
                                               ("mode = quantum\n", "not in"),
                                               ("cs = nan\n", "finite")])
def test_invalid_config(tmp_path, capsys, content, fragment):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(content, encoding="utf-8")
    code, _, err = run(capsys, "sweep", "--config", str(cfg))
    assert code == 2 and fragment in err


def test_missing_config_file(tmp_path, capsys):
    code, _, err = run(capsys, "bound", "--config", str(tmp_path / "absent.cfg"))
    assert code == 2 and err.startswith("ptdirac bound: error:")


@pytest.mark.parametrize("flag", [["--mass", "0"], ["--c", "-1"]])
def test_nonphysical_scales_rejected(capsys, flag):
    assert run(capsys, "detscan", *flag)[0] == 2


def test_required_energy(capsys):
    code, _, err = run(capsys, "check")
    assert code == 2 and "--energy is required" in err


# --- bound, detscan, solve-strength ------------------------------------------

def test_bound_counts(capsys):
    _, two, _ = run(capsys, "bound", "--cs", "-1", "--a", "0.4", "--b", "0.4")
    assert comments(two)[-1].startswith("2 states: E=-")
    _, none, _ = run(capsys, "bound", "--cs", "5", "--cv", "5", "--a", "2", "--b", "1")
    assert comments(none)[-1] == "0 states" and rows(none) == []


def test_bound_mass_invariance(capsys):
    base = ["bound", "--cs", "-2", "--cv", "2", "--a", "-2", "--b", "1"]
    _, one, _ = run(capsys, *base)
    _, other, _ = run(capsys, *base, "--mass", "3")
    assert comments(one)[-1] == comments(other)[-1] == "1 state: E=0.181350m"


def test_detscan_without_coupling(capsys):
    _, out, _ = run(capsys, "detscan", "--points", "10", "--a", "0.5")
    table = np.array(rows(out), dtype=float)
    assert table.shape == (10, 2) and np.all(table[:, 1] == 1.0)


def test_detscan_marks_kernel_pole(capsys):
    # a = 0 and c = m: the transform pole sits at E = 0, the middle of an odd grid
    code, out, _ = run(capsys, "detscan", "--points", "9", "--cs", "-1")
    assert code == 0
    det = np.array(rows(out), dtype=float)[:, 1]
    assert np.isnan(det[4]) and np.all(np.isfinite(np.delete(det, 4)))
    assert "1 grid point(s) on a kernel pole: nan" in comments(out)


def test_detscan_scalar_well_has_symmetric_crossings(capsys):
    _, out, _ = run(capsys, "detscan", "--cs", "-1", "--points", "400")
    e, det = np.array(rows(out), dtype=float).T
    (idx,) = np.nonzero(np.sign(det[:-1]) != np.sign(det[1:]))
    assert len(idx) == 2
    assert np.allclose(e[idx[0]], -e[idx[1] + 1]) and np.allclose(e[idx[0] + 1], -e[idx[1]])


def test_detscan_sign_change_brackets_state(capsys):
    _, out, _ = run(capsys, "detscan", "--cs", "-5", "--cv", "5", "--a", "2", "--b", "1",
                    "--points", "201")
    e, det = np.array(rows(out), dtype=float).T
    (idx,) = np.nonzero(np.sign(det[:-1]) != np.sign(det[1:]))
    assert len(idx) == 1 and e[idx[0]] < 0.383849 < e[idx[0] + 1]


def test_solve_strength_vector(capsys):
    code, out, _ = run(capsys, "solve-strength", "--a", "2", "--b", "1", "--energy", "0.5")
    assert code == 0
    table = rows(out)
    assert [r[0] for r in table] == ["plus", "minus"]
    assert float(table[0][1]) > 0 and all(float(r[2]) < 1e-9 for r in table)


def test_solve_strength_complex_scalar(capsys):
    _, out, _ = run(capsys, "solve-strength", "--a", "2", "--b", "1", "--energy", "0",
                    "--solve-for", "cs")
    assert rows(out) == []
    assert any(c.startswith("complex-roots: cs/m^2 = -6.675675") for c in comments(out))


def test_solve_strength_mass_invariance(capsys):
    base = ["solve-strength", "--a", "2", "--b", "1", "--energy", "0.5", "--cs", "-0.5"]
    _, one, _ = run(capsys, *base)
    _, other, _ = run(capsys, *base, "--mass", "4")
    first = np.array([r[1] for r in rows(one)], dtype=float)
    second = np.array([r[1] for r in rows(other)], dtype=float)
    assert np.allclose(first, second, rtol=1e-12)


# --- check and nrlimit -------------------------------------------------------

def test_check_passes_for_pt_symmetric_kernel(capsys):
    code, out, _ = run(capsys, "check", "--cs", "1", "--cv", "2", "--a", "0.5", "--b", "0.3",
                       "--energy", "-2.5")
    assert code == 0
    assert {r[2] for r in rows(out)} == {"pass"}


def test_check_coupled_kernel_at_2m(capsys):
    code, out, _ = run(capsys, "check", "--cs", "-5", "--cv", "5", "--a", "2", "--b", "1",
                       "--energy", "2")
    assert code == 0 and comments(out)[-1] == "6/6 checks within 1e-08"


def test_check_adds_unitarity_for_hermitian_kernel(capsys):
    code, out, _ = run(capsys, "check", "--cs", "1", "--cv", "2", "--a", "1", "--b", "-1",
                       "--energy", "2")
    assert code == 0
    assert ["unitarity", "pass"] == [r[0::2] for r in rows(out)][-1]


class Lopsided:
    """Neither even nor odd: breaks the PT symmetry the checks rely on."""

    decay_bound = 1.0
    scale = 1.5
    cutoff = 0.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(-np.abs(x)) * (1 + 0.5 * np.tanh(x))


def test_check_negative_control():
    spec = PotentialSpec(1.0, 2.0, 0.5, 0.3, Lopsided(), Lopsided())
    settings = cli.resolve_settings("check", {"energy": "2", "cs": "1", "cv": "2"})
    out = io.StringIO()
    assert cli.run_check(spec, settings, out) == 1
    assert "FAIL" in out.getvalue()


@pytest.mark.parametrize("case", ["spin", "pseudospin"])
def test_nrlimit_gap_shrinks(capsys, case):
    code, out, _ = run(capsys, "nrlimit", "--case", case, "--cv", "5", "--a", "2", "--b", "1")
    assert code == 0
    gaps = np.array(rows(out), dtype=float)[:, -1]
    assert np.all(np.diff(gaps) < 0)


def test_nrlimit_custom_momenta(capsys):
    _, out, _ = run(capsys, "nrlimit", "--cv", "1", "--k", "0.3,0.03")
    table = np.array(rows(out), dtype=float)
    assert np.allclose(table[:, 0], [0.3, 0.03])
    assert np.allclose(table[:, 1], np.sqrt(1 + table[:, 0] ** 2))


def test_module_entry_point():
    import subprocess
    import sys
    proc = subprocess.run([sys.executable, "-m", "ptdirac", "detscan", "--points", "3"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.startswith("# ptdirac detscan\n")


def test_nrlimit_mass_invariance(capsys):
    base = ["nrlimit", "--case", "pseudospin", "--cv", "5", "--a", "2", "--b", "1"]
    _, one, _ = run(capsys, *base)
    _, other, _ = run(capsys, *base, "--mass", "1.7")
    assert np.allclose(np.array(rows(one), dtype=float), np.array(rows(other), dtype=float),
                       rtol=1e-8, atol=1e-14)
