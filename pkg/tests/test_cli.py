import json
import os
import subprocess
import sys

import pytest

from rtmkit.cli import main
from rtmkit.lts import read_lts
from rtmkit.machine import read_machine

DATA = os.path.join(os.path.dirname(__file__), "data")


def data(name):
    return os.path.join(DATA, name)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_explore_closed_lts(capsys):
    code, out, _ = run(capsys, "explore", data("loop.lts"))
    assert code == 0 and out == 'des (0,1,1)\n(0,"a",0)\n'


def test_explore_machine_reports_horizon(capsys):
    code, out, err = run(capsys, "explore", data("echo.itm"), "--depth", "1")
    assert code == 2 and "horizon:" in err
    assert read_lts(out).initial == 0


def test_explore_is_deterministic(capsys):
    outs = {run(capsys, "explore", data("delay.rtm"), "--depth", "6")[1] for _ in range(3)}
    assert len(outs) == 1


def test_translate_outputs_readable_machine(capsys):
    code, out, _ = run(capsys, "translate", "itm2rtm", data("echo.itm"))
    assert code == 0 and read_machine(out).rules
    code, out, _ = run(capsys, "translate", "destay", data("write_stay.rtm"))
    assert code == 0 and all(r.move != "S" for r in read_machine(out).rules)


def test_check_bisim_verdicts(capsys):
    assert run(capsys, "check", "bisim", data("loop.lts"), data("loop.lts"))[0] == 0
    code, out, _ = run(capsys, "check", "bisim", data("ab.lts"), data("ac.lts"))
    assert code == 1 and out.startswith("verdict: no") and "witness:" in out
    code, out, _ = run(capsys, "check", "bisim", data("ab.lts"), data("ac.lts"), "--json")
    doc = json.loads(out)
    assert doc["verdict"] == "no" and doc["witness"]["clause"] in (1, 2)


def test_check_bisim_bounded_machine(capsys):
    code, out, _ = run(capsys, "check", "bisim", data("echo.itm"), data("echo.rtm"), "--bounded", "--depth", "4")
    assert code != 1 and out.startswith("verdict:")


def test_check_io_and_form(capsys):
    assert run(capsys, "check", "io", data("echo.rtm"))[0] == 0
    assert run(capsys, "check", "rtm-omega-form", data("delay.rtm"))[0] == 0
    code, out, _ = run(capsys, "check", "rtm-omega-form", data("write_stay.rtm"), "--json")
    assert code == 1 and json.loads(out)["verdict"] == "fail"


def test_check_interactive_and_monotone(capsys):
    assert run(capsys, "check", "interactive", data("echo.rtm"))[0] == 0
    assert run(capsys, "check", "monotone", data("delay.itm"), "--max-len", "4")[0] == 0


def test_run(capsys):
    code, out, _ = run(capsys, "run", data("delay.rtm"), "--input", "110")
    assert code == 0 and out.splitlines() == ["output: 11", "consumed: 3"]
    assert run(capsys, "run", data("echo.itm"), "--input", "2")[0] == 64


def test_run_interactive(monkeypatch, capsys):
    import io

    monkeypatch.setattr(sys, "stdin", io.StringIO("1\n0\n"))
    code, out, _ = run(capsys, "run", data("echo.rtm"), "--interactive")
    assert code == 0 and out.split() == ["1", "0"]


def test_advice(capsys):
    code, out, _ = run(capsys, "advice", data("double.adv"), "--query", "3")
    assert code == 0 and out.split() == ["in?1"] * 3 + ["in?0"] + ["out!1"] * 6 + ["out!0"]
    code, out, err = run(capsys, "advice", data("double.adv"), "--cap", "2")
    assert code == 2 and "horizon" in err


def test_compose(capsys):
    code, out, _ = run(capsys, "compose", data("echo.rtm"), "--advice", data("double.adv"))
    # echo's in?/out! labels are foreign channel actions and get blocked
    assert code == 0 and out == "des (0,0,1)\n"


def test_simulate_lts(capsys, tmp_path):
    adv = tmp_path / "t.adv"
    code, out, _ = run(capsys, "simulate-lts", data("ab.lts"), "--advice-out", str(adv))
    assert code == 0 and read_machine(out).rules and adv.read_text().startswith("map")
    code, out, _ = run(capsys, "simulate-lts", data("ab.lts"), "--check", "--depth", "400")
    assert code == 0 and out.startswith("verdict: yes")
    code, out, _ = run(capsys, "simulate-lts", data("loop.lts"), "--mode", "countable", "--check", "--divergence", "--depth", "60")
    assert code == 1


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["explore"],
        ["frobnicate"],
        ["explore", "nonexistent.lts"],
        ["explore", "--depth", "-1", "x"],
        ["check", "interactive", "x", "--bound", "0"],
        ["simulate-lts", "ECHO"],
    ],
)
def test_usage_errors(capsys, argv):
    argv = [a.replace("ECHO", data("echo.rtm")) for a in argv]
    assert main(argv) == 64


def test_parse_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.lts"
    bad.write_text("des (0,1,2)\n(0,a,1)\n")
    code, _, err = run(capsys, "explore", str(bad))
    assert code == 65 and "line 2" in err
    badadv = tmp_path / "bad.adv"
    badadv.write_text("map x\n")
    assert run(capsys, "advice", str(badadv))[0] == 65


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "rtmkit", "explore", data("loop.lts")], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("des")
