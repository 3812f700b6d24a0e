import json
import os
import subprocess
import sys

BASE = [sys.executable, "-m", "coherence_forge"]


def run(*args, env=None):
    e = dict(os.environ)
    if env:
        e.update(env)
    return subprocess.run(BASE + list(args), capture_output=True, text=True,
                          env=e)


def test_show_stdlib():
    out = run("show", "bin")
    assert out.returncode == 0
    assert "ten/2" in out.stdout


def test_enumerate_dot_five_nodes():
    out = run("enumerate", "bin", "--arity", "4", "--format", "dot",
              "--max-term-size", "9")
    assert out.returncode == 0
    assert out.stdout.count("[label=") == 5
    assert "->" not in out.stdout


def test_enumerate_json_embeds_bound_and_version():
    out = run("enumerate", "bin", "--arity", "3", "--format", "json")
    doc = json.loads(out.stdout)
    assert doc["tool"]["name"] == "coherence-forge"
    assert doc["tool"]["version"]
    assert doc["truncation"]["max_arity"] == 4


def test_classify_exit_codes():
    ok = run("classify", "--map", "stdlib:mon_to_smon", "--max-term-size", "9")
    assert ok.returncode == 0
    doc = json.loads(ok.stdout)
    assert doc["report"]["weak_equivalence"] == "Holds"
    bad = run("classify", "--map", "stdlib:bin_to_mon", "--max-term-size", "9")
    assert bad.returncode == 1


def test_usage_error_is_exit_three():
    out = run("classify")
    assert out.returncode == 3
    out2 = run("show", "no_such_theory")
    assert out2.returncode == 3
    assert "error" in out2.stderr


def test_determinism_across_runs_and_jobs():
    a = run("enumerate", "mon_nounit", "--arity", "4", "--max-term-size", "9")
    b = run("enumerate", "mon_nounit", "--arity", "4", "--max-term-size", "9")
    c = run("enumerate", "mon_nounit", "--arity", "4", "--max-term-size", "9",
            "--jobs", "4")
    assert a.stdout == b.stdout == c.stdout
    d1 = run("classify", "--map", "stdlib:mon_to_smon", "--max-term-size", "9")
    d2 = run("classify", "--map", "stdlib:mon_to_smon", "--max-term-size", "9",
             "--jobs", "3")
    assert d1.stdout == d2.stdout


def test_coherence_pair_and_sweep():
    v = run("coherence", "mon_nounit", "--arity", "4",
            "--source", "ten(ten(ten(1,2),3),4)",
            "--pair", "alpha ; alpha", "alpha@1 ; alpha ; alpha@2",
            "--max-term-size", "9")
    assert v.returncode == 0
    doc = json.loads(v.stdout)
    assert doc["verdict"] == "Holds" and doc["moves"]
    sweep = run("coherence", "mon_nounit", "--arity", "4",
                "--max-term-size", "9")
    assert sweep.returncode == 0
    neg = run("coherence", "assoc", "--arity", "4",
              "--source", "ten(ten(ten(1,2),3),4)",
              "--pair", "alpha ; alpha", "alpha@1 ; alpha ; alpha@2",
              "--max-term-size", "9")
    assert neg.returncode == 1


def test_factor_cylinder_star(tmp_path):
    out = run("factor", "cylinder", "--map", "stdlib:bin_to_smon",
              "--emit-dot", "--arity", "4", "--max-term-size", "9")
    assert out.returncode == 0
    assert out.stdout.count("[label=") >= 6
    png = tmp_path / "star.png"
    out2 = run("factor", "cylinder", "--map", "stdlib:bin_to_smon",
               "--arity", "4", "--max-term-size", "9", "--render", str(png))
    assert out2.returncode == 0
    assert png.exists() and png.stat().st_size > 0
    doc = json.loads(out2.stdout)
    assert doc["middle_objects"]["4"] == 6
    assert doc["into_middle"]["cofibration"] == "Holds"
    assert doc["out_of_middle"]["trivial_fibration"] == "Holds"


def test_lift_cli():
    out = run("lift", "--map", "stdlib:mon_to_smon", "--object",
              "ten(ten(1,2),3)", "--path", "id", "--max-term-size", "9")
    assert out.returncode == 0
    assert "id" in out.stdout


def test_kronecker_cli(tmp_path):
    dest = tmp_path / "kk.2th"
    out = run("kronecker", "bin", "bin", "-o", str(dest), "--check",
              "--max-term-size", "9")
    assert out.returncode == 0
    assert "coherence: Holds" in out.stderr
    text = dest.read_text()
    assert "dl_ten_1_ten_2" in text
    reload_ = run("show", str(dest))
    assert reload_.returncode == 0


def test_compare_cli():
    out = run("compare", "--map", "stdlib:bin_to_smon",
              "--other-k", "stdlib:bin_to_mon",
              "--other-g", "stdlib:mon_to_smon", "--max-term-size", "9")
    assert out.returncode == 0
    doc = json.loads(out.stdout)
    assert doc["uniqueness"] == "Holds"
    out2 = run("compare", "--map", "stdlib:bin_to_smon",
               "--other-k", "stdlib:bin_to_mon",
               "--other-g", "stdlib:mon_to_smon", "--seed", "1",
               "--max-term-size", "9")
    assert out2.returncode == 0


def test_certify_cli():
    out = run("certify", "--map", "stdlib:mon_to_smon", "--max-term-size", "9")
    assert out.returncode == 0
    doc = json.loads(out.stdout)
    assert doc["verdict"] == "Holds"
    assert "witnesses" in doc


def test_env_bound_override():
    out = run("enumerate", "bin", "--arity", "5",
              env={"COHERENCE_FORGE_BOUND": "5:11:16"})
    assert out.returncode == 0
    doc = json.loads(out.stdout)
    assert len(doc["objects"]) == 14


def test_morphism_file_input(tmp_path):
    mapfile = tmp_path / "mu.2map"
    mapfile.write_text(
        "source: stdlib:mon_nounit\ntarget: stdlib:smon_nounit\n"
        "maps:\n  ten -> ten(1,2)\ncells:\n  alpha -> id\n")
    out = run("classify", "--map", str(mapfile), "--max-term-size", "9")
    assert out.returncode == 0
    doc = json.loads(out.stdout)
    assert doc["report"]["weak_equivalence"] == "Holds"
