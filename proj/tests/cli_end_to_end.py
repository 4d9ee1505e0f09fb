"""End-to-end checks of the blowup CLI: exit codes, schema validity of every
JSON artifact, byte-identical reruns and the cosh fixture CSV.

usage: cli_end_to_end.py <blowup binary> <schema dir>
"""

import csv
import json
import math
import os
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

BIN = Path(sys.argv[1]).resolve()
SCHEMAS = Path(sys.argv[2]).resolve()
failures = []


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


def load_schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


REPORT = load_schema("report")
ERROR = load_schema("error")
CONFIG = load_schema("config")


def run(cfg_path, command, out_dir, *extra, env=None):
    args = [str(BIN), "--config", str(cfg_path), "--command", command, *extra]
    if out_dir is not None:
        args += ["--out-dir", str(out_dir)]
    return subprocess.run(args, capture_output=True, text=True, env=env).returncode


def write_config(dir_, name, cfg):
    path = Path(dir_) / name
    path.write_text(json.dumps(cfg))
    jsonschema.validate(cfg, CONFIG)
    return path


def validate_dir(out_dir):
    for p in sorted(Path(out_dir).glob("*.json")):
        doc = json.loads(p.read_text())
        jsonschema.validate(doc, ERROR if p.name == "error.json" else REPORT)


def snapshot(out_dir):
    return {p.name: p.read_bytes() for p in sorted(Path(out_dir).iterdir())}


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    power2 = {"family": "power", "params": [2]}
    cube = {"family": "power", "params": [3]}
    sqrt = {"family": "power", "params": [0.5]}
    oscillating = {
        "lower": {"family": "one-minus-exp", "params": [1, 1]},
        "upper": {"family": "constant", "params": [1]},
    }

    ko = write_config(tmp, "ko.json", {"phi": power2, "f": cube})
    rc = run(ko, "check-ko", tmp / "ko")
    report = json.loads((tmp / "ko" / "check-ko.json").read_text())
    check(rc == 0 and report["result"]["report"]["verdict"] == "converges", "check-ko power(2)/u^3 converges, exit 0")

    ent = write_config(tmp, "entire.json", {"phi": power2, "f": cube, "weight": oscillating})
    rc = run(ent, "entire", tmp / "ent")
    err = json.loads((tmp / "ent" / "error.json").read_text())
    check(rc == 3, "entire with u^3 exits with the precondition code")
    check(err["error"]["code"] == "entire-requires-ko-failure"
          and "does not satisfy the Keller-Osserman" in err["error"]["hypothesis"],
          "entire rejection names the KO-failure hypothesis")

    # cosh fixture: phi = 1, f = u, k = cosh 1 on [0, 1].
    ball = write_config(tmp, "ball.json", {"phi": {"family": "unit"}, "f": {"family": "power", "params": [1]},
                                           "params": {"k": math.cosh(1.0)}})
    rc = run(ball, "solve-ball", tmp / "ball")
    with open(tmp / "ball" / "solve-ball.csv") as fh:
        rows = list(csv.reader(fh))
    check(rows[0] == ["r", "u", "du", "Q"], "CSV header is r,u,du,Q")
    err_max = max(abs(float(r[1]) - math.cosh(float(r[0]))) for r in rows[1:])
    check(rc == 0 and err_max <= 1e-6, f"solve-ball cosh fixture within 1e-6 (got {err_max:.2e})")
    digits = rows[2][1].replace(".", "").replace("-", "").lstrip("0")
    check(len(digits) == 17, f"floats carry 17 significant digits ({rows[2][1]})")

    # Configuration failures.
    bad = tmp / "bad.json"
    bad.write_text(json.dumps({"phi": power2, "unexpected": 1}))
    check(run(bad, "indices", tmp / "bad") == 2, "unknown config key exits 2")
    nophi = tmp / "nophi.json"
    nophi.write_text(json.dumps({"f": cube}))
    check(run(nophi, "indices", tmp / "nophi") == 2, "missing phi block exits 2")
    check(run(ko, "solve-ball", tmp / "nof", "--seed", "3") == 0, "seed override accepted")
    nof = write_config(tmp, "nof.json", {"phi": power2})
    rc = run(nof, "check-ko", tmp / "nof2")
    check(rc == 2 and json.loads((tmp / "nof2" / "error.json").read_text())["error"]["kind"] == "config",
          "check-ko without f exits 2 with error.json")

    # Table-backed phi: (t, t^2) pairs resolved relative to the config file.
    (tmp / "tables").mkdir()
    (tmp / "tables" / "phi.txt").write_text(
        "# t phi(t)\n" + "".join(f"{10 ** (k / 8):.17g} {2 * 10 ** (k / 8):.17g}\n" for k in range(-56, 57)))
    tab = write_config(tmp / "tables", "tab.json", {"phi": {"family": "table", "table": "phi.txt"}, "f": cube})
    rc = run(tab, "indices", tmp / "tab")
    idx = json.loads((tmp / "tab" / "indices.json").read_text())["result"]["indices"]
    check(rc == 0 and abs(idx["l"] - 3) < 0.05 and abs(idx["m"] - 3) < 0.05,
          f"table-backed phi = 2t gives indices near (3, 3) (got {idx['l']:.4f}, {idx['m']:.4f})")

    # Every command once, schema-validated.
    full = write_config(tmp, "full.json", {
        "phi": power2, "f": sqrt, "weight": oscillating,
        "geometry": {"N": 5, "L": 1, "horizon": 20},
        "params": {"alpha": 1, "epsilon": 0.1, "k": 5, "M": 256},
    })
    sweep = write_config(tmp, "sweep.json", {
        "phi": power2, "f": cube, "geometry": {"N": 2},
        "params": {"k_ladder": [2, 4, 8, 16], "k": 5, "M": 256},
    })
    codes = {}
    for cmd in ["indices", "check-ko", "check-arho", "budget", "subadd", "solve-ivp", "blowup-radius", "entire"]:
        codes[cmd] = run(full, cmd, tmp / "full")
    for cmd in ["solve-ball", "verify-bounds", "sweep", "fd-check"]:
        codes[cmd] = run(sweep, cmd, tmp / "sweep")
    check(all(c == 0 for c in codes.values()), f"all twelve commands exit 0 ({codes})")
    for d in ["ko", "ent", "ball", "nof2", "tab", "full", "sweep"]:
        try:
            validate_dir(tmp / d)
            check(True, f"JSON artifacts in {d}/ validate")
        except jsonschema.ValidationError as e:
            check(False, f"JSON artifacts in {d}/ validate: {e.message}")

    # Determinism, including independence of the thread count.
    run(sweep, "sweep", tmp / "det1", "--threads", "1")
    run(sweep, "sweep", tmp / "det2", "--threads", "3")
    run(full, "subadd", tmp / "det1")
    run(full, "subadd", tmp / "det2")
    check(snapshot(tmp / "det1") == snapshot(tmp / "det2"), "reruns are byte-identical across thread counts")
    run(full, "subadd", tmp / "seed7", "--seed", "7")
    check((tmp / "seed7" / "subadd.json").read_bytes() != (tmp / "det1" / "subadd.json").read_bytes(),
          "the seed reaches the sampler")

    # Shipped sample configs parse, validate and run.
    for cfg in sorted((SCHEMAS.parent / "configs").glob("*.json")):
        jsonschema.validate(json.loads(cfg.read_text()), CONFIG)
        rc = subprocess.run([str(BIN), "--config", str(cfg), "--out-dir", str(tmp / "samples" / cfg.stem)],
                            capture_output=True).returncode
        check(rc == 0, f"sample config {cfg.name} runs")

    # Output directory precedence: flag > BLOWUP_OUT_DIR > ./out.
    env = dict(os.environ, BLOWUP_OUT_DIR=str(tmp / "from_env"))
    run(ko, "indices", None, env=env)
    check((tmp / "from_env" / "indices.json").exists(), "BLOWUP_OUT_DIR is honoured")
    run(ko, "indices", tmp / "from_flag", env=env)
    check((tmp / "from_flag" / "indices.json").exists(), "--out-dir wins over BLOWUP_OUT_DIR")

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
