"""End-to-end checks of the hcdetect executable: exit codes, diagnostics and
schema validity of every artifact."""

import json
import math
import random
import struct
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema
from referencing import Registry, Resource

CLI = Path(sys.argv[1])
SCHEMAS = Path(sys.argv[2])

registry = Registry()
for p in SCHEMAS.glob("*.schema.json"):
    registry = registry.with_resource(p.name, Resource.from_contents(json.loads(p.read_text())))
    registry = registry.with_resource(json.loads(p.read_text())["$id"],
                                      Resource.from_contents(json.loads(p.read_text())))

failures = []


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


def run(*args):
    return subprocess.run([str(CLI), *map(str, args)], capture_output=True, text=True)


def valid(doc, schema_name):
    schema = json.loads((SCHEMAS / schema_name).read_text())
    try:
        jsonschema.Draft202012Validator(schema, registry=registry).validate(doc)
        return True
    except jsonschema.ValidationError as e:
        print("     ", e.message, list(e.absolute_path))
        return False


def spikes(n=20000, seed=1):
    rng = random.Random(seed)
    x = [rng.gauss(0.0, 1.0) for _ in range(n)]
    for c in range(1000, n, 4000):
        for i in range(c - 2, c + 3):
            x[i] += 12.0
    return x


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    x = spikes()
    (tmp / "single.csv").write_text("value\n" + "\n".join(repr(v) for v in x) + "\n")
    (tmp / "tv.csv").write_text("t,v\n" + "\n".join(f"{i / 25000!r},{v!r}" for i, v in enumerate(x)) + "\n")
    (tmp / "x.bin").write_bytes(struct.pack(f"<{len(x)}d", *x))
    (tmp / "const.csv").write_text("3\n3\n3\n3\n")

    check(run("--help").returncode == 0, "--help exits 0")
    check(run("--version").returncode == 0, "--version exits 0")
    check(run().returncode == 2, "missing subcommand exits 2")
    check(run("detect", "--input", tmp / "single.csv", "--bogus").returncode == 2, "unknown flag exits 2")
    check(run("detect", "--input", tmp / "single.csv", "--window", "abc").returncode == 2,
          "non-numeric flag value exits 2")

    r = run("detect", "--input", tmp / "missing.csv")
    check(r.returncode == 1 and "IoError" in r.stderr, "missing input exits 1 with a diagnostic")
    r = run("stats", "--input", tmp / "const.csv")
    check(r.returncode == 2 and "ZeroVariance" in r.stderr, "constant input exits 2 with ZeroVariance")
    r = run("simulate-sparse", "--eps", "0", "--mu", "1")
    check(r.returncode == 2 and "eps" in r.stderr, "eps = 0 exits 2")
    check(run("simulate-mean", "--mu", "1", "--m-grid", "100:10").returncode == 2, "malformed m grid exits 2")
    check(run("simulate-mean", "--mu", "1", "--m-grid", "100,50").returncode == 2, "descending m grid exits 2")
    check(run("detect", "--input", tmp / "single.csv", "--format", "spike2").returncode == 2,
          "unknown format exits 2")
    check(run("detect", "--input", tmp / "single.csv", "--k-min", "1").returncode == 2, "k-min 1 exits 2")

    # detect: three encodings of the same series give the same payload.
    payloads = []
    for args in (["--input", tmp / "single.csv"],
                 ["--input", tmp / "tv.csv", "--format", "csv_time_value"],
                 ["--input", tmp / "tv.csv", "--format", "csv", "--channel", "1"],
                 ["--input", tmp / "x.bin", "--format", "raw_f64_le"]):
        r = run("detect", *args, "--sample-rate", "25000")
        check(r.returncode == 0, "detect " + " ".join(map(str, args[2:])) + " exits 0")
        doc = json.loads(r.stdout)
        check(valid(doc, "detection_report.schema.json"), "detection report validates")
        payloads.append((doc["stats"], doc["hc"], doc["clusters"], doc["thresholds"]))
    check(all(p == payloads[0] for p in payloads), "all input encodings agree")

    r = run("detect", "--input", tmp / "single.csv", "--out", tmp / "r.json",
            "--masked-csv", tmp / "masked.csv", "--window", "20", "--k-max", "6")
    check(r.returncode == 0 and r.stdout == "", "detect --out writes the file only")
    doc = json.loads((tmp / "r.json").read_text())
    check(doc["manifest"]["config"]["window"] == 20 and doc["manifest"]["config"]["k_max"] == 6,
          "manifest records the resolved configuration")
    check(doc["hc"]["reject_normality"] is True, "spiky series rejects normality")
    lines = (tmp / "masked.csv").read_text().splitlines()
    check(lines[0].startswith("# manifest {") and lines[1].startswith("index,value,threshold_0"),
          "masked CSV starts with manifest and header")
    check(len(lines) == 2 + len(x), "masked CSV has one row per sample")
    header = lines[1].split(",")
    check(len(header) == 2 + len(doc["thresholds"]), "one masked column per threshold")

    top = doc["hc"]["hc_max"] + 1
    r = run("detect", "--input", tmp / "single.csv", "--min-threshold", top)
    d = json.loads(r.stdout)
    check(all(not t["segments"] for t in d["thresholds"]), "floor above hc_max gives no segments")

    r = run("stats", "--input", tmp / "single.csv")
    check(r.returncode == 0, "stats exits 0")
    s = json.loads(r.stdout)
    check(valid(s, "stats.schema.json"), "stats output validates")
    check(s["stats"]["kurtosis_raw"] > 4, "spiky series is heavy tailed")
    check(math.isclose(s["stats"]["ratio"], s["stats"]["hc_max"] / s["stats"]["asymptotic_threshold"]),
          "ratio is hc_max over threshold")

    for kind, extra in (("simulate-mean", []), ("simulate-sparse", ["--eps", "0.05,0.2"])):
        out = tmp / f"{kind}.csv"
        r = run(kind, "--mu", "1,2", *extra, "--replicates", "5", "--m-grid", "100,300,1000",
                "--seed", "3", "--out", out)
        check(r.returncode == 0, f"{kind} exits 0")
        lines = out.read_text().splitlines()
        check(lines[0].startswith("# manifest {"), f"{kind} CSV embeds the manifest")
        expected = "mu,m_star,found" if kind == "simulate-mean" else "variant,eps,mu,m_star,found"
        check(lines[1] == expected, f"{kind} CSV header")
        rows = 2 if kind == "simulate-mean" else 8
        check(len(lines) == 2 + rows, f"{kind} CSV has {rows} rows")
        trace = json.loads(out.with_suffix(".json").read_text())
        check(valid(trace, "boundary_trace.schema.json"), f"{kind} trace validates")
        manifest = json.loads(lines[0][len("# manifest "):])
        check(valid(manifest, "manifest.schema.json"), f"{kind} CSV manifest validates")

    r = run("simulate-mean", "--mu", "3", "--replicates", "2", "--m-grid", "100,200",
            "--trace", tmp / "t.json")
    check(r.returncode == 0 and r.stdout.splitlines()[1] == "mu,m_star,found" and (tmp / "t.json").exists(),
          "CSV to stdout with an explicit trace path")

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
