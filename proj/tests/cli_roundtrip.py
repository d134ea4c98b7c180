"""CLI round trip: reports and check results against the schemas, exit codes, plot CSV shape."""

import csv
import io
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

CLI = sys.argv[1]
SCHEMAS = pathlib.Path(sys.argv[2])

CORPUS = [
    ("D^2 - z", "inf"),
    ("z*D - (1/2)", "0"),
    ("z*D - (0.7+0.2i)", "0"),
    ("z^2*D + 1", "0"),
    ("z^4*D^2 + 2*z^3*D + 3*z^2*D + 2", "0"),
    ("D^2 - z", "0"),
]


def schema(name):
    return json.loads((SCHEMAS / name).read_text())


def run(*args):
    return subprocess.run([CLI, *args], capture_output=True, text=True)


def expect(cond, msg):
    if not cond:
        print("FAIL:", msg)
        sys.exit(1)


report_schema, check_schema, matrices_schema = (
    schema("report.schema.json"),
    schema("check.schema.json"),
    schema("matrices.schema.json"),
)

with tempfile.TemporaryDirectory() as tmp:
    tmp = pathlib.Path(tmp)
    for i, (op, at) in enumerate(CORPUS):
        r = run("analyze", op, "--at", at)
        expect(r.returncode == 0, f"analyze {op}: exit {r.returncode} {r.stderr}")
        report = json.loads(r.stdout)
        jsonschema.validate(report, report_schema)
        path = tmp / f"r{i}.json"
        path.write_text(r.stdout)

        c = run("check-stokes", str(path))
        expect(c.returncode == 0, f"check-stokes {op}: exit {c.returncode} {c.stdout}")
        jsonschema.validate(json.loads(c.stdout), check_schema)

        if len(report["stokes"]["matrices"]) > 1:
            cand = {"matrices": report["stokes"]["matrices"]}
            jsonschema.validate(cand, matrices_schema)
            m = cand["matrices"][0]
            # One of the two off-diagonal positions is forbidden by the dominance pattern.
            m[0][1] = m[1][0] = {"re": 0.5, "im": 0.0}
            bad = tmp / f"m{i}.json"
            bad.write_text(json.dumps(cand))
            c = run("check-stokes", str(path), str(bad))
            expect(c.returncode == 4, f"tampered matrices for {op}: exit {c.returncode}")
            out = json.loads(c.stdout)
            jsonschema.validate(out, check_schema)
            expect(not out["valid"] and out["violations"], "tampered matrices reported valid")

    r = run("analyze", "D^2 + * z")
    expect(r.returncode == 2, f"parse error exit {r.returncode}")
    err = json.loads(r.stderr)["error"]
    expect(err["kind"] == "parse" and err["column"] == 7, f"parse error payload {err}")

    expect(run("check-stokes", str(tmp / "missing.json")).returncode == 2, "missing file exit")
    junk = tmp / "junk.json"
    junk.write_text("{not json")
    expect(run("check-stokes", str(junk)).returncode == 2, "malformed JSON exit")
    expect(run("analyze").returncode == 2, "usage error exit")

    svg = tmp / "plot.svg"
    p = run("plot", "D^2 - z", "--at", "inf", "--samples", "50", "--svg", str(svg))
    expect(p.returncode == 0, f"plot exit {p.returncode}")
    rows = list(csv.reader(io.StringIO(p.stdout)))
    expect(rows[0] == ["theta", "curve_1", "curve_2", "dominant_index"], f"header {rows[0]}")
    expect(len(rows) - 1 == 50, f"row count {len(rows) - 1}")
    theta = [float(row[0]) for row in rows[1:]]
    expect(all(a < b for a, b in zip(theta, theta[1:])), "theta not increasing")
    expect(all(row[3] in ("1", "2") for row in rows[1:]), "dominant index out of range")
    expect(svg.read_text().lstrip().startswith("<"), "svg not written")

print("cli round trip ok")
