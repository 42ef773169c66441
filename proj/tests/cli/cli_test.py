#!/usr/bin/env python3
#   Copyright 2026 The kwmoments Authors
#
#   Licensed under the Apache License, Version 2.0 (the "License");
#   you may not use this file except in compliance with the License.
#   You may obtain a copy of the License at
#
#       http://www.apache.org/licenses/LICENSE-2.0
#
#   Unless required by applicable law or agreed to in writing, software
#   distributed under the License is distributed on an "AS IS" BASIS,
#   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#   See the License for the specific language governing permissions and
#   limitations under the License.

"""End-to-end checks of the kwm command line: exit codes, schemas, determinism."""

import argparse
import csv
import json
import math
import os
import subprocess
import sys
import tempfile
import unittest

import jsonschema

KWM = None
SCHEMAS = None


def run(*args, env=None):
    full_env = dict(os.environ)
    full_env.update(env or {})
    return subprocess.run([KWM, *args], capture_output=True, text=True, env=full_env)


def schema(name):
    with open(os.path.join(SCHEMAS, name + ".schema.json")) as f:
        return json.load(f)


def read_csv(path):
    with open(path) as f:
        lines = f.read().splitlines()
    assert lines[0].startswith("# "), path
    return list(csv.DictReader(lines[1:]))


class Bound(unittest.TestCase):
    def test_subgaussian_example(self):
        r = run("bound", "--n", "100", "--sigma2", "0.25", "--d", "4")
        self.assertEqual(r.returncode, 0, r.stderr)
        out = json.loads(r.stdout)
        jsonschema.validate(out, schema("bound_output"))
        self.assertEqual(out["M"], 10.0)
        self.assertEqual(out["regime"], "SubGaussian")

    def test_calibrated_and_tail(self):
        r = run("bound", "--n", "100", "--sigma2", "0.5", "--d", "8", "--t", "40", "--mode", "calibrated")
        self.assertEqual(r.returncode, 0, r.stderr)
        out = json.loads(r.stdout)
        jsonschema.validate(out, schema("bound_output"))
        self.assertEqual(out["mode"], "calibrated")
        self.assertLess(out["tail_at_t"], 1.0)

    def test_usage_errors(self):
        self.assertEqual(run("bound", "--n", "10", "--sigma2", "0.5", "--d", "3").returncode, 2)
        r = run("bound", "--n", "10", "--sigma2", "0.5", "--d", "6", "--k", "4")
        self.assertEqual(r.returncode, 2)
        self.assertIn("d <= k", r.stderr)
        self.assertEqual(run("bound", "--n", "10", "--sigma2", "1.5", "--d", "4").returncode, 2)

    def test_missing_calibration_falls_back(self):
        r = run("bound", "--n", "100", "--sigma2", "0.25", "--d", "4", "--mode", "calibrated",
                env={"KWM_CALIBRATION": "/nonexistent/calibration.json"})
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertIn("warning", r.stderr)
        self.assertEqual(json.loads(r.stdout)["M"], 10.0)


class Exact(unittest.TestCase):
    def check(self, args, expected):
        r = run("exact", *args)
        self.assertEqual(r.returncode, 0, r.stderr)
        out = json.loads(r.stdout)
        jsonschema.validate(out, schema("exact_output"))
        self.assertEqual(out["exact"], expected)

    def test_examples(self):
        self.check(["--dist", "threepoint", "--n", "3", "--d", "4", "--sigma2", "1/2"], "6/1")
        self.check(["--dist", "symbinom", "--n", "2", "--p", "1/2", "--d", "4"], "5/2")
        self.check(["--dist", "het", "--sigma2-list", "1/2,1/3", "--d", "4"], "11/6")

    def test_mismatched_flags(self):
        self.assertEqual(run("exact", "--dist", "het", "--n", "3", "--d", "4", "--sigma2", "1/2").returncode, 2)
        self.assertEqual(run("exact", "--dist", "threepoint", "--n", "3", "--d", "5", "--sigma2", "1/2").returncode, 2)


class Compare(unittest.TestCase):
    def test_json_and_csv(self):
        r = run("compare", "--n", "100", "--d", "4", "--sigma2", "0.25", "--mu", "0.5")
        self.assertEqual(r.returncode, 0, r.stderr)
        out = json.loads(r.stdout)
        jsonschema.validate(out, schema("comparison_row"))
        self.assertEqual(out["best"], "ours")
        with tempfile.TemporaryDirectory() as out:
            path = os.path.join(out, "row.csv")
            r = run("compare", "--n", "100", "--d", "4", "--sigma2", "0.25", "--csv", path)
            self.assertEqual(r.returncode, 0, r.stderr)
            with open(path) as f:
                header, row = f.read().strip().splitlines()
        self.assertEqual(header, "n,d,sigma2,mu,ours,schmidt_raw,schmidt_opt,bellare,bernstein,rosenthal,best")
        self.assertEqual(len(row.split(",")), 11)


class Verify(unittest.TestCase):
    def test_suites_pass(self):
        for suite in ["majorization", "formula", "regimes", "dominance", "symmetrization", "preliminaries"]:
            with self.subTest(suite=suite):
                r = run("verify", "--suite", suite)
                self.assertEqual(r.returncode, 0, r.stdout[-2000:] + r.stderr)
                jsonschema.validate(json.loads(r.stdout), schema("verify_report"))

    def test_corner_fails(self):
        r = run("verify", "--suite", "regimes", "--include-corner")
        self.assertEqual(r.returncode, 1)
        out = json.loads(r.stdout)
        jsonschema.validate(out, schema("verify_report"))
        self.assertGreater(out["failure_count"], 0)

    def test_deterministic(self):
        a = run("verify", "--suite", "majorization", "--seed", "9", "--cases", "60")
        b = run("verify", "--suite", "majorization", "--seed", "9", "--cases", "60")
        self.assertEqual(a.stdout, b.stdout)

    def test_unknown_suite(self):
        self.assertEqual(run("verify", "--suite", "nope").returncode, 2)


class Simulate(unittest.TestCase):
    def config(self, **kw):
        cfg = {"n": 20, "k": 4, "sigma2": 0.5, "p": 23, "trials": 10000, "t_list": [5, 10], "seed": 3}
        cfg.update(kw)
        cfg = {k: v for k, v in cfg.items() if v is not None}
        fd, path = tempfile.mkstemp(suffix=".json")
        with os.fdopen(fd, "w") as f:
            json.dump(cfg, f)
        self.addCleanup(os.remove, path)
        return path

    def test_exhaustive_and_montecarlo(self):
        for mode in ["exhaustive", "monte_carlo"]:
            with self.subTest(mode=mode):
                path = self.config(mode=mode)
                with open(path) as f:
                    jsonschema.validate(json.load(f), schema("simulate_config"))
                r = run("simulate", "--config", path)
                self.assertEqual(r.returncode, 0, r.stderr)
                out = json.loads(r.stdout)
                jsonschema.validate(out, schema("simulate_output"))
                self.assertEqual(out["mode"], mode)
                for row in out["rows"]:
                    self.assertLessEqual(row["empirical"], row["bound"])

    def test_auto_picks_montecarlo_for_large_fields(self):
        r = run("simulate", "--config", self.config(n=100, k=8, p=101, t_list=[30]))
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertEqual(json.loads(r.stdout)["mode"], "monte_carlo")

    def test_byte_identical(self):
        path = self.config(mode="monte_carlo", n=60, k=6, p=61)
        self.assertEqual(run("simulate", "--config", path).stdout, run("simulate", "--config", path).stdout)

    def test_config_errors(self):
        self.assertEqual(run("simulate", "--config", self.config(p=None)).returncode, 2)
        self.assertEqual(run("simulate", "--config", self.config(p=19)).returncode, 2)
        self.assertEqual(run("simulate", "--config", self.config(extra=1)).returncode, 2)
        self.assertEqual(run("simulate", "--config", self.config(mode="monte_carlo", trials=100)).returncode, 2)
        self.assertEqual(run("simulate", "--config", "/nonexistent.json").returncode, 2)

    def test_csv(self):
        with tempfile.TemporaryDirectory() as out:
            path = os.path.join(out, "rows.csv")
            r = run("simulate", "--config", self.config(), "--csv", path)
            self.assertEqual(r.returncode, 0, r.stderr)
            with open(path) as f:
                self.assertEqual(len(f.read().strip().splitlines()), 3)


class Sweep(unittest.TestCase):
    def test_files_and_curves(self):
        with tempfile.TemporaryDirectory() as out:
            r = run("sweep", "--grid", "n=1,4,16;d=2:16:2;sigma2-log2=-20:0:1", "--out", out, "--samples", "400")
            self.assertEqual(r.returncode, 0, r.stderr)
            summary = json.loads(r.stdout)
            jsonschema.validate(summary, schema("sweep_output"))
            for name in summary["files"]:
                self.assertTrue(os.path.exists(os.path.join(out, name)), name)

            surface = read_csv(os.path.join(out, "bound_surface.csv"))
            self.assertEqual(len(surface), 3 * 8 * 21)

            by_a = {}
            for row in read_csv(os.path.join(out, "g_curve.csv")):
                by_a.setdefault(row["a"], []).append(row)
            self.assertTrue(by_a)
            for a, rows in by_a.items():
                qs = [float(x["q"]) for x in rows]
                best = max(rows, key=lambda x: float(x["g"]))
                step = qs[1] - qs[0]
                self.assertLessEqual(abs(float(best["q"]) - math.log(1 / float(a))), step * (1 + 1e-9), a)

            by_d = {}
            for row in read_csv(os.path.join(out, "schmidt_curve.csv")):
                by_d.setdefault(row["d"], []).append(row)
            for d, rows in by_d.items():
                cs = [float(x["C"]) for x in rows]
                best = min(rows, key=lambda x: float(x["bound"]))
                step = cs[1] - cs[0]
                self.assertLessEqual(abs(float(best["C"]) - float(best["C_star"])), step * (1 + 1e-9), d)

    def test_deterministic(self):
        with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
            grid = "n=2,8;d=2:8:2;sigma2-log2=-8:0:2"
            self.assertEqual(run("sweep", "--grid", grid, "--out", a).returncode, 0)
            self.assertEqual(run("sweep", "--grid", grid, "--out", b).returncode, 0)
            for name in sorted(os.listdir(a)):
                with open(os.path.join(a, name), "rb") as x, open(os.path.join(b, name), "rb") as y:
                    self.assertEqual(x.read(), y.read(), name)

    def test_empty_axis(self):
        with tempfile.TemporaryDirectory() as out:
            self.assertEqual(run("sweep", "--grid", "n=;d=2:4:2;sigma2-log2=0", "--out", out).returncode, 2)
            self.assertEqual(run("sweep", "--grid", "n=1;d=6:4:2;sigma2-log2=0", "--out", out).returncode, 2)


class Calibrate(unittest.TestCase):
    def test_refit_matches_shipped(self):
        with tempfile.TemporaryDirectory() as out:
            path = os.path.join(out, "c.json")
            r = run("calibrate", "--out", path, "--date", "2026-10-19")
            self.assertEqual(r.returncode, 0, r.stderr)
            with open(path) as f:
                fresh = json.load(f)
            jsonschema.validate(fresh, schema("calibration"))
            shipped_path = os.path.join(os.path.dirname(SCHEMAS), "..", "data", "calibration.json")
            with open(shipped_path) as f:
                shipped = json.load(f)
            jsonschema.validate(shipped, schema("calibration"))
            self.assertEqual(fresh, shipped)


def main():
    global KWM, SCHEMAS
    parser = argparse.ArgumentParser()
    parser.add_argument("--kwm", required=True)
    parser.add_argument("--schemas", required=True)
    args, rest = parser.parse_known_args()
    KWM, SCHEMAS = args.kwm, args.schemas
    unittest.main(argv=[sys.argv[0], *rest], verbosity=2)


if __name__ == "__main__":
    main()
