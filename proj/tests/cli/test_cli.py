# Copyright (C) 2026 The cubeprog Authors
# SPDX-License-Identifier: Apache-2.0
"""End-to-end checks of the cubeprog executable.

Usage: test_cli.py <cubeprog binary> <repo root>
"""

import json
import os
import shutil
import struct
import subprocess
import sys
import tempfile
import unittest

import jsonschema

CLI = None
ROOT = None
PIPELINE = [
    "gen-scenes", "gen-rel-data", "train-rel", "enum-programs", "train-prog",
    "gen-exec-data", "train-exec", "infer", "execute",
]


def run(cmd, config=None, out=None, seed=None):
    args = [CLI, cmd]
    if config:
        args += ["--config", config]
    if out:
        args += ["--out", out]
    if seed is not None:
        args += ["--seed", str(seed)]
    return subprocess.run(args, capture_output=True, text=True)


def config(name):
    return os.path.join(ROOT, "configs", name)


def load(path):
    with open(path) as f:
        return json.load(f)


def validate(doc, schema_name):
    schema = load(os.path.join(ROOT, "schemas", schema_name + ".schema.json"))
    jsonschema.Draft202012Validator(schema).validate(doc)


class CliTest(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp(prefix="cubeprog-cli-")

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def out(self, name):
        return os.path.join(self.tmp, name)

    def write(self, name, doc):
        path = self.out(name)
        with open(path, "w") as f:
            json.dump(doc, f)
        return path

    def chain(self, out):
        for cmd in PIPELINE:
            r = run(cmd, config("quick.json"), out)
            self.assertEqual(r.returncode, 0, cmd + ": " + r.stderr)
        samples = {"samples": [{"d": 1.0, "hullArea": 400.0}, {"d": 30.0, "hullArea": 100.0}],
                   "detections": [True, False, True]}
        with open(os.path.join(out, "samples.json"), "w") as f:
            json.dump(samples, f)
        r = run("evaluate", config("quick.json"), out)
        self.assertEqual(r.returncode, 0, r.stderr)

    def test_pipeline_sentence_and_success(self):
        d = self.out("demo")
        self.assertEqual(run("gen-scenes", config("demo_stack.json"), d).returncode, 0)
        r = run("pipeline", config("demo_stack.json"), d)
        self.assertEqual(r.returncode, 0, r.stderr)
        lines = r.stdout.splitlines()
        self.assertEqual(lines[0], "Place the red cube on the green cube, then place the "
                                   "blue cube on the red cube.")
        report = load(os.path.join(d, "pipeline.json"))
        self.assertTrue(report["run"]["success"])
        validate(report, "pipeline")

    def test_flat_scene_infers_nothing(self):
        d = self.out("flat")
        self.assertEqual(run("gen-scenes", config("demo_flat.json"), d).returncode, 0)
        r = run("infer", config("demo_flat.json"), d)
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertEqual(r.stdout.strip(), "Do nothing.")
        validate(load(os.path.join(d, "infer.json")), "infer")
        validate(load(os.path.join(d, "program.json")), "program")

    def test_forced_failure_exhausts_steps(self):
        d = self.out("fail")
        self.assertEqual(run("gen-scenes", config("demo_stack.json"), d).returncode, 0)
        self.assertEqual(run("infer", config("demo_stack.json"), d).returncode, 0)
        r = run("execute", config("forced_failure.json"), d)
        self.assertEqual(r.returncode, 4)
        report = load(os.path.join(d, "execute.json"))
        self.assertFalse(report["run"]["success"])
        self.assertEqual(len(report["run"]["trace"]), 10)
        validate(report, "execute")
        with open(os.path.join(d, report["traceFile"])) as f:
            entries = [json.loads(line) for line in f]
        self.assertEqual(entries, report["run"]["trace"])
        for e in entries:
            validate(e, "trace-entry")
            self.assertIn("action_failed", e["faultEvents"])
        timeline = r.stdout.splitlines()
        self.assertEqual(len(timeline), 11)
        self.assertTrue(all("!action_failed" in line for line in timeline[:10]))

    def test_every_report_matches_its_schema(self):
        d = self.out("all")
        self.chain(d)
        for cmd in PIPELINE + ["evaluate"]:
            validate(load(os.path.join(d, cmd + ".json")), cmd)
        validate(load(os.path.join(d, "scene_0000.json")), "scene")
        for data in ["rel_data.jsonl", "programs.jsonl", "exec_data.jsonl"]:
            with open(os.path.join(d, data)) as f:
                validate(json.loads(f.readline()), "dataset-header")

    def test_evaluate_kinds(self):
        d = self.out("eval")
        self.chain(d)
        for kind in ["rel", "program", "exec"]:
            cfg = load(config("quick.json"))
            cfg["evaluate"] = {"kind": kind}
            r = run("evaluate", self.write(kind + ".json", cfg), d)
            self.assertEqual(r.returncode, 0, r.stderr)
            report = load(os.path.join(d, "evaluate.json"))
            self.assertEqual(report["kind"], kind)
            validate(report, "evaluate")

    def test_byte_identical_reruns(self):
        a, b = self.out("a"), self.out("b")
        self.chain(a)
        self.chain(b)
        for name in sorted(os.listdir(a)):
            with open(os.path.join(a, name), "rb") as fa, open(os.path.join(b, name), "rb") as fb:
                self.assertEqual(fa.read(), fb.read(), name)

    def test_seed_flag_overrides_config(self):
        a, b = self.out("a"), self.out("b")
        run("gen-scenes", config("quick.json"), a, seed=1)
        run("gen-scenes", config("quick.json"), b, seed=2)
        self.assertEqual(load(os.path.join(a, "gen-scenes.json"))["seed"], 1)
        self.assertNotEqual(load(os.path.join(a, "scene_0000.json")),
                            load(os.path.join(b, "scene_0000.json")))

    def test_exit_codes(self):
        bad = self.write("bad.json", {"sceneCount": 3})
        self.assertEqual(run("gen-scenes", bad, self.out("x")).returncode, 2)
        self.assertEqual(run("infer", None, self.out("missing")).returncode, 3)

        d = self.out("fmt")
        os.makedirs(d)
        with open(os.path.join(d, "scene_0000.json"), "w") as f:
            f.write("{not json")
        self.assertEqual(run("infer", None, d).returncode, 3)

        d = self.out("ver")
        self.assertEqual(run("gen-scenes", config("demo_stack.json"), d).returncode, 0)
        scene = load(os.path.join(d, "scene_0000.json"))
        scene["version"] = 99
        with open(os.path.join(d, "scene_0000.json"), "w") as f:
            json.dump(scene, f)
        self.assertEqual(run("infer", None, d).returncode, 5)

    def test_weight_version_mismatch(self):
        d = self.out("w")
        for cmd in ["gen-rel-data", "train-rel", "gen-scenes"]:
            self.assertEqual(run(cmd, config("quick.json"), d).returncode, 0)
        path = os.path.join(d, "rel.dnet")
        with open(path, "r+b") as f:
            f.seek(4)
            f.write(struct.pack("<I", 99))
        r = run("infer", config("quick.json"), d)
        self.assertEqual(r.returncode, 5, r.stderr)


if __name__ == "__main__":
    CLI, ROOT = sys.argv[1], sys.argv[2]
    unittest.main(argv=[sys.argv[0]], verbosity=2)
