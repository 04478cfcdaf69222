"""Runs every CLI task on a small configuration, validates metrics.json, and
checks the exit codes and error document of a bad configuration."""
import json
import pathlib
import shutil
import subprocess
import sys

cli, schema, validator, work = sys.argv[1:5]
work = pathlib.Path(work)
shutil.rmtree(work, ignore_errors=True)
work.mkdir(parents=True)

config = {
    "data": {"dimension": 4, "samples": 240},
    "train": {"Q": 6, "adaboost_patience": 20},
    "compare": {"seeds": 2},
    "sweep": {"seeds": 2, "Q_values": [4, 6]},
    "gap": {"qubits": 4},
    "scaling": {"qubits": [3, 4], "runs": 2},
}
(work / "config.json").write_text(json.dumps(config))

metrics = []
for task in ["gen-data", "train", "compare", "sweep-overlap", "gap-analysis", "scaling"]:
    out = work / task
    subprocess.run([cli, task, "--config", str(work / "config.json"), "--out", str(out), "--seed", "5"], check=True)
    metrics.append(str(out / "metrics.json"))
subprocess.run([sys.executable, validator, schema, *metrics], check=True)

(work / "bad.json").write_text(json.dumps({"train": {"Q": 10**6, "mode": "x"}, "extra": 1}))
bad = subprocess.run([cli, "train", "--config", str(work / "bad.json"), "--out", str(work / "bad")],
                     capture_output=True, text=True)
assert bad.returncode == 2, bad.returncode
doc = json.loads(bad.stderr)
assert doc == json.loads((work / "bad" / "error.json").read_text())
assert doc["error"]["kind"] == "config"
assert len(doc["error"]["messages"]) == 3, doc

defaults = subprocess.run([cli, "scaling", "--print-defaults"], capture_output=True, text=True, check=True)
assert json.loads(defaults.stdout)["task"] == "scaling"
print("cli schema checks passed")
