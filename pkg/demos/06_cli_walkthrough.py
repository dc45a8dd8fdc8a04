"""Driving the command-line tool from a JSON configuration.

Run: python demos/06_cli_walkthrough.py
"""
import json
import os
import subprocess
import sys
import tempfile

config = """
# 40 mm type-II crystal, moderately focused collection
{
  "source": {"matching": "type2", "xi": [1.0, 2.0, 2.0]},
  "filter": {"kind": "rect", "width": 40.0, "center": -2.0},
  // coarse sweep for a quick look
  "sweep": {"log_xi": [-1.0, 1.0], "step": 0.1}
}
"""

with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "run.json")
    with open(path, "w") as fh:
        fh.write(config)
    for sub in ("spectrum", "sweep", "tradeoff"):
        out = os.path.join(tmp, sub)
        # equivalent to: spdcmodes <sub> --config run.json --out <dir> --threads 2
        subprocess.run([sys.executable, "-m", "spdcmodes.cli", sub, "--config", path,
                        "--out", out, "--threads", "2"], check=True)
        for name in sorted(os.listdir(out)):
            with open(os.path.join(out, name)) as fh:
                head = fh.read(400)
            print(f"--- {sub}/{name}\n{head.splitlines()[0]}\n{head.splitlines()[1]}")

    # configuration errors come back as a JSON record and exit status 2
    bad = os.path.join(tmp, "bad.json")
    with open(bad, "w") as fh:
        fh.write('{"source": {"xi": 1, "wasit": 2e-4}}')
    proc = subprocess.run([sys.executable, "-m", "spdcmodes.cli", "spectrum", "--config", bad,
                           "--out", os.path.join(tmp, "bad")], capture_output=True, text=True)
    print("exit", proc.returncode, json.loads(proc.stderr)["message"])
