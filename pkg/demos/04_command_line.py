# %% [markdown]
# # Batch pipeline from the command line
#
# The ``tfseizure`` command (also ``python3 -m tfseizure``) chains the stages
# through CSV files. This script drives it on a small surrogate corpus; on the
# real Bonn data, write a manifest such as
#
#     root = /data/bonn
#     set.A = Z
#     set.E = S
#
# and pass ``--manifest`` instead of running ``synth``.

# %%
import subprocess
import sys
import tempfile
from pathlib import Path

work = Path(tempfile.mkdtemp(prefix="tfseizure-demo-"))
small = ["--lag-window", "63", "--fft-length", "128", "--n-seeds", "5", "--output-dir", str(work / "out")]


def tfseizure(*args):
    cmd = [sys.executable, "-m", "tfseizure", *map(str, args)]
    print("$ tfseizure", " ".join(map(str, args)))
    out = subprocess.run(cmd, capture_output=True, text=True)
    print(out.stdout + out.stderr)
    return out.stdout.split()


# %%
manifest = tfseizure("synth", "--out", work / "corpus", "--per-class", 15)[0]
(work / "run.cfg").write_text(f"manifest = {manifest}\nkernels = swvd,spec\ntf_flux_lag = 128\n")
csvs = tfseizure("extract", "--config", work / "run.cfg", *small)

# %%
tfseizure("evaluate", "--config", work / "run.cfg", *small, *csvs)
tfseizure("rank", "--config", work / "run.cfg", *small, csvs[1])
tfseizure("histogram", "--config", work / "run.cfg", *small, csvs[1], "TiTF1")
tfseizure("render", "--config", work / "run.cfg", *small, "--segment", "E/synthetic000")

# %% [markdown]
# Errors come back as one parsable line and a nonzero exit status.

# %%
tfseizure("rank", work / "missing.csv")
