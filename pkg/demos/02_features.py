# %% [markdown]
# # The 33 features
#
# Four families are computed per segment: ten time-domain statistics of the
# envelope ``|z|`` (TiF1-10), seven spectral descriptors (FrF1-7), and nine
# plus seven statistics of the TFD matrix itself (TiTF1-9, FrTF1-7).
# The two feature sets used for classification are TIME_FREQ (17) and TF (16).

# %%
import numpy as np

from tfseizure import KernelSpec, extract_all, synth_corpus
from tfseizure.features import TF, TIME_FREQ

corpus = synth_corpus(seed=1, per_class=2)
healthy, seizure = corpus[0], corpus[2]
for seg in (healthy, seizure):
    tf = extract_all(seg, KernelSpec.swvd(), family_set=TF)
    print(seg.source_id, seg.label)
    for name in ("TiTF1", "TiTF2", "TiTF8", "FrTF2", "FrTF4"):
        print(f"    {name:6s} {tf[name]: .6g}")

# %% [markdown]
# Dimensionless features do not care about amplitude: scaling the signal by 10
# leaves the spectral centroid, roll-off, flatness and entropy alone, while the
# envelope mean scales by 10.

# %%
a = extract_all(healthy, family_set=TIME_FREQ)
b = extract_all(type(healthy)(10 * healthy.samples, healthy.sample_rate_hz), family_set=TIME_FREQ)
for name in ("TiF1", "FrF4", "FrF5", "FrF6", "FrF7"):
    print(f"{name:5s} ratio {b[name] / a[name]:.12f}")

# The whole vector as an array, in catalog order.
print(np.round(a.as_array(), 4))
