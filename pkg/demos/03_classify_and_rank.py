# %% [markdown]
# # Naive Bayes accuracy and information-gain ranking
#
# We generate the surrogate corpus (the Bonn recordings are not shipped),
# extract TF features with the spectrogram kernel, and evaluate a Gaussian
# naive Bayes classifier over ten stratified 30/70 splits.
# A smaller kernel (63 lags, 128 bins) keeps this under a minute.

# %%
import numpy as np

from tfseizure import FeatureConfig, KernelSpec, SplitSpec, evaluate, fit, rank_features, split, synth_corpus
from tfseizure.features import BEST4_TF, TF
from tfseizure.pipeline import extract_features

segments = synth_corpus(seed=0, per_class=30)
kernel = KernelSpec("spec", lag_window_length=63, fft_length=128)
matrix = extract_features(segments, kernel, FeatureConfig(tf_flux_lag=128), TF)
print(matrix.X.shape, matrix.classes)

# %%
accuracies = []
for seed in range(10):
    train, test = split(matrix, SplitSpec(0.3, seed))
    report = evaluate(fit(train), test)
    accuracies.append(report.accuracy)
print(f"all 16 TF features: {np.mean(accuracies):.3%} +- {np.std(accuracies):.3%}")
print("confusion matrix of the last split (rows = truth):")
print(report.confusion)

# %% [markdown]
# Ranking uses equal-width 10-bin discretization and information gain in bits.

# %%
ranking = rank_features(matrix)
for name, ig in ranking.entries[:6]:
    print(f"{name:6s} {ig:.4f} bits")

best = matrix.select(BEST4_TF)
acc = [evaluate(fit(tr), te).accuracy for tr, te in (split(best, SplitSpec(0.3, s)) for s in range(10))]
print(f"{{{', '.join(BEST4_TF)}}}: {np.mean(acc):.3%}")
