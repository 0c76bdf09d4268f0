"""Seizure detection in single-channel EEG from quadratic time-frequency features.

Modules:
    signals   analytic signal, DFT, windows, synthetic tones and chirps
    tfd       SWVD / Choi-Williams / spectrogram distributions, PGM output
    features  time, frequency and time-frequency feature families
    bayes     Gaussian Naive Bayes and stratified splitting
    ranking   information-gain ranking
    dataset   Bonn corpus loader and synthetic surrogate corpus
    pipeline  batch stages behind the ``tfseizure`` command
"""

from tfseizure.bayes import GnbModel, SplitSpec, evaluate, fit, predict, split
from tfseizure.dataset import DatasetManifest, load_set, synth_corpus
from tfseizure.features import (FeatureConfig, FeatureMatrix, FeatureVector, extract_all,
                                freq_features, tf_freq_features, tf_time_features, time_features)
from tfseizure.ranking import RankingResult, discretize, info_gain, rank_features
from tfseizure.signals import (AnalyticSignal, EegSegment, WindowSpec, analytic_signal, dft, idft,
                               make_window, synth_lfm_chirp, synth_tone)
from tfseizure.tfd import KernelSpec, TfdMatrix, instantaneous_autocorrelation, qtfd, render_greyscale

__version__ = "0.1.0"
