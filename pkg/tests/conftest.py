import pytest

from tfseizure.dataset import synth_corpus
from tfseizure.pipeline import RunConfig


SMALL_N = 256


@pytest.fixture(scope="session")
def small_corpus():
    """12 short surrogate segments (6 per class), cheap enough for the pipeline tests."""
    return synth_corpus(seed=5, per_class=6, n_samples=SMALL_N)


@pytest.fixture
def small_config(tmp_path):
    return RunConfig.from_mapping({
        "output_dir": str(tmp_path / "out"),
        "lag_window_length": 31,
        "fft_length": 64,
        "flux_frame_length": 64,
        "tf_flux_lag": 16,
        "spectrum_bins": 64,
        "n_seeds": 3,
    })


_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


@pytest.fixture
def acceptance_log(request):
    """Record one ``criterion status detail`` line for the end-of-run summary."""
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def log(number, status, detail):
        lines.append(f"criterion {number:2d}: {status:4s}  {detail}")
    return log


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
