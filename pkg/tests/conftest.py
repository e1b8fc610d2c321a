import pytest

from lff.experiment import DEFAULT_SPEC, build_datasets
from lff.signal_io import make_speaker_profiles, synth_speaker_utterance


def small_dataset(n_speakers=3, per_speaker=4, duration_s=2.5, seed=0):
    profiles = make_speaker_profiles(n_speakers, seed)
    return [
        (synth_speaker_utterance(p, duration_s, 16000, 1000 * i + u), i)
        for i, p in enumerate(profiles) for u in range(per_speaker)
    ]


@pytest.fixture(scope="session")
def toy_data():
    """The 10-speaker, 20 x 3 s training set plus held-out test utterances and trials."""
    return build_datasets(DEFAULT_SPEC, seed=0)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
