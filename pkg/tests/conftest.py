from pathlib import Path

import numpy as np
import pytest

from voicecrypt.audio import WORKING_RATE, Signal, write_wav
from voicecrypt.keys import derive_keys
from voicecrypt.synth import speaker_corpus, synthetic_voice

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def keys():
    return derive_keys("Djyot!24")


@pytest.fixture(scope="session")
def other_keys():
    return derive_keys("Ab#12xyz")


@pytest.fixture(scope="session")
def voice():
    return synthetic_voice(130.0, duration=1.0, seed=3)


@pytest.fixture(scope="session")
def voice_wav(tmp_path_factory, voice):
    path = tmp_path_factory.mktemp("wav") / "voice.wav"
    write_wav(voice, path)
    return path


@pytest.fixture(scope="session")
def corpus():
    return speaker_corpus()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_signal(rng, n=WORKING_RATE):
    x = rng.uniform(-1.0, 1.0, n)
    return Signal(x / np.max(np.abs(x)), WORKING_RATE)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "VERDICTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
