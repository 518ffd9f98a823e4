import numpy as np
import pytest

from multibarrier import INFINITE, SpectrumConfig, find_levels, make_geometry

ACCEPTANCE_LINES = []

L, V, C = 20.0, 60.0, 90.0


def record(criterion, passed, detail):
    line = f"criterion {criterion:>3}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


@pytest.fixture(scope="session")
def cfg():
    return SpectrumConfig()


_SPECTRA = {}


def spectrum_for(N, c, config=None, v=V):
    config = config or SpectrumConfig()
    key = (str(N), c, v, tuple(sorted(config.to_dict().items())))
    if key not in _SPECTRA:
        _SPECTRA[key] = find_levels(make_geometry(L, N, c, v, allow_free=(v == 0)), config)
    return _SPECTRA[key]


@pytest.fixture(scope="session")
def spectra():
    return spectrum_for


@pytest.fixture
def rng():
    return np.random.default_rng(20260416)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


__all__ = ["INFINITE", "record", "spectrum_for"]
