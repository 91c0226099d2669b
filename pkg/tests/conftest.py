"""Shared fixtures; acceptance criteria print a summary table at the end."""

import os
import time

import pytest

from geodesic_census import (MarkovChainSystem, PressureEvaluator,
                             SurfacePresentation, build_census,
                             build_census_from_system, octagon_representation,
                             schottky_representation, thermo_constants)

BUILD_SECONDS = {}
ACCEPTANCE_LINES = []

ACCEPTANCE_NMAX = 10      # octagon acceptance census
SYNTHETIC_NMAX = 19       # roof-(1,2) acceptance census


def _timed(key, fn):
    t0 = time.monotonic()
    out = fn()
    BUILD_SECONDS[key] = time.monotonic() - t0
    return out


@pytest.fixture(scope="session")
def octagon_rep():
    return octagon_representation()


@pytest.fixture(scope="session")
def octagon_census6(octagon_rep):
    return build_census(SurfacePresentation(genus=2), octagon_rep, 6)


@pytest.fixture(scope="session")
def schottky_census8():
    rep = schottky_representation(3.0)
    return build_census(SurfacePresentation(free_rank=2), rep, 8)


@pytest.fixture(scope="session")
def system_roof12():
    return MarkovChainSystem.full_shift([1.0, 2.0])


@pytest.fixture(scope="session")
def constants_roof12(system_roof12):
    return thermo_constants(PressureEvaluator(system=system_roof12))


@pytest.fixture(scope="session")
def synthetic_census19(system_roof12):
    return _timed("synthetic19",
                  lambda: build_census_from_system(system_roof12,
                                                   SYNTHETIC_NMAX))


@pytest.fixture(scope="session")
def octagon_census10(octagon_rep):
    workers = os.cpu_count() or 1
    return _timed("octagon10",
                  lambda: build_census(SurfacePresentation(genus=2),
                                       octagon_rep, ACCEPTANCE_NMAX,
                                       workers=workers))


@pytest.fixture(scope="session")
def octagon_constants10(octagon_census10):
    pe = PressureEvaluator(census=octagon_census10)
    return _timed("octagon10_constants", lambda: thermo_constants(pe))


def record_criterion(num: str, ok: bool, detail: str):
    line = f"ACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
    for key, secs in BUILD_SECONDS.items():
        terminalreporter.write_line(f"build[{key}] = {secs:.1f}s")
