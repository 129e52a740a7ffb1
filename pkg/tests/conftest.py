"""Shared fixtures: discovery reports are expensive, so compute each once."""

import time

import pytest

import isekit as ik


@pytest.fixture(scope="session")
def sound_reports():
    """Sound-mode reports and wall times for the tractable problem sizes."""
    out = {}
    for shape in [(0, 1, 0), (0, 1, 1), (1, 1, 0), (0, 2, 1)]:
        t0 = time.monotonic()
        report = ik.discover(shape, ik.RunConfig(jobs=1))
        out[shape] = (report, time.monotonic() - t0)
    return out
