"""Shared test fixtures."""

import pytest
from mpmath import mp


@pytest.fixture(autouse=True)
def _restore_precision():
    """Leave the global mpmath precision the way each test found it."""
    saved = mp.dps
    yield
    mp.dps = saved
