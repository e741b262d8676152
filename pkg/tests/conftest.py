import pytest

from vlcloc.dataset import generate_campaign
from vlcloc.scenario import preset


@pytest.fixture(scope="session")
def small_ds():
    """Two runs of the 81-LED room on a 1 m receiver grid (162 rows)."""
    return generate_campaign(preset("vlc81", grid_spacing=1.0, n_runs=2, base_seed=3))


@pytest.fixture(scope="session")
def small_wifi():
    return generate_campaign(preset("wifi", grid_spacing=1.0, n_runs=2, base_seed=3))


ACCEPTANCE = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE:
        terminalreporter.write_line(line)
