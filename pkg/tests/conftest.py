from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def repo_root() -> Path:
    return REPO_ROOT


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    path = REPO_ROOT / "fixtures"
    if not path.exists():
        pytest.skip("bundled fixture missing; run scripts/make_fixture.py")
    return path
