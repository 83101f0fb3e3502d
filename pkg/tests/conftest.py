import random
from pathlib import Path
from typing import Generator

import pytest

from lcy_cones.settings import ENV_VAR_MAPPING
from lcy_cones.surfaces import build_family


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path: Path, monkeypatch) -> Generator[Path, None, None]:
    """Point the settings file at a temp dir and clear engine env overrides."""
    config_home = tmp_path / "xdg"
    monkeypatch.setenv("XDG_CONFIG_HOME", str(config_home))
    for env_var in ENV_VAR_MAPPING.values():
        monkeypatch.delenv(env_var, raising=False)
    yield config_home / "lcy_cones" / "config.json"


@pytest.fixture(scope="session")
def m1():
    """n=1, p=(3): nodal cubic with the three flex blowups."""
    return build_family(1, (3,))


@pytest.fixture(scope="session")
def m2():
    return build_family(2, (1, 1))


@pytest.fixture(scope="session")
def m3():
    """n=3, p=(1,1,1): P^2 blown up once on each side of a triangle."""
    return build_family(3, (1, 1, 1))


@pytest.fixture(scope="session")
def m3_222():
    return build_family(3, (2, 2, 2))


@pytest.fixture(scope="session")
def m4():
    return build_family(4, (1, 2, 1, 2))


@pytest.fixture(scope="session")
def m5():
    return build_family(5, (1, 1, 1, 1, 1))


@pytest.fixture(scope="session")
def n6_model():
    return build_family(6, (1, 1, 1, 1, 1, 1))


@pytest.fixture
def rng() -> random.Random:
    """Seeded generator so property checks are deterministic."""
    return random.Random(20240611)
