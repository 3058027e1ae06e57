"""Reference model server for the margattr wire protocol."""

from .backend import ModelBackend
from .config import ServerConfig, load_config
from .fixtures import FixtureReport, golden_fixture_check

__version__ = "0.1.0"

__all__ = [
    "FixtureReport",
    "ModelBackend",
    "ServerConfig",
    "golden_fixture_check",
    "load_config",
]
