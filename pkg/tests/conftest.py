import pytest

from disco.oeis import OeisClient
from disco.repl import ReplConfig, ReplState

#: Recorded OEIS search payload for the Catalan prefix (trimmed).
CATALAN_FIXTURE = {
    "results": [
        {
            "number": 108,
            "data": "1,1,2,5,14,42,132,429,1430,4862,16796,58786",
            "name": "Catalan numbers",
        }
    ]
}


def fixture_client(payload):
    return OeisClient(fetch=lambda url: payload)


@pytest.fixture
def state():
    return ReplState(ReplConfig(offline=True))


@pytest.fixture
def state_factory():
    def make(**kwargs):
        kwargs.setdefault("offline", True)
        return ReplState(ReplConfig(**kwargs))

    return make


def load_program(state: ReplState, name: str) -> list:
    import pathlib

    path = pathlib.Path(__file__).resolve().parents[1] / "programs" / name
    return state.load_source(str(path), path.read_text(encoding="utf-8"))
