import json
from pathlib import Path

import pytest

from lrst.adapters import MockAdapter
from lrst.corpus import load_corpus

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def metric_fixtures() -> list[dict]:
    out = []
    for path in sorted(FIXTURES.glob("metric_corpus_*.json")):
        data = json.loads(path.read_text(encoding="utf-8"))
        data["name"] = path.stem
        out.append(data)
    return out


@pytest.fixture(scope="session")
def mock_adapter() -> MockAdapter:
    return MockAdapter.from_file(FIXTURES / "mock_adapter.json")


@pytest.fixture(scope="session")
def pipeline_corpus():
    return load_corpus(
        FIXTURES / "pipeline_20.jsonl",
        "jsonl",
        name="pipeline-fixture",
        split="test",
        src_lang="bem",
        tgt_lang="eng",
    )


@pytest.fixture(scope="session")
def mono_corpus():
    return load_corpus(
        FIXTURES / "tatoeba_mini.jsonl",
        "jsonl",
        name="tatoeba-mini",
        split="train",
        src_lang="eng",
        tgt_lang="eng",
    )
