from pathlib import Path

import pytest

from otscontract import parse_spec
from otscontract.codegen import NameTable, TranslationOptions
from otscontract.config import load_config

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "corpus"
FIXTURES = Path(__file__).resolve().parent / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"

ACCOUNT = CORPUS / "account.cafe"
ACCOUNT_SYS = CORPUS / "account_sys.cafe"
CORPUS_CONFIG = CORPUS / "corpus.toml"


def fixture(name: str) -> Path:
    return FIXTURES / name


@pytest.fixture(scope="session")
def account_ms():
    return parse_spec([ACCOUNT])


@pytest.fixture(scope="session")
def corpus_ms():
    return parse_spec([ACCOUNT, ACCOUNT_SYS])


@pytest.fixture(scope="session")
def extra_ms():
    return parse_spec([ACCOUNT, fixture("components.cafe"), fixture("audited_bank.cafe"),
                       fixture("savings.cafe"), fixture("grid.cafe")])


@pytest.fixture(scope="session")
def corpus_options() -> TranslationOptions:
    return load_config(CORPUS_CONFIG).translation_options()


@pytest.fixture
def plain_options() -> TranslationOptions:
    return TranslationOptions(names=NameTable())
