from __future__ import annotations

import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
FIXTURE_DIR = TESTS_DIR / "fixtures" / "jls"
GOLDEN_DIR = TESTS_DIR / "fixtures" / "golden"

sys.path.insert(0, str(TESTS_DIR))

# Identity inputs per fixture law file.
FIXTURE_IDENTITIES = {
    "law01_jp_minimal.xml": dict(country="jp", date="1896-04-27", number="89",
                                 language="ja", version_date="2020-04-01"),
    "law02_jp_parts.xml": dict(country="jp", date="2000-05-12", number="61",
                               language="ja", version_date="2020-04-01"),
    "law03_jp_items.xml": dict(country="jp", date="1962-06-01", number="121",
                               language="ja", version_date="2021-09-01"),
    "law04_jp_sections.xml": dict(country="jp", date="2005-07-26", number="86",
                                  language="ja", version_date="2019-01-01"),
    "law05_jp_peripheral.xml": dict(country="jp", date="2021-05-19", number="36",
                                    language="ja", version_date="2022-04-01"),
    "law06_kr_basic.xml": dict(country="kr", date="1958-02-22", number="471",
                               language="ko", version_date="2020-01-01"),
    "law07_kr_items.xml": dict(country="kr", date="1957-10-05", number="220",
                               language="ko", version_date="2018-03-01"),
    "law08_fr_basic.xml": dict(country="fr", date="1804-03-21", number="1804-03-21",
                               language="fr", version_date="2020-01-01"),
    "law09_fr_sections.xml": dict(country="fr", date="1955-04-01", number="55",
                                  language="fr", version_date="2016-10-01"),
    "law10_jp_long.xml": dict(country="jp", date="2017-06-02", number="44",
                              language="ja", version_date="2020-04-01"),
}

FIXTURE_NAMES = sorted(FIXTURE_IDENTITIES)


def load_fixture_text(name: str) -> str:
    return (FIXTURE_DIR / name).read_text(encoding="utf-8")


def parse_fixture(name: str):
    from lexbridge.jls import parse_jls

    return parse_jls(load_fixture_text(name))


def convert_fixture(name: str):
    from lexbridge.akn import convert

    return convert(parse_fixture(name), FIXTURE_IDENTITIES[name])


@pytest.fixture(scope="session")
def all_converted():
    """Every fixture law converted to AKN, keyed by file name."""
    return {name: convert_fixture(name) for name in FIXTURE_NAMES}


@pytest.fixture(scope="session")
def synthetic_run(tmp_path_factory):
    """One completed cmd_all run over the bundled 3-country fixture.

    Returns (config_path, output_dir). Several tests read its artifacts.
    """
    from lexbridge.cli import main

    import fixture_gen

    root = tmp_path_factory.mktemp("synthetic")
    config_path = fixture_gen.write_three_country_fixture(root)
    rc = main(["all", "--config", str(config_path)])
    assert rc == 0
    return config_path, root / "out"
