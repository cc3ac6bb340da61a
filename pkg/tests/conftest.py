"""Session fixtures: the four shipped problem files validated end to end."""

from pathlib import Path
from types import SimpleNamespace

import pytest

from dorex.cli import parse_input
from dorex.extension import validate
from dorex.qalgebra import as_certificate

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
FIXTURE_NAMES = ("example1", "trimmed_kx", "example1_trimmed", "poly3_skew")


def load_spec(name):
    path = FIXTURES / ("%s.dox" % name)
    return parse_input(path.read_text(encoding="utf-8"))


def build_bundle(name):
    spec = load_spec(name)
    A = spec.algebra()
    cert = as_certificate(A, 6)
    ve = validate(A, spec.extension_input(), cert=cert)
    return SimpleNamespace(name=name, spec=spec, A=A, cert=cert, ve=ve)


@pytest.fixture(scope="session")
def example1():
    return build_bundle("example1")


@pytest.fixture(scope="session")
def trimmed_kx():
    return build_bundle("trimmed_kx")


@pytest.fixture(scope="session")
def example1_trimmed():
    return build_bundle("example1_trimmed")


@pytest.fixture(scope="session")
def poly3_skew():
    return build_bundle("poly3_skew")


@pytest.fixture(scope="session")
def bundles(example1, trimmed_kx, example1_trimmed, poly3_skew):
    return (example1, trimmed_kx, example1_trimmed, poly3_skew)
