import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from hypmoments import curves, ffield, theory

_CACHE = Path(
    os.environ.get("HYPMOMENTS_TEST_CACHE", Path(__file__).resolve().parent.parent / ".sweep-cache")
)


@pytest.fixture(scope="session")
def cache_dir() -> Path:
    _CACHE.mkdir(parents=True, exist_ok=True)
    return _CACHE


@pytest.fixture(scope="session")
def threads() -> int:
    return curves.resolve_threads("auto")


@pytest.fixture(scope="session")
def ctx10007():
    return ffield.build_field(10007)


@pytest.fixture(scope="session")
def sweeps_10007(cache_dir, threads):
    """Sweeps of every builtin family at p = 10007, cached on disk across runs."""
    out = {}
    for name in ("legendre", "d3", "d4", "d6", "clausen"):
        fam = curves.builtin_family(name)
        out[name] = curves.ensure_sweep(fam, 10007, cache_dir, threads=threads)
    out["legendre_neg"] = curves.ensure_negated_sweep(
        curves.builtin_family("legendre"), 10007, cache_dir, threads=threads
    )
    return out


@pytest.fixture(scope="session")
def legendre_100003(cache_dir, threads):
    fam = curves.builtin_family("legendre")
    plus = curves.ensure_sweep(fam, 100003, cache_dir, threads=threads)
    minus = curves.ensure_negated_sweep(fam, 100003, cache_dir, threads=threads)
    return plus, minus


@pytest.fixture(scope="session")
def transform_report():
    return theory.meijer_transform_checks()
