from functools import lru_cache

import pytest

from solkit.groups import build_group
from solkit.solubilizer import all_overgroups, all_records


@lru_cache(maxsize=None)
def group(spec):
    return build_group(spec)


@lru_cache(maxsize=None)
def records(spec, mode=None):
    return tuple(all_records(group(spec), mode))


@lru_cache(maxsize=None)
def overgroups(spec):
    return all_overgroups(group(spec), list(records(spec)))


def record_by_order(spec, k, normalizer=None):
    for r in records(spec):
        if r.element_order == k and (normalizer is None or r.normalizer_order == normalizer):
            return r
    raise LookupError((spec, k, normalizer))


@pytest.fixture(scope="session")
def cache():
    class Cache:
        pass

    c = Cache()
    c.group, c.records, c.overgroups, c.record_by_order = group, records, overgroups, record_by_order
    return c


# acceptance verdicts, printed once at the end of the session
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {text}")
