import os

import pytest

from relroots.kncache import KnCache, set_default_cache

# criterion number -> (passed, detail); filled in by tests/test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}

ACCEPTANCE_TITLES = {
    1: "oracle equivalence (brute = deletion-contraction = structural)",
    2: "split-reliability equivalence for K_n, n <= 7",
    3: "composition formula for C_m[K_{n+1}]",
    4: "subdivision identity and Mobius image",
    5: "a_n / b_n inequalities, n <= 100",
    6: "convergence alpha_n, beta_n at rho = 0.5",
    7: "Gilbert expansion constant at q = 0.4",
    8: "sign law at q = -1",
    9: "accumulation at -1 (q = -0.6 and -0.9)",
    10: "complex density grid (24 targets)",
    11: "real density targets",
    12: "roots of Rel(K_25)",
    13: "Monte Carlo consistency",
}


@pytest.fixture(scope="session", autouse=True)
def shared_cache(tmp_path_factory):
    """One K_n cache per session; set RELROOTS_TEST_CACHE to reuse a directory across runs."""
    directory = os.environ.get("RELROOTS_TEST_CACHE") or tmp_path_factory.mktemp("kn-cache")
    cache = KnCache(directory)
    set_default_cache(cache)
    return cache


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_TITLES):
        if k not in ACCEPTANCE:
            terminalreporter.write_line(f"criterion {k:>2}: NOT RUN  {ACCEPTANCE_TITLES[k]}")
            continue
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {ACCEPTANCE_TITLES[k]} -- {detail}")
