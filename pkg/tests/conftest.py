import random

import pytest

from hesuite import params_from_primes

TOY_P, TOY_Q = 7, 11
TOY_N = TOY_P * TOY_Q
TOY_NSQ = TOY_N * TOY_N
TOY_ORDER = 7 * 3 * 11 * 5  # p * p' * q * q', frozen from the brute-force oracle


ACCEPTANCE_LINES: list[str] = []


def record_criterion(line: str) -> None:
    """Collect acceptance gate verdicts for the end-of-run summary."""
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


@pytest.fixture(scope="session")
def toy():
    """Toy parameters over N = 77; deterministic generator via fixed seed."""
    pp, mk = params_from_primes(TOY_P, TOY_Q, random.Random(42))
    return pp, mk
