import pytest

from ktuple.primes import sieve


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("ktuple-cache")


@pytest.fixture(scope="session")
def table(cache_dir):
    return sieve(2 * 10**6, cache_dir=cache_dir)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
