import pytest

from dsdomain.harness.sweeps import SUITES, run_suite


@pytest.mark.parametrize("suite", sorted(SUITES))
def test_suites_pass(suite):
    report = run_suite(suite, 5, 0)
    assert report.ok, report.failures
    assert report.trials == 5


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope", 1, 0)


def test_seeded_runs_repeat():
    assert run_suite("lipschitz", 5, 7) == run_suite("lipschitz", 5, 7)
