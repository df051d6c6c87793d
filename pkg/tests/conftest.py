import pytest
from hypothesis import HealthCheck, settings

from tempfair import _kernels

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(params=_kernels.available_backends())
def backend(request):
    previous = _kernels.use_backend(request.param)
    yield request.param
    _kernels.use_backend(previous)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[number])
