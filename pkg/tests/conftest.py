import pytest

from hybrid_cycle.model import ModelParams


def fig2_params(beta=0.8, **kw):
    values = dict(beta=beta, delta1=0.5, delta2=1.5, r=0.03, t_s=0.5, T=1.0, x0=0.0)
    values.update(kw)
    return ModelParams(**values)


@pytest.fixture
def fig2a():
    return fig2_params(0.8)


@pytest.fixture
def fig2b():
    return fig2_params(1.0)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[key])
