import pytest

from rrshift import ParticleParams, StaticPotentialSpec, TimePotentialSpec, integrate_trajectory

PARAMS = ParticleParams(m=1.0, alpha_c=1e-3)
STATIC = StaticPotentialSpec(V0=0.3, Z1=2.0, Z2=1.0)
TIMEDEP = TimePotentialSpec(V_plateau=0.3, t_on=-3.0, t_off=-1.0)


@pytest.fixture(scope="session")
def params():
    return PARAMS


@pytest.fixture(scope="session")
def static_traj():
    return integrate_trajectory(PARAMS, STATIC, 1.5)


@pytest.fixture(scope="session")
def time_traj():
    return integrate_trajectory(PARAMS, TIMEDEP, 1.5)


@pytest.fixture(scope="session")
def free_traj():
    return integrate_trajectory(PARAMS, StaticPotentialSpec(V0=0.0, Z1=2.0, Z2=1.0), 1.5)


_ACCEPTANCE = []


@pytest.fixture
def criterion(request):
    """Collect one PASS/FAIL line per acceptance criterion for the summary."""
    def report(number, title, passed, detail, seconds):
        _ACCEPTANCE.append((number, title, passed, detail, seconds))
        print(f"criterion {number} {'PASS' if passed else 'FAIL'}: {title}: {detail} [{seconds:.1f} s]")
    return report


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail, seconds in sorted(_ACCEPTANCE):
        terminalreporter.write_line(
            f"{'PASS' if passed else 'FAIL'}  {number}. {title}: {detail} [{seconds:.1f} s]"
        )
