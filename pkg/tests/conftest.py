import numpy as np
import pytest

from gmpb.landscape import Component, ProblemInstance, SeverityBundle, SubFunction

ZERO_SEVERITY = SeverityBundle(shift=0.0, height=0.0, width=0.0, angle=0.0, tau=0.0, eta=0.0)
SOME_SEVERITY = SeverityBundle(shift=2.0, height=7.0, width=1.0, angle=0.3, tau=0.1, eta=2.0)


def cone(center, height, width=1.0, tau=0.0, eta=(0.0, 0.0, 0.0, 0.0), rotation=None, angle=0.0):
    center = np.atleast_1d(np.asarray(center, dtype=float))
    d = len(center)
    widths = np.broadcast_to(np.asarray(width, dtype=float), (d,)).copy()
    rot = np.eye(d) if rotation is None else rotation
    return Component(center=center, height=height, widths=widths, angle=angle, rotation=rot, tau=tau, eta=np.array(eta))


def subfunction(indices, comps, weight=1.0, severities=ZERO_SEVERITY):
    return SubFunction(variable_indices=list(indices), components=list(comps), weight=weight, severities=severities)


def problem(subs, dimension=None):
    d = dimension if dimension is not None else sum(sf.dimension for sf in subs)
    return ProblemInstance(dimension=d, sub_functions=list(subs))


@pytest.fixture
def two_peak_problem():
    """Two 1-D sub-functions (2 and 3 cones), unit weights."""
    f1 = subfunction([0], [cone(-20.0, 70.0), cone(25.0, 50.0)])
    f2 = subfunction([1], [cone(-30.0, 40.0), cone(0.0, 60.0), cone(35.0, 45.0)])
    return problem([f1, f2])


# one line per acceptance criterion, printed after the run
_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    outcome = "PASS" if call.excinfo is None else "FAIL"
    details = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    _ACCEPTANCE[number] = (title + (f" [{details}]" if details else ""), outcome)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, outcome = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d} {outcome}: {title}")
