import numpy as np
import pytest

from acide import Cluster, Peer, StreamParams

KBPS = 1e3


def random_cluster(rng, n, u_range=(5 * KBPS, 200 * KBPS), T=0.2, load=None):
    """A cluster satisfying both capacity assumptions with a feasible stream.

    ``load`` is S/T as a fraction of the mean upload; drawn from (0.05, 1] when omitted.
    """
    u = rng.uniform(*u_range, size=n)
    d = rng.uniform(u.max(), 3 * u.max(), size=n)
    ratio = (load if load is not None else rng.uniform(0.05, 1.0)) * u.mean()
    peers = tuple(Peer(i + 1, float(di), float(ui)) for i, (ui, di) in enumerate(zip(u, d)))
    return Cluster(peers, StreamParams.from_ratio(ratio, T))


@pytest.fixture
def worked_cluster():
    """Five peers, T = 200 ms, S/T = 10 kbps, uploads 15..20 kbps, downloads 20 kbps."""
    uploads = [15, 17, 18, 19, 20]
    peers = tuple(Peer(i + 1, 20 * KBPS, u * KBPS) for i, u in enumerate(uploads))
    return Cluster(peers, StreamParams(2000.0, 0.2))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


_CRITERIA = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.split("::")[-1]
    if "test_acceptance.py" not in report.nodeid or not name.startswith("test_criterion_"):
        return
    if report.when == "call" or report.failed:
        number = int(name.split("_")[2])
        _CRITERIA[number] = _CRITERIA.get(number, True) and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if _CRITERIA[number] else 'FAIL'}")
