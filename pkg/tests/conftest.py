import pytest

import linkmeans.baselines
import linkmeans.cli
import linkmeans.clustering
import linkmeans.synth

# Every clustering run in the suite is checked for the partition, unit-norm
# and threshold invariants; RUN_LOG feeds acceptance criterion 3.
RUN_LOG = {"runs": 0, "violations": []}
CRITERIA = {}

_original_assign = linkmeans.clustering.assign_documents
_original_baseline = linkmeans.baselines.cluster_with_baseline


def _checked_assign(vectors, seeds, params=linkmeans.clustering.ClusterParams()):
    centroids, result = _original_assign(vectors, seeds, params)
    RUN_LOG["runs"] += 1
    problems = result.violations(params.alpha)
    RUN_LOG["violations"].extend(problems)
    assert not problems, problems
    return centroids, result


def _checked_baseline(*args, **kwargs):
    # baselines are not threshold-gated, so only the partition is checked
    result = _original_baseline(*args, **kwargs)
    RUN_LOG["runs"] += 1
    problems = result.violations()
    RUN_LOG["violations"].extend(problems)
    assert not problems, problems
    return result


@pytest.fixture(autouse=True)
def _check_every_run(monkeypatch):
    for module in (linkmeans.clustering, linkmeans.synth, linkmeans.cli):
        monkeypatch.setattr(module, "assign_documents", _checked_assign)
    for module in (linkmeans.baselines, linkmeans.synth, linkmeans.cli):
        monkeypatch.setattr(module, "cluster_with_baseline", _checked_baseline)
    yield


@pytest.fixture
def criterion():
    """Record an acceptance criterion outcome for the terminal summary."""

    def record(number, passed, detail=""):
        CRITERIA[number] = (bool(passed), detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    if 3 in CRITERIA:
        # re-judged over every run of the whole session, not just its own battery
        passed, detail = CRITERIA[3]
        clean = not RUN_LOG["violations"]
        CRITERIA[3] = (passed and clean, f"{detail}; session: {RUN_LOG['runs']} runs, "
                       f"{len(RUN_LOG['violations'])} violations")
    for number in sorted(CRITERIA):
        passed, detail = CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
