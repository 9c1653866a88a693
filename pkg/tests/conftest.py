from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from initials_disambig.core import Dataset, NameOccurrence, Partition, Provenance

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_KEY = pytest.StashKey[list]()


def make_dataset(names: list[str], true_ids: list[int] | None = None, paper_ids: list[int] | None = None) -> Dataset:
    """Dataset from raw ``"Last, FM"`` strings; one paper per name unless ``paper_ids`` is given."""
    occs = []
    for i, raw in enumerate(names):
        tid = None if true_ids is None else true_ids[i]
        pid = i if paper_ids is None else paper_ids[i]
        occs.append(NameOccurrence.from_raw(raw, record_id=i, paper_id=pid, true_author_id=tid))
    prov = Provenance.SIMULATED if true_ids is not None else Provenance.EMPIRICAL
    return Dataset(tuple(occs), prov)


LAST = st.sampled_from(["SMITH", "JONES", "LI"])
FIRST = st.sampled_from(["C", "J"])
MIDDLE = st.sampled_from(["", "", "M", "J", "MA"])


@st.composite
def occurrence_lists(draw, min_size: int = 1, max_size: int = 50, simulated: bool = True):
    n = draw(st.integers(min_size, max_size))
    n_people = draw(st.integers(1, max(1, n)))
    occs = []
    for rid in range(n):
        tid = draw(st.integers(0, n_people - 1)) if simulated else None
        occs.append(NameOccurrence(rid, rid, draw(LAST), draw(FIRST), draw(MIDDLE), tid))
    return occs


@st.composite
def simulated_datasets(draw, min_size: int = 1, max_size: int = 50):
    return Dataset(tuple(draw(occurrence_lists(min_size, max_size))), Provenance.SIMULATED)


@st.composite
def dataset_and_partition(draw, max_size: int = 50):
    ds = draw(simulated_datasets(1, max_size))
    n_clusters = draw(st.integers(1, len(ds)))
    labels = [draw(st.integers(0, n_clusters - 1)) for _ in range(len(ds))]
    return ds, Partition({occ.record_id: lab for occ, lab in zip(ds.occurrences, labels)})


@pytest.fixture
def criterion(request):
    """Record one acceptance line; shown again in the terminal summary."""
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def record(label: str, passed: bool, detail: str) -> bool:
        line = f"{'PASS' if passed else 'FAIL'}  {label}: {detail}"
        lines.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
