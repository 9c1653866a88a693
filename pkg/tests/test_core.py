import random

import pytest
from conftest import make_dataset, occurrence_lists
from hypothesis import given
from hypothesis import strategies as st

from initials_disambig.core import (
    Dataset,
    NameOccurrence,
    Partition,
    Provenance,
    Root,
    format_author_name,
    normalize_author_name,
    root_of,
)
from initials_disambig.errors import NameParseError


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("Jackson, PA", ("JACKSON", "P", "A")),
        ("Zywietz, C", ("ZYWIETZ", "C", "")),
        ("O'Brien-Smith, JAB", ("OBRIENSMITH", "J", "AB")),
        ("Nováček, S", ("NOVACEK", "S", "")),
        ("van der Berg, J. K.", ("VANDERBERG", "J", "K")),
        ("  smith ,c.m.", ("SMITH", "C", "M")),
        ("Müller-Lüdenscheidt, H-J", ("MULLERLUDENSCHEIDT", "H", "J")),
    ],
)
def test_normalize_examples(raw, expected):
    assert normalize_author_name(raw) == expected


@pytest.mark.parametrize("raw", ["Jackson", ", PA", "Jackson,", "Jackson, 12", "123, A", ""])
def test_normalize_rejects_malformed(raw):
    with pytest.raises(NameParseError) as info:
        normalize_author_name(raw)
    assert info.value.raw == raw
    assert repr(raw) in str(info.value)


name_text = st.text(
    alphabet=st.sampled_from("abcXYZéüñ' -.") | st.characters(codec="utf-8"), min_size=0, max_size=12
)


@given(name_text, name_text)
def test_normalize_idempotent_on_reserialized_output(last, initials):
    try:
        parts = normalize_author_name(f"{last},{initials}")
    except NameParseError:
        return
    assert normalize_author_name(format_author_name(*parts)) == parts
    last_n, first, middle = parts
    assert last_n.isascii() and last_n.isalpha() and last_n.isupper()
    assert len(first) == 1 and first.isupper()
    assert middle == "" or (middle.isascii() and middle.isalpha() and middle.isupper())


@pytest.mark.parametrize(
    "parts, root",
    [
        (("SMITH", "C", "M"), Root("SMITH", "C")),
        (("SMITH", "C", ""), Root("SMITH", "C")),
        (("SMITH", "D", "M"), Root("SMITH", "D")),
    ],
)
def test_root_of(parts, root):
    assert root_of(NameOccurrence(0, 0, *parts)) == root


@given(occurrence_lists(2, 2))
def test_root_equality_iff_last_and_first_agree(pair):
    x, y = pair
    same = x.last_name == y.last_name and x.first_initial == y.first_initial
    assert (root_of(x) == root_of(y)) == same


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(last_name="smith", first_initial="C"),
        dict(last_name="", first_initial="C"),
        dict(last_name="SMITH", first_initial="CM"),
        dict(last_name="SMITH", first_initial="c"),
        dict(last_name="SMITH", first_initial="C", middle_token="M1"),
        dict(last_name="SMÍTH", first_initial="C"),
    ],
)
def test_occurrence_validates_fields(kwargs):
    with pytest.raises(ValueError):
        NameOccurrence(record_id=0, paper_id=0, **kwargs)


def test_occurrence_name_round_trip():
    occ = NameOccurrence.from_raw("Jackson, P.A.", record_id=3, paper_id=7)
    assert occ.name == "JACKSON, PA"
    assert occ.root == Root("JACKSON", "P")
    assert str(occ.root) == "JACKSON, P"


def test_dataset_rejects_duplicate_record_ids():
    occ = NameOccurrence(1, 1, "SMITH", "C")
    with pytest.raises(ValueError, match="duplicate record_id 1"):
        Dataset((occ, occ), Provenance.EMPIRICAL)


def test_dataset_provenance_consistency():
    with pytest.raises(ValueError, match="lacks true_author_id"):
        Dataset((NameOccurrence(0, 0, "SMITH", "C"),), Provenance.SIMULATED)
    with pytest.raises(ValueError, match="carries true_author_id"):
        Dataset((NameOccurrence(0, 0, "SMITH", "C", "", 5),), Provenance.EMPIRICAL)


def test_papers_grouped_in_author_order():
    ds = make_dataset(["Lee, A", "Kim, B", "Park, C", "Cho, D"], paper_ids=[2, 1, 2, 1])
    shuffled = ds.with_occurrences(reversed(ds.occurrences))
    for d in (ds, shuffled):
        papers = d.papers()
        assert [o.last_name for o in papers[2]] == ["LEE", "PARK"]
        assert [o.last_name for o in papers[1]] == ["KIM", "CHO"]


def test_partition_from_keys_labels_by_smallest_record():
    ds = make_dataset(["Smith, C", "Jones, C", "Smith, CM", "Jones, A"])
    p = Partition.from_keys(ds, lambda o: o.last_name)
    assert p.assignment == {0: 0, 1: 1, 2: 0, 3: 1}
    assert p.clusters() == {0: [0, 2], 1: [1, 3]}
    assert p.n_clusters == 2 and len(p) == 4


@given(occurrence_lists(1, 40), st.randoms(use_true_random=False))
def test_partition_from_keys_order_invariant(occs, rnd):
    ds = Dataset(tuple(occs), Provenance.SIMULATED)
    shuffled = list(occs)
    rnd.shuffle(shuffled)
    key = lambda o: (o.last_name, o.middle_token)  # noqa: E731
    assert Partition.from_keys(ds, key) == Partition.from_keys(ds.with_occurrences(shuffled), key)


def test_canonical_and_refines():
    fine = Partition({0: 9, 1: 8, 2: 8, 3: 7})
    coarse = Partition({0: 5, 1: 5, 2: 5, 3: 6})
    assert fine.canonical() == Partition({0: 0, 1: 1, 2: 1, 3: 3})
    assert fine.refines(coarse)
    assert not coarse.refines(fine)
    assert fine.refines(fine)


def test_partition_copies_its_input():
    src = {0: 0, 1: 1}
    p = Partition(src)
    src[0] = 1
    assert p.assignment[0] == 0


def test_dataset_is_order_preserving_and_iterable():
    names = [f"N{chr(65 + i)}, A" for i in range(10)]
    random.Random(0).shuffle(names)
    ds = make_dataset(names)
    assert [o.name for o in ds] == [normalize_author_name(n)[0] + ", A" for n in names]
    assert ds.record_ids() == list(range(10))
