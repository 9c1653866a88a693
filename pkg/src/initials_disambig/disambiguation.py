"""Name-based disambiguation: first initial, all initials and hybrid."""

from __future__ import annotations

import enum
from collections.abc import Callable

from .core import Dataset, NameOccurrence, Partition

# "no more than 2% greater" is inclusive
ALL_INITIALS_RATIO_THRESHOLD = 1.02


class Method(str, enum.Enum):
    FIRST_INITIAL = "first_initial"
    ALL_INITIALS = "all_initials"
    HYBRID = "hybrid"

    def __str__(self) -> str:
        return self.value


def _root_key(occ: NameOccurrence) -> tuple[str, str]:
    return occ.last_name, occ.first_initial


def first_initial(ds: Dataset) -> Partition:
    """Cluster by last name and first initial; middle initials are ignored."""
    return Partition.from_keys(ds, _root_key)


def all_initials(ds: Dataset) -> Partition:
    """Cluster by the full initials string, a missing middle initial included."""
    return Partition.from_keys(ds, lambda o: (o.last_name, o.first_initial, o.middle_token))


def middle_tokens_by_root(ds: Dataset) -> dict[tuple[str, str], set[str]]:
    """Distinct non-empty middle tokens seen under each root."""
    seen: dict[tuple[str, str], set[str]] = {}
    for occ in ds.occurrences:
        tokens = seen.setdefault(_root_key(occ), set())
        if occ.middle_token:
            tokens.add(occ.middle_token)
    return seen


def hybrid(ds: Dataset) -> Partition:
    """Pick all-initials or first-initial behaviour root by root.

    A root with two or more distinct middle tokens is split exactly as the
    all-initials method would, the bare variant forming its own author.
    With at most one middle token, the bare and initialled variants are one
    author.
    """
    tokens = middle_tokens_by_root(ds)

    def key(occ: NameOccurrence) -> tuple[str, str, str]:
        root = _root_key(occ)
        if len(tokens[root]) >= 2:
            return (*root, occ.middle_token)
        return (*root, "")

    return Partition.from_keys(ds, key)


METHODS: dict[Method, Callable[[Dataset], Partition]] = {
    Method.FIRST_INITIAL: first_initial,
    Method.ALL_INITIALS: all_initials,
    Method.HYBRID: hybrid,
}


def disambiguate(ds: Dataset, method: Method | str) -> Partition:
    return METHODS[Method(method)](ds)


def author_count(p: Partition) -> int:
    """Number of distinct authors (clusters) a method produced."""
    return p.n_clusters


def count_ratio(n_first: int, n_all: int) -> float:
    return n_all / n_first if n_first else 1.0


def choose_by_ratio(ratio: float) -> Method:
    return Method.ALL_INITIALS if ratio <= ALL_INITIALS_RATIO_THRESHOLD else Method.HYBRID


def select_method(ds: Dataset) -> tuple[Method, float]:
    """Apply the two-percent rule.

    All initials is chosen when it yields at most 2% more authors than
    first initial; otherwise the hybrid method.
    """
    ratio = count_ratio(author_count(first_initial(ds)), author_count(all_initials(ds)))
    return choose_by_ratio(ratio), ratio
