"""Author-name occurrences, name roots, datasets and partitions.

Everything here is immutable once built. Methods and metrics elsewhere in
the package consume :class:`Dataset` and produce or consume
:class:`Partition`.
"""

from __future__ import annotations

import enum
import unicodedata
from collections.abc import Callable, Hashable, Iterable, Iterator, Mapping
from dataclasses import dataclass

from .errors import NameParseError


def _is_upper_ascii_alpha(s: str) -> bool:
    return s.isascii() and s.isalpha() and s.isupper()


def _fold_letters(s: str) -> str:
    """Fold diacritics to ASCII and keep only the letters, uppercased."""
    decomposed = unicodedata.normalize("NFKD", s)
    ascii_only = decomposed.encode("ascii", "ignore").decode("ascii")
    return "".join(ch for ch in ascii_only if ch.isalpha()).upper()


def normalize_author_name(raw: str) -> tuple[str, str, str]:
    """Split a ``"Last, INITIALS"`` name into its comparable parts.

    The last name is folded to ASCII with everything except letters removed.
    The first letter of the initials part becomes the first initial and any
    further letters form the middle token.

    >>> normalize_author_name("Jackson, PA")
    ('JACKSON', 'P', 'A')
    >>> normalize_author_name("O'Brien-Smith, J.A.B.")
    ('OBRIENSMITH', 'J', 'AB')

    Raises:
        NameParseError: if there is no comma, the last name is empty, or the
            initials part holds no letter.
    """
    if "," not in raw:
        raise NameParseError(f"no comma separating last name from initials in {raw!r}", raw=raw)
    last_raw, _, initials_raw = raw.partition(",")
    last = _fold_letters(last_raw)
    if not last:
        raise NameParseError(f"empty last name in {raw!r}", raw=raw)
    initials = _fold_letters(initials_raw)
    if not initials:
        raise NameParseError(f"no alphabetic initial in {raw!r}", raw=raw)
    return last, initials[0], initials[1:]


def format_author_name(last_name: str, first_initial: str, middle_token: str = "") -> str:
    """Inverse of :func:`normalize_author_name` on normalized parts."""
    return f"{last_name}, {first_initial}{middle_token}"


@dataclass(frozen=True, slots=True)
class Root:
    """Last name plus first initial; the grouping key shared by all methods."""

    last_name: str
    first_initial: str

    def __post_init__(self) -> None:
        if not self.last_name or not _is_upper_ascii_alpha(self.last_name):
            raise ValueError(f"last_name must be non-empty uppercase A-Z, got {self.last_name!r}")
        if len(self.first_initial) != 1 or not _is_upper_ascii_alpha(self.first_initial):
            raise ValueError(f"first_initial must be one uppercase letter, got {self.first_initial!r}")

    def __str__(self) -> str:
        return f"{self.last_name}, {self.first_initial}"


@dataclass(frozen=True, slots=True)
class NameOccurrence:
    """One appearance of an author name on one publication."""

    record_id: int
    paper_id: int
    last_name: str
    first_initial: str
    middle_token: str = ""
    true_author_id: int | None = None

    def __post_init__(self) -> None:
        if not self.last_name or not _is_upper_ascii_alpha(self.last_name):
            raise ValueError(f"last_name must be non-empty uppercase A-Z, got {self.last_name!r}")
        if len(self.first_initial) != 1 or not _is_upper_ascii_alpha(self.first_initial):
            raise ValueError(f"first_initial must be one uppercase letter, got {self.first_initial!r}")
        if self.middle_token and not _is_upper_ascii_alpha(self.middle_token):
            raise ValueError(f"middle_token must be uppercase A-Z, got {self.middle_token!r}")

    @classmethod
    def from_raw(
        cls,
        raw: str,
        record_id: int,
        paper_id: int,
        true_author_id: int | None = None,
    ) -> NameOccurrence:
        last, first, middle = normalize_author_name(raw)
        return cls(record_id, paper_id, last, first, middle, true_author_id)

    @property
    def root(self) -> Root:
        return Root(self.last_name, self.first_initial)

    @property
    def name(self) -> str:
        return format_author_name(self.last_name, self.first_initial, self.middle_token)


def root_of(occ: NameOccurrence) -> Root:
    """Return the (last name, first initial) root; the middle token is dropped."""
    return Root(occ.last_name, occ.first_initial)


class Provenance(str, enum.Enum):
    SIMULATED = "simulated"
    EMPIRICAL = "empirical"


@dataclass(frozen=True)
class Dataset:
    """An ordered collection of name occurrences plus provenance.

    Simulated datasets carry a ``true_author_id`` on every occurrence and
    empirical ones on none. ``years`` optionally maps ``paper_id`` to the
    publication year (empirical exports carry it; simulations do not).
    Within a paper, author order is record order: the occurrence with the
    lowest ``record_id`` is the first-listed author.
    """

    occurrences: tuple[NameOccurrence, ...]
    provenance: Provenance
    label: str = ""
    years: Mapping[int, int] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "occurrences", tuple(self.occurrences))
        object.__setattr__(self, "provenance", Provenance(self.provenance))
        if self.years is not None:
            object.__setattr__(self, "years", dict(self.years))
        seen: set[int] = set()
        simulated = self.provenance is Provenance.SIMULATED
        for occ in self.occurrences:
            if occ.record_id in seen:
                raise ValueError(f"duplicate record_id {occ.record_id}")
            seen.add(occ.record_id)
            if simulated and occ.true_author_id is None:
                raise ValueError(f"simulated dataset: record {occ.record_id} lacks true_author_id")
            if not simulated and occ.true_author_id is not None:
                raise ValueError(f"empirical dataset: record {occ.record_id} carries true_author_id")

    def __len__(self) -> int:
        return len(self.occurrences)

    def __iter__(self) -> Iterator[NameOccurrence]:
        return iter(self.occurrences)

    __hash__ = None  # type: ignore[assignment]

    @property
    def is_simulated(self) -> bool:
        return self.provenance is Provenance.SIMULATED

    def papers(self) -> dict[int, list[NameOccurrence]]:
        """Group occurrences by paper, each list in author order."""
        grouped: dict[int, list[NameOccurrence]] = {}
        for occ in sorted(self.occurrences, key=lambda o: o.record_id):
            grouped.setdefault(occ.paper_id, []).append(occ)
        return grouped

    def record_ids(self) -> list[int]:
        return [occ.record_id for occ in self.occurrences]

    def with_occurrences(self, occurrences: Iterable[NameOccurrence]) -> Dataset:
        return Dataset(tuple(occurrences), self.provenance, self.label, self.years)


@dataclass(frozen=True)
class Partition:
    """Cluster label per record; only the induced grouping is meaningful.

    Partitions built through :meth:`from_keys` use the smallest record id in
    each cluster as its label, so the same grouping always yields an equal
    ``Partition`` regardless of the order records were seen in.
    """

    assignment: Mapping[int, int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "assignment", dict(self.assignment))

    def __len__(self) -> int:
        return len(self.assignment)

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def from_keys(cls, ds: Dataset, key: Callable[[NameOccurrence], Hashable]) -> Partition:
        label_of_key: dict[Hashable, int] = {}
        keys = []
        for occ in ds.occurrences:
            k = key(occ)
            keys.append(k)
            current = label_of_key.get(k)
            if current is None or occ.record_id < current:
                label_of_key[k] = occ.record_id
        return cls({occ.record_id: label_of_key[k] for occ, k in zip(ds.occurrences, keys)})

    def clusters(self) -> dict[int, list[int]]:
        """Map cluster id to its member record ids, in ascending order."""
        out: dict[int, list[int]] = {}
        for rid in sorted(self.assignment):
            out.setdefault(self.assignment[rid], []).append(rid)
        return out

    def canonical(self) -> Partition:
        """Relabel clusters by their smallest record id."""
        smallest: dict[int, int] = {}
        for rid, cid in self.assignment.items():
            if cid not in smallest or rid < smallest[cid]:
                smallest[cid] = rid
        return Partition({rid: smallest[cid] for rid, cid in self.assignment.items()})

    def refines(self, coarser: Partition) -> bool:
        """True if every cluster here lies inside a single cluster of ``coarser``."""
        image: dict[int, int] = {}
        for rid, cid in self.assignment.items():
            target = coarser.assignment[rid]
            if image.setdefault(cid, target) != target:
                return False
        return True

    @property
    def n_clusters(self) -> int:
        return len(set(self.assignment.values()))
