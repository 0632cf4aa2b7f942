"""Name lists, labeled datasets, selection and synthetic fixtures.

A NameList is a deduplicated, class-tagged collection of parsed names in a
stable order.  The operations here mirror how the experiment corpus is built:
load raw lists through the sanitizer, remove names shared with a reference
list, select head/random/mixed subsets, and split the labeled result into
train/test shares or stratified folds.

The fixture generator produces two separable shapes so the full pipeline can
be exercised without any private data: "iot-like" names carry three or four
labels (service, optional region, second-level domain, TLD) while
"toplist-like" names are plain two-label registrations.  Both shapes draw
the second-level domain and TLD from the same pools, so the class signal
lives entirely in the extra left-hand labels.
"""

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError
from .names import DomainName, parse_name
from .sanitizer import sanitize_names

IOT_CLASS = "iot-m2m"
OTHER_CLASS = "other"
CLASSES = (IOT_CLASS, OTHER_CLASS)


@dataclass
class NameList:
    """An ordered, duplicate-free list of names with one class tag."""

    id: str
    cls: str
    names: list[DomainName] = field(default_factory=list)
    provenance: str = ""

    def __post_init__(self):
        if self.cls not in CLASSES:
            raise InputError(f"unknown class {self.cls!r} for list {self.id!r}")
        seen = set()
        for name in self.names:
            key = name.normalized
            if key in seen:
                raise InputError(f"duplicate name {key!r} in list {self.id!r}")
            seen.add(key)

    def __len__(self) -> int:
        return len(self.names)

    def normalized_set(self) -> set[str]:
        return {name.normalized for name in self.names}


@dataclass
class LabeledDataset:
    """Names paired with their class, in a stable order."""

    entries: list[tuple[DomainName, str]]
    seed: int = 0

    def __len__(self) -> int:
        return len(self.entries)

    def class_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for _, cls in self.entries:
            counts[cls] = counts.get(cls, 0) + 1
        return counts

    def labels(self) -> np.ndarray:
        """Numeric targets: 1 for the IoT class, 0 otherwise."""
        return np.array([1 if cls == IOT_CLASS else 0 for _, cls in self.entries])


@dataclass(frozen=True)
class SplitPlan:
    train_fraction: float = 0.8
    seed: int = 0
    stratified: bool = True


@dataclass(frozen=True)
class FoldPlan:
    k: int = 5
    seed: int = 0


def load_list(path, list_id: str, cls: str) -> tuple[NameList, list[tuple[str, str]]]:
    """Read one name per line, sanitize, and return the list plus rejects.

    Blank lines and lines starting with "#" are skipped.  Duplicates collapse
    to their first appearance.  A file yielding zero valid names is an error.
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"list file not found: {path}")
    raw_lines = path.read_text(encoding="utf-8").splitlines()
    candidates = [line for line in raw_lines if line.strip() and not line.lstrip().startswith("#")]
    accepted, discarded = sanitize_names(candidates)
    if not accepted:
        raise InputError(f"no valid names in {path}")
    return NameList(list_id, cls, accepted, provenance=str(path)), discarded


def write_names(names: Iterable[DomainName], path) -> None:
    """Write normalized names, one per line."""
    Path(path).write_text(
        "".join(name.normalized + "\n" for name in names), encoding="utf-8"
    )


def write_dataset(dataset: LabeledDataset, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["name", "class"])
        for name, cls in dataset.entries:
            writer.writerow([name.normalized, cls])


def read_dataset(path, seed: int = 0) -> LabeledDataset:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"dataset file not found: {path}")
    entries: list[tuple[DomainName, str]] = []
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["name", "class"]:
            raise InputError(f"{path}: expected header name,class")
        for row in reader:
            if not row:
                continue
            if len(row) != 2 or row[1] not in CLASSES:
                raise InputError(f"{path}: bad dataset row {row!r}")
            entries.append((parse_name(row[0]), row[1]))
    if not entries:
        raise InputError(f"no entries in {path}")
    return LabeledDataset(entries, seed=seed)


def remove_commons(reference: NameList, target: NameList) -> tuple[NameList, int]:
    """Drop from target every name also present in reference.

    Comparison is on normalized form.  Returns the filtered list and how many
    names were removed.
    """
    shared = reference.normalized_set()
    kept = [name for name in target.names if name.normalized not in shared]
    removed = len(target.names) - len(kept)
    result = NameList(
        target.id,
        target.cls,
        kept,
        provenance=f"{target.provenance} minus {reference.id}".strip(),
    )
    return result, removed


def select_top(source: NameList, n: int) -> NameList:
    """First n names in file (rank) order."""
    if not 0 < n <= len(source.names):
        raise InputError(
            f"cannot take top {n} of {len(source.names)} names from {source.id!r}"
        )
    return NameList(
        source.id, source.cls, list(source.names[:n]), provenance=f"{source.provenance} top {n}"
    )


def select_random(source: NameList, n: int, seed: int) -> NameList:
    """n names drawn uniformly without replacement, order of draw preserved."""
    if not 0 < n <= len(source.names):
        raise InputError(
            f"cannot draw {n} of {len(source.names)} names from {source.id!r}"
        )
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(source.names), size=n, replace=False)
    return NameList(
        source.id,
        source.cls,
        [source.names[i] for i in picks],
        provenance=f"{source.provenance} random {n} seed {seed}",
    )


def make_mix(sources: Sequence[NameList], n: int, seed: int) -> NameList:
    """Draw n names spread as evenly as possible over several lists.

    The first n % len(sources) lists contribute one extra name; every list's
    share is drawn uniformly without replacement.  Sources are expected to be
    pairwise disjoint (commons removal upstream guarantees it); the result is
    deduplicated defensively either way.
    """
    if not sources:
        raise InputError("make_mix needs at least one source list")
    classes = {source.cls for source in sources}
    if len(classes) != 1:
        raise InputError("make_mix sources must share one class")
    base, extra = divmod(n, len(sources))
    quotas = [base + (1 if i < extra else 0) for i in range(len(sources))]
    rng = np.random.default_rng(seed)
    chosen: list[DomainName] = []
    seen: set[str] = set()
    for source, quota in zip(sources, quotas):
        if quota > len(source.names):
            raise InputError(
                f"quota {quota} exceeds list {source.id!r} ({len(source.names)} names)"
            )
        picks = rng.choice(len(source.names), size=quota, replace=False)
        for i in picks:
            name = source.names[i]
            if name.normalized not in seen:
                seen.add(name.normalized)
                chosen.append(name)
    return NameList(
        "mix-" + "+".join(source.id for source in sources),
        sources[0].cls,
        chosen,
        provenance=f"mix of {len(sources)} lists, n {n}, seed {seed}",
    )


def make_dataset(positive: NameList, negative: NameList, seed: int = 0) -> LabeledDataset:
    """Concatenate a positive and a negative list into one labeled dataset."""
    if positive.cls == negative.cls:
        raise InputError("positive and negative lists carry the same class")
    entries = [(name, positive.cls) for name in positive.names]
    entries += [(name, negative.cls) for name in negative.names]
    return LabeledDataset(entries, seed=seed)


def _train_counts(counts: list[int], fraction: float) -> list[int]:
    """Per-class train counts by largest remainder, totals tracking N*fraction."""
    total = sum(counts)
    target = int(np.floor(total * fraction + 0.5))
    exact = [c * fraction for c in counts]
    floors = [int(np.floor(x)) for x in exact]
    leftovers = target - sum(floors)
    order = sorted(
        range(len(counts)), key=lambda i: (-(exact[i] - floors[i]), i)
    )
    takes = list(floors)
    for i in order[:max(0, leftovers)]:
        if takes[i] < counts[i]:
            takes[i] += 1
    return takes


def stratified_split_indices(y, train_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Row indices for a stratified train/test split over targets y.

    Same contract as split(): per class, the train share stays within one
    sample of train_fraction; indices come back sorted.
    """
    y = np.asarray(y)
    if not 0.0 < train_fraction < 1.0:
        raise InputError(f"train_fraction {train_fraction} not in (0, 1)")
    values: list = []
    for value in y:
        if value not in values:
            values.append(value)
    counts = [int((y == value).sum()) for value in values]
    for value, count in zip(values, counts):
        if count < 2:
            raise InputError(f"class {value!r} has fewer than 2 samples")
    takes = _train_counts(counts, train_fraction)
    rng = np.random.default_rng(seed)
    train: list[int] = []
    test: list[int] = []
    for value, take in zip(values, takes):
        shuffled = rng.permutation(np.flatnonzero(y == value))
        train.extend(int(i) for i in shuffled[:take])
        test.extend(int(i) for i in shuffled[take:])
    return np.array(sorted(train), dtype=int), np.array(sorted(test), dtype=int)


def split(dataset: LabeledDataset, plan: SplitPlan) -> tuple[LabeledDataset, LabeledDataset]:
    """Shuffle and split into train/test shares.

    Stratified by default: each class's train share stays within one sample
    of train_fraction.  Deterministic for a given plan.
    """
    if not 0.0 < plan.train_fraction < 1.0:
        raise InputError(f"train_fraction {plan.train_fraction} not in (0, 1)")
    rng = np.random.default_rng(plan.seed)
    n = len(dataset.entries)
    if plan.stratified:
        classes: list[str] = []
        for _, cls in dataset.entries:
            if cls not in classes:
                classes.append(cls)
        per_class = {
            cls: [i for i, (_, c) in enumerate(dataset.entries) if c == cls]
            for cls in classes
        }
        for cls, idx in per_class.items():
            if len(idx) < 2:
                raise InputError(f"class {cls!r} has fewer than 2 samples")
        takes = _train_counts([len(per_class[c]) for c in classes], plan.train_fraction)
        train_idx: list[int] = []
        test_idx: list[int] = []
        for cls, take in zip(classes, takes):
            shuffled = rng.permutation(per_class[cls])
            train_idx.extend(int(i) for i in shuffled[:take])
            test_idx.extend(int(i) for i in shuffled[take:])
    else:
        shuffled = rng.permutation(n)
        cut = int(np.floor(n * plan.train_fraction + 0.5))
        train_idx = [int(i) for i in shuffled[:cut]]
        test_idx = [int(i) for i in shuffled[cut:]]
    train = LabeledDataset([dataset.entries[i] for i in sorted(train_idx)], seed=plan.seed)
    test = LabeledDataset([dataset.entries[i] for i in sorted(test_idx)], seed=plan.seed)
    return train, test


def stratified_fold_indices(y: np.ndarray, k: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Index pairs (train, test) for k stratified folds over targets y.

    Fold test sets partition the samples; per fold, each class count differs
    from an even k-way share by at most one.
    """
    y = np.asarray(y)
    if k < 2:
        raise InputError(f"k must be at least 2, got {k}")
    rng = np.random.default_rng(seed)
    members: list[list[int]] = [[] for _ in range(k)]
    for value in np.unique(y):
        idx = np.flatnonzero(y == value)
        if len(idx) < k:
            raise InputError(f"class {value!r} has {len(idx)} samples, fewer than k={k}")
        shuffled = rng.permutation(idx)
        base, extra = divmod(len(idx), k)
        start = 0
        for fold in range(k):
            size = base + (1 if fold < extra else 0)
            members[fold].extend(int(i) for i in shuffled[start:start + size])
            start += size
    folds = []
    all_idx = np.arange(len(y))
    for fold in range(k):
        test = np.array(sorted(members[fold]), dtype=int)
        mask = np.ones(len(y), dtype=bool)
        mask[test] = False
        folds.append((all_idx[mask], test))
    return folds


def stratified_folds(dataset: LabeledDataset, plan: FoldPlan) -> list[tuple[LabeledDataset, LabeledDataset]]:
    """k train/test dataset pairs; test folds partition the dataset."""
    y = np.array([cls for _, cls in dataset.entries])
    pairs = []
    for train_idx, test_idx in stratified_fold_indices(y, plan.k, plan.seed):
        train = LabeledDataset([dataset.entries[i] for i in train_idx], seed=plan.seed)
        test = LabeledDataset([dataset.entries[i] for i in test_idx], seed=plan.seed)
        pairs.append((train, test))
    return pairs


# ---------------------------------------------------------------------------
# Synthetic fixtures
# ---------------------------------------------------------------------------

SERVICE_TOKENS = (
    "mqtt", "cam", "api", "telemetry", "ota", "sensor", "gw", "ntp",
    "backend", "iot", "hub", "fleet", "metrics", "provision", "relay", "edge",
)

REGION_TOKENS = (
    "eu-west-1", "us-east-1", "us-west-2", "ap-south-1", "eu-central-1",
    "ap-northeast-1", "sa-east-1", "us-east-2", "ap-southeast-2",
    "eu-north-1", "ca-central-1", "af-south-1",
)

SLD_STEMS = (
    "acme", "zen", "volt", "nimbus", "quanta", "vertex", "orbit", "pulse",
    "delta", "lumen", "strato", "ferro", "helio", "aero", "cryo", "terra",
    "nova", "vega", "atlas", "ion", "argo", "flux", "krypton", "sol",
    "astra", "borea", "cirrus", "dyna", "echo", "fable", "glint", "harbor",
    "indigo", "jasper", "kite", "lotus", "mica", "nexus", "opal", "prisma",
)

SLD_SUFFIXES = (
    "hub", "cloud", "labs", "sys", "core", "link", "soft", "ware", "grid",
    "base", "stack", "field", "forge", "point", "line", "wave", "gate",
    "mark", "port", "view",
)

# Registries skew heavily toward a handful of TLDs; weights sum to 1.
TLD_WEIGHTS = (
    ("com", 0.45), ("net", 0.18), ("org", 0.12), ("io", 0.08),
    ("cloud", 0.05), ("co", 0.04), ("de", 0.04), ("info", 0.04),
)

FIXTURE_KINDS = ("iot-like", "toplist-like", "mixed")

_REGION_PROBABILITY = 0.5


def _weighted_pick(rng: np.random.Generator, table: tuple) -> str:
    cut = np.cumsum([w for _, w in table])
    return table[int(np.searchsorted(cut, rng.random() * cut[-1], side="right"))][0]


def _fixture_sld(rng: np.random.Generator) -> str:
    return SLD_STEMS[rng.integers(len(SLD_STEMS))] + SLD_SUFFIXES[rng.integers(len(SLD_SUFFIXES))]


def _iot_like(rng: np.random.Generator) -> str:
    service = SERVICE_TOKENS[rng.integers(len(SERVICE_TOKENS))]
    parts = [service]
    if rng.random() < _REGION_PROBABILITY:
        parts.append(REGION_TOKENS[rng.integers(len(REGION_TOKENS))])
    parts.append(_fixture_sld(rng))
    parts.append(_weighted_pick(rng, TLD_WEIGHTS))
    return ".".join(parts)


def _toplist_like(rng: np.random.Generator) -> str:
    return _fixture_sld(rng) + "." + _weighted_pick(rng, TLD_WEIGHTS)


def generate_fixtures(kind: str, n: int, seed: int) -> NameList:
    """Generate n unique synthetic names of the requested shape.

    iot-like names have 3-4 labels (service [, region], coined SLD, TLD);
    toplist-like names have exactly 2.  mixed draws either shape per name.
    Every output passes the syntax check; same seed, same list.
    """
    if kind not in FIXTURE_KINDS:
        raise InputError(f"unknown fixture kind {kind!r}")
    if n < 1:
        raise InputError(f"fixture size must be positive, got {n}")
    rng = np.random.default_rng(seed)
    names: list[DomainName] = []
    seen: set[str] = set()
    attempts = 0
    limit = 200 * n + 1000
    while len(names) < n:
        attempts += 1
        if attempts > limit:
            raise InputError(
                f"could not draw {n} unique {kind} fixtures (pool too small)"
            )
        if kind == "iot-like":
            text = _iot_like(rng)
        elif kind == "toplist-like":
            text = _toplist_like(rng)
        else:
            text = _iot_like(rng) if rng.random() < 0.5 else _toplist_like(rng)
        if text not in seen:
            seen.add(text)
            names.append(parse_name(text))
    cls = IOT_CLASS if kind == "iot-like" else OTHER_CLASS
    return NameList(
        f"fixture-{kind}", cls, names, provenance=f"generated n {n} seed {seed}"
    )
