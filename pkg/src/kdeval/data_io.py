"""Dataset ingestion: headerless CSV, whitespace-delimited text, and a small
ARFF subset, plus synthetic blob generation for tests and demos."""

import re

import numpy as np

FORMATS = ("csv", "whitespace", "arff")


class DataError(Exception):
    """Base class for dataset ingestion problems (CLI maps these to exit code 2)."""


class ParseError(DataError):
    """Malformed content; message carries the 1-based line number."""


class EmptyDataError(DataError):
    """File contains no data rows."""


class Dataset:
    """Immutable point set with optional reference labels.

    points       : (n, d) float64 array, all finite, d >= 1
    reference_labels : (n,) int array or None, remapped to 0..k-1
    id           : short name used in reports
    """

    def __init__(self, points, reference_labels=None, id="dataset"):
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError(f"points must be a non-empty 2-D array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points contain non-finite coordinates")
        pts = pts.copy()
        pts.flags.writeable = False
        self.points = pts
        if reference_labels is not None:
            labels = np.asarray(reference_labels, dtype=np.int64)
            if labels.shape != (pts.shape[0],):
                raise ValueError(
                    f"reference_labels length {labels.shape} does not match n={pts.shape[0]}"
                )
            labels = _remap_first_occurrence(labels)
            labels.flags.writeable = False
            self.reference_labels = labels
        else:
            self.reference_labels = None
        self.id = str(id)

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def d(self):
        return self.points.shape[1]

    def __repr__(self):
        lab = "with labels" if self.reference_labels is not None else "unlabeled"
        return f"Dataset({self.id!r}, n={self.n}, d={self.d}, {lab})"


def _remap_first_occurrence(raw):
    """Renumber labels so the first distinct raw label becomes 0, the second 1, ..."""
    mapping = {}
    out = np.empty(len(raw), dtype=np.int64)
    for i, value in enumerate(raw):
        key = value if not isinstance(value, np.ndarray) else value.item()
        if key not in mapping:
            mapping[key] = len(mapping)
        out[i] = mapping[key]
    return out


def _split_line(line, fmt):
    if fmt == "whitespace":
        return line.split()
    return [field.strip() for field in line.split(",")]


def _parse_delimited(lines, fmt, label_column, dataset_id):
    rows = []
    raw_labels = []
    width = None
    for lineno, text in lines:
        fields = _split_line(text, fmt)
        if width is None:
            width = len(fields)
            if label_column is not None:
                col = label_column if label_column >= 0 else width + label_column
                if not 0 <= col < width:
                    raise ParseError(
                        f"line {lineno}: label column {label_column} out of range for {width} columns"
                    )
            else:
                col = None
        elif len(fields) != width:
            raise ParseError(
                f"line {lineno}: expected {width} columns, found {len(fields)} (ragged row)"
            )
        coords = []
        for j, field in enumerate(fields):
            if col is not None and j == col:
                raw_labels.append(field)
                continue
            try:
                coords.append(float(field))
            except ValueError:
                raise ParseError(f"line {lineno}: non-numeric feature value {field!r}") from None
        rows.append(coords)
    labels = raw_labels if label_column is not None else None
    return Dataset(np.array(rows), reference_labels=labels, id=dataset_id)


_ARFF_ATTR = re.compile(r"@attribute\s+(\S+)\s+(.+)$", re.IGNORECASE)


def _parse_arff(lines, label_column, dataset_id):
    attrs = []  # (name, is_nominal)
    nominal_index = None
    data_rows = []
    in_data = False
    for lineno, text in lines:
        lowered = text.lower()
        if not in_data:
            if lowered.startswith("@relation"):
                continue
            if lowered.startswith("@attribute"):
                m = _ARFF_ATTR.match(text)
                if m is None:
                    raise ParseError(f"line {lineno}: malformed @attribute declaration")
                kind = m.group(2).strip()
                if kind.startswith("{"):
                    if nominal_index is not None:
                        raise ParseError(
                            f"line {lineno}: more than one nominal attribute; only a single class attribute is supported"
                        )
                    nominal_index = len(attrs)
                    attrs.append((m.group(1), True))
                elif kind.lower() in ("numeric", "real", "integer"):
                    attrs.append((m.group(1), False))
                else:
                    raise ParseError(f"line {lineno}: unsupported attribute type {kind!r}")
                continue
            if lowered.startswith("@data"):
                if not attrs:
                    raise ParseError(f"line {lineno}: @data before any @attribute")
                in_data = True
                continue
            raise ParseError(f"line {lineno}: unexpected content in ARFF header: {text!r}")
        data_rows.append((lineno, text))
    if not in_data:
        raise ParseError("missing @data section")
    if not data_rows:
        raise EmptyDataError("ARFF file has no data rows")

    label_idx = nominal_index if label_column is None else (
        label_column if label_column >= 0 else len(attrs) + label_column
    )
    if label_idx is not None and not 0 <= label_idx < len(attrs):
        raise ParseError(f"label column {label_column} out of range for {len(attrs)} attributes")

    rows = []
    raw_labels = []
    for lineno, text in data_rows:
        fields = [f.strip() for f in text.split(",")]
        if len(fields) != len(attrs):
            raise ParseError(
                f"line {lineno}: expected {len(attrs)} values, found {len(fields)} (ragged row)"
            )
        coords = []
        for j, field in enumerate(fields):
            if field == "?":
                raise ParseError(f"line {lineno}: missing value '?' is not supported")
            if label_idx is not None and j == label_idx:
                raw_labels.append(field)
                continue
            try:
                coords.append(float(field))
            except ValueError:
                raise ParseError(f"line {lineno}: non-numeric feature value {field!r}") from None
        rows.append(coords)
    labels = raw_labels if label_idx is not None else None
    return Dataset(np.array(rows), reference_labels=labels, id=dataset_id)


def load_dataset(path, format="csv", label_column=None, id=None):
    """Load a dataset file.

    format: one of 'csv' (headerless, comma), 'whitespace', 'arff' (numeric
    attributes plus at most one nominal class attribute).  label_column, when
    given, selects the label column by index (negative counts from the end).
    Raises ParseError with a line number on malformed content and
    EmptyDataError on files with no data rows.
    """
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
    path = str(path)
    dataset_id = id if id is not None else _stem(path)
    with open(path, "r", encoding="utf-8") as fh:
        raw = fh.read().split("\n")
    lines = []
    for lineno, text in enumerate(raw, start=1):
        stripped = text.strip()
        if not stripped or stripped.startswith("%") and format == "arff":
            continue
        lines.append((lineno, stripped))
    if not lines:
        raise EmptyDataError(f"{path}: file contains no data")
    if format == "arff":
        return _parse_arff(lines, label_column, dataset_id)
    return _parse_delimited(lines, format, label_column, dataset_id)


def _stem(path):
    name = path.replace("\\", "/").rsplit("/", 1)[-1]
    return name.rsplit(".", 1)[0] if "." in name else name


def save_dataset_csv(dataset, path):
    """Write points (and labels, when present) as headerless CSV.

    Floats use the shortest round-trip representation, so reloading
    reproduces coordinates bit-exactly.  Rows are newline-terminated and use
    '.' as the decimal separator.
    """
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(dataset.n):
            fields = [repr(float(v)) for v in dataset.points[i]]
            if dataset.reference_labels is not None:
                fields.append(str(int(dataset.reference_labels[i])))
            fh.write(",".join(fields) + "\n")


def make_blobs(k, per_cluster, centers, sigma, seed, id=None):
    """Sample isotropic Gaussian blobs around the given centers.

    Returns a Dataset whose reference labels are the generating component.
    Deterministic for a fixed seed.
    """
    if k < 1 or per_cluster < 1:
        raise ValueError("k and per_cluster must be >= 1")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    centers = [np.asarray(c, dtype=np.float64).ravel() for c in centers]
    if len(centers) != k:
        raise ValueError(f"expected {k} centers, got {len(centers)}")
    d = centers[0].shape[0]
    for c in centers:
        if c.shape[0] != d:
            raise ValueError("centers have mismatched dimensions")
    rng = np.random.default_rng(seed)
    points = np.concatenate(
        [center + sigma * rng.standard_normal((per_cluster, d)) for center in centers]
    )
    labels = np.repeat(np.arange(k), per_cluster)
    name = id if id is not None else f"blobs-k{k}-n{k * per_cluster}-seed{seed}"
    return Dataset(points, reference_labels=labels, id=name)
