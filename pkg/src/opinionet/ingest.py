"""Edge-list parsing, weight normalization, dedupe, opinion initializers,
and synthetic graph generation.

Real trust datasets arrive as delimited text with raw rating scales and
repeated rater->ratee pairs; everything here funnels them into the clean
form :func:`opinionet.graph.build_graph` accepts. All randomness is
drawn from a per-call ``numpy.random.default_rng(seed)`` stream, so
identical inputs and seeds give bitwise-identical outputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ParseError
from .graph import SignedDigraph

DEFAULT_COMMENT = "#"


@dataclass(frozen=True)
class EdgeRecord:
    src: str
    dst: str
    weight: float
    timestamp: int | None = None


@dataclass(frozen=True)
class EdgeListFormat:
    """Column layout of a delimited edge-list file."""

    delimiter: str = ","
    src_col: int = 0
    dst_col: int = 1
    weight_col: int = 2
    timestamp_col: int | None = None
    header: bool = False
    comment: str = DEFAULT_COMMENT


@dataclass
class ParseResult:
    records: list[EdgeRecord]
    malformed: list[tuple[int, str]] = field(default_factory=list)  # (line_no, reason)

    @property
    def n_malformed(self):
        return len(self.malformed)


@dataclass(frozen=True)
class InitScheme:
    """Internal-opinion initializer: 'uniform', 'normal', or 'degree'."""

    kind: str = "uniform"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("uniform", "normal", "degree"):
            raise ConfigError(f"unknown init scheme {self.kind!r}")


def parse_edge_list(stream, fmt: EdgeListFormat | None = None) -> ParseResult:
    """Parse a delimited edge-list stream into records.

    `stream` may be bytes, str, or a file object. Comment lines and blank
    lines are skipped; a header line is skipped when fmt.header is set.
    Malformed lines are collected with their 1-based line numbers; if
    every data line is malformed the parse fails outright.
    """
    fmt = fmt or EdgeListFormat()
    lines = _read_lines(stream)

    needed = [fmt.src_col, fmt.dst_col, fmt.weight_col]
    if fmt.timestamp_col is not None:
        needed.append(fmt.timestamp_col)
    width = max(needed) + 1

    records = []
    malformed = []
    saw_data = False
    first_data_line = True
    for line_no, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if fmt.comment and stripped.startswith(fmt.comment):
            continue
        if fmt.header and first_data_line:
            first_data_line = False
            continue
        first_data_line = False
        saw_data = True

        parts = [p.strip() for p in stripped.split(fmt.delimiter)]
        if len(parts) < width:
            malformed.append((line_no, f"expected at least {width} columns, got {len(parts)}"))
            continue
        src, dst = parts[fmt.src_col], parts[fmt.dst_col]
        if not src or not dst:
            malformed.append((line_no, "empty node label"))
            continue
        try:
            weight = float(parts[fmt.weight_col])
        except ValueError:
            malformed.append((line_no, f"bad weight {parts[fmt.weight_col]!r}"))
            continue
        if not np.isfinite(weight):
            malformed.append((line_no, f"non-finite weight {weight!r}"))
            continue
        timestamp = None
        if fmt.timestamp_col is not None:
            try:
                timestamp = int(parts[fmt.timestamp_col])
            except ValueError:
                malformed.append((line_no, f"bad timestamp {parts[fmt.timestamp_col]!r}"))
                continue
        records.append(EdgeRecord(src, dst, weight, timestamp))

    if saw_data and not records:
        raise ParseError(
            f"every data line malformed; first: line {malformed[0][0]}: {malformed[0][1]}"
        )
    return ParseResult(records, malformed)


def _read_lines(stream):
    if isinstance(stream, bytes):
        try:
            return stream.decode("utf-8").splitlines()
        except UnicodeDecodeError as exc:
            raise ParseError(f"unreadable stream: {exc}") from exc
    if isinstance(stream, str):
        return stream.splitlines()
    data = stream.read()
    if isinstance(data, bytes):
        try:
            return data.decode("utf-8").splitlines()
        except UnicodeDecodeError as exc:
            raise ParseError(f"unreadable stream: {exc}") from exc
    return data.splitlines()


def normalize_weights(records, scheme="maxabs"):
    """Map raw weights into [-1, 1] and drop zero-weight records.

    Schemes: 'maxabs' divides by max |weight|; 'const:<c>' divides by c;
    'identity' keeps weights (they must already be in range). A zero
    weight means "no edge" in the adjacency convention, so such records
    are removed and counted. Returns (records, n_dropped_zero).
    """
    kind, const = _parse_norm_scheme(scheme)
    records = list(records)
    if kind == "maxabs":
        if not records:
            raise ConfigError("maxabs normalization needs at least one record")
        scale = max(abs(r.weight) for r in records)
        if scale == 0.0:
            raise ConfigError("all weights zero; maxabs normalization undefined")
    elif kind == "const":
        scale = const
    else:
        scale = 1.0

    out = []
    dropped = 0
    for r in records:
        w = r.weight / scale
        if w == 0.0:
            dropped += 1
            continue
        if not -1.0 <= w <= 1.0:
            raise ConfigError(
                f"normalized weight {w} out of [-1, 1] for ({r.src!r}, {r.dst!r}); "
                f"check the normalization scheme"
            )
        out.append(EdgeRecord(r.src, r.dst, w, r.timestamp))
    return out, dropped


def _parse_norm_scheme(scheme):
    if scheme in ("maxabs", "identity"):
        return scheme, None
    if isinstance(scheme, str) and scheme.startswith("const:"):
        try:
            c = float(scheme.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad normalization scheme {scheme!r}")
        if c <= 0:
            raise ConfigError("normalization constant must be positive")
        return "const", c
    raise ConfigError(f"unknown normalization scheme {scheme!r}")


def dedupe_edges(records, policy="keeplast"):
    """Collapse repeated (src, dst) pairs to one record.

    'keeplast' prefers the highest timestamp (input order breaks ties and
    covers missing timestamps), 'keepfirst' the lowest, 'mean' averages
    the raw weights (timestamps dropped). Output preserves the first-
    appearance order of pairs.
    """
    if policy not in ("keeplast", "keepfirst", "mean"):
        raise ConfigError(f"unknown dedupe policy {policy!r}")

    order = []
    groups = {}
    for pos, r in enumerate(records):
        key = (r.src, r.dst)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append((pos, r))

    out = []
    for key in order:
        entries = groups[key]
        if policy == "mean":
            w = sum(r.weight for _, r in entries) / len(entries)
            out.append(EdgeRecord(key[0], key[1], w, None))
        else:
            def sort_key(item):
                pos, r = item
                ts = r.timestamp if r.timestamp is not None else 0
                return (ts, pos)
            chosen = max(entries, key=sort_key) if policy == "keeplast" else min(entries, key=sort_key)
            out.append(chosen[1])
    return out


def init_opinions(g: SignedDigraph, scheme="uniform", seed=0):
    """Draw an internal-opinion vector s with every entry in [-1, 1].

    'uniform' ~ U(-1, 1); 'normal' ~ N(0, 1) clipped into range;
    'degree' scales absolute in-trust column sums by their maximum.
    """
    if isinstance(scheme, InitScheme):
        kind, seed = scheme.kind, scheme.seed
    else:
        kind = scheme
    if g.n < 1:
        raise ConfigError("cannot initialize opinions on an empty graph")
    rng = np.random.default_rng(seed)
    if kind == "uniform":
        return rng.uniform(-1.0, 1.0, g.n)
    if kind == "normal":
        return np.clip(rng.standard_normal(g.n), -1.0, 1.0)
    if kind == "degree":
        col = g.in_trust_sums(absolute=True)
        top = col.max() if col.size else 0.0
        if top == 0.0:
            raise ConfigError("degree initializer undefined on a graph with no edges")
        return col / top
    raise ConfigError(f"unknown init scheme {kind!r}")


def gen_synthetic(n, edge_prob, negative_prob, weight_dist="uniform", seed=0):
    """Random signed digraph: each ordered pair (i, j), i != j, is an edge
    with probability edge_prob; magnitudes come from weight_dist over
    (0, 1] ('uniform' or 'const:<v>'); signs flip negative with
    probability negative_prob. Fully determined by seed.
    """
    if n < 2:
        raise ConfigError("synthetic graphs need n >= 2")
    if not 0.0 < edge_prob <= 1.0:
        raise ConfigError("edge probability must be in (0, 1]")
    if not 0.0 <= negative_prob <= 1.0:
        raise ConfigError("negative probability must be in [0, 1]")

    rng = np.random.default_rng(seed)
    present = rng.random((n, n)) < edge_prob
    np.fill_diagonal(present, False)
    src, dst = np.nonzero(present)

    m = src.size
    if weight_dist == "uniform":
        mag = 1.0 - rng.random(m)  # (0, 1]
    elif isinstance(weight_dist, str) and weight_dist.startswith("const:"):
        v = float(weight_dist.split(":", 1)[1])
        if not 0.0 < v <= 1.0:
            raise ConfigError("constant magnitude must be in (0, 1]")
        mag = np.full(m, v)
    else:
        raise ConfigError(f"unknown weight distribution {weight_dist!r}")
    neg = rng.random(m) < negative_prob
    wt = np.where(neg, -mag, mag)

    return SignedDigraph.from_arrays(n, src.astype(np.int64), dst.astype(np.int64), wt)


def write_edge_list(records_or_graph, path, fmt: EdgeListFormat | None = None):
    """Emit records (or a graph's edges) in the delimited input format."""
    fmt = fmt or EdgeListFormat()
    if isinstance(records_or_graph, SignedDigraph):
        rows = [(a, b, w, None) for a, b, w in records_or_graph.edge_list()]
    else:
        rows = [(r.src, r.dst, r.weight, r.timestamp) for r in records_or_graph]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for src, dst, w, ts in rows:
            cells = [src, dst, repr(float(w))]
            if ts is not None:
                cells.append(str(ts))
            fh.write(fmt.delimiter.join(cells) + "\n")


def load_graph_file(path, fmt: EdgeListFormat | None = None,
                    normalize="identity", dedupe="keeplast"):
    """File -> parse -> dedupe -> normalize -> SignedDigraph pipeline."""
    from .graph import build_graph

    with open(path, "rb") as fh:
        result = parse_edge_list(fh, fmt)
    records = dedupe_edges(result.records, dedupe)
    records, _ = normalize_weights(records, normalize)
    return build_graph([(r.src, r.dst, r.weight) for r in records])
