"""Erdős–Rényi and Barabási–Albert generators plus corpus assembly.

Randomness follows the package seeding contract: graph index i under a
spec's master seed consumes derive_seed(master, 2*i) for its parameters and
derive_seed(master, 2*i + 1) for its edges, so corpora are reproducible
graph-by-graph and independent of generation order.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .graph import Graph, _build_graph
from .seeding import derive_seed, make_rng

FAMILIES = ("ER", "BA")


def erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """G(n, p): each of the C(n, 2) pairs kept independently with probability p."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability {p} outside [0, 1]")
    total = n * (n - 1) // 2
    rng = make_rng(seed)
    hits = np.nonzero(rng.random(total) < p)[0]
    # row i of the (i, j) enumeration starts at i*n - i*(i+1)/2
    starts = np.arange(n, dtype=np.int64) * n - (
        np.arange(n, dtype=np.int64) * (np.arange(n, dtype=np.int64) + 1)
    ) // 2
    rows = np.searchsorted(starts, hits, side="right") - 1
    cols = hits - starts[rows] + rows + 1
    edges = {(int(i), int(j)) for i, j in zip(rows, cols)}
    return _build_graph(n, edges)


def barabasi_albert(n: int, m: int, seed: int) -> Graph:
    """Preferential attachment starting from a complete graph on m nodes.

    Each new node draws m distinct targets with probability proportional to
    current degree (rejection on duplicates; uniform while all degrees are
    zero, which only happens for m = 1).  Edge count is always
    C(m, 2) + m*(n - m).
    """
    if m < 1 or m >= n:
        raise ValueError(f"need 1 <= m < n, got m={m}, n={n}")
    rng = make_rng(seed)
    edges = {(i, j) for i in range(m) for j in range(i + 1, m)}
    deg = np.zeros(n, dtype=np.int64)
    deg[:m] = m - 1
    for t in range(m, n):
        weights = deg[:t]
        total = int(weights.sum())
        cum = np.cumsum(weights)
        chosen: set[int] = set()
        while len(chosen) < m:
            if total > 0:
                target = int(np.searchsorted(cum, rng.random() * total, side="right"))
            else:
                target = int(rng.integers(t))
            chosen.add(target)
        for target in chosen:
            edges.add((target, t))
            deg[target] += 1
        deg[t] = m
    return _build_graph(n, edges)


@dataclass(frozen=True)
class GeneratorSpec:
    """One batch of same-family graphs with parameter ranges and a master seed.

    ER specs take either an explicit probability range or an expected
    average-degree range (p is then min(degree/(n-1), 1)); BA specs take an
    attachment-count range.  Node counts are drawn log-uniformly.
    """

    family: str
    count: int
    nodes_range: tuple[int, int]
    master_seed: int
    p_range: "tuple[float, float] | None" = None
    avg_degree_range: "tuple[float, float] | None" = None
    m_range: "tuple[int, int] | None" = None

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.count < 0:
            raise ValueError("count must be non-negative")
        lo, hi = self.nodes_range
        if not 1 <= lo <= hi:
            raise ValueError(f"bad node range [{lo}, {hi}]")
        if self.family == "ER":
            if (self.p_range is None) == (self.avg_degree_range is None):
                raise ValueError("ER spec needs exactly one of p or avg-degree range")
            if self.p_range is not None:
                plo, phi = self.p_range
                if not 0.0 <= plo <= phi <= 1.0:
                    raise ValueError(f"bad probability range [{plo}, {phi}]")
            else:
                dlo, dhi = self.avg_degree_range
                if not 0.0 <= dlo <= dhi:
                    raise ValueError(f"bad degree range [{dlo}, {dhi}]")
            if self.m_range is not None:
                raise ValueError("m range is a BA parameter")
        else:
            if self.m_range is None:
                raise ValueError("BA spec needs an m range")
            if self.p_range is not None or self.avg_degree_range is not None:
                raise ValueError("p/degree ranges are ER parameters")
            mlo, mhi = self.m_range
            if not 1 <= mlo <= mhi < lo:
                raise ValueError(f"need 1 <= m_lo <= m_hi < n_lo, got [{mlo}, {mhi}]")


@dataclass(frozen=True)
class CorpusEntry:
    """One generated graph plus the manifest metadata describing it."""

    name: str
    category: str
    graph: Graph
    params: str
    seed: int


def _draw_nodes(rng: np.random.Generator, lo: int, hi: int) -> int:
    n = int(round(math.exp(rng.uniform(math.log(lo), math.log(hi)))))
    return min(max(n, lo), hi)


def generate_entry(spec: GeneratorSpec, local_index: int, global_index: int) -> CorpusEntry:
    """Realize one graph of a spec.

    Graph i of a spec draws its parameters with derive_seed(master, 2i) and
    builds the graph with derive_seed(master, 2i+1), so entries can be
    produced independently and in any order.
    """
    prng = make_rng(derive_seed(spec.master_seed, 2 * local_index))
    graph_seed = derive_seed(spec.master_seed, 2 * local_index + 1)
    n = _draw_nodes(prng, *spec.nodes_range)
    if spec.family == "ER":
        if spec.p_range is not None:
            p = float(prng.uniform(*spec.p_range))
        else:
            d = float(prng.uniform(*spec.avg_degree_range))
            p = min(d / (n - 1), 1.0) if n > 1 else 0.0
        graph = erdos_renyi(n, p, graph_seed)
        params = f"p={format(p, '.17g')}"
    else:
        mlo, mhi = spec.m_range
        m = int(prng.integers(mlo, mhi + 1))
        graph = barabasi_albert(n, m, graph_seed)
        params = f"m={m}"
    return CorpusEntry(
        name=f"{spec.family.lower()}_{global_index:04d}",
        category=spec.family,
        graph=graph,
        params=params,
        seed=graph_seed,
    )


def generate_corpus(specs: Iterable[GeneratorSpec]) -> list[CorpusEntry]:
    """Realize every spec in order, naming graphs by global corpus index."""
    entries: list[CorpusEntry] = []
    index = 0
    for spec in specs:
        spec.validate()
        for i in range(spec.count):
            entries.append(generate_entry(spec, i, index))
            index += 1
    return entries


def default_corpus_specs(master_seed: int) -> list[GeneratorSpec]:
    """The stock 125-graph corpus: 50 BA then 75 ER graphs."""
    return [
        GeneratorSpec(
            family="BA",
            count=50,
            nodes_range=(100, 2000),
            m_range=(2, 10),
            master_seed=derive_seed(master_seed, 0),
        ),
        GeneratorSpec(
            family="ER",
            count=75,
            nodes_range=(100, 2000),
            avg_degree_range=(4.0, 50.0),
            master_seed=derive_seed(master_seed, 1),
        ),
    ]


_SECTION_KEYS = {
    "ba": {"count", "nodes_min", "nodes_max", "m_min", "m_max", "seed"},
    "er": {
        "count", "nodes_min", "nodes_max",
        "p_min", "p_max", "avg_degree_min", "avg_degree_max", "seed",
    },
}


def parse_generator_spec(text: str, default_master: int) -> list[GeneratorSpec]:
    """Parse a sectioned key=value corpus spec file.

    An optional [corpus] section sets master_seed (falling back to
    `default_master`); each [ba]/[er] section describes one GeneratorSpec.
    A family section without an explicit seed gets one derived from the
    corpus master and its position in the file.
    """
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ValueError(f"malformed generator spec: {exc}") from None

    master = default_master
    if parser.has_section("corpus"):
        extra = set(parser["corpus"]) - {"master_seed"}
        if extra:
            raise ValueError(f"unknown [corpus] keys: {sorted(extra)}")
        if "master_seed" in parser["corpus"]:
            master = parser.getint("corpus", "master_seed")

    specs = []
    family_sections = [s for s in parser.sections() if s != "corpus"]
    for idx, section in enumerate(family_sections):
        # Sections are "[ba]"/"[er]", optionally qualified ("[er sparse]")
        # since a file may describe several corpora of one family.
        family = section.split()[0].lower() if section.split() else section
        if family not in _SECTION_KEYS:
            raise ValueError(f"unknown generator section [{section}]")
        extra = set(parser[section]) - _SECTION_KEYS[family]
        if extra:
            raise ValueError(f"unknown keys in [{section}]: {sorted(extra)}")
        get = parser[section]
        required = {"count", "nodes_min", "nodes_max"}
        if family == "ba":
            required |= {"m_min", "m_max"}
        missing = required - set(get)
        if missing:
            raise ValueError(f"[{section}] missing keys: {sorted(missing)}")
        for pair in (("p_min", "p_max"), ("avg_degree_min", "avg_degree_max")):
            if (pair[0] in get) != (pair[1] in get):
                raise ValueError(f"[{section}] needs both {pair[0]} and {pair[1]}")
        try:
            count = get.getint("count")
            nodes = (get.getint("nodes_min"), get.getint("nodes_max"))
            seed = get.getint("seed") if "seed" in get else derive_seed(master, idx)
            if family == "ba":
                spec = GeneratorSpec(
                    family="BA",
                    count=count,
                    nodes_range=nodes,
                    m_range=(get.getint("m_min"), get.getint("m_max")),
                    master_seed=seed,
                )
            else:
                p_range = avg_range = None
                if "p_min" in get or "p_max" in get:
                    p_range = (get.getfloat("p_min"), get.getfloat("p_max"))
                if "avg_degree_min" in get or "avg_degree_max" in get:
                    avg_range = (
                        get.getfloat("avg_degree_min"),
                        get.getfloat("avg_degree_max"),
                    )
                spec = GeneratorSpec(
                    family="ER",
                    count=count,
                    nodes_range=nodes,
                    p_range=p_range,
                    avg_degree_range=avg_range,
                    master_seed=seed,
                )
        except (TypeError, ValueError) as exc:
            raise ValueError(f"bad [{section}] section: {exc}") from None
        spec.validate()
        specs.append(spec)
    return specs
