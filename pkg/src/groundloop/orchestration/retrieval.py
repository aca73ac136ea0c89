"""Keyword retrieval over the bundled documentation, public-operation
docstrings, and example specifications.

Ranking is term-frequency times inverse document frequency with a title
boost; ties break on entry id, so identical corpus and query always give
identical ranking.
"""

from __future__ import annotations

import importlib
import json
import math
import re
from dataclasses import dataclass, field
from importlib import resources

from ..errors import NotFoundError, QueryError

_TOKEN = re.compile(r"[a-z0-9]+")
_TITLE_BOOST = 2.5

# public operations per module; every entry must carry a docstring
PUBLIC_OPERATIONS: dict[str, tuple[str, ...]] = {
    "groundloop.meshing": ("build_cartesian_mesh", "apply_undulation", "apply_dome",
                           "compute_geometry", "export_grid_text"),
    "groundloop.fields": ("moment_match", "sample_fields", "pore_volume"),
    "groundloop.fluids": ("relperm", "density", "mobility_ratio", "fractional_flow"),
    "groundloop.wells": ("setup_vertical_well", "peaceman_wi", "derive_injection_rates"),
    "groundloop.sim.assembly": ("assemble_system", "connection_pressures", "scaled_norms"),
    "groundloop.sim.driver": ("newton_solve", "simulate", "pvi_series", "breakthrough_pvi"),
    "groundloop.modelspec.schema": ("parse_spec",),
    "groundloop.modelspec.resolver": ("detect_ambiguities", "resolve", "defaults_audit",
                                      "assemble_unaudited"),
    "groundloop.modelspec.serialize": ("canonical_serialize",),
    "groundloop.modelspec.build": ("build_simulation", "run_config"),
    "groundloop.reconstruction.masks": ("degrade", "reconstruct"),
    "groundloop.reconstruction.diffing": ("diff_bundles",),
    "groundloop.reconstruction.matrix": ("audit_matrix",),
    "groundloop.orchestration.retrieval": ("keyword_search", "docstring_lookup",
                                           "example_search"),
    "groundloop.orchestration.lint": ("static_check",),
    "groundloop.orchestration.classify": ("classify_diagnostics",),
    "groundloop.orchestration.session": ("run_loop", "replay"),
}


def tokenize(text: str) -> list[str]:
    """Lowercase word tokens; identifiers split on underscores and a light
    plural strip keeps 'well' and 'wells' on the same posting."""
    out = []
    for tok in _TOKEN.findall(text.lower()):
        if len(tok) > 3 and tok.endswith("s") and not tok.endswith("ss"):
            tok = tok[:-1]
        out.append(tok)
    return out


@dataclass(frozen=True)
class IndexEntry:
    entry_id: str
    kind: str          # doc | docstring | example
    title: str
    body: str

    def snippet(self, terms: set[str], width: int = 160) -> str:
        for line in self.body.splitlines():
            toks = set(tokenize(line))
            if toks & terms:
                return line.strip()[:width]
        return self.body.strip().splitlines()[0][:width] if self.body.strip() else ""


@dataclass
class DocIndex:
    entries: dict[str, IndexEntry] = field(default_factory=dict)
    postings: dict[str, dict[str, int]] = field(default_factory=dict)  # term -> id -> tf
    title_terms: dict[str, set[str]] = field(default_factory=dict)

    def add(self, entry: IndexEntry) -> None:
        self.entries[entry.entry_id] = entry
        terms = tokenize(entry.title) + tokenize(entry.body)
        for t in terms:
            self.postings.setdefault(t, {}).setdefault(entry.entry_id, 0)
            self.postings[t][entry.entry_id] += 1
        self.title_terms[entry.entry_id] = set(tokenize(entry.title))

    def __len__(self) -> int:
        return len(self.entries)


def keyword_search(index: DocIndex, query: str, k: int = 10,
                   kind: str | None = None) -> list[dict]:
    """Top-k entries for the query, ranked by tf-idf with a title boost;
    deterministic tie-break on entry id."""
    terms = tokenize(query)
    if not terms:
        raise QueryError("empty query")
    n_docs = max(len(index), 1)
    scores: dict[str, float] = {}
    for t in terms:
        posting = index.postings.get(t)
        if not posting:
            continue
        idf = math.log(1.0 + n_docs / len(posting))
        for entry_id, tf in posting.items():
            if kind and index.entries[entry_id].kind != kind:
                continue
            boost = _TITLE_BOOST if t in index.title_terms[entry_id] else 1.0
            scores[entry_id] = scores.get(entry_id, 0.0) + tf * idf * boost
    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
    term_set = set(terms)
    return [
        {"entry_id": eid, "kind": index.entries[eid].kind,
         "title": index.entries[eid].title, "score": score,
         "snippet": index.entries[eid].snippet(term_set)}
        for eid, score in ranked
    ]


def docstring_lookup(index: DocIndex, symbol: str) -> dict:
    """Exact lookup of a public operation's docstring entry."""
    entry_id = f"docstring:{symbol}"
    entry = index.entries.get(entry_id)
    if entry is None:
        # allow fully qualified names too
        for eid, e in index.entries.items():
            if e.kind == "docstring" and eid.endswith("." + symbol):
                entry = e
                entry_id = eid
                break
    if entry is None:
        raise NotFoundError(f"no docstring entry for {symbol!r}")
    return {"entry_id": entry_id, "title": entry.title, "body": entry.body}


def example_search(index: DocIndex, query: str, k: int = 5) -> list[dict]:
    """keyword_search restricted to bundled example specifications."""
    return keyword_search(index, query, k=k, kind="example")


def _asset_text(package: str, name: str) -> str:
    return resources.files(package).joinpath(name).read_text(encoding="utf-8")


def build_default_index() -> DocIndex:
    """Index the bundled docs, the example specs, and every registered
    public operation's docstring."""
    index = DocIndex()
    docs_root = resources.files("groundloop.assets").joinpath("docs")
    for item in sorted(docs_root.iterdir(), key=lambda p: p.name):
        if not item.name.endswith(".md"):
            continue
        text = item.read_text(encoding="utf-8")
        first = text.strip().splitlines()[0].lstrip("# ").strip()
        index.add(IndexEntry(f"doc:{item.name[:-3]}", "doc", first, text))

    examples_root = resources.files("groundloop.assets").joinpath("examples")
    for item in sorted(examples_root.iterdir(), key=lambda p: p.name):
        if not item.name.endswith(".json"):
            continue
        raw = json.loads(item.read_text(encoding="utf-8"))
        title = raw.get("meta", {}).get("title", item.name)
        index.add(IndexEntry(f"example:{item.name[:-5]}", "example", title,
                             item.read_text(encoding="utf-8")))

    for module_name, symbols in PUBLIC_OPERATIONS.items():
        module = importlib.import_module(module_name)
        for symbol in symbols:
            fn = getattr(module, symbol)
            doc = fn.__doc__ or ""
            index.add(IndexEntry(f"docstring:{symbol}", "docstring",
                                 symbol, doc))
    return index
