"""The bundled example diagrams."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .dsl import DagDocument, parse
from .paths import CausalQuery

CORPUS_IDS = ("fig1", "flood", "bridges", "quake", "fire")


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    text: str
    document: DagDocument

    @property
    def default_query(self) -> CausalQuery:
        return self.document.query


@lru_cache(maxsize=None)
def load(corpus_id: str) -> CorpusEntry:
    if corpus_id not in CORPUS_IDS:
        raise KeyError(f"unknown corpus entry {corpus_id!r}; expected one of {', '.join(CORPUS_IDS)}")
    text = resources.files(__package__).joinpath("corpus", f"{corpus_id}.dag").read_text(encoding="utf-8")
    return CorpusEntry(corpus_id, text, parse(text))


def load_all() -> list[CorpusEntry]:
    return [load(c) for c in CORPUS_IDS]
