"""Append-only JSON-lines file of verified witnesses."""

from __future__ import annotations

import json
import logging
import os
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .core import InputError, Pfa, gap, validate_pfa, word, word_str

log = logging.getLogger(__name__)

STORE_ENV = "PFACX_STORE"
DEFAULT_STORE = "witnesses.jsonl"


@dataclass(frozen=True)
class StoredWitness:
    word: tuple
    k: int
    pfa: Pfa
    exact_gap: Fraction
    provenance: str
    timestamp: float

    def to_json(self) -> dict:
        return {"word": word_str(self.word), "k": self.k, "witness": self.pfa.to_json(),
                "exact_gap": str(self.exact_gap), "provenance": self.provenance, "timestamp": self.timestamp}


def default_store_path() -> Path:
    return Path(os.environ.get(STORE_ENV, DEFAULT_STORE))


def _verify(w, A: Pfa) -> Fraction:
    bad = validate_pfa(A)
    if bad:
        raise InputError("; ".join(map(str, bad)))
    return Fraction(gap(A, w))


class WitnessStore:
    """Witness records keyed by (word, k).

    Records are re-verified in exact arithmetic when read; the file is only
    ever appended to, and on reading, the record with the larger gap wins
    for each key.
    """

    def __init__(self, path=None):
        self.path = Path(path) if path is not None else default_store_path()

    def add(self, w, A: Pfa, provenance: str = "user") -> StoredWitness:
        w = word(w)
        g = _verify(w, A)
        if g <= 0:
            raise InputError(f"gap of {word_str(w)} is {g}, not positive")
        rec = StoredWitness(w, A.k, A, g, provenance, time.time())
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a") as fh:
            fh.write(json.dumps(rec.to_json()) + "\n")
        return rec

    def _read(self):
        """Yield ``(line_number, record or error message)`` for every line."""
        if not self.path.exists():
            return
        with self.path.open() as fh:
            for no, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    d = json.loads(line)
                    w = word(d["word"])
                    A = Pfa.from_json(d["witness"])
                    g = _verify(w, A)
                    if g <= 0:
                        raise InputError(f"gap {g} is not positive")
                    if str(g) != d.get("exact_gap", str(g)):
                        raise InputError(f"stored gap {d['exact_gap']} but recomputed {g}")
                    yield no, StoredWitness(w, A.k, A, g, d.get("provenance", ""), d.get("timestamp", 0.0))
                except (InputError, KeyError, TypeError, ValueError) as exc:
                    yield no, f"line {no}: {exc}"

    def load(self, strict: bool = False) -> dict:
        """Best record per (word, k); bad lines are skipped (or raised if strict)."""
        best: dict = {}
        for _, rec in self._read():
            if isinstance(rec, str):
                if strict:
                    raise InputError(rec)
                log.warning("skipping %s", rec)
                continue
            key = (rec.word, rec.k)
            if key not in best or rec.exact_gap > best[key].exact_gap:
                best[key] = rec
        return best

    def records(self) -> list[StoredWitness]:
        return sorted(self.load().values(), key=lambda r: (len(r.word), r.word, r.k))

    def verify(self) -> list[str]:
        """Problems found on re-verification; empty when every line is sound."""
        return [rec for _, rec in self._read() if isinstance(rec, str)]
