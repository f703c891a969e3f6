import json
import sys
from typing import Iterable, List, Optional

from app.scene.model import RelationTriple
from app.utils.errors import ParseError, TripleIoError
from app.utils.formatters import record_to_triple, render_lines, render_table
from app.utils.logger import log_event

FORMATS = ("lines", "table")


def render_triples(triples: Iterable[RelationTriple], fmt: str = "lines") -> str:
    if fmt == "lines":
        return render_lines(triples)
    if fmt == "table":
        return render_table(triples)
    raise ValueError(f"unknown triple format {fmt!r}; expected one of {FORMATS}")


def write_triples(triples: Iterable[RelationTriple], path: Optional[str], fmt: str = "lines"):
    """Write sorted triples; `None` or "-" writes to stdout.

    Raises:
        TripleIoError: the destination cannot be written.
    """
    triples = list(triples)
    text = render_triples(triples, fmt)
    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as e:
        raise TripleIoError(f"cannot write triples: {e}", location=path) from e
    log_event("TRIPLES_WRITE", f"Wrote {len(triples)} triples to {path} ({fmt})")


def read_triples(path: str) -> List[RelationTriple]:
    """Parse a `lines` file back into triples."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as e:
        raise TripleIoError(f"cannot read triples: {e}", location=path) from e

    triples = []
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            triples.append(record_to_triple(json.loads(line)))
        except (json.JSONDecodeError, KeyError, ValueError) as e:
            raise ParseError(f"bad triple record: {e}", location=f"{path}:{number}") from e
    return triples
