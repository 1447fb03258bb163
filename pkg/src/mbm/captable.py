"""Cap-table ingestion.

Files are UTF-8, comma-delimited, with a required header row. Two layouts:

    agent_id,share,bid      full instance, ready to run
    agent_id,share          table only (no bids)

Share and bid numerals may be decimals ("0.3") or fractions ("3/10"); both
parse exactly, decimals via exact powers of ten. Shares must sum to exactly
1 unless the caller asks for normalization, which rescales by exact
division.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .core import Allocation, BidProfile, MbmConfig
from .errors import DuplicateAgentId, ParseError, SharesDontSumToOne
from .rational import Rational, rational

_HEADERS = (("agent_id", "share", "bid"), ("agent_id", "share"))


@dataclass(frozen=True)
class CapTableRecord:
    """One shareholder row: unique label, exact share, optional bid."""

    agent_id: str
    share: Rational
    bid: Rational | None = None


def _cell_rational(text: str, row: int, column: int) -> Rational:
    try:
        return rational(text)
    except (ValueError, TypeError) as exc:
        raise ParseError(f"not a number: {text!r}", row=row, column=column) from exc


def parse_captable(source, normalize: bool = False) -> list:
    """Parse cap-table text (a string or a readable) into records.

    Raises ParseError with 1-based row/column on malformed cells,
    DuplicateAgentId on repeated labels, and SharesDontSumToOne when the
    share column is off the simplex and ``normalize`` is false.
    """
    if hasattr(source, "read"):
        source = source.read()
    reader = csv.reader(io.StringIO(source))
    rows = [[cell.strip() for cell in row] for row in reader if row]
    if not rows:
        raise ParseError("empty cap table", row=1)

    header = tuple(cell.lower() for cell in rows[0])
    if header not in _HEADERS:
        raise ParseError(
            f"header must be 'agent_id,share[,bid]', got {','.join(rows[0])!r}", row=1
        )
    has_bids = len(header) == 3

    records = []
    seen_ids = set()
    for offset, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ParseError(
                f"expected {len(header)} fields, got {len(row)}", row=offset
            )
        agent_id = row[0]
        if not agent_id:
            raise ParseError("empty agent_id", row=offset, column=1)
        if agent_id in seen_ids:
            raise DuplicateAgentId(f"agent_id {agent_id!r} appears more than once")
        seen_ids.add(agent_id)
        share = _cell_rational(row[1], row=offset, column=2)
        if share < 0:
            raise ParseError(f"negative share {share}", row=offset, column=2)
        bid = None
        if has_bids:
            bid = _cell_rational(row[2], row=offset, column=3)
            if bid < 0:
                raise ParseError(f"negative bid {bid}", row=offset, column=3)
        records.append(CapTableRecord(agent_id=agent_id, share=share, bid=bid))

    if not records:
        raise ParseError("cap table has a header but no rows", row=2)

    total = sum((r.share for r in records), Rational(0))
    if normalize:
        if total == 0:
            raise SharesDontSumToOne(total)
        records = [
            CapTableRecord(r.agent_id, r.share / total, r.bid) for r in records
        ]
    elif total != 1:
        raise SharesDontSumToOne(total)
    return records


def to_instance(records, m_bar: int):
    """Build (Allocation, BidProfile, MbmConfig) from parsed records.

    Every record must carry a bid; table-only files cannot be run.
    """
    missing = [r.agent_id for r in records if r.bid is None]
    if missing:
        raise ParseError(
            f"cap table has no bid column; cannot run for agents {missing}"
        )
    initial = Allocation.from_shares(tuple(r.share for r in records)).validate()
    profile = BidProfile(tuple(r.bid for r in records))
    return initial, profile, MbmConfig(n=len(records), m_bar=m_bar)
