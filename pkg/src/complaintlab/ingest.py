"""Complaint CSV parsing, labeling, dollar extraction, filtering and cleaning."""

import csv
import enum
import io
import logging
import math
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from datetime import date, datetime

from .errors import EncodingError, MalformedRow, MissingColumn

log = logging.getLogger(__name__)

COLUMNS = {
    "date_received": "Date received",
    "product": "Product",
    "issue": "Issue",
    "company": "Company",
    "narrative": "Consumer complaint narrative",
    "company_response": "Company response to consumer",
}

CORPUS_COLUMNS = [
    "date_received", "product", "issue", "company", "narrative",
    "dollar_value", "log_dollar", "meritorious",
]

_DATE_FORMATS = ("%Y-%m-%d", "%m/%d/%Y", "%m/%d/%y")


class Label(enum.Enum):
    MERITORIOUS = "Meritorious"
    NON_MERITORIOUS = "NonMeritorious"
    EXCLUDED = "Excluded"


_RESPONSE_LABELS = {
    "Closed with monetary relief": Label.MERITORIOUS,
    "Closed with non-monetary relief": Label.MERITORIOUS,
    "Closed with explanation": Label.NON_MERITORIOUS,
}


@dataclass(frozen=True)
class RawComplaintRecord:
    date_received: date
    product: str
    issue: str
    company: str
    narrative: str
    company_response: str


@dataclass(frozen=True)
class ComplaintRecord:
    date_received: date | None
    product: str
    issue: str
    company: str
    narrative: str
    dollar_value: float | None
    log_dollar: float | None
    meritorious: bool


@dataclass(frozen=True)
class FilterConfig:
    date_min: date = date(2020, 1, 1)
    date_max: date = date(2024, 12, 31)
    allowed_responses: frozenset = field(default_factory=lambda: frozenset(_RESPONSE_LABELS))
    min_category_frequency: int = 1000
    dollar_min: float = 0.0
    dollar_max: float = 10_000.0
    min_narrative_words: int = 3

    def __post_init__(self):
        if self.date_min > self.date_max:
            raise ValueError("date_min must not exceed date_max")
        if not self.dollar_min < self.dollar_max:
            raise ValueError("dollar_min must be below dollar_max")
        if self.min_category_frequency < 1 or self.min_narrative_words < 1:
            raise ValueError("frequency and word thresholds must be positive")


def parse_date(text):
    text = text.strip()
    for fmt in _DATE_FORMATS:
        try:
            return datetime.strptime(text, fmt).date()
        except ValueError:
            continue
    raise ValueError(f"unparseable date {text!r}")


def _decode(data):
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(exc.start) from None


def parse_complaints_csv(source, delimiter=","):
    """Parse a complaint export into :class:`RawComplaintRecord` objects.

    ``source`` is a binary file object or ``bytes``. Extra columns are ignored.
    """
    data = source if isinstance(source, (bytes, bytearray)) else source.read()
    text = _decode(bytes(data))
    if text.startswith("\ufeff"):
        text = text[1:]
    reader = csv.reader(io.StringIO(text, newline=""), delimiter=delimiter, strict=True)
    try:
        header = next(reader)
    except StopIteration:
        raise MissingColumn(COLUMNS["date_received"]) from None
    except csv.Error as exc:
        raise MalformedRow(1, str(exc)) from None
    positions = {}
    for key, name in COLUMNS.items():
        if name not in header:
            raise MissingColumn(name)
        positions[key] = header.index(name)

    records = []
    while True:
        line_no = reader.line_num + 1
        try:
            row = next(reader)
        except StopIteration:
            break
        except csv.Error as exc:
            raise MalformedRow(line_no, str(exc)) from None
        if not row:
            continue
        if len(row) != len(header):
            raise MalformedRow(line_no, f"expected {len(header)} fields, got {len(row)}")
        try:
            received = parse_date(row[positions["date_received"]])
        except ValueError as exc:
            raise MalformedRow(line_no, str(exc)) from None
        records.append(RawComplaintRecord(
            date_received=received,
            product=row[positions["product"]],
            issue=row[positions["issue"]],
            company=row[positions["company"]],
            narrative=row[positions["narrative"]],
            company_response=row[positions["company_response"]],
        ))
    return records


def derive_label(company_response):
    return _RESPONSE_LABELS.get(company_response, Label.EXCLUDED)


_DOLLAR = re.compile(r"\$\s?((?:\d{1,3}(?:,\d{3})+)|\d+)(\.\d{2})?(?!\d)")


def extract_dollar_value(narrative, dollar_min=0.0, dollar_max=10_000.0):
    """First ``$`` amount in ``(dollar_min, dollar_max]``, or ``None``."""
    for m in _DOLLAR.finditer(narrative):
        value = float(m.group(1).replace(",", "") + (m.group(2) or ""))
        if dollar_min < value <= dollar_max:
            return value
    return None


# Redaction tokens such as XXXX, XX/XX/XXXX or XX/XX/2019.
_REDACTION = re.compile(r"(?<![A-Za-z0-9])[X\d/\-]*X{2,}[X\d/\-]*(?![A-Za-z0-9])")
_WS = re.compile(r"\s+")


def _strip_unparseable(text):
    out = []
    for ch in text:
        if ch.isspace():
            out.append(" ")
        elif ch == "\ufffd" or unicodedata.category(ch) in ("Cc", "Cf", "Cs", "Co", "Cn"):
            continue
        else:
            out.append(ch)
    return "".join(out)


def clean_narrative(text, min_narrative_words=3):
    """Remove redactions and control characters and collapse whitespace.

    Returns ``""`` when fewer than ``min_narrative_words`` words survive.
    """
    text = _strip_unparseable(text)
    text = _REDACTION.sub(" ", text)
    text = _WS.sub(" ", text).strip()
    if len(text.split(" ")) < min_narrative_words or not text:
        return ""
    return text


def filter_records(records, config=None):
    """Apply the date, label, category-frequency and dollar rules.

    Category frequencies are counted once, after the date and label rules and
    before the dollar rule. Narratives that clean to nothing are dropped with
    a logged count.
    """
    config = config or FilterConfig()
    stage = []
    for rec in records:
        if not config.date_min <= rec.date_received <= config.date_max:
            continue
        if rec.company_response not in config.allowed_responses:
            continue
        label = derive_label(rec.company_response)
        if label is Label.EXCLUDED:
            continue
        stage.append((rec, label))

    counts = {col: Counter(getattr(rec, col) for rec, _ in stage) for col in ("product", "issue", "company")}
    out = []
    dropped_empty = 0
    for rec, label in stage:
        if any(counts[col][getattr(rec, col)] <= config.min_category_frequency for col in counts):
            continue
        value = extract_dollar_value(rec.narrative, config.dollar_min, config.dollar_max)
        if value is None:
            continue
        narrative = clean_narrative(rec.narrative, config.min_narrative_words)
        if not narrative:
            dropped_empty += 1
            continue
        out.append(ComplaintRecord(
            date_received=rec.date_received,
            product=rec.product,
            issue=rec.issue,
            company=rec.company,
            narrative=narrative,
            dollar_value=value,
            log_dollar=math.log(value),
            meritorious=label is Label.MERITORIOUS,
        ))
    if dropped_empty:
        log.warning("dropped %d records whose narrative cleaned to empty", dropped_empty)
    return out


def _fmt_float(x):
    return "" if x is None else repr(float(x))


def write_corpus(path, records):
    """Write records in the cleaned-corpus CSV schema."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CORPUS_COLUMNS)
        for r in records:
            w.writerow([
                "" if r.date_received is None else r.date_received.isoformat(),
                r.product, r.issue, r.company, r.narrative,
                _fmt_float(r.dollar_value), _fmt_float(r.log_dollar),
                "true" if r.meritorious else "false",
            ])


def read_corpus(path):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in CORPUS_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise MissingColumn(missing[0])
        out = []
        for i, row in enumerate(reader, start=2):
            if row["meritorious"] not in ("true", "false"):
                raise MalformedRow(i, f"meritorious must be true/false, got {row['meritorious']!r}")
            out.append(ComplaintRecord(
                date_received=date.fromisoformat(row["date_received"]) if row["date_received"] else None,
                product=row["product"],
                issue=row["issue"],
                company=row["company"],
                narrative=row["narrative"],
                dollar_value=float(row["dollar_value"]) if row["dollar_value"] else None,
                log_dollar=float(row["log_dollar"]) if row["log_dollar"] else None,
                meritorious=row["meritorious"] == "true",
            ))
    return out
