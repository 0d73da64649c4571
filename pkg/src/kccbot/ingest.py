"""Ingestion of Kisan Call Center records from the open-data endpoint and CSV files.

Every load path reports what it dropped: rows failing validation are collected
into a rejects report instead of disappearing silently.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import asdict, dataclass, field
from datetime import date, datetime
from typing import Callable, Iterable

from kccbot.errors import HeaderMismatch, InvalidSpec, NetworkError, ParseError

ENDPOINT_URL = "http://dackkms.gov.in/Account/API/kKMS_QueryData.aspx"

# Canonical CSV column order. Header matching is tolerant of spacing,
# casing and underscores ("Query Type" == "QueryType" == "query_type").
CSV_COLUMNS = [
    "Season",
    "Sector",
    "Category",
    "Crop",
    "QueryType",
    "QueryText",
    "KccAnswer",
    "StateName",
    "District",
    "BlockName",
    "CreatedOn",
]

_FIELD_ALIASES = {
    "season": "season",
    "sector": "sector",
    "category": "category",
    "crop": "crop",
    "querytype": "query_type",
    "querytext": "query_text",
    "kccanswer": "kcc_answer",
    "kccans": "kcc_answer",
    "statename": "state_name",
    "district": "district",
    "districtname": "district",
    "blockname": "block_name",
    "createdon": "created_on",
}

_REQUIRED_COLUMNS = {
    "season": "Season",
    "sector": "Sector",
    "category": "Category",
    "crop": "Crop",
    "query_type": "QueryType",
    "query_text": "QueryText",
    "kcc_answer": "KccAnswer",
    "state_name": "StateName",
    "district": "District",
    "block_name": "BlockName",
    "created_on": "CreatedOn",
}

_DATE_FORMATS = ("%d/%m/%Y", "%d-%m-%Y", "%Y/%m/%d")


@dataclass
class KccRecord:
    """One historical query/answer row with its full metadata."""

    season: str
    sector: str
    category: str
    crop: str
    query_type: str
    query_text: str
    kcc_answer: str
    state_name: str
    district: str
    block_name: str
    created_on: date


@dataclass
class RejectedRow:
    """A row that failed validation: where it was and which rule it broke."""

    row: int
    field: str
    rule: str


@dataclass
class LoadResult:
    """Accepted records plus the rejects report for one load."""

    records: list[KccRecord] = field(default_factory=list)
    rejects: list[RejectedRow] = field(default_factory=list)

    @property
    def total(self) -> int:
        return len(self.records) + len(self.rejects)


@dataclass(frozen=True)
class FetchSpec:
    """Parameters of one endpoint catalogue: state, district, month, year."""

    state_cd: str
    district_cd: str
    month: str
    year: str

    def validate(self) -> None:
        checks = [
            ("state_cd", self.state_cd, r"\d{2}"),
            ("district_cd", self.district_cd, r"\d{4}"),
            ("month", self.month, r"\d{2}"),
            ("year", self.year, r"\d{4}"),
        ]
        for name, value, pattern in checks:
            if not re.fullmatch(pattern, value):
                raise InvalidSpec(f"{name}={value!r} does not match {pattern}")
        if not 1 <= int(self.month) <= 12:
            raise InvalidSpec(f"month={self.month!r} outside 01-12")


def render_fetch_url(spec: FetchSpec) -> str:
    """Render the endpoint URL for a spec; byte-stable for equal specs."""
    spec.validate()
    return (
        f"{ENDPOINT_URL}?StateCD={spec.state_cd}"
        f"&DistrictCd={spec.district_cd}&Month={spec.month}&Year={spec.year}"
    )


def parse_created_on(raw: str) -> date:
    """Parse the CreatedOn field; ISO first, then the common dd/mm/yyyy forms."""
    text = raw.strip()
    if not text:
        raise ValueError("empty date")
    try:
        return datetime.fromisoformat(text).date()
    except ValueError:
        pass
    for fmt in _DATE_FORMATS:
        try:
            return datetime.strptime(text, fmt).date()
        except ValueError:
            continue
    raise ValueError(f"unparseable date: {raw!r}")


def _normalize_key(name: str) -> str:
    return re.sub(r"[^a-z0-9]", "", name.lower())


def _row_to_record(row: dict[str, str], row_no: int) -> tuple[KccRecord | None, RejectedRow | None]:
    """Validate one canonical-keyed row. Returns (record, None) or (None, reject)."""
    query_text = (row.get("query_text") or "").strip()
    if not query_text:
        return None, RejectedRow(row_no, "query_text", "empty")
    kcc_answer = (row.get("kcc_answer") or "").strip()
    if not kcc_answer:
        return None, RejectedRow(row_no, "kcc_answer", "empty")
    raw_date = (row.get("created_on") or "").strip()
    try:
        created_on = parse_created_on(raw_date)
    except ValueError:
        return None, RejectedRow(row_no, "created_on", "unparseable date")
    record = KccRecord(
        season=(row.get("season") or "").strip(),
        sector=(row.get("sector") or "").strip(),
        category=(row.get("category") or "").strip(),
        crop=(row.get("crop") or "").strip(),
        query_type=(row.get("query_type") or "").strip(),
        query_text=query_text,
        kcc_answer=kcc_answer,
        state_name=(row.get("state_name") or "").strip(),
        district=(row.get("district") or "").strip(),
        block_name=(row.get("block_name") or "").strip(),
        created_on=created_on,
    )
    return record, None


def fetch_records(spec: FetchSpec, transport: Callable[[str], str]) -> list[KccRecord]:
    """Fetch and parse one catalogue through an abstract transport.

    `transport` takes a URL and returns the response body; tests pass
    recorded fixtures, the CLI passes a real HTTP client. An empty result
    set yields an empty list. Malformed payloads (bad JSON, wrong shape,
    rows breaking validation) raise ParseError carrying the spec.
    """
    url = render_fetch_url(spec)
    try:
        body = transport(url)
    except Exception as exc:
        raise NetworkError(f"fetch failed for {url}: {exc}", spec=spec) from exc
    try:
        payload = json.loads(body)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON payload: {exc}", spec=spec) from exc

    if isinstance(payload, dict):
        wrapped = next(
            (
                v
                for k, v in payload.items()
                if _normalize_key(k) in ("data", "records", "rows") and isinstance(v, list)
            ),
            None,
        )
        if wrapped is None:
            raise ParseError("payload object has no record array", spec=spec)
        payload = wrapped
    if not isinstance(payload, list):
        raise ParseError("payload is neither a record array nor a wrapped one", spec=spec)

    records = []
    for i, item in enumerate(payload, start=1):
        if not isinstance(item, dict):
            raise ParseError(f"row {i} is not an object", spec=spec)
        row = {_FIELD_ALIASES.get(_normalize_key(k), None): str(v) for k, v in item.items()}
        row.pop(None, None)
        record, reject = _row_to_record(row, i)
        if reject is not None:
            raise ParseError(f"row {reject.row}: {reject.field} {reject.rule}", spec=spec)
        records.append(record)
    return records


def requests_transport(url: str, timeout: float = 30.0) -> str:
    """Default live transport for the CLI."""
    import requests

    resp = requests.get(url, timeout=timeout)
    resp.raise_for_status()
    return resp.text


def load_csv(path) -> LoadResult:
    """Load records from a KCC CSV export.

    Row numbers in the rejects report are 1-based data-row positions
    (header excluded).
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise HeaderMismatch(list(_REQUIRED_COLUMNS.values()))
        mapping = {}
        for col_idx, name in enumerate(header):
            fld = _FIELD_ALIASES.get(_normalize_key(name))
            if fld is not None and fld not in mapping:
                mapping[fld] = col_idx
        missing = [canon for fld, canon in _REQUIRED_COLUMNS.items() if fld not in mapping]
        if missing:
            raise HeaderMismatch(missing)

        result = LoadResult()
        for row_no, cells in enumerate(reader, start=1):
            row = {fld: cells[idx] if idx < len(cells) else "" for fld, idx in mapping.items()}
            record, reject = _row_to_record(row, row_no)
            if record is not None:
                result.records.append(record)
            else:
                result.rejects.append(reject)
    return result


def save_csv(records: Iterable[KccRecord], path) -> None:
    """Write records as CSV with canonical headers; load_csv round-trips it."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow(
                [
                    r.season,
                    r.sector,
                    r.category,
                    r.crop,
                    r.query_type,
                    r.query_text,
                    r.kcc_answer,
                    r.state_name,
                    r.district,
                    r.block_name,
                    r.created_on.isoformat(),
                ]
            )


def save_jsonl(records: Iterable[KccRecord], path) -> None:
    """Write the raw corpus as one-record-per-line JSON."""
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            row = asdict(r)
            row["created_on"] = r.created_on.isoformat()
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def load_jsonl(path) -> list[KccRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"line {line_no}: {exc}") from exc
            row["created_on"] = parse_created_on(row["created_on"])
            records.append(KccRecord(**row))
    return records


def save_rejects_csv(rejects: Iterable[RejectedRow], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "field", "rule"])
        for rej in rejects:
            writer.writerow([rej.row, rej.field, rej.rule])


def filter_window(records: list[KccRecord], years: int) -> list[KccRecord]:
    """Keep records from the most recent `years` calendar years of the corpus.

    The window is anchored to the maximum created_on year present, so a
    2006-2020 corpus with years=5 keeps 2016-2020.
    """
    if years <= 0 or not records:
        return []
    max_year = max(r.created_on.year for r in records)
    cutoff = max_year - years + 1
    return [r for r in records if r.created_on.year >= cutoff]
