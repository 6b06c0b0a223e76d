"""Running-time ratios of Busy Beaver and Placid Platypus witnesses.

For a witness printing ``ones`` ones in ``steps`` steps with ``states`` states::

    r1 = steps / ones
    r2 = ones / states
    r3 = steps * states / ones**2      (= r1 / r2)

Small inputs go through exact rationals.  Astronomically large inputs are
carried as base-10 logarithms in 50-digit decimal arithmetic.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from decimal import ROUND_FLOOR, Context, Decimal, localcontext
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence, Union

from .catalog import PPEntry

PRECISION = 50
DIGIT_THRESHOLD = 30  # exact integers longer than this take the log path
FIXED_LIMIT = 15  # ratios of 10**15 and above print in scientific notation
DECIMALS = 4

Ratio = Union[Fraction, Decimal]  # Decimal ratios hold log10 values


class RecordError(ValueError):
    pass


def _ctx() -> Context:
    return Context(prec=PRECISION, Emax=10**9, Emin=-(10**9))


def _truncate(value: Fraction | Decimal, places: int = DECIMALS) -> str:
    """Truncate toward zero at ``places`` decimals; drop trailing zeros but keep one."""
    scale = 10**places
    units = int(value * scale) if isinstance(value, Fraction) else int((value * scale).to_integral_value(ROUND_FLOOR))
    whole, frac = divmod(units, scale)
    digits = f"{frac:0{places}d}".rstrip("0") or "0"
    return f"{whole}.{digits}"


def _from_log(log10: Decimal) -> tuple[Decimal, int]:
    """Mantissa in [1, 10) and exponent, with log round-off removed at 12 digits."""
    with localcontext(_ctx()):
        exponent = int(log10.to_integral_value(ROUND_FLOOR))
        mantissa = (Decimal(10) ** (log10 - exponent)).quantize(Decimal("1e-11"))
        if mantissa >= 10:
            mantissa /= 10
            exponent += 1
    return mantissa, exponent


def format_ratio(value: Ratio, is_log: bool = False) -> str:
    """Table display: fixed with truncated decimals, or ``m.mmmme+X`` when huge."""
    if not is_log:
        if value < 10**FIXED_LIMIT:
            return _truncate(value)
        exponent = len(str(int(value))) - 1
        return f"{_truncate(Fraction(value) / 10**exponent)}e+{exponent}"
    mantissa, exponent = _from_log(value)
    if exponent < FIXED_LIMIT:
        with localcontext(_ctx()):
            return _truncate(mantissa.scaleb(exponent))
    return f"{_truncate(mantissa)}e+{exponent}"


def format_magnitude(value: int | Decimal) -> str:
    if isinstance(value, int):
        return str(value)
    mantissa, exponent = _from_log(value)
    return f"{format(mantissa.normalize(), 'f')}e+{exponent}"


@dataclass(frozen=True)
class RatioRow:
    """One table row.  With ``is_log`` set, ``ones``/``steps`` and the ratios are log10 values."""

    ones: int | Decimal
    steps: int | Decimal
    states: int
    r1: Ratio
    r2: Ratio
    r3: Ratio
    source: str
    is_log: bool = False

    def sort_key(self) -> tuple[Decimal, Decimal]:
        with localcontext(_ctx()):
            if self.is_log:
                return self.ones, self.r1
            return Decimal(self.ones).log10(), Decimal(self.r1.numerator).log10() - Decimal(self.r1.denominator).log10()

    def formatted(self) -> tuple[str, str, str, str, str]:
        ones = format_magnitude(self.ones)
        return (ones, *(format_ratio(r, self.is_log) for r in (self.r1, self.r2, self.r3)), self.source)


def ratio_row(ones: int, steps: int, states: int, source: str = "") -> RatioRow:
    if ones < 1:
        raise ValueError("ones must be positive")
    if steps < 0 or states < 1:
        raise ValueError("need steps >= 0 and states >= 1")
    r1 = Fraction(steps, ones)
    r2 = Fraction(ones, states)
    return RatioRow(ones, steps, states, r1, r2, r1 / r2, source)


def ratio_row_log(log10_ones: Decimal | str, log10_steps: Decimal | str, states: int, source: str = "") -> RatioRow:
    with localcontext(_ctx()):
        lo = Decimal(log10_ones)
        ls = Decimal(log10_steps)
        if not (lo.is_finite() and ls.is_finite()):
            raise ValueError("logarithms must be finite")
        r1 = ls - lo
        r2 = lo - Decimal(states).log10()
        r3 = r1 - r2
    return RatioRow(lo, ls, states, r1, r2, r3, source, is_log=True)


@dataclass(frozen=True)
class ExternalRecord:
    """A published witness.  Exact integers stay ``int``; huge or scientific values are log10 Decimals."""

    label: str
    ones: int | Decimal
    steps: int | Decimal
    states: int

    @property
    def is_log(self) -> bool:
        return not (isinstance(self.ones, int) and isinstance(self.steps, int))

    def row(self) -> RatioRow:
        if not self.is_log:
            return ratio_row(self.ones, self.steps, self.states, self.label)
        with localcontext(_ctx()):
            lo = self.ones if isinstance(self.ones, Decimal) else Decimal(self.ones).log10()
            ls = self.steps if isinstance(self.steps, Decimal) else Decimal(self.steps).log10()
        return ratio_row_log(lo, ls, self.states, self.label)


_INT = re.compile(r"^\d+$")
_SCI = re.compile(r"^\d+(\.\d+)?[eE][+]?\d+$")


def _parse_magnitude(text: str) -> int | Decimal:
    text = text.strip()
    if text.startswith("-"):
        raise ValueError(f"negative value {text!r}")
    if _INT.match(text):
        if len(text.lstrip("0")) <= DIGIT_THRESHOLD:
            return int(text)
        with localcontext(_ctx()):
            return Decimal(text).log10()
    if _SCI.match(text):
        with localcontext(_ctx()):
            value = Decimal(text)
            if value <= 0:
                raise ValueError(f"value must be positive, got {text!r}")
            return value.log10()
    raise ValueError(f"not a number: {text!r}")


def parse_records(text: str, origin: str = "<records>") -> list[ExternalRecord]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        return []
    if [h.strip() for h in header] != ["label", "ones", "steps", "states"]:
        raise RecordError(f"{origin}:1: header must be label,ones,steps,states")
    records = []
    for row in reader:
        lineno = reader.line_num
        if not row or not "".join(row).strip():
            continue
        try:
            label, ones, steps, states = row
            state_count = int(states)
            if state_count < 1:
                raise ValueError("states must be positive")
            records.append(ExternalRecord(label.strip(), _parse_magnitude(ones), _parse_magnitude(steps), state_count))
        except ValueError as exc:
            raise RecordError(f"{origin}:{lineno}: {exc}") from None
    return records


def ingest_records(path: str | Path) -> list[ExternalRecord]:
    return parse_records(Path(path).read_text(encoding="utf-8"), str(path))


def bundled_records() -> list[ExternalRecord]:
    """Published running times shipped with the package."""
    text = resources.files("bblab.data").joinpath("running_times.csv").read_text(encoding="utf-8")
    return parse_records(text, "running_times.csv")


WITNESS_POLICIES = ("shortest", "max-steps", "min-steps")


def own_rows(entries: Iterable[PPEntry], policy: str = "shortest", source: str = "own programs") -> list[RatioRow]:
    """Rows for searched PP entries.

    ``shortest`` takes the slowest machine among those with the fewest rules;
    ``max-steps``/``min-steps`` take the step-extremal machine over all rule counts.
    """
    if policy not in WITNESS_POLICIES:
        raise ValueError(f"unknown witness policy {policy!r}; pick one of {WITNESS_POLICIES}")
    rows = []
    for e in entries:
        if e.pp_value is None:
            continue
        witness = {"shortest": e.shortest, "max-steps": e.witness_max_steps, "min-steps": e.witness_min_steps}[policy]
        rows.append(ratio_row(e.ones, witness[1], e.pp_value, source))
    return rows


def build_table(
    entries: Iterable[PPEntry] = (),
    records: Sequence[ExternalRecord] = (),
    policy: str = "shortest",
) -> str:
    rows = own_rows(entries, policy) + [r.row() for r in records]
    rows.sort(key=RatioRow.sort_key)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["ones", "r1", "r2", "r3", "source"])
    for row in rows:
        writer.writerow(row.formatted())
    return out.getvalue()
