"""Rendering of reserve reports as tables or JSON documents."""

from __future__ import annotations

import json
import os

from .reserving import BAYES, MACK, Comparison, ReserveReport

__all__ = ["render_report", "to_document", "use_color"]

TITLES = {
    MACK: "Mack Chain Ladder Results",
    BAYES: "Half-Normal Bayesian Chain Ladder Results",
}
_BOLD = "\033[1m"
_RESET = "\033[0m"


def use_color(stream) -> bool:
    return "NO_COLOR" not in os.environ and hasattr(stream, "isatty") and stream.isatty()


def to_document(obj) -> dict:
    """JSON-ready dict of a report, a comparison, or anything with ``to_dict``."""
    if isinstance(obj, Comparison):
        return {
            "mack": to_document(obj.mack),
            "bayes_half_normal": to_document(obj.bayes),
            "factor_deltas": list(obj.factor_deltas),
            "reserve_delta": obj.reserve_delta,
        }
    if isinstance(obj, ReserveReport):
        doc = {
            "method": obj.method,
            "factors": list(obj.factors.factors),
            "accident_years": list(obj.accident_years),
            "ultimates": list(obj.ultimates),
            "outstanding": list(obj.outstanding),
            "total_reserve": obj.total_reserve,
            "input_fingerprint": obj.input_fingerprint,
        }
        if obj.prior is not None:
            doc["prior"] = {
                "mode": obj.prior.mode,
                "alpha": list(obj.prior.alpha),
                "beta": list(obj.prior.beta),
            }
        if obj.posteriors is not None:
            doc["posteriors"] = [{"alpha": p.alpha, "beta": p.beta} for p in obj.posteriors]
        return doc
    return obj.to_dict()


def _num(value: float, precision: int) -> str:
    text = f"{value:,.{precision}f}"
    # avoid printing "-0.0000" for values that round to zero
    return text.lstrip("-") if float(text.replace(",", "")) == 0 else text


def _table(r: ReserveReport, precision: int, color: bool) -> list[str]:
    lines = [TITLES[r.method], "=" * len(TITLES[r.method])]
    if len(r.factors):
        heads = [f"dev_{j}" for j in range(1, len(r.factors) + 1)]
        cells = [f"{f:.{precision}f}" for f in r.factors.factors]
        width = max(max(map(len, heads)), max(map(len, cells)))
        lines.append("Development factors")
        lines.append("  " + "  ".join(h.rjust(width) for h in heads))
        lines.append("  " + "  ".join(c.rjust(width) for c in cells))
    rows = [
        (year, _num(u - o, precision), _num(u, precision), _num(o, precision))
        for year, u, o in zip(r.accident_years, r.ultimates, r.outstanding)
    ]
    header = ("Accident year", "Latest", "Ultimate", "Outstanding")
    widths = [max(len(header[k]), *(len(row[k]) for row in rows)) if rows else len(header[k])
              for k in range(4)]
    lines.append("")
    lines.append("  ".join(h.rjust(w) if k else h.ljust(w) for k, (h, w) in enumerate(zip(header, widths))))
    for row in rows:
        lines.append("  ".join(c.rjust(w) if k else c.ljust(w) for k, (c, w) in enumerate(zip(row, widths))))
    total = f"Total IBNR reserve: {_num(r.total_reserve, precision)}"
    lines.append("")
    lines.append(f"{_BOLD}{total}{_RESET}" if color else total)
    return lines


def render_report(obj, fmt: str = "table", precision: int = 4, color: bool = False) -> str:
    """Render a ReserveReport, a Comparison, or a recovery summary.

    ``fmt`` is ``"table"`` or ``"json"``. JSON output keeps full double
    precision and a fixed key order, so it is byte-stable for fixed input.
    """
    if fmt == "json":
        return json.dumps(to_document(obj), indent=2) + "\n"
    if fmt != "table":
        raise ValueError(f"unknown output format {fmt!r}")
    if isinstance(obj, ReserveReport):
        return "\n".join(_table(obj, precision, color)) + "\n"
    if isinstance(obj, Comparison):
        lines = _table(obj.mack, precision, False) + [""] + _table(obj.bayes, precision, False)
        lines += ["", "Factor deltas (Bayesian - Mack)"]
        for j, d in enumerate(obj.factor_deltas, start=1):
            lines.append(f"  dev_{j}: {d:+.{precision}f}")
        lines.append("")
        lines.append(f"Mack total:     {_num(obj.mack.total_reserve, precision)}")
        bayes = f"Bayesian total: {_num(obj.bayes.total_reserve, precision)}"
        lines.append(f"{_BOLD}{bayes}{_RESET}" if color else bayes)
        lines.append(f"Difference:     {_num(obj.reserve_delta, precision)}")
        return "\n".join(lines) + "\n"
    doc = to_document(obj)
    return "\n".join(f"{k}: {v}" for k, v in doc.items()) + "\n"
