"""
Report Module
Structured reports for the command-line pipelines, rendered as text tables or JSON

Every exact quantity is carried as a string ("1/2", "3*6**(2/3)/6") next to its
decimal so the JSON form round-trips without loss.
"""
import json
from fractions import Fraction
from typing import Any, Dict, List, Optional

import pandas as pd

from src.growth_estimate import GrowthEstimate, MatchReport, TypeTrend
from src.newton_polygon import GrowthProfile, HullReport, SSequence
from src.recurrence import BasisMember, CoefficientSequence, SegmentRoots
from src.series_eval import EmpiricalGrowth

WIDTH = 60


def _num(x: Optional[float], digits: int = 12) -> Optional[float]:
    if x is None:
        return None
    if x != x or x in (float("inf"), float("-inf")):
        return str(x)
    return float(f"{x:.{digits}g}")


def _type_value(tau) -> Any:
    if isinstance(tau, TypeTrend):
        return tau.value
    return _num(tau)


# =============================================================================
# SECTIONS
# =============================================================================

def sseq_section(sseq: SSequence) -> Dict[str, Any]:
    return {"indices": list(sseq.indices), "degrees": list(sseq.degrees), "p": sseq.p}


def profile_section(profile: GrowthProfile) -> List[Dict[str, Any]]:
    rows = []
    for e in profile:
        rows.append({
            "j": e.j,
            "rho": str(e.rho),
            "rho_decimal": _num(float(e.rho)),
            "type": str(e.type),
            "type_decimal": e.type.decimal(12),
            "type_parts": {
                "prefactor": str(e.type.prefactor),
                "base_modulus_squared": str(e.type.base_modulus_squared),
                "exponent": str(e.type.exponent),
            },
            "segment": list(e.segment),
        })
    return rows


def hull_section(hull: HullReport) -> Dict[str, Any]:
    return {
        "ok": hull.ok,
        "vertices": [list(v) for v in hull.vertices],
        "expected_vertices": [list(v) for v in hull.expected_vertices],
        "descent_slopes": [str(s) for s in hull.descent_slopes],
        "mismatches": list(hull.mismatches),
    }


def roots_section(roots: SegmentRoots) -> Dict[str, Any]:
    return {
        "segment": roots.j,
        "count": roots.degree,
        "gamma_power": str(roots.target),
        "modulus_squared_power": f"({roots.modulus_squared})^(1/{roots.degree})",
        "roots": [str(roots.target)] if roots.degree == 1 else
                 [f"{complex(g):.12g}" for g in roots.roots(64)],
    }


def coefficient_preview(seq: CoefficientSequence, count: int) -> List[str]:
    if seq.exact is not None:
        return [str(v) for v in seq.exact[:count]]
    return [seq.ctx.nstr(v, 15) for v in seq.values[:count]]


def member_section(index: int, member: BasisMember, match: Optional[MatchReport],
                   estimate: Optional[GrowthEstimate], preview: int) -> Dict[str, Any]:
    row = {
        "index": index,
        "class": member.kind.value,
        "chi_hat": _num(member.chi_hat),
        "chi_raw": _num(estimate.chi_raw) if estimate else None,
        "rho": str(member.rho) if member.rho is not None else None,
        "note": member.note,
        "coefficients": coefficient_preview(member.sequence, preview),
    }
    if match is not None:
        row.update({
            "tau_hat": _type_value(match.tau_hat),
            "match": match.verdict,
            "matched_entry": match.entry.j if match.entry else None,
            "chi_deviation": _num(match.chi_deviation),
            "type_deviation": _num(match.type_deviation),
        })
    return row


def growth_section(index: int, growth: EmpiricalGrowth, L_exact: Optional[float],
                   tau_hat: Any, agreement_bracket: float) -> Dict[str, Any]:
    row: Dict[str, Any] = {
        "member": index,
        "radii": [_num(r) for r in growth.radii],
        "logM": [_num(v) for v in growth.logM],
        "rho": str(growth.rho_fit) if isinstance(growth.rho_fit, (Fraction, str)) else _num(growth.rho_fit),
        "L_fit": _num(growth.L_fit),
        "L_endpoint": _num(growth.L_endpoint),
        "L_exact": _num(L_exact),
        "tau_hat": _type_value(tau_hat),
        "refused": [{"radius": _num(r), "required_terms": n} for r, n in growth.refused],
        "bracket_widened": growth.trending,
    }
    if L_exact is None:
        row["verdict"], row["bracket"] = ("degenerate", None) if growth.degenerate else ("unchecked", None)
    else:
        verdict, bracket = growth.verdict(L_exact)
        row["verdict"], row["bracket"] = verdict, bracket
    if isinstance(tau_hat, float) and growth.L_fit is not None and tau_hat > 0:
        row["agreement"] = abs(growth.L_fit / tau_hat - 1) <= agreement_bracket
    return row


# =============================================================================
# RENDERING
# =============================================================================

def render_json(report: Dict[str, Any]) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False)


def _banner(title: str) -> List[str]:
    return ["=" * WIDTH, title, "=" * WIDTH]


def _heading(title: str) -> List[str]:
    return ["", title, "-" * WIDTH]


def _table(rows: List[Dict[str, Any]], columns: List[str]) -> str:
    frame = pd.DataFrame([{c: row.get(c) for c in columns} for row in rows], columns=columns)
    return frame.to_string(index=False)


def render_text(report: Dict[str, Any]) -> str:
    lines = _banner(f"{report['command'].upper()}  {report.get('file', '')}".rstrip())

    if "equation_text" in report:
        lines.append(f"Equation: {report['equation_text']}")
    if "settings" in report:
        lines.append("Settings: " + ", ".join(f"{k}={v}" for k, v in sorted(report["settings"].items())))
    if "construction" in report:
        c = report["construction"]
        lines.append(f"Order λ = {c['lambda']}, type σ = {c['sigma']}")
        lines.append(f"A_0..A_p = {', '.join(c['A'])}")
        lines.append(f"A_0/A_p = {c['A0_over_Ap']}, A_0/A_1 = {c['A0_over_A1']}")
        lines.append(f"Profile contains (λ, σ): {'yes' if c['round_trip'] else 'NO'}")
        if c.get("written_to"):
            lines.append(f"Written to: {c['written_to']}")
    if "degrees" in report:
        degs = "  ".join(f"d_{j}={'none' if d is None else d}" for j, d in report["degrees"])
        lines.append(f"Degrees: {degs}")
    if "s_sequence" in report:
        s = report["s_sequence"]
        lines.append(f"s-sequence: {tuple(s['indices'])}  p = {s['p']}")

    if "profile" in report:
        lines += _heading("ADMISSIBLE ORDERS AND TYPES")
        if report["profile"]:
            lines.append(_table(report["profile"], ["j", "rho", "type", "type_decimal", "segment"]))
        else:
            lines.append("no admissible order < 1")
    if "hull" in report:
        h = report["hull"]
        lines.append("")
        lines.append(f"Hull cross-check: {'OK' if h['ok'] else 'FAILED'}  vertices {h['vertices']}  "
                     f"slopes {h['descent_slopes']}")
        lines += [f"  ! {msg}" for msg in h["mismatches"]]
    if report.get("degree_table"):
        lines += [f"  ! {msg}" for msg in report["degree_table"]]
    if report.get("characteristic_roots"):
        lines += _heading("CHARACTERISTIC ROOTS")
        for r in report["characteristic_roots"]:
            lines.append(f"  segment {r['segment']}: γ^{r['count']} = {r['gamma_power']}  roots {r['roots']}")

    if "basis" in report:
        b = report["basis"]
        lines += _heading(f"SOLUTION BASIS  (dimension {b['dimension']}, N = {b['N']})")
        lines.append(_table(b["members"], ["index", "class", "chi_hat", "rho", "tau_hat", "match", "note"]))
        lines.append(f"Members of order < 1: {b['order_below_one']}")

    if "preview" in report:
        lines += _heading("REFERENCE SOLUTION a_0, a_1, ...")
        lines.append("  " + ", ".join(report["preview"]))

    for g in report.get("growth", []):
        lines += _heading(f"GROWTH ON CIRCLES  (member {g['member']})")
        if g["radii"]:
            lines.append(pd.DataFrame({"r": g["radii"], "log M(r)": g["logM"]}).to_string(index=False))
        for item in g["refused"]:
            lines.append(f"  radius {item['radius']} refused: needs N >= {item['required_terms']}")
        lines.append(f"rho = {g['rho']}  L_fit = {g['L_fit']}  L_endpoint = {g['L_endpoint']}  "
                     f"L_exact = {g['L_exact']}  tau_hat = {g['tau_hat']}")
        bracket = f" (±{g['bracket']:.0%})" if g.get("bracket") else ""
        lines.append(f"Verdict: {g['verdict']}{bracket}"
                     + ("  [bracket widened: trend still monotone]" if g["bracket_widened"] else ""))
        if "agreement" in g:
            lines.append(f"Coefficient/circle agreement: {'yes' if g['agreement'] else 'no'}")

    if report.get("warnings"):
        lines += _heading("WARNINGS")
        lines += [f"  - {w}" for w in report["warnings"]]
    if report.get("error"):
        lines += _heading("ERROR")
        lines.append(f"  {report['error']}")
    lines.append("")
    lines.append(f"Exit code: {report.get('exit_code', 0)}")
    return "\n".join(lines)
