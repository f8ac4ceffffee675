from __future__ import annotations

import json
from typing import Sequence

from .verification import VerificationReport


def suite_to_dict(reports: Sequence[VerificationReport]) -> dict:
    runs = [report.to_dict() for report in reports]
    return {"runs": runs, "passed": all(run["passed"] for run in runs)}


def dumps(data: dict) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False)


def _status(flag: bool) -> str:
    return "ok" if flag else "FALHOU"


def _run_markdown(data: dict) -> list[str]:
    phases = ", ".join(f"{phi:.6g}" for phi in data["phases"]) or "-"
    lines = [
        f"## {data['series']} (q={data['q']}, fases={phases}, N={data['cutoff']}, margem={data['margin']})",
        "",
        f"Resultado: **{_status(data['passed'])}**",
        "",
        "| id | relacao | residuo | status |",
        "|---|---|---|---|",
    ]
    for entry in data["relations"] + data.get("crossIdentities", []):
        lines.append(
            f"| {entry['id']} | `{entry['label']}` | {entry['residual']:.3e} | {_status(entry['pass'])} |"
        )
    spectrum = data["spectrum"]
    weights = data["weights"]
    decomposition = data["decomposition"]
    min_gap = "-" if weights["minGap"] is None else f"{weights['minGap']:.3e}"
    lines += [
        "",
        f"- Orbita: {spectrum['orbit']} (erro max {spectrum['maxError']:.3e}, "
        f"sem correspondencia {spectrum['unmatched']})",
        f"- Decomposicao ({decomposition['branch']}): {_status(decomposition['pass'])}",
        f"- Espectro simples: {_status(weights['simple'])} (gap minimo {min_gap})",
        "",
    ]
    return lines


def render_markdown(data: dict) -> str:
    runs = data["runs"] if "runs" in data else [data]
    lines = ["# Relatorio de verificacao", ""]
    if "runs" in data:
        failed = sum(1 for run in runs if not run["passed"])
        lines += [f"{len(runs)} execucoes, {failed} com falha.", ""]
    for run in runs:
        lines += _run_markdown(run)
    return "\n".join(lines).rstrip() + "\n"
