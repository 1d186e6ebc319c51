from __future__ import annotations

from typing import List


def _num(v) -> str:
    if v is None:
        return "n/a"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def render_markdown_report(payload: dict) -> str:
    """Markdown audit report from a `solve --json-out` payload."""
    prob = payload.get("problem", {})
    params = payload.get("parameters", {})
    verdicts = payload.get("verdicts") or {}
    lines: List[str] = []
    lines.append("# nsconic Solve Report\n")
    lines.append("\n## Problem\n")
    lines.append(f"- Name: `{prob.get('name') or 'unnamed'}`\n")
    lines.append(f"- Size: m={prob.get('m')} n={prob.get('n')}  nu={_num(prob.get('nu'))}\n")
    lines.append("\n## Result\n")
    lines.append(f"- Status: **{payload.get('status')}**  Mode: {payload.get('mode')}\n")
    lines.append(f"- Iterations: {payload.get('iterations')}  Target reached: {payload.get('target_reached')}\n")
    lines.append(f"- Objective: {_num(payload.get('objective'))}\n")
    if "primal_infeasibility" in payload:
        lines.append(f"- ||A x - b||: {_num(payload['primal_infeasibility'])}\n")
    lines.append(f"- tau: {_num(payload.get('tau'))}  kappa: {_num(payload.get('kappa'))}\n")
    cert = payload.get("certificate") or {}
    for k, v in cert.items():
        lines.append(f"- {k}: {_num(v)}\n")
    lines.append("\n## Parameters\n")
    lines.append(
        f"- alpha={_num(params.get('alpha'))} beta={_num(params.get('beta'))} "
        f"gamma={_num(params.get('gamma'))} eta={_num(params.get('eta'))}\n"
    )
    lines.append("\n## Convergence\n")
    lines.append(
        f"- mu_e: {_num(payload.get('mu_e'))}  ||G||: {_num(payload.get('res_norm'))} "
        f"(initial {_num(payload.get('initial_res_norm'))})\n"
    )
    traj = payload.get("mu_e_trajectory") or []
    if len(traj) >= 2:
        lines.append(f"- mu_e sampled: {_num(traj[0])} -> {_num(traj[len(traj) // 2])} -> {_num(traj[-1])}\n")
    if not verdicts:
        lines.append("\n_No verification data (run `solve --verify`)._\n")
        return "".join(lines)
    lines.append("\n## Verification\n")
    lines.append(f"- Failures: {verdicts.get('failures', 0)}\n\n")
    lines.append("| check | passed | failed | inapplicable |\n")
    lines.append("|---|---:|---:|---:|\n")
    for check, counts in (verdicts.get("summary") or {}).items():
        lines.append(f"| {check} | {counts.get('passed', 0)} | {counts.get('failed', 0)} | {counts.get('inapplicable', 0)} |\n")
    failures = verdicts.get("first_failures") or []
    if failures:
        lines.append("\n## First Failures\n")
        for f in failures:
            lines.append(
                f"- iter {f.get('iteration')}: {f.get('check')} lhs={_num(f.get('lhs'))} "
                f"rhs={_num(f.get('rhs'))} slack={_num(f.get('slack'))}\n"
            )
    return "".join(lines)
