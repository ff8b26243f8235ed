"""Static, dependency-free HTML report listing every candidate.

Reproduces the outside-the-IDE presentation variant: one page, one row per
candidate, palette-exact severity swatches.
"""

from __future__ import annotations

import html
from pathlib import Path

from .candidates import PALETTE

_PAGE = """<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<title>Extract Method candidates</title>
<style>
body {{ font-family: sans-serif; margin: 2rem; color: #222; }}
table {{ border-collapse: collapse; width: 100%; }}
th, td {{ border: 1px solid #ccc; padding: 6px 10px; text-align: left; }}
th {{ background: #f0f0f0; }}
.swatch {{ display: inline-block; width: 1.2em; height: 1.2em; border: 1px solid #888;
           vertical-align: middle; margin-right: 6px; }}
.no-candidates {{ color: #666; font-style: italic; }}
</style>
</head>
<body>
<h1>Extract Method candidates</h1>
{body}
</body>
</html>
"""

_TABLE = """<table>
<thead>
<tr><th>#</th><th>Severity</th><th>File</th><th>Method</th><th>Lines</th>
<th>Statements</th><th>Suggested signature</th></tr>
</thead>
<tbody>
{rows}
</tbody>
</table>
"""


def _signature_text(sig: dict) -> str:
    params = ", ".join(f"{p['type']} {p['name']}" for p in sig.get("params", []))
    ret = sig.get("return_var")
    ret_type = ret["type"] if ret else "void"
    return f"{ret_type} {sig['name']}({params})"


def render_report(documents: list[dict]) -> str:
    rows = []
    for doc in documents:
        for cand in doc["candidates"]:
            sev = cand["severity"]
            color = PALETTE[sev]
            lines = f"{cand['line_range'][0]}–{cand['line_range'][1]}"
            rows.append(
                "<tr class=\"candidate\">"
                f"<td>{cand['rank']}</td>"
                f"<td><span class=\"swatch\" style=\"background:{color}\"></span>{sev} ({color})</td>"
                f"<td>{html.escape(doc['file'])}</td>"
                f"<td>{html.escape(cand['method_name'])}</td>"
                f"<td>{lines}</td>"
                f"<td>{cand['stmt_count']}</td>"
                f"<td><code>{html.escape(_signature_text(cand['signature']))}</code></td>"
                "</tr>"
            )
    if rows:
        body = _TABLE.format(rows="\n".join(rows))
    else:
        body = '<p class="no-candidates">No refactoring candidates.</p>'
    return _PAGE.format(body=body)


def export_html(documents: list[dict], out_dir: str | Path) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    target = out / "report.html"
    target.write_text(render_report(documents), encoding="utf-8")
    return target
