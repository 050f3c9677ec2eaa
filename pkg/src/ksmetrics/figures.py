"""Deterministic CSV and SVG emission for the three standard figures.

Figure 1: rescaled distances of every scan member to the reference, for the
interacting systems and their non-interacting twins. Figure 2: potential
distances against wavefunction/density distances, per family branch.
Figure 3: interacting-vs-non-interacting wavefunction and potential
distances along the scan, next to the interaction-strength ratio <U>/<V>.

All numeric output uses 17 significant digits and \n line endings; the SVG
is hand-rolled (axes, polylines, markers) so identical data yields identical
bytes.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

from .errors import ContractViolation
from .scans import FamilyScan, summarize

__all__ = ["emit_fig1", "emit_fig2", "emit_fig3"]

_MONOTONE_SLACK = 1e-6

_COLORS = {
    "d_psi": "#1b6ca8",
    "d_rho": "#2e8540",
    "d_v1": "#c0392b",
    "d_v2": "#8e44ad",
    "ratio": "#7f6000",
}


def _as_summary(scan) -> dict:
    if isinstance(scan, FamilyScan):
        return summarize(scan)
    if isinstance(scan, dict):
        return scan
    raise ContractViolation(f"expected a FamilyScan or a scan digest, got {type(scan)}")


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _ok_rows(summary: dict) -> list[dict]:
    rows = [r for r in summary["rows"] if r["ok"]]
    if not rows:
        raise ContractViolation("scan has no successful rows to plot")
    return sorted(rows, key=lambda r: r["param"])


def _preamble(summary: dict) -> list[str]:
    meta = summary.get("metadata", {})
    gauge = summary.get("gauge", {})
    quad = None
    for r in summary["rows"]:
        if r["ok"] and r.get("vs_reference"):
            quad = r["vs_reference"].get("quadrature")
            break
    lines = [
        f"# family={summary['family']} reference_param={_fmt(summary['reference_param'])}",
        f"# gauge_c={_fmt(gauge.get('c', 0.0))} gauge_rule={gauge.get('rule', '')}",
    ]
    if quad:
        lines.append(
            f"# radial_nodes={quad.get('radial_nodes')} angular_nodes={quad.get('angular_nodes')}"
        )
    if meta.get("failed_params"):
        lines.append(f"# failed_params={meta['failed_params']}")
    return lines


def _write(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8", newline="\n")
    return path


# --------------------------------------------------------------------------
# minimal SVG plotting


class _Plot:
    width = 720
    height = 480
    margin = 60

    def __init__(self, x_range, y_range, x_label: str, y_label: str, title: str):
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range
        if self.x1 <= self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 <= self.y0:
            self.y1 = self.y0 + 1.0
        self.elements: list[str] = []
        frame = (
            f'<rect x="{self.margin}" y="{self.margin}" '
            f'width="{self.width - 2 * self.margin}" height="{self.height - 2 * self.margin}" '
            'fill="none" stroke="#333333" stroke-width="1"/>'
        )
        self.elements.append(frame)
        self.elements.append(
            f'<text x="{self.width // 2}" y="24" text-anchor="middle" '
            f'font-family="sans-serif" font-size="15">{title}</text>'
        )
        self.elements.append(
            f'<text x="{self.width // 2}" y="{self.height - 12}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13">{x_label}</text>'
        )
        self.elements.append(
            f'<text x="18" y="{self.height // 2}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13" '
            f'transform="rotate(-90 18 {self.height // 2})">{y_label}</text>'
        )
        for frac in (0.0, 0.5, 1.0):
            xv = self.x0 + frac * (self.x1 - self.x0)
            yv = self.y0 + frac * (self.y1 - self.y0)
            px = self._px(xv)
            py = self._py(yv)
            self.elements.append(
                f'<text x="{px:.1f}" y="{self.height - self.margin + 18}" '
                f'text-anchor="middle" font-family="sans-serif" font-size="11">{xv:.3g}</text>'
            )
            self.elements.append(
                f'<text x="{self.margin - 6}" y="{py:.1f}" text-anchor="end" '
                f'font-family="sans-serif" font-size="11">{yv:.3g}</text>'
            )

    def _px(self, x: float) -> float:
        span = self.width - 2 * self.margin
        return self.margin + span * (x - self.x0) / (self.x1 - self.x0)

    def _py(self, y: float) -> float:
        span = self.height - 2 * self.margin
        return self.height - self.margin - span * (y - self.y0) / (self.y1 - self.y0)

    def polyline(self, points, color: str, dash: str | None = None, label: str | None = None):
        coords = " ".join(f"{self._px(x):.2f},{self._py(y):.2f}" for x, y in points)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        self.elements.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"{dash_attr}/>'
        )
        if label:
            self._legend(color, dash, label)

    def markers(self, points, color: str, label: str | None = None):
        for x, y in points:
            self.elements.append(
                f'<circle cx="{self._px(x):.2f}" cy="{self._py(y):.2f}" r="3" '
                f'fill="{color}" fill-opacity="0.7"/>'
            )
        if label:
            self._legend(color, None, label)

    _legend_slot = 0

    def _legend(self, color: str, dash: str | None, label: str):
        y = self.margin + 16 + 16 * self._legend_slot
        self._legend_slot += 1
        x = self.width - self.margin - 150
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        self.elements.append(
            f'<line x1="{x}" y1="{y - 4}" x2="{x + 24}" y2="{y - 4}" '
            f'stroke="{color}" stroke-width="1.5"{dash_attr}/>'
        )
        self.elements.append(
            f'<text x="{x + 30}" y="{y}" font-family="sans-serif" font-size="11">{label}</text>'
        )

    def render(self) -> str:
        body = "\n".join(self.elements)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">\n'
            f'<rect width="{self.width}" height="{self.height}" fill="#ffffff"/>\n'
            f"{body}\n</svg>\n"
        )


def _param_axis(rows) -> list[float]:
    return [math.log10(r["param"]) for r in rows]


# --------------------------------------------------------------------------
# figure 1


def emit_fig1(scan, out_prefix) -> tuple[Path, Path]:
    """Rescaled member-to-reference distances, interacting and non-interacting."""
    summary = _as_summary(scan)
    rows = _ok_rows(summary)
    metrics = ("rescaled_d_psi", "rescaled_d_rho", "rescaled_d_v1", "rescaled_d_v2")

    lines = _preamble(summary)
    header = ["param"]
    header += [f"mb_{m}" for m in metrics]
    header += [f"ks_{m}" for m in metrics]
    lines.append(",".join(header))
    for r in rows:
        cells = [_fmt(r["param"])]
        cells += [_fmt(r["vs_reference"][m]) for m in metrics]
        cells += [_fmt(r["vs_reference_ks"][m]) for m in metrics]
        lines.append(",".join(cells))
    csv_path = _write(Path(f"{out_prefix}.csv"), "\n".join(lines) + "\n")

    xs = _param_axis(rows)
    plot = _Plot(
        (min(xs), max(xs)),
        (0.0, 2.0),
        "log10(param)",
        "rescaled distance",
        f"distances to the reference ({summary['family']})",
    )
    for m in metrics:
        key = m.replace("rescaled_", "")
        plot.polyline(
            list(zip(xs, (r["vs_reference"][m] for r in rows))),
            _COLORS[key],
            label=f"mb {key}",
        )
        plot.polyline(
            list(zip(xs, (r["vs_reference_ks"][m] for r in rows))),
            _COLORS[key],
            dash="5,3",
            label=f"ks {key}",
        )
    svg_path = _write(Path(f"{out_prefix}.svg"), plot.render())
    return csv_path, svg_path


# --------------------------------------------------------------------------
# figure 2


def _branches(summary: dict):
    """Four (panel, side) series per scan, ordered away from the reference."""
    rows = _ok_rows(summary)
    ref = summary["reference_param"]
    below = [r for r in rows if r["param"] <= ref][::-1]
    above = [r for r in rows if r["param"] >= ref]
    for panel, key in (("mb", "vs_reference"), ("ks", "vs_reference_ks")):
        for side, series in (("decreasing", below), ("increasing", above)):
            yield panel, side, key, series


def emit_fig2(scans: Sequence, out_prefix) -> tuple[Path, Path]:
    """Potential distances against wavefunction and density distances."""
    summaries = [_as_summary(s) for s in scans]
    if not summaries:
        raise ContractViolation("need at least one scan")
    metrics = ("rescaled_d_psi", "rescaled_d_rho", "rescaled_d_v1", "rescaled_d_v2")

    lines = []
    for summary in summaries:
        lines.extend(_preamble(summary))
    lines.append("family,panel,side,param," + ",".join(metrics) + ",flag")
    pairs_psi = []
    pairs_rho = []
    for summary in summaries:
        for panel, side, key, series in _branches(summary):
            prev = -math.inf
            for r in series:
                rep = r[key]
                flag = ""
                if rep["rescaled_d_psi"] < prev - _MONOTONE_SLACK:
                    flag = "non-monotone"
                prev = max(prev, rep["rescaled_d_psi"])
                lines.append(
                    ",".join(
                        [summary["family"], panel, side, _fmt(r["param"])]
                        + [_fmt(rep[m]) for m in metrics]
                        + [flag]
                    )
                )
                pairs_psi.append((rep["rescaled_d_psi"], rep["rescaled_d_v1"]))
                pairs_rho.append((rep["rescaled_d_rho"], rep["rescaled_d_v2"]))
    csv_path = _write(Path(f"{out_prefix}.csv"), "\n".join(lines) + "\n")

    plot = _Plot(
        (0.0, 2.0),
        (0.0, 2.0),
        "rescaled wavefunction / density distance",
        "rescaled potential distance",
        "potential vs state distances",
    )
    plot.markers(pairs_psi, _COLORS["d_v1"], label="d_v1 vs d_psi")
    plot.markers(pairs_rho, _COLORS["d_v2"], label="d_v2 vs d_rho")
    svg_path = _write(Path(f"{out_prefix}.svg"), plot.render())
    return csv_path, svg_path


# --------------------------------------------------------------------------
# figure 3


def emit_fig3(scan, out_prefix) -> tuple[Path, Path]:
    """Interacting-vs-non-interacting distances and the interaction ratio."""
    summary = _as_summary(scan)
    rows = _ok_rows(summary)

    lines = _preamble(summary)
    lines.append("param,rescaled_d_psi_mb_ks,rescaled_d_v1_mb_ks,interaction_ratio")
    for r in rows:
        rep = r["mb_vs_ks"]
        lines.append(
            ",".join(
                [
                    _fmt(r["param"]),
                    _fmt(rep["rescaled_d_psi"]),
                    _fmt(rep["rescaled_d_v1"]),
                    _fmt(r["interaction_ratio"]),
                ]
            )
        )
    csv_path = _write(Path(f"{out_prefix}.csv"), "\n".join(lines) + "\n")

    xs = _param_axis(rows)
    tops = [
        max(
            r["mb_vs_ks"]["rescaled_d_psi"],
            r["mb_vs_ks"]["rescaled_d_v1"],
            r["interaction_ratio"],
        )
        for r in rows
    ]
    plot = _Plot(
        (min(xs), max(xs)),
        (0.0, max(tops) * 1.05),
        "log10(param)",
        "rescaled distance / ratio",
        f"interacting vs non-interacting ({summary['family']})",
    )
    plot.polyline(
        list(zip(xs, (r["mb_vs_ks"]["rescaled_d_psi"] for r in rows))),
        _COLORS["d_psi"],
        label="d_psi(mb, ks)",
    )
    plot.polyline(
        list(zip(xs, (r["mb_vs_ks"]["rescaled_d_v1"] for r in rows))),
        _COLORS["d_v1"],
        label="d_v1(v_ext, v_ks)",
    )
    plot.polyline(
        list(zip(xs, (r["interaction_ratio"] for r in rows))),
        _COLORS["ratio"],
        dash="5,3",
        label="<U>/<V>",
    )
    svg_path = _write(Path(f"{out_prefix}.svg"), plot.render())
    return csv_path, svg_path
