"""Delimited and graphical output: CSV/JSON writers, figures, plot script.

All CSV files use RFC-4180 quoting (the csv module's excel dialect) and
shortest round-trip float formatting, so outputs are byte-stable across
runs.  Figures are rendered with the Agg backend straight to files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

__all__ = [
    "emit_plot_script",
    "render_convergence_figure",
    "render_solution_figure",
    "write_certificates_json",
    "write_convergence_csv",
    "write_csv",
    "write_diagnostics_csv",
    "write_field_csv",
]


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


def write_diagnostics_csv(path, diagnostics):
    header = ["n", "t", "r", "xi", "eta", "E_bar", "K_bar", "grad_norm_sq"]
    rows = [
        (d.n, d.t, d.r, d.xi, d.eta, d.energy_bar, d.K_bar, d.grad_norm_sq)
        for d in diagnostics
    ]
    return write_csv(path, header, rows)


def write_field_csv(path, nodes, values):
    return write_csv(path, ["x", "u"], zip(nodes.tolist(), values.tolist()))


def write_certificates_json(path, certificates):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = [c.as_dict() for c in certificates]
    path.write_text(json.dumps(payload, indent=2) + "\n")
    return path


def write_convergence_csv(path, reports):
    header = ["alpha", "tau", "linf_error", "linf_rate", "l2_error", "l2_rate"]
    rows = []
    for report in reports:
        for tau, linf, linf_rate, l2, l2_rate in report.rows:
            rows.append((report.alpha, tau, linf, linf_rate, l2, l2_rate))
    return write_csv(path, header, rows)


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_solution_figure(path, nodes, values, history_t, history_r,
                           history_energy, exact_values=None):
    """Two panels: the final profile, and r with E(ubar) over time."""
    plt = _pyplot()
    fig, (ax_profile, ax_scalars) = plt.subplots(1, 2, figsize=(9.5, 3.8))

    ax_profile.plot(nodes, values, "-", color="tab:blue", label="computed")
    if exact_values is not None:
        ax_profile.plot(nodes, exact_values, "--", color="tab:red", label="exact")
        ax_profile.legend(frameon=False)
    ax_profile.set_xlabel("x")
    ax_profile.set_ylabel("u")
    ax_profile.set_title("final profile")

    if len(history_t):
        ax_scalars.plot(history_t, history_r, "-", color="tab:green", label="r")
        ax_scalars.plot(history_t, history_energy, "--", color="tab:purple",
                        label="E(ubar)")
        ax_scalars.legend(frameon=False)
    ax_scalars.set_xlabel("t")
    ax_scalars.set_title("auxiliary scalar vs energy")

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def render_convergence_figure(path, reports):
    """Log-log error-versus-step plot with a sixth-order guide line."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    taus_all = []
    for report in reports:
        taus = [row[0] for row in report.rows]
        linf = [row[1] for row in report.rows]
        l2 = [row[3] for row in report.rows]
        taus_all.extend(taus)
        ax.loglog(taus, linf, "o-", label=f"linf, alpha={report.alpha}")
        ax.loglog(taus, l2, "s--", label=f"L2, alpha={report.alpha}")
    if taus_all:
        t = np.array([min(taus_all), max(taus_all)])
        anchor = min(
            row[1] for report in reports for row in report.rows
        )
        ax.loglog(t, anchor * (t / t.min()) ** 6, "k:", label="slope 6")
    ax.set_xlabel("tau")
    ax.set_ylabel("error at t = T")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


_PLOT_SCRIPT = '''\
#!/usr/bin/env python3
"""Plot a convergence CSV (columns alpha, tau, linf_error, linf_rate,
l2_error, l2_rate).  Usage: python plot_convergence.py [in.csv [out.png]]"""
import csv
import sys
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

csv_path = sys.argv[1] if len(sys.argv) > 1 else "convergence.csv"
out_path = sys.argv[2] if len(sys.argv) > 2 else "convergence.png"

series = defaultdict(list)
with open(csv_path, newline="") as handle:
    for row in csv.DictReader(handle):
        series[row["alpha"]].append(
            (float(row["tau"]), float(row["linf_error"]), float(row["l2_error"]))
        )

fig, ax = plt.subplots(figsize=(5.2, 4.0))
for alpha, rows in series.items():
    rows.sort(reverse=True)
    taus = [r[0] for r in rows]
    ax.loglog(taus, [r[1] for r in rows], "o-", label=f"linf, alpha={alpha}")
    ax.loglog(taus, [r[2] for r in rows], "s--", label=f"L2, alpha={alpha}")
if series:
    all_rows = [r for rows in series.values() for r in rows]
    t0 = max(r[0] for r in all_rows)
    t1 = min(r[0] for r in all_rows)
    e1 = min(r[1] for r in all_rows)
    ax.loglog([t1, t0], [e1, e1 * (t0 / t1) ** 6], "k:", label="slope 6")
ax.set_xlabel("tau")
ax.set_ylabel("error at t = T")
ax.legend(frameon=False, fontsize=8)
fig.tight_layout()
fig.savefig(out_path, dpi=150)
print(f"wrote {out_path}")
'''


def emit_plot_script(path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(_PLOT_SCRIPT)
    return path
