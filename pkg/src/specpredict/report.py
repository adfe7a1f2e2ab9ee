"""Figure rendering for sweep tables and verification reports.

Figures are side artifacts written next to the delimited output; nothing
here feeds back into any computation.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def render_sweep_figure(rows, q: int, family: str, path: str) -> None:
    """Two panels: the scalar error figure and the error-matrix eigenvalues,
    both against the sweep order n."""
    orders = [row[0] for row in rows]
    scalars = [row[1] for row in rows]
    eigs = [row[2:] for row in rows]

    fig, axes = plt.subplots(1, 2, figsize=(9.0, 3.6))
    axes[0].plot(orders, scalars, "o-", color="tab:blue")
    axes[0].set_xlabel("order n")
    axes[0].set_ylabel("scalar error figure")
    axes[0].set_title(f"{family}: det(delta)^(1/q)")
    axes[0].grid(True, alpha=0.3)

    for i in range(q):
        axes[1].plot(orders, [e[i] for e in eigs], "o-", label=f"eig {i + 1}")
    axes[1].set_xlabel("order n")
    axes[1].set_ylabel("eigenvalues of delta")
    axes[1].set_title("error-matrix spectrum")
    axes[1].grid(True, alpha=0.3)
    if q > 1:
        axes[1].legend(fontsize=8)

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_verify_figure(report_dict: dict, tol: float, path: str) -> None:
    """Bar chart of the reported deviations on a log scale, with the pass
    tolerance drawn as a horizontal line."""
    deviations = report_dict.get("deviations", {})
    names = list(deviations)
    values = [max(abs(deviations[k]), 1e-18) for k in names]

    fig, ax = plt.subplots(figsize=(max(6.0, 1.1 * len(names)), 3.8))
    ax.bar(range(len(names)), values, color="tab:blue", alpha=0.8)
    ax.axhline(tol, color="tab:red", linestyle="--", label=f"tolerance {tol:g}")
    ax.set_yscale("log")
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("magnitude")
    status = "pass" if report_dict.get("pass") else "FAIL"
    ax.set_title(f"check {report_dict.get('theorem')} (K={report_dict.get('K')}): {status}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
