"""Optional SVG figures (needs matplotlib). Output bytes are reproducible."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

from .scenario import RunReport, burden_by_subtree, ecdf, pmf


def write_svgs(reports: Sequence[RunReport], outdir: str | Path) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "laser"
    plt.rcParams["svg.fonttype"] = "none"
    out = Path(outdir)
    rows = [r for rep in reports for r in rep.onboarded]
    paths = []

    def save(fig, name):
        path = out / name
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
        plt.close(fig)
        paths.append(path)

    fig, ax = plt.subplots(figsize=(5, 3.5))
    pts = ecdf(r.onboard_s for r in rows)
    if pts:
        ax.step([p[0] for p in pts], [p[1] for p in pts], where="post")
    ax.set_xlabel("time (s)")
    ax.set_ylabel("fraction onboarded")
    save(fig, "ecdf.svg")

    fig, ax = plt.subplots(figsize=(5, 3.5))
    table = burden_by_subtree(rows)
    ax.errorbar(list(table), [v[0] / 1024 for v in table.values()],
                yerr=[v[1] / 1024 for v in table.values()], fmt="o", capsize=3)
    ax.set_xlabel("subtree size")
    ax.set_ylabel("transmitted (KiB)")
    save(fig, "burden_by_subtree.svg")

    for stat in ("subtree", "hops"):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        dist = pmf(getattr(r, stat) for r in rows)
        ax.bar(list(dist), list(dist.values()))
        ax.set_xlabel(stat)
        ax.set_ylabel("probability")
        save(fig, f"pmf_{stat}.svg")
    return paths
