"""Matplotlib rendering of finite hom-categories, written next to the
machine-readable output."""

from __future__ import annotations

import math


def render_category_figure(cat, path, title=""):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    n = len(cat.objects)
    fig, ax = plt.subplots(figsize=(6.4, 6.4), dpi=120)
    ax.set_axis_off()
    if n == 0:
        ax.text(0.5, 0.5, "(empty)", ha="center", va="center")
    else:
        # highest-degree object in the middle, the rest on a circle
        degree = [0] * n
        for (i, j), cs in cat.homs.items():
            if i != j:
                degree[i] += len(cs)
                degree[j] += len(cs)
        order = sorted(range(n), key=lambda i: (-degree[i], i))
        pos = {}
        ring = order
        if n > 4 and degree[order[0]] > 2 * max(1, degree[order[-1]]):
            pos[order[0]] = (0.0, 0.0)
            ring = order[1:]
        for k, i in enumerate(ring):
            a = 2 * math.pi * k / max(1, len(ring)) + math.pi / 2
            pos[i] = (math.cos(a), math.sin(a))
        for (i, j), cs in sorted(cat.homs.items()):
            for c in cs:
                if i == j and cat.is_identity(c):
                    continue
                x1, y1 = pos[i]
                x2, y2 = pos[j]
                if i == j:
                    ax.annotate("", xy=(x1 + 0.08, y1 + 0.12), xytext=(x1, y1),
                                arrowprops=dict(arrowstyle="->", color="0.4",
                                                connectionstyle="arc3,rad=1.6"))
                    continue
                style = "dashed" if c.unknown else "solid"
                ax.annotate("", xy=(x2, y2), xytext=(x1, y1),
                            arrowprops=dict(arrowstyle="->", color="0.4",
                                            linestyle=style, shrinkA=14,
                                            shrinkB=14,
                                            connectionstyle="arc3,rad=0.08"))
        for i in range(n):
            x, y = pos[i]
            ax.plot([x], [y], marker="o", markersize=7, color="black")
            ax.annotate(cat.object_names[i], (x, y), textcoords="offset points",
                        xytext=(0, 9), ha="center", fontsize=7)
        lim = 1.45
        ax.set_xlim(-lim, lim)
        ax.set_ylim(-lim, lim)
    if title:
        ax.set_title(title, fontsize=9)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path
