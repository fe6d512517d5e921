"""Matplotlib figures written next to the tabular reports."""
from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _show(ax, img, title):
    px = img.pixels if hasattr(img, "pixels") else img.bits * 255
    if px.ndim == 3 and px.shape[2] == 1:
        px = px[..., 0]
    ax.imshow(px, cmap="gray" if px.ndim == 2 else None, vmin=0, vmax=255,
              interpolation="nearest")
    ax.set_title(title, fontsize=8)
    ax.set_axis_off()


def evaluation_figure(path, host, marked, wm, results):
    """Grid of panels: host, marked image, watermark, then one
    (attacked image, regenerated watermark) pair per attack.

    ``results`` is a sequence of (report, attacked_image, extracted_watermark).
    """
    # header row padded to 4 so each attack pair stays on one row
    panels = [(host, "original"), (marked, "watermarked"), (wm, "watermark"), None]
    for rep, attacked, extracted in results:
        panels.append((attacked, f"{rep.attack}"))
        panels.append((extracted, f"regenerated  NC={rep.nc:.3f}"))
    ncols = 4
    nrows = math.ceil(len(panels) / ncols)
    fig, axes = plt.subplots(nrows, ncols, figsize=(2.4 * ncols, 2.5 * nrows), squeeze=False)
    for ax in axes.ravel():
        ax.set_axis_off()
    for ax, panel in zip(axes.ravel(), panels):
        if panel is not None:
            _show(ax, *panel)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def period_histogram(path, report):
    periods = list(report.histogram)
    counts = [report.histogram[p] for p in periods]
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.bar([str(p) for p in periods], counts, color="0.35")
    ax.set_xlabel("orbit period")
    ax.set_ylabel("points")
    ax.set_title(f"cat map periods mod {report.modulus} (n_iter={report.n_iter})", fontsize=9)
    if len(periods) > 12:
        ax.tick_params(axis="x", labelrotation=90, labelsize=6)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
