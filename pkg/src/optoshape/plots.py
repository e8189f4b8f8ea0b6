"""Figure rendering for CLI outputs.

Every function draws one figure and writes it straight to a file; nothing is
shown interactively, so the non-GUI Agg backend is forced before pyplot loads.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_DPI = 150


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_sweep_figure(dataset, path):
    """Sensor voltage surfaces over the calibration grid.

    Falls back to scatter plots when the samples do not tile a full grid.
    """
    pitch = dataset.truths[:, 0]
    roll = dataset.truths[:, 1]
    pitches = np.unique(pitch)
    rolls = np.unique(roll)
    gridded = len(pitches) * len(rolls) == len(dataset)
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.6), sharey=True)
    for k, ax in enumerate(axes):
        if gridded:
            surface = dataset.voltages[:, k].reshape(len(pitches), len(rolls))
            img = ax.imshow(
                surface,
                origin="lower",
                aspect="auto",
                extent=[rolls[0], rolls[-1], pitches[0], pitches[-1]],
            )
            fig.colorbar(img, ax=ax, label="volts")
        else:
            sc = ax.scatter(roll, pitch, c=dataset.voltages[:, k], s=4)
            fig.colorbar(sc, ax=ax, label="volts")
        ax.set_xlabel("roll (deg)")
        ax.set_title(f"sensor {k + 1}")
    axes[0].set_ylabel("pitch (deg)")
    fig.suptitle(f"unit {dataset.unit_index} calibration sweep")
    _finish(fig, path)


def save_trace_figure(trace, path):
    """Tip truth vs estimate over the validation motion, one panel per axis."""
    t = np.arange(trace.n_samples)
    fig, axes = plt.subplots(2, 1, figsize=(8, 5), sharex=True)
    for col, (ax, name) in enumerate(zip(axes, ("pitch", "roll"))):
        ax.plot(t, trace.tip_truth[:, col], label="truth", linewidth=1.2)
        if trace.tip_est is not None:
            ax.plot(t, trace.tip_est[:, col], label="estimate",
                    linewidth=0.9, alpha=0.85)
        ax.set_ylabel(f"tip {name} (deg)")
        ax.grid(True, alpha=0.3)
    axes[0].legend(loc="upper right")
    axes[1].set_xlabel("sample")
    fig.suptitle(f"{trace.axis} validation, {trace.cycles} cycles")
    _finish(fig, path)


def save_demo_figure(result, path):
    """Actual vs linearly estimated angles for the two-sensor theory demo."""
    t = np.arange(result.actual.shape[0])
    fig, axes = plt.subplots(2, 1, figsize=(8, 5), sharex=True)
    labels = ("pitch", "roll")
    rs = (result.pearson_pitch, result.pearson_roll)
    for col, (ax, name, r) in enumerate(zip(axes, labels, rs)):
        ax.plot(t, result.actual[:, col], label="actual", linewidth=1.2)
        ax.plot(t, result.estimated[:, col], label="estimated",
                linewidth=0.9, alpha=0.85)
        tag = "undefined" if r is None else f"{r:.4f}"
        ax.set_ylabel(f"{name} (deg)")
        ax.set_title(f"{name}: Pearson r = {tag}", fontsize=10)
        ax.grid(True, alpha=0.3)
    axes[0].legend(loc="upper right")
    axes[1].set_xlabel("sample")
    _finish(fig, path)


def save_report_figure(report, path):
    """RMS and max tip error per axis as grouped bars."""
    axes_names = ("pitch", "roll")
    rms = [report.axis(a).rms_deg for a in axes_names]
    peak = [report.axis(a).max_deg for a in axes_names]
    x = np.arange(len(axes_names))
    width = 0.35
    fig, ax = plt.subplots(figsize=(5, 3.6))
    ax.bar(x - width / 2, rms, width, label="RMS")
    ax.bar(x + width / 2, peak, width, label="max")
    ax.set_xticks(x)
    ax.set_xticklabels(axes_names)
    ax.set_ylabel("tip error (deg)")
    ax.legend()
    ax.grid(True, axis="y", alpha=0.3)
    _finish(fig, path)
