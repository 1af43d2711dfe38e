"""Figure rendering for the CLI report path (PNG files next to the CSV/JSON)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

DPI = 120


def save(fig, path: Path) -> None:
    fig.savefig(path, dpi=DPI, bbox_inches="tight")
    plt.close(fig)


def resonance_figure(conditions, omega: float, path: Path) -> None:
    """Resonant frequencies by taxonomy class; frequency-independent ones at omega."""
    classes = sorted({c.klass for c in conditions})
    fig, ax = plt.subplots(figsize=(7, 3.2))
    markers = {k: m for k, m in zip(classes, ["o", "s", "^", "D", "v", "P"])}
    for klass in classes:
        xs, ys = [], []
        for c in conditions:
            if c.klass != klass:
                continue
            xs.append(omega if c.omega_star is None else c.omega_star)
            ys.append(c.min_atoms)
        ax.scatter(xs, ys, label=klass, marker=markers[klass], alpha=0.8)
    ax.axvline(omega, color="gray", lw=0.8, ls=":", label="field frequency")
    ax.set_xlabel("resonant field frequency")
    ax.set_ylabel("min atoms")
    ax.legend(fontsize=8, loc="best")
    ax.set_title("kinematic resonances")
    save(fig, path)


def series_figure(series_doc: dict, path: Path) -> None:
    """Term strength versus resonance position for an effective series."""
    terms = series_doc.get("terms", [])
    fig, ax = plt.subplots(figsize=(6, 3.2))
    if terms:
        xs = [t["resonance_ratio"] for t in terms]
        ys = [abs(t["prefactor"]) * max(abs(v) for v in (t["theta_samples"] or [1.0]))
              for t in terms]
        labels = [f"({t['k']},{t['l']})" for t in terms]
        ax.stem(xs, ys)
        ax.set_yscale("log")
        for x, y, lab in zip(xs, ys, labels):
            ax.annotate(lab, (x, y), textcoords="offset points", xytext=(3, 3),
                        fontsize=8)
    ax.set_xlabel("resonance position  omega_x / omega_y")
    ax.set_ylabel("|prefactor x theta|")
    ax.set_title("effective resonant terms")
    save(fig, path)


def matrix_figure(matrix: np.ndarray, path: Path, title: str) -> None:
    fig, ax = plt.subplots(figsize=(4.6, 4.0))
    mag = np.abs(matrix)
    with np.errstate(divide="ignore"):
        img = ax.imshow(np.log10(mag + 1e-300), cmap="viridis")
    fig.colorbar(img, ax=ax, label="log10 |H_ij|")
    ax.set_title(title)
    save(fig, path)


def scan_figure(grid: np.ndarray, values: np.ndarray, predictions, path: Path,
                ylabel: str, logy: bool) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 3.4))
    ax.plot(grid, values, lw=1.0)
    for p in predictions:
        if p is not None:
            ax.axvline(p, color="crimson", lw=0.8, ls="--")
    if logy and np.all(values > 0):
        ax.set_yscale("log")
    ax.set_xlabel("swept frequency")
    ax.set_ylabel(ylabel)
    ax.set_title("resonance scan")
    save(fig, path)


def evolution_figure(times: np.ndarray, curves: dict, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 3.4))
    for name, values in curves.items():
        ax.plot(times, values, lw=1.0, label=name)
    ax.set_xlabel("time")
    ax.set_ylabel("observable")
    ax.legend(fontsize=8)
    ax.set_title("time evolution")
    save(fig, path)
