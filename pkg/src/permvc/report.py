"""CSV tables and matplotlib figures for the computed quantities."""

from __future__ import annotations

import csv
import os
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.ticker import MaxNLocator  # noqa: E402

from .ackfun import alpha_d  # noqa: E402
from .oracle import SearchBudget, brute_mex, brute_p  # noqa: E402
from .patterns import ds_matrix  # noqa: E402
from .vcdim import COMPRESS_GAMMA, CompressionTrace, compress_family, params_for_gamma, synthetic_family  # noqa: E402

plt.rcParams.update({
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 100,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.frameon": False,
    "font.size": 10,
})


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def extremal_rows(ks: Sequence[int] = (2, 3), ns: Sequence[int] = (2, 3, 4, 5),
                  budget: SearchBudget = SearchBudget()) -> list[list]:
    rows = []
    for k in ks:
        for n in ns:
            p = brute_p(k, n, budget)
            mex = brute_mex(ds_matrix(k + 1), n, budget)
            bound = 4 * n - 4 if k == 2 else ""
            rows.append([k, n, p.value, mex.value, bound, p.exact and mex.exact])
    return rows


EXTREMAL_HEADER = ["k", "n", "p_k", "mex_DS_k+1", "4n-4", "exact"]


def plot_extremal(rows: list[list], path: str) -> None:
    fig, ax = plt.subplots()
    for k in sorted({r[0] for r in rows}):
        sub = [r for r in rows if r[0] == k]
        ns = [r[1] for r in sub]
        ax.plot(ns, [r[2] for r in sub], "o-", label=f"p_{k}(n)")
        ax.plot(ns, [r[3] for r in sub], "s--", label=f"mex DS_{k + 1}(n)")
    two = [r for r in rows if r[0] == 2]
    if two:
        ax.plot([r[1] for r in two], [r[4] for r in two], "k:", lw=2, zorder=3, label="4n-4")
    ax.xaxis.set_major_locator(MaxNLocator(integer=True))
    ax.set_xlabel("n")
    ax.set_ylabel("number of 1-entries")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def alpha_rows(ds: Sequence[int] = (1, 2, 3, 4), exps: Sequence[int] = tuple(range(1, 17))) -> list[list]:
    return [[d, e, 2 ** e, alpha_d(d, 2 ** e)] for d in ds for e in exps]


def plot_alpha(rows: list[list], path: str) -> None:
    fig, ax = plt.subplots()
    for d in sorted({r[0] for r in rows}):
        sub = [r for r in rows if r[0] == d]
        ax.step([r[1] for r in sub], [r[3] for r in sub], where="post", label=f"d = {d}")
    ax.set_yscale("symlog", linthresh=4)
    ax.set_xlabel("log2 m")
    ax.set_ylabel("alpha_d(m)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_trace(trace: CompressionTrace, path: str, title: str = "") -> None:
    """Density per iteration, phase boundaries dashed, 2T dotted."""
    dens = [trace.iterations[0].v_before] if trace.iterations else [trace.final_density]
    dens += [it.v_after for it in trace.iterations]
    fig, ax = plt.subplots()
    ax.plot(range(len(dens)), [float(v) for v in dens], "o-", label="density v")
    for b in trace.boundaries[1:]:
        ax.axvline(b, ls="--", color="gray", lw=0.8)
    ax.axhline(2 * trace.threshold, ls=":", color="red", label="2T")
    ax.xaxis.set_major_locator(MaxNLocator(integer=True))
    ax.set_xlabel("iteration")
    ax.set_ylabel("1-entries per column of the union")
    ax.set_title(title or f"n = {trace.n}, k = {trace.k}, gamma = {trace.gamma}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


COMPRESSION_HEADER = ["seed", "n", "size", "density", "iterations", "phases", "within_bound", "stop_reason",
                      "final_size", "final_density"]


def compression_rows(seeds: Sequence[int], target_gamma=COMPRESS_GAMMA) -> tuple[list[list], list]:
    rows, traces = [], []
    for seed in seeds:
        fam = synthetic_family(seed)
        trace = compress_family(fam, 2, params_for_gamma(2, fam.n, target_gamma))
        traces.append((seed, trace))
        start = trace.iterations[0].v_before if trace.iterations else trace.final_density
        rows.append([seed, fam.n, len(fam), str(start), len(trace.iterations), len(trace.phases),
                     all(ph.within_bound for ph in trace.phases), trace.stop_reason, trace.final_size,
                     str(trace.final_density)])
    return rows, traces


def plot_compression(traces: list, path: str) -> None:
    fig, ax = plt.subplots()
    for seed, tr in traces:
        if not tr.iterations:
            continue
        dens = [tr.iterations[0].v_before] + [it.v_after for it in tr.iterations]
        ax.plot(range(len(dens)), [float(v) for v in dens], "o-", ms=3, lw=1, label=f"seed {seed}")
    if traces:
        ax.axhline(2 * traces[0][1].threshold, ls=":", color="red", label="2T")
    ax.xaxis.set_major_locator(MaxNLocator(integer=True))
    ax.set_xlabel("iteration")
    ax.set_ylabel("density")
    ax.legend(ncol=2, fontsize=7)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def write_report(out_dir: str, parts: Sequence[str] = ("extremal", "alpha", "compression"),
                 seeds: Sequence[int] = tuple(range(20)), budget: SearchBudget = SearchBudget()) -> dict:
    """Write ``<part>.csv`` and ``<part>.png`` for each requested part; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    written: dict = {}
    for part in parts:
        csv_path = os.path.join(out_dir, f"{part}.csv")
        png_path = os.path.join(out_dir, f"{part}.png")
        if part == "extremal":
            rows = extremal_rows(budget=budget)
            write_csv(csv_path, EXTREMAL_HEADER, rows)
            plot_extremal(rows, png_path)
        elif part == "alpha":
            rows = alpha_rows()
            write_csv(csv_path, ["d", "log2_m", "m", "alpha_d"], rows)
            plot_alpha(rows, png_path)
        elif part == "compression":
            rows, traces = compression_rows(seeds)
            write_csv(csv_path, COMPRESSION_HEADER, rows)
            plot_compression(traces, png_path)
        else:
            raise ValueError(f"unknown report part {part!r}")
        written[part] = {"csv": csv_path, "png": png_path, "rows": len(rows)}
    return written

