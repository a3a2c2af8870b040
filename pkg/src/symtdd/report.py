"""Benchmark sweeps: CSV output plus optional rendered scaling figures."""

from __future__ import annotations

import csv

from .core import Manager, Stopwatch
from .circuit import simulate
from . import verify as _verify


def sweep_points(case, start, stop, step, rr3=True):
    """Run a size sweep of a built-in case; yields (n, time_ms, total_nodes)."""
    builders = {"qft": _verify.qft_circuit, "bv": _verify.bv_circuit}
    try:
        build = builders[case]
    except KeyError:
        raise ValueError(f"no sweep for case {case!r}") from None
    for n in range(start, stop + 1, step):
        man = Manager()
        watch = Stopwatch()
        result = simulate(build(n), man, rr3=rr3)
        _, _, total = man.node_count(result.state)
        yield n, watch.ms(), total


def write_sweep(points, csv_path, plot_path=None, case=""):
    """Write sweep rows as CSV and, when requested, render the curves."""
    rows = list(points)
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "time_ms", "total_nodes"])
        for row in rows:
            writer.writerow([row[0], f"{row[1]:.3f}", row[2]])
    if plot_path:
        _plot_sweep(rows, plot_path, case)
    return rows


def _plot_sweep(rows, plot_path, case):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ns = [r[0] for r in rows]
    fig, (ax_t, ax_s) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax_t.plot(ns, [r[1] for r in rows], "o-", label="time")
    ax_t.set_xlabel("qubits")
    ax_t.set_ylabel("time (ms)")
    ax_s.plot(ns, [r[2] for r in rows], "s-", color="tab:orange",
              label="total nodes")
    ax_s.set_xlabel("qubits")
    ax_s.set_ylabel("total nodes")
    title = f"{case} scaling" if case else "scaling"
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(plot_path, dpi=150)
    plt.close(fig)
