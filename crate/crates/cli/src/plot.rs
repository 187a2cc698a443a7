/// Standalone matplotlib script; it reads only the trace CSV.
pub const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Render a conditioning trace.

usage: python3 plot_trace.py [trace.csv] [output.png]
"""
import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(path):
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    header, body = rows[0], rows[1:]
    cols = {}
    for i, name in enumerate(header):
        vals = [r[i] for r in body]
        if name.startswith("scheme"):
            cols[name] = vals
        else:
            cols[name] = [float(v) for v in vals]
    return cols


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    src = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "trace.csv")
    dst = sys.argv[2] if len(sys.argv) > 2 else os.path.splitext(src)[0] + ".png"
    c = load(src)
    t = c["t_s"]
    order = sum(1 for k in c if k.startswith("ring"))

    fig, axes = plt.subplots(order + 2, 1, sharex=True, figsize=(10, 2.2 * (order + 2)))
    ax = axes[0]
    ax.plot(t, c["food_v"], label="food")
    for k in range(1, order + 1):
        ax.plot(t, c[f"ring{k}_v"], label=f"ring{k}")
    ax.set_ylabel("signal (V)")
    ax.legend(loc="upper right", fontsize="small")

    for k in range(1, order + 1):
        ax = axes[k]
        ax.plot(t, c[f"mod{k}_v"], color="tab:blue")
        ax.set_ylabel(f"V_mod{k} (V)", color="tab:blue")
        r = ax.twinx()
        r.plot(t, [x / 1e3 for x in c[f"r{k}_ohm"]], color="tab:red")
        r.set_ylabel(f"M{k} (kOhm)", color="tab:red")

    ax = axes[-1]
    for k in range(1, order + 1):
        ax.plot(t, c[f"resp{k}_v"], label=f"response {k}")
    ax.set_ylabel("response (V)")
    ax.set_xlabel("time (s)")
    ax.legend(loc="upper right", fontsize="small")

    fig.tight_layout()
    fig.savefig(dst, dpi=120)
    print(dst)


if __name__ == "__main__":
    main()
"#;
