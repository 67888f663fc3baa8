"""Schedule figure and tab-separated summary for ``bootstrap report``."""

from __future__ import annotations

import io
import math
from fractions import Fraction

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .bootstrap import Pow2, Schedule, exact_text  # noqa: E402


def log2_num(x: int | Pow2 | Fraction) -> float:
    if isinstance(x, Pow2):
        return float(x.e)
    if isinstance(x, Fraction):
        return math.log2(x.numerator) - math.log2(x.denominator)
    return math.log2(x)


def schedule_rows(sch: Schedule) -> list[dict]:
    rows = [{"stage": 0, "log2_n": log2_num(sch.n0), "log2_t": log2_num(sch.t0), "n": exact_text(sch.n0), "t": exact_text(sch.t0)}]
    for st in sch.stages:
        rows.append({"stage": st.i, "log2_n": log2_num(st.n), "log2_t": log2_num(st.t), "n": exact_text(st.n), "t": exact_text(st.t)})
    return rows


def schedule_tsv(sch: Schedule) -> str:
    cols = ("stage", "log2_n", "log2_t", "n", "t")
    out = ["\t".join(cols)]
    for r in schedule_rows(sch):
        out.append("\t".join(f"{r[c]:.6g}" if isinstance(r[c], float) else str(r[c]) for c in cols))
    return "\n".join(out) + "\n"


def schedule_figure(sch: Schedule) -> bytes:
    """PNG of log2 log2 n_i and log2 log2 t_i against the stage index."""
    rows = schedule_rows(sch)
    xs = [r["stage"] for r in rows]
    ln = [math.log2(max(r["log2_n"], 1.0)) for r in rows]
    lt = [math.log2(max(r["log2_t"], 1.0)) for r in rows]
    fig, ax = plt.subplots(figsize=(5.0, 3.2), dpi=100)
    ax.plot(xs, ln, "o-", label="log2 log2 n_i")
    ax.plot(xs, lt, "s--", label="log2 log2 t_i")
    ax.set_xlabel("stage i")
    ax.set_xticks(xs)
    ax.set_title(f"n0={sch.n0}, eps={sch.epsilon}")
    ax.legend(frameon=False)
    fig.tight_layout()
    buf = io.BytesIO()
    fig.savefig(buf, format="png", metadata={"Software": None})
    plt.close(fig)
    return buf.getvalue()
