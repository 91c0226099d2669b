"""Matplotlib renderings written next to the delimited report files."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["save_figure", "figure_for"]

_PNG_META = {"Software": "geodesic-census"}


def save_figure(fig, path) -> str:
    fig.savefig(path, dpi=110, metadata=_PNG_META)
    plt.close(fig)
    return str(path)


def figure_for(kind: str, report, extra=None):
    fn = {
        "average": _fig_average,
        "variance": _fig_variance,
        "clt": _fig_clt,
        "llt": _fig_llt,
        "wordstats": _fig_wordstats,
        "mgf": _fig_mgf,
        "pressure": _fig_pressure,
        "census_info": _fig_census_info,
    }[kind]
    return fn(report, extra)


def _fig_average(rows, extra):
    fig, ax = plt.subplots(figsize=(6, 4))
    T = [r["T"] for r in rows]
    ax.plot(T, [r["empirical_mean"] for r in rows], "o-", label="empirical mean")
    ax.plot(T, [r["model_value"] for r in rows], "s--",
            label="(A/h) e^{hT}/li(e^{hT})")
    ax.plot(T, [r["elementary_model"] for r in rows], ":",
            label="A T + A/h")
    ax.set_xlabel("T")
    ax.set_ylabel("mean word length")
    ax.legend()
    fig.tight_layout()
    return fig


def _fig_variance(report, extra):
    fig, ax = plt.subplots(figsize=(6, 4))
    T = np.array(report.T_grid)
    ax.plot(T, report.var_grid, "o", label="Var_T")
    ax.plot(T, report.sigma2_hat * T + report.D_hat, "-",
            label=f"fit: {report.sigma2_hat:.4g} T + {report.D_hat:.4g} "
                  f"(R2={report.r2:.3f})")
    ax.set_xlabel("T")
    ax.set_ylabel("variance of word length")
    ax.legend()
    fig.tight_layout()
    return fig


def _fig_clt(report, extra):
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = np.array([r[0] for r in report.table])
    ecdf = np.array([r[1] for r in report.table])
    ax.step(xs, ecdf, where="post", label="empirical CDF")
    grid = np.linspace(xs.min() - 0.5, xs.max() + 0.5, 400)
    sig = math.sqrt(report.sigma2)
    from scipy.special import ndtr

    ax.plot(grid, ndtr(grid / sig), "--", label=f"Normal(0, {report.sigma2:.4g})")
    ax.set_xlabel("(|gamma| - A T)/sqrt(T)")
    ax.set_ylabel("CDF")
    ax.set_title(f"T={report.T:g}  KS={report.ks:.4f} "
                 f"(classical {report.ks_classical:.4f})")
    ax.legend()
    fig.tight_layout()
    return fig


def _fig_llt(report, extra):
    fig, ax = plt.subplots(figsize=(6, 4))
    x = np.array(report.x)
    ax.bar(x, report.scaled_frequency, width=0.8, alpha=0.6,
           label="sqrt(T) * frequency")
    grid = np.linspace(x.min() - 1, x.max() + 1, 400)
    sig = math.sqrt(report.sigma2)
    dens = np.exp(-grid**2 / (2 * report.sigma2 * report.T)) / (
        sig * math.sqrt(2 * math.pi))
    ax.plot(grid, dens, "--", label="local Gaussian")
    ax.set_xlabel("x = |gamma| - A T")
    ax.set_ylabel("scaled window frequency")
    ax.legend()
    fig.tight_layout()
    return fig


def _fig_wordstats(report, extra):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    ns = np.array(report.n_grid, dtype=float)
    ax1.plot(ns, np.array(report.mean_l) / ns, "o-", label="mean l / n")
    ax1.axhline(report.A_tilde, ls="--", color="k",
                label=f"A_tilde={report.A_tilde:.4g}")
    ax1.set_xlabel("n")
    ax1.legend()
    ax2.plot(ns, report.var_l, "o", label="Var(l)")
    ax2.plot(ns, report.sigma_tilde2_hat * ns
             + (report.var_l[-1] - report.sigma_tilde2_hat * ns[-1]), "-",
             label=f"slope {report.sigma_tilde2_hat:.4g}")
    ax2.set_xlabel("n")
    ax2.legend()
    fig.tight_layout()
    return fig


def _fig_mgf(rows, extra):
    fig, ax = plt.subplots(figsize=(6, 4))
    zs = [r["z"] for r in rows]
    ax.plot(zs, [r["log_value"] for r in rows], "o-")
    ax.set_xlabel("z")
    ax.set_ylabel(rows[0]["key"] if rows else "log value")
    fig.tight_layout()
    return fig


def _fig_pressure(rows, extra):
    fig, ax = plt.subplots(figsize=(6, 4))
    zs = sorted({r["z"] for r in rows})
    for z in zs:
        rs = [r for r in rows if r["z"] == z]
        s = [r["s"] for r in rs]
        P = [r["P"] for r in rs]
        ax.plot(s, P, "o-", label=f"z={z:g}")
        se = np.array([r["stderr"] for r in rs])
        if se.max() > 0:
            ax.fill_between(s, np.array(P) - 3 * se, np.array(P) + 3 * se,
                            alpha=0.2)
    ax.axhline(0.0, color="k", lw=0.5)
    ax.set_xlabel("s")
    ax.set_ylabel("P(z - s r)")
    ax.legend()
    fig.tight_layout()
    return fig


def _fig_census_info(rows, extra):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    ns = [r["n"] for r in rows]
    ax1.bar(ns, [r["count"] for r in rows], alpha=0.7)
    ax1.set_yscale("log")
    ax1.set_xlabel("word length n")
    ax1.set_ylabel("classes")
    ax2.plot(ns, [r["min_ell"] / r["n"] for r in rows], "o-")
    ax2.set_xlabel("word length n")
    ax2.set_ylabel("m(n)/n")
    fig.tight_layout()
    return fig
