"""Matplotlib rendering of study figures and prior field maps.

SVG output is made byte-reproducible: fixed hash salt, no date metadata.
"""

from __future__ import annotations

import numpy as np


def _plt():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "sphreg"
    return plt


def _savefig(fig, path):
    kwargs = {}
    if str(path).endswith(".svg"):
        kwargs["metadata"] = {"Date": None}
    fig.savefig(path, **kwargs)


def render_report_figure(report, path, title: str | None = None) -> None:
    """Log-log RMSE plot with the fitted and theoretical reference lines."""
    plt = _plt()
    ns = np.array([row.n for row in report.rows], dtype=float)
    means = np.array([row.rmse_mean for row in report.rows])
    sds = np.array([row.rmse_sd for row in report.rows])

    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ax.errorbar(ns, means, yerr=sds, fmt="o", ms=4, capsize=3, label="mean RMSE")
    grid_n = np.geomspace(ns[0], ns[-1], 64)
    fitted = np.exp(report.intercept) * grid_n**report.slope
    ax.plot(grid_n, fitted, "--", label=f"fit, slope {report.slope:.3f}")
    anchor = np.exp(report.intercept) * ns[0] ** report.slope
    theory = anchor * (grid_n / ns[0]) ** report.theoretical_slope
    ax.plot(
        grid_n,
        theory,
        ":",
        label=f"theory, slope {report.theoretical_slope:.3f}",
    )
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("sample size $n$")
    ax.set_ylabel("RMSE")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    _savefig(fig, path)
    plt.close(fig)


def render_field_map(coeffs, path, resolution: int = 181, title: str | None = None) -> None:
    """Longitude-colatitude heat map of a synthesized field on S^2."""
    from .harmonics import basis_matrix

    plt = _plt()
    theta = np.linspace(0.0, np.pi, resolution)
    phi = np.linspace(-np.pi, np.pi, 2 * resolution)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    points = np.column_stack(
        [
            (np.sin(tt) * np.cos(pp)).ravel(),
            (np.sin(tt) * np.sin(pp)).ravel(),
            np.cos(tt).ravel(),
        ]
    )
    values = (basis_matrix(coeffs.max_degree, points) @ coeffs.values).reshape(tt.shape)

    fig, ax = plt.subplots(figsize=(6.0, 3.2))
    # rasterize the mesh so vector output stays small
    mesh = ax.pcolormesh(
        np.degrees(pp), 90.0 - np.degrees(tt), values, shading="auto", rasterized=True
    )
    fig.colorbar(mesh, ax=ax, shrink=0.9)
    ax.set_xlabel("longitude [deg]")
    ax.set_ylabel("latitude [deg]")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    _savefig(fig, path)
    plt.close(fig)
