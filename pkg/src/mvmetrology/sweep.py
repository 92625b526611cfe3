"""Angle grids, deterministic CSV emission, and figure-data tables.

Grids never emit non-finite rows: axis points falling within the exclusion
margin of a singular angle are shifted onto the margin, and the theta axis
additionally stays where postselection survives for the requested j (the
success probability at phi = 3*pi/2 collapses like cos(theta/2)^{4j} near the
south pole). All angles are radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fisher import (DerivativeConfig, measured_qfi, measured_qfi_halfspin,
                     measured_qfi_spinj, qfi_matrix_analytic, qfi_matrix_noisy)
from .protocol import P_MIN, NoiseParams, ProtocolParams, postselect
from .spin import PointerSpec, _as_twice

TWO_PI = 2.0 * math.pi
THETA_SINGULAR = (0.0, math.pi)
RATIO_PHI_SINGULAR = (0.0, math.pi, TWO_PI)  # sin(phi) = 0 kills the qubit reference value

# Central-difference step for oracle columns: small enough that truncation
# stays below the 1e-8 agreement budget next to clamped pole points.
ORACLE_STEP = 1e-6

FIG_NAMES = ("fig1", "fig2", "fig3")
FIG2_J_VALUES = (1.0, 1.5, 2.0)


@dataclass(frozen=True)
class SweepGrid:
    """Rectangular (theta, phi) grid with a margin kept around singular angles."""

    theta_points: int = 41
    phi_points: int = 41
    theta_range: tuple[float, float] = (0.0, math.pi)
    phi_range: tuple[float, float] = (0.0, TWO_PI)
    exclusion_margin: float = 1e-3

    def __post_init__(self) -> None:
        if self.theta_points < 2 or self.phi_points < 2:
            raise ValueError("grids need at least 2 points per axis")
        t_lo, t_hi = self.theta_range
        p_lo, p_hi = self.phi_range
        if not (0.0 <= t_lo < t_hi <= math.pi):
            raise ValueError(f"theta range must be ordered within [0, pi], got {self.theta_range}")
        if not (0.0 <= p_lo < p_hi <= TWO_PI):
            raise ValueError(f"phi range must be ordered within [0, 2*pi], got {self.phi_range}")
        if not self.exclusion_margin >= 0.0:
            raise ValueError(f"exclusion margin must be nonnegative, got {self.exclusion_margin}")


@dataclass(frozen=True)
class RunConfig:
    """One CLI invocation's worth of parameters."""

    j: float = 0.5
    theta: float = math.pi / 2
    phi: float = math.pi / 2
    omega: float = 0.0
    t: float = 1.0
    g: float = math.pi / 2
    nu: float | None = None
    grid: SweepGrid = field(default_factory=SweepGrid)
    out: str = ""

    def __post_init__(self) -> None:
        PointerSpec(self.j, self.theta)
        ProtocolParams(omega=self.omega, t=self.t, g=self.g, phi_post=self.phi)
        if self.nu is not None:
            NoiseParams(self.nu)

    def protocol_params(self, phi_post: float | None = None) -> ProtocolParams:
        return ProtocolParams(omega=self.omega, t=self.t, g=self.g,
                              phi_post=self.phi if phi_post is None else phi_post)


def axis_points(lo: float, hi: float, n: int, singular=(),
                margin: float = 1e-3) -> np.ndarray:
    """Uniform axis whose points are pushed ``margin`` away from singular values."""
    pts = np.linspace(lo, hi, n)
    for s in singular:
        near = np.abs(pts - s) < margin
        if near.any():
            pts[near] = s + margin if s + margin <= hi else s - margin
    return pts


def postselection_theta_cap(j: float, floor: float = 10.0 * P_MIN) -> float:
    """Largest theta keeping p >= floor for every phi: at phi = 3*pi/2 the
    success probability is cos(theta/2)^{4j}."""
    two_j = _as_twice(j, "j")
    return 2.0 * math.acos(floor ** (1.0 / (2.0 * two_j)))


def theta_axis(grid: SweepGrid, j: float = 0.5) -> np.ndarray:
    lo, hi = grid.theta_range
    cap = postselection_theta_cap(j)
    hi_margin = max(grid.exclusion_margin, math.pi - cap)
    pts = axis_points(lo, hi, grid.theta_points, singular=(0.0,),
                      margin=grid.exclusion_margin)
    high = pts > math.pi - hi_margin
    if high.any():
        pts[high] = math.pi - hi_margin
    return pts


def phi_axis(grid: SweepGrid, singular=()) -> np.ndarray:
    lo, hi = grid.phi_range
    return axis_points(lo, hi, grid.phi_points, singular=singular,
                       margin=grid.exclusion_margin)


def format_number(x: float) -> str:
    """12 significant digits; shared by every CSV column for determinism."""
    return f"{float(x):.12g}"


def write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_number(x) for x in row) + "\n")


def sweep_table(config: RunConfig) -> tuple[list[str], list[tuple]]:
    """Full grid dump in theta-major order.

    Columns: theta, phi, p_success, qm_analytic, qm_oracle, abs_diff, and the
    SLD-route h_ww / h_nn when a noise probability is set.
    """
    header = ["theta", "phi", "p_success", "qm_analytic", "qm_oracle", "abs_diff"]
    noise = NoiseParams(config.nu) if config.nu is not None else None
    if noise is not None:
        header += ["h_ww", "h_nn"]
    cfg = DerivativeConfig(step=ORACLE_STEP)
    qubit = _as_twice(config.j, "j") == 1

    rows = []
    for theta in theta_axis(config.grid, config.j):
        spec = PointerSpec(config.j, float(theta))
        for phi in phi_axis(config.grid):
            params = config.protocol_params(float(phi))
            p = postselect(spec, params).p_success
            if qubit:
                analytic = measured_qfi_halfspin(spec, params).value
            else:
                analytic = measured_qfi_spinj(spec, params).value
            oracle = measured_qfi(spec, params, cfg).value
            row = (theta, phi, p, analytic, oracle, abs(analytic - oracle))
            if noise is not None:
                mat = qfi_matrix_noisy(spec, params, noise, cfg).value
                row += (mat[0, 0], mat[1, 1])
            rows.append(row)
    return header, rows


def fig1_table(config: RunConfig) -> tuple[list[str], list[tuple]]:
    """Qubit-pointer information ratio (measured over conventional) on the grid."""
    header = ["theta", "phi", "ratio"]
    t_sq = config.t ** 2
    rows = []
    for theta in theta_axis(config.grid, j=0.5):
        spec = PointerSpec(0.5, float(theta))
        for phi in phi_axis(config.grid):
            params = config.protocol_params(float(phi))
            rows.append((theta, phi, measured_qfi_halfspin(spec, params).value / t_sq))
    return header, rows


def fig2_tables(config: RunConfig) -> list[tuple[str, list[str], list[tuple]]]:
    """Spin-j over qubit information ratios versus theta.

    Returns the main table (phi = 3*pi/2, where the modular value is largest)
    and the inset table (phi = pi/2, where it is smallest), as
    (suffix, header, rows) entries.
    """
    header = ["theta"] + [f"ratio_j{j:g}" for j in FIG2_J_VALUES]
    thetas = theta_axis(config.grid, j=max(FIG2_J_VALUES))
    tables = []
    for suffix, phi in (("", 3.0 * math.pi / 2), ("_inset", math.pi / 2)):
        rows = []
        for theta in thetas:
            params = config.protocol_params(phi)
            reference = measured_qfi_halfspin(PointerSpec(0.5, float(theta)), params).value
            ratios = [measured_qfi_spinj(PointerSpec(j, float(theta)), params).value / reference
                      for j in FIG2_J_VALUES]
            rows.append((theta, *ratios))
        tables.append((suffix, header, rows))
    return tables


def fig3_table(config: RunConfig) -> tuple[list[str], list[tuple]]:
    """nu (1 - nu) times the nu-nu Fisher entry; independent of nu, emitted at
    nu = 1/4 unless the config carries an explicit noise probability."""
    header = ["theta", "phi", "value"]
    nu = 0.25 if config.nu is None else config.nu
    noise = NoiseParams(nu)
    scale = nu - nu ** 2
    rows = []
    for theta in theta_axis(config.grid, j=0.5):
        spec = PointerSpec(0.5, float(theta))
        for phi in phi_axis(config.grid):
            params = config.protocol_params(float(phi))
            nn = qfi_matrix_analytic(spec, params, noise).value[1, 1]
            rows.append((theta, phi, scale * nn))
    return header, rows


def fig_output_paths(which: str, out: str) -> list[str]:
    """File names a figure command writes, in emission order."""
    if which == "fig2":
        stem, dot, ext = out.rpartition(".")
        if dot:
            return [out, f"{stem}_inset{dot}{ext}"]
        return [out, f"{out}_inset"]
    return [out]


def emit_figure(which: str, config: RunConfig, out: str) -> list[str]:
    """Write the CSV file(s) for one figure; returns the paths written."""
    if which == "fig1":
        header, rows = fig1_table(config)
        write_csv(out, header, rows)
        return [out]
    if which == "fig2":
        paths = fig_output_paths(which, out)
        for (suffix, header, rows), path in zip(fig2_tables(config), paths):
            write_csv(path, header, rows)
        return paths
    if which == "fig3":
        header, rows = fig3_table(config)
        write_csv(out, header, rows)
        return [out]
    raise ValueError(f"unknown figure {which!r}; expected one of {FIG_NAMES}")
