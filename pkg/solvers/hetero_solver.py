"""
Direct heterogeneous solve along the layering normal, up-scaling by cell
averages, first-order down-scaling, and comparison with the homogenized
solution.

The micro problem on [0, L) with L = cells * epsilon is

    (K theta')' + r = 0,  (D eta')' + s = 0,  (C u' - alpha theta - beta eta)' + b = 0

with piecewise-constant coefficients (the 22 components of each layer) and
periodic boundary conditions. It is discretized by vertex-centered finite
volumes on a grid whose nodes include every material interface; each field
is pinned to zero mean through a bordered system.
"""

import logging
import math
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from errors import SolverError
from models import (
    ComparisonReport,
    FieldError,
    HarmonicLoad,
    Laminate,
    MacroSolution,
    MicroGrid,
    MicroSolution,
    PerturbationProfile,
    ProfileKind,
    UpscaledFields,
)
from solvers.cell_solver import effective_constants_cell
from solvers.macro_solver import solve_homogenized

logger = logging.getLogger(__name__)

MIN_NODES_PER_WAVELENGTH = 8
SOLVE_TOLERANCE = 1e-8


class GridGeometry(NamedTuple):
    x: np.ndarray
    h: np.ndarray
    layer: np.ndarray
    dual: np.ndarray
    L: float
    cells: int
    nodes_per_layer: int


def build_grid(laminate: Laminate, grid: MicroGrid) -> GridGeometry:
    """Nodes at the start of each of the nodes_per_layer equal segments of every layer of every cell."""
    eps = laminate.epsilon
    n = grid.nodes_per_layer
    f = laminate.fractions
    starts = np.concatenate(([0.0], np.cumsum(f)[:-1]))
    local = (starts[:, None] + f[:, None] * np.arange(n)[None, :] / n).ravel() * eps
    x = (np.arange(grid.cells)[:, None] * eps + local[None, :]).ravel()
    L = grid.cells * eps
    h = np.diff(np.append(x, L))
    layer = np.tile(np.repeat(np.arange(laminate.n_layers), n), grid.cells)
    dual = 0.5 * (h + np.roll(h, 1))
    return GridGeometry(x=x, h=h, layer=layer, dual=dual, L=L, cells=grid.cells, nodes_per_layer=n)


def _segment_values(laminate: Laminate, geom: GridGeometry, name: str) -> np.ndarray:
    return laminate.component_values(name)[geom.layer]


def _dual_integral(geom: GridGeometry, amplitude: float, wave: int, L: float) -> np.ndarray:
    """Exact integral of amplitude*cos(2 pi wave x/L) over each dual cell."""
    if amplitude == 0.0:
        return np.zeros_like(geom.x)
    k = 2.0 * math.pi * wave / L
    left = geom.x - 0.5 * np.roll(geom.h, 1)
    right = geom.x + 0.5 * geom.h
    return amplitude * (np.sin(k * right) - np.sin(k * left)) / k


def _stiffness(conductance: np.ndarray) -> sp.csr_matrix:
    """Periodic operator (A v)_j = g_j (v_j - v_{j+1}) + g_{j-1} (v_j - v_{j-1})."""
    size = conductance.size
    index = np.arange(size)
    previous = np.roll(conductance, 1)
    rows = np.concatenate((index, index, index))
    cols = np.concatenate((index, (index + 1) % size, (index - 1) % size))
    data = np.concatenate((conductance + previous, -conductance, -previous))
    return sp.coo_matrix((data, (rows, cols)), shape=(size, size)).tocsr()


def _solve_periodic(stiffness: sp.csr_matrix, rhs: np.ndarray, weights: np.ndarray, label: str) -> np.ndarray:
    """Solve A v = rhs subject to sum(weights * v) = 0 via the bordered system."""
    if not np.any(rhs):
        return np.zeros_like(rhs)
    border = sp.csr_matrix(weights.reshape(-1, 1))
    system = sp.bmat([[stiffness, border], [border.T, None]], format="csc")
    full_rhs = np.append(rhs, 0.0)
    solution = spla.spsolve(system, full_rhs)
    if not np.all(np.isfinite(solution)):
        raise SolverError(f"{label} solve did not converge")
    scale = float(np.max(abs(system) @ np.abs(solution)) + np.max(np.abs(full_rhs)))
    residual = float(np.max(np.abs(system @ solution - full_rhs)) / scale)
    logger.debug("%s solve: %d unknowns, residual %.2e", label, rhs.size, residual)
    if residual > SOLVE_TOLERANCE:
        raise SolverError(f"{label} solve residual {residual:.3e} exceeds {SOLVE_TOLERANCE:g}")
    return solution[:-1]


def _face_fluxes(laminate: Laminate, geom: GridGeometry, u, theta, eta):
    h = geom.h
    C = _segment_values(laminate, geom, "C2222")
    alpha = _segment_values(laminate, geom, "alpha22")
    beta = _segment_values(laminate, geom, "beta22")
    K = _segment_values(laminate, geom, "K22")
    D = _segment_values(laminate, geom, "D22")
    tau = alpha * 0.5 * (theta + np.roll(theta, -1)) + beta * 0.5 * (eta + np.roll(eta, -1))
    sigma = C * (np.roll(u, -1) - u) / h - tau
    q = -K * (np.roll(theta, -1) - theta) / h
    j = -D * (np.roll(eta, -1) - eta) / h
    return sigma, q, j, tau


def _check_load(load: HarmonicLoad, geom: GridGeometry) -> None:
    if load.direction != 2:
        raise ValueError("heterogeneous solves run along the layering normal only (direction 2)")
    if abs(load.L - geom.L) > 1e-12 * geom.L:
        raise ValueError(
            f"load period L={load.L!r} is not aligned with the grid: expected cells*epsilon={geom.L!r}"
        )
    nodes = geom.x.size
    for amplitude, wave in (("B", "m"), ("R", "n"), ("S", "p")):
        if getattr(load, amplitude) != 0.0:
            per_wavelength = nodes / abs(getattr(load, wave))
            if per_wavelength < MIN_NODES_PER_WAVELENGTH:
                raise ValueError(
                    f"grid resolves {wave} with {per_wavelength:.1f} nodes per wavelength, "
                    f"need at least {MIN_NODES_PER_WAVELENGTH}"
                )


def solve_heterogeneous(laminate: Laminate, load: HarmonicLoad, grid: MicroGrid) -> MicroSolution:
    """
    Solve the micro problem for a load along the layering normal.

    Temperature and chemical potential are solved first; they enter the
    mechanical equation as known stress terms alpha*theta + beta*eta,
    interpolated linearly to segment midpoints.

    Raises:
        ValueError: for direction-1 loads, a period not equal to cells*epsilon,
            or fewer than 8 nodes per source wavelength
        SolverError: if a linear solve fails
    """
    geom = build_grid(laminate, grid)
    _check_load(load, geom)

    body = _dual_integral(geom, load.B, load.m, geom.L)
    heat = _dual_integral(geom, load.R, load.n, geom.L)
    mass = _dual_integral(geom, load.S, load.p, geom.L)

    K = _segment_values(laminate, geom, "K22")
    D = _segment_values(laminate, geom, "D22")
    C = _segment_values(laminate, geom, "C2222")

    theta = _solve_periodic(_stiffness(K / geom.h), heat, geom.dual, "conduction")
    eta = _solve_periodic(_stiffness(D / geom.h), mass, geom.dual, "diffusion")

    alpha = _segment_values(laminate, geom, "alpha22")
    beta = _segment_values(laminate, geom, "beta22")
    tau = alpha * 0.5 * (theta + np.roll(theta, -1)) + beta * 0.5 * (eta + np.roll(eta, -1))
    u = _solve_periodic(_stiffness(C / geom.h), body - (tau - np.roll(tau, 1)), geom.dual, "mechanical")

    sigma, q, j, _ = _face_fluxes(laminate, geom, u, theta, eta)
    logger.info(
        "heterogeneous solve: %d cells, %d nodes, L=%g", geom.cells, geom.x.size, geom.L
    )
    return MicroSolution(
        L=geom.L,
        epsilon=laminate.epsilon,
        x=geom.x,
        u=u,
        theta=theta,
        eta=eta,
        x_faces=geom.x + 0.5 * geom.h,
        sigma=sigma,
        q=q,
        j=j,
        dual_widths=geom.dual,
        body_force=body,
        heat_source=heat,
        mass_source=mass,
    )


def flux_balance_defect(micro: MicroSolution) -> Dict[str, float]:
    """
    Largest defect of the discrete balance at any node, per equation: the
    jump of the face flux across a node minus the source collected by its
    dual cell, relative to the largest flux or source magnitude.
    """
    checks = {
        "thermal": (micro.q, micro.heat_source, -1.0),
        "diffusive": (micro.j, micro.mass_source, -1.0),
        "mechanical": (micro.sigma, micro.body_force, 1.0),
    }
    defects = {}
    for name, (flux, source, sign) in checks.items():
        source = np.zeros_like(flux) if source is None else source
        jump = flux - np.roll(flux, 1)
        scale = max(float(np.max(np.abs(flux))), float(np.max(np.abs(source))))
        defect = np.abs(jump + sign * source)
        defects[name] = float(np.max(defect) / scale) if scale > 0 else 0.0
    return defects


def source_compatibility(micro: MicroSolution) -> float:
    """|sum of dual-cell sources| relative to sum of magnitudes, worst of the three equations."""
    worst = 0.0
    for source in (micro.body_force, micro.heat_source, micro.mass_source):
        if source is None or not np.any(source):
            continue
        worst = max(worst, float(abs(np.sum(source)) / np.sum(np.abs(source))))
    return worst


def field_means(micro: MicroSolution) -> Dict[str, float]:
    """Trapezoid means of u, theta, eta, relative to the field magnitude."""
    means = {}
    for name, values in (("u", micro.u), ("theta", micro.theta), ("eta", micro.eta)):
        peak = float(np.max(np.abs(values)))
        mean = float(np.dot(micro.dual_widths, values) / micro.L)
        means[name] = mean / peak if peak > 0 else 0.0
    return means


def cell_average(x: np.ndarray, values: np.ndarray, L: float, width: float, at: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Centered moving average of width `width` of the periodic piecewise-linear
    interpolant of (x, values), computed exactly from its antiderivative.
    """
    x = np.asarray(x, dtype=float)
    values = np.asarray(values, dtype=float)
    size = x.size
    nodes = np.append(x, L)
    ends = np.append(values, values[0])
    h = np.diff(nodes)
    primitive = np.concatenate(([0.0], np.cumsum(0.5 * h * (ends[:-1] + ends[1:]))))
    period_integral = primitive[-1]

    def antiderivative(y: np.ndarray) -> np.ndarray:
        turns = np.floor(y / L)
        r = y - turns * L
        e = np.clip(np.searchsorted(nodes, r, side="right") - 1, 0, size - 1)
        t = r - nodes[e]
        slope = (ends[e + 1] - ends[e]) / h[e]
        return primitive[e] + ends[e] * t + 0.5 * slope * t ** 2 + turns * period_integral

    at = x if at is None else np.asarray(at, dtype=float)
    return (antiderivative(at + 0.5 * width) - antiderivative(at - 0.5 * width)) / width


def upscale(micro: MicroSolution, laminate: Laminate) -> UpscaledFields:
    """Macro estimates of U, Theta, Upsilon as cell averages of the micro fields, centered at each node."""
    eps = laminate.epsilon
    return UpscaledFields(
        x=micro.x,
        U=cell_average(micro.x, micro.u, micro.L, eps),
        theta=cell_average(micro.x, micro.theta, micro.L, eps),
        upsilon=cell_average(micro.x, micro.eta, micro.L, eps),
    )


def downscale_first_order(
    macro: MacroSolution,
    profiles: Mapping[ProfileKind, PerturbationProfile],
    laminate: Laminate,
    grid: MicroGrid,
) -> MicroSolution:
    """
    First-order reconstruction of the micro fields on the heterogeneous grid:

        u     = U + eps (N222 U' + Ntilde2 Theta + Nhat2 Upsilon)
        theta = Theta + eps M2 Theta'
        eta   = Upsilon + eps W2 Upsilon'

    with the profiles evaluated at xi = x/eps.
    """
    if macro.direction != 2:
        raise ValueError("down-scaling onto the layered grid needs a direction-2 solution")
    geom = build_grid(laminate, grid)
    eps = laminate.epsilon
    x = geom.x
    xi = x / eps

    u = macro.U(x) + eps * (
        profiles[ProfileKind.N222](xi) * macro.dU(x)
        + profiles[ProfileKind.NTILDE2](xi) * macro.theta(x)
        + profiles[ProfileKind.NHAT2](xi) * macro.upsilon(x)
    )
    theta = macro.theta(x) + eps * profiles[ProfileKind.M2](xi) * macro.dtheta(x)
    eta = macro.upsilon(x) + eps * profiles[ProfileKind.W2](xi) * macro.dupsilon(x)

    sigma, q, j, _ = _face_fluxes(laminate, geom, u, theta, eta)
    return MicroSolution(
        L=geom.L,
        epsilon=eps,
        x=x,
        u=u,
        theta=theta,
        eta=eta,
        x_faces=x + 0.5 * geom.h,
        sigma=sigma,
        q=q,
        j=j,
        dual_widths=geom.dual,
    )


def field_error(name: str, value: np.ndarray, reference: np.ndarray, weights: np.ndarray) -> FieldError:
    """Relative weighted-L2 and L-infinity errors; None where the reference vanishes."""
    diff = np.asarray(value) - np.asarray(reference)
    norm_ref = math.sqrt(float(np.dot(weights, reference ** 2)))
    peak_ref = float(np.max(np.abs(reference)))
    return FieldError(
        field=name,
        relative_l2=math.sqrt(float(np.dot(weights, diff ** 2))) / norm_ref if norm_ref > 0 else None,
        linf=float(np.max(np.abs(diff))) / peak_ref if peak_ref > 0 else None,
    )


def _grid_shape(micro: MicroSolution, laminate: Laminate):
    cells = int(round(micro.L / laminate.epsilon))
    nodes_per_layer = micro.x.size // (cells * laminate.n_layers)
    return cells, nodes_per_layer


def cell_flux_check(macro: MacroSolution, micro: MicroSolution, laminate: Laminate) -> Optional[float]:
    """
    Cell-by-cell mean of the micro heat flux q against the cell mean of the
    homogenized flux -K Theta'. Relative L-infinity gap, None without heat source.
    """
    cells, _ = _grid_shape(micro, laminate)
    eps = laminate.epsilon
    h = np.diff(np.append(micro.x, micro.L))
    micro_means = np.sum((h * micro.q).reshape(cells, -1), axis=1) / eps
    lower = np.arange(cells) * eps
    macro_means = -macro.K * (macro.theta(lower + eps) - macro.theta(lower)) / eps
    peak = float(np.max(np.abs(macro_means)))
    if peak == 0.0:
        return None
    return float(np.max(np.abs(micro_means - macro_means)) / peak)


def compare(
    macro: MacroSolution,
    micro: MicroSolution,
    laminate: Laminate,
    runtimes: Optional[Dict[str, float]] = None,
) -> ComparisonReport:
    """
    Relative errors between the up-scaled micro fields and the homogenized
    fields. Both sides pass through the same cell-average operator before
    differencing.
    """
    x, L, eps = micro.x, micro.L, laminate.epsilon
    pairs = (
        ("U", micro.u, macro.U(x)),
        ("Theta", micro.theta, macro.theta(x)),
        ("Upsilon", micro.eta, macro.upsilon(x)),
    )
    errors = [
        field_error(name, cell_average(x, fine, L, eps), cell_average(x, coarse, L, eps), micro.dual_widths)
        for name, fine, coarse in pairs
    ]
    cells, nodes_per_layer = _grid_shape(micro, laminate)
    return ComparisonReport(
        direction=2,
        L=L,
        epsilon=eps,
        cells=cells,
        nodes_per_layer=nodes_per_layer,
        nodes=int(x.size),
        errors=errors,
        flux_check=cell_flux_check(macro, micro, laminate),
        runtimes=dict(runtimes or {}),
    )


def reconstruction_errors(predicted: MicroSolution, micro: MicroSolution) -> List[FieldError]:
    """Down-scaled prediction against the heterogeneous solve, node by node."""
    return [
        field_error("u", predicted.u, micro.u, micro.dual_widths),
        field_error("theta", predicted.theta, micro.theta, micro.dual_widths),
        field_error("eta", predicted.eta, micro.eta, micro.dual_widths),
    ]


def grid_convergence(
    laminate: Laminate, load: HarmonicLoad, cells: int, ladder: Sequence[int]
) -> List[Dict[str, float]]:
    """
    Nodal errors of a homogeneous laminate against the exact homogenized
    fields over a ladder of nodes_per_layer values, with observed orders
    between consecutive rungs.
    """
    if len({phase.model_dump_json() for phase in laminate.phases}) != 1:
        raise ValueError("grid convergence needs a homogeneous laminate")
    exact = solve_homogenized(effective_constants_cell(laminate), load)
    rows: List[Dict[str, float]] = []
    for nodes_per_layer in ladder:
        micro = solve_heterogeneous(laminate, load, MicroGrid(cells=cells, nodes_per_layer=nodes_per_layer))
        errors = {}
        for name, fine, reference in (
            ("u", micro.u, exact.U(micro.x)),
            ("theta", micro.theta, exact.theta(micro.x)),
            ("eta", micro.eta, exact.upsilon(micro.x)),
        ):
            errors[name] = field_error(name, fine, reference, micro.dual_widths).relative_l2
        row = {"nodes_per_layer": float(nodes_per_layer), "h": float(np.max(np.diff(np.append(micro.x, micro.L))))}
        row.update({f"error_{k}": v for k, v in errors.items() if v is not None})
        if rows:
            previous = rows[-1]
            for key in [k for k in row if k.startswith("error_") and k in previous]:
                row["order_" + key[6:]] = math.log(previous[key] / row[key]) / math.log(previous["h"] / row["h"])
        rows.append(row)
    return rows
