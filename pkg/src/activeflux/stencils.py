"""Derivative stencils acting on mixed cell-average / interface-value data.

Two families:

* ``FdTableau`` -- finite differences combining cell averages and interface
  point values, approximating the derivative at one interface (the anchor).
  The named tableaus FD2..FD8c carry one free parameter (the coefficient of
  the anchor value) used to tune stability; FD3 is FD2 with the parameter
  fixed to 4, FD3A is the parameter-free five-point formula.
* ``MdTableau`` -- compact stencils combining a cell's two interface values
  and its moments, approximating the derivative at the right (or, flipped,
  left) interface of that cell.

Coefficients of the named FD tableaus are generated from the exactness
conditions in exact rational arithmetic: a tableau of order ``p`` must
differentiate monomials up to degree ``p - 1`` exactly, which together with
the free anchor coefficient pins every other entry uniquely.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "FdTableau",
    "MdTableau",
    "fd_tableau",
    "fd_flip",
    "fd_apply",
    "fd_apply_all",
    "md_tableau",
    "md_flip",
    "md_apply_all",
    "verify_order",
    "FD_NAMES",
    "DEFAULT_PARAMS",
    "CONVERGENCE_PARAMS",
]


# slot = ("a", c) for the average of cell i+c, ("p", j) for the value at
# interface i+j+1/2; the anchor is ("p", 0).
_FD_SLOTS = {
    "FD2": ([("p", -1), ("a", 0), ("p", 0)], 2),
    "FD4a": ([("p", -1), ("a", 0), ("p", 0), ("a", 1), ("p", 1)], 4),
    "FD4b": ([("a", -1), ("p", -1), ("a", 0), ("p", 0), ("a", 1)], 4),
    "FD4c": ([("p", -2), ("a", -1), ("p", -1), ("a", 0), ("p", 0)], 4),
    "FD5a": ([("a", -1), ("p", -1), ("a", 0), ("p", 0), ("a", 1), ("p", 1)], 5),
    "FD5b": ([("p", -2), ("a", -1), ("p", -1), ("a", 0), ("p", 0), ("a", 1)], 5),
    "FD6a": ([("a", -1), ("p", -1), ("a", 0), ("p", 0), ("a", 1), ("p", 1), ("a", 2)], 6),
    "FD6b": ([("p", -2), ("a", -1), ("p", -1), ("a", 0), ("p", 0), ("a", 1), ("p", 1)], 6),
    "FD6c": ([("a", -2), ("p", -2), ("a", -1), ("p", -1), ("a", 0), ("p", 0), ("a", 1)], 6),
    "FD7": ([("a", -2), ("p", -2), ("a", -1), ("p", -1), ("a", 0), ("p", 0), ("a", 1), ("p", 1)], 7),
    "FD8a": ([("p", -3), ("a", -2), ("p", -2), ("a", -1), ("p", -1), ("a", 0), ("p", 0), ("a", 1), ("p", 1)], 8),
    "FD8c": ([("p", -2), ("a", -1), ("p", -1), ("a", 0), ("p", 0), ("a", 1), ("p", 1), ("a", 2), ("p", 2)], 8),
}

FD_NAMES = ("FD2", "FD3", "FD3A", "FD4a", "FD4b", "FD4c", "FD5a", "FD5b",
            "FD6a", "FD6b", "FD6c", "FD7", "FD8a", "FD8c")

# stability-optimal defaults (maximum attainable CFL rows of the tables)
DEFAULT_PARAMS = {
    "FD2": 1.5,
    "FD3": 4.0,
    "FD4a": 1.7723,
    "FD4b": 1.0,
    "FD4c": 3.5,
    "FD5a": 1.6,
    "FD5b": 1.5,
    "FD6a": 1.88,
    "FD6b": 0.25,
    "FD6c": 2.3,
    "FD7": 0.68,
    "FD8a": 4.0 / 3.0,
    "FD8c": 1.9,
}

# parameter choices used in the advection convergence study
CONVERGENCE_PARAMS = {
    "FD3": 4.0,
    "FD4b": 1.0,
    "FD5b": 1.55,
    "FD6b": 2.0,
    "FD7": 2.5,
}


@dataclass(frozen=True)
class FdTableau:
    """Finite-difference stencil over averages and interface values.

    ``avg_coeffs`` maps cell offset c -> coefficient of the average of cell
    i+c; ``iface_coeffs`` maps offset j -> coefficient of the value at
    interface i+j+1/2.  The approximated derivative sits at interface i+1/2.
    """

    name: str
    order: int
    avg_coeffs: tuple[tuple[int, float], ...]
    iface_coeffs: tuple[tuple[int, float], ...]

    def coeff_sum(self) -> float:
        return sum(c for _, c in self.avg_coeffs) + sum(c for _, c in self.iface_coeffs)

    def window(self) -> tuple[int, int]:
        """Half-unit position range [lo, hi] of the stencil around cell i.

        Averages of cell c sit at position 2c, interface values at 2j+1.
        """
        pos = [2 * c for c, _ in self.avg_coeffs] + [2 * j + 1 for j, _ in self.iface_coeffs]
        return min(pos), max(pos)


def _solve_fd_coeffs(slots, order, param):
    """Solve the exactness system for all slots but the anchor.

    Exact rational elimination; coefficients are affine in the free anchor
    coefficient, so solving at param 0 and 1 yields the closed forms.
    """

    def avg_of_monomial(c, d):
        a, b = Fraction(2 * c - 1, 2), Fraction(2 * c + 1, 2)
        return (b ** (d + 1) - a ** (d + 1)) / (d + 1)

    def value(slot, d):
        kind, c = slot
        if kind == "p":
            return Fraction(2 * c + 1, 2) ** d
        return avg_of_monomial(c, d)

    free = ("p", 0)
    others = [s for s in slots if s != free]
    if len(others) != order:
        raise ValueError("slot count inconsistent with order")
    n = order
    rows = []
    for d in range(n):
        target = d * Fraction(1, 2) ** (d - 1) if d >= 1 else Fraction(0)
        rows.append([value(s, d) for s in others] + [target - param * value(free, d)])
    # Gaussian elimination over Fraction
    for col in range(n):
        piv = next(r for r in range(col, n) if rows[r][col] != 0)
        rows[col], rows[piv] = rows[piv], rows[col]
        pv = rows[col][col]
        rows[col] = [x / pv for x in rows[col]]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    coeffs = {s: rows[k][n] for k, s in enumerate(others)}
    coeffs[free] = param
    return coeffs


def fd_tableau(name: str, parameter: float | None = None) -> FdTableau:
    """Build a named finite-difference tableau.

    ``parameter`` is the free coefficient of the anchor value where the
    tableau has one; FD3 and FD3A are parameter-free.
    """
    if name == "FD3A":
        if parameter is not None:
            raise ValueError("FD3A has no free parameter")
        return FdTableau(
            name="FD3A", order=3,
            avg_coeffs=((0, -3.0), (1, 1.0)),
            iface_coeffs=((-1, 5.0 / 6.0), (0, 4.0 / 3.0), (1, -1.0 / 6.0)),
        )
    if name == "FD3":
        if parameter is not None:
            raise ValueError("FD3 is FD2 with the parameter fixed to 4")
        base = "FD2"
        order = 3
        param = Fraction(4)
    elif name in _FD_SLOTS:
        base = name
        slots, order = _FD_SLOTS[name]
        if parameter is None:
            param = Fraction(DEFAULT_PARAMS[name]).limit_denominator(10**12)
        else:
            param = Fraction(parameter).limit_denominator(10**12)
    else:
        raise ValueError(f"unknown tableau {name!r}")
    slots, base_order = _FD_SLOTS[base]
    coeffs = _solve_fd_coeffs(slots, base_order, param)
    avg = tuple((c, float(v)) for (k, c), v in coeffs.items() if k == "a")
    ifc = tuple((c, float(v)) for (k, c), v in coeffs.items() if k == "p")
    return FdTableau(name=name, order=order,
                     avg_coeffs=tuple(sorted(avg)), iface_coeffs=tuple(sorted(ifc)))


def fd_flip(tab: FdTableau) -> FdTableau:
    """Mirror a tableau about its anchor interface and negate it.

    The result approximates the same derivative, biased to the other side;
    cell offset c maps to 1-c, interface offset j to -j.
    """
    avg = tuple(sorted((1 - c, -v) for c, v in tab.avg_coeffs))
    ifc = tuple(sorted((-j, -v) for j, v in tab.iface_coeffs))
    return FdTableau(name=tab.name + "*", order=tab.order, avg_coeffs=avg, iface_coeffs=ifc)


def fd_apply(tab: FdTableau, avgs: np.ndarray, ifaces: np.ndarray,
             interface_index: int, dx: float) -> np.ndarray:
    """Apply the tableau at one interface of a periodic state.

    ``avgs`` and ``ifaces`` have shape (m, n); ``ifaces[:, i]`` is the value
    at interface i+1/2.  Returns the m-vector derivative estimate.
    """
    n = avgs.shape[-1]
    i = interface_index
    out = np.zeros(avgs.shape[:-1])
    for c, v in tab.avg_coeffs:
        out += v * avgs[..., (i + c) % n]
    for j, v in tab.iface_coeffs:
        out += v * ifaces[..., (i + j) % n]
    return out / dx


def fd_apply_all(tab: FdTableau, avgs: np.ndarray, ifaces: np.ndarray,
                 dx: float) -> np.ndarray:
    """Vectorized `fd_apply` over every interface of a periodic state."""
    out = np.zeros_like(avgs)
    for c, v in tab.avg_coeffs:
        out += v * np.roll(avgs, -c, axis=-1)
    for j, v in tab.iface_coeffs:
        out += v * np.roll(ifaces, -j, axis=-1)
    return out / dx


@dataclass(frozen=True)
class MdTableau:
    """Moment-difference stencil over one cell's interfaces and moments.

    ``left``/``right`` weight the cell's interface values, ``moments[p]``
    its p-th moment.  ``anchor`` names the interface where the derivative is
    approximated: the cell's right interface for the tabulated forms, the
    left one for flipped tableaus.
    """

    order: int
    left: float
    right: float
    moments: tuple[float, ...]
    anchor: str = "right"

    def even_sum(self) -> float:
        # coefficients of even moments and the point values cancel
        return self.left + self.right + sum(v for p, v in enumerate(self.moments) if p % 2 == 0)


_MD_TABLE = {
    3: (2.0, 4.0, (-6.0,)),
    5: (4.0, 16.0, (15.0, -15.0, -35.0)),
    7: (6.0, 36.0, (-105.0 / 4, 105.0 / 2, 315.0 / 2, -315.0 / 4, -693.0 / 4)),
}


def md_tableau(order: int) -> MdTableau:
    if order not in _MD_TABLE:
        raise ValueError(f"unsupported moment-difference order {order}")
    left, right, moms = _MD_TABLE[order]
    return MdTableau(order=order, left=left, right=right, moments=moms)


def md_flip(tab: MdTableau) -> MdTableau:
    """Reflect a moment tableau; odd moments keep their sign, even flip."""
    moms = tuple(v * (-1.0) ** (p + 1) for p, v in enumerate(tab.moments))
    anchor = "left" if tab.anchor == "right" else "right"
    return MdTableau(order=tab.order, left=-tab.right, right=-tab.left,
                     moments=moms, anchor=anchor)


def md_apply_all(tab: MdTableau, ifaces: np.ndarray, moments: np.ndarray,
                 dx: float) -> np.ndarray:
    """Apply a moment tableau in every cell of a periodic state.

    ``ifaces`` has shape (m, n) with ``ifaces[:, i]`` the value at interface
    i+1/2; ``moments`` has shape (m, n, n_mom).  Entry i of the result is the
    derivative estimate at the tableau's anchor interface of cell i.
    """
    left_vals = np.roll(ifaces, 1, axis=-1)
    out = tab.left * left_vals + tab.right * ifaces
    for p, v in enumerate(tab.moments):
        out = out + v * moments[..., p]
    return out / dx


def _fd_exact_apply(tab: FdTableau, d: int) -> float:
    """Apply the tableau to exact data of x**d on the unit grid."""
    total = 0.0
    for c, v in tab.avg_coeffs:
        a, b = c - 0.5, c + 0.5
        total += v * (b ** (d + 1) - a ** (d + 1)) / (d + 1)
    for j, v in tab.iface_coeffs:
        total += v * (j + 0.5) ** d
    return total


def _md_exact_apply(tab: MdTableau, d: int) -> float:
    total = tab.left * (-0.5) ** d + tab.right * 0.5 ** d
    for p, v in enumerate(tab.moments):
        a_p = (p + 1) * 2 ** p
        exact = a_p * (0.5 ** (p + d + 1) - (-0.5) ** (p + d + 1)) / (p + d + 1)
        total += v * exact
    return total


def verify_order(tab: FdTableau | MdTableau, max_degree: int = 12,
                 tol: float = 1e-10) -> int:
    """Largest d such that monomials x^0..x^d are differentiated exactly.

    Uses dx = 1; the FD anchor sits at x = 1/2, the MD anchor at the cell
    edge selected by the tableau.
    """
    if isinstance(tab, FdTableau):
        anchor = 0.5
        apply_exact = _fd_exact_apply
    else:
        anchor = 0.5 if tab.anchor == "right" else -0.5
        apply_exact = _md_exact_apply
    best = -1
    for d in range(max_degree + 1):
        target = d * anchor ** (d - 1) if d >= 1 else 0.0
        if abs(apply_exact(tab, d) - target) > tol:
            break
        best = d
    return best
