"""2D projective structures: torsion-free connections and their second-order
ODEs, geodesic sprays, projective equivalence, the flatness obstruction, and
fixed-step geodesic integration."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import sympy as sp

from .expr import Expr, ExprError

__all__ = [
    "ProjectiveStructure",
    "Connection2D",
    "Spray",
    "GeodesicPath",
    "ode_from_connection",
    "projective_equivalence_shift",
    "spray",
    "flatness_invariant",
    "derivative_of_first_order",
    "geodesic_integrate",
]

FIBRE = "lam"


@dataclass(frozen=True)
class ProjectiveStructure:
    """Second-order ODE y'' = A3 y'^3 + A2 y'^2 + A1 y' + A0 on a 2D chart."""

    chart2: tuple[str, str]
    A: tuple[Expr, Expr, Expr, Expr]
    parameters: frozenset[str] = frozenset()

    def __post_init__(self):
        if len(self.chart2) != 2 or len(set(self.chart2)) != 2:
            raise ExprError("projective chart needs two distinct coordinates")
        allowed = set(self.chart2) | set(self.parameters)
        for a in self.A:
            extra = Expr(a).free_symbols() - allowed
            if extra:
                raise ExprError(f"coefficient uses undeclared symbols {sorted(extra)}")

    @classmethod
    def build(cls, chart2: Sequence[str], A, parameters=()) -> "ProjectiveStructure":
        return cls(tuple(chart2), tuple(Expr(a) for a in A), frozenset(parameters))

    def is_flat_input(self) -> bool:
        return all(Expr(a).is_proven_zero() for a in self.A)


@dataclass(frozen=True)
class Connection2D:
    """Symbols Gamma^i_jk, torsion-free (symmetric lower pair), indexed 0,1."""

    chart2: tuple[str, str]
    gamma: tuple  # gamma[i][j][k]

    @classmethod
    def build(cls, chart2: Sequence[str], gamma) -> "Connection2D":
        g = tuple(
            tuple(tuple(Expr(gamma[i][j][k]) for k in range(2)) for j in range(2))
            for i in range(2)
        )
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    if not (g[i][j][k] - g[i][k][j]).is_proven_zero():
                        raise ExprError("connection must be symmetric in its lower pair")
        return cls(tuple(chart2), g)


@dataclass(frozen=True)
class Spray:
    """d_x + lam d_y + F(x, y, lam) d_lam on the projective tangent bundle."""

    chart2: tuple[str, str]
    fibre: str
    coeff_x: Expr
    coeff_y: Expr
    coeff_fibre: Expr

    def __post_init__(self):
        lam = Expr(sp.Symbol(self.fibre))
        if not (self.coeff_x - 1).is_proven_zero():
            raise ExprError("spray must be in the normalized affine patch (d_x coefficient 1)")
        if not (self.coeff_y - lam).is_proven_zero():
            raise ExprError("spray d_y coefficient must equal the fibre coordinate")


def ode_from_connection(c: Connection2D) -> ProjectiveStructure:
    """Eliminate the parameter from the geodesic equations."""
    G = c.gamma
    a3 = G[0][1][1]
    a2 = 2 * G[0][0][1] - G[1][1][1]
    a1 = G[0][0][0] - 2 * G[1][0][1]
    a0 = -G[1][0][0]
    return ProjectiveStructure.build(c.chart2, [a0, a1, a2, a3])


def projective_equivalence_shift(c: Connection2D, a: Sequence) -> Connection2D:
    """Gamma^i_jk + a_j delta^i_k + a_k delta^i_j: same unparameterized geodesics."""
    av = [Expr(v) for v in a]
    if len(av) != 2:
        raise ExprError("equivalence shift takes a one-form with two components")
    G = c.gamma
    new = [[[G[i][j][k]
             + (av[j] if i == k else 0)
             + (av[k] if i == j else 0)
             for k in range(2)] for j in range(2)] for i in range(2)]
    return Connection2D.build(c.chart2, new)


def _poly_F(p: ProjectiveStructure) -> sp.Expr:
    lam = sp.Symbol(FIBRE)
    a0, a1, a2, a3 = (Expr(a).sym for a in p.A)
    return a0 + lam * a1 + lam**2 * a2 + lam**3 * a3


def spray(p: ProjectiveStructure) -> Spray:
    lam = sp.Symbol(FIBRE)
    return Spray(p.chart2, FIBRE, Expr(1), Expr(lam), Expr(_poly_F(p)))


def flatness_invariant(p: ProjectiveStructure) -> Expr:
    """Scalar obstruction (in x, y, lam) to point-equivalence with y'' = 0."""
    x, y = (sp.Symbol(n) for n in p.chart2)
    lam = sp.Symbol(FIBRE)
    F = _poly_F(p)

    def ddx(e):
        return sp.diff(e, x) + lam * sp.diff(e, y) + F * sp.diff(e, lam)

    F1 = sp.diff(F, lam)
    F0 = sp.diff(F, y)
    F11 = sp.diff(F, lam, 2)
    F01 = sp.diff(F, y, 1, lam, 1)
    F00 = sp.diff(F, y, 2)
    inv = (ddx(ddx(F11)) - 4 * ddx(F01) - F1 * ddx(F11)
           + 4 * F1 * F01 - 3 * F0 * F11 + 6 * F00)
    return Expr(sp.expand(inv))


def derivative_of_first_order(b) -> ProjectiveStructure:
    """The structure of y'' = b_y y' + b_x, i.e. the derivative of y' = b(x, y)."""
    b = Expr(b)
    names = sorted(b.free_symbols())
    if not set(names) <= {"x", "y"}:
        raise ExprError("b must be an expression in (x, y)")
    bx = b.diff("x")
    by = b.diff("y")
    return ProjectiveStructure.build(("x", "y"), [bx, by, Expr(0), Expr(0)])


@dataclass
class GeodesicPath:
    points: list[tuple[float, float, float]]
    completed: bool
    message: str = ""


def geodesic_integrate(p: ProjectiveStructure, init, h: float, n: int) -> GeodesicPath:
    """Classical fixed-step 4th-order integration of
    dx/ds = 1, dy/ds = lam, dlam/ds = F(x, y, lam)."""
    from .expr import _compiled  # share the lambdify cache

    xn, yn = p.chart2
    F = sp.cancel(_poly_F(p))
    fn = _compiled(F, (xn, yn, FIBRE))
    x0, y0, l0 = (float(v) for v in init)
    pts = [(x0, y0, l0)]

    def rhs(state):
        x, y, lam = state
        return (1.0, lam, fn(x, y, lam))

    state = (x0, y0, l0)
    for _ in range(n):
        try:
            k1 = rhs(state)
            k2 = rhs(tuple(s + h / 2 * k for s, k in zip(state, k1)))
            k3 = rhs(tuple(s + h / 2 * k for s, k in zip(state, k2)))
            k4 = rhs(tuple(s + h * k for s, k in zip(state, k3)))
        except (ZeroDivisionError, OverflowError, ValueError) as ex:
            return GeodesicPath(pts, False, f"integration aborted: {ex}")
        state = tuple(
            s + h / 6 * (a + 2 * b + 2 * c + d)
            for s, a, b, c, d in zip(state, k1, k2, k3, k4)
        )
        if any(abs(v) > 1e12 or v != v for v in state):
            return GeodesicPath(pts, False, "integration aborted: state diverged")
        pts.append(state)
    return GeodesicPath(pts, True)
