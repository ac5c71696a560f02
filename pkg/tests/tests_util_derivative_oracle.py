"""Finite-difference oracle shared by the acceptance suite."""

import random
from fractions import Fraction

from asdnull.expr import Assignment, EvalError, differentiate, evaluate, parse

CORPUS = [
    "x^3 - 2*x*y + 7/3",
    "x^2*y^3 - y*x + 5",
    "exp(z*x - y)/x^2",
    "sin(x)*cos(y) + x^2",
    "log(1 + x^2)*y",
    "(x + y)^4/(1 + y^2)",
    "exp(x)*sin(y) - cos(x*y)",
    "x/y + y/x",
    "1/(x^2 + y^2 + 1)",
    "cos(x)^3 - sin(y)^2*x",
]


def derivative_matches_fd(points_per_expr: int = 2, h: float = 1e-6,
                          rel_tol: float = 1e-6, seed: int = 11) -> bool:
    rng = random.Random(seed)
    checked = 0
    for text in CORPUS:
        e = parse(text)
        names = sorted(e.free_symbols())
        d = differentiate(e, "x")
        done = 0
        while done < points_per_expr:
            point = {n: Fraction(rng.randint(1, 9), rng.randint(1, 9)) for n in names}
            up = Assignment({k: float(v) + (h if k == "x" else 0.0)
                             for k, v in point.items()})
            dn = Assignment({k: float(v) - (h if k == "x" else 0.0)
                             for k, v in point.items()})
            mid = Assignment({k: float(v) for k, v in point.items()})
            try:
                expected = (evaluate(e, up) - evaluate(e, dn)) / (2 * h)
                got = evaluate(d, mid)
            except EvalError:
                continue
            scale = max(1.0, abs(expected), abs(got))
            if abs(got - expected) / scale >= rel_tol:
                return False
            done += 1
            checked += 1
    return checked >= 20
