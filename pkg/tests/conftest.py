"""Shared geometries; session-scoped so curvature caches are reused."""

import pytest

from asdnull.construct import (
    build_fefferman_like,
    build_flat,
    build_heavenly,
    build_nontwisting,
    build_ppwave,
    build_sparling_tod,
    build_twisting,
)
from asdnull.expr import parse


@pytest.fixture(scope="session")
def flat_bg():
    return build_flat()


@pytest.fixture(scope="session")
def ppwave_bg():
    return build_ppwave(parse("X^2 + Y^3"))


@pytest.fixture(scope="session")
def betazero_a2x_bg():
    return build_nontwisting(0, parse("x"), 0, 0, 0, 0)


@pytest.fixture(scope="session")
def nontwisting_generic_bg():
    return build_nontwisting(parse("x"), parse("x + y"), parse("y"),
                             parse("x*y"), parse("1/2"), parse("x^2"))


@pytest.fixture(scope="session")
def twisting_exp_bg():
    # G_zz = exp(zx - y); the scalar-invariant example
    return build_twisting(0, 0, 0, 0, parse("exp(z*x - y)/x^2 + z*x*y^3"))


@pytest.fixture(scope="session")
def twisting_poly_bg():
    return build_twisting(parse("y"), parse("x"), parse("y^2"), parse("x*y"),
                          parse("z^2/2 + z*x + y"))


@pytest.fixture(scope="session")
def fefferman_bg():
    return build_fefferman_like(parse("x"), parse("y"), 0, 0,
                                0, parse("y"), parse("x*y"), parse("x"))


@pytest.fixture(scope="session")
def sparling_uv_bg():
    return build_sparling_tod(parse("u*v"))


@pytest.fixture(scope="session")
def heavenly_ppwave():
    return build_heavenly(parse("X^2*(3*Y^2 - Y)"))


@pytest.fixture(scope="session")
def heavenly_type3():
    # exact heavenly solution of type III (used where the obstruction needs an
    # applicable conformally-Ricci-flat example)
    return build_heavenly(parse("T^2/2 + T*(X + z0)^3 + 9/5*X*(X + z0)^5"
                                .replace("z0", "Z")))


@pytest.fixture(scope="session")
def corpus(flat_bg, ppwave_bg, betazero_a2x_bg, nontwisting_generic_bg,
           twisting_exp_bg, twisting_poly_bg, fefferman_bg, sparling_uv_bg,
           heavenly_ppwave):
    return {
        "flat": flat_bg,
        "ppwave": ppwave_bg,
        "betazero_a2x": betazero_a2x_bg,
        "nontwisting_generic": nontwisting_generic_bg,
        "twisting_exp": twisting_exp_bg,
        "twisting_poly": twisting_poly_bg,
        "fefferman": fefferman_bg,
        "sparling_uv": sparling_uv_bg,
        "heavenly_ppwave": heavenly_ppwave[0],
    }
