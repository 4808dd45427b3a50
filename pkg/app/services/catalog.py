"""Built-in fixture algebras and triples (the same data ships as JSON under data/)."""

from __future__ import annotations

from app.services.liealg import LieAlg, from_brackets
from app.services.tamepair import TripleSpec


def abelian(n: int = 2) -> LieAlg:
    return from_brackets(f"abelian{n}", [(f"v{i}", 0) for i in range(1, n + 1)], {})


def a2() -> LieAlg:
    """The 2-dimensional non-abelian algebra, [x, y] = y."""

    return from_brackets("a2", [("x", 0), ("y", 0)], {("x", "y"): {"y": 1}})


def h3() -> LieAlg:
    return from_brackets("h3", [("x", 0), ("y", 0), ("z", 0)], {("x", "y"): {"z": 1}})


def sl2() -> LieAlg:
    return from_brackets(
        "sl2",
        [("e", 0), ("h", 0), ("f", 0)],
        {("e", "f"): {"h": 1}, ("h", "e"): {"e": 2}, ("h", "f"): {"f": -2}},
    )


def aff1() -> LieAlg:
    return from_brackets("aff1", [("h", 0), ("x", 0)], {("h", "x"): {"x": 1}})


def super_heisenberg() -> LieAlg:
    """h even, t odd of degree 1, z of degree 2 with [t, t] = z."""

    return from_brackets(
        "super_heisenberg",
        [("h", 0), ("t", 1), ("z", 2)],
        {("h", "t"): {"t": 1}, ("h", "z"): {"z": 2}, ("t", "t"): {"z": 1}},
    )


def semidirect_h3() -> LieAlg:
    """A derivation line d acting on h3 by x -> x, y -> -y, z -> 0."""

    return from_brackets(
        "semidirect_h3",
        [("d", 0), ("x", 0), ("y", 0), ("z", 0)],
        {("d", "x"): {"x": 1}, ("d", "y"): {"y": -1}, ("x", "y"): {"z": 1}},
    )


def invalid_jacobi() -> LieAlg:
    return from_brackets(
        "invalid_jacobi",
        [("x", 0), ("y", 0), ("z", 0)],
        {("x", "y"): {"z": 1}, ("x", "z"): {"y": 1}, ("y", "z"): {"y": 1}},
    )


def invalid_super() -> LieAlg:
    """[t, [t, t]] != 0 for odd t."""

    return from_brackets(
        "invalid_super",
        [("t", 1), ("z", 2), ("w", 3)],
        {("t", "t"): {"z": 1}, ("t", "z"): {"w": 1}},
    )


VALID = {
    "abelian2": lambda: abelian(2),
    "a2": a2,
    "h3": h3,
    "sl2": sl2,
    "aff1": aff1,
    "super_heisenberg": super_heisenberg,
    "semidirect_h3": semidirect_h3,
}

INVALID = {"invalid_jacobi": invalid_jacobi, "invalid_super": invalid_super}


def h3_center() -> TripleSpec:
    return TripleSpec.from_names(h3(), ["z"], ["x", "y"], "h3_center")


def aff1_line() -> TripleSpec:
    return TripleSpec.from_names(aff1(), ["h"], ["x"], "aff1_line")


def sl2_cartan() -> TripleSpec:
    return TripleSpec.from_names(sl2(), ["h"], ["e", "f"], "sl2_cartan")


def semidirect() -> TripleSpec:
    return TripleSpec.from_names(semidirect_h3(), ["d"], ["x", "y", "z"], "semidirect")


def abelian_split() -> TripleSpec:
    return TripleSpec.from_names(abelian(2), ["v1"], ["v2"], "abelian_split")


TRIPLES = {
    "h3_center": h3_center,
    "aff1_line": aff1_line,
    "sl2_cartan": sl2_cartan,
    "semidirect": semidirect,
    "abelian_split": abelian_split,
}
