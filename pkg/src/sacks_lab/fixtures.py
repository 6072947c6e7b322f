"""Small shipped codes used by the engines' demos, the CLI and the tests.

The branch-to-injection code reads bits of the branch matrix and sends each
block ``4j..4j+3`` of indices to the block ``4j+8..4j+11``, swapping pairs
inside the block when the chosen bit is 1.  Its outputs are injective on every
branch, and different ``3 x 3`` squares give different outputs.
"""
from __future__ import annotations

from .codes import Code, Matrix

DEPTH = 3
# output lengths on squares of size 0..3
LENGTHS = (0, 4, 16, 272)
_SWAP = (1, 0, 3, 2)


def _bits(m: Matrix, d: int) -> str:
    return "".join(r[:d] for r in m[:d])


def _region(l: int) -> int:
    return next(d for d in range(1, len(LENGTHS)) if l < LENGTHS[d])


def injection_value(m: Matrix, l: int) -> int:
    d = _region(l)
    j, r = divmod(l, 4)
    bit = _bits(m, d)[j % (d * d)]
    return 4 * j + 8 + (_SWAP[r] if bit == "1" else r)


def branch_to_injection(low: tuple[int, ...] = ()) -> Code:
    """The depth-3 fixture; ``low`` overrides the first few output values."""

    def out(m: Matrix) -> list[int]:
        n = len(m)
        vals = [injection_value(m, l) for l in range(LENGTHS[n])]
        for i, v in enumerate(low[: len(vals)]):
            vals[i] = v
        return vals

    return Code.from_function(DEPTH, out, bound=LENGTHS[DEPTH])


def mcg_fixture() -> Code:
    return branch_to_injection()


def ed_fixture() -> Code:
    """Same as the mcg fixture but with value 7 at indices 0 and 1."""
    return branch_to_injection((7, 7))


def constant_fixture(value: int = 9) -> Code:
    return Code.from_function(DEPTH, lambda m: [value + l for l in range(LENGTHS[len(m)])], bound=LENGTHS[DEPTH])


def set_fixture() -> Code:
    """A coded set: strictly increasing odd values ``4l + 1`` or ``4l + 3`` chosen by the branch."""

    def out(m: Matrix) -> list[int]:
        vals = []
        for l in range(LENGTHS[len(m)]):
            d = _region(l)
            bit = _bits(m, d)[(l // 4) % (d * d)]
            vals.append(4 * l + 1 + (2 if bit == "1" else 0))
        return vals

    return Code.from_function(DEPTH, out, bound=LENGTHS[DEPTH])
