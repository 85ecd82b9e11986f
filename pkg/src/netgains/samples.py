"""Small canonical nets used by the test suites and the docs.

The shift net is the classic 16-point, 4-dimensional net whose generator
matrices are column shifts of one another; only the top three rows matter
for its structure, and the fourth rows are fixed to zero here so every
artifact built from it is reproducible.  Its t parameter is 1 while the
depth->=1 parameter of the full coordinate set is 0, which makes it the
smallest interesting example for gain bounds.
"""

from __future__ import annotations

from .netgen import GeneratorSet, load_generators, parse_direction_numbers, sobol_generator_set

SHIFT_NET_RAW = """\
4 4

0001
0110
0010
0000

0010
1100
0100
0000

0100
1001
1000
0000

1000
0011
0001
0000
"""

# leading dimensions of the standard Joe-Kuo direction-number table
JOE_KUO_HEAD = """\
d       s       a       m_i
2       1       0       1
3       2       1       1 3
4       3       1       1 3 1
5       3       2       1 1 1
6       4       1       1 1 3 3
7       4       4       1 3 5 13
"""


def shift_net() -> GeneratorSet:
    return load_generators(SHIFT_NET_RAW, "raw")


def sobol_net(dims: int, m: int) -> GeneratorSet:
    """First ``dims`` Sobol' dimensions (dims <= 7) at ``m`` bits."""
    return sobol_generator_set(parse_direction_numbers(JOE_KUO_HEAD.splitlines()), dims, m)


__all__ = ["SHIFT_NET_RAW", "JOE_KUO_HEAD", "shift_net", "sobol_net"]
