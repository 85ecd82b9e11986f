"""Digital nets in base 2: construction, quality parameters, exact gain
coefficients of scrambled nets, and randomization with replicate variance
estimation."""

from .gf2 import (
    BitMatrix,
    BitVector,
    in_row_space,
    nullspace_basis,
    rank,
    row_reduce,
    solution_count_log2,
)
from .netgen import (
    GeneratorSet,
    NetPoints,
    ParseError,
    SubsetIndex,
    assemble_cuk,
    assemble_nabla,
    generate_points,
    generate_points_gray,
    load_generators,
)
from .quality import (
    QualityReport,
    microstructure_A,
    microstructure_AK,
    minimal_counting_t,
    quality_report,
    t_d,
    t_star_u,
    t_u,
    t_value,
    verify_net_by_counting,
)
from .gains import (
    GainReport,
    GainValue,
    ResourceLimitError,
    enumerate_gains,
    gain_bounds,
    gain_bruteforce,
    gain_fast,
    gain_representation,
    max_gain,
)
from .scramble import (
    HaarIntegrand,
    RqmcEstimate,
    ScrambleKind,
    ScrambleSpec,
    ScrambledPoints,
    estimate,
    scramble,
    verify_gain_identity,
)
from .samples import shift_net, sobol_net

__version__ = "0.1.0"

__all__ = [
    "BitMatrix",
    "BitVector",
    "rank",
    "row_reduce",
    "in_row_space",
    "solution_count_log2",
    "nullspace_basis",
    "GeneratorSet",
    "NetPoints",
    "ParseError",
    "SubsetIndex",
    "load_generators",
    "generate_points",
    "generate_points_gray",
    "assemble_cuk",
    "assemble_nabla",
    "QualityReport",
    "quality_report",
    "t_value",
    "t_star_u",
    "t_u",
    "t_d",
    "verify_net_by_counting",
    "minimal_counting_t",
    "microstructure_A",
    "microstructure_AK",
    "GainValue",
    "GainReport",
    "ResourceLimitError",
    "gain_fast",
    "gain_bruteforce",
    "gain_representation",
    "max_gain",
    "gain_bounds",
    "enumerate_gains",
    "ScrambleKind",
    "ScrambleSpec",
    "ScrambledPoints",
    "HaarIntegrand",
    "RqmcEstimate",
    "scramble",
    "estimate",
    "verify_gain_identity",
    "shift_net",
    "sobol_net",
]
