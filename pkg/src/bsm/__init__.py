"""Toolkit for the balanced stable marriage problem.

Data model and formats live in ``instance``; deferred acceptance and the
objective functions in ``gs``; the exhaustive oracle in ``oracle``; the
parameter-bounded shrinking pipeline in ``kernel``; the subset-and-branch
solver in ``fpt``; the clique reduction generator and verifier in
``hardness``.
"""

from .fpt import BranchCertificate, SolveResult, SolveStats, solve_above_min
from .gs import InvalidMatching, Objectives, Optima, blocking_pairs, man_optimal, objectives, optima, woman_optimal
from .hardness import (
    Graph,
    NotAClique,
    ReductionArtifact,
    ReductionReport,
    clique_bruteforce,
    parse_graph,
    reduce_clique,
    serialize_graph,
    structured_enumerate,
    verify_reduction,
    witness_matching,
)
from .instance import (
    MAN,
    WOMAN,
    GapError,
    Instance,
    Matching,
    ParseError,
    Person,
    PreferenceTable,
    ValidationError,
    functional_to_lists,
    make_instance,
    parse_instance,
    serialize,
    to_functional,
)
from .kernel import (
    KernelResult,
    KernelState,
    KernelTrace,
    NoSadPerson,
    TraceStep,
    fill_gaps,
    kernelize,
)
from .oracle import OracleDecision, StableSet, TooLarge, decide_above_max, decide_above_min, enumerate_stable

__version__ = "0.1.0"
