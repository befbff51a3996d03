"""Compile n-qubit unitaries into single-qubit rotations and low-weight Pauli exponentials."""

from .coset import CosetFactors, SubgroupSplit, coset_generator, coset_left, coset_right, subgroup_split
from .errors import (
    ConvergenceError,
    CosetSynthError,
    DimensionError,
    FormatError,
    SingularBlockError,
    SingularityError,
    SynthesisError,
    UnitarityError,
    VerificationError,
)
from .gates import GateSpec, make_gate, qft, random_unitary
from .pauli import PauliCoeffs, PauliString, expand_generator, pauli_mul, string_matrix, support_subset
from .sequence import (
    GateSequence,
    Local,
    PauliExp,
    evaluate,
    reduce_weight,
    sequence_from_json,
    sequence_to_json,
    stats,
    verify,
)
from .synthesis import (
    MiddleSplit,
    SynthConfig,
    SynthResult,
    compile_unitary,
    isolate_local,
    lift_axis,
    middle_extract,
    pivot,
    synthesize,
)

__version__ = "0.1.0"

__all__ = [
    "CosetFactors",
    "SubgroupSplit",
    "coset_generator",
    "coset_left",
    "coset_right",
    "subgroup_split",
    "ConvergenceError",
    "CosetSynthError",
    "DimensionError",
    "FormatError",
    "SingularBlockError",
    "SingularityError",
    "SynthesisError",
    "UnitarityError",
    "VerificationError",
    "GateSpec",
    "make_gate",
    "qft",
    "random_unitary",
    "PauliCoeffs",
    "PauliString",
    "expand_generator",
    "pauli_mul",
    "string_matrix",
    "support_subset",
    "GateSequence",
    "Local",
    "PauliExp",
    "evaluate",
    "reduce_weight",
    "sequence_from_json",
    "sequence_to_json",
    "stats",
    "verify",
    "MiddleSplit",
    "SynthConfig",
    "SynthResult",
    "compile_unitary",
    "isolate_local",
    "lift_axis",
    "middle_extract",
    "pivot",
    "synthesize",
]
