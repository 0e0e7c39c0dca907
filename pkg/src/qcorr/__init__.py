"""Entropic quantum correlations for finite-dimensional states.

Mutual information, classical correlation, quantum discord and entanglement
of formation, plus checks of the discord/classical-correlation monogamy
relations and of the states that saturate ``D(A|B) <= S(B)``.
"""

__version__ = "0.1.0"

from .entanglement import concurrence, eof_two_qubit, eof_via_koashi_winter
from .entropy import araki_lieb_gap, entropy_report, mutual_information, von_neumann_entropy
from .measurement import (
    OptimizerConfig,
    Povm,
    apply_povm,
    classical_correlation,
    grid_oracle_qubit,
    holevo_objective,
    quantum_discord,
)
from .monogamy import (
    classify_saturation,
    equality_chain_check,
    residual_capacity,
    structure_extract,
    tradeoff_pure,
    tripartite_inequality,
    two_qubit_strictness_scan,
)
from .states import (
    DensityMatrix,
    Partition,
    PureState,
    paper_example_state,
    purify,
    random_density,
    random_pure,
    validate,
)
