"""Exact Pauli-diagonal noise on graph states via Z-product noise maps."""

from __future__ import annotations

from .engine import (
    FullMerge,
    LocalComplement,
    MeasureX,
    MeasureY,
    MeasureZ,
    Merge,
    SimulationState,
    apply_operation,
    generator_update,
    parse_script,
    restrict_maps,
    run_script,
    update_zproduct,
)
from .errors import (
    ChannelSpecError,
    GraphFormatError,
    InvalidOperationError,
    NonDiagonalChannelError,
    NoisyStabError,
    ScriptError,
    UnknownVertexError,
    WidthError,
)
from .fidelity import DiagonalEnsemble, combine_maps, fidelity
from .graph import (
    Graph,
    full_merge_graph,
    local_complement,
    measure_x_graph,
    measure_y_graph,
    measure_z_graph,
    merge_graph,
)
from .noise import (
    ChiChannel,
    Correlated,
    Depolarizing,
    MultiDiagonal,
    NoiseMap,
    Pauli1,
    PauliLabel,
    compile_channel,
    depolarizing_all,
)
from .strategies import (
    StrategyId,
    WeightVector,
    closed_fidelity,
    general_fidelity,
    relative_change,
    run_strategy,
    script_for_strategy,
    weight_vector,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
