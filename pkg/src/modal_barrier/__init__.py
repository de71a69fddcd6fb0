"""Spectral edge resistances, barrier weights and transmission simulators."""

__version__ = "0.1.0"

from .errors import ModalBarrierError, NumericalError, ValidationError
from .graph import (
    EdgeVector,
    Graph,
    Partition,
    connected_components,
    incidence,
    laplacian,
    load_edge_list,
    partitioned_graph,
    read_edge_list,
)
from .spectral import Spectrum, detect_q, eigendecompose, spectrum_of
from .metrics import (
    BoundReport,
    alpha_star,
    avg_relative_outgoing_weight,
    check_prop1,
    check_prop2,
    check_prop3,
    check_prop4,
    modal_distance,
    relative_outgoing_weight,
)
from .resistance import (
    ApproxConfig,
    aggregated_resistance_approx1,
    aggregated_resistance_approx2,
    aggregated_resistance_exact,
    barrier_weights,
    compute_resistance,
    epsilon_for,
    mode_gradient,
    shuffle_weights,
    spectral_radius_bound,
)
from .distributed import NodeState, SimStats, run_distributed
from .dynamics import DiffusionRun, crossing_time, simulate_diffusion, threshold_crossing_time
from .epidemic import EpidemicParams, monte_carlo_epidemic, peak, simulate_epidemic
from .generators import barbell, five_cluster, planted_partition
