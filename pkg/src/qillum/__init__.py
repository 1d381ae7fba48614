"""Helstrom bounds, optimal measurements and Holevo information for quantum
illumination with multi-qudit probes under white noise."""
from .analytic import AnalyticResult, NoiseSpectrum, analytic_bound, hb_two_qudit_ci, hb_two_qudit_qi
from .helstrom import HelstromOutcome, NotIlluminableError, decision_operator, helstrom_bound, omega_operator
from .infotheory import HolevoResult, holevo, linear_entropy
from .metrics import (
    MeanMetrics,
    QuadratureError,
    StateEntry,
    Table,
    integrate_square,
    low_eta_sweep,
    mean_over_square,
    ranking_check,
    table_mean_hb,
    table_mean_holevo,
)
from .scenario import HypothesisPair, LossExpansion, Scenario, build_hypotheses, white_noise
from .states import PureState, ProbeSpec, build_cyclic, build_probe, build_w, parse_label

__version__ = "0.1.0"
