"""Two-level PT-symmetric quantum mechanics: spectra, metrics, passage times and geometry."""
from .brachistochrone import BrachistochroneProblem, aa_certificate, solve_pt
from .config import DEFAULT_TOL, Tolerances
from .errors import PTError
from .evolution import flip_time_scan, flip_times
from .hamiltonian import Phase, PTHamiltonian, build, derived_params, from_params, spectrum
from .metric import MetricPair, metric_for

__all__ = [
    "BrachistochroneProblem",
    "DEFAULT_TOL",
    "MetricPair",
    "PTError",
    "PTHamiltonian",
    "Phase",
    "Tolerances",
    "aa_certificate",
    "build",
    "derived_params",
    "flip_time_scan",
    "flip_times",
    "from_params",
    "metric_for",
    "solve_pt",
    "spectrum",
]
