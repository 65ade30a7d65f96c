"""Rate prediction, consistency residuals, manufactured solutions and EOC studies."""

from .consistency import ConsistencyReport, consistency_report, density_residual, momentum_residual
from .eoc import EocTable, boundedness, eoc_study, least_squares_order, relative_energy_history
from .manufactured import ManufacturedSolution, default_solution, fd_source_check
from .rates import RatePrediction, optimal_epsilon, predict_rate, rate_table

__all__ = [
    "ConsistencyReport", "consistency_report", "density_residual", "momentum_residual",
    "EocTable", "boundedness", "eoc_study", "least_squares_order", "relative_energy_history",
    "ManufacturedSolution", "default_solution", "fd_source_check",
    "RatePrediction", "optimal_epsilon", "predict_rate", "rate_table",
]
