from .report import AttackReport, CostEstimate, GuessTally, SolverStatsModel

__all__ = [
    "AttackReport",
    "CostEstimate",
    "GuessTally",
    "SolverStatsModel",
]
