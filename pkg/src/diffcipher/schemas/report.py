from __future__ import annotations

from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class GuessTally(BaseModel):
    """Per-status guess counts of a campaign."""

    solved: int = Field(default=0, ge=0)
    inconsistent: int = Field(default=0, ge=0)
    indeterminate: int = Field(default=0, ge=0)
    timeout: int = Field(default=0, ge=0)

    @property
    def total(self) -> int:
        return self.solved + self.inconsistent + self.indeterminate + self.timeout

    def add(self, status: str) -> None:
        setattr(self, status, getattr(self, status) + 1)


class SolverStatsModel(BaseModel):
    """Groebner counters summed over every solve of a campaign."""

    pairs_created: int = 0
    pairs_reduced: int = 0
    zero_reductions: int = 0
    product_criterion: int = 0
    chain_criterion: int = 0
    field_pairs: int = 0
    reduction_steps: int = 0
    max_basis: int = 0
    degree_skips: int = 0

    def merge(self, stats: Dict[str, object]) -> None:
        for name in type(self).model_fields:
            value = stats.get(name)
            if not isinstance(value, int):
                continue
            if name == "max_basis":
                self.max_basis = max(self.max_basis, value)
            else:
                setattr(self, name, getattr(self, name) + value)


class CostEstimate(BaseModel):
    """Measured per-guess time extrapolated to the whole guess space."""

    mean_guess_ms: float = Field(ge=0, description="Measured mean solve time a.")
    guess_space: int = Field(ge=1, description="q^s, the number of guesses.")
    expected_campaign_ms: float = Field(ge=0, description="a * q^s / 2.")
    worst_case_ms: float = Field(ge=0, description="a * q^s.")
    fixed_point_probability: Optional[float] = Field(
        default=None,
        ge=0,
        le=1,
        description="Chance that a random permutation has a fixed point, 1 - 1/e.",
    )
    plaintext_fraction: Optional[float] = Field(
        default=None,
        gt=0,
        le=1,
        description="Share c of the block space holding the fixed points used.",
    )
    decomposition_ms: Optional[Dict[str, float]] = Field(
        default=None, description="Terms a, b, b*c*2^32 and d of the fixed-point attack."
    )


class AttackReport(BaseModel):
    """Outcome of a guess campaign or a block attack."""

    attack: str
    cipher: str
    fingerprint: str = Field(min_length=2, description="blake3 fingerprint of the system.")
    outcome: str = Field(pattern="^(recovered|exhausted|aborted)$")
    state_hex: Optional[str] = Field(default=None, description="Recovered target state.")
    initial_state_hex: Optional[str] = None
    key_hex: Optional[str] = None
    guess_vars: List[str] = Field(default_factory=list)
    guess_values_hex: Optional[str] = None
    shard: str = Field(default="0/1", pattern=r"^\d+/\d+$")
    next_index: int = Field(default=0, ge=0, description="Resume position within the shard.")
    tallies: GuessTally = Field(default_factory=GuessTally)
    elapsed_ms: float = Field(default=0.0, ge=0)
    solver: SolverStatsModel = Field(default_factory=SolverStatsModel)
    cost: Optional[CostEstimate] = None
    notes: List[str] = Field(default_factory=list)

    @property
    def recovered(self) -> bool:
        return self.outcome == "recovered"

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)
