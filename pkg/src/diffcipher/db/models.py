from __future__ import annotations

from sqlalchemy import BigInteger, Column, ForeignKey, Integer, String, Text

from .base import Base


class CampaignRecord(Base):
    """One guess campaign: a system, a guess set and a shard."""

    __tablename__ = "campaigns"

    id = Column(Integer, primary_key=True, autoincrement=True)
    fingerprint = Column(String(128), nullable=False)
    guess_vars = Column(Text, nullable=False)
    shard_index = Column(Integer, nullable=False, default=0)
    shard_total = Column(Integer, nullable=False, default=1)
    started_at = Column(BigInteger, nullable=False)
    outcome = Column(String(32), nullable=True)
    result_hex = Column(Text, nullable=True)


class GuessProgressRecord(Base):
    """Resume position and tallies of a campaign."""

    __tablename__ = "guess_progress"

    campaign_id = Column(Integer, ForeignKey("campaigns.id"), primary_key=True)
    next_index = Column(BigInteger, nullable=False, default=0)
    solved = Column(Integer, nullable=False, default=0)
    inconsistent = Column(Integer, nullable=False, default=0)
    indeterminate = Column(Integer, nullable=False, default=0)
    timeout = Column(Integer, nullable=False, default=0)
    updated_at = Column(BigInteger, nullable=False)
