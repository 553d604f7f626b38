from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Optional, Sequence

from sqlalchemy import select

from diffcipher.schemas import GuessTally

from .base import DatabaseSessionManager
from .models import CampaignRecord, GuessProgressRecord

logger = logging.getLogger(__name__)


class LedgerMismatchError(ValueError):
    """Raised when a resumed campaign belongs to a different system."""


@dataclass(frozen=True)
class CampaignHandle:
    campaign_id: int
    next_index: int
    tallies: GuessTally
    outcome: Optional[str] = None


class CampaignRepository:
    """Persistence of guess campaigns so an interrupted shard can resume."""

    def __init__(self, db: DatabaseSessionManager) -> None:
        self._db = db

    # Campaigns -------------------------------------------------------------

    def open_or_resume(
        self,
        fingerprint: str,
        guess_vars: Sequence[str],
        shard: tuple[int, int] = (0, 1),
    ) -> CampaignHandle:
        """Returns the open campaign for this system, guess set and shard, or starts one.

        Raises:
            LedgerMismatchError: When the guess set matches but the
                fingerprint of the recorded system does not.
        """
        guess_text = ",".join(guess_vars)
        now = int(time.time())
        with self._db.session() as session:
            query = (
                select(CampaignRecord)
                .where(CampaignRecord.guess_vars == guess_text)
                .where(CampaignRecord.shard_index == shard[0])
                .where(CampaignRecord.shard_total == shard[1])
                .where(CampaignRecord.outcome.is_(None))
                .order_by(CampaignRecord.id.desc())
            )
            record = session.execute(query).scalars().first()
            if record is not None and record.fingerprint != fingerprint:
                raise LedgerMismatchError(
                    f"campaign {record.id} was recorded for system {record.fingerprint[:16]}"
                )
            if record is None:
                record = CampaignRecord(
                    fingerprint=fingerprint,
                    guess_vars=guess_text,
                    shard_index=shard[0],
                    shard_total=shard[1],
                    started_at=now,
                )
                session.add(record)
                session.flush()
                session.add(GuessProgressRecord(campaign_id=record.id, next_index=0, updated_at=now))
                logger.info("Started campaign %s for shard %s/%s", record.id, shard[0], shard[1])
                return CampaignHandle(record.id, 0, GuessTally())
            progress = session.get(GuessProgressRecord, record.id)
            logger.info("Resuming campaign %s at index %s", record.id, progress.next_index if progress else 0)
            if progress is None:
                return CampaignHandle(record.id, 0, GuessTally())
            return CampaignHandle(record.id, int(progress.next_index), _tally_of(progress))

    # Progress --------------------------------------------------------------

    def record_progress(self, campaign_id: int, next_index: int, tallies: GuessTally) -> None:
        now = int(time.time())
        with self._db.session() as session:
            progress = session.get(GuessProgressRecord, campaign_id)
            if progress is None:
                progress = GuessProgressRecord(campaign_id=campaign_id, updated_at=now)
                session.add(progress)
            progress.next_index = next_index
            progress.solved = tallies.solved
            progress.inconsistent = tallies.inconsistent
            progress.indeterminate = tallies.indeterminate
            progress.timeout = tallies.timeout
            progress.updated_at = now

    def record_outcome(self, campaign_id: int, outcome: str, result_hex: Optional[str] = None) -> None:
        with self._db.session() as session:
            record = session.get(CampaignRecord, campaign_id)
            if record is None:
                raise KeyError(f"unknown campaign {campaign_id}")
            record.outcome = outcome
            record.result_hex = result_hex
        logger.info("Campaign %s finished: %s", campaign_id, outcome)

    def get_progress(self, campaign_id: int) -> Optional[CampaignHandle]:
        with self._db.session() as session:
            record = session.get(CampaignRecord, campaign_id)
            progress = session.get(GuessProgressRecord, campaign_id)
            if record is None or progress is None:
                return None
            return CampaignHandle(
                campaign_id, int(progress.next_index), _tally_of(progress), record.outcome
            )


def _tally_of(progress: GuessProgressRecord) -> GuessTally:
    return GuessTally(
        solved=progress.solved,
        inconsistent=progress.inconsistent,
        indeterminate=progress.indeterminate,
        timeout=progress.timeout,
    )
