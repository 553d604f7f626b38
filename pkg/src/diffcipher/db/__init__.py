from .base import Base, DatabaseSessionManager
from .models import CampaignRecord, GuessProgressRecord
from .repository import CampaignHandle, CampaignRepository, LedgerMismatchError

__all__ = [
    "Base",
    "CampaignHandle",
    "CampaignRecord",
    "CampaignRepository",
    "DatabaseSessionManager",
    "GuessProgressRecord",
    "LedgerMismatchError",
]
