from __future__ import annotations

from contextlib import contextmanager
from typing import Iterator

from sqlalchemy import create_engine
from sqlalchemy.orm import Session, declarative_base, sessionmaker

Base = declarative_base()


class DatabaseSessionManager:
    """Owns the engine of the campaign ledger and hands out sessions."""

    def __init__(self, database_url: str) -> None:
        """Initializes the manager.

        Args:
            database_url: SQLAlchemy URL, e.g. ``sqlite:///campaign.db``.
        """
        self._engine = create_engine(database_url)
        self._session_factory = sessionmaker(autocommit=False, autoflush=False, bind=self._engine)

    def create_all(self) -> None:
        Base.metadata.create_all(self._engine, checkfirst=True)

    def dispose(self) -> None:
        self._engine.dispose()

    @contextmanager
    def session(self) -> Iterator[Session]:
        """Transactional session: committed on exit, rolled back on error."""
        session = self._session_factory()
        try:
            yield session
            session.commit()
        except Exception:
            session.rollback()
            raise
        finally:
            session.close()
