"""
Ledger manager: session handling and the few queries the workbench needs.
"""

import logging
import os
from contextlib import contextmanager
from typing import Dict, List, Optional

from sqlalchemy import create_engine, desc
from sqlalchemy.orm import sessionmaker

from src.backend.config_loader import CONFIG
from src.database.models import CheckRun, PropertySweep, create_tables

logger = logging.getLogger(__name__)


class LedgerManager:
    """
    Records check runs and property sweeps.

    Args:
        db_url: SQLAlchemy database URL. Defaults to CONFIG ledger_url
    """

    def __init__(self, db_url: Optional[str] = None):
        if db_url is None:
            db_url = CONFIG["ledger_url"]
        if db_url.startswith("sqlite:///") and db_url != "sqlite:///:memory:":
            directory = os.path.dirname(db_url[len("sqlite:///"):])
            if directory:
                os.makedirs(directory, exist_ok=True)

        self.engine = create_engine(db_url, echo=False, pool_pre_ping=True)
        self.SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=self.engine)
        create_tables(self.engine)
        logger.info(f"ledger initialised: {db_url}")

    @contextmanager
    def session_scope(self):
        """
        Provide a transactional scope around a series of operations.

        Usage:
            with ledger.session_scope() as session:
                session.add(run)
        """
        session = self.SessionLocal()
        try:
            yield session
            session.commit()
        except Exception as e:
            session.rollback()
            logger.error(f"ledger session error: {e}")
            raise
        finally:
            session.close()

    # ==================== CHECK RUNS ====================

    def record_run(self, verb: str, input_digest: str, verdict: str, exit_code: int, summary: str, elapsed: float) -> int:
        with self.session_scope() as session:
            run = CheckRun(
                verb=verb,
                input_digest=input_digest,
                verdict=verdict,
                exit_code=exit_code,
                summary=summary,
                elapsed_seconds=elapsed,
            )
            session.add(run)
            session.flush()
            logger.debug(f"recorded check run {run.id} ({verb} -> {verdict})")
            return run.id

    def recent_runs(self, limit: int = 20, verb: Optional[str] = None) -> List[Dict]:
        with self.session_scope() as session:
            query = session.query(CheckRun)
            if verb:
                query = query.filter(CheckRun.verb == verb)
            rows = query.order_by(desc(CheckRun.id)).limit(limit).all()
            return [
                {
                    "id": r.id,
                    "verb": r.verb,
                    "verdict": r.verdict,
                    "exit_code": r.exit_code,
                    "summary": r.summary,
                    "elapsed_seconds": r.elapsed_seconds,
                }
                for r in rows
            ]

    # ==================== PROPERTY SWEEPS ====================

    def record_sweep(
        self,
        property_name: str,
        instances: int,
        counterexamples: int,
        seed: Optional[int],
        elapsed: float,
        first_counterexample: Optional[str] = None,
    ) -> int:
        with self.session_scope() as session:
            sweep = PropertySweep(
                property_name=property_name,
                instances=instances,
                counterexamples=counterexamples,
                seed=seed,
                elapsed_seconds=elapsed,
                first_counterexample=first_counterexample,
            )
            session.add(sweep)
            session.flush()
            logger.info(f"sweep {property_name}: {instances} instances, {counterexamples} counterexamples")
            return sweep.id

    def sweep_stats(self) -> Dict[str, int]:
        with self.session_scope() as session:
            return {
                "check_runs": session.query(CheckRun).count(),
                "property_sweeps": session.query(PropertySweep).count(),
                "failing_sweeps": session.query(PropertySweep).filter(PropertySweep.counterexamples > 0).count(),
            }


# Process-wide ledger (singleton pattern)
_ledger_manager: Optional[LedgerManager] = None


def get_ledger_manager(db_url: Optional[str] = None) -> LedgerManager:
    """
    Get or create the process-wide ledger manager.

    Args:
        db_url: SQLAlchemy database URL (optional)
    """
    global _ledger_manager

    if _ledger_manager is None:
        _ledger_manager = LedgerManager(db_url=db_url)

    return _ledger_manager
