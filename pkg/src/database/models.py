"""
SQLAlchemy models for the check ledger.

Every CLI invocation with the ledger enabled leaves one CheckRun row; the
property sweep script leaves one PropertySweep row per property checked.
"""

import logging

from sqlalchemy import Column, DateTime, Float, Index, Integer, String, Text
from sqlalchemy.orm import declarative_base
from sqlalchemy.sql import func

logger = logging.getLogger(__name__)

Base = declarative_base()


class CheckRun(Base):
    """One CLI command and its outcome."""
    __tablename__ = 'check_runs'

    id = Column(Integer, primary_key=True, autoincrement=True)

    verb = Column(String(32), nullable=False, index=True)
    input_digest = Column(String(64), nullable=False)  # sha256 over argv and input file bytes

    verdict = Column(String(32), nullable=False)
    exit_code = Column(Integer, nullable=False)
    summary = Column(Text, nullable=False)
    elapsed_seconds = Column(Float, nullable=False, default=0.0)

    created_at = Column(DateTime, default=func.now(), index=True)

    __table_args__ = (
        Index('idx_check_verb_created', 'verb', 'created_at'),
    )

    def __repr__(self):
        return f"<CheckRun(id={self.id}, verb={self.verb}, verdict={self.verdict}, exit_code={self.exit_code})>"


class PropertySweep(Base):
    """Outcome of one randomized or exhaustive property check."""
    __tablename__ = 'property_sweeps'

    id = Column(Integer, primary_key=True, autoincrement=True)

    property_name = Column(String(64), nullable=False, index=True)
    instances = Column(Integer, nullable=False)
    counterexamples = Column(Integer, nullable=False, default=0)
    seed = Column(Integer, nullable=True)
    elapsed_seconds = Column(Float, nullable=False, default=0.0)
    first_counterexample = Column(Text, nullable=True)

    created_at = Column(DateTime, default=func.now(), index=True)

    def __repr__(self):
        return f"<PropertySweep(id={self.id}, property={self.property_name}, counterexamples={self.counterexamples})>"


def create_tables(engine):
    """Create all tables in the database."""
    Base.metadata.create_all(engine)
    logger.debug("ledger tables ready")
