"""Run ledger: every command invocation is recorded with its manifest"""
import logging
import os
from datetime import datetime
from typing import Any, Dict, Optional

from sqlalchemy import JSON, Column, DateTime, Integer, String, create_engine
from sqlalchemy.orm import declarative_base, sessionmaker
from sqlalchemy.pool import StaticPool

from .config import DATABASE_URL
from .models import RunManifest

logger = logging.getLogger(__name__)

# Create base class for models
Base = declarative_base()

_sessions: Dict[str, sessionmaker] = {}


class RunRecord(Base):
    """One command invocation"""
    __tablename__ = "runs"

    id = Column(Integer, primary_key=True, index=True)
    recorded_at = Column(DateTime, default=datetime.utcnow, index=True)

    command = Column(String(50), index=True)
    seed = Column(Integer, nullable=True)
    code_version = Column(String(20))
    timestamp = Column(String(50))
    status = Column(String(20))

    parameters_json = Column(JSON)
    outputs_json = Column(JSON)

    def to_dict(self):
        """Convert record to dictionary"""
        return {
            "id": self.id,
            "recorded_at": self.recorded_at.isoformat() if self.recorded_at else None,
            "command": self.command,
            "seed": self.seed,
            "code_version": self.code_version,
            "timestamp": self.timestamp,
            "status": self.status,
            "parameters": self.parameters_json,
            "outputs": self.outputs_json,
        }


def resolve_url(output_dir: str) -> str:
    """DATABASE_URL from the environment, otherwise a SQLite file in the output directory"""
    if DATABASE_URL:
        return DATABASE_URL
    os.makedirs(output_dir, exist_ok=True)
    return f"sqlite:///{os.path.abspath(os.path.join(output_dir, 'runs.db'))}"


def get_session_factory(url: str) -> sessionmaker:
    """Engine and session factory per URL; tables are created on first use"""
    if url not in _sessions:
        if url.startswith("sqlite"):
            # SQLite-specific configuration
            engine = create_engine(url, connect_args={"check_same_thread": False}, poolclass=StaticPool)
        else:
            engine = create_engine(url)
        Base.metadata.create_all(bind=engine)
        _sessions[url] = sessionmaker(autocommit=False, autoflush=False, bind=engine)
    return _sessions[url]


def save_run_manifest(manifest: RunManifest, url: str) -> Dict[str, Any]:
    """
    Save a manifest to the ledger

    Returns:
        dict of the stored record
    """
    db = get_session_factory(url)()
    try:
        record = RunRecord(
            command=manifest.command,
            seed=manifest.seed,
            code_version=manifest.code_version,
            timestamp=manifest.timestamp,
            status=manifest.status,
            parameters_json=manifest.model_dump(mode="json")["parameters"],
            outputs_json=list(manifest.outputs),
        )
        db.add(record)
        db.commit()
        db.refresh(record)
        logger.info(f"Recorded run #{record.id} ({manifest.command}) in ledger")
        return record.to_dict()
    finally:
        db.close()


def get_run_records(url: str, page: int = 1, per_page: int = 20, command: Optional[str] = None):
    """
    Get paginated run records, newest first

    Args:
        page: Page number (1-indexed)
        per_page: Records per page, 1..100
        command: Optional filter by command name

    Returns:
        dict with records, pagination info
    """
    if page < 1:
        raise ValueError(f"page must be >= 1, got {page}")
    if not 1 <= per_page <= 100:
        raise ValueError(f"per_page must lie in [1, 100], got {per_page}")

    db = get_session_factory(url)()
    try:
        query = db.query(RunRecord)
        if command:
            query = query.filter(RunRecord.command == command)
        total = query.count()
        records = query.order_by(RunRecord.id.desc()).offset((page - 1) * per_page).limit(per_page).all()
        total_pages = (total + per_page - 1) // per_page

        return {
            "records": [record.to_dict() for record in records],
            "pagination": {
                "page": page,
                "per_page": per_page,
                "total_records": total,
                "total_pages": total_pages,
                "has_next": page < total_pages,
                "has_prev": page > 1,
            },
        }
    finally:
        db.close()
