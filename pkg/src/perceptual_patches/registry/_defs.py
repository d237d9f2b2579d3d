import sqlalchemy as _sqlalchemy
import sqlalchemy.orm as _orm

from arrow import Arrow as _Arrow
from sqlalchemy import Engine as _Engine
from sqlalchemy.orm import DeclarativeBase as _DeclarativeBase, \
    Mapped as _Mapped
from sqlalchemy_utils import ArrowType as _ArrowType
from typing import Dict as _Dict, List as _List, Optional as _Optional


def create_tables(engine: _Engine) -> None:
    """Create the registry tables if they do not exist.

    Raises:
        DatabaseError: If the database file is corrupted.

    Args:
        engine (Engine): The engine to create the tables with.
    """
    _Base.metadata.create_all(engine)


class _Base(_DeclarativeBase):
    """The ORM root of the registry tables."""
    pass


class Run(_Base):
    """One invocation of a command."""

    __tablename__ = "run"

    id: _Mapped[int] = _orm.mapped_column(primary_key=True)
    """The id."""

    command: _Mapped[str] = _orm.mapped_column(index=True)
    """The sub-command name, e.g. "gen-patch"."""

    config_hash: _Mapped[str] = _orm.mapped_column(index=True)
    """The SHA-256 of the resolved configuration."""

    version: _Mapped[str] = _orm.mapped_column()
    """The package version that produced the run."""

    started: _Mapped[_Arrow] = _orm.mapped_column(type_=_ArrowType)

    finished: _Mapped[_Optional[_Arrow]] = _orm.mapped_column(
        type_=_ArrowType, nullable=True
    )
    """None while the run is in progress or if it failed."""

    exit_code: _Mapped[_Optional[int]] = _orm.mapped_column(nullable=True)

    artifacts: _Mapped[_List["Artifact"]] = _orm.relationship(
        back_populates="run", cascade="all, delete-orphan"
    )

    def checksums(self) -> _Dict[str, str]:
        """Map artifact paths to their checksums."""
        return {a.path: a.sha256 for a in self.artifacts}


class Artifact(_Base):
    """A file written by a run."""

    __tablename__ = "artifact"

    __table_args__ = (
        _sqlalchemy.UniqueConstraint("run_id", "path"),
    )

    id: _Mapped[int] = _orm.mapped_column(primary_key=True)

    run_id: _Mapped[int] = _orm.mapped_column(
        _sqlalchemy.ForeignKey("run.id")
    )

    run: _Mapped[Run] = _orm.relationship(back_populates="artifacts")

    path: _Mapped[str] = _orm.mapped_column()
    """The path relative to the run's output directory."""

    sha256: _Mapped[str] = _orm.mapped_column()
