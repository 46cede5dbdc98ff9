from sqlalchemy.orm import DeclarativeBase


class Base(DeclarativeBase):
    """Shared metadata of the run registry tables."""
