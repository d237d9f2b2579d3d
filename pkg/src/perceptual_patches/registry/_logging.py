import logging as _logging


def enable_logging(level=_logging.INFO) -> None:
    """Enable logging of the SQL statements issued by the registry.

    Args:
        level (Level): The log level.
    """
    _logging.getLogger("sqlalchemy.engine").setLevel(level)
    _logging.getLogger("sqlalchemy.orm").setLevel(level)
