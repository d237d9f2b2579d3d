import sys as _sys

from .cli import main as _main


if __name__ == "__main__":  # pragma: no cover
    _sys.exit(_main())
