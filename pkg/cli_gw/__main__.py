"""Console entrypoint for the skein-forge command line."""

import sys
from typing import List, Optional

from .app import run


def main(argv: Optional[List[str]] = None) -> int:
    return run(argv)


if __name__ == "__main__":  # pragma: no cover - manual entrypoint
    sys.exit(main())
