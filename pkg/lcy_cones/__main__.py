from __future__ import annotations

import sys

from lcy_cones.cli import main

if __name__ == "__main__":
    sys.exit(main())
