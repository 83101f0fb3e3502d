from __future__ import annotations

# Read-only HTTP API over the LCY Cones engine
