__all__ = [
    "cli",
]
