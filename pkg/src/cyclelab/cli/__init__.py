from cyclelab.cli.main import main

__all__ = ["main"]
