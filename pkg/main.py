"""
Definability workbench for gain-graphic matroids
Entry point for the command line
"""

import logging
import sys

from src.backend.config_loader import CONFIG


if __name__ == "__main__":
    # stdout carries the report; logs go to stderr
    logging.basicConfig(
        level=getattr(logging, str(CONFIG["log_level"]).upper(), logging.INFO),
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        handlers=[
            logging.StreamHandler(sys.stderr)
        ]
    )

    from src.backend.cli import run

    sys.exit(run())
