"""Configure stdlib logging from the YAML dictConfig in settings."""

from __future__ import annotations

import logging
import logging.config
import sys
from pathlib import Path

import yaml

from app.core.config import get_settings


def configure_logging() -> None:
    """Load ``logging.yaml`` if present, else log to stderr at the configured level."""

    settings = get_settings()
    path = Path(settings.log_config_path)
    level = settings.log_level.upper()
    if path.is_file():
        with path.open(encoding="utf-8") as handle:
            config = yaml.safe_load(handle)
        config.setdefault("root", {})["level"] = level
        logging.config.dictConfig(config)
        return
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s [%(levelname)s] %(name)s - %(message)s",
    )
