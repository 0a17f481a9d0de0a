"""Logging setup driven by the CHOIS_LOG environment variable."""

import logging
import os

_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
_configured = False


def get_logger(name="chois"):
    global _configured
    if not _configured:
        level = _LEVELS.get(os.environ.get("CHOIS_LOG", "info").lower(), logging.INFO)
        logging.basicConfig(format="%(levelname)s %(name)s: %(message)s", level=level)
        _configured = True
    return logging.getLogger(name)
