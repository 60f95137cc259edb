import logging
import sys

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(name)s - %(message)s"
_ROOT = "filter_verifier"


def setup_logging(verbosity: int = 0) -> logging.Logger:
    """
    0 -> WARNING, 1 -> INFO, 2+ -> DEBUG; records go to stderr.
    """
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logger = logging.getLogger(_ROOT)
    logger.setLevel(level)
    if not any(getattr(h, "_filter_verifier", False) for h in logger.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._filter_verifier = True
        logger.addHandler(handler)
    return logger
