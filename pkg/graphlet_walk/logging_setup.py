"""日志初始化，只由 CLI 调用一次；库代码只使用 logging.getLogger(__name__)。"""
from __future__ import annotations

import logging
import sys

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str = "INFO") -> None:
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


__all__ = ["LOG_FORMAT", "configure_logging"]
