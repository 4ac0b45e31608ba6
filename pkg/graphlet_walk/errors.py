"""图元采样工具的异常层次，CLI 依据类型决定退出码。"""
from __future__ import annotations


class GraphletError(Exception):
    """本包所有业务异常的基类。"""


class EdgeListParseError(GraphletError, ValueError):
    """边表文本格式错误，携带出错的行号与原文。"""

    def __init__(self, line_number: int, line: str, reason: str) -> None:
        self.line_number = line_number
        self.line = line
        self.reason = reason
        super().__init__(f"第 {line_number} 行格式错误（{reason}）：{line!r}")


class EmptyGraphError(GraphletError, ValueError):
    """输入中没有任何可用的边。"""


class ConfigError(GraphletError, ValueError):
    """(k, d) 组合不可用、图过小、真值文件不匹配等配置问题。"""


class RelationshipGraphTooLarge(GraphletError, MemoryError):
    """显式构造 G^(d) 时状态数超过配置的上限。"""

    def __init__(self, d: int, limit: int) -> None:
        self.d = d
        self.limit = limit
        super().__init__(f"G^({d}) 的状态数超过上限 {limit}，请换用更小的图或调大 GRAPHLET_MAX_RELATIONSHIP_STATES")


class DegenerateWalkError(GraphletError, RuntimeError):
    """随机游走无法继续：状态在 G^(d) 中没有邻居，或找不到合法起点。"""


__all__ = [
    "ConfigError",
    "DegenerateWalkError",
    "EdgeListParseError",
    "EmptyGraphError",
    "GraphletError",
    "RelationshipGraphTooLarge",
]
