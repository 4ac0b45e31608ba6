"""运行配置：全部从环境变量（前缀 GRAPHLET_）或 .env 文件读取。"""
from __future__ import annotations

import logging
import os

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


def _default_threads() -> int:
    return max(1, min(os.cpu_count() or 1, 8))


class AppSettings(BaseSettings):
    """CLI、并行链与基准测试共享的配置。"""

    threads: int = Field(
        default_factory=_default_threads,
        ge=1,
        description="并行链与基准测试的线程池上限（GRAPHLET_THREADS）",
    )
    log_level: str = Field(default="INFO", description="日志级别，大小写不敏感")
    access_latency_ms: float = Field(
        default=0.0,
        ge=0.0,
        description="每次邻居查询注入的模拟延迟（毫秒），只影响耗时不影响结果",
    )
    memoize_neighbors: bool = Field(default=False, description="是否缓存已抓取的邻居列表")
    max_relationship_states: int = Field(
        default=200_000,
        ge=1,
        description="显式构造 G^(d) 时允许的最大状态数",
    )
    default_seed: int = Field(default=42, ge=0, description="CLI 未指定 --seed 时使用的种子")
    burn_in: int = Field(default=0, ge=0, description="估计器默认的预烧步数")

    model_config = SettingsConfigDict(env_file=".env", env_prefix="GRAPHLET_", extra="ignore")

    @field_validator("log_level")
    @classmethod
    def normalize_level(cls, value: str) -> str:
        """统一为大写，并拒绝 logging 不认识的级别名。"""

        level = value.strip().upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ValueError(f"未知的日志级别：{value}")
        return level


def get_settings() -> AppSettings:
    """每次调用都重新读取环境变量，测试里可以直接 monkeypatch.setenv。"""

    return AppSettings()


__all__ = ["AppSettings", "get_settings"]
