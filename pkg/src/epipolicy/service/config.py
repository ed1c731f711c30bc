"""Service configuration from environment variables."""
from __future__ import annotations

import os
from dataclasses import dataclass


@dataclass(frozen=True)
class AppConfig:
    port: int = 8080
    host: str = "127.0.0.1"
    data_dir: str | None = None
    search_cap: int = 2_000_000
    default_seed: int = 0
    cors_origins: tuple[str, ...] = ("*",)
    ui_dir: str | None = None

    def __post_init__(self):
        if not 1 <= self.port <= 65535:
            raise ValueError(f"port {self.port} outside [1, 65535]")

    @staticmethod
    def from_env(env=os.environ) -> "AppConfig":
        origins = tuple(
            o.strip() for o in env.get("PPL_CORS_ORIGINS", "*").split(",") if o.strip()
        )
        return AppConfig(
            port=int(env.get("PPL_PORT", "8080")),
            host=env.get("PPL_HOST", "127.0.0.1"),
            data_dir=env.get("PPL_DATA_DIR"),
            search_cap=int(env.get("PPL_SEARCH_CAP", "2000000")),
            default_seed=int(env.get("PPL_SEED", "0")),
            cors_origins=origins or ("*",),
            ui_dir=env.get("PPL_UI_DIR"),
        )
