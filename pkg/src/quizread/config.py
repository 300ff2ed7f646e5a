"""Runtime configuration: key=value file, QUIZREAD_* env vars, CLI flags.

Precedence (low to high): built-in defaults, config file, environment,
explicit flag overrides.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .dedup import DedupConfig
from .prompting import ProviderConfig

ENV_PREFIX = "QUIZREAD_"

# config-file/flag key -> (field, parser)
_KEYS = {
    "addr": ("addr", str),
    "storage_dir": ("storage_dir", str),
    "provider_url": ("provider_url", str),
    "model": ("model", str),
    "api_key_var": ("api_key_var", str),
    "timeout": ("timeout", float),
    "max_retries": ("max_retries", int),
    "max_parallel_calls": ("max_parallel_calls", int),
    "temperature": ("temperature", float),
    "backoff_base": ("backoff_base", float),
    "dedup_threshold": ("dedup_threshold", float),
    "dedup_enabled": ("dedup_enabled", lambda v: str(v).lower() not in ("0", "false", "no", "off")),
    "max_upload_mb": ("max_upload_mb", int),
    "page_char_budget": ("page_char_budget", int),
    "strict_parse": ("strict_parse", lambda v: str(v).lower() in ("1", "true", "yes", "on")),
}


@dataclass(frozen=True)
class AppConfig:
    addr: str = "127.0.0.1:8077"
    storage_dir: str = "quizread-data"
    provider_url: str = "mock:"
    model: str = "gpt-3.5-turbo"
    api_key_var: str = "OPENAI_API_KEY"
    timeout: float = 60.0
    max_retries: int = 3
    max_parallel_calls: int = 2
    temperature: float = 0.7
    backoff_base: float = 1.0
    dedup_threshold: float = 0.6
    dedup_enabled: bool = True
    max_upload_mb: int = 50
    page_char_budget: int = 12_000
    strict_parse: bool = False

    def provider_config(self) -> ProviderConfig:
        return ProviderConfig(
            endpoint_url=self.provider_url,
            model_id=self.model,
            credential_ref=self.api_key_var,
            timeout=self.timeout,
            max_retries=self.max_retries,
            max_parallel_calls=self.max_parallel_calls,
            temperature=self.temperature,
            backoff_base=self.backoff_base,
        )

    def dedup_config(self) -> DedupConfig:
        return DedupConfig(threshold=self.dedup_threshold, enabled=self.dedup_enabled)

    @property
    def max_upload_bytes(self) -> int:
        return self.max_upload_mb * 1024 * 1024

    def listen_address(self) -> tuple[str, int]:
        host, _, port = self.addr.rpartition(":")
        return host or "127.0.0.1", int(port)


def parse_config_file(path: str | Path) -> dict:
    """Read ``key = value`` lines; '#' starts a comment; unknown keys error."""
    values: dict = {}
    text = Path(path).read_text("utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, _, value = stripped.partition("=")
        key = key.strip().lower()
        if key not in _KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        field_name, parser = _KEYS[key]
        values[field_name] = parser(value.strip())
    return values


def env_overrides(environ=None) -> dict:
    environ = os.environ if environ is None else environ
    values: dict = {}
    for key, (field_name, parser) in _KEYS.items():
        raw = environ.get(ENV_PREFIX + key.upper())
        if raw is not None and raw != "":
            values[field_name] = parser(raw)
    return values


def load_config(
    path: str | Path | None = None,
    overrides: dict | None = None,
    environ=None,
) -> AppConfig:
    """Assemble the effective config; flags beat env, env beats file."""
    config = AppConfig()
    if path is not None:
        config = replace(config, **parse_config_file(path))
    config = replace(config, **env_overrides(environ))
    if overrides:
        known = {f.name for f in fields(AppConfig)}
        config = replace(
            config, **{k: v for k, v in overrides.items() if k in known and v is not None}
        )
    return config
