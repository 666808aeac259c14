"""Daemon/CLI configuration: config file, environment, and flag overlay.

Precedence, lowest to highest: built-in defaults, config file, environment
(``TIDAL_TOKEN`` for the shared secret, ``STORYTIDE_PSEUDONYM_KEY`` for the
export key), then explicit flags.
"""
from __future__ import annotations

import ipaddress
import json
import os
from dataclasses import dataclass
from pathlib import Path

from .errors import StorytideError

DEFAULT_BIND = "127.0.0.1:8089"
TOKEN_ENV = "TIDAL_TOKEN"
KEY_ENV = "STORYTIDE_PSEUDONYM_KEY"


@dataclass
class ServiceConfig:
    bind_address: str = DEFAULT_BIND
    auth_token: str = ""
    archive_root: str = "archive"
    pattern_table_path: str | None = None
    pseudonym_key: bytes | None = None
    allow_non_loopback: bool = False

    @property
    def host_port(self) -> tuple[str, int]:
        host, _, port = self.bind_address.rpartition(":")
        if not host or not port.isdigit():
            raise StorytideError(f"bind address must be host:port, got {self.bind_address!r}")
        return host, int(port)


def _is_loopback(host: str) -> bool:
    if host == "localhost":
        return True
    try:
        return ipaddress.ip_address(host).is_loopback
    except ValueError:
        return False


def validate_bind(config: ServiceConfig) -> None:
    """Refuse non-loopback binds unless explicitly overridden."""
    host, _ = config.host_port
    if not config.allow_non_loopback and not _is_loopback(host):
        raise StorytideError(
            f"refusing non-loopback bind {host!r}; pass --allow-non-loopback to override"
        )


def load_config(
    path=None,
    env: dict | None = None,
    **overrides,
) -> ServiceConfig:
    env = os.environ if env is None else env
    values: dict = {}
    if path is not None:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        for key in (
            "bind_address",
            "auth_token",
            "archive_root",
            "pattern_table_path",
            "allow_non_loopback",
        ):
            if key in doc:
                values[key] = doc[key]
        if doc.get("pseudonym_key"):
            values["pseudonym_key"] = str(doc["pseudonym_key"]).encode("utf-8")
    if env.get(TOKEN_ENV):
        values["auth_token"] = env[TOKEN_ENV]
    if env.get(KEY_ENV):
        values["pseudonym_key"] = env[KEY_ENV].encode("utf-8")
    for key, value in overrides.items():
        if value is not None:
            values[key] = value
    return ServiceConfig(**values)
