"""Runtime configuration: flags > environment > config file > defaults.

Environment variables are prefixed ``TAPECAT_`` (``TAPECAT_STORE``,
``TAPECAT_BASE``, ``TAPECAT_PROFILE``, ``TAPECAT_LISTEN``,
``TAPECAT_OPERATOR``, ``TAPECAT_ID_SOURCE``, ``TAPECAT_CONFIG``). The
config file is plain ``key = value`` lines with ``#`` comments, keys
matching the field names below.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from datetime import datetime, timezone

from . import load_registry
from .errors import ConfigError, LogReplayError
from .eventlog import FileSink, open_log_store, read_log_lines
from .ids import make_id_source
from .store import DEFAULT_IRI_BASE, Graph

ENV_PREFIX = "TAPECAT_"


def now_timespan() -> str:
    """Point interval at the current UTC minute, the operator convenience
    for commands that do not back-date their work."""
    stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M")
    return f"{stamp}/{stamp}"

_FIELD_TO_ENV = {
    "store_path": "STORE",
    "iri_base": "BASE",
    "profile": "PROFILE",
    "listen": "LISTEN",
    "operator": "OPERATOR",
    "id_source": "ID_SOURCE",
}


@dataclass(frozen=True, slots=True)
class Config:
    store_path: str = "catalog.tlog"
    iri_base: str = DEFAULT_IRI_BASE
    profile: str = "paper"
    listen: str = "127.0.0.1:8023"
    operator: str = ""            # default operator IRI for mutating commands
    id_source: str = "ulid"       # ulid | seq (seq is for reproducible runs)

    def validated(self) -> "Config":
        if self.profile not in ("paper", "strict"):
            raise ConfigError(f"profile must be paper or strict, got "
                              f"{self.profile!r}", field="profile")
        if self.id_source not in ("ulid", "seq"):
            raise ConfigError(f"id_source must be ulid or seq, got "
                              f"{self.id_source!r}", field="id_source")
        if ":" not in self.listen:
            raise ConfigError(f"listen must be host:port, got {self.listen!r}",
                              field="listen")
        return self


def parse_config_file(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def resolve_config(flag_values: dict[str, str | None],
                   config_path: str | None = None,
                   environ: dict[str, str] | None = None) -> Config:
    environ = environ if environ is not None else dict(os.environ)
    config = Config()

    path = config_path or environ.get(ENV_PREFIX + "CONFIG")
    if path:
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}")
        with open(path, encoding="utf-8") as fh:
            file_values = parse_config_file(fh.read())
        unknown = set(file_values) - set(_FIELD_TO_ENV)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        config = replace(config, **file_values)

    env_values = {}
    for field_name, env_name in _FIELD_TO_ENV.items():
        value = environ.get(ENV_PREFIX + env_name)
        if value is not None:
            env_values[field_name] = value
    if env_values:
        config = replace(config, **env_values)

    flag_set = {k: v for k, v in flag_values.items() if v is not None}
    if flag_set:
        config = replace(config, **flag_set)
    return config.validated()


def open_store(config: Config) -> Graph:
    """Open (or create) the store behind the configured event log.

    A missing or empty log file gets a freshly bootstrapped store. A log
    whose tail was cut off mid-activity is truncated back to the committed
    prefix, which is exactly what replay yields.
    """
    path = config.store_path
    id_source = make_id_source(config.id_source)
    options = {"iri_base": config.iri_base, "profile": config.profile,
               "id_source": id_source}
    if not os.path.exists(path) or not read_log_lines(path):
        graph = load_registry(None, sink=FileSink(path), **options)
        return graph
    try:
        return open_log_store(path, **options)
    except LogReplayError as error:
        if error.store is None or not _is_crash_tail(path, error.store.watermark):
            raise
        # The damage starts after the last committed activity and no later
        # commit exists, so this is an interrupted write: keep the prefix.
        graph = error.store
        lines = read_log_lines(path)[: graph.watermark]
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("".join(line + "\n" for line in lines))
        graph.ids.sync(graph.numeric_suffixes())
        graph.sink = FileSink(path)
        return graph


def _is_crash_tail(path: str, watermark: int) -> bool:
    """True when nothing after the replayable prefix is a commit record;
    truncating then cannot lose committed data."""
    for line in read_log_lines(path)[watermark:]:
        try:
            record = json.loads(line)
        except json.JSONDecodeError:
            continue
        if isinstance(record, dict) and record.get("op") == "activity-committed":
            return False
    return True
