"""Centralized environment variable loading for the workbench configuration."""

import os
from dotenv import load_dotenv

load_dotenv()


def _get_env(name: str, default: str | None = None, required: bool = False) -> str | None:
    """Fetch an environment variable with optional default and required validation."""
    value = os.getenv(name, default)
    if required and (value is None or value == ""):
        raise RuntimeError(f"Missing required environment variable: {name}")
    return value


def _get_bool(name: str, default: bool = False) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    return _parse_bool(raw)


def _get_int(name: str, default: int | None = None) -> int | None:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise RuntimeError(f"Invalid integer for {name}: {raw}") from exc


def _parse_bool(raw: str) -> bool:
    return raw.strip().lower() in {"1", "true", "yes", "on"}


CONFIG = {
    # Groups
    "group_assoc_check_max": _get_int("WORKBENCH_GROUP_ASSOC_CHECK_MAX", 64),
    "search_cap": _get_int("WORKBENCH_SEARCH_CAP", 10_000_000),

    # Graphs and gainings
    "cycle_cap": _get_int("WORKBENCH_CYCLE_CAP", 1_000_000),
    "graph_max_edges": _get_int("WORKBENCH_GRAPH_MAX_EDGES", 30),
    "gadget_max_edges": _get_int("WORKBENCH_GADGET_MAX_EDGES", 128),

    # Matroids and hypergraphs (subset tables have 2^n rows)
    "matroid_max_ground": _get_int("WORKBENCH_MATROID_MAX_GROUND", 20),

    # Logic
    "formula_max_nodes": _get_int("WORKBENCH_FORMULA_MAX_NODES", 64),
    "formula_max_var": _get_int("WORKBENCH_FORMULA_MAX_VAR", 64),
    "delta_max": _get_int("WORKBENCH_DELTA_MAX", 8),
    "lambda_max_bits": _get_int("WORKBENCH_LAMBDA_MAX_BITS", 1_000_000),

    # Coloured systems
    "system_max_ground": _get_int("WORKBENCH_SYSTEM_MAX_GROUND", 12),
    "system_max_colours": _get_int("WORKBENCH_SYSTEM_MAX_COLOURS", 6),
    "complement_max_ground": _get_int("WORKBENCH_COMPLEMENT_MAX_GROUND", 6),
    "cleft_max_ground": _get_int("WORKBENCH_CLEFT_MAX_GROUND", 3),

    # Conviviality
    "conviviality_max_order": _get_int("WORKBENCH_CONVIVIALITY_MAX_ORDER", 48),

    # Runtime
    "threads": _get_int("WORKBENCH_THREADS", 1),
    "ledger_enabled": _get_bool("WORKBENCH_LEDGER", False),
    "ledger_url": _get_env("WORKBENCH_LEDGER_URL", "sqlite:///data/workbench.db"),
    "log_level": _get_env("WORKBENCH_LOG_LEVEL", "INFO"),
}

_BOOL_KEYS = {"ledger_enabled"}
_STR_KEYS = {"ledger_url", "log_level"}


def load_config_file(path: str, base: dict | None = None) -> dict:
    """Read a key=value file and return CONFIG (or ``base``) with the overrides applied."""
    merged = dict(CONFIG if base is None else base)
    with open(path, encoding="utf-8") as handle:
        for number, line in enumerate(handle, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise RuntimeError(f"{path}:{number}: expected key=value, got {stripped!r}")
            key, raw = (part.strip() for part in stripped.split("=", 1))
            if key not in merged:
                raise RuntimeError(f"{path}:{number}: unknown configuration key {key!r}")
            if key in _BOOL_KEYS:
                merged[key] = _parse_bool(raw)
            elif key in _STR_KEYS:
                merged[key] = raw
            else:
                try:
                    merged[key] = int(raw)
                except ValueError as exc:
                    raise RuntimeError(f"{path}:{number}: invalid integer for {key}: {raw}") from exc
    return merged
