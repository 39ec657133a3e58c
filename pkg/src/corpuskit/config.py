"""Config file loading: one TOML document with [pipeline], [langid], and
[source.NAME] sections.

Every field of the pipeline, language-identification, and spider configs is
addressable; unknown sections or keys are an error (fail loudly). Relative
input paths resolve against the config file's directory.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from .core import BUILTIN_PROFILES, ScriptProfile, SourceSpec
from .filters import LangIdConfig
from .harvest import SpiderConfig, SpiderConfigError
from .htmltext import SelectorError
from .pipeline import PipelineConfig


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key or section."""


@dataclass
class LoadedConfig:
    pipeline: PipelineConfig
    spiders: dict[str, SpiderConfig]
    source_inputs: dict[str, Path] = field(default_factory=dict)
    config_digest: str = ""
    config_dir: Path = Path(".")


_PIPELINE_KEYS = {
    "output_dir": str,
    "min_tokens": int,
    "shard_max_docs": int,
    "deterministic": bool,
    "shard_gzip": bool,
}
_LANGID_KEYS = {
    "profile": str,
    "ranges": list,
    "min_ratio": (int, float),
    "token_membership_threshold": (int, float),
}
_SOURCE_COMMON_KEYS = {
    "category": str,
    "kind": str,
    "input": str,
}
_SPIDER_KEYS = {
    "start_urls": list,
    "allow_patterns": list,
    "url_must_contain": str,
    "content_selector": str,
    "max_pages": int,
    "min_delay_ms": int,
    "same_host_only": bool,
    "obey_robots": bool,
    "user_agent": str,
}


def _check_keys(section: str, table: dict, allowed: dict) -> None:
    for key, value in table.items():
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in [{section}]")
        expected = allowed[key]
        if not isinstance(value, expected) or (expected is int and isinstance(value, bool)):
            raise ConfigError(f"[{section}] {key}: expected {getattr(expected, '__name__', expected)}")


def _parse_ranges(section: str, raw: list) -> tuple[tuple[int, int], ...]:
    ranges = []
    for item in raw:
        if not isinstance(item, str) or "-" not in item:
            raise ConfigError(f"[{section}] ranges: expected 'LO-HI' hex entries, got {item!r}")
        lo_s, _, hi_s = item.partition("-")
        try:
            ranges.append((int(lo_s, 16), int(hi_s, 16)))
        except ValueError as exc:
            raise ConfigError(f"[{section}] ranges: bad hex in {item!r}") from exc
    return tuple(ranges)


def load_config(path: Path | str) -> LoadedConfig:
    """Load and validate the full toolkit configuration."""
    path = Path(path)
    try:
        raw_bytes = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        data = tomllib.loads(raw_bytes.decode("utf-8"))
    except (UnicodeDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from exc

    for section in data:
        if section not in ("pipeline", "langid", "source"):
            raise ConfigError(f"unknown section [{section}]")

    config_dir = path.parent

    pipeline_table = data.get("pipeline", {})
    _check_keys("pipeline", pipeline_table, _PIPELINE_KEYS)
    langid_table = data.get("langid", {})
    _check_keys("langid", langid_table, _LANGID_KEYS)

    profile_name = langid_table.get("profile", "pashto")
    if "ranges" in langid_table:
        profile = ScriptProfile(name=profile_name, ranges=_parse_ranges("langid", langid_table["ranges"]))
    else:
        profile = BUILTIN_PROFILES.get(profile_name)
        if profile is None:
            raise ConfigError(
                f"[langid] profile: unknown builtin {profile_name!r} and no ranges given"
            )
    try:
        langid = LangIdConfig(
            profile=profile,
            min_ratio=float(langid_table.get("min_ratio", 0.70)),
            token_membership_threshold=float(langid_table.get("token_membership_threshold", 0.5)),
        )
    except ValueError as exc:
        raise ConfigError(f"[langid]: {exc}") from exc

    sources_table = data.get("source", {})
    if not isinstance(sources_table, dict) or any(
        not isinstance(v, dict) for v in sources_table.values()
    ):
        raise ConfigError("sources must be declared as [source.NAME] sections")

    sources: list[tuple[SourceSpec, Path]] = []
    spiders: dict[str, SpiderConfig] = {}
    source_inputs: dict[str, Path] = {}
    for name, table in sources_table.items():
        section = f"source.{name}"
        kind = table.get("kind")
        allowed = dict(_SOURCE_COMMON_KEYS)
        if kind == "crawl":
            allowed.update(_SPIDER_KEYS)
        _check_keys(section, table, allowed)
        for required in ("category", "kind", "input"):
            if required not in table:
                raise ConfigError(f"[{section}] missing required key {required!r}")
        try:
            spec = SourceSpec(name=name, category=table["category"], kind=table["kind"])
        except ValueError as exc:
            raise ConfigError(f"[{section}]: {exc}") from exc
        input_path = config_dir / table["input"]
        sources.append((spec, input_path))
        source_inputs[name] = input_path

        if kind == "crawl":
            for required in ("start_urls", "content_selector"):
                if required not in table:
                    raise ConfigError(f"[{section}] missing required key {required!r}")
            try:
                spiders[name] = SpiderConfig(
                    name=name,
                    start_urls=tuple(table["start_urls"]),
                    content_selector=table["content_selector"],
                    allow_patterns=tuple(table.get("allow_patterns", ())),
                    url_must_contain=table.get("url_must_contain"),
                    max_pages=table.get("max_pages", 100),
                    min_delay_ms=table.get("min_delay_ms", 0),
                    same_host_only=table.get("same_host_only", True),
                    obey_robots=table.get("obey_robots", True),
                    user_agent=table.get("user_agent", SpiderConfig.user_agent),
                )
            except (SpiderConfigError, SelectorError) as exc:
                raise ConfigError(f"[{section}]: {exc}") from exc

    try:
        pipeline = PipelineConfig(
            sources=tuple(sources),
            output_dir=config_dir / pipeline_table.get("output_dir", "out"),
            langid=langid,
            min_tokens=pipeline_table.get("min_tokens", 10),
            shard_max_docs=pipeline_table.get("shard_max_docs", 50_000),
            deterministic=pipeline_table.get("deterministic", True),
            shard_gzip=pipeline_table.get("shard_gzip", False),
        )
    except ValueError as exc:
        raise ConfigError(f"[pipeline]: {exc}") from exc

    return LoadedConfig(
        pipeline=pipeline,
        spiders=spiders,
        source_inputs=source_inputs,
        config_digest=hashlib.sha256(raw_bytes).hexdigest(),
        config_dir=config_dir,
    )
