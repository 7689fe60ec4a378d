"""Configuration loading and validation for goldbach triples."""

from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from goldbach_triples.core.primes import DEFAULT_SIEVE_CEILING

CONFIG_FILENAME = "goldbach.yaml"


class SieveConfig(BaseModel):
    """Prime table sizing."""

    limit: int = Field(default=20000, ge=0)
    ceiling: int = Field(default=DEFAULT_SIEVE_CEILING, ge=0)


class AnalysisConfig(BaseModel):
    """Sequence analysis thresholds."""

    band_k_min: int = 10
    autocorr_warn_threshold: float = 0.25


class ProtocolConfig(BaseModel):
    """GTP session defaults."""

    width: int | None = Field(default=None, ge=1)
    nonce_required: bool = False
    hash_algorithm: str = "sha256"
    n_range: tuple[int, int] = (101, 9999)


class PartyConfig(BaseModel):
    """A party registered with the CA."""

    id: str = Field(..., min_length=1)
    key: str = Field(..., min_length=1)


class AuditConfig(BaseModel):
    """Audit trail location."""

    log: str = "./audit/gtp_audit.log"


def _default_parties() -> list[PartyConfig]:
    return [
        PartyConfig(id="alice", key="alice-private-key"),
        PartyConfig(id="bob", key="bob-private-key"),
    ]


class Config(BaseModel):
    """Complete goldbach triples configuration."""

    sieve: SieveConfig = Field(default_factory=SieveConfig)
    analysis: AnalysisConfig = Field(default_factory=AnalysisConfig)
    protocol: ProtocolConfig = Field(default_factory=ProtocolConfig)
    parties: list[PartyConfig] = Field(default_factory=_default_parties)
    audit: AuditConfig = Field(default_factory=AuditConfig)

    # Runtime fields (not from config file)
    project_root: Path = Field(default=Path.cwd(), exclude=True)
    config_path: Path | None = Field(default=None, exclude=True)

    @field_validator("parties")
    @classmethod
    def _unique_party_ids(cls, parties: list[PartyConfig]) -> list[PartyConfig]:
        seen: set[str] = set()
        for party in parties:
            if party.id in seen:
                raise ValueError(f"Duplicate party id: {party.id}")
            seen.add(party.id)
        return parties

    def get_audit_log(self) -> Path:
        """Get absolute path to the audit log."""
        log_path = Path(self.audit.log)
        if log_path.is_absolute():
            return log_path
        return self.project_root / log_path


class Settings(BaseSettings):
    """Environment overrides (``GOLDBACH_CONFIG``, ``GOLDBACH_LOG_LEVEL``)."""

    model_config = SettingsConfigDict(env_prefix="GOLDBACH_")

    config: Path | None = None
    log_level: str = "WARNING"


def load_config(config_path: Path) -> Config:
    """Load configuration from YAML file."""
    if not config_path.exists():
        raise FileNotFoundError(f"Config file not found: {config_path}")

    with open(config_path) as f:
        data: dict[str, Any] = yaml.safe_load(f) or {}

    config = Config(**data)
    config.project_root = config_path.parent
    config.config_path = config_path

    return config


def get_default_config() -> Config:
    """Get a default configuration."""
    return Config()


DEFAULT_CONFIG_YAML = """# Goldbach Triples Configuration
sieve:
  limit: 20000
  ceiling: 10000000  # never sieve past this, whatever N or an audit line asks for

analysis:
  band_k_min: 10
  autocorr_warn_threshold: 0.25

protocol:
  # width: 16          # fixed session width; default is the bit length of the largest share
  nonce_required: false
  hash_algorithm: "sha256"
  n_range: [101, 9999]  # demo draws N from here when neither --n nor --range is given

parties:
  - id: "alice"
    key: "alice-private-key"
  - id: "bob"
    key: "bob-private-key"

audit:
  log: "./audit/gtp_audit.log"
"""
