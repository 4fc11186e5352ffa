"""
Configuration defaults.

Defaults are read from the environment at import time. An optional INI file
pointed by ROCSCALE_CONF can override them from its [DEFAULT] section.
"""

from configparser import ConfigParser
from pathlib import Path
from typing import Any, Dict
import logging
import os

import statsd  # debdeps: python3-statsd

from rocscale.utils import RocScaleError

log = logging.getLogger("rocscale")

APP_ENV = os.environ.get("ROCSCALE_ENV", "production")
KNOWN_ENVS = ("development", "production", "testing")

CONFFILE = os.environ.get("ROCSCALE_CONF", "/etc/rocscale/rocscale.conf")

# Seed, trials and resamples follow the experimental protocol: 10k trials
# bootstrapped with 1000 re-samplings at 95%
SEED = int(os.environ.get("ROCSCALE_SEED", "42"))
TRIALS = int(os.environ.get("ROCSCALE_TRIALS", "10000"))
RESAMPLES = int(os.environ.get("ROCSCALE_RESAMPLES", "1000"))
LEVEL = float(os.environ.get("ROCSCALE_LEVEL", "0.95"))
MAX_DRAWS = int(os.environ.get("ROCSCALE_MAX_DRAWS", str(10 ** 6)))
WORKERS = int(os.environ.get("ROCSCALE_WORKERS", "1"))
GRID = int(os.environ.get("ROCSCALE_GRID", "101"))

metrics = statsd.StatsClient("localhost", 8125, prefix="rocscale")

# key -> parser, used both for the INI overrides and for validation
CONF_KEYS = {
    "seed": int,
    "trials": int,
    "resamples": int,
    "level": float,
    "max_draws": int,
    "workers": int,
    "grid": int,
    "app_env": str,
}


class ConfigError(RocScaleError):
    pass


def defaults() -> Dict[str, Any]:
    return dict(
        seed=SEED,
        trials=TRIALS,
        resamples=RESAMPLES,
        level=LEVEL,
        max_draws=MAX_DRAWS,
        workers=WORKERS,
        grid=GRID,
        app_env=APP_ENV,
    )


def read_conf(conffile: str) -> Dict[str, str]:
    """Read the [DEFAULT] section of an INI file, empty if missing"""
    if not Path(conffile).is_file():
        return {}
    log.debug(f"Reading {conffile}")
    cp = ConfigParser()
    cp.read(conffile)
    return dict(cp["DEFAULT"])


def validate_conf(conf: Dict[str, Any], conffile: str = CONFFILE) -> Dict[str, Any]:
    """Fail early if the configuration looks incorrect"""
    out = {}
    for k, v in conf.items():
        if k not in CONF_KEYS:
            raise ConfigError(f"Unknown configuration key {k} in {conffile}")
        try:
            out[k] = CONF_KEYS[k](v)
        except (TypeError, ValueError):
            raise ConfigError(f"Invalid value {v!r} for {k} in {conffile}")

    if out["app_env"] not in KNOWN_ENVS:
        raise ConfigError(f"Unexpected ROCSCALE_ENV {out['app_env']!r}")
    for k in ("trials", "resamples", "max_draws", "workers", "grid"):
        if out[k] < 1:
            raise ConfigError(f"{k} must be >= 1, got {out[k]}")
    if not 0 < out["level"] < 1:
        raise ConfigError(f"level must be in (0, 1), got {out['level']}")
    if not 0 <= out["seed"] < 2 ** 64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {out['seed']}")
    return out


def load_conf(conffile: str = CONFFILE) -> Dict[str, Any]:
    """Load defaults and then the overrides from the file pointed by
    ROCSCALE_CONF (defaults to /etc/rocscale/rocscale.conf)
    """
    conf: Dict[str, Any] = defaults()
    conf.update(read_conf(conffile))
    return validate_conf(conf, conffile)
