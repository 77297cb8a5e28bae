# Copyright Notice:
# Copyright 2026 horef contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see LICENSE.md

# Run configuration
#
# Settings come from horef-config.json (upper-case keys) and are then
# overridden by command-line flags:
#
#   {
#       "MAX_HO_VARS": 3,
#       "WEIGHTS": [1, 1, 1, 1],
#       "TIMEOUT_SECS": 3600,
#       "VERIFY": "Enable",
#       "UNIVERSE": null,
#       "KEEP_SINGLETONS": "Disable",
#       "SIZE_OPTIMUM": "Disable",
#       "PORT": 5000
#   }

import os
import json
import logging
from dataclasses import dataclass, replace
from typing import Optional, Tuple

from .abstractor import DEFAULT_MAX_HO_VARS
from .compressor import Weights
from .exceptions import ConfigurationError

logger = logging.getLogger(__name__)

CONFIG = 'horef-config.json'

_SWITCHES = ('Enable', 'Disable')


@dataclass(frozen=True)
class RunConfig:
    input_path: Optional[str] = None
    targets: Optional[Tuple[str, ...]] = None
    max_ho_vars: int = DEFAULT_MAX_HO_VARS
    weights: Weights = Weights()
    timeout_secs: float = 3600
    universe_path: Optional[str] = None
    output_path: Optional[str] = None
    report_path: Optional[str] = None
    verify: bool = True
    keep_singletons: bool = False
    size_optimum: bool = False
    library_path: Optional[str] = None
    refactored_path: Optional[str] = None
    port: int = 5000

    def __post_init__(self):
        if not isinstance(self.max_ho_vars, int) or self.max_ho_vars < 1:
            raise ConfigurationError('max_ho_vars must be a positive integer, got {0}'.format(self.max_ho_vars))
        if self.timeout_secs is None or self.timeout_secs <= 0:
            raise ConfigurationError('timeout must be positive, got {0}'.format(self.timeout_secs))

    def override(self, **kwargs):
        """
        Copy with every non-None keyword applied
        """
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


def _switch(config, key, default):
    value = config.get(key, default)
    if value not in _SWITCHES:
        raise ConfigurationError('{0} must be "Enable" or "Disable", got {1!r}'.format(key, value))
    return value == 'Enable'


def from_dict(config):
    """
    RunConfig from the upper-case keys of the configuration file
    """
    try:
        weights = config.get('WEIGHTS', [1, 1, 1, 1])
        if isinstance(weights, str):
            weights = Weights.parse(weights)
        else:
            weights = Weights.parse(','.join(str(w) for w in weights))
        return RunConfig(
            max_ho_vars=config.get('MAX_HO_VARS', DEFAULT_MAX_HO_VARS),
            weights=weights,
            timeout_secs=config.get('TIMEOUT_SECS', 3600),
            verify=_switch(config, 'VERIFY', 'Enable'),
            universe_path=config.get('UNIVERSE'),
            keep_singletons=_switch(config, 'KEEP_SINGLETONS', 'Disable'),
            size_optimum=_switch(config, 'SIZE_OPTIMUM', 'Disable'),
            port=int(config.get('PORT', 5000)))
    except TypeError as e:
        raise ConfigurationError('Malformed configuration: {0}'.format(e))


def load_config(path=CONFIG):
    """
    Reads the configuration file; a missing default file gives the defaults

    Arguments:
        path - Configuration file name
    """
    if not os.path.exists(path):
        if path != CONFIG:
            raise ConfigurationError('Configuration file not found: {0}'.format(path))
        logger.debug(f"No {CONFIG}; using defaults")
        return RunConfig()
    with open(path, 'r') as f:
        try:
            config = json.load(f)
        except ValueError as e:
            raise ConfigurationError('{0}: {1}'.format(path, e))
    logger.debug(f"Loaded configuration {path}")
    return from_dict(config)
