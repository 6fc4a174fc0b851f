import os
from pathlib import Path
from typing import Optional, Union

import yaml
from dotenv import load_dotenv
from pydantic import ValidationError

from models.config_models import Config
from utils.exceptions import BadKey, BadValue

CONFIG_ENV_VAR = "GENQ_CONFIG"


def _dotted(location) -> str:
    return ".".join(str(part) for part in location)


def load_config(path: Union[str, Path, None] = None) -> Config:
    """
    Load the run configuration.

    The path comes from the argument, else the GENQ_CONFIG environment
    variable (a .env file is honoured); with neither, defaults apply.

    Args:
        path (str | Path, optional): YAML configuration file

    Returns:
        Config: Validated configuration

    Raises:
        BadKey: The file sets keys outside the documented key set
        BadValue: The file is unreadable, not a mapping, or a value is invalid
    """
    load_dotenv()
    path = path or os.getenv(CONFIG_ENV_VAR)
    if not path:
        return Config()

    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = yaml.safe_load(handle)
    except OSError as error:
        raise BadValue(f"cannot read config file: {error}", path=str(path)) from error
    except yaml.YAMLError as error:
        raise BadValue(f"config file is not valid YAML: {error}", path=str(path)) from error

    if raw is None:
        return Config()
    if not isinstance(raw, dict):
        raise BadValue("config file must hold a mapping of keys", path=str(path))

    try:
        return Config.model_validate(raw)
    except ValidationError as error:
        unknown = [
            _dotted(detail["loc"])
            for detail in error.errors()
            if detail["type"] == "extra_forbidden"
        ]
        if unknown:
            raise BadKey(unknown) from error
        detail = error.errors()[0]
        raise BadValue(
            f"invalid value for {_dotted(detail['loc']) or 'config'}: {detail['msg']}",
            path=str(path),
        ) from error
