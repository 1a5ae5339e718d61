import json
import re
from pathlib import Path
from typing import Any, Optional, Sequence, Tuple

from pydantic import ValidationError

from errors import ConfigError
from schemas import StudyConfig


def _key_pattern(key: str) -> "re.Pattern[str]":
    return re.compile(r'"%s"\s*:' % re.escape(key))


def locate_line(text: str, loc: Sequence[Any]) -> int:
    """
    Best-effort 1-based line of a location inside a JSON document.

    String parts are found as `"key":` in order, each search starting where
    the previous one matched. An integer index skips that many occurrences of
    the next key, which is exact for arrays of objects sharing their keys.
    Parts that cannot be found leave the position where it was.
    """
    parts = list(loc)
    position = 0
    for index, part in enumerate(parts):
        if isinstance(part, int):
            following = next((p for p in parts[index + 1:] if isinstance(p, str)), None)
            if following is None:
                continue
            pattern = _key_pattern(following)
            for _ in range(part):
                match = pattern.search(text, position)
                if match is None:
                    break
                position = match.end()
            continue
        match = _key_pattern(str(part)).search(text, position)
        if match is None:
            break
        position = match.start()
    return text.count("\n", 0, position) + 1


def _from_validation_error(exc: ValidationError) -> ConfigError:
    errors = exc.errors()
    first = errors[0]
    message = first["msg"].removeprefix("Value error, ")
    if len(errors) > 1:
        message += f" (and {len(errors) - 1} more)"
    return ConfigError(message, loc=first["loc"])


def parse_config(text: str) -> StudyConfig:
    """
    Parse and validate a JSON study configuration.

    Raises:
        ConfigError: for invalid JSON (with its line) or a schema violation (with its location)
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", line=exc.lineno)
    try:
        return StudyConfig.model_validate(data)
    except ValidationError as exc:
        raise _from_validation_error(exc)


def read_config(path: Path) -> Tuple[StudyConfig, str]:
    """
    Read a study configuration file.

    Returns:
        (config, text); the text is kept to locate later errors by line.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror or exc}", line=0)
    return parse_config(text), text


def format_config_error(exc: ConfigError, text: Optional[str] = None, source: str = "<config>") -> str:
    """Render as `path:line: location: message`; the location is omitted when unknown."""
    line = exc.line
    if line is None:
        line = locate_line(text, exc.loc) if text is not None else 0
    location = ".".join(str(part) for part in exc.loc)
    if location:
        return f"{source}:{line}: {location}: {exc.message}"
    return f"{source}:{line}: {exc.message}"
