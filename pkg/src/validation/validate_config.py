import json
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from pydantic import ValidationError

from src.models.schemas import ScenarioConfig


def format_validation_errors(error: ValidationError) -> List[str]:
    """Flatten a pydantic error into "loc -> loc: msg" lines."""
    messages = []
    for item in error.errors():
        loc = " -> ".join(str(x) for x in item["loc"]) or "config"
        messages.append(f"{loc}: {item['msg']}")
    return messages


def validate_config(config: Dict) -> Tuple[bool, Optional[ScenarioConfig], Union[str, List[str]]]:
    """
    Args:
        config: Dictionary of scenario parameters (from a JSON config file)

    Returns:
        Tuple containing:
        - bool: True if validation passes, False otherwise
        - ScenarioConfig or None
        - Success message if valid, or list of error messages if invalid
    """
    if not isinstance(config, dict):
        return False, None, ["config: expected a JSON object of scenario parameters"]
    try:
        scenario = ScenarioConfig(**config)
        return True, scenario, "Validation successful"
    except ValidationError as e:
        return False, None, format_validation_errors(e)
    except Exception as e:
        return False, None, [f"Unexpected validation error: {str(e)}"]


def load_config(path: Union[str, Path]) -> Dict:
    """Read a flat JSON config file. I/O errors propagate; malformed JSON becomes a ValueError."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from e
