"""
Dotted-key overrides for run configurations.

Dotted keys address nested sections of a run configuration, e.g.
``train.total_iters`` or ``scene.eye_radius``. The pipeline layers command line
flags over a loaded JSON document with :func:`apply_overrides` before validation.
"""

import copy
from typing import Any, Dict, Mapping


def apply_overrides(data: Mapping[str, Any], overrides: Mapping[str, Any]) -> Dict[str, Any]:
    """
    Return a deep copy of ``data`` with every dotted-key override applied.

    Intermediate sections are created when missing; ``None`` override values are
    skipped so unset command line flags never shadow file values.

    Args:
        data: Parsed configuration document.
        overrides: Mapping of dotted keys to new values.

    Returns:
        Dict[str, Any]: The updated document.

    Raises:
        KeyError: If a dotted key walks through a non-section value.

    Example:
        >>> apply_overrides({"train": {"seed": 0}}, {"train.seed": 7})
        {'train': {'seed': 7}}
    """
    result: Dict[str, Any] = copy.deepcopy(dict(data))
    for dotted_key, value in overrides.items():
        if value is None:
            continue
        *sections, leaf = dotted_key.split(".")
        node = result
        for section in sections:
            child = node.setdefault(section, {})
            if not isinstance(child, dict):
                raise KeyError(f"'{section}' in '{dotted_key}' is not a configuration section")
            node = child
        node[leaf] = value
    return result
