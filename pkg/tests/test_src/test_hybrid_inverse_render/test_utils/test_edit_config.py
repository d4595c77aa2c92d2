"""Unit tests for the dotted-key configuration overrides."""

import pytest

from hybrid_inverse_render.utils.edit_config import apply_overrides


def test_apply_overrides_sets_nested_values() -> None:
    """Dotted keys update nested sections and create missing ones."""
    data = {"train": {"seed": 0, "lr0": 0.001}}

    result = apply_overrides(data, {"train.seed": 7, "scene.r0": 0.4})

    assert result == {"train": {"seed": 7, "lr0": 0.001}, "scene": {"r0": 0.4}}


def test_apply_overrides_leaves_input_untouched() -> None:
    """The input document is deep-copied."""
    data = {"train": {"seed": 0}}

    apply_overrides(data, {"train.seed": 3})

    assert data == {"train": {"seed": 0}}


def test_apply_overrides_skips_none() -> None:
    """Unset command line flags (None) never shadow file values."""
    data = {"train": {"seed": 5}}

    assert apply_overrides(data, {"train.seed": None}) == data


def test_apply_overrides_rejects_non_section() -> None:
    """Walking through a scalar value is an error."""
    with pytest.raises(KeyError, match="not a configuration section"):
        apply_overrides({"train": 3}, {"train.seed": 1})

