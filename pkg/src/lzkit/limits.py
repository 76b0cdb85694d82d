"""Desk-scale resource guardrails."""

import os

from .errors import InputError

ENV_VAR = "LZKIT_MEM_BUDGET"
CODEBOOK_SYMBOLS = 2**24
ENUMERATION_CANDIDATES = 2**20


def budget(default: int) -> int:
    """``default``, unless ``LZKIT_MEM_BUDGET`` is set, which overrides every guardrail."""
    raw = os.environ.get(ENV_VAR)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{ENV_VAR} must be an integer, got {raw!r}") from None
