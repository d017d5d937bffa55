"""Flat ``key=value`` run configuration and its resolution into a SolverConfig.

Keys (all optional except ``L`` and ``N``)::

    L, N, papr_threshold, n_subcarriers, n_samples, subcarriers,
    K, K1, gamma, rho, tau_seq, tau_papr,
    max_iterations, stall_limit, papr_inner_cap, seed, init_file

``subcarriers`` is ``contiguous`` (default), ``stride=<k>`` or an explicit
comma-separated list of 1-based indices. ``papr_threshold`` accepts ``inf``.
"""

import math
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .model import SubcarrierAssignment
from .solver import SolverConfig

INT_KEYS = ("L", "N", "n_subcarriers", "n_samples", "K", "K1",
            "max_iterations", "stall_limit", "papr_inner_cap", "seed")
FLOAT_KEYS = ("papr_threshold", "gamma", "rho", "tau_seq", "tau_papr")
STR_KEYS = ("subcarriers", "init_file")
KEYS = INT_KEYS + FLOAT_KEYS + STR_KEYS


def parse_float(text):
    value = str(text).strip().lower()
    if value in ("inf", "+inf", "infinity", "unconstrained", "none"):
        return math.inf
    return float(value)


def coerce(key, value):
    """Convert a raw string (or number) for ``key``; errors name the field."""
    if key not in KEYS:
        raise ValidationError(f"unknown configuration field {key!r}")
    try:
        if key in INT_KEYS:
            f = float(value)
            if not f.is_integer():
                raise ValueError
            return int(f)
        if key in FLOAT_KEYS:
            return parse_float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{key}: cannot parse {value!r}") from None
    return str(value).strip()


def read_config_file(path):
    params = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        try:
            params[key] = coerce(key, value)
        except ValidationError as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from None
    return params


def parse_subcarriers(spec, length, n_subcarriers=None, n_samples=None):
    spec = (spec or "contiguous").strip().lower()
    try:
        if spec == "contiguous":
            return SubcarrierAssignment.contiguous(length, n_subcarriers, n_samples)
        if spec.startswith("stride="):
            stride = int(spec.split("=", 1)[1])
            if stride < 1:
                raise ValidationError("stride must be >= 1")
            return SubcarrierAssignment.strided(length, stride, n_subcarriers, n_samples)
        c = [int(x) for x in spec.split(",")]
    except ValueError:
        raise ValidationError(f"subcarriers: cannot parse {spec!r}") from None
    except ValidationError as exc:
        raise ValidationError(f"subcarriers: {exc}") from None
    if len(c) != length:
        raise ValidationError(f"subcarriers: {len(c)} indices given for L={length}")
    if n_subcarriers is None and n_samples is None:
        n_subcarriers = n_samples = max(1024, max(c))
    elif n_subcarriers is None:
        n_subcarriers = n_samples
    elif n_samples is None:
        n_samples = max(1024, n_subcarriers)
    try:
        return SubcarrierAssignment(c, n_subcarriers, n_samples)
    except ValidationError as exc:
        raise ValidationError(f"subcarriers: {exc}") from None


def build_config(params):
    """SolverConfig from a dict of already-coerced values."""
    unknown = set(params) - set(KEYS)
    if unknown:
        raise ValidationError(f"unknown configuration field {sorted(unknown)[0]!r}")
    for key in ("L", "N"):
        if key not in params:
            raise ValidationError(f"{key} is required")
    length = params["L"]
    if length < 2:
        raise ValidationError(f"L must be >= 2, got {length}")
    assignment = parse_subcarriers(
        params.get("subcarriers"), length,
        params.get("n_subcarriers"), params.get("n_samples"),
    )
    kwargs = {k: params[k] for k in ("K", "K1", "gamma", "rho", "tau_seq", "tau_papr",
                                     "max_iterations", "stall_limit", "papr_inner_cap",
                                     "papr_threshold") if k in params}
    if "init_file" in params:
        from .io import load
        init = load(params["init_file"])
        kwargs["initial_sequences"] = np.array(init.sequences)
    return SolverConfig(
        L=length,
        N=params["N"],
        assignment=assignment,
        rng_seed=params.get("seed", 0),
        **kwargs,
    )
