"""
JSON descriptors for diffeomorphisms and profiles: {variant, params, domain}.
"""

import json
import math
from typing import Any, Dict, List, Optional

import numpy as np

from diffeo.diffeo1d import Affine, Diffeo1D, PolynomialMonotone, SampledMonotone
from diffeo.diffeo2d import Diffeo2D, Ha, Hr, Hs, LinearGradient
from diffeo.profiles import (
    AffinePlus,
    ComposedProfile,
    Profile,
    QuadraticMonotone,
    QuadraticRoot,
    SampledProfile,
)
from signal_core.errors import SignalFormatError


def _bound(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


def _domain(domain) -> List[Optional[float]]:
    return [_bound(domain[0]), _bound(domain[1])]


def _read_domain(raw: Optional[List[Optional[float]]]):
    if raw is None:
        return (-math.inf, math.inf)
    lo = -math.inf if raw[0] is None else float(raw[0])
    hi = math.inf if raw[1] is None else float(raw[1])
    return (lo, hi)


def profile_to_dict(profile: Profile) -> Dict[str, Any]:
    if isinstance(profile, AffinePlus):
        params = {"a": profile.a, "b": profile.b}
    elif isinstance(profile, (QuadraticMonotone, QuadraticRoot)):
        params = {"a": profile.a, "b": profile.b, "c": profile.c}
    elif isinstance(profile, SampledProfile):
        params = {"nodes": profile.nodes.tolist(), "values": profile.values.tolist()}
    elif isinstance(profile, ComposedProfile):
        params = {"outer": profile_to_dict(profile.outer), "inner": profile_to_dict(profile.inner)}
    else:
        raise SignalFormatError(f"Unsupported profile {type(profile).__name__}")
    return {"variant": profile.kind, "params": params, "domain": _domain(profile.domain)}


def profile_from_dict(data: Dict[str, Any]) -> Profile:
    variant, params = data.get("variant"), data.get("params", {})
    domain = _read_domain(data.get("domain"))
    if variant == AffinePlus.kind:
        return AffinePlus(params["a"], params["b"])
    if variant == QuadraticMonotone.kind:
        return QuadraticMonotone(params["a"], params["b"], params.get("c", 0.0), domain)
    if variant == QuadraticRoot.kind:
        return QuadraticRoot(params["a"], params["b"], params.get("c", 0.0), domain)
    if variant == SampledProfile.kind:
        return SampledProfile(params["nodes"], params["values"])
    if variant == ComposedProfile.kind:
        return ComposedProfile(profile_from_dict(params["outer"]), profile_from_dict(params["inner"]))
    raise SignalFormatError(f"Unknown profile variant {variant!r}")


def diffeo_to_dict(h) -> Dict[str, Any]:
    """Descriptor for any 1D or 2D diffeomorphism."""
    if isinstance(h, Affine):
        return {"variant": "affine", "params": {"alpha": h.alpha, "mu": h.mu}, "domain": _domain(h.domain)}
    if isinstance(h, PolynomialMonotone):
        return {"variant": "polynomial", "params": {"coefficients": h.coefficients.tolist()},
                "domain": _domain(h.domain)}
    if isinstance(h, SampledMonotone):
        return {"variant": "sampled", "params": {"nodes": h.nodes.tolist(), "values": h.values.tolist()},
                "domain": _domain(h.domain)}
    if isinstance(h, Ha):
        return {"variant": "Ha", "params": {"a": h.a, "u": h.u.tolist()}, "domain": None}
    if isinstance(h, Hs):
        return {"variant": "Hs", "params": {"a1": h.a1, "a2": h.a2, "b1": h.b1, "b2": h.b2}, "domain": None}
    if isinstance(h, LinearGradient):
        return {"variant": "linear", "params": {"matrix": h.matrix.tolist()}, "domain": None}
    if isinstance(h, Hr):
        return {"variant": "Hr", "params": {"f_prime": profile_to_dict(h.f_prime),
                                            "g_prime": profile_to_dict(h.g_prime)}, "domain": None}
    raise SignalFormatError(f"Unsupported diffeomorphism {type(h).__name__}")


def diffeo_from_dict(data: Dict[str, Any]):
    """
    Rebuild a diffeomorphism from its descriptor.

    Raises:
        SignalFormatError: On unknown variants or missing parameters
    """
    variant, params = data.get("variant"), data.get("params", {})
    domain = _read_domain(data.get("domain"))
    try:
        if variant == "affine":
            return Affine(params["alpha"], params["mu"], domain)
        if variant == "polynomial":
            return PolynomialMonotone(params["coefficients"], domain)
        if variant == "sampled":
            return SampledMonotone(params["nodes"], params["values"])
        if variant == "Ha":
            return Ha(params["a"], params["u"])
        if variant == "Hs":
            return Hs(params["a1"], params["a2"], params.get("b1", 0.0), params.get("b2", 0.0))
        if variant == "linear":
            return LinearGradient(np.asarray(params["matrix"]))
        if variant == "Hr":
            return Hr(profile_from_dict(params["f_prime"]), profile_from_dict(params["g_prime"]))
    except KeyError as e:
        raise SignalFormatError(f"Missing parameter {e} for variant {variant!r}")
    raise SignalFormatError(f"Unknown diffeomorphism variant {variant!r}")


def dumps(h) -> str:
    return json.dumps(diffeo_to_dict(h), sort_keys=True)


def loads(text: str):
    return diffeo_from_dict(json.loads(text))
