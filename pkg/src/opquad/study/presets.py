"""
Ready-made studies for the exponential-weight example.

Inside functions g1..g4 = sqrt(x), x, x^(3/2), x^2 on the Laguerre basis,
with the bounded outside function f1 = sin(sqrt(x)), the exponentially
growing f2 = e^x/(1+x^2), and the weighting functions h1 = 1 and
h2 = e^(x/2)/(1+x^2)^(3/8), which dominates f2 as |f2| <= h2^2.
"""

from ..core.errors import UsageError
from .harness import StudyConfig

ALL_INSIDE = ("g1", "g2", "g3", "g4")

PRESETS: dict[str, StudyConfig] = {
    "appendix-b-f1-h1": StudyConfig(inside=ALL_INSIDE, outside="f1", weighting="h1",
                                    n_range=(2, 30, 1)),
    "appendix-b-f2-h1": StudyConfig(inside=ALL_INSIDE, outside="f2", weighting="h1",
                                    n_range=(2, 25, 1)),
    "appendix-b-f2-h2": StudyConfig(inside=ALL_INSIDE, outside="f2", weighting="h2",
                                    n_range=(2, 40, 1)),
    # h2 with the bounded f1 only for g1 and g2
    "appendix-b-f1-h2": StudyConfig(inside=("g1", "g2"), outside="f1", weighting="h2",
                                    n_range=(2, 30, 1)),
}

ALIASES: dict[str, str] = {
    name.replace("appendix-b-", "expweight-"): name for name in PRESETS
}


def preset_names() -> list[str]:
    return sorted(PRESETS) + sorted(ALIASES)


def preset(name: str) -> StudyConfig:
    try:
        return PRESETS[ALIASES.get(name, name)]
    except KeyError:
        raise UsageError(
            "preset", f"unknown preset '{name}' (choose from {', '.join(sorted(PRESETS))})"
        ) from None
