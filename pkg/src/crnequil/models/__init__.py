"""Bundled example networks in the package text format."""

from importlib import resources

NAMES = ("toy", "histidine_kinase", "two_protein", "envz_ompr")


def load_text(name: str) -> str:
    if name not in NAMES:
        raise KeyError(f"unknown model {name!r}; available: {', '.join(NAMES)}")
    return resources.files(__package__).joinpath(f"{name}.crn").read_text(encoding="utf-8")


def path(name: str) -> str:
    if name not in NAMES:
        raise KeyError(f"unknown model {name!r}; available: {', '.join(NAMES)}")
    return str(resources.files(__package__).joinpath(f"{name}.crn"))
