"""Bundled example models."""
from importlib import resources

NAMES = ("chain", "conflict", "hiring", "voting")


def model_path(name: str):
    return resources.files(__package__).joinpath("models", f"{name}.psl")


def model_text(name: str) -> str:
    return model_path(name).read_text(encoding="utf-8")
