"""Tourist-information dialogue engine.

A data-defined state-transition scenario drives the conversation; a
yes/no classifier and an age-switched sentiment estimator drive the
transitions; responses come from hand-written templates with LLM
generation as the fallback; the result is a two-spot sightseeing plan.
"""

from importlib import resources
from pathlib import Path

__version__ = "0.1.0"


def data_path(*parts: str) -> Path:
    """Path to a packaged data file (shipped scenario, catalog, models...)."""
    root = resources.files(__name__) / "data"
    return Path(str(root.joinpath(*parts)))
