"""Shared fixtures: the library model in its various source forms."""

from __future__ import annotations

import base64
from pathlib import Path

import pytest

from lcpbridge.model import (
    Association,
    AssociationEnd,
    Class,
    DomainModel,
    Enumeration,
    Multiplicity,
    Property,
    enum_type,
    primitive_type,
)

DATA_DIR = Path(__file__).parent / "data"

# 1x1 PNG, stands in for a platform screenshot in replay-mode tests
PLACEHOLDER_PNG = base64.b64decode(
    "iVBORw0KGgoAAAANSUhEUgAAAAEAAAABCAYAAAAfFcSJAAAADUlEQVR42mP8"
    "z8BQDwAEhQGAhKmMIQAAAABJRU5ErkJggg=="
)


def make_library_model() -> DomainModel:
    """The worked example: Library/Book/Author with one m2m and one m2o."""
    return DomainModel(
        name="Library",
        classes=(
            Class("Library", (Property("name", primitive_type("str"), is_id=True),)),
            Class("Book", (
                Property("title", primitive_type("str")),
                Property("pages", primitive_type("int")),
                Property("status", enum_type("BookStatus")),
                Property("published", primitive_type("date")),
            )),
            Class("Author", (Property("name", primitive_type("str")),)),
        ),
        associations=(
            Association("Book_Author",
                        AssociationEnd("books", "Book", Multiplicity(0, None), False),
                        AssociationEnd("authors", "Author", Multiplicity(0, None), True)),
            Association("Book_Library",
                        AssociationEnd("books", "Book", Multiplicity(0, None), False),
                        AssociationEnd("library", "Library", Multiplicity(0, 1), True)),
        ),
        enumerations=(
            Enumeration("BookStatus", ("AVAILABLE", "LOANED", "RESERVED")),
        ),
    )


@pytest.fixture
def library_model() -> DomainModel:
    return make_library_model()


@pytest.fixture(scope="session")
def mendix_library_path() -> Path:
    return DATA_DIR / "mendix_library.json"


@pytest.fixture(scope="session")
def csv_paths() -> list[Path]:
    return sorted((DATA_DIR / "csv").glob("*.csv"))


@pytest.fixture(scope="session")
def screenshot_path(tmp_path_factory) -> Path:
    path = tmp_path_factory.mktemp("images") / "powerapps_screenshot.png"
    path.write_bytes(PLACEHOLDER_PNG)
    return path


@pytest.fixture(scope="session")
def replay_dir(tmp_path_factory, csv_paths, screenshot_path) -> Path:
    """Replay store holding the canned completion for the PowerApps scenario.

    The fixture key is a digest of the exact request, so the store is built
    here with the same prompt the pipeline will assemble: PowerApps context
    plus the partial model inferred from the CSV fixtures.
    """
    from lcpbridge.llm import (
        ImagePayload,
        ReplayVisionClient,
        VisionRequest,
        build_prompt,
        load_prompt_context,
    )
    from lcpbridge.tabular import infer_model, load_tabular

    partial, _ = infer_model(load_tabular(csv_paths), name="Imported")
    prompt = build_prompt(load_prompt_context("powerapps"), partial)
    request = VisionRequest(
        prompt_text=prompt,
        images=(ImagePayload(data=PLACEHOLDER_PNG, media_type="image/png"),),
    )
    directory = tmp_path_factory.mktemp("replay")
    completion = (DATA_DIR / "replay_completion.txt").read_text(encoding="utf-8")
    ReplayVisionClient(directory).store(request, completion)
    return directory
