"""Vision-model export path: prompt building, client boundary, merge step.

A screenshot of the source platform's diagram goes to a vision model along
with a platform-specific syntax primer and, when available, the partial
model recovered from the platform's tabular export. The completion comes
back as PlantUML, which is parsed and merged with the partial model; the
partial model always wins conflicts because it came from real exported data.

Tests and offline runs use the replay client: completions stored on disk,
keyed by a digest of the exact request.
"""

from __future__ import annotations

import base64
import hashlib
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    AuthenticationError,
    MissingFixtureError,
    NoCredentialsError,
    NoPlantUmlBlockError,
    TransportError,
    UnknownPlatformError,
)
from .model import (
    Association,
    AssociationEnd,
    Class,
    DomainModel,
    Generalization,
    Property,
    enum_type,
    require_valid,
)
from .plantuml import END_MARKER, START_MARKER, PlantUmlImport, emit_plantuml, parse_plantuml

API_KEY_ENV = "LCPB_LLM_API_KEY"

_PROMPT_DIR = Path(__file__).parent / "assets" / "prompts"


@dataclass(frozen=True)
class PromptContext:
    platform_id: str
    syntax_description: str
    extra_instructions: str = ""


def load_prompt_context(platform_id: str, registry=None) -> PromptContext:
    """Build the platform context from the shipped syntax-primer assets."""
    from .capabilities import default_matrix

    matrix = registry if registry is not None else default_matrix()
    if platform_id not in matrix.platform_ids():
        raise UnknownPlatformError(f"unknown platform {platform_id!r}")
    asset = _PROMPT_DIR / f"{platform_id}.txt"
    if not asset.exists():
        asset = _PROMPT_DIR / "default.txt"
    text = asset.read_text(encoding="utf-8")
    display = matrix.display_name(platform_id)
    return PromptContext(platform_id=platform_id,
                         syntax_description=text.replace("{platform}", display))


@dataclass(frozen=True)
class ImagePayload:
    data: bytes
    media_type: str = "image/png"


@dataclass(frozen=True)
class VisionRequest:
    prompt_text: str
    images: tuple[ImagePayload, ...]

    def __post_init__(self):
        if not self.images:
            raise ValueError("a vision request needs at least one image")


def build_prompt(context: PromptContext, partial: DomainModel | None = None) -> str:
    """Assemble the full instruction text sent alongside the screenshot(s)."""
    from .capabilities import default_matrix

    display = default_matrix().display_name(context.platform_id) \
        if context.platform_id in default_matrix().platform_ids() else context.platform_id
    sections = [
        f"Turn the attached screenshot of a {display} data model into the "
        "corresponding class diagram in PlantUML notation.",
        f"How {display} draws data models:\n{context.syntax_description.strip()}",
    ]
    if partial is not None:
        require_valid(partial, "partial model for prompt")
        sections.append(
            "A partial model extracted from the platform's own export is given "
            "below in PlantUML. Treat it as ground truth: keep every class, "
            "attribute and enumeration it declares exactly as written, and add "
            "only what is visible in the image but missing from it (typically "
            "the relationships between classes).\n\n" + emit_plantuml(partial).strip()
        )
    if context.extra_instructions:
        sections.append(context.extra_instructions.strip())
    sections.append(
        "Answer with a single @startuml ... @enduml block and nothing else."
    )
    return "\n\n".join(sections) + "\n"


def request_digest(request: VisionRequest) -> str:
    """Stable key for replay lookup: prompt text plus raw image bytes."""
    hasher = hashlib.sha256()
    hasher.update(request.prompt_text.encode("utf-8"))
    for image in request.images:
        hasher.update(b"\x00")
        hasher.update(image.data)
    return hasher.hexdigest()


class VisionModelClient:
    """Boundary for completion backends; implementations must be blocking."""

    def complete(self, request: VisionRequest) -> str:
        raise NotImplementedError


class ReplayVisionClient(VisionModelClient):
    """Deterministic store of canned completions, keyed by request digest."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)

    def complete(self, request: VisionRequest) -> str:
        digest = request_digest(request)
        fixture = self.directory / f"{digest}.txt"
        if not fixture.exists():
            raise MissingFixtureError(digest)
        return fixture.read_text(encoding="utf-8")

    def store(self, request: VisionRequest, completion: str) -> Path:
        """Save a completion under the request's digest (fixture authoring)."""
        self.directory.mkdir(parents=True, exist_ok=True)
        fixture = self.directory / f"{request_digest(request)}.txt"
        fixture.write_text(completion, encoding="utf-8")
        return fixture


class HttpVisionClient(VisionModelClient):
    """Live chat-completion client (OpenAI-style image message payload)."""

    def __init__(self, endpoint: str, model: str, api_key: str | None = None,
                 timeout: float = 120.0, record_dir: str | Path | None = None):
        self.endpoint = endpoint
        self.model = model
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
        self.timeout = timeout
        self.record_dir = Path(record_dir) if record_dir else None

    def complete(self, request: VisionRequest) -> str:
        if not self.api_key:
            raise NoCredentialsError(
                f"no API key configured (set {API_KEY_ENV} or the config file)")
        import requests

        content: list[dict] = [{"type": "text", "text": request.prompt_text}]
        for image in request.images:
            encoded = base64.b64encode(image.data).decode("ascii")
            content.append({
                "type": "image_url",
                "image_url": {"url": f"data:{image.media_type};base64,{encoded}"},
            })
        payload = {"model": self.model,
                   "messages": [{"role": "user", "content": content}]}
        try:
            response = requests.post(
                self.endpoint,
                json=payload,
                headers={"Authorization": f"Bearer {self.api_key}"},
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise TransportError(f"vision endpoint unreachable: {exc}") from exc
        if response.status_code in (401, 403):
            raise AuthenticationError(f"provider rejected credentials (HTTP {response.status_code})")
        if response.status_code >= 400:
            raise TransportError(f"provider error HTTP {response.status_code}: {response.text[:200]}")
        try:
            completion = response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise TransportError(f"unexpected provider response shape: {exc}") from exc
        if self.record_dir is not None:
            ReplayVisionClient(self.record_dir).store(request, completion)
        return completion


def invoke_vision_model(request: VisionRequest, client: VisionModelClient) -> str:
    """Send the request through the configured client; returns raw text."""
    return client.complete(request)


def extract_model(completion: str) -> PlantUmlImport:
    """Pull the first @startuml block out of a completion and parse it.

    Extra blocks are ignored with a warning. Parse failures carry the block
    text in their details so a human can repair and re-import it.
    """
    start = completion.find(START_MARKER)
    if start < 0:
        raise NoPlantUmlBlockError("completion contains no @startuml block")
    end = completion.find(END_MARKER, start)
    if end < 0:
        raise NoPlantUmlBlockError("completion has @startuml but no matching @enduml")
    block = completion[start:end + len(END_MARKER)]
    try:
        result = parse_plantuml(block)
    except Exception as exc:
        if hasattr(exc, "details"):
            exc.details["block_text"] = block
        raise
    if completion.find(START_MARKER, end) >= 0:
        result.warnings.append("completion contained more than one PlantUML block; first used")
    return result


# ---------------------------------------------------------------------------
# Partial-model merge


@dataclass(frozen=True)
class MergeConflict:
    element: str
    partial_value: str
    inferred_value: str
    resolution: str = "PARTIAL_WINS"


@dataclass
class MergeReport:
    added_classes: list[str] = field(default_factory=list)
    added_properties: list[str] = field(default_factory=list)  # "Class.prop", existing classes only
    added_associations: list[str] = field(default_factory=list)
    added_enumerations: list[str] = field(default_factory=list)
    added_generalizations: list[str] = field(default_factory=list)
    conflicts: list[MergeConflict] = field(default_factory=list)

    def is_empty(self) -> bool:
        return not (self.added_classes or self.added_properties or self.added_associations
                    or self.added_enumerations or self.added_generalizations or self.conflicts)

    def as_dict(self) -> dict:
        return {
            "added_classes": list(self.added_classes),
            "added_properties": list(self.added_properties),
            "added_associations": list(self.added_associations),
            "added_enumerations": list(self.added_enumerations),
            "added_generalizations": list(self.added_generalizations),
            "conflicts": [
                {"element": c.element, "partial_value": c.partial_value,
                 "inferred_value": c.inferred_value, "resolution": c.resolution}
                for c in self.conflicts
            ],
        }


def _assoc_fingerprint(assoc: Association) -> tuple:
    ends = sorted(
        (end.class_name,
         end.multiplicity.lower,
         -1 if end.multiplicity.upper is None else end.multiplicity.upper)
        for end in assoc.ends
    )
    return (assoc.name, tuple(ends))


def _assoc_pair(assoc: Association) -> frozenset:
    return frozenset((assoc.end1.class_name.lower(), assoc.end2.class_name.lower()))


def merge_models(partial: DomainModel, inferred: DomainModel) -> tuple[DomainModel, MergeReport]:
    """Complement the partial model with inferred-only elements.

    Everything in the partial model survives unchanged. The inferred model
    contributes classes, properties, enumerations, generalizations and
    associations that the partial lacks; wherever the two disagree the
    partial value stands and the disagreement is recorded.
    """
    require_valid(partial, "partial model")
    require_valid(inferred, "inferred model")
    report = MergeReport()

    partial_class_names = {c.name.lower() for c in partial.classes}
    partial_enum_names = {e.name.lower() for e in partial.enumerations}

    enums = list(partial.enumerations)
    enum_exact = {e.name.lower(): e.name for e in enums}
    for enum in inferred.enumerations:
        low = enum.name.lower()
        known = enum_exact.get(low)
        if known is None:
            if low in partial_class_names:
                report.conflicts.append(MergeConflict(
                    element=f"enum {enum.name}",
                    partial_value=f"class {enum.name} already present",
                    inferred_value=", ".join(enum.literals)))
                continue
            enums.append(enum)
            enum_exact[low] = enum.name
            report.added_enumerations.append(enum.name)
        else:
            mine = next(e for e in enums if e.name == known)
            if frozenset(mine.literals) != frozenset(enum.literals):
                report.conflicts.append(MergeConflict(
                    element=f"enum {known}",
                    partial_value=", ".join(mine.literals),
                    inferred_value=", ".join(enum.literals)))

    def repoint(prop: Property) -> Property:
        # inferred names may differ from the surviving element only in case
        if prop.type.kind == "enumeration":
            exact = enum_exact.get(prop.type.enum_name.lower())
            if exact is not None and exact != prop.type.enum_name:
                return Property(name=prop.name, type=enum_type(exact), is_id=prop.is_id)
        return prop

    classes: list[Class] = []
    class_exact = {c.name.lower(): c.name for c in partial.classes}
    for cls in partial.classes:
        inferred_twin = next(
            (c for c in inferred.classes if c.name.lower() == cls.name.lower()), None)
        if inferred_twin is None:
            classes.append(cls)
            continue
        props = list(cls.properties)
        own = {p.name.lower(): p for p in props}
        for prop in inferred_twin.properties:
            mine = own.get(prop.name.lower())
            if mine is None:
                props.append(repoint(prop))
                report.added_properties.append(f"{cls.name}.{prop.name}")
            elif mine.type.key() != repoint(prop).type.key() or mine.is_id != prop.is_id:
                report.conflicts.append(MergeConflict(
                    element=f"{cls.name}.{mine.name}",
                    partial_value=mine.type.display() + (" id" if mine.is_id else ""),
                    inferred_value=prop.type.display() + (" id" if prop.is_id else "")))
        classes.append(Class(name=cls.name, properties=tuple(props)))
    for cls in inferred.classes:
        low = cls.name.lower()
        if low in class_exact:
            continue
        if low in partial_enum_names:
            report.conflicts.append(MergeConflict(
                element=f"class {cls.name}",
                partial_value=f"enumeration {cls.name} already present",
                inferred_value=f"{len(cls.properties)} properties"))
            continue
        classes.append(Class(name=cls.name, properties=tuple(repoint(p) for p in cls.properties)))
        class_exact[low] = cls.name
        report.added_classes.append(cls.name)

    generalizations = list(partial.generalizations)
    parent_of = {g.specific.lower(): g.general for g in generalizations}
    for gen in inferred.generalizations:
        existing_parent = parent_of.get(gen.specific.lower())
        if existing_parent is not None:
            if existing_parent.lower() != gen.general.lower():
                report.conflicts.append(MergeConflict(
                    element=f"generalization of {gen.specific}",
                    partial_value=existing_parent,
                    inferred_value=gen.general))
            continue
        general = class_exact.get(gen.general.lower())
        specific = class_exact.get(gen.specific.lower())
        if general is None or specific is None or general == specific:
            continue
        # reject edges that would close a cycle through existing ones
        node, cyclic = general.lower(), False
        while node in parent_of:
            node = parent_of[node].lower()
            if node == specific.lower():
                cyclic = True
                break
        if cyclic:
            report.conflicts.append(MergeConflict(
                element=f"generalization of {specific}",
                partial_value="(acyclic hierarchy preserved)",
                inferred_value=general))
            continue
        generalizations.append(Generalization(general=general, specific=specific))
        parent_of[specific.lower()] = general
        report.added_generalizations.append(f"{specific}->{general}")

    associations = list(partial.associations)
    fingerprints = {_assoc_fingerprint(a) for a in associations}
    partial_pairs = {_assoc_pair(a): a for a in partial.associations}
    for assoc in inferred.associations:
        exact1 = class_exact.get(assoc.end1.class_name.lower())
        exact2 = class_exact.get(assoc.end2.class_name.lower())
        if exact1 is None or exact2 is None:
            continue
        normalized = Association(
            name=assoc.name,
            end1=AssociationEnd(role=assoc.end1.role, class_name=exact1,
                                multiplicity=assoc.end1.multiplicity,
                                navigable=assoc.end1.navigable),
            end2=AssociationEnd(role=assoc.end2.role, class_name=exact2,
                                multiplicity=assoc.end2.multiplicity,
                                navigable=assoc.end2.navigable),
        )
        if _assoc_fingerprint(normalized) in fingerprints:
            continue
        clashing = partial_pairs.get(_assoc_pair(normalized))
        if clashing is not None:
            report.conflicts.append(MergeConflict(
                element=f"association {clashing.name}",
                partial_value=_describe_assoc(clashing),
                inferred_value=_describe_assoc(normalized)))
            continue
        associations.append(normalized)
        fingerprints.add(_assoc_fingerprint(normalized))
        report.added_associations.append(normalized.name)

    merged = DomainModel(
        name=partial.name,
        classes=tuple(classes),
        associations=tuple(associations),
        generalizations=tuple(generalizations),
        enumerations=tuple(enums),
    )
    return require_valid(merged, "merged model"), report


def _describe_assoc(assoc: Association) -> str:
    e1, e2 = assoc.end1, assoc.end2
    return (f"{e1.class_name}[{e1.multiplicity.display()}] -- "
            f"{e2.class_name}[{e2.multiplicity.display()}]")
