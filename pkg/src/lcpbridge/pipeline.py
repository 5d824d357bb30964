"""Adapter-chain execution: runs a migration plan against concrete inputs.

The intermediate pivot model is always persisted as ``model.bml`` so it can
be reviewed, edited and re-used; generator outputs are deterministic
functions of that file, which is what makes re-runs byte-identical.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from .dsl import load_pivot_file, save_pivot_file
from .errors import LcpBridgeError, MissingInputError
from .llm import (
    ImagePayload,
    MergeReport,
    VisionRequest,
    build_prompt,
    extract_model,
    invoke_vision_model,
    load_prompt_context,
    merge_models,
)
from .loss import LossReport
from .mendix import load_mendix_export, mendix_to_pivot
from .model import DomainModel, require_valid
from .planner import EXPORTERS, MigrationPlan
from .plantuml import emit_plantuml, parse_plantuml
from .relational import emit_sql, plan_relational
from .tabular import infer_model, load_tabular
from .workbook import plan_workbook, emit_workbook

REPROMPT_LIMIT = 2  # re-asks after a malformed completion, then manual repair

_MEDIA_TYPES = {".png": "image/png", ".jpg": "image/jpeg", ".jpeg": "image/jpeg"}


@dataclass
class MigrationInputs:
    files: list[Path] = field(default_factory=list)
    images: list[Path] = field(default_factory=list)
    llm_client: object | None = None


@dataclass
class ExecutionOptions:
    dialect: str = "oracle"
    include_sample_row: bool = True
    review_hook: object | None = None  # callable(path) -> None, pauses for edits


@dataclass
class ExecutionResult:
    model: DomainModel
    pivot_path: Path
    outputs: list[Path]
    loss: LossReport
    merge_report: MergeReport | None = None


def _files_with_suffix(inputs: MigrationInputs, suffixes: tuple[str, ...],
                       step: str) -> list[Path]:
    matches = [p for p in inputs.files if p.suffix.lower() in suffixes]
    if not matches:
        raise MissingInputError(
            f"step {step!r} needs an input file with suffix {' or '.join(suffixes)}")
    return matches


def _load_image(path: Path) -> ImagePayload:
    media_type = _MEDIA_TYPES.get(path.suffix.lower())
    if media_type is None:
        raise MissingInputError(f"unsupported image type {path.suffix!r} for {path}")
    return ImagePayload(data=path.read_bytes(), media_type=media_type)


def run_importer(adapter_id: str, inputs: MigrationInputs, source_platform: str,
                 out_dir: Path, partial: DomainModel | None = None,
                 ) -> tuple[DomainModel, LossReport, MergeReport | None]:
    """Run one import adapter to a pivot model."""
    if adapter_id == "mendix-json":
        files = _files_with_suffix(inputs, (".json",), adapter_id)
        export = load_mendix_export(files[0])
        model, loss = mendix_to_pivot(export)
        return model, loss, None

    if adapter_id == "tabular":
        files = _files_with_suffix(inputs, (".csv", ".xlsx"), adapter_id)
        source = load_tabular(files)
        model, loss = infer_model(source, name="Imported")
        return model, loss, None

    if adapter_id == "plantuml":
        files = _files_with_suffix(inputs, (".puml", ".plantuml", ".txt"), adapter_id)
        result = parse_plantuml(files[0].read_text(encoding="utf-8"))
        return result.model, result.loss, None

    if adapter_id == "image-llm":
        if not inputs.images:
            raise MissingInputError("step 'image-llm' needs at least one screenshot")
        if inputs.llm_client is None:
            raise MissingInputError("step 'image-llm' needs a configured vision-model client")
        images = tuple(_load_image(p) for p in inputs.images)
        context = load_prompt_context(source_platform)
        loss = LossReport()

        attempt_error: Exception | None = None
        completion = ""
        for attempt in range(1 + REPROMPT_LIMIT):
            prompt = build_prompt(context, partial)
            if attempt_error is not None:
                prompt += ("\nThe previous answer could not be parsed as PlantUML: "
                           f"{attempt_error}\nPlease answer again with one corrected "
                           "@startuml block.\n")
            request = VisionRequest(prompt_text=prompt, images=images)
            completion = invoke_vision_model(request, inputs.llm_client)
            try:
                result = extract_model(completion)
            except LcpBridgeError as exc:
                attempt_error = exc
                continue
            loss.extend(result.loss)
            for warning in result.warnings:
                loss.add("model", source_platform, "LLM_INFERRED", "info", warning)
            inferred = result.model
            if partial is not None:
                merged, merge_report = merge_models(partial, inferred)
                return merged, loss, merge_report
            return inferred, loss, None

        # all attempts failed: keep the raw completion for manual repair
        out_dir.mkdir(parents=True, exist_ok=True)
        raw_path = out_dir / "llm-completion.txt"
        raw_path.write_text(completion, encoding="utf-8")
        raise LcpBridgeError(
            f"step 'image-llm' failed after {REPROMPT_LIMIT} re-prompts: {attempt_error}; "
            f"raw completion saved to {raw_path} for manual repair")

    raise LcpBridgeError(f"unknown import adapter {adapter_id!r}")


def run_exporter(adapter_id: str, model: DomainModel, out_dir: Path,
                 options: ExecutionOptions) -> tuple[list[Path], LossReport]:
    """Run one generator from the pivot model; returns written files."""
    out_dir.mkdir(parents=True, exist_ok=True)
    require_valid(model, "model for export")

    if adapter_id == "apex-sql":
        plan, loss = plan_relational(model)
        script = emit_sql(plan, dialect=options.dialect)
        path = out_dir / "model.sql"
        path.write_text(script, encoding="utf-8")
        return [path], loss

    if adapter_id == "workbook":
        manifest, loss = plan_workbook(model, include_sample_row=options.include_sample_row)
        book_path, manifest_path = emit_workbook(manifest, out_dir / "model.xlsx")
        return [book_path, manifest_path], loss

    if adapter_id == "csv":
        manifest, loss = plan_workbook(model, include_sample_row=options.include_sample_row)
        loss.add("model", model.name, "DROPPED", "warning",
                 "CSV fallback cannot carry dropdown validations between tables")
        paths = []
        for sheet in manifest.sheets:
            path = out_dir / f"{sheet.name}.csv"
            with open(path, "w", newline="", encoding="utf-8") as handle:
                writer = csv.writer(handle)
                writer.writerow([c.header for c in sheet.columns])
                if sheet.sample_row is not None and sheet.columns:
                    writer.writerow(sheet.sample_row)
            paths.append(path)
        return paths, loss

    if adapter_id == "plantuml":
        path = out_dir / "model.puml"
        path.write_text(emit_plantuml(model), encoding="utf-8")
        return [path], LossReport()

    raise LcpBridgeError(f"unknown export adapter {adapter_id!r}")


def execute_migration(plan: MigrationPlan, inputs: MigrationInputs, out_dir: str | Path,
                      options: ExecutionOptions | None = None) -> ExecutionResult:
    """Run the plan's chain end to end, persisting every artifact in out_dir."""
    options = options or ExecutionOptions()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    if not plan.chain or plan.chain[-1] not in EXPORTERS:
        raise MissingInputError(f"plan chain {plan.chain!r} does not end in a generator")
    importer_ids = list(plan.chain[:-1])
    exporter_id = plan.chain[-1]

    actual_loss = LossReport()
    model: DomainModel | None = None
    merge_report: MergeReport | None = None
    for adapter_id in importer_ids:
        try:
            model, step_loss, step_merge = run_importer(
                adapter_id, inputs, plan.source, out_dir, partial=model)
        except LcpBridgeError as exc:
            exc.details["step"] = adapter_id
            raise
        actual_loss.extend(step_loss)
        if step_merge is not None:
            merge_report = step_merge
    if model is None:
        raise MissingInputError("plan has no import step; nothing to migrate")

    pivot_path = out_dir / "model.bml"
    save_pivot_file(model, pivot_path)

    if options.review_hook is not None:
        options.review_hook(pivot_path)
        model = load_pivot_file(pivot_path)  # re-validate after human edits

    outputs, export_loss = run_exporter(exporter_id, model, out_dir, options)
    actual_loss.extend(export_loss)

    final_loss = plan.expected_losses.union(actual_loss)
    loss_path = out_dir / "loss-report.json"
    loss_path.write_text(final_loss.to_json(), encoding="utf-8")
    outputs = [pivot_path] + outputs + [loss_path]

    if merge_report is not None:
        merge_path = out_dir / "merge-report.json"
        merge_path.write_text(
            json.dumps(merge_report.as_dict(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8")
        outputs.append(merge_path)

    return ExecutionResult(model=model, pivot_path=pivot_path, outputs=outputs,
                           loss=final_loss, merge_report=merge_report)


def execute_from_pivot(pivot_path: str | Path, exporter_id: str, out_dir: str | Path,
                       options: ExecutionOptions | None = None) -> ExecutionResult:
    """Re-run only the generation leg from a persisted pivot file."""
    options = options or ExecutionOptions()
    out_dir = Path(out_dir)
    model = load_pivot_file(pivot_path)
    outputs, loss = run_exporter(exporter_id, model, out_dir, options)
    loss_path = out_dir / "loss-report.json"
    loss_path.write_text(loss.to_json(), encoding="utf-8")
    return ExecutionResult(model=model, pivot_path=Path(pivot_path),
                           outputs=outputs + [loss_path], loss=loss)
