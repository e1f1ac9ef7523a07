"""Manifestos de execucao, esquemas JSON publicados e tabelas rich."""

from __future__ import annotations

import json
import platform
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import numpy as np
from rich.table import Table

from polytrap import __version__
from polytrap.traps import TrapReport

MANIFEST_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["command", "arguments", "seed", "reproducible", "versions", "started_at", "finished_at", "outcomes"],
    "properties": {
        "command": {"type": "string"},
        "arguments": {"type": "object"},
        "seed": {"type": "integer"},
        "reproducible": {"type": "boolean"},
        "versions": {"type": "object", "additionalProperties": {"type": "string"}},
        "started_at": {"type": ["string", "null"]},
        "finished_at": {"type": ["string", "null"]},
        "outcomes": {"type": "array", "items": {"type": "object"}},
    },
}

REPORT_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["manifest", "reports"],
    "definitions": {"manifest": MANIFEST_SCHEMA},
    "properties": {
        "manifest": {"$ref": "#/definitions/manifest"},
        "reports": {
            "type": "array",
            "items": {
                "type": "object",
                "required": [
                    "map", "p", "claim", "holds", "nilpotency_index", "witness",
                    "predicted_untrapped", "observed_untrapped", "mode", "elapsed_ms",
                ],
                "properties": {
                    "map": {"type": "string"},
                    "p": {"type": "integer"},
                    "claim": {"enum": [
                        "ratio_recurrence", "additive_trap", "multiplicative_trap",
                        "power_trap", "single_attractor",
                    ]},
                    "holds": {"type": "boolean"},
                    "nilpotency_index": {"type": ["integer", "null"]},
                    "witness": {"type": ["array", "null"], "items": {"type": "integer"}},
                    "predicted_untrapped": {"type": ["integer", "null"]},
                    "observed_untrapped": {"type": ["integer", "null"]},
                    "mode": {"enum": ["exhaustive", "sampled", "streamed"]},
                    "elapsed_ms": {"type": ["number", "null"]},
                    "details": {"type": "object"},
                    "error": {"type": ["string", "null"]},
                },
            },
        },
    },
}

GRAPH_SUMMARY_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["p", "n", "size", "cycle_count", "cycle_spectrum", "max_tail_depth", "basin_sizes"],
    "properties": {
        "map": {"type": ["string", "null"]},
        "p": {"type": "integer"},
        "n": {"type": "integer"},
        "size": {"type": "integer"},
        "cycle_count": {"type": "integer"},
        "cycle_spectrum": {"type": "object", "additionalProperties": {"type": "integer"}},
        "max_tail_depth": {"type": "integer"},
        "basin_sizes": {"type": "array", "items": {"type": "integer"}},
        "cycles": {"type": "array", "items": {"type": "array"}},
    },
}

# arquivo gravado por `graph --export summary -o ARQ`
GRAPH_FILE_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["manifest", "summary"],
    "definitions": {"manifest": MANIFEST_SCHEMA},
    "properties": {
        "manifest": {"$ref": "#/definitions/manifest"},
        "summary": GRAPH_SUMMARY_SCHEMA,
    },
}

SORT_RESULT_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["p", "sorts_correctly", "required_iterate", "failure_witness"],
    "properties": {
        "p": {"type": "integer"},
        "sorts_correctly": {"type": "boolean"},
        "required_iterate": {"type": ["integer", "null"]},
        "failure_witness": {"type": ["array", "null"]},
        "degenerate": {"type": "boolean"},
        "reason": {"type": ["string", "null"]},
    },
}

VERDICT_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["index", "map", "fixed_over_Z", "per_prime", "overall"],
    "properties": {
        "index": {"type": "integer"},
        "map": {"type": "array", "items": {"type": "string"}},
        "fixed_over_Z": {"type": "boolean"},
        "per_prime": {"type": "array", "items": SORT_RESULT_SCHEMA},
        "overall": {"enum": ["pass", "fail"]},
        "reason": {"type": ["string", "null"]},
        "exceeds_linear_bound": {"type": "array", "items": {"type": "integer"}},
    },
}

# linha `--control` que precede os veredictos
CONTROL_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["control", "p", "sorts_correctly"],
    "properties": {"control": {"type": "string"}, **SORT_RESULT_SCHEMA["properties"]},
}

# ultima linha do fluxo de `search`
SEARCH_SUMMARY_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["summary"],
    "properties": {
        "summary": {
            "type": "object",
            "required": [
                "candidates_tested",
                "rejected_not_fixed",
                "rejected_by_prime",
                "rejected_other",
                "passes",
                "degenerate_primes",
                "no_primes_tested",
                "truncated",
            ],
            "properties": {
                "candidates_tested": {"type": "integer"},
                "rejected_not_fixed": {"type": "integer"},
                "rejected_by_prime": {"type": "object", "additionalProperties": {"type": "integer"}},
                "rejected_other": {"type": "integer"},
                "passes": {"type": "integer"},
                "degenerate_primes": {"type": "array", "items": {"type": "integer"}},
                "no_primes_tested": {"type": "boolean"},
                "truncated": {"type": "boolean"},
            },
        },
    },
}


def schema_text(schema: Dict[str, Any]) -> str:
    return json.dumps(schema, indent=1, sort_keys=True)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    command: str
    arguments: Dict[str, Any]
    seed: int
    reproducible: bool = False
    versions: Dict[str, str] = field(default_factory=dict)
    started_at: Optional[str] = None
    finished_at: Optional[str] = None
    outcomes: List[Dict[str, Any]] = field(default_factory=list)

    def finish(self, outcomes: Iterable[Dict[str, Any]] = ()) -> "RunManifest":
        self.outcomes.extend(outcomes)
        if not self.reproducible:
            self.finished_at = _now()
        return self

    def to_json(self) -> Dict[str, Any]:
        return asdict(self)


def build_manifest(command: str, arguments: Dict[str, Any], seed: int, reproducible: bool = False) -> RunManifest:
    versions = {"polytrap": __version__, "numpy": np.__version__}
    if not reproducible:
        versions["python"] = platform.python_version()
    return RunManifest(
        command=command,
        arguments=arguments,
        seed=seed,
        reproducible=reproducible,
        versions=versions,
        started_at=None if reproducible else _now(),
    )


def write_json_report(path: str | Path, manifest: RunManifest, payload: Dict[str, Any]) -> Path:
    """Grava {"manifest": ..., **payload} com chaves ordenadas."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {"manifest": manifest.to_json(), **payload}
    path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n")
    return path


def reports_payload(reports: Iterable[TrapReport], reproducible: bool = False) -> Dict[str, Any]:
    return {"reports": [r.to_json(include_timing=not reproducible) for r in reports]}


def report_outcomes(reports: Iterable[TrapReport]) -> List[Dict[str, Any]]:
    return [
        {"task": f"{r.claim_id.value}:{r.map_name}:{r.p}", "holds": r.holds, "error": r.error}
        for r in reports
    ]


def reports_table(reports: Iterable[TrapReport], title: str = "Verificacoes") -> Table:
    table = Table(title=title)
    table.add_column("Mapa", style="cyan")
    table.add_column("p", justify="right")
    table.add_column("Afirmacao")
    table.add_column("Vale", justify="center")
    table.add_column("Indice", justify="right")
    table.add_column("Modo", style="dim")
    for r in reports:
        if r.error:
            status = "[red]ERRO[/red]"
        else:
            status = "[green]✓[/green]" if r.holds else "[red]✗[/red]"
        index = "-" if r.nilpotency_index is None else str(r.nilpotency_index)
        table.add_row(r.map_name, str(r.p), r.claim_id.value, status, index, r.mode)
    return table


def summary_table(summary: Dict[str, Any]) -> Table:
    table = Table(title="Grafo funcional", show_header=False)
    table.add_column("Campo", style="cyan")
    table.add_column("Valor")
    for key in ("map", "p", "size", "cycle_count", "cycle_spectrum", "max_tail_depth"):
        table.add_row(key, json.dumps(summary.get(key)))
    return table
