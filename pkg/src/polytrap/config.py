"""Configuracao: valores padrao, variaveis de ambiente e arquivos YAML/JSON."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict

try:
    import yaml
    YAML_AVAILABLE = True
except ImportError:
    YAML_AVAILABLE = False

ENV_PREFIX = "POLYTRAP_"


def _env_bool(raw: str) -> bool:
    return raw.strip().lower() in {"1", "true", "yes", "sim", "on"}


@dataclass(frozen=True)
class Settings:
    """Parametros ajustaveis com seus padroes documentados."""

    max_graph_points: int = 1 << 28
    chunk_size: int = 1 << 16
    ext_enumeration_bound: int = 1 << 20
    coefficient_bound: int = (1 << 31) - 1
    exact_range_bound: int = (1 << 63) - 1
    sample_size: int = 1_000_000
    seed: int = 20240101
    jobs: int = 1
    sampled_fallback: bool = True

    @classmethod
    def from_env(cls, environ: Dict[str, str] | None = None) -> "Settings":
        """Sobrepoe os padroes com variaveis POLYTRAP_* (ex.: POLYTRAP_JOBS=8)."""
        environ = os.environ if environ is None else environ
        updates: Dict[str, Any] = {}
        for f in fields(cls):
            raw = environ.get(ENV_PREFIX + f.name.upper())
            if raw is None or raw == "":
                continue
            updates[f.name] = _env_bool(raw) if f.type in ("bool", bool) else int(raw)
        return replace(cls(), **updates)

    def merged(self, overrides: Dict[str, Any]) -> "Settings":
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise ValueError(f"Chaves de configuracao desconhecidas: {', '.join(sorted(unknown))}")
        return replace(self, **overrides)


class ConfigManager:
    """Gerencia configuracoes do polytrap via arquivo."""

    def __init__(self, config_path: str | Path | None = None):
        self.config_path = Path(config_path) if config_path else None
        self.config: Dict[str, Any] = {}
        if self.config_path and self.config_path.exists():
            self.load()

    def load(self) -> None:
        """Carrega configuracoes do arquivo."""
        if not self.config_path or not self.config_path.exists():
            return

        content = self.config_path.read_text()
        if self.config_path.suffix == ".json":
            data = json.loads(content)
        else:
            # .yaml, .yml, .cfg: todos sao mapas chave: valor em YAML
            if not YAML_AVAILABLE:
                raise ImportError("PyYAML nao instalado. Instale com: pip install pyyaml")
            data = yaml.safe_load(content)
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ValueError(f"Config em {self.config_path} deve ser um mapa chave: valor")
        self.config = data

    def get(self, key: str, default: Any = None) -> Any:
        """Obtem valor de configuracao (chaves pontuadas: 'search.primes')."""
        keys = key.split(".")
        value = self.config
        for k in keys:
            if isinstance(value, dict):
                value = value.get(k)
                if value is None:
                    return default
            else:
                return default
        return value if value is not None else default

    def get_section(self, section: str) -> Dict[str, Any]:
        """Secao do arquivo; um arquivo plano (sem secoes) vale como secao 'search'."""
        value = self.config.get(section)
        if isinstance(value, dict):
            return value
        if section == "search" and "settings" not in self.config and "search" not in self.config:
            return dict(self.config)
        return {}

    def settings(self, base: Settings | None = None) -> Settings:
        base = base or Settings.from_env()
        return base.merged(self.get_section("settings"))

    @classmethod
    def create_template(cls, output_path: str | Path) -> Path:
        """Cria template da configuracao de busca."""
        template = {
            "num_vars": 2,
            "max_degree": 4,
            "coefficient_range": [-2, 2],
            "max_terms": 2,
            "primes": [2, 3, 5, 7, 11, 13],
            "fixed_point_a": [0, 0],
            "fixed_point_b": [1, 0],
            "iteration_budget": None,
            "candidate_budget": 100000,
            "linear_bound": None,
        }

        path = Path(output_path)
        if path.suffix == ".json":
            content = json.dumps(template, indent=2)
        elif not YAML_AVAILABLE:
            path = path.with_suffix(".json")
            content = json.dumps(template, indent=2)
        else:
            header = (
                "# Configuracao da busca polytrap (mapa chave: valor)\n"
                "# fixed_point_a deve ter primeira coordenada 0; fixed_point_b, diferente de 0.\n"
                "# iteration_budget: maior iterado exigido por primo (null = tamanho do plano)\n"
                "# linear_bound: c opcional; marca primos com N(p) > c*p apenas no relatorio\n"
            )
            content = header + yaml.safe_dump(template, default_flow_style=None, sort_keys=False)

        path.write_text(content)
        return path
