"""Utilitarios compartilhados: logging, contexto de execucao e paralelismo."""

from __future__ import annotations

import logging
import os
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from logging.handlers import RotatingFileHandler
from multiprocessing import Pool
from pathlib import Path
from typing import Callable, Iterator, Optional, Sequence, TypeVar

from polytrap.config import Settings

# Configuracao de logging estruturado com rotacao para evitar inchar o disco
LOG_FILE = Path(os.environ.get("POLYTRAP_LOG_FILE", Path.home() / ".polytrap.log")).expanduser()
MAX_LOG_BYTES = int(os.environ.get("POLYTRAP_LOG_MAX_BYTES", 20 * 1024 * 1024))  # 20MB default
BACKUP_COUNT = int(os.environ.get("POLYTRAP_LOG_BACKUP_COUNT", 5))
STREAM_LEVEL = os.environ.get("POLYTRAP_LOG_LEVEL", "WARNING").upper()

logger = logging.getLogger("polytrap")
logger.setLevel(logging.INFO)


def _build_file_handler() -> Optional[RotatingFileHandler]:
    """Cria handler rotativo; sem handler quando o arquivo nao pode ser aberto."""
    try:
        LOG_FILE.parent.mkdir(parents=True, exist_ok=True)
        return RotatingFileHandler(LOG_FILE, maxBytes=MAX_LOG_BYTES, backupCount=BACKUP_COUNT)
    except OSError:
        return None


file_handler = _build_file_handler()
stream_handler = logging.StreamHandler()
stream_handler.setLevel(getattr(logging, STREAM_LEVEL, logging.WARNING))

formatter = logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
stream_handler.setFormatter(formatter)

logger.handlers.clear()
if file_handler is not None:
    file_handler.setFormatter(formatter)
    logger.addHandler(file_handler)
logger.addHandler(stream_handler)
logger.propagate = False


def active_log_file() -> Optional[Path]:
    if file_handler is None:
        return None
    return Path(getattr(file_handler, "baseFilename", LOG_FILE))


def available_log_files() -> list[Path]:
    base = active_log_file()
    if base is None:
        return []
    pattern = base.name + "*"
    return [p for p in sorted(base.parent.glob(pattern)) if p.is_file()]


@dataclass
class RunContext:
    """Contexto de execucao compartilhado entre verificadores, grafos e busca."""

    jobs: int = 1
    seed: int = 20240101
    max_graph_points: int = 1 << 28
    chunk_size: int = 1 << 16
    ext_enumeration_bound: int = 1 << 20
    coefficient_bound: int = (1 << 31) - 1
    exact_range_bound: int = (1 << 63) - 1
    sample_size: int = 1_000_000
    sampled_fallback: bool = True
    force_sampled: bool = False
    stream_plane: bool = False
    reproducible: bool = False
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @classmethod
    def from_settings(cls, settings: Settings, **overrides) -> "RunContext":
        values = dict(
            jobs=settings.jobs,
            seed=settings.seed,
            max_graph_points=settings.max_graph_points,
            chunk_size=settings.chunk_size,
            ext_enumeration_bound=settings.ext_enumeration_bound,
            coefficient_bound=settings.coefficient_bound,
            exact_range_bound=settings.exact_range_bound,
            sample_size=settings.sample_size,
            sampled_fallback=settings.sampled_fallback,
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


T = TypeVar("T")
R = TypeVar("R")


def run_parallel(fn: Callable[[T], R], items: Sequence[T], jobs: int = 1) -> list[R]:
    """Aplica `fn` a cada item preservando a ordem de entrada.

    Com `jobs > 1` usa um `multiprocessing.Pool`; `fn` deve ser funcao de topo
    de modulo (picklable).
    """

    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    workers = min(jobs, len(items))
    logger.debug(f"run_parallel: {len(items)} tarefas em {workers} workers")
    with Pool(workers) as pool:
        return pool.map(fn, items)


@contextmanager
def stopwatch() -> Iterator[Callable[[], float]]:
    """Mede tempo de parede; o callable devolve segundos decorridos."""

    start = time.perf_counter()
    end: list[float] = []
    try:
        yield lambda: (end[0] if end else time.perf_counter()) - start
    finally:
        end.append(time.perf_counter())
