"""Validacao e leitura de entradas da linha de comando."""

from __future__ import annotations

import re
from typing import List, Sequence, Tuple

from polytrap.errors import DimensionMismatch, InvalidInput, NonPrimeModulus
from polytrap.modfield import is_prime, primes_in_range
from polytrap.poly import Point, PolyMap
from polytrap.utils import RunContext

_RANGE_RE = re.compile(r"^\s*(\d+)\s*\.\.\s*(\d+)\s*$")
_INT_RE = re.compile(r"^\s*(\d+)\s*$")


def parse_primes(text: str) -> List[int]:
    """Le listas e faixas de primos: "7", "2,3,5", "2..199", "3,10..20".

    Faixas sao filtradas pelo teste de primalidade; nao primos explicitos sao
    erro. Duplicatas sao removidas mantendo a primeira ocorrencia.
    """

    primes: List[int] = []
    for token in text.split(","):
        if not token.strip():
            continue
        match = _RANGE_RE.match(token)
        if match:
            lo, hi = int(match.group(1)), int(match.group(2))
            if lo > hi:
                raise InvalidInput(f"faixa vazia: {token.strip()}")
            primes.extend(primes_in_range(lo, hi))
            continue
        match = _INT_RE.match(token)
        if not match:
            raise InvalidInput(f"primo invalido: {token.strip()!r} (use 7, 2,3,5 ou 2..199)")
        value = int(match.group(1))
        if not is_prime(value):
            raise NonPrimeModulus(value)
        primes.append(value)
    return list(dict.fromkeys(primes))


def build_point(fmap: PolyMap, coords: Sequence[int], p: int) -> Point:
    if len(coords) != fmap.num_vars:
        raise DimensionMismatch(f"{len(coords)} coordenadas para mapa em {fmap.num_vars} variaveis")
    return Point.of(coords, p)


def check_plane_budget(p: int, num_vars: int, ctx: RunContext) -> Tuple[bool, str]:
    size = p ** num_vars
    if size > ctx.max_graph_points:
        return False, f"{size} pontos excede o orcamento de {ctx.max_graph_points}; use orbitas ou amostragem"
    return True, f"{size} pontos dentro do orcamento"
