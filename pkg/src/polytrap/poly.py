"""Polinomios inteiros multivariados esparsos e mapas polinomiais.

Forma canonica: termos ordenados por grau total decrescente e, dentro do mesmo
grau, por vetor de expoentes lexicografico decrescente (ordem graded-lex);
sem coeficientes nulos e sem expoentes repetidos. O polinomio zero tem lista
de termos vazia e grau 0 por convencao.

Gramatica aceita por `parse`:

    expr   := term (('+' | '-') term)*
    term   := unary ('*' unary)*
    unary  := ('+' | '-') unary | power
    power  := atom (('^' | '**') INT)?
    atom   := INT | VAR | '(' expr ')'

VAR e x1..xn; para n <= 2 tambem x (= x1) e y (= x2).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from polytrap.errors import (
    CoefficientOverflow,
    DimensionMismatch,
    ExactRangeExceeded,
    PolySyntaxError,
    UnknownMap,
    VariableIndexError,
)

DEFAULT_COEFFICIENT_BOUND = (1 << 31) - 1
DEFAULT_EXACT_BOUND = (1 << 63) - 1
MAX_EXPONENT = 256
# (p-1)^2 precisa caber em int64 na avaliacao vetorizada
MAX_VECTOR_MODULUS = 1 << 31

Exponents = Tuple[int, ...]


@dataclass(frozen=True)
class Monomial:
    exponents: Exponents
    coefficient: int

    @property
    def degree(self) -> int:
        return sum(self.exponents)


def _grlex_key(exponents: Exponents) -> Tuple[int, Exponents]:
    return (sum(exponents), exponents)


@dataclass(frozen=True)
class Polynomial:
    num_vars: int
    terms: Tuple[Monomial, ...] = ()

    @classmethod
    def from_dict(cls, num_vars: int, coeffs: Mapping[Exponents, int]) -> "Polynomial":
        """Canonicaliza um mapa {expoentes: coeficiente}."""
        if num_vars < 1:
            raise ValueError("num_vars deve ser positivo")
        for exps in coeffs:
            if len(exps) != num_vars:
                raise DimensionMismatch(f"expoentes {exps} nao tem {num_vars} entradas")
        ordered = sorted((e for e, c in coeffs.items() if c != 0), key=_grlex_key, reverse=True)
        return cls(num_vars, tuple(Monomial(tuple(e), int(coeffs[e])) for e in ordered))

    @classmethod
    def constant(cls, num_vars: int, value: int) -> "Polynomial":
        return cls.from_dict(num_vars, {(0,) * num_vars: value})

    @classmethod
    def variable(cls, num_vars: int, index: int) -> "Polynomial":
        exps = tuple(1 if i == index else 0 for i in range(num_vars))
        return cls.from_dict(num_vars, {exps: 1})

    def as_dict(self) -> Dict[Exponents, int]:
        return {t.exponents: t.coefficient for t in self.terms}

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((t.degree for t in self.terms), default=0)

    def _same_ring(self, other: "Polynomial") -> None:
        if self.num_vars != other.num_vars:
            raise DimensionMismatch(f"{self.num_vars} variaveis != {other.num_vars}")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._same_ring(other)
        acc = self.as_dict()
        for t in other.terms:
            acc[t.exponents] = acc.get(t.exponents, 0) + t.coefficient
        return Polynomial.from_dict(self.num_vars, acc)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.num_vars, tuple(Monomial(t.exponents, -t.coefficient) for t in self.terms))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._same_ring(other)
        acc: Dict[Exponents, int] = {}
        for a in self.terms:
            for b in other.terms:
                exps = tuple(x + y for x, y in zip(a.exponents, b.exponents))
                acc[exps] = acc.get(exps, 0) + a.coefficient * b.coefficient
        return Polynomial.from_dict(self.num_vars, acc)

    def __pow__(self, e: int) -> "Polynomial":
        result = Polynomial.constant(self.num_vars, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def max_abs_coefficient(self) -> int:
        return max((abs(t.coefficient) for t in self.terms), default=0)

    def __str__(self) -> str:
        return format_polynomial(self)


def variable_names(num_vars: int) -> List[str]:
    if num_vars == 1:
        return ["x"]
    if num_vars == 2:
        return ["x", "y"]
    return [f"x{i}" for i in range(1, num_vars + 1)]


def format_polynomial(poly: Polynomial) -> str:
    """Impressora canonica; `parse(str(f), n) == f`."""
    if poly.is_zero():
        return "0"
    names = variable_names(poly.num_vars)
    out = []
    for i, term in enumerate(poly.terms):
        factors = []
        for name, e in zip(names, term.exponents):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        magnitude = abs(term.coefficient)
        if not factors:
            body = str(magnitude)
        elif magnitude == 1:
            body = "*".join(factors)
        else:
            body = "*".join([str(magnitude)] + factors)
        sign = "-" if term.coefficient < 0 else "+"
        if i == 0:
            out.append(body if sign == "+" else f"-{body}")
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


# ============================================================================
# Parser
# ============================================================================

_TOKEN_RE = re.compile(r"\s*(?:(?P<int>\d+)|(?P<var>[A-Za-z_]\w*)|(?P<op>\*\*|[-+*^()]))")


class _Parser:
    def __init__(self, text: str, num_vars: int, coefficient_bound: int):
        self.text = text
        self.num_vars = num_vars
        self.bound = coefficient_bound
        self.tokens: List[Tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            match = _TOKEN_RE.match(text, pos)
            if match is None or match.end() == pos:
                raise PolySyntaxError(f"caractere inesperado {text[pos]!r}", pos, text)
            kind = match.lastgroup or ""
            start = match.start(kind)
            self.tokens.append((kind, match.group(kind), start))
            pos = match.end()
        self.index = 0

    def _peek(self) -> Optional[Tuple[str, str, int]]:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def _position(self) -> int:
        tok = self._peek()
        return tok[2] if tok else len(self.text)

    def _accept(self, *ops: str) -> Optional[str]:
        tok = self._peek()
        if tok and tok[0] == "op" and tok[1] in ops:
            self.index += 1
            return tok[1]
        return None

    def parse(self) -> Polynomial:
        if not self.tokens:
            raise PolySyntaxError("expressao vazia", 0, self.text)
        result = self._expr()
        if self._peek() is not None:
            raise PolySyntaxError(f"token inesperado {self._peek()[1]!r}", self._position(), self.text)
        return result

    def _expr(self) -> Polynomial:
        result = self._term()
        while True:
            op = self._accept("+", "-")
            if op is None:
                return result
            rhs = self._term()
            result = result + rhs if op == "+" else result - rhs

    def _term(self) -> Polynomial:
        result = self._unary()
        while self._accept("*"):
            result = result * self._unary()
        return result

    def _unary(self) -> Polynomial:
        op = self._accept("+", "-")
        if op == "-":
            return -self._unary()
        if op == "+":
            return self._unary()
        return self._power()

    def _power(self) -> Polynomial:
        base = self._atom()
        if self._accept("^", "**"):
            tok = self._peek()
            if tok is None or tok[0] != "int":
                raise PolySyntaxError("expoente inteiro nao negativo esperado", self._position(), self.text)
            self.index += 1
            e = int(tok[1])
            if e > MAX_EXPONENT:
                raise PolySyntaxError(f"expoente {e} acima de {MAX_EXPONENT}", tok[2], self.text)
            return base ** e
        return base

    def _atom(self) -> Polynomial:
        tok = self._peek()
        if tok is None:
            raise PolySyntaxError("fim inesperado da expressao", len(self.text), self.text)
        kind, value, pos = tok
        if kind == "int":
            self.index += 1
            number = int(value)
            if number > self.bound:
                raise CoefficientOverflow(f"coeficiente {number} excede o limite {self.bound} (posicao {pos})")
            return Polynomial.constant(self.num_vars, number)
        if kind == "var":
            self.index += 1
            return Polynomial.variable(self.num_vars, self._variable_index(value, pos))
        if self._accept("("):
            inner = self._expr()
            if not self._accept(")"):
                raise PolySyntaxError("')' esperado", self._position(), self.text)
            return inner
        raise PolySyntaxError(f"token inesperado {value!r}", pos, self.text)

    def _variable_index(self, name: str, pos: int) -> int:
        aliases = {"x": 0, "y": 1} if self.num_vars <= 2 else {}
        if name in aliases:
            index = aliases[name]
        else:
            match = re.fullmatch(r"x(\d+)", name)
            if match is None:
                raise VariableIndexError(f"variavel desconhecida {name!r} (posicao {pos})")
            index = int(match.group(1)) - 1
        if not 0 <= index < self.num_vars:
            raise VariableIndexError(f"variavel {name!r} fora de x1..x{self.num_vars} (posicao {pos})")
        return index


def parse(text: str, num_vars: int, *, coefficient_bound: int = DEFAULT_COEFFICIENT_BOUND) -> Polynomial:
    """Le um polinomio e devolve sua forma canonica, expandindo produtos."""
    if num_vars < 1:
        raise ValueError("num_vars deve ser positivo")
    poly = _Parser(text, num_vars, coefficient_bound).parse()
    if poly.max_abs_coefficient() > coefficient_bound:
        raise CoefficientOverflow(
            f"coeficiente {poly.max_abs_coefficient()} de {text!r} excede o limite {coefficient_bound}"
        )
    return poly


# ============================================================================
# Pontos e avaliacao
# ============================================================================


@dataclass(frozen=True)
class Point:
    coords: Tuple[int, ...]
    modulus: int

    def __post_init__(self):
        for c in self.coords:
            if not 0 <= c < self.modulus:
                raise ValueError(f"coordenada {c} nao reduzida modulo {self.modulus}")

    @classmethod
    def of(cls, coords: Iterable[int], modulus: int) -> "Point":
        return cls(tuple(int(c) % modulus for c in coords), modulus)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.coords) + ")"


def evaluate_mod(poly: Polynomial, point: Point) -> int:
    if len(point.coords) != poly.num_vars:
        raise DimensionMismatch(f"ponto com {len(point.coords)} coordenadas para {poly.num_vars} variaveis")
    p = point.modulus
    total = 0
    for term in poly.terms:
        value = term.coefficient % p
        for c, e in zip(point.coords, term.exponents):
            if e:
                value = value * pow(c, e, p) % p
        total += value
    return total % p


def evaluate_int(poly: Polynomial, coords: Sequence[int], *, bound: int = DEFAULT_EXACT_BOUND) -> int:
    """Avaliacao inteira exata; `ExactRangeExceeded` se algum valor passa de `bound`."""
    if len(coords) != poly.num_vars:
        raise DimensionMismatch(f"ponto com {len(coords)} coordenadas para {poly.num_vars} variaveis")
    total = 0
    for term in poly.terms:
        value = term.coefficient
        for c, e in zip(coords, term.exponents):
            value *= c ** e
            if abs(value) > bound:
                raise ExactRangeExceeded(f"termo excede {bound} em {tuple(coords)}")
        total += value
        if abs(total) > bound:
            raise ExactRangeExceeded(f"valor excede {bound} em {tuple(coords)}")
    return total


def evaluate_mod_vectorized(poly: Polynomial, coords: Sequence[np.ndarray], p: int) -> np.ndarray:
    """Avalia em arrays de residuos (int64) de uma vez; resultado reduzido em [0, p)."""
    if len(coords) != poly.num_vars:
        raise DimensionMismatch(f"{len(coords)} arrays para {poly.num_vars} variaveis")
    if p >= MAX_VECTOR_MODULUS:
        raise ValueError(f"modulo {p} grande demais para avaliacao int64")
    shape = np.shape(coords[0])
    total = np.zeros(shape, dtype=np.int64)
    powers: Dict[Tuple[int, int], np.ndarray] = {}

    def power(var: int, e: int) -> np.ndarray:
        key = (var, e)
        if key not in powers:
            if e == 1:
                powers[key] = np.asarray(coords[var], dtype=np.int64) % p
            else:
                half = power(var, e // 2)
                sq = half * half % p
                powers[key] = sq * power(var, 1) % p if e % 2 else sq
        return powers[key]

    for term in poly.terms:
        value = np.full(shape, term.coefficient % p, dtype=np.int64)
        for var, e in enumerate(term.exponents):
            if e:
                value = value * power(var, e) % p
        total = (total + value) % p
    return total


# ============================================================================
# Mapas polinomiais
# ============================================================================


@dataclass(frozen=True)
class PolyMap:
    num_vars: int
    components: Tuple[Polynomial, ...]
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.components) != self.num_vars:
            raise DimensionMismatch(f"{len(self.components)} componentes para {self.num_vars} variaveis")
        for comp in self.components:
            if comp.num_vars != self.num_vars:
                raise DimensionMismatch(f"componente em {comp.num_vars} variaveis num mapa de {self.num_vars}")

    @classmethod
    def from_texts(cls, texts: Sequence[str], name: Optional[str] = None, **kwargs) -> "PolyMap":
        n = len(texts)
        return cls(n, tuple(parse(t, n, **kwargs) for t in texts), name)

    @classmethod
    def identity(cls, num_vars: int) -> "PolyMap":
        return cls(num_vars, tuple(Polynomial.variable(num_vars, i) for i in range(num_vars)), "identity")

    def degree(self) -> int:
        return max((c.degree() for c in self.components), default=0)

    def label(self) -> str:
        return self.name or "(" + ", ".join(str(c) for c in self.components) + ")"

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.components) + ")"


def map_evaluate(fmap: PolyMap, point: Point) -> Point:
    if len(point.coords) != fmap.num_vars:
        raise DimensionMismatch(f"ponto com {len(point.coords)} coordenadas para mapa em {fmap.num_vars} variaveis")
    return Point(tuple(evaluate_mod(c, point) for c in fmap.components), point.modulus)


def map_evaluate_int(fmap: PolyMap, coords: Sequence[int], *, bound: int = DEFAULT_EXACT_BOUND) -> Tuple[int, ...]:
    return tuple(evaluate_int(c, coords, bound=bound) for c in fmap.components)


def map_evaluate_vectorized(fmap: PolyMap, coords: Sequence[np.ndarray], p: int) -> List[np.ndarray]:
    return [evaluate_mod_vectorized(c, coords, p) for c in fmap.components]


def degree(poly: Polynomial) -> int:
    return poly.degree()


def is_homogeneous(fmap: PolyMap) -> bool:
    """Todos os termos de todas as componentes com o mesmo grau total.

    Componentes nulas nao restringem o grau comum.
    """
    degrees = {t.degree for comp in fmap.components for t in comp.terms}
    return len(degrees) <= 1


# ============================================================================
# Mapas embutidos
# ============================================================================

BUILTIN_MAPS: Dict[str, Tuple[str, str]] = {
    "additive_trap": ("x^2*y", "x^2*y + x*y^2"),
    "multiplicative_trap": ("x^2*y*(x-y)", "2*x*y^2*(x-y)"),
    "power_trap": ("x^3*y*(x-y)", "x*y^3*(x-y)"),
}

MAP_ALIASES: Dict[str, str] = {
    "at": "additive_trap",
    "mt": "multiplicative_trap",
    "pt": "power_trap",
    "additive-trap": "additive_trap",
    "multiplicative-trap": "multiplicative_trap",
    "power-trap": "power_trap",
}


def canonical_map_name(name: str) -> str:
    key = MAP_ALIASES.get(name, name)
    if key not in BUILTIN_MAPS:
        raise UnknownMap(f"mapa desconhecido {name!r}; opcoes: {', '.join(BUILTIN_MAPS)}")
    return key


def builtin(name: str) -> PolyMap:
    key = canonical_map_name(name)
    return PolyMap.from_texts(BUILTIN_MAPS[key], name=key)


def load_map_file(path: str | Path, *, coefficient_bound: int = DEFAULT_COEFFICIENT_BOUND) -> PolyMap:
    """Uma componente por linha; linhas vazias e comentarios '#' ignorados."""
    path = Path(path)
    lines = []
    for raw in path.read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise DimensionMismatch(f"{path} nao contem componentes")
    return PolyMap.from_texts(lines, name=path.stem, coefficient_bound=coefficient_bound)


def resolve_map(spec: str, *, coefficient_bound: int = DEFAULT_COEFFICIENT_BOUND) -> PolyMap:
    """Nome embutido ou caminho de arquivo de mapa."""
    if MAP_ALIASES.get(spec, spec) in BUILTIN_MAPS:
        return builtin(spec)
    if Path(spec).is_file():
        return load_map_file(spec, coefficient_bound=coefficient_bound)
    raise UnknownMap(f"{spec!r} nao e mapa embutido ({', '.join(BUILTIN_MAPS)}) nem arquivo")
