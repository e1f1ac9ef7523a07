"""Teoria dos numeros modular e corpos finitos pequenos GF(p^k).

Convencoes:
    - 0^0 = 1 em `mod_pow`.
    - Primalidade por divisao por tentativa ate sqrt(p); modulos compostos
      levantam `NonPrimeModulus` em toda a API que exige primo.
    - O modulo de uma extensao e guardado como tupla de coeficientes do grau 0
      ao grau k (monico, ultimo coeficiente 1).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import isqrt
from typing import TYPE_CHECKING, Dict, Iterator, List, Optional, Sequence, Tuple

from polytrap.errors import (
    DimensionMismatch,
    FieldMismatch,
    InvalidExtensionDegree,
    NonPrimeModulus,
    ReduciblePolynomial,
    SizeBoundExceeded,
    ZeroArgument,
    ZeroInverse,
)

if TYPE_CHECKING:
    from polytrap.poly import Polynomial

DEFAULT_EXT_BOUND = 1 << 20


# ============================================================================
# Aritmetica em Z/pZ
# ============================================================================


@lru_cache(maxsize=4096)
def is_prime(n: int) -> bool:
    """Teste deterministico por divisao por tentativa."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def require_prime(p: int) -> int:
    if not is_prime(p):
        raise NonPrimeModulus(p)
    return p


def primes_in_range(lo: int, hi: int) -> List[int]:
    """Primos em [lo, hi], em ordem crescente."""
    return [n for n in range(max(lo, 2), hi + 1) if is_prime(n)]


def mod_pow(a: int, e: int, p: int) -> int:
    """a^e mod p por quadrados sucessivos (0^0 = 1)."""
    if e < 0:
        raise ValueError("expoente negativo")
    result = 1 % p
    base = a % p
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


def mod_inv(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroInverse(f"0 nao e invertivel modulo {p}")
    return pow(a, -1, p)


def factorize(n: int) -> Dict[int, int]:
    """Fatoracao por divisao por tentativa: {primo: expoente}."""
    if n < 1:
        raise ValueError(f"fatoracao indefinida para {n}")
    factors: Dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def euler_phi(n: int) -> int:
    result = n
    for q in factorize(n):
        result = result // q * (q - 1)
    return result


@lru_cache(maxsize=1024)
def _group_order_factors(p: int) -> Tuple[Tuple[int, int], ...]:
    return tuple(sorted(factorize(p - 1).items()))


def mult_order(a: int, p: int) -> int:
    """Menor m >= 1 com a^m = 1 (mod p), descendo pelos divisores de p-1."""
    require_prime(p)
    a %= p
    if a == 0:
        raise ZeroArgument(f"0 nao pertence a (Z/{p}Z)^*")
    m = p - 1
    for q, _ in _group_order_factors(p):
        while m % q == 0 and mod_pow(a, m // q, p) == 1:
            m //= q
    return m


def is_primitive_root(a: int, p: int) -> bool:
    return mult_order(a, p) == p - 1


def is_two_primary(n: int) -> bool:
    """n e potencia de 2 (incluindo 2^0 = 1)."""
    if n < 1:
        raise ValueError(f"ordem invalida: {n}")
    return n & (n - 1) == 0


def two_adic_valuation(n: int) -> int:
    if n == 0:
        raise ValueError("valuacao 2-adica de 0 e infinita")
    return (n & -n).bit_length() - 1


def fermat_exponent(p: int) -> Optional[int]:
    """k com p = 2^k + 1, ou None."""
    m = p - 1
    if m >= 1 and is_two_primary(m):
        return m.bit_length() - 1
    return None


def subgroup_generated(a: int, p: int) -> frozenset:
    """<a> em (Z/pZ)^*, por multiplicacao repetida."""
    require_prime(p)
    a %= p
    if a == 0:
        raise ZeroArgument(f"0 nao gera subgrupo de (Z/{p}Z)^*")
    elements = {1}
    x = a
    while x != 1:
        elements.add(x)
        x = x * a % p
    return frozenset(elements)


# ============================================================================
# Polinomios densos sobre F_p (coeficientes do grau 0 para cima)
# ============================================================================


def _trim(coeffs: Sequence[int]) -> List[int]:
    out = list(coeffs)
    while out and out[-1] == 0:
        out.pop()
    return out


def _poly_mod(num: Sequence[int], den: Sequence[int], p: int) -> List[int]:
    """Resto de num / den em F_p[t]; den monico."""
    rem = [c % p for c in num]
    k = len(den) - 1
    for i in range(len(rem) - 1, k - 1, -1):
        c = rem[i]
        if c:
            shift = i - k
            for j, d in enumerate(den):
                rem[shift + j] = (rem[shift + j] - c * d) % p
    return _trim(rem[:k])


def _monic_polys(p: int, degree: int) -> Iterator[Tuple[int, ...]]:
    """Monicos de grau dado em ordem lexicografica de (c_{k-1}, ..., c_0)."""
    for high_first in itertools.product(range(p), repeat=degree):
        yield tuple(reversed(high_first)) + (1,)


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Verificacao exaustiva: nenhum fator monico de grau 1..k/2."""
    k = len(modulus) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    for d in range(1, k // 2 + 1):
        for candidate in _monic_polys(p, d):
            if not _poly_mod(modulus, candidate, p):
                return False
    return True


def format_poly_t(coeffs: Sequence[int]) -> str:
    """Imprime coeficientes (grau 0 para cima) na variavel t, ex.: t^2+t+1."""
    parts = []
    for e in range(len(coeffs) - 1, -1, -1):
        c = coeffs[e]
        if c == 0:
            continue
        if e == 0:
            parts.append(str(c))
            continue
        mono = "t" if e == 1 else f"t^{e}"
        parts.append(mono if c == 1 else f"{c}*{mono}")
    return "+".join(parts) if parts else "0"


# ============================================================================
# GF(p^k)
# ============================================================================


@dataclass(frozen=True)
class ExtField:
    """GF(p^k) = F_p[t] / (modulus)."""

    p: int
    k: int
    modulus: Tuple[int, ...]

    @property
    def size(self) -> int:
        return self.p ** self.k

    def zero(self) -> "ExtElement":
        return ExtElement((0,) * self.k, self)

    def one(self) -> "ExtElement":
        return self.element((1,))

    def generator_t(self) -> "ExtElement":
        """Classe de t (para k = 1, t = -c_0)."""
        return self.element((0, 1))

    def element(self, coeffs: Sequence[int]) -> "ExtElement":
        """Elemento a partir de coeficientes (grau 0 para cima), reduzindo."""
        reduced = _poly_mod(list(coeffs), self.modulus, self.p)
        return ExtElement(tuple(reduced) + (0,) * (self.k - len(reduced)), self)

    def from_int(self, value: int) -> "ExtElement":
        return self.element((value % self.p,))

    def element_of_index(self, index: int) -> "ExtElement":
        """Indice em base p, coeficiente de grau 0 menos significativo."""
        coeffs = []
        for _ in range(self.k):
            index, c = divmod(index, self.p)
            coeffs.append(c)
        return ExtElement(tuple(coeffs), self)

    def index_of(self, element: "ExtElement") -> int:
        index = 0
        for c in reversed(element.coeffs):
            index = index * self.p + c
        return index

    def elements(self) -> Iterator["ExtElement"]:
        for i in range(self.size):
            yield self.element_of_index(i)

    def __str__(self) -> str:
        return f"GF({self.p}^{self.k}) mod {format_poly_t(self.modulus)}"


@dataclass(frozen=True)
class ExtElement:
    coeffs: Tuple[int, ...]
    field: ExtField

    def _check(self, other: "ExtElement") -> None:
        if self.field != other.field:
            raise FieldMismatch(f"{self.field} != {other.field}")

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __add__(self, other: "ExtElement") -> "ExtElement":
        return ext_add(self, other)

    def __sub__(self, other: "ExtElement") -> "ExtElement":
        self._check(other)
        p = self.field.p
        return ExtElement(tuple((a - b) % p for a, b in zip(self.coeffs, other.coeffs)), self.field)

    def __neg__(self) -> "ExtElement":
        p = self.field.p
        return ExtElement(tuple((-a) % p for a in self.coeffs), self.field)

    def __mul__(self, other: "ExtElement") -> "ExtElement":
        return ext_mul(self, other)

    def __pow__(self, e: int) -> "ExtElement":
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> "ExtElement":
        if self.is_zero():
            raise ZeroInverse(f"0 nao e invertivel em {self.field}")
        return self ** (self.field.size - 2)

    def order(self) -> int:
        if self.is_zero():
            raise ZeroArgument("0 nao tem ordem multiplicativa")
        one = self.field.one()
        group = self.field.size - 1
        m = group
        for q in (factorize(group) if group > 1 else {}):
            while m % q == 0 and self ** (m // q) == one:
                m //= q
        return m

    def __str__(self) -> str:
        return format_poly_t(self.coeffs)


def ext_add(a: ExtElement, b: ExtElement) -> ExtElement:
    a._check(b)
    p = a.field.p
    return ExtElement(tuple((x + y) % p for x, y in zip(a.coeffs, b.coeffs)), a.field)


def ext_mul(a: ExtElement, b: ExtElement) -> ExtElement:
    a._check(b)
    field = a.field
    product = [0] * (2 * field.k - 1)
    for i, x in enumerate(a.coeffs):
        if x:
            for j, y in enumerate(b.coeffs):
                product[i + j] += x * y
    return field.element(product)


def ext_eval_poly(f: "Polynomial", point: Sequence[ExtElement]) -> ExtElement:
    """Avalia polinomio inteiro (coeficientes reduzidos mod p) em GF(p^k)^n."""
    if len(point) != f.num_vars:
        raise DimensionMismatch(f"ponto com {len(point)} coordenadas para {f.num_vars} variaveis")
    field = point[0].field
    for coord in point[1:]:
        coord._check(point[0])
    total = field.zero()
    for term in f.terms:
        value = field.from_int(term.coefficient)
        for coord, e in zip(point, term.exponents):
            if e:
                value = value * coord ** e
        total = total + value
    return total


def make_ext_field(
    p: int,
    k: int,
    modulus: Optional[Sequence[int]] = None,
    *,
    bound: int = DEFAULT_EXT_BOUND,
) -> ExtField:
    """Constroi GF(p^k), escolhendo o menor monico irredutivel quando omitido.

    A ordem "menor" compara (c_{k-1}, ..., c_0) lexicograficamente; para k = 1
    isso da o modulo t.
    """

    require_prime(p)
    if k < 1:
        raise InvalidExtensionDegree(f"grau de extensao invalido: {k}")
    if p ** k > bound:
        raise SizeBoundExceeded(f"GF({p}^{k}) excede o limite de enumeracao", p ** k, bound)
    if modulus is not None:
        coeffs = tuple(c % p for c in modulus)
        if len(coeffs) != k + 1 or coeffs[-1] != 1:
            raise ReduciblePolynomial(f"modulo {format_poly_t(coeffs)} nao e monico de grau {k}")
        if not is_irreducible(coeffs, p):
            raise ReduciblePolynomial(f"{format_poly_t(coeffs)} e redutivel sobre F_{p}")
        return ExtField(p, k, coeffs)
    for candidate in _monic_polys(p, k):
        if is_irreducible(candidate, p):
            return ExtField(p, k, candidate)
    raise ReduciblePolynomial(f"nenhum irredutivel de grau {k} sobre F_{p}")  # inalcancavel


def parse_modulus(text: str, p: int, k: int) -> Tuple[int, ...]:
    """Le um modulo escrito em t (ex.: 't^2+t+1') como tupla de coeficientes."""
    from polytrap.poly import parse

    poly = parse(text.replace("t", "x"), 1)
    coeffs = [0] * (poly.degree() + 1)
    for term in poly.terms:
        coeffs[term.exponents[0]] = term.coefficient % p
    if len(coeffs) != k + 1:
        raise ReduciblePolynomial(f"modulo {text} nao tem grau {k}")
    return tuple(coeffs)
