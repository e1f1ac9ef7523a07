"""Hierarquia de excecoes do polytrap.

Todo erro levantado pela biblioteca herda de `PolytrapError`; o CLI traduz
cada familia para um codigo de saida (ver `polytrap.cli`).
"""

from __future__ import annotations

from typing import Optional, Sequence


class PolytrapError(Exception):
    """Erro base do pacote."""

    pass


class InvalidInput(PolytrapError):
    """Entrada invalida fornecida pelo usuario (codigo de saida 2)."""

    pass


class PolySyntaxError(InvalidInput):
    """Texto de polinomio fora da gramatica."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.message = message
        self.text = text
        super().__init__(f"{message} (posicao {position})")

    def __reduce__(self):
        return (type(self), (self.message, self.position, self.text))


class VariableIndexError(InvalidInput):
    """Variavel fora do intervalo x1..xn."""

    pass


class CoefficientOverflow(InvalidInput):
    """Coeficiente excede o limite configurado."""

    pass


class DimensionMismatch(InvalidInput):
    """Numero de coordenadas incompativel com o numero de variaveis."""

    pass


class UnknownMap(InvalidInput):
    """Nome de mapa embutido desconhecido."""

    pass


class InvalidExtensionDegree(InvalidInput):
    """Grau k < 1 para GF(p^k)."""

    pass


class NonPrimeModulus(InvalidInput):
    """Modulo informado nao e primo."""

    def __init__(self, modulus: int):
        self.modulus = modulus
        super().__init__(f"{modulus} is not prime")

    def __reduce__(self):
        return (type(self), (self.modulus,))


class InvalidConfig(InvalidInput):
    """Configuracao de busca inconsistente."""

    pass


class ZeroInverse(PolytrapError):
    """Inverso de zero solicitado."""

    pass


class ZeroArgument(PolytrapError):
    """Argumento zero onde o grupo multiplicativo e exigido."""

    pass


class ReduciblePolynomial(InvalidInput):
    """Polinomio modulo de extensao nao e irredutivel."""

    pass


class FieldMismatch(PolytrapError):
    """Elementos de corpos diferentes combinados."""

    pass


class SizeBoundExceeded(PolytrapError):
    """Enumeracao excede o orcamento de memoria/tamanho (codigo de saida 3)."""

    def __init__(self, message: str, size: int, bound: int):
        self.size = size
        self.message = message
        self.bound = bound
        super().__init__(f"{message}: {size} pontos > limite {bound}")

    def __reduce__(self):
        return (type(self), (self.message, self.size, self.bound))


class BudgetExceeded(PolytrapError):
    """Ciclo nao fechado dentro do numero maximo de passos."""

    def __init__(self, max_steps: int):
        self.max_steps = max_steps
        super().__init__(f"ciclo nao fechado em {max_steps} passos")

    def __reduce__(self):
        return (type(self), (self.max_steps,))


class TargetNotFixed(PolytrapError):
    """Ponto alvo nao e ponto fixo do mapa."""

    def __init__(self, target: Sequence[int], image: Optional[Sequence[int]] = None):
        self.target = tuple(target)
        self.image = tuple(image) if image is not None else None
        super().__init__(f"alvo {self.target} nao e fixo (imagem {self.image})")

    def __reduce__(self):
        return (type(self), (self.target, self.image))


class ExactRangeExceeded(PolytrapError):
    """Avaliacao inteira exata ultrapassou a faixa permitida."""

    pass


class NotFixedModP(PolytrapError):
    """Ponto declarado fixo se move modulo p."""

    def __init__(self, point: Sequence[int], p: int):
        self.point = tuple(point)
        self.p = p
        super().__init__(f"ponto {self.point} nao e fixo modulo {p}")

    def __reduce__(self):
        return (type(self), (self.point, self.p))
