"""Exception types shared across the package."""

from __future__ import annotations


class PermLikeError(Exception):
    pass


class NotAUnitError(PermLikeError, ValueError):
    pass


class NotInvariantError(PermLikeError, ValueError):
    pass


class NonRationalSpectrumError(PermLikeError):
    """Primitive k-th roots of unity appear with unequal multiplicities."""

    def __init__(self, k: int, message: str = "char poly not rational"):
        super().__init__(f"{message} (witness: primitive {k}-th roots)")
        self.k = k


class NotPermutationSpectrumError(PermLikeError):
    """Mobius inversion produced a negative cycle count."""

    def __init__(self, length: int, count: int):
        super().__init__(f"not a permutation spectrum (c_{length} = {count})")
        self.length = length
        self.count = count


class SplitHypothesisError(PermLikeError):
    def __init__(self, message: str):
        super().__init__(f"split lemma hypothesis failed: {message}")


class CertificationError(PermLikeError):
    """A theorem-predicted assertion failed: a potential counterexample."""

    def __init__(self, case: int | str, message: str, witness: dict | None = None):
        super().__init__(f"case {case}: {message}")
        self.case = case
        self.witness = witness or {}
