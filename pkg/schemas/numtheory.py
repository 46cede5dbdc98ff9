from pydantic import BaseModel, Field, model_validator
from typing import List, Tuple
from math import prod


class Factorization(BaseModel):
    value: int = Field(..., ge=1)
    factors: List[Tuple[int, int]] = Field(default_factory=list)

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def check_factors(self):
        from core.numtheory import is_probable_prime

        previous = 1
        for prime, multiplicity in self.factors:
            if prime <= previous:
                raise ValueError("primes must be strictly increasing")
            if multiplicity < 1:
                raise ValueError(f"multiplicity of {prime} must be positive")
            if not is_probable_prime(prime):
                raise ValueError(f"{prime} is not prime")
            previous = prime
        if prod(p ** e for p, e in self.factors) != self.value:
            raise ValueError(f"factors do not multiply to {self.value}")
        return self

    @property
    def primes(self) -> List[int]:
        return [p for p, _ in self.factors]


class GrowthReport(BaseModel):
    limit: int
    exponent: float
    constant: float
    argmax: int


class MertensRow(BaseModel):
    n: int
    value: float
    main_term: float
    deviation: float
    scaled: float | None = None
