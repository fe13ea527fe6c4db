"""Abstract Bianchi form interface."""
import copy
from abc import ABC, abstractmethod
from typing import Dict, Optional, Union

import mpmath

from errors import InputError
from quadfield import FieldElement, ImagQuadField, PrincipalIdeal


class BianchiForm(ABC):
    """A supplier of Fourier coefficients c(m) on the integral ideals of K.

    Concrete forms set ``field``, ``k`` (weight (k, k)), ``level`` and
    ``label``. ``fricke_sign`` is +1, -1 or None (unknown).
    """

    field: ImagQuadField
    k: int
    level: Optional[PrincipalIdeal]
    label: str
    fricke_sign: Optional[int] = None

    @abstractmethod
    def coefficient(self, m: Union[PrincipalIdeal, FieldElement], denominator: Optional[FieldElement] = None):
        """
        Exact c(m).

        Args:
            m: an integral ideal, or the numerator of a fractional ideal
            denominator: optional denominator; non-integral ideals give 0

        Returns:
            An exact number (int, or an exact algebraic number for stabilised forms)
        """
        pass

    @abstractmethod
    def coefficient_complex(self, m: PrincipalIdeal, prec: int) -> mpmath.mpc:
        """c(m) rendered at the requested precision."""
        pass

    def with_fricke_sign(self, sign: Optional[int]) -> "BianchiForm":
        """A shallow copy (sharing coefficient memos) with epsilon(n) replaced."""
        if sign not in (None, 1, -1):
            raise InputError(f"fricke sign must be +1 or -1, got {sign}")
        other = copy.copy(self)
        other.fricke_sign = sign
        return other

    def _integral_part(
        self, m: Union[PrincipalIdeal, FieldElement], denominator: Optional[FieldElement]
    ) -> Optional[PrincipalIdeal]:
        """The integral ideal m/denominator, or None when it is not integral."""
        if isinstance(m, PrincipalIdeal):
            m = m.gen
        if denominator is not None:
            quotient = denominator.exact_div(m)
            if quotient is None:
                return None
            m = quotient
        if m.is_zero():
            return None
        return self.field.ideal(m)


class SyntheticForm(BianchiForm):
    """Finitely many prescribed coefficients and no modularity.

    Used for edge cases: the zero form, one-term sums. Its L-values are computed by
    integrating over the whole half-line.
    """

    def __init__(self, field: ImagQuadField, k: int, coefficients: Optional[Dict[PrincipalIdeal, int]] = None,
                 label: str = "synthetic"):
        self.field = field
        self.k = k
        self.level = None
        self.label = label
        self.fricke_sign = None
        self._coefficients = dict(coefficients or {})

    @property
    def support_norm(self) -> int:
        return max((m.norm for m in self._coefficients), default=0)

    def coefficient(self, m, denominator=None):
        ideal = self._integral_part(m, denominator)
        if ideal is None:
            return 0
        return self._coefficients.get(ideal, 0)

    def coefficient_complex(self, m, prec):
        return mpmath.mpc(self.coefficient(m))
