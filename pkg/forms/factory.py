"""Factory for building the Bianchi form a job asks for."""
import logging
from typing import Mapping, Optional, Union

from coefficient_cache import CoefficientStore
from errors import InputError, MissingRootNumber
from forms.base import BianchiForm
from forms.base_change import BaseChangeForm, base_change
from forms.newform_data import ClassicalNewformData
from forms.stabilised import stabilise
from quadfield import ImagQuadField

log = logging.getLogger(__name__)

SignOption = Union[int, str, None]


def resolve_fricke_sign(form: BaseChangeForm, option: SignOption, prec: Optional[int] = None) -> Optional[int]:
    """
    The Fricke sign selected by ``option``.

    Args:
        form: the base change
        option: +1/-1 (or "+1"/"-1"), "classical" (from Atkin-Lehner data),
            "estimate" (from the functional equation), or None (classical when
            available, else unknown)

    Raises:
        MissingRootNumber: "classical" without Atkin-Lehner data
        InputError: unknown option
    """
    if isinstance(option, str):
        option = option.lower()
        if option in ("+1", "1", "plus"):
            option = 1
        elif option in ("-1", "minus"):
            option = -1

    if option in (1, -1):
        return option
    if option == "classical":
        sign = form.classical_fricke_sign()
        if sign is None:
            raise MissingRootNumber(f"{form.newform.label} has no Atkin-Lehner data for a classical Fricke sign")
        return sign
    if option == "estimate":
        from lfun.lvalues import fricke_sign_estimate

        return fricke_sign_estimate(form, prec).sign
    if option is None:
        return form.classical_fricke_sign()
    raise InputError(f"Unknown Fricke sign option: {option}. Use +1, -1, 'classical' or 'estimate'")


def create_form(
    newform: ClassicalNewformData,
    field: ImagQuadField,
    fricke_sign: SignOption = None,
    prime: Optional[int] = None,
    choices: Optional[Mapping] = None,
    store: Optional[CoefficientStore] = None,
    prec: Optional[int] = None,
    padic_prec: Optional[int] = None,
) -> BianchiForm:
    """
    Build the base change of ``newform`` to ``field``, stabilised at ``prime`` if given.

    Args:
        newform: classical newform data
        field: the imaginary quadratic field
        fricke_sign: see ``resolve_fricke_sign``
        prime: rational prime to stabilise at (None for the base change itself)
        choices: root choice per prime above ``prime`` ("plus"/"minus")
        store: persistent coefficient store
        prec: decimal digits (used when the sign is estimated)
        padic_prec: p-adic precision of the stabilised roots

    Returns:
        BaseChangeForm or StabilisedForm
    """
    form = base_change(newform, field, store=store)
    sign = resolve_fricke_sign(form, fricke_sign, prec)
    if sign is not None:
        form = form.with_fricke_sign(sign)
    log.info("form %s, Fricke sign %s", form.label, sign)

    if prime is None:
        return form
    return stabilise(form, prime, choices, padic_prec)
