"""
Closed-form homogenization of bi-phase laminates layered along e2.

Layer a occupies the first fraction f_a = zeta/(1+zeta) of the cell and
layer b the rest. Every first-order fluctuation is piecewise linear with
slope s in layer a and -zeta*s in layer b, so one number per profile
describes it.
"""

import logging
from typing import Dict, Optional

from models import (
    COMPONENTS,
    EffectiveProperties,
    Laminate,
    NormalizedProperties,
    PerturbationProfile,
    PhaseProperties,
    ProfileKind,
)

logger = logging.getLogger(__name__)


def _biphase(laminate: Laminate):
    if laminate.n_layers != 2:
        raise ValueError(f"closed forms need exactly two layers, got {laminate.n_layers}")
    a, b = laminate.phases
    return a, b, laminate.zeta


def _slope_a(c_a: float, c_b: float, d_a: float, d_b: float, zeta: float) -> float:
    """Layer-a slope of the profile whose flux c*s + d is continuous."""
    return (d_b - d_a) / (c_a + zeta * c_b)


def _harmonic(x_a: float, x_b: float, zeta: float) -> float:
    return (zeta + 1.0) * x_a * x_b / (x_a + zeta * x_b)


def _arithmetic(x_a: float, x_b: float, zeta: float) -> float:
    return (x_b + zeta * x_a) / (zeta + 1.0)


def layer_a_slopes(laminate: Laminate) -> Dict[ProfileKind, float]:
    a, b, zeta = _biphase(laminate)
    return {
        ProfileKind.N211: _slope_a(a.C2222, b.C2222, a.C1122, b.C1122, zeta),
        ProfileKind.N222: _slope_a(a.C2222, b.C2222, a.C2222, b.C2222, zeta),
        ProfileKind.N112: _slope_a(a.C1212, b.C1212, a.C1212, b.C1212, zeta),
        ProfileKind.NTILDE2: _slope_a(a.C2222, b.C2222, -a.alpha22, -b.alpha22, zeta),
        ProfileKind.NHAT2: _slope_a(a.C2222, b.C2222, -a.beta22, -b.beta22, zeta),
        ProfileKind.M2: _slope_a(a.K22, b.K22, a.K22, b.K22, zeta),
        ProfileKind.W2: _slope_a(a.D22, b.D22, a.D22, b.D22, zeta),
    }


def perturbation_profiles_biphase(laminate: Laminate) -> Dict[ProfileKind, PerturbationProfile]:
    """
    The seven non-vanishing first-order fluctuation functions of a bi-phase
    laminate (N112 stands for the shear pair N112 = N121). Every other
    first-order fluctuation is identically zero.
    """
    zeta = _biphase(laminate)[2]
    fractions = laminate.fractions
    return {
        kind: PerturbationProfile.from_slopes(kind, fractions, (slope, -zeta * slope))
        for kind, slope in layer_a_slopes(laminate).items()
    }


def effective_constants_biphase(laminate: Laminate) -> EffectiveProperties:
    """
    Overall constants of a bi-phase laminate from the orthotropic closed forms.

    C2222, C1212, K22, D22 are zeta-weighted harmonic means, K11 and D11
    arithmetic means, C1122, alpha22, beta22 C2222-weighted means, and
    C1111, alpha11, beta11 carry the coupling through C1122.
    """
    a, b, zeta = _biphase(laminate)
    den = a.C2222 + zeta * b.C2222
    s_tilde = _slope_a(a.C2222, b.C2222, -a.alpha22, -b.alpha22, zeta)
    s_hat = _slope_a(a.C2222, b.C2222, -a.beta22, -b.beta22, zeta)
    d1122 = a.C1122 - b.C1122

    C1111 = (
        zeta ** 2 * a.C1111 * b.C2222
        + zeta * (b.C1111 * b.C2222 - d1122 ** 2 + a.C1111 * a.C2222)
        + b.C1111 * a.C2222
    ) / ((zeta + 1.0) * den)

    return EffectiveProperties(
        C1111=C1111,
        C2222=_harmonic(a.C2222, b.C2222, zeta),
        C1122=(b.C1122 * a.C2222 + zeta * a.C1122 * b.C2222) / den,
        C1212=_harmonic(a.C1212, b.C1212, zeta),
        alpha11=(zeta * a.alpha11 + b.alpha11 - zeta * s_tilde * d1122) / (zeta + 1.0),
        alpha22=(zeta * b.C2222 * a.alpha22 + a.C2222 * b.alpha22) / den,
        beta11=(zeta * a.beta11 + b.beta11 - zeta * s_hat * d1122) / (zeta + 1.0),
        beta22=(zeta * b.C2222 * a.beta22 + a.C2222 * b.beta22) / den,
        K11=_arithmetic(a.K11, b.K11, zeta),
        K22=_harmonic(a.K22, b.K22, zeta),
        D11=_arithmetic(a.D11, b.D11, zeta),
        D22=_harmonic(a.D22, b.D22, zeta),
        method="analytic",
    )


def effective_constants_isotropic(laminate: Laminate) -> EffectiveProperties:
    """
    Overall constants of a bi-phase laminate of isotropic phases written in
    E~ and nu~ directly.

    Raises:
        ValueError: if either phase was not built as isotropic
    """
    a, b, zeta = _biphase(laminate)
    if a.isotropic is None or b.isotropic is None:
        raise ValueError("isotropic closed forms need both phases built as isotropic")
    Ea, na = a.isotropic.E_tilde, a.isotropic.nu_tilde
    Eb, nb = b.isotropic.E_tilde, b.isotropic.nu_tilde

    # denominators are negative; numerators carry matching signs
    den = zeta * Eb * (na ** 2 - 1.0) + Ea * (nb ** 2 - 1.0)
    C1111 = (
        -zeta ** 2 * Ea * Eb
        + zeta * ((Ea * nb) ** 2 - 2.0 * Ea * na * Eb * nb + (Eb * na) ** 2 - Ea ** 2 - Eb ** 2)
        - Ea * Eb
    ) / ((zeta + 1.0) * den)
    C2222 = -(zeta + 1.0) * Ea * Eb / den
    C1212 = (zeta + 1.0) * Ea * Eb / (2.0 * (Ea + Ea * nb + zeta * (Eb * na + Eb)))
    C1122 = -Ea * Eb * (nb + zeta * na) / den

    A11 = zeta ** 2 * (Eb * na ** 2 - Eb) + zeta * (
        Ea * nb ** 2 - Eb * nb + Eb * nb * na ** 2 + Ea * na - Ea * na * nb ** 2 - Ea
    )
    B11 = zeta * (
        Ea * na * nb ** 2 - Eb + Eb * na ** 2 + Eb * nb - Eb * nb * na ** 2 - Ea * na
    ) + Ea * nb ** 2 - Ea
    delta11 = (zeta + 1.0) * den

    def coupling_11(value_a: float, value_b: float) -> float:
        return (A11 * value_a + B11 * value_b) / delta11

    def coupling_22(value_a: float, value_b: float) -> float:
        return (zeta * Eb * (na ** 2 - 1.0) * value_a + Ea * (nb ** 2 - 1.0) * value_b) / den

    iso_a, iso_b = a.isotropic, b.isotropic
    return EffectiveProperties(
        C1111=C1111,
        C2222=C2222,
        C1122=C1122,
        C1212=C1212,
        alpha11=coupling_11(iso_a.alpha, iso_b.alpha),
        alpha22=coupling_22(iso_a.alpha, iso_b.alpha),
        beta11=coupling_11(iso_a.beta, iso_b.beta),
        beta22=coupling_22(iso_a.beta, iso_b.beta),
        K11=_arithmetic(iso_a.K, iso_b.K, zeta),
        K22=_harmonic(iso_a.K, iso_b.K, zeta),
        D11=_arithmetic(iso_a.D, iso_b.D, zeta),
        D22=_harmonic(iso_a.D, iso_b.D, zeta),
        method="isotropic",
    )


def phase_average(laminate: Laminate, name: str) -> float:
    """Plain two-phase mean (X^a + X^b)/2, independent of thickness."""
    a, b, _ = _biphase(laminate)
    return 0.5 * (a.component(name) + b.component(name))


def normalize_constants(eff: EffectiveProperties, laminate: Laminate) -> NormalizedProperties:
    """
    Divide each effective component by the two-phase average of the same
    component. Components whose average vanishes are not normalizable and
    come back as None.
    """
    values: Dict[str, Optional[float]] = {}
    undefined = []
    for name in COMPONENTS:
        divisor = phase_average(laminate, name)
        if divisor == 0.0:
            values[name] = None
            undefined.append(name)
        else:
            values[name] = eff.component(name) / divisor
    return NormalizedProperties(components=values, undefined=tuple(undefined))


def collapse_limits(laminate: Laminate) -> Dict[str, PhaseProperties]:
    """Phases the effective constants tend to as f_a -> 0 ('b') and f_a -> 1 ('a')."""
    a, b, _ = _biphase(laminate)
    return {"a": a, "b": b}
