"""High-energy limit of the discriminant.

As q grows, the projected force of a slackening law tends to a two-slope
law and the Hill coefficient to a two-valued step, so the discriminant
converges to that of a two-step Meissner equation.  For even j the limit
system decouples and no instability can be predicted from it.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass


from .errors import UnsupportedModelError, ValidationError
from .floquet import StepPotential, meissner_discriminant
from .params import BridgeParams
from .projection import epsilon_jk

UNSTABLE_AT_HIGH_ENERGY = "unstable_at_high_energy"
NO_INSTABILITY_PREDICTED = "no_instability_predicted"
EVEN_J_ALWAYS_STABLE = "even_j_always_stable"


@dataclass(frozen=True)
class LimitQuantities:
    omega_plus: float
    omega_minus: float
    A_plus: float
    A_minus: float
    phi_plus: float
    phi_minus: float
    a: float
    epsilon: float
    delta_inf: float
    M: float

    def as_dict(self):
        return asdict(self)

    def two_step(self) -> StepPotential:
        return StepPotential.from_frequencies([(self.A_plus, math.pi / self.omega_plus),
                                               (self.A_minus, math.pi / self.omega_minus)])

    @property
    def period(self):
        return math.pi / self.omega_plus + math.pi / self.omega_minus


def delta_infinity_formula(phi_plus, phi_minus, a):
    """2 [cos phi+ cos phi- - (a + 1/a)/2 sin phi+ sin phi-]."""
    return 2.0 * (math.cos(phi_plus) * math.cos(phi_minus)
                  - 0.5 * (a + 1.0 / a) * math.sin(phi_plus) * math.sin(phi_minus))


def limit_quantities(params: BridgeParams, M: float, beta=None) -> LimitQuantities:
    """Limit constants for odd j.  ``beta`` overrides params.beta."""
    j, k = params.j, params.k
    if j % 2 == 0:
        raise ValidationError("the two-step limit needs odd j; use even_j_limit for even j", field="j")
    if not M > 0:
        raise ValidationError("asymptotic slope M must be positive", field="M")
    b = params.beta if beta is None else float(beta)
    eps = float(epsilon_jk(j, k))
    wp2 = params.alpha * j**4 + M * (1 + 1 / j)
    wm2 = params.alpha * j**4 + M * (1 - 1 / j)
    Ap2 = b * k**2 + params.gamma * M * (1 + eps)
    Am2 = b * k**2 + params.gamma * M * (1 - eps)
    if not (Ap2 > 0 and Am2 > 0):
        raise ValidationError(f"limit torsional frequencies are not real (A+^2={Ap2:.6g}, "
                              f"A-^2={Am2:.6g}); beta too small", field="beta")
    wp, wm, Ap, Am = math.sqrt(wp2), math.sqrt(wm2), math.sqrt(Ap2), math.sqrt(Am2)
    php, phm, a = math.pi * Ap / wp, math.pi * Am / wm, Ap / Am
    return LimitQuantities(omega_plus=wp, omega_minus=wm, A_plus=Ap, A_minus=Am,
                           phi_plus=php, phi_minus=phm, a=a, epsilon=eps,
                           delta_inf=delta_infinity_formula(php, phm, a), M=M)


def delta_infinity(lq: LimitQuantities, route="formula") -> float:
    if route == "formula":
        return delta_infinity_formula(lq.phi_plus, lq.phi_minus, lq.a)
    if route == "meissner":
        return meissner_discriminant(lq.two_step())[1]
    raise ValueError(f"unknown route {route!r}")


def even_j_limit(params: BridgeParams, M: float, beta=None) -> dict:
    """Decoupled limit frequencies for even j."""
    b = params.beta if beta is None else float(beta)
    return {"flexural_frequency": math.sqrt(params.alpha * params.j**4 + M),
            "torsional_frequency_squared": b * params.k**2 + params.gamma * M}


def _asymptotic_slope(model) -> float:
    rep = model.assumptions()
    if not rep.S2 or rep.M is None:
        raise UnsupportedModelError(f"model {model.name!r} violates the asymptotic-slope assumption "
                                    f"(no finite positive slope as r -> +inf)")
    if not rep.S1:
        raise UnsupportedModelError(f"model {model.name!r}: f' does not vanish as r -> -inf")
    return float(rep.M)


def high_energy_verdict(params: BridgeParams, model, beta=None) -> dict:
    """Predicted behaviour of the pure flexural orbit as q -> infinity."""
    M = _asymptotic_slope(model)
    b = params.beta if beta is None else beta
    if params.j % 2 == 0:
        return {"verdict": EVEN_J_ALWAYS_STABLE, "M": M, **even_j_limit(params, M, b)}
    lq = limit_quantities(params, M, beta=b)
    verdict = UNSTABLE_AT_HIGH_ENERGY if abs(lq.delta_inf) > 2.0 else NO_INSTABILITY_PREDICTED
    return {"verdict": verdict, **lq.as_dict()}
