import math

from diracpt.core import principal_sqrt


def energy_for_k(model, k, m=1.0):
    """Positive energy whose asymptotic momentum at +inf is ``k``."""
    V, S, P = model.limits.side("+")
    return float((V + principal_sqrt((m + S) ** 2 + P * P + k * k)).real)


def momentum(E, m=1.0, shift=0.0):
    return math.sqrt(E * E - m * m - shift)
