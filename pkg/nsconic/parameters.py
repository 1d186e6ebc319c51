from __future__ import annotations

import math
from dataclasses import dataclass

THEORETICAL_BETA = 0.9
THEORETICAL_GAMMA = 0.9


@dataclass(frozen=True)
class StepParameters:
    """Step size alpha, centering weight gamma and the neighborhood (beta, eta)."""

    alpha: float
    beta: float
    gamma: float
    eta: float

    def theta(self, nu: float) -> float:
        return theta(nu, self.beta, self.gamma)

    def omega1(self, nu: float) -> float:
        a, b, g = self.alpha, self.beta, self.gamma
        return 1.0 + a * a * self.theta(nu) / (2.0 * b * nu) + a * (g / b - 1.0)

    def omega2(self, nu: float) -> float:
        a, b, g = self.alpha, self.beta, self.gamma
        return a * a * self.theta(nu) / (2.0 * b * nu) + a * max(g / b - 1.0, 1.0 - g / (2.0 - b))

    def decay(self) -> float:
        """Per-iteration factor 1 - alpha (1 - gamma) on mu_e and G."""
        return 1.0 - self.alpha * (1.0 - self.gamma)

    def is_theoretical(self, nu: float) -> bool:
        ref = theoretical_parameters(nu)
        return all(
            math.isclose(mine, theirs, rel_tol=1e-12, abs_tol=0.0)
            for mine, theirs in (
                (self.alpha, ref.alpha),
                (self.beta, ref.beta),
                (self.gamma, ref.gamma),
                (self.eta, ref.eta),
            )
        )


def theta(nu: float, beta: float, gamma: float) -> float:
    return nu * (1.0 - 2.0 * gamma + gamma * gamma / beta) + 1.0 - 0.5 * beta + gamma * gamma / (2.0 * beta) - gamma


def theoretical_alpha(nu: float) -> float:
    return 1.0 / (100.0 * nu)


def theoretical_eta(nu: float) -> float:
    return 1.0 / (400.0 * math.sqrt(nu))


def theoretical_parameters(nu: float) -> StepParameters:
    return StepParameters(
        alpha=theoretical_alpha(nu),
        beta=THEORETICAL_BETA,
        gamma=THEORETICAL_GAMMA,
        eta=theoretical_eta(nu),
    )
