"""Pass/fail records for inequality and identity checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one named check.

    slack is oriented so that the check passes iff slack >= 0: for an
    inequality LHS <= RHS it is RHS - LHS after adding the stated allowance;
    for an identity |difference| <= allowance it is allowance - |difference|.
    stderr is the Monte Carlo standard error entering the allowance (0 for
    deterministic checks) and allowance is the total additive slack granted
    (calibration constants plus 3 stderr), surfaced so reports stay honest
    about what was forgiven.
    """

    check: str
    params: dict = field(default_factory=dict)
    slack: float = 0.0
    stderr: float = 0.0
    allowance: float = 0.0
    passed: bool = False

    def to_dict(self) -> dict:
        def clean(x):
            if isinstance(x, float) and not math.isfinite(x):
                return str(x)
            return x

        return {
            "check": self.check,
            "params": {k: clean(v) for k, v in sorted(self.params.items())},
            "slack": clean(self.slack),
            "stderr": clean(self.stderr),
            "allowance": clean(self.allowance),
            "pass": bool(self.passed),
        }
