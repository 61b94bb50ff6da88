"""Compare a preset run against a closed-form map over a parameter grid."""

from __future__ import annotations

from dataclasses import dataclass, field

from .presets import build_preset
from .protocol import run_protocol


@dataclass
class VerificationReport:
    preset: str
    rows: list = field(default_factory=list)  # (params, engine result, analytic result)
    max_fidelity_dev: float = 0.0
    max_success_dev: float = 0.0
    tol: float = 1e-9

    @property
    def passed(self) -> bool:
        return self.max_fidelity_dev <= self.tol and self.max_success_dev <= self.tol


def verify_against_analytic(preset: str, analytic_op, grid, tol: float = 1e-9) -> VerificationReport:
    """``analytic_op(**params)`` must return an object with ``success_prob`` and ``output``.

    ``grid`` is an iterable of keyword dicts passed both to the preset and to the map.
    """
    rep = VerificationReport(preset, tol=tol)
    for params in grid:
        got = run_protocol(build_preset(preset, **params))
        ref = analytic_op(**params)
        ds = abs(float(got.success_prob) - float(ref.success_prob))
        if got.output is None or ref.output is None:
            df = 0.0 if got.output is ref.output else float("inf")
        else:
            df = max(abs(float(a) - float(b)) for a, b in zip(got.output.p, ref.output.p))
        rep.max_success_dev = max(rep.max_success_dev, ds)
        rep.max_fidelity_dev = max(rep.max_fidelity_dev, df)
        rep.rows.append((dict(params), got, ref))
    return rep
