"""Central finite-difference verification of analytic gradients.

The loss callable must be deterministic: fix any permutations or sampled
augmentations before building the closure.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tensor import Tensor

# Elements whose analytic and numeric gradients are both below this scale are
# compared against it instead of their own magnitude, so finite-difference
# noise on true-zero gradients (inactive hinges, dead ReLUs) cannot dominate.
REL_ERR_FLOOR = 1e-3


@dataclass
class GradCheckEntry:
    name: str
    max_rel_err: float
    passed: bool
    note: str = ""


@dataclass
class GradCheckReport:
    step: float
    tolerance: float
    entries: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def format(self) -> str:
        lines = [f"gradcheck step={self.step:g} tolerance={self.tolerance:g}"]
        for e in self.entries:
            status = "PASS" if e.passed else "FAIL"
            note = f" ({e.note})" if e.note else ""
            lines.append(f"  [{status}] {e.name}: max rel err {e.max_rel_err:.3e}{note}")
        return "\n".join(lines)


def _rel_err(a: np.ndarray, n: np.ndarray) -> float:
    denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), REL_ERR_FLOOR)
    return float((np.abs(a - n) / denom).max())


def finite_diff_gradcheck(loss_fn, named_params, step: float = 1e-5,
                          tolerance: float = 1e-4) -> GradCheckReport:
    """Compare backward() gradients of ``loss_fn()`` against central differences.

    ``named_params`` maps names to the parameter tensors ``loss_fn`` closes
    over. Returns a per-parameter report; non-finite losses are recorded as
    failures rather than raised.
    """
    params = dict(named_params)
    report = GradCheckReport(step=step, tolerance=tolerance)

    for p in params.values():
        p.grad = None
    loss = loss_fn()
    if not isinstance(loss, Tensor) or loss.data.size != 1:
        raise ValueError("loss_fn must return a scalar Tensor")
    if not np.isfinite(loss.data):
        report.entries.append(GradCheckEntry("<loss>", np.inf, False, "non-finite loss"))
        return report
    loss.backward()
    analytic = {
        name: (p.grad.copy() if p.grad is not None else np.zeros_like(p.data))
        for name, p in params.items()
    }

    for name, p in params.items():
        numeric = np.zeros_like(p.data)
        flat = p.data.reshape(-1)
        num_flat = numeric.reshape(-1)
        bad = False
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + step
            up = loss_fn().item()
            flat[i] = orig - step
            down = loss_fn().item()
            flat[i] = orig
            if not (np.isfinite(up) and np.isfinite(down)):
                bad = True
                break
            num_flat[i] = (up - down) / (2.0 * step)
        if bad:
            report.entries.append(GradCheckEntry(name, np.inf, False, "non-finite perturbed loss"))
            continue
        err = _rel_err(analytic[name], numeric)
        report.entries.append(GradCheckEntry(name, err, err <= tolerance))
    return report
