"""Per-iteration solver records shared by every method."""
import csv
import io
from dataclasses import dataclass, field

import numpy as np

CSV_COLUMNS = ("k", "rho", "omega", "gamma", "qtilde_norm", "true_error", "residual_norm",
               "wall_ms")

CONVERGED = "converged"
MAX_ITER = "max_iter"
BREAKDOWN = "breakdown"


@dataclass
class IterRecord:
    k: int
    rho: float
    omega: float
    gamma: float
    qtilde_norm: float = float("nan")
    true_error: float = float("nan")
    residual_norm: float = float("nan")
    wall_ms: float = 0.0


@dataclass
class SolveTrace:
    """Records for iterates ``x_0, x_1, ...`` and the terminal status.

    Record ``k`` describes the cycle evaluated at ``x_k``: ``rho`` is
    ``||P(x_k) - x_k||^2``, ``omega`` is ``||w(x_k)||^2`` and ``gamma`` is
    their mean, i.e. the coefficient that produces ``x_{k+1}``.
    """

    method: str
    records: list = field(default_factory=list)
    iterates: list = field(default_factory=list)
    status: str = MAX_ITER
    breakdown_step: int = -1
    x_star: np.ndarray = None
    x0: np.ndarray = None

    def __len__(self):
        return len(self.records)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records], dtype=np.float64)

    def errors(self):
        return self.column("true_error")

    def to_csv(self, timing=True):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.records:
            row = [r.k] + [repr(float(getattr(r, c))) for c in CSV_COLUMNS[1:-1]]
            row.append(repr(float(r.wall_ms)) if timing else "0.0")
            w.writerow(row)
        return buf.getvalue()


def read_csv(text):
    """Parse a trace CSV back into a dict of float arrays."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_COLUMNS:
        raise ValueError(f"unexpected trace header {rows[0] if rows else None}")
    data = np.array([[float(v) for v in row] for row in rows[1:]], dtype=np.float64)
    data = data.reshape(-1, len(CSV_COLUMNS))
    return {c: data[:, i] for i, c in enumerate(CSV_COLUMNS)}


def make_record(k, x, y, omega, x_star=None, A=None, b=None, qtilde_norm=float("nan"),
                wall_ms=0.0):
    step = y - x
    rho = float(step @ step)
    rec = IterRecord(k=k, rho=rho, omega=float(omega), gamma=0.5 * (float(omega) + rho),
                     qtilde_norm=float(qtilde_norm), wall_ms=wall_ms)
    if x_star is not None:
        rec.true_error = float(np.linalg.norm(x - x_star))
    if A is not None:
        rec.residual_norm = float(np.linalg.norm(A @ x - b))
    return rec
