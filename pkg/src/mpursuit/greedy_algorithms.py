"""Greedy approximation algorithms over finite symmetric dictionaries.

The pure greedy algorithm (matching pursuit), its shrinkage variant, the
orthogonal greedy algorithm, and a relaxed greedy algorithm.  A Dictionary
stores one representative per +/- atom pair; selection always considers
both signs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .linear_core import CoeffVector

__all__ = ["Dictionary", "TraceStep", "GreedyTrace", "select_atom", "run",
           "ALGORITHMS"]

ALGORITHMS = ("pga", "pga_shrink", "oga", "rga")

RESIDUAL_HALT = 1e-14
UNIT_NORM_TOL = 1e-9


class Dictionary:
    """Finite symmetric set of unit atoms with fast best-atom selection."""

    def __init__(self, atoms: Sequence[CoeffVector], labels: Sequence[str] | None = None):
        atoms = list(atoms)
        if labels is None:
            labels = [f"a{i}" for i in range(len(atoms))]
        labels = [str(s) for s in labels]
        if len(labels) != len(atoms):
            raise ValueError("one label per atom required")
        if len(set(labels)) != len(labels):
            raise ValueError("atom labels must be unique")
        self.atoms = atoms
        self.labels = labels
        self._matrix = None
        self._width = max((a.active_len for a in atoms), default=0)
        for a, lab in zip(atoms, labels):
            nrm = float(np.linalg.norm(a.coeffs))
            if abs(nrm - 1.0) > UNIT_NORM_TOL:
                raise ValueError(f"atom {lab} has norm {nrm!r}, expected 1")

    def __len__(self) -> int:
        return len(self.atoms)

    @property
    def width(self) -> int:
        return self._width

    def matrix(self) -> np.ndarray:
        """Atoms stacked as rows, zero-padded to the common width."""
        if self._matrix is None:
            mat = np.zeros((len(self.atoms), self._width))
            for i, a in enumerate(self.atoms):
                mat[i, : a.active_len] = a.coeffs
            self._matrix = mat
        return self._matrix

    def index_of(self, label: str) -> int:
        return self.labels.index(label)


class TraceStep(NamedTuple):
    step_index: int
    atom_id: str
    sign: int
    coefficient: float
    residual_norm: float


@dataclass
class GreedyTrace:
    """Per-step record of one algorithm run."""

    algorithm: str
    shrinkage: float
    steps: list[TraceStep] = field(default_factory=list)
    atom_indices: list[int] = field(default_factory=list)

    @property
    def residual_norms(self) -> np.ndarray:
        return np.array([s.residual_norm for s in self.steps])

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([s.coefficient for s in self.steps])

    def to_csv(self) -> str:
        lines = ["n,residual_norm,atom_id,sign,coefficient"]
        for s in self.steps:
            lines.append(f"{s.step_index},{s.residual_norm:.17g},{s.atom_id},"
                         f"{s.sign},{s.coefficient:.17g}")
        return "\n".join(lines) + "\n"


def _select(matrix: np.ndarray, r: np.ndarray):
    """Index, sign and value of the best signed atom for residual r.

    np.argmax resolves exact ties at the lowest index; the sign defaults
    to +1 when the inner product is zero.
    """
    vals = matrix @ r[: matrix.shape[1]]
    j = int(np.argmax(np.abs(vals)))
    v = float(vals[j])
    sign = 1 if v >= 0.0 else -1
    return j, sign, abs(v)


def select_atom(residual: CoeffVector, dictionary: Dictionary):
    """Best signed atom: (atom_id, sign, value) with value = max <r, +/-d> >= 0."""
    if len(dictionary) == 0:
        raise ValueError("empty dictionary")
    r = residual.padded(max(dictionary.width, residual.active_len))
    j, sign, value = _select(dictionary.matrix(), r)
    return dictionary.labels[j], sign, value


def run(algorithm: str, f: CoeffVector, dictionary: Dictionary, steps: int,
        shrinkage: float = 1.0, variation_bound: float | None = None) -> GreedyTrace:
    """Run a greedy algorithm for up to `steps` iterations.

    pga / pga_shrink update the residual by r -> r - s <r, d> d for the
    selected signed atom d.  oga re-projects onto the span of all selected
    atoms (modified Gram-Schmidt with one reorthogonalization pass).  rga
    mixes in each selected atom with the classical 2/n relaxation schedule
    scaled by `variation_bound`.  The run halts early once the residual
    norm falls below 1e-14.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if len(dictionary) == 0:
        raise ValueError("empty dictionary")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if algorithm == "pga_shrink":
        if not 0.0 < shrinkage <= 1.0:
            raise ValueError("shrinkage must lie in (0, 1]")
        s = shrinkage
    else:
        s = 1.0
    if algorithm == "rga" and (variation_bound is None or variation_bound <= 0.0):
        raise ValueError("rga requires a positive variation_bound")

    mat = dictionary.matrix()
    width = max(dictionary.width, f.active_len)
    r = f.padded(width)
    trace = GreedyTrace(algorithm=algorithm, shrinkage=s)

    approx = np.zeros(width) if algorithm == "rga" else None
    basis = np.zeros((steps, width)) if algorithm == "oga" else None
    nbasis = 0

    for n in range(1, steps + 1):
        j, sign, value = _select(mat, r)
        atom = sign * mat[j]
        if algorithm in ("pga", "pga_shrink"):
            coeff = s * value
            r[: mat.shape[1]] -= coeff * atom
        elif algorithm == "oga":
            coeff = value  # selection inner product; the update is a projection
            b = atom.astype(np.float64, copy=True).copy()
            bb = np.zeros(width)
            bb[: mat.shape[1]] = b
            for _ in range(2):
                bb -= basis[:nbasis].T @ (basis[:nbasis] @ bb)
            nb = float(np.linalg.norm(bb))
            if nb > 1e-12:
                bb /= nb
                basis[nbasis] = bb
                nbasis += 1
                r -= (r @ bb) * bb
        else:  # rga
            coeff = variation_bound if n == 1 else 2.0 * variation_bound / n
            if n == 1:
                approx[: mat.shape[1]] = coeff * atom
            else:
                approx *= 1.0 - 2.0 / n
                approx[: mat.shape[1]] += coeff * atom
            r = f.padded(width) - approx
        rnorm = float(np.linalg.norm(r))
        if not (np.isfinite(rnorm) and np.isfinite(value)):
            raise RuntimeError(f"numeric breakdown at step {n}")
        trace.steps.append(TraceStep(n, dictionary.labels[j], sign, coeff, rnorm))
        trace.atom_indices.append(j)
        if rnorm < RESIDUAL_HALT:
            break
    return trace
