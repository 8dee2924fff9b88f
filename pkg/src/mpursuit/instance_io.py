"""Self-contained instance files: parameters, phi grid, scalar sequences.

Atoms and residuals are deliberately not stored; the file carries exactly
the data that determines them (q, gamma, alpha, xi per step plus the phi
grid), and loading replays the construction through the same vector
arithmetic as the builder.  Given identical float64 evaluation order the
reconstruction is bit-exact, and a corrupted sequence is caught by the
step-condition assertions during the replay.
"""

from __future__ import annotations

import numpy as np

from .adversarial import (AdversarialInstance, ConstructionParams,
                          ConstructionState, advance, finalize, init_state)
from .grid_functions import GridFunction
from .phi_builder import PhiProfile

__all__ = ["instance_to_text", "save_instance", "load_instance"]

_FORMAT = "mpursuit-instance-v1"


def instance_to_text(instance: AdversarialInstance) -> str:
    p = instance.params
    st = instance.state
    prof = p.phi
    lines = [
        f"# {_FORMAT}",
        f"beta={p.beta:.17g}",
        f"K={p.K}",
        f"N={p.N}",
        f"n_max={p.n_max}",
        f"epsilon={p.epsilon:.17g}",
        f"t={prof.t:.17g}",
        f"tau={prof.tau:.17g}",
        f"c_t={prof.c_t:.17g}",
        f"delta={prof.delta:.17g}",
        f"grid_m={prof.phi.m}",
        "[phi]",
    ]
    lines.append(prof.phi.to_csv().rstrip("\n"))
    lines.append("[sequences]")
    lines.append("n,q,gamma,alpha,xi")
    for n in range(p.K - 1, p.n_max + 1):
        lines.append(f"{n},{st.q[n]:.17g},{st.gamma[n]:.17g},"
                     f"{st.alpha[n]:.17g},{st.xi[n]:.17g}")
    return "\n".join(lines) + "\n"


def save_instance(instance: AdversarialInstance, path: str,
                  header: str = "") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(header)
        fh.write(instance_to_text(instance))


def load_instance(path_or_text: str, is_text: bool = False) -> AdversarialInstance:
    """Parse an instance file and replay the construction it describes."""
    if is_text:
        text = path_or_text
    else:
        with open(path_or_text, "r", encoding="utf-8") as fh:
            text = fh.read()
    scalars: dict[str, str] = {}
    phi_lines: list[str] = []
    seq_rows: list[tuple[int, float, float, float, float]] = []
    section = "head"
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line == "[phi]":
            section = "phi"
            continue
        if line == "[sequences]":
            section = "seq"
            continue
        if section == "head":
            if line.startswith("#"):
                continue
            key, _, val = line.partition("=")
            scalars[key.strip()] = val.strip()
        elif section == "phi":
            phi_lines.append(line)
        else:
            if line.startswith("n,"):
                continue
            parts = line.split(",")
            seq_rows.append((int(parts[0]), float(parts[1]), float(parts[2]),
                             float(parts[3]), float(parts[4])))

    beta = float(scalars["beta"])
    k_par = int(scalars["K"])
    n_par = int(scalars["N"])
    n_max = int(scalars["n_max"])
    epsilon = float(scalars["epsilon"])
    phi_grid = GridFunction.from_csv("\n".join(phi_lines))
    profile = PhiProfile(phi=phi_grid, t=float(scalars["t"]),
                         c_t=float(scalars["c_t"]), delta=float(scalars["delta"]),
                         beta=beta, tau=float(scalars["tau"]))
    params = ConstructionParams(beta=beta, K=k_par, N=n_par, n_max=n_max,
                                epsilon=epsilon, phi=profile)

    size = n_max + 1
    given = {key: np.zeros(size) for key in ("q", "gamma", "alpha", "xi")}
    for n, qv, gv, av, xv in seq_rows:
        if n >= size:
            raise ValueError(f"sequence row {n} beyond n_max")
        given["q"][n] = qv
        given["gamma"][n] = gv
        given["alpha"][n] = av
        given["xi"][n] = xv

    state = init_state(params)
    state.q[k_par - 1] = given["q"][k_par - 1]
    advance(state, params, given_rows=given)
    return finalize(state, params)
