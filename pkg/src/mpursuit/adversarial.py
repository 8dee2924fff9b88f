"""Worst-case dictionary construction with certified greedy selection.

Builds the residual/atom sequences whose norms follow the schedule
(n+1)^(beta - 1/2) exactly, assembles the dictionary (one blended atom
plus the planned atoms), picks the blending weight epsilon, and verifies
the strict selection inequalities |<r_{n-1}, d_k>| < q_n = <r_{n-1}, d_n>
by two independent routes:

* direct: inner products of the stored residual history against the
  stored atoms;
* oracle: the closed-form recursions driven purely by the scalar
  sequences (q, gamma, alpha, xi), the weight profile phi and epsilon --
  no vector accumulated during the construction enters this route.

Every quantity the oracle needs is reconstructed from the residual
component formula <r_m, e_j> = -q_m (xi_j + sum_{l>j}^m <h_l, e_j>).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConstructionError
from .greedy_algorithms import Dictionary
from .linear_core import CoeffVector
from .phi_builder import PhiProfile

__all__ = [
    "ConstructionParams", "ConstructionState", "AdversarialInstance",
    "VerificationReport", "q_of", "init_state", "step", "advance",
    "choose_epsilon", "finalize", "inner_product_oracle", "verify",
    "build_instance",
]

CONDITION_RTOL = 1e-9
DUAL_PATH_TOL = 1e-9
DIAG_RTOL = 1e-10


def q_of(n, beta: float):
    """Greedy coefficient schedule: q_n^2 = n^(2b-1) - (n+1)^(2b-1).

    Evaluated in cancellation-free form; defined for every n >= 1 and in
    particular at n = K-1 where the component formulas need it.
    """
    if beta >= 0.5:
        raise ValueError("q is undefined for beta >= 1/2")
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    n = np.asarray(n, dtype=np.float64)
    if np.any(n < 1):
        raise ValueError("q_of needs n >= 1")
    q2 = -(n ** (2.0 * beta - 1.0)) * np.expm1((2.0 * beta - 1.0) * np.log1p(1.0 / n))
    out = np.sqrt(q2)
    return float(out) if out.ndim == 0 else out


def _schedule(n, beta: float):
    """Target residual norm (n+1)^(beta - 1/2)."""
    return (np.asarray(n, dtype=np.float64) + 1.0) ** (beta - 0.5)


@dataclass
class ConstructionParams:
    """Fundamental parameters: beta plus (K, N, n_max, epsilon, phi)."""

    beta: float
    K: int
    N: int
    n_max: int
    epsilon: float | None
    phi: PhiProfile

    def __post_init__(self):
        if not 0.0 < self.beta < 0.5:
            raise ValueError("beta must lie in (0, 1/2)")
        if self.K < 2:
            raise ValueError("K must be at least 2")
        if self.N < self.K:
            raise ValueError("N must be at least K")
        if self.n_max <= self.N:
            raise ValueError("n_max must exceed N")
        if self.epsilon is not None and not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")


class ConstructionState:
    """Mutable state of the inductive construction.

    Scalar sequences are indexed by the step number n directly; the dense
    atom rows cover d_K..d_n and the residual history keeps r_m for
    m >= N (the verification needs every r_{n-1} with n > N).
    """

    def __init__(self, params: ConstructionParams):
        self.beta = params.beta
        self.K = params.K
        self.N = params.N
        self.n_max = params.n_max
        n_max = params.n_max
        self.q = np.zeros(n_max + 1)
        self.gamma = np.zeros(n_max + 1)
        self.alpha = np.zeros(n_max + 1)
        self.xi = np.zeros(n_max + 1)
        self.norms = np.zeros(n_max + 1)
        self.r = np.zeros(n_max)
        self.atoms = np.zeros((n_max - params.K + 1, n_max))
        self.r_hist = np.zeros((n_max - params.N + 1, n_max))
        self.n = params.K - 1

    def atom_row(self, k: int) -> np.ndarray:
        if not self.K <= k <= self.n:
            raise IndexError(f"atom {k} not built")
        return self.atoms[k - self.K]

    def residual_row(self, m: int) -> np.ndarray:
        if not self.N <= m <= self.n:
            raise IndexError(f"residual {m} not stored")
        return self.r_hist[m - self.N]

    def residual_vector(self) -> CoeffVector:
        return CoeffVector(self.r[: self.n].copy())


def init_state(params: ConstructionParams) -> ConstructionState:
    """Seed residual: all K-1 leading coefficients equal, norm K^(beta-1/2)."""
    st = ConstructionState(params)
    K, beta = params.K, params.beta
    st.r[: K - 1] = -(K ** (-0.5 + beta)) / np.sqrt(K - 1.0)
    st.q[K - 1] = q_of(K - 1, beta) if K >= 2 else np.nan
    st.norms[K - 1] = float(np.linalg.norm(st.r[: K - 1]))
    target = K ** (-0.5 + beta)
    if abs(st.norms[K - 1] - target) > 1e-12 * target:
        raise ConstructionError("seed residual norm off its schedule")
    return st


def step(state: ConstructionState, params: ConstructionParams,
         given: dict | None = None) -> ConstructionState:
    """Advance one index: build d_n and r_n, then assert the step conditions.

    `given` replays a stored step (keys q, gamma, alpha, xi) with the same
    vector arithmetic as the solving path; the condition assertions still
    run, so a corrupted sequence is caught here.
    """
    n = state.n + 1
    if n > state.n_max:
        raise ValueError("state already at n_max")
    beta = state.beta
    if given is None:
        qn = q_of(n, beta)
        gn = 1.0 / qn - 1.0 / state.q[n - 1]
    else:
        qn = given["q"]
        gn = given["gamma"]
    i = np.arange(1, n)
    w = params.phi(i / n) / n
    r = state.r
    s_n = float(w @ r[: n - 1])
    if given is None:
        if s_n == 0.0:
            raise ConstructionError(f"phi support misses residual at step {n}")
        an = (qn - gn * n ** (2.0 * beta - 1.0)) / s_n
    else:
        an = given["alpha"]
    v = gn * r[:n]
    v[: n - 1] += an * w
    nv2 = float(v @ v)
    if given is None:
        if nv2 > 1.0:
            raise ConstructionError(f"xi imaginary at step {n} -- increase K")
        xin = float(np.sqrt(1.0 - nv2))
    else:
        xin = given["xi"]
    d = v
    d[n - 1] += xin

    ip = float(r[:n] @ d)
    r[:n] -= qn * d
    rnorm = float(np.linalg.norm(r[:n]))
    target = float(_schedule(n, beta))

    problems = []
    if an < 0.0:
        problems.append(f"alpha={an!r} negative")
    if not 0.0 < xin <= 1.0:
        problems.append(f"xi={xin!r} outside (0, 1]")
    if abs(ip - qn) > CONDITION_RTOL * qn:
        problems.append(f"<r,d>={ip!r} vs q={qn!r}")
    dnorm2 = nv2 + xin * xin
    if abs(np.sqrt(dnorm2) - 1.0) > CONDITION_RTOL:
        problems.append(f"|d|={np.sqrt(dnorm2)!r}")
    if abs(rnorm - target) > CONDITION_RTOL * target:
        problems.append(f"|r|={rnorm!r} vs schedule {target!r}")
    orth = float(r[:n] @ d)
    if abs(orth) > CONDITION_RTOL:
        problems.append(f"<r_n,d_n>={orth!r}")
    if problems:
        raise ConstructionError(f"step {n} conditions violated: " + "; ".join(problems))

    state.q[n] = qn
    state.gamma[n] = gn
    state.alpha[n] = an
    state.xi[n] = xin
    state.norms[n] = rnorm
    state.atoms[n - state.K, :n] = d
    if n >= state.N:
        state.r_hist[n - state.N, :n] = r[:n]
    state.n = n
    return state


def advance(state: ConstructionState, params: ConstructionParams,
            to_n: int | None = None,
            given_rows: dict | None = None) -> ConstructionState:
    """Run steps up to `to_n` (default n_max)."""
    stop = state.n_max if to_n is None else to_n
    while state.n < stop:
        g = None
        if given_rows is not None:
            m = state.n + 1
            g = {key: given_rows[key][m] for key in ("q", "gamma", "alpha", "xi")}
        step(state, params, given=g)
    return state


def choose_epsilon(state: ConstructionState, params: ConstructionParams) -> float:
    """Largest epsilon = 2^-j passing the blended-atom inequalities.

    Candidates start at the cap epsilon |r_N| <= q_{N+1} / 2.  Only the
    inequalities involving the blended atom depend on epsilon, so the scan
    checks exactly those; the epsilon-independent pairs are the verify
    op's job.  Requires the state advanced through n_max.
    """
    if state.n != state.n_max:
        raise ValueError("advance the construction to n_max before choosing epsilon")
    N, n_max = state.N, state.n_max
    r_n_norm = state.norms[N]
    cap = 0.5 * state.q[N + 1] / r_n_norm
    hist = state.r_hist[: n_max - N]          # rows r_{n-1}, n = N+1..n_max
    u = hist @ (state.r_hist[0] / r_n_norm)   # against r_N / |r_N|
    w = hist @ state.atom_row(N)              # against d_N
    q_col = state.q[N + 1: n_max + 1]
    j = int(np.ceil(-np.log2(cap)))
    while 2.0 ** -j > cap:
        j += 1
    for jj in range(j, 61):
        eps = 2.0 ** -jj
        vals = np.abs(eps * u + np.sqrt(1.0 - eps * eps) * w)
        if bool(np.all(vals < q_col)):
            return eps
    raise ConstructionError("no admissible epsilon in the geometric grid -- increase N")


@dataclass
class AdversarialInstance:
    """Finished construction: target, dictionary, and the state behind them."""

    params: ConstructionParams
    f: CoeffVector
    d_tilde: CoeffVector
    dictionary: Dictionary
    variation_bound: float
    state: ConstructionState = field(repr=False)
    _tables: "OracleTables | None" = field(default=None, repr=False)

    @property
    def planned_labels(self) -> list[str]:
        return [f"d{n}" for n in range(self.params.N + 1, self.params.n_max + 1)]

    def oracle_tables(self) -> "OracleTables":
        if self._tables is None:
            self._tables = OracleTables(self.state, self.params.phi,
                                        self.params.epsilon)
        return self._tables


def finalize(state: ConstructionState, params: ConstructionParams) -> AdversarialInstance:
    """Assemble f = r_N, the blended atom, and the dictionary."""
    if state.n != state.n_max:
        raise ValueError("advance the construction to n_max before finalizing")
    if params.epsilon is None:
        raise ValueError("epsilon not chosen")
    eps = params.epsilon
    N = state.N
    r_n = state.r_hist[0][:N].copy()
    r_n_norm = state.norms[N]
    d_n = state.atom_row(N)[:N]
    d_til = eps * r_n / r_n_norm + np.sqrt(1.0 - eps * eps) * d_n
    til_norm = float(np.linalg.norm(d_til))
    if abs(til_norm - 1.0) > 1e-12:
        raise ConstructionError(f"blended atom norm {til_norm!r} not 1")
    atoms = [CoeffVector(d_til)]
    labels = [f"dt{N}"]
    for k in range(N, state.n_max + 1):
        atoms.append(CoeffVector(state.atom_row(k)[:k].copy()))
        labels.append(f"d{k}")
    variation = (r_n_norm / eps) * (1.0 + np.sqrt(1.0 - eps * eps))
    return AdversarialInstance(
        params=params, f=CoeffVector(r_n), d_tilde=CoeffVector(d_til.copy()),
        dictionary=Dictionary(atoms, labels), variation_bound=float(variation),
        state=state)


class OracleTables:
    """Closed-form inner products from scalar sequences alone.

    Reconstructs residual components via the component formula, atom
    components from the inductive definition, and then serves
    <r_{n-1}, d_k> for every pair through the forward recursion (k < n),
    the base equality (k = n) and the two-term recursion (k > n).  Nothing
    here reads the construction's stored vectors.
    """

    def __init__(self, state: ConstructionState, phi: PhiProfile, epsilon: float):
        self.beta = state.beta
        self.K, self.N, self.n_max = state.K, state.N, state.n_max
        self.q = state.q.copy()
        self.gamma = state.gamma.copy()
        self.alpha = state.alpha.copy()
        self.xi = state.xi.copy()
        self.epsilon = epsilon
        self._phi = phi
        self._build()

    # -- formula-level pieces -------------------------------------------

    def h_row(self, l: int) -> np.ndarray:
        """Components of the correction vector h_l (length l-1)."""
        i = np.arange(1, l)
        return (self.alpha[l] / l) * self._phi(i / l)

    def _build(self):
        K, N, n_max = self.K, self.N, self.n_max
        beta = self.beta
        q, gamma, xi = self.q, self.gamma, self.xi

        # residual components r_hat[m, j] for m in [N-1, n_max-1] via the
        # cumulative component formula; b_j covers the seed block j < K
        b = np.empty(n_max)
        b[: K - 1] = K ** (-0.5 + beta) / (q[K - 1] * np.sqrt(K - 1.0))
        b[K - 1:] = xi[K:n_max + 1]
        h_all = np.zeros((n_max - K + 1, n_max))
        for l in range(K, n_max + 1):
            h_all[l - K, : l - 1] = self.h_row(l)
        run = np.zeros(n_max)
        rhat = np.zeros((n_max - N + 1, n_max))  # rows m = N-1 .. n_max-1
        if N == K:  # seed row r_{K-1} has an empty correction sum
            rhat[0, : K - 1] = -(q[K - 1]) * b[: K - 1]
        for m in range(K, n_max):
            run[: m - 1] += h_all[m - K, : m - 1]
            if m >= N - 1:
                rhat[m - (N - 1), :m] = -(q[m]) * (b[:m] + run[:m])
        self.rhat = rhat
        self.rn_norm = float(_schedule(N, beta))

        # atom components d_hat[k] = gamma_k r_hat[k-1] + h_k + xi_k e_k
        dhat = np.zeros((n_max - N + 1, n_max))
        for k in range(N, n_max + 1):
            row = dhat[k - N]
            row[: k - 1] = self.gamma[k] * rhat[k - 1 - (N - 1), : k - 1]
            row[: k - 1] += h_all[k - K, : k - 1]
            row[k - 1] = xi[k]
        self.dhat = dhat

        til = (self.epsilon * rhat[1] / self.rn_norm
               + np.sqrt(1.0 - self.epsilon ** 2) * dhat[0])
        self.dtil_hat = til[:N].copy()

        # k < n: cumulative sums over i of <h_i, d_hat_k>
        w_mat = h_all[N + 1 - K: n_max - K] @ dhat.T   # i = N+1..n_max-1
        np.cumsum(w_mat, axis=0, out=w_mat)
        self.cw = w_mat                                 # cw[m-(N+1), k-N]
        kk = np.arange(N + 1, n_max + 1)
        self.cw_diag = np.concatenate(
            [[0.0], w_mat[kk[:-1] - (N + 1), kk[:-1] - N]])

        # blended-atom sums
        wtil = h_all[N + 1 - K: n_max - K, :N] @ self.dtil_hat
        self.ct = np.concatenate([[0.0], np.cumsum(wtil)])  # ct[m-N]

        # k > n: scan representation of the two-term recursion.  Dividing
        # the recursion value(k) = A_k value(k-1) + g(k) by the running
        # product P_k = prod A_j turns it into a cumulative sum.
        rh = rhat[1:] @ h_all[N + 1 - K:].T   # rows m = N..n_max-1, cols k = N+1..n_max
        karr = np.arange(N + 1, n_max + 1)
        a_fac = (1.0 / gamma[karr - 1] - q[karr - 1]) * gamma[karr]
        p = np.empty(n_max - N)                # p[k-(N+1)], base p[N+1] = 1
        p[0] = 1.0
        p[1:] = np.cumprod(a_fac[1:])
        self.p = p
        ratio = gamma[karr[1:]] / gamma[karr[1:] - 1]
        g2 = (rh[:, 1:] - ratio * rh[:, :-1]) / p[1:]
        cg = np.zeros((n_max - N, n_max - N))  # rows n = N+1..n_max, cols k = N+1..n_max
        np.cumsum(g2, axis=1, out=cg[:, 1:])
        self.cg = cg
        del h_all, rh

    # -- assembled rows ----------------------------------------------------

    def row(self, n: int) -> np.ndarray:
        """Oracle <r_{n-1}, d_k> for k = N..n_max (index k - N)."""
        N, n_max = self.N, self.n_max
        if not N < n <= n_max:
            raise IndexError("n out of range")
        q = self.q
        out = np.empty(n_max - N + 1)
        if n - 1 >= N + 1:
            out[: n - N] = -(q[n - 1]) * (self.cw[n - 1 - (N + 1), : n - N]
                                          - self.cw_diag[: n - N])
        else:
            out[: n - N] = 0.0  # n = N+1: single k = N term, empty i-sum
        out[n - N] = q[n]
        if n < n_max:
            nn = n - (N + 1)
            ks = slice(n - N + 1, n_max - N + 1)
            kcols = slice(n - N, n_max - N)
            out[ks] = self.p[kcols] * (q[n] / self.p[nn]
                                       + self.cg[nn, kcols] - self.cg[nn, nn])
        return out

    def tilde_value(self, n: int) -> float:
        N = self.N
        if not N < n <= self.n_max:
            raise IndexError("n out of range")
        tail = self.ct[n - 1 - N]
        return float(-(self.q[n - 1]) * (tail - self.epsilon * self.rn_norm / self.q[N]))

    def pair_value(self, n: int, k: int) -> float:
        """Per-pair recursion, following the inductive formulas literally."""
        N, n_max = self.N, self.n_max
        if not (N < n <= n_max and N <= k <= n_max):
            raise IndexError("pair out of range")
        q, gamma = self.q, self.gamma
        if k == n:
            return float(q[n])
        if k < n:
            dk = self.dhat[k - N, :k]
            acc = 0.0
            for i in range(k + 1, n):
                acc += float(self.h_row(i)[:k] @ dk)
            return -float(q[n - 1]) * acc
        rrow = self.rhat[n - 1 - (N - 1), : n - 1]
        val = float(q[n])
        for kk in range(n + 1, k + 1):
            a_fac = (1.0 / gamma[kk - 1] - q[kk - 1]) * gamma[kk]
            hk = self.h_row(kk)[: n - 1]
            hk1 = self.h_row(kk - 1)[: n - 1]
            val = a_fac * val + float(rrow @ (hk - (gamma[kk] / gamma[kk - 1]) * hk1))
        return val

    def tilde_pair_value(self, n: int) -> float:
        """Per-pair recursion for the blended atom."""
        N = self.N
        if not N < n <= self.n_max:
            raise IndexError("n out of range")
        acc = 0.0
        for i in range(N + 1, n):
            acc += float(self.h_row(i)[:N] @ self.dtil_hat)
        return -float(self.q[n - 1]) * (acc - self.epsilon * self.rn_norm / self.q[N])


def inner_product_oracle(instance: AdversarialInstance, n: int, k=None,
                         tilde: bool = False) -> float:
    """<r_{n-1}, d_k> (or the blended atom with tilde=True) by recursion only."""
    tables = instance.oracle_tables()
    if tilde:
        return tables.tilde_pair_value(n)
    if k is None:
        raise ValueError("k required unless tilde=True")
    if k == n:
        raise ValueError("k = n is the selected atom; its value is q_n by construction")
    return tables.pair_value(n, k)


@dataclass
class VerificationReport:
    """Outcome of the dual-path selection-inequality check."""

    n_pairs: int
    all_strict: bool
    min_margin: float
    min_margin_pair: tuple[int, int]
    min_margin_oracle: float
    tilde_min_margin: float
    tilde_argmin: int
    dual_max_diff: float
    diag_max_rel_err: float
    schedule_max_rel_err: float
    notes: str = ""

    @property
    def passed(self) -> bool:
        return (self.all_strict
                and self.dual_max_diff <= DUAL_PATH_TOL
                and self.diag_max_rel_err <= DIAG_RTOL
                and self.schedule_max_rel_err <= CONDITION_RTOL)

    def to_text(self) -> str:
        lines = [
            f"pairs={self.n_pairs}",
            f"all_strict={'true' if self.all_strict else 'false'}",
            f"min_margin={self.min_margin:.12g}",
            f"min_margin_pair={self.min_margin_pair[0]},{self.min_margin_pair[1]}",
            f"min_margin_oracle={self.min_margin_oracle:.12g}",
            f"tilde_min_margin={self.tilde_min_margin:.12g}",
            f"tilde_argmin={self.tilde_argmin}",
            f"dual_max_diff={self.dual_max_diff:.12g}",
            f"diag_max_rel_err={self.diag_max_rel_err:.12g}",
            f"schedule_max_rel_err={self.schedule_max_rel_err:.12g}",
            f"passed={'true' if self.passed else 'false'}",
        ]
        if self.notes:
            lines.append(f"notes={self.notes}")
        return "\n".join(lines) + "\n"


def verify(instance: AdversarialInstance, block: int = 512) -> VerificationReport:
    """Check every selection inequality by both routes and compare them.

    Reports (never raises): minimum normalized margin over all pairs
    (n, k), k != n, the blended-atom margins, the worst oracle/direct
    disagreement, the diagonal equality error, and the norm-schedule
    deviation over the whole residual history.
    """
    st = instance.state
    N, n_max = st.N, st.n_max
    tables = instance.oracle_tables()
    atoms_mat = st.atoms[N - st.K:]            # rows d_N..d_n_max
    dtil = instance.d_tilde.padded(n_max)
    q = st.q

    min_margin = np.inf
    min_pair = (-1, -1)
    min_margin_o = np.inf
    til_min = np.inf
    til_arg = -1
    dual_max = 0.0
    diag_max = 0.0
    n_pairs = 0

    for lo in range(N + 1, n_max + 1, block):
        hi = min(lo + block - 1, n_max)
        rows = st.r_hist[lo - 1 - N: hi - N]   # r_{n-1} for n in [lo, hi]
        direct = rows @ atoms_mat.T
        til_direct = rows @ dtil
        for n in range(lo, hi + 1):
            drow = direct[n - lo]
            orow = tables.row(n)
            dual_max = max(dual_max, float(np.max(np.abs(drow - orow))))
            qn = q[n]
            diag_max = max(diag_max, abs(drow[n - N] - qn) / qn)
            margins = (qn - np.abs(drow)) / qn
            margins[n - N] = np.inf
            jmin = int(np.argmin(margins))
            if margins[jmin] < min_margin:
                min_margin = float(margins[jmin])
                min_pair = (n, N + jmin)
            omargins = (qn - np.abs(orow)) / qn
            omargins[n - N] = np.inf
            min_margin_o = min(min_margin_o, float(np.min(omargins)))
            tval = float(til_direct[n - lo])
            oval = tables.tilde_value(n)
            dual_max = max(dual_max, abs(tval - oval))
            tmarg = (qn - max(abs(tval), abs(oval))) / qn
            if tmarg < til_min:
                til_min = tmarg
                til_arg = n
            n_pairs += n_max - N + 1
    sched = _schedule(np.arange(N, n_max + 1), st.beta)
    hist_norms = np.linalg.norm(st.r_hist, axis=1)
    sched_err = float(np.max(np.abs(hist_norms / sched - 1.0)))

    return VerificationReport(
        n_pairs=n_pairs,
        all_strict=bool(min_margin > 0.0 and min_margin_o > 0.0 and til_min > 0.0),
        min_margin=float(min_margin), min_margin_pair=min_pair,
        min_margin_oracle=float(min_margin_o),
        tilde_min_margin=float(til_min), tilde_argmin=til_arg,
        dual_max_diff=float(dual_max), diag_max_rel_err=float(diag_max),
        schedule_max_rel_err=sched_err)


def build_instance(phi: PhiProfile, K: int = 200, N: int = 400,
                   n_max: int = 5000, epsilon: float | None = None,
                   max_doublings: int = 4):
    """Construct, choose epsilon, finalize, verify; double K and N on failure.

    Returns (instance, verification_report).  Raises ConstructionError
    once the doubling budget is exhausted.
    """
    last_err = ConstructionError(f"N={N} leaves no room below n_max={n_max}")
    for attempt in range(max_doublings + 1):
        kk, nn = K << attempt, N << attempt
        if nn >= n_max:
            break
        params = ConstructionParams(beta=phi.beta, K=kk, N=nn, n_max=n_max,
                                    epsilon=epsilon, phi=phi)
        try:
            state = init_state(params)
            advance(state, params)
            if params.epsilon is None:
                params.epsilon = choose_epsilon(state, params)
            inst = finalize(state, params)
            report = verify(inst)
            if not report.passed:
                raise ConstructionError(
                    f"verification failed at K={kk}, N={nn}: min margin "
                    f"{report.min_margin:.3e}, dual diff {report.dual_max_diff:.3e}")
            if attempt:
                report.notes = f"succeeded after {attempt} doubling(s): K={kk}, N={nn}"
            return inst, report
        except ConstructionError as err:
            last_err = err
    raise ConstructionError(f"construction failed after doublings: {last_err}")
