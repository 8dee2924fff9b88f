import numpy as np
import pytest

from mpursuit.greedy_algorithms import Dictionary, run, select_atom
from mpursuit.linear_core import CoeffVector, basis_vector


def ortho_dict(dim, n_atoms=None):
    n_atoms = dim if n_atoms is None else n_atoms
    return Dictionary([basis_vector(k + 1, dim) for k in range(n_atoms)],
                      [f"e{k + 1}" for k in range(n_atoms)])


def random_dict(rng, dim, n_atoms):
    atoms = []
    for _ in range(n_atoms):
        v = rng.standard_normal(dim)
        atoms.append(CoeffVector(v / np.linalg.norm(v)))
    return Dictionary(atoms)


def test_select_axis_aligned():
    d = ortho_dict(2)
    assert select_atom(CoeffVector.of(0.6, 0.8), d) == ("e2", 1, pytest.approx(0.8))


def test_select_symmetry_picks_negated_atom():
    d = ortho_dict(2)
    label, sign, value = select_atom(CoeffVector.of(-0.9, 0.1), d)
    assert (label, sign) == ("e1", -1)
    assert value == pytest.approx(0.9)


def test_select_zero_residual_tie_rule():
    d = ortho_dict(2)
    assert select_atom(CoeffVector.of(0.0, 0.0), d) == ("e1", 1, 0.0)


def test_select_empty_dictionary():
    with pytest.raises(ValueError, match="empty dictionary"):
        select_atom(CoeffVector.of(1.0), Dictionary([]))


def test_select_negated_dictionary_invariance(rng):
    for _ in range(20):
        d = random_dict(rng, 6, 9)
        neg = Dictionary([CoeffVector(-a.coeffs) for a in d.atoms], d.labels)
        r = CoeffVector(rng.standard_normal(6))
        l1, s1, v1 = select_atom(r, d)
        l2, s2, v2 = select_atom(r, neg)
        assert l1 == l2 and v1 == pytest.approx(v2, abs=1e-15) and s1 == -s2


def test_dictionary_rejects_non_unit_atoms():
    with pytest.raises(ValueError, match="norm"):
        Dictionary([CoeffVector.of(1.0, 1.0)])


def test_pga_exact_recovery_orthonormal():
    trace = run("pga", CoeffVector.of(0.6, 0.8), ortho_dict(2), 2)
    assert [s.atom_id for s in trace.steps] == ["e2", "e1"]
    assert trace.residual_norms == pytest.approx([0.6, 0.0], abs=1e-15)


def test_pga_shrink_single_direction():
    trace = run("pga_shrink", CoeffVector.of(0.0, 1.0), ortho_dict(2), 1,
                shrinkage=0.5)
    s0 = trace.steps[0]
    assert s0.coefficient == pytest.approx(0.5)
    assert s0.residual_norm == pytest.approx(0.5)


def test_oga_exact_on_full_span(rng):
    dim, k = 8, 5
    d = ortho_dict(dim, k)
    coeffs = rng.standard_normal(k)
    f = CoeffVector(np.concatenate([coeffs, np.zeros(dim - k)]))
    trace = run("oga", f, d, k)
    assert trace.residual_norms[-1] <= 1e-12


def test_run_validation():
    d = ortho_dict(2)
    f = CoeffVector.of(1.0, 0.0)
    with pytest.raises(ValueError):
        run("nope", f, d, 1)
    with pytest.raises(ValueError):
        run("pga", f, d, 0)
    with pytest.raises(ValueError):
        run("pga_shrink", f, d, 1, shrinkage=0.0)
    with pytest.raises(ValueError):
        run("rga", f, d, 1)


@pytest.mark.filterwarnings("ignore:invalid value")
def test_numeric_breakdown_detected():
    d = ortho_dict(2)
    with pytest.raises(RuntimeError, match="numeric breakdown at step 1"):
        run("pga", CoeffVector.of(np.inf, 0.0), d, 3)


def test_early_halt_below_floor():
    trace = run("pga", CoeffVector.of(0.3, 0.4), ortho_dict(2), 50)
    assert len(trace.steps) == 2  # exact recovery, then halt


def test_pga_energy_identity_random(rng):
    for _ in range(100):
        dim = int(rng.integers(3, 21))
        d = random_dict(rng, dim, int(rng.integers(3, 51)))
        f = CoeffVector(rng.standard_normal(dim))
        trace = run("pga", f, d, 15)
        prev = float(np.linalg.norm(f.coeffs)) ** 2
        for s in trace.steps:
            expected = prev - s.coefficient ** 2
            assert s.residual_norm ** 2 == pytest.approx(expected, rel=1e-10,
                                                         abs=1e-13)
            prev = s.residual_norm ** 2


def test_pga_shrink_energy_identity_random(rng):
    s_val = 0.6
    for _ in range(100):
        dim = int(rng.integers(3, 15))
        d = random_dict(rng, dim, int(rng.integers(3, 30)))
        f = CoeffVector(rng.standard_normal(dim))
        trace = run("pga_shrink", f, d, 10, shrinkage=s_val)
        prev = float(np.linalg.norm(f.coeffs)) ** 2
        for st in trace.steps:
            best = st.coefficient / s_val  # selection inner product
            expected = prev - s_val * (2 - s_val) * best ** 2
            assert st.residual_norm ** 2 == pytest.approx(expected, rel=1e-10,
                                                          abs=1e-13)
            prev = st.residual_norm ** 2


def test_residual_norm_non_increasing(rng):
    for alg, s in (("pga", 1.0), ("pga_shrink", 0.35)):
        d = random_dict(rng, 10, 25)
        f = CoeffVector(rng.standard_normal(10))
        norms = run(alg, f, d, 30, shrinkage=s).residual_norms
        assert np.all(np.diff(norms) <= 1e-14)


def test_oga_residual_orthogonal_to_selected(rng):
    dim = 12
    d = random_dict(rng, dim, 30)
    f = CoeffVector(rng.standard_normal(dim))
    trace = run("oga", f, d, 8)
    mat = d.matrix()
    r = f.padded(dim).copy()
    # rebuild the final residual by projecting f on the selected span
    sel = mat[trace.atom_indices]
    coef, *_ = np.linalg.lstsq(sel.T, f.padded(dim), rcond=None)
    r = f.padded(dim) - sel.T @ coef
    for j in trace.atom_indices:
        assert abs(mat[j] @ r) <= 1e-9


def test_oga_beats_pga_on_same_selections(rng):
    # projection optimality: projecting onto the atoms pga picked can only
    # lower the residual norm
    for _ in range(10):
        dim = int(rng.integers(4, 12))
        d = random_dict(rng, dim, 20)
        f = CoeffVector(rng.standard_normal(dim))
        trace = run("pga", f, d, 8)
        mat = d.matrix()
        for n in range(1, len(trace.steps) + 1):
            sel = mat[trace.atom_indices[:n]]
            coef, *_ = np.linalg.lstsq(sel.T, f.padded(dim), rcond=None)
            proj_norm = float(np.linalg.norm(f.padded(dim) - sel.T @ coef))
            assert proj_norm <= trace.steps[n - 1].residual_norm + 1e-12


def test_rga_runs_and_records_relaxation_coefficients(rng):
    d = random_dict(rng, 6, 12)
    f = CoeffVector(rng.standard_normal(6))
    v = 3.0
    trace = run("rga", f, d, 5, variation_bound=v)
    assert trace.steps[0].coefficient == pytest.approx(v)
    for n in range(2, 6):
        assert trace.steps[n - 1].coefficient == pytest.approx(2 * v / n)


def test_trace_csv_shape():
    trace = run("pga", CoeffVector.of(0.6, 0.8), ortho_dict(2), 2)
    lines = trace.to_csv().strip().splitlines()
    assert lines[0] == "n,residual_norm,atom_id,sign,coefficient"
    assert len(lines) == 3
