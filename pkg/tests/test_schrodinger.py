import numpy as np
import pytest

from hullspec.schrodinger import (OperatorSpec, assemble_finite, covariance_check,
                                  fibonacci_model, laplacian, potential_model, random_spec,
                                  validate)
from hullspec.spectra import HermitianMatrix
from hullspec.symdyn import (GOLDEN, MechanicalConfiguration, PeriodicConfiguration,
                             SubstitutionConfiguration, fibonacci_subshift)
from oracles import path_laplacian_eigs, ring_laplacian_eigs

FIB_X = MechanicalConfiguration(GOLDEN, 0.0)


def test_validate_examples():
    assert validate(laplacian()).ok
    one_way = OperatorSpec({(1,): {}}, hop_defaults={(1,): 1.0})
    rep = validate(one_way)
    assert not rep.ok and rep.violations[0].rule == "R2"
    both_i = OperatorSpec({(1,): {}, (-1,): {}}, hop_defaults={(1,): 1j, (-1,): 1j})
    rep = validate(both_i)
    assert rep.violations and {v.rule for v in rep.violations} == {"R3"}
    fixed = OperatorSpec({(1,): {}, (-1,): {}}, hop_defaults={(1,): 1j, (-1,): -1j})
    assert validate(fixed).ok


def test_r1_violation():
    spec = OperatorSpec({(1,): {}, (-1,): {}}, {"a": 1j}, hop_defaults={(1,): 1, (-1,): 1})
    assert [v.rule for v in validate(spec).violations] == ["R1"]


def test_r3_uses_recentred_word():
    # t_{+1} reads the right neighbour; R3 forces t_{-1} to read the left one
    plus = {"aaa": 1, "aab": 2, "baa": 1, "bab": 2, "aba": 3, "abb": 4, "bba": 3, "bbb": 4}
    # t_{-1}(w) = conj(t_1(w shifted by -1)); t_1 depends on (w_0, w_1), so t_{-1} on (w_{-1}, w_0)
    t1 = {("a", "a"): 1, ("a", "b"): 2, ("b", "a"): 3, ("b", "b"): 4}
    good_minus = {w: t1[(w[0], w[1])] for w in plus}
    spec = OperatorSpec({(1,): plus, (-1,): good_minus}, radius=1)
    assert validate(spec).ok
    bad = dict(good_minus, aba=5)
    rep = validate(OperatorSpec({(1,): plus, (-1,): bad}, radius=1))
    # every listed violation involves the edited entry, seen from either side
    assert all("5" in v.detail for v in rep.violations)
    assert len(rep.violations) == len(set(rep.violations)) == 3
    assert (("R3", (-1,), "aba") in {(v.rule, v.hop, v.word) for v in rep.violations})


def test_validate_on_subshift_restricts_words():
    # a spec whose R3 fails only on words containing "bb", absent from Fibonacci
    t1 = {("a", "a"): 1, ("a", "b"): 1, ("b", "a"): 1, ("b", "b"): 7}
    plus = {w: 1 for w in ("aaa", "aab", "aba", "abb", "baa", "bab", "bba", "bbb")}
    minus = {w: t1[(w[0], w[1])] for w in plus}
    spec = OperatorSpec({(1,): plus, (-1,): minus}, radius=1)
    assert not validate(spec).ok
    assert validate(spec, fibonacci_subshift()).ok


def test_open_laplacian():
    H = assemble_finite(laplacian(), PeriodicConfiguration("a"), 3)
    assert np.array_equal(H.data.real, [[0, 1, 0], [1, 0, 1], [0, 1, 0]])
    assert np.allclose(H.eigenvalues(), [-np.sqrt(2), 0, np.sqrt(2)], atol=1e-14)
    for N in (1, 5, 12):
        H = assemble_finite(laplacian(), FIB_X, N)
        assert np.allclose(H.eigenvalues(), path_laplacian_eigs(N), atol=1e-12)


def test_periodic_laplacian():
    for N in (1, 2, 3, 8, 11):
        H = assemble_finite(laplacian(), PeriodicConfiguration("a"), N, "periodic")
        assert np.allclose(H.eigenvalues(), ring_laplacian_eigs(N), atol=1e-12)


def test_constant_potential_only():
    spec = OperatorSpec({}, potential_default=1.5)
    H = assemble_finite(spec, FIB_X, 6)
    assert np.array_equal(H.data, 1.5 * np.eye(6))


def test_assembly_errors():
    with pytest.raises(ValueError):
        assemble_finite(laplacian(), PeriodicConfiguration("ab"), 5, "periodic")
    with pytest.raises(ValueError):
        assemble_finite(laplacian(), FIB_X, 8, "periodic")
    with pytest.raises(ValueError):
        assemble_finite(laplacian(), FIB_X, 0)


def test_matrix_convention():
    # M[g, g+h] = t_h(word at g)
    spec = OperatorSpec({(1,): {"a": 2.0, "b": 3.0}, (-1,): {"a": 2.0, "b": 3.0}}, radius=0)
    # R3 with radius 0: t_{-1}(x) = conj(t_1(x at -1)), so this spec is only
    # Hermitian on configurations where neighbours carry the same letter
    x = PeriodicConfiguration("a")
    M = assemble_finite(spec, x, 4).data
    assert M[0, 1] == 2.0 and M[1, 0] == 2.0
    spec2 = potential_model({"a": 1.0, "b": -2.0})
    M = assemble_finite(spec2, PeriodicConfiguration("ab"), 4).data
    assert list(np.diag(M).real) == [1, -2, 1, -2]


def test_random_specs_hermitian():
    rng = np.random.default_rng(0)
    for i in range(200):
        spec = random_spec(rng, radius=int(rng.integers(0, 2)), max_hop=int(rng.integers(1, 3)))
        assert validate(spec).ok
        x = MechanicalConfiguration(float(rng.uniform(0.1, 0.9)), float(rng.random()))
        H = assemble_finite(spec, x, (-5, 10))
        assert isinstance(H, HermitianMatrix)
        assert H.norm() <= spec.hop_bound() + 1e-12


def test_interlacing():
    rng = np.random.default_rng(1)
    for _ in range(30):
        spec = random_spec(rng)
        x = MechanicalConfiguration(GOLDEN, float(rng.random()))
        for N in (4, 9):
            a = assemble_finite(spec, x, N).eigenvalues()
            b = assemble_finite(spec, x, N + 1).eigenvalues()
            assert np.all(b[:-1] <= a + 1e-10) and np.all(a <= b[1:] + 1e-10)


def test_covariance():
    fib = fibonacci_model(1.0)
    assert covariance_check(fib, FIB_X, 3, (-40, 40), 5) <= 1e-15
    rng = np.random.default_rng(2)
    for _ in range(10):
        spec = random_spec(rng, 1, 2)
        assert covariance_check(spec, FIB_X, 0, (-20, 20), 3) == 0
        assert covariance_check(spec, FIB_X, int(rng.integers(-6, 7)), (-20, 20), 3) == 0
    assert covariance_check(laplacian(), FIB_X, 5, 30, 1) == 0
    with pytest.raises(ValueError):
        covariance_check(fib, FIB_X, 0, 30, 0)
    with pytest.raises(ValueError):
        covariance_check(fib, FIB_X, 0, 6, 3)


def test_locality():
    rng = np.random.default_rng(3)
    spec = random_spec(rng, 1, 2)
    fib = SubstitutionConfiguration((("a", "ab"), ("b", "a")), "a")
    A = assemble_finite(spec, fib, (0, 20)).data

    # change symbols far outside the box: radius 1 only sees [-1, 21]
    class Patched:
        period = None

        def window(self, n0, n1):
            return "".join(fib.window(n, n) if -1 <= n <= 21 else "b" for n in range(n0, n1 + 1))

    B = assemble_finite(spec, Patched(), (0, 20)).data
    assert np.array_equal(A, B)


def test_text_round_trip():
    rng = np.random.default_rng(4)
    for spec in (laplacian(), fibonacci_model(0.7), random_spec(rng, 1, 2), laplacian(2, 1j)):
        text = spec.to_text()
        assert text.startswith("# hullspec operator-spec v1")
        back = OperatorSpec.from_text(text)
        assert back.to_text() == text
        assert back.hoppings == spec.hoppings and back.potential == spec.potential


def test_potential_shift_translates_spectrum():
    spec = fibonacci_model(1.0)
    a = assemble_finite(spec, FIB_X, 30).eigenvalues()
    b = assemble_finite(spec.with_potential_shift(0.5), FIB_X, 30).eigenvalues()
    assert np.allclose(b, a + 0.5, atol=1e-12)
