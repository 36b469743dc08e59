"""Permutation-block compression: algebra identities and program equivalence."""

import itertools

import numpy as np
import pytest

from secrecy.quantum import DensityOperator, ValidationError, random_density
from secrecy.entropy import (EntropyQuery, aep_bounds, h_min, h_min_smooth,
                             h_max_smooth)
from secrecy.symmetry import (SymmetricBlocks, _perm_unitary,
                              h_max_smooth_power, h_min_smooth_power)


@pytest.fixture(scope="module")
def rng():
    return np.random.default_rng(5151)


def _random_invariant(d, n, rng):
    perms = list(itertools.permutations(range(n)))
    h = rng.normal(size=(d ** n,) * 2) + 1j * rng.normal(size=(d ** n,) * 2)
    h = h + h.conj().T
    return sum(_perm_unitary(d, n, p) @ h @ _perm_unitary(d, n, p).T
               for p in perms) / len(perms)


class TestBlockStructure:
    def test_multiplicity_tables(self):
        tables = {
            (2, 2): {"sym": 3, "anti": 1},
            (3, 2): {"sym": 6, "anti": 3},
            (2, 3): {"sym": 4, "mixed": 2},
            (4, 3): {"sym": 20, "anti": 4, "mixed": 20},
        }
        for (d, n), want in tables.items():
            got = {ir["name"]: ir["mult"] for ir in SymmetricBlocks(d, n).irreps}
            assert got == want

    def test_permutation_action_is_a_homomorphism(self, rng):
        perms = list(itertools.permutations(range(3)))
        for _ in range(6):
            p = perms[rng.integers(len(perms))]
            q = perms[rng.integers(len(perms))]
            pq = tuple(p[q[k]] for k in range(3))
            assert np.allclose(
                _perm_unitary(2, 3, p) @ _perm_unitary(2, 3, q),
                _perm_unitary(2, 3, pq))

    def test_reconstruction_maps_are_isometries(self):
        for d, n in [(2, 3), (4, 3), (2, 2)]:
            sb = SymmetricBlocks(d, n)
            for ir in sb.irreps:
                for c in ir["isoms"]:
                    assert np.allclose(c.conj().T @ c, np.eye(ir["mult"]),
                                       atol=1e-10)

    def test_invariant_roundtrip_and_trace_weights(self, rng):
        for d, n in [(2, 3), (4, 3)]:
            sb = SymmetricBlocks(d, n)
            inv = _random_invariant(d, n, rng)
            blocks = sb.compress(inv)
            assert np.linalg.norm(sb.reconstruct(blocks) - inv) < 1e-9
            weighted = sum(w * np.trace(b).real
                           for w, b in zip(sb.weights, blocks))
            assert weighted == pytest.approx(np.trace(inv).real, abs=1e-9)

    def test_invariant_psd_iff_blocks_psd(self, rng):
        sb = SymmetricBlocks(2, 3)
        inv = _random_invariant(2, 3, rng)
        inv = inv @ inv.conj().T  # invariant and PSD
        for b in sb.compress(inv):
            assert np.linalg.eigvalsh(b).min() > -1e-10


class TestProgramEquivalence:
    def test_two_copies_match_generic_smoothing(self, rng):
        rho = random_density((2, 2), rng, rank=2)
        big = DensityOperator(np.kron(rho.mat, rho.mat), (2, 2, 2, 2))
        pairs = [
            (h_min_smooth_power(rho, 2, 0.3),
             h_min_smooth(EntropyQuery(big, (0, 2), (1, 3), 0.3))),
            (h_max_smooth_power(rho, 2, 0.3),
             h_max_smooth(EntropyQuery(big, (0, 2), (1, 3), 0.3))),
            (h_min_smooth_power(rho, 2, 0.0),
             h_min(EntropyQuery(big, (0, 2), (1, 3)))),
        ]
        for sym, generic in pairs:
            assert sym == pytest.approx(generic, abs=1e-6)

    def test_single_copy_delegates(self, rng):
        rho = random_density((2, 2), rng)
        assert h_min_smooth_power(rho, 1, 0.2) \
            == pytest.approx(h_min_smooth(EntropyQuery(rho, (0,), (1,), 0.2)),
                             abs=1e-9)
        assert h_max_smooth_power(rho, 1, 0.2) \
            == pytest.approx(h_max_smooth(EntropyQuery(rho, (0,), (1,), 0.2)),
                             abs=1e-9)

    def test_three_copies_sit_inside_the_product_estimates(self, rng):
        rho = random_density((2, 2), rng, rank=2)
        lo, hi = aep_bounds(rho, [0], [1], 3, 0.3)
        assert h_min_smooth_power(rho, 3, 0.3) >= lo - 1e-6
        assert h_max_smooth_power(rho, 3, 0.3) <= hi + 1e-6


class TestValidation:
    def test_rejects_unsupported_block_lengths(self, rng):
        rho = random_density((2, 2), rng)
        with pytest.raises(ValidationError):
            h_min_smooth_power(rho, 4, 0.3)

    def test_rejects_non_bipartite_state(self, rng):
        rho = random_density((2, 2, 2), rng)
        with pytest.raises(ValidationError):
            h_min_smooth_power(rho, 2, 0.3)

    def test_rejects_subnormalized_state(self, rng):
        rho = random_density((2, 2), rng)
        sub = DensityOperator(0.5 * rho.mat, (2, 2))
        with pytest.raises(ValidationError):
            h_min_smooth_power(sub, 2, 0.3)

    def test_rejects_eps_out_of_range(self, rng):
        rho = random_density((2, 2), rng)
        with pytest.raises(ValidationError):
            h_min_smooth_power(rho, 2, 1.0)
