"""Wiretap-code containers, state assembly, figures of merit, and search."""

import math

import numpy as np
import pytest

from secrecy.channels import (bsc_wiretap_channel, copy_eve_channel,
                              noiseless_trivial_eve_channel)
from secrecy.codes import (BUDGET_ENV, CodePerformance, SearchConfig,
                           WiretapCode, _discrimination_sdp, _grid_rows,
                           all_strings, brute_force_M, channel_string_state,
                           decode_distribution, deterministic_code,
                           encoder_output_states, evaluate_code, joint_state,
                           nogo_mixture_code, optimal_decoder, string_index)
from secrecy.quantum import ValidationError

RNG = np.random.default_rng(20260822)


class TestWiretapCode:
    def test_valid_code_and_rate(self):
        code = WiretapCode(2, 1, 2, np.array([[1.0, 0.0], [0.0, 1.0]]))
        assert code.rate == pytest.approx(1.0)
        code4 = WiretapCode(4, 2, 2, np.eye(4))
        assert code4.rate == pytest.approx(1.0)

    def test_encoder_shape_must_match(self):
        with pytest.raises(ValidationError, match="shape"):
            WiretapCode(2, 2, 2, np.eye(2))

    def test_rows_must_be_distributions(self):
        with pytest.raises(ValidationError, match="negative"):
            WiretapCode(1, 1, 2, np.array([[1.5, -0.5]]))
        with pytest.raises(ValidationError, match="sum to one"):
            WiretapCode(1, 1, 2, np.array([[0.5, 0.4]]))

    def test_decoder_validation(self):
        enc = np.array([[1.0, 0.0], [0.0, 1.0]])
        eye = np.eye(2, dtype=complex)
        with pytest.raises(ValidationError, match="one element per"):
            WiretapCode(2, 1, 2, enc, decoder=(eye,))
        bad_herm = np.array([[0.0, 1.0], [0.0, 0.0]])
        with pytest.raises(ValidationError, match="Hermitian"):
            WiretapCode(2, 1, 2, enc, decoder=(bad_herm, eye - bad_herm))
        neg = np.diag([1.5, -0.5]).astype(complex)
        with pytest.raises(ValidationError, match="not PSD"):
            WiretapCode(2, 1, 2, enc, decoder=(neg, eye - neg))
        with pytest.raises(ValidationError, match="identity"):
            WiretapCode(2, 1, 2, enc, decoder=(0.5 * eye, 0.4 * eye))

    def test_deterministic_code_layout(self):
        code = deterministic_code([(0, 1), (1, 0)], 2, 2)
        assert code.encoder[0, 1] == 1.0 and code.encoder[1, 2] == 1.0
        short = deterministic_code([0, 1], 1, 2)
        assert np.allclose(short.encoder, np.eye(2))
        with pytest.raises(ValidationError, match="length"):
            deterministic_code([(0, 1)], 1, 2)

    def test_string_index_is_lexicographic(self):
        assert string_index((0, 1), 2) == 1
        assert string_index((1, 0), 2) == 2
        assert all_strings(2, 2) == [(0, 0), (0, 1), (1, 0), (1, 1)]
        with pytest.raises(ValidationError, match="outside"):
            string_index((2,), 2)


class TestStateAssembly:
    def test_string_state_groups_receivers_first(self):
        ce = copy_eve_channel(2)
        state = channel_string_state(ce, (0, 1))
        assert state.dims == (4, 4)
        expected = np.zeros((16, 16))
        expected[1 * 4 + 1, 1 * 4 + 1] = 1.0  # B-string 01, E-string 01
        assert np.max(np.abs(state.mat - expected)) < 1e-14

    def test_string_state_against_term_oracle(self):
        bsc = bsc_wiretap_channel(0.1, 0.2)
        state = channel_string_state(bsc, (1, 0))
        # independent assembly: kron per system after collecting marjoints
        s1, s0 = bsc.states[1].mat, bsc.states[0].mat
        t1 = s1.reshape(2, 2, 2, 2)
        t0 = s0.reshape(2, 2, 2, 2)
        expected = np.einsum("aebf,cgdh->acegbdfh", t1, t0).reshape(16, 16)
        assert np.max(np.abs(state.mat - expected)) < 1e-14

    def test_encoder_average(self):
        ce = copy_eve_channel(2)
        code = WiretapCode(1, 1, 2, np.array([[0.25, 0.75]]))
        (avg,) = encoder_output_states(code, ce)
        expected = 0.25 * channel_string_state(ce, (0,)).mat \
            + 0.75 * channel_string_state(ce, (1,)).mat
        assert np.max(np.abs(avg.mat - expected)) < 1e-14

    def test_joint_state_of_perfect_code(self):
        nt = noiseless_trivial_eve_channel(2)
        code = deterministic_code([0, 1], 1, 2,
                                  decoder=(np.diag([1.0, 0.0]).astype(complex),
                                           np.diag([0.0, 1.0]).astype(complex)))
        js = joint_state(code, nt)
        assert js.dims == (2, 2, 1)
        ideal = np.zeros((4, 4))
        ideal[0, 0] = ideal[3, 3] = 0.5
        assert np.max(np.abs(js.mat - ideal)) < 1e-14

    def test_joint_state_single_message(self):
        ce = copy_eve_channel(2)
        code = WiretapCode(1, 1, 2, np.array([[0.0, 1.0]]))
        js = joint_state(code, ce)
        assert js.dims == (1, 1, 2)
        expected = np.diag([0.0, 1.0])
        assert np.max(np.abs(js.mat - expected)) < 1e-14

    def test_joint_state_against_summation_oracle(self):
        bsc = bsc_wiretap_channel(0.15, 0.25)
        enc = np.array([[0.7, 0.3], [0.2, 0.8]])
        povm, _ = optimal_decoder(enc, bsc, 1)
        code = WiretapCode(2, 1, 2, enc, decoder=povm)
        js = joint_state(code, bsc)
        expected = np.zeros((8, 8), dtype=complex)
        for u in range(2):
            for k in range(2):
                rho = channel_string_state(bsc, (k,)).mat.reshape(2, 2, 2, 2)
                for uh in range(2):
                    t = np.einsum("ba,aibj->ij", povm[uh], rho)
                    lo = (u * 2 + uh) * 2
                    expected[lo:lo + 2, lo:lo + 2] += 0.5 * enc[u, k] * t
        assert np.max(np.abs(js.mat - expected)) < 1e-12

    def test_budget_guard(self, monkeypatch):
        ce = copy_eve_channel(2)
        monkeypatch.setenv(BUDGET_ENV, "8")
        code = WiretapCode(4, 1, 2, np.tile([0.5, 0.5], (4, 1)))
        with pytest.raises(ValidationError, match=BUDGET_ENV):
            encoder_output_states(code, ce)
        monkeypatch.setenv(BUDGET_ENV, "not-a-number")
        with pytest.raises(ValidationError, match="integer"):
            encoder_output_states(code, ce)

    def test_compatibility_checks(self):
        ce = copy_eve_channel(2)
        code3 = WiretapCode(1, 1, 3, np.array([[1.0, 0.0, 0.0]]))
        with pytest.raises(ValidationError, match="alphabet"):
            encoder_output_states(code3, ce)
        wrong = WiretapCode(2, 1, 2, np.eye(2),
                            decoder=(np.eye(4, dtype=complex) / 2,) * 2)
        with pytest.raises(ValidationError, match="decoder acts"):
            joint_state(wrong, ce)
        with pytest.raises(ValidationError, match="no decoder"):
            joint_state(WiretapCode(2, 1, 2, np.eye(2)), ce)


class TestEvaluate:
    def test_perfect_code_is_exact(self):
        nt = noiseless_trivial_eve_channel(2)
        code = deterministic_code([0, 1], 1, 2)
        for mode in ("optimized", "fixed"):
            perf = evaluate_code(code, nt, mode)
            assert perf.eps_star == 0.0
            assert perf.delta_star == 0.0
            assert perf.success_prob == pytest.approx(1.0, abs=1e-12)
            assert perf.rate == pytest.approx(1.0)
            assert perf.privacy_mode == mode

    def test_copy_eve_full_leakage(self):
        ce = copy_eve_channel(2)
        code = deterministic_code([0, 1], 1, 2)
        opt = evaluate_code(code, ce, "optimized")
        fix = evaluate_code(code, ce, "fixed")
        assert opt.eps_star == 0.0
        assert opt.delta_star == pytest.approx(1 / math.sqrt(2), abs=1e-8)
        assert fix.delta_star == pytest.approx(1 / math.sqrt(2), abs=1e-12)

    def test_optimized_never_beats_fixed(self):
        bsc = bsc_wiretap_channel(0.1, 0.2)
        for _ in range(4):
            enc = RNG.dirichlet(np.ones(2), size=2)
            code = WiretapCode(2, 1, 2, enc)
            opt = evaluate_code(code, bsc, "optimized")
            fix = evaluate_code(code, bsc, "fixed")
            assert opt.delta_star <= fix.delta_star + 1e-7

    def test_success_probability_matches_distribution(self):
        bsc = bsc_wiretap_channel(0.1, 0.2)
        enc = np.array([[0.9, 0.1], [0.3, 0.7]])
        povm, _ = optimal_decoder(enc, bsc, 1)
        code = WiretapCode(2, 1, 2, enc, decoder=povm)
        p = decode_distribution(code, bsc)
        perf = evaluate_code(code, bsc, "fixed")
        assert perf.success_prob == pytest.approx(float(np.trace(p)), abs=1e-12)
        assert p.sum() == pytest.approx(1.0, abs=1e-9)

    def test_bad_mode_rejected(self):
        nt = noiseless_trivial_eve_channel(2)
        code = deterministic_code([0, 1], 1, 2)
        with pytest.raises(ValidationError, match="privacy_mode"):
            evaluate_code(code, nt, "loose")


class TestOptimalDecoder:
    def test_orthogonal_pair_decodes_exactly(self):
        ce = copy_eve_channel(2)
        povm, succ = optimal_decoder(np.eye(2), ce, 1)
        assert succ == 1.0
        assert np.max(np.abs(sum(povm) - np.eye(2))) < 1e-12

    def test_four_orthogonal_strings(self):
        nt = noiseless_trivial_eve_channel(2)
        povm, succ = optimal_decoder(np.eye(4), nt, 2)
        assert succ == pytest.approx(1.0, abs=1e-14)
        assert len(povm) == 4

    def test_identical_states_coin_flip(self):
        nt = noiseless_trivial_eve_channel(2)
        enc = np.array([[0.5, 0.5], [0.5, 0.5]])
        _, succ = optimal_decoder(enc, nt, 1)
        assert succ == pytest.approx(0.5, abs=1e-12)

    def test_helstrom_agrees_with_sdp(self):
        bsc = bsc_wiretap_channel(0.1, 0.2)
        enc = np.eye(2)
        povm, succ = optimal_decoder(enc, bsc, 1)
        code = WiretapCode(2, 1, 2, enc)
        bob = [s.partial_trace([0]).mat
               for s in encoder_output_states(code, bsc)]
        _, sdp_succ = _discrimination_sdp(bob, None)
        gap = 0.5 * np.sum(np.abs(np.linalg.eigvalsh(bob[0] - bob[1])))
        assert succ == pytest.approx(0.5 + 0.5 * gap, abs=1e-12)
        assert succ == pytest.approx(sdp_succ, abs=1e-7)

    def test_beats_enumerated_projective_decoders(self):
        bsc = bsc_wiretap_channel(0.2, 0.3)
        enc = np.array([[0.8, 0.2], [0.1, 0.9]])
        code = WiretapCode(2, 1, 2, enc)
        bob = [s.partial_trace([0]).mat
               for s in encoder_output_states(code, bsc)]
        _, best = optimal_decoder(enc, bsc, 1)
        for theta in np.linspace(0.0, math.pi, 13):
            v = np.array([math.cos(theta), math.sin(theta)])
            p0 = np.outer(v, v).astype(complex)
            for e0 in (p0, np.eye(2) - p0):
                succ = 0.5 * np.real(np.trace(e0 @ bob[0])
                                     + np.trace((np.eye(2) - e0) @ bob[1]))
                assert best >= succ - 1e-9

    def test_sdp_path_returns_valid_povm(self):
        bsc = bsc_wiretap_channel(0.1, 0.2)
        enc = np.array([[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]])
        povm, succ = optimal_decoder(enc, bsc, 1)
        total = sum(povm)
        assert np.max(np.abs(total - np.eye(2))) < 1e-12
        for e in povm:
            assert np.linalg.eigvalsh(e).min() > -1e-9
        assert 1 / 3 <= succ <= 1.0


class TestNogoMixture:
    def test_weights_are_squared_mixing(self):
        base = deterministic_code([0, 1], 1, 2)
        mix = nogo_mixture_code(base, 0.8, (0,))
        assert np.allclose(mix.encoder, [[1.0, 0.0], [0.36, 0.64]])

    def test_endpoints(self):
        base = deterministic_code([0, 1], 1, 2)
        assert np.allclose(nogo_mixture_code(base, 1.0, (0,)).encoder,
                           base.encoder)
        const = nogo_mixture_code(base, 0.0, (1,))
        assert np.allclose(const.encoder, [[0.0, 1.0], [0.0, 1.0]])
        ce = copy_eve_channel(2)
        perf = evaluate_code(const, ce, "optimized")
        assert perf.delta_star == 0.0

    def test_copy_eve_leakage_closed_form(self):
        # biased rows (1,0) and (0.36, 0.64) against reference diag(s, 1-s):
        # F = max_s [ (1 + 0.6) sqrt(s) + 0.8 sqrt(1-s) ] / 2 = sqrt(3.2)/2,
        # so the optimized leakage is sqrt(1 - 3.2/4) = sqrt(0.2); the fixed
        # reference diag(0.68, 0.32) gives the larger value below.
        ce = copy_eve_channel(2)
        base = deterministic_code([0, 1], 1, 2)
        mix = nogo_mixture_code(base, 0.8, (0,))
        opt = evaluate_code(mix, ce, "optimized")
        fix = evaluate_code(mix, ce, "fixed")
        assert opt.delta_star == pytest.approx(math.sqrt(0.2), abs=1e-7)
        f_fix = 0.5 * (math.sqrt(0.68) + math.sqrt(0.36 * 0.68)
                       + math.sqrt(0.64 * 0.32))
        assert fix.delta_star == pytest.approx(math.sqrt(1 - f_fix ** 2),
                                               abs=1e-12)
        assert opt.delta_star <= math.sqrt(1 - 0.8 ** 2) + 1e-6
        assert fix.delta_star <= math.sqrt(1 - 0.8 ** 2) + 1e-6
        assert mix.rate == base.rate

    def test_domain_checks(self):
        base = deterministic_code([0, 1], 1, 2)
        with pytest.raises(ValidationError, match="mixing"):
            nogo_mixture_code(base, 1.5, (0,))
        with pytest.raises(ValidationError, match="length"):
            nogo_mixture_code(base, 0.5, (0, 1))


class TestBruteForce:
    def test_noiseless_trivial_eve_exact(self):
        nt = noiseless_trivial_eve_channel(2)
        m, wit = brute_force_M(nt, 1, 0.0, 0.0,
                               SearchConfig(m_max=2, include_stochastic=False))
        assert m == 2
        perf = evaluate_code(wit, nt, "optimized")
        assert perf.eps_star == 0.0 and perf.delta_star == 0.0

    def test_copy_eve_privacy_threshold(self):
        ce = copy_eve_channel(2)
        low, _ = brute_force_M(ce, 1, 0.0, 0.1, SearchConfig(m_max=2))
        high, wit = brute_force_M(ce, 1, 0.0, 0.9, SearchConfig(m_max=2))
        assert low == 1
        assert high == 2
        assert evaluate_code(wit, ce, "optimized").delta_star \
            == pytest.approx(1 / math.sqrt(2), abs=1e-7)

    def test_m_cap_respected(self):
        nt = noiseless_trivial_eve_channel(2)
        m, wit = brute_force_M(nt, 1, 0.0, 0.0,
                               SearchConfig(m_max=1, include_stochastic=False))
        assert m == 1 and wit.m == 1
        with pytest.raises(ValidationError, match="m_max"):
            brute_force_M(nt, 1, 0.0, 0.0, SearchConfig(m_max=0))

    def test_grid_rows_are_distributions(self):
        rows = _grid_rows(2, 4)
        assert len(rows) == 5
        assert (1.0, 0.0) in rows and (0.25, 0.75) in rows
        rows3 = _grid_rows(3, 2)
        assert len(rows3) == 6
        for row in rows3:
            assert sum(row) == pytest.approx(1.0, abs=1e-12)
            assert min(row) >= 0.0
