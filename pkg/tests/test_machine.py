"""Machine model: quantizer law, coupling planes, sync gating."""

import numpy as np
import pytest

from oscim.machine import (
    CouplingMatrix,
    MachineConfig,
    Quantizer,
    ShilConfig,
    build_coupling,
    build_machine,
    effective_weights,
    resolve_shil_strength,
    set_sync,
)
from oscim.problems import Graph


class TestQuantizer:
    def test_zero_maps_to_zero(self):
        assert Quantizer().quantize(0.0) == 0

    def test_full_scale_maps_to_max_code(self):
        assert Quantizer().quantize(1.0) == 1023

    def test_known_code(self):
        q = Quantizer()
        assert q.quantize(0.3) == 307
        assert q.dequantize(307) == pytest.approx(0.300098, abs=1e-6)

    def test_round_half_up(self):
        # 0.5 * 1023 = 511.5 rounds up
        assert Quantizer().quantize(0.5) == 512

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            Quantizer().quantize(1.5)
        with pytest.raises(ValueError):
            Quantizer().quantize(-0.1)

    def test_error_bound_over_grid(self):
        q = Quantizer()
        grid = np.linspace(0.0, 1.0, 10_001)
        errors = [abs(q.dequantize(q.quantize(w)) - w) for w in grid]
        assert max(errors) <= 1.0 / 2046.0 + 1e-15

    def test_other_bit_depths(self):
        q = Quantizer(bits=4)
        assert q.max_code == 15
        assert q.quantize(1.0) == 15


class TestBuildCoupling:
    def test_single_edge_full_code(self):
        g = Graph(n=2, edges=((1, 2, 1.0),))
        c = build_coupling(g)
        assert c.codes[0, 1] == 1023
        assert c.codes[1, 0] == 1023
        assert c.signs[0, 1] == 1

    def test_empty_graph(self):
        c = build_coupling(Graph(n=4, edges=()))
        assert np.all(c.codes == 0)
        assert np.all(c.signs == 0)

    def test_triangle_normalization(self):
        g = Graph(n=3, edges=((1, 2, 1.0), (2, 3, 1.0), (1, 3, 0.5)))
        c = build_coupling(g)
        assert c.codes[0, 1] == 1023
        assert c.codes[1, 2] == 1023
        assert c.codes[0, 2] == 512  # 511.5 rounds half-up

    def test_negative_weight_sign_plane(self):
        g = Graph(n=2, edges=((1, 2, -0.7),))
        c = build_coupling(g)
        assert c.signs[0, 1] == -1
        assert c.codes[0, 1] == 1023  # only edge, so full scale in magnitude

    def test_eight_node_all_to_all_has_56_entries(self):
        g = Graph(n=8, edges=tuple(
            (u, v, 1.0) for u in range(1, 9) for v in range(u + 1, 9)
        ))
        c = build_coupling(g)
        assert int((c.codes > 0).sum()) == 56


class TestCouplingMatrixInvariants:
    def test_rejects_nonzero_diagonal(self):
        codes = np.zeros((2, 2), int)
        codes[0, 0] = 5
        with pytest.raises(ValueError, match="diagonal"):
            CouplingMatrix(n=2, codes=codes, signs=np.zeros((2, 2), int))

    def test_rejects_asymmetric_when_flagged(self):
        codes = np.zeros((2, 2), int)
        codes[0, 1] = 5
        with pytest.raises(ValueError, match="symmetric"):
            CouplingMatrix(n=2, codes=codes, signs=np.zeros((2, 2), int))


class TestEffectiveWeights:
    def test_zero_codes_zero_weights(self):
        m = build_machine(Graph(n=3, edges=()))
        assert np.all(effective_weights(m) == 0.0)

    def test_product_law(self):
        g = Graph(n=2, edges=((1, 2, 1.0),))
        m = build_machine(g, global_scale=0.2)
        assert effective_weights(m)[0, 1] == pytest.approx(0.2)

    def test_code_sign_scale_composition(self):
        codes = np.array([[0, 307], [307, 0]])
        signs = np.array([[0, -1], [-1, 0]])
        c = CouplingMatrix(n=2, codes=codes, signs=signs)
        m = MachineConfig(n=2, coupling=c, global_scale=0.5)
        assert effective_weights(m)[0, 1] == pytest.approx(-0.150049, abs=1e-6)

    def test_symmetry_and_zero_diagonal(self):
        rng = np.random.default_rng(5)
        edges = tuple(
            (u, v, float(rng.uniform(-1, 1)))
            for u in range(1, 7) for v in range(u + 1, 7) if rng.random() < 0.6
        )
        m = build_machine(Graph(n=6, edges=edges))
        w = effective_weights(m)
        assert np.array_equal(w, w.T)
        assert np.all(np.diag(w) == 0.0)


class TestSyncGate:
    def test_set_sync_returns_new_config(self):
        m = build_machine(Graph(n=2, edges=((1, 2, 1.0),)))
        assert not m.sync_enabled
        m_on = set_sync(m, True)
        assert m_on.sync_enabled
        assert not m.sync_enabled  # original untouched

    def test_gate_zeroes_dynamics_drive(self):
        from oscim.phase_dynamics import PhaseState, phase_derivative

        g = Graph(n=2, edges=((1, 2, 1.0),))
        m = build_machine(g, global_scale=0.3)
        state = PhaseState(theta=np.array([0.3, 2.0]))
        assert np.all(phase_derivative(state, m) == 0.0)
        m_on = set_sync(m, True)
        assert np.any(phase_derivative(state, m_on) != 0.0)


class TestShilResolution:
    def test_explicit_amplitude_passes_through(self):
        g = Graph(n=2, edges=((1, 2, 1.0),))
        m = build_machine(g, shil=ShilConfig(amplitude=0.42))
        assert resolve_shil_strength(m) == 0.42

    def test_disabled_shil_is_zero(self):
        g = Graph(n=2, edges=((1, 2, 1.0),))
        m = build_machine(g, shil=ShilConfig(enabled=False))
        assert resolve_shil_strength(m) == 0.0

    def test_default_capped_by_row_sum(self):
        g = Graph(n=2, edges=((1, 2, 1.0),))
        m = build_machine(g, global_scale=0.2)
        assert resolve_shil_strength(m) == pytest.approx(0.15 * 0.2)

    def test_default_saturates_for_dense_graphs(self):
        g = Graph(n=8, edges=tuple(
            (u, v, 1.0) for u in range(1, 9) for v in range(u + 1, 9)
        ))
        m = build_machine(g, global_scale=0.3)
        assert resolve_shil_strength(m) == 0.1

    def test_unprogrammed_machine_keeps_default(self):
        m = build_machine(Graph(n=4, edges=()))
        assert resolve_shil_strength(m) == 0.1

    def test_frequency_ratio_fixed(self):
        with pytest.raises(ValueError):
            ShilConfig(frequency_ratio=3.0)
