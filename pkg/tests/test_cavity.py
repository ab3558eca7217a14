import numpy as np
import pytest

from cavity_harvest.cavity import (
    Boundary,
    CavitySpec,
    DetectorArraySpec,
    QuadraticForm,
    build_coupling_matrix,
    build_free_hamiltonian,
    build_interaction_hamiltonian,
    build_total_hamiltonian,
    detector_labels,
    field_labels,
    mode_frequencies,
    mode_numbers,
    mode_wavenumbers,
    system_labels,
)


class TestCavitySpec:
    def test_valid_periodic(self):
        cav = CavitySpec(10.0, "periodic", 50)
        assert cav.boundary is Boundary.PERIODIC
        assert cav.cutoff == 50

    def test_periodic_odd_cutoff_rejected(self):
        with pytest.raises(ValueError, match="periodic cutoff must be even"):
            CavitySpec(10.0, Boundary.PERIODIC, 49)

    def test_dirichlet_allows_single_mode(self):
        assert CavitySpec(10.0, "dirichlet", 1).cutoff == 1

    def test_nonpositive_length_rejected(self):
        with pytest.raises(ValueError, match="length"):
            CavitySpec(0.0, "periodic", 10)

    def test_zero_cutoff_rejected(self):
        with pytest.raises(ValueError, match="cutoff"):
            CavitySpec(5.0, "dirichlet", 0)

    def test_unknown_boundary_rejected(self):
        with pytest.raises(ValueError):
            CavitySpec(5.0, "open", 10)


class TestDetectorArraySpec:
    def test_valid(self):
        det = DetectorArraySpec((1.0, 2.0, 3.0), omega=1.2, coupling=0.01)
        assert det.count == 3

    def test_duplicate_positions_warn(self):
        with pytest.warns(UserWarning, match="duplicate"):
            DetectorArraySpec((1.0, 1.0), omega=1.0, coupling=0.01)

    def test_nonpositive_gap_rejected(self):
        with pytest.raises(ValueError, match="gap"):
            DetectorArraySpec((1.0,), omega=0.0, coupling=0.01)

    def test_negative_coupling_rejected(self):
        with pytest.raises(ValueError, match="coupling"):
            DetectorArraySpec((1.0,), omega=1.0, coupling=-0.1)

    def test_zero_coupling_allowed(self):
        DetectorArraySpec((1.0,), omega=1.0, coupling=0.0)

    def test_empty_positions_rejected(self):
        with pytest.raises(ValueError):
            DetectorArraySpec((), omega=1.0, coupling=0.01)


class TestModeStructure:
    def test_periodic_numbers_skip_zero(self):
        cav = CavitySpec(10.0, "periodic", 4)
        assert list(mode_numbers(cav)) == [-2, -1, 1, 2]

    def test_dirichlet_numbers(self):
        cav = CavitySpec(10.0, "dirichlet", 3)
        assert list(mode_numbers(cav)) == [1, 2, 3]

    def test_periodic_wavenumbers(self):
        cav = CavitySpec(5.0, "periodic", 4)
        expected = 2.0 * np.pi * np.array([-2, -1, 1, 2]) / 5.0
        assert np.allclose(mode_wavenumbers(cav), expected)

    def test_dirichlet_wavenumbers(self):
        cav = CavitySpec(8.0, "dirichlet", 2)
        assert np.allclose(mode_wavenumbers(cav), [np.pi / 8.0, 2 * np.pi / 8.0])

    def test_frequencies_are_moduli(self):
        cav = CavitySpec(10.0, "periodic", 6)
        assert np.all(mode_frequencies(cav) > 0)
        assert np.allclose(mode_frequencies(cav), np.abs(mode_wavenumbers(cav)))

    def test_labels(self):
        cav = CavitySpec(10.0, "periodic", 4)
        assert detector_labels(2) == ("d1", "d2")
        assert field_labels(cav) == ("k-2", "k-1", "k1", "k2")
        assert system_labels(cav, DetectorArraySpec((1.0,), omega=1.0, coupling=0.0)) == (
            "d1", "k-2", "k-1", "k1", "k2",
        )


class TestPositionValidation:
    def test_dirichlet_wall_position_rejected(self):
        cav = CavitySpec(10.0, "dirichlet", 4)
        det = DetectorArraySpec((0.0, 5.0), omega=1.0, coupling=0.01)
        with pytest.raises(ValueError, match="decouples"):
            build_coupling_matrix(cav, det)

    def test_dirichlet_outside_rejected(self):
        cav = CavitySpec(10.0, "dirichlet", 4)
        det = DetectorArraySpec((10.5,), omega=1.0, coupling=0.01)
        with pytest.raises(ValueError):
            build_coupling_matrix(cav, det)

    def test_periodic_edge_position_allowed(self):
        cav = CavitySpec(10.0, "periodic", 4)
        det = DetectorArraySpec((0.0,), omega=1.0, coupling=0.01)
        block = build_coupling_matrix(cav, det)
        assert np.all(np.isfinite(block))

    def test_periodic_outside_rejected(self):
        cav = CavitySpec(10.0, "periodic", 4)
        det = DetectorArraySpec((-0.1,), omega=1.0, coupling=0.01)
        with pytest.raises(ValueError, match="outside"):
            build_coupling_matrix(cav, det)


class TestFreeHamiltonian:
    def test_diagonal_entries(self):
        cav = CavitySpec(10.0, "dirichlet", 2)
        det = DetectorArraySpec((3.0,), omega=1.7, coupling=0.01)
        form = build_free_hamiltonian(cav, det)
        w1, w2 = np.pi / 10.0, 2 * np.pi / 10.0
        assert np.allclose(form.matrix, np.diag([1.7, 1.7, w1, w1, w2, w2]))

    def test_mode_count(self):
        cav = CavitySpec(10.0, "periodic", 6)
        det = DetectorArraySpec((1.0, 2.0, 3.0), omega=1.0, coupling=0.01)
        assert build_free_hamiltonian(cav, det).n_modes == 9


class TestCouplingMatrix:
    def test_shape_and_zero_momentum_rows(self):
        cav = CavitySpec(10.0, "periodic", 8)
        det = DetectorArraySpec((1.0, 4.0), omega=1.0, coupling=0.01)
        block = build_coupling_matrix(cav, det)
        assert block.shape == (4, 16)
        assert np.array_equal(block[1::2, :], np.zeros((2, 16)))

    def test_periodic_entries(self):
        length = 10.0
        cav = CavitySpec(length, "periodic", 4)
        x = 1.3
        det = DetectorArraySpec((x,), omega=1.0, coupling=0.01)
        block = build_coupling_matrix(cav, det)
        for col, n in enumerate([-2, -1, 1, 2]):
            k = 2.0 * np.pi * n / length
            amp = 1.0 / np.sqrt(4.0 * np.pi * abs(n))
            assert block[0, 2 * col] == pytest.approx(np.cos(k * x) * amp)
            assert block[0, 2 * col + 1] == pytest.approx(-np.sin(k * x) * amp)

    def test_periodic_highest_mode_normalization(self):
        # the +/- N/2 columns carry amplitude 1/sqrt(2 pi N) at x = 0
        n_cut = 10
        cav = CavitySpec(7.0, "periodic", n_cut)
        det = DetectorArraySpec((0.0,), omega=1.0, coupling=0.01)
        block = build_coupling_matrix(cav, det)
        assert block[0, -2] == pytest.approx(1.0 / np.sqrt(2.0 * np.pi * n_cut))

    def test_dirichlet_entries(self):
        length = 10.0
        cav = CavitySpec(length, "dirichlet", 3)
        x = 2.6
        det = DetectorArraySpec((x,), omega=1.0, coupling=0.01)
        block = build_coupling_matrix(cav, det)
        for col, n in enumerate([1, 2, 3]):
            k = np.pi * n / length
            amp = 1.0 / np.sqrt(np.pi * n)
            assert block[0, 2 * col] == pytest.approx(np.sin(k * x) * amp)
            assert block[0, 2 * col + 1] == 0.0

    def test_dirichlet_midpoint_decouples_even_modes(self):
        cav = CavitySpec(10.0, "dirichlet", 6)
        det = DetectorArraySpec((5.0,), omega=1.0, coupling=0.01)
        block = build_coupling_matrix(cav, det)
        even_cols = [2 * col for col, n in enumerate(mode_numbers(cav)) if n % 2 == 0]
        assert np.allclose(block[0, even_cols], 0.0, atol=1e-12)


class TestAssembledHamiltonians:
    def test_interaction_structure(self):
        cav = CavitySpec(10.0, "periodic", 4)
        det = DetectorArraySpec((1.0, 6.0), omega=1.0, coupling=0.02)
        form = build_interaction_hamiltonian(cav, det)
        mat = form.matrix
        block = build_coupling_matrix(cav, det)
        assert np.allclose(mat[:4, 4:], 2.0 * 0.02 * block)
        assert np.allclose(mat[:4, :4], 0.0)
        assert np.allclose(mat[4:, 4:], 0.0)

    def test_interaction_scales_linearly_with_coupling(self):
        cav = CavitySpec(10.0, "dirichlet", 5)
        det1 = DetectorArraySpec((3.0,), omega=1.0, coupling=0.01)
        det2 = DetectorArraySpec((3.0,), omega=1.0, coupling=0.03)
        m1 = build_interaction_hamiltonian(cav, det1).matrix
        m2 = build_interaction_hamiltonian(cav, det2).matrix
        assert np.allclose(m2, 3.0 * m1)

    def test_total_is_free_plus_interaction(self):
        cav = CavitySpec(12.0, "dirichlet", 6)
        det = DetectorArraySpec((2.0, 6.0, 10.0), omega=0.8, coupling=0.015)
        total = build_total_hamiltonian(cav, det).matrix
        free = build_free_hamiltonian(cav, det).matrix
        inter = build_interaction_hamiltonian(cav, det).matrix
        assert np.allclose(total, free + inter)

    def test_quadratic_form_rejects_asymmetric(self):
        bad = np.eye(4)
        bad[0, 2] = 0.1
        with pytest.raises(ValueError, match="symmetric"):
            QuadraticForm(bad)
