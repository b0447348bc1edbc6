import numpy as np
import pytest

from tspsample import wavelets
from tspsample.errors import ConfigError


@pytest.mark.parametrize("wavelet", ["haar", "db4"])
def test_round_trip_identity(wavelet):
    rng = np.random.default_rng(1)
    x = rng.standard_normal((32, 32)) + 1j * rng.standard_normal((32, 32))
    w = wavelets.forward2d(x, wavelet)
    back = wavelets.inverse2d(w, wavelet)
    assert np.max(np.abs(back - x)) < 1e-12


@pytest.mark.parametrize("wavelet", ["haar", "db4"])
@pytest.mark.parametrize("levels", [1, 2, 3])
def test_transform_is_an_isometry(wavelet, levels):
    rng = np.random.default_rng(2)
    x = rng.standard_normal((64, 64))
    w = wavelets.forward2d(x, wavelet, levels)
    assert abs(np.linalg.norm(w) - np.linalg.norm(x)) < 1e-12 * np.linalg.norm(x)


def test_default_levels():
    assert wavelets.default_levels(8) == 1
    assert wavelets.default_levels(64) == 3
    assert wavelets.default_levels(256) == 5


def test_constant_image_concentrates_in_approximation():
    x = np.full((4, 4), 3.0)
    w = wavelets.forward2d(x, "haar", 1)
    assert np.allclose(w[:2, :2], 6.0)  # one 2d level scales a constant by 2
    detail = w.copy()
    detail[:2, :2] = 0.0
    assert np.max(np.abs(detail)) < 1e-12


def test_filter_bank_orthonormality():
    for name, lo in wavelets.FILTERS.items():
        assert abs(np.dot(lo, lo) - 1.0) < 1e-12, name
        if len(lo) == 4:
            assert abs(lo[0] * lo[2] + lo[1] * lo[3]) < 1e-12  # shift-2 orthogonality
        assert abs(lo.sum() - np.sqrt(2.0)) < 1e-12


def test_unknown_wavelet_rejected():
    with pytest.raises(ConfigError):
        wavelets.forward2d(np.zeros((8, 8)), "sym5")


def test_level_validation():
    with pytest.raises(ConfigError):
        wavelets.forward2d(np.zeros((8, 8)), "haar", 0)
    with pytest.raises(ConfigError):
        wavelets.forward2d(np.zeros((8, 8)), "haar", 4)  # 8 not divisible by 16
    with pytest.raises(ConfigError):
        wavelets.forward2d(np.zeros((16, 16)), "db4", 4)  # blocks below filter length


def test_non_square_rejected():
    with pytest.raises(ConfigError):
        wavelets.forward2d(np.zeros((8, 16)), "haar")
    with pytest.raises(ConfigError):
        wavelets.inverse2d(np.zeros(64), "haar")


def test_single_coefficient_atoms_have_unit_norm():
    for wavelet in ("haar", "db4"):
        e = np.zeros((16, 16))
        e[3, 9] = 1.0
        atom = wavelets.inverse2d(e, wavelet, 2)
        assert abs(np.linalg.norm(atom) - 1.0) < 1e-12
