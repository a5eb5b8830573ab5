import math

import pytest

from vscrate import units


def test_round_trips():
    assert units.au_to_wavenumber(units.wavenumber_to_au(1234.5)) == pytest.approx(1234.5, rel=1e-15)
    assert units.au_to_fs(units.fs_to_au(100.0)) == pytest.approx(100.0, rel=1e-15)
    assert units.wavenumber_to_kcalmol(units.kcalmol_to_wavenumber(0.8)) == pytest.approx(0.8, rel=1e-15)


def test_hartree_is_27_eV_worth_of_wavenumbers():
    # 1 eV = 8065.544 cm^-1, 1 hartree = 27.211386 eV
    assert units.HARTREE_TO_WAVENUMBER == pytest.approx(27.211386246 * 8065.543937, rel=1e-9)


def test_kcal_conversion_from_joules():
    # 1 kcal/mol = 4184 J / N_A, 1 cm^-1 = h c * 100
    h, c, NA = 6.62607015e-34, 299792458.0, 6.02214076e23
    assert units.WAVENUMBER_PER_KCALMOL == pytest.approx(4184.0 / NA / (h * c * 100.0), rel=1e-10)


def test_linewidth_at_100_fs():
    # hbar / 100 fs = 53.09 cm^-1
    assert units.linewidth_wavenumber(100.0) == pytest.approx(5308.8 / 100.0, rel=1e-3)


def test_kT_room_temperature():
    assert units.kT_wavenumber(300.0) == pytest.approx(208.51, abs=0.01)
    with pytest.raises(ValueError):
        units.kT_wavenumber(0.0)


def test_frequency_conventions_differ_by_two_pi():
    assert units.frequency_scale("angular") / units.frequency_scale("cyclic") == pytest.approx(2 * math.pi)
    with pytest.raises(ValueError):
        units.frequency_scale("radians")


def test_angular_convention_matches_2_pi_c():
    # 1 cm^-1 as an angular frequency, in fs^-1
    w = units.frequency_scale("angular") / units.FS_PER_ATU
    assert w == pytest.approx(2 * math.pi * units.SPEED_OF_LIGHT_CM_PER_FS, rel=1e-9)


def test_unit_system_is_read_only():
    with pytest.raises(AttributeError):
        units.UNITS.fs_per_atu = 1.0
