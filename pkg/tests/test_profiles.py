import pytest

from qganmark.errors import ParseError, ProfileError
from qganmark.sim import HardwareProfile, load_profile, load_profile_suite, save_profile

SUITE_NAMES = {
    "ibm_athens", "ibm_bogota", "ibm_burlington", "ibm_jakarta", "ibm_nairobi",
    "ibm_lagos", "ibm_cairo", "ibm_cambridge", "ibm_kolkata", "ibm_washington",
    "fake_brisbane", "fake_kyiv", "fake_osaka", "fake_sherbrook",
}


def test_bundled_suite_complete(suite):
    assert set(suite) == SUITE_NAMES


def test_bundled_calibration_values(suite):
    athens = suite["ibm_athens"]
    assert (athens.n_qubits, athens.readout_err, athens.paulix_err) == (5, 0.017, 4.82e-4)
    cambridge = suite["ibm_cambridge"]
    assert (cambridge.n_qubits, cambridge.readout_err) == (27, 0.107)
    kyiv = suite["fake_kyiv"]
    assert (kyiv.t1_us, kyiv.t2_us, kyiv.readout_err, kyiv.paulix_err) == (
        273.28, 104.25, 0.017, 1.514e-3,
    )


def test_save_load_round_trip(tmp_path):
    prof = HardwareProfile("unit_test", 9, 12.5, 20.0, 0.03, 2e-4,
                           gate_dur_1q_ns=40.0, gate_dur_2q_ns=250.0, readout_dur_ns=600.0)
    path = tmp_path / "unit_test.profile"
    save_profile(prof, path)
    assert load_profile(path) == prof


def test_parse_error_reports_line(tmp_path):
    path = tmp_path / "bad.profile"
    path.write_text("name: ok\nnot a key value\n")
    with pytest.raises(ParseError) as err:
        load_profile(path)
    assert err.value.line == 2


def test_parse_rejects_unknown_and_duplicate_keys(tmp_path):
    path = tmp_path / "bad.profile"
    path.write_text("name: a\nwibble: 3\n")
    with pytest.raises(ParseError):
        load_profile(path)
    path.write_text("name: a\nname: b\n")
    with pytest.raises(ParseError):
        load_profile(path)


def test_parse_rejects_missing_fields(tmp_path):
    path = tmp_path / "partial.profile"
    path.write_text("name: a\nn_qubits: 5\n")
    with pytest.raises(ParseError):
        load_profile(path)


def test_profile_invariants():
    with pytest.raises(ProfileError):
        HardwareProfile("bad", 5, t1_us=10.0, t2_us=21.0, readout_err=0.1, paulix_err=0.0)
    with pytest.raises(ProfileError):
        HardwareProfile("bad", 5, t1_us=10.0, t2_us=10.0, readout_err=1.5, paulix_err=0.0)
    with pytest.raises(ProfileError):
        HardwareProfile("bad", 0, t1_us=10.0, t2_us=10.0, readout_err=0.1, paulix_err=0.0)


def test_suite_from_missing_directory():
    with pytest.raises(ProfileError):
        load_profile_suite("/nonexistent/profiles")


def test_t2_bounded_by_2t1_in_bundle(suite):
    for prof in suite.values():
        assert prof.t2_us <= 2 * prof.t1_us
