"""Regenerate the bundled data files under src/qganmark/data/.

Profiles: the ten-backend suite carries readout/Pauli-X rates plus a single
thermal-relaxation rate per backend; that rate is read as the per-microsecond
decay probability, so t1_us = -1 / ln(1 - tr) and t2_us = t1_us. The four
fake 127-qubit backends carry measured T1/T2 directly.

Digits: the 8x8 handwritten digits set (pixel values 0..16) exported from
scikit-learn's bundled copy as 65-column CSV rows (64 pixels + label).
"""

import math
from pathlib import Path

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "qganmark" / "data"

# name, n_qubits, readout_err, paulix_err, tr_rate_per_us
SUITE = [
    ("ibm_athens", 5, 0.017, 4.82e-04, 0.035),
    ("ibm_bogota", 5, 0.038, 4.00e-04, 0.019),
    ("ibm_burlington", 5, 0.035, 7.02e-04, 0.027),
    ("ibm_jakarta", 7, 0.025, 3.49e-04, 0.041),
    ("ibm_nairobi", 7, 0.027, 3.06e-04, 0.021),
    ("ibm_lagos", 7, 0.009, 2.58e-04, 0.023),
    ("ibm_cairo", 27, 0.016, 3.07e-04, 0.024),
    ("ibm_cambridge", 27, 0.107, 9.59e-04, 0.039),
    ("ibm_kolkata", 27, 0.012, 3.20e-04, 0.022),
    ("ibm_washington", 127, 0.049, 2.00e-04, 0.030),
]

# name, t1_us, t2_us, readout_err, paulix_err (all 127 qubits)
FAKE_SNAPSHOTS = [
    ("fake_brisbane", 224.85, 141.72, 0.029, 3.690e-04),
    ("fake_kyiv", 273.28, 104.25, 0.017, 1.514e-03),
    ("fake_osaka", 287.31, 139.96, 0.042, 1.357e-03),
    ("fake_sherbrook", 303.93, 162.05, 0.019, 7.217e-04),
]


def write_profiles() -> None:
    from qganmark.sim.profiles import HardwareProfile, save_profile

    out = DATA_DIR / "profiles"
    out.mkdir(parents=True, exist_ok=True)
    for name, n_qubits, readout, paulix, tr in SUITE:
        t1 = -1.0 / math.log(1.0 - tr)
        save_profile(
            HardwareProfile(
                name=name,
                n_qubits=n_qubits,
                t1_us=round(t1, 4),
                t2_us=round(t1, 4),
                readout_err=readout,
                paulix_err=paulix,
            ),
            out / f"{name}.profile",
        )
    for name, t1, t2, readout, paulix in FAKE_SNAPSHOTS:
        save_profile(
            HardwareProfile(
                name=name,
                n_qubits=127,
                t1_us=t1,
                t2_us=t2,
                readout_err=readout,
                paulix_err=paulix,
            ),
            out / f"{name}.profile",
        )
    print(f"wrote {len(SUITE) + len(FAKE_SNAPSHOTS)} profiles to {out}")


def write_digits() -> None:
    from sklearn.datasets import load_digits

    bunch = load_digits()
    path = DATA_DIR / "digits8x8.csv"
    with path.open("w") as fh:
        for row, label in zip(bunch.data, bunch.target):
            fh.write(",".join(str(int(v)) for v in row) + f",{int(label)}\n")
    print(f"wrote {len(bunch.target)} rows to {path}")


if __name__ == "__main__":
    write_profiles()
    write_digits()
