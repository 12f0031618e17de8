"""Hardware noise profiles: named calibration records and their file format.

A profile file is plain text, one `key: value` per line, with exactly the
fields of HardwareProfile. A bundled directory ships the ten 5-127 qubit
backends plus four 127-qubit fake-backend calibrations.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict, replace
from importlib import resources
from pathlib import Path

from ..errors import ParseError, ProfileError

DEFAULT_GATE_DUR_1Q_NS = 35.0
DEFAULT_GATE_DUR_2Q_NS = 300.0
DEFAULT_READOUT_DUR_NS = 700.0

_FIELD_TYPES = {
    "name": str,
    "n_qubits": int,
    "t1_us": float,
    "t2_us": float,
    "readout_err": float,
    "paulix_err": float,
    "gate_dur_1q_ns": float,
    "gate_dur_2q_ns": float,
    "readout_dur_ns": float,
}


@dataclass(frozen=True)
class HardwareProfile:
    name: str
    n_qubits: int
    t1_us: float
    t2_us: float
    readout_err: float
    paulix_err: float
    gate_dur_1q_ns: float = DEFAULT_GATE_DUR_1Q_NS
    gate_dur_2q_ns: float = DEFAULT_GATE_DUR_2Q_NS
    readout_dur_ns: float = DEFAULT_READOUT_DUR_NS

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ProfileError(f"{self.name}: n_qubits must be >= 1")
        if self.t1_us <= 0 or self.t2_us <= 0:
            raise ProfileError(f"{self.name}: T1 and T2 must be positive")
        if self.t2_us > 2.0 * self.t1_us:
            raise ProfileError(f"{self.name}: T2={self.t2_us} exceeds 2*T1={2 * self.t1_us}")
        for field in ("readout_err", "paulix_err"):
            v = getattr(self, field)
            if not 0.0 <= v <= 1.0:
                raise ProfileError(f"{self.name}: {field}={v} outside [0, 1]")
        for field in ("gate_dur_1q_ns", "gate_dur_2q_ns", "readout_dur_ns"):
            if getattr(self, field) < 0:
                raise ProfileError(f"{self.name}: {field} must be nonnegative")

    def renamed(self, name: str) -> "HardwareProfile":
        return replace(self, name=name)


def save_profile(profile: HardwareProfile, path: str | Path) -> None:
    lines = [f"{key}: {value}" for key, value in asdict(profile).items()]
    Path(path).write_text("\n".join(lines) + "\n")


def load_profile(path: str | Path) -> HardwareProfile:
    values: dict = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise ParseError(f"expected 'key: value', got {line!r}", lineno)
        key, _, text = line.partition(":")
        key, text = key.strip(), text.strip()
        if key not in _FIELD_TYPES:
            raise ParseError(f"unknown profile field {key!r}", lineno)
        if key in values:
            raise ParseError(f"duplicate field {key!r}", lineno)
        try:
            values[key] = _FIELD_TYPES[key](text)
        except ValueError:
            raise ParseError(f"bad value for {key}: {text!r}", lineno) from None
    missing = set(_FIELD_TYPES) - set(values)
    if missing:
        raise ParseError(f"{path}: missing fields {sorted(missing)}")
    return HardwareProfile(**values)


def bundled_profiles_dir() -> Path:
    return Path(str(resources.files("qganmark") / "data" / "profiles"))


def load_profile_suite(directory: str | Path | None = None) -> dict[str, HardwareProfile]:
    """All .profile files in a directory, keyed by profile name."""
    directory = bundled_profiles_dir() if directory is None else Path(directory)
    if not directory.is_dir():
        raise ProfileError(f"profile directory {directory} does not exist")
    suite: dict[str, HardwareProfile] = {}
    for path in sorted(directory.glob("*.profile")):
        prof = load_profile(path)
        if prof.name in suite:
            raise ProfileError(f"duplicate profile name {prof.name!r} in {directory}")
        suite[prof.name] = prof
    if not suite:
        raise ProfileError(f"no .profile files found in {directory}")
    return suite
