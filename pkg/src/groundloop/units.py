"""Unit conversions and quantity parsing.

Internally everything is SI: pressure Pa, permeability m^2, viscosity Pa*s,
time s, length m, density kg/m^3, compressibility 1/Pa. Specification
documents may carry values either as bare numbers (interpreted as SI) or as
"value unit" strings using the accepted unit vocabulary below.
"""

from __future__ import annotations

from .errors import UnitError

DARCY = 9.869233e-13        # m^2
MILLIDARCY = 1e-3 * DARCY   # m^2
BAR = 1.0e5                 # Pa
CENTIPOISE = 1.0e-3         # Pa*s
DAY = 86_400.0              # s
YEAR_365 = 365.0 * DAY      # s, schedule default (365-day year)
GRAVITY = 9.80665           # m/s^2

# kind -> {unit string: factor to SI}
_UNIT_TABLE: dict[str, dict[str, float]] = {
    "permeability": {"mD": MILLIDARCY, "D": DARCY, "darcy": DARCY, "m2": 1.0},
    "pressure": {"bar": BAR, "Pa": 1.0},
    "viscosity": {"cP": CENTIPOISE, "Pa_s": 1.0},
    "time": {"day": DAY, "year": YEAR_365, "s": 1.0},
    "length": {"m": 1.0},
    "density": {"kg_m3": 1.0},
    "compressibility": {"1_Pa": 1.0, "1/Pa": 1.0},
    "rate": {"m3_s": 1.0, "m3/s": 1.0, "m3_day": 1.0 / DAY, "m3/day": 1.0 / DAY},
    "dimensionless": {},
}


def parse_quantity(value, kind: str, location: str = "", year_seconds: float = YEAR_365) -> float:
    """Convert a spec value (number = SI, or "value unit" string) to SI float.

    ``year_seconds`` overrides the year length for time quantities so a
    document-level day-count convention can apply uniformly.
    """
    if isinstance(value, bool):
        raise UnitError(f"expected a quantity, got boolean {value!r}", location)
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise UnitError(f"expected number or 'value unit' string, got {type(value).__name__}", location)
    parts = value.split()
    if len(parts) != 2:
        raise UnitError(f"malformed quantity {value!r}; use 'VALUE UNIT'", location)
    try:
        magnitude = float(parts[0])
    except ValueError:
        raise UnitError(f"non-numeric magnitude in {value!r}", location) from None
    unit = parts[1]
    table = _UNIT_TABLE.get(kind)
    if table is None:
        raise UnitError(f"unknown quantity kind {kind!r}", location)
    if kind == "time" and unit == "year":
        return magnitude * year_seconds
    if unit not in table:
        raise UnitError(f"unit {unit!r} not accepted for {kind}", location)
    return magnitude * table[unit]
