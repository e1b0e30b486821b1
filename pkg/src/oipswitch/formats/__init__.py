from .config import RunConfig, load_config, parse_config
from .tables import SweepRow, write_profile_csv, write_sweep_csv
from .touchstone import read_touchstone, write_touchstone

__all__ = [
    "RunConfig",
    "SweepRow",
    "load_config",
    "parse_config",
    "read_touchstone",
    "write_profile_csv",
    "write_sweep_csv",
    "write_touchstone",
]
