from dotenv import load_dotenv
import logging
import os

load_dotenv()


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw.replace("_", ""))
    except ValueError:
        raise ValueError(f"{name} must be an integer, got '{raw}'")
    if value < 1:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def _flag_env(name: str, default: bool) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    return raw.strip().lower() in ("1", "true", "yes", "on")


# ------------------------------------------
# Arithmetic tables
SIEVE_LIMIT = _int_env("URNWALK_SIEVE_LIMIT", 10_000_000)
SIEVE_MAX = _int_env("URNWALK_SIEVE_MAX", 200_000_000)
if SIEVE_LIMIT > SIEVE_MAX:
    raise ValueError("URNWALK_SIEVE_LIMIT cannot exceed URNWALK_SIEVE_MAX")

T_CUTOFF = _int_env("URNWALK_T_CUTOFF", 10_000_000)

# ------------------------------------------
# Simulation
WORKERS = _int_env("URNWALK_WORKERS", os.cpu_count() or 1)
BLOCK_CELLS = _int_env("URNWALK_BLOCK_CELLS", 1 << 20)
CHECK_INVARIANTS = _flag_env("URNWALK_CHECK_INVARIANTS", True)

# ------------------------------------------
# Outputs
OUTPUT_DIR = os.getenv("URNWALK_OUTPUT_DIR", "./runs")
RECORD_RUNS = _flag_env("URNWALK_RECORD_RUNS", True)
LOG_LEVEL = os.getenv("URNWALK_LOG_LEVEL", "INFO").upper()
CI_MODE = bool(os.getenv("CI"))


def configure_logging(level: str | None = None) -> None:
    logging.basicConfig(
        level=level or LOG_LEVEL,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
