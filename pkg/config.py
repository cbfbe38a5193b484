import os
import tempfile

from peps_mqc.exceptions import ConfigError

basedir = os.path.abspath(os.path.dirname(__file__))


def _env(key, default):
    return os.environ.get(f"PEPS_MQC_{key}", default)


class Config(object):
    TOLERANCE = float(_env("TOLERANCE", 1e-10))
    SOLVER_TOLERANCE = float(_env("SOLVER_TOLERANCE", 1e-8))
    PHASE_TOLERANCE = float(_env("PHASE_TOLERANCE", 1e-9))
    MAX_BRANCHES = int(_env("MAX_BRANCHES", 4 ** 10))
    MAX_ORACLE_SITES = int(_env("MAX_ORACLE_SITES", 10))
    MAX_PATCH_DIM = int(_env("MAX_PATCH_DIM", 4 ** 7))
    SOLVER_MAX_ITERATIONS = int(_env("SOLVER_MAX_ITERATIONS", 10000))
    SEED = int(_env("SEED", 2024))
    THREADS = int(_env("THREADS", 1))
    REPORT_DIR = _env("REPORT_DIR", os.path.join(basedir, "reports"))
    TERM_DIR = _env("TERM_DIR", os.path.join(basedir, "peps_mqc", "data"))
    LOG_LEVEL = _env("LOG_LEVEL", "WARNING")

    @classmethod
    def as_dict(cls) -> dict:
        return {
            key: getattr(cls, key)
            for key in dir(cls)
            if key.isupper() and not key.startswith("_")
        }

    @classmethod
    def validate(cls):
        for key in [
            "MAX_BRANCHES",
            "MAX_ORACLE_SITES",
            "MAX_PATCH_DIM",
            "SOLVER_MAX_ITERATIONS",
            "THREADS",
        ]:
            if getattr(cls, key) <= 0:
                raise ConfigError(f"{key} must be positive")
        for key in ["TOLERANCE", "SOLVER_TOLERANCE", "PHASE_TOLERANCE"]:
            if not getattr(cls, key) > 0:
                raise ConfigError(f"{key} must be positive")
        if not isinstance(cls.SEED, int):
            raise ConfigError("SEED must be an integer")
        return cls


class TestConfig(Config):
    SEED = 7
    THREADS = 1
    REPORT_DIR = os.path.join(tempfile.gettempdir(), "peps-mqc-test-reports")
    LOG_LEVEL = "DEBUG"
