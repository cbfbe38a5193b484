from datetime import date

from peps_mqc.circuit import CircuitIR, circuit_to_dict
from peps_mqc.compiler import MeasurementPattern, pattern_to_dict
from peps_mqc.oracle import cross_validate
from peps_mqc.simulator import ENUMERATE, simulate_pattern
from reporting.base_report import Report


class CompileReport(Report):
    """The compiled pattern itself, so the document can be fed straight back into ``simulate``."""

    report_type = "compile"

    def __init__(self, pattern: MeasurementPattern, config: dict = None):
        super().__init__(config)
        self.pattern = pattern
        self.inputs = circuit_to_dict(pattern.circuit)
        self.filename = f"pattern-{pattern.n_wires}w-{len(pattern.sites)}s-generated-{date.today():%d-%m-%Y}"

    def get_data(self) -> dict:
        return pattern_to_dict(self.pattern)


class SimulationReport(Report):
    report_type = "simulate"

    def __init__(
        self,
        pattern: MeasurementPattern,
        mode: str = ENUMERATE,
        samples: int = 1,
        seed: int = 0,
        max_branches: int = 4 ** 10,
        threads: int = 1,
        tolerance: float = 1e-9,
        config: dict = None,
    ):
        super().__init__(config)
        self.pattern = pattern
        self.options = {
            "mode": mode,
            "samples": samples,
            "seed": seed,
            "max_branches": max_branches,
            "threads": threads,
            "tolerance": tolerance,
        }
        self.inputs = {"pattern": pattern_to_dict(pattern), "mode": mode, "samples": samples, "seed": seed}
        self.filename = f"simulation-{mode}-generated-{date.today():%d-%m-%Y}"

    def get_data(self) -> dict:
        result = simulate_pattern(self.pattern, **self.options)
        return {**result.to_dict(), "passed": result.sound}


class OracleReport(Report):
    report_type = "oracle"

    def __init__(
        self,
        circuit: CircuitIR,
        max_sites: int = 10,
        tolerance: float = 1e-9,
        max_branches: int = 4 ** 10,
        config: dict = None,
    ):
        super().__init__(config)
        self.circuit = circuit
        self.max_sites = max_sites
        self.tolerance = tolerance
        self.max_branches = max_branches
        self.inputs = {"circuit": circuit_to_dict(circuit), "max_sites": max_sites}
        self.filename = f"oracle-{circuit.n_wires}w-generated-{date.today():%d-%m-%Y}"

    def get_data(self) -> dict:
        report = cross_validate(self.circuit, self.max_sites, self.tolerance, self.max_branches)
        return report.to_dict()
