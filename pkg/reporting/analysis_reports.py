from datetime import date

from peps_mqc.crossing import CanonicalGate, completeness_scan, solve, verify_solution
from peps_mqc.hamiltonian import (
    CIRCLE_RIGHT_SQUARE,
    DATA_DIR,
    VERTICAL_MID_SQUARE,
    assemble_and_diagonalize,
    region_support,
    verify_terms,
)
from peps_mqc.honeycomb import byproduct_census, dump_constants, mid_square_byproducts
from peps_mqc.numerics import to_pairs
from reporting.base_report import Report

VERIFY = "verify"
SPECTRUM = "spectrum"


class CrossingReport(Report):
    report_type = "crossing"

    def __init__(
        self,
        gate: CanonicalGate,
        samples: int = 0,
        seed: int = 0,
        scan: bool = False,
        tolerance: float = 1e-9,
        config: dict = None,
    ):
        super().__init__(config)
        self.gate = gate
        self.samples = samples
        self.seed = seed
        self.scan = scan
        self.tolerance = tolerance
        self.inputs = {**gate.to_dict(), "samples": samples, "seed": seed}
        self.filename = f"crossing-generated-{date.today():%d-%m-%Y}"

    def get_data(self) -> dict:
        solution = solve(self.gate, self.tolerance)
        data = solution.to_dict()
        passed = True
        if self.samples:
            verification = verify_solution(solution, self.samples, self.seed)
            data["verification"] = verification.to_dict()
            passed = verification.failed == 0
        if self.scan:
            mismatches = completeness_scan(solution)
            data["completeness"] = {"mismatches": mismatches[:10], "count": len(mismatches)}
            passed = passed and not mismatches
        data["passed"] = passed
        return data


class HamiltonianReport(Report):
    report_type = "hamiltonian"

    def __init__(
        self,
        mode: str = VERIFY,
        patch: str = "unit7",
        term_dir: str = DATA_DIR,
        tolerance: float = 1e-8,
        max_dim: int = 4 ** 7,
        max_iterations: int = 10000,
        config: dict = None,
    ):
        super().__init__(config)
        self.mode = mode
        self.patch = patch
        self.term_dir = term_dir
        self.tolerance = tolerance
        self.max_dim = max_dim
        self.max_iterations = max_iterations
        self.inputs = {"mode": mode, "patch": patch}
        self.filename = f"hamiltonian-{mode}-{patch}-generated-{date.today():%d-%m-%Y}"

    def get_data(self) -> dict:
        if self.mode == VERIFY:
            return self.verification()
        if self.mode == SPECTRUM:
            return self.spectrum()
        raise NotImplementedError("No such report type exists")

    def verification(self) -> dict:
        checks = verify_terms(self.term_dir, self.tolerance)
        regions = {kind: region_support(kind) for kind in (VERTICAL_MID_SQUARE, CIRCLE_RIGHT_SQUARE)}
        return {
            "terms": [check.to_dict() for check in checks],
            "regions": {
                kind: {"rank": support.rank, "boundary_dim": support.boundary_dim}
                for kind, support in regions.items()
            },
            "passed": all(check.passed for check in checks)
            and all(support.injective for support in regions.values()),
        }

    def spectrum(self) -> dict:
        report = assemble_and_diagonalize(
            self.patch,
            self.term_dir,
            max_dim=self.max_dim,
            tol=self.tolerance,
            max_iterations=self.max_iterations,
        )
        return {**report.to_dict(), "passed": report.ground_state_zero(self.tolerance)}


class ModelReport(Report):
    report_type = "model"

    def __init__(self, samples: int = 20, seed: int = 0, config: dict = None):
        super().__init__(config)
        self.samples = samples
        self.seed = seed
        self.inputs = {"samples": samples, "seed": seed}
        self.filename = f"model-generated-{date.today():%d-%m-%Y}"

    def get_data(self) -> dict:
        return {
            "constants": dump_constants(),
            "derived_E_mid": to_pairs(mid_square_byproducts().entries),
            "byproducts": byproduct_census(self.samples, self.seed),
        }
