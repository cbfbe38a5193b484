from reporting.base_report import Report
from reporting.analysis_reports import CrossingReport, HamiltonianReport, ModelReport
from reporting.pattern_reports import CompileReport, OracleReport, SimulationReport

REPORTS = {
    report.report_type: report
    for report in (CompileReport, SimulationReport, OracleReport, CrossingReport, HamiltonianReport, ModelReport)
}


class ReportFactory:
    """Maps a command's report type (``compile``, ``crossing``, ...) to the report class that renders its result."""

    @staticmethod
    def create_report(report_type: str, **kwargs) -> Report:
        report = REPORTS.get(report_type)
        if not report:
            raise NotImplementedError("No such report type exists")
        return report(**kwargs)
