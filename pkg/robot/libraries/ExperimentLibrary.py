# ExperimentLibrary.py
import filecmp
import json
import sys
from pathlib import Path
from typing import Optional

from robot.api.deco import keyword

ROOT = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(ROOT))

from qunforge import artifacts  # noqa: E402
from qunforge.experiments import (  # noqa: E402
    CheckOutcome,
    ExperimentReport,
    ExperimentRunner,
    evaluate_expectations,
    sweep_points,
)


class ExperimentLibrary:
    """
    Keywords over manifests, the experiment runner and its artifacts
    """

    ROBOT_LIBRARY_SCOPE = "GLOBAL"

    def __init__(self):
        self.runner = ExperimentRunner(ROOT)
        self.last_result = None

    @keyword
    def repository_root(self) -> str:
        return str(ROOT)

    @keyword
    def invalid_manifests(self):
        """Experiment ids whose manifest fails schema or binding validation"""
        invalid = [
            experiment
            for experiment in self.runner.manifest_paths()
            if not self.runner.validate_manifest(experiment)
        ]
        self.last_result = {"invalid": invalid}
        return invalid

    @keyword
    def experiment_ids(self):
        return sorted(self.runner.list_experiments())

    @keyword
    def validation_errors(self, document: str, definition: Optional[str] = None):
        return self.runner.validate_document(json.loads(document), definition)

    @keyword
    def load_experiment_manifest(self, reference: str):
        return self.runner.load_manifest(reference)

    @keyword
    def sweep_point_count(self, experiment: str) -> int:
        return len(sweep_points(self.runner.load_manifest(experiment)))

    @keyword
    def manifest_with_overrides(self, experiment: str, overrides: str):
        """Manifest after run-time overrides given as a JSON object"""
        return self.runner.apply_overrides(self.runner.load_manifest(experiment), json.loads(overrides))

    @keyword
    def sweep_axis_names(self, manifest) -> list:
        return [axis["name"] for axis in manifest.get("sweep", {}).get("axes", [])]

    @keyword
    def run_experiment(
        self,
        experiment: str,
        out_dir: str,
        trials: Optional[int] = None,
        seed: Optional[int] = None,
        sweep: bool = True,
        workers: int = 1,
    ):
        """Run (or sweep) one experiment, write its artifacts and return the report as a dict"""
        runner = ExperimentRunner(ROOT, out_dir, workers=workers)
        manifest = runner.apply_overrides(runner.load_manifest(experiment), {"trials": trials, "seed": seed})
        report = runner.sweep(manifest) if sweep else runner.run(manifest)
        written = runner.write_report(report, manifest, with_csv=sweep)
        self.last_result = report.to_dict()
        self.last_result["written"] = [str(path) for path in written]
        return self.last_result

    @keyword
    def failed_check_names(self):
        if not self.last_result or "checks" not in self.last_result:
            raise AssertionError("No experiment has been run yet")
        return [check["name"] for check in self.last_result["checks"] if not check["passed"]]

    @keyword
    def check_detail(self, name_fragment: str) -> str:
        for check in self.last_result.get("checks", []):
            if name_fragment in check["name"]:
                return check["detail"]
        raise AssertionError(f"No check matching '{name_fragment}'")

    @keyword
    def criterion_numbers(self):
        return [manifest["criterion"] for manifest in self.runner.criterion_manifests()]

    @keyword
    def matrix_for_outcomes(self, passed: str, failed: str = ""):
        """Result matrix when the comma-separated criteria passed or failed"""
        reports = []
        for numbers, flag in ((passed, True), (failed, False)):
            for number in filter(None, (n.strip() for n in numbers.split(","))):
                report = ExperimentReport(f"criterion-{number}", "game", 0, criterion=int(number))
                if not flag:
                    report.checks.append(CheckOutcome("forced", False))
                reports.append(report)
        self.last_result = ExperimentRunner.build_matrix(reports)
        return self.last_result

    @keyword
    def expectation_passes(self, expectation: str, row: str) -> bool:
        """Evaluate one manifest expectation (JSON) against one result row (JSON)"""
        outcomes = evaluate_expectations([json.loads(expectation)], [json.loads(row)])
        self.last_result = [outcome.to_dict() for outcome in outcomes]
        return all(outcome.passed for outcome in outcomes)

    @keyword
    def round_to_significant_digits(self, value: float) -> float:
        return artifacts.round_significant(value)

    @keyword
    def rendered_json(self, payload: str, seed: int) -> str:
        return artifacts.render_json(json.loads(payload), seed)

    @keyword
    def rendered_csv_lines(self, seed: int):
        text = artifacts.render_csv(["x", "flag", "value"], [[1, True, 0.1 + 0.2], [2, False, None]], seed)
        return text.splitlines()

    @keyword
    def differing_files(self, first: str, second: str):
        """Relative paths whose bytes differ (or exist on one side only) between two result trees"""
        a, b = Path(first), Path(second)
        names_a = {p.relative_to(a) for p in a.rglob("*") if p.is_file()}
        names_b = {p.relative_to(b) for p in b.rglob("*") if p.is_file()}
        differing = sorted(str(n) for n in names_a ^ names_b)
        for name in sorted(names_a & names_b):
            if not filecmp.cmp(a / name, b / name, shallow=False):
                differing.append(str(name))
        self.last_result = {"compared": len(names_a & names_b), "differing": differing}
        return differing

    @keyword
    def compared_file_count(self) -> int:
        return self.last_result["compared"]

