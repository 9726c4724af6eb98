"""
Experiment runner: manifest loading and validation, single runs, sweeps and
the full reproduction pass with its summary matrix.

Manifests live in experiments/*.json and are validated against
experiments/manifest.schema.json. Each manifest names a procedure; the game
procedure plays the unforgeability game through qunforge.games, the others
evaluate closed forms, verifier contracts or collision statistics. Every
manifest carrying a "criterion" number is one acceptance check of
reproduce_all.
"""

import copy
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from itertools import product
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from jsonpath_ng import parse as jsonpath_parse
from jsonschema import Draft202012Validator

from qunforge import artifacts, attacks, qstate, verifiers
from qunforge.errors import InvalidParameterError, ManifestError
from qunforge.games import (
    AdversaryStrategy,
    GameConfig,
    GameMode,
    GameTranscript,
    check_capacity,
    estimate_win_rate,
    p_ov_classical,
    run_blindforge,
    run_game,
)
from qunforge.primitives import (
    FunctionFamilyKind,
    KeyedFunctionFamily,
    binding_from_descriptor,
    inter_function_independence_probe,
    random_function_collision_rate,
    random_function_collision_sigma,
)
from qunforge.qstate import StateVector
from qunforge.verifiers import TestConfig, TestKind

logger = logging.getLogger(__name__)

SCHEMA_FILE = "manifest.schema.json"
CONFIG_FILE = "workbench_config.json"
CLOSED_FORM_TOLERANCE = 1e-9
SWEEP_AXES = ("mu", "gamma", "q")
RESULT_COLUMNS = ("trials", "wins", "win_rate", "p_ov", "advantage", "ci95")

ATTACK_SUCCEEDS = "attack succeeds"
ATTACK_FAILS = "attack fails"
NOT_CHECKED = "not checked"
CHECK_FAILED = "check failed"

MATRIX_ROWS = (
    "classical deterministic",
    "classical randomized",
    "quantum deterministic",
    "quantum randomized",
)
MATRIX_COLUMNS = ("1-qGEU", "mu-qGEU", "1-qGSU", "mu-qGSU", "qGUU", "qGUU (aua)")
# (row, column) -> (criterion, status shown when that criterion passes)
MATRIX_CELLS = {
    ("classical deterministic", "mu-qGEU"): (1, ATTACK_SUCCEEDS),
    ("classical deterministic", "mu-qGSU"): (4, ATTACK_SUCCEEDS),
    ("classical randomized", "mu-qGSU"): (7, ATTACK_FAILS),
    ("quantum deterministic", "qGUU (aua)"): (8, ATTACK_SUCCEEDS),
}


@dataclass
class CheckOutcome:
    name: str
    passed: bool
    observed: Optional[float] = None
    expected: Optional[float] = None
    tolerance: Optional[float] = None
    detail: str = ""

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass
class ExperimentReport:
    experiment: str
    procedure: str
    seed: int
    criterion: Optional[int] = None
    payload: Dict[str, Any] = field(default_factory=dict)
    columns: List[str] = field(default_factory=list)
    rows: List[List[Any]] = field(default_factory=list)
    checks: List[CheckOutcome] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failed_checks(self) -> List[CheckOutcome]:
        return [check for check in self.checks if not check.passed]

    def to_dict(self) -> Dict:
        data = {
            "experiment": self.experiment,
            "procedure": self.procedure,
            "criterion": self.criterion,
            "passed": self.passed,
            "checks": [check.to_dict() for check in self.checks],
        }
        data.update(self.payload)
        return data


@dataclass
class ReproductionSummary:
    seed: Optional[int]
    reports: List[ExperimentReport]
    matrix: Dict[str, Dict[str, str]]

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.reports)

    def to_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "criteria": [
                {
                    "criterion": report.criterion,
                    "experiment": report.experiment,
                    "passed": report.passed,
                    "failed_checks": [check.name for check in report.failed_checks],
                }
                for report in self.reports
            ],
            "matrix": self.matrix,
        }


def within(observed: float, expected: float, tolerance: float) -> bool:
    return abs(observed - expected) <= tolerance


# Game manifests -------------------------------------------------------------


def build_game_config(manifest: Dict) -> GameConfig:
    game = manifest["game"]
    try:
        return GameConfig(
            binding=binding_from_descriptor(manifest["primitive"]),
            q=int(game["q"]),
            mode=GameMode(game["mode"]),
            mu=float(game.get("mu", 1.0)),
            verifier=TestConfig.from_dict(game.get("verifier", {})),
            strong_flag=bool(game.get("strong_flag", False)),
            aua_flag=bool(game.get("aua_flag", False)),
            trials=int(manifest["trials"]),
            seed=int(manifest["seed"]),
        )
    except InvalidParameterError as e:
        raise ManifestError(f"{manifest.get('experiment')}: {e}")


def build_strategy(manifest: Dict) -> AdversaryStrategy:
    attack = manifest["attack"]
    try:
        return attacks.build_attack(attack["id"], **attack.get("params", {}))
    except (InvalidParameterError, TypeError) as e:
        raise ManifestError(f"{manifest.get('experiment')}: attack '{attack['id']}': {e}")


def build_game(manifest: Dict) -> Tuple[GameConfig, AdversaryStrategy]:
    """Config and strategy of a game manifest, rejected when the attack exceeds the simulator."""
    cfg = build_game_config(manifest)
    strategy = build_strategy(manifest)
    try:
        check_capacity(cfg, strategy)
    except InvalidParameterError as e:
        raise ManifestError(f"{manifest.get('experiment')}: {e}")
    return cfg, strategy


def sweep_points(manifest: Dict) -> List[Dict[str, float]]:
    """Grid points in axis order; no axes gives one empty point."""
    axes = manifest.get("sweep", {}).get("axes", [])
    if not axes:
        return [{}]
    names = [axis["name"] for axis in axes]
    return [dict(zip(names, values)) for values in product(*(axis["values"] for axis in axes))]


def apply_point(manifest: Dict, point: Dict[str, float]) -> Dict:
    result = copy.deepcopy(manifest)
    for name, value in point.items():
        if name == "mu":
            result["game"]["mu"] = float(value)
        elif name == "q":
            result["game"]["q"] = int(value)
        elif name == "gamma":
            result["attack"].setdefault("params", {})["gamma"] = float(value)
        else:
            raise ManifestError(f"Unknown sweep axis '{name}', expected one of {SWEEP_AXES}")
    return result


def analytic_columns(attack_id: str, cfg: GameConfig, params: Dict) -> Dict[str, float]:
    """Closed-form values matching an attack at one game configuration."""
    if attack_id == "thm5-qea":
        gamma = params.get("gamma")
        gamma = math.sqrt(1 - cfg.mu) if gamma is None else float(gamma)
        win = attacks.thm5_stage1_root(gamma)
        return {"analytic_win_rate": win, "analytic_advantage": win - p_ov_classical(cfg.q, cfg.mu)}
    if attack_id == "trivial-overlap":
        win = attacks.trivial_overlap_win_probability(cfg.q, cfg.mu)
        return {"analytic_win_rate": win, "analytic_advantage": 0.0}
    if attack_id == "thm4-superposition":
        return {"analytic_win_rate": 1.0, "analytic_advantage": 1.0 - p_ov_classical(cfg.q, cfg.mu)}
    if attack_id == "example1-double-qea":
        gamma = float(params["gamma"])
        return {
            "root": attacks.example1_stage1_root(gamma),
            "printed_curve": attacks.example1_printed_curve(gamma),
            "printed_squared_curve": attacks.example1_printed_squared_curve(gamma),
            "derived_advantage": attacks.example1_derived_advantage(gamma),
        }
    if attack_id == "aua-entangle" and params.get("variant", "post-selected") == "post-selected":
        return {"analytic_win_rate": 0.5}
    return {}


def collect_trial_metrics(transcript: GameTranscript) -> Dict[str, float]:
    """Per-trial metrics averaged by estimate_win_rate: query overlap, forgery fidelity, boolean notes."""
    metrics: Dict[str, float] = {}
    overlaps = [r.challenge_fidelity for r in transcript.queries if r.challenge_fidelity is not None]
    if overlaps:
        metrics["max_query_fidelity"] = max(overlaps)
    if transcript.forgery_fidelity is not None:
        metrics["forgery_fidelity"] = transcript.forgery_fidelity
    for key, value in transcript.notes.items():
        if isinstance(value, bool):
            metrics[key] = float(value)
    if transcript.extra_verdicts:
        metrics["extra_accepted"] = float(np.mean(transcript.extra_verdicts))
    return metrics


def _format_point(point: Dict[str, float]) -> str:
    return ", ".join(f"{name}={value}" for name, value in point.items())


def _lookup(row: Dict, path: str) -> Optional[float]:
    matches = jsonpath_parse(path).find(row)
    if not matches or matches[0].value is None:
        return None
    return float(matches[0].value)


def evaluate_expectations(expect: Sequence[Dict], rows: Sequence[Dict]) -> List[CheckOutcome]:
    """
    Apply each manifest expectation to every row.

    An expectation reads a value by JSONPath and compares it with either a
    constant ("value") or an analytic column of the same row ("analytic").
    """
    outcomes = []
    for expectation in expect:
        relation = expectation.get("relation", "within")
        tolerance = float(expectation.get("tolerance", 0.0))
        for row in rows:
            label = expectation["name"]
            if row["point"]:
                label = f"{label} at {_format_point(row['point'])}"
            observed = _lookup(row, expectation["path"])
            if "analytic" in expectation:
                expected = row["analytic"].get(expectation["analytic"])
            else:
                expected = float(expectation["value"])
            if observed is None or expected is None:
                outcomes.append(CheckOutcome(label, False, observed, expected, tolerance, "value missing"))
                continue
            if relation == "at_most":
                passed = observed <= expected + tolerance
            elif relation == "at_least":
                passed = observed >= expected - tolerance
            else:
                passed = within(observed, expected, tolerance)
            outcomes.append(CheckOutcome(label, passed, observed, expected, tolerance))
    return outcomes


# Small state helpers for closed-form procedures --------------------------------


def _layout(dim: int) -> List[Tuple[str, int]]:
    return [("q", dim.bit_length() - 1)]


def _superposition(weights: Dict[int, float], dim: int) -> StateVector:
    vec = np.zeros(dim, dtype=np.complex128)
    for index, amplitude in weights.items():
        vec[index] = amplitude
    return StateVector.from_amplitudes(vec, _layout(dim), normalize=True)


def thm5_structure(gamma: float, dim: int = 4) -> Tuple[StateVector, StateVector, StateVector]:
    """phi_1 = |1>, phi_r = sqrt(1 - g^2)|1> + g|0>, psi = |0>."""
    phi1 = _superposition({1: 1.0}, dim)
    phir = _superposition({1: math.sqrt(max(1 - gamma**2, 0.0)), 0: gamma}, dim)
    return phi1, phir, _superposition({0: 1.0}, dim)


def example1_structure(gamma: float, dim: int = 4) -> Tuple[StateVector, StateVector, StateVector]:
    """phi_1 = |1>, phi_r = d|1> + g|2> + g|3>, psi = |2>."""
    delta = math.sqrt(max(1 - 2 * gamma**2, 0.0))
    phi1 = _superposition({1: 1.0}, dim)
    phir = _superposition({1: delta, 2: gamma, 3: gamma}, dim)
    return phi1, phir, _superposition({2: 1.0}, dim)


def gamma_grid(step: float, upper: float, include_zero: bool = True) -> List[float]:
    count = int(math.floor(upper / step + 1e-9))
    grid = [round(step * k, 12) for k in range(0 if include_zero else 1, count + 1)]
    return grid


class ExperimentRunner:
    """Loads manifests, runs experiments and writes their artifacts."""

    def __init__(
        self,
        base_path: Optional[Union[str, Path]] = None,
        out_dir: Optional[Union[str, Path]] = None,
        workers: int = 1,
        dump_states: bool = False,
    ):
        self.base_path = Path(base_path) if base_path else Path(__file__).resolve().parent.parent
        self.experiments_path = self.base_path / "experiments"
        self.schema_path = self.experiments_path / SCHEMA_FILE
        self.results_path = Path(out_dir) if out_dir else self.base_path / "results"
        self.workers = max(1, int(workers))
        self.dump_states = dump_states
        self._schema: Optional[Dict] = None
        self.procedures: Dict[str, Callable[[Dict, bool], ExperimentReport]] = {
            "game": self._procedure_game,
            "emulation-bound": self._procedure_emulation_bound,
            "thm5-closed-form": self._procedure_thm5_closed_form,
            "example1": self._procedure_example1,
            "separation": self._procedure_separation,
            "aua": self._procedure_aua,
            "verifier-contracts": self._procedure_verifier_contracts,
            "collision-rates": self._procedure_collision_rates,
            "determinism": self._procedure_determinism,
            "blindforge": self._procedure_blindforge,
        }
        logger.info(f"Experiment runner at {self.base_path}, results in {self.results_path}")

    # Manifests --------------------------------------------------------------

    @property
    def schema(self) -> Dict:
        if self._schema is None:
            try:
                with open(self.schema_path, "r", encoding="utf-8") as f:
                    self._schema = json.load(f)
            except (OSError, json.JSONDecodeError) as e:
                raise ManifestError(f"Cannot read manifest schema {self.schema_path}: {e}")
        return self._schema

    def _validator(self, definition: Optional[str] = None) -> Draft202012Validator:
        if definition is None:
            return Draft202012Validator(self.schema)
        return Draft202012Validator(
            {"$ref": f"#/$defs/{definition}", "$defs": self.schema.get("$defs", {})}
        )

    def validate_document(self, document: Dict, definition: Optional[str] = None) -> List[str]:
        """Schema violations of a manifest (or a named sub-schema) as readable messages."""
        errors = sorted(self._validator(definition).iter_errors(document), key=lambda e: list(e.path))
        return [
            f"{'/'.join(str(p) for p in error.path) or '<root>'}: {error.message}" for error in errors
        ]

    def manifest_paths(self) -> Dict[str, Path]:
        paths = {}
        for path in sorted(self.experiments_path.glob("*.json")):
            if path.name in (SCHEMA_FILE, CONFIG_FILE):
                continue
            try:
                with open(path, "r", encoding="utf-8") as f:
                    experiment = json.load(f).get("experiment", path.stem)
            except json.JSONDecodeError as e:
                logger.warning(f"Invalid manifest {path}: {e}")
                continue
            paths[experiment] = path
        return paths

    def list_experiments(self) -> Dict[str, Dict[str, Any]]:
        experiments = {}
        for experiment, path in self.manifest_paths().items():
            with open(path, "r", encoding="utf-8") as f:
                manifest = json.load(f)
            experiments[experiment] = {
                "file": str(path),
                "procedure": manifest.get("procedure", "unknown"),
                "criterion": manifest.get("criterion"),
                "description": manifest.get("description", "No description"),
            }
        return experiments

    def resolve_manifest(self, reference: Union[str, Path]) -> Path:
        path = Path(reference)
        if path.suffix == ".json" and path.exists():
            return path
        paths = self.manifest_paths()
        if str(reference) in paths:
            return paths[str(reference)]
        raise ManifestError(f"No experiment manifest '{reference}' (known: {sorted(paths)})")

    def load_manifest(self, reference: Union[str, Path]) -> Dict:
        path = self.resolve_manifest(reference)
        try:
            with open(path, "r", encoding="utf-8") as f:
                manifest = json.load(f)
        except json.JSONDecodeError as e:
            raise ManifestError(f"Invalid JSON in {path}: {e}")
        errors = self.validate_document(manifest)
        if errors:
            raise ManifestError(f"Manifest {path.name} is invalid: " + "; ".join(errors))
        logger.info(f"Manifest {manifest['experiment']} accepted ({manifest['procedure']})")
        return manifest

    def validate_manifest(self, reference: Union[str, Path]) -> bool:
        try:
            manifest = self.load_manifest(reference)
            if "game" in manifest:
                build_game(manifest)
        except ManifestError as e:
            logger.error(str(e))
            return False
        return True

    def load_config(self, path: Union[str, Path]) -> Dict:
        """Workbench defaults for CLI flags, validated against the config sub-schema."""
        try:
            with open(path, "r", encoding="utf-8") as f:
                config = json.load(f)
        except OSError as e:
            raise ManifestError(f"Cannot read config {path}: {e}")
        except json.JSONDecodeError as e:
            raise ManifestError(f"Invalid JSON in config {path}: {e}")
        errors = self.validate_document(config, "workbench_config")
        if errors:
            raise ManifestError(f"Config {path} is invalid: " + "; ".join(errors))
        return config

    @staticmethod
    def apply_overrides(manifest: Dict, overrides: Dict[str, Any]) -> Dict:
        """
        Copy of the manifest with run-time values applied.

        Recognised keys: seed, trials, mu, gamma, n, m, l. An explicit mu or
        gamma also collapses the sweep axis of the same name.
        """
        result = copy.deepcopy(manifest)
        if overrides.get("seed") is not None:
            result["seed"] = int(overrides["seed"])
        if overrides.get("trials") is not None:
            result["trials"] = int(overrides["trials"])
        for axis in ("mu", "gamma"):
            if overrides.get(axis) is None:
                continue
            if "sweep" in result:
                result["sweep"]["axes"] = [a for a in result["sweep"]["axes"] if a["name"] != axis]
            if "game" in result:
                result = apply_point(result, {axis: overrides[axis]})
        primitive = result.get("primitive")
        if primitive is not None:
            for key in ("n", "m", "l"):
                if overrides.get(key) is None:
                    continue
                if key == "n" and "dim" in primitive:
                    primitive["dim"] = 2 ** int(overrides[key])
                else:
                    primitive[key] = int(overrides[key])
        return result

    # Execution --------------------------------------------------------------

    def _execute(self, manifest: Dict, sweep: bool) -> ExperimentReport:
        procedure = self.procedures.get(manifest["procedure"])
        if procedure is None:
            raise ManifestError(f"Unknown procedure '{manifest['procedure']}'")
        logger.info(f"Running {manifest['experiment']} ({'sweep' if sweep else 'single point'})")
        report = procedure(manifest, sweep)
        report.criterion = manifest.get("criterion")
        status = "PASSED" if report.passed else "FAILED"
        logger.info(f"{manifest['experiment']}: {len(report.checks)} check(s), {status}")
        return report

    def run(self, manifest: Dict) -> ExperimentReport:
        return self._execute(manifest, sweep=False)

    def sweep(self, manifest: Dict) -> ExperimentReport:
        return self._execute(manifest, sweep=True)

    def write_report(self, report: ExperimentReport, manifest: Dict, with_csv: bool = True) -> List[Path]:
        outputs = manifest.get("outputs", {})
        written = [
            artifacts.write_json(
                self.results_path / outputs.get("json", f"{report.experiment}.json"),
                report.to_dict(),
                report.seed,
            )
        ]
        if with_csv and report.columns:
            written.append(
                artifacts.write_csv(
                    self.results_path / outputs.get("csv", f"{report.experiment}.csv"),
                    report.columns,
                    report.rows,
                    report.seed,
                )
            )
        return written

    def _game_row(
        self,
        manifest: Dict,
        point: Dict[str, float],
        collect: Optional[Callable[[GameTranscript], Dict[str, float]]] = None,
    ) -> Dict:
        point_manifest = apply_point(manifest, point)
        cfg, strategy = build_game(point_manifest)

        def metrics(transcript: GameTranscript) -> Dict[str, float]:
            values = collect_trial_metrics(transcript)
            if collect is not None:
                values.update(collect(transcript))
            return values

        result = estimate_win_rate(cfg, strategy, workers=self.workers, collect=metrics)
        row = {"point": point}
        row.update(result.to_dict())
        row["analytic"] = analytic_columns(
            point_manifest["attack"]["id"], cfg, point_manifest["attack"].get("params", {})
        )
        return row

    def _game_rows(self, manifest: Dict, sweep: bool, collect=None) -> List[Dict]:
        points = sweep_points(manifest) if sweep else [{}]
        return [self._game_row(manifest, point, collect) for point in points]

    @staticmethod
    def _tabulate(rows: Sequence[Dict]) -> Tuple[List[str], List[List[Any]]]:
        axes = list(rows[0]["point"]) if rows else []
        analytic = list(rows[0]["analytic"]) if rows else []
        columns = axes + analytic + list(RESULT_COLUMNS)
        table = [
            [row["point"][a] for a in axes]
            + [row["analytic"].get(a) for a in analytic]
            + [row[c] for c in RESULT_COLUMNS]
            for row in rows
        ]
        return columns, table

    def _game_payload(self, manifest: Dict, rows: Sequence[Dict]) -> Dict:
        cfg = build_game_config(manifest)
        payload = {"params": {"attack": manifest["attack"], **cfg.to_dict()}}
        if len(rows) == 1 and not rows[0]["point"]:
            payload.update({k: v for k, v in rows[0].items() if k != "point"})
        else:
            payload["axes"] = manifest.get("sweep", {}).get("axes", [])
            payload["rows"] = list(rows)
        return payload

    def _procedure_game(self, manifest: Dict, sweep: bool) -> ExperimentReport:
        rows = self._game_rows(manifest, sweep)
        payload = self._game_payload(manifest, rows)
        if not sweep and self.dump_states:
            cfg, strategy = build_game(manifest)
            samples = min(int(manifest.get("outputs", {}).get("transcripts", 1)), cfg.trials)
            payload["transcripts"] = [
                run_game(cfg, strategy, qstate.derive_seed(cfg.seed, i), i).to_dict(dump_states=True)
                for i in range(samples)
            ]
        columns, table = self._tabulate(rows)
        return ExperimentReport(
            manifest["experiment"],
            manifest["procedure"],
            manifest["seed"],
            payload=payload,
            columns=columns,
            rows=table,
            checks=evaluate_expectations(manifest.get("expect", []), rows),
        )

    def _procedure_emulation_bound(self, manifest: Dict, sweep: bool) -> ExperimentReport:
        """Post-selected emulator fidelity against sqrt(P_s1) on random instances."""
        params = manifest.get("params", {})
        dims = params.get("dims", [4, 8])
        tolerance = float(params.get("tolerance", CLOSED_FORM_TOLERANCE))
        seed, instances = manifest["seed"], manifest["trials"]
        checks, columns, table = [], ["dim", "instances", "min_slack", "mean_fidelity", "mean_root"], []
        for dim in dims:
            slacks, fidelities, roots = [], [], []
            layout = _layout(dim)
            for i in range(instances):
                base = qstate.derive_seed(seed, dim, i)
                phi1, phir, psi = (
                    qstate.haar_random_state(dim, qstate.derive_seed(base, j), layout) for j in range(3)
                )
                unitary = qstate.haar_random_unitary(dim, qstate.derive_seed(base, 3))
                result = attacks.qe_one_block_emulator(
                    (phi1, unitary.apply_to(phi1)),
                    (phir, unitary.apply_to(phir)),
                    psi,
                    qstate.derive_seed(base, 4),
                )
                root = math.sqrt(attacks.qe_stage1_success(phi1, phir, psi))
                value = result.fidelity(unitary.apply_to(psi))
                slacks.append(value - root)
                fidelities.append(value)
                roots.append(root)
            min_slack = float(min(slacks))
            table.append([dim, instances, min_slack, float(np.mean(fidelities)), float(np.mean(roots))])
            checks.append(
                CheckOutcome(
                    f"post-selected fidelity >= sqrt(P_s1) at D={dim}",
                    min_slack >= -tolerance,
                    observed=min_slack,
                    expected=0.0,
                    tolerance=tolerance,
                )
            )
        payload = {"rows": [dict(zip(columns, row)) for row in table]}
        return ExperimentReport(
            manifest["experiment"], manifest["procedure"], seed, payload=payload,
            columns=columns, rows=table, checks=checks,
        )

    def _procedure_thm5_closed_form(self, manifest: Dict, sweep: bool) -> ExperimentReport:
        """Stage-1 success on the two-query structure and the exact emulation point."""
        params = manifest.get("params", {})
        tolerance = float(params.get("tolerance", CLOSED_FORM_TOLERANCE))
        dim = int(params.get("dim", 4))
        grid = gamma_grid(float(params.get("step", 0.05)), 1.0)
        columns, table = ["gamma", "root_circuit", "root_closed_form", "difference"], []
        worst = 0.0
        for gamma in grid:
            circuit = math.sqrt(attacks.qe_stage1_success(*thm5_structure(gamma, dim)))
            closed = attacks.thm5_stage1_root(gamma)
            worst = max(worst, abs(circuit - closed))
            table.append([gamma, circuit, closed, circuit - closed])
        checks = [
            CheckOutcome("stage-1 root matches closed form", worst <= tolerance, worst, 0.0, tolerance)
        ]

        gamma = 1 / math.sqrt(2)
        phi1, phir, psi = thm5_structure(gamma, dim)
        unitary = qstate.haar_random_unitary(dim, qstate.derive_seed(manifest["seed"], 0))
        result = attacks.qe_one_block_emulator(
            (phi1, unitary.apply_to(phi1)),
            (phir, unitary.apply_to(phir)),
            psi,
            qstate.derive_seed(manifest["seed"], 1),
        )
        end_to_end = result.unconditional_fidelity(unitary.apply_to(psi))
        checks.append(
            CheckOutcome(
                "end-to-end emulation fidelity at gamma = 1/sqrt(2)",
                within(end_to_end, 1.0, tolerance),
                end_to_end,
                1.0,
                tolerance,
            )
        )
        payload = {
            "rows": [dict(zip(columns, row)) for row in table],
            "exact_point": {
                "gamma": gamma,
                "fidelity": end_to_end,
                "success_probability": result.success_probability,
            },
        }
        return ExperimentReport(
            manifest["experiment"], manifest["procedure"], manifest["seed"], payload=payload,
            columns=columns, rows=table, checks=checks,
        )

    def _procedure_example1(self, manifest: Dict, sweep: bool) -> ExperimentReport:
        """Per-target closed form plus the gamma sweep of the double emulation."""
        params = manifest.get("params", {})
        tolerance = float(params.get("tolerance", CLOSED_FORM_TOLERANCE))
        grid = gamma_grid(float(params.get("step", 0.05)), 1 / math.sqrt(2), include_zero=False)
        grid.append(1 / math.sqrt(2))
        worst = 0.0
        for gamma in grid:
            circuit = math.sqrt(attacks.qe_stage1_success(*example1_structure(gamma)))
            worst = max(worst, abs(circuit - attacks.example1_stage1_root(gamma)))
        checks = [
            CheckOutcome("per-target root matches closed form", worst <= tolerance, worst, 0.0, tolerance)
        ]

        rows = self._game_rows(manifest, sweep)
        gaps = [
            abs(row["analytic"]["printed_curve"] - row["analytic"]["derived_advantage"])
            for row in rows
            if "printed_curve" in row["analytic"]
        ]
        payload = self._game_payload(manifest, rows)
        payload["printed_curve_max_gap"] = max(gaps) if gaps else None
        if gaps:
            logger.info(f"Printed curve differs from the derived advantage by up to {max(gaps):.4f}")
        columns, table = self._tabulate(rows)
        checks.extend(evaluate_expectations(manifest.get("expect", []), rows))
        return ExperimentReport(
            manifest["experiment"], manifest["procedure"], manifest["seed"], payload=payload,
            columns=columns, rows=table, checks=checks,
        )

    def _procedure_separation(self, manifest: Dict, sweep: bool) -> ExperimentReport:
        """The same attack and seeds against the randomized binding and a deterministic comparator."""
        params = manifest.get("params", {})
        max_advantage = float(params.get("max_advantage", 0.03))
        comparator_mu = float(params.get("comparator_mu", 0.5))
        min_comparator = float(params.get("min_comparator_advantage", 0.23))

        rows = self._game_rows(manifest, sweep)
        checks = [
            CheckOutcome(
                f"randomized binding advantage at {_format_point(row['point']) or 'base point'}",
                row["advantage"] <= max_advantage,
                row["advantage"],
                max_advantage,
                0.0,
            )
            for row in rows
        ]
        comparator_manifest = copy.deepcopy(manifest)
        comparator_manifest["primitive"] = manifest["comparator"]
        comparator = self._game_row(comparator_manifest, {"mu": comparator_mu})
        checks.append(
            CheckOutcome(
                f"deterministic comparator advantage at mu={comparator_mu}",
                comparator["advantage"] >= min_comparator,
                comparator["advantage"],
                min_comparator,
                0.0,
            )
        )
        payload = self._game_payload(manifest, rows)
        payload["comparator"] = {"primitive": manifest["comparator"], **comparator}
        columns, table = self._tabulate(rows)
        return ExperimentReport(
            manifest["experiment"], manifest["procedure"], manifest["seed"], payload=payload,
            columns=columns, rows=table, checks=checks,
        )

    def _procedure_aua(self, manifest: Dict, sweep: bool) -> ExperimentReport:
        """Entanglement attack statistics and the reduced challenge fidelity."""
        params = manifest.get("params", {})
        tolerance = float(params.get("tolerance", CLOSED_FORM_TOLERANCE))
        band = float(params.get("frequency_band", 0.02))
        plus_fidelities: List[float] = []

        def plus_branch(transcript: GameTranscript) -> Dict[str, float]:
            if transcript.notes.get("plus_branch") and transcript.forgery_fidelity is not None:
                plus_fidelities.append(transcript.forgery_fidelity)
            return {}

        rows = self._game_rows(manifest, False, collect=plus_branch)
        row = rows[0]
        frequency = row["metrics"].get("plus_branch", 0.0)
        checks = [
            CheckOutcome("+ branch frequency", within(frequency, 0.5, band), frequency, 0.5, band)
        ]
        worst_plus = min(plus_fidelities) if plus_fidelities else 0.0
        checks.append(
            CheckOutcome(
                "+ branch forgery fidelity", within(worst_plus, 1.0, tolerance), worst_plus, 1.0, tolerance
            )
        )

        dim = int(manifest["primitive"].get("dim", 8))
        layout = [("message", dim.bit_length() - 1)]
        samples = int(params.get("reduced_samples", 100))
        worst = 0.0
        for i in range(samples):
            psi = qstate.haar_random_state(dim, qstate.derive_seed(manifest["seed"], 10, i), layout)
            explicit = attacks.reduced_challenge_fidelity(psi)
            worst = max(worst, abs(explicit - attacks.reduced_challenge_fidelity_closed_form(psi)))
        checks.append(
            CheckOutcome(
                "reduced fidelity closed form vs partial trace", worst <= tolerance, worst, 0.0, tolerance
            )
        )

        uniform = StateVector.from_amplitudes(np.full(4, 0.5), [("message", 2)])
        printed = attacks.printed_reduced_challenge_fidelity(uniform)
        explicit = attacks.reduced_challenge_fidelity(uniform)
        checks.append(
            CheckOutcome(
                "uniform D=4: partial trace 0.5 against published 0.75",
                within(explicit, 0.5, tolerance) and within(printed, 0.75, tolerance),
                explicit,
                0.5,
                tolerance,
                detail=f"published expression evaluates to {printed:.12g}",
            )
        )
        if abs(printed - explicit) > tolerance:
            logger.warning(
                f"Published reduced fidelity {printed:.6f} disagrees with the partial trace {explicit:.6f}"
            )

        payload = self._game_payload(manifest, rows)
        payload["plus_branch_min_fidelity"] = worst_plus
        payload["uniform_d4"] = {"printed": printed, "explicit": explicit}
        literal_trials = int(params.get("literal_trials", 0))
        if literal_trials:
            literal = copy.deepcopy(manifest)
            literal["attack"] = {"id": "aua-entangle", "params": {"variant": "literal"}}
            literal["trials"] = literal_trials
            payload["literal_variant"] = self._game_row(literal, {})
        columns, table = self._tabulate(rows)
        return ExperimentReport(
            manifest["experiment"], manifest["procedure"], manifest["seed"], payload=payload,
            columns=columns, rows=table, checks=checks,
        )

    def _procedure_verifier_contracts(self, manifest: Dict, sweep: bool) -> ExperimentReport:
        """SWAP-test acceptance against (1 + F)/2 and the limit checks of both tests."""
        params = manifest.get("params", {})
        band = float(params.get("band", 0.01))
        exact = float(params.get("exact_tolerance", 1e-12))
        samples = manifest["trials"]
        columns, table, checks = ["fidelity", "circuit", "sampled", "closed_form"], [], []
        for i, value in enumerate(params.get("fidelities", [0.0, 0.25, 0.5, 1.0])):
            psi, phi = verifiers.fidelity_pair(value)
            circuit = verifiers.swap_test_acceptance_probability(psi, phi)
            sampled = float(
                np.mean(verifiers.sample_swap_tests(psi, phi, 1, samples, qstate.derive_seed(manifest["seed"], i)))
            )
            expected = (1 + value) / 2
            table.append([value, circuit, sampled, expected])
            checks.append(
                CheckOutcome(f"sampled SWAP acceptance at F={value}", within(sampled, expected, band),
                             sampled, expected, band)
            )
            if value in (0.0, 1.0):
                checks.append(
                    CheckOutcome(f"circuit SWAP acceptance at F={value}", within(circuit, expected, exact),
                                 circuit, expected, exact)
                )

        grid = params.get("grid", [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0])
        kappas = params.get("kappas", [1, 2, 4, 8])
        contracts = {}
        for kind in (TestKind.IDEAL_FIDELITY, TestKind.SWAP_TEST):
            report = verifiers.test_contract_check(kind, grid, kappas)
            contracts[kind.value] = {
                "errors": {str(k): v for k, v in sorted(report.errors.items())},
                "monotone": report.monotone,
                "violations": report.violations,
            }
            if kind == TestKind.IDEAL_FIDELITY:
                checks.append(
                    CheckOutcome(
                        "ideal fidelity test satisfies the limit conditions",
                        report.satisfies_limits,
                        detail="; ".join(report.violations),
                    )
                )
        payload = {"rows": [dict(zip(columns, row)) for row in table], "contracts": contracts}
        return ExperimentReport(
            manifest["experiment"], manifest["procedure"], manifest["seed"], payload=payload,
            columns=columns, rows=table, checks=checks,
        )

    def _procedure_collision_rates(self, manifest: Dict, sweep: bool) -> ExperimentReport:
        """Per-x collision rate of independent random functions against 2^-m."""
        params = manifest.get("params", {})
        n = int(params.get("n", 4))
        sigmas = float(params.get("sigmas", 3.0))
        pairs = manifest["trials"]
        columns, table, checks = ["m", "rate", "expected", "sigma"], [], []
        for m in params.get("ms", [4, 8]):
            rate = random_function_collision_rate(n, m, pairs, qstate.derive_seed(manifest["seed"], m))
            sigma = random_function_collision_sigma(n, m, pairs)
            expected = 2.0**-m
            table.append([m, rate, expected, sigma])
            checks.append(
                CheckOutcome(f"collision rate within {sigmas:g} sigma at m={m}",
                             within(rate, expected, sigmas * sigma), rate, expected, sigmas * sigma)
            )

        probe_trials = int(params.get("probe_trials", 200))
        probes = {}
        for kind in (FunctionFamilyKind.SEEDED_TABLE, FunctionFamilyKind.CONSTANT):
            family = KeyedFunctionFamily(int(params.get("key_bits", 16)), n, 4, manifest["seed"], kind)
            probes[kind.value] = inter_function_independence_probe(
                family, probe_trials, qstate.derive_seed(manifest["seed"], 99)
            ).to_dict()
        checks.append(
            CheckOutcome("constant family is flagged by the probe", probes["constant"]["flagged"])
        )
        payload = {"rows": [dict(zip(columns, row)) for row in table], "probes": probes}
        return ExperimentReport(
            manifest["experiment"], manifest["procedure"], manifest["seed"], payload=payload,
            columns=columns, rows=table, checks=checks,
        )

    def _procedure_determinism(self, manifest: Dict, sweep: bool) -> ExperimentReport:
        """Serialize one target run repeatedly, serially and threaded, and compare the bytes."""
        params = manifest.get("params", {})
        target = self.apply_overrides(
            self.load_manifest(manifest["target"]),
            {"seed": manifest["seed"], "trials": manifest["trials"]},
        )
        workers = int(params.get("workers", 4))
        saved = self.workers
        renders = []
        try:
            for count in (1, 1, workers):
                self.workers = count
                row = self._game_row(target, {})
                renders.append(artifacts.render_json({"row": row}, target["seed"]))
        finally:
            self.workers = saved
        checks = [
            CheckOutcome("repeated serial runs serialize identically", renders[0] == renders[1]),
            CheckOutcome(f"serial and {workers}-worker runs serialize identically", renders[0] == renders[2]),
        ]
        payload = {"target": manifest["target"], "trials": manifest["trials"], "workers": workers}
        return ExperimentReport(
            manifest["experiment"], manifest["procedure"], manifest["seed"], payload=payload, checks=checks
        )

    def _procedure_blindforge(self, manifest: Dict, sweep: bool) -> ExperimentReport:
        """BlindForge with the query-replay adversary; wins need a blinded message and a valid tag."""
        params = manifest.get("params", {})
        epsilon = float(params.get("epsilon", 0.25))
        binding = binding_from_descriptor(manifest["primitive"])
        strategy = build_strategy(manifest)
        outcomes = [
            run_blindforge(binding, epsilon, strategy, qstate.derive_seed(manifest["seed"], i))
            for i in range(manifest["trials"])
        ]
        trials = manifest["trials"]
        sigmas = float(params.get("sigmas", 4.0))
        wins = sum(o.verdict for o in outcomes)
        win_rate = wins / trials
        inside = float(np.mean([bool(o.blinded) for o in outcomes]))
        blinded_tags = [bool(o.tag_valid) for o in outcomes if o.blinded]
        clear_tags = [bool(o.tag_valid) for o in outcomes if o.blinded is False]
        valid_rate = float(np.mean(blinded_tags)) if blinded_tags else 0.0
        tag_bits = int(binding.descriptor()["m"])
        analytic = epsilon * 2.0**-tag_bits

        def band(p: float) -> float:
            return max(sigmas * math.sqrt(p * (1.0 - p) / trials), 1.0 / trials)

        checks = [
            CheckOutcome(
                "win rate vs epsilon * 2^-m",
                within(win_rate, analytic, band(analytic)),
                win_rate,
                analytic,
                band(analytic),
            ),
            CheckOutcome(
                "win rate vs epsilon * blinded tag validity",
                within(win_rate, epsilon * valid_rate, band(epsilon * valid_rate)),
                win_rate,
                epsilon * valid_rate,
                band(epsilon * valid_rate),
                detail=f"{sum(blinded_tags)}/{len(blinded_tags)} blinded forgeries carried a valid tag",
            ),
            CheckOutcome(
                "replayed tags on unblinded messages verify",
                all(clear_tags),
                float(np.mean(clear_tags)) if clear_tags else None,
                1.0,
                0.0,
            ),
        ]
        payload = {
            "params": {"attack": manifest["attack"], "primitive": binding.descriptor(), "epsilon": epsilon},
            "trials": trials,
            "wins": wins,
            "win_rate": win_rate,
            "blinded_rate": inside,
            "valid_tag_rate": valid_rate,
            "analytic_win_rate": analytic,
        }
        return ExperimentReport(
            manifest["experiment"], manifest["procedure"], manifest["seed"], payload=payload, checks=checks
        )

    # Reproduction -----------------------------------------------------------

    def criterion_manifests(self) -> List[Dict]:
        """Manifests carrying a criterion number, one per number, in order."""
        manifests = [self.load_manifest(path) for path in self.manifest_paths().values()]
        numbered = sorted((m for m in manifests if "criterion" in m), key=lambda m: m["criterion"])
        numbers = [m["criterion"] for m in numbered]
        if len(set(numbers)) != len(numbers):
            raise ManifestError(f"Duplicate criterion numbers among manifests: {numbers}")
        return numbered

    @staticmethod
    def build_matrix(reports: Sequence[ExperimentReport]) -> Dict[str, Dict[str, str]]:
        outcome = {report.criterion: report.passed for report in reports}
        matrix = {}
        for row in MATRIX_ROWS:
            matrix[row] = {}
            for column in MATRIX_COLUMNS:
                cell = MATRIX_CELLS.get((row, column))
                if cell is None or cell[0] not in outcome:
                    matrix[row][column] = NOT_CHECKED
                else:
                    matrix[row][column] = cell[1] if outcome[cell[0]] else CHECK_FAILED
        return matrix

    def reproduce_all(self, seed: Optional[int] = None, trials: Optional[int] = None) -> ReproductionSummary:
        """Run every criterion manifest, write its artifacts and the summary matrix."""
        reports = []
        for manifest in self.criterion_manifests():
            manifest = self.apply_overrides(manifest, {"seed": seed, "trials": trials})
            report = self.sweep(manifest)
            self.write_report(report, manifest)
            reports.append(report)
        summary = ReproductionSummary(seed, reports, self.build_matrix(reports))
        artifacts.write_json(self.results_path / "summary.json", summary.to_dict(), seed if seed is not None else 0)
        artifacts.write_csv(
            self.results_path / "summary_matrix.csv",
            ["primitive"] + list(MATRIX_COLUMNS),
            [[row] + [summary.matrix[row][c] for c in MATRIX_COLUMNS] for row in MATRIX_ROWS],
            seed if seed is not None else 0,
        )
        with open(self.results_path / "summary.txt", "w", encoding="utf-8", newline="\n") as f:
            f.write(self.generate_summary_report(summary) + "\n")
        return summary

    def generate_summary_report(self, summary: ReproductionSummary) -> str:
        """Human-readable criteria list and matrix."""
        report = []
        report.append("=" * 50)
        report.append("UNFORGEABILITY WORKBENCH - REPRODUCTION SUMMARY")
        report.append("=" * 50)
        report.append(f"Seed: {summary.seed if summary.seed is not None else 'per manifest'}")
        report.append(f"Status: {'PASSED' if summary.passed else 'FAILED'}")
        report.append("")
        report.append("CRITERIA:")
        report.append("-" * 9)
        for item in summary.reports:
            status = "PASSED" if item.passed else "FAILED"
            report.append(f"{item.criterion:>2}. {item.experiment}: {status}")
            for check in item.failed_checks:
                detail = f" (observed {check.observed}, expected {check.expected})" if check.observed is not None else ""
                report.append(f"    - {check.name}{detail}")
        report.append("")
        report.append("RESULT MATRIX:")
        report.append("-" * 14)
        for row in MATRIX_ROWS:
            report.append(f"{row}:")
            for column in MATRIX_COLUMNS:
                report.append(f"  {column:<12} {summary.matrix[row][column]}")
        report.append("=" * 50)
        return "\n".join(report)
