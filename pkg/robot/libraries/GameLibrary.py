# GameLibrary.py
import json
import sys
from pathlib import Path

from robot.api.deco import keyword

sys.path.insert(0, str(Path(__file__).resolve().parents[2]))

from qunforge import qstate  # noqa: E402
from qunforge.attacks import QueryReplayAdversary, build_attack, classical_query  # noqa: E402
from qunforge.games import (  # noqa: E402
    Adversary,
    AdversaryStrategy,
    ClassicalChallenge,
    ClassicalForgery,
    GameConfig,
    GameMode,
    QuantumForgery,
    confidence_half_width,
    estimate_win_rate,
    p_ov_classical,
    run_blindforge,
    run_game,
)
from qunforge.primitives import binding_from_descriptor  # noqa: E402


class _SwitchedTargetAdversary(Adversary):
    """Commits to message 0 and forges message 1."""

    def select_challenge(self, ctx):
        return ClassicalChallenge(0)

    def guess(self, ctx):
        return ClassicalForgery(1, 0)


class _GreedyAdversary(Adversary):
    """Never stops querying."""

    def next_query(self, ctx):
        return classical_query({0: 1.0}, ctx.public.n_in, ctx.public.ancilla_bits)


class _RerandomizedReplayAdversary(QueryReplayAdversary):
    """Replays the queried tag under a different randomness r XOR 1."""

    def guess(self, ctx):
        forgery = super().guess(ctx)
        if forgery is None or forgery.randomness is None:
            return forgery
        return ClassicalForgery(forgery.message, forgery.tag, forgery.randomness ^ 1)


class _UnrandomizedEchoAdversary(Adversary):
    """Returns the challenge itself as the tag and leaves the randomness out."""

    def guess(self, ctx):
        return QuantumForgery(ctx.challenge.state, ctx.challenge.state, None)


LOCAL_STRATEGIES = {
    "switched-target": AdversaryStrategy("switched-target", _SwitchedTargetAdversary),
    "greedy": AdversaryStrategy("greedy", _GreedyAdversary),
    "rerandomized-replay": AdversaryStrategy("rerandomized-replay", _RerandomizedReplayAdversary),
    "unrandomized-echo": AdversaryStrategy("unrandomized-echo", _UnrandomizedEchoAdversary),
}


class GameLibrary:
    """
    Keywords that configure games, play single trials and estimate win rates
    """

    ROBOT_LIBRARY_SCOPE = "GLOBAL"

    def __init__(self):
        self.last_result = None

    def _strategy(self, attack: str, params: str = "{}"):
        if attack in LOCAL_STRATEGIES:
            return LOCAL_STRATEGIES[attack]
        return build_attack(attack, **json.loads(params))

    @keyword
    def create_game_config(
        self,
        primitive: str,
        mode: str,
        q: int,
        mu: float = 1.0,
        trials: int = 100,
        seed: int = 0,
        aua: bool = False,
        strong: bool = False,
    ):
        """primitive is a JSON descriptor such as {"primitive": "deterministic-mac", "n": 2, "m": 4}"""
        return GameConfig(
            binding=binding_from_descriptor(json.loads(primitive)),
            q=q,
            mode=GameMode(mode),
            mu=mu,
            aua_flag=aua,
            strong_flag=strong,
            trials=trials,
            seed=seed,
        )

    @keyword
    def estimate_attack(self, cfg, attack: str, params: str = "{}", workers: int = 1):
        """Win-rate estimate as a plain dict (trials, wins, win_rate, p_ov, advantage, ci95, ...)"""
        result = estimate_win_rate(cfg, self._strategy(attack, params), workers=workers)
        self.last_result = result.to_dict()
        return self.last_result

    @keyword
    def play_single_trial(
        self, cfg, attack: str, trial_seed: int, params: str = "{}", dump_states: bool = False
    ):
        transcript = run_game(cfg, self._strategy(attack, params), trial_seed)
        self.last_result = transcript.to_dict(dump_states=dump_states)
        return self.last_result

    @keyword
    def private_state_magnitudes(self) -> list:
        """|amplitude| of each basis state of the adversary's private register in the last trial"""
        if not self.last_result or "private_state" not in self.last_result:
            raise AssertionError("The last trial recorded no private state")
        values = self.last_result["private_state"]
        return [abs(complex(re, im)) for re, im in zip(values[0::2], values[1::2])]

    @keyword
    def trial_replays_identically(self, cfg, attack: str, trial_seed: int, params: str = "{}") -> bool:
        """Two plays from the same trial seed serialize to the same transcript"""
        strategy = self._strategy(attack, params)
        first = json.dumps(run_game(cfg, strategy, trial_seed).to_dict(dump_states=True), sort_keys=True)
        second = json.dumps(run_game(cfg, strategy, trial_seed).to_dict(dump_states=True), sort_keys=True)
        return first == second

    @keyword
    def serial_and_threaded_estimates_agree(self, cfg, attack: str, workers: int, params: str = "{}") -> bool:
        strategy = self._strategy(attack, params)
        serial = estimate_win_rate(cfg, strategy, workers=1).to_dict()
        threaded = estimate_win_rate(cfg, strategy, workers=workers).to_dict()
        self.last_result = {"serial": serial, "threaded": threaded}
        return serial == threaded

    @keyword
    def classical_overlap_probability(self, q: int, mu: float) -> float:
        return p_ov_classical(q, mu)

    @keyword
    def confidence_interval_half_width(self, p: float, n: int) -> float:
        return confidence_half_width(p, n)

    @keyword
    def reason_count(self, reason: str) -> int:
        """How many trials of the last estimate ended with the given reason"""
        if not self.last_result or "reasons" not in self.last_result:
            raise AssertionError("No estimate has been performed yet")
        return self.last_result["reasons"].get(reason, 0)

    @keyword
    def blindforge_outcomes(self, primitive: str, epsilon: float, trials: int, seed: int):
        """Wins and blinded-message hits of the query-replay adversary in BlindForge"""
        binding = binding_from_descriptor(json.loads(primitive))
        strategy = build_attack("query-replay")
        outcomes = [
            run_blindforge(binding, epsilon, strategy, qstate.derive_seed(seed, i)) for i in range(trials)
        ]
        self.last_result = {
            "wins": sum(o.verdict for o in outcomes),
            "blinded": sum(bool(o.blinded) for o in outcomes),
            "valid_blinded": sum(bool(o.blinded and o.tag_valid) for o in outcomes),
            "unblinded": sum(o.blinded is False for o in outcomes),
            "valid_unblinded": sum(bool(o.blinded is False and o.tag_valid) for o in outcomes),
            "trials": trials,
        }
        return self.last_result
