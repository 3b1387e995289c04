"""Backward induction and pure-strategy analysis of game trees."""

from __future__ import annotations

import dataclasses
import itertools

import pandas as pd
import yaml

from phishgan.games.tree import DecisionNode, GameTree, Leaf, Path, Player

Profile = dict[Path, str]


@dataclasses.dataclass(frozen=True)
class Solution:
    """Outcome of backward induction.

    Attributes:
        tree: The solved tree.
        choices: Chosen action at every decision node, by path.
        values: Continuation payoffs (attacker, defender) at every node.
    """

    tree: GameTree
    choices: Profile
    values: dict[Path, tuple[float, float]]

    @property
    def payoffs(self) -> tuple[float, float]:
        return self.values[()]

    @property
    def equilibrium_path(self) -> list[str]:
        path: list[str] = []
        while tuple(path) in self.choices:
            path.append(self.choices[tuple(path)])
        return path

    def best_response(self, path: Path) -> str:
        return self.choices[path]

    def to_text(self) -> str:
        """The tree as indented text, chosen actions marked with `*`."""
        lines = [f"{self.tree.name}: equilibrium payoffs {_pair(self.payoffs)}"]
        for path, node in self.tree.walk():
            if not path:
                continue
            depth = len(path)
            parent = path[:-1]
            action = path[-1]
            mark = "*" if self.choices.get(parent) == action else " "
            mover = self.tree.node(parent).player
            detail = (
                f"-> {_pair(node.payoffs)}"
                if isinstance(node, Leaf)
                else f"({node.player}) value {_pair(self.values[path])}"
            )
            lines.append(f"{'  ' * (depth - 1)}{mark} {mover}: {action} {detail}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "game": self.tree.name,
            "equilibrium_path": self.equilibrium_path,
            "payoffs": {"attacker": self.payoffs[0], "defender": self.payoffs[1]},
            "decisions": [
                {
                    "path": list(path),
                    "player": str(self.tree.node(path).player),
                    "action": action,
                    "value": {"attacker": self.values[path][0], "defender": self.values[path][1]},
                }
                for path, action in self.choices.items()
            ],
        }

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)


def _pair(payoffs: tuple[float, float]) -> str:
    return f"({payoffs[0]:g}, {payoffs[1]:g})"


def solve_backward_induction(tree: GameTree) -> Solution:
    """Solve `tree` from the leaves up.

    At each decision node the mover picks the action with the highest
    continuation payoff for themselves; ties go to the earliest action.
    """
    choices: Profile = {}
    values: dict[Path, tuple[float, float]] = {}

    def solve(path: Path, node: DecisionNode | Leaf) -> tuple[float, float]:
        if isinstance(node, Leaf):
            values[path] = node.payoffs
            return node.payoffs
        best_action = None
        best_value = None
        for action, child in zip(node.actions, node.children, strict=True):
            value = solve(path + (action,), child)
            if best_value is None or value[node.player.index] > best_value[node.player.index]:
                best_action, best_value = action, value
        choices[path] = best_action
        values[path] = best_value
        return best_value

    solve((), tree.root)
    ordered = {path: choices[path] for path, _ in tree.decision_nodes()}
    return Solution(tree=tree, choices=ordered, values=values)


def outcome(tree: GameTree, profile: Profile) -> tuple[float, float]:
    """Payoffs reached when both players follow `profile` from the root."""
    path: Path = ()
    node = tree.root
    while isinstance(node, DecisionNode):
        action = profile[path]
        node = node.child(action)
        path = path + (action,)
    return node.payoffs


def pure_strategies(tree: GameTree, player: Player) -> list[Profile]:
    """Every assignment of one action to each of `player`'s decision nodes."""
    nodes = tree.decision_nodes(player)
    return [
        {path: action for (path, _), action in zip(nodes, actions, strict=True)}
        for actions in itertools.product(*(node.actions for _, node in nodes))
    ]


def strategy_label(strategy: Profile) -> str:
    return "/".join(strategy.values()) or "-"


def strategic_form(tree: GameTree) -> pd.DataFrame:
    """Payoff pairs for every attacker (rows) and defender (columns) strategy."""
    attackers = pure_strategies(tree, Player.ATTACKER)
    defenders = pure_strategies(tree, Player.DEFENDER)
    return pd.DataFrame(
        [
            [outcome(tree, {**attacker, **defender}) for defender in defenders]
            for attacker in attackers
        ],
        index=[strategy_label(s) for s in attackers],
        columns=[strategy_label(s) for s in defenders],
    )


def pure_nash_equilibria(tree: GameTree) -> list[Profile]:
    """Pure strategy profiles from which no player gains by deviating alone."""
    attackers = pure_strategies(tree, Player.ATTACKER)
    defenders = pure_strategies(tree, Player.DEFENDER)
    equilibria = []
    for attacker, defender in itertools.product(attackers, defenders):
        value = outcome(tree, {**attacker, **defender})
        if any(outcome(tree, {**other, **defender})[0] > value[0] for other in attackers):
            continue
        if any(outcome(tree, {**attacker, **other})[1] > value[1] for other in defenders):
            continue
        equilibria.append({**attacker, **defender})
    return equilibria


def is_subgame_perfect(tree: GameTree, profile: Profile) -> bool:
    """Whether `profile` is optimal for the mover at every decision node."""
    for path, node in tree.decision_nodes():
        mover = node.player.index
        chosen = _continuation(tree, profile, path + (profile[path],))[mover]
        best = max(
            _continuation(tree, profile, path + (action,))[mover] for action in node.actions
        )
        if chosen < best:
            return False
    return True


def _continuation(tree: GameTree, profile: Profile, path: Path) -> tuple[float, float]:
    node = tree.node(path)
    while isinstance(node, DecisionNode):
        action = profile[path]
        path = path + (action,)
        node = node.child(action)
    return node.payoffs


def affine_transform(tree: GameTree, player: Player, scale: float, shift: float) -> GameTree:
    """Replace `player`'s payoff u by scale * u + shift at every leaf.

    Raises:
        ValueError: If `scale` is not positive.
    """
    if scale <= 0:
        msg = f"scale must be positive, got {scale}"
        raise ValueError(msg)

    def transform(leaf: Leaf) -> Leaf:
        payoffs = list(leaf.payoffs)
        payoffs[player.index] = scale * payoffs[player.index] + shift
        return Leaf(*payoffs)

    return tree.map_leaves(transform)
