"""Two-player extensive-form game trees.

A tree is made of decision nodes, each owned by the attacker or the defender
with an ordered list of actions, and leaves holding the (attacker, defender)
payoff pair. Nodes are addressed by the path of actions leading to them; the
root's path is the empty tuple.
"""

from __future__ import annotations

from collections.abc import Callable, Iterator

import dataclasses
import enum

from phishgan.settings import DeploymentPayoffs, LossWeights
from phishgan.urls.labels import UrlLabel

Path = tuple[str, ...]


class Player(enum.StrEnum):
    ATTACKER = "attacker"
    DEFENDER = "defender"

    @property
    def index(self) -> int:
        """Position of this player's payoff in a leaf."""
        return 0 if self is Player.ATTACKER else 1


@dataclasses.dataclass(frozen=True)
class Leaf:
    attacker: float
    defender: float

    @property
    def payoffs(self) -> tuple[float, float]:
        return (self.attacker, self.defender)


@dataclasses.dataclass(frozen=True)
class DecisionNode:
    player: Player
    actions: tuple[str, ...]
    children: tuple[DecisionNode | Leaf, ...]

    def __post_init__(self):
        if not self.actions:
            msg = f"a {self.player} node needs at least one action"
            raise ValueError(msg)
        if len(self.actions) != len(self.children):
            msg = f"{len(self.actions)} actions but {len(self.children)} children"
            raise ValueError(msg)
        if len(set(self.actions)) != len(self.actions):
            msg = f"duplicate actions in {self.actions}"
            raise ValueError(msg)

    def child(self, action: str) -> DecisionNode | Leaf:
        return self.children[self.actions.index(action)]


Node = DecisionNode | Leaf


@dataclasses.dataclass(frozen=True)
class GameTree:
    name: str
    root: Node

    def node(self, path: Path) -> Node:
        node = self.root
        for action in path:
            if isinstance(node, Leaf):
                msg = f"path {path} runs past a leaf"
                raise KeyError(msg)
            node = node.child(action)
        return node

    def walk(self) -> Iterator[tuple[Path, Node]]:
        """Every node with its path, parents before children, actions in order."""
        stack: list[tuple[Path, Node]] = [((), self.root)]
        while stack:
            path, node = stack.pop()
            yield path, node
            if isinstance(node, DecisionNode):
                pairs = list(zip(node.actions, node.children, strict=True))
                stack.extend((path + (action,), child) for action, child in reversed(pairs))

    def leaves(self) -> list[tuple[Path, Leaf]]:
        return [(path, node) for path, node in self.walk() if isinstance(node, Leaf)]

    def decision_nodes(self, player: Player | None = None) -> list[tuple[Path, DecisionNode]]:
        return [
            (path, node)
            for path, node in self.walk()
            if isinstance(node, DecisionNode) and (player is None or node.player is player)
        ]

    def map_leaves(self, fn: Callable[[Leaf], Leaf]) -> GameTree:
        """A copy of the tree with every leaf replaced by `fn(leaf)`."""

        def rebuild(node: Node) -> Node:
            if isinstance(node, Leaf):
                return fn(node)
            children = tuple(rebuild(child) for child in node.children)
            return DecisionNode(node.player, node.actions, children)

        return GameTree(self.name, rebuild(self.root))


# Training game.

ADVERSARIAL = "adversarial"
REAL = "real"
ATTACKER_ACTIONS = (ADVERSARIAL, REAL)
DEFENDER_ACTIONS = ("Benign-Fake", "Malicious-Fake", "Benign-Real", "Malicious-Real")


def _judgement(action: str) -> tuple[UrlLabel, bool]:
    """Class and realness a defender action asserts."""
    label, realness = action.split("-")
    return UrlLabel.parse(label), realness == "Real"


def training_leaf(
    true_class: UrlLabel, attack: str, defence: str, weights: LossWeights
) -> Leaf:
    """Payoffs when the attacker plays `attack` and the defender `defence`.

    The defender earns lambda_class for the right class and lambda_adv for the
    right realness call. The attacker earns lambda_rec exactly when the
    realness call is wrong.
    """
    label, says_real = _judgement(defence)
    class_correct = label == true_class
    realness_correct = says_real == (attack == REAL)
    return Leaf(
        attacker=weights.lambda_rec if not realness_correct else 0.0,
        defender=weights.lambda_class * class_correct + weights.lambda_adv * realness_correct,
    )


def training_game(true_class: UrlLabel | int | str, weights: LossWeights | None = None) -> GameTree:
    """The game played while training, for a sample of class `true_class`.

    The attacker (generator) sends an adversarial or a real URL; the defender
    (discriminator) answers with a class and a realness call.
    """
    true_class = true_class if isinstance(true_class, UrlLabel) else UrlLabel.parse(str(true_class))
    weights = weights or LossWeights()
    return GameTree(
        name=f"training ({true_class.token})",
        root=DecisionNode(
            Player.ATTACKER,
            ATTACKER_ACTIONS,
            tuple(
                DecisionNode(
                    Player.DEFENDER,
                    DEFENDER_ACTIONS,
                    tuple(
                        training_leaf(true_class, attack, defence, weights)
                        for defence in DEFENDER_ACTIONS
                    ),
                )
                for attack in ATTACKER_ACTIONS
            ),
        ),
    )


# Deployment game.

DONT_SEND = "Don't-Send"
SEND = "Send"
BENIGN = "Benign"
MALICIOUS = "Malicious"


def deployment_game(payoffs: DeploymentPayoffs | None = None) -> GameTree:
    """The game played once the detector is deployed.

    The attacker sends a malicious URL or not; the defender classifies what
    arrives as benign or malicious.
    """
    payoffs = payoffs or DeploymentPayoffs()
    return GameTree(
        name="deployment",
        root=DecisionNode(
            Player.ATTACKER,
            (DONT_SEND, SEND),
            (
                Leaf(*payoffs.dont_send),
                DecisionNode(
                    Player.DEFENDER,
                    (BENIGN, MALICIOUS),
                    (Leaf(*payoffs.send_benign), Leaf(*payoffs.send_malicious)),
                ),
            ),
        ),
    )
