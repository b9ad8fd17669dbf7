"""
Rule Evaluator

Iterates the registered rules that apply to a context (diagram or scheme),
collecting violations.
"""
from typing import List

from pydantic import BaseModel

from backend.core.diagram_models import RuleViolation
from backend.core.errors import MultisectionError
from backend.core.rule_registry import RuleRegistry


class RuleEvaluator:
    """Runs every applicable rule in the registry against a single context."""

    def __init__(self, registry: RuleRegistry):
        self.registry = registry
        self.rules_evaluated = 0

    def evaluate_all(self, ctx: BaseModel) -> List[RuleViolation]:
        """
        Evaluate every registered rule whose context type matches ``ctx``.
        Returns the list of violations (failed rules only); ``rules_evaluated``
        counts the rules that ran.
        """
        violations: List[RuleViolation] = []
        self.rules_evaluated = 0
        for rule in self.registry.get_all():
            if not rule.applies_to(ctx):
                continue
            self.rules_evaluated += 1
            try:
                result = rule.evaluate(ctx)
            except MultisectionError as exc:
                # malformed input counts as a failure of this rule
                result = rule.violation(f"could not evaluate: {exc.message}")
            if result is not None:
                violations.append(result)
        return violations
