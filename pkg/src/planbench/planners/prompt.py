"""Single-shot prompt asking a language model for a JSON plan."""

from __future__ import annotations

RESPONSE_TEMPLATE = """{
  "reasoning": [
    "A high-level explanation of the overall plan, describing how it transitions from the initial state to the goal."
  ],
  "plan": [
    {
      "name": "action_name",
      "parameters": ["arg1", "arg2"],
      "reason": "Explanation of why this action was chosen.",
      "confirm_reasoning": "Final validation statement."
    }
  ]
}"""

SYSTEM_PROMPT = f"""You are a planning assistant. You read a PDDL domain and a PDDL problem and produce a plan that transforms the initial state into a state satisfying the goal.

Input:
- PDDL domain: the predicates and the action schemas with their preconditions and effects.
- PDDL problem: the objects, the initial facts, and the goal.

Your response must include:
- A high-level reasoning section describing the overall approach.
- A detailed plan, listed as a sequence of actions.

Output format:
The response must be valid JSON with two keys:
- "reasoning": an array of strings summarising your strategy.
- "plan": the actions in execution order. Each action is an object with
  - "name": an action name exactly as declared in the domain;
  - "parameters": object names, in the order of the action's parameters;
  - "reason": why this action is taken at this point;
  - "confirm_reasoning": a check that the action's preconditions hold in the current state.

Use exactly this template:
{RESPONSE_TEMPLATE}

Respond with the JSON object only. Do not add any text before or after it."""


def build_prompt(domain_text: str, problem_text: str) -> tuple[str, str]:
    """Return ``(system_text, user_text)`` for one planning request.

    The PDDL files are passed through verbatim so the model sees exactly
    what a classical planner would read.
    """
    user = (
        "PDDL domain:\n"
        "<<<BEGIN PDDL DOMAIN>>>\n"
        f"{domain_text}\n"
        "<<<END PDDL DOMAIN>>>\n\n"
        "PDDL problem:\n"
        "<<<BEGIN PDDL PROBLEM>>>\n"
        f"{problem_text}\n"
        "<<<END PDDL PROBLEM>>>"
    )
    return SYSTEM_PROMPT, user
