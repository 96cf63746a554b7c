"""Execute the commands of a compiled script against the four engines."""

from __future__ import annotations

import itertools

from .. import dpl, quantum
from ..errors import ConditioningError, DynsemError, PreconditionError, ResolutionError
from ..worlds import ABSURD_VERDICT, COHERENT, run_discourse
from .compiler import Command, Script
from .report import CommandResult, RunReport

MAX_PERMUTED_UTTERANCES = 6


def state_list(model, state) -> list:
    """World ids of ``state`` in the model's declaration order."""
    return [w for w in model.worlds if w in state]


def product_key(labels) -> str:
    """Operator-product notation: the last utterance is written first."""
    return "∘".join(reversed(labels))


def distinct_orders(labels: list[str]) -> list[tuple]:
    if len(labels) > MAX_PERMUTED_UTTERANCES:
        raise PreconditionError(
            f"{len(labels)} utterances are too many to permute; list the orders explicitly")
    seen, out = set(), []
    for perm in itertools.permutations(labels):
        if perm not in seen:
            seen.add(perm)
            out.append(perm)
    return out


def _pos(command: Command) -> str:
    return f"{command.position[0]}:{command.position[1]}"


def _run_discourse(script: Script, command: Command, with_trace: bool) -> CommandResult:
    d = script.discourses[command.target]
    model = script.models[d.model]
    engine = "revision" if d.uses_revision else "worlds"
    initial = frozenset(command.initial) if command.initial is not None else model.full_state()
    result = CommandResult(command.kind, command.target, engine, _pos(command))
    if command.kind == "run":
        res = run_discourse(model, initial, [u.formula for u in d.utterances])
        result.verdict = res.verdict
        steps = ["initial"] + [u.label for u in d.utterances]
        result.trace = [{"step": s, "state": state_list(model, st)} for s, st in zip(steps, res.trace)]
        if not with_trace:
            result.trace = result.trace[-1:]
        return result
    by_label = d.formulas_by_label()
    orders = command.orders or distinct_orders([u.label for u in d.utterances])
    table = {}
    for order in orders:
        res = run_discourse(model, initial, [by_label[label] for label in order])
        table[product_key(order)] = {
            "utterances": list(order),
            "state": state_list(model, res.final),
            "verdict": res.verdict,
        }
    finals = {tuple(v["state"]) for v in table.values()}
    result.order_effects = {"orders": table, "divergent": len(finals) > 1}
    return result


def _story_entry(model: dpl.FOModel, sentences) -> dict:
    try:
        outputs, bindings = dpl.pronoun_bindings(model, sentences)
    except ResolutionError as exc:
        return {"error": exc.message, "verdict": "unresolved"}
    return {"bindings": bindings, "verdict": COHERENT if outputs else ABSURD_VERDICT}


def _run_story(script: Script, command: Command, with_trace: bool) -> CommandResult:
    story = script.stories[command.target]
    model = script.fomodels[story.model]
    result = CommandResult(command.kind, command.target, "dpl", _pos(command))
    by_label = {s.label: s.formula for s in story.sentences}
    labels = [s.label for s in story.sentences]
    if command.kind == "run":
        report = dpl.run_text_discourse(model, [s.formula for s in story.sentences])
        result.bindings = report.bindings
        result.verdict = COHERENT if report.outputs else ABSURD_VERDICT
        if with_trace:
            trace, current = [], frozenset([dpl.EMPTY_INPUT])
            for s in story.sentences:
                current = dpl.eval_program(model, current, s.formula)
                tops = sorted({ctx.referents[-1][0] for _, ctx in current if ctx.referents})
                trace.append({"step": s.label, "outputs": len(current), "salient": tops})
            result.trace = trace
        orders = [tuple(labels[i] for i in idx) for idx in dpl.sentence_orders(len(labels))]
        sensitive = report.order_sensitive
    else:
        orders = command.orders or distinct_orders(labels)
        sensitive = None
    table = {"".join(order): _story_entry(model, [by_label[x] for x in order]) for order in orders}
    if sensitive is None:
        signatures = {repr(sorted(v.items())) for v in table.values()}
        sensitive = len(signatures) > 1
    result.order_effects = {"orders": table, "divergent": sensitive}
    return result


def _run_quantum(script: Script, command: Command, with_trace: bool) -> CommandResult:
    psi = script.qstates[command.target]
    ops = [script.qops[n] for n in command.operands]
    result = CommandResult(command.kind, command.target, "quantum", _pos(command))
    probs = {f"born:{n}": quantum.born_prob(psi, op)
             for n, op in zip(command.operands, ops) if isinstance(op, quantum.Projector)}
    if command.kind == "compare-orders":
        a, b = ops
        report = quantum.order_effect_report(psi, a, b)
        result.probabilities = probs
        result.order_effects = {"first": command.operands[0], "second": command.operands[1],
                                **report.to_dict()}
        return result
    probs["sequential"] = quantum.sequential_prob(psi, ops)
    for (na, a), (nb, b) in zip(zip(command.operands, ops), zip(command.operands[1:], ops[1:])):
        if not isinstance(b, quantum.Projector):
            continue
        try:
            if isinstance(a, quantum.Projector):
                probs[f"cond:{nb}|{na}"] = quantum.luders_conditional(psi, a, b)
            else:
                probs[f"cond:{nb}|{na}"] = quantum.general_conditional(psi, a, b)
        except ConditioningError:
            probs[f"cond:{nb}|{na}"] = None
    result.probabilities = probs
    if with_trace:
        result.trace = [{"step": n, "probability": quantum.sequential_prob(psi, ops[:k + 1])}
                        for k, n in enumerate(command.operands)]
    return result


def run_command(script: Script, command: Command, with_trace: bool = True) -> CommandResult:
    kind = script.kind_of(command.target)
    try:
        if kind == "discourse":
            return _run_discourse(script, command, with_trace)
        if kind == "story":
            return _run_story(script, command, with_trace)
        return _run_quantum(script, command, with_trace)
    except DynsemError as exc:
        if exc.position is None:
            exc.position = command.position
        raise


def run_script(script: Script, with_trace: bool = True) -> RunReport:
    report = RunReport(diagnostics=list(script.diagnostics))
    for command in script.commands:
        report.results.append(run_command(script, command, with_trace))
    return report
