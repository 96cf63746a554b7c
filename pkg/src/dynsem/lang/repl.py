"""Line-oriented interactive loop over the engines.

One current state is kept per loaded model. Declarations typed at the
prompt are compiled into the session script; any other form is applied to
the current model's state.
"""

from __future__ import annotations

import sys
from importlib import resources
from pathlib import Path
from typing import TextIO

from .. import dpl, quantum
from ..errors import DynsemError
from ..worlds import DynamicFormula, truth_set
from .compiler import KEYWORDS, Compiler, Script
from .runner import run_command, state_list
from .sexpr import SList, parse_all
from .sexpr import format as fmt

DEMOS = ("knocking", "anaphora", "blue-cheese", "order-effect")

HELP = """\
:load NAME|PATH   load a demo (knocking, anaphora, blue-cheese, order-effect) or a script
:use NAME         switch to another declared model, fomodel or qstate
:state            print the current state
:reset            restore the model's initial state
:undo             restore the state before the last update
:orders F G       print F-then-G and G-then-F side by side
:models           list loaded models
:help             this text
:quit             leave
Declarations such as (model ...) are added to the session; other forms update
the current state: (assert F) (might F) (revise F) for world models,
DPL instructions such as (exists x) for fomodels, (ask Q) for qstates."""


def demo_text(name: str) -> str:
    if name not in DEMOS:
        raise FileNotFoundError(f"unknown demo {name!r}; choose one of {', '.join(DEMOS)}")
    return resources.files("dynsem").joinpath(f"data/demos/{name}.dsl").read_text(encoding="utf-8")


def show_worlds(model, state) -> str:
    if not state:
        return "∅ (absurd)"
    return "{" + ", ".join(state_list(model, state)) + "}"


class Repl:
    def __init__(self, out: TextIO = sys.stdout):
        self.out = out
        self.script = Script()
        self.current: str | None = None
        self.history: dict[str, list] = {}

    def say(self, text: str = "") -> None:
        print(text, file=self.out)

    # --------------------------------------------------------- engine state

    def _kind(self, name: str) -> str:
        return self.script.kind_of(name)

    def _initial(self, name: str):
        kind = self._kind(name)
        if kind == "model":
            return self.script.models[name].full_state()
        if kind == "fomodel":
            return frozenset([dpl.EMPTY_INPUT])
        return self.script.qstates[name]

    def _select(self, name: str) -> None:
        if self._kind(name) not in ("model", "fomodel", "qstate"):
            raise DynsemError(f"{name!r} is not a model, fomodel or qstate")
        self.current = name
        self.history.setdefault(name, [self._initial(name)])

    def state(self):
        return self.history[self.current][-1]

    def show(self, state=None) -> str:
        state = self.state() if state is None else state
        kind = self._kind(self.current)
        if kind == "model":
            return show_worlds(self.script.models[self.current], state)
        if kind == "fomodel":
            if not state:
                return "∅ (absurd)"
            tops = sorted({ctx.referents[-1][0] for _, ctx in state if ctx.referents})
            return f"{len(state)} output(s); most salient: {', '.join(tops) or '-'}"
        return "psi = [" + ", ".join(f"{a:.6g}" for a in state.amplitudes) + "]"

    def facts(self, state) -> str:
        if self._kind(self.current) != "model":
            return ""
        if not state:
            return "accepts every proposition"
        model = self.script.models[self.current]
        accepted = [a for a in model.atoms if state <= model.valuation[a]]
        return "accepts: " + (", ".join(accepted) if accepted else "(no atom)")

    def step(self, form, state):
        """Apply one form to ``state`` without touching the history."""
        kind = self._kind(self.current)
        comp = Compiler(self.script)
        if kind == "model":
            formula: DynamicFormula = comp.dynamic(form, self.script.models[self.current])
            return formula.run(self.script.models[self.current], state), None
        if kind == "fomodel":
            model = self.script.fomodels[self.current]
            bindings: dict = {}
            out = dpl.eval_program(model, state, comp.program(form, model), bindings)
            note = ", ".join(f"{v} ↦ {sorted(b)[0] if len(b) == 1 else sorted(b)}" for v, b in bindings.items())
            return out, (f"bound {note}" if note else None)
        if not (isinstance(form, SList) and form.head == "ask" and len(form) == 2):
            raise DynsemError("on a qstate, enter (ask QUESTION)", form.position)
        qname = form[1].text if not isinstance(form[1], SList) else ""
        comp.lookup(qname, ("qproj",), form[1])
        proj = self.script.qops[qname]
        p = quantum.born_prob(state, proj)
        return quantum.collapse(state, proj), f"p(yes) = {p:.12g}"

    # ------------------------------------------------------------- commands

    def load(self, arg: str) -> None:
        path = Path(arg)
        text = path.read_text(encoding="utf-8") if path.exists() else demo_text(arg)
        script = Script()
        comp = Compiler(script)
        for form in parse_all(text):
            comp.compile_form(form)
        self.script, self.history, self.current = script, {}, None
        for name, (kind, _) in script.declared.items():
            if kind in ("model", "fomodel", "qstate"):
                self._select(name)
                break
        self.say(f"loaded {arg}; current model: {self.current or '-'}")
        if self.current:
            self.say(f"  {self.show()}")

    def command(self, line: str) -> bool:
        cmd, _, rest = line.partition(" ")
        rest = rest.strip()
        if cmd in (":quit", ":q", ":exit"):
            return False
        if cmd == ":help":
            self.say(HELP)
        elif cmd == ":load":
            self.load(rest)
        elif cmd == ":models":
            for name, (kind, _) in self.script.declared.items():
                if kind in ("model", "fomodel", "qstate"):
                    self.say(f"  {'*' if name == self.current else ' '} {name} ({kind})")
        elif cmd == ":use":
            self._select(rest)
            self.say(f"current model: {rest}; {self.show()}")
        elif self.current is None:
            self.say("error: no model loaded (try :load knocking)")
        elif cmd == ":state":
            self.say(self.show())
        elif cmd == ":reset":
            self.history[self.current].append(self._initial(self.current))
            self.say(self.show())
        elif cmd == ":undo":
            stack = self.history[self.current]
            if len(stack) > 1:
                stack.pop()
            else:
                self.say("nothing to undo")
            self.say(self.show())
        elif cmd == ":orders":
            forms = parse_all(rest)
            if len(forms) != 2:
                raise DynsemError(":orders takes exactly two forms")
            f, g = forms
            start = self.state()
            fg = self.step(g, self.step(f, start)[0])[0]
            gf = self.step(f, self.step(g, start)[0])[0]
            width = max(len(fmt(f)), len(fmt(g))) * 2 + 6
            self.say(f"{(fmt(f) + ' then ' + fmt(g)).ljust(width)}  {self.show(fg)}")
            self.say(f"{(fmt(g) + ' then ' + fmt(f)).ljust(width)}  {self.show(gf)}")
            self.say("orders diverge" if fg != gf else "orders agree")
        else:
            self.say(f"error: unknown command {cmd} (try :help)")
        return True

    def form(self, form) -> None:
        if isinstance(form, SList) and form.head in KEYWORDS:
            comp = Compiler(self.script)
            before = len(self.script.commands)
            comp.compile_form(form)
            for command in self.script.commands[before:]:
                res = run_command(self.script, command)
                self.say(f"{command.kind} {command.target}: verdict={res.verdict} "
                         f"bindings={res.bindings} probabilities={res.probabilities}")
                if res.order_effects is not None:
                    self.say(f"  order effects: {res.order_effects}")
            del self.script.commands[before:]
            if self.current is None and form.head in ("model", "fomodel", "qstate"):
                self._select(form[1].text)
            return
        if self.current is None:
            self.say("error: no model loaded (try :load knocking)")
            return
        new, note = self.step(form, self.state())
        self.history[self.current].append(new)
        self.say(self.show(new))
        for extra in (note, self.facts(new)):
            if extra:
                self.say(f"  {extra}")

    def feed(self, text: str) -> bool:
        """Handle one complete input; return False to stop the session."""
        text = text.strip()
        if not text or text.startswith(";"):
            return True
        try:
            if text.startswith(":"):
                return self.command(text)
            for form in parse_all(text):
                self.form(form)
        except (DynsemError, OSError) as exc:
            self.say(f"error: {exc}")
        return True


def _balanced(text: str) -> bool:
    depth, in_str, esc = 0, False, False
    for line in text.splitlines():
        for ch in line:
            if in_str:
                if esc:
                    esc = False
                elif ch == "\\":
                    esc = True
                elif ch == '"':
                    in_str = False
            elif ch == ";":
                break
            elif ch == '"':
                in_str = True
            elif ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
    return depth <= 0 and not in_str


def repl_loop(stream: TextIO = sys.stdin, out: TextIO = sys.stdout, prompt: bool | None = None) -> Repl:
    if prompt is None:
        prompt = stream.isatty()
    session = Repl(out)
    if prompt:
        session.say("dynsem repl; :help for commands")
    buffer = ""
    while True:
        if prompt:
            out.write("... " if buffer else "> ")
            out.flush()
        line = stream.readline()
        if not line:
            if buffer:
                session.feed(buffer)
            return session
        buffer += line
        if buffer.lstrip().startswith(":") or _balanced(buffer):
            text, buffer = buffer, ""
            if not session.feed(text):
                return session
