"""Compile parsed forms into a typed :class:`Script`.

See ``docs/grammar.md`` for the full grammar. Every error raised here is a
:class:`CompileError` carrying the position of the offending form.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

from .. import dpl, quantum
from ..errors import CompileError, DomainError, RankError
from ..revision import PlausibilityModel, Revise
from ..worlds import And, Assert, Atom, Might, Not, Or, Seq, WorldModel
from .sexpr import SAtom, SExpr, SList, parse_all
from .sexpr import format as fmt

KEYWORDS = ("model", "ranks", "fomodel", "discourse", "story", "qstate", "qproj", "qop",
            "run", "compare-orders")


@dataclass(frozen=True)
class Utterance:
    label: str
    formula: object
    position: tuple


@dataclass(frozen=True)
class Discourse:
    name: str
    model: str
    utterances: tuple
    position: tuple

    def formulas_by_label(self) -> dict:
        return {u.label: u.formula for u in self.utterances}

    @property
    def uses_revision(self) -> bool:
        return any(_contains_revision(u.formula) for u in self.utterances)


def _contains_revision(formula) -> bool:
    if isinstance(formula, Revise):
        return True
    if isinstance(formula, Seq):
        return any(_contains_revision(p) for p in formula.parts)
    return False


@dataclass(frozen=True)
class Story:
    name: str
    model: str
    sentences: tuple  # of Utterance with a DplProgram as formula
    position: tuple


@dataclass(frozen=True)
class Command:
    kind: str  # "run" | "compare-orders"
    target: str
    position: tuple
    initial: tuple | None = None
    orders: tuple | None = None
    operands: tuple = ()


@dataclass
class Script:
    models: dict = field(default_factory=dict)
    fomodels: dict = field(default_factory=dict)
    discourses: dict = field(default_factory=dict)
    stories: dict = field(default_factory=dict)
    qstates: dict = field(default_factory=dict)
    qops: dict = field(default_factory=dict)
    commands: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    declared: dict = field(default_factory=dict)  # name -> (kind, position)

    def kind_of(self, name: str) -> str | None:
        entry = self.declared.get(name)
        return entry[0] if entry else None


def _err(message: str, node: SExpr) -> CompileError:
    return CompileError(message, node.position)


def _atom(node: SExpr, what: str) -> str:
    if not isinstance(node, SAtom):
        raise _err(f"expected {what}, got a list", node)
    return node.text


def _list(node: SExpr, what: str) -> SList:
    if not isinstance(node, SList):
        raise _err(f"expected {what}, got atom {node.text!r}", node)
    return node


def _arity(form: SList, at_least: int, usage: str) -> None:
    if len(form) - 1 < at_least:
        raise _err(f"arity mismatch: {usage}", form)


def parse_number(node: SExpr) -> complex:
    text = _atom(node, "a number")
    try:
        value = complex(text.replace("i", "j"))
    except ValueError:
        raise _err(f"not a number: {text!r}", node) from None
    if not cmath.isfinite(value):
        raise _err(f"number must be finite: {text!r}", node)
    return value


class Compiler:
    def __init__(self, script: Script | None = None):
        self.script = script if script is not None else Script()

    # ----------------------------------------------------------- helpers

    def declare(self, name: str, kind: str, node: SExpr) -> None:
        if name in self.script.declared:
            _, (line, col) = self.script.declared[name]
            raise _err(f"duplicate declaration of {name!r} (first declared at {line}:{col})", node)
        self.script.declared[name] = (kind, node.position)

    def lookup(self, name: str, kinds: tuple, node: SExpr):
        kind = self.script.kind_of(name)
        if kind is None:
            raise _err(f"unknown name {name!r}", node)
        if kind not in kinds:
            raise _err(f"{name!r} is a {kind}, expected {' or '.join(kinds)}", node)
        return kind

    # ------------------------------------------------------------- forms

    def compile_form(self, form: SExpr) -> None:
        form = _list(form, "a declaration")
        head = form.head
        if head is None:
            raise _err("declaration must start with a keyword", form)
        method = getattr(self, "c_" + head.replace("-", "_"), None)
        if head not in KEYWORDS or method is None:
            raise _err(f"unknown keyword {head!r}", form[0])
        method(form)

    def c_model(self, form: SList) -> None:
        _arity(form, 2, "(model NAME (worlds W ...) (atom A W ...) ...)")
        name = _atom(form[1], "a model name")
        worlds, valuation = None, {}
        for sub in form.children[2:]:
            sub = _list(sub, "(worlds ...) or (atom ...)")
            if sub.head == "worlds":
                if worlds is not None:
                    raise _err("duplicate (worlds ...) clause", sub)
                worlds = [_atom(w, "a world name") for w in sub.children[1:]]
                if not worlds:
                    raise _err("arity mismatch: (worlds W ...) needs at least one world", sub)
                if len(set(worlds)) != len(worlds):
                    raise _err("duplicate world name", sub)
            elif sub.head == "atom":
                _arity(sub, 1, "(atom NAME W ...)")
                atom = _atom(sub[1], "an atom name")
                if atom in valuation:
                    raise _err(f"duplicate declaration of atom {atom!r}", sub)
                if worlds is None:
                    raise _err("(worlds ...) must come before atoms", sub)
                ws = []
                for w in sub.children[2:]:
                    wname = _atom(w, "a world name")
                    if wname not in worlds:
                        raise _err(f"unknown world {wname!r}", w)
                    ws.append(wname)
                valuation[atom] = ws
            else:
                raise _err(f"unknown model clause {sub.head!r}", sub)
        if worlds is None:
            raise _err("model needs a (worlds ...) clause", form)
        self.declare(name, "model", form)
        self.script.models[name] = WorldModel(worlds, valuation)

    def c_ranks(self, form: SList) -> None:
        _arity(form, 2, "(ranks MODEL (W RANK) ...)")
        mname = _atom(form[1], "a model name")
        self.lookup(mname, ("model",), form[1])
        model = self.script.models[mname]
        if isinstance(model, PlausibilityModel):
            raise _err(f"duplicate declaration of ranks for {mname!r}", form)
        rank = {}
        for sub in form.children[2:]:
            sub = _list(sub, "(WORLD RANK)")
            if len(sub) != 2:
                raise _err("arity mismatch: rank entry is (WORLD RANK)", sub)
            w = _atom(sub[0], "a world name")
            if w not in model.worlds:
                raise _err(f"unknown world {w!r}", sub[0])
            if w in rank:
                raise _err(f"duplicate rank for world {w!r}", sub)
            text = _atom(sub[1], "a rank")
            if not text.isdigit():
                raise _err(f"rank must be a non-negative integer, got {text!r}", sub[1])
            rank[w] = int(text)
        try:
            self.script.models[mname] = PlausibilityModel(model, rank)
        except DomainError as exc:
            raise _err(exc.message, form) from None

    def c_fomodel(self, form: SList) -> None:
        _arity(form, 2, "(fomodel NAME (domain I ...) (sort TAG I ...) (pred P ARITY (I ...) ...))")
        name = _atom(form[1], "a model name")
        domain, sorts, preds = None, {}, {}
        for sub in form.children[2:]:
            sub = _list(sub, "a fomodel clause")
            if sub.head == "domain":
                domain = [_atom(d, "an individual") for d in sub.children[1:]]
                if not domain or len(set(domain)) != len(domain):
                    raise _err("domain must list at least one individual, without repeats", sub)
                continue
            if domain is None:
                raise _err("(domain ...) must come first", sub)
            if sub.head == "sort":
                _arity(sub, 1, "(sort TAG I ...)")
                tag = _atom(sub[1], "a sort tag")
                for d in sub.children[2:]:
                    ind = _atom(d, "an individual")
                    if ind not in domain:
                        raise _err(f"unknown individual {ind!r}", d)
                    sorts.setdefault(ind, set()).add(tag)
            elif sub.head == "pred":
                _arity(sub, 2, "(pred NAME ARITY (I ...) ...)")
                pname = _atom(sub[1], "a predicate name")
                if pname in preds:
                    raise _err(f"duplicate declaration of predicate {pname!r}", sub)
                atext = _atom(sub[2], "an arity")
                if not atext.isdigit():
                    raise _err(f"arity must be a non-negative integer, got {atext!r}", sub[2])
                arity = int(atext)
                tuples = []
                for t in sub.children[3:]:
                    t = _list(t, "a tuple (I ...)")
                    if len(t) != arity:
                        raise _err(f"arity mismatch: predicate {pname!r} has arity {arity}", t)
                    row = []
                    for d in t:
                        ind = _atom(d, "an individual")
                        if ind not in domain:
                            raise _err(f"unknown individual {ind!r}", d)
                        row.append(ind)
                    tuples.append(tuple(row))
                preds[pname] = (arity, tuples)
            else:
                raise _err(f"unknown fomodel clause {sub.head!r}", sub)
        if domain is None:
            raise _err("fomodel needs a (domain ...) clause", form)
        self.declare(name, "fomodel", form)
        self.script.fomodels[name] = dpl.FOModel(domain, preds, sorts)

    # -- worlds formulas

    def static(self, node: SExpr, model) -> object:
        if isinstance(node, SAtom):
            if node.text not in model.valuation:
                raise _err(f"unknown atom {node.text!r}", node)
            return Atom(node.text)
        head = node.head
        args = node.children[1:]
        if head == "not":
            if len(args) != 1:
                raise _err("arity mismatch: (not F) takes one argument", node)
            return Not(self.static(args[0], model))
        if head in ("and", "or"):
            if len(args) < 2:
                raise _err(f"arity mismatch: ({head} F G ...) takes at least two arguments", node)
            cls = And if head == "and" else Or
            result = self.static(args[0], model)
            for a in args[1:]:
                result = cls(result, self.static(a, model))
            return result
        raise _err(f"unknown connective {head!r}", node)

    def dynamic(self, node: SExpr, model) -> object:
        node = _list(node, "a dynamic formula such as (assert F)")
        head = node.head
        args = node.children[1:]
        if head in ("assert", "might", "revise"):
            if len(args) != 1:
                raise _err(f"arity mismatch: ({head} F) takes one argument", node)
            phi = self.static(args[0], model)
            if head == "assert":
                return Assert(phi)
            if head == "might":
                return Might(phi)
            if not isinstance(model, PlausibilityModel):
                raise _err("revise needs a model with declared ranks", node)
            return Revise(phi)
        if head == "seq":
            if not args:
                raise _err("arity mismatch: (seq D ...) needs at least one formula", node)
            return Seq([self.dynamic(a, model) for a in args])
        raise _err(f"unknown dynamic operator {head!r}", node)

    def utterance(self, node: SExpr, model) -> Utterance:
        node = _list(node, "an utterance")
        if node.head == "label":
            if len(node) != 3:
                raise _err("arity mismatch: (label NAME D)", node)
            return Utterance(_atom(node[1], "a label"), self.dynamic(node[2], model), node.position)
        return Utterance(fmt(node), self.dynamic(node, model), node.position)

    def c_discourse(self, form: SList) -> None:
        _arity(form, 3, "(discourse NAME MODEL UTTERANCE ...)")
        name = _atom(form[1], "a discourse name")
        mname = _atom(form[2], "a model name")
        self.lookup(mname, ("model",), form[2])
        model = self.script.models[mname]
        utterances = tuple(self.utterance(u, model) for u in form.children[3:])
        seen = {}
        for u in utterances:
            if u.label in seen and seen[u.label] != u.formula:
                raise _err(f"label {u.label!r} is used for two different formulas", u)
            seen[u.label] = u.formula
        self.declare(name, "discourse", form)
        self.script.discourses[name] = Discourse(name, mname, utterances, form.position)

    # -- DPL programs

    def program(self, node: SExpr, model: dpl.FOModel) -> dpl.DplProgram:
        node = _list(node, "a DPL instruction such as (exists x)")
        head = node.head
        args = node.children[1:]

        def var(n):
            v = _atom(n, "a variable")
            if v in model.sorts:
                raise _err(f"variable {v!r} clashes with a domain individual", n)
            return v

        if head == "exists":
            if len(args) != 1:
                raise _err("arity mismatch: (exists VAR)", node)
            return dpl.RandomAssign(var(args[0]))
        if head == "name":
            if len(args) != 2:
                raise _err("arity mismatch: (name VAR INDIVIDUAL)", node)
            ind = _atom(args[1], "an individual")
            if ind not in model.sorts:
                raise _err(f"unknown individual {ind!r}", args[1])
            return dpl.Introduce(var(args[0]), ind)
        if head == "test":
            if not args:
                raise _err("arity mismatch: (test PRED ARG ...)", node)
            pred = _atom(args[0], "a predicate name")
            if pred not in model.predicates:
                raise _err(f"unknown predicate {pred!r}", args[0])
            arity = model.predicates[pred][0]
            if len(args) - 1 != arity:
                raise _err(f"arity mismatch: predicate {pred!r} takes {arity} argument(s)", node)
            return dpl.Test(pred, [_atom(a, "an argument") for a in args[1:]])
        if head in ("neg", "seq"):
            if not args:
                raise _err(f"arity mismatch: ({head} P ...) needs at least one instruction", node)
            parts = [self.program(a, model) for a in args]
            body = parts[0] if len(parts) == 1 else dpl.Seq(parts)
            return dpl.Neg(body) if head == "neg" else dpl.Seq(parts)
        if head == "pronoun":
            if not args:
                raise _err("arity mismatch: (pronoun VAR TAG ...)", node)
            return dpl.Pronoun(var(args[0]), [_atom(t, "a sort tag") for t in args[1:]])
        raise _err(f"unknown DPL instruction {head!r}", node)

    def c_story(self, form: SList) -> None:
        _arity(form, 3, "(story NAME FOMODEL (LABEL INSTRUCTION ...) ...)")
        name = _atom(form[1], "a story name")
        mname = _atom(form[2], "a fomodel name")
        self.lookup(mname, ("fomodel",), form[2])
        model = self.script.fomodels[mname]
        sentences, labels = [], set()
        for s in form.children[3:]:
            s = _list(s, "a sentence (LABEL INSTRUCTION ...)")
            if len(s) < 2:
                raise _err("arity mismatch: a sentence is (LABEL INSTRUCTION ...)", s)
            label = _atom(s[0], "a sentence label")
            if label in labels:
                raise _err(f"duplicate sentence label {label!r}", s)
            labels.add(label)
            parts = [self.program(p, model) for p in s.children[1:]]
            sentences.append(Utterance(label, dpl.Seq(parts), s.position))
        self.declare(name, "story", form)
        self.script.stories[name] = Story(name, mname, tuple(sentences), form.position)

    # -- quantum

    def c_qstate(self, form: SList) -> None:
        _arity(form, 2, "(qstate NAME AMPLITUDE ...)")
        name = _atom(form[1], "a state name")
        amps = [parse_number(a) for a in form.children[2:]]
        try:
            psi = quantum.StateVector(amps, normalize=True)
        except DomainError as exc:
            raise _err(exc.message, form) from None
        norm = sum(abs(a) ** 2 for a in amps) ** 0.5
        if abs(norm - 1.0) > quantum.NORM_TOL:
            self.script.diagnostics.append(
                f"{form.line}:{form.col}: qstate {name} normalized (input norm {norm!r})")
        self.declare(name, "qstate", form)
        self.script.qstates[name] = psi

    def c_qproj(self, form: SList) -> None:
        _arity(form, 2, "(qproj NAME (AMPLITUDE ...) ...)")
        name = _atom(form[1], "a projector name")
        vectors = [[parse_number(a) for a in _list(v, "a spanning vector (AMPLITUDE ...)")]
                   for v in form.children[2:]]
        try:
            proj = quantum.make_projector(vectors)
        except RankError as exc:
            raise _err(f"rank failure: {exc.message}", form) from None
        except DomainError as exc:
            raise _err(exc.message, form) from None
        self.declare(name, "qproj", form)
        self.script.qops[name] = proj

    def c_qop(self, form: SList) -> None:
        _arity(form, 2, "(qop NAME (ROW ...) ...)")
        name = _atom(form[1], "an operator name")
        rows = [[parse_number(a) for a in _list(r, "a matrix row")] for r in form.children[2:]]
        if any(len(r) != len(rows) for r in rows):
            raise _err("qop matrix must be square", form)
        try:
            op = quantum.LinOperator(rows)
        except DomainError as exc:
            raise _err(exc.message, form) from None
        self.declare(name, "qop", form)
        self.script.qops[name] = op

    # -- commands

    def _command(self, form: SList, kind: str) -> None:
        _arity(form, 1, f"({kind} TARGET ...)")
        target = _atom(form[1], "a discourse, story or qstate name")
        tkind = self.lookup(target, ("discourse", "story", "qstate"), form[1])
        rest = form.children[2:]
        if tkind == "qstate":
            names = [_atom(r, "a projector name") for r in rest]
            for n, node in zip(names, rest):
                self.lookup(n, ("qproj", "qop"), node)
            if kind == "compare-orders":
                if len(names) != 2:
                    raise _err("arity mismatch: (compare-orders STATE A B) takes two projectors", form)
                for n, node in zip(names, rest):
                    self.lookup(n, ("qproj",), node)
            elif not names:
                raise _err("arity mismatch: (run STATE Q ...) needs at least one operator", form)
            self.script.commands.append(Command(kind, target, form.position, operands=tuple(names)))
            return
        initial = orders = None
        for clause in rest:
            clause = _list(clause, "(from W ...) or (orders (LABEL ...) ...)")
            if clause.head == "from" and tkind == "discourse":
                model = self.script.models[self.script.discourses[target].model]
                ws = []
                for w in clause.children[1:]:
                    wname = _atom(w, "a world name")
                    if wname not in model.worlds:
                        raise _err(f"unknown world {wname!r}", w)
                    ws.append(wname)
                initial = tuple(ws)
            elif clause.head == "orders" and kind == "compare-orders":
                if tkind == "discourse":
                    labels = {u.label for u in self.script.discourses[target].utterances}
                else:
                    labels = {u.label for u in self.script.stories[target].sentences}
                out = []
                for o in clause.children[1:]:
                    o = _list(o, "an order (LABEL ...)")
                    seq = [_atom(x, "a label") for x in o]
                    for x, node in zip(seq, o):
                        if x not in labels:
                            raise _err(f"unknown label {x!r}", node)
                    if not seq:
                        raise _err("an order needs at least one label", o)
                    out.append(tuple(seq))
                if not out:
                    raise _err("arity mismatch: (orders (LABEL ...) ...) needs at least one order", clause)
                orders = tuple(out)
            else:
                raise _err(f"unexpected clause {clause.head!r} in {kind}", clause)
        self.script.commands.append(Command(kind, target, form.position, initial, orders))

    def c_run(self, form: SList) -> None:
        self._command(form, "run")

    def c_compare_orders(self, form: SList) -> None:
        self._command(form, "compare-orders")


def compile(forms, script: Script | None = None) -> Script:  # noqa: A001
    """Compile a single form or a list of forms into a Script."""
    if isinstance(forms, (SAtom, SList)):
        forms = [forms]
    compiler = Compiler(script)
    for form in forms:
        compiler.compile_form(form)
    return compiler.script


def compile_text(text: str) -> Script:
    return compile(parse_all(text))
