"""A small line-oriented rule language and its grounding.

Example model file::

    # friends tend to vote alike
    domain Person = { a1, a2, b }
    domain Party  = { inc, chal }
    predicate Friend(Person, Person)
    predicate Voted(Person, Party)
    evidence Friend(a1, b) = 1.0
    evidence Voted(a1, inc) = 1.0
    rule 1.0 : Friend(X, B2) & Voted(X, P) -> Voted(B2, P)

Statements (one per line): ``domain``, ``predicate``, ``evidence`` and
``rule``.  Comments start with ``#``.  Identifiers match
``[A-Za-z][A-Za-z0-9_]*``.  Inside a rule, an argument that is a
declared constant is a constant; otherwise a capitalized identifier is a
variable.  Constants must be declared before use.  Zero-argument
predicates are written with or without ``()``.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import GroundingError, ProgramError


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    line: int = 0
    col: int = 0

    def __str__(self):
        return f"{self.line}:{self.col}: {self.code}: {self.message}"


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True, order=True)
class GroundAtom:
    predicate: str
    args: tuple[str, ...] = ()

    def __str__(self):
        return f"{self.predicate}({', '.join(self.args)})" if self.args else self.predicate


@dataclass(frozen=True)
class AtomTemplate:
    predicate: str
    args: tuple  # str constants and Var instances
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    @property
    def variables(self) -> list[str]:
        return [a.name for a in self.args if isinstance(a, Var)]

    def substitute(self, binding: dict[str, str]) -> GroundAtom:
        return GroundAtom(self.predicate, tuple(binding[a.name] if isinstance(a, Var) else a for a in self.args))

    def __str__(self):
        if not self.args:
            return self.predicate
        return f"{self.predicate}({', '.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class Rule:
    weight: float
    body: tuple[AtomTemplate, ...]
    head: AtomTemplate
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    def variables(self) -> list[str]:
        """Distinct variables in order of first appearance (body first)."""
        seen: dict[str, None] = {}
        for atom in (*self.body, self.head):
            for v in atom.variables:
                seen.setdefault(v)
        return list(seen)

    def __str__(self):
        return f"rule {self.weight!r} : {' & '.join(map(str, self.body))} -> {self.head}"


@dataclass
class Program:
    domains: dict[str, tuple[str, ...]] = field(default_factory=dict)
    predicates: dict[str, tuple[str, ...]] = field(default_factory=dict)
    evidence: dict[GroundAtom, float] = field(default_factory=dict)
    rules: list[Rule] = field(default_factory=list)
    # source positions, excluded from equality
    positions: dict = field(default_factory=dict, compare=False, repr=False)

    def constants(self) -> set[str]:
        return {c for cs in self.domains.values() for c in cs}


# --- lexing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<number>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<arrow>->)
  | (?P<sym>[{}(),=:&])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    col: int


def _lex(line: str, lineno: int) -> list[_Tok]:
    line = line.split("#", 1)[0]
    toks, pos = [], 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if m is None:
            raise ProgramError([Diagnostic("syntax", f"unexpected character {line[pos]!r}", lineno, pos + 1)])
        if m.lastgroup != "ws":
            kind = m.lastgroup if m.lastgroup != "sym" else m.group()
            toks.append(_Tok(kind, m.group(), pos + 1))
        pos = m.end()
    return toks


class _Line:
    """Cursor over the tokens of one statement."""

    def __init__(self, toks, lineno, width):
        self.toks = toks
        self.i = 0
        self.lineno = lineno
        self.width = width

    def _err(self, msg, tok=None):
        col = tok.col if tok is not None else self.width + 1
        return ProgramError([Diagnostic("syntax", msg, self.lineno, col)])

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, kind, what=None):
        tok = self.peek()
        if tok is None or tok.kind != kind:
            found = "end of line" if tok is None else repr(tok.text)
            raise self._err(f"expected {what or kind}, found {found}", tok)
        self.i += 1
        return tok

    def accept(self, kind):
        tok = self.peek()
        if tok is not None and tok.kind == kind:
            self.i += 1
            return tok
        return None

    def end(self):
        tok = self.peek()
        if tok is not None:
            raise self._err(f"unexpected {tok.text!r}", tok)

    def ident_list(self, close):
        items = []
        if self.accept(close):
            return items
        while True:
            items.append(self.take("ident", "identifier"))
            if self.accept(close):
                return items
            self.take(",", f"',' or '{close}'")


def _is_variable_name(name: str) -> bool:
    return name[0].isupper()


def parse_program(text: str, check: bool = True) -> Program:
    """Parse a model file.

    Syntax errors raise :class:`ProgramError` immediately.  With ``check``
    (the default) the result is also run through :func:`validate` and any
    diagnostics are raised together.
    """
    prog = Program()
    diags: list[Diagnostic] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _lex(raw, lineno)
        if not toks:
            continue
        cur = _Line(toks, lineno, len(raw.split("#", 1)[0].rstrip()))
        kw = cur.take("ident", "statement keyword")
        if kw.text == "domain":
            name = cur.take("ident", "domain name")
            cur.take("=", "'='")
            cur.take("{", "'{'")
            consts = cur.ident_list("}")
            cur.end()
            if name.text in prog.domains:
                diags.append(Diagnostic("duplicate-domain", f"domain {name.text} declared twice", lineno, name.col))
                continue
            prog.domains[name.text] = tuple(c.text for c in consts)
            prog.positions[("domain", name.text)] = (lineno, name.col)
        elif kw.text == "predicate":
            name = cur.take("ident", "predicate name")
            sig = cur.ident_list(")") if cur.accept("(") else []
            cur.end()
            if name.text in prog.predicates:
                diags.append(Diagnostic("duplicate-predicate", f"predicate {name.text} declared twice", lineno, name.col))
                continue
            prog.predicates[name.text] = tuple(s.text for s in sig)
            prog.positions[("predicate", name.text)] = (lineno, name.col)
        elif kw.text == "evidence":
            atom = _atom(cur, prog, ground=True)
            cur.take("=", "'='")
            value = cur.take("number", "probability")
            cur.end()
            ga = GroundAtom(atom.predicate, atom.args)
            if ga in prog.evidence:
                diags.append(Diagnostic("duplicate-evidence", f"evidence for {ga} given twice", lineno, atom.col))
                continue
            prog.evidence[ga] = float(value.text)
            prog.positions[("evidence", ga)] = (lineno, atom.col)
        elif kw.text == "rule":
            weight = cur.take("number", "rule weight")
            cur.take(":", "':'")
            body = [_atom(cur, prog)]
            while cur.accept("&"):
                body.append(_atom(cur, prog))
            cur.take("arrow", "'->'")
            head = _atom(cur, prog)
            cur.end()
            prog.rules.append(Rule(float(weight.text), tuple(body), head, lineno, weight.col))
        else:
            raise ProgramError([Diagnostic("syntax", f"unknown statement {kw.text!r}", lineno, kw.col)])
    if check:
        diags += validate(prog)
    if diags:
        raise ProgramError(sorted(diags, key=lambda d: (d.line, d.col)))
    return prog


def _atom(cur: _Line, prog: Program, ground: bool = False) -> AtomTemplate:
    pred = cur.take("ident", "predicate name")
    args = []
    if cur.accept("("):
        for tok in cur.ident_list(")"):
            if ground or tok.text in prog.constants() or not _is_variable_name(tok.text):
                args.append(tok.text)
            else:
                args.append(Var(tok.text))
    return AtomTemplate(pred.text, tuple(args), cur.lineno, pred.col)


def validate(prog: Program) -> list[Diagnostic]:
    """Check a program against its declarations; an empty list means valid."""
    diags: list[Diagnostic] = []
    constants = prog.constants()

    for name, sig in prog.predicates.items():
        line, col = prog.positions.get(("predicate", name), (0, 0))
        for dom in sig:
            if dom not in prog.domains:
                diags.append(Diagnostic("unknown-domain", f"predicate {name} uses undeclared domain {dom}", line, col))

    def check_atom(atom, line, col):
        sig = prog.predicates.get(atom.predicate)
        if sig is None:
            diags.append(Diagnostic("unknown-predicate", f"undeclared predicate {atom.predicate}", line, col))
            return
        if len(sig) != len(atom.args):
            diags.append(
                Diagnostic(
                    "signature",
                    f"{atom.predicate} takes {len(sig)} argument(s), got {len(atom.args)}",
                    line,
                    col,
                )
            )
            return
        for arg, dom in zip(atom.args, sig):
            if isinstance(arg, Var):
                continue
            if arg not in constants:
                diags.append(Diagnostic("unknown-constant", f"undeclared constant {arg}", line, col))
            elif dom in prog.domains and arg not in prog.domains[dom]:
                diags.append(Diagnostic("domain-mismatch", f"constant {arg} is not in domain {dom}", line, col))

    for ga, value in prog.evidence.items():
        line, col = prog.positions.get(("evidence", ga), (0, 0))
        check_atom(AtomTemplate(ga.predicate, ga.args), line, col)
        if not 0.0 <= value <= 1.0:
            diags.append(Diagnostic("range", f"evidence value {value!r} for {ga} outside [0, 1]", line, col))

    for rule in prog.rules:
        if not rule.weight > 0.0 or not math.isfinite(rule.weight):
            diags.append(Diagnostic("weight", f"rule weight must be positive, got {rule.weight!r}", rule.line, rule.col))
        if not rule.body:
            diags.append(Diagnostic("empty-body", "rule body is empty", rule.line, rule.col))
        for atom in (*rule.body, rule.head):
            check_atom(atom, atom.line or rule.line, atom.col or rule.col)
        body_vars = {v for atom in rule.body for v in atom.variables}
        for v in rule.head.variables:
            if v not in body_vars:
                diags.append(
                    Diagnostic("head-variable", f"head variable {v} does not occur in the body", rule.head.line, rule.head.col)
                )
        # a variable must sit in positions of a single domain
        var_domains: dict[str, str] = {}
        for atom in (*rule.body, rule.head):
            sig = prog.predicates.get(atom.predicate)
            if sig is None or len(sig) != len(atom.args):
                continue
            for arg, dom in zip(atom.args, sig):
                if isinstance(arg, Var):
                    prev = var_domains.setdefault(arg.name, dom)
                    if prev != dom:
                        diags.append(
                            Diagnostic(
                                "domain-mismatch",
                                f"variable {arg.name} used in domains {prev} and {dom}",
                                atom.line or rule.line,
                                atom.col or rule.col,
                            )
                        )
    return diags


def format_program(prog: Program) -> str:
    """Canonical text for ``prog``; parsing it again gives an equal program."""
    out = []
    for name, consts in prog.domains.items():
        out.append(f"domain {name} = {{ {', '.join(consts)} }}")
    for name, sig in prog.predicates.items():
        out.append(f"predicate {name}({', '.join(sig)})" if sig else f"predicate {name}")
    for ga, value in prog.evidence.items():
        out.append(f"evidence {ga} = {value!r}")
    for rule in prog.rules:
        out.append(str(rule))
    return "\n".join(out) + ("\n" if out else "")


# --- grounding --------------------------------------------------------------


@dataclass(frozen=True)
class GroundRule:
    weight: float
    body: tuple[int, ...]
    head: int
    source: int = 0  # index of the rule template in Program.rules


@dataclass
class GroundModel:
    """Ground atoms (sorted), evidence, and weighted ground rules over atom indices."""

    atoms: list[GroundAtom]
    evidence_mask: np.ndarray
    evidence_values: np.ndarray
    ground_rules: list[GroundRule]

    def __post_init__(self):
        self.index = {a: i for i, a in enumerate(self.atoms)}
        n = len(self.atoms)
        for gr in self.ground_rules:
            if not gr.body:
                raise GroundingError("ground rule with empty body")
            if not all(0 <= i < n for i in (*gr.body, gr.head)):
                raise GroundingError(f"ground rule {gr} references an unknown atom")

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @property
    def free_indices(self) -> np.ndarray:
        return np.flatnonzero(~self.evidence_mask)

    def atom_names(self) -> list[str]:
        return [str(a) for a in self.atoms]


def _variable_domains(prog: Program, rule: Rule) -> dict[str, str]:
    doms: dict[str, str] = {}
    for atom in (*rule.body, rule.head):
        sig = prog.predicates.get(atom.predicate, ())
        for k, arg in enumerate(atom.args):
            if isinstance(arg, Var) and k < len(sig):
                doms.setdefault(arg.name, sig[k])
    return doms


def ground(prog: Program) -> GroundModel:
    """Instantiate every rule over all assignments of its variables.

    A rule with variables V_1..V_k yields ``prod |domain(V_i)|`` ground
    rules; duplicates are kept.  Atoms are the evidence atoms plus every
    atom touched by a ground rule, in lexicographic order.  Non-evidence
    atoms are free.
    """
    instantiated = []
    for r, rule in enumerate(prog.rules):
        doms = _variable_domains(prog, rule)
        names = rule.variables()
        for v in names:
            if v not in doms or doms[v] not in prog.domains:
                raise GroundingError(f"cannot infer a domain for variable {v} in rule at line {rule.line}")
        choices = [sorted(prog.domains[doms[v]]) for v in names]
        for combo in itertools.product(*choices):
            binding = dict(zip(names, combo))
            body = tuple(a.substitute(binding) for a in rule.body)
            instantiated.append((rule.weight, body, rule.head.substitute(binding), r))

    atom_set = set(prog.evidence)
    for _, body, head, _ in instantiated:
        atom_set.update(body)
        atom_set.add(head)
    atoms = sorted(atom_set)
    index = {a: i for i, a in enumerate(atoms)}

    mask = np.zeros(len(atoms), dtype=bool)
    values = np.zeros(len(atoms))
    for ga, v in prog.evidence.items():
        mask[index[ga]] = True
        values[index[ga]] = v

    rules = [GroundRule(w, tuple(index[a] for a in body), index[head], r) for w, body, head, r in instantiated]
    return GroundModel(atoms, mask, values, rules)


def load_model(path) -> GroundModel:
    with open(path, encoding="utf-8") as fh:
        return ground(parse_program(fh.read()))
