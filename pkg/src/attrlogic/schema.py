"""Attribute schema, rule types, and the textual rule DSL.

The DSL is line-oriented; ``#`` starts a comment. Statements:

    attributes <name>(, <name>)*
    group <Name> { <name>(, <name>)* } [exclusive] [exhaustive]
    mutex <name>(, <name>)+
    implies <literal>(& <literal>)* -> <literal>(& <literal>)*

where a literal is ``name`` (positive) or ``!name`` (negative). Rules keep
their declaration order; a rule's ordinal (its index in that order) is the
stable identifier used in consistency verdicts and reports.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import (
    DuplicateGroupError,
    EmptyExhaustiveGroupError,
    RuleSyntaxError,
    UnknownAttributeError,
    UnknownPresetError,
)

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class AttributeSchema:
    """Ordered attribute vocabulary; index i is the column of attribute i everywhere."""

    names: tuple[str, ...]

    def __post_init__(self):
        seen = set()
        for name in self.names:
            if not _NAME_RE.fullmatch(name):
                raise ValueError(f"invalid attribute name {name!r}")
            if name in seen:
                raise ValueError(f"duplicate attribute name {name!r}")
            seen.add(name)
        object.__setattr__(self, "names", tuple(self.names))

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownAttributeError(name) from None


@dataclass(frozen=True)
class Literal:
    """An attribute index with a required polarity (True = positive)."""

    attr: int
    positive: bool


@dataclass(frozen=True)
class Group:
    """Named attribute group; exclusive = at most one positive, exhaustive = at least one."""

    name: str
    members: tuple[int, ...]
    exclusive: bool = False
    exhaustive: bool = False


@dataclass(frozen=True)
class Mutex:
    """At most one positive among members."""

    members: tuple[int, ...]


@dataclass(frozen=True)
class Implication:
    """If every antecedent literal holds, every consequent literal must hold."""

    antecedent: tuple[Literal, ...]
    consequent: tuple[Literal, ...]


Rule = Group | Mutex | Implication


@dataclass(frozen=True)
class RuleSet:
    """A schema plus rules in declaration order.

    ``rules[i]`` has ordinal i; ordinals are the rule identifiers reported by
    the consistency checker.
    """

    schema: AttributeSchema
    rules: tuple[Rule, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        m = len(self.schema)
        names = set()
        for rule in self.rules:
            if isinstance(rule, Group):
                if rule.name in names:
                    raise DuplicateGroupError(rule.name)
                names.add(rule.name)
                if not rule.members and rule.exhaustive:
                    raise EmptyExhaustiveGroupError(rule.name)
                idxs = rule.members
            elif isinstance(rule, Mutex):
                if len(rule.members) < 2:
                    raise ValueError("mutex needs at least two members")
                idxs = rule.members
            else:
                if not rule.antecedent or not rule.consequent:
                    raise ValueError("implication needs a non-empty antecedent and consequent")
                idxs = tuple(l.attr for l in rule.antecedent + rule.consequent)
            for i in idxs:
                if not 0 <= i < m:
                    raise UnknownAttributeError(f"#{i}")

    @property
    def groups(self) -> tuple[Group, ...]:
        return tuple(r for r in self.rules if isinstance(r, Group))

    @property
    def mutexes(self) -> tuple[Mutex, ...]:
        return tuple(r for r in self.rules if isinstance(r, Mutex))

    @property
    def implications(self) -> tuple[Implication, ...]:
        return tuple(r for r in self.rules if isinstance(r, Implication))

    def describe(self, ordinal: int) -> str:
        """Human-readable rendering of the rule with the given ordinal."""
        return _render_rule(self.rules[ordinal], self.schema)


@dataclass(frozen=True)
class ConditionPair:
    """One strong relationship split into trigger attributes (g1) and target attributes (g2).

    For a mutex-derived pair the trigger is "any g1 attribute positive" and the
    violating value of every g2 attribute is positive. For an implication-derived
    pair the trigger is the antecedent and ``g2_consistent[j]`` is the value the
    consequent requires of ``g2[j]`` (the violating value is its negation).
    """

    kind: str  # "mutex" | "implication"
    g1: tuple[int, ...]
    g2: tuple[int, ...]
    g1_required: tuple[bool, ...]
    g2_consistent: tuple[bool, ...]
    rule_ordinal: int


@dataclass(frozen=True)
class ConditionGroups:
    pairs: tuple[ConditionPair, ...] = ()

    def __len__(self) -> int:
        return len(self.pairs)


def derive_condition_groups(rules: RuleSet) -> ConditionGroups:
    """One pair per mutex ({first member} vs rest) and per implication
    ({antecedent attrs} vs {consequent attrs}), in rule declaration order."""
    pairs = []
    for ordinal, rule in enumerate(rules.rules):
        if isinstance(rule, Mutex):
            pairs.append(
                ConditionPair(
                    kind="mutex",
                    g1=(rule.members[0],),
                    g2=tuple(rule.members[1:]),
                    g1_required=(True,),
                    g2_consistent=tuple(False for _ in rule.members[1:]),
                    rule_ordinal=ordinal,
                )
            )
        elif isinstance(rule, Implication):
            pairs.append(
                ConditionPair(
                    kind="implication",
                    g1=tuple(l.attr for l in rule.antecedent),
                    g2=tuple(l.attr for l in rule.consequent),
                    g1_required=tuple(l.positive for l in rule.antecedent),
                    g2_consistent=tuple(l.positive for l in rule.consequent),
                    rule_ordinal=ordinal,
                )
            )
    return ConditionGroups(pairs=tuple(pairs))


# ---------------------------------------------------------------------------
# Parsing


@dataclass
class _Cursor:
    text: str
    line_no: int
    pos: int = 0

    def error(self, message: str) -> RuleSyntaxError:
        return RuleSyntaxError(self.line_no, self.pos + 1, message)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def take(self, token: str) -> bool:
        self.skip_ws()
        if self.text.startswith(token, self.pos):
            self.pos += len(token)
            return True
        return False

    def take_word(self, word: str) -> bool:
        """Match a keyword only at a word boundary."""
        self.skip_ws()
        end = self.pos + len(word)
        if self.text.startswith(word, self.pos) and (
            end >= len(self.text) or not (self.text[end].isalnum() or self.text[end] == "_")
        ):
            self.pos = end
            return True
        return False

    def expect(self, token: str):
        if not self.take(token):
            raise self.error(f"expected {token!r}")

    def name(self) -> str:
        self.skip_ws()
        m = _NAME_RE.match(self.text, self.pos)
        if not m:
            raise self.error("expected attribute name")
        self.pos = m.end()
        return m.group()

    def name_list(self, sep: str = ",") -> list[str]:
        names = [self.name()]
        while self.take(sep):
            names.append(self.name())
        return names


def _strip_comment(line: str) -> str:
    idx = line.find("#")
    return line if idx < 0 else line[:idx]


def parse_rules(text: str, schema: AttributeSchema | None = None) -> RuleSet:
    """Parse rule source into a validated RuleSet.

    When ``schema`` is None the vocabulary comes from ``attributes`` lines,
    which must precede the rules that use them. When a schema is supplied and
    the source also declares attributes, the two must match exactly.
    """
    declared: list[str] = []
    known = list(schema.names) if schema is not None else []
    rules: list[Rule] = []
    group_names: set[str] = set()

    def resolve(name: str, line_no: int) -> int:
        try:
            return known.index(name)
        except ValueError:
            raise UnknownAttributeError(name, line=line_no) from None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).rstrip()
        cur = _Cursor(line, line_no)
        if cur.at_end():
            continue
        if cur.take_word("attributes"):
            names = cur.name_list()
            if not cur.at_end():
                raise cur.error("trailing input after attribute list")
            if rules:
                raise cur.error("attributes must be declared before rules")
            declared.extend(names)
            if schema is None:
                for n in names:
                    if n in known:
                        raise cur.error(f"duplicate attribute {n!r}")
                known.extend(names)
        elif cur.take_word("group"):
            gname = cur.name()
            if gname in group_names:
                raise DuplicateGroupError(gname)
            group_names.add(gname)
            cur.expect("{")
            members = tuple(resolve(n, line_no) for n in cur.name_list())
            if len(set(members)) != len(members):
                raise cur.error("duplicate member in group")
            cur.expect("}")
            exclusive = cur.take_word("exclusive")
            exhaustive = cur.take_word("exhaustive")
            if not cur.at_end():
                raise cur.error("trailing input after group")
            rules.append(Group(gname, members, exclusive=exclusive, exhaustive=exhaustive))
        elif cur.take_word("mutex"):
            members = tuple(resolve(n, line_no) for n in cur.name_list())
            if len(members) < 2:
                raise cur.error("mutex needs at least two members")
            if len(set(members)) != len(members):
                raise cur.error("duplicate member in mutex")
            if not cur.at_end():
                raise cur.error("trailing input after mutex")
            rules.append(Mutex(members))
        elif cur.take_word("implies"):

            def literals() -> tuple[Literal, ...]:
                out = [_literal(cur, resolve, line_no)]
                while cur.take("&"):
                    out.append(_literal(cur, resolve, line_no))
                return tuple(out)

            antecedent = literals()
            cur.expect("->")
            consequent = literals()
            if not cur.at_end():
                raise cur.error("trailing input after implication")
            rules.append(Implication(antecedent, consequent))
        else:
            raise cur.error("expected one of: attributes, group, mutex, implies")

    if schema is not None and declared and list(schema.names) != declared:
        raise RuleSyntaxError(1, 1, "inline attribute declaration conflicts with the given schema")
    out_schema = schema if schema is not None else AttributeSchema(tuple(known))
    return RuleSet(schema=out_schema, rules=tuple(rules))


def _literal(cur: _Cursor, resolve, line_no: int) -> Literal:
    negated = cur.take("!")
    return Literal(attr=resolve(cur.name(), line_no), positive=not negated)


# ---------------------------------------------------------------------------
# Serialization


def _render_rule(rule: Rule, schema: AttributeSchema) -> str:
    n = schema.names
    if isinstance(rule, Group):
        flags = (" exclusive" if rule.exclusive else "") + (" exhaustive" if rule.exhaustive else "")
        return f"group {rule.name} {{ {', '.join(n[i] for i in rule.members)} }}{flags}"
    if isinstance(rule, Mutex):
        return f"mutex {', '.join(n[i] for i in rule.members)}"
    ant = " & ".join(("" if l.positive else "!") + n[l.attr] for l in rule.antecedent)
    con = " & ".join(("" if l.positive else "!") + n[l.attr] for l in rule.consequent)
    return f"implies {ant} -> {con}"


def serialize_rules(rules: RuleSet) -> str:
    """Canonical rule source; ``parse_rules(serialize_rules(r))`` equals r."""
    lines = [f"attributes {', '.join(rules.schema.names)}"]
    lines.extend(_render_rule(rule, rules.schema) for rule in rules.rules)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Built-in presets

_FH_MINI = """\
attributes clean_shaven, chin_area, side_to_side, ba_invisible, len_short, len_medium, len_long, bl_invisible
group BeardArea { clean_shaven, chin_area, side_to_side, ba_invisible } exclusive exhaustive
group BeardLength { len_short, len_medium, len_long, bl_invisible } exclusive exhaustive
implies clean_shaven -> !len_short & !len_medium & !len_long
"""

_CELEBA_STRONG_MINI = """\
attributes Bald, Receding_Hairline, Mustache, No_Beard, Male
mutex Bald, Receding_Hairline
implies Mustache -> !No_Beard
implies !Male -> No_Beard
"""

_PRESETS = {"fh-mini": _FH_MINI, "celeba-strong-mini": _CELEBA_STRONG_MINI}


def builtin_rules(name: str) -> tuple[AttributeSchema, RuleSet]:
    """Return a built-in (schema, rules) preset: "fh-mini" or "celeba-strong-mini"."""
    try:
        text = _PRESETS[name]
    except KeyError:
        raise UnknownPresetError(name) from None
    rules = parse_rules(text)
    return rules.schema, rules


def preset_names() -> tuple[str, ...]:
    return tuple(_PRESETS)
