import pytest
from conftest import BENCH, FIXTURES, TYPED_BLOCKS, TWO_BLOCKS

from planbench.pddl import (
    And,
    ArityMismatch,
    Atom,
    DomainMismatch,
    DuplicateName,
    IllegalCharacter,
    NotEq,
    PddlSyntaxError,
    TokenKind,
    UndeclaredVariable,
    UnknownObject,
    UnknownPredicate,
    UnknownType,
    UnsupportedConstruct,
    load_domain,
    load_problem,
    parse_domain_text,
    parse_problem_text,
    pretty_print,
    tokenize,
)

DOMAINS = ["barman", "blocks", "elevator", "satellite", "tidybot"]


def kinds(text):
    return [(t.kind, t.text) for t in tokenize(text)]


def test_tokenize_define():
    assert kinds("(define (domain blocks))") == [
        (TokenKind.LPAREN, "("),
        (TokenKind.SYMBOL, "define"),
        (TokenKind.LPAREN, "("),
        (TokenKind.SYMBOL, "domain"),
        (TokenKind.SYMBOL, "blocks"),
        (TokenKind.RPAREN, ")"),
        (TokenKind.RPAREN, ")"),
    ]


def test_tokenize_comment_and_case():
    assert kinds("; comment\n(:action Pick-Up)") == [
        (TokenKind.LPAREN, "("),
        (TokenKind.KEYWORD, ":action"),
        (TokenKind.SYMBOL, "pick-up"),
        (TokenKind.RPAREN, ")"),
    ]
    toks = tokenize("; comment\n(:action Pick-Up)")
    assert (toks[0].line, toks[0].col) == (2, 1)
    assert (toks[2].line, toks[2].col) == (2, 10)


def test_tokenize_variables():
    assert kinds("(on ?x ?y)") == [
        (TokenKind.LPAREN, "("),
        (TokenKind.SYMBOL, "on"),
        (TokenKind.VARIABLE, "?x"),
        (TokenKind.VARIABLE, "?y"),
        (TokenKind.RPAREN, ")"),
    ]


def test_illegal_character_position():
    with pytest.raises(IllegalCharacter) as err:
        tokenize("(on a\n  b #)")
    assert (err.value.line, err.value.col) == (2, 5)


def test_blocks_domain_declarations():
    d = load_domain(BENCH / "blocks" / "domain.pddl")
    assert [p.name for p in d.predicates] == ["on", "ontable", "clear", "handempty", "holding"]
    assert [a.name for a in d.actions] == ["pick-up", "put-down", "stack", "unstack"]


def test_two_block_problem():
    d = parse_domain_text(TYPED_BLOCKS)
    p = parse_problem_text(TWO_BLOCKS, d)
    assert len(p.init) == 5
    assert p.goal == And((Atom("on", ("a", "b")),))
    assert dict(p.objects) == {"a": "block", "b": "block"}


def test_untyped_objects_default_to_object():
    d = load_domain(BENCH / "blocks" / "domain.pddl")
    p = load_problem(BENCH / "blocks" / "p01.pddl", d)
    assert {t for _, t in p.objects} == {"object"}
    assert {o for o, _ in p.objects} == {"a", "b", "c", "d"}


def test_miconic_objects_partition():
    d = load_domain(BENCH / "elevator" / "domain.pddl")
    for f in sorted((BENCH / "elevator").glob("p*.pddl")):
        p = load_problem(f, d)
        types = {t for _, t in p.objects}
        assert types == {"passenger", "floor"}


def _domain_with(body, reqs=":strips :typing"):
    return f"(define (domain t) (:requirements {reqs}) (:predicates (p ?x) (q ?x)) {body})"


@pytest.mark.parametrize(
    "construct,body",
    [
        ("forall", "(:action a :parameters (?x) :effect (forall (?y) (p ?y)))"),
        ("exists", "(:action a :parameters (?x) :precondition (exists (?y) (p ?y)) :effect (q ?x))"),
        ("when", "(:action a :parameters (?x) :effect (when (p ?x) (q ?x)))"),
        ("or", "(:action a :parameters (?x) :precondition (or (p ?x) (q ?x)) :effect (q ?x))"),
        ("imply", "(:action a :parameters (?x) :precondition (imply (p ?x) (q ?x)) :effect (q ?x))"),
    ],
)
def test_unsupported_constructs(construct, body):
    with pytest.raises(UnsupportedConstruct) as err:
        parse_domain_text(_domain_with(body))
    assert construct in str(err.value)


def test_unsupported_requirement_and_either():
    with pytest.raises(UnsupportedConstruct, match="adl"):
        parse_domain_text("(define (domain t) (:requirements :adl))")
    with pytest.raises(UnsupportedConstruct, match="either"):
        parse_domain_text("(define (domain t) (:requirements :typing) (:types a b) (:predicates (p ?x - (either a b))))")
    with pytest.raises(UnsupportedConstruct, match="durative"):
        parse_domain_text(_domain_with("(:durative-action a :parameters (?x) :duration (= ?duration 1))"))


def test_unsupported_fluent():
    with pytest.raises(UnsupportedConstruct):
        parse_domain_text(_domain_with("(:functions (fuel ?x))", reqs=":strips :action-costs"))


def test_adl_miconic_rejected():
    with pytest.raises(UnsupportedConstruct):
        load_domain(FIXTURES / "unsupported" / "miconic-adl-domain.pddl")


def test_duplicate_action():
    body = "(:action move :parameters (?x) :effect (p ?x)) (:action move :parameters (?x) :effect (q ?x))"
    with pytest.raises(DuplicateName):
        parse_domain_text(_domain_with(body))


def test_domain_errors():
    with pytest.raises(UndeclaredVariable):
        parse_domain_text(_domain_with("(:action a :parameters (?x) :effect (p ?y))"))
    with pytest.raises(ArityMismatch):
        parse_domain_text(_domain_with("(:action a :parameters (?x) :effect (p ?x ?x))"))
    with pytest.raises(UnknownPredicate):
        parse_domain_text(_domain_with("(:action a :parameters (?x) :effect (r ?x))"))
    with pytest.raises(UnknownType):
        parse_domain_text("(define (domain t) (:requirements :typing) (:predicates (p ?x - thing)))")
    with pytest.raises(PddlSyntaxError) as err:
        parse_domain_text("(define (domain t)\n (:predicates (p ?x))")
    assert err.value.line is not None


def test_type_cycle_rejected():
    with pytest.raises(Exception) as err:
        parse_domain_text("(define (domain t) (:requirements :typing) (:types a - b b - a))")
    assert "cycle" in str(err.value).lower()


def test_problem_errors(blocks_domain):
    with pytest.raises(UnknownObject):
        parse_problem_text(TWO_BLOCKS.replace("(on a b)", "(on a z)"), blocks_domain)
    with pytest.raises(UnknownPredicate):
        parse_problem_text(TWO_BLOCKS.replace("(handempty)", "(handfull)"), blocks_domain)
    with pytest.raises(ArityMismatch):
        parse_problem_text(TWO_BLOCKS.replace("(clear a)", "(clear a b)"), blocks_domain)
    with pytest.raises(DomainMismatch):
        parse_problem_text(TWO_BLOCKS.replace("(:domain blocks)", "(:domain other)"), blocks_domain)
    with pytest.raises(DuplicateName):
        parse_problem_text(TWO_BLOCKS.replace("(:objects a b - block)", "(:objects a a - block)"), blocks_domain)


def test_not_equal_and_negation():
    d = parse_domain_text(
        _domain_with(
            "(:action a :parameters (?x ?y) :precondition (and (not (= ?x ?y)) (not (p ?x))) :effect (q ?x))",
            reqs=":strips :equality :negative-preconditions",
        )
    )
    pre = d.action("a").precondition.parts
    assert pre[0] == NotEq("?x", "?y")


def test_barman_costs_and_metric():
    d = load_domain(BENCH / "barman" / "domain.pddl")
    assert ":action-costs" in d.requirements
    assert all(a.effect.cost_increase >= 1 for a in d.actions)
    p = load_problem(BENCH / "barman" / "p01.pddl", d)
    assert p.metric is True


@pytest.mark.parametrize("name", DOMAINS)
def test_corpus_round_trip(name):
    d = load_domain(BENCH / name / "domain.pddl")
    assert parse_domain_text(pretty_print(d)) == d
    problems = sorted((BENCH / name).glob("p*.pddl"))
    assert len(problems) >= 3
    for f in problems:
        p = load_problem(f, d)
        assert parse_problem_text(pretty_print(p), d) == p


def test_empty_and_rejected():
    with pytest.raises(ValueError):
        And(())
