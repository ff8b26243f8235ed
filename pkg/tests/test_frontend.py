"""Frontend contract: parse outcomes, diagnostics, token classification."""

from collections import Counter

from liveref.frontend import bag_of, classify_tokens, parse_source
from liveref.lexer import tokenize


def test_minimal_class():
    unit, diags = parse_source("class A { void m() { int x = 1; } }", "A.java")
    assert unit.parse_ok and not diags.errors
    assert len(unit.classes) == 1
    cls = unit.classes[0]
    assert cls.name == "A"
    assert [m.name for m in cls.methods] == ["m"]
    from liveref.model import statement_count

    assert statement_count(cls.methods[0]) == 1


def test_fowler_fixture_shape(customer_text):
    unit, diags = parse_source(customer_text, "Customer.java")
    assert unit.parse_ok, diags.errors
    assert [c.name for c in unit.classes] == ["Customer"]
    statement = next(m for m in unit.classes[0].methods if m.name == "statement")
    kinds = [n.kind for n in statement.body.walk()]
    loops = [n for n in statement.body.walk() if n.kind == "loop"]
    assert loops and loops[0].loop_kind == "while"
    # the while loop contains the switch
    inner = [n.kind for n in loops[0].walk()]
    assert "switch" in inner
    assert "case" in inner


def test_malformed_input_flags_errors():
    unit, diags = parse_source("class A { void m( }", "A.java")
    assert not unit.parse_ok
    assert diags.errors
    assert diags.errors[0][0] == 1  # line of the first error


def test_parse_error_iff_not_ok():
    ok_unit, ok_diags = parse_source("class A { }", "A.java")
    assert ok_unit.parse_ok and ok_diags.errors == []
    bad_unit, bad_diags = parse_source("class A { void m( }", "A.java")
    assert (not bad_unit.parse_ok) and bad_diags.errors != []


def test_empty_file_parses():
    unit, diags = parse_source("", "empty.java")
    assert unit.parse_ok
    assert unit.classes == []


def classify_text(src: str) -> tuple[Counter, Counter]:
    bag = bag_of(tokenize(src))
    return bag.operators, bag.operands


def test_classification_assignment_example():
    ops, opnds = classify_text("a = b + c;")
    assert ops == Counter({"=": 1, "+": 1, ";": 1})
    assert opnds == Counter({"a": 1, "b": 1, "c": 1})


def test_classification_return_example():
    ops, opnds = classify_text("return;")
    assert ops == Counter({"return": 1, ";": 1})
    assert opnds == Counter()


def test_classification_empty_block():
    ops, opnds = classify_text("{}")
    assert ops == Counter() and opnds == Counter()


def test_classification_parens_once_per_pair():
    ops, _ = classify_text("f((a + b) * c);")
    assert ops["()"] == 2
    assert ")" not in ops and "(" not in ops


def test_classification_comments_ignored():
    ops1, opnds1 = classify_text("a = 1; // note\n/* more */")
    ops2, opnds2 = classify_text("a = 1;")
    assert ops1 == ops2 and opnds1 == opnds2


def test_classification_deterministic(customer_text):
    unit, _ = parse_source(customer_text, "Customer.java")
    m = unit.classes[0].methods[-1]
    b1 = classify_tokens(m)
    b2 = classify_tokens(m)
    assert b1.operators == b2.operators and b1.operands == b2.operands


def test_parent_bag_is_disjoint_union_of_own_plus_children(customer_text):
    unit, _ = parse_source(customer_text, "Customer.java")
    for cls in unit.classes:
        for m in cls.methods:
            for node in m.body.walk():
                agg = classify_tokens(node)
                expect_ops = Counter(node.tokens.operators)
                expect_opnds = Counter(node.tokens.operands)
                for child in node.children:
                    cb = classify_tokens(child)
                    expect_ops += cb.operators
                    expect_opnds += cb.operands
                assert agg.operators == expect_ops
                assert agg.operands == expect_opnds


def test_method_params_and_modifiers(customer_text):
    unit, _ = parse_source(customer_text, "Customer.java")
    cls = unit.classes[0]
    add = next(m for m in cls.methods if m.name == "addRental")
    assert add.params == [("arg", "Rental")]
    assert "public" in add.modifiers
    assert add.return_type == "void"


def test_constructor_modeled_with_class_name():
    unit, _ = parse_source("class A { A(int x) { this.x = x; } int x; }", "A.java")
    cls = unit.classes[0]
    assert [m.name for m in cls.methods] == ["A"]
    assert cls.fields == ["x"]


def test_throws_clause_captured():
    unit, _ = parse_source(
        "class A { void m() throws java.io.IOException, RuntimeException { int x = 1; } }",
        "A.java",
    )
    m = unit.classes[0].methods[0]
    assert m.throws is not None and m.throws.startswith("throws")
    assert "IOException" in m.throws


def test_nested_class_is_opaque():
    src = "class A { class Inner { void hidden() { int q = 1; } } void m() { int x = 1; } }"
    unit, diags = parse_source(src, "A.java")
    assert unit.parse_ok, diags.errors
    assert [c.name for c in unit.classes] == ["A"]
    assert [m.name for m in unit.classes[0].methods] == ["m"]


def test_lambda_is_opaque_statement():
    src = "class A { void m(java.util.List<String> xs) { xs.forEach(s -> { use(s); }); int x = 1; } }"
    unit, diags = parse_source(src, "A.java")
    assert unit.parse_ok, diags.errors
    body = unit.classes[0].methods[0].body
    assert [c.kind for c in body.children] == ["expr", "local-decl"]


def test_var_shadowing_tracked_separately():
    src = """
class A {
    int rentals;
    void m() {
        int rentals = 1;
        use(rentals);
    }
}
"""
    unit, _ = parse_source(src, "A.java")
    m = unit.classes[0].methods[0]
    # the local shadows the field: the use resolves to the local
    assert m.accessed_fields == set()
    local_ids = [d for d in m.decls if d.startswith("local:")]
    assert len(local_ids) == 1
    assert m.reads[local_ids[0]]
