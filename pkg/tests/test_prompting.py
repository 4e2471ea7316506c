from __future__ import annotations

import pytest
from conftest import SHOP_SKETCH
from hypothesis import given, settings
from hypothesis import strategies as st

from repofill.backend import GenerationResponse, MockBackend, prompt_hash
from repofill.evaluation.mining import problem_for
from repofill.index import get_frontend
from repofill.prompting import PromptConfig, complete, render_prompt
from repofill.rendering import (
    DEFAULT_MARKER,
    ContextBudgetError,
    Snippet,
    comment_block,
    declaration_text,
    load_template,
    render,
)
from repofill.rue import ORACLE, build_context
from repofill.sketch import ScoredMethod, Sketch
from repofill.tokens import count_tokens

JAVA = get_frontend("java")
TEMPLATE = load_template("completion")


def _snip(i: int, rel: float, lines: int = 2) -> Snippet:
    body = "\n".join(f"    call{i}_{k}();" for k in range(lines))
    return Snippet(f"src/S{i}.java", f"p.S{i}.m()", f"void m{i}() {{\n{body}\n}}", rel)


def test_prompt_layout_puts_most_relevant_last():
    out = render([_snip(1, 3.0), _snip(2, 2.0), _snip(3, 1.0)], "class A {", "int f()", "}", 500, TEMPLATE)
    assert out.relevances == (1.0, 2.0, 3.0)
    assert [p for p, _ in out.included_snippets] == ["src/S3.java", "src/S2.java", "src/S1.java"]
    assert out.text.index("// path: src/S3.java") < out.text.index("// path: src/S1.java")
    assert out.text.index("// path: src/S1.java") < out.text.index("class A {")
    assert f"int f() {DEFAULT_MARKER}" in out.text
    assert not out.truncated


def test_budget_drops_least_relevant_first():
    snippets = [_snip(1, 3.0), _snip(2, 2.0), _snip(3, 1.0)]
    full = render(snippets, "", "int f()", "", 10_000, TEMPLATE)
    block = count_tokens(comment_block(snippets[0], "//"))
    out = render(snippets, "", "int f()", "", full.token_count - block + 1, TEMPLATE)
    assert [q for _, q in out.included_snippets] == ["p.S2.m()", "p.S1.m()"]
    assert out.truncated
    assert out.token_count <= out.budget


def test_admission_stops_at_first_snippet_that_does_not_fit():
    big, small = _snip(1, 3.0, lines=40), _snip(2, 2.0, lines=1)
    base = render([], "", "int f()", "", 10_000, TEMPLATE).token_count
    out = render([big, small], "", "int f()", "", base + count_tokens(comment_block(small, "//")) + 1, TEMPLATE)
    assert out.included_snippets == ()


def test_prompt_without_room_for_base_is_rejected():
    with pytest.raises(ContextBudgetError, match="context exceeds budget"):
        render([], "x " * 100, "int f()", "", 50, TEMPLATE)


def test_comment_block_prefixes_every_line():
    block = comment_block(Snippet("a/B.java", "B.m()", "void m() {\n\n  x();\n}", 1.0), "#")
    assert block == "# path: a/B.java\n# void m() {\n#\n#   x();\n# }\n\n"


def test_declaration_text_dedents_body(shop_index):
    text = declaration_text(shop_index.method("shop.Inventory.reserveItems(int)"))
    # the header is rebuilt from the declaration, so modifiers are not repeated
    assert text == "int reserveItems(int qty) {\n    stockLevel -= qty;\n    return qty;\n}"


def test_custom_template_and_marker(tmp_path):
    path = tmp_path / "t.txt"
    path.write_text("$snippets>>> $signature $marker <<<\n", encoding="utf-8")
    out = render([_snip(1, 1.0)], "", "int f()", "", 500, load_template(str(path)), marker="/* HOLE */")
    assert out.text.endswith(">>> int f() /* HOLE */ <<<\n")


def test_token_scale_is_applied():
    plain = render([], "a b c", "int f()", "", 500, TEMPLATE)
    scaled = render([], "a b c", "int f()", "", 500, TEMPLATE, token_scale=2.0)
    assert scaled.token_count == 2 * plain.token_count


@settings(max_examples=300, deadline=None)
@given(
    rels=st.lists(st.floats(0, 100, allow_nan=False), max_size=10),
    lines=st.lists(st.integers(0, 8), min_size=10, max_size=10),
    budget=st.integers(1, 300),
    scale=st.sampled_from([0.5, 1.0, 1.7]),
)
def test_render_properties(rels, lines, budget, scale):
    rels = sorted(rels, reverse=True)
    snippets = [_snip(i, r, lines[i]) for i, r in enumerate(rels)]
    try:
        out = render(snippets, "class A {", "int f()", "}", budget, TEMPLATE, token_scale=scale)
    except ContextBudgetError:
        assert render([], "class A {", "int f()", "}", 10**6, TEMPLATE, token_scale=scale).token_count > budget
        return
    assert out.token_count == count_tokens(out.text, scale) <= budget
    assert list(out.relevances) == sorted(out.relevances)
    kept = len(out.included_snippets)
    assert [q for _, q in reversed(out.included_snippets)] == [s.qualified_name for s in snippets[:kept]]


# -- final prompt and generation ---------------------------------------------------------


@pytest.fixture
def problem(shop_root, shop_index):
    method = shop_index.method("shop.OrderDesk.placeOrder(Inventory,PriceBook,String,int)")
    return problem_for(method, (shop_root / method.span.file_path).read_bytes(), "shop", repo_root=str(shop_root))


def test_complete_extracts_body_from_backend_answer(problem, shop_index):
    similar = [ScoredMethod(shop_index.method("shop.Replay.quote(PriceBook,String)"), 0.4)]
    bundle = build_context(problem, similar, [], Sketch(SHOP_SKETCH, SHOP_SKETCH, True), ORACLE)
    prompt = render_prompt(problem, bundle, 4096, PromptConfig(), JAVA)
    assert "// path: src/shop/Replay.java" in prompt.text
    assert "import java.util.List;" not in prompt.text  # left context comes from the miner without imports
    backend = MockBackend({prompt_hash(prompt.text): f"```java\n{problem.signature} {problem.reference_body}\n```"})
    result = complete(problem, bundle, backend, PromptConfig(), JAVA)
    assert result.extracted
    assert result.body_text == problem.reference_body
    assert result.prompt.text == prompt.text


def test_unmatched_mock_prompt_yields_empty_body(problem):
    bundle = build_context(problem, [], [], Sketch("", "", False), ORACLE)
    result = complete(problem, bundle, MockBackend(), PromptConfig(), JAVA)
    assert result.extracted and result.body_text == "{\n}"


def test_prose_answer_is_not_extracted(problem):
    class Prose:
        def generate(self, request):
            return GenerationResponse("Sorry, no idea.")

    bundle = build_context(problem, [], [], None, ORACLE)
    result = complete(problem, bundle, Prose(), PromptConfig(), JAVA)
    assert result.empty and result.raw_llm_output == "Sorry, no idea."


def test_prompt_config_validation():
    with pytest.raises(ValueError):
        PromptConfig(budget=0)
    with pytest.raises(ValueError):
        PromptConfig(token_scale=0)
