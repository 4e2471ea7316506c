"""Java frontend backed by tree-sitter."""

from __future__ import annotations

import re
import threading
from dataclasses import replace

import tree_sitter_java
from tree_sitter import Language, Node, Parser

from .frontend import Frontend, SnippetFacts, register_frontend
from .model import (
    CALL,
    FIELD_ACCESS,
    TYPE_USE,
    ClassDecl,
    FieldDecl,
    MethodDecl,
    ParsedFile,
    SourceSpan,
    UsageEdge,
)

JAVA_LANGUAGE = Language(tree_sitter_java.language())

TYPE_DECLS = {
    "class_declaration": "class",
    "interface_declaration": "interface",
    "enum_declaration": "enum",
    "record_declaration": "record",
    "annotation_type_declaration": "annotation",
}
METHOD_DECLS = ("method_declaration", "constructor_declaration", "compact_constructor_declaration")

JAVA_KEYWORDS = frozenset(
    """abstract assert boolean break byte case catch char class const continue default do double
    else enum extends final finally float for goto if implements import instanceof int interface
    long native new package private protected public return short static strictfp super switch
    synchronized this throw throws transient try void volatile while true false null var yield
    record sealed permits non-sealed""".split()
)

# (parent type, field name) pairs where an identifier declares a local name
_DECLARING = {
    ("variable_declarator", "name"),
    ("formal_parameter", "name"),
    ("catch_formal_parameter", "name"),
    ("enhanced_for_statement", "name"),
    ("resource", "name"),
    ("instanceof_expression", "name"),
    ("lambda_expression", "parameters"),
    ("type_pattern", None),
    ("record_pattern_component", None),
}
_SKIP_IDENTIFIER_PARENTS = {
    "labeled_statement",
    "break_statement",
    "continue_statement",
    "scoped_identifier",
    "package_declaration",
    "import_declaration",
    "element_value_pair",
}
_CONSTANT_RE = re.compile(r"^[A-Z][A-Z0-9_]*$")

_local = threading.local()


def _parser() -> Parser:
    parser = getattr(_local, "parser", None)
    if parser is None:
        parser = _local.parser = Parser(JAVA_LANGUAGE)
    return parser


def parse_java(code: bytes):
    return _parser().parse(code)


def _text(node: Node) -> str:
    return node.text.decode("utf-8", errors="replace")


def _span(path: str, node: Node) -> SourceSpan:
    return SourceSpan(path, node.start_point[0] + 1, node.end_point[0] + 1, node.start_byte, node.end_byte)


def _is_constant_name(name: str) -> bool:
    return len(name) > 1 and bool(_CONSTANT_RE.match(name))


def body_loc(body_text: str | None) -> int:
    """Non-blank lines strictly inside the outer braces of a block."""
    if not body_text:
        return 0
    inner = body_text.strip()
    if inner.startswith("{") and inner.endswith("}"):
        inner = inner[1:-1]
    return sum(1 for line in inner.splitlines() if line.strip())


def collect_locals(body: Node) -> set[str]:
    """Names declared anywhere inside ``body`` (flow-insensitive)."""
    names: set[str] = set()
    stack = [body]
    while stack:
        node = stack.pop()
        for i, child in enumerate(node.children):
            if child.type == "identifier":
                fname = node.field_name_for_child(i)
                if (node.type, fname) in _DECLARING or (node.type, None) in _DECLARING:
                    names.add(_text(child))
                elif node.type == "inferred_parameters":
                    names.add(_text(child))
            elif child.child_count:
                stack.append(child)
    return names


def _arg_count(invocation: Node) -> int:
    args = invocation.child_by_field_name("arguments")
    if args is None:
        return 0
    return sum(1 for c in args.named_children if c.type not in ("line_comment", "block_comment"))


def body_references(body: Node, locals_: set[str]) -> list[tuple[str, str, int, Node]]:
    """Syntactic references inside a method body as (kind, name, arg_count, node).

    Calls carry the argument count; other kinds carry -1. Bare names that are
    not declared locally are read as fields unless they look like type names.
    """
    refs: list[tuple[str, str, int, Node]] = []

    def classify(node: Node) -> None:
        name = _text(node)
        if name in locals_:
            return
        if _is_constant_name(name):
            refs.append((FIELD_ACCESS, name, -1, node))
        elif name[:1].isupper():
            refs.append((TYPE_USE, name, -1, node))
        else:
            refs.append((FIELD_ACCESS, name, -1, node))

    stack = [body]
    while stack:
        node = stack.pop()
        ptype = node.type
        children = node.children
        for i, child in enumerate(children):
            ctype = child.type
            if ctype == "type_identifier":
                refs.append((TYPE_USE, _text(child), -1, child))
                continue
            if ctype != "identifier":
                if child.child_count and ctype not in ("line_comment", "block_comment"):
                    stack.append(child)
                continue
            fname = node.field_name_for_child(i)
            if ptype == "method_invocation":
                if fname == "name":
                    refs.append((CALL, _text(child), _arg_count(node), child))
                else:
                    classify(child)
            elif ptype == "field_access":
                if fname == "field":
                    refs.append((FIELD_ACCESS, _text(child), -1, child))
                else:
                    classify(child)
            elif ptype in ("marker_annotation", "annotation"):
                refs.append((TYPE_USE, _text(child), -1, child))
            elif ptype == "method_reference":
                if i == 0:
                    classify(child)
            elif (ptype, fname) in _DECLARING or (ptype, None) in _DECLARING:
                continue
            elif ptype == "inferred_parameters" or ptype in _SKIP_IDENTIFIER_PARENTS:
                continue
            else:
                classify(child)
    refs.sort(key=lambda r: r[3].start_byte)
    return refs


class JavaFrontend(Frontend):
    name = "java"
    comment_prefix = "//"
    include_globs = ("**/*.java",)
    keywords = JAVA_KEYWORDS

    def parse(self, code: str | bytes):
        if isinstance(code, str):
            code = code.encode("utf-8")
        return parse_java(code)

    def is_parsable(self, code: str) -> bool:
        return not self.parse(code).root_node.has_error

    # -- files -------------------------------------------------------------

    def parse_file(self, path: str, source: bytes, is_test: bool = False) -> ParsedFile:
        tree = parse_java(source)
        root = tree.root_node
        out = ParsedFile(path=path)
        package = ""
        for child in root.named_children:
            if child.type == "package_declaration":
                for sub in child.named_children:
                    if sub.type in ("scoped_identifier", "identifier"):
                        package = _text(sub)
        for child in root.named_children:
            if child.type in TYPE_DECLS:
                self._visit_type(child, package, path, is_test, out)
        return out

    def _visit_type(self, node: Node, prefix: str, path: str, is_test: bool, out: ParsedFile) -> None:
        name_node = node.child_by_field_name("name")
        if name_node is None:
            return
        simple = _text(name_node)
        qname = f"{prefix}.{simple}" if prefix else simple
        out.classes.append(ClassDecl(qname, simple, _span(path, node), is_test, TYPE_DECLS[node.type]))

        if node.type == "record_declaration":
            params = node.child_by_field_name("parameters")
            for p in params.named_children if params is not None else ():
                pname, ptype = p.child_by_field_name("name"), p.child_by_field_name("type")
                if pname is not None and ptype is not None:
                    out.fields.append(
                        FieldDecl(f"{qname}.{_text(pname)}", _text(pname), qname, _text(ptype), _span(path, p), is_test)
                    )

        body = node.child_by_field_name("body")
        if body is None:
            return
        members = list(body.named_children)
        for m in list(members):
            if m.type == "enum_body_declarations":
                members.extend(m.named_children)
        for member in members:
            mtype = member.type
            if mtype in TYPE_DECLS:
                self._visit_type(member, qname, path, is_test, out)
            elif mtype in METHOD_DECLS:
                method = self._method(member, qname, simple, path, is_test)
                out.methods.append(method)
                body_node = member.child_by_field_name("body")
                if body_node is not None:
                    self._edges(member, body_node, method, path, out)
            elif mtype in ("field_declaration", "constant_declaration"):
                tnode = member.child_by_field_name("type")
                tname = _text(tnode) if tnode is not None else ""
                for decl in member.children_by_field_name("declarator"):
                    dname = decl.child_by_field_name("name")
                    if dname is None:
                        continue
                    fname = _text(dname)
                    out.fields.append(FieldDecl(f"{qname}.{fname}", fname, qname, tname, _span(path, decl), is_test))
            elif mtype == "enum_constant":
                cname = member.child_by_field_name("name")
                if cname is not None:
                    fname = _text(cname)
                    out.fields.append(FieldDecl(f"{qname}.{fname}", fname, qname, simple, _span(path, member), is_test))

    def _method(self, node: Node, owner: str, owner_simple: str, path: str, is_test: bool) -> MethodDecl:
        is_ctor = node.type != "method_declaration"
        name_node = node.child_by_field_name("name")
        name = _text(name_node) if name_node is not None else owner_simple
        rtype = node.child_by_field_name("type")
        return_type = "" if is_ctor or rtype is None else _text(rtype)
        params: list[tuple[str, str]] = []
        varargs = False
        pnode = node.child_by_field_name("parameters")
        for p in pnode.named_children if pnode is not None else ():
            if p.type == "formal_parameter":
                t, n = p.child_by_field_name("type"), p.child_by_field_name("name")
                dims = p.child_by_field_name("dimensions")
                ptype = _text(t) if t is not None else ""
                if dims is not None:
                    ptype += _text(dims)
                params.append((ptype, _text(n) if n is not None else ""))
            elif p.type == "spread_parameter":
                varargs = True
                ptype, pname = "", ""
                for c in p.named_children:
                    if c.type == "variable_declarator":
                        n = c.child_by_field_name("name")
                        pname = _text(n) if n is not None else ""
                    elif c.type not in ("modifiers",):
                        ptype = _text(c)
                params.append((ptype + "...", pname))
        body = node.child_by_field_name("body")
        body_text = _text(body) if body is not None else None
        types = ",".join(t for t, _ in params)
        return MethodDecl(
            qualified_name=f"{owner}.{name}({types})",
            simple_name=name,
            owner_class=owner,
            return_type=return_type,
            params=tuple(params),
            body_text=body_text,
            body_loc=body_loc(body_text),
            span=_span(path, node),
            is_test=is_test,
            is_constructor=is_ctor,
            is_varargs=varargs,
            body_span=_span(path, body) if body is not None else None,
        )

    def _edges(self, decl: Node, body: Node, method: MethodDecl, path: str, out: ParsedFile) -> None:
        locals_ = collect_locals(body) | {n for n in method.param_names if n}
        for kind, name, argc, node in body_references(body, locals_):
            out.edges.append(UsageEdge(method.qualified_name, kind, name, argc, _span(path, node)))

    def parse_header(self, signature_text: str) -> MethodDecl | None:
        code = "class __Header__ {\n" + signature_text.strip().rstrip("{;").rstrip() + " {}\n}"
        root = parse_java(code.encode("utf-8")).root_node
        if root.has_error:
            return None
        for cls in root.named_children:
            body = cls.child_by_field_name("body") if cls.type == "class_declaration" else None
            for member in body.named_children if body is not None else ():
                if member.type in METHOD_DECLS:
                    decl = self._method(member, "", "__Header__", "<signature>", False)
                    return replace(decl, qualified_name=decl.qualified_name.lstrip("."), body_text=None, body_loc=0)
        return None

    # -- snippets ----------------------------------------------------------

    def _snippet_body(self, body_text: str) -> tuple[Node | None, bool]:
        stripped = body_text.strip()
        if stripped.startswith("{"):
            wrapped = "class __Snippet__ { void __snippet__() " + stripped + "\n}"
        else:
            wrapped = "class __Snippet__ { void __snippet__() {\n" + stripped + "\n} }"
        tree = parse_java(wrapped.encode("utf-8"))
        root = tree.root_node
        for cls in root.named_children:
            if cls.type != "class_declaration":
                continue
            body = cls.child_by_field_name("body")
            for member in body.named_children if body is not None else ():
                if member.type == "method_declaration":
                    block = member.child_by_field_name("body")
                    if block is not None:
                        return block, root.has_error
        return None, True

    def analyze_snippet(self, body_text: str, known_locals: frozenset[str] = frozenset()) -> SnippetFacts:
        if not body_text or not body_text.strip():
            return SnippetFacts()
        try:
            block, has_error = self._snippet_body(body_text)
            if block is None or (has_error and _error_fraction(block) > 0.5):
                return regex_snippet_facts(body_text, known_locals)
            facts = SnippetFacts(degraded=has_error)
            locals_ = collect_locals(block) | set(known_locals)
            for kind, name, argc, _node in body_references(block, locals_):
                if name in JAVA_KEYWORDS:
                    continue
                if kind == CALL:
                    facts.calls.add((name, argc))
                elif kind == FIELD_ACCESS:
                    facts.fields.add(name)
                else:
                    facts.types.add(name)
            return facts
        except Exception:  # analysis of generated code must never raise
            return regex_snippet_facts(body_text, known_locals)

    def accessor_kind(self, method: MethodDecl, field_names: set[str]) -> str | None:
        if not method.body_text or method.is_constructor:
            return None
        block, has_error = self._snippet_body(method.body_text)
        if block is None or has_error:
            return None
        stmts = [c for c in block.named_children if c.type not in ("line_comment", "block_comment")]
        if len(stmts) != 1:
            return None
        stmt = stmts[0]

        def field_ref(node: Node | None) -> str | None:
            if node is None:
                return None
            if node.type == "identifier":
                return _text(node)
            if node.type == "field_access":
                obj = node.child_by_field_name("object")
                if obj is not None and obj.type == "this":
                    return _text(node.child_by_field_name("field"))
            return None

        if stmt.type == "return_statement":
            value = stmt.named_children[0] if stmt.named_children else None
            if field_ref(value) in field_names:
                return "getter"
        elif stmt.type == "expression_statement" and stmt.named_children:
            expr = stmt.named_children[0]
            if expr.type == "assignment_expression":
                op = expr.child_by_field_name("operator")
                right = expr.child_by_field_name("right")
                if (
                    (op is None or _text(op) == "=")
                    and field_ref(expr.child_by_field_name("left")) in field_names
                    and right is not None
                    and right.type == "identifier"
                    and _text(right) in set(method.param_names)
                ):
                    return "setter"
        return None


def _error_fraction(block: Node) -> float:
    total = max(1, block.end_byte - block.start_byte)
    bad = 0
    stack = [block]
    while stack:
        node = stack.pop()
        if node.is_error:
            bad += node.end_byte - node.start_byte
            continue
        stack.extend(node.children)
    return bad / total


_CALL_RE = re.compile(r"\b([A-Za-z_$][\w$]*)\s*\(")
_DOTTED_RE = re.compile(r"\.\s*([A-Za-z_$][\w$]*)\b(?!\s*\()")
_CAP_RE = re.compile(r"\b([A-Z][\w$]*)\b")
_STRING_RE = re.compile(r'"(?:\\.|[^"\\])*"|\'(?:\\.|[^\'\\])*\'|//[^\n]*|/\*.*?\*/', re.S)


def _count_args(text: str, open_idx: int) -> int:
    depth, commas, seen = 0, 0, False
    for ch in text[open_idx:]:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
            if depth == 0:
                return commas + 1 if seen else 0
        elif ch == "," and depth == 1:
            commas += 1
        elif not ch.isspace() and depth >= 1:
            seen = True
    return commas + 1 if seen else 0


def regex_snippet_facts(body_text: str, known_locals: frozenset[str] = frozenset()) -> SnippetFacts:
    """Token-level fallback used when a snippet cannot be parsed."""
    text = _STRING_RE.sub(lambda m: " " * len(m.group(0)), body_text)
    facts = SnippetFacts(degraded=True)
    for m in _CALL_RE.finditer(text):
        name = m.group(1)
        before = text[: m.start(1)].rstrip()
        if name in JAVA_KEYWORDS or before.endswith("new"):
            continue
        facts.calls.add((name, _count_args(text, m.end() - 1)))
    for m in _CAP_RE.finditer(text):
        name = m.group(1)
        if name not in JAVA_KEYWORDS and not _is_constant_name(name) and name not in known_locals:
            facts.types.add(name)
    for m in _DOTTED_RE.finditer(text):
        name = m.group(1)
        if name not in JAVA_KEYWORDS and name not in facts.types and name not in known_locals:
            facts.fields.add(name)
    return facts


register_frontend("java", JavaFrontend)
