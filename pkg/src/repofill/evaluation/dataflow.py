"""Syntactic def-use edges for the dataflow component of CodeBLEU (Java).

Every leaf token gets an ordinal. An edge ``(name, ordinal, relation,
parent names, parent ordinals)`` says the variable occurrence at ``ordinal``
``comesFrom`` or is ``computedFrom`` earlier occurrences. Reaching
definitions are tracked through straight-line code, ``if``/``else`` joins
and two unrolled passes over loop bodies. Results follow the rules of the
widely used CodeXGLUE scorer, with one change: merged name lists keep
first-seen order instead of set order, so output is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

from tree_sitter import Node

_LITERAL_LEAVES = ("string_literal", "string", "character_literal")

Edge = tuple[str, int, str, tuple[str, ...], tuple[int, ...]]
State = dict[str, tuple[int, ...]]


def _is_leaf(node: Node) -> bool:
    return (node.child_count == 0 or node.type in _LITERAL_LEAVES) and node.type != "comment"


def _unique(items) -> tuple:
    return tuple(dict.fromkeys(items))


def _merge_by_site(edges: list[Edge]) -> list[Edge]:
    merged: dict[tuple[str, int, str], tuple[tuple[str, ...], tuple[int, ...]]] = {}
    for name, idx, rel, pnames, pidx in edges:
        key = (name, idx, rel)
        if key in merged:
            old_names, old_idx = merged[key]
            merged[key] = (_unique(old_names + pnames), tuple(sorted(set(old_idx + pidx))))
        else:
            merged[key] = (pnames, pidx)
    out = [(k[0], k[1], k[2], v[0], v[1]) for k, v in merged.items()]
    return sorted(out, key=lambda e: e[1])


@dataclass
class _Tokens:
    ordinal: dict[tuple, int]
    text: dict[tuple, str]

    @classmethod
    def of(cls, root: Node) -> _Tokens:
        ordinal, text = {}, {}
        stack = [root]
        leaves = []
        while stack:
            node = stack.pop()
            if _is_leaf(node):
                leaves.append(node)
            else:
                stack.extend(reversed(node.children))
        for i, leaf in enumerate(leaves):
            key = (leaf.start_point, leaf.end_point)
            ordinal[key] = i
            text[key] = leaf.text.decode("utf-8", "replace")
        return cls(ordinal, text)

    def lookup(self, node: Node) -> tuple[int, str]:
        key = (node.start_point, node.end_point)
        return self.ordinal[key], self.text[key]

    def variables(self, node: Node | None) -> list[tuple[int, str]]:
        """Leaf tokens under ``node`` whose text differs from their node type."""
        out = []
        stack = [node] if node is not None else []
        while stack:
            cur = stack.pop()
            if _is_leaf(cur):
                idx, code = self.lookup(cur)
                if cur.type != code:
                    out.append((idx, code))
            else:
                stack.extend(reversed(cur.children))
        return out


class _JavaFlow:
    def __init__(self, tokens: _Tokens):
        self.tokens = tokens

    def walk(self, node: Node | None, state: State) -> tuple[list[Edge], State]:
        state = dict(state)
        if node is None:
            return [], state
        t = node.type
        if _is_leaf(node):
            return self._leaf(node, state)
        if t == "variable_declarator":
            return self._declarator(node, state)
        if t == "assignment_expression":
            return self._assign(node.child_by_field_name("left"), node.child_by_field_name("right"), state)
        if t == "update_expression":
            vars_ = self.tokens.variables(node)
            edges = []
            for idx1, code1 in vars_:
                edges += [(code1, idx1, "computedFrom", (code2,), (idx2,)) for idx2, code2 in vars_]
                state[code1] = (idx1,)
            return sorted(edges, key=lambda e: e[1]), state
        if t in ("if_statement", "else"):
            return self._if(node, state)
        if t == "for_statement":
            return self._for(node, state)
        if t == "enhanced_for_statement":
            return self._enhanced_for(node, state)
        if t == "while_statement":
            edges = []
            for _ in range(2):
                for child in node.children:
                    sub, state = self.walk(child, state)
                    edges += sub
            return _merge_by_site(edges), state
        edges = []
        for child in node.children:
            sub, state = self.walk(child, state)
            edges += sub
        return sorted(edges, key=lambda e: e[1]), state

    def _leaf(self, node: Node, state: State):
        idx, code = self.tokens.lookup(node)
        if node.type == code:
            return [], state
        if code in state:
            return [(code, idx, "comesFrom", (code,), state[code])], state
        if node.type == "identifier":
            state[code] = (idx,)
        return [(code, idx, "comesFrom", (), ())], state

    def _declarator(self, node: Node, state: State):
        name, value = node.child_by_field_name("name"), node.child_by_field_name("value")
        edges: list[Edge] = []
        if value is None:
            for idx, code in self.tokens.variables(name):
                edges.append((code, idx, "comesFrom", (), ()))
                state[code] = (idx,)
            return sorted(edges, key=lambda e: e[1]), state
        sub, state = self.walk(value, state)
        edges += sub
        sources = self.tokens.variables(value)
        for idx1, code1 in self.tokens.variables(name):
            edges += [(code1, idx1, "comesFrom", (code2,), (idx2,)) for idx2, code2 in sources]
            state[code1] = (idx1,)
        return sorted(edges, key=lambda e: e[1]), state

    def _assign(self, left: Node | None, right: Node | None, state: State, relation: str = "computedFrom"):
        edges, state = self.walk(right, state)
        sources = self.tokens.variables(right)
        for idx1, code1 in self.tokens.variables(left):
            edges += [(code1, idx1, relation, (code2,), (idx2,)) for idx2, code2 in sources]
            state[code1] = (idx1,)
        return sorted(edges, key=lambda e: e[1]), state

    def _if(self, node: Node, state: State):
        edges: list[Edge] = []
        current = dict(state)
        branches: list[State] = []
        in_branch = False
        has_else = "else" in node.type
        for child in node.children:
            if "else" in child.type:
                has_else = True
            if child.type not in ("if_statement", "else") and not in_branch:
                sub, current = self.walk(child, current)
                edges += sub
            else:
                in_branch = True
                sub, branch_state = self.walk(child, state)
                edges += sub
                branches.append(branch_state)
        branches.append(current)
        if not has_else:
            branches.append(state)
        joined: dict[str, list[int]] = {}
        for st in branches:
            for k, v in st.items():
                joined.setdefault(k, []).extend(v)
        return sorted(edges, key=lambda e: e[1]), {k: tuple(sorted(set(v))) for k, v in joined.items()}

    def _for(self, node: Node, state: State):
        edges: list[Edge] = []
        for child in node.children:
            sub, state = self.walk(child, state)
            edges += sub
        after_init = False
        for child in node.children:
            if after_init:
                sub, state = self.walk(child, state)
                edges += sub
            elif child.type == "local_variable_declaration":
                after_init = True
        return _merge_by_site(edges), state

    def _enhanced_for(self, node: Node, state: State):
        name, value, body = (node.child_by_field_name(f) for f in ("name", "value", "body"))
        edges: list[Edge] = []
        for _ in range(2):
            sub, state = self.walk(value, state)
            edges += sub
            sources = self.tokens.variables(value)
            for idx1, code1 in self.tokens.variables(name):
                edges += [(code1, idx1, "computedFrom", (code2,), (idx2,)) for idx2, code2 in sources]
                state[code1] = (idx1,)
            sub, state = self.walk(body, state)
            edges += sub
        return _merge_by_site(edges), state


def java_dataflow(root: Node) -> list[Edge]:
    """Def-use edges of a parsed tree, restricted to connected occurrences."""
    tokens = _Tokens.of(root)
    try:
        edges, _ = _JavaFlow(tokens).walk(root, {})
    except (KeyError, RecursionError):
        edges = []
    edges = sorted(edges, key=lambda e: e[1])
    connected: set[int] = set()
    for _name, idx, _rel, _pn, pidx in edges:
        if pidx:
            connected.add(idx)
        connected.update(pidx)
    by_site: dict[int, Edge] = {}
    for e in edges:
        if e[1] not in connected:
            continue
        if e[1] in by_site:
            old = by_site[e[1]]
            by_site[e[1]] = (old[0], old[1], old[2], _unique(old[3] + e[3]), _unique(old[4] + e[4]))
        else:
            by_site[e[1]] = e
    return list(by_site.values())


def normalize_dataflow(edges: list[Edge]) -> list[tuple[str, str, tuple[str, ...]]]:
    """Rename variables to ``var_<n>`` in first-seen order across the whole list."""
    names: dict[str, str] = {}
    out = []
    for name, _idx, rel, parents, _pidx in edges:
        for p in parents:
            names.setdefault(p, f"var_{len(names)}")
        names.setdefault(name, f"var_{len(names)}")
        out.append((names[name], rel, tuple(names[p] for p in parents)))
    return out
