"""Seeded synthetic Java repositories with a known call graph.

The generator writes plain source files and remembers, for every work method
it emits, which other work methods it calls. Tests use that record as ground
truth instead of anything the index computed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

NOUNS = [
    "Order", "Invoice", "Route", "Account", "Ledger", "Ticket", "Cart", "Shipment",
    "Payment", "Customer", "Product", "Catalog", "Session", "Token", "Report", "Metric",
]
ROLES = ["Service", "Store", "Handler", "Manager", "Registry", "Processor", "Gateway", "Cache"]
VERBS = ["load", "save", "count", "merge", "check", "apply", "settle", "refresh", "price", "audit"]

SIGNATURE_PARAMS = "int amount, String tag"
SIGNATURE_TYPES = "(int,String)"


@dataclass
class SynthRepo:
    root: Path
    classes: list[str] = field(default_factory=list)  # qualified class names
    # qualified method name -> qualified names of the work methods it calls
    calls: dict[str, set[str]] = field(default_factory=dict)
    # qualified method name -> file path relative to root
    files: dict[str, str] = field(default_factory=dict)

    def callers_of(self, callee: str) -> set[str]:
        return {m for m, cs in self.calls.items() if callee in cs}

    def related(self, method: str) -> set[str]:
        """Methods other than ``method`` that share at least one callee with it."""
        out: set[str] = set()
        for callee in self.calls.get(method, ()):
            out |= self.callers_of(callee)
        out.discard(method)
        return out


def _qmethod(qclass: str, name: str) -> str:
    return f"{qclass}.{name}{SIGNATURE_TYPES}"


def generate_repo(root: str | Path, n_files: int, seed: int = 0, methods_per_class: int = 4) -> SynthRepo:
    rng = random.Random(seed)
    root = Path(root)
    repo = SynthRepo(root)

    plans = []
    for i in range(n_files):
        noun, role = NOUNS[i % len(NOUNS)], ROLES[(i // len(NOUNS)) % len(ROLES)]
        pkg = f"com.synth.p{i // 50}"
        cls = f"{noun}{role}{i}"
        verbs = rng.sample(VERBS, methods_per_class)
        names = [f"{v}{noun}{i}" for v in verbs]
        plans.append((pkg, cls, names))
        repo.classes.append(f"{pkg}.{cls}")

    for i, (pkg, cls, names) in enumerate(plans):
        # Earlier classes are more likely dependencies, so some callees are shared widely.
        dep = min(rng.randrange(n_files), rng.randrange(n_files)) if n_files > 1 else i
        if dep == i:
            dep = (i + 1) % n_files
        dep_pkg, dep_cls, dep_names = plans[dep]
        dep_q = f"{dep_pkg}.{dep_cls}"

        lines = [f"package {pkg};", ""]
        if dep_pkg != pkg:
            lines += [f"import {dep_q};", ""]
        lines += [
            f"public class {cls} {{",
            f"    private final {dep_cls} dep;",
            "    private int count;",
            "    private String label;",
            "",
            f"    public {cls}({dep_cls} dep) {{",
            "        this.dep = dep;",
            "    }",
            "",
            "    public String getLabel() {",
            "        return label;",
            "    }",
            "",
            "    public void setLabel(String label) {",
            "        this.label = label;",
            "    }",
        ]
        for name in names:
            callees = rng.sample(dep_names, rng.randint(1, 3)) if i != dep else []
            limit = rng.randint(2, 90)
            body = [
                "        int total = amount + this.count;",
            ]
            for k, callee in enumerate(callees):
                arg = "tag" if k % 2 == 0 else "this.label"
                if k == 1:
                    body += [
                        f"        if (total > {limit}) {{",
                        f"            total -= dep.{callee}(amount, {arg});",
                        "        }",
                    ]
                else:
                    body.append(f"        total += dep.{callee}(total, {arg});")
            body += ["        this.count = total;", "        return total;"]
            lines += ["", f"    public int {name}({SIGNATURE_PARAMS}) {{", *body, "    }"]
            q = _qmethod(f"{pkg}.{cls}", name)
            repo.calls[q] = {_qmethod(dep_q, c) for c in callees}
        lines += ["}", ""]

        rel = f"src/main/java/{pkg.replace('.', '/')}/{cls}.java"
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines), encoding="utf-8")
        for name in names:
            repo.files[_qmethod(f"{pkg}.{cls}", name)] = rel
    return repo
