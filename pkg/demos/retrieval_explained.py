"""
What the retriever looks at, one step at a time
===============================================

Completing ``Dock.unload`` in the demo warehouse. The steps are the same ones
``repofill complete`` runs, unpacked so every intermediate value is visible.
"""

import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))
from warehouse import write_warehouse  # noqa: E402

from repofill.eei import identify_essentials  # noqa: E402
from repofill.evaluation.mining import problem_for  # noqa: E402
from repofill.index import build_index, get_frontend  # noqa: E402
from repofill.similarity import name_sim, sim  # noqa: E402
from repofill.sketch import analyze_sketch, retrieve_signature_similar  # noqa: E402
from repofill.rue import build_context, extract_usages, rank_usages  # noqa: E402

root = write_warehouse(Path(tempfile.mkdtemp()) / "depot")
index = build_index(root)
java = get_frontend("java")

target = index.method("depot.Dock.unload(Shelf,int,String)")
problem = problem_for(target, (root / target.span.file_path).read_bytes(), "depot")
print("target:", target.qualified_name)

# Lexical similarity splits identifiers into lowercase subwords and compares
# the two sets. Case and camel humps do not matter; repeated words count once.
print("name_sim('lateArrival', 'arrivalLate') =", name_sim("lateArrival", "arrivalLate"))
print("name_sim('store', 'storeAll')          =", name_sim("store", "storeAll"))

# Step 1: methods whose signature reads like the target's.
similar = retrieve_signature_similar(index, problem, 3, frontend=java, exclude=target.qualified_name)
for s in similar:
    print(f"similar signature {s.score:.3f}  {s.method.qualified_name}")

# Step 2: a draft body. A model would write it; here it is typed in by hand,
# complete with a slightly wrong method name (``appendLine``).
draft = """{
    if (!target.store(boxes)) {
        ledger.appendLine("rejected " + carrier, boxes);
        return 0;
    }
    return boxes;
}"""
analysis = analyze_sketch(draft, java, frozenset({"target", "boxes", "carrier"}))
print("draft calls:", sorted(analysis.called_methods), "fields:", sorted(analysis.accessed_fields))

# Step 3: map each name in the draft to a real element. ``appendLine`` has
# no exact match, but ``append`` shares half its subwords, which is enough.
essentials = identify_essentials(index, analysis, exclude=target.qualified_name)
for t in essentials.match_trace:
    print(f"  {t.category:<6} {t.sketch_name:<12} -> {t.element or 'no match'}  ({t.score:.2f})")

# Step 4: everything else in the repository that uses those elements, ranked
# by how much its body resembles the draft. ``Night.lateArrival`` is a near
# copy of the target and should come out on top. Usage edges are recorded by
# simple name, so ``Night.report`` counts as a user of ``ledger`` even though
# it reads Night's own field of that name; ranking pushes it to the bottom.
ranked = rank_usages(extract_usages(index, essentials, target.qualified_name), draft, 5)
for u in ranked:
    print(f"usage {sim(u.method.body_text, draft):.3f}  {u.method.qualified_name}")

bundle = build_context(problem, similar, ranked, exclude=target.qualified_name)
print("context snippets:", [s.qualified_name for s in bundle.snippets()])
