"""
How the three scores react to small edits
=========================================
"""

from repofill.evaluation import bleu, codebleu_detail, exact_match

reference = """{
    int left = capacity - used;
    return left < 0 ? 0 : left;
}"""

variants = {
    "identical": reference,
    "renamed local": reference.replace("left", "room"),
    "reformatted": "{ int left = capacity - used; return left < 0 ? 0 : left; }",
    "with a comment": reference.replace("int left", "// clamp below\n    int left"),
    "different logic": "{\n    return Math.max(0, capacity - used);\n}",
    "empty": "",
}

print(f"{'variant':<16} {'EM':>3} {'BLEU':>7} {'CodeBLEU':>9} {'syntax':>7} {'dataflow':>9}")
for label, candidate in variants.items():
    detail = codebleu_detail(candidate, reference)
    syntax = "-" if detail.syntax is None else f"{detail.syntax:.2f}"
    flow = "-" if detail.dataflow is None else f"{detail.dataflow:.2f}"
    print(
        f"{label:<16} {int(exact_match(candidate, reference)):>3} {bleu(candidate, reference):7.2f} "
        f"{detail.score:9.2f} {syntax:>7} {flow:>9}"
    )

# Exact match is strict about layout, so reformatting alone costs the point
# even though BLEU (token based) still gives 100. Renaming a local keeps the
# data flow intact, which is the part of CodeBLEU that forgives it. A
# candidate that does not parse has no syntax or data
# flow score at all; an empty one scores zero outright.
