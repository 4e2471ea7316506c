"""Recompute tests/data/codebleu_reference.json with the published scorer.

The published ``codebleu`` package pins an older tree-sitter than this
project, so run this from a separate virtual environment::

    python -m venv /tmp/oracle
    /tmp/oracle/bin/pip install codebleu==0.7.0 tree-sitter-java==0.21.0
    PYTHONHASHSEED=0 /tmp/oracle/bin/python tools/regen_codebleu_reference.py

Candidate/reference pairs are read from the existing file and only the
scores are rewritten.
"""

import json
from pathlib import Path

from codebleu import calc_codebleu

PATH = Path(__file__).resolve().parent.parent / "tests" / "data" / "codebleu_reference.json"


def main() -> None:
    data = json.loads(PATH.read_text(encoding="utf-8"))
    for row in data["pairs"]:
        r = calc_codebleu([row["reference"]], [row["candidate"]], lang="java")
        row.update(
            codebleu=round(float(r["codebleu"]) * 100, 6),
            ngram=round(float(r["ngram_match_score"]), 6),
            weighted_ngram=round(float(r["weighted_ngram_match_score"]), 6),
            syntax=round(float(r["syntax_match_score"]), 6),
            dataflow=round(float(r["dataflow_match_score"]), 6),
        )
    PATH.write_text(json.dumps(data, indent=1, ensure_ascii=False), encoding="utf-8")


if __name__ == "__main__":
    main()
