"""A small Java project the demo scripts write to a scratch directory."""

from __future__ import annotations

import textwrap
from pathlib import Path

FILES = {
    "src/depot/Shelf.java": """
        package depot;

        public class Shelf {
            protected int capacity;
            protected int used;

            public int freeSpace() {
                int left = capacity - used;
                return left < 0 ? 0 : left;
            }

            public boolean store(int boxes) {
                if (boxes > freeSpace()) {
                    return false;
                }
                used += boxes;
                return true;
            }
        }
        """,
    "src/depot/Ledger.java": """
        package depot;

        import java.util.ArrayList;
        import java.util.List;

        public class Ledger {
            private final List<String> lines = new ArrayList<>();

            public void append(String entry, int boxes) {
                String line = entry + ":" + boxes;
                lines.add(line);
                System.out.println(line);
            }

            public int size() {
                int n = lines.size();
                return n;
            }
        }
        """,
    "src/depot/Dock.java": """
        package depot;

        public class Dock extends Shelf {
            private Ledger ledger = new Ledger();

            public int unload(Shelf target, int boxes, String carrier) {
                if (!target.store(boxes)) {
                    ledger.append("rejected " + carrier, boxes);
                    return 0;
                }
                ledger.append("stored " + carrier, boxes);
                return boxes;
            }

            public int transfer(Shelf from, Shelf to, int boxes) {
                int moved = Math.min(boxes, from.used);
                if (!to.store(moved)) {
                    ledger.append("transfer failed", moved);
                    return 0;
                }
                from.used -= moved;
                ledger.append("transfer", moved);
                return moved;
            }
        }
        """,
    "src/depot/Night.java": """
        package depot;

        public class Night {
            private final Dock dock = new Dock();
            private final Ledger ledger = new Ledger();

            public int lateArrival(Shelf target, int boxes, String carrier) {
                if (!target.store(boxes)) {
                    ledger.append("late rejected " + carrier, boxes);
                    return 0;
                }
                ledger.append("late stored " + carrier, boxes);
                return boxes;
            }

            public int report() {
                int total = ledger.size();
                System.out.println("entries " + total);
                return total;
            }
        }
        """,
}


def write_warehouse(root: Path) -> Path:
    for rel, text in FILES.items():
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(textwrap.dedent(text).lstrip(), encoding="utf-8")
    return root
