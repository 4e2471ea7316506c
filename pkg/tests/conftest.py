from __future__ import annotations

import textwrap
from pathlib import Path

import pytest

from repofill.index import build_index

CRITERIA: list[str] = []


def write_tree(root: Path, files: dict[str, str]) -> Path:
    for rel, text in files.items():
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(textwrap.dedent(text).lstrip("\n"), encoding="utf-8")
    return root


# A small order-desk repository. OrderDesk.placeOrder is the method under
# completion; Replay.replayOrder carries the same body verbatim, and the
# decoys share subtokens with the real names without matching them.
SHOP = {
    "src/shop/Inventory.java": """
        package shop;

        public class Inventory {
            protected int stockLevel;
            protected String warehouseCode;

            public int reserveItems(int qty) {
                stockLevel -= qty;
                return qty;
            }

            public void releaseHold(String id) {
                warehouseCode = id;
                stockLevel += 1;
            }

            public int reserveSeats(int rows, int cols) {
                int seats = rows * cols;
                return seats;
            }
        }
        """,
    "src/shop/PriceBook.java": """
        package shop;

        public class PriceBook {
            private double markup;

            public double lookupPrice(String sku) {
                double base = sku.length();
                return base * markup;
            }

            public double lookupTax(String region) {
                double rate = region.length() / 100.0;
                return rate;
            }
        }
        """,
    "src/shop/AuditTrail.java": """
        package shop;

        public class AuditTrail {
            public static void recordEvent(String what, int count) {
                System.out.println(what);
                System.out.println(count);
            }
        }
        """,
    "src/shop/OrderDesk.java": """
        package shop;

        import java.util.List;

        import static shop.AuditTrail.recordEvent;

        public class OrderDesk extends Inventory {
            public boolean validateSku(String sku) {
                boolean ok = sku != null;
                return ok && !sku.isEmpty();
            }

            public int placeOrder(Inventory stock, PriceBook book, String sku, int qty) {
                if (!validateSku(sku)) {
                    return 0;
                }
                Inventory primary = stock;
                PriceBook prices = book;
                int reserved = primary.reserveItems(qty);
                double price = prices.lookupPrice(sku);
                recordEvent(sku, reserved);
                if (stockLevel < reserved) {
                    primary.releaseHold(warehouseCode);
                }
                return reserved;
            }
        }
        """,
    "src/shop/Replay.java": """
        package shop;

        import static shop.AuditTrail.recordEvent;

        public class Replay extends OrderDesk {
            public int replayOrder(Inventory stock, PriceBook book, String sku, int qty) {
                if (!validateSku(sku)) {
                    return 0;
                }
                Inventory primary = stock;
                PriceBook prices = book;
                int reserved = primary.reserveItems(qty);
                double price = prices.lookupPrice(sku);
                recordEvent(sku, reserved);
                if (stockLevel < reserved) {
                    primary.releaseHold(warehouseCode);
                }
                return reserved;
            }

            public double quote(PriceBook book, String sku) {
                double price = book.lookupPrice(sku);
                return price * 2;
            }

            public void restock(Inventory stock, int qty) {
                stock.releaseHold("main");
                stock.reserveItems(-qty);
            }

            public double taxFor(PriceBook book) {
                double rate = book.lookupTax("eu");
                return rate;
            }
        }
        """,
    "src/test/shop/OrderDeskTest.java": """
        package shop;

        public class OrderDeskTest {
            public void placesOrder() {
                Inventory stock = new Inventory();
                stock.reserveItems(2);
                stock.reserveItems(3);
            }
        }
        """,
}

# The canned draft: five repo methods, two fields and two classes by exact name.
SHOP_SKETCH = """{
    if (!validateSku(sku)) {
        return 0;
    }
    Inventory primary = stock;
    PriceBook prices = book;
    int reserved = primary.reserveItems(qty);
    double price = prices.lookupPrice(sku);
    recordEvent(sku, reserved);
    if (stockLevel < reserved) {
        primary.releaseHold(warehouseCode);
    }
    return reserved;
}"""

SHOP_SIGNATURE = "public int placeOrder(Inventory stock, PriceBook book, String sku, int qty)"


@pytest.fixture
def shop_root(tmp_path) -> Path:
    return write_tree(tmp_path / "shop", SHOP)


@pytest.fixture
def shop_index(shop_root):
    return build_index(shop_root)


@pytest.fixture
def criterion():
    """Record a one-line PASS/FAIL verdict for an acceptance criterion."""

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})"
        CRITERIA.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
