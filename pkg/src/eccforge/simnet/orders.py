"""Order records read from an online-retail style CSV."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from importlib import resources
from pathlib import Path
from typing import Optional, Union

CSV_COLUMNS = ("InvoiceNo", "StockCode", "Description", "Quantity", "InvoiceDate",
               "UnitPrice", "CustomerID", "Country")
FIELD_ORDER = ("invoice_no", "stock_code", "description", "quantity", "invoice_date",
               "unit_price", "customer_id", "country")


@dataclass(frozen=True)
class OrderRecord:
    invoice_no: str
    stock_code: str
    description: str
    quantity: int
    invoice_date: str
    unit_price: Decimal
    customer_id: str
    country: str

    def __post_init__(self):
        if self.quantity == 0:
            raise ValueError("quantity must be nonzero")
        if self.unit_price < 0:
            raise ValueError("unit_price must be non-negative")

    def to_json(self) -> bytes:
        """Canonical serialisation: CSV column order, compact separators."""
        body = {name: getattr(self, name) for name in FIELD_ORDER}
        body["unit_price"] = str(self.unit_price)
        return json.dumps(body, separators=(",", ":"), ensure_ascii=False).encode("utf-8")

    @classmethod
    def from_json(cls, data: bytes) -> "OrderRecord":
        body = json.loads(data.decode("utf-8"))
        return cls(
            invoice_no=str(body["invoice_no"]),
            stock_code=str(body["stock_code"]),
            description=str(body["description"]),
            quantity=int(body["quantity"]),
            invoice_date=str(body["invoice_date"]),
            unit_price=Decimal(body["unit_price"]),
            customer_id=str(body["customer_id"]),
            country=str(body["country"]),
        )


def bundled_orders_path() -> Path:
    return Path(str(resources.files("eccforge.data").joinpath("orders.csv")))


def read_orders(path: Optional[Union[str, Path]] = None) -> tuple[list[OrderRecord], int]:
    """Parse the CSV; returns (records, number of malformed rows skipped)."""
    path = Path(path) if path is not None else bundled_orders_path()
    records, skipped = [], 0
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in CSV_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"orders file lacks column(s): {', '.join(missing)}")
        for row in reader:
            try:
                records.append(OrderRecord(
                    invoice_no=row["InvoiceNo"],
                    stock_code=row["StockCode"],
                    description=row["Description"],
                    quantity=int(row["Quantity"]),
                    invoice_date=row["InvoiceDate"],
                    unit_price=Decimal(row["UnitPrice"]),
                    customer_id=row["CustomerID"],
                    country=row["Country"],
                ))
            except (ValueError, TypeError, InvalidOperation):
                skipped += 1
    return records, skipped
