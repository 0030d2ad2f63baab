"""Bundled datasets: golden items and the 20-pair desk similarity set."""

from pathlib import Path

_DATA_DIR = Path(__file__).parent

GOLDEN_ITEMS_PATH = _DATA_DIR / "golden_items.jsonl"
DESK_PAIRS_PATH = _DATA_DIR / "desk_pairs.jsonl"
