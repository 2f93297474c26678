# -*- coding: utf-8 -*-
"""
Shared CLI utilities for the subcommands.
Provides consistent console output, exit codes and the ordered worker pool.
"""

import io
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

# Fix stdout encoding for Windows compatibility
if sys.stdout.encoding is None or sys.stdout.encoding.lower() != "utf-8":
    try:
        sys.stdout = io.TextIOWrapper(sys.stdout.buffer, encoding="utf-8", errors="replace")
    except AttributeError:
        # captured streams (pytest capsys) have no buffer
        pass

# Emoji fallback for terminals that don't support UTF-8
SUPPORTS_EMOJI = bool(sys.stdout.encoding) and "utf" in sys.stdout.encoding.lower()
OK = "✅" if SUPPORTS_EMOJI else "OK"
FAIL = "❌" if SUPPORTS_EMOJI else "FAIL"
ROCKET = "🚀" if SUPPORTS_EMOJI else "[RUN]"
CHART = "📊" if SUPPORTS_EMOJI else "[SUMMARY]"
CHECK = "✓"
CROSS = "✗"

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_CONFIG = 2

T = TypeVar("T")
R = TypeVar("R")


def print_pass(label: str, detail: Optional[str] = None) -> None:
    """Print a PASS message with consistent formatting."""
    if detail:
        print(f"{CHECK} {label} ... {OK} ({detail})")
    else:
        print(f"{CHECK} {label} ... {OK}")


def print_fail(label: str, detail: str) -> None:
    """Print a FAIL message with consistent formatting."""
    print(f"{CROSS} {label} ... {FAIL} ({detail})")


def print_info(label: str, detail: Optional[str] = None) -> None:
    if detail:
        print(f"{ROCKET} {label} ... {detail}")
    else:
        print(f"{ROCKET} {label}")


def print_header(title: str) -> None:
    """Print a section header."""
    print(f"\n{ROCKET} {title}")
    print("=" * 60)


def print_table(title: str, body: str) -> None:
    print(f"\n{CHART} {title}")
    print(body)


def print_summary(succeeded: int, total: int) -> int:
    """Print the run summary and return the matching exit code."""
    print(f"\n{CHART} SUMMARY: {succeeded}/{total} items succeeded")
    if succeeded == total:
        print(f"{OK} ALL ITEMS PROCESSED")
        code = EXIT_OK
    else:
        print(f"{FAIL} SOME ITEMS FAILED")
        code = EXIT_PARTIAL
    sys.stdout.flush()
    return code


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> List[R]:
    """
    Apply fn to every item, results in input order.

    workers > 1 uses a process pool; fn and the items must be picklable.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))
