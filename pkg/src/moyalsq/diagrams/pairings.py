"""Perfect matchings of the eight factors of the operator fourth moment.

The moment is ``E[z_mk z_k m' z_m'k' z_k'm z_n l' z_l'n' z_n'l z_ln]`` (primes
written ``mb, kb, nb, lb`` below), with factors labelled 1..8 in that order.
"""

from __future__ import annotations

import re
from collections.abc import Iterable

Pairing = tuple[tuple[int, int], ...]

FACTORS: tuple[tuple[str, str], ...] = (
    ("m", "k"),
    ("k", "mb"),
    ("mb", "kb"),
    ("kb", "m"),
    ("n", "lb"),
    ("lb", "nb"),
    ("nb", "l"),
    ("l", "n"),
)
INDEX_ORDER: tuple[str, ...] = ("m", "k", "mb", "kb", "n", "lb", "nb", "l")
ALPHA_EDGES: tuple[tuple[str, str], ...] = (("k", "l"), ("kb", "lb"))
BETA_EDGES: tuple[tuple[str, str], ...] = (("m", "n"), ("mb", "nb"))


def _matchings(labels: tuple[int, ...]) -> Iterable[Pairing]:
    if not labels:
        yield ()
        return
    first, rest = labels[0], labels[1:]
    for i, partner in enumerate(rest):
        remaining = rest[:i] + rest[i + 1 :]
        for tail in _matchings(remaining):
            yield ((first, partner),) + tail


def enumerate_pairings(n: int = 8) -> list[Pairing]:
    """All perfect matchings of ``1..n`` in lexicographic order; ``(n-1)!!`` of them."""
    if n % 2:
        raise ValueError("need an even number of factors")
    return list(_matchings(tuple(range(1, n + 1))))


def format_pairing(p: Pairing) -> str:
    return "".join(f"({a}{b})" for a, b in p)


def parse_pairing(text: str) -> Pairing:
    pairs = re.findall(r"\((\d)\s*,?\s*(\d)\)", text)
    if len(pairs) != 4:
        raise ValueError(f"not a pairing of 8 factors: {text!r}")
    out = tuple(sorted((min(int(a), int(b)), max(int(a), int(b))) for a, b in pairs))
    if sorted(x for pr in out for x in pr) != list(range(1, 9)):
        raise ValueError(f"labels must use 1..8 once each: {text!r}")
    return out
