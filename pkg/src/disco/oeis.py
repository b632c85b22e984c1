"""OEIS integration: look up and extend integer sequences.

All network access flows through one injectable fetch function, so tests
run fully offline against recorded fixtures. Failures degrade to
left(unit) / the unchanged prefix, plus a session warning.
"""

from __future__ import annotations

import json
import urllib.parse
import urllib.request
from fractions import Fraction
from typing import Callable, Optional

from .errors import NetworkError
from .infer import TypeScheme
from .types import CHAR, N, TArrow, TList, TSum, UNIT
from .values import UNIT as UNIT_V
from .values import BuiltinV, CollV, InjV, make_list

SEARCH_URL = "https://oeis.org/search?q={terms}&fmt=json"
TIMEOUT_SECONDS = 5.0


def _default_fetch(url: str):
    try:
        with urllib.request.urlopen(url, timeout=TIMEOUT_SECONDS) as resp:
            return json.load(resp)
    except Exception as e:  # timeouts, DNS, HTTP errors, bad JSON
        raise NetworkError(f"could not reach the OEIS: {e}.") from e


class OeisClient:
    def __init__(self, fetch: Optional[Callable] = None, offline: bool = False):
        self.fetch = fetch or _default_fetch
        self.offline = offline

    def search(self, prefix: list[int]) -> list[dict]:
        if self.offline:
            raise NetworkError("network access is disabled (--offline).")
        terms = ",".join(str(n) for n in prefix)
        url = SEARCH_URL.format(terms=urllib.parse.quote(terms, safe=","))
        payload = self.fetch(url)
        if isinstance(payload, dict):
            results = payload.get("results") or []
        elif isinstance(payload, list):
            results = payload
        else:
            results = []
        return [r for r in results if isinstance(r, dict)]

    def lookup(self, prefix: list[int]) -> Optional[str]:
        """URL of the first search hit, or None."""
        for r in self.search(prefix):
            number = r.get("number")
            if isinstance(number, int):
                return f"https://oeis.org/A{number:06d}"
        return None

    def extend(self, prefix: list[int]) -> Optional[list[int]]:
        """Stored terms of the first hit that literally begins with the
        prefix; None when no hit qualifies."""
        for r in self.search(prefix):
            data = r.get("data")
            if not isinstance(data, str):
                continue
            try:
                terms = [int(x) for x in data.split(",") if x.strip()]
            except ValueError:
                continue
            if len(terms) >= len(prefix) and terms[: len(prefix)] == prefix and all(t >= 0 for t in terms):
                return terms
        return None


OEIS_SCHEMES: dict[str, TypeScheme] = {
    "lookupSequence": TypeScheme([], [], TArrow(TList(N), TSum(UNIT, TList(CHAR)))),
    "extendSequence": TypeScheme([], [], TArrow(TList(N), TList(N))),
}


def _prefix_ints(v: CollV) -> list[int]:
    return [int(x) for x in v.expanded()]


def oeis_builtins(client: OeisClient) -> dict[str, BuiltinV]:
    def lookup_impl(interp, v):
        try:
            url = client.lookup(_prefix_ints(v))
        except NetworkError as e:
            if interp.services.warn:
                interp.services.warn(e)
            return InjV("left", UNIT_V)
        if url is None:
            return InjV("left", UNIT_V)
        return InjV("right", make_list(list(url)))

    def extend_impl(interp, v):
        try:
            terms = client.extend(_prefix_ints(v))
        except NetworkError as e:
            if interp.services.warn:
                interp.services.warn(e)
            return v
        if terms is None:
            return v
        return make_list([Fraction(t) for t in terms])

    return {
        "lookupSequence": BuiltinV("lookupSequence", lookup_impl),
        "extendSequence": BuiltinV("extendSequence", extend_impl),
    }


OEIS_DOCS = {
    "lookupSequence": ("The URL of the first OEIS entry matching a sequence prefix.", "oeis"),
    "extendSequence": ("Extend a sequence prefix using the first matching OEIS entry.", "oeis"),
}
