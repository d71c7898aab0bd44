"""Reference grouping of the 105 contractions into 34 weighted-graph classes.

Listed by hand from the drawn graphs; used to cross-check the computed classes.
"""

from __future__ import annotations

from .pairings import Pairing, parse_pairing

_GROUPS = """
(12)(34)(56)(78)
(12)(34)(57)(68) (13)(24)(56)(78)
(12)(34)(58)(67)
(12)(35)(46)(78) (17)(28)(34)(56)
(12)(35)(47)(68) (12)(36)(48)(57) (12)(37)(45)(68) (12)(38)(46)(57) (13)(25)(46)(78) (13)(26)(45)(78) (13)(27)(48)(56) (13)(28)(47)(56) (15)(24)(36)(78) (15)(27)(34)(68) (16)(24)(35)(78) (16)(28)(34)(57) (17)(24)(38)(56) (17)(25)(34)(68) (18)(24)(37)(56) (18)(26)(34)(57)
(12)(35)(48)(67) (12)(37)(46)(58) (14)(26)(35)(78) (14)(28)(37)(56) (15)(23)(46)(78) (15)(28)(34)(67) (17)(23)(48)(56) (17)(26)(34)(58)
(12)(36)(45)(78) (18)(27)(34)(56)
(12)(36)(47)(58) (12)(38)(45)(67) (14)(25)(36)(78) (14)(27)(38)(56) (16)(23)(45)(78) (16)(27)(34)(58) (18)(23)(47)(56) (18)(25)(34)(67)
(12)(37)(48)(56) (15)(26)(34)(78)
(12)(38)(47)(56) (16)(25)(34)(78)
(13)(24)(57)(68)
(13)(24)(58)(67) (14)(23)(57)(68)
(13)(25)(47)(68)
(13)(25)(48)(67) (13)(26)(47)(58) (13)(27)(46)(58) (13)(28)(45)(67) (14)(25)(37)(68) (14)(26)(38)(57) (14)(27)(35)(68) (14)(28)(36)(57) (15)(23)(47)(68) (15)(24)(38)(67) (16)(23)(48)(57) (16)(24)(37)(58) (17)(23)(45)(68) (17)(24)(36)(58) (18)(23)(46)(57) (18)(24)(35)(67)
(13)(26)(48)(57) (15)(24)(37)(68)
(13)(27)(45)(68) (18)(24)(36)(57)
(13)(28)(46)(57) (17)(24)(35)(68)
(14)(23)(56)(78)
(14)(23)(58)(67)
(14)(25)(38)(67) (16)(23)(47)(58)
(14)(26)(37)(58) (15)(23)(48)(67)
(14)(27)(36)(58) (18)(23)(45)(67)
(14)(28)(35)(67) (17)(23)(46)(58)
(15)(26)(37)(48) (17)(28)(35)(46)
(15)(26)(38)(47) (16)(25)(37)(48)
(15)(27)(36)(48) (18)(26)(37)(45)
(15)(27)(38)(46) (15)(28)(36)(47) (16)(27)(35)(48) (16)(28)(37)(45) (17)(25)(36)(48) (17)(26)(38)(45) (18)(25)(37)(46) (18)(26)(35)(47)
(15)(28)(37)(46) (17)(26)(35)(48)
(16)(24)(38)(57)
(16)(25)(38)(47)
(16)(27)(38)(45) (18)(25)(36)(47)
(16)(28)(35)(47) (17)(25)(38)(46)
(17)(28)(36)(45) (18)(27)(35)(46)
(18)(27)(36)(45)
"""


def _parse() -> tuple[tuple[Pairing, ...], ...]:
    groups = []
    for line in _GROUPS.strip().splitlines():
        items = line.replace(") (", ")|(").split("|")
        groups.append(tuple(parse_pairing(it) for it in items))
    return tuple(groups)


REFERENCE_GROUPS: tuple[tuple[Pairing, ...], ...] = _parse()
