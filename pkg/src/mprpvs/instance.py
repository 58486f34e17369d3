"""Problem data for maximum-profit routing with variable supply.

Sites produce a good at a constant rate inside their time window, so the
quantity waiting at site ``i`` at time ``t`` is ``rho_i * (t - e_i)`` for
``t`` in ``[e_i, l_i]`` and zero elsewhere. Vehicles travel at unit speed and
pay one unit of cost per unit of distance.

Instances are plain frozen dataclasses and round-trip through a small JSON
format (see :func:`instance_to_dict`).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

TOL = 1e-9

Point = tuple[float, float]


class InstanceParseError(ValueError):
    """Raised when an instance file cannot be decoded.

    The message names the file and the byte offset of the failure.
    """


@dataclass(frozen=True)
class Site:
    id: int
    x: float
    y: float
    rho: float
    e: int
    l: int

    def __post_init__(self) -> None:
        if self.rho < 0:
            raise ValueError(f"site {self.id}: negative production rate {self.rho}")
        if int(self.e) != self.e or int(self.l) != self.l:
            raise ValueError(f"site {self.id}: window endpoints must be integers")
        if not self.e < self.l:
            raise ValueError(f"site {self.id}: empty window [{self.e}, {self.l}]")

    @property
    def point(self) -> Point:
        return (self.x, self.y)

    @property
    def q_max(self) -> float:
        return self.rho * (self.l - self.e)


@dataclass(frozen=True)
class Instance:
    sites: tuple[Site, ...]
    depot: Point
    m: int
    Q: int
    T: int
    alpha: float
    # constant supply: q_i(t) = q_max inside the window (fixed-supply variant)
    constant_supply: bool = False
    _by_id: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "sites", tuple(self.sites))
        object.__setattr__(self, "depot", (float(self.depot[0]), float(self.depot[1])))
        if self.m < 1:
            raise ValueError("fleet size m must be positive")
        if self.Q < 1:
            raise ValueError("capacity Q must be positive")
        if self.T < 1:
            raise ValueError("horizon T must be positive")
        if not self.alpha > 1:
            raise ValueError("discrepancy bound alpha must exceed 1")
        object.__setattr__(self, "_by_id", {s.id: s for s in self.sites})

    @property
    def n(self) -> int:
        return len(self.sites)

    def site(self, site_id: int) -> Site:
        try:
            return self._by_id[site_id]
        except KeyError:
            raise KeyError(f"unknown site id {site_id}") from None

    def has_site(self, site_id: int) -> bool:
        return site_id in self._by_id

    @property
    def site_ids(self) -> list[int]:
        return [s.id for s in self.sites]

    def supply(self, site: Site | int, t: float) -> float:
        if isinstance(site, int):
            site = self.site(site)
        return supply_at(site, t, constant=self.constant_supply)

    def replace(self, **changes) -> "Instance":
        data = {
            "sites": self.sites,
            "depot": self.depot,
            "m": self.m,
            "Q": self.Q,
            "T": self.T,
            "alpha": self.alpha,
            "constant_supply": self.constant_supply,
        }
        data.update(changes)
        return Instance(**data)


def supply_at(site: Site, t: float, constant: bool = False) -> float:
    """Quantity available at ``site`` at time ``t``.

    Zero outside ``[e, l]``. Inside the window it grows linearly from zero
    at ``e`` to ``q_max`` at ``l``, or equals ``q_max`` throughout when
    ``constant`` is set.
    """
    if t < 0:
        raise ValueError(f"negative time {t}")
    if t < site.e or t > site.l:
        return 0.0
    if constant:
        return site.q_max
    return site.rho * (t - site.e)


def distance(a: Sequence[float], b: Sequence[float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    sites: tuple[int, ...] = ()
    warning: bool = False


def validate(instance: Instance, mprp_mode: bool = False) -> list[Violation]:
    """Check the standing assumptions on an instance.

    Returns every violated assumption; an empty list means the instance is
    within the regime the approximation analysis covers. A vacuous capacity
    is reported as a warning only.
    """
    out: list[Violation] = []
    seen: dict[int, int] = {}
    for s in instance.sites:
        seen[s.id] = seen.get(s.id, 0) + 1
    dups = tuple(sorted(i for i, c in seen.items() if c > 1))
    if dups:
        out.append(Violation("duplicate_id", f"duplicate site ids {list(dups)}", dups))

    for s in instance.sites:
        if s.e < 0 or s.l > instance.T:
            out.append(
                Violation("window", f"site {s.id}: window [{s.e}, {s.l}] outside [0, {instance.T}]", (s.id,))
            )

    # only the extreme pair can violate q_max(i) <= alpha * q_max(j)
    if instance.sites:
        hi = max(instance.sites, key=lambda s: (s.q_max, -s.id))
        lo = min(instance.sites, key=lambda s: (s.q_max, s.id))
        if hi.q_max > instance.alpha * lo.q_max + TOL:
            out.append(
                Violation(
                    "discrepancy",
                    f"site {hi.id} q_max {hi.q_max:g} exceeds alpha={instance.alpha:g} times "
                    f"site {lo.id} q_max {lo.q_max:g}",
                    (hi.id, lo.id),
                )
            )

    total = sum(s.q_max for s in instance.sites)
    if instance.Q >= total - TOL:
        out.append(
            Violation(
                "capacity_vacuous",
                f"Q={instance.Q} >= total supply {total:g}; capacity never binds",
                warning=True,
            )
        )

    if mprp_mode:
        bad = tuple(s.id for s in instance.sites if abs(s.q_max - round(s.q_max)) > TOL)
        if bad:
            out.append(Violation("integrality", f"non-integral q_max at sites {list(bad)}", bad))
    return out


# ---- JSON ----

def instance_to_dict(instance: Instance) -> dict:
    data = {
        "depot": [instance.depot[0], instance.depot[1]],
        "m": instance.m,
        "Q": instance.Q,
        "T": instance.T,
        "alpha": instance.alpha,
        "sites": [
            {"id": s.id, "x": s.x, "y": s.y, "rho": s.rho, "e": s.e, "l": s.l}
            for s in instance.sites
        ],
    }
    if instance.constant_supply:
        data["supply"] = "constant"
    return data


def instance_from_dict(data: dict) -> Instance:
    supply = data.get("supply", "linear")
    if supply not in ("linear", "constant"):
        raise ValueError(f"unknown supply model {supply!r}")
    sites = tuple(
        Site(
            id=int(s["id"]),
            x=float(s["x"]),
            y=float(s["y"]),
            rho=float(s["rho"]),
            e=int(s["e"]),
            l=int(s["l"]),
        )
        for s in data["sites"]
    )
    return Instance(
        sites=sites,
        depot=(float(data["depot"][0]), float(data["depot"][1])),
        m=int(data["m"]),
        Q=int(data["Q"]),
        T=int(data["T"]),
        alpha=float(data["alpha"]),
        constant_supply=supply == "constant",
    )


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def save_instance(instance: Instance, path: str | Path) -> None:
    Path(path).write_text(dumps(instance_to_dict(instance)), encoding="utf-8")


def parse_instance(text: str, source: str = "<string>") -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise InstanceParseError(f"{source}: byte {offset}: {exc.msg}") from exc
    try:
        return instance_from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceParseError(f"{source}: byte 0: invalid instance: {exc}") from exc


def load_instance(path: str | Path) -> Instance:
    path = Path(path)
    return parse_instance(path.read_text(encoding="utf-8"), str(path))
