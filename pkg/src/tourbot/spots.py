"""Attraction catalog: theme-tagged, geo-located sightseeing spots.

Catalog rows come from a CSV file; genres bucket into the three themes
(History, Nature, Others) via a data-file mapping, and proximity
queries use great-circle distance.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass

EARTH_RADIUS_KM = 6371.0088


class Theme(enum.Enum):
    HISTORY = "History"
    NATURE = "Nature"
    OTHERS = "Others"


class CatalogError(Exception):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class InsufficientSpotsError(Exception):
    def __init__(self, theme: Theme, available: int, needed: int):
        self.theme = theme
        self.available = available
        super().__init__(
            f"need {needed} unvisited {theme.value} spots, only {available} available"
        )


@dataclass(frozen=True)
class Spot:
    id: str
    name: str
    genre: str
    theme: Theme
    lat: float
    lon: float
    popularity: int
    description: str


CATALOG_HEADER = ["id", "name", "genre", "lat", "lon", "popularity", "description"]


class SpotCatalog:
    def __init__(self, spots: list[Spot]):
        self.spots = list(spots)
        self.by_id = {s.id: s for s in self.spots}
        if len(self.by_id) != len(self.spots):
            raise CatalogError("duplicate spot ids")

    def __len__(self) -> int:
        return len(self.spots)

    def __iter__(self):
        return iter(self.spots)

    def get(self, spot_id: str) -> Spot | None:
        return self.by_id.get(spot_id)

    def with_theme(self, theme: Theme) -> list[Spot]:
        return [s for s in self.spots if s.theme is theme]


def load_genre_map(path) -> dict[str, Theme]:
    mapping: dict[str, Theme] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            cells = line.split("\t")
            if len(cells) != 2:
                raise CatalogError("genre map rows are genre<TAB>theme", lineno)
            genre, theme_name = cells[0].strip().lower(), cells[1].strip()
            try:
                mapping[genre] = Theme(theme_name)
            except ValueError:
                raise CatalogError(f"unknown theme {theme_name!r}", lineno) from None
    return mapping


def load_spots(path, genre_map: dict[str, Theme]) -> SpotCatalog:
    """Load the catalog CSV; unmapped genres fall to the Others theme."""
    spots: list[Spot] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CatalogError("catalog file is empty") from None
        if [h.strip() for h in header] != CATALOG_HEADER:
            raise CatalogError(f"expected header {','.join(CATALOG_HEADER)}", 1)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(CATALOG_HEADER):
                raise CatalogError(f"expected {len(CATALOG_HEADER)} columns", lineno)
            spot_id, name, genre, lat_s, lon_s, pop_s, description = (c.strip() for c in row)
            if not spot_id:
                raise CatalogError("empty spot id", lineno)
            if spot_id in seen:
                raise CatalogError(f"duplicate spot id {spot_id!r}", lineno)
            try:
                lat, lon = float(lat_s), float(lon_s)
            except ValueError:
                raise CatalogError("coordinates must be decimal degrees", lineno) from None
            if not -90.0 <= lat <= 90.0:
                raise CatalogError(f"latitude {lat} out of range", lineno)
            if not -180.0 <= lon <= 180.0:
                raise CatalogError(f"longitude {lon} out of range", lineno)
            if pop_s:
                try:
                    popularity = int(pop_s)
                except ValueError:
                    raise CatalogError("popularity must be an integer", lineno) from None
                if popularity < 0:
                    raise CatalogError("popularity must be >= 0", lineno)
            else:
                popularity = 0
            theme = genre_map.get(genre.lower(), Theme.OTHERS)
            seen.add(spot_id)
            spots.append(Spot(spot_id, name, genre, theme, lat, lon, popularity, description))
    return SpotCatalog(spots)


def haversine_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance in kilometers."""
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = math.radians(lat2 - lat1)
    dl = math.radians(lon2 - lon1)
    a = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.asin(math.sqrt(a))


def spot_distance_km(a: Spot, b: Spot) -> float:
    return haversine_km(a.lat, a.lon, b.lat, b.lon)


def select_introduction_spots(
    catalog: SpotCatalog,
    theme: Theme,
    visited: set[str],
    desired: str | None = None,
    k: int = 3,
) -> list[Spot]:
    """Pick ``k`` spots of the theme for introduction.

    The desired spot seeds the selection when it is eligible; otherwise
    the most popular eligible spot does.  The rest are the seed's
    nearest eligible neighbors, ordered by ascending distance with id
    ties ascending.
    """
    eligible = [s for s in catalog.with_theme(theme) if s.id not in visited]
    if len(eligible) < k:
        raise InsufficientSpotsError(theme, len(eligible), k)

    desired_spot = catalog.get(desired) if desired else None
    if desired_spot is not None and (
        desired_spot.theme is not theme or desired_spot.id in visited
    ):
        desired_spot = None
    if desired_spot is not None:
        seed = desired_spot
    else:
        seed = min(eligible, key=lambda s: (-s.popularity, s.id))

    rest = [s for s in eligible if s.id != seed.id]
    rest.sort(key=lambda s: (spot_distance_km(seed, s), s.id))
    return [seed] + rest[: k - 1]
