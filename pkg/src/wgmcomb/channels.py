"""Fixed DWDM / CWDM channel tables for wavelength bookkeeping.

The table ships as a versioned JSON data file: DWDM centers on the
100 GHz ITU C-band grid (0.8 nm spacing near 1550 nm, 0.57 nm measured
FWHM, channels 21..60 spanning 1529.55-1560.61 nm) and CWDM centers on
the 20 nm grid (22 nm FWHM, 1270-1610 nm).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .errors import FileFormatError


@dataclass(frozen=True)
class Channel:
    index: int
    center_nm: float
    fwhm_nm: float
    extrapolated: bool = False


class ChannelTable:
    """Lookup of multiplexer channel centers and widths by index.

    DWDM channels are keyed by their ITU index; CWDM channels by their
    nominal center wavelength in nm.
    """

    def __init__(self, dwdm: dict, cwdm: dict):
        self._dwdm = dwdm
        self._cwdm = cwdm
        for table in (dwdm, cwdm):
            centers = [table[k].center_nm for k in sorted(table)]
            if any(b <= a for a, b in zip(centers, centers[1:])) and any(
                b >= a for a, b in zip(centers, centers[1:])
            ):
                raise FileFormatError("channel centers must be strictly monotone in index")

    @classmethod
    def from_file(cls, path) -> "ChannelTable":
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        try:
            dwdm = {
                int(ch["index"]): Channel(
                    index=int(ch["index"]), center_nm=float(ch["center_nm"]),
                    fwhm_nm=float(raw["dwdm"]["fwhm_nm"]),
                    extrapolated=bool(ch.get("extrapolated", False)),
                )
                for ch in raw["dwdm"]["channels"]
            }
            cwdm = {
                int(ch["index"]): Channel(
                    index=int(ch["index"]), center_nm=float(ch["center_nm"]),
                    fwhm_nm=float(raw["cwdm"]["fwhm_nm"]),
                )
                for ch in raw["cwdm"]["channels"]
            }
        except (KeyError, TypeError) as exc:
            raise FileFormatError(f"{path}: malformed channel table ({exc})") from exc
        return cls(dwdm, cwdm)

    @classmethod
    def default(cls) -> "ChannelTable":
        with resources.as_file(resources.files("wgmcomb.data") / "wdm_channels.json") as p:
            return cls.from_file(p)

    def lookup(self, kind: str, index: int) -> tuple[float, float]:
        """(center_nm, fwhm_nm) of a channel; raises KeyError on unknown index."""
        kind = kind.upper()
        if kind == "DWDM":
            table = self._dwdm
        elif kind == "CWDM":
            table = self._cwdm
        else:
            raise KeyError(f"unknown multiplexer kind {kind!r} (DWDM or CWDM)")
        if index not in table:
            raise KeyError(f"{kind} channel {index} not in table "
                           f"(valid: {min(table)}..{max(table)})")
        ch = table[index]
        return ch.center_nm, ch.fwhm_nm

    def channel(self, kind: str, index: int) -> Channel:
        self.lookup(kind, index)  # validates
        return (self._dwdm if kind.upper() == "DWDM" else self._cwdm)[index]

    def dwdm_indices(self):
        return sorted(self._dwdm)

    def cwdm_indices(self):
        return sorted(self._cwdm)
