#!/usr/bin/env python3
"""Download public series for full-size runs (not used by the test suite).

The test and acceptance suites run entirely on the seeded synthetic
stand-ins in shrink.datasets; this helper exists for anyone who wants to
reproduce results on the public archives the stand-ins imitate.

UCR archive access requires accepting the maintainers' terms, so this
script only fetches sources with direct public URLs and prints
instructions for the rest.
"""

import argparse
import urllib.request
from pathlib import Path

SOURCES = {
    # UCI household power consumption (semicolon-separated, column 2 = kW)
    "household_power": (
        "https://archive.ics.uci.edu/static/public/235/"
        "individual+household+electric+power+consumption.zip"
    ),
}

UCR_NOTE = """\
UCR time-series archive (FaceFour, MoteStrain, Lightning, Cricket, Wafer):
download from https://www.cs.ucr.edu/~eamonn/time_series_data_2018/
(password published on that page), unzip, and point the CLI at a class
file with --format ucr-tsv --column <row>.
"""


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="data")
    parser.add_argument("names", nargs="*", default=list(SOURCES))
    args = parser.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name in args.names:
        if name not in SOURCES:
            print(f"unknown source {name!r}; known: {', '.join(SOURCES)}")
            continue
        url = SOURCES[name]
        dest = out / Path(url).name.replace("+", "_")
        if dest.exists():
            print(f"{dest} already present")
            continue
        print(f"fetching {url}")
        urllib.request.urlretrieve(url, dest)
        print(f"  -> {dest}")
    print()
    print(UCR_NOTE)


if __name__ == "__main__":
    main()
