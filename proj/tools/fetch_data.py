#!/usr/bin/env python3
"""Fetch and flatten the raw Adult and COMPAS tables into header CSVs.

The UCI Adult files and the ProPublica COMPAS two-year table ship inside the
`responsibly` wheel on PyPI, which is the only source this script needs. The
Give Me Some Credit table (Kaggle, `cs-training.csv`) cannot be redistributed;
download it manually and place it at data/raw/gmc.csv.

Usage: tools/fetch_data.py [--out data/raw] [--wheel path/to/responsibly.whl]
"""
import argparse
import csv
import datetime
import glob
import io
import os
import subprocess
import sys
import tempfile
import zipfile

WHEEL = "responsibly==0.1.2"

ADULT_COLUMNS = [
    "age", "workclass", "fnlwgt", "education", "education-num",
    "marital-status", "occupation", "relationship", "race", "sex",
    "capital-gain", "capital-loss", "hours-per-week", "native-country",
    "income",
]


def locate_wheel(explicit):
    if explicit:
        return explicit
    tmp = tempfile.mkdtemp(prefix="recourse-fetch-")
    subprocess.check_call([sys.executable, "-m", "pip", "download", "--no-deps",
                           "-q", WHEEL, "-d", tmp])
    found = glob.glob(os.path.join(tmp, "responsibly-*.whl"))
    if not found:
        sys.exit("responsibly wheel not found after download")
    return found[0]


def write_adult(zf, out_dir):
    rows = []
    for member in ("adult.data", "adult.test"):
        text = zf.read("responsibly/dataset/adult/" + member).decode("utf-8")
        for line in text.splitlines():
            if not line.strip() or line.startswith("|"):
                continue
            cells = [c.strip() for c in line.split(",")]
            if len(cells) != len(ADULT_COLUMNS):
                continue
            cells = ["" if c == "?" else c for c in cells]
            cells[-1] = cells[-1].rstrip(".")
            rows.append(cells)
    path = os.path.join(out_dir, "adult.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ADULT_COLUMNS)
        w.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def write_compas(zf, out_dir):
    text = zf.read(
        "responsibly/dataset/compas/compas-scores-two-years.csv").decode("utf-8")
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    index = {}
    for i, name in enumerate(header):
        index.setdefault(name, i)  # duplicate columns: keep the first
    keep = ["age", "two_year_recid", "priors_count", "length_of_stay",
            "c_charge_degree", "race", "sex", "juv_fel_count", "score_text"]
    fmt = "%Y-%m-%d %H:%M:%S"
    rows = []
    for cells in reader:
        rec = {k: cells[index[k]] for k in keep if k in index}
        jail_in, jail_out = cells[index["c_jail_in"]], cells[index["c_jail_out"]]
        if jail_in and jail_out:
            delta = (datetime.datetime.strptime(jail_out, fmt) -
                     datetime.datetime.strptime(jail_in, fmt))
            rec["length_of_stay"] = str(max(delta.days, 0))
        else:
            rec["length_of_stay"] = ""
        rows.append([rec[k] for k in keep])
    path = os.path.join(out_dir, "compas.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(keep)
        w.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    ap.add_argument("--out", default=os.path.join(root, "data", "raw"))
    ap.add_argument("--wheel", default=None)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    with zipfile.ZipFile(locate_wheel(args.wheel)) as zf:
        write_adult(zf, args.out)
        write_compas(zf, args.out)
    gmc = os.path.join(args.out, "gmc.csv")
    if not os.path.exists(gmc):
        print(f"note: {gmc} missing; GMC must be fetched from Kaggle by hand")


if __name__ == "__main__":
    main()
