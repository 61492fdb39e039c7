#!/usr/bin/env python3
"""Convert per-debate tab-separated transcripts into the corpus JSON Lines.

Each input file holds one debate; the debate id is the file name stem unless
--ids is given. Rows are sentences in transcript order.

Columns are located by header name (case-insensitive, punctuation ignored):
speaker, text/sentence, and one column per source using either the short
code (CT, ABC, CNN, WP, NPR, PF, TG, NYT, FC) or the organization name
("Chicago Tribune", "PolitiFact", ...). Any other columns (line numbers,
totals) are ignored. A file without a recognizable header is read with the
fixed layout

    index  speaker  total  CT ABC CNN WP NPR PF TG NYT FC  text

Label cells other than 0/1 are an error. Empty-text rows are dropped with a
warning, since the loader rejects them.

Usage:
    convert_claimrank.py OUT.jsonl DEBATE.tsv [DEBATE.tsv ...] [--ids a,b,c]
"""

import argparse
import csv
import json
import re
import sys
from pathlib import Path

SOURCES = ["CT", "ABC", "CNN", "WP", "NPR", "PF", "TG", "NYT", "FC"]

ALIASES = {
    "ct": "CT", "chicagotribune": "CT", "tribune": "CT",
    "abc": "ABC", "abcnews": "ABC",
    "cnn": "CNN",
    "wp": "WP", "washingtonpost": "WP", "wapo": "WP",
    "npr": "NPR",
    "pf": "PF", "politifact": "PF",
    "tg": "TG", "guardian": "TG", "theguardian": "TG",
    "nyt": "NYT", "newyorktimes": "NYT", "thenewyorktimes": "NYT",
    "fc": "FC", "factcheck": "FC", "factcheckorg": "FC",
    "speaker": "speaker",
    "text": "text", "sentence": "text", "utterance": "text",
}

FIXED_LAYOUT = ["index", "speaker", "total"] + SOURCES + ["text"]


def norm(name):
    return re.sub(r"[^a-z]", "", name.lower())


def header_map(row):
    found = {}
    for i, cell in enumerate(row):
        key = ALIASES.get(norm(cell))
        if key and key not in found:
            found[key] = i
    needed = {"speaker", "text", *SOURCES}
    return found if needed <= found.keys() else None


def convert_file(path, debate_id):
    with open(path, newline="", encoding="utf-8") as f:
        rows = [r for r in csv.reader(f, delimiter="\t") if any(c.strip() for c in r)]
    if not rows:
        raise ValueError(f"{path}: empty file")
    cols = header_map(rows[0])
    if cols is None:
        cols = {name: i for i, name in enumerate(FIXED_LAYOUT)}
    else:
        rows = rows[1:]

    width = max(cols.values()) + 1
    text_col = cols["text"]
    out = []
    for lineno, row in enumerate(rows, start=1):
        if len(row) < width:
            raise ValueError(f"{path}: row {lineno} has {len(row)} fields, need {width}")
        # A trailing text column may itself contain tabs.
        text = "\t".join(row[text_col:]) if text_col == width - 1 else row[text_col]
        text = text.strip()
        if not text:
            print(f"warning: {path}: row {lineno} has empty text, dropped", file=sys.stderr)
            continue
        labels = {}
        for src in SOURCES:
            cell = row[cols[src]].strip()
            if cell not in ("0", "1"):
                raise ValueError(f"{path}: row {lineno}: label {src} is {cell!r}")
            labels[src] = int(cell)
        out.append({
            "debate_id": debate_id,
            "index": len(out),
            "speaker": row[cols["speaker"]].strip(),
            "text": text,
            "labels": labels,
        })
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("output")
    ap.add_argument("inputs", nargs="+")
    ap.add_argument("--ids", help="comma-separated debate ids, one per input")
    args = ap.parse_args(argv)

    ids = args.ids.split(",") if args.ids else [Path(p).stem for p in args.inputs]
    if len(ids) != len(args.inputs):
        ap.error("--ids must name one id per input file")
    if len(set(ids)) != len(ids):
        ap.error("debate ids must be unique")

    try:
        records = [r for path, d in zip(args.inputs, ids) for r in convert_file(path, d)]
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    with open(args.output, "w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")
    print(f"wrote {len(records)} sentences from {len(ids)} debates to {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
