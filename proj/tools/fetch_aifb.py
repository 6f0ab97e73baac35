#!/usr/bin/env python3
"""Fetch the AIFB benchmark and convert it into kgwalk's input formats.

Downloads the dataset archive, converts the RDF dump to line-based N-Triples,
and rewrites the provided train/test files into a single split TSV:

    data/aifb/aifb.nt               line-based N-Triples graph
    data/aifb/split.tsv             entity TAB class TAB {train|test}
    data/aifb/leak_predicates.txt   predicates that leak the target

Requires network access and rdflib (pip install rdflib).
"""

import argparse
import csv
import io
import sys
import urllib.request
import zipfile
from pathlib import Path

ARCHIVE_URLS = [
    "https://data.dgl.ai/dataset/rdf/aifb-hetero.zip",
]

LEAK_PREDICATES = [
    "http://swrc.ontoware.org/ontology#employs",
    "http://swrc.ontoware.org/ontology#affiliation",
]


def download(urls):
    last_error = None
    for url in urls:
        try:
            print(f"downloading {url} ...")
            with urllib.request.urlopen(url, timeout=120) as response:
                return response.read()
        except Exception as error:  # noqa: BLE001 - try the next mirror
            last_error = error
            print(f"  failed: {error}")
    raise SystemExit(f"could not download the dataset: {last_error}")


def convert_graph(raw: bytes, name: str, out_path: Path) -> None:
    try:
        import rdflib
    except ImportError:
        raise SystemExit("rdflib is required: pip install rdflib")
    graph = rdflib.Graph()
    fmt = rdflib.util.guess_format(name) or "n3"
    graph.parse(io.BytesIO(raw), format=fmt)
    graph.serialize(destination=str(out_path), format="nt", encoding="utf-8")
    print(f"wrote {out_path} ({len(graph)} triples)")


def parse_split_file(raw: bytes):
    """Yields (entity, label) from the benchmark's train/test TSVs."""
    text = raw.decode("utf-8-sig")
    rows = list(csv.reader(io.StringIO(text), delimiter="\t"))
    header = rows[0]
    entity_col = None
    label_col = None
    for i, column in enumerate(header):
        low = column.strip().lower()
        if low.startswith("label_"):
            label_col = i
        elif low in ("person", "bond", "proxy", "rock", "instance", "entity"):
            entity_col = i
    if entity_col is None or label_col is None:
        # fall back: entity = first column whose values look like IRIs
        for i in range(len(header)):
            if all(r[i].startswith("http") for r in rows[1:] if len(r) > i):
                entity_col = i
                break
        label_col = next(i for i in range(len(header)) if i != entity_col)
    for row in rows[1:]:
        if len(row) > max(entity_col, label_col) and row[entity_col]:
            yield row[entity_col].strip(), row[label_col].strip()


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="data/aifb", type=Path)
    parser.add_argument("--archive", type=Path, help="use a local copy of the zip instead")
    args = parser.parse_args()

    raw = args.archive.read_bytes() if args.archive else download(ARCHIVE_URLS)
    archive = zipfile.ZipFile(io.BytesIO(raw))
    names = archive.namelist()

    def find(substring):
        for name in names:
            if substring in Path(name).name.lower():
                return name
        raise SystemExit(f"archive member matching '{substring}' not found in {names}")

    args.out_dir.mkdir(parents=True, exist_ok=True)

    graph_member = find("complete.n")
    convert_graph(archive.read(graph_member), graph_member, args.out_dir / "aifb.nt")

    lines = []
    for member, tag in [(find("trainingset"), "train"), (find("testset"), "test")]:
        for entity, label in parse_split_file(archive.read(member)):
            lines.append(f"{entity}\t{label}\t{tag}\n")
    (args.out_dir / "split.tsv").write_text("".join(lines), encoding="utf-8")
    print(f"wrote {args.out_dir / 'split.tsv'} ({len(lines)} entities)")

    (args.out_dir / "leak_predicates.txt").write_text(
        "".join(p + "\n" for p in LEAK_PREDICATES), encoding="utf-8"
    )
    print(f"wrote {args.out_dir / 'leak_predicates.txt'}")
    print("done; run: ctest --test-dir build -R acceptance_8")


if __name__ == "__main__":
    main()
