#!/usr/bin/env python3
"""Convert a MovieLens-100K copy into the ratings CSV and catalog JSONL used by lfg.

Accepts either the original GroupLens directory (u.data / u.item) or the
pytorch-widedeep wheel, which bundles the same data as parquet files.
"""
import argparse
import json
import pathlib
import zipfile

GENRES = ["unknown", "Action", "Adventure", "Animation", "Children's", "Comedy", "Crime",
          "Documentary", "Drama", "Fantasy", "Film-Noir", "Horror", "Musical", "Mystery",
          "Romance", "Sci-Fi", "Thriller", "War", "Western"]


def from_grouplens(src):
    ratings = []
    for line in (src / "u.data").read_text().splitlines():
        u, i, r, t = line.split("\t")
        ratings.append((int(u), int(i), float(r), int(t)))
    items = []
    for line in (src / "u.item").read_text(encoding="latin-1").splitlines():
        f = line.split("|")
        flags = f[5:]
        items.append((int(f[0]), f[1], [g for g, x in zip(GENRES, flags) if x == "1"]))
    return ratings, items


def from_wheel(wheel, tmp):
    import pandas as pd
    with zipfile.ZipFile(wheel) as z:
        names = [n for n in z.namelist() if "MovieLens100k" in n]
        for n in names:
            z.extract(n, tmp)
    base = tmp / "pytorch_widedeep" / "datasets" / "data"
    d = pd.read_parquet(base / "MovieLens100k_data.parquet.brotli")
    it = pd.read_parquet(base / "MovieLens100k_items.parquet.brotli")
    ratings = [(int(a), int(b), float(c), int(t)) for a, b, c, t in
               d[["user_id", "movie_id", "rating", "timestamp"]].itertuples(index=False)]
    items = []
    for _, row in it.iterrows():
        genres = [g for g in GENRES if row.get(g, 0) == 1]
        items.append((int(row["movie_id"]), row["movie_title"], genres))
    return ratings, items


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("source", type=pathlib.Path, help="ml-100k directory or pytorch_widedeep wheel")
    ap.add_argument("--out", type=pathlib.Path, default=pathlib.Path("data/ml-100k"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    if args.source.is_dir():
        ratings, items = from_grouplens(args.source)
    else:
        ratings, items = from_wheel(args.source, args.out / ".extract")
    with open(args.out / "ratings.csv", "w") as f:
        f.write("userId,movieId,rating,timestamp\n")
        for u, i, r, t in ratings:
            f.write(f"{u},{i},{r:g},{t}\n")
    with open(args.out / "catalog.jsonl", "w") as f:
        for i, title, genres in items:
            f.write(json.dumps({"item_id": i, "title": title, "poster_url": "",
                                "plot": ", ".join(genres), "cast": [], "director": ""}) + "\n")
    print(f"{len(ratings)} ratings, {len(items)} items -> {args.out}")


if __name__ == "__main__":
    main()
