#!/usr/bin/env python3
# Regenerates the frozen test fixtures. The outputs are checked in; rerunning
# this script must reproduce them byte for byte.
#
#   golden.emb           embedding file written straight from the documented
#                        byte layout (independent of the C++ writer)
#   run_all/reviews.jsonl synthetic review corpus for the end-to-end run
#   run_all/enc.emb      synthetic 16-d embeddings for run_all/reviews.jsonl
import json
import os
import random
import struct

HERE = os.path.dirname(os.path.abspath(__file__))


def write_embeddings(path, records, dim, pooling, producer):
    out = bytearray()
    out += b"HRANKEMB"
    out += struct.pack("<BBHIQ", 1, pooling, 0, dim, len(records))
    meta = producer.encode("utf-8")
    out += struct.pack("<I", len(meta)) + meta
    for rid, vec in records:
        b = rid.encode("utf-8")
        out += struct.pack("<I", len(b)) + b
        out += struct.pack("<%df" % dim, *vec)
    with open(path, "wb") as f:
        f.write(out)


def golden():
    records = [
        ("r-001", [0.5, -1.25, 3.0, 0.001]),
        ("r-002", [0.0, 2.5, -0.75, 1e-7]),
        ("café-3", [-3.5, 0.125, 100.0, -2.0]),
    ]
    write_embeddings(os.path.join(HERE, "golden.emb"), records, 4, 1,
                     "golden-fixture v1")


POS = ["good", "great", "love", "excellent", "perfect", "nice", "recommend", "works"]
NEG = ["bad", "poor", "broke", "terrible", "awful", "useless", "waste", "returned"]
FILLER = ["the", "a", "phone", "case", "screen", "battery", "charger", "it", "i",
          "because", "think", "price", "worth", "after", "week", "some", "look",
          "feel", "sound", "really", "quite", "with", "and", "for", "this", "was"]


def run_all():
    rng = random.Random(20240611)
    lines = []
    emb = []
    review_no = 0
    for p in range(40):
        asin = "B%04d" % p
        quality = rng.random()
        for _ in range(rng.randint(6, 14)):
            review_no += 1
            stars = min(5, max(1, round(1 + 4 * quality + rng.gauss(0, 0.8))))
            length = rng.randint(5, 60)
            words = []
            for _ in range(length):
                u = rng.random()
                if u < 0.12:
                    words.append(rng.choice(POS if stars >= 3 else NEG))
                else:
                    words.append(rng.choice(FILLER))
            text = " ".join(words).capitalize() + "."
            total = rng.randint(11, 60)
            # Longer and more extreme reviews are voted more helpful.
            base = 0.25 + 0.5 * min(length, 50) / 50 + 0.1 * abs(stars - 3) / 2
            ratio = min(1.0, max(0.0, base + rng.gauss(0, 0.12)))
            helpful = round(ratio * total)
            rid = "rev%05d" % review_no
            lines.append({"review_id": rid, "reviewText": text, "overall": float(stars),
                          "asin": asin, "helpful": [helpful, total]})
            y = helpful / total
            vec = [y * 1.5 + rng.gauss(0, 0.3), (length / 60) + rng.gauss(0, 0.2)]
            vec += [rng.gauss(0, 1) for _ in range(14)]
            emb.append((rid, vec))
        # A few records the filters drop.
        review_no += 1
        lines.append({"review_id": "rev%05d" % review_no, "reviewText": "meh",
                      "overall": 3.0, "asin": asin, "helpful": [1, 4]})
    review_no += 1
    lines.append({"review_id": "rev%05d" % review_no, "reviewText": "?!? 42",
                  "overall": 2.0, "asin": "B0000", "helpful": [6, 12]})
    os.makedirs(os.path.join(HERE, "run_all"), exist_ok=True)
    with open(os.path.join(HERE, "run_all", "reviews.jsonl"), "w") as f:
        for line in lines:
            f.write(json.dumps(line, sort_keys=True) + "\n")
    write_embeddings(os.path.join(HERE, "run_all", "enc.emb"), emb, 16, 0,
                     "synthetic-encoder")


if __name__ == "__main__":
    golden()
    run_all()
