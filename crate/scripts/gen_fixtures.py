#!/usr/bin/env python3
"""Generate the synthetic monthly-snapshot and field-totals fixtures.

The snapshot fixture holds 24 monthly top-10 lists for each of the 22 ESI
fields. Field strengths are chosen so that, after summing the vectors of ESI
fields that share an NSF field and taking the pooled mean, the ratio to
mathematics rounds to the published H column (1, 3, 5, 6, 9, 10, 12, 37).
The totals fixture holds six NSF-style yearly totals per broad field whose
mean ratio to mathematics rounds to the published T column.

Run from the repository root:  python3 scripts/gen_fixtures.py
"""
import csv
import random
from datetime import date

MAPPING = [
    ("Agriculture", "Biology"),
    ("Biology and biochemistry", "Biomedical research"),
    ("Chemistry", "Chemistry"),
    ("Clinical medicine", "Clinical medicine"),
    ("Computer science", "Engineering and technology"),
    ("Economics and business", "Social/behavioral sciences"),
    ("Engineering", "Engineering and technology"),
    ("Environment and ecology", "Earth and space sciences"),
    ("Geosciences", "Earth and space sciences"),
    ("Immunology", "Clinical medicine"),
    ("Materials science", "Engineering and technology"),
    ("Mathematics", "Mathematics"),
    ("Microbiology", "Biomedical research"),
    ("Molecular biology and genetics", "Biomedical research"),
    ("Multidisciplinary", "Engineering and technology"),
    ("Neuroscience and behavior", "Clinical medicine"),
    ("Pharmacology and toxicology", "Clinical medicine"),
    ("Physics", "Physics"),
    ("Plant and animal science", "Biology"),
    ("Psychiatry and psychology", "Clinical medicine"),
    ("Social sciences", "Social/behavioral sciences"),
    ("Space science", "Earth and space sciences"),
]
T = {
    "Mathematics": 1, "Engineering and technology": 5, "Biology": 8,
    "Earth and space sciences": 9, "Social/behavioral sciences": 13,
    "Chemistry": 15, "Physics": 19, "Clinical medicine": 78,
    "Biomedical research": 78,
}
H = {
    "Mathematics": 1, "Engineering and technology": 3, "Biology": 5,
    "Earth and space sciences": 6, "Social/behavioral sciences": 9,
    "Chemistry": 10, "Physics": 12, "Clinical medicine": 37,
    "Biomedical research": 37,
}
K = 10
POOL = 14
MONTHS = 24
YEARS = [1992, 1994, 1996, 1997, 1999, 2001]
MATH_LEVEL = 950.0


def months():
    y, m = 2003, 7
    for _ in range(MONTHS):
        yield date(y, m, 1)
        m += 1
        if m > 12:
            y, m = y + 1, 1


def code(field):
    return "".join(w[0] for w in field.replace("and ", "").split()).upper() + field[:3].upper()


def gen_snapshots(rng):
    nsf_members = {}
    for esi, nsf in MAPPING:
        nsf_members.setdefault(nsf, []).append(esi)
    rows = []
    for nsf, members in sorted(nsf_members.items()):
        offset = 0.0 if nsf == "Mathematics" else rng.uniform(-0.3, 0.3)
        target = (H[nsf] + offset) * MATH_LEVEL
        shares = [rng.uniform(0.6, 1.4) for _ in members]
        total = sum(shares)
        for esi, share in zip(members, shares):
            level = target * share / total
            strengths = sorted((rng.uniform(0.55, 1.7) for _ in range(POOL)), reverse=True)
            mean_top = sum(strengths[:K]) / K
            strengths = [s / mean_top * level for s in strengths]
            names = [f"{code(esi)}{i + 1:02d}, {chr(65 + i % 26)}" for i in range(POOL)]
            papers = [rng.randint(8, 900) for _ in range(POOL)]
            for d_idx, d in enumerate(months()):
                growth = 1.0 + 0.004 * d_idx
                scored = []
                for i in range(POOL):
                    c = max(0, round(strengths[i] * growth * rng.uniform(0.97, 1.03)))
                    scored.append((c, names[i], papers[i] + d_idx // 3))
                scored.sort(key=lambda t: (-t[0], t[1]))
                for rank, (c, name, p) in enumerate(scored[:K], start=1):
                    rows.append((d.isoformat(), esi, rank, name, p, c))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    return rows


def gen_totals(rng):
    math = {y: round(21000 * (1.05 ** (y - 1992))) for y in YEARS}
    rows = [(y, "Mathematics", math[y]) for y in YEARS]
    for nsf, t in sorted(T.items()):
        if nsf == "Mathematics":
            continue
        true_t = t + rng.uniform(-0.25, 0.25)
        for y in YEARS:
            rows.append((y, nsf, round(math[y] * true_t * rng.uniform(0.97, 1.03))))
    rows.sort()
    return rows


def check_snapshots(rows):
    """Spreadsheet-style recomputation: sum vectors per NSF field and date,
    pool every element, divide by the mathematics level."""
    nsf_of = dict(MAPPING)
    sums = {}
    for d, esi, rank, _name, _p, c in rows:
        key = (nsf_of[esi], d)
        vec = sums.setdefault(key, [0] * K)
        vec[rank - 1] += c
    pooled = {}
    for (nsf, _d), vec in sums.items():
        pooled.setdefault(nsf, []).extend(vec)
    level = {nsf: sum(v) / len(v) for nsf, v in pooled.items()}
    ratios = {nsf: level[nsf] / level["Mathematics"] for nsf in level}
    for nsf, r in sorted(ratios.items()):
        assert abs(r - H[nsf]) < 0.4, (nsf, r)
        assert int(r + 0.5) == H[nsf], (nsf, r)
    return level, ratios


def check_totals(rows):
    by = {}
    for y, f, t in rows:
        by.setdefault(f, {})[y] = t
    out = {}
    for f, pts in by.items():
        out[f] = sum(pts[y] / by["Mathematics"][y] for y in YEARS) / len(YEARS)
        assert int(out[f] + 0.5) == T[f], (f, out[f])
    return out


def main():
    rng = random.Random(20051)
    snaps = gen_snapshots(rng)
    level, ratios = check_snapshots(snaps)
    totals = gen_totals(rng)
    tr = check_totals(totals)
    with open("crates/core/data/hratio_snapshots.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["date", "esi_field", "rank", "name", "papers", "citations"])
        w.writerows(snaps)
    with open("crates/core/data/field_totals.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["year", "nsf_field", "total_citations"])
        w.writerows(totals)
    for nsf in sorted(ratios):
        print(f"{nsf:32s} level={level[nsf]:10.4f} H={ratios[nsf]:8.4f} T={tr[nsf]:8.4f}")


if __name__ == "__main__":
    main()
