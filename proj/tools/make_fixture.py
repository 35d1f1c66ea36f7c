#!/usr/bin/env python3
"""Regenerates data/synthetic_8.csv, the bundled 8-institution fixture.

Nine institutions are written; one ("Small College I") stays below the
50-document cutoff. Two multidisciplinary journals are used by every
institution so their inverse frequency is zero. Some rows carry raw-name
variants resolved by data/aliases.csv, non-citable doc types, or years
outside 2008-2010.
"""
import csv
import random
import sys

SEED = 20120101

MED = [("Journal of Clinical Medicine Research", "Medicine, General & Internal", True),
       ("Oncology Reports Quarterly", "Oncology", True),
       ("Pharmacology Letters", "Pharmacology & Pharmacy", False),
       ("Annals of Internal Practice", "Medicine, General & Internal", False),
       ("Tumour Biology Review", "Oncology", True),
       ("Drug Metabolism Today", "Pharmacology & Pharmacy", False),
       ("Cardiology Bulletin", "Cardiac & Cardiovascular Systems", True),
       ("Public Health Notes", "Public, Environmental & Occupational Health", False)]
ICT = [("Transactions on Computing Systems", "Computer Science, Theory & Methods", True),
       ("Telecom Networks Journal", "Telecommunications", False),
       ("Signal Processing Letters", "Engineering, Electrical & Electronic", True),
       ("Software Practice Review", "Computer Science, Software Engineering", False),
       ("Circuits and Devices", "Engineering, Electrical & Electronic", False),
       ("Machine Learning Studies", "Computer Science, Artificial Intelligence", True),
       ("Wireless Communication Letters", "Telecommunications", True),
       ("Information Systems Quarterly", "Computer Science, Information Systems", False)]
SHARED = [("Open Multidisciplinary Letters", "Multidisciplinary Sciences", False),
          ("Science Bulletin International", "Multidisciplinary Sciences", True)]

# name, raw-name variants, size, preference over MED + ICT (unnormalized)
INSTITUTIONS = [
    ("Hospital University A", ["  hospital   university a", "HUA"], 160,
     [9, 6, 5, 7, 4, 3, 6, 2] + [0, 0, 1, 0, 0, 1, 0, 0]),
    ("Medical School B", ["MEDICAL SCHOOL B"], 140,
     [8, 7, 4, 6, 5, 2, 5, 3] + [0, 0, 0, 0, 0, 1, 0, 1]),
    ("Health Sciences C", [], 120,
     [2, 1, 9, 2, 1, 8, 1, 7] + [0, 0, 0, 1, 0, 0, 0, 2]),
    ("Tech Institute D", ["tech institute  d"], 170,
     [0, 0, 0, 0, 0, 1, 0, 0] + [9, 6, 7, 5, 3, 8, 4, 2]),
    ("Polytechnic E", [], 130,
     [0, 1, 0, 0, 0, 0, 0, 0] + [7, 8, 6, 3, 5, 4, 7, 1]),
    ("Engineering F", [], 110,
     [0, 0, 0, 0, 0, 0, 0, 1] + [1, 3, 8, 1, 9, 1, 6, 1]),
    ("General University G", ["Univ. General G"], 180,
     [4, 3, 3, 3, 2, 2, 3, 2] + [4, 2, 3, 3, 2, 4, 2, 3]),
    ("Metropolitan University H", [], 105,
     [1, 1, 2, 1, 1, 2, 1, 4] + [1, 1, 1, 4, 1, 1, 1, 6]),
    ("Small College I", [], 30,
     [1, 0, 0, 0, 0, 0, 0, 1] + [0, 0, 0, 1, 0, 0, 0, 1]),
]
DOC_TYPES = ["article"] * 16 + ["review"] * 2 + ["letter", "note", "editorial", "other", "Meeting Abstract"]


def main(path):
    rng = random.Random(SEED)
    journals = MED + ICT
    rows = []
    for name, variants, size, prefs in INSTITUTIONS:
        names = [name] + variants
        for k in range(size):
            # first two rows of every institution go to the shared journals
            if k < 2:
                journal, cat, q1 = SHARED[k]
            else:
                journal, cat, q1 = rng.choices(journals, weights=prefs)[0]
            cats = [cat]
            if rng.random() < 0.15:
                cats.append("Multidisciplinary Sciences")
            year = rng.choice([2007, 2008, 2008, 2009, 2009, 2010, 2010, 2011])
            doc = rng.choice(DOC_TYPES)
            if k < 2:
                year, doc = 2009, "article"
            rows.append([rng.choice(names), journal, year, doc, ";".join(cats), 1 if q1 else 0])
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["institution", "journal", "year", "doc_type", "categories", "is_q1"])
        w.writerows(rows)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/synthetic_8.csv")
