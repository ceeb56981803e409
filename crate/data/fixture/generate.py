"""Regenerates the bundled 40-paper fixture corpus (deterministic)."""
import csv
import random

rng = random.Random(20140901)

TOPICS = {
    "volume": ["Volume Rendering", "direct volume rendering", "transfer functions", "GPU,", "isosurfaces", "isosurface"],
    "flow": ["flow visualization", "vector fields", "streamlines", "Flow Visualization."],
    "graph": ["graph visualization", "node-link diagrams", "clustering", "treemaps"],
    "analytics": ["sensemaking", "text analysis", "interaction", "provenance"],
    "evaluation": ["user study", "evaluation", "perception", "interaction"],
}
GENERIC = ["visualization", "information visualization", "visual analytics"]
VENUE_TOPICS = {
    "InfoVis": ["graph", "graph", "evaluation", "analytics"],
    "VAST": ["analytics", "analytics", "evaluation", "graph"],
    "SciVis": ["volume", "volume", "flow", "flow"],
}

rows = []
pid = 0
for year in range(2004, 2014):
    for venue in ["InfoVis", "VAST", "SciVis"]:
        n = {"InfoVis": 2, "VAST": 1, "SciVis": 1}[venue] if year % 2 == 0 else {"InfoVis": 1, "VAST": 1, "SciVis": 2}[venue]
        for _ in range(n):
            pid += 1
            topic = rng.choice(VENUE_TOPICS[venue])
            pool = TOPICS[topic]
            k = rng.randint(2, 4)
            # Zipf-like pick: earlier keywords in a topic are more common.
            weights = [1.0 / (i + 1) ** 1.2 for i in range(len(pool))]
            kws = []
            while len(kws) < k:
                kw = rng.choices(pool, weights)[0]
                if kw not in kws:
                    kws.append(kw)
            if topic == "flow" and year >= 2010 and "flow visualization" in kws and rng.random() < 0.6:
                kws.remove("flow visualization")
            if year >= 2009 and rng.random() < (year - 2008) / 8:
                kws.append("interaction")
            if rng.random() < 0.3:
                kws.append(rng.choice(GENERIC))
            if rng.random() < 0.15:
                other = rng.choice([t for t in TOPICS if t != topic])
                kws.append(TOPICS[other][0])
            rows.append([f"v{pid:03d}", f"Fixture paper {pid}", venue, year, ";".join(dict.fromkeys(kws))])

# Two papers without keywords.
rows[7][4] = ""
rows[23][4] = ""
assert len(rows) == 40

with open("vis40.csv", "w", newline="") as f:
    w = csv.writer(f)
    w.writerow(["id", "title", "venue", "year", "keywords"])
    w.writerows(rows)
print(len(rows))
