#!/usr/bin/env python3
"""Writes the seven-scenario coverage library used by `sci stats`.

Counts per scenario are an even split of the aggregate induced/curated
totals, so the library as a whole sums to them exactly.
"""
import argparse
import json
import pathlib

SCENARIOS = [
    "chemical spill",
    "coup",
    "disease outbreak",
    "general IED",
    "radioactive spill",
    "riot",
    "terrorist attack",
]
ROLES = ["Agent", "Patient", "Place", "Instrument", "Beneficiary"]
ENTITY_NAMES = ["perpetrator", "victim", "location", "device", "authority"]

TOTALS = {
    "induced_events": 376,
    "induced_participants": 957,
    "curated_events": 377,
    "curated_participants": 604,
}


def split(total, parts):
    base, extra = divmod(total, parts)
    return [base + (1 if i < extra else 0) for i in range(parts)]


def slug(name):
    return "-".join(name.lower().split())


def build(scenario, induced_events, curated_events, induced_parts, curated_parts):
    doc_id = f"sci:{slug(scenario)}"
    provenance = {}
    root_id = f"{doc_id}/Events/1"
    entities = []
    for i, name in enumerate(ENTITY_NAMES, start=1):
        eid = f"{doc_id}/Entities/{i}"
        entities.append({"@id": eid, "name": name})
        provenance[eid] = "induced"

    primitives = []
    for n in range(2, induced_events + curated_events + 1):
        origin = "induced" if n <= induced_events else "curated"
        primitives.append({"id": f"{doc_id}/Events/{n}", "origin": origin, "participants": []})
        provenance[f"{doc_id}/Events/{n}"] = origin
    provenance[root_id] = "induced"

    induced_prims = [p for p in primitives if p["origin"] == "induced"]
    counter = 0
    for origin, count, pool in (("induced", induced_parts, induced_prims), ("curated", curated_parts, primitives)):
        for k in range(count):
            counter += 1
            pid = f"{doc_id}/Participants/{counter}"
            slot = k % len(ROLES)
            pool[k % len(pool)]["participants"].append(
                {"@id": pid, "roleName": ROLES[slot], "entity": entities[slot]["@id"]}
            )
            provenance[pid] = origin

    def event(eid, name, **kw):
        ev = {
            "@id": eid,
            "name": name,
            "description": "",
            "isSchema": False,
            "repeatable": False,
            "optional": False,
            "outlinks": [],
            "participants": [],
            "children": [],
            "entities": [],
            "relations": [],
        }
        ev.update(kw)
        return ev

    events = [
        event(
            root_id,
            scenario,
            isSchema=True,
            children=[p["id"] for p in primitives],
            entities=entities,
        )
    ]
    for i, p in enumerate(primitives):
        outlinks = []
        if p["origin"] == "induced" and i + 1 < len(induced_prims):
            outlinks = [induced_prims[i + 1]["id"]]
        events.append(
            event(
                p["id"],
                f"{scenario} step {i + 1}",
                outlinks=outlinks,
                participants=p["participants"],
            )
        )
    return {
        "@id": doc_id,
        "sdfVersion": "3.0",
        "version": "1",
        "events": events,
        "provenance": provenance,
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_dir", type=pathlib.Path)
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    k = len(SCENARIOS)
    # The root chapter of every file is induced, so it comes out of the induced share.
    ie = split(TOTALS["induced_events"], k)
    ce = split(TOTALS["curated_events"], k)
    ip = split(TOTALS["induced_participants"], k)
    cp = split(TOTALS["curated_participants"], k)
    for i, scenario in enumerate(SCENARIOS):
        doc = build(scenario, ie[i], ce[i], ip[i], cp[i])
        path = args.out_dir / f"{slug(scenario)}.json"
        path.write_text(json.dumps(doc, indent=2) + "\n")


if __name__ == "__main__":
    main()
