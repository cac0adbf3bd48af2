#!/usr/bin/env python3
"""Writes the offline fixture set under data/.

The output is committed; rerun only when a fixture has to change, then
regenerate the golden files (see tests/golden/README.md).
"""
import json
import pathlib
import random

from PIL import Image, ImageDraw

ROOT = pathlib.Path(__file__).resolve().parent.parent / "data"

TASKS = [
    ("Cloud Removal", ["cloud_removal"],
     "Call cloud_removal on the input image first. Report that the clouds were removed and return the processed image.",
     "Optical image partly covered by clouds."),
    ("Image Dehazing", ["image_dehazing"],
     "Run image_dehazing on the hazy or foggy image, then describe the visibility gain and return the dehazed image.",
     "Optical image with haze or fog."),
    ("Super Resolution", ["super_resolution"],
     "Use super_resolution to upscale the image by a factor of two and return the enhanced image.",
     "Low resolution optical image."),
    ("Denoising", ["denoising"],
     "Apply denoising to remove sensor noise, then return the cleaned image.",
     "Noisy optical or SAR image."),
    ("Image Captioning", ["caption"],
     "Answer questions about image content with caption. Pass the user question as the tool input.",
     "Any optical image."),
    ("Object Detection", ["optical_detection", "optical_plane_type"],
     "Count and locate objects with optical_detection first. When the user asks for aircraft categories, follow with optical_plane_type on the detection result.",
     "Optical image with aircraft, ships or vehicles."),
    ("Optical Plane Classification", ["optical_plane_type"],
     "Recognize aircraft types in optical imagery with optical_plane_type and list the types with their counts.",
     "Optical image of an airport apron."),
    ("Scene Classification", ["scene"],
     "Classify the whole image into a scene category with scene and report the label.",
     "Any optical image."),
    ("SAR Detection", ["sar_detection"],
     "Detect targets in SAR imagery with sar_detection and report counts per class.",
     "Synthetic aperture radar image."),
    ("SAR Plane Classification", ["sar_detection", "sar_plane_type"],
     "Locate aircraft in the SAR image with sar_detection, then identify each type with sar_plane_type.",
     "SAR image of an airfield."),
    ("Knowledge Search", ["knowledge_search"],
     "For factual questions about aircraft, call knowledge_search with the keywords of the query, each with an importance weight, and answer from the retrieved documents.",
     "Text question; no image needed."),
    ("Building Damage Detection", ["building_damage_detection"],
     "Assess damage with building_damage_detection and list the damaged building ids and damage levels.",
     "Post-disaster optical image."),
    ("Building Extraction", ["building_extraction"],
     "Extract building footprints with building_extraction and report how many buildings were found.",
     "Optical image of a built-up area."),
    ("Road Extraction", ["road_extraction"],
     "Extract the road network with road_extraction and report the road coverage.",
     "Optical image with roads."),
    ("Horizontal Detection", ["horizontal_object_detection"],
     "Use horizontal_object_detection when axis-aligned boxes are requested and list the boxes.",
     "Optical image with objects."),
    ("Rotated Detection", ["rotated_object_detection"],
     "Use rotated_object_detection when oriented boxes are requested and list the rotated boxes.",
     "Optical image with oriented objects."),
    ("Semantic Segmentation", ["semantic_segmentation"],
     "Segment the image into classes with semantic_segmentation and report the share of each class.",
     "Any optical image."),
    ("Land Use Classification", ["land_use_classification"],
     "Categorize land use with land_use_classification and report the land use shares.",
     "Optical image of mixed land use."),
]

# name, manufacturer, country, role, engines
AIRCRAFT = [
    ("Boeing 737", "Boeing", "United States", "narrow-body airliner", "two engines"),
    ("Boeing 747", "Boeing", "United States", "wide-body airliner", "four engines"),
    ("Boeing 757", "Boeing", "United States", "narrow-body airliner", "two engines"),
    ("Boeing 767", "Boeing", "United States", "wide-body airliner", "two engines"),
    ("Boeing 777", "Boeing", "United States", "wide-body airliner", "two engines"),
    ("Boeing 787", "Boeing", "United States", "wide-body airliner", "two engines"),
    ("Airbus A220", "Airbus", "Canada", "narrow-body airliner", "two engines"),
    ("Airbus A310", "Airbus", "France", "wide-body airliner", "two engines"),
    ("Airbus A318", "Airbus", "France", "narrow-body airliner", "two engines"),
    ("Airbus A319", "Airbus", "France", "narrow-body airliner", "two engines"),
    ("Airbus A320", "Airbus", "France", "narrow-body airliner", "two engines"),
    ("Airbus A321", "Airbus", "Germany", "narrow-body airliner", "two engines"),
    ("Airbus A330", "Airbus", "France", "wide-body airliner", "two engines"),
    ("Airbus A340", "Airbus", "France", "wide-body airliner", "four engines"),
    ("Airbus A350", "Airbus", "France", "wide-body airliner", "two engines"),
    ("Airbus A380", "Airbus", "France", "wide-body airliner", "four engines"),
    ("COMAC ARJ21", "COMAC", "China", "regional jet", "two engines"),
    ("COMAC C919", "COMAC", "China", "narrow-body airliner", "two engines"),
    ("Embraer E190", "Embraer", "Brazil", "regional jet", "two engines"),
    ("Embraer E195", "Embraer", "Brazil", "regional jet", "two engines"),
    ("Bombardier CRJ900", "Bombardier", "Canada", "regional jet", "two engines"),
    ("ATR 72", "ATR", "France", "turboprop airliner", "two engines"),
    ("De Havilland Dash 8", "De Havilland Canada", "Canada", "turboprop airliner", "two engines"),
    ("Tupolev Tu-154", "Tupolev", "Russia", "narrow-body airliner", "three engines"),
    ("Ilyushin Il-76", "Ilyushin", "Russia", "strategic airlifter", "four engines"),
    ("Antonov An-124", "Antonov", "Ukraine", "strategic airlifter", "four engines"),
    ("Antonov An-225", "Antonov", "Ukraine", "strategic airlifter", "six engines"),
    ("Lockheed C-130 Hercules", "Lockheed Martin", "United States", "tactical airlifter", "four engines"),
    ("Boeing C-17 Globemaster III", "Boeing", "United States", "strategic airlifter", "four engines"),
    ("Lockheed C-5 Galaxy", "Lockheed Martin", "United States", "strategic airlifter", "four engines"),
    ("Boeing KC-135 Stratotanker", "Boeing", "United States", "aerial tanker", "four engines"),
    ("McDonnell Douglas KC-10 Extender", "McDonnell Douglas", "United States", "aerial tanker", "three engines"),
    ("Boeing E-3 Sentry", "Boeing", "United States", "airborne early warning aircraft", "four engines"),
    ("Northrop Grumman E-2 Hawkeye", "Northrop Grumman", "United States", "airborne early warning aircraft", "two engines"),
    ("Boeing P-8 Poseidon", "Boeing", "United States", "maritime patrol aircraft", "two engines"),
    ("Boeing B-52 Stratofortress", "Boeing", "United States", "strategic bomber", "eight engines"),
    ("Rockwell B-1 Lancer", "Rockwell", "United States", "strategic bomber", "four engines"),
    ("Northrop B-2 Spirit", "Northrop Grumman", "United States", "strategic bomber", "four engines"),
    ("Tupolev Tu-95", "Tupolev", "Russia", "strategic bomber", "four engines"),
    ("Tupolev Tu-160", "Tupolev", "Russia", "strategic bomber", "four engines"),
    ("Tupolev Tu-22M", "Tupolev", "Russia", "strategic bomber", "two engines"),
    ("McDonnell Douglas F-15 Eagle", "McDonnell Douglas", "United States", "fighter", "two engines"),
    ("General Dynamics F-16 Fighting Falcon", "General Dynamics", "United States", "fighter", "one engine"),
    ("Boeing F/A-18 Super Hornet", "Boeing", "United States", "fighter", "two engines"),
    ("Lockheed Martin F-22 Raptor", "Lockheed Martin", "United States", "fighter", "two engines"),
    ("Lockheed Martin F-35 Lightning II", "Lockheed Martin", "United States", "fighter", "one engine"),
    ("Sukhoi Su-27", "Sukhoi", "Russia", "fighter", "two engines"),
    ("Sukhoi Su-30", "Sukhoi", "Russia", "fighter", "two engines"),
    ("Sukhoi Su-35", "Sukhoi", "Russia", "fighter", "two engines"),
    ("Mikoyan MiG-29", "Mikoyan", "Russia", "fighter", "two engines"),
    ("Chengdu J-10", "Chengdu Aircraft Corporation", "China", "fighter", "one engine"),
    ("Chengdu J-20", "Chengdu Aircraft Corporation", "China", "fighter", "two engines"),
    ("Dassault Rafale", "Dassault Aviation", "France", "fighter", "two engines"),
    ("Eurofighter Typhoon", "Eurofighter GmbH", "Germany", "fighter", "two engines"),
    ("Dassault Mirage 2000", "Dassault Aviation", "France", "fighter", "one engine"),
    ("Saab JAS 39 Gripen", "Saab", "Sweden", "fighter", "one engine"),
    ("Panavia Tornado", "Panavia Aircraft GmbH", "Germany", "strike aircraft", "two engines"),
    ("Fairchild Republic A-10 Thunderbolt II", "Fairchild Republic", "United States", "attack aircraft", "two engines"),
    ("Lockheed U-2", "Lockheed Martin", "United States", "reconnaissance aircraft", "one engine"),
    ("Lockheed SR-71 Blackbird", "Lockheed Martin", "United States", "reconnaissance aircraft", "two engines"),
    ("General Atomics MQ-9 Reaper", "General Atomics", "United States", "unmanned aerial vehicle", "one engine"),
    ("Northrop Grumman RQ-4 Global Hawk", "Northrop Grumman", "United States", "unmanned aerial vehicle", "one engine"),
    ("Bell Boeing V-22 Osprey", "Bell Boeing", "United States", "tiltrotor", "two engines"),
    ("Xian Y-20", "Xian Aircraft Industrial Corporation", "China", "strategic airlifter", "four engines"),
    ("Shaanxi KJ-2000", "Shaanxi Aircraft Corporation", "China", "airborne early warning aircraft", "four engines"),
]

ENGINE_WORDS = {"one engine": "a single engine"}


def aircraft_chunk(name, maker, country, role, engines):
    article = "an" if role[0] in "aeiou" else "a"
    where = "the United States" if country == "United States" else country
    prose = (f"The {name} is {article} {role} built by {maker} in {where}. "
             f"It is powered by {ENGINE_WORDS.get(engines, engines)}. "
             f"In overhead imagery the {name} is identified by its wing planform, fuselage length and engine layout.")
    triples = [
        (name, "manufactured_by", maker),
        (name, "origin_country", country),
        (name, "has_role", role),
        (name, "has_engines", engines),
        (maker, "based_in", country),
    ]
    return prose, triples


def write_jsonl(path, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n")


def solutions():
    rows = []
    for label, tools, guidance, notes in TASKS:
        rows.append({"task_type": label, "guidance": guidance, "tools": tools, "input_notes": notes})
    write_jsonl(ROOT / "solutions.jsonl", rows)


def knowledge():
    assert len(AIRCRAFT) == 65, len(AIRCRAFT)
    rows, entities, relations = [], set(), set()
    for a in AIRCRAFT:
        prose, triples = aircraft_chunk(*a)
        lines = [prose] + [f"{h} -{r}-> {t}" for h, r, t in triples]
        rows.append({"text": "\n".join(lines), "source_ref": "aircraft/" + a[0].lower().replace(" ", "_").replace("/", "_")})
        for h, r, t in triples:
            entities.update([h, t])
            relations.add((h, r, t))
    write_jsonl(ROOT / "knowledge" / "aircraft.jsonl", rows)
    manifest = {"chunks": len(rows), "entities": len(entities), "relations": len(relations), "extractor": "mock"}
    (ROOT / "knowledge" / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


IMAGES = {
    "cloudy": ((200, 200, 210), {"caption": "A coastal town partly hidden by clouds.", "scene": "residential"}),
    "airport": ((120, 120, 110), {
        "caption": "An airport apron with three parked airplanes.",
        "scene": "airport",
        "objects": [
            {"label": "airplane", "box": [10, 12, 20, 18], "angle": 30},
            {"label": "airplane", "box": [40, 10, 22, 18], "angle": 30},
            {"label": "airplane", "box": [12, 40, 20, 16], "angle": 90},
            {"label": "vehicle", "box": [50, 50, 4, 3], "angle": 0},
        ],
        "plane_types": ["Boeing 737", "Boeing 737", "Airbus A320"],
    }),
    "farmland": ((90, 140, 60), {
        "caption": "Farmland with a small village and a river.",
        "scene": "farmland",
        "segments": {"cropland": 0.62, "water": 0.08, "building": 0.05, "forest": 0.25},
        "land_use": {"agricultural": 0.7, "residential": 0.1, "forest": 0.2},
    }),
    "quake": ((140, 110, 90), {
        "caption": "A town after an earthquake.",
        "scene": "residential",
        "buildings": [{"id": "b1", "damage": "none"}, {"id": "b2", "damage": "major"},
                      {"id": "b3", "damage": "destroyed"}, {"id": "b4", "damage": "minor"}],
    }),
    "suburb": ((150, 150, 140), {
        "caption": "A suburb with a grid of streets.",
        "scene": "residential",
        "road_coverage": 0.183,
        "buildings": [{"id": "h1", "damage": "none"}, {"id": "h2", "damage": "none"}],
    }),
    "lowres": ((100, 100, 130), {"caption": "A blurry harbor.", "scene": "harbor"}),
    "sar_port": ((60, 60, 60), {
        "scene": "harbor",
        "sar_objects": [{"label": "ship", "box": [5, 5, 10, 4]}, {"label": "ship", "box": [30, 20, 12, 5]},
                        {"label": "aircraft", "box": [44, 44, 8, 8]}],
        "sar_plane_types": ["Boeing 737"],
    }),
    "hazy": ((180, 180, 170), {
        "caption": "A river bridge between two districts.",
        "scene": "bridge",
        "vqa": {"What is in this image?": "A river bridge between two districts."},
    }),
}


def images():
    out = ROOT / "images"
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(7)
    for name, (rgb, manifest) in IMAGES.items():
        img = Image.new("RGB", (64, 64), rgb)
        draw = ImageDraw.Draw(img)
        for o in manifest.get("objects", []) + manifest.get("sar_objects", []):
            x, y, w, h = o["box"]
            draw.rectangle([x, y, x + w, y + h], outline=(255, 255, 255))
        for _ in range(20):
            x, y = rng.randrange(64), rng.randrange(64)
            img.putpixel((x, y), tuple(min(255, c + 40) for c in rgb))
        img.save(out / f"{name}.png", optimize=False)
        (out / f"{name}.png.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


# query, task label, image, scripted tool steps [(tool, input)], answer
GOLDEN = [
    ("Remove the clouds in this image.", "Cloud Removal", "cloudy",
     [("cloud_removal", "Remove the clouds in this image.")],
     "The clouds have been removed. The processed image is attached."),
    ("Who manufactures Boeing 747?", "Knowledge Search", None,
     [("knowledge_search", "Boeing 747: 9; manufacturer: 6")],
     "The Boeing 747 is manufactured by Boeing in the United States."),
    ("How many airplanes are parked in this image? And what are their categories?", "Object Detection", "airport",
     [("optical_detection", "airplane"), ("optical_plane_type", "classify the detected airplanes")],
     "There are 3 airplanes: 2 Boeing 737 and 1 Airbus A320."),
    ("What is the scene category of this image?", "Scene Classification", "farmland",
     [("scene", "")],
     "The scene is farmland."),
    ("Which buildings are damaged?", "Building Damage Detection", "quake",
     [("building_damage_detection", "")],
     "Buildings b2, b3 and b4 are damaged; b3 is destroyed."),
    ("Extract roads from the scene.", "Road Extraction", "suburb",
     [("road_extraction", "")],
     "Roads cover 18.3% of the scene. The road mask is attached."),
    ("Enhance the resolution of this image.", "Super Resolution", "lowres",
     [("super_resolution", "2x")],
     "The image has been upscaled by a factor of two."),
    ("Find the objects in this SAR image.", "SAR Detection", "sar_port",
     [("sar_detection", "")],
     "The SAR image contains 2 ships and 1 aircraft."),
    ("What are the land use types in this image?", "Land Use Classification", "farmland",
     [("land_use_classification", "")],
     "Land use is 70% agricultural, 20% forest and 10% residential."),
    ("Dehaze this foggy image, then tell me what is in it.", "Image Dehazing", "hazy",
     [("image_dehazing", ""), ("caption", "What is in this image?")],
     "After dehazing, the image shows a river bridge between two districts."),
]

STAGE1 = "Reply with the category name only."
STAGE2 = "Available tools:"
KEYWORDS = "Reply with one \"keyword: score\" pair per line."


def script_and_cases():
    rules, cases = [], []
    for query, label, image, steps, answer in GOLDEN:
        user = "User Input: " + query
        rules.append({"contains": [STAGE1, user], "reply": label})
        # Later steps first: the first matching rule wins.
        rules.append({"contains": [STAGE2, user, f"Observation from {steps[-1][0]}:"], "reply": "ANSWER: " + answer})
        for i in range(len(steps) - 1, -1, -1):
            tool, arg = steps[i]
            must = [STAGE2, user] + ([f"Observation from {steps[i - 1][0]}:"] if i > 0 else [])
            reply = f"TOOL: {tool} | INPUT: {arg}" if arg else f"TOOL: {tool}"
            rules.append({"contains": must, "reply": reply})
        if any(t == "knowledge_search" for t, _ in steps):
            rules.append({"contains": [KEYWORDS, user], "reply": "Boeing 747: 9\nmanufacturer: 6"})
        case = {"query": query, "expected_first_tool": steps[0][0], "task_label": label}
        if image:
            case["image"] = f"../images/{image}.png"
        cases.append(case)
    write_jsonl(ROOT / "scripts" / "golden.jsonl", rules)
    write_jsonl(ROOT / "eval" / "planning_golden.jsonl", cases)


def counting():
    rows = [{"gt": 10, "p": 20}, {"gt": 3, "p": 3}, {"gt": 0, "p": 0}, {"gt": 0, "p": 2},
            {"gt": 12, "p": 9}, {"gt": 150, "p": 98}, {"gt": 1200, "p": 1100}, {"gt": 7, "p": 7}]
    write_jsonl(ROOT / "eval" / "counting.jsonl", rows)


def judge():
    q = "What distinguishes the Boeing 747 from the Airbus A380 in overhead imagery?"
    short = "The A380 is larger."
    long = ("The Boeing 747 has a partial upper deck hump near the nose and four engines on swept wings; "
            "the Airbus A380 has a full-length upper deck, a wider wingspan and four engines. "
            "From above, the A380's wing root is deeper and its fuselage is wider.")
    pairs = [{"question": q, "answer_a": short, "answer_b": long}]
    write_jsonl(ROOT / "eval" / "judge_pairs.jsonl", pairs)
    rules = [
        {"contains": ["Answer 1:\n" + short], "reply": "Comprehensiveness: Answer 2\nDiversity: Answer 2\nEmpowerment: Answer 2\nOverall: Answer 2"},
        {"contains": ["Answer 1:\n" + long], "reply": "Comprehensiveness: Answer 1\nDiversity: Answer 1\nEmpowerment: Answer 1\nOverall: Answer 1"},
    ]
    write_jsonl(ROOT / "scripts" / "judge.jsonl", rules)


def config():
    (ROOT / "offline.conf").write_text(
        "# Offline demo: scripted model, hashing embedder, mock tools.\n"
        "# Paths are relative to the repository root.\n"
        "data_dir = rsagent-data\n"
        "llm.backend = scripted\n"
        "llm.script = data/scripts/golden.jsonl\n"
        "solutions = data/solutions.jsonl\n"
        "knowledge = data/knowledge/aircraft.jsonl\n"
        "fixtures = data/images\n"
        "retrieval.top_n = 5\n")


if __name__ == "__main__":
    solutions()
    knowledge()
    images()
    script_and_cases()
    counting()
    judge()
    config()
