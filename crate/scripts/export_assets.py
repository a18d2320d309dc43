#!/usr/bin/env python3
"""Regenerate the lexicon assets under crates/core/assets/.

Inputs are the unpacked source distributions of afinn 0.1, pattern3 3.0.0
and ekphrasis 0.5.4 (all fetched with `pip download --no-deps`):

    python3 scripts/export_assets.py <unpacked-dir> crates/core/assets

The emoticon list and the stopword list are maintained by hand and are not
touched by this script.
"""
import ast
import collections
import os
import re
import sys
import xml.etree.ElementTree as ET

src, dst = sys.argv[1], sys.argv[2]
pattern_en = os.path.join(src, "pattern3-3.0.0", "pattern3", "text", "en")
wordnet_dir = os.path.join(pattern_en, "wordnet", "dict")
afinn_path = os.path.join(src, "afinn-0.1", "afinn", "data", "AFINN-111.txt")
slang_path = os.path.join(src, "ekphrasis", "dicts", "noslang", "slangdict.py")

WORD = re.compile(r"^[a-z]+$")


def norm(text):
    text = text.lower().replace("'", "").replace("’", "")
    text = re.sub(r"[^a-z0-9 ]+", " ", text)
    return " ".join(text.split())


stopwords = set()
with open(os.path.join(dst, "stopwords.txt")) as f:
    for line in f:
        line = line.strip()
        if line and not line.startswith("#"):
            stopwords.add(line)

# AFINN-111: single-word entries only; multi-word phrases never match a token.
afinn = {}
with open(afinn_path, encoding="utf-8") as f:
    for line in f:
        word, score = line.rstrip("\n").split("\t")
        if WORD.match(word):
            afinn[word] = int(score)
with open(os.path.join(dst, "afinn.tsv"), "w") as out:
    out.write("# AFINN-111 (Finn Aarup Nielsen), single-word entries. ODbL 1.0.\n")
    for word in sorted(afinn):
        out.write(f"{word}\t{afinn[word]}\n")

# Subjectivity: mean over senses of each form in the Pattern lexicon (PDDL).
senses = collections.defaultdict(list)
for node in ET.parse(os.path.join(pattern_en, "en-sentiment.xml")).getroot():
    form = node.get("form", "").lower()
    if WORD.match(form):
        senses[form].append(float(node.get("subjectivity")))
with open(os.path.join(dst, "subjectivity.tsv"), "w") as out:
    out.write("# Pattern 2.6 English adjective lexicon, subjectivity averaged per form. PDDL.\n")
    for word in sorted(senses):
        vals = senses[word]
        out.write(f"{word}\t{round(sum(vals) / len(vals), 4)}\n")

# WordNet 3.0 synonyms of every AFINN word, all senses, single-word lemmas.
members = collections.defaultdict(set)
for name in ("data.adj", "data.adv", "data.noun1", "data.noun2", "data.verb"):
    with open(os.path.join(wordnet_dir, name), encoding="latin-1") as f:
        for line in f:
            if line.startswith("  "):
                continue
            parts = line.split()
            if len(parts) < 5:
                continue
            count = int(parts[3], 16)
            lemmas = []
            for i in range(count):
                lemma = re.sub(r"\(.*\)$", "", parts[4 + 2 * i]).lower()
                lemmas.append(lemma)
            for lemma in lemmas:
                members[lemma].update(lemmas)
with open(os.path.join(dst, "synonyms.tsv"), "w") as out:
    out.write("# WordNet 3.0 synonyms of AFINN-111 words. WordNet 3.0 license (Princeton).\n")
    for word in sorted(afinn):
        syns = sorted(
            s for s in members.get(word, ())
            if s != word and WORD.match(s) and s not in afinn and s not in stopwords
        )
        if syns:
            out.write(f"{word}\t{','.join(syns)}\n")

# Brill lexicon mapped onto the coarse tagset.
COARSE = [
    ("PRP", "PRON"), ("WP", "PRON"), ("EX", "PRON"),
    ("NN", "NOUN"), ("VB", "VERB"), ("MD", "VERB"), ("JJ", "ADJ"),
    ("RB", "ADV"), ("WRB", "ADV"), ("DT", "DET"), ("PDT", "DET"), ("WDT", "DET"),
    ("IN", "PREP"), ("TO", "PREP"), ("CC", "CONJ"), ("CD", "NUM"), ("UH", "INTJ"),
]


def coarse(tag):
    tag = tag.split("|")[0]
    for prefix, out in COARSE:
        if tag.startswith(prefix):
            return out
    return "OTHER"


tags = {}
with open(os.path.join(pattern_en, "en-lexicon.txt"), encoding="utf-8") as f:
    for line in f:
        if line.startswith(";;;"):
            continue
        parts = line.split()
        if len(parts) == 2 and WORD.match(parts[0]) and not parts[1].startswith("NNP"):
            tags.setdefault(parts[0], coarse(parts[1]))
with open(os.path.join(dst, "pos_lexicon.tsv"), "w") as out:
    out.write("# Brill tagger lexicon v1.14 (via Pattern), first tag per word, coarse tagset.\n")
    for word in sorted(tags):
        out.write(f"{word}\t{tags[word]}\n")

# noslang.com-derived acronym dictionary shipped with ekphrasis (MIT).
with open(slang_path, encoding="utf-8") as f:
    tree = ast.parse(f.read())
slang = None
for node in tree.body:
    if isinstance(node, ast.Assign) and isinstance(node.value, ast.Dict):
        slang = ast.literal_eval(node.value)
        break
CHAT_FORMS = {
    "u": "you", "ur": "your", "r": "are", "n": "and", "c": "see",
    "k": "okay", "w": "with", "y": "why", "b4": "before", "2day": "today",
}
acronyms = {}
# Lowercase spellings first so that "u" maps to "you" rather than a capitalized variant.
for key, value in sorted(slang.items(), key=lambda kv: kv[0] != kv[0].lower()):
    key = norm(key)
    value = norm(value)
    if not re.match(r"^[a-z0-9]+$", key) or not value or value == "unknown" or value == key:
        continue
    # Ordinary dictionary words and function words are left alone.
    if key in members and key in tags:
        continue
    if key in stopwords or len(key) == 1:
        continue
    acronyms.setdefault(key, value)
acronyms.update(CHAT_FORMS)
with open(os.path.join(dst, "acronyms.tsv"), "w") as out:
    out.write("# Chat acronyms from the noslang dictionary bundled with ekphrasis 0.5.4. MIT.\n")
    for key in sorted(acronyms):
        out.write(f"{key}\t{acronyms[key]}\n")

print(len(afinn), len(senses), len(tags), len(acronyms))
